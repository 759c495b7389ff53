"""Market primitives, seller-type distributions, signals and welfare outcomes.

Every type here is immutable after construction. Probabilities are validated
on construction with an absolute tolerance of ``PROB_TOL``; inputs that fail
are rejected rather than renormalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

PROB_TOL = 1e-12
PAYOFF_TOL = 1e-9
QUAD_EPSABS = 1e-10


class InfoDesignError(Exception):
    """Base class for all library errors."""


class InvalidInterval(InfoDesignError, ValueError):
    pass


class DegeneratePrior(InfoDesignError, ValueError):
    """The basic prior is 0 or 1, so no signal can move beliefs."""


class NotBayesPlausible(InfoDesignError, ValueError):
    pass


class NotIncentiveCompatible(InfoDesignError, ValueError):
    pass


class DegenerateCutoffs(InfoDesignError, ValueError):
    pass


class BoundaryCase(InfoDesignError, ValueError):
    pass


class NoEfficientSignalFound(InfoDesignError, RuntimeError):
    pass


class ZeroProbabilityRealization(InfoDesignError, ValueError):
    pass


class InfeasibleConstraints(InfoDesignError, RuntimeError):
    pass


class FullSupportRequired(InfoDesignError, ValueError):
    pass


class SolverError(InfoDesignError, RuntimeError):
    """A numerical routine produced a result that failed its own certificate."""


def _check_prob(x: float, name: str) -> None:
    if not (-PROB_TOL <= x <= 1 + PROB_TOL):
        raise ValueError(f"{name}={x!r} is not a probability")


@dataclass(frozen=True)
class MarketPrimitives:
    """Binary buyer values ``low < high``."""

    low: float
    high: float

    def __post_init__(self):
        if not (self.high > self.low > 0):
            raise ValueError(f"need high > low > 0, got low={self.low}, high={self.high}")

    @property
    def ratio(self) -> float:
        """The pricing cutoff L/H on the posterior that the value is high."""
        return self.low / self.high

    @property
    def gap(self) -> float:
        return self.high - self.low


# ---------------------------------------------------------------------------
# Type distributions
# ---------------------------------------------------------------------------


class TypeDistribution:
    """Distribution of the seller's type θ = Pr(v = H) on [0, 1].

    Subclasses expose an atomic part (``atoms``) and an absolutely continuous
    part with piecewise-constant density (``segments``). Everything downstream
    is written against those two views.
    """

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        return np.empty(0), np.empty(0)

    def segments(self) -> list[tuple[float, float, float]]:
        """(lo, hi, density) triples of the continuous part."""
        return []

    def mean(self) -> float:
        th, w = self.atoms()
        total = float(np.dot(th, w))
        for lo, hi, d in self.segments():
            total += d * (hi * hi - lo * lo) / 2
        return total

    def cdf(self, x: float) -> float:
        th, w = self.atoms()
        total = float(w[th <= x].sum())
        for lo, hi, d in self.segments():
            if x > lo:
                total += d * (min(x, hi) - lo)
        return min(total, 1.0)

    def continuous_moment(self, a: float, b: float, order: int) -> float:
        """∫_a^b θ^order dF over the continuous part only (order 0 or 1)."""
        total = 0.0
        for lo, hi, d in self.segments():
            lo2, hi2 = max(lo, a), min(hi, b)
            if hi2 > lo2:
                if order == 0:
                    total += d * (hi2 - lo2)
                else:
                    total += d * (hi2 * hi2 - lo2 * lo2) / 2
        return total

    def kinks(self) -> tuple[float, ...]:
        """Type locations where the indirect payoffs can kink or jump."""
        th, _ = self.atoms()
        pts = set(float(t) for t in th)
        for lo, hi, _ in self.segments():
            pts.update((lo, hi))
        return tuple(sorted(pts))

    @property
    def has_full_support(self) -> bool:
        return False


@dataclass(frozen=True)
class PointMass(TypeDistribution):
    theta0: float

    def __post_init__(self):
        _check_prob(self.theta0, "theta0")

    def atoms(self):
        return np.array([float(self.theta0)]), np.array([1.0])

    def mean(self):
        return float(self.theta0)

    def __str__(self):
        return f"point:{self.theta0!r}"


@dataclass(frozen=True)
class DiscreteAtoms(TypeDistribution):
    """Finitely many types ``thetas`` with probabilities ``weights``."""

    thetas: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.thetas) != len(self.weights) or not self.thetas:
            raise ValueError("thetas and weights must be non-empty and of equal length")
        for t in self.thetas:
            _check_prob(t, "theta")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(self.weights) - 1) > PROB_TOL:
            raise ValueError(f"weights sum to {sum(self.weights)!r}, not 1")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "DiscreteAtoms":
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    def atoms(self):
        return np.array(self.thetas), np.array(self.weights)

    def __str__(self):
        body = ",".join(f"{t!r}@{w!r}" for t, w in zip(self.thetas, self.weights))
        return f"atoms:{body}"


@dataclass(frozen=True)
class Uniform01(TypeDistribution):
    def segments(self):
        return [(0.0, 1.0, 1.0)]

    def mean(self):
        return 0.5

    @property
    def has_full_support(self):
        return True

    def __str__(self):
        return "uniform"


@dataclass(frozen=True)
class PiecewiseLinearCdf(TypeDistribution):
    """CDF linear between knots ``(theta_k, F_k)``.

    Knots must start at θ=0 and end at (1, 1) with strictly increasing θ and
    nondecreasing F. A positive ``F_0`` is an atom at θ=0.
    """

    knots: tuple[tuple[float, float], ...]
    _segments: list = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        knots = tuple((float(t), float(f)) for t, f in self.knots)
        object.__setattr__(self, "knots", knots)
        if len(knots) < 2:
            raise ValueError("need at least two knots")
        ts = [k[0] for k in knots]
        fs = [k[1] for k in knots]
        if ts[0] != 0.0 or ts[-1] != 1.0:
            raise ValueError("knots must span [0, 1]")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("knot locations must be strictly increasing")
        if any(b < a - PROB_TOL for a, b in zip(fs, fs[1:])) or fs[0] < 0:
            raise ValueError("CDF values must be nondecreasing and nonnegative")
        if abs(fs[-1] - 1) > PROB_TOL:
            raise ValueError("CDF must reach 1 at θ=1")
        segs = []
        for (t0, f0), (t1, f1) in zip(knots, knots[1:]):
            if f1 > f0:
                segs.append((t0, t1, (f1 - f0) / (t1 - t0)))
        object.__setattr__(self, "_segments", segs)

    @classmethod
    def approximating(cls, cdf: Callable[[float], float], n_knots: int) -> "PiecewiseLinearCdf":
        ts = np.linspace(0.0, 1.0, n_knots)
        fs = [min(max(float(cdf(t)), 0.0), 1.0) for t in ts]
        fs[0] = max(fs[0], 0.0)
        fs[-1] = 1.0
        return cls(tuple(zip(ts, fs)))

    def atoms(self):
        f0 = self.knots[0][1]
        if f0 > 0:
            return np.array([0.0]), np.array([f0])
        return np.empty(0), np.empty(0)

    def segments(self):
        return list(self._segments)

    @property
    def has_full_support(self):
        covered = sum(hi - lo for lo, hi, d in self._segments if d > 0)
        return abs(covered - 1.0) < 1e-12

    def __str__(self):
        return "plcdf:" + ",".join(f"{t!r}@{f!r}" for t, f in self.knots)


def mean_type(dist: TypeDistribution) -> float:
    """E[θ] under ``dist``; this is the basic prior μ₀."""
    return dist.mean()


def integrate_over_types(
    dist: TypeDistribution,
    integrand: Callable[[float], float],
    a: float = 0.0,
    b: float = 1.0,
    breakpoints: Sequence[float] = (),
) -> float:
    """∫_a^b integrand(θ) dF(θ) over the closed interval [a, b].

    Atoms are summed exactly; the continuous part uses adaptive quadrature
    with absolute tolerance 1e-10. ``breakpoints`` are passed to the
    quadrature routine so kinks of the integrand are resolved exactly.
    """
    if a > b:
        raise InvalidInterval(f"a={a} > b={b}")
    th, w = dist.atoms()
    total = sum(float(wk) * integrand(float(tk)) for tk, wk in zip(th, w) if a <= tk <= b)
    for lo, hi, d in dist.segments():
        lo2, hi2 = max(lo, a), min(hi, b)
        if hi2 <= lo2:
            continue
        pts = [p for p in breakpoints if lo2 < p < hi2]
        val, _ = quad(integrand, lo2, hi2, points=pts or None, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200)
        total += d * val
    return float(total)


# ---------------------------------------------------------------------------
# Signals and outcomes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BinarySignal:
    """Two-realization signal; ``alpha = Pr(s_H | L)``, ``beta = Pr(s_H | H)``."""

    alpha: float
    beta: float

    def __post_init__(self):
        _check_prob(self.alpha, "alpha")
        _check_prob(self.beta, "beta")
        if self.alpha > self.beta + PROB_TOL:
            raise ValueError(f"need alpha <= beta, got ({self.alpha}, {self.beta})")

    def to_finite(self) -> "FiniteSignal":
        """Columns ordered (s_L, s_H); rows ordered (L, H)."""
        return FiniteSignal(((1 - self.alpha, self.alpha), (1 - self.beta, self.beta)))


@dataclass(frozen=True)
class FiniteSignal:
    """Likelihood matrix with one row per buyer value and one column per realization.

    Entries may be floats or :class:`fractions.Fraction`; exact types are kept
    as given so downstream arithmetic stays exact.
    """

    likelihood: tuple[tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.likelihood)
        object.__setattr__(self, "likelihood", rows)
        if not rows or not rows[0]:
            raise ValueError("empty likelihood matrix")
        k = len(rows[0])
        for r in rows:
            if len(r) != k:
                raise ValueError("ragged likelihood matrix")
            for x in r:
                _check_prob(float(x), "likelihood entry")
            if abs(float(sum(r)) - 1) > PROB_TOL:
                raise ValueError(f"likelihood row sums to {float(sum(r))!r}")

    @property
    def realization_count(self) -> int:
        return len(self.likelihood[0])

    @property
    def value_count(self) -> int:
        return len(self.likelihood)

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.likelihood])

    def merge(self, i: int, j: int) -> "FiniteSignal":
        """Pool realizations ``i`` and ``j`` into one (a garbling)."""
        if i == j:
            raise ValueError("cannot merge a realization with itself")
        i, j = sorted((i, j))
        rows = []
        for r in self.likelihood:
            r = list(r)
            r[i] = r[i] + r[j]
            del r[j]
            rows.append(tuple(r))
        return FiniteSignal(tuple(rows))

    def garble(self, kernel) -> "FiniteSignal":
        """Post-process by a row-stochastic ``kernel`` (k × k')."""
        kernel = [list(r) for r in kernel]
        k2 = len(kernel[0])
        rows = []
        for r in self.likelihood:
            rows.append(tuple(sum(r[s] * kernel[s][c] for s in range(len(r))) for c in range(k2)))
        return FiniteSignal(tuple(rows))

    @classmethod
    def uninformative(cls, n_values: int = 2) -> "FiniteSignal":
        return cls(tuple((1.0,) for _ in range(n_values)))

    @classmethod
    def fully_informative(cls, n_values: int = 2) -> "FiniteSignal":
        return cls(tuple(tuple(1.0 if c == r else 0.0 for c in range(n_values)) for r in range(n_values)))


@dataclass(frozen=True)
class WelfareOutcome:
    """Ex ante (buyer surplus, seller profit)."""

    buyer_surplus: float
    seller_profit: float

    def __post_init__(self):
        if self.buyer_surplus < -PAYOFF_TOL or self.seller_profit < -PAYOFF_TOL:
            raise ValueError(f"negative payoff in outcome {self}")

    def __iter__(self):
        yield self.buyer_surplus
        yield self.seller_profit

    def as_array(self) -> np.ndarray:
        return np.array([self.buyer_surplus, self.seller_profit])

    @property
    def total(self) -> float:
        return self.buyer_surplus + self.seller_profit


@dataclass(frozen=True)
class OutcomeSet:
    """Convex planar set of welfare outcomes given by its CCW boundary polygon.

    ``certificates`` optionally maps each boundary vertex to the belief split
    that implements it (same order as ``boundary``).
    """

    boundary: np.ndarray
    prior: float
    certificates: tuple = ()

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.boundary, dtype=float))
        object.__setattr__(self, "boundary", pts)
        from infodesign.geometry import is_convex_ccw

        if not is_convex_ccw(pts, tol=1e-9):
            raise ValueError("boundary is not a convex counterclockwise polygon")

    @property
    def vertices(self) -> np.ndarray:
        return self.boundary

    def contains(self, point, tol: float = 1e-9) -> bool:
        return self.distance_outside(point) <= tol

    def distance_outside(self, point) -> float:
        from infodesign.geometry import distance_outside_polygon

        return distance_outside_polygon(self.boundary, np.asarray(point, dtype=float))

    def clip(self, normal, offset) -> "OutcomeSet":
        """Intersection with the half-plane ``normal · x >= offset``."""
        from infodesign.geometry import clip_halfplane

        pts = clip_halfplane(self.boundary, np.asarray(normal, float), float(offset))
        merged: list = []
        for p in pts:
            if not merged or np.hypot(*(p - merged[-1])) > 1e-9:
                merged.append(p)
        if len(merged) > 1 and np.hypot(*(merged[0] - merged[-1])) <= 1e-9:
            merged.pop()
        return OutcomeSet(np.array(merged).reshape(-1, 2), self.prior)

    def argmax(self, direction) -> np.ndarray:
        vals = self.boundary @ np.asarray(direction, dtype=float)
        return self.boundary[int(np.argmax(vals))]
