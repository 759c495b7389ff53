"""Direct mechanisms: incentive checks, structure, and the single public signal
that replicates a whole incentive-compatible menu.

A direct mechanism assigns each reported type θ a binary signal
``(α(θ), β(θ))`` whose realizations are obeyed as price recommendations.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from infodesign.core import FiniteSignal, MarketPrimitives, NotIncentiveCompatible, PROB_TOL, WelfareOutcome

IC_TOL = 1e-9
STRUCT_TOL = 1e-12


@dataclass(frozen=True)
class DirectMechanism:
    grid: tuple[float, ...]
    alpha: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(x) for x in self.grid)
        a = tuple(float(x) for x in self.alpha)
        b = tuple(float(x) for x in self.beta)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        if not (len(g) == len(a) == len(b)):
            raise ValueError("grid, alpha and beta must have equal length")
        if any(y <= x for x, y in zip(g, g[1:])):
            raise ValueError("grid must be strictly increasing")
        for t in g:
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"type {t} outside [0, 1]")
        for x, y in zip(a, b):
            if not (-PROB_TOL <= x <= 1 + PROB_TOL and -PROB_TOL <= y <= 1 + PROB_TOL):
                raise ValueError("alpha and beta must be probabilities")
            if x > y + PROB_TOL:
                raise ValueError(f"need beta >= alpha, got alpha={x}, beta={y}")

    def __len__(self):
        return len(self.grid)

    @classmethod
    def constant(cls, grid: Sequence[float], alpha: float, beta: float) -> "DirectMechanism":
        return cls(tuple(grid), (alpha,) * len(grid), (beta,) * len(grid))


def item_profit(theta, alpha, beta, mkt: MarketPrimitives):
    """Profit of type θ obeying a binary recommendation with rates (α, β)."""
    return (1 - alpha) * mkt.low + theta * (alpha * mkt.low + beta * mkt.gap)


def item_surplus(theta, alpha, beta, mkt: MarketPrimitives):
    """Buyer surplus when type θ obeys (α, β); only a high-value buyer offered L gains."""
    return theta * (1 - beta) * mkt.gap


def deviation_profit(theta: float, report: int, mech: DirectMechanism, mkt: MarketPrimitives) -> float:
    return float(item_profit(theta, mech.alpha[report], mech.beta[report], mkt))


@dataclass(frozen=True)
class ICReport:
    ok: bool
    worst_violation: float
    witness: tuple[float, float] | None


def profit_matrix(mech: DirectMechanism, mkt: MarketPrimitives) -> np.ndarray:
    """Entry (i, j) is the profit of type i reporting type j."""
    th = np.asarray(mech.grid)[:, None]
    a = np.asarray(mech.alpha)[None, :]
    b = np.asarray(mech.beta)[None, :]
    return item_profit(th, a, b, mkt)


def check_ic(mech: DirectMechanism, mkt: MarketPrimitives, tol: float = IC_TOL) -> ICReport:
    if len(mech) == 0:
        return ICReport(True, 0.0, None)
    p = profit_matrix(mech, mkt)
    gain = p - np.diag(p)[:, None]
    i, j = np.unravel_index(int(np.argmax(gain)), gain.shape)
    worst = float(gain[i, j])
    return ICReport(worst <= tol, worst, (mech.grid[i], mech.grid[j]))


@dataclass(frozen=True)
class StructuralReport:
    monotone: bool
    relative_impact: bool
    monotone_witness: tuple | None = None
    relative_impact_witness: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.monotone and self.relative_impact


def relative_impact_slack(a_i, a_j, a_k, b_i, b_j, b_k) -> float:
    """Right minus left side of the relative-impact inequality for i < j < k."""
    return (b_j - b_i) * (a_k - a_j) - (b_k - b_j) * (a_j - a_i)


def check_structural(mech: DirectMechanism, tol: float = STRUCT_TOL) -> StructuralReport:
    a = np.asarray(mech.alpha)
    b = np.asarray(mech.beta)
    m = len(a)
    mono_w = None
    for i in range(m - 1):
        if a[i + 1] < a[i] - tol or b[i + 1] < b[i] - tol:
            mono_w = (i, i + 1)
            break
    ri_w = None
    worst = -tol
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                s = relative_impact_slack(a[i], a[j], a[k], b[i], b[j], b[k])
                if s < worst:
                    worst = s
                    ri_w = (i, j, k)
    return StructuralReport(mono_w is None, ri_w is None, mono_w, ri_w)


@dataclass(frozen=True)
class PublicSignalCdf:
    """A public signal on [0, 1] given by its conditional CDFs at a finite knot set.

    ``cdf_low[k] = Pr(s <= knots[k] | v=L)`` and likewise for ``cdf_high``.
    Between knots the CDFs are constant; the remaining mass sits at a
    terminal realization s = 1. Low realizations point to the high value, so
    a seller prices H below her threshold and L above it.
    """

    knots: tuple[float, ...]
    cdf_low: tuple[float, ...]
    cdf_high: tuple[float, ...]

    def __post_init__(self):
        if not self.knots:
            raise ValueError("public signal needs at least one knot")
        for c in (self.cdf_low, self.cdf_high):
            if any(y < x - PROB_TOL for x, y in zip(c, c[1:])) or c[0] < -PROB_TOL or c[-1] > 1 + PROB_TOL:
                raise ValueError("CDF values must be nondecreasing probabilities")

    def evaluate(self, s: float) -> tuple[float, float]:
        """Right-continuous (cdf_low, cdf_high) at any s in [0, 1]."""
        if s >= 1.0:
            return 1.0, 1.0
        k = int(np.searchsorted(self.knots, s, side="right")) - 1
        if k < 0:
            return 0.0, 0.0
        return self.cdf_low[k], self.cdf_high[k]

    def realization_masses(self) -> list[tuple[float, float, float]]:
        """(location, Pr(s|L), Pr(s|H)) for every realization including the terminal one."""
        out = []
        pl = ph = 0.0
        for x, cl, ch in zip(self.knots, self.cdf_low, self.cdf_high):
            out.append((x, cl - pl, ch - ph))
            pl, ph = cl, ch
        out.append((1.0, 1.0 - pl, 1.0 - ph))
        return out

    def to_finite_signal(self, drop_null: bool = True) -> FiniteSignal:
        masses = self.realization_masses()
        if drop_null:
            masses = [m for m in masses if m[1] > 0 or m[2] > 0]
        low = tuple(max(m[1], 0.0) for m in masses)
        high = tuple(max(m[2], 0.0) for m in masses)
        return FiniteSignal((low, high))

    def pooled_at(self, k: int) -> tuple[float, float]:
        """(α, β) of the binary signal pooling realizations at or below knot ``k``."""
        return self.cdf_low[k], self.cdf_high[k]

    def mlr_violation(self) -> float:
        """Largest violation of the likelihood-ratio ordering over knot triples."""
        xs = [(0.0, 0.0)] + list(zip(self.cdf_low, self.cdf_high)) + [(1.0, 1.0)]
        worst = 0.0
        n = len(xs)
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    lhs = (xs[k][0] - xs[j][0]) * (xs[j][1] - xs[i][1])
                    rhs = (xs[j][0] - xs[i][0]) * (xs[k][1] - xs[j][1])
                    worst = max(worst, rhs - lhs)
        return worst


def check_obedience(mech: DirectMechanism, mkt: MarketPrimitives, tol: float = IC_TOL) -> ICReport:
    """Does each type prefer following its recommendations to ignoring or inverting them?

    The witness pairs the type with the profitable deviation (0 = always L,
    1 = always H, 2 = invert).
    """
    worst, wit = -np.inf, None
    for t, a, b in zip(mech.grid, mech.alpha, mech.beta):
        own = item_profit(t, a, b, mkt)
        for d, (a2, b2) in enumerate(((0.0, 0.0), (1.0, 1.0), (1 - a, 1 - b))):
            g = float(item_profit(t, a2, b2, mkt) - own)
            if g > worst:
                worst, wit = g, (t, d)
    if wit is None:
        return ICReport(True, 0.0, None)
    return ICReport(worst <= tol, worst, wit)


def build_public_signal(mech: DirectMechanism, mkt: MarketPrimitives) -> PublicSignalCdf:
    """Single public signal whose pooled realizations reproduce every menu item."""
    if len(mech) == 0:
        raise ValueError("mechanism has an empty type grid")
    ic = check_ic(mech, mkt)
    if not ic.ok:
        raise NotIncentiveCompatible(f"IC fails by {ic.worst_violation:.3g} at {ic.witness}")
    ob = check_obedience(mech, mkt)
    if not ob.ok:
        raise NotIncentiveCompatible(f"obedience fails by {ob.worst_violation:.3g} at {ob.witness}")
    st = check_structural(mech)
    if not st.ok:
        raise NotIncentiveCompatible(f"structural check fails: {st}")
    return PublicSignalCdf(mech.grid, mech.alpha, mech.beta)


@dataclass(frozen=True)
class ThresholdResponse:
    """A type's best threshold: price H on realizations up to ``threshold``."""

    index: int
    threshold: float
    alpha: float
    beta: float
    profit: float


def best_response_threshold(theta: float, sig: PublicSignalCdf, mkt: MarketPrimitives, mu0: float | None = None) -> ThresholdResponse:
    """Profit-maximizing threshold over the knot set.

    Index -1 prices L everywhere, index ``len(knots)`` prices H everywhere.
    Among maximizers within 1e-12 the knot equal to θ is preferred, then the
    smallest threshold (most low prices). ``mu0`` is accepted for symmetry with
    the belief-based solvers; pricing a threshold rule needs only θ.
    """
    options = [(-1, 0.0, 0.0, 0.0)]
    options += [(k, x, cl, ch) for k, (x, cl, ch) in enumerate(zip(sig.knots, sig.cdf_low, sig.cdf_high))]
    options.append((len(sig.knots), 1.0, 1.0, 1.0))
    profits = [float(item_profit(theta, a, b, mkt)) for _, _, a, b in options]
    best = max(profits)
    cands = [i for i, p in enumerate(profits) if p >= best - STRUCT_TOL]
    own = [i for i in cands if 0 <= options[i][0] < len(sig.knots) and options[i][1] == theta]
    pick = own[0] if own else cands[0]
    k, x, a, b = options[pick]
    return ThresholdResponse(k, x, a, b, profits[pick])


def mechanism_outcome(mech: DirectMechanism, weights: Sequence[float], mkt: MarketPrimitives) -> WelfareOutcome:
    """Ex ante outcome when each grid type, with probability ``weights``, obeys its own item."""
    th = np.asarray(mech.grid)
    a = np.asarray(mech.alpha)
    b = np.asarray(mech.beta)
    w = np.asarray(weights, dtype=float)
    u = float(w @ item_surplus(th, a, b, mkt))
    p = float(w @ item_profit(th, a, b, mkt))
    return WelfareOutcome(u, p)


@dataclass(frozen=True)
class ReplicationReport:
    max_item_error: float
    outcome_error: float
    direct: WelfareOutcome
    public: WelfareOutcome

    def ok(self, tol: float = 1e-9) -> bool:
        return self.max_item_error <= tol and self.outcome_error <= tol


def replication_check(mech: DirectMechanism, weights: Sequence[float], mkt: MarketPrimitives) -> ReplicationReport:
    """Compare the menu outcome with every type best-responding to the public signal."""
    sig = build_public_signal(mech, mkt)
    mu0 = float(np.dot(weights, mech.grid))
    err = 0.0
    ra, rb = [], []
    for t, a, b in zip(mech.grid, mech.alpha, mech.beta):
        br = best_response_threshold(t, sig, mkt, mu0)
        err = max(err, abs(br.alpha - a), abs(br.beta - b))
        ra.append(br.alpha)
        rb.append(br.beta)
    direct = mechanism_outcome(mech, weights, mkt)
    public = mechanism_outcome(DirectMechanism(mech.grid, tuple(ra), tuple(rb)), weights, mkt)
    oerr = max(abs(direct.buyer_surplus - public.buyer_surplus), abs(direct.seller_profit - public.seller_profit))
    return ReplicationReport(err, oerr, direct, public)


def random_ic_mechanism(rng: np.random.Generator, n_types: int, mkt: MarketPrimitives, n_items: int | None = None) -> DirectMechanism:
    """IC mechanism induced by types choosing their favourite use of a random menu.

    A menu of binary signals is drawn; each type picks the item and the
    response (obey, always L, always H) with the highest profit. The induced
    rates are IC because every type could copy any other type's choice.
    """
    grid = np.sort(rng.uniform(0.0, 1.0, size=n_types))
    while len(np.unique(grid)) < n_types:
        grid = np.sort(rng.uniform(0.0, 1.0, size=n_types))
    k = n_items if n_items is not None else int(rng.integers(1, 2 * n_types + 1))
    ab = np.sort(rng.uniform(0.0, 1.0, size=(k, 2)), axis=1)
    # occasionally snap rates to the boundary so flagging items appear
    snap = rng.uniform(size=ab.shape) < 0.15
    ab = np.where(snap, np.round(ab), ab)
    ab = np.sort(ab, axis=1)
    choices = np.vstack([ab, [[0.0, 0.0], [1.0, 1.0]]])
    alpha, beta = [], []
    for t in grid:
        prof = item_profit(t, choices[:, 0], choices[:, 1], mkt)
        i = int(np.argmax(prof))
        alpha.append(float(choices[i, 0]))
        beta.append(float(choices[i, 1]))
    return DirectMechanism(tuple(grid), tuple(alpha), tuple(beta))


def read_mechanism_csv(path: str | Path) -> DirectMechanism:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["theta", "alpha", "beta"]:
            raise ValueError("mechanism file must have header theta,alpha,beta")
        rows = [(float(r["theta"]), float(r["alpha"]), float(r["beta"])) for r in reader]
    return DirectMechanism(tuple(r[0] for r in rows), tuple(r[1] for r in rows), tuple(r[2] for r in rows))


def write_mechanism_csv(mech: DirectMechanism, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "alpha", "beta"])
        for row in zip(mech.grid, mech.alpha, mech.beta):
            w.writerow([repr(x) for x in row])
