"""Implementable outcome sets via concavification over basic beliefs.

Any Bayes-plausible split of the basic prior is induced by a public signal,
and each realization contributes ``(U(μ), Π(μ))``. The implementable set is
therefore the slice at μ₀ of the convex hull of the graph of ``μ ↦ (U, Π)``.
Its boundary is traced by maximizing ``λ·(U, Π)`` over splits for a sweep of
directions λ, each a one-dimensional concavification at μ₀.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from infodesign.beliefs import TieBreak
from infodesign.core import (
    FiniteSignal,
    MarketPrimitives,
    NotBayesPlausible,
    OutcomeSet,
    SolverError,
    TypeDistribution,
    WelfareOutcome,
)
from infodesign.geometry import convex_hull
from infodesign.payoffs import indirect_payoffs, no_info_outcome, tie_beliefs

BP_TOL = 1e-9


@dataclass(frozen=True)
class BeliefSplit:
    support: tuple[float, ...]
    weights: tuple[float, ...]
    # per support point: use the High tie-break for atoms at the threshold
    high_tie: tuple[bool, ...] = ()

    def __post_init__(self):
        s = tuple(float(x) for x in self.support)
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "weights", w)
        if not self.high_tie:
            object.__setattr__(self, "high_tie", (False,) * len(s))
        if len(s) != len(w) or len(self.high_tie) != len(s) or not s:
            raise ValueError("support, weights and tie flags must have equal nonzero length")
        if any(x < -BP_TOL for x in w) or abs(math.fsum(w) - 1) > BP_TOL:
            raise ValueError(f"weights {w} are not a probability vector")
        if any(not (-BP_TOL <= x <= 1 + BP_TOL) for x in s):
            raise ValueError("support beliefs must lie in [0, 1]")

    @property
    def mean(self) -> float:
        return math.fsum(w * m for w, m in zip(self.weights, self.support))

    def __len__(self):
        return len(self.support)


@dataclass(frozen=True)
class GraphSample:
    """Graph of the indirect payoffs on a belief grid.

    ``alt_*`` hold extra points at beliefs where an atom of F sits exactly on
    the threshold, evaluated with the High tie-break so the sampled graph
    covers both ends of the jump.
    """

    mus: np.ndarray
    points: np.ndarray
    mu0: float
    alt_mus: np.ndarray
    alt_points: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.mus) <= 0):
            raise ValueError("belief grid must be strictly increasing")
        if len(self.mus) != len(self.points):
            raise ValueError("grid and points differ in length")

    def candidates(self):
        """All (μ, U, Π, high_tie) candidates including alternate tie points."""
        mus = np.concatenate([self.mus, self.alt_mus])
        pts = np.vstack([self.points, self.alt_points]) if len(self.alt_mus) else self.points
        flags = np.concatenate([np.zeros(len(self.mus), bool), np.ones(len(self.alt_mus), bool)])
        return mus, pts, flags


def sample_graph(mkt: MarketPrimitives, dist: TypeDistribution, grid_size: int = 2001) -> GraphSample:
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    mu0 = dist.mean()
    ties = tie_beliefs(mkt, dist)
    mus = np.unique(np.concatenate([np.linspace(0.0, 1.0, grid_size), [0.0, mu0, 1.0], ties]))
    mus = mus[(mus >= 0) & (mus <= 1)]
    u, p = indirect_payoffs(mus, mkt, dist, TieBreak.LOW)
    th, _ = dist.atoms()
    if len(th):
        alt = np.array(sorted(set(t for t in ties if 0.0 < t < 1.0)))
    else:
        alt = np.empty(0)
    if len(alt):
        ua, pa = indirect_payoffs(alt, mkt, dist, TieBreak.HIGH)
        alt_pts = np.column_stack([ua, pa])
    else:
        alt_pts = np.empty((0, 2))
    return GraphSample(mus, np.column_stack([u, p]), mu0, alt, alt_pts)


def concavify_at(mus, values, mu0: float) -> tuple[float, tuple[int, ...], tuple[float, ...]]:
    """Concave envelope of sampled ``values`` at ``mu0``.

    Returns (value, indices, weights) for an optimal split with at most two
    support points. The upper bridge over ``mu0`` is found by alternately
    taking the best left point for the current right point and vice versa;
    each step raises the chord at ``mu0`` and a fixed point is a common
    tangent with every sample below it.
    """
    mus = np.asarray(mus, dtype=float)
    vals = np.asarray(values, dtype=float)
    center = np.flatnonzero(np.abs(mus - mu0) <= 1e-15)
    best_val, best = -np.inf, None
    if len(center):
        c = center[int(np.argmax(vals[center]))]
        best_val, best = vals[c], ((int(c),), (1.0,))
    left = np.flatnonzero(mus < mu0 - 1e-15)
    right = np.flatnonzero(mus > mu0 + 1e-15)
    if len(left) and len(right):
        ml, vl = mus[left], vals[left]
        mr, vr = mus[right], vals[right]
        q = int(np.argmax(vr))
        p = int(np.argmax(vl))
        cur = -np.inf
        for _ in range(len(left) + len(right) + 2):
            chord_p = (vl * (mr[q] - mu0) + vr[q] * (mu0 - ml)) / (mr[q] - ml)
            p = int(np.argmax(chord_p))
            chord_q = (vl[p] * (mr - mu0) + vr * (mu0 - ml[p])) / (mr - ml[p])
            q = int(np.argmax(chord_q))
            val = float(chord_q[q])
            if val <= cur + 1e-15 * max(1.0, abs(cur)):
                break
            cur = val
        if best is None or cur > best_val + 1e-13 * max(1.0, abs(best_val)):
            wp = (mr[q] - mu0) / (mr[q] - ml[p])
            best_val = cur
            best = ((int(left[p]), int(right[q])), (float(wp), float(1 - wp)))
    if best is None:
        raise NotBayesPlausible(f"no sampled beliefs on both sides of mu0={mu0}")
    return float(best_val), best[0], best[1]


@dataclass(frozen=True)
class SupportResult:
    direction: tuple[float, float]
    value: float
    split: BeliefSplit
    point: WelfareOutcome


def _split_point(split: BeliefSplit, mkt, dist) -> WelfareOutcome:
    u = p = 0.0
    for m, w, h in zip(split.support, split.weights, split.high_tie):
        uu, pp = indirect_payoffs(np.array([m]), mkt, dist, TieBreak.HIGH if h else TieBreak.LOW)
        u += w * uu[0]
        p += w * pp[0]
    return WelfareOutcome(float(u), float(p))


def split_outcome(split: BeliefSplit, mkt: MarketPrimitives, dist: TypeDistribution) -> WelfareOutcome:
    """Σ wᵢ (U(μᵢ), Π(μᵢ)) for a split."""
    return _split_point(split, mkt, dist)


def support_value(lam, mkt: MarketPrimitives, dist: TypeDistribution, grid: GraphSample | int = 2001) -> SupportResult:
    """Maximize λ·(U, Π) over Bayes-plausible splits supported on the sampled grid."""
    lam = (float(lam[0]), float(lam[1]))
    if lam == (0.0, 0.0):
        raise ValueError("direction must be nonzero")
    if not isinstance(grid, GraphSample):
        grid = sample_graph(mkt, dist, grid)
    return _support_on(lam, grid, mkt, dist)


def _support_on(lam, g: GraphSample, mkt, dist) -> SupportResult:
    mus, pts, flags = g.candidates()
    vals = pts @ np.asarray(lam)
    val, idx, w = concavify_at(mus, vals, g.mu0)
    split = BeliefSplit(tuple(mus[i] for i in idx), w, tuple(bool(flags[i]) for i in idx))
    pt = pts[list(idx)].T @ np.asarray(w)
    return SupportResult(lam, val, split, WelfareOutcome(max(float(pt[0]), 0.0), float(pt[1])))


def sweep_directions(mkt: MarketPrimitives, dist: TypeDistribution, grid_size: int = 2001, directions: int = 720) -> list[SupportResult]:
    g = sample_graph(mkt, dist, grid_size)
    out = []
    for k in range(directions):
        ang = 2 * math.pi * k / directions
        lam = (math.cos(ang), math.sin(ang))
        out.append(_support_on(lam, g, mkt, dist))
    return out


def _degenerate_set(mkt, dist) -> OutcomeSet:
    o = no_info_outcome(mkt, dist)
    split = BeliefSplit((dist.mean(),), (1.0,))
    return OutcomeSet(np.array([[o.buyer_surplus, o.seller_profit]]), dist.mean(), (split,))


def implementable_set(mkt: MarketPrimitives, dist: TypeDistribution, grid_size: int = 2001, directions: int = 720) -> OutcomeSet:
    """Convex polygon of implementable (U, Π) with a split certificate per vertex."""
    if directions < 8:
        raise ValueError("need at least 8 directions")
    mu0 = dist.mean()
    if not (0.0 < mu0 < 1.0):
        return _degenerate_set(mkt, dist)
    results = sweep_directions(mkt, dist, grid_size, directions)
    pts = np.array([r.point.as_array() for r in results])
    hull = convex_hull(pts)
    certs = []
    for v in hull:
        d = np.hypot(*(pts - v).T)
        certs.append(results[int(np.argmin(d))].split)
    return OutcomeSet(hull, mu0, tuple(certs))


def split_to_signal(split: BeliefSplit, mu0: float) -> FiniteSignal:
    """Signal whose realizations induce exactly the split's basic beliefs."""
    if abs(split.mean - mu0) > BP_TOL:
        raise NotBayesPlausible(f"split mean {split.mean} differs from prior {mu0}")
    if not (0.0 < mu0 < 1.0):
        raise NotBayesPlausible("prior must be interior")
    low = [w * (1 - m) / (1 - mu0) for m, w in zip(split.support, split.weights)]
    high = [w * m / mu0 for m, w in zip(split.support, split.weights)]
    # absorb the admissible Bayes-plausibility slack so rows are exact
    sl, sh = math.fsum(low), math.fsum(high)
    return FiniteSignal((tuple(x / sl for x in low), tuple(x / sh for x in high)))


def signal_beliefs(sig: FiniteSignal, mu0: float) -> list[tuple[float, float]]:
    """(probability, basic belief) of every realization with positive probability."""
    if sig.value_count != 2:
        raise ValueError("binary-value signal expected (rows L, H)")
    out = []
    for pl, ph in zip(*sig.likelihood):
        prob = mu0 * float(ph) + (1 - mu0) * float(pl)
        if prob > 0:
            out.append((prob, mu0 * float(ph) / prob))
    return out


def outcome_of_signal(sig: FiniteSignal, mkt: MarketPrimitives, dist: TypeDistribution, tie: TieBreak = TieBreak.LOW) -> WelfareOutcome:
    mu0 = dist.mean()
    if not (0.0 < mu0 < 1.0):
        return no_info_outcome(mkt, dist)
    pairs = signal_beliefs(sig, mu0)
    probs = np.array([p for p, _ in pairs])
    mus = np.clip(np.array([m for _, m in pairs]), 0.0, 1.0)
    u, p = indirect_payoffs(mus, mkt, dist, tie)
    return WelfareOutcome(max(float(probs @ u), 0.0), float(probs @ p))


def signal_to_split(sig: FiniteSignal, mu0: float) -> BeliefSplit:
    pairs = signal_beliefs(sig, mu0)
    return BeliefSplit(tuple(m for _, m in pairs), tuple(p for p, _ in pairs))


def _three_point_search(target, mkt, dist, mu0, n_coarse):
    """Split {a, b, c} with a ≤ μ₀ ≤ c hitting ``target``, found by scanning b."""
    u_t, p_t = target
    nb = 801
    bs = np.unique(np.concatenate([np.linspace(0, 1, nb), [mu0]]))
    ub, pb = indirect_payoffs(bs, mkt, dist)
    ac = np.unique(np.concatenate([np.linspace(0, mu0, n_coarse), [mu0]]))
    cc = np.unique(np.concatenate([np.linspace(mu0, 1, n_coarse), [mu0]]))
    ua, pa = indirect_payoffs(ac, mkt, dist)
    uc, pc = indirect_payoffs(cc, mkt, dist)

    def weights(a, c, Ua, Uc, b, Ub):
        # solve rows (1, μ, U) for (w_a, w_b, w_c) by Cramer's rule, vectorized over b
        det = (b * Uc - c * Ub) - (a * Uc - c * Ua) + (a * Ub - b * Ua)
        r1, r2, r3 = 1.0, mu0, u_t
        da = r1 * (b * Uc - c * Ub) - (r2 * Uc - c * r3) + (r2 * Ub - b * r3)
        db = (r2 * Uc - c * r3) - r1 * (a * Uc - c * Ua) + (a * r3 - r2 * Ua)
        dc = (b * r3 - r2 * Ub) - (a * r3 - r2 * Ua) + r1 * (a * Ub - b * Ua)
        with np.errstate(divide="ignore", invalid="ignore"):
            return da / det, db / det, dc / det, det

    for i, a in enumerate(ac):
        for k, c in enumerate(cc):
            if c - a < 1e-12:
                continue
            wa, wb, wc, det = weights(a, c, ua[i], uc[k], bs, ub)
            with np.errstate(invalid="ignore"):
                ok = (np.abs(det) > 1e-14) & (wa >= -1e-12) & (wb >= -1e-12) & (wc >= -1e-12)
                res = wa * pa[i] + wb * pb + wc * pc[k] - p_t
            good = np.flatnonzero(ok[:-1] & ok[1:] & (np.sign(res[:-1]) != np.sign(res[1:])))
            for j in good:
                lo, hi = bs[j], bs[j + 1]
                rlo = res[j]
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    um, pm = indirect_payoffs(np.array([mid]), mkt, dist)
                    w1, w2, w3, _ = weights(a, c, ua[i], uc[k], mid, um[0])
                    rm = w1 * pa[i] + w2 * pm[0] + w3 * pc[k] - p_t
                    if np.sign(rm) == np.sign(rlo):
                        lo, rlo = mid, rm
                    else:
                        hi = mid
                b = 0.5 * (lo + hi)
                ubb, _ = indirect_payoffs(np.array([b]), mkt, dist)
                w1, w2, w3, _ = weights(a, c, ua[i], uc[k], b, ubb[0])
                if min(w1, w2, w3) < -1e-12:
                    continue
                ws = np.clip([w1, w2, w3], 0.0, None)
                ws = ws / ws.sum()
                yield BeliefSplit((a, b, c), tuple(float(x) for x in ws))
            if abs(res[0]) < 1e-12 and ok[0]:
                ws = np.clip([wa[0], wb[0], wc[0]], 0.0, None)
                yield BeliefSplit((a, bs[0], c), tuple(float(x) for x in ws / ws.sum()))


def _prune(split: BeliefSplit) -> BeliefSplit:
    keep = [i for i, w in enumerate(split.weights) if w > 1e-15]
    ws = np.array([split.weights[i] for i in keep])
    return BeliefSplit(tuple(split.support[i] for i in keep), tuple(ws / ws.sum()), tuple(split.high_tie[i] for i in keep))


def certify_outcome(point, mkt: MarketPrimitives, dist: TypeDistribution, tol: float = 1e-9, grid_size: int = 2001) -> BeliefSplit:
    """A split with at most three support beliefs that implements ``point``.

    Raises :class:`SolverError` when no certificate within ``tol`` is found.
    """
    target = (float(point[0]), float(point[1]))
    mu0 = dist.mean()
    if not (0.0 < mu0 < 1.0):
        o = no_info_outcome(mkt, dist)
        if max(abs(o.buyer_surplus - target[0]), abs(o.seller_profit - target[1])) <= tol:
            return BeliefSplit((mu0,), (1.0,))
        raise SolverError("degenerate prior admits only the no-information outcome")

    def err(split):
        o = _split_point(split, mkt, dist)
        return max(abs(o.buyer_surplus - target[0]), abs(o.seller_profit - target[1]))

    for n in (31, 61, 121):
        for split in _three_point_search(target, mkt, dist, mu0, n):
            split = _prune(split)
            if abs(split.mean - mu0) <= BP_TOL and err(split) <= tol:
                return split

    g = sample_graph(mkt, dist, grid_size)
    mus, pts, flags = g.candidates()
    a_eq = np.vstack([np.ones_like(mus), mus, pts[:, 0], pts[:, 1]])
    b_eq = np.array([1.0, mu0, target[0], target[1]])
    res = linprog(np.zeros(len(mus)), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds")
    if res.status == 0:
        idx = np.flatnonzero(res.x > 1e-13)
        split = _prune(BeliefSplit(tuple(mus[idx]), tuple(res.x[idx] / res.x[idx].sum()), tuple(bool(flags[i]) for i in idx)))
        if err(split) <= tol and abs(split.mean - mu0) <= BP_TOL:
            return split
    raise SolverError(f"could not certify outcome {target}")


def boundary_rows(results: list[SupportResult]) -> list[tuple]:
    """Rows ``lambda_u, lambda_pi, U, Pi, mu1, w1, mu2, w2`` for a direction sweep."""
    rows = []
    for r in results:
        s = r.split
        mu1, w1 = s.support[0], s.weights[0]
        mu2, w2 = (s.support[1], s.weights[1]) if len(s) > 1 else (s.support[0], 0.0)
        rows.append((r.direction[0], r.direction[1], r.point.buyer_surplus, r.point.seller_profit, mu1, w1, mu2, w2))
    return rows


def binary_outcomes(alphas, betas, mkt: MarketPrimitives, dist: TypeDistribution, tie: TieBreak = TieBreak.LOW) -> np.ndarray:
    """Vectorized outcomes of binary signals (α, β); returns an (n, 2) array of (U, Π)."""
    mu0 = dist.mean()
    a = np.asarray(alphas, dtype=float)
    b = np.asarray(betas, dtype=float)
    if not (0.0 < mu0 < 1.0):
        o = no_info_outcome(mkt, dist)
        return np.tile(o.as_array(), (len(a), 1))
    out = np.zeros((len(a), 2))
    for pl, ph in ((a, b), (1 - a, 1 - b)):
        prob = mu0 * ph + (1 - mu0) * pl
        safe = np.where(prob > 0, prob, 1.0)
        mu = np.clip(np.where(prob > 0, mu0 * ph / safe, mu0), 0.0, 1.0)
        u, p = indirect_payoffs(mu, mkt, dist, tie)
        out[:, 0] += np.where(prob > 0, prob * u, 0.0)
        out[:, 1] += np.where(prob > 0, prob * p, 0.0)
    return out
