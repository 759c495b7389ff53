"""Uniform-pricing baselines and the indirect payoffs over basic beliefs.

At basic belief μ, a type θ observes the realization with likelihood
``r(μ, θ) = θμ/μ₀ + (1-θ)(1-μ)/(1-μ₀)`` relative to the basic prior, so the
ex ante contribution of the realization is the r-weighted average of each
type's surplus. Since ``r·t = θμ/μ₀`` the weighted integrals stay linear in θ
and are evaluated from exact moments of the type distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from infodesign.beliefs import TIE_TOL, TieBreak, belief_for_threshold, posterior_update, threshold_type
from infodesign.core import (
    DegeneratePrior,
    MarketPrimitives,
    OutcomeSet,
    TypeDistribution,
    WelfareOutcome,
)


@dataclass(frozen=True)
class AggregateBaselines:
    pi_floor: float
    w_bar: float
    u_noinfo: float

    @property
    def max_rent(self) -> float:
        return self.w_bar - self.pi_floor


def type_profit_floor(theta: float, mkt: MarketPrimitives) -> float:
    """Uniform-pricing profit of a seller who knows her type."""
    return max(theta * mkt.high, mkt.low)


def type_total_surplus(theta: float, mkt: MarketPrimitives) -> float:
    return theta * mkt.high + (1 - theta) * mkt.low


def _moments(dist: TypeDistribution, a: float, b: float, include_a: bool, include_b: bool):
    """Zeroth and first moments of F over the interval between ``a`` and ``b``."""
    m0 = dist.continuous_moment(a, b, 0)
    m1 = dist.continuous_moment(a, b, 1)
    th, w = dist.atoms()
    for t, wk in zip(th, w):
        lo_ok = t > a or (include_a and t >= a)
        hi_ok = t < b or (include_b and t <= b)
        if lo_ok and hi_ok:
            m0 += wk
            m1 += wk * t
    return m0, m1


def baselines(mkt: MarketPrimitives, dist: TypeDistribution) -> AggregateBaselines:
    r = mkt.ratio
    m0_lo, m1_lo = _moments(dist, 0.0, r, True, True)
    m0_hi, m1_hi = _moments(dist, r, 1.0, False, True)
    pi_floor = mkt.low * m0_lo + mkt.high * m1_hi
    mean = m1_lo + m1_hi
    w_bar = mkt.low + mkt.gap * mean
    u_noinfo = mkt.gap * m1_lo
    return AggregateBaselines(float(pi_floor), float(w_bar), float(u_noinfo))


def _low_masses(mus: np.ndarray, mkt: MarketPrimitives, dist: TypeDistribution, mu0: float, tie: TieBreak):
    """Per-belief zeroth and first moments of F over the low-price types."""
    mus = np.asarray(mus, dtype=float)
    a = mus * (1 - mu0)
    b = (1 - mus) * mu0
    num = mkt.low * b
    den = num + mkt.gap * a
    with np.errstate(invalid="ignore", divide="ignore"):
        tt = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    m0 = np.zeros_like(mus)
    m1 = np.zeros_like(mus)
    for lo, hi, d in dist.segments():
        top = np.clip(tt, lo, hi)
        m0 += d * (top - lo)
        m1 += d * (top * top - lo * lo) / 2
    th, w = dist.atoms()
    ratio = mkt.ratio
    for t, wk in zip(th, w):
        post_num = t * a
        post_den = post_num + (1 - t) * b
        with np.errstate(invalid="ignore", divide="ignore"):
            post = np.where(post_den > 0, post_num / np.where(post_den > 0, post_den, 1.0), t)
        if tie is TieBreak.LOW:
            low = post <= ratio + TIE_TOL
        else:
            low = post < ratio - TIE_TOL
        m0 += np.where(low, wk, 0.0)
        m1 += np.where(low, wk * t, 0.0)
    return m0, m1


def indirect_payoffs(mus, mkt: MarketPrimitives, dist: TypeDistribution, tie: TieBreak = TieBreak.LOW):
    """Vectorized (U(μ), Π(μ)) over an array of basic beliefs."""
    mu0 = dist.mean()
    if not (0.0 < mu0 < 1.0):
        raise DegeneratePrior(f"mu0={mu0!r} must lie strictly inside (0, 1)")
    mus = np.asarray(mus, dtype=float)
    m0, m1 = _low_masses(mus, mkt, dist, mu0, tie)
    up = mus / mu0
    down = (1 - mus) / (1 - mu0)
    u = mkt.gap * up * m1
    pi = mkt.low * (up * m1 + down * (m0 - m1)) + mkt.high * up * (mu0 - m1)
    return np.maximum(u, 0.0), pi


def indirect_buyer_surplus(mu: float, mkt: MarketPrimitives, dist: TypeDistribution, tie: TieBreak = TieBreak.LOW) -> float:
    return float(indirect_payoffs(np.array([mu]), mkt, dist, tie)[0][0])


def indirect_seller_profit(mu: float, mkt: MarketPrimitives, dist: TypeDistribution, tie: TieBreak = TieBreak.LOW) -> float:
    return float(indirect_payoffs(np.array([mu]), mkt, dist, tie)[1][0])


def realization_weight(mu: float, theta: float, mu0: float) -> float:
    """Likelihood of a realization for type θ relative to its basic-prior probability."""
    return theta * mu / mu0 + (1 - theta) * (1 - mu) / (1 - mu0)


def type_payoffs_at(mu: float, theta: float, mkt: MarketPrimitives, mu0: float, tie: TieBreak = TieBreak.LOW):
    """Weighted (buyer surplus, profit) contribution of type θ at basic belief μ."""
    t = posterior_update(mu, theta, mu0)
    r = realization_weight(mu, theta, mu0)
    ratio = mkt.ratio
    low = t <= ratio + TIE_TOL if tie is TieBreak.LOW else t < ratio - TIE_TOL
    if low:
        return r * t * mkt.gap, r * mkt.low
    return 0.0, r * t * mkt.high


def tie_beliefs(mkt: MarketPrimitives, dist: TypeDistribution) -> list[float]:
    """Basic beliefs at which the threshold type passes through an atom or knot."""
    mu0 = dist.mean()
    out = []
    for k in dist.kinks():
        if 0.0 <= k <= 1.0:
            out.append(belief_for_threshold(k, mkt, mu0))
    return sorted(set(out))


def observable_triangle(mkt: MarketPrimitives, dist: TypeDistribution) -> OutcomeSet:
    """Outcomes feasible when the seller's type is public."""
    base = baselines(mkt, dist)
    pts = [(0.0, base.pi_floor), (base.w_bar - base.pi_floor, base.pi_floor), (0.0, base.w_bar)]
    uniq: list = []
    for p in pts:
        if all(np.hypot(p[0] - q[0], p[1] - q[1]) > 1e-12 for q in uniq):
            uniq.append(p)
    return OutcomeSet(np.array(uniq), dist.mean())


def no_info_outcome(mkt: MarketPrimitives, dist: TypeDistribution) -> WelfareOutcome:
    base = baselines(mkt, dist)
    return WelfareOutcome(base.u_noinfo, base.pi_floor)


def threshold_at(mu: float, mkt: MarketPrimitives, dist: TypeDistribution) -> float:
    return threshold_type(mu, mkt, dist.mean())
