"""Belief algebra for a seller whose private type shifts her prior.

A signal realization that would move a seller with prior μ₀ to belief μ (the
*basic* belief) moves a seller of type θ to ``posterior_update(μ, θ, μ₀)``.
"""

from __future__ import annotations

import enum

from infodesign.core import DegeneratePrior, MarketPrimitives


class TieBreak(enum.Enum):
    LOW = "low"
    HIGH = "high"


TIE_TOL = 1e-12


def _check_prior(mu0: float) -> None:
    if not (0.0 < mu0 < 1.0):
        raise DegeneratePrior(f"mu0={mu0!r} must lie strictly inside (0, 1)")


def posterior_update(mu: float, theta: float, mu0: float) -> float:
    """Posterior that the value is high for type ``theta`` at basic belief ``mu``."""
    _check_prior(mu0)
    num = theta * mu * (1 - mu0)
    den = num + (1 - theta) * (1 - mu) * mu0
    if den == 0.0:
        return float(theta)
    return num / den


def threshold_type(mu: float, mkt: MarketPrimitives, mu0: float) -> float:
    """Type θ̃ that is exactly indifferent between prices at basic belief ``mu``.

    Types below θ̃ price low, types above price high.
    """
    _check_prior(mu0)
    a = mu * (1 - mu0)
    b = (1 - mu) * mu0
    num = mkt.low * b
    den = num + mkt.gap * a
    if den == 0.0:
        return 1.0 if mu <= 0 else 0.0
    return num / den


def belief_for_threshold(theta_star: float, mkt: MarketPrimitives, mu0: float) -> float:
    """Inverse of :func:`threshold_type`: the basic belief at which θ̃ = ``theta_star``."""
    _check_prior(mu0)
    num = mkt.low * (1 - theta_star) * mu0
    den = theta_star * (1 - mu0) * mkt.gap + num
    if den == 0.0:
        return 1.0
    return num / den


def optimal_price_binary(t: float, mkt: MarketPrimitives, tie_break: TieBreak = TieBreak.LOW) -> float:
    """Profit-maximizing price for a seller who believes Pr(v=H) = ``t``."""
    r = mkt.ratio
    if t > r + TIE_TOL:
        return mkt.high
    if t < r - TIE_TOL:
        return mkt.low
    return mkt.low if tie_break is TieBreak.LOW else mkt.high
