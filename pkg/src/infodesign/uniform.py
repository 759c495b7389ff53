"""Closed forms for uniformly distributed seller types.

With θ ~ U[0, 1] a binary signal (α, β) is summarized by two cutoff types:
types above ``x`` price H after the high realization and types above ``y``
price H after the low one, with ``0 ≤ x ≤ L/H ≤ y ≤ 1``. Profit and buyer
surplus are quadratic in the cutoffs, and the boundary of the implementable
set is traced by high-value flagging (x = 0) on the right and low-value
flagging (y = 1) on the left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from infodesign.core import BinarySignal, DegenerateCutoffs, MarketPrimitives, OutcomeSet, WelfareOutcome
from infodesign.geometry import convex_hull

CUTOFF_TOL = 1e-12


@dataclass(frozen=True)
class CutoffPair:
    x: float
    y: float

    def __post_init__(self):
        if not (-CUTOFF_TOL <= self.x <= self.y + CUTOFF_TOL <= 1 + 2 * CUTOFF_TOL):
            raise ValueError(f"need 0 <= x <= y <= 1, got ({self.x}, {self.y})")

    def validate(self, mkt: MarketPrimitives) -> "CutoffPair":
        r = mkt.ratio
        if not (self.x <= r + CUTOFF_TOL and self.y >= r - CUTOFF_TOL):
            raise ValueError(f"cutoffs ({self.x}, {self.y}) must bracket L/H={r}")
        return self

    def canonical(self, mkt: MarketPrimitives) -> "CutoffPair":
        """Map the uninformative representations (L/H, y) onto (0, L/H)."""
        r = mkt.ratio
        if abs(self.x - r) <= CUTOFF_TOL or abs(self.y - r) <= CUTOFF_TOL:
            return CutoffPair(0.0, r)
        return self


def cutoffs_to_signal(c: CutoffPair, mkt: MarketPrimitives) -> BinarySignal:
    c.validate(mkt)
    x, y = c.x, c.y
    if y - x <= CUTOFF_TOL:
        raise DegenerateCutoffs(f"x == y == {x}; the uninformative signal is (0, 0)")
    lo, hi = mkt.low, mkt.high
    a = x * (hi * y - lo) / (lo * (y - x))
    b = (hi * y - lo) * (1 - x) / ((y - x) * mkt.gap)
    return BinarySignal(min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0))


def signal_to_cutoffs(sig: BinarySignal, mkt: MarketPrimitives) -> CutoffPair:
    a, b = sig.alpha, sig.beta
    lo, hi = mkt.low, mkt.high
    dx = a * lo + b * mkt.gap
    x = a * lo / dx if dx > 0 else 0.0
    dy = hi - a * lo - b * mkt.gap
    y = (1 - a) * lo / dy if dy > 0 else 1.0
    return CutoffPair(x, min(y, 1.0))


def profit_xy(c: CutoffPair, mkt: MarketPrimitives) -> float:
    x, y = c.x, c.y
    lo, hi = mkt.low, mkt.high
    k = hi * y - lo
    return lo * y + 0.5 * k * (y + x) - k * x + 0.5 * hi * (1 - y * y)


def surplus_xy(c: CutoffPair, mkt: MarketPrimitives) -> float:
    x, y = c.x, c.y
    k = mkt.high * y - mkt.low
    return 0.5 * mkt.gap * y * y - 0.5 * k * (1 - x) * (y + x)


def outcome_xy(c: CutoffPair, mkt: MarketPrimitives) -> WelfareOutcome:
    return WelfareOutcome(max(surplus_xy(c, mkt), 0.0), profit_xy(c, mkt))


@dataclass(frozen=True)
class BoundaryPoint:
    cutoffs: CutoffPair
    signal: BinarySignal
    outcome: WelfareOutcome


def _point(c: CutoffPair, mkt: MarketPrimitives) -> BoundaryPoint:
    try:
        sig = cutoffs_to_signal(c, mkt)
    except DegenerateCutoffs:
        sig = BinarySignal(0.0, 0.0)
    return BoundaryPoint(c, sig, outcome_xy(c, mkt))


def right_boundary_point(r: float, mkt: MarketPrimitives) -> BoundaryPoint:
    """Maximizer of λ_U·U + λ_Π·Π for λ_U > 0 and ``r = λ_Π / λ_U``."""
    y = min(max((1 + r) / 2, mkt.ratio), 1.0)
    return _point(CutoffPair(0.0, y), mkt)


def left_boundary_point(r: float, mkt: MarketPrimitives) -> BoundaryPoint:
    """Maximizer of λ_U·U + λ_Π·Π for λ_U < 0 and ``r = λ_Π / λ_U``."""
    x = min(max(r / 2, 0.0), mkt.ratio)
    return _point(CutoffPair(x, 1.0), mkt)


def buyer_optimal(mkt: MarketPrimitives) -> BoundaryPoint:
    """Buyer-surplus-maximizing signal for uniform types."""
    if mkt.ratio >= 0.5:
        c = CutoffPair(0.0, mkt.ratio)
        return BoundaryPoint(c, BinarySignal(0.0, 0.0), outcome_xy(c, mkt))
    c = CutoffPair(0.0, 0.5)
    return BoundaryPoint(c, BinarySignal(0.0, (mkt.high - 2 * mkt.low) / mkt.gap), outcome_xy(c, mkt))


def right_boundary(mkt: MarketPrimitives, n: int = 2001) -> list[BoundaryPoint]:
    """High-value flagging curve from no information (y = L/H) to full information (y = 1)."""
    return [_point(CutoffPair(0.0, y), mkt) for y in np.linspace(mkt.ratio, 1.0, n)]


def left_boundary(mkt: MarketPrimitives, n: int = 2001) -> list[BoundaryPoint]:
    """Low-value flagging curve from no information (x = L/H) to full information (x = 0)."""
    return [_point(CutoffPair(x, 1.0), mkt) for x in np.linspace(mkt.ratio, 0.0, n)]


def uniform_outcome_set(mkt: MarketPrimitives, n: int = 2001) -> OutcomeSet:
    pts = [p.outcome.as_array() for p in right_boundary(mkt, n) + left_boundary(mkt, n)]
    return OutcomeSet(convex_hull(np.array(pts)), 0.5)
