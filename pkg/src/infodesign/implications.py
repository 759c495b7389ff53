"""Welfare implications: rent under efficiency, third-party data, and protocols.

The protocol outcome sets are computed from their equilibrium
characterizations (no information under cheap talk, low-value flagging under
voluntary disclosure, the implementable set under a request for consent),
not by simulating play.
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass

import numpy as np

from infodesign.core import (
    BinarySignal,
    BoundaryCase,
    DiscreteAtoms,
    FullSupportRequired,
    MarketPrimitives,
    NoEfficientSignalFound,
    OutcomeSet,
    PointMass,
    TypeDistribution,
    WelfareOutcome,
)
from infodesign.payoffs import baselines, no_info_outcome, observable_triangle
from infodesign.persuasion import BeliefSplit, binary_outcomes, certify_outcome, implementable_set

RATIO_TOL = 1e-12
REGIME_TOL = 1e-9


class Regime(enum.Enum):
    SELLER_WORSE_BUYER_BETTER = "SellerWorseBuyerBetter"
    SELLER_BETTER_BUYER_WORSE = "SellerBetterBuyerWorse"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class ConstrainedOptimum:
    outcome: WelfareOutcome
    split: BeliefSplit | None


@dataclass(frozen=True)
class ComparisonReport:
    """``uninformed`` is the seller without private type information, ``informed`` has it."""

    uninformed: WelfareOutcome
    informed: WelfareOutcome
    regime: Regime


def _is_point_mass(dist: TypeDistribution) -> bool:
    th, w = dist.atoms()
    return not dist.segments() and len(np.unique(th[w > 0])) == 1


def _outcome_set(mkt, dist, grid_size, directions) -> OutcomeSet:
    if _is_point_mass(dist):
        return observable_triangle(mkt, dist)
    return implementable_set(mkt, dist, grid_size, directions)


def constrained_seller_optimal(
    mkt: MarketPrimitives,
    dist: TypeDistribution,
    grid_size: int = 2001,
    directions: int = 720,
    certify: bool = True,
) -> ConstrainedOptimum:
    """Profit-maximizing implementable outcome among those giving the buyer at least
    her no-data surplus. Ties in profit go to the larger buyer surplus."""
    u0 = baselines(mkt, dist).u_noinfo
    region = _outcome_set(mkt, dist, grid_size, directions).clip((1.0, 0.0), u0 - 1e-12)
    pts = region.boundary
    if len(pts) == 0:
        o = no_info_outcome(mkt, dist)
        return ConstrainedOptimum(o, BeliefSplit((dist.mean(),), (1.0,)))
    top = pts[:, 1].max()
    cand = pts[pts[:, 1] >= top - 1e-12]
    u, p = cand[np.argmax(cand[:, 0])]
    o = WelfareOutcome(max(float(u), u0) if u >= u0 - 1e-12 else float(u), float(p))
    split = None
    if certify and 0.0 < dist.mean() < 1.0 and not _is_point_mass(dist):
        split = certify_outcome((o.buyer_surplus, o.seller_profit), mkt, dist, tol=1e-6)
    return ConstrainedOptimum(o, split)


def classify(uninformed: WelfareOutcome, informed: WelfareOutcome, tol: float = REGIME_TOL) -> Regime:
    du = informed.buyer_surplus - uninformed.buyer_surplus
    dp = informed.seller_profit - uninformed.seller_profit
    if dp < -tol and du > tol:
        return Regime.SELLER_WORSE_BUYER_BETTER
    if dp > tol and du < -tol:
        return Regime.SELLER_BETTER_BUYER_WORSE
    return Regime.BOUNDARY


def third_party_comparison(mkt: MarketPrimitives, dist: TypeDistribution, grid_size: int = 2001, directions: int = 720) -> ComparisonReport:
    """Constrained seller-optimal outcomes with and without the seller's private information."""
    mu0 = dist.mean()
    if abs(mu0 - mkt.ratio) <= RATIO_TOL:
        raise BoundaryCase(f"E[theta]={mu0} equals L/H")
    unin = constrained_seller_optimal(mkt, PointMass(mu0), certify=False).outcome
    info = constrained_seller_optimal(mkt, dist, grid_size, directions, certify=False).outcome
    return ComparisonReport(unin, info, classify(unin, info))


@dataclass(frozen=True)
class EfficiencyRentReport:
    min_rent: float
    witness: BinarySignal
    outcome: WelfareOutcome
    qualifying: int


def efficiency_rent_check(
    mkt: MarketPrimitives,
    dist: TypeDistribution,
    efficient_tolerance: float = 1e-6,
    grid_step: float = 0.01,
    exclude_full_information: bool = False,
) -> EfficiencyRentReport:
    """Smallest seller rent Π − Π̲ among efficient public binary signals on a grid."""
    base = baselines(mkt, dist)
    n = int(round(1 / grid_step))
    ticks = np.linspace(0.0, 1.0, n + 1)
    aa, bb = np.meshgrid(ticks, ticks, indexing="ij")
    keep = bb >= aa
    a, b = aa[keep], bb[keep]
    if not np.any((a == 0) & (b == 1)):
        a, b = np.append(a, 0.0), np.append(b, 1.0)
    if exclude_full_information:
        m = ~((a == 0.0) & (b == 1.0))
        a, b = a[m], b[m]
    outs = binary_outcomes(a, b, mkt, dist)
    eff = outs.sum(axis=1) >= base.w_bar - efficient_tolerance
    if not eff.any():
        raise NoEfficientSignalFound("no grid signal is efficient")
    rent = outs[:, 1] - base.pi_floor
    idx = np.flatnonzero(eff)
    # among near-minimal rents report the least informative signal
    near = idx[rent[idx] <= rent[idx].min() + 1e-12]
    i = near[np.lexsort((a[near], b[near] - a[near]))[0]]
    return EfficiencyRentReport(
        float(rent[i]),
        BinarySignal(float(a[i]), float(b[i])),
        WelfareOutcome(float(outs[i, 0]), float(outs[i, 1])),
        int(eff.sum()),
    )


class Protocol(enum.Enum):
    CHEAP_TALK = "CheapTalk"
    VOLUNTARY_DISCLOSURE = "VoluntaryDisclosure"
    REQUEST_CONSENT_INFORMED = "RequestConsentInformed"
    REQUEST_CONSENT_UNINFORMED = "RequestConsentUninformed"


@dataclass(frozen=True)
class OutcomeCurve:
    points: np.ndarray
    signals: tuple[BinarySignal, ...]


def protocol_outcomes(
    protocol: Protocol,
    mkt: MarketPrimitives,
    dist: TypeDistribution,
    grid_size: int = 2001,
    directions: int = 720,
    curve_points: int = 1001,
):
    """Equilibrium outcome(s) of a data-sharing protocol.

    Cheap talk requires full support and refuses otherwise; the other
    protocols warn and proceed.
    """
    protocol = Protocol(protocol)
    if not dist.has_full_support:
        if protocol is Protocol.CHEAP_TALK:
            raise FullSupportRequired("cheap-talk outcome is characterized only for full-support types")
        warnings.warn(f"{protocol.value}: characterization assumes full-support types", UserWarning, stacklevel=2)
    if protocol is Protocol.CHEAP_TALK:
        return no_info_outcome(mkt, dist)
    if protocol is Protocol.VOLUNTARY_DISCLOSURE:
        alphas = np.linspace(0.0, 1.0, curve_points)
        pts = binary_outcomes(alphas, np.ones_like(alphas), mkt, dist)
        return OutcomeCurve(pts, tuple(BinarySignal(float(x), 1.0) for x in alphas))
    full = implementable_set(mkt, dist, grid_size, directions)
    if protocol is Protocol.REQUEST_CONSENT_INFORMED:
        return full
    return full.clip((1.0, 0.0), baselines(mkt, dist).u_noinfo - 1e-12)


def protocol_points(result) -> np.ndarray:
    if isinstance(result, WelfareOutcome):
        return result.as_array()[None, :]
    if isinstance(result, OutcomeCurve):
        return result.points
    return result.boundary


def protocol_report_json(protocol: Protocol, result) -> str:
    pts = protocol_points(result)
    body = {"protocol": Protocol(protocol).value, "points": [{"U": float(u), "Pi": float(p)} for u, p in pts]}
    return json.dumps(body, indent=2)


def two_type_example(theta_low: float, theta_high: float) -> DiscreteAtoms:
    """Equally likely pair of types, the usual witness for strict rent."""
    return DiscreteAtoms((theta_low, theta_high), (0.5, 0.5))
