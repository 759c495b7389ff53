"""Implementable welfare outcomes when a buyer's data is provided to a seller
who privately knows something about the buyer's value."""

from infodesign.beliefs import TieBreak, belief_for_threshold, optimal_price_binary, posterior_update, threshold_type
from infodesign.core import (
    BinarySignal,
    DiscreteAtoms,
    FiniteSignal,
    MarketPrimitives,
    OutcomeSet,
    PiecewiseLinearCdf,
    PointMass,
    TypeDistribution,
    Uniform01,
    WelfareOutcome,
    integrate_over_types,
    mean_type,
)
from infodesign.payoffs import baselines, indirect_buyer_surplus, indirect_seller_profit, observable_triangle
from infodesign.persuasion import implementable_set, outcome_of_signal, support_value

__all__ = [
    "BinarySignal",
    "DiscreteAtoms",
    "FiniteSignal",
    "MarketPrimitives",
    "OutcomeSet",
    "PiecewiseLinearCdf",
    "PointMass",
    "TieBreak",
    "TypeDistribution",
    "Uniform01",
    "WelfareOutcome",
    "baselines",
    "belief_for_threshold",
    "implementable_set",
    "indirect_buyer_surplus",
    "indirect_seller_profit",
    "integrate_over_types",
    "mean_type",
    "observable_triangle",
    "optimal_price_binary",
    "outcome_of_signal",
    "posterior_update",
    "support_value",
    "threshold_type",
]
