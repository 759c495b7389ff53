import json

import numpy as np
import pytest

from infodesign.core import (
    BoundaryCase,
    DiscreteAtoms,
    FullSupportRequired,
    MarketPrimitives,
    PiecewiseLinearCdf,
    PointMass,
    WelfareOutcome,
)
from infodesign.geometry import distances_outside_polygon, hausdorff
from infodesign.implications import (
    OutcomeCurve,
    Protocol,
    Regime,
    classify,
    constrained_seller_optimal,
    efficiency_rent_check,
    protocol_outcomes,
    protocol_points,
    protocol_report_json,
    third_party_comparison,
    two_type_example,
)
from infodesign.payoffs import baselines
from infodesign.persuasion import implementable_set, split_outcome
from infodesign.uniform import left_boundary, uniform_outcome_set


def random_full_support(rng):
    inner = np.sort(rng.uniform(0.05, 0.95, 3))
    f = np.sort(rng.uniform(0, 1, 3))
    knots = [(0.0, 0.0)] + [(float(t), float(v)) for t, v in zip(inner, f)] + [(1.0, 1.0)]
    # strictly increasing CDF keeps full support
    knots = [(t, v + 1e-3 * k) for k, (t, v) in enumerate(knots)]
    top = knots[-1][1]
    return PiecewiseLinearCdf(tuple((t, v / top) for t, v in knots))


class TestConstrainedOptimum:
    def test_uniform_13(self, mkt13, uniform):
        r = constrained_seller_optimal(mkt13, uniform)
        assert r.outcome.buyer_surplus >= 1 / 9 - 1e-9
        assert r.outcome.seller_profit == pytest.approx(11 / 6, abs=1e-4)
        assert r.split is not None and len(r.split) <= 3
        o = split_outcome(r.split, mkt13, uniform)
        assert tuple(o) == pytest.approx(tuple(r.outcome), abs=1e-6)

    def test_on_upper_boundary(self, mkt13, uniform):
        r = constrained_seller_optimal(mkt13, uniform, certify=False)
        s = implementable_set(mkt13, uniform)
        assert s.distance_outside(tuple(r.outcome)) <= 1e-9
        # nothing in the set above it at the same buyer surplus
        assert s.clip((1.0, 0.0), r.outcome.buyer_surplus).argmax((0.0, 1.0))[1] <= r.outcome.seller_profit + 1e-9

    def test_uniform_23_is_no_info(self, mkt23, uniform):
        r = constrained_seller_optimal(mkt23, uniform, certify=False)
        assert tuple(r.outcome) == pytest.approx((2 / 9, 13 / 6), abs=1e-9)

    def test_point_mass_high(self, mkt13):
        r = constrained_seller_optimal(mkt13, PointMass(0.6))
        assert tuple(r.outcome) == pytest.approx((0.0, 0.6 * 3 + 0.4 * 1))

    def test_point_mass_low(self, mkt13):
        r = constrained_seller_optimal(mkt13, PointMass(0.2))
        assert tuple(r.outcome) == pytest.approx((0.2 * 2, 1.0))


class TestRegimes:
    def test_l1(self, mkt13, uniform):
        rep = third_party_comparison(mkt13, uniform)
        assert tuple(rep.uninformed) == pytest.approx((0.0, 2.0))
        assert rep.regime is Regime.SELLER_WORSE_BUYER_BETTER
        assert rep.informed.seller_profit < 2.0 and rep.informed.buyer_surplus > 0.0

    def test_l2(self, mkt23, uniform):
        rep = third_party_comparison(mkt23, uniform)
        assert tuple(rep.uninformed) == pytest.approx((0.5, 2.0))
        assert rep.regime is Regime.SELLER_BETTER_BUYER_WORSE
        assert rep.informed.seller_profit > 2.0 and rep.informed.buyer_surplus < 0.5

    def test_boundary_guard(self):
        with pytest.raises(BoundaryCase):
            third_party_comparison(MarketPrimitives(1.0, 2.5), PointMass(0.4))

    def test_classify(self):
        base = WelfareOutcome(0.1, 1.0)
        assert classify(base, WelfareOutcome(0.1, 1.0)) is Regime.BOUNDARY
        assert classify(base, WelfareOutcome(0.2, 0.9)) is Regime.SELLER_WORSE_BUYER_BETTER
        assert classify(base, WelfareOutcome(0.0, 1.1)) is Regime.SELLER_BETTER_BUYER_WORSE

    @pytest.mark.slow
    @pytest.mark.parametrize("side", [1, -1])
    def test_random_distributions(self, side):
        rng = np.random.default_rng(100 + side)
        for _ in range(20):
            dist = random_full_support(rng)
            ratio = dist.mean() - side * rng.uniform(0.05, 0.2)
            ratio = float(np.clip(ratio, 0.05, 0.95))
            mkt = MarketPrimitives(3.0 * ratio, 3.0)
            rep = third_party_comparison(mkt, dist, 1001, 360)
            expected = Regime.SELLER_WORSE_BUYER_BETTER if side == 1 else Regime.SELLER_BETTER_BUYER_WORSE
            assert rep.regime is expected, (str(dist), mkt, rep)


class TestEfficiencyRent:
    def test_uniform_only_full_information(self, mkt13, uniform):
        r = efficiency_rent_check(mkt13, uniform)
        assert r.qualifying == 1
        assert (r.witness.alpha, r.witness.beta) == (0.0, 1.0)
        assert r.min_rent == pytest.approx(baselines(mkt13, uniform).max_rent)
        assert r.outcome.buyer_surplus == pytest.approx(0.0, abs=1e-12)

    def test_two_types_positive_rent(self, mkt13):
        d = two_type_example(0.2, 0.6)
        r = efficiency_rent_check(mkt13, d)
        assert r.min_rent > 0
        r2 = efficiency_rent_check(mkt13, d, exclude_full_information=True)
        assert r2.min_rent > 0

    def test_point_mass_zero_rent(self, mkt13):
        r = efficiency_rent_check(mkt13, PointMass(0.2))
        assert r.min_rent == pytest.approx(0.0, abs=1e-12)
        assert (r.witness.alpha, r.witness.beta) == (0.0, 0.0)


class TestProtocols:
    def test_cheap_talk(self, mkt13, uniform):
        o = protocol_outcomes(Protocol.CHEAP_TALK, mkt13, uniform)
        assert tuple(o) == pytest.approx((1 / 9, 5 / 3))

    def test_cheap_talk_requires_full_support(self, mkt13):
        with pytest.raises(FullSupportRequired):
            protocol_outcomes(Protocol.CHEAP_TALK, mkt13, DiscreteAtoms((0.2, 0.8), (0.5, 0.5)))

    def test_others_warn(self, mkt13):
        with pytest.warns(UserWarning):
            protocol_outcomes(Protocol.VOLUNTARY_DISCLOSURE, mkt13, DiscreteAtoms((0.2, 0.8), (0.5, 0.5)))

    def test_voluntary_disclosure_is_left_boundary(self, mkt13, uniform):
        curve = protocol_outcomes(Protocol.VOLUNTARY_DISCLOSURE, mkt13, uniform)
        assert isinstance(curve, OutcomeCurve)
        assert tuple(curve.points[0]) == pytest.approx((0.0, 2.0))
        assert tuple(curve.points[-1]) == pytest.approx((1 / 9, 5 / 3))
        left = np.array([tuple(p.outcome) for p in left_boundary(mkt13, 2001)])
        assert hausdorff(curve.points, left) <= 2e-3

    def test_voluntary_disclosure_inside_set(self, mkt13, uniform):
        curve = protocol_outcomes(Protocol.VOLUNTARY_DISCLOSURE, mkt13, uniform, curve_points=201)
        exact = uniform_outcome_set(mkt13, 20001)
        assert distances_outside_polygon(exact.boundary, curve.points).max() <= 1e-6

    def test_request_consent_nested(self, mkt13, uniform):
        inf = protocol_outcomes(Protocol.REQUEST_CONSENT_INFORMED, mkt13, uniform)
        unin = protocol_outcomes(Protocol.REQUEST_CONSENT_UNINFORMED, mkt13, uniform)
        assert distances_outside_polygon(inf.boundary, unin.boundary).max() <= 1e-9
        assert unin.boundary[:, 0].min() >= 1 / 9 - 1e-9

    def test_request_consent_uninformed_collapses(self, mkt23, uniform):
        s = protocol_outcomes(Protocol.REQUEST_CONSENT_UNINFORMED, mkt23, uniform)
        assert np.allclose(s.boundary, [[2 / 9, 13 / 6]], atol=1e-9)

    def test_json(self, mkt13, uniform):
        res = protocol_outcomes("CheapTalk", mkt13, uniform)
        body = json.loads(protocol_report_json(Protocol.CHEAP_TALK, res))
        assert body["protocol"] == "CheapTalk"
        assert body["points"][0]["U"] == pytest.approx(1 / 9)
        assert protocol_points(res).shape == (1, 2)
