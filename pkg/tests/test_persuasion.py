import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infodesign.core import (
    BinarySignal,
    DiscreteAtoms,
    FiniteSignal,
    MarketPrimitives,
    NotBayesPlausible,
    PiecewiseLinearCdf,
    PointMass,
    SolverError,
    Uniform01,
)
from infodesign.geometry import distance_to_polyline, distances_outside_polygon, hausdorff
from infodesign.payoffs import indirect_payoffs, no_info_outcome, observable_triangle
from infodesign.persuasion import (
    BeliefSplit,
    binary_outcomes,
    certify_outcome,
    concavify_at,
    implementable_set,
    outcome_of_signal,
    sample_graph,
    signal_to_split,
    split_outcome,
    split_to_signal,
    support_value,
    sweep_directions,
)


@pytest.fixture(scope="module")
def set13():
    return implementable_set(MarketPrimitives(1.0, 3.0), Uniform01(), 2001, 720)


def brute_concave_envelope(mus, vals, mu0):
    best = max((v for m, v in zip(mus, vals) if m == mu0), default=-np.inf)
    for i, j in itertools.product(range(len(mus)), repeat=2):
        if mus[i] < mu0 < mus[j]:
            w = (mus[j] - mu0) / (mus[j] - mus[i])
            best = max(best, w * vals[i] + (1 - w) * vals[j])
    return best


class TestGraph:
    def test_endpoints(self, mkt13):
        for dist in (Uniform01(), DiscreteAtoms((0.2, 0.9), (0.5, 0.5))):
            g = sample_graph(mkt13, dist, 101)
            assert g.mus[0] == 0.0 and g.mus[-1] == 1.0
            assert np.allclose(g.points[0], (0.0, 1.0))
            assert np.allclose(g.points[-1], (0.0, 3.0))
            assert dist.mean() in g.mus

    def test_no_info_point(self, mkt13, uniform):
        g = sample_graph(mkt13, uniform, 101)
        k = int(np.flatnonzero(g.mus == 0.5)[0])
        assert np.allclose(g.points[k], (1 / 9, 5 / 3), atol=1e-12)

    def test_atom_ties_get_alternate_points(self, mkt13):
        g = sample_graph(mkt13, DiscreteAtoms((0.2, 0.6), (0.5, 0.5)), 101)
        assert len(g.alt_mus) == 2


class TestConcavify:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(3, 25))
    def test_matches_brute_force(self, seed, n):
        rng = np.random.default_rng(seed)
        mus = np.unique(np.concatenate([[0.0, 1.0], rng.uniform(size=n)]))
        vals = rng.normal(size=len(mus))
        mu0 = float(rng.uniform(0.05, 0.95))
        val, idx, w = concavify_at(mus, vals, mu0)
        assert val == pytest.approx(brute_concave_envelope(mus, vals, mu0), abs=1e-12)
        assert len(idx) <= 2
        assert float(np.dot(w, mus[list(idx)])) == pytest.approx(mu0, abs=1e-12)
        assert float(np.dot(w, vals[list(idx)])) == pytest.approx(val, abs=1e-12)

    def test_one_sided_samples(self):
        with pytest.raises(NotBayesPlausible):
            concavify_at([0.6, 0.8], [1.0, 2.0], 0.5)


class TestSupportValue:
    def test_profit_direction(self, mkt13, uniform):
        r = support_value((0.0, 1.0), mkt13, uniform, 2001)
        assert r.value == pytest.approx(2.0, abs=1e-12)
        assert r.split.support == (0.0, 1.0)
        assert r.split.weights == pytest.approx((0.5, 0.5))

    def test_negative_profit_direction(self, mkt13, uniform):
        r = support_value((0.0, -1.0), mkt13, uniform, 2001)
        assert r.value == pytest.approx(-5 / 3, abs=1e-12)
        assert r.split.support == (0.5,)

    def test_buyer_direction(self, mkt13, uniform):
        r = support_value((1.0, 0.0), mkt13, uniform, 2001)
        assert r.value == pytest.approx(1 / 8, abs=1e-6)
        # U is maximized by pooling at the belief where the threshold is 1/2, plus full revelation of H
        assert r.split.support[0] == pytest.approx(1 / 3, abs=1e-3)
        assert r.split.support[1] == pytest.approx(1.0)
        assert r.split.weights[0] == pytest.approx(0.75, abs=1e-3)
        assert r.point.seller_profit == pytest.approx(1.75, abs=1e-3)

    def test_zero_direction(self, mkt13, uniform):
        with pytest.raises(ValueError):
            support_value((0.0, 0.0), mkt13, uniform, 11)


class TestImplementableSet:
    def test_fig2a_anchor_points(self, set13):
        for p in [(0.0, 2.0), (1 / 9, 5 / 3), (1 / 8, 7 / 4)]:
            assert distance_to_polyline(np.array(p), set13.boundary, closed=True) <= 1e-3

    def test_fig2b_anchor_points(self, mkt23, uniform):
        s = implementable_set(mkt23, uniform, 2001, 720)
        for p in [(0.0, 2.5), (2 / 9, 13 / 6)]:
            assert distance_to_polyline(np.array(p), s.boundary, closed=True) <= 1e-3

    @pytest.mark.parametrize("theta0", [0.2, 0.5, 0.8])
    def test_point_mass_equals_triangle(self, mkt13, theta0):
        d = PointMass(theta0)
        s = implementable_set(mkt13, d, 401, 180)
        tri = observable_triangle(mkt13, d)
        assert hausdorff(s.boundary, tri.boundary, closed_a=True, closed_b=True) <= 1e-9

    def test_degenerate_prior(self, mkt13):
        s = implementable_set(mkt13, PointMass(1.0))
        assert s.boundary.tolist() == [[0.0, 3.0]]

    def test_no_info_inside(self, mkt13):
        for dist in (Uniform01(), DiscreteAtoms((0.1, 0.4, 0.9), (0.2, 0.5, 0.3))):
            s = implementable_set(mkt13, dist, 501, 180)
            assert s.contains(tuple(no_info_outcome(mkt13, dist)), tol=1e-9)

    def test_brute_force_triples_inside(self, mkt13):
        dist = DiscreteAtoms((0.1, 0.4, 0.9), (0.2, 0.5, 0.3))
        mu0 = dist.mean()
        s = implementable_set(mkt13, dist, 2001, 720)
        grid = np.linspace(0, 1, 21)
        u, p = indirect_payoffs(grid, mkt13, dist)
        pts = []
        for i, j, k in itertools.combinations(range(len(grid)), 3):
            a, b, c = grid[i], grid[j], grid[k]
            if not a <= mu0 <= c:
                continue
            for wb in np.linspace(0, 1, 6):
                rest = mu0 - wb * b
                # remaining weight 1 - wb split between a and c to hit mu0
                if c == a:
                    continue
                wc = (rest - (1 - wb) * a) / (c - a)
                wa = 1 - wb - wc
                if wa < -1e-12 or wc < -1e-12:
                    continue
                pts.append((wa * u[i] + wb * u[j] + wc * u[k], wa * p[i] + wb * p[j] + wc * p[k]))
        assert len(pts) > 100
        assert distances_outside_polygon(s.boundary, np.array(pts)).max() <= 1e-6

    def test_boundary_certificates_use_two_points(self, set13, mkt13, uniform):
        assert len(set13.certificates) == len(set13.boundary)
        for v, c in zip(set13.boundary, set13.certificates):
            assert len(c) <= 2
            assert c.mean == pytest.approx(0.5, abs=1e-9)
            o = split_outcome(c, mkt13, uniform)
            assert np.allclose((o.buyer_surplus, o.seller_profit), v, atol=1e-9)

    def test_refinement_never_moves_inward(self, mkt13):
        dist = PiecewiseLinearCdf(((0.0, 0.0), (0.5, 0.7), (1.0, 1.0)))
        coarse = sweep_directions(mkt13, dist, 201, 90)
        fine = sweep_directions(mkt13, dist, 401, 180)
        for k, r in enumerate(coarse):
            assert fine[2 * k].direction == pytest.approx(r.direction)
            assert fine[2 * k].value >= r.value - 1e-9

    def test_direction_count_guard(self, mkt13, uniform):
        with pytest.raises(ValueError):
            implementable_set(mkt13, uniform, 101, 4)


class TestSignals:
    def test_full_information_split(self):
        f = split_to_signal(BeliefSplit((0.0, 1.0), (0.5, 0.5)), 0.5)
        assert np.allclose(f.as_array(), np.eye(2))

    def test_uninformative_split(self):
        f = split_to_signal(BeliefSplit((0.5,), (1.0,)), 0.5)
        assert f.realization_count == 1

    def test_worked_split(self):
        f = split_to_signal(BeliefSplit((0.0, 0.5), (0.5, 0.5)), 0.25)
        assert f.likelihood[1][1] == pytest.approx(1.0)
        assert f.likelihood[0][1] == pytest.approx(1 / 3)
        back = signal_to_split(f, 0.25)
        assert back.support == pytest.approx((0.0, 0.5))

    def test_not_bayes_plausible(self):
        with pytest.raises(NotBayesPlausible):
            split_to_signal(BeliefSplit((0.0, 1.0), (0.5, 0.5)), 0.3)

    def test_benchmark_outcomes(self, mkt13, uniform):
        o = outcome_of_signal(FiniteSignal.uninformative(), mkt13, uniform)
        assert tuple(o) == pytest.approx((1 / 9, 5 / 3), abs=1e-12)
        o = outcome_of_signal(FiniteSignal.fully_informative(), mkt13, uniform)
        assert tuple(o) == pytest.approx((0.0, 2.0), abs=1e-12)
        o = outcome_of_signal(BinarySignal(0.0, 0.5).to_finite(), mkt13, uniform)
        assert tuple(o) == pytest.approx((0.125, 1.75), abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=4), st.data())
    def test_split_signal_consistency(self, raw, data):
        mkt = MarketPrimitives(1.0, 3.0)
        dist = DiscreteAtoms((0.1, 0.5, 0.8), (0.3, 0.3, 0.4))
        mu0 = dist.mean()
        lo = data.draw(st.floats(0.0, mu0 - 0.01))
        hi = data.draw(st.floats(mu0 + 0.01, 1.0))
        w = (hi - mu0) / (hi - lo)
        split = BeliefSplit((lo, hi), (w, 1 - w))
        o1 = split_outcome(split, mkt, dist)
        o2 = outcome_of_signal(split_to_signal(split, mu0), mkt, dist)
        assert o1.buyer_surplus == pytest.approx(o2.buyer_surplus, abs=1e-9)
        assert o1.seller_profit == pytest.approx(o2.seller_profit, abs=1e-9)

    def test_binary_outcomes_vectorized(self, mkt13):
        dist = DiscreteAtoms((0.2, 0.7), (0.4, 0.6))
        a = np.array([0.0, 0.1, 0.3, 1.0])
        b = np.array([0.0, 0.5, 0.9, 1.0])
        out = binary_outcomes(a, b, mkt13, dist)
        for (x, y), row in zip(zip(a, b), out):
            o = outcome_of_signal(BinarySignal(x, y).to_finite(), mkt13, dist)
            assert np.allclose(row, tuple(o), atol=1e-12)


class TestCertify:
    def test_interior_point_three_beliefs(self, set13, mkt13, uniform):
        target = (0.06, 1.8)
        assert set13.contains(target)
        split = certify_outcome(target, mkt13, uniform, tol=1e-9)
        assert len(split) <= 3
        assert split.mean == pytest.approx(0.5, abs=1e-9)
        o = split_outcome(split, mkt13, uniform)
        assert (o.buyer_surplus, o.seller_profit) == pytest.approx(target, abs=1e-9)

    def test_many_interior_points(self, set13, mkt13, uniform):
        rng = np.random.default_rng(2)
        done = 0
        while done < 10:
            p = rng.uniform((0, 5 / 3), (1 / 8, 2))
            if set13.distance_outside(p) > 0 or np.min(np.abs(set13.boundary @ [1, 0] - p[0])) < 1e-3:
                continue
            if not set13.clip((1.0, 0.0), 0.0).contains(p):
                continue
            try:
                split = certify_outcome(p, mkt13, uniform, tol=1e-9)
            except SolverError:
                # near-boundary points within grid error are not certifiable exactly
                assert set13.clip((0.0, 1.0), 0.0).contains(p)
                continue
            assert len(split) <= 3
            o = split_outcome(split, mkt13, uniform)
            assert max(abs(o.buyer_surplus - p[0]), abs(o.seller_profit - p[1])) <= 1e-9
            done += 1

    def test_boundary_point(self, mkt13, uniform):
        split = certify_outcome((0.125, 1.75), mkt13, uniform, tol=1e-9)
        assert len(split) <= 3
        assert tuple(split_outcome(split, mkt13, uniform)) == pytest.approx((0.125, 1.75), abs=1e-9)

    def test_infeasible(self, mkt13, uniform):
        with pytest.raises(SolverError):
            certify_outcome((0.5, 2.5), mkt13, uniform)
