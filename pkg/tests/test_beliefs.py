import numpy as np
import pytest
from scipy.optimize import brentq

from infodesign.beliefs import (
    TieBreak,
    belief_for_threshold,
    optimal_price_binary,
    posterior_update,
    threshold_type,
)
from infodesign.core import DegeneratePrior, MarketPrimitives


class TestPosterior:
    def test_uninformative_realization_returns_type(self):
        assert posterior_update(0.5, 0.7, 0.5) == pytest.approx(0.7)

    def test_revealed_high(self):
        assert posterior_update(1.0, 0.3, 0.5) == 1.0

    def test_direct_evaluation(self):
        assert posterior_update(0.8, 0.25, 0.5) == pytest.approx(0.25 * 0.8 / (0.25 * 0.8 + 0.75 * 0.2))

    def test_zero_over_zero_returns_type(self):
        assert posterior_update(1.0, 0.0, 0.5) == 0.0
        assert posterior_update(0.0, 1.0, 0.5) == 1.0

    def test_degenerate_prior(self):
        with pytest.raises(DegeneratePrior):
            posterior_update(0.5, 0.5, 1.0)

    def test_monotone_on_grid(self):
        g = np.linspace(0, 1, 101)
        t = np.array([[posterior_update(m, th, 0.4) for th in g] for m in g])
        assert np.all(np.diff(t, axis=0) >= -1e-15)
        assert np.all(np.diff(t, axis=1) >= -1e-15)
        inner = t[1:-1, 1:-1]
        assert np.all(np.diff(inner, axis=0) > 0)
        assert np.all(np.diff(inner, axis=1) > 0)


class TestThreshold:
    def test_at_prior(self, mkt13):
        assert threshold_type(0.5, mkt13, 0.5) == pytest.approx(1 / 3)

    def test_revealed_high(self, mkt13):
        assert threshold_type(1.0, mkt13, 0.5) == 0.0

    def test_against_bisection(self, mkt13):
        ref = brentq(lambda th: posterior_update(0.25, th, 0.5) - mkt13.ratio, 0.0, 1.0, xtol=1e-15)
        assert threshold_type(0.25, mkt13, 0.5) == pytest.approx(ref, abs=1e-12)
        assert threshold_type(0.25, mkt13, 0.5) == pytest.approx(0.6, abs=1e-12)

    def test_strictly_decreasing(self, mkt23):
        mus = np.linspace(0.001, 0.999, 999)
        th = np.array([threshold_type(m, mkt23, 0.3) for m in mus])
        assert np.all(np.diff(th) < 0)

    @pytest.mark.parametrize("mu0", [0.2, 0.5, 0.8])
    def test_composition_identity(self, mkt13, mu0):
        for m in np.linspace(0.0, 1.0, 1001)[1:-1]:
            assert posterior_update(m, threshold_type(m, mkt13, mu0), mu0) == pytest.approx(mkt13.ratio, abs=1e-12)

    def test_inverse(self, mkt13):
        for m in np.linspace(0.01, 0.99, 50):
            assert belief_for_threshold(threshold_type(m, mkt13, 0.5), mkt13, 0.5) == pytest.approx(m, abs=1e-12)


class TestPricing:
    def test_high_posterior(self, mkt13):
        assert optimal_price_binary(0.9, mkt13, TieBreak.LOW) == 3.0
        assert optimal_price_binary(0.9, mkt13, TieBreak.HIGH) == 3.0

    def test_tie(self, mkt13):
        assert optimal_price_binary(1 / 3, mkt13, TieBreak.LOW) == 1.0
        assert optimal_price_binary(1 / 3, mkt13, TieBreak.HIGH) == 3.0

    def test_low_posterior(self, mkt13):
        assert optimal_price_binary(0.2, mkt13) == 1.0
        assert optimal_price_binary(0.2, mkt13, TieBreak.HIGH) == 1.0

    def test_brute_force(self):
        m = MarketPrimitives(1.5, 4.0)
        for t in np.linspace(0, 1, 201):
            rev = {m.low: m.low, m.high: t * m.high}
            best = max(rev.values())
            if abs(rev[m.low] - rev[m.high]) > 1e-12:
                assert rev[optimal_price_binary(t, m)] == best
