"""Kernel twins: numerical checks against independent routes, and exact
parity between the compiled and reference implementations."""

import math

import numpy as np
import pytest
import scipy.stats

from mpisac.kernels import _reference

try:
    from mpisac.kernels import _native
except ImportError:
    _native = None

needs_native = pytest.mark.skipif(_native is None, reason="extension not built")


# Independent oracle for the Poisson-binomial tail: the distribution of the
# vote count is the coefficient list of prod_i (q_i + p_i z), built here by
# polynomial multiplication instead of the in-place counting recursion.
def poly_tail_le(probs, k):
    coeffs = np.array([1.0])
    for p in probs:
        coeffs = np.convolve(coeffs, np.array([1.0 - p, p]))
    if k < 0:
        return 0.0
    return float(coeffs[: k + 1].sum())


class TestPbTail:
    def test_matches_polynomial_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            n = int(rng.integers(1, 13))
            probs = rng.uniform(0.0, 1.0, size=n)
            k = int(rng.integers(-1, n + 2))
            got = _reference.pb_tail_le(probs, k)
            want = poly_tail_le(probs, k)
            assert got == pytest.approx(want, abs=1e-12)

    def test_degenerate_tails(self):
        probs = np.array([0.3, 0.4])
        assert _reference.pb_tail_le(probs, -1) == 0.0
        assert _reference.pb_tail_le(probs, 2) == 1.0
        assert _reference.pb_tail_le(probs, 5) == 1.0

    def test_certain_events(self):
        assert _reference.pb_tail_le(np.array([1.0, 1.0]), 1) == pytest.approx(0.0)
        assert _reference.pb_tail_le(np.array([0.0, 0.0]), 0) == pytest.approx(1.0)


class TestBinomTail:
    def test_matches_scipy_cdf(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            n = int(rng.integers(1, 80))
            p = float(rng.uniform(0.001, 0.999))
            k = int(rng.integers(0, n + 1))
            got = _reference.binom_tail_le(n, p, k)
            want = float(scipy.stats.binom.cdf(k, n, p))
            assert got == pytest.approx(want, rel=1e-12, abs=1e-14)

    def test_large_n_stays_finite(self):
        # naive C(n, l) overflows long before n = 500; the recurrence must not
        v = _reference.binom_tail_le(500, 0.3, 160)
        assert 0.0 < v < 1.0
        assert v == pytest.approx(float(scipy.stats.binom.cdf(160, 500, 0.3)), rel=1e-10)

    def test_edge_probabilities(self):
        assert _reference.binom_tail_le(5, 0.0, 0) == 1.0
        assert _reference.binom_tail_le(5, 1.0, 4) == 0.0
        assert _reference.binom_tail_le(5, 0.4, -1) == 0.0
        assert _reference.binom_tail_le(5, 0.4, 5) == 1.0


def random_feasible_allocations(a, budget, cap, rng, trials):
    """Sample allocations inside the constraint box with the budget active."""
    n = len(a)
    for _ in range(trials):
        raw = rng.uniform(0.0, 1.0, size=n)
        alloc = np.minimum(raw / raw.sum() * budget, cap)
        yield alloc


class TestWaterfill:
    def test_uncapped_hand_case(self):
        # two users, a = (1, 2): p_i proportional to a_i^2
        a = np.array([1.0, 2.0])
        out = np.zeros(2)
        lam = _reference.waterfill(a, 1.0, 10.0, out)
        assert out[0] == pytest.approx(0.2, abs=1e-9)
        assert out[1] == pytest.approx(0.8, abs=1e-9)
        assert lam == pytest.approx(math.sqrt(5.0) / 2.0, abs=1e-9)

    def test_cap_binds(self):
        a = np.array([1.0, 2.0])
        out = np.zeros(2)
        _reference.waterfill(a, 1.0, 0.5, out)
        assert out[0] == pytest.approx(0.5, abs=1e-9)
        assert out[1] == pytest.approx(0.5, abs=1e-9)

    def test_budget_exceeds_caps(self):
        a = np.array([1.0, 3.0, 0.5])
        out = np.zeros(3)
        lam = _reference.waterfill(a, 100.0, 2.0, out)
        assert lam == 0.0
        np.testing.assert_allclose(out, 2.0)

    def test_empty_and_zero_budget(self):
        out = np.zeros(0)
        assert _reference.waterfill(np.zeros(0), 1.0, 1.0, out) == 0.0
        out = np.zeros(2)
        _reference.waterfill(np.array([1.0, 1.0]), 0.0, 1.0, out)
        np.testing.assert_array_equal(out, 0.0)

    def test_beats_random_feasible_allocations(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            n = int(rng.integers(1, 6))
            a = rng.uniform(0.05, 3.0, size=n)
            budget = float(rng.uniform(0.1, 4.0))
            cap = float(rng.uniform(0.1, 2.0))
            out = np.zeros(n)
            _reference.waterfill(a, budget, cap, out)
            assert out.sum() <= min(budget, n * cap) + 1e-9
            assert np.all(out <= cap + 1e-12)
            obj = float(a @ np.sqrt(out))
            for alloc in random_feasible_allocations(a, budget, cap, rng, 200):
                assert obj >= float(a @ np.sqrt(alloc)) - 1e-9

    def test_kkt_consistency(self):
        # every returned power is the cap or the unconstrained level at lam
        rng = np.random.default_rng(31)
        for _ in range(50):
            n = int(rng.integers(1, 6))
            a = rng.uniform(0.05, 3.0, size=n)
            budget = float(rng.uniform(0.1, 4.0))
            cap = float(rng.uniform(0.1, 2.0))
            out = np.zeros(n)
            lam = _reference.waterfill(a, budget, cap, out)
            if lam == 0.0:
                np.testing.assert_allclose(out, np.minimum(cap, budget))
                continue
            level = np.minimum(cap, (a / (2.0 * lam)) ** 2)
            np.testing.assert_allclose(out, level, rtol=1e-9, atol=1e-12)


@needs_native
class TestNativeParity:
    """The compiled kernels must agree with the reference bit for bit."""

    def test_pb_tail_identical(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            n = int(rng.integers(1, 20))
            probs = rng.uniform(0.0, 1.0, size=n)
            k = int(rng.integers(-1, n + 2))
            assert _native.pb_tail_le(probs, k) == _reference.pb_tail_le(probs, k)

    def test_binom_tail_identical(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            n = int(rng.integers(1, 200))
            p = float(rng.uniform(0.0, 1.0))
            k = int(rng.integers(-1, n + 2))
            assert _native.binom_tail_le(n, p, k) == _reference.binom_tail_le(n, p, k)

    def test_waterfill_identical(self):
        rng = np.random.default_rng(9)
        for _ in range(500):
            n = int(rng.integers(0, 7))
            a = rng.uniform(0.0, 3.0, size=n)
            budget = float(rng.uniform(0.0, 4.0))
            cap = float(rng.uniform(0.01, 2.0))
            out_n = np.zeros(n)
            out_r = np.zeros(n)
            lam_n = _native.waterfill(a, budget, cap, out_n)
            lam_r = _reference.waterfill(a, budget, cap, out_r)
            assert lam_n == lam_r
            assert np.array_equal(out_n, out_r)
