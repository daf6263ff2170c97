import math

import numpy as np
import pytest
from scipy.special import gammaln

from gammacop.errors import ConvergenceError, DomainError
from gammacop.specialfn import (
    SeriesControl,
    default_control,
    horn_phi3,
    hyp0f1,
    hyp1f1,
    lauricella_FI,
    lauricella_FII,
    log_horn_phi3,
    log_hyp0f1,
    log_lauricella_FI,
    log_lauricella_FII,
    pfq,
    pochhammer,
)

from support import lauricella_fi_naive, lauricella_fii_naive, pfq_naive, phi3_naive


class TestPochhammer:
    def test_zeroth(self):
        for a in (-3.2, 0.0, 0.5, 7.0):
            assert pochhammer(a, 0) == 1.0

    def test_factorial(self):
        for k in range(8):
            assert pochhammer(1.0, k) == math.factorial(k)

    def test_gamma_ratio(self):
        for lam in (0.3, 1.7, 9.0):
            for k in (1, 5, 40, 120):
                want = math.exp(gammaln(lam + k) - gammaln(lam))
                assert pochhammer(lam, k) == pytest.approx(want, rel=1e-10)

    def test_negative_argument(self):
        assert pochhammer(-2.0, 3) == (-2.0) * (-1.0) * 0.0
        assert pochhammer(-2.5, 2) == (-2.5) * (-1.5)


class TestPfq:
    def test_z_zero(self):
        assert pfq([5.0, -1.0], [0.1], 0.0) == 1.0

    def test_0f1_brute_force(self):
        want = pfq_naive([], [1.0], 1.0, 200)
        assert pfq([], [1.0], 1.0) == pytest.approx(want, rel=1e-13)

    def test_3f2_at_zero(self):
        assert pfq([1.0, 1.0, 1.5], [2.0, 3.0], 0.0) == 1.0

    def test_geometric_series(self):
        # 1F0(1;;z) = 1/(1-z)
        assert pfq([1.0], [], 0.25) == pytest.approx(4.0 / 3.0, rel=1e-13)

    def test_domain_beyond_unit(self):
        with pytest.raises(DomainError):
            pfq([1.0, 1.0, 1.0], [2.0, 2.0], 1.5)

    def test_unit_argument_needs_excess(self):
        with pytest.raises(DomainError):
            pfq([1.0, 1.0, 2.0], [2.0, 2.0], 1.0)
        # positive excess converges: zeta-like value
        value = pfq([1.0, 1.0, 1.0], [3.0, 3.0], 1.0,
                    SeriesControl(max_terms=100000, tail_window=20))
        assert np.isfinite(value) and value > 1.0

    def test_truncating_upper_lifts_domain(self):
        # polynomial case: 2F0(-2, 1; ; z) truncates after 3 terms
        z = 3.0
        want = 1.0 + (-2.0) * 1.0 * z + ((-2.0) * (-1.0)) * (1.0 * 2.0) * z**2 / 2.0
        assert pfq([-2.0, 1.0], [], z) == pytest.approx(want, rel=1e-14)

    def test_lower_pole_rejected(self):
        with pytest.raises(DomainError):
            pfq([0.5], [-3.0], 0.1)
        # but a truncating upper that stops first is fine
        assert np.isfinite(pfq([-2.0], [-3.0], 0.1))

    def test_convergence_error_carries_partial(self):
        with pytest.raises(ConvergenceError) as err:
            pfq([], [1.0], 50.0, SeriesControl(max_terms=3))
        assert err.value.partial is not None
        assert err.value.est_error is not None

    def test_random_grid_vs_naive(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            p, q = rng.integers(0, 3), rng.integers(1, 3)
            upper = list(rng.uniform(0.3, 4.0, p))
            lower = list(rng.uniform(0.3, 4.0, q))
            z = float(rng.uniform(-5.0, 5.0))
            if p == q + 1:
                z = float(rng.uniform(-0.9, 0.9))
            want = pfq_naive(upper, lower, z, 250)
            assert pfq(upper, lower, z) == pytest.approx(want, rel=1e-11)


class TestPhi3:
    def test_at_origin(self):
        assert horn_phi3(1.5, 2.0, 0.0, 0.0) == 1.0

    def test_x_zero_reduces_to_0f1(self):
        for b, y in ((1.0, 3.0), (2.5, 0.7), (0.8, 12.0)):
            want = pfq([], [b], y)
            assert horn_phi3(1.7, b, 0.0, y) == pytest.approx(want, rel=1e-12)

    def test_a_zero_reduces_to_0f1(self):
        for b, x, y in ((1.0, 2.0, 3.0), (2.5, 5.0, 0.7)):
            want = pfq([], [b], y)
            assert horn_phi3(0.0, b, x, y) == pytest.approx(want, rel=1e-12)

    def test_random_grid_vs_naive(self):
        rng = np.random.default_rng(37)
        for _ in range(20):
            a, b = rng.uniform(0.3, 4.0, 2)
            x, y = rng.uniform(0.0, 5.0, 2)
            want = phi3_naive(a, b, x, y, 80)
            assert horn_phi3(a, b, x, y) == pytest.approx(want, rel=1e-11)

    def test_negative_x_documented_loss(self):
        a, b, x, y = 1.5, 2.0, -4.0, 3.0
        want = phi3_naive(a, b, x, y, 120)
        assert horn_phi3(a, b, x, y) == pytest.approx(want, rel=1e-9)

    def test_vectorized(self):
        x = np.array([0.0, 1.0, 4.0])
        y = np.array([2.0, 2.0, 2.0])
        got = horn_phi3(1.2, 2.2, x, y)
        for i in range(3):
            assert got[i] == pytest.approx(horn_phi3(1.2, 2.2, x[i], y[i]), rel=1e-13)

    def test_nonpositive_integer_parameter(self):
        with pytest.raises(DomainError):
            horn_phi3(1.0, -2.0, 0.5, 0.5)


class TestLauricellaFI:
    def test_at_origin(self):
        assert lauricella_FI(0.5, 1.5, 2.0, 0.0, 0.0, 0.0) == 1.0

    def test_a_zero_is_phi3(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            b, c = rng.uniform(0.3, 3.0, 2)
            z1, z2, z3 = rng.uniform(0.0, 5.0, 3)
            want = horn_phi3(b, b + c, z2, z3)
            got = lauricella_FI(0.0, b, c, z1, z2, z3)
            assert got == pytest.approx(want, rel=1e-11)

    def test_single_index_collapse_is_1f1(self):
        a, c = 1.3, 0.9
        z1 = 2.7
        want = pfq([a], [a + c], z1)
        assert lauricella_FI(a, 0.7, c, z1, 0.0, 0.0) == pytest.approx(want, rel=1e-12)

    def test_random_grid_vs_naive(self):
        rng = np.random.default_rng(43)
        for _ in range(10):
            a, b, c = rng.uniform(0.3, 3.0, 3)
            z1, z2, z3 = rng.uniform(0.0, 4.0, 3)
            want = lauricella_fi_naive(a, b, c, z1, z2, z3, 45)
            assert lauricella_FI(a, b, c, z1, z2, z3) == pytest.approx(want, rel=1e-11)


class TestLauricellaFII:
    def test_at_origin(self):
        assert lauricella_FII(1.5, 1.5, 0.0, 0.0, 0.0, 0.0) == 1.0

    def test_z2_only_is_0f2(self):
        for lam, z2 in ((0.7, 4.0), (2.0, 11.0)):
            want = pfq([], [lam, lam], z2)
            got = lauricella_FII(lam, lam, 0.0, z2, 0.0, 0.0)
            assert got == pytest.approx(want, rel=1e-12)

    def test_z3_only_is_0f1(self):
        lam1, lam2, z3 = 1.4, 2.2, 5.0
        want = pfq([], [lam1], z3)
        got = lauricella_FII(lam1, lam2, 0.0, 0.0, z3, 0.0)
        assert got == pytest.approx(want, rel=1e-12)

    def test_random_grid_vs_naive(self):
        rng = np.random.default_rng(47)
        for _ in range(6):
            l1, l2 = rng.uniform(0.4, 3.0, 2)
            z = rng.uniform(0.0, 3.0, 4)
            want = lauricella_fii_naive(l1, l2, z[0], z[1], z[2], z[3], 28)
            got = lauricella_FII(l1, l2, z[0], z[1], z[2], z[3])
            assert got == pytest.approx(want, rel=1e-11)

    def test_requires_positive_parameters(self):
        with pytest.raises(DomainError):
            lauricella_FII(0.0, 1.0, 1.0, 1.0, 1.0, 1.0)


class TestSeriesProperties:
    def test_positivity(self):
        rng = np.random.default_rng(53)
        for _ in range(10):
            a, b = rng.uniform(0.2, 4.0, 2)
            x, y = rng.uniform(0.0, 5.0, 2)
            assert horn_phi3(a, b, x, y) > 0.0
            assert lauricella_FI(a, b, 1.1, x, y, x) > 0.0
            assert lauricella_FII(a, b, x, y, x, y) > 0.0

    def test_monotonicity_in_arguments(self):
        grid = np.linspace(0.0, 5.0, 6)
        phi = horn_phi3(1.3, 2.0, grid, 1.0)
        assert np.all(np.diff(phi) > 0.0)
        fi = [lauricella_FI(0.7, 1.2, 1.5, z, 1.0, 2.0) for z in grid]
        assert np.all(np.diff(fi) > 0.0)
        fii = [lauricella_FII(1.0, 1.5, 0.5, z, 1.0, 2.0) for z in grid]
        assert np.all(np.diff(fii) > 0.0)

    def test_stopping_rule_soundness(self):
        # reported error estimate must bound the true residual
        rng = np.random.default_rng(59)
        loose = SeriesControl(rel_tol=1e-8, tail_window=2)
        tight = SeriesControl(rel_tol=1e-15, max_terms=800, tail_window=8)
        for _ in range(15):
            a, b = rng.uniform(0.3, 4.0, 2)
            x, y = rng.uniform(0.0, 5.0, 2)
            val, est = horn_phi3(a, b, x, y, loose, with_error=True)
            ref = horn_phi3(a, b, x, y, tight)
            assert abs(val - ref) <= est + 1e-15 * abs(ref)
            val, est = pfq([a, 1.0], [b, b + 1.0], min(x / 6.0, 0.8), loose,
                           with_error=True)
            ref = pfq([a, 1.0], [b, b + 1.0], min(x / 6.0, 0.8), tight)
            assert abs(val - ref) <= est + 1e-15 * abs(ref)
            val, est = lauricella_FII(a, b, x / 2, y / 2, x, y, loose, with_error=True)
            ref = lauricella_FII(a, b, x / 2, y / 2, x, y, tight)
            assert abs(val - ref) <= est + 1e-15 * abs(ref)


class TestLogSpace:
    def test_log_hyp0f1_matches_linear(self):
        for b, z in ((1.5, 10.0), (0.7, 120.0), (3.0, 2000.0)):
            assert log_hyp0f1(b, z) == pytest.approx(math.log(hyp0f1(b, z)), rel=1e-12)

    def test_log_hyp0f1_huge_argument(self):
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 30
        for b, z in ((2.0, 1e6), (1.0, 1e8)):
            want = float(mp.log(mp.hyp0f1(b, z)))
            assert log_hyp0f1(b, z) == pytest.approx(want, rel=1e-10)

    def test_log_phi3_matches_linear(self):
        for a, b, x, y in ((1.5, 2.0, 3.0, 8.0), (0.5, 1.0, 40.0, 100.0)):
            want = math.log(horn_phi3(a, b, x, y))
            assert log_horn_phi3(a, b, x, y) == pytest.approx(want, rel=1e-11)

    def test_log_fi_and_fii_match_linear(self):
        want = math.log(lauricella_FI(0.6, 1.1, 0.9, 2.0, 3.0, 4.0))
        assert log_lauricella_FI(0.6, 1.1, 0.9, 2.0, 3.0, 4.0) == pytest.approx(
            want, rel=1e-11)
        want = math.log(lauricella_FII(1.2, 0.9, 1.0, 2.0, 3.0, 4.0))
        assert log_lauricella_FII(1.2, 0.9, 1.0, 2.0, 3.0, 4.0) == pytest.approx(
            want, rel=1e-11)

    def test_log_paths_finite_beyond_overflow(self):
        assert np.isfinite(log_hyp0f1(1.5, 1e9))
        assert np.isfinite(log_horn_phi3(1.0, 2.0, 800.0, 1e7))
        assert np.isfinite(log_lauricella_FII(1.0, 1.0, 1e8, 1e6, 1e5, 2e4))


class TestControl:
    def test_invariants(self):
        with pytest.raises(DomainError):
            SeriesControl(rel_tol=0.0)
        with pytest.raises(DomainError):
            SeriesControl(max_terms=0)
        with pytest.raises(DomainError):
            SeriesControl(tail_window=0)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("GAMMACOP_MAX_TERMS", "17")
        assert default_control().max_terms == 17
        monkeypatch.delenv("GAMMACOP_MAX_TERMS")
        assert default_control().max_terms == 400

    def test_hyp1f1_truncates_on_zero_numerator(self):
        # a = 0 gives exactly 1
        assert hyp1f1(0.0, 2.0, 5.0) == 1.0
