import numpy as np
import pytest

from gammacop.divisibility import btilde, check_infinite_divisibility, partitions
from gammacop.errors import ArgumentError, PreconditionError
from gammacop.polynomial import (
    AffinePolynomial,
    cardinality,
    dual_polynomial,
    permute_polynomial,
    product_polynomial,
)
from gammacop.validation import btilde_via_log

from support import bell, partitions_brute, stirling2


def bivariate(p1=1.0, p2=1.0, p12=0.5):
    return AffinePolynomial.from_coeffs(2, {(1,): p1, (2,): p2, (1, 2): p12})


def as_sets(parts):
    return frozenset(frozenset(i + 1 for i in range(16) if b >> i & 1) for b in parts)


class TestPartitions:
    def test_pair_single_partition(self):
        got = list(partitions(0b11, 2))
        assert len(got) == 1
        assert as_sets(got[0]) == frozenset({frozenset({1}), frozenset({2})})

    def test_three_into_two(self):
        got = list(partitions(0b111, 2))
        assert len(got) == 3  # Stirling S(3,2)

    def test_four_into_two(self):
        got = list(partitions(0b1111, 2))
        assert len(got) == 7  # Stirling S(4,2)

    def test_counts_match_stirling(self):
        for size in range(1, 6):
            mask = (1 << size) - 1
            for k in range(1, size + 1):
                got = list(partitions(mask, k))
                assert len(got) == stirling2(size, k)
                # no duplicates, every block nonempty and disjoint, cover S
                seen = {tuple(sorted(p)) for p in got}
                assert len(seen) == len(got)
                for blocks in got:
                    assert all(b for b in blocks)
                    acc = 0
                    for b in blocks:
                        assert acc & b == 0
                        acc |= b
                    assert acc == mask

    def test_bell_total(self):
        for size in range(1, 7):
            mask = (1 << size) - 1
            total = sum(len(list(partitions(mask, k))) for k in range(1, size + 1))
            assert total == bell(size)

    def test_matches_brute_force(self):
        mask = 0b1111
        for k in (1, 2, 3, 4):
            got = {as_sets(p) for p in partitions(mask, k)}
            want = partitions_brute([1, 2, 3, 4], k)
            assert got == want

    def test_sparse_subset(self):
        # elements {1, 3, 4} as a non-contiguous mask
        got = list(partitions(0b1101, 2))
        assert len(got) == stirling2(3, 2)
        for blocks in got:
            assert sum(blocks) == 0b1101

    def test_k_out_of_range(self):
        with pytest.raises(ArgumentError):
            list(partitions(0b11, 3))
        with pytest.raises(ArgumentError):
            list(partitions(0b11, 0))


class TestBtilde:
    def test_pair_formula(self):
        dual = dual_polynomial(bivariate(1.3, 0.8, 0.6))
        assert btilde(dual, 0b11) == pytest.approx(dual[3] + dual[1] * dual[2], rel=1e-14)

    def test_triple_formula(self, trivariate_model):
        dual = dual_polynomial(trivariate_model.poly)
        want = (dual[0b111] + dual[0b001] * dual[0b110] + dual[0b010] * dual[0b101]
                + dual[0b100] * dual[0b011]
                + 2.0 * dual[0b001] * dual[0b010] * dual[0b100])
        assert btilde(dual, 0b111) == pytest.approx(want, rel=1e-13)

    def test_canonical_value(self):
        # c = (p1 p2 - p12)/p12^2 = 2 for the worked example
        dual = dual_polynomial(bivariate(1.0, 1.0, 0.5))
        assert btilde(dual, 0b11) == pytest.approx(2.0, abs=1e-14)

    def test_singleton_returns_dual(self):
        dual = dual_polynomial(bivariate())
        assert btilde(dual, 0b01) == dual[1]

    def test_matches_log_oracle(self):
        rng = np.random.default_rng(17)
        for n in (2, 3, 4, 5):
            for _ in range(8):
                coeffs = np.r_[1.0, rng.uniform(0.1, 2.0, (1 << n) - 1)]
                poly = AffinePolynomial(n, coeffs)
                dual = dual_polynomial(poly)
                oracle = btilde_via_log(dual, n)
                for mask in range(1, 1 << n):
                    if cardinality(mask) < 2:
                        continue
                    got = btilde(dual, mask)
                    scale = max(abs(got), abs(oracle[mask]), 1e-12)
                    assert abs(got - oracle[mask]) / scale <= 1e-10


class TestCheck:
    def test_divisible_example(self):
        report = check_infinite_divisibility(bivariate(1.0, 1.0, 0.5))
        assert report.divisible
        assert report.singleton_ok and report.btilde_ok
        assert report.btilde[3] == pytest.approx(2.0)
        assert set(report.btilde) == {3}

    def test_not_divisible_when_c_negative(self):
        report = check_infinite_divisibility(bivariate(1.0, 1.0, 2.0))
        assert not report.divisible
        assert report.singleton_ok and not report.btilde_ok

    def test_product_polynomial_divisible(self):
        report = check_infinite_divisibility(product_polynomial([0.5, 2.0, 1.0]))
        assert report.divisible
        assert all(report.dual[1 << i] < 0.0 for i in range(3))
        assert all(abs(v) < 1e-14 for v in report.btilde.values())

    def test_verdict_matches_report_fields(self, trivariate_model):
        report = check_infinite_divisibility(trivariate_model.poly)
        assert report.divisible == (report.singleton_ok and report.btilde_ok)
        assert all(cardinality(m) >= 2 for m in report.btilde)

    def test_precondition_errors(self):
        bad_single = AffinePolynomial.from_coeffs(2, {(1,): -1.0, (2,): 1.0, (1, 2): 0.5})
        with pytest.raises(PreconditionError):
            check_infinite_divisibility(bad_single)
        bad_top = AffinePolynomial.from_coeffs(2, {(1,): 1.0, (2,): 1.0, (1, 2): -0.5})
        with pytest.raises(PreconditionError):
            check_infinite_divisibility(bad_top)

    def test_tolerance_applies_to_btilde(self):
        # c is slightly negative: fails at tight tol, passes when tol swallows it
        p12 = 1.0 + 1e-8
        report = check_infinite_divisibility(bivariate(1.0, 1.0, p12))
        assert not report.divisible
        report = check_infinite_divisibility(bivariate(1.0, 1.0, p12), tol=1e-6)
        assert report.divisible

    def test_max_subset_size_guardrail(self):
        poly = product_polynomial([1.0] * 5)
        report = check_infinite_divisibility(poly, max_subset_size=3)
        assert max(cardinality(m) for m in report.btilde) == 3
        assert report.max_subset_size == 3

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(23)
        coeffs = np.r_[1.0, rng.uniform(0.3, 1.5, 15)]
        poly = AffinePolynomial(4, coeffs)
        perm = [3, 1, 4, 2]
        report = check_infinite_divisibility(poly)
        permuted = check_infinite_divisibility(permute_polynomial(poly, perm))
        assert report.divisible == permuted.divisible
        # btilde values are a permutation of each other
        got = sorted(report.btilde.values())
        want = sorted(permuted.btilde.values())
        assert np.allclose(got, want, rtol=1e-11)
