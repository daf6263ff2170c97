import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import gammaln

from gammacop.densities import (
    DensityPoint,
    bifactor_logpdf,
    bivariate_gamma_logpdf,
    gamma_marginal_logpdf,
    multisensor_logpdf,
    trivariate_gamma_logpdf,
)
from gammacop.errors import ArgumentError, ExistenceError, PreconditionError
from gammacop.polynomial import AffineModel, AffinePolynomial, ShapeParams, evaluate
from gammacop.specialfn import pfq
from gammacop.validation import (
    DensityGrid,
    gamma_tail_box,
    laplace_of_density,
    marginal_by_quadrature,
)


def make_model(p1, p2, p12, lam, lams=None):
    poly = AffinePolynomial.from_coeffs(2, {(1,): p1, (2,): p2, (1, 2): p12})
    shapes = ShapeParams.pure(lam, 2) if lams is None else ShapeParams(lam, lams)
    return AffineModel(poly, shapes)


class TestGammaMarginal:
    def test_exponential_point(self):
        assert gamma_marginal_logpdf(1.0, 1.0, 1.0) == pytest.approx(-1.0, abs=1e-15)

    def test_formula_recomputation(self):
        p, shape = 2.0, 3.0
        for x in (0.1, 1.0, 7.3):
            want = ((shape - 1.0) * math.log(x) - shape * math.log(p)
                    - float(gammaln(shape)) - x / p)
            assert gamma_marginal_logpdf(p, shape, x) == pytest.approx(want, rel=1e-14)

    def test_normalization(self):
        p, shape = 1.4, 0.7
        val, _ = integrate.quad(lambda x: math.exp(gamma_marginal_logpdf(p, shape, x)),
                                0.0, gamma_tail_box(p, shape, 1e-14), limit=200)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_nonpositive_support(self):
        assert gamma_marginal_logpdf(1.0, 2.0, 0.0) == -np.inf
        assert gamma_marginal_logpdf(1.0, 2.0, -3.0) == -np.inf

    def test_density_point_carrier(self):
        pt = DensityPoint.from_logpdf([1.0, 2.0], -1.5)
        assert pt.pdf == pytest.approx(math.exp(-1.5))
        assert pt.x == (1.0, 2.0)


CANONICAL = dict(p1=1.0, p2=1.0, p12=0.5, lam=1.5)


class TestBivariateGamma:
    def test_independence_limit(self):
        p1, p2, lam = 1.0, 1.0, 1.5
        model = make_model(p1, p2, p1 * p2 * (1.0 - 1e-8), lam)
        pts = np.array([[0.5, 0.9], [1.5, 2.5], [3.0, 0.2]])
        got = bivariate_gamma_logpdf(model, pts)
        product = (gamma_marginal_logpdf(p1, lam, pts[:, 0])
                   + gamma_marginal_logpdf(p2, lam, pts[:, 1]))
        assert np.max(np.abs(np.exp(got) - np.exp(product))
                      / np.exp(product)) <= 1e-6

    def test_boundary_routes_to_product(self):
        model = make_model(1.0, 2.0, 2.0, 1.5)  # c = 0 exactly
        x = [0.7, 1.1]
        want = (gamma_marginal_logpdf(1.0, 1.5, 0.7)
                + gamma_marginal_logpdf(2.0, 1.5, 1.1))
        assert bivariate_gamma_logpdf(model, x) == pytest.approx(want, rel=1e-14)

    def test_laplace_round_trip(self):
        model = make_model(**CANONICAL)
        lam = CANONICAL["lam"]
        theta = np.array([0.3, 0.7])
        box = [gamma_tail_box(1.0, lam), gamma_tail_box(1.0, lam)]
        got = laplace_of_density(lambda x: bivariate_gamma_logpdf(model, x),
                                 theta, box)
        want = evaluate(model.poly, theta) ** (-lam)
        assert got == pytest.approx(want, rel=1e-6)

    def test_normalization(self):
        model = make_model(**CANONICAL)
        lam = CANONICAL["lam"]
        grid = DensityGrid(lambda x: bivariate_gamma_logpdf(model, x),
                           [gamma_tail_box(1.0, lam)] * 2)
        assert grid.mass() == pytest.approx(1.0, abs=1e-6)

    def test_marginalization(self):
        model = make_model(**CANONICAL)
        lam = CANONICAL["lam"]
        xs = np.array([0.4, 1.0, 2.2, 4.0])
        marg = marginal_by_quadrature(lambda x: bivariate_gamma_logpdf(model, x),
                                      xs, gamma_tail_box(1.0, lam))
        want = np.exp(gamma_marginal_logpdf(1.0, lam, xs))
        assert np.max(np.abs(marg - want)) <= 1e-6

    def test_symmetry_under_swap(self):
        model = make_model(1.3, 0.7, 0.6, 1.1)
        swapped = make_model(0.7, 1.3, 0.6, 1.1)
        assert bivariate_gamma_logpdf(model, [0.8, 2.0]) == pytest.approx(
            bivariate_gamma_logpdf(swapped, [2.0, 0.8]), rel=1e-14)

    def test_existence_error(self):
        with pytest.raises(ExistenceError):
            bivariate_gamma_logpdf(make_model(1.0, 1.0, 2.0, 1.0), [1.0, 1.0])

    def test_outside_support(self):
        model = make_model(**CANONICAL)
        assert bivariate_gamma_logpdf(model, [0.0, 1.0]) == -np.inf
        assert bivariate_gamma_logpdf(model, [-1.0, 1.0]) == -np.inf

    def test_finite_in_far_tail(self):
        model = make_model(**CANONICAL)
        assert np.isfinite(bivariate_gamma_logpdf(model, [800.0, 1200.0]))

    def test_requires_pure_shapes(self):
        model = make_model(1.0, 1.0, 0.5, 1.0, lams=(2.0, 3.0))
        with pytest.raises(ArgumentError):
            bivariate_gamma_logpdf(model, [1.0, 1.0])


class TestMultisensor:
    def test_reduces_to_bivariate(self):
        lam = 1.5
        model = make_model(1.0, 1.0, 0.5, lam)
        pts = np.array([[1.0, 2.0], [0.3, 0.8], [4.0, 1.5]])
        got = multisensor_logpdf(1.0, 1.0, 0.5, lam, lam, pts)
        want = bivariate_gamma_logpdf(model, pts)
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_laplace_round_trip(self):
        p1, p2, p12, lam, lam2 = 1.0, 1.5, 0.9, 0.8, 2.0
        theta = np.array([0.4, 0.25])
        box = [gamma_tail_box(p1, lam), gamma_tail_box(p2, lam2)]
        got = laplace_of_density(
            lambda x: multisensor_logpdf(p1, p2, p12, lam, lam2, x), theta, box)
        P = 1.0 + p1 * theta[0] + p2 * theta[1] + p12 * theta[0] * theta[1]
        want = P ** (-lam) * (1.0 + p2 * theta[1]) ** (-(lam2 - lam))
        assert got == pytest.approx(want, rel=1e-5)

    def test_normalization(self):
        p1, p2, p12, lam, lam2 = 1.0, 1.5, 0.9, 0.8, 2.0
        grid = DensityGrid(lambda x: multisensor_logpdf(p1, p2, p12, lam, lam2, x),
                           [gamma_tail_box(p1, lam), gamma_tail_box(p2, lam2)])
        assert grid.mass() == pytest.approx(1.0, abs=1e-6)

    def test_shape_ordering_enforced(self):
        with pytest.raises(ArgumentError):
            multisensor_logpdf(1.0, 1.0, 0.5, 2.0, 1.0, [1.0, 1.0])


class TestBifactor:
    MODEL = dict(p1=1.0, p2=1.5, p12=0.9, lam=0.8, lams=(1.3, 2.0))

    def test_reduces_to_multisensor(self):
        m = self.MODEL
        model = make_model(m["p1"], m["p2"], m["p12"], m["lam"],
                           lams=(m["lam"], 2.0))
        pts = np.array([[0.5, 0.8], [1.2, 2.0], [3.0, 1.0]])
        got = bifactor_logpdf(model, pts)
        want = multisensor_logpdf(m["p1"], m["p2"], m["p12"], m["lam"], 2.0, pts)
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_convolution_oracle(self):
        # density of Y + Z with Y bivariate gamma and Z independent gammas
        m = self.MODEL
        model = make_model(**m)
        pure = make_model(m["p1"], m["p2"], m["p12"], m["lam"])
        l1, l2 = m["lams"]

        def g(p, shape, x):
            return np.where(x > 0.0,
                            np.exp(gamma_marginal_logpdf(p, shape, np.maximum(x, 1e-300))),
                            0.0)

        for z1, z2 in [(0.5, 0.8), (1.2, 2.0), (3.0, 1.0), (0.9, 0.4), (2.2, 2.7)]:
            def inner(v2, v1):
                y = np.exp(bivariate_gamma_logpdf(pure, [v1, v2]))
                return (y * g(m["p1"], l1 - m["lam"], z1 - v1)
                        * g(m["p2"], l2 - m["lam"], z2 - v2))

            conv, _ = integrate.dblquad(inner, 0.0, z1, 0.0, z2,
                                        epsabs=1e-11, epsrel=1e-9)
            got = float(np.exp(bifactor_logpdf(model, [z1, z2])))
            assert got == pytest.approx(conv, rel=1e-4)

    def test_normalization_and_marginals(self):
        model = make_model(**self.MODEL)
        l1, l2 = self.MODEL["lams"]
        boxes = [gamma_tail_box(self.MODEL["p1"], l1),
                 gamma_tail_box(self.MODEL["p2"], l2)]
        grid = DensityGrid(lambda x: bifactor_logpdf(model, x), boxes)
        assert grid.mass() == pytest.approx(1.0, abs=1e-6)
        xs = np.array([0.5, 1.3, 2.8])
        marg = marginal_by_quadrature(lambda x: bifactor_logpdf(model, x),
                                      xs, boxes[1])
        want = np.exp(gamma_marginal_logpdf(self.MODEL["p1"], l1, xs))
        assert np.max(np.abs(marg - want) / want) <= 1e-6


class TestTrivariate:
    def test_kibble_moran_reduction(self):
        # pairwise btilde vanish when p_ij = q and p_123 = q^2; at lam = 1 the
        # density collapses to the 0F2 form
        q = 0.5
        poly = AffinePolynomial.from_coeffs(3, {
            (1,): 1.0, (2,): 1.0, (3,): 1.0,
            (1, 2): q, (1, 3): q, (2, 3): q, (1, 2, 3): q * q})
        model = AffineModel(poly, ShapeParams.pure(1.0, 3))
        from gammacop.divisibility import btilde
        from gammacop.polynomial import dual_polynomial

        dual = dual_polynomial(poly)
        assert abs(btilde(dual, 0b011)) < 1e-14
        b123 = btilde(dual, 0b111)
        for x in ([0.4, 0.7, 1.1], [1.5, 0.6, 2.0]):
            want = (-math.log(q * q)
                    + dual[1] * x[0] + dual[2] * x[1] + dual[4] * x[2]
                    + math.log(pfq([], [1.0, 1.0], b123 * x[0] * x[1] * x[2])))
            assert trivariate_gamma_logpdf(model, x) == pytest.approx(want, rel=1e-12)

    def test_laplace_round_trip(self, trivariate_model):
        lam = trivariate_model.shapes.lam
        box = [gamma_tail_box(1.0, lam)] * 3
        grid = DensityGrid(lambda x: trivariate_gamma_logpdf(trivariate_model, x), box)
        assert grid.mass() == pytest.approx(1.0, abs=1e-3)
        theta = np.array([0.2, 0.4, 0.6])
        want = evaluate(trivariate_model.poly, theta) ** (-lam)
        assert grid.laplace(theta) == pytest.approx(want, rel=1e-3)

    def test_hypothesis_violation(self):
        # negative pairwise btilde: independence-like poly with tiny top
        poly = AffinePolynomial.from_coeffs(3, {
            (1,): 1.0, (2,): 1.0, (3,): 1.0,
            (1, 2): 1.0, (1, 3): 1.0, (2, 3): 1.0, (1, 2, 3): 0.2})
        model = AffineModel(poly, ShapeParams.pure(1.0, 3))
        with pytest.raises(PreconditionError):
            trivariate_gamma_logpdf(model, [1.0, 1.0, 1.0])

    def test_pairwise_coefficients_must_be_positive(self):
        poly = AffinePolynomial.from_coeffs(3, {
            (1,): 1.0, (2,): 1.0, (3,): 1.0,
            (1, 3): 0.9, (2, 3): 0.9, (1, 2, 3): 0.5})  # p_12 = 0
        model = AffineModel(poly, ShapeParams.pure(1.0, 3))
        with pytest.raises(PreconditionError):
            trivariate_gamma_logpdf(model, [1.0, 1.0, 1.0])

    def test_outside_support(self, trivariate_model):
        assert trivariate_gamma_logpdf(trivariate_model, [1.0, 0.0, 1.0]) == -np.inf

    def test_finite_in_far_tail(self, trivariate_model):
        # series factor overflows linearly; the log path must keep it finite
        assert np.isfinite(trivariate_gamma_logpdf(trivariate_model,
                                                   [300.0, 280.0, 350.0]))
