"""Laplace copulas of multivariate and multi-factor gamma distributions.

The copula of the law with Laplace transform P(theta)^{-lambda}
prod_i (1+p_i theta_i)^{-(lambda_i-lambda)} is

    C(v) = prod_i v_i * K(v)^{-lambda},
    K(v) = 1 + sum_{|T|>1} alpha_T prod_{t in T} (1 - v_t^{1/lambda_t}),

with alpha_T = (-1)^{|T|} P(-(1/p) 1_T).  K is multilinear in the
variables w_t = 1 - v_t^{1/lambda_t} in [0,1], so positivity at the 2^n
corners of the w-cube implies positivity everywhere; corners where K
vanishes exactly are boundary families (some v_t = 0 there, where the
prefactor already forces C = 0) and are accepted.

Sklar assembly with gamma marginals turns the copula into a multivariate
distribution with explicit cdf and (for n=2) explicit pdf.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .densities import gamma_marginal_logpdf
from .divisibility import check_infinite_divisibility
from .errors import ArgumentError, DomainError, KernelError, ModelError
from .polynomial import (
    AffineModel,
    cardinality,
    fgm_coefficients,
    multilinear_eval,
    subset_sums,
)

CORNER_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CopulaModel:
    """Precomputed kernel coefficients plus the shape parameters.

    ``alpha[mask]`` is the kernel coefficient of the subset ``mask``;
    alpha[0] = 1 and singleton entries are 0 by construction.
    """

    n: int
    alpha: np.ndarray
    lam: float
    lams: tuple[float, ...]

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).copy()
        if alpha.shape != (1 << self.n,):
            raise ArgumentError(f"alpha must have length {1 << self.n}")
        if alpha[0] != 1.0:
            raise ArgumentError(f"alpha for the empty set must be 1, got {alpha[0]}")
        for i in range(self.n):
            if alpha[1 << i] != 0.0:
                raise ArgumentError("singleton alpha coefficients must be 0")
        if not self.lam > 0.0:
            raise ArgumentError(f"lambda must be positive, got {self.lam}")
        lams = tuple(float(v) for v in self.lams)
        if len(lams) != self.n or any(v <= 0.0 for v in lams):
            raise ArgumentError(f"need {self.n} positive lambda_t, got {lams}")
        alpha.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "lams", lams)
        corners = subset_sums(alpha, self.n)
        worst = float(corners.min())
        if worst < -CORNER_TOL:
            raise KernelError(
                f"copula kernel is negative at a corner (min {worst}); "
                "the coefficient set does not define a copula"
            )


def _rectangle_gate(c: CopulaModel, n_rect: int = 2000, seed: int = 20160919) -> None:
    """Empirical n-increasing check used when the divisibility gate is skipped."""
    rng = np.random.default_rng(seed)
    lo = rng.random((n_rect, c.n))
    hi = lo + (1.0 - lo) * rng.random((n_rect, c.n))
    mass = rectangle_mass(c, lo, hi)
    worst = float(mass.min())
    if worst < -1e-12:
        raise ModelError(
            f"force-built model fails the rectangle-mass check (min {worst})"
        )


def build_copula(model: AffineModel, force: bool = False) -> CopulaModel:
    """Laplace copula of the gamma law defined by an AffineModel.

    By default the model must pass the infinite-divisibility test, which is
    sufficient for the formula to define a copula.  ``force=True`` skips
    that gate (the divisibility condition is not known to be necessary) but
    then the kernel corner check and an empirical rectangle-mass check must
    both pass before the model is returned.
    """
    if not force:
        report = check_infinite_divisibility(model.poly)
        if not report.divisible:
            raise ModelError(
                "model is not infinitely divisible; build with force=True to "
                "skip the gate (empirical copula checks still apply)"
            )
    copula = CopulaModel(
        n=model.n,
        alpha=fgm_coefficients(model.poly),
        lam=model.shapes.lam,
        lams=model.shapes.lams,
    )
    if force:
        _rectangle_gate(copula)
    return copula


def independence_copula(n: int, lam: float = 1.0) -> CopulaModel:
    alpha = np.zeros(1 << n)
    alpha[0] = 1.0
    return CopulaModel(n=n, alpha=alpha, lam=lam, lams=(lam,) * n)


def _powers(v: np.ndarray, lams) -> np.ndarray:
    """v_t^(1/lambda_t) with exact 0 and 1 at the boundary values."""
    with np.errstate(divide="ignore"):
        logv = np.where(v > 0.0, np.log(np.where(v > 0.0, v, 1.0)), -np.inf)
    return np.exp(logv / np.asarray(lams))


def _check_unit_box(v: np.ndarray, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1:] != (n,):
        raise ArgumentError(f"v must have last dimension {n}, got shape {v.shape}")
    if np.any((v < 0.0) | (v > 1.0)) or not np.all(np.isfinite(v)):
        raise ArgumentError("v must lie in [0,1]^n")
    return v


def kernel(c: CopulaModel, v) -> float | np.ndarray:
    """K(v), the bracketed multilinear kernel of the copula."""
    v = _check_unit_box(v, c.n)
    w = -np.expm1(np.log(np.where(v > 0.0, v, 1.0)) / np.asarray(c.lams))
    w = np.where(v > 0.0, w, 1.0)
    return multilinear_eval(c.alpha, w)


def copula_cdf(c: CopulaModel, v) -> float | np.ndarray:
    """C(v) = prod_i v_i * K(v)^(-lambda); exact at the boundary."""
    v = _check_unit_box(v, c.n)
    pref = np.prod(v, axis=-1)
    K = np.asarray(kernel(c, v), dtype=float)
    K = np.where(pref > 0.0, K, 1.0)  # C is 0 there regardless of K
    out = pref * K**(-c.lam)
    return float(out) if np.ndim(out) == 0 else out


def copula_by_composition(model: AffineModel, v) -> float | np.ndarray:
    """Independent oracle: compose the Laplace transform with the inverse
    marginal transforms, phi(phi_1^{-1}(v_1), ..., phi_n^{-1}(v_n)).

    Works for any affine polynomial, divisible or not; v must be interior.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0.0) or np.any(v > 1.0):
        raise ArgumentError("composition oracle needs v in (0, 1]^n")
    lam = model.shapes.lam
    lams = np.asarray(model.shapes.lams)
    p = model.poly.singletons
    theta = (v ** (-1.0 / lams) - 1.0) / p
    from .polynomial import evaluate

    P = evaluate(model.poly, theta)
    tail = np.prod((1.0 + p * theta) ** (-(lams - lam)), axis=-1)
    return P**(-lam) * tail


def _bivariate_parts(c: CopulaModel, v1, v2):
    if c.n != 2:
        raise ArgumentError("this operation requires a bivariate copula")
    l1, l2 = c.lams
    a = float(c.alpha[3])
    A = v1 ** (1.0 / l1)
    B = v2 ** (1.0 / l2)
    w1 = 1.0 - A
    w2 = 1.0 - B
    D = 1.0 + a * w1 * w2
    return a, l1, l2, A, B, w1, w2, D


def copula_pdf2(c: CopulaModel, v) -> float | np.ndarray:
    """Copula density for n=2, the mixed second partial of C, in closed form."""
    v = _check_unit_box(v, 2)
    v1, v2 = v[..., 0], v[..., 1]
    if np.any(v1 <= 0.0) or np.any(v1 >= 1.0) or np.any(v2 <= 0.0) or np.any(v2 >= 1.0):
        raise DomainError("copula density is evaluated on the open square (0,1)^2")
    a, l1, l2, A, B, w1, w2, D = _bivariate_parts(c, v1, v2)
    lam = c.lam
    out = (
        D**(-lam)
        + lam * a * D**(-lam - 1.0) * (w1 * B / l2 + A * w2 / l1 - A * B / (l1 * l2))
        + lam * (lam + 1.0) * a * a * A * B * w1 * w2 / (l1 * l2) * D**(-lam - 2.0)
    )
    return float(out) if np.ndim(out) == 0 else out


def conditional_cdf(c: CopulaModel, v1, v2) -> float | np.ndarray:
    """dC/dv1 at (v1, v2): the conditional cdf of V2 given V1 = v1.

    Non-decreasing in v2 with exact endpoints 0 and 1.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if np.any(v1 <= 0.0) or np.any(v1 >= 1.0):
        raise DomainError("conditional cdf requires v1 in (0,1)")
    if np.any(v2 < 0.0) or np.any(v2 > 1.0):
        raise ArgumentError("v2 must lie in [0,1]")
    a, l1, l2, A, B, w1, w2, D = _bivariate_parts(c, v1, v2)
    lam = c.lam
    out = v2 * (D**(-lam) + (lam * a / l1) * A * w2 * D**(-lam - 1.0))
    return float(out) if np.ndim(out) == 0 else out


def conditional_cdf_v2(c: CopulaModel, v1, v2) -> float | np.ndarray:
    """dC/dv2 at (v1, v2), the mirror-image conditional."""
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if np.any(v2 <= 0.0) or np.any(v2 >= 1.0):
        raise DomainError("conditional cdf requires v2 in (0,1)")
    if np.any(v1 < 0.0) or np.any(v1 > 1.0):
        raise ArgumentError("v1 must lie in [0,1]")
    a, l1, l2, A, B, w1, w2, D = _bivariate_parts(c, v1, v2)
    lam = c.lam
    out = v1 * (D**(-lam) + (lam * a / l2) * B * w1 * D**(-lam - 1.0))
    return float(out) if np.ndim(out) == 0 else out


def bivariate_margin(c: CopulaModel, i: int, j: int) -> CopulaModel:
    """The (i, j) bivariate margin (all other coordinates set to 1)."""
    if not (1 <= i <= c.n and 1 <= j <= c.n and i != j):
        raise ArgumentError(f"need distinct coordinates in [1, {c.n}], got ({i}, {j})")
    pair_mask = (1 << (i - 1)) | (1 << (j - 1))
    alpha = np.array([1.0, 0.0, 0.0, float(c.alpha[pair_mask])])
    return CopulaModel(n=2, alpha=alpha, lam=c.lam,
                       lams=(c.lams[i - 1], c.lams[j - 1]))


def copula_pdf_fd(c: CopulaModel, v, h: float = 1e-4, richardson: bool = True):
    """Mixed n-th partial of C by nested central differences.

    Approximate (no closed form is provided beyond n=2); Richardson
    extrapolation in h halves squares the order.  Useful for n=3.
    """
    v = _check_unit_box(np.asarray(v, dtype=float), c.n)

    def mixed(step):
        total = 0.0
        for corner in range(1 << c.n):
            signs = np.array([1.0 if corner >> k & 1 else -1.0 for k in range(c.n)])
            point = v + signs * step
            if np.any(point <= 0.0) or np.any(point >= 1.0):
                raise DomainError("finite-difference stencil leaves the open cube")
            total += np.prod(signs) * copula_cdf(c, point)
        return total / (2.0 * step) ** c.n

    if not richardson:
        return mixed(h)
    coarse = mixed(h)
    fine = mixed(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def rectangle_mass(c: CopulaModel, lo, hi) -> np.ndarray:
    """Inclusion-exclusion copula mass of axis-aligned rectangles [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.shape != hi.shape or lo.shape[-1:] != (c.n,):
        raise ArgumentError("lo and hi must both have shape (..., n)")
    if np.any(lo > hi):
        raise ArgumentError("need lo <= hi componentwise")
    total = np.zeros(lo.shape[:-1])
    for corner in range(1 << c.n):
        pick = np.array([(corner >> k) & 1 for k in range(c.n)], dtype=bool)
        point = np.where(pick, hi, lo)
        sign = 1.0 if (c.n - int(pick.sum())) % 2 == 0 else -1.0
        total = total + sign * copula_cdf(c, point)
    return total


@dataclass(frozen=True, eq=False)
class AssembledDistribution:
    """A copula coupled to gamma marginals (scale, shape) via Sklar's theorem."""

    copula: CopulaModel
    marginals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        marg = tuple((float(p), float(s)) for p, s in self.marginals)
        if len(marg) != self.copula.n:
            raise ArgumentError(f"need {self.copula.n} marginal pairs, got {len(marg)}")
        if any(p <= 0.0 or s <= 0.0 for p, s in marg):
            raise ArgumentError("marginal scale and shape must be positive")
        object.__setattr__(self, "marginals", marg)


def _marginal_cdf(d: AssembledDistribution, x: np.ndarray) -> np.ndarray:
    cols = []
    for i, (p, shape) in enumerate(d.marginals):
        xi = np.clip(x[..., i], 0.0, None)
        cols.append(gammainc(shape, xi / p))
    return np.stack(cols, axis=-1)


def assembled_cdf(d: AssembledDistribution, x) -> float | np.ndarray:
    """F(x) = C(F_1(x_1), ..., F_n(x_n)) with gamma marginal cdfs."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (d.copula.n,):
        raise ArgumentError(f"x must have last dimension {d.copula.n}")
    return copula_cdf(d.copula, _marginal_cdf(d, x))


def assembled_logpdf(d: AssembledDistribution, x) -> float | np.ndarray:
    """log f(x) = log c(F_1(x_1), F_2(x_2)) + sum_i log f_i(x_i); n = 2 only."""
    if d.copula.n != 2:
        raise ArgumentError("assembled pdf is available in closed form for n=2 only")
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (2,):
        raise ArgumentError("x must have last dimension 2")
    v = _marginal_cdf(d, x)
    # marginal cdfs of interior x land in (0,1); nudge saturated values back
    v = np.clip(v, 5e-17, np.nextafter(1.0, 0.0))
    scalar = x.ndim == 1
    x1 = np.atleast_1d(x[..., 0])
    x2 = np.atleast_1d(x[..., 1])
    v = np.atleast_2d(v) if scalar else v
    out = np.full(x1.shape, -np.inf)
    pos = (x1 > 0.0) & (x2 > 0.0)
    if np.any(pos):
        (p1, s1), (p2, s2) = d.marginals
        out[pos] = (
            np.log(copula_pdf2(d.copula, v[pos]))
            + gamma_marginal_logpdf(p1, s1, x1[pos])
            + gamma_marginal_logpdf(p2, s2, x2[pos])
        )
    return float(out[0]) if scalar else out
