"""Closed-form gamma densities: the univariate marginal, the bivariate gamma,
the bivariate multisensor and bifactor forms, and the trivariate gamma.

Everything is computed in log space.  The hypergeometric series factor is
at least 1 for the non-negative arguments produced on the support, so its
log is taken from the linear value; points whose linear series overflows
are recomputed through the log-space series, which keeps every logpdf
finite on (0, inf)^n.

All densities accept a single point of shape (n,) or a batch (..., n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .divisibility import btilde
from .errors import ArgumentError, ExistenceError, PreconditionError
from .polynomial import AffineModel, dual_polynomial
from .specialfn import (
    SeriesControl,
    default_control,
    horn_phi3,
    hyp0f1,
    lauricella_FI,
    lauricella_FII,
    log_horn_phi3,
    log_hyp0f1,
    log_lauricella_FI,
    log_lauricella_FII,
)


@dataclass(frozen=True)
class DensityPoint:
    """A support point with its density in both log and linear form."""

    x: tuple[float, ...]
    logpdf: float
    pdf: float

    @classmethod
    def from_logpdf(cls, x, logpdf: float) -> "DensityPoint":
        return cls(tuple(float(v) for v in np.atleast_1d(x)), float(logpdf),
                   float(np.exp(logpdf)))


def gamma_marginal_logpdf(p: float, shape: float, x) -> float | np.ndarray:
    """Log density of the gamma law with scale p and the given shape.

    Returns -inf for x <= 0.
    """
    if p <= 0.0 or shape <= 0.0:
        raise ArgumentError(f"gamma parameters must be positive, got p={p}, shape={shape}")
    x = np.asarray(x, dtype=float)
    scalar = x.shape == ()
    x = np.atleast_1d(x)
    out = np.full(x.shape, -np.inf)
    pos = x > 0.0
    xs = x[pos]
    out[pos] = (shape - 1.0) * np.log(xs) - shape * np.log(p) - gammaln(shape) - xs / p
    return float(out[0]) if scalar else out


def _unpack(x, n: int):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (n,):
        raise ArgumentError(f"x must have last dimension {n}, got shape {x.shape}")
    scalar = x.ndim == 1
    cols = [x[..., i] for i in range(n)]
    return cols, scalar


def _finish(out, scalar):
    return float(out) if scalar and np.ndim(out) == 0 else (float(out[()]) if scalar else out)


def _log_series(linear, fixup):
    """log of a series factor, with scalar log-space recomputation of overflows."""
    linear = np.atleast_1d(np.asarray(linear, dtype=float))
    out = np.log(linear)
    bad = ~np.isfinite(out)
    if np.any(bad):
        for idx in np.argwhere(bad):
            out[tuple(idx)] = fixup(tuple(idx))
    return out


def _c_coef(p1: float, p2: float, p12: float) -> float:
    return (p1 * p2 - p12) / p12**2


def bivariate_gamma_logpdf(model: AffineModel, x, ctl: SeriesControl | None = None):
    """Log density of the bivariate gamma law driven by (P, lambda).

    Exists iff c = (p1 p2 - p12)/p12^2 > 0; the boundary c = 0 is exactly
    the independence polynomial and routes to the product of the two gamma
    marginals.
    """
    ctl = ctl or default_control()
    if model.n != 2 or not model.shapes.is_pure:
        raise ArgumentError("bivariate gamma density requires n=2 and lambda_i = lambda")
    lam = model.shapes.lam
    p1, p2 = model.poly.singletons
    p12 = model.poly.top
    if p12 <= 0.0:
        raise ExistenceError(f"requires p12 > 0, got {p12}")
    c = _c_coef(p1, p2, p12)
    if c < 0.0:
        raise ExistenceError(f"no bivariate gamma law: c = {c} < 0")
    (x1, x2), scalar = _unpack(x, 2)
    x1 = np.atleast_1d(x1)
    x2 = np.atleast_1d(x2)
    if c == 0.0:
        out = gamma_marginal_logpdf(p1, lam, x1) + gamma_marginal_logpdf(p2, lam, x2)
        return _finish(out if not scalar else out[0], scalar)
    out = np.full(x1.shape, -np.inf)
    pos = (x1 > 0.0) & (x2 > 0.0)
    a1, a2 = x1[pos], x2[pos]
    z = c * a1 * a2
    logf = _log_series(hyp0f1(lam, z, ctl), lambda i: log_hyp0f1(lam, z[i] if z.ndim else float(z)))
    out[pos] = (
        -lam * np.log(p12)
        - 2.0 * gammaln(lam)
        - (p2 / p12) * a1
        - (p1 / p12) * a2
        + (lam - 1.0) * (np.log(a1) + np.log(a2))
        + logf
    )
    return _finish(out if not scalar else out[0], scalar)


def multisensor_logpdf(p1: float, p2: float, p12: float, lam: float, lam2: float,
                       x, ctl: SeriesControl | None = None):
    """Log density of the multisensor law (shapes lambda, lambda2 on the axes)."""
    ctl = ctl or default_control()
    if not (lam > 0.0 and lam2 >= lam):
        raise ArgumentError(f"requires lambda2 >= lambda > 0, got {lam}, {lam2}")
    if min(p1, p2) <= 0.0 or p12 <= 0.0:
        raise ExistenceError("requires p1, p2, p12 > 0")
    c = _c_coef(p1, p2, p12)
    if c < 0.0:
        raise ExistenceError(f"no multisensor law: c = {c} < 0")
    (x1, x2), scalar = _unpack(x, 2)
    x1 = np.atleast_1d(x1)
    x2 = np.atleast_1d(x2)
    if c == 0.0:
        out = gamma_marginal_logpdf(p1, lam, x1) + gamma_marginal_logpdf(p2, lam2, x2)
        return _finish(out if not scalar else out[0], scalar)
    out = np.full(x1.shape, -np.inf)
    pos = (x1 > 0.0) & (x2 > 0.0)
    a1, a2 = x1[pos], x2[pos]
    zx = c * (p12 / p2) * a2
    zy = c * a1 * a2
    logf = _log_series(
        horn_phi3(lam2 - lam, lam2, zx, zy, ctl),
        lambda i: log_horn_phi3(lam2 - lam, lam2, float(zx[i]), float(zy[i])),
    )
    out[pos] = (
        -lam * np.log(p12)
        - (lam2 - lam) * np.log(p2)
        - gammaln(lam)
        - gammaln(lam2)
        + (lam - 1.0) * np.log(a1)
        + (lam2 - 1.0) * np.log(a2)
        - (p2 / p12) * a1
        - (p1 / p12) * a2
        + logf
    )
    return _finish(out if not scalar else out[0], scalar)


def bifactor_logpdf(model: AffineModel, x, ctl: SeriesControl | None = None):
    """Log density of the bivariate bifactor law (P, (lambda, lambda1, lambda2)).

    The Lauricella arguments carry the factor c from the convolution that
    produces this density: z_i = c (p12/p_i) x_i and z_3 = c x_1 x_2.
    """
    ctl = ctl or default_control()
    if model.n != 2:
        raise ArgumentError("bifactor density requires n=2")
    lam = model.shapes.lam
    l1, l2 = model.shapes.lams
    p1, p2 = model.poly.singletons
    p12 = model.poly.top
    if p12 <= 0.0:
        raise ExistenceError(f"requires p12 > 0, got {p12}")
    c = _c_coef(p1, p2, p12)
    if c < 0.0:
        raise ExistenceError(f"no bifactor law: c = {c} < 0")
    (x1, x2), scalar = _unpack(x, 2)
    x1 = np.atleast_1d(x1)
    x2 = np.atleast_1d(x2)
    if c == 0.0:
        out = gamma_marginal_logpdf(p1, l1, x1) + gamma_marginal_logpdf(p2, l2, x2)
        return _finish(out if not scalar else out[0], scalar)
    out = np.full(x1.shape, -np.inf)
    pos = (x1 > 0.0) & (x2 > 0.0)
    a1, a2 = x1[pos], x2[pos]
    z1 = c * (p12 / p1) * a1
    z2 = c * (p12 / p2) * a2
    z3 = c * a1 * a2
    logf = _log_series(
        lauricella_FI(l1 - lam, l2 - lam, lam, z1, z2, z3, ctl),
        lambda i: log_lauricella_FI(l1 - lam, l2 - lam, lam,
                                    float(z1[i]), float(z2[i]), float(z3[i])),
    )
    out[pos] = (
        -lam * np.log(p12)
        - (l1 - lam) * np.log(p1)
        - (l2 - lam) * np.log(p2)
        - gammaln(l1)
        - gammaln(l2)
        + (l1 - 1.0) * np.log(a1)
        + (l2 - 1.0) * np.log(a2)
        - (p2 / p12) * a1
        - (p1 / p12) * a2
        + logf
    )
    return _finish(out if not scalar else out[0], scalar)


def trivariate_hypotheses(model: AffineModel, tol: float = 1e-12):
    """Check the trivariate existence hypotheses; returns (dual, btilde map).

    Requires p_i > 0, all pairwise p_ij > 0, p_123 > 0, every pairwise
    btilde >= 0 and btilde_123 >= 0 (within tol).  Raises PreconditionError
    otherwise.
    """
    if model.n != 3:
        raise ArgumentError("trivariate density requires n=3")
    poly = model.poly
    pairs = [0b011, 0b101, 0b110]
    for mask in pairs:
        if poly.coeff(mask) <= 0.0:
            raise PreconditionError(f"requires p_ij > 0, got {poly.coeff(mask)}")
    if poly.top <= 0.0:
        raise PreconditionError(f"requires p_123 > 0, got {poly.top}")
    dual = dual_polynomial(poly)
    values = {mask: btilde(dual, mask) for mask in pairs + [0b111]}
    for mask, value in values.items():
        if value < -tol:
            raise PreconditionError(f"btilde for mask {mask:03b} is negative: {value}")
    # clamp tolerance-level noise so series arguments stay non-negative
    values = {mask: max(value, 0.0) for mask, value in values.items()}
    return dual, values


def trivariate_gamma_logpdf(model: AffineModel, x, ctl: SeriesControl | None = None):
    """Log density of the trivariate gamma law driven by (P, lambda), n=3."""
    ctl = ctl or default_control()
    if not model.shapes.is_pure:
        raise ArgumentError("trivariate gamma density requires lambda_i = lambda")
    lam = model.shapes.lam
    dual, bt = trivariate_hypotheses(model)
    b12, b13, b23, b123 = bt[0b011], bt[0b101], bt[0b110], bt[0b111]
    pt1, pt2, pt3 = dual[0b001], dual[0b010], dual[0b100]
    p123 = model.poly.top
    (x1, x2, x3), scalar = _unpack(x, 3)
    x1 = np.atleast_1d(x1)
    x2 = np.atleast_1d(x2)
    x3 = np.atleast_1d(x3)
    out = np.full(x1.shape, -np.inf)
    pos = (x1 > 0.0) & (x2 > 0.0) & (x3 > 0.0)
    a1, a2, a3 = x1[pos], x2[pos], x3[pos]
    u13 = b13 * a1 * a3
    u23 = b23 * a2 * a3
    z1 = u13 * u23
    z2 = b123 * a1 * a2 * a3
    z3 = b12 * a1 * a2
    z4 = u13 + u23
    logf = _log_series(
        lauricella_FII(lam, lam, z1, z2, z3, z4, ctl),
        lambda i: log_lauricella_FII(lam, lam, float(z1[i]), float(z2[i]),
                                     float(z3[i]), float(z4[i])),
    )
    out[pos] = (
        -lam * np.log(p123)
        - 3.0 * gammaln(lam)
        + pt1 * a1 + pt2 * a2 + pt3 * a3
        + (lam - 1.0) * (np.log(a1) + np.log(a2) + np.log(a3))
        + logf
    )
    return _finish(out if not scalar else out[0], scalar)
