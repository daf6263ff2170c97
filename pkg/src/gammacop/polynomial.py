"""Subset-indexed affine polynomials and the coefficient maps derived from them.

A subset T of [n] = {1, ..., n} is encoded as an integer bit mask with bit
i-1 set iff i is in T, so an affine polynomial P(theta) = sum_T p_T theta^T
is stored as a dense coefficient array of length 2**n indexed by mask.  The
dimension is capped at 16 so masks fit comfortably in one machine word and
dense arrays stay small.

All values here are immutable after construction and every operation is a
pure function, so everything is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ArgumentError, DomainError, ParseError

MAX_DIM = 16


def mask_from_indices(indices: Iterable[int], n: int) -> int:
    """Build a subset mask from 1-based coordinate indices."""
    if not 1 <= n <= MAX_DIM:
        raise ArgumentError(f"dimension must be in [1, {MAX_DIM}], got {n}")
    mask = 0
    for i in indices:
        if not 1 <= i <= n:
            raise ArgumentError(f"index {i} outside [1, {n}]")
        mask |= 1 << (i - 1)
    return mask


def indices_from_mask(mask: int) -> tuple[int, ...]:
    """1-based coordinate indices of a subset mask, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def cardinality(mask: int) -> int:
    return bin(mask).count("1")


def complement(mask: int, n: int) -> int:
    return ((1 << n) - 1) ^ mask


def subset_label(mask: int) -> str:
    """Comma-separated sorted 1-based indices; empty string for the empty set."""
    return ",".join(str(i) for i in indices_from_mask(mask))


def mask_from_label(label: str, n: int) -> int:
    """Inverse of :func:`subset_label`; raises ParseError on a malformed key."""
    label = label.strip()
    if not label:
        return 0
    try:
        idx = [int(tok) for tok in label.split(",")]
    except ValueError:
        raise ParseError(f"malformed subset key {label!r}") from None
    if any(not 1 <= i <= n for i in idx):
        raise ParseError(f"subset key {label!r} has an index outside [1, {n}]")
    if len(set(idx)) != len(idx):
        raise ParseError(f"subset key {label!r} repeats an index")
    return mask_from_indices(idx, n)


def subset_sums(values: np.ndarray, n: int) -> np.ndarray:
    """Zeta transform: out[S] = sum over T subset of S of values[T].

    O(n * 2**n); used for corner evaluations of multilinear forms.
    """
    out = np.array(values, dtype=float)
    if out.shape != (1 << n,):
        raise ArgumentError(f"expected {1 << n} values, got {out.shape}")
    for i in range(n):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return out


@dataclass(frozen=True, eq=False)
class AffinePolynomial:
    """P(theta) = sum_T p_T theta^T with constant term p_emptyset = 1.

    ``coeffs[mask]`` holds p_T for the subset encoded by ``mask``.
    """

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise ArgumentError(f"dimension must be in [1, {MAX_DIM}], got {self.n}")
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (1 << self.n,):
            raise ArgumentError(
                f"coefficient array must have length {1 << self.n}, got {c.shape}"
            )
        if c[0] != 1.0:
            raise ArgumentError(f"constant term must be 1, got {c[0]}")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, n: int, coeffs: Mapping) -> "AffinePolynomial":
        """Build from a sparse map; keys are masks or index tuples, absent -> 0.

        The constant term may be omitted (then set to 1) but must equal 1
        if present.
        """
        dense = np.zeros(1 << n)
        dense[0] = 1.0
        for key, value in coeffs.items():
            mask = key if isinstance(key, int) else mask_from_indices(key, n)
            if not 0 <= mask < (1 << n):
                raise ArgumentError(f"mask {mask} out of range for n={n}")
            if mask == 0 and float(value) != 1.0:
                raise ArgumentError(f"constant term must be 1, got {value}")
            dense[mask] = float(value)
        return cls(n, dense)

    def coeff(self, mask: int) -> float:
        return float(self.coeffs[mask])

    @property
    def singletons(self) -> np.ndarray:
        """The p_i in coordinate order."""
        return self.coeffs[[1 << i for i in range(self.n)]]

    @property
    def top(self) -> float:
        """p_[n], the full-set coefficient."""
        return float(self.coeffs[-1])


def product_polynomial(p: Iterable[float]) -> AffinePolynomial:
    """The independence polynomial prod_i (1 + p_i theta_i)."""
    p = list(map(float, p))
    n = len(p)
    dense = np.ones(1)
    for pi in p:
        dense = np.concatenate([dense, dense * pi])
    return AffinePolynomial(n, dense)


def permute_polynomial(poly: AffinePolynomial, perm: Iterable[int]) -> AffinePolynomial:
    """Relabel coordinates: new variable at position i is old variable perm[i] (1-based)."""
    perm = list(perm)
    if sorted(perm) != list(range(1, poly.n + 1)):
        raise ArgumentError(f"not a permutation of [1, {poly.n}]: {perm}")
    dense = np.empty_like(poly.coeffs)
    for mask in range(1 << poly.n):
        src = 0
        for i in range(poly.n):
            if mask & (1 << i):
                src |= 1 << (perm[i] - 1)
        dense[mask] = poly.coeffs[src]
    return AffinePolynomial(poly.n, dense)


def multilinear_eval(coeffs: np.ndarray, z) -> float | np.ndarray:
    """sum_T coeffs[T] * prod_{t in T} z_t, for z of shape (..., n).

    Folds one variable at a time, so the cost is O(2**n) per point; this is
    the evaluation kernel shared by affine polynomials and copula kernels.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    size = coeffs.shape[-1]
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ArgumentError(f"coefficient array length {size} is not a power of two")
    z = np.asarray(z, dtype=float)
    if z.shape[-1:] != (n,):
        raise ArgumentError(f"point must have last dimension {n}, got shape {z.shape}")
    batch = z.shape[:-1]
    acc = np.broadcast_to(coeffs, batch + (size,))
    for i in range(n - 1, -1, -1):
        pair = acc.reshape(batch + (2, 1 << i))
        acc = pair[..., 0, :] + z[..., i, None] * pair[..., 1, :]
    out = acc[..., 0]
    return float(out) if out.shape == () else out


def evaluate(poly: AffinePolynomial, theta) -> float | np.ndarray:
    """Evaluate P at theta; theta may be a batch with shape (..., n)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1:] != (poly.n,):
        raise ArgumentError(
            f"theta must have last dimension {poly.n}, got shape {theta.shape}"
        )
    return multilinear_eval(poly.coeffs, theta)


def eval_at_corner(poly: AffinePolynomial, mask: int) -> float:
    """P at the vector with component -1/p_i for i in T, 0 elsewhere."""
    if not 0 <= mask < (1 << poly.n):
        raise ArgumentError(f"mask {mask} out of range for n={poly.n}")
    theta = np.zeros(poly.n)
    for i in range(poly.n):
        if mask & (1 << i):
            pi = poly.coeffs[1 << i]
            if pi == 0.0:
                raise DomainError(f"p_{i + 1} = 0: corner -1/p undefined")
            theta[i] = -1.0 / pi
    return evaluate(poly, theta)


def corner_values(poly: AffinePolynomial) -> np.ndarray:
    """P(-(1/p) 1_T) for every subset T at once, via the zeta transform."""
    single = poly.singletons
    if np.any(single == 0.0):
        raise DomainError("all singleton coefficients must be nonzero")
    scaled = poly.coeffs.copy()
    for i in range(poly.n):
        hit = (np.arange(1 << poly.n) >> i) & 1 == 1
        scaled[hit] *= -1.0 / single[i]
    return subset_sums(scaled, poly.n)


def fgm_coefficients(poly: AffinePolynomial) -> np.ndarray:
    """alpha_T = (-1)^|T| P(-(1/p) 1_T), the copula kernel coefficients.

    alpha_emptyset = 1 and alpha_T = 0 for singletons exactly, as the
    defining basis change guarantees; only |T| >= 2 entries carry content.
    """
    corners = corner_values(poly)
    masks = np.arange(1 << poly.n)
    signs = np.where(np.array([cardinality(int(m)) for m in masks]) % 2, -1.0, 1.0)
    alpha = signs * corners
    alpha[0] = 1.0
    for i in range(poly.n):
        alpha[1 << i] = 0.0
    return alpha


def dual_polynomial(poly: AffinePolynomial) -> np.ndarray:
    """The dual coefficient map ptilde_T = -p_{complement(T)} / p_[n].

    Returned as a raw dense array (constant entry -1), not an
    AffinePolynomial: the divisibility test consumes it verbatim.
    """
    top = poly.top
    if top <= 0.0:
        raise DomainError(f"p_[n] must be positive, got {top}")
    return -poly.coeffs[::-1] / top


@dataclass(frozen=True)
class ShapeParams:
    """Shared shape lam plus per-coordinate shapes lams, lams_i >= lam > 0."""

    lam: float
    lams: tuple[float, ...]

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ArgumentError(f"lambda must be positive, got {self.lam}")
        object.__setattr__(self, "lams", tuple(float(v) for v in self.lams))
        if any(v < self.lam for v in self.lams):
            raise ArgumentError(
                f"each lambda_i must be >= lambda={self.lam}, got {self.lams}"
            )

    @classmethod
    def pure(cls, lam: float, n: int) -> "ShapeParams":
        """The pure multivariate-gamma case lambda_i = lambda for all i."""
        return cls(lam, (float(lam),) * n)

    @property
    def is_pure(self) -> bool:
        return all(v == self.lam for v in self.lams)


@dataclass(frozen=True, eq=False)
class AffineModel:
    """The pair (P, Lambda) defining a multi-factor gamma distribution."""

    poly: AffinePolynomial
    shapes: ShapeParams

    def __post_init__(self):
        if len(self.shapes.lams) != self.poly.n:
            raise ArgumentError(
                f"{len(self.shapes.lams)} shape parameters for dimension {self.poly.n}"
            )
        if np.any(self.poly.singletons <= 0.0):
            raise ArgumentError("all singleton coefficients p_i must be positive")

    @property
    def n(self) -> int:
        return self.poly.n


def model_from_json_dict(data: Mapping) -> AffineModel:
    """Parse the JSON model format.

    ``{"n": 2, "coeffs": {"1": 1.0, "2": 1.0, "1,2": 0.5},
       "lambda": 1.5, "lambdas": [2.0, 3.0]}``

    Subset keys are comma-separated sorted 1-based indices; the "" key is
    optional and must be 1.0 if present; "lambdas" defaults to all-lambda.
    """
    if not isinstance(data, Mapping):
        raise ParseError("model JSON must be an object")
    try:
        n = int(data["n"])
    except (KeyError, TypeError, ValueError):
        raise ParseError('missing or malformed "n"') from None
    if not 1 <= n <= MAX_DIM:
        raise ParseError(f'"n" must be in [1, {MAX_DIM}], got {n}')
    raw = data.get("coeffs")
    if not isinstance(raw, Mapping):
        raise ParseError('missing or malformed "coeffs" object')
    coeffs = {}
    for key, value in raw.items():
        mask = mask_from_label(str(key), n)
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ParseError(f"coefficient for key {key!r} is not a number") from None
        if mask == 0 and value != 1.0:
            raise ParseError(f'constant term must be 1.0 if present, got {value}')
        coeffs[mask] = value
    if "lambda" not in data:
        raise ParseError('missing "lambda"')
    try:
        lam = float(data["lambda"])
    except (TypeError, ValueError):
        raise ParseError('"lambda" is not a number') from None
    if lam <= 0:
        raise ParseError(f'"lambda" must be positive, got {lam}')
    if "lambdas" in data and data["lambdas"] is not None:
        lams = data["lambdas"]
        if not isinstance(lams, (list, tuple)) or len(lams) != n:
            raise ParseError(f'"lambdas" must be a list of {n} numbers')
        try:
            lams = tuple(float(v) for v in lams)
        except (TypeError, ValueError):
            raise ParseError('"lambdas" entries must be numbers') from None
        if any(v < lam for v in lams):
            raise ParseError(f'"lambdas" entries must be >= lambda={lam}')
    else:
        lams = (lam,) * n
    try:
        poly = AffinePolynomial.from_coeffs(n, coeffs)
        model = AffineModel(poly, ShapeParams(lam, lams))
    except ArgumentError as exc:
        raise ParseError(str(exc)) from None
    return model


def model_to_json_dict(model: AffineModel) -> dict:
    """Canonical JSON form; inverse of :func:`model_from_json_dict`."""
    coeffs = {}
    for mask in range(1, 1 << model.n):
        value = model.poly.coeff(mask)
        if value != 0.0:
            coeffs[subset_label(mask)] = value
    return {
        "n": model.n,
        "coeffs": coeffs,
        "lambda": model.shapes.lam,
        "lambdas": list(model.shapes.lams),
    }
