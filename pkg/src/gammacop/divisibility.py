"""Infinite-divisibility test for gamma distributions driven by affine polynomials.

The verdict rests on the dual coefficients ptilde_T = -p_{complement(T)}/p_[n]
and the partition sums

    btilde_S = sum_{k=1}^{|S|} (k-1)! sum_{partitions of S into k blocks}
               prod_{blocks T} ptilde_T.

The law is infinitely divisible iff ptilde_i < 0 for every coordinate and
btilde_S >= 0 for every subset with |S| >= 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Iterator

import numpy as np

from .errors import ArgumentError, PreconditionError
from .polynomial import AffinePolynomial, cardinality, dual_polynomial, indices_from_mask


def partitions(mask: int, k: int) -> Iterator[tuple[int, ...]]:
    """Yield every partition of the subset ``mask`` into ``k`` nonempty blocks.

    Each partition is a tuple of disjoint masks covering ``mask``; the number
    of partitions is the Stirling number of the second kind S(|mask|, k).
    Enumeration walks restricted growth strings so no partition repeats.
    """
    bits = [1 << (i - 1) for i in indices_from_mask(mask)]
    m = len(bits)
    if not 1 <= k <= m:
        raise ArgumentError(f"k must be in [1, {m}] for |S|={m}, got {k}")
    blocks = [0] * k

    def grow(pos: int, used: int):
        # used = number of nonempty blocks so far; prune when k is unreachable
        if m - pos < k - used:
            return
        if pos == m:
            yield tuple(blocks)
            return
        limit = min(used + 1, k)
        for b in range(limit):
            blocks[b] |= bits[pos]
            yield from grow(pos + 1, used + (1 if b == used else 0))
            blocks[b] &= ~bits[pos]

    yield from grow(0, 0)


def btilde(dual: np.ndarray, mask: int) -> float:
    """The (k-1)!-weighted partition sum b~_S over the dual coefficients."""
    size = cardinality(mask)
    if size < 1:
        raise ArgumentError("S must be nonempty")
    if size == 1:
        return float(dual[mask])
    total = 0.0
    for k in range(1, size + 1):
        weight = factorial(k - 1)
        acc = 0.0
        for blocks in partitions(mask, k):
            prod = 1.0
            for block in blocks:
                prod *= dual[block]
            acc += prod
        total += weight * acc
    return total


@dataclass(frozen=True, eq=False)
class DivisibilityReport:
    """Outcome of the divisibility test.

    ``dual`` is the full ptilde array; ``btilde`` maps each subset mask with
    |S| >= 2 to its partition sum (subsets above ``max_subset_size`` are
    skipped when that guardrail is set).
    """

    n: int
    dual: np.ndarray
    btilde: dict[int, float]
    singleton_ok: bool
    btilde_ok: bool
    divisible: bool
    tol: float
    max_subset_size: int | None = field(default=None)


def check_infinite_divisibility(
    poly: AffinePolynomial,
    tol: float = 1e-12,
    max_subset_size: int | None = None,
) -> DivisibilityReport:
    """Run the full test on an affine polynomial.

    Requires the theorem hypotheses p_i > 0 and p_[n] > 0; violating them is
    a precondition error, not a negative verdict.  ``btilde_S >= -tol``
    absorbs floating-point noise in partition sums near zero.

    Partition enumeration over a subset of size s costs Bell(s) products, so
    checking all subsets is exponential in n; ``max_subset_size`` skips
    subsets above the given cardinality for large n (exact up to that size).
    """
    if np.any(poly.singletons <= 0.0):
        raise PreconditionError("divisibility test requires p_i > 0 for all i")
    if poly.top <= 0.0:
        raise PreconditionError("divisibility test requires p_[n] > 0")
    dual = dual_polynomial(poly)
    singleton_ok = all(dual[1 << i] < 0.0 for i in range(poly.n))
    values: dict[int, float] = {}
    btilde_ok = True
    for mask in range(1 << poly.n):
        size = cardinality(mask)
        if size < 2:
            continue
        if max_subset_size is not None and size > max_subset_size:
            continue
        value = btilde(dual, mask)
        values[mask] = value
        if value < -tol:
            btilde_ok = False
    return DivisibilityReport(
        n=poly.n,
        dual=dual,
        btilde=values,
        singleton_ok=singleton_ok,
        btilde_ok=btilde_ok,
        divisible=singleton_ok and btilde_ok,
        tol=tol,
        max_subset_size=max_subset_size,
    )
