"""Shared test helpers: brute-force series oracles and model generators.

Everything here is deliberately independent of the library's evaluation
paths: per-term products through log-gamma, plain nested loops, itertools
enumeration.  Slow and obviously correct.
"""

import itertools
import math

import numpy as np

from gammacop.divisibility import check_infinite_divisibility
from gammacop.polynomial import AffineModel, AffinePolynomial, ShapeParams

# ---------------------------------------------------------------------------
# naive series oracles
# ---------------------------------------------------------------------------


def poch(a, k):
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def _log_poch(a, k):
    # positive parameters only, which is all the oracle grids use
    if k == 0:
        return 0.0
    return math.lgamma(a + k) - math.lgamma(a)


def pfq_naive(upper, lower, z, terms):
    total = 0.0
    for k in range(terms):
        lg = sum(_log_poch(a, k) for a in upper)
        lg -= sum(_log_poch(b, k) for b in lower)
        lg += k * math.log(abs(z)) if z != 0.0 else (0.0 if k == 0 else -math.inf)
        lg -= math.lgamma(k + 1.0)
        total += (math.copysign(1.0, z) ** k) * math.exp(lg)
    return total


def phi3_naive(a, b, x, y, terms):
    total = 0.0
    for m in range(terms):
        if a == 0.0 and m > 0:
            break
        for n in range(terms):
            term = poch(a, m) / poch(b, m + n)
            term *= x**m / math.factorial(m) * y**n / math.factorial(n)
            total += term
    return total


def lauricella_fi_naive(a, b, c, z1, z2, z3, terms):
    total = 0.0
    for m1 in range(terms):
        if a == 0.0 and m1 > 0:
            break
        for m2 in range(terms):
            if b == 0.0 and m2 > 0:
                break
            for m3 in range(terms):
                term = poch(a, m1) * poch(b, m2) * poch(c, m3)
                term /= poch(a + c, m1 + m3) * poch(b + c, m2 + m3)
                term *= z1**m1 / math.factorial(m1)
                term *= z2**m2 / math.factorial(m2)
                term *= z3**m3 / math.factorial(m3)
                total += term
    return total


def lauricella_fii_naive(l1, l2, z1, z2, z3, z4, terms):
    total = 0.0
    for m1 in range(terms):
        for m2 in range(terms):
            for m3 in range(terms):
                for m4 in range(terms):
                    term = 1.0 / (poch(l1, m1 + m2 + m3) * poch(l2, 2 * m1 + m2 + m4))
                    term *= z1**m1 / math.factorial(m1)
                    term *= z2**m2 / math.factorial(m2)
                    term *= z3**m3 / math.factorial(m3)
                    term *= z4**m4 / math.factorial(m4)
                    total += term
    return total


# ---------------------------------------------------------------------------
# combinatorial oracles
# ---------------------------------------------------------------------------


def stirling2(n, k):
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def bell(n):
    return sum(stirling2(n, k) for k in range(n + 1))


def partitions_brute(elements, k):
    """All partitions of a list into k nonempty blocks, as frozensets."""
    out = set()
    for labels in itertools.product(range(k), repeat=len(elements)):
        if len(set(labels)) != k:
            continue
        blocks = {}
        for e, lab in zip(elements, labels):
            blocks.setdefault(lab, set()).add(e)
        out.add(frozenset(frozenset(b) for b in blocks.values()))
    return out


# ---------------------------------------------------------------------------
# random model generators
# ---------------------------------------------------------------------------


def random_divisible_model(rng, n, pure=False, max_tries=500):
    """A random divisible AffineModel, built by damping an independence
    polynomial's interaction coefficients and rejection-sampling."""
    for _ in range(max_tries):
        p = rng.uniform(0.5, 2.0, n)
        coeffs = {}
        for i in range(n):
            coeffs[(i + 1,)] = p[i]
        if n == 2:
            r = rng.uniform(0.05, 0.95)
            coeffs[(1, 2)] = p[0] * p[1] * (1.0 - r)
        else:
            for i, j in itertools.combinations(range(n), 2):
                coeffs[(i + 1, j + 1)] = p[i] * p[j] * (1.0 - rng.uniform(0.0, 0.25))
            top = float(np.prod(p)) * rng.uniform(0.6, 0.95)
            coeffs[tuple(range(1, n + 1))] = top
        poly = AffinePolynomial.from_coeffs(n, coeffs)
        try:
            report = check_infinite_divisibility(poly)
        except Exception:
            continue
        if not report.divisible:
            continue
        lam = rng.uniform(0.5, 3.0)
        if pure:
            shapes = ShapeParams.pure(lam, n)
        else:
            shapes = ShapeParams(lam, tuple(lam * rng.uniform(1.0, 3.0) for _ in range(n)))
        return AffineModel(poly, shapes)
    raise RuntimeError("no divisible model found")
