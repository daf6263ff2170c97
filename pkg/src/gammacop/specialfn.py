"""Series special functions: Pochhammer, pFq, Horn Phi3, and the two
generalized Lauricella functions used by the closed-form densities.

All four series families are entire in the arguments this package feeds
them, so plain forward summation with incremental Pochhammer-ratio updates
converges without acceleration.  Multi-index series sweep total degree with
a tail-window stopping rule; the double/triple/quadruple sums are factored
through inner confluent series, which reorders (but never changes) the
terms of an absolutely convergent sum.

Arguments may be numpy arrays (broadcast together); scalar inputs return
floats.  Negative series arguments are summed as-is and lose precision via
cancellation once terms dwarf the result; in-scope density evaluations only
produce non-negative arguments.

Each family has a scalar log-space companion (`log_*`) used by the density
layer when the linear value overflows.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError, DomainError

__all__ = [
    "SeriesControl",
    "default_control",
    "pochhammer",
    "pfq",
    "hyp0f1",
    "hyp1f1",
    "horn_phi3",
    "lauricella_FI",
    "lauricella_FII",
    "log_hyp0f1",
    "log_hyp1f1",
    "log_horn_phi3",
    "log_lauricella_FI",
    "log_lauricella_FII",
]


@dataclass(frozen=True)
class SeriesControl:
    """Tolerance and truncation policy for all multi-index series.

    ``max_terms`` is a per-index budget; ``tail_window`` consecutive
    sub-tolerance terms are required before a series is declared converged.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_terms: int = 400
    tail_window: int = 5

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if self.tail_window < 1:
            raise DomainError(f"tail_window must be >= 1, got {self.tail_window}")


def default_control() -> SeriesControl:
    """Default control; GAMMACOP_MAX_TERMS overrides the term budget globally."""
    raw = os.environ.get("GAMMACOP_MAX_TERMS")
    if raw:
        try:
            return SeriesControl(max_terms=int(raw))
        except ValueError:
            raise DomainError(f"GAMMACOP_MAX_TERMS must be an integer, got {raw!r}") from None
    return SeriesControl()


def _is_nonpositive_int(a: float) -> bool:
    return a <= 0.0 and float(a) == int(a)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.

    Long products with a > 0 go through log-gamma to dodge overflow;
    negative a always uses the exact product (may overflow to inf).
    """
    if k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k}")
    if k == 0:
        return 1.0
    if k <= 64 or a <= 0.0:
        out = 1.0
        for j in range(k):
            out *= a + j
        return out
    return float(math.exp(gammaln(a + k) - gammaln(a)))


def _geom_tail(term: float, ratio: float) -> float:
    """Conservative geometric residual bound from the last term and ratio."""
    if not np.isfinite(term):
        return float("inf")
    if 0.0 <= ratio < 1.0:
        return 2.0 * abs(term) * ratio / (1.0 - ratio) + abs(term)
    return float("inf")


def pfq(upper, lower, z: float, ctl: SeriesControl | None = None, with_error: bool = False):
    """Generalized hypergeometric sum_k prod(a_i)_k / prod(b_j)_k * z^k / k!.

    Valid when p <= q (entire), when p == q+1 with |z| < 1, or at |z| = 1
    with positive parameter excess sum(lower) - sum(upper); a non-positive
    integer upper parameter truncates the series and lifts the domain
    restrictions.  Raises DomainError outside the convergence domain and
    ConvergenceError (carrying the partial sum) past the term budget.
    """
    ctl = ctl or default_control()
    upper = [float(a) for a in upper]
    lower = [float(b) for b in lower]
    z = float(z)
    if z == 0.0:
        return (1.0, 0.0) if with_error else 1.0

    trunc = None
    for a in upper:
        if _is_nonpositive_int(a):
            m = int(-a)
            trunc = m if trunc is None else min(trunc, m)
    for b in lower:
        if _is_nonpositive_int(b):
            if trunc is None or int(-b) < trunc:
                raise DomainError(
                    f"lower parameter {b} is a non-positive integer and the series "
                    "does not truncate first"
                )
    if trunc is None:
        p, q = len(upper), len(lower)
        if p > q + 1:
            raise DomainError(f"{p}F{q} diverges for z != 0")
        if p == q + 1:
            if abs(z) > 1.0:
                raise DomainError(f"{p}F{q} requires |z| < 1, got z={z}")
            if abs(z) == 1.0:
                excess = sum(lower) - sum(upper)
                if excess <= 0.0:
                    raise DomainError(
                        f"{p}F{q} at |z|=1 needs positive parameter excess, "
                        f"got {excess}"
                    )

    total = 0.0
    term = 1.0
    small = 0
    ratio = 0.0
    limit = ctl.max_terms if trunc is None else min(ctl.max_terms, trunc + 1)
    for k in range(limit + 1):
        total += term
        if abs(term) <= max(ctl.rel_tol * abs(total), ctl.abs_tol):
            small += 1
            if small >= ctl.tail_window:
                break
        else:
            small = 0
        num = 1.0
        for a in upper:
            num *= a + k
        den = 1.0
        for b in lower:
            den *= b + k
        if num == 0.0:
            break  # truncated exactly
        ratio = num / den * z / (k + 1)
        term *= ratio
    else:
        est = _geom_tail(term, min(abs(ratio), abs(z)) if len(upper) == len(lower) + 1 else abs(ratio))
        raise ConvergenceError(
            f"pFq did not converge within {ctl.max_terms} terms (z={z})",
            partial=total,
            est_error=est,
        )
    if trunc is None and len(upper) == len(lower) + 1:
        ratio = max(abs(ratio), abs(z))
    est = _geom_tail(term, abs(ratio))
    return (total, est) if with_error else total


def _prepare(args):
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
    scalar = arrs[0].shape == ()
    if scalar:
        arrs = [a.reshape(1) for a in arrs]
    return arrs, scalar


def _finish(value, scalar):
    return float(value[0]) if scalar else value


def hyp0f1(b: float, z, ctl: SeriesControl | None = None):
    """Confluent limit function 0F1(; b; z) = sum_k z^k / ((b)_k k!)."""
    ctl = ctl or default_control()
    if _is_nonpositive_int(b):
        raise DomainError(f"0F1 parameter must not be a non-positive integer, got {b}")
    (z,), scalar = _prepare([z])
    total = np.zeros_like(z)
    term = np.ones_like(z)
    small = 0
    for k in range(2 * ctl.max_terms + 1):
        total += term
        if np.all(np.abs(term) <= np.maximum(ctl.rel_tol * np.abs(total), ctl.abs_tol)):
            small += 1
            if small >= ctl.tail_window:
                return _finish(total, scalar)
        else:
            small = 0
        term = term * z / ((b + k) * (k + 1))
    raise ConvergenceError(
        f"0F1(;{b};z) did not converge within budget",
        partial=_finish(total, scalar),
        est_error=float(np.max(np.abs(term))) * ctl.tail_window,
    )


def hyp1f1(a: float, b: float, z, ctl: SeriesControl | None = None):
    """Kummer confluent function 1F1(a; b; z); exactly 1 when a == 0."""
    ctl = ctl or default_control()
    if _is_nonpositive_int(b) and not (_is_nonpositive_int(a) and -a < -b):
        raise DomainError(f"1F1 parameter b={b} is a non-positive integer")
    (z,), scalar = _prepare([z])
    total = np.zeros_like(z)
    term = np.ones_like(z)
    small = 0
    for k in range(2 * ctl.max_terms + 1):
        total += term
        if np.all(np.abs(term) <= np.maximum(ctl.rel_tol * np.abs(total), ctl.abs_tol)):
            small += 1
            if small >= ctl.tail_window:
                return _finish(total, scalar)
        else:
            small = 0
        if a + k == 0.0:
            return _finish(total, scalar)  # truncated polynomial
        term = term * (a + k) * z / ((b + k) * (k + 1))
    raise ConvergenceError(
        f"1F1({a};{b};z) did not converge within budget",
        partial=_finish(total, scalar),
        est_error=float(np.max(np.abs(term))) * ctl.tail_window,
    )


def horn_phi3(a: float, b: float, x, y, ctl: SeriesControl | None = None, with_error: bool = False):
    """Horn function Phi3(a; b; x, y) = sum (a)_m / (b)_{m+n} x^m/m! y^n/n!.

    Swept by total degree d = m + n: the diagonal sums t_d satisfy the
    three-term recurrence

        t_{d+1} = ((a+d)x + y) / ((d+1)(b+d)) t_d
                  - x y / ((d+1)(b+d)(b+d-1)) t_{d-1},

    which keeps the cost at O(1) per degree and is stable for the
    non-negative arguments the densities produce.
    """
    ctl = ctl or default_control()
    if _is_nonpositive_int(b):
        raise DomainError(f"Phi3 parameter must not be a non-positive integer, got {b}")
    if b <= 0.0:
        raise DomainError(f"Phi3 is implemented for b > 0, got b={b}")
    (x, y), scalar = _prepare([x, y])
    total = np.zeros_like(x)
    t_prev = np.zeros_like(x)
    t = np.ones_like(x)
    small = 0
    budget = 2 * ctl.max_terms
    for d in range(budget + 1):
        total += t
        if np.all(np.abs(t) <= np.maximum(ctl.rel_tol * np.abs(total), ctl.abs_tol)):
            small += 1
            if small >= ctl.tail_window:
                est = (float(np.max(np.abs(t))) * ctl.tail_window * 2.0
                       + 4.0 * ctl.rel_tol * float(np.max(np.abs(total))))
                out = _finish(total, scalar)
                return (out, est) if with_error else out
        else:
            small = 0
        t_next = ((a + d) * x + y) / ((d + 1.0) * (b + d)) * t
        if d >= 1:
            t_next -= x * y / ((d + 1.0) * (b + d) * (b + d - 1.0)) * t_prev
        t_prev, t = t, t_next
    raise ConvergenceError(
        "Phi3 did not converge within budget",
        partial=_finish(total, scalar),
        est_error=float(np.max(np.abs(t))) * ctl.tail_window,
    )


def lauricella_FI(a: float, b: float, c: float, z1, z2, z3,
                  ctl: SeriesControl | None = None, with_error: bool = False):
    """Triple series sum (a)_{m1} (b)_{m2} (c)_{m3}
    / [(a+c)_{m1+m3} (b+c)_{m2+m3}] z1^{m1} z2^{m2} z3^{m3} / (m1! m2! m3!).

    Factored through the m3 index:

        F_I = sum_{m3} (c)_{m3} z3^{m3} / (m3! (a+c)_{m3} (b+c)_{m3})
              * 1F1(a; a+c+m3; z1) * 1F1(b; b+c+m3; z2).
    """
    ctl = ctl or default_control()
    for name, v in (("a+c", a + c), ("b+c", b + c)):
        if _is_nonpositive_int(v):
            raise DomainError(f"F_I parameter {name}={v} is a non-positive integer")
        if v <= 0.0:
            raise DomainError(f"F_I is implemented for {name} > 0, got {v}")
    (z1, z2, z3), scalar = _prepare([z1, z2, z3])
    total = np.zeros_like(z1)
    coef = np.ones_like(z3)
    small = 0
    for m3 in range(ctl.max_terms + 1):
        term = coef * hyp1f1(a, a + c + m3, z1, ctl) * hyp1f1(b, b + c + m3, z2, ctl)
        total += term
        if m3 >= 1 and np.all(np.abs(term) <= np.maximum(ctl.rel_tol * np.abs(total), ctl.abs_tol)):
            small += 1
            if small >= ctl.tail_window:
                est = (float(np.max(np.abs(term))) * ctl.tail_window * 2.0
                       + 4.0 * ctl.rel_tol * float(np.max(np.abs(total))))
                out = _finish(total, scalar)
                return (out, est) if with_error else out
        else:
            small = 0
        coef = coef * z3 * (c + m3) / ((m3 + 1.0) * (a + c + m3) * (b + c + m3))
    raise ConvergenceError(
        "F_I did not converge within budget",
        partial=_finish(total, scalar),
        est_error=float(np.max(np.abs(coef))) * ctl.tail_window,
    )


def lauricella_FII(l1: float, l2: float, z1, z2, z3, z4,
                   ctl: SeriesControl | None = None, with_error: bool = False):
    """Quadruple series sum 1 / [(l1)_{m1+m2+m3} (l2)_{2m1+m2+m4}]
    * prod z_i^{m_i} / m_i!.

    Summing out m3 and m4 leaves a double sum over (m1, m2) whose inner
    factors are 0F1 values with shifted parameters; those are cached per
    shift, so a call costs O(rows * cols) vector operations plus at most
    3 * degree inner 0F1 evaluations.
    """
    ctl = ctl or default_control()
    if not (l1 > 0.0 and l2 > 0.0):
        raise DomainError(f"F_II requires positive parameters, got {l1}, {l2}")
    (z1, z2, z3, z4), scalar = _prepare([z1, z2, z3, z4])
    h1_cache: dict[int, np.ndarray] = {}
    h2_cache: dict[int, np.ndarray] = {}

    def h1(s):
        if s not in h1_cache:
            h1_cache[s] = hyp0f1(l1 + s, z3, ctl)
        return h1_cache[s]

    def h2(t):
        if t not in h2_cache:
            h2_cache[t] = hyp0f1(l2 + t, z4, ctl)
        return h2_cache[t]

    total = np.zeros_like(z1)
    row_start = np.ones_like(z1)
    small_rows = 0
    last_row_max = 0.0
    for m1 in range(ctl.max_terms + 1):
        coef = row_start
        row = np.zeros_like(z1)
        small = 0
        converged = False
        for m2 in range(ctl.max_terms + 1):
            s = m1 + m2
            t = 2 * m1 + m2
            cell = coef * h1(s) * h2(t)
            row += cell
            scale = np.maximum(ctl.rel_tol * np.abs(total + row), ctl.abs_tol)
            if m2 >= 1 and np.all(np.abs(cell) <= scale):
                small += 1
                if small >= ctl.tail_window:
                    converged = True
                    break
            else:
                small = 0
            coef = coef * z2 / ((m2 + 1.0) * (l1 + s) * (l2 + t))
        if not converged:
            raise ConvergenceError(
                "F_II inner index did not converge within budget",
                partial=_finish(total + row, scalar),
                est_error=float(np.max(np.abs(coef))) * ctl.tail_window,
            )
        total += row
        last_row_max = float(np.max(np.abs(row)))
        if m1 >= 1 and np.all(np.abs(row) <= np.maximum(ctl.rel_tol * np.abs(total), ctl.abs_tol)):
            small_rows += 1
            if small_rows >= ctl.tail_window:
                est = (last_row_max * ctl.tail_window * 2.0
                       + 8.0 * ctl.rel_tol * float(np.max(np.abs(total))))
                out = _finish(total, scalar)
                return (out, est) if with_error else out
        else:
            small_rows = 0
        row_start = row_start * z1 / (
            (m1 + 1.0) * (l1 + m1) * (l2 + 2 * m1) * (l2 + 2 * m1 + 1.0)
        )
    raise ConvergenceError(
        "F_II outer index did not converge within budget",
        partial=_finish(total, scalar),
        est_error=last_row_max * ctl.tail_window,
    )


# ---------------------------------------------------------------------------
# Log-space companions.  Scalar-only, non-negative arguments; used when the
# linear value overflows (density tails).  Budgets scale with the argument
# because the linear per-index budget is meaningless out there.
# ---------------------------------------------------------------------------


def _log_budget(z: float) -> int:
    return int(4.0 * math.sqrt(max(z, 0.0)) + 3.0 * max(z, 0.0) ** 0.51 + 400)


def log_hyp0f1(b: float, z: float, rel_tol: float = 1e-14) -> float:
    """log 0F1(; b; z) for z >= 0, safe against overflow for any size of z."""
    z = float(z)
    if z < 0.0:
        raise DomainError("log_hyp0f1 requires z >= 0")
    if 2.0 * math.sqrt(z) < 600.0:
        return math.log(hyp0f1(b, z, SeriesControl(rel_tol=rel_tol, max_terms=10_000)))
    log_total = -math.inf
    log_term = 0.0
    logz = math.log(z)
    small = 0
    for k in range(_log_budget(z)):
        log_total = np.logaddexp(log_total, log_term)
        if log_term < log_total + math.log(rel_tol):
            small += 1
            if small >= 5:
                return float(log_total)
        else:
            small = 0
        log_term += logz - math.log(b + k) - math.log(k + 1.0)
    raise ConvergenceError("log_hyp0f1 did not converge", partial=float(log_total))


def log_hyp1f1(a: float, b: float, z: float, rel_tol: float = 1e-14) -> float:
    """log 1F1(a; b; z) for a >= 0, b > 0, z >= 0."""
    z = float(z)
    if z < 0.0 or a < 0.0:
        raise DomainError("log_hyp1f1 requires a >= 0 and z >= 0")
    if a == 0.0:
        return 0.0
    if z < 600.0:
        return math.log(hyp1f1(a, b, z, SeriesControl(rel_tol=rel_tol, max_terms=10_000)))
    log_total = -math.inf
    log_term = 0.0
    logz = math.log(z)
    small = 0
    for k in range(_log_budget(z)):
        log_total = np.logaddexp(log_total, log_term)
        if log_term < log_total + math.log(rel_tol):
            small += 1
            if small >= 5:
                return float(log_total)
        else:
            small = 0
        log_term += math.log(a + k) + logz - math.log(b + k) - math.log(k + 1.0)
    raise ConvergenceError("log_hyp1f1 did not converge", partial=float(log_total))


def log_horn_phi3(a: float, b: float, x: float, y: float, rel_tol: float = 1e-13) -> float:
    """log Phi3(a; b; x, y) for a >= 0, b > 0, x, y >= 0."""
    if min(x, y) < 0.0 or a < 0.0 or b <= 0.0:
        raise DomainError("log_horn_phi3 requires a >= 0, b > 0, x >= 0, y >= 0")
    if a == 0.0 or x == 0.0:
        return log_hyp0f1(b, y, rel_tol)
    log_total = -math.inf
    log_coef = 0.0
    logx = math.log(x)
    small = 0
    for m in range(_log_budget(x) + _log_budget(y)):
        log_term = log_coef + log_hyp0f1(b + m, y, rel_tol)
        log_total = np.logaddexp(log_total, log_term)
        if log_term < log_total + math.log(rel_tol):
            small += 1
            if small >= 5:
                return float(log_total)
        else:
            small = 0
        log_coef += math.log(a + m) + logx - math.log(b + m) - math.log(m + 1.0)
    raise ConvergenceError("log_horn_phi3 did not converge", partial=float(log_total))


def log_lauricella_FI(a: float, b: float, c: float, z1: float, z2: float, z3: float,
                      rel_tol: float = 1e-13) -> float:
    """log F_I for non-negative parameters and arguments."""
    if min(z1, z2, z3) < 0.0 or min(a, b) < 0.0 or min(a + c, b + c) <= 0.0:
        raise DomainError("log_lauricella_FI requires non-negative arguments")
    log_total = -math.inf
    log_coef = 0.0
    small = 0
    budget = _log_budget(z3) + 50
    for m3 in range(budget):
        log_term = (log_coef
                    + log_hyp1f1(a, a + c + m3, z1, rel_tol)
                    + log_hyp1f1(b, b + c + m3, z2, rel_tol))
        log_total = np.logaddexp(log_total, log_term)
        if log_term < log_total + math.log(rel_tol):
            small += 1
            if small >= 5:
                return float(log_total)
        else:
            small = 0
        if z3 == 0.0:
            return float(log_total)
        log_coef += (math.log(z3) + math.log(c + m3)
                     - math.log(m3 + 1.0) - math.log(a + c + m3) - math.log(b + c + m3))
    raise ConvergenceError("log_lauricella_FI did not converge", partial=float(log_total))


def log_lauricella_FII(l1: float, l2: float, z1: float, z2: float, z3: float, z4: float,
                       rel_tol: float = 1e-13) -> float:
    """log F_II for positive parameters and non-negative arguments."""
    if min(z1, z2, z3, z4) < 0.0 or min(l1, l2) <= 0.0:
        raise DomainError("log_lauricella_FII requires non-negative arguments")
    h1_cache: dict[int, float] = {}
    h2_cache: dict[int, float] = {}

    def h1(s):
        if s not in h1_cache:
            h1_cache[s] = log_hyp0f1(l1 + s, z3, rel_tol)
        return h1_cache[s]

    def h2(t):
        if t not in h2_cache:
            h2_cache[t] = log_hyp0f1(l2 + t, z4, rel_tol)
        return h2_cache[t]

    log_total = -math.inf
    log_row_start = 0.0
    small_rows = 0
    budget = max(_log_budget(z1), _log_budget(z2)) + 100
    for m1 in range(budget):
        log_coef = log_row_start
        log_row = -math.inf
        small = 0
        for m2 in range(budget):
            s = m1 + m2
            t = 2 * m1 + m2
            log_cell = log_coef + h1(s) + h2(t)
            log_row = np.logaddexp(log_row, log_cell)
            ref = np.logaddexp(log_total, log_row)
            if m2 >= 1 and log_cell < ref + math.log(rel_tol):
                small += 1
                if small >= 5:
                    break
            else:
                small = 0
            if z2 == 0.0:
                break
            log_coef += math.log(z2) - math.log(m2 + 1.0) - math.log(l1 + s) - math.log(l2 + t)
        log_total = np.logaddexp(log_total, log_row)
        if m1 >= 1 and log_row < log_total + math.log(rel_tol):
            small_rows += 1
            if small_rows >= 5:
                return float(log_total)
        else:
            small_rows = 0
        if z1 == 0.0:
            return float(log_total)
        log_row_start += (math.log(z1) - math.log(m1 + 1.0) - math.log(l1 + m1)
                          - math.log(l2 + 2 * m1) - math.log(l2 + 2 * m1 + 1.0))
    raise ConvergenceError("log_lauricella_FII did not converge", partial=float(log_total))
