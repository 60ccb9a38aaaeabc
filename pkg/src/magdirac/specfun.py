"""Special functions for the Landau eigenbasis.

The radial eigenfunctions are built from terminating confluent
hypergeometric series; the high-level scan machinery additionally needs
exponentially weighted Laguerre families evaluated stably up to levels of
order 10^4, which is done by three-term recurrence with dynamic rescaling.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidBError

__all__ = [
    "SeriesTolerance",
    "pochhammer",
    "kummer_m",
    "laguerre_p",
    "weighted_laguerre_rows",
    "weighted_laguerre_sum",
]


@dataclass(frozen=True)
class SeriesTolerance:
    """Stopping rule for infinite series summation."""

    abs_tol: float = 1e-14
    max_terms: int = 10000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


def pochhammer(a, n):
    """Rising factorial a(a+1)...(a+n-1), with the empty product equal to 1."""
    if n < 0 or n != int(n):
        raise ValueError("n must be a non-negative integer")
    out = 1.0
    for i in range(int(n)):
        out *= a + i
    return out


def kummer_m(a, b, s, tol=SeriesTolerance()):
    """Confluent hypergeometric series M(a, b, s) = sum (a)_n/(b)_n s^n/n!.

    Terminates early when a is a non-positive integer.  Stops once the last
    term is below ``tol.abs_tol`` and the term ratio has dropped under 1/2,
    so the geometric tail estimate is below the tolerance as well.
    """
    if b <= 0 and b == int(b):
        raise InvalidBError(f"b={b} is a non-positive integer")
    total = 1.0
    term = 1.0
    comp = 0.0
    for n in range(int(tol.max_terms)):
        ratio_num = a + n
        if ratio_num == 0.0:
            return total + comp  # terminating series
        term = term * ratio_num / (b + n) * s / (n + 1)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) < tol.abs_tol:
            nxt = abs((a + n + 1) / (b + n + 1) * s / (n + 2))
            if nxt < 0.5:
                return total + comp
    raise ConvergenceError(
        f"M({a},{b},{s}) did not converge within {tol.max_terms} terms"
    )


def laguerre_p(k, ell, r):
    """Radial polynomial sum_{n=0}^{ell} (-ell)_n / (1+|k|)_n r^n / n!.

    Exact finite sum; `r` may be a scalar or ndarray.  Compensated
    summation keeps the alternating sum accurate at large arguments.
    """
    if ell < 0 or ell != int(ell):
        raise ValueError("ell must be a non-negative integer")
    ell = int(ell)
    r = np.asarray(r, dtype=float)
    total = np.ones_like(r)
    term = np.ones_like(r)
    comp = np.zeros_like(r)
    ak = 1 + abs(int(k))
    for n in range(ell):
        term = term * ((-ell + n) / (ak + n)) * r / (n + 1)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    out = total + comp
    return out if out.ndim else float(out)


# Dynamic-range guards for the scaled Laguerre recurrence.  Unweighted
# L_n(x) reaches ~e^{x/2} inside the oscillatory region, so the running
# pair is renormalized by 2^-512 whenever it grows past 2^512 and the
# exponent is folded back into the weight.
_RESCALE = 2.0**512
_RESCALE_LOG2 = 512


def weighted_laguerre_rows(nmax, x, alpha=0):
    """Yield e^{-x/2} L_n^{(alpha)}(x) for n = 0..nmax over an array x.

    Forward recurrence, stable throughout the oscillatory regime n >= x/4.
    Rows with n << x/4 accumulate absolute error of order 1e-14 from the
    dominant second solution; keep x below a few hundred.
    """
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    curr = np.ones_like(x)
    expo = np.zeros_like(x)  # base-2 exponent absorbed out of curr/prev

    def weighted(v):
        arg = np.clip(expo * np.log(2.0) - x / 2.0, -745.0, 709.0)
        return v * np.exp(arg)

    yield weighted(curr)
    for n in range(1, int(nmax) + 1):
        nxt = ((2 * n - 1 + alpha - x) * curr - (n - 1 + alpha) * prev) / n
        prev, curr = curr, nxt
        big = np.abs(curr) > _RESCALE
        if big.any():
            curr = np.where(big, curr / _RESCALE, curr)
            prev = np.where(big, prev / _RESCALE, prev)
            expo = np.where(big, expo + _RESCALE_LOG2, expo)
        yield weighted(curr)


def weighted_laguerre_sum(coeffs, x, alpha=0):
    """Evaluate sum_n coeffs[n] e^{-x/2} L_n^{(alpha)}(x) over an array x.

    `coeffs` may be complex; the accumulation is streamed so the memory
    footprint stays O(len(x)).
    """
    coeffs = np.asarray(coeffs)
    x = np.asarray(x, dtype=float)
    acc = np.zeros(x.shape, dtype=np.result_type(coeffs.dtype, np.complex128)
                   if np.iscomplexobj(coeffs) else float)
    for n, row in enumerate(weighted_laguerre_rows(len(coeffs) - 1, x, alpha)):
        acc = acc + coeffs[n] * row
    return acc
