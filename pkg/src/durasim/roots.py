"""Bracketed bisection for monotone functions."""

from .errors import NumericError


def bisect_increasing(f, target: float, lo: float, hi: float, *,
                      xtol: float = 1e-6, rtol: float = 0.0,
                      max_iter: int = 200) -> float:
    """Solve f(x) = target for nondecreasing f with f(lo) <= target <= f(hi)."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if (hi - lo) <= xtol + rtol * abs(mid):
            return mid
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    raise NumericError("bisection did not converge", lo=lo, hi=hi, target=target)
