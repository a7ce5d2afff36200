"""Scalar root finding for monotone functions.

Every inversion in this package funnels through here: bisection to bracket,
then a bisection-safeguarded secant polish. For increasing functions that are
queried repeatedly, ``TabulatedIncreasing`` keeps a value table and solves each
query inside the bracketing cell.
"""

from __future__ import annotations

import math
from typing import Callable

_GOLDEN = 1.6180339887498949


class BracketError(RuntimeError):
    """No sign change found while expanding the search bracket."""


def expand_bracket(
    fn: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    lo_bound: float = -math.inf,
    hi_bound: float = math.inf,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Grow [lo, hi] geometrically until fn - target changes sign.

    fn must be nondecreasing; the bracket never leaves [lo_bound, hi_bound].
    """
    if lo > hi:
        lo, hi = hi, lo
    flo = fn(lo) - target
    fhi = fn(hi) - target
    width = max(hi - lo, 1e-8 * (1.0 + abs(lo) + abs(hi)))
    for _ in range(max_iter):
        if flo <= 0.0 <= fhi:
            return lo, hi
        width *= _GOLDEN
        if flo > 0.0:
            if lo <= lo_bound:
                break
            lo = max(lo - width, lo_bound)
            flo = fn(lo) - target
        elif fhi < 0.0:
            if hi >= hi_bound:
                break
            hi = min(hi + width, hi_bound)
            fhi = fn(hi) - target
    if flo <= 0.0 <= fhi:
        return lo, hi
    raise BracketError(
        f"no sign change in [{lo!r}, {hi!r}] for target {target!r} "
        f"(f ranges over [{flo + target!r}, {fhi + target!r}])"
    )


def solve_bracketed(
    fn: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    xtol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Root of fn(x) = target inside a bracket, secant with bisection safeguard.

    Requires fn(lo) <= target <= fn(hi). Converges unconditionally: any secant
    step that leaves the bracket or stalls falls back to bisection.
    """
    flo = fn(lo) - target
    fhi = fn(hi) - target
    if flo > 0.0 or fhi < 0.0:
        raise BracketError(f"invalid bracket [{lo!r}, {hi!r}] for target {target!r}")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        denom = fhi - flo
        if denom > 0.0:
            x = lo - flo * (hi - lo) / denom
        else:
            x = 0.5 * (lo + hi)
        # Keep strictly interior so that the bracket always shrinks.
        margin = 0.1 * (hi - lo)
        x = min(max(x, lo + 1e-3 * margin), hi - 1e-3 * margin)
        fx = fn(x) - target
        if fx == 0.0:
            return x
        if fx < 0.0:
            if x - lo < 0.01 * (hi - lo):
                # Secant is stalling against the lower edge; bisect instead.
                mid = 0.5 * (lo + hi)
                fmid = fn(mid) - target
                if fmid <= 0.0:
                    lo, flo = mid, fmid
                else:
                    lo, flo, hi, fhi = x, fx, mid, fmid
            else:
                lo, flo = x, fx
        else:
            if hi - x < 0.01 * (hi - lo):
                mid = 0.5 * (lo + hi)
                fmid = fn(mid) - target
                if fmid >= 0.0:
                    hi, fhi = mid, fmid
                else:
                    lo, flo, hi, fhi = mid, fmid, x, fx
            else:
                hi, fhi = x, fx
    return 0.5 * (lo + hi)


def invert_increasing(
    fn: Callable[[float], float],
    target: float,
    guess_lo: float,
    guess_hi: float,
    lo_bound: float = -math.inf,
    hi_bound: float = math.inf,
    xtol: float = 1e-12,
) -> float:
    """Solve fn(x) = target for increasing fn, expanding from an initial guess."""
    lo, hi = expand_bracket(fn, target, guess_lo, guess_hi, lo_bound, hi_bound)
    return solve_bracketed(fn, target, lo, hi, xtol=xtol)


class TabulatedIncreasing:
    """Value table of an increasing scalar function with polished inverse queries.

    The table is built once over an initial window and extended geometrically
    when queries fall outside the tabulated range. Each inverse query locates
    the bracketing cell by binary search and polishes inside it.
    """

    def __init__(
        self,
        fn: Callable[[float], float],
        lo: float,
        hi: float,
        n: int = 512,
        lo_bound: float = -math.inf,
        hi_bound: float = math.inf,
        xtol: float = 1e-12,
    ):
        if not lo < hi:
            raise ValueError("need lo < hi")
        self._fn = fn
        self._lo_bound = lo_bound
        self._hi_bound = hi_bound
        self._xtol = xtol
        step = (hi - lo) / (n - 1)
        self._xs = [lo + i * step for i in range(n)]
        self._vals = [fn(x) for x in self._xs]
        self._check_monotone()

    def _check_monotone(self) -> None:
        vals = self._vals
        for i in range(len(vals) - 1):
            if not vals[i + 1] >= vals[i]:
                raise ValueError(
                    f"tabulated function not nondecreasing near x={self._xs[i]!r}"
                )

    def _extend_low(self) -> bool:
        xs, vals = self._xs, self._vals
        if xs[0] <= self._lo_bound:
            return False
        width = max(xs[-1] - xs[0], 1e-8)
        new_lo = max(xs[0] - width, self._lo_bound)
        extra = [new_lo + i * (xs[0] - new_lo) / 64.0 for i in range(64)]
        self._xs = extra + xs
        self._vals = [self._fn(x) for x in extra] + vals
        return True

    def _extend_high(self) -> bool:
        xs, vals = self._xs, self._vals
        if xs[-1] >= self._hi_bound:
            return False
        width = max(xs[-1] - xs[0], 1e-8)
        new_hi = min(xs[-1] + width, self._hi_bound)
        extra = [xs[-1] + (i + 1) * (new_hi - xs[-1]) / 64.0 for i in range(64)]
        self._xs = xs + extra
        self._vals = vals + [self._fn(x) for x in extra]
        return True

    def inverse(self, target: float) -> float:
        for _ in range(80):
            if target < self._vals[0]:
                if not self._extend_low():
                    raise BracketError(
                        f"target {target!r} below tabulated range at bound"
                    )
            elif target > self._vals[-1]:
                if not self._extend_high():
                    raise BracketError(
                        f"target {target!r} above tabulated range at bound"
                    )
            else:
                break
        else:
            raise BracketError(f"could not extend table to reach {target!r}")
        vals = self._vals
        # Binary search for the bracketing cell.
        lo_i, hi_i = 0, len(vals) - 1
        while hi_i - lo_i > 1:
            mid = (lo_i + hi_i) // 2
            if vals[mid] <= target:
                lo_i = mid
            else:
                hi_i = mid
        return solve_bracketed(
            self._fn, target, self._xs[lo_i], self._xs[hi_i], xtol=self._xtol
        )

    def __call__(self, target: float) -> float:
        return self.inverse(target)
