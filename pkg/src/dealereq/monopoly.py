"""Closed-form optimal quoting for a single dealer.

The monopolist's marginal prices invert two explicit increasing functions of
the type law,

    n < 0:  p(n) = (F/f + id - g)^{-1}((gamma_d + gamma_c) n) - gamma_c n,
    n > 0:  p(n) = (-Fbar/f + id - g)^{-1}((gamma_d + gamma_c) n) - gamma_c n,

so the bid/ask edges p(0-) and p(0+) are the roots y_minus, y_plus of those
functions and do not depend on the dealer's inventory cost gamma_d. The
schedule need not be convex; convexity holds iff the hazard-slope condition
(F/f)' - g' <= gamma_d/gamma_c holds below y_minus (mirrored above y_plus),
which for centered Gaussian types reduces to a threshold on the projection
coefficient beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ._roots import TabulatedIncreasing, invert_increasing
from .client import PriceSchedule
from .errors import SolverError
from .typelaw import TypeLaw, mills_ratio

_CONVEXITY_TOL = 1e-9
_PROFIT_WEIGHT_CUTOFF = 1e-12


@dataclass
class ConvexityReport:
    """Margins of the marginal-price monotonicity condition.

    margin_* = gamma_d/gamma_c - sup[(hazard slope) - g'] over the relevant
    half-line; the schedule is convex iff both are nonnegative.
    """

    convex: bool
    margin_minus: float
    margin_plus: float
    tol: float = _CONVEXITY_TOL

    def __bool__(self) -> bool:
        return self.convex


@dataclass
class ZMonResult:
    z_mon: float
    passes: bool
    margin: float
    mean_condition_ok: bool

    def __iter__(self):
        return iter((self.z_mon, self.passes))


@dataclass
class MonopolyResult:
    schedule: PriceSchedule
    y_minus: float
    y_plus: float
    convex: bool
    z_mon: float | None
    n_grid: np.ndarray
    truncated: bool = False
    convexity: ConvexityReport | None = None


def spread_roots(tl: TypeLaw) -> tuple[float, float]:
    """Roots y_minus of F/f + id - g and y_plus of -Fbar/f + id - g.

    Computed with a fixed initial bracket so the result is independent of any
    other run parameter (the spread-invariance property relies on this).
    """
    mu, sig = tl.mu_y, tl.sigma_y
    y_minus = invert_increasing(tl.phi_minus, 0.0, mu - 4.0 * sig, mu, xtol=1e-14 * sig)
    y_plus = invert_increasing(tl.phi_plus, 0.0, mu, mu + 4.0 * sig, xtol=1e-14 * sig)
    return y_minus, y_plus


def monopoly_schedule(
    tl: TypeLaw, gamma_c: float, gamma_d: float, n_grid
) -> MonopolyResult:
    """Optimal monopolist schedule sampled on ``n_grid`` (both signs, no 0)."""
    if not gamma_c > 0.0 or gamma_d < 0.0:
        raise ValueError("need gamma_c > 0 and gamma_d >= 0")
    n_grid = np.sort(np.asarray(n_grid, dtype=float))
    if np.any(n_grid == 0.0) or not (n_grid.min() < 0.0 < n_grid.max()):
        raise ValueError("n_grid must span both signs and exclude 0")

    y_minus, y_plus = spread_roots(tl)
    mu, sig = tl.mu_y, tl.sigma_y
    rate = gamma_d + gamma_c
    # Tabulate each increasing function over the y-range its queries can reach;
    # queries beyond a +-37 sigma cap mean the hazard has saturated and the
    # grid is truncated instead.
    y_cap = 37.0 * sig
    inv_minus = TabulatedIncreasing(
        tl.phi_minus, mu - 6.0 * sig, y_minus + 0.1 * sig,
        lo_bound=mu - y_cap, hi_bound=mu + y_cap, xtol=1e-13 * sig,
    )
    inv_plus = TabulatedIncreasing(
        tl.phi_plus, y_plus - 0.1 * sig, mu + 6.0 * sig,
        lo_bound=mu - y_cap, hi_bound=mu + y_cap, xtol=1e-13 * sig,
    )

    kept, marginals, truncated = [], [], False
    for n in n_grid:
        inv = inv_minus if n < 0.0 else inv_plus
        try:
            y_n = inv.inverse(rate * n)
        except Exception:
            truncated = True
            continue
        kept.append(n)
        marginals.append(y_n - gamma_c * n)
    kept = np.asarray(kept)
    if not ((kept < 0).any() and (kept > 0).any()):
        raise SolverError("monopoly grid entirely truncated; shrink n_grid")

    schedule = PriceSchedule.from_samples(kept, np.asarray(marginals), y_minus, y_plus)
    report = _convexity_report(tl, gamma_c, gamma_d, y_minus, y_plus)
    z_mon = None
    if tl.beta is not None:
        z_mon = z_mon_threshold(tl.beta, tl.gamma_c, tl.spec.mu_m, tl.sigma_y).z_mon
    return MonopolyResult(
        schedule=schedule,
        y_minus=y_minus,
        y_plus=y_plus,
        convex=report.convex,
        z_mon=z_mon,
        n_grid=kept,
        truncated=truncated,
        convexity=report,
    )


def _convexity_report(
    tl: TypeLaw, gamma_c: float, gamma_d: float, y_minus: float, y_plus: float,
    span: float = 8.0, points: int = 201,
) -> ConvexityReport:
    sig = tl.sigma_y
    grid_minus = np.linspace(y_minus - span * sig, y_minus, points)
    grid_plus = np.linspace(y_plus, y_plus + span * sig, points)
    lhs_minus = tl.hazard_minus_prime(grid_minus) - tl.g_prime(grid_minus)
    lhs_plus = -tl.hazard_plus_prime(grid_plus) - tl.g_prime(grid_plus)
    ratio = gamma_d / gamma_c
    margin_minus = ratio - float(np.max(lhs_minus))
    margin_plus = ratio - float(np.max(lhs_plus))
    convex = margin_minus >= -_CONVEXITY_TOL and margin_plus >= -_CONVEXITY_TOL
    return ConvexityReport(convex=convex, margin_minus=margin_minus, margin_plus=margin_plus)


def monopoly_convexity_check(
    tl: TypeLaw, gamma_c: float, gamma_d: float, result: MonopolyResult
) -> ConvexityReport:
    """Re-evaluate the hazard-slope convexity condition for a computed result."""
    return _convexity_report(tl, gamma_c, gamma_d, result.y_minus, result.y_plus)


def z_mon_threshold(
    beta: float, gamma_c: float, mu_m: float, sigma_y: float
) -> ZMonResult:
    """Gaussian convexity threshold for a risk-neutral monopolist.

    z_mon is the negative root of z^2 - (gamma_c|mu_M|/((1-beta) sigma_Y)) z - 1;
    the schedule is convex iff gamma_c^2 mu_M^2 / sigma_Y^2 < pi/2 and
    beta >= 1 + z_mon * Phi(z_mon)/phi(z_mon). With mu_M = 0 this is
    z_mon = -1 and beta >= 1 - Phi(-1)/phi(-1).
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    ratio = gamma_c * abs(mu_m) / sigma_y
    half = ratio / (2.0 * (1.0 - beta))
    z_mon = half - math.sqrt(half * half + 1.0)
    mean_ok = ratio * ratio < math.pi / 2.0
    margin = beta - (1.0 + z_mon * float(mills_ratio(z_mon)))
    return ZMonResult(
        z_mon=z_mon,
        passes=bool(mean_ok and margin >= -1e-12),
        margin=margin,
        mean_condition_ok=bool(mean_ok),
    )


def monopoly_profit(
    tl: TypeLaw, schedule: PriceSchedule, gamma_c: float, gamma_d: float
) -> float:
    """Expected penalized profit of an admissible (K=1) schedule.

    Evaluated in the trade-size domain:

        int_{-inf}^0 ((gamma_d+gamma_c) n - y(n)) F(y(n)) + H(y(n)) dn
      + int_0^inf   (y(n) - (gamma_d+gamma_c) n) Fbar(y(n)) - Hbar(y(n)) dn

    with y(n) = p(n) + gamma_c n, truncated where the F / Fbar weights fall
    below 1e-12. A non-decaying integrand signals an inadmissible schedule.
    """
    rate = gamma_d + gamma_c

    def y_of(n: float) -> float:
        return schedule.marginal(n) + gamma_c * n

    def integrand_neg(n: float) -> float:
        y = y_of(n)
        return (rate * n - y) * tl.F(y) + tl.H(y)

    def integrand_pos(n: float) -> float:
        y = y_of(n)
        return (y - rate * n) * tl.Fbar(y) - tl.Hbar(y)

    def cutoff(weight, start: float, direction: float) -> float:
        n, prev = start, math.inf
        for _ in range(200):
            w = weight(y_of(n))
            if w < _PROFIT_WEIGHT_CUTOFF:
                return n
            if w > prev * (1.0 + 1e-12):
                raise SolverError(
                    "profit integrand weight not decaying; schedule looks inadmissible"
                )
            prev = w
            n *= 2.0 if abs(n) < 1e12 else 1.0
            n = n if abs(n) < 1e12 else direction * 1e12
            if abs(n) >= 1e12:
                raise SolverError("profit integral fails to localize")
        return n

    sig_n = tl.sigma_y / gamma_c
    n_lo = cutoff(tl.F, -0.5 * sig_n, -1.0)
    n_hi = cutoff(tl.Fbar, 0.5 * sig_n, 1.0)
    neg, _ = quad(integrand_neg, n_lo, 0.0, epsabs=1e-11, epsrel=1e-10, limit=300)
    pos, _ = quad(integrand_pos, 0.0, n_hi, epsabs=1e-11, epsrel=1e-10, limit=300)
    return neg + pos
