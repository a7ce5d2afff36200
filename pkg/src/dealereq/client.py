"""Price schedules and the client's optimal order splitting.

A price schedule P gives the cash paid to buy n shares from one dealer; its
marginal price p = P' may jump at 0, producing a bid-ask spread. Facing K
identical admissible schedules, the client's per-dealer trade solves the
scalar first-order condition y = p(n) + K*gamma_c*n outside the spread and is
zero inside it. Facing heterogeneous but compatible schedules, the common
marginal level m* solves y = m + gamma_c * sum_k p_k^{-1}(m) and each dealer
receives n_k = p_k^{-1}(m*).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from ._roots import BracketError, expand_bracket, invert_increasing, solve_bracketed
from .errors import IncompatibleSchedules

_RESPONSE_XTOL = 1e-10  # root tolerance in trade-size units


class _SampledSide:
    """One half-line of a sampled marginal curve.

    Shape-preserving cubic through the nodes (a node at n=0 carries the one-
    sided limit), linear continuation with the edge slope beyond the last node.
    The antiderivative anchored at 0 provides P on this side.
    """

    def __init__(self, nodes: np.ndarray, values: np.ndarray):
        order = np.argsort(nodes)
        self.nodes = np.asarray(nodes, dtype=float)[order]
        self.values = np.asarray(values, dtype=float)[order]
        if len(self.nodes) < 2:
            raise ValueError("need at least two nodes per side")
        self._interp = PchipInterpolator(self.nodes, self.values, extrapolate=False)
        self._anti = self._interp.antiderivative()
        d = self._interp.derivative()
        self.slope_lo = max(float(d(self.nodes[0])), 0.0)
        self.slope_hi = max(float(d(self.nodes[-1])), 0.0)

    def marginal(self, n):
        n = np.asarray(n, dtype=float)
        lo, hi = self.nodes[0], self.nodes[-1]
        inside = self._interp(np.clip(n, lo, hi))
        below = self.values[0] + self.slope_lo * (n - lo)
        above = self.values[-1] + self.slope_hi * (n - hi)
        return np.where(n < lo, below, np.where(n > hi, above, inside))

    def value(self, n):
        """Integral of the marginal from the side's zero anchor."""
        n = np.asarray(n, dtype=float)
        lo, hi = self.nodes[0], self.nodes[-1]
        anchor = 0.0 if lo <= 0.0 <= hi else (lo if lo > 0.0 else hi)
        base = self._anti(np.clip(n, lo, hi)) - self._anti(anchor)
        d_lo = n - lo
        below = (
            self._anti(lo)
            - self._anti(anchor)
            + self.values[0] * d_lo
            + 0.5 * self.slope_lo * d_lo**2
        )
        d_hi = n - hi
        above = (
            self._anti(hi)
            - self._anti(anchor)
            + self.values[-1] * d_hi
            + 0.5 * self.slope_hi * d_hi**2
        )
        return np.where(n < lo, below, np.where(n > hi, above, base))

    def inverse(self, m: float) -> float:
        """Solve marginal(n) = m on this side; requires increasing values."""
        vals = self.values
        if m < vals[0]:
            if self.slope_lo <= 0.0:
                return -math.inf
            return self.nodes[0] + (m - vals[0]) / self.slope_lo
        if m > vals[-1]:
            if self.slope_hi <= 0.0:
                return math.inf
            return self.nodes[-1] + (m - vals[-1]) / self.slope_hi
        i = int(np.searchsorted(vals, m, side="right") - 1)
        i = min(max(i, 0), len(vals) - 2)
        return solve_bracketed(
            lambda x: float(self._interp(x)), m, self.nodes[i], self.nodes[i + 1],
            xtol=1e-13 * max(1.0, abs(self.nodes[-1])),
        )


class _CallableSide:
    def __init__(self, marginal_fn, value_fn=None):
        self._marginal = marginal_fn
        self._value = value_fn

    def marginal(self, n):
        n = np.asarray(n, dtype=float)
        if n.ndim == 0:
            return float(self._marginal(float(n)))
        return np.array([self._marginal(float(x)) for x in n])

    def value(self, n):
        n = np.asarray(n, dtype=float)
        if self._value is not None:
            return self._value(n)
        if n.ndim == 0:
            return quad(self._marginal, 0.0, float(n), limit=200)[0]
        return np.array([quad(self._marginal, 0.0, float(x), limit=200)[0] for x in n])

    def inverse(self, m: float, side: int) -> float:
        # side: -1 for the negative half-line, +1 for the positive one.
        lo_bound, hi_bound = (-math.inf, -1e-300) if side < 0 else (1e-300, math.inf)
        guess = -1.0 if side < 0 else 1.0
        return invert_increasing(
            self._marginal, m, min(guess, -1e-6) if side < 0 else 1e-6,
            max(guess, -1e-6) if side < 0 else max(guess, 1e-6),
            lo_bound=lo_bound, hi_bound=hi_bound, xtol=_RESPONSE_XTOL,
        )


class PriceSchedule:
    """Marginal-price curve p = P' on R minus {0}, with limits p(0-), p(0+).

    ``bid_limit <= ask_limit`` is the (possibly zero) spread. The asymptotes
    lim p(n) as n -> -inf / +inf decide compatibility of heterogeneous quotes.
    """

    def __init__(
        self,
        neg,
        pos,
        bid_limit: float,
        ask_limit: float,
        left_asymptote: float,
        right_asymptote: float,
    ):
        self._neg = neg
        self._pos = pos
        self.bid_limit = float(bid_limit)
        self.ask_limit = float(ask_limit)
        self.left_asymptote = float(left_asymptote)
        self.right_asymptote = float(right_asymptote)

    # -- constructors ---------------------------------------------------------
    @classmethod
    def from_samples(cls, n, p, bid_limit: float, ask_limit: float) -> "PriceSchedule":
        """Monotone-cubic schedule through marginal samples on both sides of 0.

        The 0-limits are appended as boundary nodes of their sides, so the
        interpolants honor the quoted spread exactly.
        """
        n = np.asarray(n, dtype=float)
        p = np.asarray(p, dtype=float)
        if np.any(n == 0.0):
            raise ValueError("sample grid must exclude 0")
        neg_mask, pos_mask = n < 0.0, n > 0.0
        if not (neg_mask.any() and pos_mask.any()):
            raise ValueError("sample grid must span both signs")
        neg = _SampledSide(
            np.append(n[neg_mask], 0.0), np.append(p[neg_mask], bid_limit)
        )
        pos = _SampledSide(
            np.append(n[pos_mask], 0.0), np.append(p[pos_mask], ask_limit)
        )
        left = -math.inf if neg.slope_lo > 0.0 else float(p[neg_mask].min())
        right = math.inf if pos.slope_hi > 0.0 else float(p[pos_mask].max())
        return cls(neg, pos, bid_limit, ask_limit, left, right)

    @classmethod
    def from_marginal(
        cls,
        marginal_fn,
        bid_limit: float,
        ask_limit: float,
        left_asymptote: float = -math.inf,
        right_asymptote: float = math.inf,
        value_fn=None,
    ) -> "PriceSchedule":
        side = _CallableSide(marginal_fn, value_fn)
        return cls(side, side, bid_limit, ask_limit, left_asymptote, right_asymptote)

    # -- evaluation -----------------------------------------------------------
    @property
    def spread(self) -> float:
        return self.ask_limit - self.bid_limit

    def marginal(self, n):
        n_arr = np.asarray(n, dtype=float)
        if n_arr.ndim == 0:
            x = float(n_arr)
            if x == 0.0:
                return math.nan
            side = self._neg if x < 0.0 else self._pos
            return float(side.marginal(n_arr))
        out = np.full(n_arr.shape, math.nan)
        neg, pos = n_arr < 0.0, n_arr > 0.0
        if neg.any():
            out[neg] = self._neg.marginal(n_arr[neg])
        if pos.any():
            out[pos] = self._pos.marginal(n_arr[pos])
        return out

    def value(self, n):
        """P(n) = int_0^n p, with P(0) = 0."""
        n_arr = np.asarray(n, dtype=float)
        if n_arr.ndim == 0:
            x = float(n_arr)
            if x == 0.0:
                return 0.0
            side = self._neg if x < 0.0 else self._pos
            return float(side.value(n_arr))
        out = np.zeros(n_arr.shape)
        neg, pos = n_arr < 0.0, n_arr > 0.0
        if neg.any():
            out[neg] = self._neg.value(n_arr[neg])
        if pos.any():
            out[pos] = self._pos.value(n_arr[pos])
        return out

    def inverse_marginal(self, m: float) -> float:
        """p^{-1}(m) with the spread convention: 0 on [p(0-), p(0+)]."""
        m = float(m)
        if self.bid_limit <= m <= self.ask_limit:
            return 0.0
        if m < self.bid_limit:
            if self._neg is self._pos:
                return self._neg.inverse(m, side=-1)
            return self._neg.inverse(m)
        if self._neg is self._pos:
            return self._pos.inverse(m, side=+1)
        return self._pos.inverse(m)


def quadratic_schedule(slope: float, half_spread: float = 0.0) -> PriceSchedule:
    """Synthetic fixture: p(n) = slope*n + sign(n)*half_spread."""

    def marg(n):
        return slope * n + math.copysign(half_spread, n)

    def val(n):
        n = np.asarray(n, dtype=float)
        return 0.5 * slope * n**2 + half_spread * np.abs(n)

    return PriceSchedule.from_marginal(
        marg, -half_spread, half_spread, -math.inf, math.inf, value_fn=val
    )


# ---------------------------------------------------------------------------
# Client objective and schedule checks
# ---------------------------------------------------------------------------


def eval_client_objective(P_list, gamma_c: float, y: float, n_list) -> float:
    """Normalized client payoff y*sum(n) - sum P_k(n_k) - gamma_c/2*(sum n)^2."""
    if len(P_list) != len(n_list) or not P_list:
        raise ValueError("need one trade size per schedule")
    total = float(np.sum(n_list))
    payments = sum(float(P.value(float(nk))) for P, nk in zip(P_list, n_list))
    return y * total - payments - 0.5 * gamma_c * total**2


@dataclass
class AdmissibilityReport:
    admissible: bool
    k: int
    violations: list = field(default_factory=list)
    min_increment: float = math.inf

    def __bool__(self) -> bool:
        return self.admissible


def _default_check_grid(P: PriceSchedule) -> np.ndarray:
    pts = np.concatenate(
        [
            -np.geomspace(1e-3, 50.0, 120)[::-1],
            np.geomspace(1e-3, 50.0, 120),
        ]
    )
    if isinstance(P._neg, _SampledSide):
        pts = np.union1d(pts, P._neg.nodes[P._neg.nodes < 0.0])
    if isinstance(P._pos, _SampledSide):
        pts = np.union1d(pts, P._pos.nodes[P._pos.nodes > 0.0])
    return pts[pts != 0.0]


def check_admissible(
    P: PriceSchedule, K: int, gamma_c: float, n_grid=None
) -> AdmissibilityReport:
    """Does the client's problem have a unique maximizer for every type?

    K >= 2: equivalent to a strictly convex schedule, i.e. p strictly
    increasing on each half-line and across the 0-gap. K = 1: the weaker
    requirement that n -> gamma_c*n + p(n) is strictly increasing and diverges
    at +-infinity; concave quotes can pass this.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    grid = np.asarray(n_grid, dtype=float) if n_grid is not None else _default_check_grid(P)
    grid = np.sort(grid[grid != 0.0])
    neg = grid[grid < 0.0]
    pos = grid[grid > 0.0]
    violations: list = []

    def curve(n):
        return P.marginal(n) + (gamma_c * n if K == 1 else 0.0)

    min_inc = math.inf
    for side in (neg, pos):
        if len(side) < 2:
            continue
        vals = curve(side)
        incs = np.diff(vals)
        min_inc = min(min_inc, float(incs.min()))
        bad = np.where(incs <= 0.0)[0]
        for i in bad:
            violations.append(("non-increasing", float(side[i]), float(side[i + 1])))
    gap_lo = P.bid_limit + (gamma_c * 0.0 if K == 1 else 0.0)
    gap_hi = P.ask_limit
    if gap_lo > gap_hi + 1e-14:
        violations.append(("negative spread", P.bid_limit, P.ask_limit))
    if len(neg) and curve(np.array([neg[-1]]))[0] > P.bid_limit:
        violations.append(("jump down into 0-", float(neg[-1]), 0.0))
    if len(pos) and curve(np.array([pos[0]]))[0] < P.ask_limit:
        violations.append(("jump down out of 0+", 0.0, float(pos[0])))

    if K == 1 and not violations:
        # Divergence of gamma_c*n + p(n): the outer secant slope must stay
        # positive; a bounded marginal passes automatically thanks to the
        # gamma_c*n term.
        for side, label in ((neg, "left"), (pos, "right")):
            if len(side) < 2:
                continue
            outer = side[: max(2, len(side) // 4)] if label == "left" else side[-max(2, len(side) // 4):]
            vals = curve(outer)
            slope = (vals[-1] - vals[0]) / (outer[-1] - outer[0])
            if slope <= 1e-10:
                violations.append((f"no divergence on the {label}", float(outer[0]), float(outer[-1])))

    return AdmissibilityReport(
        admissible=not violations, k=K, violations=violations, min_increment=min_inc
    )


@dataclass
class CompatibilityReport:
    compatible: bool
    l_bar: float
    r_bar: float

    def __bool__(self) -> bool:
        return self.compatible


def check_compatible(P_list) -> CompatibilityReport:
    """Heterogeneous quotes are jointly solvable iff max_k l_k < min_k r_k.

    Equality of the asymptote envelopes counts as incompatible (there is then
    no type for which every dealer's first-order condition can hold).
    """
    if not P_list:
        raise ValueError("need at least one schedule")
    l_bar = max(P.left_asymptote for P in P_list)
    r_bar = min(P.right_asymptote for P in P_list)
    return CompatibilityReport(compatible=bool(l_bar < r_bar), l_bar=l_bar, r_bar=r_bar)


# ---------------------------------------------------------------------------
# Optimal responses
# ---------------------------------------------------------------------------


@dataclass
class ClientResponse:
    """Per-dealer optimal trade size as a function of the effective type.

    ``a`` and ``b`` are the edges of the no-trade interval in type units;
    n(y) is zero exactly on [a, b], increasing outside.
    """

    schedule: PriceSchedule
    K: int
    gamma_c: float
    a: float
    b: float
    saturated: bool = False

    def _foc(self, n: float) -> float:
        return self.schedule.marginal(n) + self.K * self.gamma_c * n

    def trade_size(self, y: float) -> float:
        y = float(y)
        if self.a <= y <= self.b:
            return 0.0
        kg = self.K * self.gamma_c
        if y > self.b:
            guess = (y - self.b) / kg
            return invert_increasing(
                self._foc, y, 1e-12, max(guess, 1e-6),
                lo_bound=1e-300, xtol=_RESPONSE_XTOL,
            )
        guess = (y - self.a) / kg
        return invert_increasing(
            self._foc, y, min(guess, -1e-6), -1e-12,
            hi_bound=-1e-300, xtol=_RESPONSE_XTOL,
        )

    def trade_sizes(self, ys) -> np.ndarray:
        return np.array([self.trade_size(float(y)) for y in np.asarray(ys, dtype=float)])


def symmetric_response(P: PriceSchedule, K: int, gamma_c: float) -> ClientResponse:
    """Client response when all K dealers quote P (assumed admissible for K)."""
    if not gamma_c > 0.0:
        raise ValueError("gamma_c must be positive")
    return ClientResponse(
        schedule=P, K=K, gamma_c=gamma_c, a=P.bid_limit, b=P.ask_limit
    )


def heterogeneous_response(P_list, gamma_c: float, y: float) -> list:
    """Per-dealer trades against distinct compatible quotes.

    Finds the common marginal level m* with y = m + gamma_c*sum_k p_k^{-1}(m)
    by monotone root finding on the open envelope (l_bar, r_bar), then maps it
    through each inverse marginal (0 inside a dealer's spread).
    """
    comp = check_compatible(P_list)
    if not comp:
        raise IncompatibleSchedules(
            f"asymptote envelopes do not overlap: l_bar={comp.l_bar!r} >= r_bar={comp.r_bar!r}"
        )

    def psi(m: float) -> float:
        return m + gamma_c * sum(P.inverse_marginal(m) for P in P_list)

    scale = max(1.0, abs(y), *(abs(P.bid_limit) + abs(P.ask_limit) for P in P_list))
    for b in (comp.l_bar, comp.r_bar):
        if math.isfinite(b):
            scale = max(scale, abs(b))
    # Stay strictly inside the open envelope: psi diverges at finite edges.
    edge = 1e-12 * scale
    lo_bound = comp.l_bar + edge if math.isfinite(comp.l_bar) else -math.inf
    hi_bound = comp.r_bar - edge if math.isfinite(comp.r_bar) else math.inf
    g0 = min(max(y, lo_bound if math.isfinite(lo_bound) else y), hi_bound if math.isfinite(hi_bound) else y)
    try:
        lo, hi = expand_bracket(
            psi, y, g0 - 0.1 * scale if g0 - 0.1 * scale > lo_bound else lo_bound,
            g0 + 0.1 * scale if g0 + 0.1 * scale < hi_bound else hi_bound,
            lo_bound=lo_bound, hi_bound=hi_bound,
        )
        m_star = solve_bracketed(psi, y, lo, hi, xtol=1e-12 * scale)
    except BracketError:
        # Type beyond the achievable envelope: the trade is capped at the edge
        # (only possible when every asymptote on that side is finite).
        m_star = hi_bound if psi(hi_bound) < y else lo_bound
        warnings.warn("type beyond the quote envelope; trades capped", RuntimeWarning)
    return [P.inverse_marginal(m_star) for P in P_list]
