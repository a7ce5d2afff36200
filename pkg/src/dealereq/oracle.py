"""Independent brute-force verification of candidate equilibria.

Nothing here trusts the solvers' root-finding paths. Client responses are
checked against exhaustive grid maximization of the raw objective; dealer
profits are evaluated through the trade-size-domain eta integrals and a plain
Monte Carlo estimator; Nash optimality is probed both pointwise (the eta
inequalities across every competitor position, including the spread interval
at zero) and globally against seeded families of admissible deviations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .client import PriceSchedule, check_admissible, check_compatible
from .errors import IncompatibleSchedules, OracleRangeError
from .typelaw import TypeLaw

_PROFIT_WEIGHT_CUTOFF = 1e-12


# ---------------------------------------------------------------------------
# eta functions: profit densities in the trade-size domain
# ---------------------------------------------------------------------------


class EtaFunctions:
    """Pointwise dealer-profit densities eta_-(n, x, z), eta_+(n, x, z).

    n is dealer 1's trade, x the common trade with each of the other K-1
    dealers, z dealer 1's marginal price. The pooled hazard argument is
    zeta = z + gamma_c n + gamma_c (K-1) x. Partial derivatives factor through
    the same A / B fields that drive the equilibrium ODE, which is what the
    pointwise optimality argument exploits.
    """

    def __init__(self, tl: TypeLaw, K: int, gamma_c: float, gamma_d: float):
        self.tl = tl
        self.K = K
        self.gamma_c = gamma_c
        self.gamma_d = gamma_d

    def zeta(self, n, x, z):
        return z + self.gamma_c * n + self.gamma_c * (self.K - 1) * x

    def eta_minus(self, n, x, z):
        zt = self.zeta(n, x, z)
        return (self.gamma_d * n - z) * self.tl.F(zt) + self.tl.H(zt)

    def eta_plus(self, n, x, z):
        zt = self.zeta(n, x, z)
        return -(self.gamma_d * n - z) * self.tl.Fbar(zt) - self.tl.Hbar(zt)

    def a_field(self, n, x, z):
        zt = self.zeta(n, x, z)
        return self.gamma_d * n - z + self.tl.g(zt)

    def b_minus_field(self, n, x, z):
        return self.tl.hazard_minus(self.zeta(n, x, z)) - self.a_field(n, x, z)

    def b_plus_field(self, n, x, z):
        return -self.tl.hazard_plus(self.zeta(n, x, z)) - self.a_field(n, x, z)

    def deta_minus_dx(self, n, x, z):
        zt = self.zeta(n, x, z)
        return (self.K - 1) * self.gamma_c * self.tl.f(zt) * self.a_field(n, x, z)

    def deta_minus_dz(self, n, x, z):
        zt = self.zeta(n, x, z)
        return -self.tl.f(zt) * self.b_minus_field(n, x, z)

    def deta_plus_dx(self, n, x, z):
        zt = self.zeta(n, x, z)
        return (self.K - 1) * self.gamma_c * self.tl.f(zt) * self.a_field(n, x, z)

    def deta_plus_dz(self, n, x, z):
        zt = self.zeta(n, x, z)
        return -self.tl.f(zt) * self.b_plus_field(n, x, z)


# ---------------------------------------------------------------------------
# Pointwise optimality across competitor positions
# ---------------------------------------------------------------------------


@dataclass
class PointwiseReport:
    passed: bool
    worst_margin: float
    worst_point: tuple
    case_counts: dict
    tol: float
    checks: int

    def __bool__(self) -> bool:
        return self.passed


def _case_label(n: float, x: float) -> str:
    if n < 0.0:
        if x <= n:
            return "x<=n"
        if x < 0.0:
            return "n<x<0"
        if x == 0.0:
            return "x=0"
        return "x>0"
    if x >= n:
        return "x>=n"
    if x > 0.0:
        return "0<x<n"
    if x == 0.0:
        return "x=0"
    return "x<0"


def pointwise_optimality_check(
    tl: TypeLaw,
    K: int,
    gamma_c: float,
    gamma_d: float,
    p_star: PriceSchedule,
    n_grid=None,
    x_grid=None,
    spread_samples: int = 7,
    tol: float = 1e-7,
) -> PointwiseReport:
    """Assert eta(n, n, p*(n)) >= eta(n, x, z(x)) across competitor positions.

    For each own-trade n the competitor point x ranges over both half-lines
    (z = p*(x)) plus x = 0, where z sweeps the whole spread interval.
    """
    eta = EtaFunctions(tl, K, gamma_c, gamma_d)
    sig_n = tl.sigma_y / (gamma_c * K)
    if n_grid is None:
        half = np.linspace(0.05 * sig_n, 2.0 * sig_n, 21)
        n_grid = np.concatenate([-half[::-1], half])
    else:
        n_grid = np.asarray(n_grid, dtype=float)
    if x_grid is None:
        half = np.geomspace(0.02 * sig_n, 3.0 * sig_n, 20)
        x_grid = np.concatenate([-half[::-1], half])
    else:
        x_grid = np.asarray(x_grid, dtype=float)
    x_grid = x_grid[x_grid != 0.0]
    spread_z = np.linspace(p_star.bid_limit, p_star.ask_limit, spread_samples)

    worst = math.inf
    worst_point = ()
    counts: dict = {}
    checks = 0
    for n in n_grid:
        n = float(n)
        eta_fn = eta.eta_minus if n < 0.0 else eta.eta_plus
        base = eta_fn(n, n, p_star.marginal(n))
        competitors = [(float(x), float(p_star.marginal(x))) for x in x_grid]
        competitors.extend((0.0, float(z)) for z in spread_z)
        for x, z in competitors:
            margin = base - eta_fn(n, x, z)
            checks += 1
            label = _case_label(n, x)
            counts[label] = counts.get(label, 0) + 1
            if margin < worst:
                worst = margin
                worst_point = (n, x, z)
    return PointwiseReport(
        passed=bool(worst >= -tol),
        worst_margin=float(worst),
        worst_point=worst_point,
        case_counts=counts,
        tol=tol,
        checks=checks,
    )


# ---------------------------------------------------------------------------
# Deviation profits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeviationSpec:
    """One perturbation of the candidate schedule's marginal prices.

    kinds: ``marginal_shift`` (p + amount), ``marginal_tilt`` (p + slope*n),
    ``bump`` (p + height * exp(-((n-center)/width)^2 / 2)).
    """

    kind: str
    amount: float = 0.0
    slope: float = 0.0
    center: float = 0.0
    width: float = 1.0
    height: float = 0.0

    def offset(self, n):
        if self.kind == "marginal_shift":
            return self.amount * np.ones_like(np.asarray(n, dtype=float))
        if self.kind == "marginal_tilt":
            return self.slope * np.asarray(n, dtype=float)
        if self.kind == "bump":
            u = (np.asarray(n, dtype=float) - self.center) / self.width
            return self.height * np.exp(-0.5 * u * u)
        raise ValueError(f"unknown deviation kind {self.kind!r}")


def build_deviation(p_star: PriceSchedule, dev: DeviationSpec) -> PriceSchedule:
    """Deviated schedule; inherits p_star's asymptote divergence."""

    def marginal(n: float) -> float:
        return float(p_star.marginal(n)) + float(dev.offset(n))

    at0 = float(dev.offset(0.0))
    return PriceSchedule.from_marginal(
        marginal,
        bid_limit=p_star.bid_limit + at0,
        ask_limit=p_star.ask_limit + at0,
        left_asymptote=p_star.left_asymptote
        + (dev.amount if dev.kind == "marginal_shift" else 0.0),
        right_asymptote=p_star.right_asymptote
        + (dev.amount if dev.kind == "marginal_shift" else 0.0),
    )


def random_deviations(
    p_star: PriceSchedule,
    K: int,
    gamma_c: float,
    count: int,
    seed: int,
    n_scale: float,
) -> list[DeviationSpec]:
    """Seed-pinned admissible deviation family, magnitudes 1-10% of the spread."""
    rng = np.random.default_rng(seed)
    spread = max(p_star.spread, 1e-6)
    probe = np.linspace(-2.0 * n_scale, 2.0 * n_scale, 41)
    probe = probe[probe != 0.0]
    min_slope = float(
        np.min(np.diff(p_star.marginal(probe)) / np.diff(probe))
    )
    kinds = ("marginal_shift", "marginal_tilt", "bump")
    out: list[DeviationSpec] = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        kind = kinds[len(out) % 3]
        mag = rng.uniform(0.01, 0.10) * spread * rng.choice([-1.0, 1.0])
        if kind == "marginal_shift":
            dev = DeviationSpec(kind=kind, amount=mag)
        elif kind == "marginal_tilt":
            slope = mag / (2.0 * n_scale)
            if slope <= -0.5 * min_slope:
                continue
            dev = DeviationSpec(kind=kind, slope=slope)
        else:
            width = rng.uniform(0.2, 0.6) * n_scale
            center = rng.uniform(-1.5, 1.5) * n_scale
            cap = 0.5 * min_slope * width * math.sqrt(math.e)
            height = math.copysign(min(abs(mag), cap), mag)
            dev = DeviationSpec(kind=kind, center=center, width=width, height=height)
        cand = build_deviation(p_star, dev)
        if check_admissible(cand, K, gamma_c).admissible:
            out.append(dev)
    if len(out) < count:
        raise OracleRangeError("could not draw enough admissible deviations")
    return out


def _gauss_legendre_panels(a: float, b: float, panels: int, order: int = 8):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    ns = (mids[:, None] + half[:, None] * nodes[None, :]).ravel()
    ws = (half[:, None] * weights[None, :]).ravel()
    return ns, ws


def _profit_window(tl: TypeLaw, K: int, gamma_c: float, p_star: PriceSchedule):
    """Trade range beyond which the F / Fbar profit weights underflow."""

    def weight_neg(n: float) -> float:
        return float(tl.F(p_star.marginal(n) + gamma_c * K * n))

    def weight_pos(n: float) -> float:
        return float(tl.Fbar(p_star.marginal(n) + gamma_c * K * n))

    sig_n = tl.sigma_y / (gamma_c * K)
    n_lo = -0.5 * sig_n
    while weight_neg(n_lo) > _PROFIT_WEIGHT_CUTOFF and n_lo > -1e6:
        n_lo *= 1.5
    n_hi = 0.5 * sig_n
    while weight_pos(n_hi) > _PROFIT_WEIGHT_CUTOFF and n_hi < 1e6:
        n_hi *= 1.5
    return n_lo, n_hi


def _profit_on_nodes(eta: EtaFunctions, p_star, p1, nodes_neg, w_neg, nodes_pos, w_pos):
    total = 0.0
    for n, w in zip(nodes_neg, w_neg):
        z = float(p1.marginal(n))
        x = p_star.inverse_marginal(z)
        total += w * float(eta.eta_minus(n, x, z))
    for n, w in zip(nodes_pos, w_pos):
        z = float(p1.marginal(n))
        x = p_star.inverse_marginal(z)
        total += w * float(eta.eta_plus(n, x, z))
    return total


def dealer_profit_deviation(
    tl: TypeLaw,
    K: int,
    gamma_c: float,
    gamma_d: float,
    p_star: PriceSchedule,
    dev: DeviationSpec,
    panels: int = 48,
) -> tuple[float, float]:
    """(J_base, J_dev): dealer 1's profit quoting p_star vs the deviation.

    Both values run through the identical quadrature and inversion path, so
    the identity deviation reproduces J_base bit for bit and discretization
    error cancels from the comparison.
    """
    p1 = build_deviation(p_star, dev)
    if not check_admissible(p1, K, gamma_c):
        raise ValueError(f"deviation {dev!r} is not admissible for K={K}")
    if not check_compatible([p1, p_star]):
        raise IncompatibleSchedules(f"deviation {dev!r} incompatible with the pool")
    eta = EtaFunctions(tl, K, gamma_c, gamma_d)
    n_lo, n_hi = _profit_window(tl, K, gamma_c, p_star)
    nodes_neg, w_neg = _gauss_legendre_panels(n_lo, 0.0, panels)
    nodes_pos, w_pos = _gauss_legendre_panels(0.0, n_hi, panels)
    j_base = _profit_on_nodes(eta, p_star, p_star, nodes_neg, w_neg, nodes_pos, w_pos)
    j_dev = _profit_on_nodes(eta, p_star, p1, nodes_neg, w_neg, nodes_pos, w_pos)
    return j_base, j_dev


@dataclass
class NashSuiteReport:
    passed: bool
    j_base: float
    worst_excess: float
    excesses: list
    deviations: list
    tol: float

    def __bool__(self) -> bool:
        return self.passed


def nash_deviation_suite(
    tl: TypeLaw,
    K: int,
    gamma_c: float,
    gamma_d: float,
    p_star: PriceSchedule,
    count: int = 20,
    seed: int = 20210726,
    tol: float = 1e-6,
) -> NashSuiteReport:
    """Seed-pinned unilateral-deviation sweep: every J_dev <= J_base + tol."""
    n_scale = tl.sigma_y / (gamma_c * K)
    devs = random_deviations(p_star, K, gamma_c, count, seed, n_scale)
    eta = EtaFunctions(tl, K, gamma_c, gamma_d)
    n_lo, n_hi = _profit_window(tl, K, gamma_c, p_star)
    nodes_neg, w_neg = _gauss_legendre_panels(n_lo, 0.0, 48)
    nodes_pos, w_pos = _gauss_legendre_panels(0.0, n_hi, 48)
    j_base = _profit_on_nodes(eta, p_star, p_star, nodes_neg, w_neg, nodes_pos, w_pos)
    excesses = []
    for dev in devs:
        p1 = build_deviation(p_star, dev)
        if not check_compatible([p1, p_star]):
            raise IncompatibleSchedules(f"drawn deviation {dev!r} is incompatible")
        j_dev = _profit_on_nodes(eta, p_star, p1, nodes_neg, w_neg, nodes_pos, w_pos)
        excesses.append(j_dev - j_base)
    worst = max(excesses)
    return NashSuiteReport(
        passed=bool(worst <= tol),
        j_base=j_base,
        worst_excess=float(worst),
        excesses=excesses,
        deviations=devs,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# Client grid search
# ---------------------------------------------------------------------------


def _signed_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Uniform grid of multiples of ``step`` covering [lo, hi]; contains 0."""
    i_lo = math.floor(lo / step)
    i_hi = math.ceil(hi / step)
    return step * np.arange(i_lo, i_hi + 1)


def _values_on_grid(P: PriceSchedule, grid: np.ndarray) -> np.ndarray:
    """P on the grid by trapezoid accumulation of the marginal.

    Oracle path, independent of the schedule's own antiderivative. When the
    grid does not contain 0 (refinement windows), values are anchored at the
    window edge instead; the per-axis constant offset cannot move an argmax.
    """
    marg = P.marginal(grid)
    zero = int(np.searchsorted(grid, 0.0))
    if zero >= len(grid) or grid[zero] != 0.0:
        inc = 0.5 * (marg[1:] + marg[:-1]) * np.diff(grid)
        return np.concatenate(([0.0], np.cumsum(inc)))
    marg_bid = np.where(grid < 0.0, marg, P.bid_limit)
    marg_ask = np.where(grid > 0.0, marg, P.ask_limit)
    out = np.zeros_like(grid)
    inc_pos = 0.5 * (marg_ask[zero:-1] + marg_ask[zero + 1 :]) * np.diff(grid[zero:])
    out[zero + 1 :] = np.cumsum(inc_pos)
    inc_neg = 0.5 * (marg_bid[:zero] + marg_bid[1 : zero + 1]) * np.diff(grid[: zero + 1])
    out[:zero] = -np.cumsum(inc_neg[::-1])[::-1]
    return out


def client_grid_oracle(
    P_list,
    gamma_c: float,
    y: float,
    n_range: tuple[float, float],
    step: float,
    coarse_step: float | None = None,
) -> np.ndarray:
    """Exhaustive argmax of the client objective over a trade grid.

    One schedule (or K identical ones) reduces to a scalar search; two
    distinct schedules use a full 2-d grid, coarse-then-refined when
    ``coarse_step`` is given. Boundary argmaxes raise: widen ``n_range``.
    """
    lo, hi = n_range
    if not lo < 0.0 < hi:
        raise ValueError("n_range must straddle 0")
    K = len(P_list)
    distinct = [P_list[0]]
    for P in P_list[1:]:
        if P is not distinct[0]:
            distinct.append(P)
    if len(distinct) == 1:
        # Symmetric reduction: maximize K * (y n - P(n) - K gamma_c n^2 / 2).
        P = P_list[0]
        grid = _signed_grid(lo, hi, step)
        vals = y * grid - _values_on_grid(P, grid) - 0.5 * K * gamma_c * grid**2
        i = int(np.argmax(vals))
        if i in (0, len(grid) - 1):
            raise OracleRangeError("argmax on the n_range boundary; widen it")
        return np.full(K, grid[i])
    if K != 2:
        raise OracleRangeError("full grid search supports K <= 2 distinct schedules")

    def argmax_2d(step_now: float, lo1, hi1, lo2, hi2):
        g1 = _signed_grid(lo1, hi1, step_now)
        g2 = _signed_grid(lo2, hi2, step_now)
        v1 = _values_on_grid(P_list[0], g1)
        v2 = _values_on_grid(P_list[1], g2)
        total = g1[:, None] + g2[None, :]
        obj = y * total - v1[:, None] - v2[None, :] - 0.5 * gamma_c * total**2
        i, j = np.unravel_index(int(np.argmax(obj)), obj.shape)
        return g1, g2, int(i), int(j)

    first = coarse_step if coarse_step is not None else step
    g1, g2, i, j = argmax_2d(first, lo, hi, lo, hi)
    if i in (0, len(g1) - 1) or j in (0, len(g2) - 1):
        raise OracleRangeError("argmax on the n_range boundary; widen it")
    if coarse_step is None:
        return np.array([g1[i], g2[j]])
    pad = 2.0 * first
    g1, g2, i, j = argmax_2d(step, g1[i] - pad, g1[i] + pad, g2[j] - pad, g2[j] + pad)
    return np.array([g1[i], g2[j]])


# ---------------------------------------------------------------------------
# Monte Carlo profit
# ---------------------------------------------------------------------------


def monte_carlo_profit(
    tl: TypeLaw,
    schedule: PriceSchedule,
    K: int,
    gamma_c: float,
    gamma_d: float,
    n_samples: int = 10**6,
    seed: int = 0,
    table_points: int = 4001,
) -> tuple[float, float]:
    """(mean, stderr) of a single dealer's profit under symmetric quoting.

    Simulates client types, maps them through a tabulated inverse of the
    symmetric first-order condition y = p(n) + K gamma_c n, and averages
    P(n) - g(Y) n - gamma_d n^2 / 2.
    """
    rng = np.random.default_rng(seed)
    ys = tl.sample(rng, n_samples)
    sig_n = tl.sigma_y / (gamma_c * K)
    reach = max(8.0 * sig_n, (np.abs(ys).max() / (gamma_c * K)) * 1.2)
    n_neg = np.linspace(-reach, 0.0, table_points)[:-1]
    n_pos = np.linspace(0.0, reach, table_points)[1:]
    y_neg = schedule.marginal(n_neg) + gamma_c * K * n_neg
    y_pos = schedule.marginal(n_pos) + gamma_c * K * n_pos
    y_table = np.concatenate([y_neg, [schedule.bid_limit, schedule.ask_limit], y_pos])
    n_table = np.concatenate([n_neg, [0.0, 0.0], n_pos])
    trades = np.interp(ys, y_table, n_table)
    profits = (
        schedule.value(trades)
        - np.asarray(tl.g(ys)) * trades
        - 0.5 * gamma_d * trades**2
    )
    mean = float(np.mean(profits))
    stderr = float(np.std(profits, ddof=1) / math.sqrt(n_samples))
    return mean, stderr
