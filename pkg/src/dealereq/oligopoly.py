"""Symmetric K-dealer Nash equilibrium via a sandwiched ODE solve.

Equilibrium marginal prices p = P' solve, on each half-line,

    p'(n) = (K-1) * gamma_c * A(n, p(n)) / B(n, p(n)),

where A(n, z) = (gamma_d + K*gamma_c) n - (id - g)(z + gamma_c K n) and the
denominator is B_minus = F/f(zeta) - A on n < 0, B_plus = -Fbar/f(zeta) - A on
n > 0. There is no boundary condition; instead the curves that zero A and B
bracket the unique increasing solution:

* on (-inf, 0): lower v = (id + F/f - g)^{-1}((gamma_d+K gamma_c) n) - K gamma_c n,
  upper w = (id - g)^{-1}(...) - K gamma_c n;
* on (0, inf): the roles swap, with (id - Fbar/f - g)^{-1} for the B-root.

Mixing the raw envelopes by eps_v, eps_w (from explicit linear/quadratic
equations in the empirical bounds delta <= 1 - g' <= C_g and
delta <= 1 +- hazard' - g' <= C_f) gives strict super/sub solutions. Starting
one trajectory on each and integrating toward 0 contracts them together; the
equilibrium is reported as their midpoint with the terminal gap as the
certified error bar.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from ._roots import BracketError, TabulatedIncreasing, invert_increasing
from .client import PriceSchedule
from .errors import SandwichViolation, SolverError
from .typelaw import GaussianTypeLaw, TypeLaw, mills_ratio

_DEN_FLOOR = 1e-12
_F_OLI_TOL = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    """Sandwich-solve controls.

    ``n_minus``/``n_plus`` default to -+5 sigma_Y / (gamma_c K): trades happen
    at the scale of type dispersion over price impact. ``tol`` is the absolute
    local error budget per integrator step, ``step`` the maximum step size.
    """

    n_minus: float | None = None
    n_plus: float | None = None
    step: float = 0.01
    tol: float = 1e-9
    grid_points: int = 401
    competitive_envelope: bool = False
    containment_slack: float = 1e-6


class Envelopes:
    """Raw lower/upper solution curves of the equilibrium ODE.

    ``lower``/``upper`` follow the pointwise order: on n <= 0 the lower curve
    zeroes the denominator B_minus and the upper zeroes the numerator A; on
    n >= 0 the numerator root is the lower curve and the B_plus root the upper.
    """

    def __init__(self, tl: TypeLaw, K: int, gamma_c: float, gamma_d: float):
        if K < 2:
            raise ValueError("oligopoly envelopes need K >= 2")
        self.tl = tl
        self.K = K
        self.gamma_c = gamma_c
        self.gamma_d = gamma_d
        self.rate = gamma_d + K * gamma_c
        self.kg = K * gamma_c
        mu, sig = tl.mu_y, tl.sigma_y
        cap = 37.0 * sig
        self._inv_phi_minus = TabulatedIncreasing(
            tl.phi_minus, mu - 6.0 * sig, mu + 0.5 * sig,
            lo_bound=mu - cap, hi_bound=mu + cap, xtol=1e-13 * sig,
        )
        self._inv_phi_plus = TabulatedIncreasing(
            tl.phi_plus, mu - 0.5 * sig, mu + 6.0 * sig,
            lo_bound=mu - cap, hi_bound=mu + cap, xtol=1e-13 * sig,
        )
        self._inv_idg = TabulatedIncreasing(
            tl.id_minus_g, mu - 6.0 * sig, mu + 6.0 * sig, xtol=1e-13 * sig,
        )
        self.y_zero = self._inv_idg(0.0)  # (id - g)^{-1}(0), the corridor pivot

    def lower(self, n: float, negative_side: bool | None = None) -> float:
        if negative_side is None:
            negative_side = n <= 0.0
        t = self.rate * n
        if negative_side:
            return self._inv_phi_minus(t) - self.kg * n
        return self._inv_idg(t) - self.kg * n

    def upper(self, n: float, negative_side: bool | None = None) -> float:
        if negative_side is None:
            negative_side = n <= 0.0
        t = self.rate * n
        if negative_side:
            return self._inv_idg(t) - self.kg * n
        return self._inv_phi_plus(t) - self.kg * n


def envelopes(tl: TypeLaw, K: int, gamma_c: float, gamma_d: float, n: float):
    """(v, w) = (lower, upper) raw envelope values at trade size n."""
    env = Envelopes(tl, K, gamma_c, gamma_d)
    return env.lower(n), env.upper(n)


@dataclass(frozen=True)
class OdeCoefficients:
    """Numerator/denominator fields of the equilibrium ODE plus the empirical
    slope bounds delta, C_g, C_f that size the envelope mixing weights."""

    tl: TypeLaw
    K: int
    gamma_c: float
    gamma_d: float
    delta: float
    c_g: float
    c_f: float

    def zeta(self, n: float, z: float) -> float:
        return z + self.gamma_c * self.K * n

    def A(self, n: float, z: float) -> float:
        zt = self.zeta(n, z)
        return (self.gamma_d + self.K * self.gamma_c) * n - (zt - self.tl.g(zt))

    def B_minus(self, n: float, z: float) -> float:
        return float(self.tl.hazard_minus(self.zeta(n, z))) - self.A(n, z)

    def B_plus(self, n: float, z: float) -> float:
        return -float(self.tl.hazard_plus(self.zeta(n, z))) - self.A(n, z)


def estimate_coefficients(
    tl: TypeLaw,
    K: int,
    gamma_c: float,
    gamma_d: float,
    y_window_neg: tuple[float, float],
    y_window_pos: tuple[float, float],
    points: int = 2001,
) -> OdeCoefficients:
    """Sweep slope bounds over the corridor-relevant hazard-argument windows.

    Gaussian laws have 1 - g' = 1 - beta exactly, so delta and C_g are taken
    analytically there; hazard-slope bounds always come from the sweep.
    """
    ys_neg = np.linspace(*y_window_neg, points)
    ys_pos = np.linspace(*y_window_pos, points)
    b_minus_slope = 1.0 + tl.hazard_minus_prime(ys_neg) - tl.g_prime(ys_neg)
    b_plus_slope = 1.0 - tl.hazard_plus_prime(ys_pos) - tl.g_prime(ys_pos)
    if isinstance(tl, GaussianTypeLaw):
        one_minus_gp_min = one_minus_gp_max = 1.0 - tl.beta
    else:
        gp = tl.g_prime(np.concatenate([ys_neg, ys_pos]))
        one_minus_gp_min = float(np.min(1.0 - gp))
        one_minus_gp_max = float(np.max(1.0 - gp))
    delta = min(one_minus_gp_min, float(np.min(b_minus_slope)), float(np.min(b_plus_slope)))
    c_g = one_minus_gp_max
    c_f = max(float(np.max(b_minus_slope)), float(np.max(b_plus_slope)))
    if not (delta > 0.0 and math.isfinite(c_f)):
        raise SolverError(
            f"coefficient bounds degenerate: delta={delta!r}, c_f={c_f!r}"
        )
    return OdeCoefficients(
        tl=tl, K=K, gamma_c=gamma_c, gamma_d=gamma_d,
        delta=delta, c_g=c_g, c_f=c_f,
    )


def ode_rhs(coef: OdeCoefficients, n: float, z: float) -> float:
    """Right-hand side of the equilibrium ODE at (n, z); n = 0 is excluded."""
    if n == 0.0:
        raise ValueError("rhs undefined at n = 0; use the one-sided variants")
    if n < 0.0:
        return _rhs_side(coef, n, z, negative_side=True)
    return _rhs_side(coef, n, z, negative_side=False)


def _rhs_side(coef: OdeCoefficients, n: float, z: float, negative_side: bool) -> float:
    num = coef.A(n, z)
    den = coef.B_minus(n, z) if negative_side else coef.B_plus(n, z)
    if abs(den) < _DEN_FLOOR:
        raise SandwichViolation(
            f"ODE denominator vanished at n={n!r}, z={z!r}: left the corridor"
        )
    return (coef.K - 1) * coef.gamma_c * num / den


def choose_epsilons(coef: OdeCoefficients) -> tuple[float, float]:
    """Mixing weights making the blended envelopes strict super/sub solutions.

    eps_v solves the (linear) equation obtained by zeroing the sub-solution
    slope estimate; eps_w is the root in (0, 1) of the quadratic from the
    super-solution estimate. Their sum is below 1 whenever the slope bounds
    admit a sandwich at all.
    """
    K, gc, gd = coef.K, coef.gamma_c, coef.gamma_d
    d, cg, cf = coef.delta, coef.c_g, coef.c_f
    kg = K * gc
    rate = gd + kg
    if not cg < rate / kg:
        raise SolverError(
            f"C_g={cg!r} >= (gamma_d + K gamma_c)/(K gamma_c)={rate / kg!r}: "
            "envelope slopes cannot bracket the solution"
        )
    excess = rate / d - kg  # largest envelope slope surplus over -K gamma_c n
    eps_v = (K - 1) * gc * d / (cf * excess + (K - 1) * gc * d)

    ag, af = rate / cg, rate / cf
    qa = d * (ag - af)
    qb = -2.0 * d * ag + d * af + d * kg - (K - 1) * gc * cg
    qc = d * (ag - kg)
    if abs(qa) < 1e-14 * max(abs(qb), abs(qc), 1.0):
        roots = [-qc / qb] if qb != 0.0 else []
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0:
            raise SolverError("no real mixing weight for the upper envelope")
        sq = math.sqrt(disc)
        roots = [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)]
    inside = [r for r in roots if 0.0 < r < 1.0]
    if len(inside) != 1:
        raise SolverError(
            f"upper-envelope mixing quadratic has roots {roots!r}; "
            "slope bounds violate the sandwich conditions"
        )
    eps_w = inside[0]
    if not (0.0 < eps_v < 1.0 and eps_v + eps_w < 1.0):
        raise SolverError(
            f"mixing weights eps_v={eps_v!r}, eps_w={eps_w!r} do not leave a corridor"
        )
    return eps_v, eps_w


# ---------------------------------------------------------------------------
# Adaptive Runge-Kutta with corridor-aware step rejection (Cash-Karp 4(5)).
# ---------------------------------------------------------------------------

_CK_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0),
    (-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0),
    (1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0, 253.0 / 4096.0),
)
_CK_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0)
_CK_B5 = (37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0)
_CK_B4 = (2825.0 / 27648.0, 0.0, 18575.0 / 48384.0, 13525.0 / 55296.0, 277.0 / 14336.0, 1.0 / 4.0)


@dataclass
class Trajectory:
    """One accepted ODE run: nodes ascending in n with exact slopes."""

    ns: np.ndarray
    zs: np.ndarray
    dzs: np.ndarray
    rejected_steps: int = 0
    spline: CubicHermiteSpline | None = None

    def build_spline(self) -> None:
        self.spline = CubicHermiteSpline(self.ns, self.zs, self.dzs)

    def __call__(self, n):
        return self.spline(n)


def _integrate(
    rhs, n0: float, n1: float, z0: float, corridor_lo, corridor_hi,
    tol: float, max_step: float, slack: float,
) -> Trajectory:
    direction = 1.0 if n1 > n0 else -1.0
    span = abs(n1 - n0)
    min_step = 1e-11 * span
    h = min(max_step, span / 16.0)
    n, z = n0, z0
    d = rhs(n, z)
    ns, zs, ds = [n], [z], [d]
    rejected = 0
    guard = 0
    while (n1 - n) * direction > 1e-15 * span:
        guard += 1
        if guard > 2_000_000:
            raise SolverError("integrator failed to terminate")
        h = min(h, abs(n1 - n))
        step = direction * h
        try:
            k = [d]
            for i in range(1, 6):
                zi = z + step * sum(a * kk for a, kk in zip(_CK_A[i], k))
                k.append(rhs(n + _CK_C[i] * step, zi))
            z5 = z + step * sum(b * kk for b, kk in zip(_CK_B5, k))
            z4 = z + step * sum(b * kk for b, kk in zip(_CK_B4, k))
            err = abs(z5 - z4)
            blown = not math.isfinite(z5)
        except SandwichViolation:
            err, z5, blown = math.inf, math.nan, True
        n_new = n + step
        ok = (not blown) and err <= tol
        if ok:
            lo = corridor_lo(n_new) - slack
            hi = corridor_hi(n_new) + slack
            if not lo <= z5 <= hi:
                ok = False
                blown = True  # corridor exit: halve rather than error-rescale
        if not ok:
            rejected += 1
            h = 0.5 * h if blown else h * max(0.2, 0.9 * (tol / err) ** 0.2)
            if h < min_step:
                raise SolverError(
                    f"persistent corridor exit near n={n!r}; widen the window "
                    "or loosen the tolerance"
                )
            continue
        n, z = n_new, z5
        d = rhs(n, z)
        ns.append(n)
        zs.append(z)
        ds.append(d)
        if err > 0.0:
            h = min(max_step, h * min(5.0, 0.9 * (tol / err) ** 0.2))
        else:
            h = min(max_step, 5.0 * h)
    ns, zs, ds = np.array(ns), np.array(zs), np.array(ds)
    if direction < 0:
        ns, zs, ds = ns[::-1], zs[::-1], ds[::-1]
    traj = Trajectory(ns=ns, zs=zs, dzs=ds, rejected_steps=rejected)
    traj.build_spline()
    return traj


@dataclass
class _Side:
    ns: np.ndarray
    lower_env: np.ndarray
    upper_env: np.ndarray
    lower_mix: np.ndarray
    upper_mix: np.ndarray
    lo_run: Trajectory | None = None
    hi_run: Trajectory | None = None

    def __post_init__(self):
        self.lower_spline = PchipInterpolator(self.ns, self.lower_env)
        self.upper_spline = PchipInterpolator(self.ns, self.upper_env)
        self.lower_mix_spline = PchipInterpolator(self.ns, self.lower_mix)
        self.upper_mix_spline = PchipInterpolator(self.ns, self.upper_mix)


@dataclass
class SandwichSolution:
    """Equilibrium marginal prices with their certified sandwich."""

    p_star: PriceSchedule
    eps_v: float
    eps_w: float
    gap_at_zero: float
    gap_at_zero_neg: float
    gap_at_zero_pos: float
    n_minus: float
    n_plus: float
    K: int
    gamma_c: float
    gamma_d: float
    tl: TypeLaw
    coefficients: OdeCoefficients
    envelopes: Envelopes
    config: SolverConfig
    containment_ok: bool
    containment_worst: float
    sides: dict = field(default_factory=dict)
    clamped_at_zero: bool = False

    @property
    def spread(self) -> float:
        return self.p_star.ask_limit - self.p_star.bid_limit

    def _side(self, n: float) -> _Side:
        return self.sides["neg"] if n <= 0.0 else self.sides["pos"]

    def v(self, n: float) -> float:
        return float(self._side(n).lower_spline(n))

    def w(self, n: float) -> float:
        return float(self._side(n).upper_spline(n))

    def v_eps(self, n: float) -> float:
        return float(self._side(n).lower_mix_spline(n))

    def w_eps(self, n: float) -> float:
        return float(self._side(n).upper_mix_spline(n))

    def ode_residuals(self) -> np.ndarray:
        """|dense-output slope - rhs| at accepted-step midpoints.

        The stored node slopes are rhs evaluations, so node residuals vanish
        by construction; the midpoint values measure how faithfully the cubic
        dense output tracks the ODE between nodes.
        """
        out = []
        for key, side in self.sides.items():
            negative = key == "neg"
            for run in (side.lo_run, side.hi_run):
                ns = run.ns
                mids = 0.5 * (ns[1:] + ns[:-1])
                mids = mids[mids != 0.0]
                slopes = run.spline.derivative()(mids)
                for m, s in zip(mids, slopes):
                    r = _rhs_side(self.coefficients, float(m), float(run(m)), negative)
                    out.append(abs(float(s) - r))
        return np.asarray(out)


def competitive_upper_solution(
    tl: TypeLaw, K: int, gamma_c: float, n: float, side: str | None = None
) -> float:
    """Competitive (zero-profit) marginal price curve u(n), Gaussian types only.

    u solves h_-(y) = gamma_c K n on the bid side and h_+ on the ask side,
    with h_-+(y) = +-beta sigma_Y (f/F or f/Fbar)(y) + y - mu_Y - gamma_c mu_M.
    On (-inf, 0) it is an upper solution of the equilibrium ODE (for
    gamma_d = 0) and tightens the sandwich; mirrored on (0, inf).
    """
    if tl.beta is None:
        raise ValueError("competitive schedule is only available for Gaussian types")
    if side is None:
        if n == 0.0:
            raise ValueError("n = 0 needs an explicit side ('bid' or 'ask')")
        side = "bid" if n < 0.0 else "ask"
    mu, sig, beta = tl.mu_y, tl.sigma_y, tl.beta
    shift = mu + gamma_c * tl.spec.mu_m

    if side == "bid":
        def h(y: float) -> float:
            z = (y - mu) / sig
            return beta * sig / float(mills_ratio(z)) + y - shift
    else:
        def h(y: float) -> float:
            z = (y - mu) / sig
            return -beta * sig / float(mills_ratio(-z)) + y - shift

    target = gamma_c * K * n
    lo, hi = mu - 4.0 * sig, mu + 4.0 * sig
    y = invert_increasing(h, target, lo, hi, lo_bound=mu - 37.0 * sig,
                          hi_bound=mu + 37.0 * sig, xtol=1e-13 * sig)
    return y - gamma_c * K * n


def solve_equilibrium_ode(
    tl: TypeLaw, K: int, gamma_c: float, gamma_d: float,
    cfg: SolverConfig | None = None,
) -> SandwichSolution:
    """Solve the symmetric equilibrium ODE between its sandwich envelopes."""
    if K < 2:
        raise ValueError("oligopoly solve needs K >= 2")
    if not gamma_c > 0.0 or gamma_d < 0.0:
        raise ValueError("need gamma_c > 0 and gamma_d >= 0")
    cfg = cfg or SolverConfig()
    sig = tl.sigma_y
    default_half = 5.0 * sig / (gamma_c * K)
    n_m = cfg.n_minus if cfg.n_minus is not None else -default_half
    n_p = cfg.n_plus if cfg.n_plus is not None else default_half
    if not (n_m < 0.0 < n_p):
        raise ValueError("window must satisfy n_minus < 0 < n_plus")

    env = Envelopes(tl, K, gamma_c, gamma_d)
    kg = K * gamma_c
    zeta_lo = env.lower(n_m) + kg * n_m - 5.0 * sig
    zeta_hi = env.upper(n_p) + kg * n_p + 5.0 * sig
    y0 = env.y_zero
    coef = estimate_coefficients(
        tl, K, gamma_c, gamma_d,
        (zeta_lo, y0 + 0.1 * sig), (y0 - 0.1 * sig, zeta_hi),
    )
    eps_v, eps_w = choose_epsilons(coef)

    use_u = bool(cfg.competitive_envelope)
    if use_u and (tl.beta is None or gamma_d != 0.0):
        warnings.warn(
            "competitive envelope needs Gaussian types and gamma_d = 0; "
            "falling back to the raw envelopes", RuntimeWarning,
        )
        use_u = False

    sides: dict = {}
    for key, (a, b) in (("neg", (n_m, 0.0)), ("pos", (0.0, n_p))):
        ns = np.linspace(a, b, 801)
        neg_side = key == "neg"
        try:
            lower_env = np.array([env.lower(float(x), neg_side) for x in ns])
            upper_env = np.array([env.upper(float(x), neg_side) for x in ns])
        except BracketError as exc:
            raise SolverError(
                f"envelope inversion left the tabulation range on the {key} "
                f"side; shrink the window ({exc})"
            ) from exc
        if key == "neg":
            lower_mix = (1.0 - eps_v) * lower_env + eps_v * upper_env
            upper_mix = (1.0 - eps_w) * upper_env + eps_w * lower_env
        else:
            lower_mix = (1.0 - eps_w) * lower_env + eps_w * upper_env
            upper_mix = (1.0 - eps_v) * upper_env + eps_v * lower_env
        if use_u:
            u_vals = np.array(
                [competitive_upper_solution(tl, K, gamma_c, float(x),
                                            side="bid" if key == "neg" else "ask")
                 for x in ns]
            )
            if key == "neg":
                upper_mix = np.minimum(upper_mix, u_vals)
            else:
                lower_mix = np.maximum(lower_mix, u_vals)
        sides[key] = _Side(ns, lower_env, upper_env, lower_mix, upper_mix)

    slack = cfg.containment_slack * sig
    worst = 0.0
    for key, side in sides.items():
        negative = key == "neg"

        def rhs(n, z, _neg=negative):
            return _rhs_side(coef, n, z, _neg)

        start = n_m if negative else n_p
        lo0 = float(side.lower_mix_spline(start))
        hi0 = float(side.upper_mix_spline(start))
        side.lo_run = _integrate(
            rhs, start, 0.0, lo0, side.lower_mix_spline, side.upper_mix_spline,
            cfg.tol, cfg.step, slack,
        )
        side.hi_run = _integrate(
            rhs, start, 0.0, hi0, side.lower_mix_spline, side.upper_mix_spline,
            cfg.tol, cfg.step, slack,
        )
        for run in (side.lo_run, side.hi_run):
            below = side.lower_mix_spline(run.ns) - run.zs
            above = run.zs - side.upper_mix_spline(run.ns)
            worst = max(worst, float(np.max(below)), float(np.max(above)))
            if np.any(np.diff(run.zs) <= 0.0):
                raise SolverError(f"trajectory on the {key} side is not increasing")

    containment_ok = worst <= slack

    # Terminal values at 0: the trajectories arrive in ascending-n order, so
    # index -1 on the negative side and 0 on the positive side.
    lo_neg, hi_neg = sides["neg"].lo_run.zs[-1], sides["neg"].hi_run.zs[-1]
    lo_pos, hi_pos = sides["pos"].lo_run.zs[0], sides["pos"].hi_run.zs[0]
    gap_neg = abs(hi_neg - lo_neg)
    gap_pos = abs(hi_pos - lo_pos)
    p0_neg = 0.5 * (lo_neg + hi_neg)
    p0_pos = 0.5 * (lo_pos + hi_pos)
    clamped = False
    if p0_neg > p0_pos:
        # Numerical tie at 0: the true solution satisfies p(0-) <= p(0+).
        mid = 0.5 * (p0_neg + p0_pos)
        p0_neg = p0_pos = mid
        clamped = True
        warnings.warn("upper/lower runs crossed at 0; clamping the spread gap",
                      RuntimeWarning)

    grid_neg = np.linspace(n_m, 0.0, cfg.grid_points)[:-1]
    grid_pos = np.linspace(0.0, n_p, cfg.grid_points)[1:]
    mid_neg = 0.5 * (sides["neg"].lo_run(grid_neg) + sides["neg"].hi_run(grid_neg))
    mid_pos = 0.5 * (sides["pos"].lo_run(grid_pos) + sides["pos"].hi_run(grid_pos))
    p_star = PriceSchedule.from_samples(
        np.concatenate([grid_neg, grid_pos]),
        np.concatenate([mid_neg, mid_pos]),
        bid_limit=p0_neg,
        ask_limit=p0_pos,
    )

    return SandwichSolution(
        p_star=p_star,
        eps_v=eps_v,
        eps_w=eps_w,
        gap_at_zero=max(gap_neg, gap_pos),
        gap_at_zero_neg=gap_neg,
        gap_at_zero_pos=gap_pos,
        n_minus=n_m,
        n_plus=n_p,
        K=K,
        gamma_c=gamma_c,
        gamma_d=gamma_d,
        tl=tl,
        coefficients=coef,
        envelopes=env,
        config=cfg,
        containment_ok=containment_ok,
        containment_worst=worst,
        sides=sides,
        clamped_at_zero=clamped,
    )


@dataclass
class OliBoundResult:
    z_oli: float
    passes: bool
    margin: float
    mean_condition_ok: bool

    def __iter__(self):
        return iter((self.z_oli, self.passes))


def gaussian_oli_bound(
    beta: float, gamma_c: float, mu_m: float, sigma_y: float
) -> OliBoundResult:
    """Primitive-level sufficient condition for the oligopoly verification.

    Requires gamma_c^2 mu_M^2 / sigma_Y^2 < pi/2 and
    beta >= 1/2 + (1/2) Phi/phi(z_oli) gamma_c |mu_M| / sigma_Y, with
    z_oli = -((1-beta)/(2 beta - 1)) gamma_c |mu_M| / sigma_Y for beta > 1/2
    (beta = 1/2 by its limit). For mu_M = 0 it reduces to beta >= 1/2.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    ratio = gamma_c * abs(mu_m) / sigma_y
    mean_ok = ratio * ratio < math.pi / 2.0
    if mu_m == 0.0:
        z_oli = 0.0
    elif beta > 0.5:
        z_oli = -((1.0 - beta) / (2.0 * beta - 1.0)) * ratio
    elif beta == 0.5:
        z_oli = -math.inf
    else:
        return OliBoundResult(z_oli=math.nan, passes=False, margin=-math.inf,
                              mean_condition_ok=bool(mean_ok))
    mills = 0.0 if z_oli == -math.inf else float(mills_ratio(z_oli))
    margin = beta - (0.5 + 0.5 * mills * ratio)
    return OliBoundResult(
        z_oli=z_oli,
        passes=bool(mean_ok and margin >= -1e-12),
        margin=margin,
        mean_condition_ok=bool(mean_ok),
    )


@dataclass
class EquilibriumCertificate:
    f_oli_ok: bool
    margin_minus: float
    margin_plus: float
    spread: float
    p0_minus: float
    p0_plus: float
    gaussian_bound: OliBoundResult | None = None

    def __bool__(self) -> bool:
        return self.f_oli_ok


def verify_f_oli(
    tl: TypeLaw, K: int, gamma_c: float, gamma_d: float, sol: SandwichSolution,
    span: float = 8.0, points: int = 201,
) -> EquilibriumCertificate:
    """Check the hazard-slope conditions at the solved spread endpoints.

    (F/f)' - g' <= gamma_d/gamma_c must hold on (-inf, p(0-)] and its mirror
    -(Fbar/f)' - g' <= gamma_d/gamma_c on [p(0+), inf); when they do, the ODE
    solution is the unique symmetric Nash equilibrium.
    """
    if not sol.gap_at_zero < 1e-3 * tl.sigma_y:
        raise SolverError(
            f"sandwich gap {sol.gap_at_zero!r} too wide to certify the spread"
        )
    p0m, p0p = sol.p_star.bid_limit, sol.p_star.ask_limit
    sig = tl.sigma_y
    grid_minus = np.linspace(p0m - span * sig, p0m, points)
    grid_plus = np.linspace(p0p, p0p + span * sig, points)
    lhs_minus = tl.hazard_minus_prime(grid_minus) - tl.g_prime(grid_minus)
    lhs_plus = -tl.hazard_plus_prime(grid_plus) - tl.g_prime(grid_plus)
    ratio = gamma_d / gamma_c
    margin_minus = ratio - float(np.max(lhs_minus))
    margin_plus = ratio - float(np.max(lhs_plus))
    bound = None
    if tl.beta is not None and gamma_d == 0.0:
        bound = gaussian_oli_bound(tl.beta, gamma_c, tl.spec.mu_m, tl.sigma_y)
    return EquilibriumCertificate(
        f_oli_ok=bool(margin_minus >= -_F_OLI_TOL and margin_plus >= -_F_OLI_TOL),
        margin_minus=margin_minus,
        margin_plus=margin_plus,
        spread=p0p - p0m,
        p0_minus=p0m,
        p0_plus=p0p,
        gaussian_bound=bound,
    )
