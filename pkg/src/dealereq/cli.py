"""Command-line harness: dealer-eq <mode> [--config ...] [overrides].

Modes
-----
monopoly   closed-form schedule -> CSV (n, marginal_price, price) + summary JSON
oligopoly  sandwich solve -> CSV (n, lower, upper, midpoint, v, w, v_eps, w_eps)
           + summary JSON
verify     full verification suite -> report JSON (exit 4 on failure)
figures    the five reference figure datasets, CSV + PNG each
sweep      spread/certificate table over a parameter range

Exit codes: 0 success, 2 configuration error, 3 solver nonconvergence,
4 verification failure. Errors are emitted as one JSON object on stderr.
All outputs are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import report
from .client import PriceSchedule, check_admissible, check_compatible, symmetric_response
from .errors import ConfigError, DealerEqError, SolverError, VerificationFailure
from .monopoly import monopoly_schedule, z_mon_threshold
from .oligopoly import SolverConfig, solve_equilibrium_ode, verify_f_oli
from .oracle import client_grid_oracle, nash_deviation_suite, pointwise_optimality_check
from .typelaw import (
    GAUSSIAN,
    TWO_SIDED_EXPONENTIAL,
    DistributionSpec,
    build_typelaw,
    efron_check,
)

MODES = ("monopoly", "oligopoly", "verify", "figures", "sweep")

_DEFAULT_CONFIG = {
    "market": {
        "gamma_c": "1.0",
        "gamma_d": "0.0",
        "k": "2",
        "family": GAUSSIAN,
        "mu_s": "0.0",
        "sigma_s": "1.0",
        "mu_m": "0.0",
        "sigma_m": "1.0",
    },
    "solver": {
        "n_minus": "",
        "n_plus": "",
        "step": "0.01",
        "tol": "1e-9",
        "grid_points": "201",
    },
    "outputs": {
        "schedule_csv": "",
        "summary_json": "",
    },
    "sweep": {
        "parameter": "beta",
        "start": "0.44",
        "stop": "0.50",
        "step": "0.005",
    },
}


@dataclass
class MarketParams:
    gamma_c: float
    gamma_d: float
    k: int
    spec: DistributionSpec


@dataclass
class RunConfig:
    mode: str
    market: MarketParams
    solver: SolverConfig
    out_dir: Path
    schedule_csv: Path
    summary_json: Path
    seed: int
    sweep_parameter: str
    sweep_values: np.ndarray


def _parse_config(path: str | None, args) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.read_dict(_DEFAULT_CONFIG)
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file: {exc}") from exc

    try:
        gamma_c = parser.getfloat("market", "gamma_c")
        gamma_d = parser.getfloat("market", "gamma_d")
        k = parser.getint("market", "k")
        family = parser.get("market", "family").strip()
        mu_s = parser.getfloat("market", "mu_s")
        sigma_s = parser.getfloat("market", "sigma_s")
        mu_m = parser.getfloat("market", "mu_m")
        sigma_m = parser.getfloat("market", "sigma_m")
    except ValueError as exc:
        raise ConfigError(f"bad market value: {exc}") from exc

    if args.gamma_d is not None:
        gamma_d = args.gamma_d
    if args.k is not None:
        k = args.k
    if args.beta is not None:
        if family != GAUSSIAN:
            raise ConfigError("--beta override requires the gaussian family")
        if not 0.0 < args.beta < 1.0:
            raise ConfigError("--beta must lie in (0, 1)")
        # Reparameterize at fixed sigma_Y so only the information mix moves.
        sigma_y = math.sqrt(sigma_s**2 + (gamma_c * sigma_m) ** 2)
        sigma_s = math.sqrt(args.beta) * sigma_y
        sigma_m = math.sqrt(1.0 - args.beta) * sigma_y / gamma_c
    if gamma_c <= 0.0 or gamma_d < 0.0:
        raise ConfigError("need gamma_c > 0 and gamma_d >= 0")
    if k < 1:
        raise ConfigError("k must be >= 1")
    if family == "custom_logconcave":
        raise ConfigError("custom_logconcave is library-only; use the Python API")
    if family not in (GAUSSIAN, TWO_SIDED_EXPONENTIAL):
        raise ConfigError(f"unknown family {family!r}")
    spec = DistributionSpec(
        family=family, mu_s=mu_s, sigma_s=sigma_s, mu_m=mu_m, sigma_m=sigma_m
    )
    try:
        spec.validate()
    except DealerEqError as exc:
        raise ConfigError(str(exc)) from exc

    def _optional_float(section: str, key: str):
        raw = parser.get(section, key).strip()
        return float(raw) if raw else None

    try:
        solver = SolverConfig(
            n_minus=_optional_float("solver", "n_minus"),
            n_plus=_optional_float("solver", "n_plus"),
            step=parser.getfloat("solver", "step"),
            tol=parser.getfloat("solver", "tol"),
            grid_points=parser.getint("solver", "grid_points"),
        )
    except ValueError as exc:
        raise ConfigError(f"bad solver value: {exc}") from exc
    if solver.grid_points < 8:
        raise ConfigError("grid_points must be >= 8")

    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create out dir {out_dir}: {exc}") from exc

    def _out(key: str, default: str) -> Path:
        raw = parser.get("outputs", key).strip()
        return out_dir / (raw if raw else default)

    sweep_parameter = parser.get("sweep", "parameter").strip()
    if sweep_parameter not in ("beta", "gamma_d", "k"):
        raise ConfigError(f"unknown sweep parameter {sweep_parameter!r}")
    try:
        start = parser.getfloat("sweep", "start")
        stop = parser.getfloat("sweep", "stop")
        step = parser.getfloat("sweep", "step")
    except ValueError as exc:
        raise ConfigError(f"bad sweep value: {exc}") from exc
    if step <= 0 or stop < start:
        raise ConfigError("sweep needs step > 0 and stop >= start")
    count = int(round((stop - start) / step)) + 1
    sweep_values = start + step * np.arange(count)

    return RunConfig(
        mode=args.mode,
        market=MarketParams(gamma_c=gamma_c, gamma_d=gamma_d, k=k, spec=spec),
        solver=solver,
        out_dir=out_dir,
        schedule_csv=_out("schedule_csv", f"{args.mode}_schedule.csv"),
        summary_json=_out("summary_json", f"{args.mode}_summary.json"),
        seed=args.seed,
        sweep_parameter=sweep_parameter,
        sweep_values=sweep_values,
    )


def _market_summary(market: MarketParams, tl) -> dict:
    return {
        "family": market.spec.family,
        "gamma_c": market.gamma_c,
        "gamma_d": market.gamma_d,
        "k": market.k,
        "mu_y": tl.mu_y,
        "sigma_y": tl.sigma_y,
        "beta": tl.beta,
    }


def _monopoly_grid(cfg: RunConfig, tl) -> np.ndarray:
    half_width = 5.0 * tl.sigma_y / cfg.market.gamma_c
    n_lo = cfg.solver.n_minus if cfg.solver.n_minus is not None else -half_width
    n_hi = cfg.solver.n_plus if cfg.solver.n_plus is not None else half_width
    m = cfg.solver.grid_points
    return np.concatenate(
        [np.linspace(n_lo, 0.0, m + 1)[:-1], np.linspace(0.0, n_hi, m + 1)[1:]]
    )


def run_monopoly(cfg: RunConfig) -> dict:
    tl = build_typelaw(cfg.market.spec, cfg.market.gamma_c)
    grid = _monopoly_grid(cfg, tl)
    res = monopoly_schedule(tl, cfg.market.gamma_c, cfg.market.gamma_d, grid)
    n = res.n_grid
    report.write_csv(
        cfg.schedule_csv,
        ["n", "marginal_price", "price"],
        [n, res.schedule.marginal(n), res.schedule.value(n)],
    )
    summary = {
        "mode": "monopoly",
        "market": _market_summary(cfg.market, tl),
        "spread": res.y_plus - res.y_minus,
        "y_minus": res.y_minus,
        "y_plus": res.y_plus,
        "convex": res.convex,
        "convexity_margin_minus": res.convexity.margin_minus,
        "convexity_margin_plus": res.convexity.margin_plus,
        "z_mon": res.z_mon,
        "truncated": res.truncated,
    }
    if tl.beta is not None:
        zres = z_mon_threshold(
            tl.beta, cfg.market.gamma_c, cfg.market.spec.mu_m, tl.sigma_y
        )
        summary["z_mon_passes"] = zres.passes
    report.write_json(cfg.summary_json, summary)
    return summary


def run_oligopoly(cfg: RunConfig) -> dict:
    if cfg.market.k < 2:
        raise ConfigError("oligopoly mode needs k >= 2")
    tl = build_typelaw(cfg.market.spec, cfg.market.gamma_c)
    sol = solve_equilibrium_ode(
        tl, cfg.market.k, cfg.market.gamma_c, cfg.market.gamma_d, cfg.solver
    )
    rows = {name: [] for name in
            ("n", "lower", "upper", "midpoint", "v", "w", "v_eps", "w_eps")}
    for key in ("neg", "pos"):
        side = sol.sides[key]
        a, b = (sol.n_minus, 0.0) if key == "neg" else (0.0, sol.n_plus)
        grid = np.linspace(a, b, cfg.solver.grid_points)
        grid = grid[grid != 0.0]
        lo = side.lo_run(grid)
        hi = side.hi_run(grid)
        rows["n"].append(grid)
        rows["lower"].append(lo)
        rows["upper"].append(hi)
        rows["midpoint"].append(0.5 * (lo + hi))
        rows["v"].append(side.lower_spline(grid))
        rows["w"].append(side.upper_spline(grid))
        rows["v_eps"].append(side.lower_mix_spline(grid))
        rows["w_eps"].append(side.upper_mix_spline(grid))
    cols = {name: np.concatenate(vals) for name, vals in rows.items()}
    report.write_csv(cfg.schedule_csv, list(cols.keys()), list(cols.values()))
    cert = verify_f_oli(tl, cfg.market.k, cfg.market.gamma_c, cfg.market.gamma_d, sol)
    summary = {
        "mode": "oligopoly",
        "market": _market_summary(cfg.market, tl),
        "spread": sol.spread,
        "p0_minus": sol.p_star.bid_limit,
        "p0_plus": sol.p_star.ask_limit,
        "gap_at_zero": sol.gap_at_zero,
        "eps_v": sol.eps_v,
        "eps_w": sol.eps_w,
        "n_minus": sol.n_minus,
        "n_plus": sol.n_plus,
        "containment_ok": sol.containment_ok,
        "f_oli_ok": cert.f_oli_ok,
        "f_oli_margin_minus": cert.margin_minus,
        "f_oli_margin_plus": cert.margin_plus,
    }
    if cert.gaussian_bound is not None:
        summary["gaussian_bound_z_oli"] = cert.gaussian_bound.z_oli
        summary["gaussian_bound_passes"] = cert.gaussian_bound.passes
    report.write_json(cfg.summary_json, summary)
    return summary


def run_verify(cfg: RunConfig) -> dict:
    if cfg.market.k < 2:
        raise ConfigError("verify mode needs k >= 2")
    market = cfg.market
    tl = build_typelaw(market.spec, market.gamma_c)
    checks: dict = {}

    grid = np.linspace(tl.mu_y - 4 * tl.sigma_y, tl.mu_y + 4 * tl.sigma_y, 201)
    efron = efron_check(tl, grid)
    checks["typelaw_efron"] = {
        "passed": efron.passed,
        "min_gprime": efron.min_gprime,
        "max_gprime": efron.max_gprime,
    }
    norm_err = float(np.max(np.abs(tl.F(grid) + tl.Fbar(grid) - 1.0)))
    mean_err = float(np.max(np.abs(tl.H(grid) + tl.Hbar(grid) - tl.mean_v)))
    checks["typelaw_normalization"] = {
        "passed": bool(norm_err < 1e-7 and mean_err < 1e-7),
        "max_cdf_error": norm_err,
        "max_mean_error": mean_err,
    }

    mon = monopoly_schedule(tl, market.gamma_c, market.gamma_d, _monopoly_grid(cfg, tl))
    checks["monopoly_admissible_k1"] = {
        "passed": bool(check_admissible(mon.schedule, 1, market.gamma_c)),
    }
    checks["monopoly_admissible_pool"] = {
        "passed": bool(check_admissible(mon.schedule, market.k, market.gamma_c))
        == mon.convex,
        "informational": True,
    }
    checks["monopoly_convexity"] = {
        "passed": mon.convex,
        "margin_minus": mon.convexity.margin_minus,
        "margin_plus": mon.convexity.margin_plus,
    }
    spreads = []
    for gd in (0.0, 0.5, 2.0):
        r = monopoly_schedule(tl, market.gamma_c, gd, _monopoly_grid(cfg, tl))
        spreads.append(r.y_plus - r.y_minus)
    rel = (max(spreads) - min(spreads)) / abs(spreads[0])
    checks["monopoly_spread_invariance"] = {
        "passed": bool(rel < 1e-10),
        "relative_variation": rel,
    }

    sol = solve_equilibrium_ode(tl, market.k, market.gamma_c, market.gamma_d, cfg.solver)
    checks["oligopoly_gap"] = {
        "passed": bool(sol.gap_at_zero < 1e-4 and sol.containment_ok),
        "gap_at_zero": sol.gap_at_zero,
        "containment_ok": sol.containment_ok,
    }
    cert = verify_f_oli(tl, market.k, market.gamma_c, market.gamma_d, sol)
    checks["f_oli"] = {
        "passed": cert.f_oli_ok,
        "margin_minus": cert.margin_minus,
        "margin_plus": cert.margin_plus,
        "spread": cert.spread,
    }
    if cert.gaussian_bound is not None:
        checks["gaussian_bound"] = {
            "passed": cert.gaussian_bound.passes,
            "z_oli": cert.gaussian_bound.z_oli,
            "margin": cert.gaussian_bound.margin,
            "informational": True,
        }

    p = sol.p_star
    shift = p.spread / 4.0
    probe = np.concatenate(
        [np.linspace(sol.n_minus, -1e-3, 60), np.linspace(1e-3, sol.n_plus, 60)]
    )
    rival = PriceSchedule.from_samples(
        probe, p.marginal(probe) + shift, p.bid_limit + shift, p.ask_limit + shift
    )
    comp = check_compatible([p, rival])
    checks["compatibility"] = {
        "passed": bool(comp),
        "l_bar": comp.l_bar,
        "r_bar": comp.r_bar,
    }

    resp = symmetric_response(sol.p_star, market.k, market.gamma_c)
    scale = tl.sigma_y
    worst = 0.0
    for y in np.linspace(tl.mu_y - 1.8 * scale, tl.mu_y + 1.8 * scale, 9):
        got = resp.trade_size(float(y))
        want = client_grid_oracle(
            [sol.p_star] * market.k, market.gamma_c, float(y),
            (-6.0 * scale, 6.0 * scale), 1e-3,
        )[0]
        worst = max(worst, abs(got - want))
    checks["client_oracle"] = {"passed": bool(worst < 1e-3), "max_error": worst}

    suite = nash_deviation_suite(
        tl, market.k, market.gamma_c, market.gamma_d, sol.p_star,
        count=5, seed=cfg.seed,
    )
    checks["nash_deviations"] = {
        "passed": suite.passed,
        "worst_excess": suite.worst_excess,
        "j_base": suite.j_base,
    }
    point = pointwise_optimality_check(
        tl, market.k, market.gamma_c, market.gamma_d, sol.p_star
    )
    checks["pointwise_eta"] = {
        "passed": point.passed,
        "worst_margin": point.worst_margin,
        "checks": point.checks,
    }

    gated = [v["passed"] for k, v in checks.items() if not v.get("informational")]
    passed = all(gated)
    payload = {
        "mode": "verify",
        "market": _market_summary(market, tl),
        "passed": passed,
        "checks": checks,
    }
    report.write_json(cfg.summary_json, payload)
    if not passed:
        failing = sorted(
            k for k, v in checks.items()
            if not v["passed"] and not v.get("informational")
        )
        raise VerificationFailure(f"failing checks: {', '.join(failing)}")
    return payload


def _tl_with_beta(cfg: RunConfig, beta: float):
    spec = cfg.market.spec
    gamma_c = cfg.market.gamma_c
    sigma_y = math.sqrt(spec.sigma_s**2 + (gamma_c * spec.sigma_m) ** 2)
    new = replace(
        spec,
        sigma_s=math.sqrt(beta) * sigma_y,
        sigma_m=math.sqrt(1.0 - beta) * sigma_y / gamma_c,
    )
    return build_typelaw(new, gamma_c)


def run_figures(cfg: RunConfig) -> dict:
    if cfg.market.spec.family != GAUSSIAN:
        raise ConfigError("figures mode reproduces the Gaussian reference cases")
    gamma_c = cfg.market.gamma_c
    out = cfg.out_dir
    tl_base = build_typelaw(cfg.market.spec, gamma_c)
    sig_n = tl_base.sigma_y / gamma_c
    written = []

    def emit(name, header, columns, xlabel, ylabel, title):
        csv_path = report.write_csv(out / f"{name}.csv", header, columns)
        curves = {h: c for h, c in zip(header[1:], columns[1:])}
        png_path = report.render_curves(
            out / f"{name}.png", columns[0], curves, xlabel, ylabel, title
        )
        written.extend([str(csv_path), str(png_path)])

    # 1. Monopolist marginal prices across the convexity threshold.
    grid = np.concatenate(
        [np.linspace(-2.5 * sig_n, 0.0, 160)[:-1], np.linspace(0.0, 2.5 * sig_n, 160)[1:]]
    )
    cols = [grid]
    for beta in (0.25, 0.40):
        res = monopoly_schedule(_tl_with_beta(cfg, beta), gamma_c, 0.0, grid)
        cols.append(res.schedule.marginal(grid))
    emit(
        "fig_monopoly_beta",
        ["n", "pprime_beta025", "pprime_beta040"],
        cols,
        "trade size n", "marginal price", "monopolist marginal prices: information mix",
    )

    # 2. Monopolist marginal prices across dealer inventory costs.
    tl04 = _tl_with_beta(cfg, 0.40)
    cols = [grid]
    for gd in (0.0, 0.5):
        res = monopoly_schedule(tl04, gamma_c, gd, grid)
        cols.append(res.schedule.marginal(grid))
    emit(
        "fig_monopoly_gamma_d",
        ["n", "pprime_gd00", "pprime_gd05"],
        cols,
        "trade size n", "marginal price", "monopolist marginal prices: inventory costs",
    )

    # 3. Sandwich envelopes and the two ODE runs for the base config.
    K = max(cfg.market.k, 2)
    sol = solve_equilibrium_ode(tl_base, K, gamma_c, cfg.market.gamma_d, cfg.solver)
    rows = {name: [] for name in
            ("n", "v", "v_eps", "lower", "upper", "w_eps", "w")}
    for key in ("neg", "pos"):
        side = sol.sides[key]
        a, b = (sol.n_minus, 0.0) if key == "neg" else (0.0, sol.n_plus)
        g = np.linspace(a, b, 160)
        g = g[g != 0.0]
        rows["n"].append(g)
        rows["v"].append(side.lower_spline(g))
        rows["v_eps"].append(side.lower_mix_spline(g))
        rows["lower"].append(side.lo_run(g))
        rows["upper"].append(side.hi_run(g))
        rows["w_eps"].append(side.upper_mix_spline(g))
        rows["w"].append(side.upper_spline(g))
    cols = [np.concatenate(rows[k]) for k in rows]
    emit(
        "fig_sandwich_envelopes",
        list(rows.keys()),
        cols,
        "trade size n", "marginal price", "upper/lower solutions and sandwiched runs",
    )

    # 4. Duopoly aggregate marginal prices across dealer inventory costs.
    agg = np.concatenate(
        [np.linspace(-2.0 * sig_n * K, 0.0, 160)[:-1],
         np.linspace(0.0, 2.0 * sig_n * K, 160)[1:]]
    )
    cols = [agg]
    for gd in (0.0, 0.4):
        s = solve_equilibrium_ode(tl_base, K, gamma_c, gd, cfg.solver)
        cols.append(s.p_star.marginal(agg / K))
    emit(
        "fig_oligopoly_gamma_d",
        ["n_aggregate", "pprime_gd00", "pprime_gd04"],
        cols,
        "aggregate trade size", "marginal price",
        "competing dealers' marginal prices: inventory costs",
    )

    # 5. Monopolist vs aggregate duopoly quotes at matched quantity.
    mon = monopoly_schedule(tl_base, gamma_c, 0.0, agg)
    cols = [agg, mon.schedule.marginal(agg), sol.p_star.marginal(agg / K)]
    emit(
        "fig_monopoly_vs_duopoly",
        ["n_aggregate", "pprime_monopoly", "pprime_duopoly"],
        cols,
        "aggregate trade size", "marginal price",
        "monopolist vs competing dealers",
    )

    payload = {
        "mode": "figures",
        "market": _market_summary(cfg.market, tl_base),
        "files": sorted(written),
    }
    report.write_json(cfg.summary_json, payload)
    return payload


def run_sweep(cfg: RunConfig) -> dict:
    market = cfg.market
    rows = {
        "value": [], "mon_spread": [], "oli_spread": [], "gap_at_zero": [],
        "f_oli_margin_minus": [], "f_oli_margin_plus": [], "f_oli_ok": [],
    }
    for value in cfg.sweep_values:
        value = float(value)
        if cfg.sweep_parameter == "beta":
            tl = _tl_with_beta(cfg, value)
            k, gd = market.k, market.gamma_d
        elif cfg.sweep_parameter == "gamma_d":
            tl = build_typelaw(market.spec, market.gamma_c)
            k, gd = market.k, value
        else:
            tl = build_typelaw(market.spec, market.gamma_c)
            k, gd = int(round(value)), market.gamma_d
        mon = monopoly_schedule(tl, market.gamma_c, gd, _monopoly_grid(cfg, tl))
        sol = solve_equilibrium_ode(tl, k, market.gamma_c, gd, cfg.solver)
        cert = verify_f_oli(tl, k, market.gamma_c, gd, sol)
        rows["value"].append(value)
        rows["mon_spread"].append(mon.y_plus - mon.y_minus)
        rows["oli_spread"].append(sol.spread)
        rows["gap_at_zero"].append(sol.gap_at_zero)
        rows["f_oli_margin_minus"].append(cert.margin_minus)
        rows["f_oli_margin_plus"].append(cert.margin_plus)
        rows["f_oli_ok"].append(1.0 if cert.f_oli_ok else 0.0)
    report.write_csv(
        cfg.schedule_csv,
        [cfg.sweep_parameter] + list(rows.keys())[1:],
        [np.asarray(v) for v in rows.values()],
    )
    flip = None
    oks = rows["f_oli_ok"]
    for v, ok in zip(rows["value"], oks):
        if ok:
            flip = v
            break
    payload = {
        "mode": "sweep",
        "parameter": cfg.sweep_parameter,
        "values": rows["value"],
        "first_passing_value": flip,
        "market": {
            "gamma_c": market.gamma_c,
            "gamma_d": market.gamma_d,
            "k": market.k,
            "family": market.spec.family,
        },
    }
    report.write_json(cfg.summary_json, payload)
    return payload


_RUNNERS = {
    "monopoly": run_monopoly,
    "oligopoly": run_oligopoly,
    "verify": run_verify,
    "figures": run_figures,
    "sweep": run_sweep,
}


def _emit_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dealer-eq",
        description="Dealer price schedules under adverse selection and inventory costs.",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", default=None, help="INI config file")
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=20210726)
    parser.add_argument("--beta", type=float, default=None,
                        help="Gaussian projection coefficient override")
    parser.add_argument("--gamma-d", type=float, default=None, dest="gamma_d")
    parser.add_argument("--k", type=int, default=None, help="number of dealers")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _parse_config(args.config, args)
        _RUNNERS[cfg.mode](cfg)
    except ConfigError as exc:
        _emit_error(exc)
        return 2
    except VerificationFailure as exc:
        _emit_error(exc)
        return 4
    except SolverError as exc:
        _emit_error(exc)
        return 3
    except DealerEqError as exc:
        _emit_error(exc)
        return 3
    except OSError as exc:
        _emit_error(exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
