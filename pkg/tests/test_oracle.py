import numpy as np
import pytest

from conftest import gauss_beta
from dealereq import (
    DeviationSpec,
    EtaFunctions,
    OracleRangeError,
    build_deviation,
    check_admissible,
    check_compatible,
    client_grid_oracle,
    dealer_profit_deviation,
    monte_carlo_profit,
    nash_deviation_suite,
    pointwise_optimality_check,
    quadratic_schedule,
    random_deviations,
    solve_equilibrium_ode,
    symmetric_response,
)


class TestEtaFunctions:
    def test_equality_at_own_point(self, tl_055, sol_055):
        eta = EtaFunctions(tl_055, 2, 1.0, 0.0)
        for n in (-1.2, -0.4):
            z = sol_055.p_star.marginal(n)
            assert eta.eta_minus(n, n, z) == eta.eta_minus(n, n, z)
            base = eta.eta_minus(n, n, z)
            again = eta.eta_minus(n, n, z)
            assert abs(base - again) < 1e-12

    def test_derivatives_match_finite_differences(self, tl_055):
        # 10 x 10 x 3 grid, relative tolerance 1e-5 against central differences.
        eta = EtaFunctions(tl_055, 2, 1.0, 0.0)
        h = 1e-6
        ns = np.linspace(-1.8, -0.1, 10)
        xs = np.linspace(-1.5, 1.5, 10)
        zs = np.linspace(-1.2, 0.3, 3)
        for n in ns:
            for x in xs:
                for z in zs:
                    fd_x = (eta.eta_minus(n, x + h, z) - eta.eta_minus(n, x - h, z)) / (2 * h)
                    fd_z = (eta.eta_minus(n, x, z + h) - eta.eta_minus(n, x, z - h)) / (2 * h)
                    ax = eta.deta_minus_dx(n, x, z)
                    az = eta.deta_minus_dz(n, x, z)
                    assert fd_x == pytest.approx(ax, rel=1e-5, abs=1e-10)
                    assert fd_z == pytest.approx(az, rel=1e-5, abs=1e-10)

    def test_plus_side_derivatives(self, tl_055):
        eta = EtaFunctions(tl_055, 2, 1.0, 0.0)
        h = 1e-6
        for n, x, z in ((0.4, 0.6, 0.9), (1.1, -0.2, 1.4)):
            fd_x = (eta.eta_plus(n, x + h, z) - eta.eta_plus(n, x - h, z)) / (2 * h)
            fd_z = (eta.eta_plus(n, x, z + h) - eta.eta_plus(n, x, z - h)) / (2 * h)
            assert fd_x == pytest.approx(eta.deta_plus_dx(n, x, z), rel=1e-5)
            assert fd_z == pytest.approx(eta.deta_plus_dz(n, x, z), rel=1e-5)

    def test_a_field_reduces_to_ode_form_on_diagonal(self, tl_055, sol_055):
        eta = EtaFunctions(tl_055, 2, 1.0, 0.0)
        coef = sol_055.coefficients
        for n, z in ((-0.9, -1.0), (0.6, 0.8)):
            assert eta.a_field(n, n, z) == pytest.approx(coef.A(n, z), rel=1e-12)


class TestPointwiseOptimality:
    def test_equilibrium_passes_full_grid(self, tl_055, sol_055):
        report = pointwise_optimality_check(tl_055, 2, 1.0, 0.0, sol_055.p_star)
        assert report.passed
        assert report.worst_margin >= -report.tol
        for case in ("x<=n", "n<x<0", "x=0", "x>0"):
            assert report.case_counts[case] >= 5

    def test_exploratory_run_below_threshold(self):
        # beta = 0.3 violates the verification condition; the report records
        # the outcome without asserting the theory either way.
        tl = gauss_beta(0.3)
        sol = solve_equilibrium_ode(tl, 2, 1.0, 0.0)
        report = pointwise_optimality_check(tl, 2, 1.0, 0.0, sol.p_star)
        print(
            f"beta=0.3 exploratory pointwise check: passed={report.passed} "
            f"worst_margin={report.worst_margin:.3e} at {report.worst_point}"
        )
        assert report.checks > 0

    def test_own_point_margin_is_tiny(self, tl_055, sol_055):
        eta = EtaFunctions(tl_055, 2, 1.0, 0.0)
        n = -0.8
        z = sol_055.p_star.marginal(n)
        assert eta.eta_minus(n, n, z) - eta.eta_minus(n, n, z) == 0.0


class TestDeviationProfits:
    def test_identity_deviation_is_bitwise_equal(self, tl_055, sol_055):
        j_base, j_dev = dealer_profit_deviation(
            tl_055, 2, 1.0, 0.0, sol_055.p_star,
            DeviationSpec(kind="marginal_shift", amount=0.0),
        )
        assert j_base == j_dev

    def test_shift_deviation_strictly_worse(self, tl_055, sol_055):
        j_base, j_dev = dealer_profit_deviation(
            tl_055, 2, 1.0, 0.0, sol_055.p_star,
            DeviationSpec(kind="marginal_shift", amount=0.1),
        )
        assert j_dev < j_base

    def test_seeded_suite_passes(self, tl_055, sol_055):
        suite = nash_deviation_suite(
            tl_055, 2, 1.0, 0.0, sol_055.p_star, count=20, seed=20210726
        )
        assert suite.passed
        assert len(suite.excesses) == 20
        assert suite.worst_excess <= suite.tol
        kinds = {d.kind for d in suite.deviations}
        assert kinds == {"marginal_shift", "marginal_tilt", "bump"}

    def test_suite_is_deterministic(self, tl_055, sol_055):
        a = nash_deviation_suite(tl_055, 2, 1.0, 0.0, sol_055.p_star, count=6, seed=5)
        b = nash_deviation_suite(tl_055, 2, 1.0, 0.0, sol_055.p_star, count=6, seed=5)
        assert a.excesses == b.excesses

    def test_random_deviations_admissible_and_compatible(self, tl_055, sol_055):
        devs = random_deviations(sol_055.p_star, 2, 1.0, 9, seed=11, n_scale=0.5)
        for dev in devs:
            p1 = build_deviation(sol_055.p_star, dev)
            assert check_admissible(p1, 2, 1.0).admissible
            assert check_compatible([p1, sol_055.p_star]).compatible

    def test_quadrature_matches_monte_carlo(self, tl_055, sol_055):
        j_base, _ = dealer_profit_deviation(
            tl_055, 2, 1.0, 0.0, sol_055.p_star,
            DeviationSpec(kind="marginal_shift", amount=0.0),
        )
        mc, se = monte_carlo_profit(
            tl_055, sol_055.p_star, 2, 1.0, 0.0, n_samples=10**6, seed=3
        )
        assert abs(mc - j_base) < 3.0 * se

    def test_bad_deviation_kind_rejected(self, sol_055):
        with pytest.raises(ValueError):
            build_deviation(sol_055.p_star, DeviationSpec(kind="wiggle")).marginal(1.0)


class TestClientGridOracle:
    def test_symmetric_quadratic_no_trade(self):
        P = quadratic_schedule(1.0, 0.5)
        best = client_grid_oracle([P, P], 1.0, 0.0, (-2.0, 2.0), 1e-3)
        assert best[0] == 0.0 and best[1] == 0.0

    def test_two_resolutions_agree(self, tl_055, sol_055):
        p = sol_055.p_star
        coarse = client_grid_oracle([p, p], 1.0, 2.5, (-4.0, 4.0), 1e-2)
        fine = client_grid_oracle([p, p], 1.0, 2.5, (-4.0, 4.0), 1e-3)
        assert abs(coarse[0] - fine[0]) <= 1e-2

    def test_matches_symmetric_response(self, sol_055):
        resp = symmetric_response(sol_055.p_star, 2, 1.0)
        for y in (-1.9, -0.2, 1.4):
            best = client_grid_oracle([sol_055.p_star] * 2, 1.0, y, (-4.0, 4.0), 1e-3)
            assert abs(best[0] - resp.trade_size(y)) <= 1e-3

    def test_symmetric_reduction_for_k3(self, sol_055):
        resp = symmetric_response(sol_055.p_star, 3, 1.0)
        best = client_grid_oracle([sol_055.p_star] * 3, 1.0, 1.8, (-3.0, 3.0), 1e-3)
        assert len(best) == 3
        assert abs(best[0] - resp.trade_size(1.8)) <= 1e-3

    def test_boundary_argmax_raises(self):
        P = quadratic_schedule(0.5, 0.0)
        with pytest.raises(OracleRangeError):
            client_grid_oracle([P, P], 1.0, 10.0, (-1.0, 1.0), 1e-2)

    def test_range_validation(self):
        P = quadratic_schedule(0.5, 0.0)
        with pytest.raises(ValueError):
            client_grid_oracle([P], 1.0, 0.0, (0.5, 1.0), 1e-2)

    def test_three_distinct_schedules_unsupported(self):
        P1, P2, P3 = (quadratic_schedule(s, 0.1) for s in (0.5, 1.0, 1.5))
        with pytest.raises(OracleRangeError):
            client_grid_oracle([P1, P2, P3], 1.0, 1.0, (-2.0, 2.0), 1e-2)
