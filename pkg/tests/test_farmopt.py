"""Row kinetic-energy optimisation: manifold pitch, cascade, solver."""

import dataclasses

import pytest

from conftest import two_turbine_grid_oracle
from windrow.aero import TurbineParams, mppt, operating_point
from windrow.errors import DomainError, InfeasibleMarginError
from windrow.farmopt import (
    FarmProblem,
    SolverOptions,
    base_case,
    deload_curve,
    expand_margins,
    solve_farm,
    sweep,
)
from windrow.wake import WakeParams, propagate_row

TP = TurbineParams()
WP = WakeParams()


def _problem(n, v, dm, **opts):
    return FarmProblem(
        n=n, tp=TP, wp=WP, v_free_mps=v,
        dm=expand_margins(dm, n),
        options=SolverOptions(**opts),
    )


# --- the pitch-elimination curve -------------------------------------------

def test_deload_curve_zero_margin_at_tracking_speed():
    base = mppt(8.0, TP)
    assert deload_curve(8.0, 0.0, base.omega_pu, TP) == 0.0


def test_deload_curve_small_overspeed_holds_equality():
    base = mppt(8.0, TP)
    w = base.omega_pu + 0.02
    beta = deload_curve(8.0, 0.05, w, TP)
    assert beta >= 0.0
    pt = operating_point(8.0, w, beta, TP)
    assert pt.p_mech_w == pytest.approx(0.95 * base.p_mech_w, rel=1e-6)


def test_deload_curve_infeasible_at_speed_limit_low_wind():
    # at 7 m/s not even full pitch authority reaches 90% of optimal power
    # with the rotor at its speed limit
    with pytest.raises(InfeasibleMarginError):
        deload_curve(7.0, 0.10, TP.omega_max_pu, TP)


def test_deload_curve_rejects_underspeed():
    base = mppt(8.0, TP)
    with pytest.raises(DomainError):
        deload_curve(8.0, 0.05, base.omega_pu - 0.05, TP)


# --- base case ---------------------------------------------------------------

def test_base_case_single_turbine_is_tracking_point():
    sol = base_case(8.0, 1, TP, WP)
    assert sol.points == (mppt(8.0, TP),)
    assert sol.total_power_w == sol.points[0].p_mech_w


def test_base_case_inflows_strictly_decrease():
    sol = base_case(8.0, 5, TP, WP)
    vs = sol.inflows
    assert all(b < a for a, b in zip(vs, vs[1:]))
    assert sol.total_kinetic_pus == pytest.approx(
        sum(p.e_kin_pus for p in sol.points), rel=1e-14
    )


# --- the solver --------------------------------------------------------------

def test_zero_margins_recover_base_case():
    base = base_case(8.0, 5, TP, WP)
    sol = solve_farm(_problem(5, 8.0, 0.0))
    assert sol.total_kinetic_pus == pytest.approx(
        base.total_kinetic_pus, rel=1e-3
    )
    assert sol.total_power_w == pytest.approx(base.total_power_w, rel=1e-3)


def test_single_turbine_problem_returns_base_case():
    sol = solve_farm(_problem(1, 8.0, 0.0))
    assert sol.points == (mppt(8.0, TP),)


@pytest.mark.parametrize("dm", [0.05, 0.10])
def test_two_turbine_solution_matches_grid_oracle(dm):
    sol = solve_farm(_problem(2, 8.0, dm))
    oracle = two_turbine_grid_oracle(8.0, dm, TP, WP)
    assert sol.total_kinetic_pus >= oracle * (1.0 - 0.005)


def test_solution_feasibility_audits():
    sol = solve_farm(_problem(5, 8.0, 0.05))
    d = sol.diagnostics
    assert d.feasible
    assert d.power_residual_rel < 1e-6
    assert d.wake_residual_mps < 1e-9
    # re-propagating the solved set-points reproduces the stored points
    setpoints = [(p.omega_pu, p.beta_deg) for p in sol.points]
    inflow, points = propagate_row(8.0, setpoints, TP, WP)
    for a, b in zip(points, sol.points):
        assert a == b
    # the speed bounds of the row problem hold at the solution
    for pt in sol.points:
        assert mppt(pt.v_mps, TP).omega_pu - 1e-9 <= pt.omega_pu
        assert pt.omega_pu <= TP.omega_max_pu + 1e-12
        assert pt.p_mech_w <= TP.rated_power_w * (1.0 + 1e-9)


def test_reserve_grows_with_margin_and_beats_overspeed_start():
    base = base_case(8.0, 5, TP, WP)
    sols = {dm: solve_farm(_problem(5, 8.0, dm)) for dm in (0.05, 0.10)}
    assert sols[0.05].total_kinetic_pus > base.total_kinetic_pus
    assert sols[0.10].total_kinetic_pus > sols[0.05].total_kinetic_pus
    # the combined schedule stores at least the zero-pitch overspeed energy
    from windrow.deload import deload_overspeed

    overspeed_first = deload_overspeed(8.0, 0.05, TP)
    assert sols[0.05].points[0].e_kin_pus >= overspeed_first.e_kin_pus - 1e-9


def test_saturated_margins_store_identical_energy():
    # at 12 m/s every rotor of the row, including the freely tracking last
    # one, is pinned at the speed limit, so extra margin stores nothing
    sols = {dm: solve_farm(_problem(5, 12.0, dm)) for dm in (0.05, 0.10)}
    for sol in sols.values():
        assert all(pt.omega_pu == TP.omega_max_pu for pt in sol.points)
    assert sols[0.10].total_kinetic_pus == pytest.approx(
        sols[0.05].total_kinetic_pus, rel=1e-12
    )


def test_pitch_band_at_reserve_solution():
    # the combined schedule pitches the de-loaded rotors by roughly one to
    # two degrees while over-speeding them
    sol = solve_farm(_problem(5, 8.0, 0.05))
    for pt in sol.points[:-1]:
        assert 0.3 <= pt.beta_deg <= 3.0
        assert pt.omega_pu > mppt(pt.v_mps, TP).omega_pu


def test_solver_determinism_is_bitwise():
    a = solve_farm(_problem(4, 8.5, 0.08, seed=11))
    b = solve_farm(_problem(4, 8.5, 0.08, seed=11))
    assert a == b


def test_problem_validation():
    with pytest.raises(DomainError):
        FarmProblem(n=2, tp=TP, wp=WP, v_free_mps=8.0, dm=(0.1, 0.1))
    with pytest.raises(DomainError):
        FarmProblem(n=2, tp=TP, wp=WP, v_free_mps=8.0, dm=(0.1,))
    with pytest.raises(DomainError):
        FarmProblem(n=2, tp=TP, wp=WP, v_free_mps=8.0, dm=(1.2, 0.0))
    with pytest.raises(DomainError):
        expand_margins([0.1, 0.1], 3)


def test_sweep_isolates_failed_cells():
    cells = sweep(
        [2.0, 8.0],  # 2 m/s sits below cut-in and must fail cleanly
        [("case", 0.05)],
        2,
        TP,
        WP,
        SolverOptions(),
    )
    assert len(cells) == 2
    failed = [c for c in cells if c.solution is None]
    assert len(failed) == 1
    assert failed[0].v_free_mps == 2.0
    assert failed[0].error
    assert cells[1].solution is not None


def test_sweep_cardinality():
    vs = [7.0 + 0.5 * k for k in range(3)]
    cells = sweep(vs, [("a", 0.0), ("b", 0.05)], 2, TP, WP, SolverOptions())
    assert len(cells) == 6
    assert all(c.solution is not None for c in cells)
