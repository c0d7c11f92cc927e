"""Row-level kinetic-energy maximisation under de-loading constraints.

The decision variables are the rotor speeds of the de-loaded turbines; pitch
is eliminated along the power-equality manifold (for a given rotor speed the
smallest pitch holding power at ``(1 - dm) * P_opt`` is unique), and the last
turbine of the row always tracks maximum power at its own wake-adjusted
inflow.  Inflows are recomputed from the candidate set-points on every
objective evaluation, so the wake constraint holds by construction.  The
search itself is a multistart generalized pattern search: the problem is
non-convex with several local optima, and a handful of structured starts is
enough for a good-quality solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .aero import (
    InfeasiblePitchTarget,
    OperatingPoint,
    TurbineParams,
    mech_power,
    mppt_cached,
    operating_point,
    smallest_pitch_for_power,
)
from .deload import deload_overspeed
from .errors import DomainError, InfeasibleMarginError, InfeasibleProblemError
from .search import PatternSearchOptions, PatternSearchResult, pattern_search
from .wake import WakeParams, next_wind, propagate_row

P_OPT_REFERENCES = ("current", "base-case")


@dataclass(frozen=True)
class SolverOptions:
    """Pattern-search and multistart settings for one farm solve."""

    initial_mesh_pu: float = 0.1
    mesh_tol_pu: float = 1e-5
    max_evals_per_start: int = 10_000
    poll: str = "best"
    multistarts: int = 5
    seed: int = 0
    penalty: float = 1e6
    power_rel_tol: float = 1e-7
    p_opt_reference: str = "current"

    def __post_init__(self) -> None:
        if self.multistarts < 1:
            raise DomainError("multistarts must be >= 1")
        if self.p_opt_reference not in P_OPT_REFERENCES:
            raise DomainError(
                f"p_opt_reference must be one of {P_OPT_REFERENCES}"
            )


@dataclass(frozen=True)
class FarmProblem:
    """One instance of the row optimisation."""

    n: int
    tp: TurbineParams
    wp: WakeParams
    v_free_mps: float
    dm: tuple[float, ...]
    options: SolverOptions = SolverOptions()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if len(self.dm) != self.n:
            raise DomainError("dm must hold one margin per turbine")
        if any(not (0.0 <= d < 1.0) for d in self.dm):
            raise DomainError("margins must lie in [0, 1)")
        if self.dm[-1] != 0.0:
            raise DomainError(
                "the last turbine of the row maximises its power production "
                "and must carry margin 0"
            )


@dataclass(frozen=True)
class SolveDiagnostics:
    evaluations: int
    iterations: int
    final_mesh_pu: float
    feasible: bool
    start_labels: tuple[str, ...]
    best_start: str
    power_residual_rel: float
    wake_residual_mps: float
    budget_exhausted: bool


@dataclass(frozen=True)
class FarmSolution:
    """Per-turbine set-points of a solved row plus totals and diagnostics."""

    points: tuple[OperatingPoint, ...]
    total_kinetic_pus: float
    total_power_w: float
    diagnostics: SolveDiagnostics

    @property
    def inflows(self) -> tuple[float, ...]:
        return tuple(pt.v_mps for pt in self.points)

    @property
    def omegas_pu(self) -> tuple[float, ...]:
        return tuple(pt.omega_pu for pt in self.points)

    @property
    def betas_deg(self) -> tuple[float, ...]:
        return tuple(pt.beta_deg for pt in self.points)


@dataclass
class _RowEval:
    points: list[OperatingPoint]
    total_ek: float
    total_p: float
    violation: float


def deload_curve(
    v_inflow: float,
    dm: float,
    omega_pu: float,
    tp: TurbineParams,
    *,
    rel_tol: float = 1e-6,
) -> float:
    """Pitch that pins power to ``(1 - dm) * P_opt`` at a given rotor speed.

    Eliminates pitch as a free variable along the equality manifold.  Raises
    when no pitch achieves the target, which marks the rotor-speed bound for
    this margin.
    """
    base = mppt_cached(v_inflow, tp)
    if not (base.omega_pu - 1e-12 <= omega_pu <= tp.omega_max_pu + 1e-12):
        raise DomainError(
            f"omega={omega_pu} pu outside [{base.omega_pu}, {tp.omega_max_pu}]"
        )
    if not (0.0 <= dm < 1.0):
        raise DomainError("margin must lie in [0, 1)")
    target = (1.0 - dm) * base.p_mech_w
    try:
        return smallest_pitch_for_power(
            v_inflow, omega_pu, target, tp, rel_tol=rel_tol
        )
    except InfeasiblePitchTarget as exc:
        raise InfeasibleMarginError(str(exc)) from exc


def _pitch_or_best(
    v: float, omega_pu: float, target_w: float, tp: TurbineParams, rel_tol: float
) -> tuple[float, float]:
    """Pitch meeting the power target, or the closest achievable one.

    Returns ``(beta_deg, power_gap_w)`` with a zero gap when the target is
    met.  The fallback keeps the wake cascade evaluable at infeasible poll
    points so the search sees a smooth penalty instead of a cliff.
    """
    try:
        beta = smallest_pitch_for_power(v, omega_pu, target_w, tp, rel_tol=rel_tol)
        return beta, 0.0
    except InfeasiblePitchTarget:
        pass
    # No crossing: pick the pitch whose power comes closest to the target.
    best_beta, best_gap = 0.0, None
    beta = 0.0
    while beta <= tp.beta_max_deg:
        gap = abs(mech_power(v, omega_pu, beta, tp) - target_w)
        if best_gap is None or gap < best_gap:
            best_beta, best_gap = beta, gap
        beta += 0.25
    return best_beta, float(best_gap)


def _row_eval(
    omegas: Sequence[float],
    problem: FarmProblem,
    frozen_refs: Optional[tuple[float, ...]],
) -> _RowEval:
    """Cascade one candidate set of de-loaded rotor speeds down the row."""
    tp, wp = problem.tp, problem.wp
    rel_tol = problem.options.power_rel_tol
    v = problem.v_free_mps
    points: list[OperatingPoint] = []
    violation = 0.0
    for i in range(problem.n):
        base = mppt_cached(v, tp)
        if i == problem.n - 1:
            pt = base
        else:
            p_opt = base.p_mech_w if frozen_refs is None else frozen_refs[i]
            target = (1.0 - problem.dm[i]) * p_opt
            w = float(omegas[i])
            if w < base.omega_pu:
                violation += base.omega_pu - w
            beta, gap = _pitch_or_best(v, w, target, tp, rel_tol)
            violation += gap / tp.rated_power_w
            pt = operating_point(v, w, beta, tp)
        points.append(pt)
        if i < problem.n - 1:
            v = next_wind(problem.v_free_mps, v, pt.ct, wp)
    return _RowEval(
        points=points,
        total_ek=sum(pt.e_kin_pus for pt in points),
        total_p=sum(pt.p_mech_w for pt in points),
        violation=violation,
    )


def base_case(
    v_free: float, n: int, tp: TurbineParams, wp: WakeParams
) -> FarmSolution:
    """All turbines tracking maximum power at their wake-adjusted inflows.

    Defines the optimal-power references and the zero-margin kinetic-energy
    baseline.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    points: list[OperatingPoint] = []
    v = v_free
    for i in range(n):
        pt = mppt_cached(v, tp)
        points.append(pt)
        if i < n - 1:
            v = next_wind(v_free, v, pt.ct, wp)
    diag = SolveDiagnostics(
        evaluations=0,
        iterations=0,
        final_mesh_pu=0.0,
        feasible=True,
        start_labels=(),
        best_start="base-case",
        power_residual_rel=0.0,
        wake_residual_mps=0.0,
        budget_exhausted=False,
    )
    return FarmSolution(
        points=tuple(points),
        total_kinetic_pus=sum(pt.e_kin_pus for pt in points),
        total_power_w=sum(pt.p_mech_w for pt in points),
        diagnostics=diag,
    )


def _start_mppt(problem: FarmProblem, frozen_refs) -> np.ndarray:
    """Pitch-only start: tracking speed at each self-consistent inflow."""
    tp, wp = problem.tp, problem.wp
    xs: list[float] = []
    v = problem.v_free_mps
    for i in range(problem.n - 1):
        base = mppt_cached(v, tp)
        xs.append(base.omega_pu)
        p_opt = base.p_mech_w if frozen_refs is None else frozen_refs[i]
        target = (1.0 - problem.dm[i]) * p_opt
        beta, _ = _pitch_or_best(v, base.omega_pu, target, tp, 1e-9)
        pt = operating_point(v, base.omega_pu, beta, tp)
        v = next_wind(problem.v_free_mps, v, pt.ct, wp)
    return np.array(xs)


def _start_overspeed(problem: FarmProblem) -> np.ndarray:
    """Zero-pitch overspeed start, clamped to the speed limit where needed."""
    tp, wp = problem.tp, problem.wp
    xs: list[float] = []
    v = problem.v_free_mps
    for i in range(problem.n - 1):
        try:
            pt = deload_overspeed(v, problem.dm[i], tp)
        except InfeasibleMarginError:
            base = mppt_cached(v, tp)
            target = (1.0 - problem.dm[i]) * base.p_mech_w
            beta, _ = _pitch_or_best(v, tp.omega_max_pu, target, tp, 1e-9)
            pt = operating_point(v, tp.omega_max_pu, beta, tp)
        xs.append(pt.omega_pu)
        v = next_wind(problem.v_free_mps, v, pt.ct, wp)
    return np.array(xs)


def solve_farm(problem: FarmProblem) -> FarmSolution:
    """Maximise total rotor kinetic energy subject to the row constraints."""
    opts = problem.options
    base = base_case(problem.v_free_mps, problem.n, problem.tp, problem.wp)
    if problem.n == 1:
        return base

    frozen_refs = (
        tuple(pt.p_mech_w for pt in base.points[:-1])
        if opts.p_opt_reference == "base-case"
        else None
    )
    lower = np.minimum(
        np.array([pt.omega_pu for pt in base.points[:-1]]),
        problem.tp.omega_max_pu,
    )
    upper = np.full(problem.n - 1, problem.tp.omega_max_pu)

    def objective(x: np.ndarray) -> tuple[float, float]:
        ev = _row_eval(x, problem, frozen_refs)
        return ev.total_ek, ev.violation

    rng = np.random.default_rng(opts.seed)
    starts: list[tuple[str, np.ndarray]] = [
        ("mppt", _start_mppt(problem, frozen_refs)),
        ("overspeed", _start_overspeed(problem)),
        ("omega-max", upper.copy()),
    ]
    for k in range(max(0, opts.multistarts - len(starts))):
        starts.append((f"random-{k}", rng.uniform(lower, upper)))
    starts = starts[: opts.multistarts]

    ps_options = PatternSearchOptions(
        initial_mesh=opts.initial_mesh_pu,
        mesh_tol=opts.mesh_tol_pu,
        max_evals=opts.max_evals_per_start,
        poll=opts.poll,
        penalty=opts.penalty,
    )
    best: Optional[tuple[str, PatternSearchResult]] = None
    total_evals = 0
    total_iters = 0
    exhausted = False
    for label, x0 in starts:
        res = pattern_search(objective, x0, lower, upper, ps_options)
        total_evals += res.evaluations
        total_iters += res.iterations
        exhausted = exhausted or res.budget_exhausted
        if res.violation > 0.0:
            continue
        if best is None or res.score > best[1].score:
            best = (label, res)
    if best is None:
        raise InfeasibleProblemError(
            f"no feasible operating schedule found for margins {problem.dm} "
            f"at v={problem.v_free_mps} m/s"
        )

    label, res = best
    final = _row_eval(res.x, problem, frozen_refs)
    power_residual = 0.0
    for i, pt in enumerate(final.points[:-1]):
        ref = (
            mppt_cached(pt.v_mps, problem.tp).p_mech_w
            if frozen_refs is None
            else frozen_refs[i]
        )
        target = (1.0 - problem.dm[i]) * ref
        if target > 0.0:
            power_residual = max(power_residual, abs(pt.p_mech_w - target) / target)
    setpoints = [(pt.omega_pu, pt.beta_deg) for pt in final.points]
    re_inflow, _ = propagate_row(problem.v_free_mps, setpoints, problem.tp, problem.wp)
    wake_residual = max(
        abs(a - b.v_mps) for a, b in zip(re_inflow.v_mps, final.points)
    )
    diag = SolveDiagnostics(
        evaluations=total_evals,
        iterations=total_iters,
        final_mesh_pu=res.final_mesh,
        feasible=True,
        start_labels=tuple(lbl for lbl, _ in starts),
        best_start=label,
        power_residual_rel=power_residual,
        wake_residual_mps=wake_residual,
        budget_exhausted=exhausted,
    )
    return FarmSolution(
        points=tuple(final.points),
        total_kinetic_pus=final.total_ek,
        total_power_w=final.total_p,
        diagnostics=diag,
    )


@dataclass(frozen=True)
class SweepCell:
    case_id: str
    v_free_mps: float
    solution: Optional[FarmSolution]
    error: str = ""


def expand_margins(dm: float | Sequence[float], n: int) -> tuple[float, ...]:
    """A uniform margin applies to every turbine but the last."""
    if isinstance(dm, (int, float)):
        return tuple([float(dm)] * (n - 1) + [0.0]) if n > 1 else (0.0,)
    out = tuple(float(d) for d in dm)
    if len(out) != n:
        raise DomainError("per-turbine margin list must have length n")
    return out


def sweep(
    v_values: Sequence[float],
    dm_cases: Sequence[tuple[str, float | Sequence[float]]],
    n: int,
    tp: TurbineParams,
    wp: WakeParams,
    options: SolverOptions = SolverOptions(),
) -> list[SweepCell]:
    """Solve one farm problem per (wind speed, margin case) cell.

    Failed cells are recorded and the sweep continues.
    """
    if not v_values or not dm_cases:
        raise DomainError("sweep needs at least one wind speed and one case")
    cells: list[SweepCell] = []
    for case_id, dm in dm_cases:
        margins = expand_margins(dm, n)
        for v in v_values:
            problem = FarmProblem(
                n=n, tp=tp, wp=wp, v_free_mps=float(v), dm=margins, options=options
            )
            try:
                cells.append(SweepCell(case_id, float(v), solve_farm(problem)))
            except Exception as exc:  # noqa: BLE001 - cell-level isolation
                cells.append(SweepCell(case_id, float(v), None, error=str(exc)))
    return cells
