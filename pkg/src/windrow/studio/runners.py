"""Implementations behind the CLI subcommands.

Each runner returns a process exit code: 0 on success, 1 when a case is
infeasible or a simulation aborts (configuration errors raise ConfigError
and exit 2 in the CLI).  All file emission funnels through here so the
byte-determinism contract has a single owner.
"""

from __future__ import annotations

import dataclasses
import io
from pathlib import Path
from typing import Optional, Sequence

from ..errors import ConfigError, InfeasibleProblemError, SimulationError
from ..farmopt import (
    FarmProblem,
    FarmSolution,
    SweepCell,
    base_case,
    solve_farm,
    sweep,
)
from ..gridsim import (
    GridScenario,
    NadirMetrics,
    SimTrace,
    SyncGen,
    WindRow,
    nadir_metrics,
    simulate,
)
from .config import CaseSpec, StudyConfig
from .outputs import Series, Table, read_table, write_chart

SOLUTION_COLUMNS = [
    "case_id", "v_free", "turbine_index", "omega_pu", "beta_deg",
    "v_inflow", "cp", "ct", "p_mech_w", "e_kin_pus", "error",
]


def solution_rows(case_id: str, v_free: float, sol: FarmSolution) -> list[list]:
    rows: list[list] = []
    for i, pt in enumerate(sol.points, start=1):
        rows.append([
            case_id, v_free, i, pt.omega_pu, pt.beta_deg, pt.v_mps,
            pt.cp, pt.ct, pt.p_mech_w, pt.e_kin_pus, "",
        ])
    rows.append([
        case_id, v_free, "total", "", "", "", "", "",
        sol.total_power_w, sol.total_kinetic_pus, "",
    ])
    return rows


def cells_table(cells: Sequence[SweepCell]) -> Table:
    table = Table(columns=list(SOLUTION_COLUMNS))
    for cell in cells:
        if cell.solution is None:
            table.append([
                cell.case_id, cell.v_free_mps, "error", "", "", "", "", "",
                "", "", cell.error,
            ])
        else:
            for row in solution_rows(cell.case_id, cell.v_free_mps, cell.solution):
                table.append(row)
    return table


def _roundtrip(table: Table) -> Table:
    """Re-parse a table through its CSV text; charts plot parsed values."""
    text = table.to_csv_text()
    buf = io.StringIO(text)
    import csv as _csv

    reader = _csv.reader(buf)
    header = next(reader)
    out = Table(columns=header)
    from .outputs import _parse_cell

    for row in reader:
        out.append([_parse_cell(c) for c in row])
    return out


def _sweep_series(table: Table, case_ids: Sequence[str]):
    """Per-case chart series from a parsed sweep table."""
    idx = {name: table.columns.index(name) for name in table.columns}
    omega, beta, kinetic, power = [], [], [], []
    for cid in case_ids:
        first, totals = [], []
        for row in table.rows:
            if row[idx["case_id"]] != cid or row[idx["error"]] != "":
                continue
            if row[idx["turbine_index"]] == 1:
                first.append(row)
            elif row[idx["turbine_index"]] == "total":
                totals.append(row)
        if not first:
            continue
        vs1 = tuple(r[idx["v_free"]] for r in first)
        vst = tuple(r[idx["v_free"]] for r in totals)
        omega.append(Series(f"{cid} (WT1)", vs1,
                            tuple(r[idx["omega_pu"]] for r in first)))
        beta.append(Series(f"{cid} (WT1)", vs1,
                           tuple(r[idx["beta_deg"]] for r in first)))
        kinetic.append(Series(cid, vst,
                              tuple(r[idx["e_kin_pus"]] for r in totals)))
        power.append(Series(cid, vst,
                            tuple(r[idx["p_mech_w"]] / 1e6 for r in totals)))
    return omega, beta, kinetic, power


def cmd_optimize(
    config: StudyConfig,
    v: Optional[float],
    case_id: Optional[str],
    out_dir: Optional[str] = None,
) -> int:
    """Solve one (wind speed, case) instance and emit its solution."""
    case = config.case(case_id) if case_id else config.farm.cases[0]
    v_free = v if v is not None else config.grid.wind.v_free_mps
    problem = FarmProblem(
        n=config.farm.n, tp=config.turbine, wp=config.wake,
        v_free_mps=v_free, dm=case.dm, options=config.farm.solver,
    )
    try:
        sol = solve_farm(problem)
    except InfeasibleProblemError as exc:
        print(f"infeasible: {exc}")
        return 1
    out = _prepare_out(config, out_dir)
    table = Table(columns=list(SOLUTION_COLUMNS))
    for row in solution_rows(case.id, v_free, sol):
        table.append(row)
    if "csv" in config.output.formats:
        table.write_csv(out / f"solution_{case.id}.csv")
    print(f"case {case.id} at v={v_free:g} m/s "
          f"(margins {', '.join(f'{d:g}' for d in case.dm)})")
    print(f"{'WT':>3} {'omega_pu':>9} {'beta_deg':>9} {'v_in':>7} "
          f"{'P_MW':>7} {'E_k':>7}")
    for i, pt in enumerate(sol.points, start=1):
        print(f"{i:>3} {pt.omega_pu:>9.5f} {pt.beta_deg:>9.4f} "
              f"{pt.v_mps:>7.3f} {pt.p_mech_w / 1e6:>7.4f} "
              f"{pt.e_kin_pus:>7.4f}")
    print(f"total power {sol.total_power_w / 1e6:.4f} MW, "
          f"total kinetic energy {sol.total_kinetic_pus:.4f} pu*s "
          f"(best start: {sol.diagnostics.best_start}, "
          f"{sol.diagnostics.evaluations} evaluations)")
    return 0


def cmd_sweep(
    config: StudyConfig,
    out_dir: Optional[str] = None,
    case_ids: Optional[Sequence[str]] = None,
) -> int:
    """Sweep wind speed for every case; emit the table and four charts."""
    cases = _select_cases(config, case_ids)
    cells = sweep(
        config.farm.v_values(),
        [(c.id, c.dm) for c in cases],
        config.farm.n,
        config.turbine,
        config.wake,
        config.farm.solver,
    )
    out = _prepare_out(config, out_dir)
    table = cells_table(cells)
    if "csv" in config.output.formats:
        table.write_csv(out / "sweep.csv")
    if "svg-plot" in config.output.formats:
        parsed = _roundtrip(table)
        omega, beta, kinetic, power = _sweep_series(parsed, [c.id for c in cases])
        if omega:
            write_chart(out / "sweep_omega.svg", omega,
                        "First-turbine rotor speed vs free wind",
                        "free wind speed (m/s)", "rotor speed (pu)")
            write_chart(out / "sweep_beta.svg", beta,
                        "First-turbine pitch vs free wind",
                        "free wind speed (m/s)", "pitch angle (deg)")
            write_chart(out / "sweep_kinetic.svg", kinetic,
                        "Row kinetic energy vs free wind",
                        "free wind speed (m/s)", "kinetic energy (pu*s)")
            write_chart(out / "sweep_power.svg", power,
                        "Row power vs free wind",
                        "free wind speed (m/s)", "row power (MW)")
    failed = [c for c in cells if c.solution is None]
    for cell in failed:
        print(f"cell ({cell.case_id}, v={cell.v_free_mps:g}) failed: {cell.error}")
    print(f"sweep: {len(cells) - len(failed)}/{len(cells)} cells solved "
          f"-> {out}")
    return 0 if len(failed) < len(cells) else 1


def build_wind_row(config: StudyConfig, case: CaseSpec) -> WindRow:
    """Reserve and optimal schedules of one row for a margin case."""
    w = config.grid.wind
    problem = FarmProblem(
        n=config.farm.n, tp=config.turbine, wp=config.wake,
        v_free_mps=w.v_free_mps, dm=case.dm, options=config.farm.solver,
    )
    sub = solve_farm(problem)
    opt = base_case(w.v_free_mps, config.farm.n, config.turbine, config.wake)
    return WindRow(
        sub=sub, opt=opt, dm=case.dm, tp=config.turbine, wp=config.wake,
        v_free_mps=w.v_free_mps, row_count=w.row_count,
        droop_frac=w.droop_frac, droop_enabled=w.droop_enabled,
        release_ramp_s=w.release_ramp_s, release_tau_s=w.release_tau_s,
        release_tail_tau_s=w.release_tail_tau_s,
        release_blend_s=w.release_blend_s,
        pitch_rate_deg_s=w.pitch_rate_deg_s,
    )


def build_scenario(config: StudyConfig, case: CaseSpec) -> GridScenario:
    """Assemble the grid scenario for one case, balancing via the slack unit."""
    g = config.grid
    wind = build_wind_row(config, case)
    gens = list(g.gens)
    if g.balance == "slack-gen":
        others = sum(x.p_out_mw for x in gens if x.name != g.slack_gen)
        slack_target = g.load_mw - wind.schedule_p_mw() - others
        found = False
        for i, gen in enumerate(gens):
            if gen.name == g.slack_gen:
                if not (0.0 <= slack_target <= gen.p_max_mw):
                    raise ConfigError(
                        f"grid.slack_gen: balancing needs {slack_target:.3f} MW "
                        f"from {gen.name}, outside [0, {gen.p_max_mw}]"
                    )
                gens[i] = dataclasses.replace(gen, p_out_mw=slack_target)
                found = True
                break
        if not found:
            raise ConfigError(
                f"grid.slack_gen: {g.slack_gen!r} is not a configured generator"
            )
    return GridScenario(
        gens=tuple(gens),
        wind=wind,
        load_mw=g.load_mw,
        events=g.events,
        f_nominal_hz=g.f_nominal_hz,
        system_base_mva=g.system_base_mva,
        load_damping=g.load_damping,
        t_end_s=g.t_end_s,
        dt_s=g.dt_s,
    )


def trace_table(trace: SimTrace) -> Table:
    n = trace.omega_pu.shape[0]
    columns = (
        ["t_s", "f_hz"]
        + [f"p_{name}_mw" for name in trace.gen_p_mw]
        + ["p_wind_mw"]
        + [f"omega_{i}_pu" for i in range(1, n + 1)]
        + [f"beta_{i}_deg" for i in range(1, n + 1)]
    )
    table = Table(columns=columns)
    gens = list(trace.gen_p_mw.values())
    for k in range(trace.t_s.size):
        row: list = [float(trace.t_s[k]), float(trace.f_hz[k])]
        row += [float(series[k]) for series in gens]
        row.append(float(trace.wind_p_mw[k]))
        row += [float(trace.omega_pu[i, k]) for i in range(n)]
        row += [float(trace.beta_deg[i, k]) for i in range(n)]
        table.append(row)
    return table


def metrics_summary(
    case_metrics: Sequence[tuple[str, NadirMetrics, SimTrace]],
) -> str:
    lines: list[str] = []
    for cid, metrics, trace in case_metrics:
        lines.append(f"case: {cid}")
        if metrics.present:
            lines.append(f"  nadir_hz: {metrics.nadir_hz:.4f}")
            lines.append(f"  nadir_time_s: {metrics.nadir_time_s:.2f}")
            if metrics.delay_vs_reference_s is not None:
                lines.append(
                    f"  delay_vs_reference_s: {metrics.delay_vs_reference_s:.2f}"
                )
            else:
                lines.append("  delay_vs_reference_s: n/a")
        else:
            lines.append("  nadir: absent (no under-frequency excursion)")
        lines.append(f"  f_max_hz: {float(trace.f_hz.max()):.4f}")
        lines.append(f"  f_end_hz: {float(trace.f_hz[-1]):.4f}")
        lines.append("")
    return "\n".join(lines)


def cmd_simulate(
    config: StudyConfig,
    out_dir: Optional[str] = None,
    case_ids: Optional[Sequence[str]] = None,
) -> int:
    """Simulate the generation-loss event for each case and emit traces.

    The first selected case serves as the nadir-delay reference.
    """
    cases = _select_cases(config, case_ids)
    out = _prepare_out(config, out_dir)
    traces: list[tuple[str, SimTrace]] = []
    for case in cases:
        try:
            scenario = build_scenario(config, case)
            traces.append((case.id, simulate(scenario)))
        except (InfeasibleProblemError, SimulationError) as exc:
            print(f"case {case.id} failed: {exc}")
            return 1
    reference = traces[0][1] if traces else None
    rows: list[tuple[str, NadirMetrics, SimTrace]] = []
    overlay: list[Series] = []
    for i, (cid, trace) in enumerate(traces):
        metrics = nadir_metrics(trace, None if i == 0 else reference)
        rows.append((cid, metrics, trace))
        table = trace_table(trace)
        if "csv" in config.output.formats:
            table.write_csv(out / f"trace_{cid}.csv")
        parsed = _roundtrip(table)
        overlay.append(Series(
            cid,
            tuple(parsed.column("t_s")),
            tuple(parsed.column("f_hz")),
        ))
        if "svg-plot" in config.output.formats:
            n = trace.omega_pu.shape[0]
            rotor = [
                Series(
                    f"WT{j}",
                    tuple(parsed.column("t_s")),
                    tuple(parsed.column(f"omega_{j}_pu")),
                )
                for j in range(1, n + 1)
            ]
            write_chart(out / f"rotor_speed_{cid}.svg", rotor,
                        f"Rotor speeds during the event ({cid})",
                        "time (s)", "rotor speed (pu)")
    if "svg-plot" in config.output.formats and overlay:
        write_chart(out / "frequency_overlay.svg", overlay,
                    "System frequency during generation loss",
                    "time (s)", "frequency (Hz)")
    summary = metrics_summary(rows)
    if "metrics-summary" in config.output.formats:
        (out / "metrics.txt").write_text(summary)
    print(summary)
    return 0


def _select_cases(
    config: StudyConfig, case_ids: Optional[Sequence[str]]
) -> list[CaseSpec]:
    if not case_ids:
        return list(config.farm.cases)
    return [config.case(cid) for cid in case_ids]


def _prepare_out(config: StudyConfig, out_dir: Optional[str]) -> Path:
    out = Path(out_dir) if out_dir else Path(config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out
