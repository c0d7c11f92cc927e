"""Study configuration: YAML schema, validation and typed settings.

The file is a nested key-value document.  Every key is optional and falls
back to a documented default; unknown keys are rejected so typos cannot
silently change a study.  Validation errors always name the offending key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

import yaml

from ..aero import TurbineParams
from ..errors import ConfigError, DomainError
from ..farmopt import SolverOptions, expand_margins
from ..governors import Ieeeg1Params, Tgov1Params
from ..gridsim import GridEvent, SyncGen
from ..wake import WakeParams

OUTPUT_FORMATS = ("csv", "svg-plot", "metrics-summary")
BALANCE_MODES = ("slack-gen", "strict")


@dataclass(frozen=True)
class CaseSpec:
    """One margin case of the study; ``dm`` holds one entry per turbine."""

    id: str
    dm: tuple[float, ...]


@dataclass(frozen=True)
class FarmSettings:
    n: int
    v_start: float
    v_stop: float
    v_step: float
    cases: tuple[CaseSpec, ...]
    solver: SolverOptions

    def v_values(self) -> list[float]:
        out: list[float] = []
        k = 0
        while True:
            v = self.v_start + k * self.v_step
            if v > self.v_stop + 1e-9:
                return out
            out.append(round(v, 9))
            k += 1


@dataclass(frozen=True)
class WindSettings:
    v_free_mps: float = 8.0
    row_count: int = 5
    droop_frac: float = 0.01
    droop_enabled: bool = True
    release_ramp_s: float = 0.0
    release_tau_s: float = 4.0
    release_tail_tau_s: float = 12.0
    release_blend_s: float = 2.0
    pitch_rate_deg_s: float = 8.0


@dataclass(frozen=True)
class GridSettings:
    gens: tuple[SyncGen, ...]
    wind: WindSettings
    events: tuple[GridEvent, ...]
    f_nominal_hz: float = 50.0
    system_base_mva: float = 130.0
    load_mw: float = 130.0
    load_damping: float = 1.0
    balance: str = "slack-gen"
    slack_gen: str = "SG-1"
    t_end_s: float = 60.0
    dt_s: float = 0.01


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    formats: tuple[str, ...] = OUTPUT_FORMATS


@dataclass(frozen=True)
class StudyConfig:
    seed: int
    turbine: TurbineParams
    wake: WakeParams
    farm: FarmSettings
    grid: GridSettings
    output: OutputSettings

    def case(self, case_id: str) -> CaseSpec:
        for c in self.farm.cases:
            if c.id == case_id:
                return c
        known = ", ".join(c.id for c in self.farm.cases)
        raise ConfigError(f"unknown case id {case_id!r} (known: {known})")


_DEFAULT_GENS = (
    dict(name="SG-1", kind="steam", p_out_mw=25.5, p_max_mw=45.0,
         governor="IEEEG1", droop=0.20, inertia_s=4.0),
    dict(name="SG-2", kind="gas", p_out_mw=45.0, p_max_mw=50.0,
         governor="TGOV1", droop=0.05, inertia_s=5.0),
    dict(name="SG-3", kind="gas", p_out_mw=20.0, p_max_mw=25.0,
         governor="TGOV1", droop=0.05, inertia_s=5.0),
)

_DEFAULT_EVENTS = (
    dict(t_s=10.0, kind="trip_gen", target="SG-3"),
    dict(t_s=10.0, kind="wind_mode_switch"),
)

_DEFAULT_CASES = (
    dict(id="case1", dm=0.0),
    dict(id="case2", dm=0.05),
    dict(id="case3", dm=0.10),
)


def _fail(path: str, message: str) -> ConfigError:
    return ConfigError(f"{path}: {message}")


def _section(raw: Any, path: str, allowed: Sequence[str]) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, Mapping):
        raise _fail(path, "must be a mapping")
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise _fail(path, f"unknown key(s) {unknown}; allowed: {sorted(allowed)}")
    return dict(raw)


def _num(raw: Mapping, key: str, path: str, default: float) -> float:
    val = raw.get(key, default)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise _fail(f"{path}.{key}", f"expected a number, got {val!r}")
    return float(val)


def _int(raw: Mapping, key: str, path: str, default: int) -> int:
    val = raw.get(key, default)
    if isinstance(val, bool) or not isinstance(val, int):
        raise _fail(f"{path}.{key}", f"expected an integer, got {val!r}")
    return val


def _bool(raw: Mapping, key: str, path: str, default: bool) -> bool:
    val = raw.get(key, default)
    if not isinstance(val, bool):
        raise _fail(f"{path}.{key}", f"expected a boolean, got {val!r}")
    return val


def _str(raw: Mapping, key: str, path: str, default: str) -> str:
    val = raw.get(key, default)
    if not isinstance(val, str):
        raise _fail(f"{path}.{key}", f"expected a string, got {val!r}")
    return val


def _build_turbine(raw: Any) -> TurbineParams:
    path = "turbine"
    sec = _section(raw, path, [
        "radius_m", "air_density", "inertia_s", "rated_power_w",
        "omega_min_pu", "omega_max_pu", "omega_rated_radps", "beta_max_deg",
        "v_cutin_mps", "v_cutout_mps", "cp_coeffs",
    ])
    defaults = TurbineParams()
    coeffs = sec.get("cp_coeffs", list(defaults.cp_coeffs))
    if (not isinstance(coeffs, Sequence)) or isinstance(coeffs, str) or len(coeffs) != 6:
        raise _fail(f"{path}.cp_coeffs", "expected a list of six numbers")
    try:
        return TurbineParams(
            radius_m=_num(sec, "radius_m", path, defaults.radius_m),
            air_density=_num(sec, "air_density", path, defaults.air_density),
            inertia_s=_num(sec, "inertia_s", path, defaults.inertia_s),
            rated_power_w=_num(sec, "rated_power_w", path, defaults.rated_power_w),
            omega_min_pu=_num(sec, "omega_min_pu", path, defaults.omega_min_pu),
            omega_max_pu=_num(sec, "omega_max_pu", path, defaults.omega_max_pu),
            omega_rated_radps=_num(sec, "omega_rated_radps", path,
                                   defaults.omega_rated_radps),
            beta_max_deg=_num(sec, "beta_max_deg", path, defaults.beta_max_deg),
            v_cutin_mps=_num(sec, "v_cutin_mps", path, defaults.v_cutin_mps),
            v_cutout_mps=_num(sec, "v_cutout_mps", path, defaults.v_cutout_mps),
            cp_coeffs=tuple(float(c) for c in coeffs),
        )
    except DomainError as exc:
        raise _fail(path, str(exc)) from exc


def _build_wake(raw: Any) -> WakeParams:
    sec = _section(raw, "wake", ["k_prime", "k"])
    defaults = WakeParams()
    try:
        return WakeParams(
            k_prime=_num(sec, "k_prime", "wake", defaults.k_prime),
            k=_num(sec, "k", "wake", defaults.k),
        )
    except DomainError as exc:
        raise _fail("wake", str(exc)) from exc


def _build_case(raw: Any, path: str, n: int) -> CaseSpec:
    sec = _section(raw, path, ["id", "dm"])
    if "id" not in sec:
        raise _fail(f"{path}.id", "every case needs an id")
    cid = _str(sec, "id", path, "")
    dm_raw = sec.get("dm", 0.0)
    if isinstance(dm_raw, (int, float)) and not isinstance(dm_raw, bool):
        margins = expand_margins(float(dm_raw), n)
    elif isinstance(dm_raw, Sequence) and not isinstance(dm_raw, str):
        vals = []
        for j, d in enumerate(dm_raw):
            if isinstance(d, bool) or not isinstance(d, (int, float)):
                raise _fail(f"{path}.dm[{j}]", f"expected a number, got {d!r}")
            vals.append(float(d))
        if len(vals) != n:
            raise _fail(f"{path}.dm", f"expected {n} entries, got {len(vals)}")
        margins = tuple(vals)
    else:
        raise _fail(f"{path}.dm", "expected a number or a list of numbers")
    for j, d in enumerate(margins):
        if not (0.0 <= d < 1.0):
            raise _fail(f"{path}.dm[{j}]", "margins must lie in [0, 1)")
    if margins[-1] != 0.0:
        raise _fail(
            f"{path}.dm",
            "the last turbine of the row maximises its power production "
            "without de-loading; its margin must be 0",
        )
    return CaseSpec(id=cid, dm=margins)


def _build_solver(raw: Any, seed: int) -> SolverOptions:
    path = "farm.solver"
    sec = _section(raw, path, [
        "initial_mesh_pu", "mesh_tol_pu", "max_evals_per_start", "poll",
        "multistarts", "penalty", "power_rel_tol", "p_opt_reference",
    ])
    d = SolverOptions()
    try:
        return SolverOptions(
            initial_mesh_pu=_num(sec, "initial_mesh_pu", path, d.initial_mesh_pu),
            mesh_tol_pu=_num(sec, "mesh_tol_pu", path, d.mesh_tol_pu),
            max_evals_per_start=_int(sec, "max_evals_per_start", path,
                                     d.max_evals_per_start),
            poll=_str(sec, "poll", path, d.poll),
            multistarts=_int(sec, "multistarts", path, d.multistarts),
            seed=seed,
            penalty=_num(sec, "penalty", path, d.penalty),
            power_rel_tol=_num(sec, "power_rel_tol", path, d.power_rel_tol),
            p_opt_reference=_str(sec, "p_opt_reference", path, d.p_opt_reference),
        )
    except DomainError as exc:
        raise _fail(path, str(exc)) from exc


def _build_farm(raw: Any, seed: int) -> FarmSettings:
    path = "farm"
    sec = _section(raw, path, [
        "n", "v_start", "v_stop", "v_step", "cases", "solver",
    ])
    n = _int(sec, "n", path, 5)
    if n < 1:
        raise _fail(f"{path}.n", "must be >= 1")
    cases_raw = sec.get("cases", [dict(c) for c in _DEFAULT_CASES])
    if not isinstance(cases_raw, Sequence) or isinstance(cases_raw, str):
        raise _fail(f"{path}.cases", "expected a list of cases")
    cases = tuple(
        _build_case(c, f"{path}.cases[{i}]", n) for i, c in enumerate(cases_raw)
    )
    if not cases:
        raise _fail(f"{path}.cases", "at least one case is required")
    ids = [c.id for c in cases]
    if len(set(ids)) != len(ids):
        raise _fail(f"{path}.cases", "case ids must be unique")
    v_start = _num(sec, "v_start", path, 7.0)
    v_stop = _num(sec, "v_stop", path, 12.0)
    v_step = _num(sec, "v_step", path, 0.5)
    if v_step <= 0.0 or v_stop < v_start:
        raise _fail(f"{path}.v_step", "need v_step > 0 and v_stop >= v_start")
    return FarmSettings(
        n=n, v_start=v_start, v_stop=v_stop, v_step=v_step,
        cases=cases, solver=_build_solver(sec.get("solver"), seed),
    )


def _build_gov_params(raw: Any, path: str, governor: str, droop: float,
                      p_max_pu: float):
    if raw is None:
        return None
    if governor == "TGOV1":
        sec = _section(raw, path, ["t_gate1_s", "t_gate2_s", "t_lead_s", "t_lag_s"])
        d = Tgov1Params(droop_frac=droop)
        return Tgov1Params(
            droop_frac=droop,
            t_gate1_s=_num(sec, "t_gate1_s", path, d.t_gate1_s),
            t_gate2_s=_num(sec, "t_gate2_s", path, d.t_gate2_s),
            t_lead_s=_num(sec, "t_lead_s", path, d.t_lead_s),
            t_lag_s=_num(sec, "t_lag_s", path, d.t_lag_s),
            p_max_pu=p_max_pu,
        )
    sec = _section(raw, path, [
        "t_servo_s", "t_chest_s", "t_reheat_s", "t_cross_s",
        "frac_hp", "frac_ip", "frac_lp",
    ])
    d = Ieeeg1Params(droop_frac=droop)
    return Ieeeg1Params(
        droop_frac=droop,
        t_servo_s=_num(sec, "t_servo_s", path, d.t_servo_s),
        t_chest_s=_num(sec, "t_chest_s", path, d.t_chest_s),
        t_reheat_s=_num(sec, "t_reheat_s", path, d.t_reheat_s),
        t_cross_s=_num(sec, "t_cross_s", path, d.t_cross_s),
        frac_hp=_num(sec, "frac_hp", path, d.frac_hp),
        frac_ip=_num(sec, "frac_ip", path, d.frac_ip),
        frac_lp=_num(sec, "frac_lp", path, d.frac_lp),
        p_max_pu=p_max_pu,
    )


def _build_gen(raw: Any, path: str) -> SyncGen:
    sec = _section(raw, path, [
        "name", "kind", "p_out_mw", "p_max_mw", "governor", "droop",
        "inertia_s", "rating_mva", "governor_params",
    ])
    if "name" not in sec:
        raise _fail(f"{path}.name", "every generator needs a name")
    name = _str(sec, "name", path, "")
    kind = _str(sec, "kind", path, "gas")
    if kind not in ("steam", "gas"):
        raise _fail(f"{path}.kind", "must be 'steam' or 'gas'")
    governor = _str(sec, "governor", path, "TGOV1")
    droop = _num(sec, "droop", path, 0.05)
    p_max = _num(sec, "p_max_mw", path, 0.0)
    rating = sec.get("rating_mva")
    if rating is not None and (isinstance(rating, bool)
                               or not isinstance(rating, (int, float))):
        raise _fail(f"{path}.rating_mva", "expected a number")
    rating_f = float(rating) if rating is not None else p_max
    try:
        return SyncGen(
            name=name,
            kind=kind,
            p_out_mw=_num(sec, "p_out_mw", path, 0.0),
            p_max_mw=p_max,
            governor=governor,
            droop_frac=droop,
            inertia_s=_num(sec, "inertia_s", path, 4.0 if kind == "steam" else 5.0),
            rating_mva=None if rating is None else float(rating),
            gov_params=_build_gov_params(
                sec.get("governor_params"), f"{path}.governor_params",
                governor, droop, p_max / rating_f if rating_f else 1.0,
            ),
        )
    except DomainError as exc:
        raise _fail(path, str(exc)) from exc


def _build_event(raw: Any, path: str) -> GridEvent:
    sec = _section(raw, path, ["t_s", "kind", "target"])
    kind = _str(sec, "kind", path, "")
    target = sec.get("target")
    if target is not None and not isinstance(target, str):
        raise _fail(f"{path}.target", "expected a string")
    try:
        return GridEvent(t_s=_num(sec, "t_s", path, 0.0), kind=kind, target=target)
    except DomainError as exc:
        raise _fail(path, str(exc)) from exc


def _build_wind(raw: Any) -> WindSettings:
    path = "grid.wind"
    sec = _section(raw, path, [
        "v_free_mps", "row_count", "droop", "droop_enabled",
        "release_ramp_s", "release_tau_s", "release_tail_tau_s",
        "release_blend_s", "pitch_rate_deg_s",
    ])
    d = WindSettings()
    return WindSettings(
        v_free_mps=_num(sec, "v_free_mps", path, d.v_free_mps),
        row_count=_int(sec, "row_count", path, d.row_count),
        droop_frac=_num(sec, "droop", path, d.droop_frac),
        droop_enabled=_bool(sec, "droop_enabled", path, d.droop_enabled),
        release_ramp_s=_num(sec, "release_ramp_s", path, d.release_ramp_s),
        release_tau_s=_num(sec, "release_tau_s", path, d.release_tau_s),
        release_tail_tau_s=_num(sec, "release_tail_tau_s", path,
                                d.release_tail_tau_s),
        release_blend_s=_num(sec, "release_blend_s", path, d.release_blend_s),
        pitch_rate_deg_s=_num(sec, "pitch_rate_deg_s", path, d.pitch_rate_deg_s),
    )


def _build_grid(raw: Any) -> GridSettings:
    path = "grid"
    sec = _section(raw, path, [
        "f_nominal_hz", "system_base_mva", "load_mw", "load_damping",
        "balance", "slack_gen", "t_end_s", "dt_s", "generators", "wind",
        "events",
    ])
    gens_raw = sec.get("generators", [dict(g) for g in _DEFAULT_GENS])
    if not isinstance(gens_raw, Sequence) or isinstance(gens_raw, str):
        raise _fail(f"{path}.generators", "expected a list of generators")
    gens = tuple(
        _build_gen(g, f"{path}.generators[{i}]") for i, g in enumerate(gens_raw)
    )
    events_raw = sec.get("events", [dict(e) for e in _DEFAULT_EVENTS])
    if not isinstance(events_raw, Sequence) or isinstance(events_raw, str):
        raise _fail(f"{path}.events", "expected a list of events")
    events = tuple(
        _build_event(e, f"{path}.events[{i}]") for i, e in enumerate(events_raw)
    )
    balance = _str(sec, "balance", path, "slack-gen")
    if balance not in BALANCE_MODES:
        raise _fail(f"{path}.balance", f"must be one of {BALANCE_MODES}")
    d = GridSettings(gens=gens, wind=_build_wind(sec.get("wind")), events=events)
    return GridSettings(
        gens=gens,
        wind=d.wind,
        events=events,
        f_nominal_hz=_num(sec, "f_nominal_hz", path, d.f_nominal_hz),
        system_base_mva=_num(sec, "system_base_mva", path, d.system_base_mva),
        load_mw=_num(sec, "load_mw", path, d.load_mw),
        load_damping=_num(sec, "load_damping", path, d.load_damping),
        balance=balance,
        slack_gen=_str(sec, "slack_gen", path, d.slack_gen),
        t_end_s=_num(sec, "t_end_s", path, d.t_end_s),
        dt_s=_num(sec, "dt_s", path, d.dt_s),
    )


def _build_output(raw: Any) -> OutputSettings:
    path = "output"
    sec = _section(raw, path, ["directory", "formats"])
    formats_raw = sec.get("formats", list(OUTPUT_FORMATS))
    if not isinstance(formats_raw, Sequence) or isinstance(formats_raw, str):
        raise _fail(f"{path}.formats", "expected a list")
    for f in formats_raw:
        if f not in OUTPUT_FORMATS:
            raise _fail(f"{path}.formats", f"unknown format {f!r}; "
                        f"allowed: {list(OUTPUT_FORMATS)}")
    return OutputSettings(
        directory=_str(sec, "directory", path, "out"),
        formats=tuple(formats_raw),
    )


def parse_config(raw: Any) -> StudyConfig:
    """Validate an already-parsed configuration mapping."""
    top = _section(raw, "config", ["seed", "turbine", "wake", "farm", "grid",
                                   "output"])
    seed = _int(top, "seed", "config", 0)
    farm = _build_farm(top.get("farm"), seed)
    grid = _build_grid(top.get("grid"))
    return StudyConfig(
        seed=seed,
        turbine=_build_turbine(top.get("turbine")),
        wake=_build_wake(top.get("wake")),
        farm=farm,
        grid=grid,
        output=_build_output(top.get("output")),
    )


def load_config(path: Union[str, Path]) -> StudyConfig:
    """Parse and validate a study file; every default documented in-repo."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {p} does not parse: {exc}") from exc
    if raw is None:
        raw = {}
    return parse_config(raw)


def bundled_study_path() -> Path:
    """Path of the packaged five-by-five study configuration."""
    return Path(resources.files("windrow").joinpath("data/baseline_study.yaml"))
