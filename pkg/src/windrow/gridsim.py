"""Copper-plate frequency simulation of a small system with a wind row.

Frequency is a single global state driven by the aggregate swing equation;
governor-equipped synchronous machines and one simulated turbine row (scaled
by the number of identical rows) inject power against a constant load.
Events trip generators or switch the de-loaded turbines from their reserve
schedule to optimal tracking, releasing the stored rotor kinetic energy.

Rotor dynamics use the torque form d(omega)/dt = (P_aero - P_elec)/(2*H*omega)
so that the energy bookkeeping integral(P_elec - P_aero) dt equals the drop
in H*omega^2 identically.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .aero import TurbineParams, cp_surface, ct_from_cp, power_from_cp, tip_speed_ratio
from .errors import DomainError, SimulationError
from .farmopt import FarmSolution
from .governors import (
    Ieeeg1Params,
    Ieeeg1State,
    Tgov1Params,
    Tgov1State,
    ieeeg1_derivs,
    ieeeg1_init,
    ieeeg1_output,
    tgov1_derivs,
    tgov1_init,
    tgov1_output,
)
from .wake import WakeParams, next_wind

GOVERNOR_TYPES = ("TGOV1", "IEEEG1")
EVENT_KINDS = ("trip_gen", "wind_mode_switch")

_BETA_SERVO_S = 0.1        # smoothing constant of the pitch rate limiter
_OMEGA_OVER_MARGIN = 0.05  # abort margin above the rotor speed limit, pu
_OMEGA_UNDER_MARGIN = 0.01


@dataclass(frozen=True)
class SyncGen:
    """One governor-equipped synchronous machine."""

    name: str
    kind: str  # "steam" | "gas"
    p_out_mw: float
    p_max_mw: float
    governor: str
    droop_frac: float
    inertia_s: float
    rating_mva: Optional[float] = None
    gov_params: Union[Tgov1Params, Ieeeg1Params, None] = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_out_mw <= self.p_max_mw):
            raise DomainError(f"{self.name}: require 0 <= p_out <= p_max")
        if self.droop_frac <= 0.0:
            raise DomainError(f"{self.name}: droop must be > 0")
        if self.inertia_s <= 0.0:
            raise DomainError(f"{self.name}: inertia must be > 0")
        if self.governor not in GOVERNOR_TYPES:
            raise DomainError(f"{self.name}: unknown governor {self.governor!r}")

    @property
    def rating(self) -> float:
        return self.rating_mva if self.rating_mva is not None else self.p_max_mw

    def governor_params(self) -> Union[Tgov1Params, Ieeeg1Params]:
        if self.gov_params is not None:
            return self.gov_params
        p_max_pu = self.p_max_mw / self.rating
        if self.governor == "TGOV1":
            return Tgov1Params(droop_frac=self.droop_frac, p_max_pu=p_max_pu)
        return Ieeeg1Params(droop_frac=self.droop_frac, p_max_pu=p_max_pu)


@dataclass(frozen=True)
class WindRow:
    """One simulated row of turbines standing in for all identical rows."""

    sub: FarmSolution
    opt: FarmSolution
    dm: tuple[float, ...]
    tp: TurbineParams
    wp: WakeParams
    v_free_mps: float
    row_count: int = 1
    droop_frac: float = 0.01
    droop_enabled: bool = True
    release_ramp_s: float = 0.0
    release_tau_s: float = 4.0
    release_tail_tau_s: float = 12.0
    release_blend_s: float = 2.0
    pitch_rate_deg_s: float = 8.0

    def __post_init__(self) -> None:
        if len(self.sub.points) != len(self.opt.points):
            raise DomainError("reserve and optimal schedules must share n")
        if len(self.dm) != len(self.sub.points):
            raise DomainError("dm must hold one margin per turbine")
        if self.row_count < 1:
            raise DomainError("row_count must be >= 1")
        if self.droop_frac <= 0.0:
            raise DomainError("wind droop must be > 0")
        if self.release_tau_s <= 0.0 or self.release_tail_tau_s <= 0.0:
            raise DomainError("release time constants must be > 0")
        if self.release_blend_s <= 0.0:
            raise DomainError("release_blend_s must be > 0")

    @property
    def n(self) -> int:
        return len(self.sub.points)

    @property
    def deloaded(self) -> tuple[bool, ...]:
        return tuple(d > 0.0 for d in self.dm)

    def schedule_p_mw(self) -> float:
        """Farm electrical output on the reserve schedule, megawatts."""
        return self.row_count * self.sub.total_power_w / 1e6


@dataclass(frozen=True)
class GridEvent:
    t_s: float
    kind: str
    target: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise DomainError(f"unknown event kind {self.kind!r}")
        if self.t_s < 0.0:
            raise DomainError("event time must be >= 0")


@dataclass(frozen=True)
class GridScenario:
    gens: tuple[SyncGen, ...]
    wind: WindRow
    load_mw: float
    events: tuple[GridEvent, ...] = ()
    f_nominal_hz: float = 50.0
    system_base_mva: float = 130.0
    load_damping: float = 1.0
    t_end_s: float = 60.0
    dt_s: float = 0.01

    def __post_init__(self) -> None:
        if self.dt_s <= 0.0 or self.t_end_s <= 0.0:
            raise DomainError("require dt_s > 0 and t_end_s > 0")
        names = [g.name for g in self.gens]
        if len(set(names)) != len(names):
            raise DomainError("generator names must be unique")
        for ev in self.events:
            if ev.kind == "trip_gen" and ev.target not in names:
                raise DomainError(f"event targets unknown generator {ev.target!r}")
        imbalance = self.initial_imbalance_mw()
        if abs(imbalance) > 1e-6 * self.system_base_mva:
            raise DomainError(
                f"initial generation does not balance the load "
                f"(residual {imbalance:.6g} MW); dispatch a slack unit or "
                f"adjust the load"
            )

    def initial_imbalance_mw(self) -> float:
        gen = sum(g.p_out_mw for g in self.gens)
        return gen + self.wind.schedule_p_mw() - self.load_mw


@dataclass(frozen=True)
class NadirMetrics:
    present: bool
    nadir_hz: float = float("nan")
    nadir_time_s: float = float("nan")
    delay_vs_reference_s: Optional[float] = None


@dataclass
class SimTrace:
    """Uniform-grid time series of one simulation run."""

    t_s: np.ndarray
    f_hz: np.ndarray
    dfdt_pu: np.ndarray
    gen_p_mw: dict[str, np.ndarray]
    wind_p_mw: np.ndarray
    wind_p_aero_mw: np.ndarray
    omega_pu: np.ndarray  # shape (n, T)
    beta_deg: np.ndarray  # shape (n, T)
    h_sys_s: np.ndarray
    events: tuple[GridEvent, ...]
    f_nominal_hz: float
    system_base_mva: float
    load_mw: float
    load_damping: float
    metrics: Optional[NadirMetrics] = None


# ---------------------------------------------------------------------------
# elementary blocks


def swing_deriv(
    f_dev_pu: float,
    p_gen_pu: float,
    p_load_pu: float,
    h_sys_s: float,
    d_load: float,
) -> float:
    """Aggregate swing equation: 2 H df/dt = p_gen - p_load - D * df."""
    if h_sys_s <= 0.0:
        raise DomainError("system inertia must be > 0")
    return (p_gen_pu - p_load_pu - d_load * f_dev_pu) / (2.0 * h_sys_s)


def swing_step(
    f_dev_pu: float,
    p_gen_pu: float,
    p_load_pu: float,
    h_sys_s: float,
    d_load: float,
    dt: float,
) -> float:
    """One classical fourth-order step with frozen injections."""
    def f(x: float) -> float:
        return swing_deriv(x, p_gen_pu, p_load_pu, h_sys_s, d_load)

    k1 = f(f_dev_pu)
    k2 = f(f_dev_pu + 0.5 * dt * k1)
    k3 = f(f_dev_pu + 0.5 * dt * k2)
    k4 = f(f_dev_pu + dt * k3)
    return f_dev_pu + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class WtRowState:
    """Rotor speeds and pitch angles of the simulated row."""

    omega_pu: tuple[float, ...]
    beta_deg: tuple[float, ...]
    t_since_switch_s: Optional[float] = None  # None while on the reserve schedule


def _wind_row_derivs(
    omegas: Sequence[float],
    betas: Sequence[float],
    f_dev_pu: float,
    t_since_switch: Optional[float],
    row: WindRow,
) -> tuple[list[float], list[float], float, float]:
    """State derivatives plus (electrical, aerodynamic) row power in watts.

    Inflows are re-cascaded from the current set-points on every call.
    Turbines that were never de-loaded export their aerodynamic power, so
    their rotor speed stays put through every event.  De-loaded turbines
    follow the reserve schedule (plus headroom-capped upward droop) until
    the mode switch; afterwards the deceleration power towards the optimal
    speed reference is exported.  The release tracking gain starts fast (a
    short support pulse that creates the over-frequency transient) and
    blends into a slow tail so the stored energy keeps supporting the
    system while the governors pick the load up; the converter rating caps
    the export and the farm droop curtails it whenever frequency sits
    above nominal.
    """
    tp, wp = row.tp, row.wp
    n = row.n
    released = t_since_switch is not None
    rated_w = tp.rated_power_w
    h2 = 2.0 * tp.inertia_s
    farm_rating_w = rated_w * n * row.row_count

    # Upward droop support on the reserve schedule.
    shares = [0.0] * n
    if row.droop_enabled and not released and f_dev_pu < 0.0:
        headrooms = [
            max(0.0, row.opt.points[i].p_mech_w - row.sub.points[i].p_mech_w)
            if row.deloaded[i]
            else 0.0
            for i in range(n)
        ]
        total_head = sum(headrooms)
        if total_head > 0.0:
            want_row = (-f_dev_pu / row.droop_frac) * farm_rating_w / row.row_count
            grant = min(want_row, total_head)
            shares = [grant * h / total_head for h in headrooms]

    ramp = 0.0
    gain = 0.0
    if released:
        if row.release_ramp_s > 0.0:
            ramp = max(0.0, 1.0 - t_since_switch / row.release_ramp_s)
        # Tracking gain: a fast support pulse blending into a slow tail.
        slow = 1.0 / row.release_tail_tau_s
        fast = 1.0 / row.release_tau_s
        gain = slow + (fast - slow) * math.exp(-t_since_switch / row.release_blend_s)

    # First pass: aerodynamics, wake cascade and raw release potentials.
    p_aero_w = [0.0] * n
    track_w = [0.0] * n
    beta_refs = [0.0] * n
    v = row.v_free_mps
    for i in range(n):
        w = omegas[i]
        b = min(max(betas[i], 0.0), tp.beta_max_deg)
        cp = cp_surface(tip_speed_ratio(w, v, tp), b, tp)
        p_aero_w[i] = power_from_cp(v, cp, tp)
        if row.deloaded[i] and released:
            w_opt = row.opt.points[i].omega_pu
            w_sub = row.sub.points[i].omega_pu
            w_ref = w_opt + (w_sub - w_opt) * ramp
            track_w[i] = h2 * w * (w - w_ref) * gain * rated_w
            b_opt = row.opt.points[i].beta_deg
            b_sub = row.sub.points[i].beta_deg
            beta_refs[i] = b_opt + (b_sub - b_opt) * ramp
        else:
            beta_refs[i] = row.sub.points[i].beta_deg
        if i < n - 1:
            v = next_wind(row.v_free_mps, v, ct_from_cp(cp), wp)

    # Over-frequency curtailment of the release, shared over the turbines
    # actually exporting stored energy.
    pots = [
        max(0.0, min(track_w[i], rated_w - p_aero_w[i]))
        if (row.deloaded[i] and released)
        else 0.0
        for i in range(n)
    ]
    pot_total = sum(pots)
    curtail_frac = 0.0
    if row.droop_enabled and released and f_dev_pu > 0.0 and pot_total > 0.0:
        want_row = (f_dev_pu / row.droop_frac) * farm_rating_w / row.row_count
        curtail_frac = min(1.0, want_row / pot_total)

    d_omega: list[float] = []
    d_beta: list[float] = []
    p_elec_w = 0.0
    for i in range(n):
        w = omegas[i]
        p_aero = p_aero_w[i]
        if not row.deloaded[i]:
            p_e = p_aero
            dw = 0.0
        elif not released:
            p_e = min(max(row.sub.points[i].p_mech_w + shares[i], 0.0), rated_w)
            dw = (p_aero - p_e) / (h2 * w * rated_w)
        else:
            if track_w[i] >= 0.0:
                p_e = p_aero + pots[i] * (1.0 - curtail_frac)
            else:
                # Rotor below its reference: draw it back up.
                p_e = min(max(p_aero + track_w[i], 0.0), rated_w)
            dw = (p_aero - p_e) / (h2 * w * rated_w)

        err = beta_refs[i] - betas[i]
        db = err / _BETA_SERVO_S
        rate = row.pitch_rate_deg_s
        db = min(max(db, -rate), rate)

        d_omega.append(dw)
        d_beta.append(db)
        p_elec_w += p_e

    return (
        d_omega,
        d_beta,
        p_elec_w * row.row_count,
        sum(p_aero_w) * row.row_count,
    )


def wt_step(
    state: WtRowState,
    f_dev_pu: float,
    mode: str,
    row: WindRow,
    tp: TurbineParams,
    wp: WakeParams,
    dt: float,
) -> tuple[WtRowState, float]:
    """One classical fourth-order step of the turbine row alone.

    ``mode`` is ``"sub"`` (reserve schedule) or ``"release"``; frequency is
    held during the step.  Returns the new state and the row electrical
    power in megawatts (all rows combined).
    """
    if mode not in ("sub", "release"):
        raise DomainError("mode must be 'sub' or 'release'")
    if (tp, wp) != (row.tp, row.wp):
        row = dataclasses.replace(row, tp=tp, wp=wp)
    t_rel = state.t_since_switch_s if mode == "release" else None
    if mode == "release" and t_rel is None:
        t_rel = 0.0

    def derivs(w, b, tr):
        return _wind_row_derivs(w, b, f_dev_pu, tr, row)

    w0 = list(state.omega_pu)
    b0 = list(state.beta_deg)

    def advance(w, b, dw, db, scale):
        return (
            [wi + scale * ki for wi, ki in zip(w, dw)],
            [bi + scale * ki for bi, ki in zip(b, db)],
        )

    tr = t_rel
    k1w, k1b, p_e, _ = derivs(w0, b0, tr)
    w, b = advance(w0, b0, k1w, k1b, 0.5 * dt)
    k2w, k2b, _, _ = derivs(w, b, None if tr is None else tr + 0.5 * dt)
    w, b = advance(w0, b0, k2w, k2b, 0.5 * dt)
    k3w, k3b, _, _ = derivs(w, b, None if tr is None else tr + 0.5 * dt)
    w, b = advance(w0, b0, k3w, k3b, dt)
    k4w, k4b, _, _ = derivs(w, b, None if tr is None else tr + dt)
    w1 = [
        wi + dt / 6.0 * (a + 2.0 * c + 2.0 * d + e)
        for wi, a, c, d, e in zip(w0, k1w, k2w, k3w, k4w)
    ]
    b1 = [
        bi + dt / 6.0 * (a + 2.0 * c + 2.0 * d + e)
        for bi, a, c, d, e in zip(b0, k1b, k2b, k3b, k4b)
    ]
    new = WtRowState(
        omega_pu=tuple(w1),
        beta_deg=tuple(b1),
        t_since_switch_s=None if tr is None else tr + dt,
    )
    return new, p_e / 1e6


# ---------------------------------------------------------------------------
# whole-system integration


class _GovSlot:
    """Slice bookkeeping for one generator's states inside the state vector."""

    def __init__(self, gen: SyncGen, offset: int):
        self.gen = gen
        self.params = gen.governor_params()
        self.p_ref = gen.p_out_mw / gen.rating
        self.is_tgov = gen.governor == "TGOV1"
        self.size = 3 if self.is_tgov else 4
        self.sl = slice(offset, offset + self.size)

    def init_states(self) -> list[float]:
        if self.is_tgov:
            s = tgov1_init(self.p_ref, self.params)
            return [s.gate1, s.gate2, s.lag]
        s = ieeeg1_init(self.p_ref, self.params)
        return [s.servo, s.chest, s.reheat, s.cross]

    def derivs(self, y: np.ndarray, f_dev: float) -> list[float]:
        if self.is_tgov:
            st = Tgov1State(self.p_ref, *y[self.sl])
            return list(tgov1_derivs(st, f_dev, self.params))
        st = Ieeeg1State(self.p_ref, *y[self.sl])
        return list(ieeeg1_derivs(st, f_dev, self.params))

    def output_mw(self, y: np.ndarray) -> float:
        if self.is_tgov:
            st = Tgov1State(self.p_ref, *y[self.sl])
            return tgov1_output(st, self.params) * self.gen.rating
        st = Ieeeg1State(self.p_ref, *y[self.sl])
        return ieeeg1_output(st, self.params) * self.gen.rating


def simulate(scenario: GridScenario) -> SimTrace:
    """Fixed-step integration of the whole scenario with events applied."""
    wind = scenario.wind
    n = wind.n
    dt = scenario.dt_s
    steps = int(round(scenario.t_end_s / dt))
    times = np.arange(steps + 1) * dt

    slots: list[_GovSlot] = []
    offset = 1
    for gen in scenario.gens:
        slot = _GovSlot(gen, offset)
        slots.append(slot)
        offset += slot.size
    iw = offset
    ib = iw + n
    size = ib + n

    y = np.zeros(size)
    for slot in slots:
        y[slot.sl] = slot.init_states()
    y[iw:ib] = [pt.omega_pu for pt in wind.sub.points]
    y[ib:] = [pt.beta_deg for pt in wind.sub.points]

    online = {g.name: True for g in scenario.gens}
    mode_switch_t: Optional[float] = None
    pending = sorted(scenario.events, key=lambda e: e.t_s)
    next_event = 0

    def h_sys() -> float:
        h = sum(
            g.inertia_s * g.rating for g in scenario.gens if online[g.name]
        ) / scenario.system_base_mva
        if h <= 0.0:
            raise SimulationError("no online inertia left in the system")
        return h

    def rhs(t: float, yv: np.ndarray) -> tuple[np.ndarray, float, float, float]:
        """Returns (dy, p_gen_mw, p_wind_mw, p_aero_mw)."""
        f_dev = yv[0]
        dy = np.zeros_like(yv)
        p_gen = 0.0
        for slot in slots:
            if online[slot.gen.name]:
                dy[slot.sl] = slot.derivs(yv, f_dev)
                p_gen += slot.output_mw(yv)
        t_rel = None if mode_switch_t is None else t - mode_switch_t
        if t_rel is not None and t_rel < 0.0:
            t_rel = None
        dw, db, p_wind_w, p_aero_w = _wind_row_derivs(
            yv[iw:ib], yv[ib:], f_dev, t_rel, wind
        )
        dy[iw:ib] = dw
        dy[ib:] = db
        p_wind = p_wind_w / 1e6
        s_base = scenario.system_base_mva
        p_acc_pu = (p_gen + p_wind - scenario.load_mw) / s_base
        dy[0] = swing_deriv(f_dev, p_acc_pu, 0.0, h_sys(), scenario.load_damping)
        return dy, p_gen, p_wind, p_aero_w / 1e6

    f_hz = np.empty(steps + 1)
    dfdt = np.empty(steps + 1)
    wind_p = np.empty(steps + 1)
    wind_pa = np.empty(steps + 1)
    h_series = np.empty(steps + 1)
    gen_p = {g.name: np.empty(steps + 1) for g in scenario.gens}
    omega_series = np.empty((n, steps + 1))
    beta_series = np.empty((n, steps + 1))

    w_hi = wind.tp.omega_max_pu + _OMEGA_OVER_MARGIN
    w_lo = wind.tp.omega_min_pu - _OMEGA_UNDER_MARGIN

    for k in range(steps + 1):
        t = times[k]
        while next_event < len(pending) and pending[next_event].t_s <= t + 1e-12:
            ev = pending[next_event]
            if ev.kind == "trip_gen":
                online[ev.target] = False
            else:
                mode_switch_t = ev.t_s
            next_event += 1

        dy, p_gen, p_wind, p_aero = rhs(t, y)
        if not np.all(np.isfinite(dy)) or not np.all(np.isfinite(y)):
            raise SimulationError(f"state became non-finite at t={t:.3f} s")
        f_hz[k] = scenario.f_nominal_hz * (1.0 + y[0])
        dfdt[k] = dy[0]
        wind_p[k] = p_wind
        wind_pa[k] = p_aero
        h_series[k] = h_sys()
        for slot in slots:
            gen_p[slot.gen.name][k] = (
                slot.output_mw(y) if online[slot.gen.name] else 0.0
            )
        omega_series[:, k] = y[iw:ib]
        beta_series[:, k] = y[ib:]
        for w in y[iw:ib]:
            if w > w_hi or w < w_lo:
                raise SimulationError(
                    f"rotor speed {w:.4f} pu left "
                    f"[{w_lo:.4f}, {w_hi:.4f}] at t={t:.3f} s"
                )
        if k == steps:
            break

        k1 = dy
        k2, _, _, _ = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3, _, _, _ = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4, _, _, _ = rhs(t + dt, y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    trace = SimTrace(
        t_s=times,
        f_hz=f_hz,
        dfdt_pu=dfdt,
        gen_p_mw=gen_p,
        wind_p_mw=wind_p,
        wind_p_aero_mw=wind_pa,
        omega_pu=omega_series,
        beta_deg=beta_series,
        h_sys_s=h_series,
        events=tuple(pending),
        f_nominal_hz=scenario.f_nominal_hz,
        system_base_mva=scenario.system_base_mva,
        load_mw=scenario.load_mw,
        load_damping=scenario.load_damping,
    )
    trace.metrics = nadir_metrics(trace)
    return trace


def nadir_metrics(
    trace: SimTrace, reference: Optional[SimTrace] = None
) -> NadirMetrics:
    """Frequency minimum after the first event, and its delay vs a reference.

    A trace without an under-frequency excursion yields absent metrics
    rather than an error.
    """
    own = _nadir_of(trace)
    if own is None:
        return NadirMetrics(present=False)
    nadir_hz, nadir_t = own
    delay: Optional[float] = None
    if reference is not None:
        ref = _nadir_of(reference)
        if ref is not None:
            delay = nadir_t - ref[1]
    return NadirMetrics(
        present=True,
        nadir_hz=nadir_hz,
        nadir_time_s=nadir_t,
        delay_vs_reference_s=delay,
    )


def _nadir_of(trace: SimTrace) -> Optional[tuple[float, float]]:
    if not trace.events:
        return None
    t0 = min(ev.t_s for ev in trace.events)
    mask = trace.t_s >= t0
    if not np.any(mask):
        return None
    f_seg = trace.f_hz[mask]
    t_seg = trace.t_s[mask]
    idx = int(np.argmin(f_seg))
    if f_seg[idx] >= trace.f_nominal_hz - 1e-3:
        return None
    return float(f_seg[idx]), float(t_seg[idx])


def power_balance_residuals(trace: SimTrace) -> np.ndarray:
    """Per-sample residual of the recorded swing equation, in per-unit.

    Checks that generation, wind, load, damping and the recorded frequency
    derivative were assembled consistently at every stored sample.
    """
    gen = np.sum(list(trace.gen_p_mw.values()), axis=0)
    acc = (gen + trace.wind_p_mw - trace.load_mw) / trace.system_base_mva
    f_dev = trace.f_hz / trace.f_nominal_hz - 1.0
    return acc - trace.load_damping * f_dev - 2.0 * trace.h_sys_s * trace.dfdt_pu
