"""Turbine-governor blocks for the copper-plate frequency simulator.

Two standard droop-governed prime-mover models, written as explicit state
derivatives so the system integrator can embed them, plus single-step
wrappers for stand-alone use.  All powers are per-unit on the machine
rating; both blocks settle at ``p_ref - f_dev / droop`` clamped to the
mechanical limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError


@dataclass(frozen=True)
class Tgov1Params:
    """Gas/steam-valve governor: two gate lags plus a turbine lead-lag."""

    droop_frac: float
    t_gate1_s: float = 0.5
    t_gate2_s: float = 1.0
    t_lead_s: float = 3.0
    t_lag_s: float = 10.0
    p_min_pu: float = 0.0
    p_max_pu: float = 1.0

    def __post_init__(self) -> None:
        if self.droop_frac <= 0.0:
            raise DomainError("droop must be > 0")
        if min(self.t_gate1_s, self.t_gate2_s, self.t_lead_s, self.t_lag_s) <= 0.0:
            raise DomainError("time constants must be > 0")


@dataclass(frozen=True)
class Tgov1State:
    p_ref_pu: float
    gate1: float
    gate2: float
    lag: float


@dataclass(frozen=True)
class Ieeeg1Params:
    """Multi-stage steam governor: servo plus chest, reheater and crossover."""

    droop_frac: float
    t_servo_s: float = 0.2
    t_chest_s: float = 0.3
    t_reheat_s: float = 7.0
    t_cross_s: float = 0.6
    frac_hp: float = 0.3
    frac_ip: float = 0.4
    frac_lp: float = 0.3
    p_min_pu: float = 0.0
    p_max_pu: float = 1.0

    def __post_init__(self) -> None:
        if self.droop_frac <= 0.0:
            raise DomainError("droop must be > 0")
        if abs(self.frac_hp + self.frac_ip + self.frac_lp - 1.0) > 1e-9:
            raise DomainError("stage fractions must sum to 1")


@dataclass(frozen=True)
class Ieeeg1State:
    p_ref_pu: float
    servo: float
    chest: float
    reheat: float
    cross: float


def _command(p_ref: float, f_dev_pu: float, droop: float) -> float:
    return p_ref - f_dev_pu / droop


def _windup_limited(state_val: float, deriv: float, lo: float, hi: float) -> float:
    """Non-windup limit: stop integrating past a bound."""
    if state_val >= hi and deriv > 0.0:
        return 0.0
    if state_val <= lo and deriv < 0.0:
        return 0.0
    return deriv


def tgov1_init(p_ref_pu: float, params: Tgov1Params) -> Tgov1State:
    return Tgov1State(p_ref_pu, p_ref_pu, p_ref_pu, p_ref_pu)


def tgov1_derivs(
    state: Tgov1State, f_dev_pu: float, params: Tgov1Params
) -> tuple[float, float, float]:
    u = _command(state.p_ref_pu, f_dev_pu, params.droop_frac)
    u = min(max(u, params.p_min_pu), params.p_max_pu)
    d1 = _windup_limited(
        state.gate1, (u - state.gate1) / params.t_gate1_s,
        params.p_min_pu, params.p_max_pu,
    )
    d2 = (state.gate1 - state.gate2) / params.t_gate2_s
    dl = (state.gate2 - state.lag) / params.t_lag_s
    return d1, d2, dl


def tgov1_output(state: Tgov1State, params: Tgov1Params) -> float:
    r = params.t_lead_s / params.t_lag_s
    y = state.lag + r * (state.gate2 - state.lag)
    return min(max(y, params.p_min_pu), params.p_max_pu)


def tgov1_step(
    state: Tgov1State, f_dev_pu: float, params: Tgov1Params, dt: float
) -> tuple[Tgov1State, float]:
    """One classical fourth-order step of the block alone."""
    new = _rk4_block(state, f_dev_pu, params, dt, tgov1_derivs,
                     ("gate1", "gate2", "lag"))
    return new, tgov1_output(new, params)


def ieeeg1_init(p_ref_pu: float, params: Ieeeg1Params) -> Ieeeg1State:
    return Ieeeg1State(p_ref_pu, p_ref_pu, p_ref_pu, p_ref_pu, p_ref_pu)


def ieeeg1_derivs(
    state: Ieeeg1State, f_dev_pu: float, params: Ieeeg1Params
) -> tuple[float, float, float, float]:
    u = _command(state.p_ref_pu, f_dev_pu, params.droop_frac)
    u = min(max(u, params.p_min_pu), params.p_max_pu)
    ds = _windup_limited(
        state.servo, (u - state.servo) / params.t_servo_s,
        params.p_min_pu, params.p_max_pu,
    )
    dc = (state.servo - state.chest) / params.t_chest_s
    dr = (state.chest - state.reheat) / params.t_reheat_s
    dx = (state.reheat - state.cross) / params.t_cross_s
    return ds, dc, dr, dx


def ieeeg1_output(state: Ieeeg1State, params: Ieeeg1Params) -> float:
    y = (
        params.frac_hp * state.chest
        + params.frac_ip * state.reheat
        + params.frac_lp * state.cross
    )
    return min(max(y, params.p_min_pu), params.p_max_pu)


def ieeeg1_step(
    state: Ieeeg1State, f_dev_pu: float, params: Ieeeg1Params, dt: float
) -> tuple[Ieeeg1State, float]:
    """One classical fourth-order step of the block alone."""
    new = _rk4_block(state, f_dev_pu, params, dt, ieeeg1_derivs,
                     ("servo", "chest", "reheat", "cross"))
    return new, ieeeg1_output(new, params)


def _rk4_block(state, f_dev_pu, params, dt, derivs, fields):
    """Classical Runge-Kutta step over the named fields of a frozen state."""

    def shifted(base, ks, scale):
        updates = {f: getattr(base, f) + scale * k for f, k in zip(fields, ks)}
        return replace(base, **updates)

    k1 = derivs(state, f_dev_pu, params)
    k2 = derivs(shifted(state, k1, 0.5 * dt), f_dev_pu, params)
    k3 = derivs(shifted(state, k2, 0.5 * dt), f_dev_pu, params)
    k4 = derivs(shifted(state, k3, dt), f_dev_pu, params)
    updates = {
        f: getattr(state, f) + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for f, a, b, c, d in zip(fields, k1, k2, k3, k4)
    }
    out = replace(state, **updates)
    if not all(math.isfinite(getattr(out, f)) for f in fields):
        raise DomainError("governor state became non-finite")
    return out
