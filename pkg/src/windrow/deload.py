"""Closed-form single-turbine de-loading strategies.

Two baseline ways to hold mechanical power at (1 - dm) times its optimum:
over-speeding at zero pitch, and pitching at the tracking rotor speed.  They
serve as comparators and as feasible starting points for the farm optimizer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .aero import (
    InfeasiblePitchTarget,
    OperatingPoint,
    TurbineParams,
    mech_power,
    mppt,
    operating_point,
    smallest_pitch_for_power,
)
from .errors import ConvergenceError, DomainError, InfeasibleMarginError
from .roots import bisect_root

STRATEGIES = ("overspeed", "pitch-only", "combined")


@dataclass(frozen=True)
class DeloadTarget:
    """A requested de-loading: margin, inflow and strategy."""

    dm: float
    v_mps: float
    strategy: str = "combined"

    def __post_init__(self) -> None:
        if not (0.0 <= self.dm < 1.0):
            raise DomainError("de-loading margin must lie in [0, 1)")
        if self.strategy not in STRATEGIES:
            raise DomainError(f"unknown strategy {self.strategy!r}")


def deload_overspeed(v_mps: float, dm: float, tp: TurbineParams) -> OperatingPoint:
    """De-load by raising rotor speed above the tracking optimum, pitch = 0.

    The root above the optimum is always taken: of the two rotor speeds that
    shed the same power, only the faster one stores extra kinetic energy.
    Only meaningful while the tracking speed sits below the speed limit.
    """
    if not (0.0 <= dm < 1.0):
        raise DomainError("de-loading margin must lie in [0, 1)")
    base = mppt(v_mps, tp)
    if dm == 0.0:
        return base
    if base.omega_pu >= tp.omega_max_pu:
        raise InfeasibleMarginError(
            "overspeed de-loading needs headroom above the tracking rotor "
            f"speed; at v={v_mps} m/s the rotor is already at its limit"
        )
    target = (1.0 - dm) * base.p_mech_w

    def gap(w: float) -> float:
        return mech_power(v_mps, w, 0.0, tp) - target

    g_hi = gap(tp.omega_max_pu)
    if g_hi > 0.0:
        raise InfeasibleMarginError(
            f"margin {dm} cannot be shed by over-speeding alone at "
            f"v={v_mps} m/s (power at the speed limit still exceeds target)"
        )
    w = bisect_root(
        gap,
        base.omega_pu,
        tp.omega_max_pu,
        f_hi=g_hi,
        xtol=1e-12,
        ftol=1e-6 * max(target, 1.0),
    )
    return operating_point(v_mps, w, 0.0, tp)


def deload_pitch(v_mps: float, dm: float, tp: TurbineParams) -> OperatingPoint:
    """De-load by pitching at the tracking rotor speed.

    Keeps the smallest pitch that sheds the margin, staying as close to the
    Cp ridge as possible.  Stores no extra kinetic energy.
    """
    if not (0.0 <= dm < 1.0):
        raise DomainError("de-loading margin must lie in [0, 1)")
    base = mppt(v_mps, tp)
    if dm == 0.0:
        return base
    target = (1.0 - dm) * base.p_mech_w
    try:
        beta = smallest_pitch_for_power(v_mps, base.omega_pu, target, tp)
    except InfeasiblePitchTarget as exc:
        raise ConvergenceError(str(exc)) from exc
    return operating_point(v_mps, base.omega_pu, beta, tp)
