"""Stationary wake model for a single row of turbines.

The inflow of each turbine is the inflow of its upstream neighbour, partially
recovered towards the free wind and reduced in proportion to the neighbour's
thrust coefficient:

    v[i+1] = v[i] + k' * (v1 - v[i]) - k * v1 * Ct[i]

Wind direction is fixed parallel to the row; there is no yaw or partial-wake
geometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .aero import CT_LIMIT, OperatingPoint, TurbineParams, operating_point
from .errors import DegenerateWakeError, DomainError


@dataclass(frozen=True)
class WakeParams:
    """Row-wake constants, normally identified from farm measurements."""

    k_prime: float = 0.35
    k: float = 0.1

    def __post_init__(self) -> None:
        if not (0.0 < self.k < self.k_prime < 1.0):
            raise DomainError("wake constants must satisfy 0 < k < k_prime < 1")


@dataclass(frozen=True)
class RowInflow:
    """Per-turbine inflow speeds of one row, first entry = free wind."""

    v_free_mps: float
    v_mps: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.v_mps or self.v_mps[0] != self.v_free_mps:
            raise DomainError("first inflow must equal the free wind speed")
        if any(v <= 0.0 for v in self.v_mps):
            raise DomainError("inflow speeds must be > 0")


def next_wind(v_free: float, v_i: float, ct_i: float, wp: WakeParams) -> float:
    """Inflow of the next turbine downstream of one operating at ``ct_i``."""
    if v_free <= 0.0:
        raise DomainError("next_wind: free wind speed must be > 0")
    if not (0.0 < v_i <= v_free):
        raise DomainError(f"next_wind: inflow {v_i} outside (0, {v_free}]")
    if ct_i < 0.0 or ct_i >= CT_LIMIT:
        raise DomainError(f"next_wind: ct={ct_i} outside [0, 8/9)")
    v_next = v_i + wp.k_prime * (v_free - v_i) - wp.k * v_free * ct_i
    if v_next <= 0.0:
        raise DegenerateWakeError(
            f"wake recursion produced v={v_next} m/s; parameters lie outside "
            "the model's validity"
        )
    return v_next


def propagate_row(
    v_free: float,
    setpoints: Sequence[tuple[float, float]],
    tp: TurbineParams,
    wp: WakeParams,
) -> tuple[RowInflow, list[OperatingPoint]]:
    """Cascade a row of (omega_pu, beta_deg) set-points down the wake.

    Turbine ``i`` is evaluated at its own inflow; its thrust coefficient then
    sets the inflow of turbine ``i+1``.
    """
    if not setpoints:
        raise DomainError("propagate_row: set-point list is empty")
    inflows: list[float] = []
    points: list[OperatingPoint] = []
    v = v_free
    for idx, (omega_pu, beta_deg) in enumerate(setpoints):
        inflows.append(v)
        pt = operating_point(v, omega_pu, beta_deg, tp)
        points.append(pt)
        if idx < len(setpoints) - 1:
            v = next_wind(v_free, v, pt.ct, wp)
    return RowInflow(v_free_mps=v_free, v_mps=tuple(inflows)), points
