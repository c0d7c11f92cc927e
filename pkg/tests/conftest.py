"""Shared oracles and fixtures."""

from __future__ import annotations

import numpy as np
import pytest

from windrow.aero import TurbineParams, mppt
from windrow.errors import InfeasibleMarginError
from windrow.farmopt import deload_curve
from windrow.wake import WakeParams, next_wind


def two_turbine_grid_oracle(
    v_free: float,
    dm: float,
    tp: TurbineParams,
    wp: WakeParams,
    points: int = 400,
) -> float:
    """Exhaustive oracle for the two-turbine row: grid the first rotor speed,
    eliminate its pitch along the power-equality manifold, run the second
    turbine at maximum-power tracking of the waked inflow, and return the
    best total kinetic energy found.
    """
    base = mppt(v_free, tp)
    best = -np.inf
    for w in np.linspace(base.omega_pu, tp.omega_max_pu, points):
        try:
            beta = deload_curve(v_free, dm, float(w), tp)
        except InfeasibleMarginError:
            continue
        from windrow.aero import operating_point

        pt1 = operating_point(v_free, float(w), beta, tp)
        v2 = next_wind(v_free, v_free, pt1.ct, wp)
        pt2 = mppt(v2, tp)
        best = max(best, pt1.e_kin_pus + pt2.e_kin_pus)
    return float(best)


@pytest.fixture(scope="session")
def quick_study_yaml(tmp_path_factory) -> str:
    """A reduced study file: small row, short horizon, coarse sweep."""
    path = tmp_path_factory.mktemp("cfg") / "quick.yaml"
    path.write_text(
        """
seed: 3
farm:
  n: 3
  v_start: 7.0
  v_stop: 8.0
  v_step: 0.5
  cases:
    - {id: base, dm: 0.0}
    - {id: reserve, dm: 0.1}
grid:
  t_end_s: 8.0
  dt_s: 0.01
  load_mw: 130.0
  wind:
    row_count: 4
    v_free_mps: 8.0
  events:
    - {t_s: 2.0, kind: trip_gen, target: SG-3}
    - {t_s: 2.0, kind: wind_mode_switch}
output:
  directory: out
"""
    )
    return str(path)
