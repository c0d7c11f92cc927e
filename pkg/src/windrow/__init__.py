"""windrow: kinetic-energy reserve optimisation for a row of wind turbines.

Library layers:

* :mod:`windrow.aero` - static turbine model (Cp/Ct surfaces, tracking, zones)
* :mod:`windrow.wake` - stationary row-wake cascade
* :mod:`windrow.deload` - closed-form single-turbine de-loading strategies
* :mod:`windrow.farmopt` - row kinetic-energy maximisation (pattern search)
* :mod:`windrow.gridsim` - copper-plate frequency simulation with KE release
* :mod:`windrow.studio` - configuration, CLI and result emission
"""

from .aero import (
    OperatingPoint,
    TurbineParams,
    cp_from_ct,
    cp_surface,
    ct_from_cp,
    kinetic_energy,
    mech_power,
    mppt,
    thrust,
    tip_speed_ratio,
    zone,
)
from .deload import DeloadTarget, deload_overspeed, deload_pitch
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateWakeError,
    DomainError,
    InfeasibleMarginError,
    InfeasibleProblemError,
    SimulationError,
)
from .farmopt import (
    FarmProblem,
    FarmSolution,
    SolverOptions,
    base_case,
    deload_curve,
    solve_farm,
    sweep,
)
from .gridsim import (
    GridEvent,
    GridScenario,
    NadirMetrics,
    SimTrace,
    SyncGen,
    WindRow,
    nadir_metrics,
    simulate,
)
from .search import PatternSearchOptions, pattern_search
from .wake import RowInflow, WakeParams, next_wind, propagate_row

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DegenerateWakeError",
    "DeloadTarget",
    "DomainError",
    "FarmProblem",
    "FarmSolution",
    "GridEvent",
    "GridScenario",
    "InfeasibleMarginError",
    "InfeasibleProblemError",
    "NadirMetrics",
    "OperatingPoint",
    "PatternSearchOptions",
    "RowInflow",
    "SimTrace",
    "SimulationError",
    "SolverOptions",
    "SyncGen",
    "TurbineParams",
    "WakeParams",
    "WindRow",
    "base_case",
    "cp_from_ct",
    "cp_surface",
    "ct_from_cp",
    "deload_curve",
    "deload_overspeed",
    "deload_pitch",
    "kinetic_energy",
    "mech_power",
    "mppt",
    "nadir_metrics",
    "next_wind",
    "pattern_search",
    "propagate_row",
    "simulate",
    "solve_farm",
    "sweep",
    "thrust",
    "tip_speed_ratio",
    "zone",
]
