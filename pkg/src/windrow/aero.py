"""Static aerodynamic model of a Type III variable-speed wind turbine.

Power and thrust coefficients, maximum-power tracking, operating zones and
rotor kinetic energy.  Rotor speed is handled in per-unit of the rated
mechanical speed so that kinetic energy H*omega^2 comes out in per-unit
seconds on the machine MVA base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.optimize import minimize_scalar

from .errors import ConvergenceError, DomainError
from .roots import bisect_root, first_crossing

BETZ_LIMIT = 16.0 / 27.0
CT_LIMIT = 8.0 / 9.0

# Exponential curve-fit coefficients for Cp(lambda, beta); this widely used
# fit peaks near Cp = 0.48 at lambda = 8.1, beta = 0.
DEFAULT_CP_COEFFS = (0.5176, 116.0, 0.4, 5.0, 21.0, 0.0068)

_OMEGA_RATED_5MW_RADPS = 12.1 * math.pi / 30.0  # 12.1 rpm


@dataclass(frozen=True)
class TurbineParams:
    """Physical constants and operating limits of one turbine.

    Defaults are modelled on the NREL 5 MW reference turbine; every value is
    an implementation default, configurable through the study file.
    """

    radius_m: float = 63.0
    air_density: float = 1.225
    inertia_s: float = 5.0
    rated_power_w: float = 5.0e6
    omega_min_pu: float = 6.9 / 12.1
    omega_max_pu: float = 1.0
    omega_rated_radps: float = _OMEGA_RATED_5MW_RADPS
    beta_max_deg: float = 25.0
    v_cutin_mps: float = 3.0
    v_cutout_mps: float = 25.0
    cp_coeffs: tuple[float, ...] = DEFAULT_CP_COEFFS

    def __post_init__(self) -> None:
        if self.radius_m <= 0.0:
            raise DomainError("radius_m must be > 0")
        if self.air_density <= 0.0:
            raise DomainError("air_density must be > 0")
        if self.inertia_s <= 0.0:
            raise DomainError("inertia_s must be > 0")
        if self.rated_power_w <= 0.0:
            raise DomainError("rated_power_w must be > 0")
        if not (0.0 < self.omega_min_pu < self.omega_max_pu):
            raise DomainError("require 0 < omega_min_pu < omega_max_pu")
        if self.omega_rated_radps <= 0.0:
            raise DomainError("omega_rated_radps must be > 0")
        if self.beta_max_deg <= 0.0:
            raise DomainError("beta_max_deg must be > 0")
        if not (0.0 < self.v_cutin_mps < self.v_cutout_mps):
            raise DomainError("require 0 < v_cutin_mps < v_cutout_mps")
        if len(self.cp_coeffs) != 6:
            raise DomainError("cp_coeffs must have six entries")


@dataclass(frozen=True)
class OperatingPoint:
    """One turbine state with all derived aerodynamic quantities."""

    v_mps: float
    omega_pu: float
    beta_deg: float
    tsr: float
    cp: float
    ct: float
    p_mech_w: float
    e_kin_pus: float


def tip_speed_ratio(omega_pu: float, v_mps: float, params: TurbineParams) -> float:
    """Blade-tip speed over wind speed, R*omega/v."""
    if v_mps <= 0.0:
        raise DomainError("tip_speed_ratio: wind speed must be > 0")
    if omega_pu <= 0.0:
        raise DomainError("tip_speed_ratio: rotor speed must be > 0")
    return params.radius_m * (omega_pu * params.omega_rated_radps) / v_mps


def cp_surface(tsr: float, beta_deg: float, params: TurbineParams) -> float:
    """Power coefficient of the analytic surface, clamped to [0, 16/27].

    The raw fit goes negative far from the ridge; the optimizer probes such
    points, so they clamp to zero instead of raising.
    """
    if tsr <= 0.0:
        raise DomainError("cp_surface: tip speed ratio must be > 0")
    if beta_deg < 0.0 or beta_deg > params.beta_max_deg:
        raise DomainError(
            f"cp_surface: pitch {beta_deg} deg outside [0, {params.beta_max_deg}]"
        )
    c1, c2, c3, c4, c5, c6 = params.cp_coeffs
    inv = 1.0 / (tsr + 0.08 * beta_deg) - 0.035 / (beta_deg * beta_deg * beta_deg + 1.0)
    cp = c1 * (c2 * inv - c3 * beta_deg - c4) * math.exp(-c5 * inv) + c6 * tsr
    if cp < 0.0:
        return 0.0
    return min(cp, BETZ_LIMIT)


def cp_from_ct(ct: float) -> float:
    """Cp implied by a thrust coefficient: 0.5*(1 + sqrt(1 - Ct))*Ct.

    Valid on [0, 8/9]; the upper endpoint is accepted closed so the inverse
    can be range-checked against it.
    """
    if ct < 0.0 or ct > CT_LIMIT:
        raise DomainError(f"cp_from_ct: ct={ct} outside [0, 8/9]")
    return 0.5 * (1.0 + math.sqrt(1.0 - ct)) * ct


def ct_from_cp(cp: float) -> float:
    """Invert the Cp(Ct) relation on [0, 8/9] to 1e-10 absolute tolerance.

    The relation is strictly increasing on the interval, so the root is
    unique.  A few Newton steps from a warm start do the work; bisection is
    the fallback when Newton wanders.
    """
    if cp < -1e-15 or cp > BETZ_LIMIT + 1e-12:
        raise DomainError(f"ct_from_cp: cp={cp} outside [0, 16/27]")
    if cp <= 0.0:
        return 0.0
    if cp >= BETZ_LIMIT:
        return CT_LIMIT

    t = min(max(cp, 1e-12), CT_LIMIT - 1e-9)
    for _ in range(40):
        s = math.sqrt(1.0 - t)
        g = 0.5 * (1.0 + s) * t - cp
        if abs(g) <= 1e-14:
            return t
        dg = 0.5 * (1.0 + s) - 0.25 * t / s
        if dg <= 0.0:
            break
        t_new = t - g / dg
        if not (0.0 < t_new < CT_LIMIT):
            break
        if abs(t_new - t) <= 1e-12:
            return t_new
        t = t_new
    return bisect_root(lambda x: cp_from_ct(x) - cp, 0.0, CT_LIMIT, xtol=1e-12)


def power_from_cp(v_mps: float, cp: float, params: TurbineParams) -> float:
    """Mechanical power 0.5*rho*pi*R^2*v^3*Cp in watts."""
    r = params.radius_m
    return 0.5 * params.air_density * math.pi * r * r * v_mps ** 3 * cp


def thrust_from_ct(v_mps: float, ct: float, params: TurbineParams) -> float:
    """Rotor thrust 0.5*rho*pi*R^2*v^2*Ct in newtons."""
    r = params.radius_m
    return 0.5 * params.air_density * math.pi * r * r * v_mps * v_mps * ct


def mech_power(
    v_mps: float, omega_pu: float, beta_deg: float, params: TurbineParams
) -> float:
    """Mechanical power at a rotor state; never negative."""
    if v_mps <= 0.0:
        raise DomainError("mech_power: wind speed must be > 0")
    cp = cp_surface(tip_speed_ratio(omega_pu, v_mps, params), beta_deg, params)
    return power_from_cp(v_mps, cp, params)


def thrust(
    v_mps: float, omega_pu: float, beta_deg: float, params: TurbineParams
) -> float:
    """Rotor thrust at a rotor state, with Ct implied by the Cp surface."""
    if v_mps <= 0.0:
        raise DomainError("thrust: wind speed must be > 0")
    cp = cp_surface(tip_speed_ratio(omega_pu, v_mps, params), beta_deg, params)
    return thrust_from_ct(v_mps, ct_from_cp(cp), params)


def kinetic_energy(omega_pu: float, params: TurbineParams) -> float:
    """Stored rotor kinetic energy H*omega^2 in per-unit seconds."""
    if omega_pu < 0.0:
        raise DomainError("kinetic_energy: rotor speed must be >= 0")
    return params.inertia_s * omega_pu * omega_pu


def operating_point(
    v_mps: float, omega_pu: float, beta_deg: float, params: TurbineParams
) -> OperatingPoint:
    """Populate every derived field for a rotor state."""
    tsr = tip_speed_ratio(omega_pu, v_mps, params)
    cp = cp_surface(tsr, beta_deg, params)
    return OperatingPoint(
        v_mps=v_mps,
        omega_pu=omega_pu,
        beta_deg=beta_deg,
        tsr=tsr,
        cp=cp,
        ct=ct_from_cp(cp),
        p_mech_w=power_from_cp(v_mps, cp, params),
        e_kin_pus=kinetic_energy(omega_pu, params),
    )


@lru_cache(maxsize=64)
def optimal_tsr(params: TurbineParams) -> float:
    """Tip speed ratio maximising Cp at zero pitch (coarse grid + refine)."""
    best_l, best_c = 1.0, -1.0
    lam = 0.5
    while lam <= 20.0:
        c = cp_surface(lam, 0.0, params)
        if c > best_c:
            best_l, best_c = lam, c
        lam += 0.05
    res = minimize_scalar(
        lambda l: -cp_surface(l, 0.0, params),
        bounds=(max(best_l - 0.1, 1e-6), best_l + 0.1),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.x)


@lru_cache(maxsize=64)
def optimal_cp(params: TurbineParams) -> float:
    """Peak power coefficient of the surface at zero pitch."""
    return cp_surface(optimal_tsr(params), 0.0, params)


def _unconstrained_mppt_omega_pu(v_mps: float, params: TurbineParams) -> float:
    return optimal_tsr(params) * v_mps / params.radius_m / params.omega_rated_radps


class InfeasiblePitchTarget(ConvergenceError):
    """No pitch angle achieves the requested power at this rotor speed."""


def smallest_pitch_for_power(
    v_mps: float,
    omega_pu: float,
    target_w: float,
    params: TurbineParams,
    *,
    rel_tol: float = 1e-6,
    scan_step_deg: float = 0.5,
) -> float:
    """Smallest pitch >= 0 at which mechanical power equals ``target_w``.

    The power is not monotone in pitch everywhere (positive pitch can raise
    Cp at high tip speed ratios), so the first sign change is located by a
    forward scan before bisecting.  Raises when no pitch in
    [0, beta_max] reaches the target.
    """
    if target_w < 0.0:
        raise DomainError("smallest_pitch_for_power: target must be >= 0")
    ftol = rel_tol * max(target_w, 1.0)

    def gap(beta: float) -> float:
        return mech_power(v_mps, omega_pu, beta, params) - target_w

    g0 = gap(0.0)
    if abs(g0) <= ftol:
        return 0.0
    bracket = first_crossing(gap, 0.0, params.beta_max_deg, scan_step_deg, f_lo=g0)
    if bracket is None:
        raise InfeasiblePitchTarget(
            f"no pitch in [0, {params.beta_max_deg}] deg reaches "
            f"{target_w:.6g} W at v={v_mps:.6g} m/s, omega={omega_pu:.6g} pu"
        )
    a, b, fa, fb = bracket
    if a == b:
        return a
    return bisect_root(gap, a, b, f_lo=fa, f_hi=fb, xtol=1e-12, ftol=ftol)


def zone(v_mps: float, params: TurbineParams) -> int:
    """Operating zone at a wind speed.

    1: optimal tip speed ratio would need omega below the minimum;
    2: unconstrained tracking inside the speed band, power below rated;
    3: omega pinned at the maximum, power still below rated;
    4: rated power binds and pitch control sheds the excess.
    """
    if v_mps < params.v_cutin_mps or v_mps > params.v_cutout_mps:
        raise DomainError(
            f"zone: wind speed {v_mps} outside cut-in/cut-out "
            f"[{params.v_cutin_mps}, {params.v_cutout_mps}]"
        )
    w_unc = _unconstrained_mppt_omega_pu(v_mps, params)
    w_pin = min(max(w_unc, params.omega_min_pu), params.omega_max_pu)
    if mech_power(v_mps, w_pin, 0.0, params) > params.rated_power_w:
        return 4
    if w_unc < params.omega_min_pu:
        return 1
    if w_unc > params.omega_max_pu:
        return 3
    return 2


def mppt(v_mps: float, params: TurbineParams) -> OperatingPoint:
    """Maximum-power-tracking operating point at a wind speed.

    Zones 1-3 run at zero pitch with the Cp-optimal rotor speed clamped to
    the speed band; zone 4 pins the rotor at its maximum and pitches to hold
    rated power (to 1e-6 relative).
    """
    z = zone(v_mps, params)
    if z == 4:
        w = params.omega_max_pu
        beta = smallest_pitch_for_power(v_mps, w, params.rated_power_w, params)
        return operating_point(v_mps, w, beta, params)
    w_unc = _unconstrained_mppt_omega_pu(v_mps, params)
    w = min(max(w_unc, params.omega_min_pu), params.omega_max_pu)
    return operating_point(v_mps, w, 0.0, params)


@lru_cache(maxsize=100_000)
def mppt_cached(v_mps: float, params: TurbineParams) -> OperatingPoint:
    """Memoised ``mppt``; inflow speeds repeat heavily inside the optimizer."""
    return mppt(v_mps, params)
