"""Static turbine model: coefficient surfaces, tracking, zones, energy."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windrow.aero import (
    BETZ_LIMIT,
    CT_LIMIT,
    TurbineParams,
    cp_from_ct,
    cp_surface,
    ct_from_cp,
    kinetic_energy,
    mech_power,
    mppt,
    operating_point,
    optimal_cp,
    optimal_tsr,
    power_from_cp,
    smallest_pitch_for_power,
    thrust,
    thrust_from_ct,
    tip_speed_ratio,
    zone,
)
from windrow.errors import DomainError

TP = TurbineParams()


# --- tip speed ratio -------------------------------------------------------

def test_tsr_definitional_identity():
    # R = 63 m, omega = 1 rad/s absolute, v = 63 m/s
    tp = TurbineParams(omega_rated_radps=1.0)
    assert tip_speed_ratio(1.0, 63.0, tp) == pytest.approx(1.0, abs=1e-15)


def test_tsr_hand_arithmetic():
    # 63 * 1.267 / 8 = 9.977625
    tp = TurbineParams(omega_rated_radps=1.0)
    assert tip_speed_ratio(1.267, 8.0, tp) == pytest.approx(9.977625, abs=1e-12)


def test_tsr_rejects_bad_inputs():
    with pytest.raises(DomainError):
        tip_speed_ratio(1.0, 0.0, TP)
    with pytest.raises(DomainError):
        tip_speed_ratio(0.0, 8.0, TP)


# --- Cp(Ct) relation and its inverse --------------------------------------

def test_cp_from_ct_values():
    assert cp_from_ct(0.0) == 0.0
    # 0.5 * (1 + sqrt(0.5)) * 0.5
    assert cp_from_ct(0.5) == pytest.approx(0.4267766952966369, abs=1e-15)
    # closed upper endpoint: 0.5 * (1 + 1/3) * 8/9 = 16/27
    assert cp_from_ct(CT_LIMIT) == pytest.approx(BETZ_LIMIT, abs=1e-15)
    with pytest.raises(DomainError):
        cp_from_ct(-0.1)
    with pytest.raises(DomainError):
        cp_from_ct(0.9)


def _ct_bisection_oracle(cp: float) -> float:
    lo, hi = 0.0, CT_LIMIT
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if 0.5 * (1.0 + math.sqrt(1.0 - mid)) * mid < cp:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_ct_from_cp_against_bisection_oracle():
    assert ct_from_cp(0.0) == 0.0
    for cp in (0.05, 0.2, 0.4267766952966369, 0.55, BETZ_LIMIT - 1e-6):
        assert ct_from_cp(cp) == pytest.approx(_ct_bisection_oracle(cp), abs=1e-9)
    assert ct_from_cp(0.4267766952966369) == pytest.approx(0.5, abs=1e-10)
    with pytest.raises(DomainError):
        ct_from_cp(BETZ_LIMIT + 1e-6)
    with pytest.raises(DomainError):
        ct_from_cp(-0.01)


def test_inverse_identity_on_grid():
    for ct in np.linspace(0.0, CT_LIMIT, 1000):
        assert abs(ct_from_cp(cp_from_ct(float(ct))) - ct) < 1e-10


@given(st.floats(min_value=0.0, max_value=BETZ_LIMIT))
@settings(max_examples=200)
def test_roundtrip_cp_identity(cp):
    assert cp_from_ct(ct_from_cp(cp)) == pytest.approx(cp, abs=1e-10)


def test_cp_ct_relation_strictly_increasing():
    grid = np.linspace(0.0, CT_LIMIT, 500)
    vals = [cp_from_ct(float(t)) for t in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))


# --- Cp surface ------------------------------------------------------------

def test_cp_surface_clamps_negative_fit():
    # deep-stall corner of the fit is negative before clamping
    assert cp_surface(8.0, 25.0, TP) == 0.0


def test_cp_surface_bounds_and_pitch_domain():
    with pytest.raises(DomainError):
        cp_surface(8.0, -0.1, TP)
    with pytest.raises(DomainError):
        cp_surface(8.0, 30.0, TP)
    with pytest.raises(DomainError):
        cp_surface(0.0, 0.0, TP)


def test_cp_surface_peak_matches_dense_grid():
    # grid-search oracle over the admissible box
    lams = np.linspace(0.05, 15.0, 1500)
    betas = np.linspace(0.0, TP.beta_max_deg, 251)
    best = (-1.0, None, None)
    for b in betas:
        for l in lams:
            c = cp_surface(float(l), float(b), TP)
            if c > best[0]:
                best = (c, float(l), float(b))
    cp_best, lam_best, beta_best = best
    assert beta_best == 0.0
    assert optimal_tsr(TP) == pytest.approx(lam_best, abs=0.02)
    assert optimal_cp(TP) == pytest.approx(cp_best, abs=1e-4)
    assert optimal_cp(TP) >= cp_best - 1e-12


def test_cp_decreasing_in_pitch_near_optimum():
    # finite-difference sign check on the fit near the tracking point
    lam = optimal_tsr(TP)
    for b in np.linspace(0.0, 2.0, 21):
        assert cp_surface(lam, float(b) + 0.05, TP) < cp_surface(lam, float(b), TP)


@given(
    st.floats(min_value=0.1, max_value=15.0),
    st.floats(min_value=0.0, max_value=25.0),
)
@settings(max_examples=300)
def test_cp_surface_stays_in_validity_region(lam, beta):
    cp = cp_surface(lam, beta, TP)
    assert 0.0 <= cp <= BETZ_LIMIT
    assert ct_from_cp(cp) <= CT_LIMIT


# --- power and thrust ------------------------------------------------------

def test_power_hand_arithmetic():
    # 0.5 * 1.225 * pi * 63^2 * 8^3 * 0.48 = 1.8769 MW
    assert power_from_cp(8.0, 0.48, TP) == pytest.approx(1.876931e6, rel=1e-4)


def test_mppt_power_near_hand_value():
    # the surface peak is Cp = 0.4800, so tracking power at 8 m/s lands on
    # the hand-computed 1.877 MW value
    assert mppt(8.0, TP).p_mech_w == pytest.approx(1.877e6, rel=5e-3)


def test_power_cubic_scaling_at_fixed_coefficients():
    # doubling wind at fixed (tsr, pitch) multiplies power by exactly 8
    tp = TurbineParams(omega_rated_radps=1.0)
    p1 = mech_power(6.0, 0.6, 1.0, tp)
    p2 = mech_power(12.0, 1.2, 1.0, tp)
    assert p2 == pytest.approx(8.0 * p1, rel=1e-12)


def test_thrust_hand_arithmetic():
    # 0.5 * 1.225 * pi * 63^2 * 8^2 * 0.8 = 0.391 MN
    assert thrust_from_ct(8.0, 0.8, TP) == pytest.approx(0.391027e6, rel=1e-3)


def test_thrust_zero_and_consistency():
    assert thrust_from_ct(8.0, 0.0, TP) == 0.0
    t = thrust(8.0, 0.8, 0.0, TP)
    cp = cp_surface(tip_speed_ratio(0.8, 8.0, TP), 0.0, TP)
    assert t == pytest.approx(thrust_from_ct(8.0, ct_from_cp(cp), TP), rel=1e-12)


def test_thrust_quadratic_scaling():
    tp = TurbineParams(omega_rated_radps=1.0)
    t1 = thrust(6.0, 0.6, 1.0, tp)
    t2 = thrust(12.0, 1.2, 1.0, tp)
    assert t2 == pytest.approx(4.0 * t1, rel=1e-9)


# --- zones and tracking ----------------------------------------------------

def test_zone_near_cut_in_is_one():
    assert zone(TP.v_cutin_mps + 0.05, TP) == 1


def test_zone_at_high_wind_saturates():
    assert zone(12.0, TP) in (3, 4)


def test_zone_rejects_outside_cut_range():
    with pytest.raises(DomainError):
        zone(2.0, TP)
    with pytest.raises(DomainError):
        zone(26.0, TP)


def test_zones_partition_contiguously():
    v = TP.v_cutin_mps
    prev = zone(v, TP)
    assert prev == 1
    while v < TP.v_cutout_mps:
        v = min(v + 0.01, TP.v_cutout_mps)
        z = zone(v, TP)
        assert z in (1, 2, 3, 4)
        assert z >= prev
        assert z - prev <= 1
        prev = z
    assert prev == 4


def test_mppt_zone2_matches_grid_oracle():
    pt = mppt(8.0, TP)
    assert pt.beta_deg == 0.0
    lams = np.linspace(6.0, 10.0, 2000)
    lam_oracle = float(lams[np.argmax([cp_surface(float(l), 0.0, TP) for l in lams])])
    assert pt.tsr == pytest.approx(lam_oracle, abs=0.01)


def test_mppt_zone4_holds_rated_power():
    pt = mppt(12.0, TP)
    assert pt.omega_pu == TP.omega_max_pu
    assert pt.beta_deg > 0.0
    assert pt.p_mech_w == pytest.approx(TP.rated_power_w, rel=1e-4)


def test_mppt_power_nondecreasing_in_wind():
    # slack covers the 1e-6-relative pitch root tolerance in the rated zone
    prev = 0.0
    for v in np.arange(TP.v_cutin_mps, TP.v_cutout_mps + 1e-9, 0.25):
        p = mppt(float(v), TP).p_mech_w
        assert p >= prev - 3e-6 * TP.rated_power_w
        prev = p


def test_mppt_beats_dense_operating_grid_in_cp():
    # 200 x 50 oracle grid in (omega, beta) at a zone-2 wind speed
    v = 8.0
    pt = mppt(v, TP)
    omegas = np.linspace(TP.omega_min_pu, TP.omega_max_pu, 200)
    betas = np.linspace(0.0, TP.beta_max_deg, 50)
    best = max(
        cp_surface(tip_speed_ratio(float(w), v, TP), float(b), TP)
        for w in omegas
        for b in betas
    )
    assert pt.cp >= best - 5e-5


# --- kinetic energy and derived points -------------------------------------

def test_kinetic_energy_values():
    assert kinetic_energy(1.0, TP) == pytest.approx(5.0, abs=1e-12)
    assert kinetic_energy(1.2, TP) == pytest.approx(7.2, abs=1e-12)
    assert kinetic_energy(0.0, TP) == 0.0


def test_kinetic_energy_monotone_in_speed():
    assert kinetic_energy(0.9, TP) > kinetic_energy(0.8, TP)


def test_operating_point_consistency():
    pt = operating_point(8.0, 0.9, 1.5, TP)
    lam = TP.radius_m * 0.9 * TP.omega_rated_radps / 8.0
    assert pt.tsr == pytest.approx(lam, rel=1e-14)
    assert pt.e_kin_pus == pytest.approx(TP.inertia_s * 0.81, rel=1e-14)
    assert 0.0 <= pt.ct < CT_LIMIT
    assert pt.p_mech_w == pytest.approx(power_from_cp(8.0, pt.cp, TP), rel=1e-14)


def test_smallest_pitch_meets_target_power():
    pt = mppt(8.0, TP)
    target = 0.9 * pt.p_mech_w
    beta = smallest_pitch_for_power(8.0, pt.omega_pu, target, TP)
    assert beta > 0.0
    assert mech_power(8.0, pt.omega_pu, beta, TP) == pytest.approx(target, rel=1e-6)


def test_turbine_params_validation():
    with pytest.raises(DomainError):
        TurbineParams(radius_m=-1.0)
    with pytest.raises(DomainError):
        TurbineParams(omega_min_pu=1.2)
    with pytest.raises(DomainError):
        TurbineParams(v_cutin_mps=30.0)
