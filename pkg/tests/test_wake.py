"""Stationary row-wake recursion and the set-point cascade."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windrow.aero import TurbineParams
from windrow.errors import DomainError
from windrow.wake import RowInflow, WakeParams, next_wind, propagate_row

TP = TurbineParams()
WP = WakeParams()


def test_wake_params_invariant():
    with pytest.raises(DomainError):
        WakeParams(k_prime=0.1, k=0.2)
    with pytest.raises(DomainError):
        WakeParams(k_prime=1.2, k=0.1)


def test_undisturbed_flow_passes_through():
    assert next_wind(8.0, 8.0, 0.0, WP) == 8.0


def test_hand_evaluated_recursion():
    # 8 + 0.35*(8 - 8) - 0.1*8*0.8 = 7.36
    v2 = next_wind(8.0, 8.0, 0.8, WP)
    assert v2 == pytest.approx(7.36, abs=1e-12)
    # 7.36 + 0.35*0.64 - 0.64 = 6.944
    v3 = next_wind(8.0, v2, 0.8, WP)
    assert v3 == pytest.approx(6.944, abs=1e-12)


def test_preconditions():
    with pytest.raises(DomainError):
        next_wind(0.0, 1.0, 0.1, WP)
    with pytest.raises(DomainError):
        next_wind(8.0, 9.0, 0.1, WP)  # inflow above free wind
    with pytest.raises(DomainError):
        next_wind(8.0, 0.0, 0.1, WP)
    with pytest.raises(DomainError):
        next_wind(8.0, 8.0, 8.0 / 9.0, WP)


def test_affine_in_thrust_with_exact_slope():
    # dv/dct = -k * v_free exactly
    v1, vi = 9.0, 8.2
    a = next_wind(v1, vi, 0.2, WP)
    b = next_wind(v1, vi, 0.6, WP)
    assert (b - a) / 0.4 == pytest.approx(-WP.k * v1, rel=1e-12)


def test_lower_thrust_raises_downstream_wind():
    assert next_wind(8.0, 8.0, 0.3, WP) > next_wind(8.0, 8.0, 0.5, WP)


@given(
    st.floats(min_value=1.0, max_value=25.0),
    st.floats(min_value=0.05, max_value=1.0),
    st.floats(min_value=0.0, max_value=8.0 / 9.0 - 1e-9),
)
@settings(max_examples=300)
def test_downstream_never_exceeds_free_wind(v_free, frac, ct):
    v_i = frac * v_free
    assert next_wind(v_free, v_i, ct, WP) <= v_free + 1e-12


def test_identical_thrust_row_converges_geometrically():
    v1, ct = 8.0, 0.55
    v_star = v1 * (WP.k_prime - WP.k * ct) / WP.k_prime
    v = v1
    for i in range(1, 20):
        v = next_wind(v1, v, ct, WP)
        expected = v_star + (1.0 - WP.k_prime) ** i * (v1 - v_star)
        assert v == pytest.approx(expected, abs=1e-12)
    # the fixed point maps to itself
    assert next_wind(v1, v_star, ct, WP) == pytest.approx(v_star, abs=1e-12)


def test_propagate_single_turbine():
    inflow, points = propagate_row(8.0, [(0.8, 0.0)], TP, WP)
    assert inflow.v_mps == (8.0,)
    assert len(points) == 1


def test_propagate_feathered_row_sees_free_wind_everywhere():
    # fully feathered blades: the fit clamps to cp = 0, hence ct = 0
    setpoints = [(0.8, TP.beta_max_deg)] * 4
    inflow, points = propagate_row(8.0, setpoints, TP, WP)
    assert all(pt.cp == 0.0 and pt.ct == 0.0 for pt in points)
    assert inflow.v_mps == (8.0, 8.0, 8.0, 8.0)


def test_propagate_cascade_is_sequential_and_consistent():
    setpoints = [(0.9, 0.0), (0.85, 1.0), (0.8, 0.0)]
    inflow, points = propagate_row(8.0, setpoints, TP, WP)
    v = 8.0
    for pt, v_stored in zip(points, inflow.v_mps):
        assert v_stored == v
        assert pt.v_mps == v
        v = next_wind(8.0, v, pt.ct, WP)


def test_cascade_order_matters():
    # a de-loaded (pitched) turbine ahead of a tracking one, and vice versa
    a = [(0.9, 3.0), (0.8, 0.0)]
    b = [(0.8, 0.0), (0.9, 3.0)]
    inflow_a, _ = propagate_row(8.0, a, TP, WP)
    inflow_b, _ = propagate_row(8.0, b, TP, WP)
    assert inflow_a.v_mps[1] != inflow_b.v_mps[1]


def test_propagate_rejects_empty_row():
    with pytest.raises(DomainError):
        propagate_row(8.0, [], TP, WP)


def test_row_inflow_invariants():
    with pytest.raises(DomainError):
        RowInflow(v_free_mps=8.0, v_mps=(7.0, 6.0))
    with pytest.raises(DomainError):
        RowInflow(v_free_mps=8.0, v_mps=(8.0, -1.0))
