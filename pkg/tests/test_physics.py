import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from vcfv.errors import PositivityError
from vcfv.physics import (
    GasModel,
    ScalarModel,
    cons_to_prim,
    euler_flux,
    max_wave_speed,
    prim_to_cons,
    primitive,
    scalar_flux,
    scalar_wave_speed,
    sound_speed,
)


def test_gas_model_default_is_air():
    assert GasModel().gamma == 1.4
    with pytest.raises(ValueError):
        GasModel(1.0)


def test_cons_to_prim_at_rest():
    np.testing.assert_allclose(cons_to_prim([1.0, 0, 0, 0, 2.5]), [1.0, 0, 0, 0, 1.0])


def test_zero_internal_energy_is_rejected():
    with pytest.raises(PositivityError):
        cons_to_prim([1.0, 2.0, 0.0, 0.0, 2.0])


def test_negative_density_reports_cell():
    U = np.array([[1.0, 0.0, 2.5], [-1.0, 0.0, 2.5]])
    with pytest.raises(PositivityError) as info:
        cons_to_prim(U)
    assert info.value.cell == 1


def test_sod_left_state_energy():
    np.testing.assert_allclose(prim_to_cons(primitive(1.0, [0, 0, 0], 1.0)), [1, 0, 0, 0, 2.5])


def test_test2_left_state_energy():
    # 1 / (gamma - 1) * 0.4 + 0.5 * 1 * 4 = 1 + 2
    assert prim_to_cons(primitive(1.0, [-2.0], 0.4))[-1] == pytest.approx(3.0)


def test_prim_to_cons_rejects_bad_state():
    with pytest.raises(PositivityError):
        prim_to_cons([1.0, 0.0, 0.0])


def test_sound_speed():
    assert sound_speed([1.0, 0.0, 1.0]) == pytest.approx(math.sqrt(1.4))
    a = math.sqrt(1.4)
    assert max_wave_speed([1.0, a, 0.0, 1.0], [1.0, 0.0]) == pytest.approx(2 * a)


def test_pressure_only_flux_at_rest():
    n = np.array([0.3, -0.2, 0.5])
    np.testing.assert_allclose(euler_flux(primitive(1.3, [0, 0, 0], 0.7), n), [0, *(0.7 * n), 0])


def test_scalar_fluxes():
    np.testing.assert_allclose(scalar_flux(3.0, ScalarModel("advection", (1.0, 0.0))), [3.0, 0.0])
    burgers = ScalarModel("burgers", direction=(1.0, 0.0))
    assert np.linalg.norm(scalar_flux(2.0, burgers)) == pytest.approx(2.0)
    np.testing.assert_allclose(scalar_flux(0.0, burgers), 0.0)
    assert scalar_wave_speed(-2.0, [0.0, 1.0], burgers) == pytest.approx(0.0)
    assert scalar_wave_speed(-2.0, [1.0, 0.0], burgers) == pytest.approx(2.0)


def test_scalar_model_validation():
    with pytest.raises(ValueError):
        ScalarModel("heat")
    assert ScalarModel("advection", (1.0, 2.0, 3.0)).dim == 3


states = st.tuples(
    st.floats(0.01, 10.0),
    st.floats(-5.0, 5.0),
    st.floats(-5.0, 5.0),
    st.floats(-5.0, 5.0),
    st.floats(0.01, 10.0),
)


@settings(max_examples=100, deadline=None)
@given(W=states)
def test_round_trip(W):
    W = np.array(W)
    np.testing.assert_allclose(cons_to_prim(prim_to_cons(W)), W, rtol=1e-10, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(W=states, seed=st.integers(0, 10_000))
def test_flux_is_rotation_invariant(W, seed):
    W = np.array(W)
    R = Rotation.random(random_state=seed).as_matrix()
    n = np.array([0.2, -0.7, 0.4])
    F = euler_flux(W, n)
    Wr = W.copy()
    Wr[1:4] = R @ W[1:4]
    Fr = euler_flux(Wr, R @ n)
    np.testing.assert_allclose(Fr[[0, 4]], F[[0, 4]], rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(Fr[1:4], R @ F[1:4], rtol=1e-12, atol=1e-12)
