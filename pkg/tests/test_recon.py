import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcfv.recon import (
    FaceInput,
    ReconConfig,
    jameson_average,
    limited_frink,
    limited_upwind,
    limiter_theta,
    reconstruct,
    reconstruct_frink,
    reconstruct_jameson,
    reconstruct_one_sided,
    reconstruct_upwind,
)


def face(U_i, U_j=0.0, V_ij=0.0, V_ji=0.0, W=0.0, h=None):
    return FaceInput(np.atleast_1d(U_i), np.atleast_1d(U_j), np.atleast_1d(V_ij), np.atleast_1d(V_ji), np.atleast_1d(W), h)


def test_frink_direct_evaluation():
    st_ = reconstruct_frink(face(0.0, V_ij=-3.0, W=1.5), ReconConfig("frink", dim=2))
    assert st_.U_plus[0] == pytest.approx(1.5)


def test_frink_exact_for_linear_on_reference_triangle():
    # U = x + y on (0,0),(1,0),(0,1): centroid value 2/3, face x+y=1 has midpoint value 1
    st_ = reconstruct_frink(face(2 / 3, V_ij=0.0, W=1.0), ReconConfig("frink", dim=2))
    assert st_.U_plus[0] == pytest.approx(1.0)


def test_upwind_direct_evaluation():
    st_ = reconstruct_upwind(face(1.0, V_ij=0.0), ReconConfig("upwind", dim=2))
    assert st_.U_plus[0] == pytest.approx(1.5)


def test_upwind_exact_for_linear_on_reference_triangle():
    st_ = reconstruct_upwind(face(2 / 3, V_ij=0.0), ReconConfig("upwind", dim=2))
    assert st_.U_plus[0] == pytest.approx(1.0)


def test_linear_exactness_on_reference_tet():
    # U = x + y + z on the reference tet; the face opposite the origin has midpoint value 1
    inp = face(0.75, V_ij=0.0, W=1.0)
    assert reconstruct_frink(inp, ReconConfig("frink", dim=3)).U_plus[0] == pytest.approx(1.0)
    assert reconstruct_upwind(inp, ReconConfig("upwind", dim=3)).U_plus[0] == pytest.approx(1.0)


@pytest.mark.parametrize("scheme", ["first_order", "frink", "upwind", "jameson"])
@pytest.mark.parametrize("limited", [False, True])
def test_constant_field_is_kept(scheme, limited):
    c = 2.75
    st_ = reconstruct(face(c, c, c, c, c, h=np.ones(1)), ReconConfig(scheme, limited, 3))
    assert st_.U_plus[0] == pytest.approx(c)
    assert st_.U_minus[0] == pytest.approx(c)


def test_jameson_equal_slopes():
    # a = U_i - V_ij = 1, b = V_ji - U_j = 1
    st_ = reconstruct_jameson(face(1.0, 0.0, 0.0, 1.0), ReconConfig("jameson", dim=3))
    assert st_.U_plus[0] == pytest.approx(1.0 + 1.0 / 3.0)
    assert st_.U_minus[0] == pytest.approx(0.0 - 1.0 / 3.0)


def test_jameson_opposite_slopes_are_first_order():
    st_ = reconstruct_jameson(face(1.0, 0.0, 0.0, -1.0), ReconConfig("jameson", dim=3))
    assert st_.U_plus[0] == pytest.approx(1.0)
    assert st_.U_minus[0] == pytest.approx(0.0)


def test_jameson_minmod_case():
    L, R = jameson_average(1.0, 0.0, q=1.0)
    assert R == pytest.approx(1.0)
    assert L == pytest.approx(0.0)


def test_jameson_threshold_keeps_small_noise():
    # both slopes far below eps h^1.5: R stays small and the average survives
    L, R = jameson_average(1e-9, -1e-9 / 2, q=2.0, threshold=1e-3)
    assert R < 1e-10
    assert L == pytest.approx(0.25e-9)


@pytest.mark.parametrize("r,expected", [(-1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (4.0, 0.5)])
def test_limiter_function(r, expected):
    assert limiter_theta(r) == pytest.approx(expected)


def test_frink_gate_zeroes_local_extremum():
    # U_i above both its neighbour and its opposite vertex
    st_ = limited_frink(face(1.0, 0.0, V_ij=0.5, W=3.0), ReconConfig("frink", True, 2))
    assert st_.theta_ij[0] == 0.0
    assert st_.U_plus[0] == 1.0


def test_frink_linear_data_unlimited():
    # linear data on the reference triangle: U_j - U_i = 2 dU
    cfg = ReconConfig("frink", True, 2)
    dU = (1.0 - 0.0) / 3.0
    st_ = limited_frink(face(2 / 3, 2 / 3 + 2 * dU, V_ij=0.0, V_ji=2.0, W=1.0), cfg)
    assert st_.theta_ij[0] == pytest.approx(1.0)
    assert st_.U_plus[0] == pytest.approx(1.0)


def test_frink_bound_case_without_cap():
    cfg = ReconConfig("frink", True, 2, frink_cap=False)
    # dU = (W - V)/3 = 1 and U_j - U_i = 0.5, so r = 4
    st_ = limited_frink(face(1.0, 1.5, V_ij=0.0, V_ji=1.5, W=3.0), cfg)
    assert st_.theta_ij[0] == pytest.approx(0.5)
    assert st_.U_plus[0] == pytest.approx(1.5)


def test_frink_cap_bounds_increment_by_vertex_gap():
    cfg = ReconConfig("frink", True, 2)
    st_ = limited_frink(face(1.0, 3.0, V_ij=0.9, V_ji=3.0, W=4.0), cfg)
    dU = (4.0 - 0.9) / 3.0
    assert abs(st_.theta_ij[0] * dU) <= 0.1 + 1e-15


def test_upwind_flat_direction():
    st_ = limited_upwind(face(2.0, 7.0, V_ij=2.0, V_ji=7.0), ReconConfig("upwind", True, 2))
    assert st_.U_plus[0] == 2.0


def test_upwind_linear_matches_unlimited():
    cfg = ReconConfig("upwind", True, 2)
    # r = 1: dU = (U_i - V)/2 = 1/3 and U_j - U_i = 2/3
    inp = face(2 / 3, 4 / 3, V_ij=0.0, V_ji=2.0)
    assert limited_upwind(inp, cfg).U_plus[0] == pytest.approx(reconstruct_upwind(inp, cfg).U_plus[0])


def test_upwind_opposite_sign_is_first_order():
    st_ = limited_upwind(face(1.0, 2.0, V_ij=2.0, V_ji=2.0), ReconConfig("upwind", True, 2))
    assert st_.theta_ij[0] == 0.0
    assert st_.U_plus[0] == 1.0


def test_flat_neighbour_difference_guard():
    cfg = ReconConfig("upwind", True, 2)
    st_ = limited_upwind(face(1.0, 1.0, V_ij=0.0, V_ji=1.0), cfg)
    # neighbour difference is zero but the increment is not: no increment allowed
    assert st_.theta_ij[0] == 0.0
    assert st_.theta_ji[0] == 1.0


def test_vector_components_are_limited_independently():
    cfg = ReconConfig("upwind", True, 3)
    U_i = np.array([[1.0, 1.0]])
    U_j = np.array([[2.0, 0.0]])
    V_ij = np.array([[0.0, 0.0]])
    st_ = limited_upwind(FaceInput(U_i, U_j, V_ij, U_j, U_j), cfg)
    # first component r = (1/3)/(1/2) < 2: kept; second has the wrong sign: dropped
    np.testing.assert_allclose(st_.theta_ij, [[1.0, 0.0]])


def test_one_sided_boundary_states():
    cfg = ReconConfig("upwind", False, 2)
    assert reconstruct_one_sided(1.0, 0.0, 0.0, cfg) == pytest.approx(1.5)
    assert reconstruct_one_sided(1.0, 0.0, 0.0, ReconConfig("upwind", True, 2)) == 1.0
    assert reconstruct_one_sided(1.0, 0.0, 0.0, ReconConfig("jameson", False, 2)) == 1.0


def test_config_validation():
    with pytest.raises(ValueError, match="valid"):
        ReconConfig("muscl")
    with pytest.raises(ValueError):
        ReconConfig(dim=4)
    with pytest.raises(ValueError):
        ReconConfig("jameson", jameson_q=5.0)


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(U_i=finite, U_j=finite, V_ij=finite, V_ji=finite, W=finite, dim=st.sampled_from([2, 3]))
def test_limited_states_stay_between_neighbours(U_i, U_j, V_ij, V_ji, W, dim):
    inp = face(U_i, U_j, V_ij, V_ji, W)
    tol = 1e-9 * max(1.0, abs(U_i), abs(U_j))
    lo, hi = min(U_i, U_j) - tol, max(U_i, U_j) + tol
    for scheme in ("frink", "upwind"):
        cfg = ReconConfig(scheme, True, dim)
        st_ = reconstruct(inp, cfg)
        assert lo <= st_.U_plus[0] <= hi
        assert lo <= st_.U_minus[0] <= hi
        assert 0.0 <= st_.theta_ij[0] <= 1.0


@settings(max_examples=300, deadline=None)
@given(U_i=finite, U_j=finite, V_ij=finite, W=finite)
def test_theta_times_r_at_most_two_and_gate(U_i, U_j, V_ij, W):
    cfg = ReconConfig("frink", True, 2)
    st_ = limited_frink(face(U_i, U_j, V_ij, U_j, W), cfg)
    theta = st_.theta_ij[0]
    dU = cfg.alpha * (W - V_ij)
    diff = U_j - U_i
    if abs(diff) > 1e-12 * max(1.0, abs(U_i), abs(U_j)):
        assert theta * dU / (0.5 * diff) <= 2.0 + 1e-12
    if (U_j - U_i) * (U_i - V_ij) <= 0:
        assert theta == 0.0
