import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subspace_dr.iteration import FixedCount, run_dr, run_map
from subspace_dr.operators import dr_operator, map_operator
from subspace_dr.subspace_core import projector_matrix
from subspace_dr.two_lines import (
    PlaneConfig,
    closed_form_dr_power,
    closed_form_map_power,
    closed_form_norms,
    closed_form_shadow_power,
    cubic_angle,
    curve_data,
    figure_surface,
    read_columns,
    surface_rows,
    write_columns,
)

PI17 = PlaneConfig.from_fraction(1, 17)


def test_plane_config_bounds():
    with pytest.raises(ValueError):
        PlaneConfig(0.0)
    with pytest.raises(ValueError):
        PlaneConfig(2.0)
    with pytest.raises(ValueError):
        PlaneConfig.from_fraction(1, 0)
    assert PlaneConfig.from_fraction(1, 2).theta == pytest.approx(math.pi / 2)


def test_dr_power_small_cases():
    assert np.array_equal(closed_form_dr_power(PI17, 0), np.eye(2))
    cfg = PlaneConfig.from_fraction(1, 3)
    s3 = math.sqrt(3) / 4
    assert np.allclose(closed_form_dr_power(cfg, 1), [[0.25, -s3], [s3, 0.25]], atol=1e-15)
    with pytest.raises(ValueError):
        closed_form_dr_power(cfg, -1)


def test_dr_power_matches_general_machinery():
    T = dr_operator(*PI17.subspaces()).matrix
    assert np.max(np.abs(closed_form_dr_power(PI17, 5) - np.linalg.matrix_power(T, 5))) <= 1e-13


@pytest.mark.parametrize("n", [1, 2, 7, 30])
def test_shadow_and_map_powers_match_general_machinery(n):
    U, V = PI17.subspaces()
    T = dr_operator(U, V).matrix
    PU = projector_matrix(U)
    M = map_operator(U, V).matrix
    assert np.max(np.abs(closed_form_shadow_power(PI17, n) - PU @ np.linalg.matrix_power(T, n))) <= 1e-13
    assert np.max(np.abs(closed_form_map_power(PI17, n) - np.linalg.matrix_power(M, n))) <= 1e-13


def test_norms_match_traces():
    x = np.array([0.6, -1.3])
    U, V = PI17.subspaces()
    dr = run_dr(U, V, x, FixedCount(60))
    mp = run_map(U, V, x, FixedCount(60))
    for n in range(1, 61):
        ref = closed_form_norms(PI17, x, n)
        assert abs(dr.steps[n].iterate_norm - ref.dr_norm) <= 1e-12
        assert abs(dr.steps[n].true_error - ref.shadow_norm) <= 1e-12
        assert abs(mp.steps[n].true_error - ref.map_norm) <= 1e-12


def test_norm_edge_cases():
    assert closed_form_norms(PI17, [0.0, 0.0], 4) == (0.0, 0.0, 0.0)
    right = closed_form_norms(PlaneConfig(math.pi / 2), [1.0, 2.0], 1)
    # cos(pi/2) rounds to 6e-17 in floating point
    assert right.dr_norm <= 1e-15 and right.map_norm <= 1e-15
    with pytest.raises(ValueError):
        closed_form_norms(PI17, [1.0, 0.0], 0)


def test_figure_one_curves():
    c = curve_data(PI17, [1.0, 0.0], 100)
    n = np.arange(1, 101)
    cos = math.cos(math.pi / 17)
    assert np.allclose(c["DR"], cos**n, rtol=1e-14)
    assert np.all(c["SHADOW"] <= c["DR"] + 1e-14)
    assert np.any(np.diff(c["SHADOW"]) > 0)  # rippling
    assert c["MAP"][-1] / c["DR"][-1] == pytest.approx(cos**99, rel=1e-12)
    assert c["MAP"][-1] < c["DR"][-1]


@given(st.floats(0.01, math.pi / 2), st.floats(-5, 5), st.floats(-5, 5), st.integers(1, 200))
def test_shadow_never_exceeds_iterate(theta, x1, x2, n):
    r = closed_form_norms(PlaneConfig(theta), [x1, x2], n)
    assert r.shadow_norm <= r.dr_norm + 1e-14
    assert r.map_norm <= r.dr_norm + 1e-14


def test_surface_edges_and_interior():
    t = np.array([0.0, 0.37, 1.0])
    n = np.array([1, 5, 40])
    for q in ("DR", "SHADOW", "MAP"):
        S = figure_surface(t, n, q)
        assert S.shape == (3, 3)
        assert np.allclose(S[0], 1.0)
        assert np.max(np.abs(S[2])) <= 1e-15
        cfg = PlaneConfig(float(cubic_angle(0.37)))
        for j, k in enumerate(n):
            ref = closed_form_norms(cfg, [1.0, 0.0], int(k))
            val = {"DR": ref.dr_norm, "SHADOW": ref.shadow_norm, "MAP": ref.map_norm}[q]
            assert S[1, j] == pytest.approx(val, rel=1e-13, abs=1e-300)


def test_surface_argument_checks():
    with pytest.raises(ValueError):
        figure_surface([0.5], [1], "BOGUS")
    with pytest.raises(ValueError):
        figure_surface([], [1], "DR")


def test_columns_round_trip(tmp_path):
    t = np.linspace(0, 1, 4)
    n = np.arange(1, 4)
    vals = figure_surface(t, n, "SHADOW")
    p = write_columns(tmp_path / "s.dat", surface_rows("SHADOW", t, n, vals))
    assert p.read_text().splitlines()[0] == "# quantity theta_param n value"
    rows = read_columns(p)
    assert len(rows) == 12
    assert all(r[0] == "SHADOW" for r in rows)
    assert np.array_equal(np.array([r[3] for r in rows]).reshape(4, 3), vals)
