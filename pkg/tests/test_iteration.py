import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subspace_dr.iteration import (
    EmptyIntersectionError,
    FixedCount,
    MaxDistance,
    Method,
    RuleKind,
    StoppingRule,
    Termination,
    TrueError,
    evaluate_rule,
    run_batch,
    run_dr,
    run_dr_affine,
    run_map,
    run_map_affine,
)
from subspace_dr.operators import dr_operator, fix_projector
from subspace_dr.subspace_core import (
    AffineSubspace,
    DimensionMismatchError,
    intersect,
    line,
    principal_angles,
    project,
)

from .conftest import seeded_pair, seeded_start, subspace_pairs

TOL = 1e-10


def lines(theta):
    return line([1.0, 0.0]), line([math.cos(theta), math.sin(theta)])


# ---------------------------------------------------------------- stopping rules

def test_rule_validation():
    with pytest.raises(ValueError):
        TrueError(0.0)
    with pytest.raises(ValueError):
        MaxDistance(-1.0)
    with pytest.raises(ValueError):
        FixedCount(0)
    with pytest.raises(ValueError):
        StoppingRule(RuleKind.TRUE_ERROR, eps=1e-3, count=4)
    assert str(FixedCount(3)) == "FixedCount(3)"
    assert str(TrueError(1e-3)) == "TrueError(0.001)"


def test_point_in_intersection_satisfies_both_rules():
    U = line([1.0, 1.0, 0.0])
    V = line([1.0, 1.0, 0.0])
    W = intersect(U, V)
    z = np.array([2.0, 2.0, 0.0])
    assert evaluate_rule(TrueError(1e-3), U, V, W, z)
    assert evaluate_rule(MaxDistance(1e-3), U, V, W, z)
    assert not evaluate_rule(FixedCount(5), U, V, W, z)


def test_max_distance_rejects_far_from_u():
    eps = 1e-3
    U, V = line([1.0, 0.0]), line([0.0, 1.0])
    z = np.array([0.0, 2 * eps])  # d_U = 2 eps, d_V = 0
    assert not evaluate_rule(MaxDistance(eps), U, V, intersect(U, V), z)


def test_criteria_separate_points():
    # For z in U with a small angle between the lines, d_U = 0 and
    # d_V = sin(theta) |z| while d_{U∩V} = |z|.
    eps = 1e-3
    theta = 1e-3
    U, V = lines(theta)
    W = intersect(U, V)
    z = np.array([2 * eps, 0.0])
    assert not evaluate_rule(TrueError(eps), U, V, W, z)
    assert evaluate_rule(MaxDistance(eps), U, V, W, z)
    # the distances to U and V never exceed the distance to U ∩ V
    assert max(np.linalg.norm(z - project(U, z)), np.linalg.norm(z - project(V, z))) <= 2 * eps


# ---------------------------------------------------------------- DR driver

@pytest.mark.parametrize("theta", [math.pi / 17, math.pi / 5, math.pi / 2])
def test_dr_iterate_norm_on_two_lines(theta):
    U, V = lines(theta)
    tr = run_dr(U, V, [1.0, 0.0], FixedCount(40))
    assert tr.terminated_by is Termination.FIXED_COUNT and tr.iterations == 40
    n = tr.column("n")
    assert np.max(np.abs(tr.column("iterate_norm") - math.cos(theta) ** n)) <= 1e-12


def test_dr_start_in_intersection_stops_at_zero():
    U, V = seeded_pair(2)
    x0 = intersect(U, V).basis[:, 0] * 3.0
    for runner in (run_dr, run_map):
        tr = runner(U, V, x0, TrueError(1e-3))
        assert tr.iterations == 0 and tr.final_true_error <= 1e-12
        assert tr.terminated_by is Termination.TRUE_ERROR


def test_dr_true_error_consistent_with_rate():
    U, V = seeded_pair(4)
    x0 = seeded_start(4, 50)
    tr = run_dr(U, V, x0, TrueError(1e-3))
    c = principal_angles(U, V).friedrichs_cos
    assert tr.final_true_error < 1e-3
    assert c ** tr.iterations * np.linalg.norm(x0) >= tr.final_true_error
    assert np.allclose(tr.solution, project(intersect(U, V), x0))
    assert tr.rate == pytest.approx(c)


def test_cap_exhaustion_is_reported():
    U, V = lines(0.01)
    tr = run_dr(U, V, [1.0, 0.0], TrueError(1e-9), cap=5)
    assert tr.terminated_by is Termination.CAP_EXHAUSTED and tr.capped
    assert tr.iterations == 5
    tr = run_dr(U, V, [1.0, 0.0], FixedCount(10), cap=3)
    assert tr.capped and tr.iterations == 3


def test_driver_input_validation():
    U, V = lines(0.3)
    with pytest.raises(DimensionMismatchError):
        run_dr(U, V, [1.0, 0.0, 0.0], FixedCount(2))
    with pytest.raises(DimensionMismatchError):
        run_map(U, line([1.0, 0.0, 0.0]), [1.0, 0.0], FixedCount(2))
    with pytest.raises(ValueError):
        run_dr(U, V, [1.0, 0.0], FixedCount(2), cap=0)


def test_store_vectors_flag():
    U, V = lines(0.3)
    tr = run_dr(U, V, [1.0, 2.0], FixedCount(3))
    assert tr.steps[0].iterate is None
    tr = run_dr(U, V, [1.0, 2.0], FixedCount(3), store_vectors=True)
    assert all(s.iterate is not None and s.shadow_u is not None for s in tr.steps)


def test_composition_matches_dense_operator():
    U, V = seeded_pair(5)
    x0 = seeded_start(5, 50)
    T = dr_operator(U, V).matrix
    tr = run_dr(U, V, x0, FixedCount(60), store_vectors=True)
    x = x0.copy()
    for s in tr.steps:
        assert np.linalg.norm(s.iterate - x) <= 1e-11 * max(1.0, np.linalg.norm(x0))
        x = T @ x


def test_dr_trace_bounds_at_every_step():
    U, V = seeded_pair(6)
    x0 = seeded_start(6, 50)
    c = principal_angles(U, V).friedrichs_cos
    F = fix_projector(U, V).matrix
    tr = run_dr(U, V, x0, FixedCount(200), store_vectors=True)
    r0 = np.linalg.norm(x0 - F @ x0)
    for s in tr.steps:
        n = s.n
        assert np.linalg.norm(s.iterate - F @ x0) <= c**n * r0 + TOL
        assert max(s.true_error, s.shadow_v_error) <= c**n * np.linalg.norm(x0) + TOL
    for a, b in zip(tr.steps, tr.steps[1:]):
        assert b.shadow_v_error <= c * a.true_error + TOL


def test_iterate_norm_nonincreasing_when_fixed_part_vanishes():
    U, V = lines(0.2)
    tr = run_dr(U, V, [0.3, -1.2], FixedCount(100))
    assert np.all(np.diff(tr.column("iterate_norm")) <= 0)


# ---------------------------------------------------------------- MAP driver

def test_map_norms_on_two_lines():
    theta = math.pi / 9
    U, V = lines(theta)
    x0 = np.array([0.7, -2.0])
    tr = run_map(U, V, x0, FixedCount(30))
    for s in tr.steps[1:]:
        expected = math.cos(theta) ** (2 * s.n - 1) * abs(x0[0])
        assert abs(s.true_error - expected) <= 1e-12


def test_map_error_monotone_and_within_aronszajn_bound():
    U, V = seeded_pair(7)
    x0 = seeded_start(7, 50)
    c = principal_angles(U, V).friedrichs_cos
    tr = run_map(U, V, x0, TrueError(1e-4))
    err = tr.column("true_error")
    assert np.all(np.diff(err) <= 1e-12)
    r0 = np.linalg.norm(x0 - tr.solution)
    for s in tr.steps[1:]:
        assert s.true_error <= c ** (2 * s.n - 1) * r0 + TOL


def test_first_hitting_index():
    U, V = seeded_pair(8)
    x0 = seeded_start(8, 50)
    for runner in (run_dr, run_map):
        for rule in (TrueError(1e-3), MaxDistance(1e-3)):
            tr = runner(U, V, x0, rule)
            steps = tr.steps
            key = "true_error" if rule.kind is RuleKind.TRUE_ERROR else None

            def fires(s):
                if key:
                    return s.true_error < rule.eps
                return max(s.dist_u, s.dist_v) < rule.eps

            assert fires(steps[-1])
            assert not any(fires(s) for s in steps[:-1])


# ---------------------------------------------------------------- affine

def test_affine_through_origin_matches_linear():
    U, V = seeded_pair(9, d=12)
    x0 = seeded_start(9, 12)
    zero = np.zeros(12)
    a = run_dr_affine(AffineSubspace(zero, U), AffineSubspace(zero, V), x0, FixedCount(25))
    b = run_dr(U, V, x0, FixedCount(25))
    assert np.allclose(a.column("true_error"), b.column("true_error"), atol=1e-13)
    m1 = run_map_affine(AffineSubspace(zero, U), AffineSubspace(zero, V), x0, FixedCount(25))
    m2 = run_map(U, V, x0, FixedCount(25))
    assert np.allclose(m1.column("true_error"), m2.column("true_error"), atol=1e-13)


def test_affine_same_line_is_fixed_immediately():
    L = line([1.0, 2.0])
    A = AffineSubspace(np.array([0.0, 1.0]), L)
    B = AffineSubspace(np.array([1.0, 3.0]), L)  # same affine line
    x0 = np.array([4.0, -1.0])
    tr = run_dr_affine(A, B, x0, TrueError(1e-9))
    assert tr.iterations == 0
    assert np.allclose(tr.solution, A.project(x0))


def test_affine_lines_meeting_at_a_point():
    theta = 0.6
    p = np.array([2.0, -1.0])
    A = AffineSubspace(p + 5 * np.array([1.0, 0.0]), line([1.0, 0.0]))
    B = AffineSubspace(p - 3 * np.array([math.cos(theta), math.sin(theta)]),
                       line([math.cos(theta), math.sin(theta)]))
    # oracle: solve the 2x2 system for the crossing point
    M = np.column_stack([[1.0, 0.0], [-math.cos(theta), -math.sin(theta)]])
    s, t = np.linalg.solve(M, B.anchor - A.anchor)
    crossing = A.anchor + s * np.array([1.0, 0.0])
    assert np.allclose(crossing, p)
    x0 = np.array([7.0, 4.0])
    tr = run_dr_affine(A, B, x0, TrueError(1e-10))
    assert np.allclose(tr.solution, p, atol=1e-12)
    assert tr.rate == pytest.approx(math.cos(theta))
    for step in tr.steps:
        assert step.true_error <= tr.rate**step.n * np.linalg.norm(x0 - p) + TOL


def test_affine_parallel_lines_rejected():
    L = line([1.0, 0.0])
    with pytest.raises(EmptyIntersectionError):
        run_dr_affine(AffineSubspace(np.zeros(2), L), AffineSubspace(np.array([0.0, 1.0]), L),
                      [0.0, 0.0], FixedCount(3))


# ---------------------------------------------------------------- batch engine

@pytest.mark.parametrize("method", [Method.DR, Method.MAP])
def test_batch_agrees_with_single_runs(method):
    U, V = seeded_pair(10)
    X0 = np.column_stack([seeded_start(s, 50) for s in (1, 2, 3)])
    res = run_batch(U, V, X0, method, 1e-3)
    runner = run_dr if method is Method.DR else run_map
    for j in range(3):
        a = runner(U, V, X0[:, j], TrueError(1e-3))
        b = runner(U, V, X0[:, j], MaxDistance(1e-3))
        assert res.true_error_iters[j] == a.iterations
        assert res.max_distance_iters[j] == b.iterations
        assert res.true_error_final[j] == pytest.approx(a.final_true_error, rel=1e-9)
    assert not res.true_error_capped.any()


def test_batch_cap():
    U, V = lines(0.001)
    res = run_batch(U, V, np.array([[1.0], [0.0]]), "DR", 1e-9, cap=4)
    assert res.true_error_capped[0] and res.true_error_iters[0] == 4


# ---------------------------------------------------------------- properties

@given(subspace_pairs(), st.integers(1, 30))
def test_chained_shadow_bound_property(uvx, n):
    U, V, x = uvx
    c = principal_angles(U, V).friedrichs_cos
    tr = run_dr(U, V, x, FixedCount(n))
    scale = max(1.0, np.linalg.norm(x))
    for a, b in zip(tr.steps, tr.steps[1:]):
        assert b.shadow_v_error <= c * a.true_error + 1e-10 * scale
    for s in tr.steps:
        assert s.true_error <= c**s.n * np.linalg.norm(x) + 1e-10 * scale


@given(subspace_pairs(), st.integers(1, 30))
def test_map_error_never_increases(uvx, n):
    U, V, x = uvx
    err = run_map(U, V, x, FixedCount(n)).column("true_error")
    assert np.all(np.diff(err) <= 1e-12 * max(1.0, np.linalg.norm(x)))
