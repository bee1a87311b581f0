import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerwave.errors import ConfigurationError, DomainError
from eulerwave.lifted_algebra import State, capital_matrix, lift
from eulerwave.rigidity_lab import (DEGENERATE, INCONCLUSIVE, OPERATOR_AL,
                                    OSCILLATION_OBSERVED, RIGIDITY_CONSISTENT, TorusField,
                                    afree_projection, afree_residual, empirical_ym, laminate,
                                    lattice_direction, matrix_ranks, rank_scan,
                                    rigidity_experiment, sphere_samples, symbol,
                                    two_state_field)


def lifted(rho, u1, u2):
    return lift(State(rho, (u1, u2))).as_vector()


def random_field(N, axes, seed):
    rng = np.random.default_rng(seed)
    return TorusField(rng.standard_normal((N,) * len(axes) + (8,)), axes)


def test_operator_is_read_only():
    with pytest.raises(ValueError):
        OPERATOR_AL[0, 0, 0] = 2.0


def test_symbol_matches_capital_matrix():
    rng = np.random.default_rng(0)
    for _ in range(10):
        z, xi = rng.standard_normal(8), rng.standard_normal(3)
        np.testing.assert_allclose(symbol(xi) @ z, capital_matrix(z) @ xi, atol=1e-12)


def test_symbol_on_time_axis():
    np.testing.assert_array_equal(symbol([1.0, 0.0, 0.0])[:, :3], np.eye(3))


def test_operator_rank_is_constant():
    scan = rank_scan(2000)
    assert scan.constant and scan.min_rank == 3
    assert scan.samples == 2003


def test_toy_operator_with_varying_rank():
    toy = np.zeros((2, 2, 2))
    toy[0, 0, 0] = toy[1, 1, 1] = 1.0  # A(xi) = diag(xi1, xi2)
    scan = rank_scan(64, toy)
    assert not scan.constant
    assert (scan.min_rank, scan.max_rank) == (1, 2)


def test_sphere_samples_are_unit():
    for dim in (2, 3, 5):
        pts = sphere_samples(50, dim)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0)
    with pytest.raises(DomainError):
        sphere_samples(0)


def test_matrix_ranks_relative_tolerance():
    M = np.stack([np.diag([1.0, 1e-12, 0.0]), np.diag([1e6, 1.0, 1.0])])
    np.testing.assert_array_equal(matrix_ranks(M), [1, 3])


@pytest.mark.parametrize("axes", [(0, 2), (0, 1, 2), (1,)])
def test_projection_is_idempotent_and_afree(axes):
    f = random_field(8, axes, seed=len(axes))
    g = afree_projection(f)
    assert afree_residual(g) <= 1e-12
    np.testing.assert_allclose(afree_projection(g).values, g.values, atol=1e-12)
    np.testing.assert_allclose(g.mean(), f.mean(), atol=1e-12)


def test_projection_is_orthogonal():
    f, h = random_field(8, (0, 2), 1), random_field(8, (0, 2), 2)
    pf, ph = afree_projection(f), afree_projection(h)
    assert np.sum(pf.values * h.values) == pytest.approx(np.sum(f.values * ph.values), rel=1e-10)


def test_constant_field_is_afree():
    f = TorusField(np.broadcast_to(lifted(2.0, 1.0, -1.0), (16, 16, 8)), (0, 2))
    assert afree_residual(f) == 0.0


def test_torus_field_validation():
    with pytest.raises(ConfigurationError):
        TorusField(np.zeros((12, 12, 8)), (0, 2))
    with pytest.raises(ConfigurationError):
        TorusField(np.zeros((8, 4, 8)), (0, 2))
    with pytest.raises(ConfigurationError):
        TorusField(np.zeros((8, 8, 7)), (0, 2))
    with pytest.raises(ConfigurationError):
        TorusField(np.zeros((8, 8, 8)), (2, 2))


def test_lattice_direction():
    k, exact = lattice_direction([0.0, 1 / np.sqrt(2), -1 / np.sqrt(2)])
    assert tuple(k) == (0, 1, -1) and exact
    # orientation of the input is kept
    k, exact = lattice_direction([-2.0, 0.0, -1.0])
    assert tuple(k) == (-2, 0, -1) and exact
    k, exact = lattice_direction([1.0, np.pi, 0.0])
    assert not exact
    with pytest.raises(DomainError):
        lattice_direction([0.0, 0.0, 0.0])


def test_laminate_mean_and_afree():
    za, zb = lifted(1.0, 0.0, 0.0), lifted(1.0, 1.0, 1.0)
    f = laminate(za, zb, 0.3, 2, N=32)
    np.testing.assert_allclose(f.mean(), 0.3 * za + 0.7 * zb, atol=1e-12)
    assert f.exact_direction
    assert afree_residual(f) <= 1e-10


@pytest.mark.parametrize("lam,expected", [(0.0, "b"), (1.0, "a")])
def test_laminate_degenerate_fractions(lam, expected):
    za, zb = lifted(1.0, 0.0, 0.0), lifted(1.0, 1.0, 0.0)
    f = laminate(za, zb, lam, 1, N=16)
    target = za if expected == "a" else zb
    np.testing.assert_allclose(f.flat(), np.broadcast_to(target, f.flat().shape), atol=1e-14)


def test_laminate_rejects_non_connected_pair():
    with pytest.raises(DomainError):
        laminate(lifted(1.0, 0.0, 0.0), lifted(4.0, 0.0, 0.0), 0.5, 1, N=16)


def test_two_state_field_validation():
    za, zb = lifted(1.0, 0.0, 0.0), lifted(4.0, 0.0, 0.0)
    with pytest.raises(ConfigurationError):
        two_state_field(za, zb, 0.5, 1, (1, 0, 0), N=48)
    with pytest.raises(DomainError):
        two_state_field(za, zb, 1.5, 1, (1, 0, 0), N=16)
    with pytest.raises(DomainError):
        two_state_field(za, zb, 0.5, 0, (1, 0, 0), N=16)
    with pytest.raises(ConfigurationError):
        two_state_field(za, zb, 0.5, 1, (1, 0, 0), N=16, profile="smooth")


def test_empirical_ym_two_atoms():
    za, zb = lifted(1.0, 0.0, 0.0), lifted(1.0, 1.0, 1.0)
    ym = empirical_ym(laminate(za, zb, 0.25, 4, N=32), za, zb)
    assert ym.mass_near(0.0) == pytest.approx(0.25)
    assert ym.mass_near(1.0) == pytest.approx(0.75)
    assert sum(m for _, m in ym.rows()) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        empirical_ym(laminate(za, zb, 0.25, 4, N=32), za, za)


@settings(max_examples=25)
@given(st.integers(0, 15), st.integers(0, 15))
def test_residual_translation_invariant(s0, s1):
    f = random_field(16, (0, 2), seed=4)
    assert afree_residual(f.shifted((s0, s1))) == pytest.approx(afree_residual(f), rel=1e-10)


@settings(max_examples=25)
@given(st.floats(0.2, 4.0), st.floats(-2, 2), st.floats(-2, 2),
       st.floats(0.01, 2) | st.floats(-2, -0.01),
       st.sampled_from([(1, 0), (0, 1), (1, 1), (1, -1)]))
def test_alias_free_laminates_are_afree(rho, u1, u2, du, shape):
    # equal densities and a velocity jump along one of the aliasing-free directions
    da, db = shape
    za, zb = lifted(rho, u1, u2), lifted(rho, u1 + du * da, u2 + du * db)
    f = laminate(za, zb, 0.5, 2, N=32)
    if f.exact_direction:
        assert afree_residual(f) <= 1e-10


def test_experiment_connected_pair():
    r = rigidity_experiment(((1, 0, 0), (1, 1, 1)), n_list=(1, 2, 4), N=32)
    assert r.outcome == OSCILLATION_OBSERVED and r.connected
    assert all(row.afree_residual <= 1e-10 for row in r.rows)


def test_experiment_non_connected_pair():
    r = rigidity_experiment(((1, 0, 0), (4, 0, 0)), n_list=(1, 2, 4, 8), N=32)
    assert r.outcome == RIGIDITY_CONSISTENT and not r.connected
    # Z is 3x3, so the sign follows the order of the pair
    assert abs(r.det) == pytest.approx(675.0)
    assert r.direction == (1, 0, 0)
    for row in r.rows:
        assert row.d_n == pytest.approx(1 / 6, rel=1e-12)
        assert row.mass_a == pytest.approx(0.5)


def test_experiment_identical_states():
    r = rigidity_experiment(((1, 0.3, 0), (1, 0.3, 0)), n_list=(1, 2), N=16)
    assert r.outcome == DEGENERATE and r.difference_zero


def test_experiment_high_floor_is_inconclusive():
    r = rigidity_experiment(((1, 0, 0), (4, 0, 0)), n_list=(1, 2), N=16, floor=0.5)
    assert r.outcome == INCONCLUSIVE


def test_experiment_rejects_bad_inputs():
    with pytest.raises(ConfigurationError):
        rigidity_experiment(((1, 0, 0), (4, 0, 0)), N=48)
    with pytest.raises(DomainError):
        rigidity_experiment(((1, 0, 0), (4, 0, 0)), gamma=1.4)
