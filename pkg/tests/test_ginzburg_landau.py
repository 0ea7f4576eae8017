import numpy as np
import pytest

from dwell.exceptions import InstanceError
from dwell.ginzburg_landau import (
    GridSpec,
    build_dwp_instance,
    difference_matrices,
    discrete_energy,
    index_set,
    node_index,
    upper_bound_check,
)
from dwell.pipeline import solve


def _loop_energy(spec, e):
    """Direct double loop over cells, 1-based as in the formula."""
    s, t, a, b = spec.s, spec.t, spec.gl_alpha, spec.gl_beta
    E = lambda i, j: e[node_index(spec, i, j)]
    total = 0.0
    for i in range(1, s + 1):
        for j in range(1, t + 1):
            total += s / (2 * t) * (E(i + 1, j) - E(i, j)) ** 2
            total += t / (2 * s) * (E(i, j + 1) - E(i, j)) ** 2
            total += a / (2 * s * t) * (0.5 * E(i, j) ** 2 - b) ** 2
    return total


def _random_spec(rng):
    s, t = (int(v) for v in rng.integers(1, 5, size=2))
    return GridSpec(s, t, rng.uniform(0.5, 10.0), rng.uniform(0.1, 3.0))


def test_spec_validation():
    for args in [(0, 1, 1.0, 1.0), (1, 1, 0.0, 1.0), (1, 1, 1.0, 0.0), (1.5, 1, 1.0, 1.0)]:
        with pytest.raises(InstanceError):
            GridSpec(*args)
    assert GridSpec(2, 3, 1.0, 1.0).size == 12


def test_energy_examples():
    spec = GridSpec(1, 1, 8.0, 1.0)
    assert discrete_energy(spec, np.zeros(4)) == 4.0
    spec = GridSpec(3, 2, 5.0, 0.7)
    assert discrete_energy(spec, np.full(spec.size, np.sqrt(1.4))) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(InstanceError):
        discrete_energy(spec, np.zeros(3))


def test_energy_matches_loop_reference():
    rng = np.random.default_rng(26)
    for _ in range(50):
        spec = _random_spec(rng)
        e = rng.standard_normal(spec.size)
        assert discrete_energy(spec, e) == pytest.approx(_loop_energy(spec, e), rel=1e-12, abs=1e-12)


def test_index_set_is_cell_nodes():
    for s in range(1, 5):
        for t in range(1, 5):
            spec = GridSpec(s, t, 1.0, 1.0)
            cells = sorted(node_index(spec, i, j) + 1 for i in range(1, s + 1) for j in range(1, t + 1))
            assert index_set(spec).tolist() == cells


def test_small_grid_instance():
    inst = build_dwp_instance(GridSpec(1, 1, 8.0, 1.0))
    assert inst.n == 4
    np.testing.assert_allclose(np.diag(inst.A), [-6.0, -7.0, -7.0, -8.0])
    expected = np.diag([-6.0, -7.0, -7.0, -8.0])
    expected[0, 1] = expected[1, 0] = expected[0, 2] = expected[2, 0] = -1.0
    np.testing.assert_allclose(inst.A, expected)
    np.testing.assert_allclose(inst.B, 8 ** 0.25 * np.eye(4))
    assert inst.constant_offset == 4.0
    np.testing.assert_array_equal(inst.c, 0.0)
    np.testing.assert_array_equal(inst.f, 0.0)
    assert inst.d == 0.0


def test_zero_beta_limit_is_psd():
    rng = np.random.default_rng(27)
    for _ in range(10):
        spec = _random_spec(rng)
        Bsum, Csum = difference_matrices(spec)
        A0 = spec.s / spec.t * Bsum + spec.t / spec.s * Csum
        assert np.linalg.eigvalsh(A0)[0] >= -1e-12
        shifted = build_dwp_instance(GridSpec(spec.s, spec.t, spec.gl_alpha, 1e-300))
        np.testing.assert_allclose(shifted.A, A0, atol=1e-12)


def test_quadratic_forms_match_difference_sums():
    rng = np.random.default_rng(28)
    for _ in range(100):
        spec = _random_spec(rng)
        Bsum, Csum = difference_matrices(spec)
        e = rng.standard_normal(spec.size)
        G = e.reshape(spec.t + 1, spec.s + 1)
        dx = G[:spec.t, 1:] - G[:spec.t, :spec.s]
        dy = G[1:, :spec.s] - G[:spec.t, :spec.s]
        assert e @ Bsum @ e == pytest.approx(np.sum(dx**2), rel=1e-12, abs=1e-12)
        assert e @ Csum @ e == pytest.approx(np.sum(dy**2), rel=1e-12, abs=1e-12)


def test_sparsity_pattern_is_stencil_adjacency():
    spec = GridSpec(3, 2, 2.0, 1.0)
    A = build_dwp_instance(spec).A
    np.testing.assert_array_equal(A, A.T)
    adj = np.zeros_like(A, dtype=bool)
    for i in range(1, spec.s + 1):
        for j in range(1, spec.t + 1):
            k = node_index(spec, i, j)
            for nb in (node_index(spec, i + 1, j), node_index(spec, i, j + 1)):
                adj[k, nb] = adj[nb, k] = True
    off = ~np.eye(spec.size, dtype=bool)
    np.testing.assert_array_equal((A != 0) & off, adj)


def test_bound_at_zero_and_at_well():
    spec = GridSpec(2, 3, 4.0, 0.5)
    bound, energy = upper_bound_check(spec, np.zeros(spec.size))
    assert bound == pytest.approx(spec.gl_alpha * spec.gl_beta**2 / 2)
    assert bound >= energy
    bound, energy = upper_bound_check(spec, np.full(spec.size, 1.0))
    assert energy == pytest.approx(0.0, abs=1e-14)
    assert bound >= energy


def test_bound_slack_lower_estimate():
    # bound - energy >= alpha/(8st) (a - b)(a + b - 4 beta), a = |e|^2, b = cell-node part of a.
    rng = np.random.default_rng(29)
    for _ in range(300):
        spec = _random_spec(rng)
        e = rng.standard_normal(spec.size) * rng.choice([0.1, 1.0, 3.0])
        bound, energy = upper_bound_check(spec, e)
        a = e @ e
        cells = index_set(spec) - 1
        b = e[cells] @ e[cells]
        est = spec.gl_alpha / (8 * spec.s * spec.t) * (a - b) * (a + b - 4 * spec.gl_beta)
        assert bound - energy >= est - 1e-9 * max(1.0, abs(bound))


def test_bound_fails_for_small_fields_off_the_cells():
    # A unit value on a node outside every cell: the -alpha beta |e|^2 term has no matching well term.
    spec = GridSpec(1, 1, 8.0, 1.0)
    bound, energy = upper_bound_check(spec, np.array([0.0, 1.0, 0.0, 0.0]))
    assert bound == pytest.approx(1.5)
    assert energy == pytest.approx(4.5)
    assert bound < energy


def test_solve_generated_instance():
    spec = GridSpec(2, 2, 8.0, 1.0)
    inst = build_dwp_instance(spec)
    sol = solve(inst)
    assert np.isfinite(sol.value)
    # The minimized quantity is the majorant, so its minimum is at most the bound at any field.
    rng = np.random.default_rng(30)
    for e in rng.standard_normal((20, spec.size)):
        assert sol.value <= upper_bound_check(spec, e)[0] + 1e-9
    assert sol.value <= spec.gl_alpha * spec.gl_beta**2 / 2
