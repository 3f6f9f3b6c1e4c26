"""Grid construction, quadrature, and channel Hamiltonian checks."""

import numpy as np
import pytest

from attofano import fedvr


def test_lobatto_weights_sum_to_interval():
    for order in (3, 5, 8, 12):
        pts, wts = fedvr.gauss_lobatto(order)
        assert pts[0] == -1.0 and pts[-1] == 1.0
        np.testing.assert_allclose(wts.sum(), 2.0, rtol=1e-13)


@pytest.mark.parametrize("order", [4, 6, 8])
def test_lobatto_quadrature_exact_to_degree_limit(order):
    pts, wts = fedvr.gauss_lobatto(order)
    for deg in range(2 * order - 2):
        exact = (1.0 - (-1.0) ** (deg + 1)) / (deg + 1)
        assert abs(np.dot(wts, pts**deg) - exact) < 1e-12


def test_lobatto_rejects_tiny_order():
    with pytest.raises(fedvr.GridError):
        fedvr.gauss_lobatto(1)


def test_basis_dimension_formula():
    grid = fedvr.build_grid(100.0, 48, 8)
    assert grid.dim == 48 * 7 - 1 == 335
    assert grid.nodes.shape == (335,)
    assert grid.weights.shape == (335,)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(r_max=-1.0, n_elements=4, order=5),
        dict(r_max=10.0, n_elements=0, order=5),
        dict(r_max=10.0, n_elements=4, order=2),
    ],
)
def test_invalid_grid_dimensions_raise(kwargs):
    with pytest.raises(fedvr.GridError):
        fedvr.build_grid(**kwargs)


def test_invalid_breakpoints_raise():
    with pytest.raises(fedvr.GridError):
        fedvr.build_grid(10.0, 4, 5, breakpoints=[0.0, 1.0, 2.0, 10.0])
    with pytest.raises(fedvr.GridError):
        fedvr.build_grid(10.0, 4, 5, breakpoints=[0.0, 2.0, 1.0, 5.0, 10.0])
    with pytest.raises(fedvr.GridError):
        fedvr.build_grid(10.0, 4, 5, breakpoints=[1.0, 2.0, 3.0, 5.0, 10.0])


def test_quadrature_integrates_polynomial_on_graded_grid():
    breaks = np.array([0.0, 0.5, 2.0, 4.5, 10.0])
    grid = fedvr.build_grid(10.0, 4, 6, breakpoints=breaks)
    # r^3 (1 - r/10) vanishes at both walls, degree 4 <= 2*6-3 per element.
    vals = grid.nodes**3 * (1 - grid.nodes / 10.0)
    exact = 10.0**4 / 4 - 10.0**5 / (5 * 10.0)
    np.testing.assert_allclose(grid.integrate(vals), exact, rtol=1e-13)


def test_particle_in_box_spectrum():
    grid = fedvr.build_grid(100.0, 48, 8)
    op = fedvr.assemble_hamiltonian(grid, np.zeros(grid.dim), 0)
    energies, _ = fedvr.eigensolve(op, 4)
    exact = np.pi**2 * np.arange(1, 5) ** 2 / (2 * 100.0**2)
    np.testing.assert_allclose(energies, exact, rtol=1e-9)


def test_hydrogen_levels_uniform_grid():
    grid = fedvr.build_grid(100.0, 48, 8)
    coulomb = -1.0 / grid.nodes
    e_s, _ = fedvr.eigensolve(fedvr.assemble_hamiltonian(grid, coulomb, 0), 3)
    e_p, _ = fedvr.eigensolve(fedvr.assemble_hamiltonian(grid, coulomb, 1), 2)
    np.testing.assert_allclose(e_s[:3], [-0.5, -0.125, -1.0 / 18.0], atol=2e-9)
    np.testing.assert_allclose(e_p[:2], [-0.125, -1.0 / 18.0], atol=2e-9)


def test_hydrogen_ground_state_on_core_refined_grid():
    breaks = fedvr.core_refined_breakpoints(100.0, 48)
    grid = fedvr.build_grid(100.0, 48, 8, breakpoints=breaks)
    op = fedvr.assemble_hamiltonian(grid, -1.0 / grid.nodes, 0)
    energies, _ = fedvr.eigensolve(op, 1)
    np.testing.assert_allclose(energies[0], -0.5, atol=1e-10)


def test_kinetic_symmetric_derivative_antisymmetric():
    for breaks in (None, fedvr.core_refined_breakpoints(50.0, 24)):
        grid = fedvr.build_grid(50.0, 24, 7, breakpoints=breaks)
        t = grid.kinetic_matrix()
        d = grid.derivative_matrix()
        assert np.abs(t - t.T).max() < 1e-12
        assert np.abs(d + d.T).max() < 1e-11


def test_derivative_matrix_action():
    grid = fedvr.build_grid(100.0, 48, 8)
    k = 0.8
    coeffs = grid.values_to_coeffs(np.sin(k * grid.nodes))
    deriv = grid.coeffs_to_values(grid.derivative_matrix() @ coeffs)
    interior = (grid.nodes > 5) & (grid.nodes < 95)
    np.testing.assert_allclose(
        deriv[interior], k * np.cos(k * grid.nodes[interior]), atol=2e-5
    )


def test_eigensolve_orthonormal_and_sorted():
    grid = fedvr.build_grid(40.0, 12, 6)
    op = fedvr.assemble_hamiltonian(grid, -1.0 / grid.nodes, 0)
    energies, states = fedvr.eigensolve(op, 10)
    assert np.all(np.diff(energies) > 0)
    gram = states.T @ states
    np.testing.assert_allclose(gram, np.eye(10), atol=1e-12)


def test_eigensolve_rejects_oversized_request():
    grid = fedvr.build_grid(10.0, 4, 5)
    op = fedvr.assemble_hamiltonian(grid, np.zeros(grid.dim), 0)
    with pytest.raises(fedvr.EigensolveError):
        fedvr.eigensolve(op, grid.dim + 1)


def test_non_finite_potential_rejected():
    grid = fedvr.build_grid(10.0, 4, 5)
    bad = np.zeros(grid.dim)
    bad[3] = np.inf
    with pytest.raises(fedvr.GridError) as err:
        fedvr.assemble_hamiltonian(grid, bad, 0)
    assert "not finite" in str(err.value)


def test_negative_angular_momentum_rejected():
    grid = fedvr.build_grid(10.0, 4, 5)
    with pytest.raises(fedvr.GridError):
        fedvr.assemble_hamiltonian(grid, np.zeros(grid.dim), -1)


def test_interpolation_reproduces_node_values():
    grid = fedvr.build_grid(20.0, 8, 6)
    rng = np.random.default_rng(3)
    coeffs = rng.normal(size=grid.dim)
    values = grid.coeffs_to_values(coeffs)
    sample = grid.nodes[::7]
    np.testing.assert_allclose(
        fedvr.interpolate_radial(grid, coeffs, sample), values[::7], atol=1e-10
    )


def test_coefficient_roundtrip_and_norm():
    grid = fedvr.build_grid(20.0, 8, 6)
    values = np.exp(-grid.nodes) * grid.nodes
    coeffs = grid.values_to_coeffs(values)
    np.testing.assert_allclose(grid.coeffs_to_values(coeffs), values, rtol=1e-14)
    np.testing.assert_allclose(
        np.dot(coeffs, coeffs), grid.integrate(values**2), rtol=1e-14
    )
