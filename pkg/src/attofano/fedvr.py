"""Finite-element discrete-variable representation of the radial coordinate.

The domain [0, r_max] is split into uniform elements, each carrying a
Gauss-Lobatto quadrature rule of ``order`` points.  Basis functions are the
weight-normalized Lagrange interpolating polynomials through those points;
functions at shared element endpoints are joined into bridge functions so the
basis is continuous.  Hard-wall (Dirichlet) boundary conditions at r = 0 and
r = r_max remove the two domain-endpoint functions, leaving

    dim = n_elements * (order - 1) - 1

basis functions.  In this basis the overlap is the identity (the Lobatto rule
integrates products of two basis polynomials exactly up to the degree-(2n-3)
quadrature limit), multiplicative operators are diagonal, and the kinetic
operator couples functions within an element plus the bridge to each
neighbour.

Reduced radial wavefunctions u_l(r) = r R_l(r) are represented by coefficient
vectors c_i = sqrt(w_i) u_l(r_i), so plain dot products are radial integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Legendre
from scipy.linalg import eigh


class GridError(ValueError):
    """Raised when grid construction parameters are invalid."""


class EigensolveError(RuntimeError):
    """Raised when the symmetric eigensolver fails to converge."""


def gauss_lobatto(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Lobatto quadrature points and weights on [-1, 1].

    The rule uses both interval endpoints plus the roots of P'_{n-1}, and is
    exact for polynomials of degree <= 2*order - 3.

    Parameters
    ----------
    order : int
        Number of quadrature points, at least 2.

    Returns
    -------
    points, weights : ndarray
        Nodes in ascending order and the associated quadrature weights.
    """
    if order < 2:
        raise GridError(f"Gauss-Lobatto rule needs order >= 2, got {order}")
    legendre = Legendre.basis(order - 1)
    interior = legendre.deriv().roots()
    points = np.concatenate(([-1.0], np.sort(interior.real), [1.0]))
    weights = 2.0 / (order * (order - 1) * legendre(points) ** 2)
    return points, weights


def lagrange_derivative_matrix(points: np.ndarray) -> np.ndarray:
    """Derivatives d[m, i] = L_i'(x_m) of the Lagrange cardinal polynomials.

    Built from barycentric weights; exact up to rounding for any distinct
    node set.
    """
    n = len(points)
    diff = points[:, None] - points[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / diff.prod(axis=1)
    d = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


@dataclass
class RadialGrid:
    """FE-DVR radial grid with bridge-function bookkeeping.

    Attributes
    ----------
    r_max : float
        Box radius in bohr; hard wall applied there.
    n_elements : int
        Number of elements on [0, r_max].
    order : int
        Gauss-Lobatto points per element.
    breakpoints : ndarray, optional
        Element edges, length n_elements + 1, from 0 to r_max.  Uniform when
        omitted; a layout refined near the origin resolves compact core
        states without enlarging the basis.
    nodes : ndarray
        Interior global nodes (domain endpoints excluded), shape (dim,).
    weights : ndarray
        Combined quadrature weight at each interior node; bridge nodes carry
        the sum of the two adjacent element weights.
    """

    r_max: float
    n_elements: int
    order: int
    breakpoints: np.ndarray | None = None
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.r_max <= 0:
            raise GridError(f"r_max must be positive, got {self.r_max}")
        if self.n_elements < 1:
            raise GridError(f"n_elements must be >= 1, got {self.n_elements}")
        if self.order < 3:
            raise GridError(f"order must be >= 3, got {self.order}")
        if self.breakpoints is None:
            self.breakpoints = np.linspace(0.0, self.r_max, self.n_elements + 1)
        else:
            self.breakpoints = np.asarray(self.breakpoints, dtype=float)
            if self.breakpoints.shape != (self.n_elements + 1,):
                raise GridError(
                    f"breakpoints must have length n_elements + 1 = "
                    f"{self.n_elements + 1}, got {len(self.breakpoints)}"
                )
            if self.breakpoints[0] != 0.0 or self.breakpoints[-1] != self.r_max:
                raise GridError("breakpoints must span [0, r_max] exactly")
            if np.any(np.diff(self.breakpoints) <= 0):
                raise GridError("breakpoints must be strictly increasing")
        self._ref_points, self._ref_weights = gauss_lobatto(self.order)
        self._ref_deriv = lagrange_derivative_matrix(self._ref_points)
        self.element_widths = np.diff(self.breakpoints)

        n_global = self.n_elements * (self.order - 1) + 1
        all_nodes = np.empty(n_global)
        all_weights = np.zeros(n_global)
        for e in range(self.n_elements):
            h = self.element_widths[e]
            start = e * (self.order - 1)
            all_nodes[start : start + self.order] = (
                self.breakpoints[e] + (self._ref_points + 1.0) * (h / 2.0)
            )
            all_weights[start : start + self.order] += self._ref_weights * (h / 2.0)
        # Dirichlet walls: drop the functions sitting on r = 0 and r = r_max.
        self.nodes = all_nodes[1:-1]
        self.weights = all_weights[1:-1]
        self._kinetic: np.ndarray | None = None
        self._derivative: np.ndarray | None = None

    @property
    def dim(self) -> int:
        """Number of basis functions."""
        return self.n_elements * (self.order - 1) - 1

    def _element_basis_indices(self, e: int) -> tuple[np.ndarray, np.ndarray]:
        """Interior-basis indices covered by element e and their local slots."""
        g = e * (self.order - 1) + np.arange(self.order)
        keep = (g >= 1) & (g <= self.n_elements * (self.order - 1) - 1)
        return g[keep] - 1, np.arange(self.order)[keep]

    def kinetic_matrix(self) -> np.ndarray:
        """Matrix of -(1/2) d^2/dr^2 in the weight-normalized basis.

        Assembled from first derivatives by quadrature,
        T_ij = (1/2) sum_m w_m chi_i'(r_m) chi_j'(r_m), which the Lobatto rule
        evaluates exactly, so the result is symmetric to rounding.
        """
        if self._kinetic is not None:
            return self._kinetic
        t = np.zeros((self.dim, self.dim))
        # Element integral of chi_i' chi_j': weights h/2, derivatives 2/h each.
        base = np.einsum(
            "m,mi,mj->ij", self._ref_weights, self._ref_deriv, self._ref_deriv
        )
        for e in range(self.n_elements):
            idx, loc = self._element_basis_indices(e)
            local = (2.0 / self.element_widths[e]) * base
            t[np.ix_(idx, idx)] += local[np.ix_(loc, loc)]
        norm = 1.0 / np.sqrt(self.weights)
        self._kinetic = 0.5 * (norm[:, None] * t * norm[None, :])
        return self._kinetic

    def derivative_matrix(self) -> np.ndarray:
        """Matrix of d/dr in the weight-normalized basis.

        D_ij = sum_m w_m chi_i(r_m) chi_j'(r_m); exactly antisymmetric because
        the integrand is within the quadrature degree and the boundary terms
        vanish with the Dirichlet walls.
        """
        if self._derivative is not None:
            return self._derivative
        d = np.zeros((self.dim, self.dim))
        # Mapped weight (h/2) and derivative scale (2/h) cancel exactly.
        local_full = self._ref_weights[:, None] * self._ref_deriv
        for e in range(self.n_elements):
            idx, loc = self._element_basis_indices(e)
            d[np.ix_(idx, idx)] += local_full[np.ix_(loc, loc)]
        norm = 1.0 / np.sqrt(self.weights)
        self._derivative = norm[:, None] * d * norm[None, :]
        return self._derivative

    def values_to_coeffs(self, values: np.ndarray) -> np.ndarray:
        """Coefficients of a function from its values at the interior nodes."""
        return values * np.sqrt(self.weights)

    def coeffs_to_values(self, coeffs: np.ndarray) -> np.ndarray:
        """Node values of a function from its basis coefficients."""
        return coeffs / np.sqrt(self.weights)

    def integrate(self, values: np.ndarray) -> float:
        """Quadrature integral of a function sampled at the interior nodes."""
        return float(np.dot(self.weights, values))


def build_grid(
    r_max: float,
    n_elements: int,
    order: int,
    breakpoints: np.ndarray | Sequence[float] | None = None,
) -> RadialGrid:
    """Construct an FE-DVR grid on [0, r_max] with hard-wall boundaries."""
    if breakpoints is not None:
        breakpoints = np.asarray(breakpoints, dtype=float)
    return RadialGrid(
        r_max=r_max, n_elements=n_elements, order=order, breakpoints=breakpoints
    )


def core_refined_breakpoints(
    r_max: float, n_elements: int, core_radius: float = 3.0, n_core: int = 6
) -> np.ndarray:
    """Element edges with a refined core region and uniform coverage beyond.

    Compact inner-shell states vary on a fraction of a bohr; packing
    ``n_core`` elements into [0, core_radius] resolves them without
    enlarging the basis, while the uniform outer elements keep the
    continuum well represented.
    """
    if n_elements <= n_core:
        raise GridError(
            f"need more than {n_core} elements for a core-refined layout"
        )
    if r_max <= core_radius:
        raise GridError(f"r_max={r_max} must exceed core_radius={core_radius}")
    inner = np.linspace(0.0, core_radius, n_core + 1)
    outer = np.linspace(core_radius, r_max, n_elements - n_core + 1)
    return np.concatenate([inner, outer[1:]])


@dataclass
class ChannelOperator:
    """Dense radial Hamiltonian for one angular-momentum channel."""

    l: int
    grid: RadialGrid
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def assemble_hamiltonian(
    grid: RadialGrid,
    potential: Callable[[np.ndarray], np.ndarray] | np.ndarray,
    l: int,
) -> ChannelOperator:
    """Radial Hamiltonian T + l(l+1)/(2 r^2) + V(r) for channel l.

    Parameters
    ----------
    grid : RadialGrid
        Basis to assemble in.
    potential : callable or ndarray
        Either V(r) evaluated on ``grid.nodes`` or a callable returning it.
    l : int
        Orbital angular momentum of the channel (>= 0).

    Raises
    ------
    GridError
        If l is negative, the sampled potential has the wrong shape, or any
        potential value is not finite.
    """
    if l < 0:
        raise GridError(f"angular momentum must be >= 0, got {l}")
    if callable(potential):
        v = np.asarray(potential(grid.nodes), dtype=float)
    else:
        v = np.asarray(potential, dtype=float)
    if v.shape != grid.nodes.shape:
        raise GridError(
            f"potential samples have shape {v.shape}, expected {grid.nodes.shape}"
        )
    if not np.all(np.isfinite(v)):
        bad = int(np.flatnonzero(~np.isfinite(v))[0])
        raise GridError(
            f"potential is not finite at r = {grid.nodes[bad]:.6g} (node {bad})"
        )
    h = grid.kinetic_matrix().copy()
    diag = v + l * (l + 1) / (2.0 * grid.nodes**2)
    h[np.diag_indices_from(h)] += diag
    return ChannelOperator(l=l, grid=grid, matrix=h)


def eigensolve(
    op: ChannelOperator, k: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Lowest k eigenpairs of a channel Hamiltonian.

    Returns
    -------
    energies : ndarray, shape (k,)
        Ascending eigenvalues in hartree.
    states : ndarray, shape (dim, k)
        Orthonormal coefficient vectors, one per column.

    Raises
    ------
    EigensolveError
        If k exceeds the basis dimension or LAPACK fails to converge.
    """
    n = op.dim
    if k is None:
        k = n
    if not 1 <= k <= n:
        raise EigensolveError(f"requested k={k} eigenpairs from a dim={n} basis")
    try:
        if k == n:
            energies, states = eigh(op.matrix)
        else:
            energies, states = eigh(op.matrix, subset_by_index=[0, k - 1])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolveError(f"eigensolve failed for l={op.l}: {exc}") from exc
    return energies, states


def interpolate_radial(
    grid: RadialGrid, coeffs: np.ndarray, r: Sequence[float] | np.ndarray
) -> np.ndarray:
    """Evaluate a basis expansion at arbitrary radii inside the box.

    Uses the element-local Lagrange form; intended for diagnostics and
    plotting rather than inner loops.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    values = grid.coeffs_to_values(coeffs)
    full = np.zeros(grid.n_elements * (grid.order - 1) + 1, dtype=values.dtype)
    full[1:-1] = values
    out = np.zeros(r.shape, dtype=values.dtype)
    elem = np.clip(
        np.searchsorted(grid.breakpoints, r, side="right") - 1, 0, grid.n_elements - 1
    )
    for e in np.unique(elem):
        sel = elem == e
        h = grid.element_widths[e]
        x = 2.0 * (r[sel] - grid.breakpoints[e]) / h - 1.0
        start = e * (grid.order - 1)
        local = full[start : start + grid.order]
        # Direct Lagrange evaluation on the reference interval.
        num = x[:, None] - grid._ref_points[None, :]
        result = np.zeros(x.shape, dtype=values.dtype)
        for i in range(grid.order):
            terms = np.delete(num, i, axis=1) / np.delete(
                grid._ref_points[i] - grid._ref_points, i
            )
            result += local[i] * terms.prod(axis=1)
        out[sel] = result
    return out
