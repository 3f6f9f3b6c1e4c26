"""Short-iterate Arnoldi propagator for exp(-i H dt) acting on a state.

One step builds an m-dimensional Krylov subspace from the current state,
exponentiates the projected Hamiltonian exactly (it is Hermitian, so by
eigendecomposition), and expands back.  The subspace grows adaptively until
the standard residual estimate beta * h_{m+1,m} * |last component| drops
below tolerance, and a happy breakdown means the subspace is invariant and
the step is exact.  The output is rescaled to the input norm, which for a
Hermitian generator removes the rounding-level drift of the basis
orthogonality; unitarity is then exact by construction.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


class PropagationError(RuntimeError):
    """Raised when a propagation step produces non-finite amplitudes."""


class KrylovConvergenceError(PropagationError):
    """Raised when the Krylov subspace cap is hit before convergence."""


_BREAKDOWN = 1e-14


def _project_exponential(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i dt H_m) e_1 for the (symmetrized) projected Hamiltonian."""
    h_sym = 0.5 * (h + h.conj().T)
    vals, vecs = np.linalg.eigh(h_sym)
    phases = np.exp(-1j * dt * vals)
    return (vecs * phases) @ vecs[0].conj()


def krylov_step(
    apply_h: Callable[[np.ndarray], np.ndarray],
    psi: np.ndarray,
    dt: float,
    m: int = 12,
    tol: float = 1e-12,
    m_max: int = 64,
) -> np.ndarray:
    """Advance psi by exp(-i H dt) using an adaptive Arnoldi subspace.

    Parameters
    ----------
    apply_h : callable
        Matrix-free application of the (Hermitian) Hamiltonian.
    psi : ndarray
        State vector; returned unchanged in norm.
    dt : float
        Step length in atomic units.
    m : int
        Initial subspace dimension; grown in chunks while the residual
        estimate exceeds ``tol`` times the state norm.
    tol : float
        Relative accuracy target of the step.
    m_max : int
        Hard cap on the subspace dimension.

    Raises
    ------
    PropagationError
        If the state or any Krylov vector contains non-finite entries.
    KrylovConvergenceError
        If ``m_max`` is reached with the residual estimate still above
        tolerance.
    """
    psi = np.asarray(psi, dtype=complex)
    beta = float(np.linalg.norm(psi))
    if not np.isfinite(beta):
        raise PropagationError("state norm is not finite entering krylov_step")
    if beta == 0.0 or dt == 0.0:
        return psi.copy()

    n = psi.size
    m_cap = min(m_max, n)
    m_try = min(max(2, m), m_cap)

    basis = np.empty((m_cap + 1, n), dtype=complex)
    h_proj = np.zeros((m_cap + 1, m_cap), dtype=complex)
    basis[0] = psi / beta

    j = 0
    while True:
        w = np.asarray(apply_h(basis[j]), dtype=complex)
        if not np.all(np.isfinite(w)):
            raise PropagationError(
                f"Hamiltonian application returned non-finite values at j={j}"
            )
        # Modified Gram-Schmidt with one reorthogonalization pass.
        for _ in range(2):
            for i in range(j + 1):
                c = np.vdot(basis[i], w)
                h_proj[i, j] += c
                w -= c * basis[i]
        h_next = float(np.linalg.norm(w))
        h_proj[j + 1, j] = h_next
        scale = max(abs(h_proj[: j + 2, : j + 1]).max(), 1.0)

        if h_next < _BREAKDOWN * scale:
            # Invariant subspace: the projected exponential is exact.
            u = _project_exponential(h_proj[: j + 1, : j + 1], dt)
            out = (beta * u) @ basis[: j + 1]
            break
        basis[j + 1] = w / h_next
        j += 1
        if j >= m_try:
            u = _project_exponential(h_proj[:j, :j], dt)
            residual = beta * h_next * abs(u[-1])
            if residual <= tol * beta:
                out = (beta * u) @ basis[:j]
                break
            if j >= m_cap:
                raise KrylovConvergenceError(
                    f"Krylov subspace cap m={m_cap} reached with residual "
                    f"estimate {residual / beta:.2e} above tol={tol:.2e}"
                )
            m_try = min(m_try + 4, m_cap)

    # Hermitian generator: restore the exact input norm.
    out_norm = float(np.linalg.norm(out))
    if not np.isfinite(out_norm) or out_norm == 0.0:
        raise PropagationError("propagated state has invalid norm")
    out *= beta / out_norm
    return out
