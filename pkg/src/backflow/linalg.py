"""Dense linear algebra on small Hilbert spaces.

Matrices are plain ``numpy`` arrays of complex128. Composite indices follow
``i = i_s * d_e + i_e`` so that ``kron(rho_s, rho_e)`` is the natural product
state ordering.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

ZERO_THRESHOLD = 1e-12
HERMITICITY_TOL = 1e-12

SYSTEM = "system"
ENVIRONMENT = "environment"


class SpectralDecomposition(NamedTuple):
    """Eigenvalues in ascending order and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    return a


def is_hermitian(m, tol: float = HERMITICITY_TOL) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    scale = max(np.max(np.abs(a), initial=0.0), 1.0)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol * scale)


def check_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix is not square: {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if not is_hermitian(a, tol):
        raise ValueError("matrix is not Hermitian")
    return a


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, d_s: int, d_e: int, keep: str = SYSTEM) -> np.ndarray:
    """Reduce an operator on ``C^{d_s} (x) C^{d_e}`` to one factor.

    ``keep`` is ``"system"`` or ``"environment"``.
    """
    a = as_matrix(m)
    n = d_s * d_e
    if a.shape != (n, n):
        raise ValueError(f"matrix of shape {a.shape} does not match d_s*d_e = {n}")
    t = a.reshape(d_s, d_e, d_s, d_e)
    if keep == SYSTEM:
        return np.einsum("ikjk->ij", t)
    if keep == ENVIRONMENT:
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be {SYSTEM!r} or {ENVIRONMENT!r}, got {keep!r}")


def eigh(m) -> SpectralDecomposition:
    """Hermitian eigendecomposition, eigenvalues ascending.

    Raises ``ValueError`` for non-Hermitian input and lets
    ``numpy.linalg.LinAlgError`` through if LAPACK fails to converge.
    """
    a = check_hermitian(m)
    # symmetrize so roundoff in the lower triangle does not leak in
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return SpectralDecomposition(w, v)


def spectral_fn(
    m,
    f: Callable[[np.ndarray], np.ndarray],
    zero_threshold: float = ZERO_THRESHOLD,
    zero_value: float | None = None,
) -> np.ndarray:
    """Apply a real function to a Hermitian matrix through its spectrum.

    Eigenvalues with ``|lambda| <= zero_threshold`` are sent to ``zero_value``
    when one is given; otherwise ``f`` is evaluated on them as well. A
    non-finite value of ``f`` on any eigenvalue that was not replaced raises
    ``ValueError``.
    """
    w, v = eigh(m)
    small = np.abs(w) <= zero_threshold
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if zero_value is not None:
        fw = np.where(small, zero_value, fw)
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)]
        raise ValueError(f"function undefined on eigenvalues {bad}")
    return (v * fw) @ v.conj().T


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w = np.linalg.eigvalsh(check_hermitian(m))
    return float(np.sum(np.abs(w)))


def propagator(h, t: float) -> np.ndarray:
    """``exp(-i h t)`` from the spectral decomposition of ``h``."""
    w, v = eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve_unitary(h, t: float, state) -> np.ndarray:
    """Conjugate ``state`` by ``exp(-i h t)``."""
    rho = as_matrix(state)
    hm = as_matrix(h)
    if rho.shape != hm.shape:
        raise ValueError(f"state shape {rho.shape} does not match Hamiltonian {hm.shape}")
    u = propagator(hm, t)
    return u @ rho @ u.conj().T
