"""Density matrices and CPTP channels.

Random draws use ``numpy``'s Philox counter-based bit generator so that a
given seed reproduces the same ensemble on every platform.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import ENVIRONMENT, SYSTEM, as_matrix, check_hermitian, partial_trace

TRACE_TOL = 1e-10
NEGATIVITY_TOL = 1e-10
TP_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(int(seed)))


def validate_density(m, tol: float = TRACE_TOL) -> np.ndarray:
    """Return ``m`` as a checked density matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as roundoff: they are clipped
    to zero and the trace renormalized. Anything more negative, or a trace
    further than ``tol`` from one, raises ``ValueError``.
    """
    a = check_hermitian(m, tol=1e-10)
    tr = np.trace(a).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"trace {tr!r} differs from 1")
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    if w[0] < -NEGATIVITY_TOL:
        raise ValueError(f"negative eigenvalue {w[0]!r}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        return (v * w) @ v.conj().T
    return a


def is_density(m, tol: float = TRACE_TOL) -> bool:
    try:
        validate_density(m, tol)
    except ValueError:
        return False
    return True


def purity(rho) -> float:
    a = as_matrix(rho)
    return float(np.real(np.vdot(a.conj().T, a)))


@dataclass(frozen=True)
class BipartiteState:
    """A state on ``C^{d_s} (x) C^{d_e}`` with convenient marginals."""

    d_s: int
    d_e: int
    state: np.ndarray

    def __post_init__(self):
        n = self.d_s * self.d_e
        if np.shape(self.state) != (n, n):
            raise ValueError(
                f"state of shape {np.shape(self.state)} does not match {self.d_s}x{self.d_e}"
            )

    @property
    def system(self) -> np.ndarray:
        return partial_trace(self.state, self.d_s, self.d_e, SYSTEM)

    @property
    def environment(self) -> np.ndarray:
        return partial_trace(self.state, self.d_s, self.d_e, ENVIRONMENT)

    def product_of_marginals(self) -> np.ndarray:
        return np.kron(self.system, self.environment)


def pure_state(amplitudes: Sequence[complex]) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot build a state from the zero vector")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def qubit_from_bloch(r: Sequence[float]) -> np.ndarray:
    """``(I + r.sigma)/2`` for a Bloch vector with ``|r| <= 1``."""
    x, y, z = np.asarray(r, dtype=float)
    if np.sqrt(x * x + y * y + z * z) > 1 + 1e-12:
        raise ValueError(f"Bloch vector {r} lies outside the unit ball")
    return 0.5 * (IDENTITY_2 + x * PAULI_X + y * PAULI_Y + z * PAULI_Z)


def bloch_vector(rho) -> np.ndarray:
    a = as_matrix(rho)
    return np.real([np.trace(a @ p) for p in (PAULI_X, PAULI_Y, PAULI_Z)])


def thermal_oscillator(beta_omega: float, n_trunc: int) -> np.ndarray:
    """Gibbs state of a harmonic mode restricted to its lowest ``n_trunc`` levels."""
    if n_trunc < 2:
        raise ValueError("n_trunc must be at least 2")
    if beta_omega <= 0:
        raise ValueError("beta_omega must be positive")
    # log-space weights avoid underflow in the zero-temperature limit
    logw = -beta_omega * np.arange(n_trunc)
    p = np.exp(logw - logw.max())
    return np.diag(p / p.sum()).astype(complex)


def random_density(dim: int, seed: int | np.random.Generator) -> np.ndarray:
    """Hilbert-Schmidt random state ``G G^dag / Tr(G G^dag)``."""
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_unitary(dim: int, seed: int | np.random.Generator) -> np.ndarray:
    return _haar_isometry(dim, dim, seed)


def _haar_isometry(rows: int, cols: int, seed) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    # phase fix makes the distribution Haar rather than QR-convention dependent
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class QuantumChannel:
    """A channel in Kraus form, ``rho -> sum_k K_k rho K_k^dag``."""

    kraus_operators: tuple
    check: bool = True

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.kraus_operators)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        d_in = ops[0].shape[1]
        d_out = ops[0].shape[0]
        if any(k.shape != (d_out, d_in) for k in ops):
            raise ValueError("Kraus operators have inconsistent shapes")
        object.__setattr__(self, "kraus_operators", ops)
        if self.check:
            err = np.max(np.abs(self.completeness() - np.eye(d_in)))
            if err > TP_TOL:
                raise ValueError(f"Kraus operators are not trace preserving (error {err:.3g})")

    @property
    def dim_in(self) -> int:
        return self.kraus_operators[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus_operators[0].shape[0]

    def completeness(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.kraus_operators)

    def __call__(self, rho) -> np.ndarray:
        return apply_channel(self, rho)


def random_cptp(dim: int, env_dim: int, seed: int | np.random.Generator) -> QuantumChannel:
    """Random channel from a Haar isometry ``C^dim -> C^dim (x) C^env_dim``.

    The Kraus operators are the ``env_dim`` blocks of the isometry, so
    ``env_dim == 1`` gives a single random unitary.
    """
    if env_dim < 1:
        raise ValueError("env_dim must be positive")
    v = _haar_isometry(dim * env_dim, dim, seed)
    blocks = v.reshape(dim, env_dim, dim)
    return QuantumChannel(tuple(blocks[:, k, :] for k in range(env_dim)))


def depolarizing_qubit() -> QuantumChannel:
    """The completely depolarizing qubit channel, output ``I/2`` for every input."""
    return QuantumChannel(tuple(0.5 * p for p in (IDENTITY_2, PAULI_X, PAULI_Y, PAULI_Z)))


def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel((np.eye(dim, dtype=complex),))


def apply_channel(phi: QuantumChannel, rho) -> np.ndarray:
    a = as_matrix(rho)
    if a.shape != (phi.dim_in, phi.dim_in):
        raise ValueError(f"state of shape {a.shape} does not fit channel input {phi.dim_in}")
    out = sum(k @ a @ k.conj().T for k in phi.kraus_operators)
    return 0.5 * (out + out.conj().T)
