"""Hamiltonians and default initial conditions for the two example systems.

Both models couple a qubit (index 0 = spin up) to an environment:

* ``jaynes_cummings``: ``w_s sz (x) I + g (s+ (x) b + s- (x) b^dag) + w_e I (x) b^dag b``
  with the mode truncated to ``n_trunc`` Fock levels.
* ``two_qubit``: ``w_s sz (x) I + w_e I (x) sz + g (s+ (x) s- + s- (x) s+)``.

By default ``s+- = sx +- i sy`` (``"unnormalized"`` convention, twice the usual
ladder operator); ``"halved"`` selects ``(sx +- i sy)/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .states import IDENTITY_2, PAULI_X, PAULI_Y, PAULI_Z, pure_state, qubit_from_bloch, thermal_oscillator

JAYNES_CUMMINGS = "jaynes_cummings"
TWO_QUBIT = "two_qubit"
MODEL_KINDS = (JAYNES_CUMMINGS, TWO_QUBIT)

UNNORMALIZED_CONVENTION = "unnormalized"
HALVED_CONVENTION = "halved"
PAULI_CONVENTIONS = (UNNORMALIZED_CONVENTION, HALVED_CONVENTION)


@dataclass(frozen=True)
class ModelSpec:
    kind: str = JAYNES_CUMMINGS
    omega_s: float = 1.0
    omega_e: float = 1.0
    g: float = 1.0
    n_trunc: int = 30
    pauli_convention: str = UNNORMALIZED_CONVENTION

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.pauli_convention not in PAULI_CONVENTIONS:
            raise ValueError(
                f"unknown Pauli convention {self.pauli_convention!r}; expected one of {PAULI_CONVENTIONS}"
            )
        if not self.g >= 0:
            raise ValueError("coupling g must be non-negative")
        if self.kind == JAYNES_CUMMINGS and self.n_trunc < 2:
            raise ValueError("n_trunc must be at least 2")

    @property
    def env_dim(self) -> int:
        return self.n_trunc if self.kind == JAYNES_CUMMINGS else 2


@dataclass(frozen=True)
class ScenarioSpec:
    """A model, the two system states to compare and their common environment."""

    model: ModelSpec
    rho_s0: np.ndarray
    sigma_s0: np.ndarray
    env0: np.ndarray
    horizon: float
    grid: int = 200

    def __post_init__(self):
        if np.shape(self.rho_s0) != (2, 2) or np.shape(self.sigma_s0) != (2, 2):
            raise ValueError("system states must be qubit density matrices")
        d_e = self.model.env_dim
        if np.shape(self.env0) != (d_e, d_e):
            raise ValueError(f"environment state must be {d_e}x{d_e}")
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if self.grid < 2:
            raise ValueError("grid needs at least two points")

    @property
    def rho0(self) -> np.ndarray:
        return np.kron(self.rho_s0, self.env0)

    @property
    def sigma0(self) -> np.ndarray:
        return np.kron(self.sigma_s0, self.env0)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.grid)


def ladder_operators(convention: str = UNNORMALIZED_CONVENTION) -> tuple[np.ndarray, np.ndarray]:
    """Qubit raising and lowering operators ``(s+, s-)``."""
    if convention not in PAULI_CONVENTIONS:
        raise ValueError(f"unknown Pauli convention {convention!r}")
    scale = 1.0 if convention == UNNORMALIZED_CONVENTION else 0.5
    plus = scale * (PAULI_X + 1j * PAULI_Y)
    return plus, plus.conj().T


def annihilation(n_trunc: int) -> np.ndarray:
    """Truncated bosonic ``b`` with ``<n|b|n+1> = sqrt(n+1)``."""
    return np.diag(np.sqrt(np.arange(1, n_trunc)), k=1).astype(complex)


def interaction_hamiltonian(spec: ModelSpec) -> np.ndarray:
    sp, sm = ladder_operators(spec.pauli_convention)
    if spec.kind == JAYNES_CUMMINGS:
        b = annihilation(spec.n_trunc)
        return spec.g * (np.kron(sp, b) + np.kron(sm, b.conj().T))
    return spec.g * (np.kron(sp, sm) + np.kron(sm, sp))


def local_hamiltonian(spec: ModelSpec) -> np.ndarray:
    if spec.kind == JAYNES_CUMMINGS:
        b = annihilation(spec.n_trunc)
        eye_e = np.eye(spec.n_trunc)
        return spec.omega_s * np.kron(PAULI_Z, eye_e) + spec.omega_e * np.kron(IDENTITY_2, b.conj().T @ b)
    return spec.omega_s * np.kron(PAULI_Z, IDENTITY_2) + spec.omega_e * np.kron(IDENTITY_2, PAULI_Z)


def build_hamiltonian(spec: ModelSpec) -> np.ndarray:
    return local_hamiltonian(spec) + interaction_hamiltonian(spec)


def excitation_operator(spec: ModelSpec) -> np.ndarray:
    """Total number of excitations, conserved by the exchange interaction."""
    up = 0.5 * (PAULI_Z + IDENTITY_2)
    if spec.kind == JAYNES_CUMMINGS:
        b = annihilation(spec.n_trunc)
        return np.kron(up, np.eye(spec.n_trunc)) + np.kron(IDENTITY_2, b.conj().T @ b)
    return np.kron(up, IDENTITY_2) + np.kron(IDENTITY_2, up)


SCENARIO_KEYS = (
    "model.kind",
    "model.omega_s",
    "model.omega_e",
    "model.g",
    "model.n_trunc",
    "model.pauli_convention",
    "scenario.theta",
    "scenario.phi",
    "scenario.beta_omega",
    "scenario.T",
    "grid",
)


def default_scenario(kind: str = JAYNES_CUMMINGS, overrides: dict | None = None) -> ScenarioSpec:
    """Initial conditions of the two showcase dynamics.

    Jaynes-Cummings: spin up against ``|+>``, thermal mode at
    ``beta*omega_e = 1`` truncated to 30 levels, horizon ``8.9/g``.

    Two qubits: system Bloch vectors ``+-(0, sin theta, cos theta)``
    (default ``theta = pi/2``), pure environment at ``(sin phi, 0, cos phi)``
    (default ``phi = pi/4``), no local terms, horizon ``pi/g``.

    ``overrides`` uses the flat keys in ``SCENARIO_KEYS``; ``model.kind``
    there takes precedence over ``kind``.
    """
    o = dict(overrides or {})
    unknown = set(o) - set(SCENARIO_KEYS)
    if unknown:
        raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
    kind = o.get("model.kind", kind)
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")

    local = 1.0 if kind == JAYNES_CUMMINGS else 0.0
    model = ModelSpec(
        kind=kind,
        omega_s=float(o.get("model.omega_s", local)),
        omega_e=float(o.get("model.omega_e", local)),
        g=float(o.get("model.g", 1.0)),
        n_trunc=int(o.get("model.n_trunc", 30)),
        pauli_convention=o.get("model.pauli_convention", UNNORMALIZED_CONVENTION),
    )
    grid = int(o.get("grid", 200))
    if model.g == 0 and "scenario.T" not in o:
        raise ValueError("scenario.T is required when g = 0 (the default horizon is in units of 1/g)")

    if kind == JAYNES_CUMMINGS:
        horizon = float(o["scenario.T"]) if "scenario.T" in o else 8.9 / model.g
        beta_omega = float(o.get("scenario.beta_omega", 1.0))
        return ScenarioSpec(
            model=model,
            rho_s0=pure_state([1, 0]),
            sigma_s0=pure_state([1, 1]),
            env0=thermal_oscillator(beta_omega, model.n_trunc),
            horizon=horizon,
            grid=grid,
        )

    theta = float(o.get("scenario.theta", math.pi / 2))
    phi = float(o.get("scenario.phi", math.pi / 4))
    horizon = float(o["scenario.T"]) if "scenario.T" in o else math.pi / model.g
    r = np.array([0.0, math.sin(theta), math.cos(theta)])
    return ScenarioSpec(
        model=model,
        rho_s0=qubit_from_bloch(r),
        sigma_s0=qubit_from_bloch(-r),
        env0=qubit_from_bloch([math.sin(phi), 0.0, math.cos(phi)]),
        horizon=horizon,
        grid=grid,
    )


def with_model(scenario: ScenarioSpec, **changes) -> ScenarioSpec:
    return replace(scenario, model=replace(scenario.model, **changes))
