"""Backflow bounds along an exact joint unitary evolution.

Two initial product states ``rho_s (x) rho_e`` and ``sigma_s (x) rho_e`` are
propagated with the same unitary. For times ``s <= t`` the revival of a
distinguishability quantifier on the system,

    lhs(s, t) = Q(rho_s(t), sigma_s(t)) - Q(rho_s(s), sigma_s(s)),

is compared with a right-hand side built from three contributions evaluated
at time ``s``: the environment difference ``Q(rho_e, sigma_e)`` and the two
correlation terms ``Q(rho, rho_s (x) rho_e)``, ``Q(sigma, sigma_s (x) sigma_e)``.

=============  ==========================================================
quantifier     rhs_total
=============  ==========================================================
``TD``         env + corr_rho + corr_sigma
``TRE``        kappa(mu) * (env**1/4 + corr_rho**1/4 + corr_sigma**1/4)
``TRE_ALT``    kappa_alt(mu) * (env**1/2 + corr_rho**1/4 + corr_sigma**1/4)
``SQRT_QJSD``  env + corr_rho + corr_sigma  (each already a square root)
=============  ==========================================================
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import divergences as dv
from .linalg import ENVIRONMENT, SYSTEM, eigh, partial_trace
from .models import ScenarioSpec, build_hamiltonian
from .states import BipartiteState

logger = logging.getLogger(__name__)

SLACK_TOL = 1e-9

KINDS = ("TD", "TRE", "TRE_ALT", "SQRT_QJSD")


@dataclass(frozen=True)
class Quantifier:
    """A distinguishability quantifier together with its bound shape.

    ``reversed_env_order`` evaluates the environment term as
    ``Q(sigma_e, rho_e)`` instead of ``Q(rho_e, sigma_e)``; it only matters
    for the asymmetric TRE.
    """

    kind: str
    mu: float | None = None
    reversed_env_order: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown quantifier {self.kind!r}")
        if self.kind in ("TRE", "TRE_ALT"):
            if self.mu is None:
                object.__setattr__(self, "mu", dv.MU_OPT if self.kind == "TRE" else dv.MU_ALT_OPT)
            dv._check_mu(self.mu)
        elif self.mu is not None:
            raise ValueError(f"{self.kind} takes no telescopic parameter")

    @property
    def label(self) -> str:
        if self.mu is None:
            return self.kind
        tag = f"{self.kind}_mu{self.mu:.6g}"
        return tag + "_rev" if self.reversed_env_order else tag

    def __call__(self, rho, sigma) -> float:
        if self.kind == "TD":
            return dv.trace_distance(rho, sigma)
        if self.kind == "SQRT_QJSD":
            return dv.sqrt_qjsd(rho, sigma)
        return dv.telescopic_re(rho, sigma, self.mu)

    def prefactor(self) -> float:
        if self.kind == "TRE":
            return dv.kappa(self.mu)
        if self.kind == "TRE_ALT":
            return dv.kappa_alt(self.mu)
        return 1.0

    def combine(self, env, corr_rho, corr_sigma):
        """Apply roots and prefactor to the raw contributions (scalars or arrays)."""
        env, corr_rho, corr_sigma = (np.maximum(x, 0.0) for x in (env, corr_rho, corr_sigma))
        if self.kind == "TRE":
            return self.prefactor() * (env**0.25 + corr_rho**0.25 + corr_sigma**0.25)
        if self.kind == "TRE_ALT":
            return self.prefactor() * (np.sqrt(env) + corr_rho**0.25 + corr_sigma**0.25)
        return env + corr_rho + corr_sigma


TD = Quantifier("TD")
SQRT_QJSD = Quantifier("SQRT_QJSD")


def default_quantifiers(mu_list: Iterable[float] = (dv.MU_OPT,)) -> list[Quantifier]:
    qs = [TD]
    for mu in mu_list:
        qs.append(Quantifier("TRE", mu))
    qs.append(Quantifier("TRE_ALT", dv.MU_ALT_OPT))
    qs.append(SQRT_QJSD)
    return qs


@dataclass(frozen=True)
class Trajectory:
    """Global states and marginals of the evolved pair on a uniform grid.

    Arrays are stacked along the first axis, one slice per time.
    """

    times: np.ndarray
    d_s: int
    d_e: int
    rho: np.ndarray
    sigma: np.ndarray
    rho_s: np.ndarray
    sigma_s: np.ndarray
    rho_e: np.ndarray
    sigma_e: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def rho_global(self, i: int) -> BipartiteState:
        return BipartiteState(self.d_s, self.d_e, self.rho[i])

    def sigma_global(self, i: int) -> BipartiteState:
        return BipartiteState(self.d_s, self.d_e, self.sigma[i])

    def rho_product(self, i: int) -> np.ndarray:
        return np.kron(self.rho_s[i], self.rho_e[i])

    def sigma_product(self, i: int) -> np.ndarray:
        return np.kron(self.sigma_s[i], self.sigma_e[i])


def evolve_pair(scenario: ScenarioSpec) -> Trajectory:
    h = build_hamiltonian(scenario.model)
    w, v = eigh(h)
    d_s, d_e = 2, scenario.model.env_dim
    times = scenario.times()
    rho0, sigma0 = scenario.rho0, scenario.sigma0
    # rotate once into the energy basis; each time step is then a phase
    rho0_e = v.conj().T @ rho0 @ v
    sigma0_e = v.conj().T @ sigma0 @ v
    n = len(times)
    out = {k: [] for k in ("rho", "sigma", "rho_s", "sigma_s", "rho_e", "sigma_e")}
    for t in times:
        phase = np.exp(-1j * w * t)
        ph = np.outer(phase, phase.conj())
        for name, m0 in (("rho", rho0_e), ("sigma", sigma0_e)):
            m = v @ (m0 * ph) @ v.conj().T
            m = 0.5 * (m + m.conj().T)
            out[name].append(m)
            out[name + "_s"].append(partial_trace(m, d_s, d_e, SYSTEM))
            out[name + "_e"].append(partial_trace(m, d_s, d_e, ENVIRONMENT))
    # exact initial condition: products with one shared environment marginal
    out["rho"][0], out["sigma"][0] = rho0.astype(complex), sigma0.astype(complex)
    out["rho_s"][0], out["sigma_s"][0] = scenario.rho_s0.astype(complex), scenario.sigma_s0.astype(complex)
    out["rho_e"][0] = scenario.env0.astype(complex)
    out["sigma_e"][0] = out["rho_e"][0].copy()
    logger.debug("evolved %d time points at dim %d", n, d_s * d_e)
    return Trajectory(times=times, d_s=d_s, d_e=d_e, **{k: np.array(a) for k, a in out.items()})


class Terms(NamedTuple):
    """Raw per-time values of one quantifier (arrays over the time grid)."""

    system: np.ndarray
    env: np.ndarray
    corr_rho: np.ndarray
    corr_sigma: np.ndarray


def _env_term(traj: Trajectory, q: Quantifier, i: int) -> float:
    if q.reversed_env_order:
        return q(traj.sigma_e[i], traj.rho_e[i])
    return q(traj.rho_e[i], traj.sigma_e[i])


def _terms_at(traj: Trajectory, q: Quantifier, i: int) -> tuple[float, float, float, float]:
    return (
        q(traj.rho_s[i], traj.sigma_s[i]),
        _env_term(traj, q, i),
        q(traj.rho[i], traj.rho_product(i)),
        q(traj.sigma[i], traj.sigma_product(i)),
    )


def compute_terms(traj: Trajectory, q: Quantifier) -> Terms:
    rows = np.array([_terms_at(traj, q, i) for i in range(len(traj))])
    return Terms(*rows.T)


def _check_index(traj: Trajectory, *idx: int) -> None:
    for i in idx:
        if not 0 <= i < len(traj):
            raise IndexError(f"time index {i} outside grid of {len(traj)} points")


def lhs_revival(traj: Trajectory, q: Quantifier, s: int, t: int) -> float:
    _check_index(traj, s, t)
    if s > t:
        raise ValueError(f"need s <= t, got s={s}, t={t}")
    return q(traj.rho_s[t], traj.sigma_s[t]) - q(traj.rho_s[s], traj.sigma_s[s])


class RhsTerms(NamedTuple):
    rhs_env: float
    rhs_corr_rho: float
    rhs_corr_sigma: float
    rhs_total: float


def rhs_bound(traj: Trajectory, q: Quantifier, s: int) -> RhsTerms:
    _check_index(traj, s)
    _, env, corr_rho, corr_sigma = _terms_at(traj, q, s)
    return RhsTerms(env, corr_rho, corr_sigma, float(q.combine(env, corr_rho, corr_sigma)))


class BoundRecord(NamedTuple):
    s_index: int
    t_index: int
    quantifier: str
    lhs: float
    rhs_env: float
    rhs_corr_rho: float
    rhs_corr_sigma: float
    rhs_total: float
    slack: float


@dataclass
class BoundSweep:
    """Per-time terms for a set of quantifiers; records are generated from them."""

    traj: Trajectory
    quantifiers: Sequence[Quantifier]
    terms: dict = field(init=False)

    def __post_init__(self):
        self.terms = {q: compute_terms(self.traj, q) for q in self.quantifiers}

    def rhs_total(self, q: Quantifier) -> np.ndarray:
        tm = self.terms[q]
        return q.combine(tm.env, tm.corr_rho, tm.corr_sigma)

    def lhs_matrix(self, q: Quantifier) -> np.ndarray:
        """``lhs[s, t]``; entries with ``s > t`` are meaningless."""
        sys = self.terms[q].system
        return sys[None, :] - sys[:, None]

    def slack_matrix(self, q: Quantifier) -> np.ndarray:
        slack = self.rhs_total(q)[:, None] - self.lhs_matrix(q)
        return np.where(np.triu(np.ones_like(slack, dtype=bool)), slack, np.inf)

    def worst_slack(self, q: Quantifier) -> float:
        return float(self.slack_matrix(q).min())

    def records(self) -> list[BoundRecord]:
        n = len(self.traj)
        rhs = {q: self.rhs_total(q) for q in self.quantifiers}
        out = []
        for s in range(n):
            for t in range(s, n):
                for q in self.quantifiers:
                    tm = self.terms[q]
                    lhs = float(tm.system[t] - tm.system[s])
                    total = float(rhs[q][s])
                    out.append(
                        BoundRecord(
                            s, t, q.label, lhs,
                            float(tm.env[s]), float(tm.corr_rho[s]), float(tm.corr_sigma[s]),
                            total, total - lhs,
                        )
                    )
        return out


def check_bounds(
    traj: Trajectory,
    quantifiers: Sequence[Quantifier] | None = None,
    mu_list: Iterable[float] = (dv.MU_OPT,),
) -> list[BoundRecord]:
    """Evaluate every bound on every ``s <= t`` cell of the grid.

    Records are ordered by ``(s, t, quantifier)``. Cells whose slack falls
    below ``-SLACK_TOL`` are kept in the output and logged as warnings.
    """
    if quantifiers is None:
        quantifiers = default_quantifiers(mu_list)
    records = BoundSweep(traj, quantifiers).records()
    bad = violations(records)
    if bad:
        logger.warning("%d bound violations, worst slack %.3g", len(bad), min(r.slack for r in bad))
    return records


def violations(records: Iterable[BoundRecord], tol: float = SLACK_TOL) -> list[BoundRecord]:
    return [r for r in records if r.slack < -tol]


CHAIN_NAMES = (
    "revival",
    "global_minus_system",
    "split_absolute",
    "triangle_like",
    "topsoe",
    "env_triangle",
    "split_roots",
    "pinsker",
)


@dataclass(frozen=True)
class Chain:
    """Successive upper bounds on the TRE revival ``I_mu(t, s)``.

    ``values[k] <= values[k + 1]`` should hold for every link; ``unitary_gap``
    is ``S_mu(rho(t), sigma(t)) - S_mu(rho(s), sigma(s))``, zero for a
    unitary evolution.
    """

    values: tuple
    unitary_gap: float
    names: tuple = CHAIN_NAMES

    @cached_property
    def links(self) -> np.ndarray:
        return np.diff(np.asarray(self.values))

    def min_link(self) -> float:
        return float(self.links.min())

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.values))


def intermediate_chain_check(traj: Trajectory, s: int, t: int, mu: float = dv.MU_OPT) -> Chain:
    _check_index(traj, s, t)
    if s > t:
        raise ValueError(f"need s <= t, got s={s}, t={t}")
    S = lambda a, b: dv.telescopic_re(a, b, mu)  # noqa: E731
    D = dv.trace_distance
    log_inv = math.log(1.0 / mu)
    c = (1.0 - mu) / mu

    rho, sigma = traj.rho[s], traj.sigma[s]
    rho_s, sigma_s, rho_e, sigma_e = traj.rho_s[s], traj.sigma_s[s], traj.rho_e[s], traj.sigma_e[s]
    eta = np.kron(rho_s, rho_e)
    sigma_mixed_env = np.kron(sigma_s, rho_e)
    sigma_prod = np.kron(sigma_s, sigma_e)

    system_s = S(rho_s, sigma_s)
    revival = S(traj.rho_s[t], traj.sigma_s[t]) - system_s
    global_t = S(traj.rho[t], traj.sigma[t])
    global_s = S(rho, sigma)
    step1 = global_t - system_s

    s_eta_sigma = S(eta, sigma)
    step2 = abs(global_s - s_eta_sigma) + abs(s_eta_sigma - S(eta, sigma_mixed_env))

    d_corr_rho = D(rho, eta)
    d_mixed = D(sigma, sigma_mixed_env)
    step3 = dv.triangle_second_bound(d_corr_rho, mu) + dv.triangle_first_bound(d_mixed, mu)

    root = math.sqrt(c) / log_inv
    step4 = root * (math.sqrt(d_corr_rho) + math.sqrt(d_mixed))

    d_corr_sigma = D(sigma, sigma_prod)
    d_env = D(sigma_e, rho_e)
    step5 = root * (math.sqrt(d_corr_rho) + math.sqrt(d_corr_sigma + d_env))
    step6 = root * (math.sqrt(d_corr_rho) + math.sqrt(d_corr_sigma) + math.sqrt(d_env))

    step7 = dv.kappa(mu) * sum(
        max(x, 0.0) ** 0.25 for x in (S(rho, eta), S(sigma, sigma_prod), S(sigma_e, rho_e))
    )
    return Chain(
        values=(revival, step1, step2, step3, step4, step5, step6, step7),
        unitary_gap=global_t - global_s,
    )


def tighter_fraction(sweep: BoundSweep, first: Quantifier, second: Quantifier) -> float:
    """Fraction of grid times ``s`` where ``first`` gives the smaller rhs_total."""
    return float(np.mean(sweep.rhs_total(first) <= sweep.rhs_total(second)))
