"""Randomized property suites behind ``backflow verify``.

Each suite returns a :class:`SuiteResult` holding the number of checks and
the worst slack, where slack is ``bound - value`` for an inequality or
``tol - |error|`` for an identity. A suite passes when its worst slack is
at least ``-tol``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterator

import numpy as np

from . import bounds as bd
from . import divergences as dv
from .linalg import kron
from .models import JAYNES_CUMMINGS, TWO_QUBIT, default_scenario
from .states import (
    QuantumChannel,
    apply_channel,
    is_density,
    make_rng,
    random_cptp,
    random_density,
    random_unitary,
)

DIVERGENCE_TOL = 1e-10
IDENTITY_TOL = 1e-12
THEOREM_TOL = bd.SLACK_TOL

SUITE_MUS = (0.1, dv.MU_OPT, 0.5, 0.9)
SWEEP_MUS = (0.1, dv.MU_OPT, 0.5, dv.MU_ALT_OPT, 0.9)


@dataclass
class SuiteResult:
    name: str
    count: int
    worst_slack: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.count > 0 and self.worst_slack >= -self.tol)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["worst_slack"] = float(d["worst_slack"])
        d["passed"] = self.passed
        return d


class _Tracker:
    def __init__(self, name: str, tol: float):
        self.name, self.tol = name, tol
        self.count, self.worst = 0, math.inf

    def bound(self, value: float, upper: float) -> None:
        self.count += 1
        self.worst = min(self.worst, upper - value)

    def close(self, a: float, b: float, tol: float | None = None) -> None:
        self.count += 1
        self.worst = min(self.worst, (self.tol if tol is None else tol) - abs(a - b))

    def result(self) -> SuiteResult:
        return SuiteResult(self.name, self.count, float(self.worst), self.tol)


def _dims(draws: int) -> Iterator[int]:
    for i in range(draws):
        yield 2 + i % 3


def corrupted_channel(phi: QuantumChannel, gain: float = 1.5) -> QuantumChannel:
    """Scale every Kraus operator so the map multiplies traces by ``gain``."""
    return QuantumChannel(tuple(math.sqrt(gain) * k for k in phi.kraus_operators), check=False)


def density_constructors(seed: int, draws: int = 500) -> SuiteResult:
    tr = _Tracker("states.constructors_valid", 0.0)
    rng = make_rng(seed)
    for dim in _dims(draws):
        tr.bound(0.0 if is_density(random_density(dim, rng)) else 1.0, 0.0)
        phi = random_cptp(dim, int(rng.integers(1, 4)), rng)
        tr.bound(0.0 if is_density(apply_channel(phi, random_density(dim, rng))) else 1.0, 0.0)
    return tr.result()


def data_processing(seed: int, draws: int = 500, corrupt: bool = False) -> list[SuiteResult]:
    """Contractivity of TD, TRE and QJSD under random channels."""
    rng = make_rng(seed)
    td = _Tracker("divergences.data_processing.TD", DIVERGENCE_TOL)
    tre = _Tracker("divergences.data_processing.TRE", DIVERGENCE_TOL)
    js = _Tracker("divergences.data_processing.QJSD", DIVERGENCE_TOL)
    for dim in _dims(draws):
        rho, sigma = random_density(dim, rng), random_density(dim, rng)
        phi = random_cptp(dim, int(rng.integers(1, 4)), rng)
        if corrupt:
            phi = corrupted_channel(phi)
        a, b = apply_channel(phi, rho), apply_channel(phi, sigma)
        td.bound(dv.trace_distance(a, b), dv.trace_distance(rho, sigma))
        js.bound(dv.qjsd(a, b), dv.qjsd(rho, sigma))
        for mu in SUITE_MUS:
            tre.bound(dv.telescopic_re(a, b, mu), dv.telescopic_re(rho, sigma, mu))
    return [td.result(), tre.result(), js.result()]


def pinsker_sandwich(seed: int, draws: int = 500) -> SuiteResult:
    rng = make_rng(seed)
    tr = _Tracker("divergences.pinsker_sandwich", DIVERGENCE_TOL)
    for dim in _dims(draws):
        rho, sigma = random_density(dim, rng), random_density(dim, rng)
        d = dv.trace_distance(rho, sigma)
        for mu in SUITE_MUS:
            s = dv.telescopic_re(rho, sigma, mu)
            tr.bound(dv.pinsker_coefficient(mu) * d * d, s)
            tr.bound(s, d)
    return tr.result()


def triangle_like(seed: int, draws: int = 500) -> SuiteResult:
    """Both triangle-like inequalities and their logarithmic rearrangements."""
    rng = make_rng(seed)
    tr = _Tracker("divergences.triangle_like", DIVERGENCE_TOL)
    for dim in _dims(draws):
        rho, sigma, tau, eta = (random_density(dim, rng) for _ in range(4))
        for mu in SUITE_MUS:
            lg = math.log(1.0 / mu)
            c = (1.0 - mu) / mu
            d1 = dv.trace_distance(sigma, tau)
            lhs1 = dv.telescopic_re(rho, sigma, mu) - dv.telescopic_re(rho, tau, mu)
            tr.bound(lhs1, 1.0 - dv.scalar_tre(1.0, d1, mu))
            tr.bound(lhs1, math.log1p(d1 * c) / lg)
            d2 = dv.trace_distance(rho, eta)
            lhs2 = dv.telescopic_re(rho, sigma, mu) - dv.telescopic_re(eta, sigma, mu)
            tr.bound(lhs2, d2 - dv.scalar_tre(d2, 1.0, mu))
            if d2 > 0:
                tr.bound(lhs2, d2 * math.log1p(c / d2) / lg)
    return tr.result()


def qjsd_metric(seed: int, draws: int = 1000) -> SuiteResult:
    rng = make_rng(seed)
    tr = _Tracker("divergences.sqrt_qjsd_triangle", DIVERGENCE_TOL)
    for _ in range(draws):
        a, b, c = (random_density(2, rng) for _ in range(3))
        tr.bound(dv.sqrt_qjsd(a, c), dv.sqrt_qjsd(a, b) + dv.sqrt_qjsd(b, c))
    return tr.result()


def boundedness(seed: int, draws: int = 500) -> SuiteResult:
    rng = make_rng(seed)
    tr = _Tracker("divergences.boundedness", DIVERGENCE_TOL)
    for dim in _dims(draws):
        rho, sigma = random_density(dim, rng), random_density(dim, rng)
        values = [dv.trace_distance(rho, sigma), dv.qjsd(rho, sigma)]
        values += [dv.telescopic_re(rho, sigma, mu) for mu in SUITE_MUS]
        for v in values:
            tr.bound(-1e-12, v)
            tr.bound(v, 1.0)
    return tr.result()


def invariances(seed: int, draws: int = 500) -> SuiteResult:
    """Tensor-product and joint unitary invariance of TD and TRE."""
    rng = make_rng(seed)
    tr = _Tracker("divergences.tensor_unitary_invariance", DIVERGENCE_TOL)
    for dim in _dims(draws):
        rho, sigma = random_density(dim, rng), random_density(dim, rng)
        tau = random_density(2, rng)
        u = random_unitary(dim, rng)
        rho_u, sigma_u = u @ rho @ u.conj().T, u @ sigma @ u.conj().T
        rho_t, sigma_t = kron(rho, tau), kron(sigma, tau)
        d = dv.trace_distance(rho, sigma)
        tr.close(dv.trace_distance(rho_t, sigma_t), d)
        tr.close(dv.trace_distance(rho_u, sigma_u), d)
        for mu in SUITE_MUS:
            s = dv.telescopic_re(rho, sigma, mu)
            tr.close(dv.telescopic_re(rho_t, sigma_t, mu), s)
            tr.close(dv.telescopic_re(rho_u, sigma_u, mu), s)
    return tr.result()


def joint_convexity(seed: int, draws: int = 500) -> SuiteResult:
    rng = make_rng(seed)
    tr = _Tracker("divergences.joint_convexity", DIVERGENCE_TOL)
    for dim in _dims(draws):
        r1, r2, s1, s2 = (random_density(dim, rng) for _ in range(4))
        lam = float(rng.uniform())
        for mu in SUITE_MUS:
            mixed = dv.telescopic_re(lam * r1 + (1 - lam) * r2, lam * s1 + (1 - lam) * s2, mu)
            tr.bound(mixed, lam * dv.telescopic_re(r1, s1, mu) + (1 - lam) * dv.telescopic_re(r2, s2, mu))
    return tr.result()


def von_neumann_bits(rho) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def qjsd_identity(seed: int, draws: int = 1000) -> SuiteResult:
    """QJSD through the TRE against the entropy-difference formula in bits."""
    rng = make_rng(seed)
    tr = _Tracker("divergences.qjsd_identity", IDENTITY_TOL)
    for dim in _dims(draws):
        rho, sigma = random_density(dim, rng), random_density(dim, rng)
        direct = von_neumann_bits(0.5 * (rho + sigma)) - 0.5 * (von_neumann_bits(rho) + von_neumann_bits(sigma))
        tr.close(dv.qjsd(rho, sigma), direct)
        tr.close(dv.qjsd(rho, sigma), dv.symmetrized_tre(rho, sigma, 0.5))
    return tr.result()


def topsoe(points: int = 10001) -> SuiteResult:
    tr = _Tracker("scalar.topsoe", DIVERGENCE_TOL)
    for x in np.linspace(0.0, 100.0, points):
        tr.bound(math.log1p(x), x / math.sqrt(1.0 + x))
        tr.bound(math.log1p(x), math.sqrt(x))
    return tr.result()


def theorem_sweep(kind: str, grid: int = 200, overrides: dict | None = None) -> list[SuiteResult]:
    """Every bound on every ``s <= t`` cell of a default scenario."""
    o = {"grid": grid, **(overrides or {})}
    traj = bd.evolve_pair(default_scenario(kind, o))
    qs = [bd.TD, bd.SQRT_QJSD]
    for mu in SWEEP_MUS:
        qs += [bd.Quantifier("TRE", mu), bd.Quantifier("TRE", mu, True), bd.Quantifier("TRE_ALT", mu)]
    sweep = bd.BoundSweep(traj, qs)
    cells = grid * (grid + 1) // 2
    return [
        SuiteResult(f"bounds.{kind}.{q.label}", cells, sweep.worst_slack(q), THEOREM_TOL) for q in qs
    ]


def chain_monotonicity(kind: str, seed: int, cells: int = 100, grid: int = 200) -> SuiteResult:
    traj = bd.evolve_pair(default_scenario(kind, {"grid": grid}))
    rng = make_rng(seed)
    tr = _Tracker(f"bounds.{kind}.derivation_chain", THEOREM_TOL)
    for _ in range(cells):
        s, t = sorted(int(i) for i in rng.integers(0, grid, size=2))
        chain = bd.intermediate_chain_check(traj, s, t)
        tr.bound(-chain.min_link(), 0.0)
        tr.close(chain.unitary_gap, 0.0, THEOREM_TOL)
    return tr.result()


def tighter_statistics(grid: int = 200) -> dict:
    """How often the fourth-root bound beats the alternate one, per scenario."""
    main = bd.Quantifier("TRE", dv.MU_OPT)
    alt = bd.Quantifier("TRE_ALT", dv.MU_ALT_OPT)
    out = {}
    for kind in (JAYNES_CUMMINGS, TWO_QUBIT):
        traj = bd.evolve_pair(default_scenario(kind, {"grid": grid}))
        out[kind] = bd.tighter_fraction(bd.BoundSweep(traj, [main, alt]), main, alt)
    return out


def run_all(seed: int = 0, grid: int = 200, corrupt_channel: bool = False) -> list[SuiteResult]:
    """All suites in a fixed order; sub-seeds are derived from ``seed``."""
    sub = [int(x) for x in np.random.SeedSequence(seed).generate_state(12, dtype=np.uint64)]
    results: list[SuiteResult] = [density_constructors(sub[0])]
    results += data_processing(sub[1], corrupt=corrupt_channel)
    steps: list[Callable[[], SuiteResult]] = [
        lambda: pinsker_sandwich(sub[2]),
        lambda: triangle_like(sub[3]),
        lambda: qjsd_metric(sub[4]),
        lambda: boundedness(sub[5]),
        lambda: invariances(sub[6]),
        lambda: joint_convexity(sub[7]),
        lambda: qjsd_identity(sub[8]),
        topsoe,
    ]
    results += [f() for f in steps]
    for i, kind in enumerate((JAYNES_CUMMINGS, TWO_QUBIT)):
        results += theorem_sweep(kind, grid)
        results.append(chain_monotonicity(kind, sub[9 + i], grid=grid))
    return results
