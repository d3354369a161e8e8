"""Acceptance criteria, one test per criterion.

Each test records a single ``ACCEPTANCE <n> PASS|FAIL <summary>`` line; the
lines are repeated at the end of the pytest terminal report, also when the
file is run directly with ``python3 tests/test_acceptance.py``.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from backflow import bounds as bd
from backflow import divergences as dv
from backflow import suites
from backflow.cli import main
from backflow.models import JAYNES_CUMMINGS, TWO_QUBIT, build_hamiltonian, default_scenario, excitation_operator
from backflow.states import make_rng, purity, random_density

SCENARIOS = (JAYNES_CUMMINGS, TWO_QUBIT)
GRID = 200

LINES: list[str] = []


def record(number: int, ok: bool, summary: str) -> None:
    line = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'} {summary}"
    LINES.append(line)
    print(line)


@pytest.fixture(scope="module")
def trajectories():
    return {kind: bd.evolve_pair(default_scenario(kind, {"grid": GRID})) for kind in SCENARIOS}


def test_criterion_1_theorem_sweeps(trajectories):
    start = time.perf_counter()
    qs = [bd.TD, bd.SQRT_QJSD, bd.Quantifier("TRE_ALT", dv.MU_ALT_OPT)]
    for mu in (dv.MU_OPT, 0.1, 0.5, dv.MU_ALT_OPT, 0.9):
        qs += [bd.Quantifier("TRE", mu), bd.Quantifier("TRE", mu, reversed_env_order=True)]
    worst = {}
    for kind, traj in trajectories.items():
        sweep = bd.BoundSweep(traj, qs)
        for q in qs:
            worst[(kind, q.label)] = sweep.worst_slack(q)
    elapsed = time.perf_counter() - start
    (kind, label), value = min(worst.items(), key=lambda kv: kv[1])
    ok = value >= -1e-9 and elapsed < 300
    record(1, ok, f"{len(worst)} sweeps over {GRID}x{GRID} grids; worst slack {value:.3e} ({kind}, {label}); {elapsed:.1f}s")
    assert ok


def test_criterion_2_constants():
    closed = (4 * math.e**3 / 27) ** 0.25
    k = dv.kappa(math.exp(-1.5))
    k_alt = dv.kappa_alt(math.exp(-0.5))
    res = minimize_scalar(dv.kappa, bounds=(0.01, 0.99), method="bounded", options={"xatol": 1e-10})
    checks = {
        "kappa closed form": abs(k - closed) <= 1e-12,
        "kappa vs 1.31": abs(k - 1.31) <= 0.005,
        "kappa_alt": abs(k_alt - math.sqrt(math.e)) <= 1e-12,
        "argmin": abs(res.x - math.exp(-1.5)) <= 1e-3,
    }
    ok = all(checks.values())
    record(2, ok, f"kappa={k:.15f} kappa_alt={k_alt:.15f} argmin={res.x:.6f} failed={[n for n, v in checks.items() if not v]}")
    assert ok


def test_criterion_3_divergence_properties():
    seeds = [int(x) for x in np.random.SeedSequence(3).generate_state(8, dtype=np.uint64)]
    results = list(suites.data_processing(seeds[0]))
    results += [
        suites.pinsker_sandwich(seeds[1]),
        suites.triangle_like(seeds[2]),
        suites.qjsd_metric(seeds[3]),
        suites.boundedness(seeds[4]),
        suites.invariances(seeds[5]),
    ]
    ok = all(r.passed and r.count >= 500 and r.tol == 1e-10 for r in results)
    worst = min(results, key=lambda r: r.worst_slack)
    record(3, ok, f"{len(results)} suites, min draws {min(r.count for r in results)}; worst slack {worst.worst_slack:.3e} ({worst.name})")
    assert ok


def _entropy_bits(rho):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-300]
    return float(-np.sum(w * np.log2(w)))


def test_criterion_4_qjsd_identity():
    rng = make_rng(4)
    worst = 0.0
    for i in range(1000):
        dim = 2 + i % 3
        rho, sigma = random_density(dim, rng), random_density(dim, rng)
        oracle = _entropy_bits(0.5 * (rho + sigma)) - 0.5 * (_entropy_bits(rho) + _entropy_bits(sigma))
        worst = max(worst, abs(dv.qjsd(rho, sigma) - oracle), abs(dv.symmetrized_tre(rho, sigma, 0.5) - oracle))
    ok = worst <= 1e-12
    record(4, ok, f"1000 pairs, max |QJSD - symmetrized TRE at 1/2| vs entropy oracle {worst:.3e}")
    assert ok


def test_criterion_5_derivation_chain(trajectories):
    rng = make_rng(5)
    worst_link, worst_gap = math.inf, 0.0
    for traj in trajectories.values():
        for _ in range(100):
            s, t = sorted(int(i) for i in rng.integers(0, GRID, size=2))
            chain = bd.intermediate_chain_check(traj, s, t)
            worst_link = min(worst_link, chain.min_link())
            worst_gap = max(worst_gap, abs(chain.unitary_gap))
    x = np.linspace(0.0, 100.0, 10001)
    topsoe_slack = min(np.min(x / np.sqrt(1 + x) - np.log1p(x)), np.min(np.sqrt(x) - np.log1p(x)))
    ok = worst_link >= -1e-9 and worst_gap <= 1e-9 and topsoe_slack >= -1e-9
    record(5, ok, f"200 cells; worst link {worst_link:.3e}; unitary gap {worst_gap:.3e}; Topsoe slack {topsoe_slack:.3e}")
    assert ok


def test_criterion_6_qualitative(trajectories, tmp_path):
    jc, tq = trajectories[JAYNES_CUMMINGS], trajectories[TWO_QUBIT]
    qs = [bd.TD, bd.Quantifier("TRE"), bd.SQRT_QJSD]
    sweep = bd.BoundSweep(jc, qs)
    revivals = {q.label: float(np.max(np.triu(sweep.lhs_matrix(q)))) for q in qs}
    a = all(v > 0.01 for v in revivals.values())

    gap = float(np.max(sweep.terms[qs[1]].system - sweep.terms[bd.TD].system))
    b = gap <= 1e-10

    out = tmp_path / "slice.csv"
    assert main(["bound-slice", "--out", str(out)]) == 0
    header = out.read_text().splitlines()[0].split(",")
    col = header.index("TD_rhs_total")
    rhs_max = max(float(line.split(",")[col]) for line in out.read_text().splitlines()[1:])
    c = rhs_max > 1

    corr = bd.compute_terms(tq, bd.TD).corr_rho
    interior = (tq.times > 0.1) & (tq.times < tq.times[-1] - 0.1)
    peak = float(corr[interior].max())
    dip = float(corr[interior].min())
    d = dip < 0.05 and peak > 0.2

    ok = a and b and c and d
    record(
        6, ok,
        f"(a) min revival {min(revivals.values()):.3f} (b) max TRE-TD {gap:.3e} "
        f"(c) max TD rhs {rhs_max:.3f} (d) interior corr min {dip:.3e} vs max {peak:.3f}",
    )
    assert ok


def test_criterion_7_physics(trajectories):
    spec = default_scenario(JAYNES_CUMMINGS).model
    c = build_hamiltonian(spec) @ excitation_operator(spec) - excitation_operator(spec) @ build_hamiltonian(spec)
    n = spec.n_trunc
    keep = np.array([k != n - 1 for _ in range(2) for k in range(n)])
    comm = float(np.max(np.abs(c[np.ix_(keep, keep)])))

    jc = trajectories[JAYNES_CUMMINGS]
    top = [i * n + k for i in range(2) for k in (n - 2, n - 1)]
    leak = max(float(np.real(np.diag(m)[top].sum())) for m in np.concatenate([jc.rho, jc.sigma]))

    drift = 0.0
    for traj in trajectories.values():
        for glob in (traj.rho, traj.sigma):
            p = np.array([purity(m) for m in glob])
            drift = max(drift, float(np.max(np.abs(p - p[0]))))
    ok = comm <= 1e-12 and leak <= 1e-8 and drift <= 1e-9
    record(7, ok, f"commutator {comm:.3e}; leakage {leak:.3e}; purity drift {drift:.3e}")
    assert ok


def test_criterion_8_determinism(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("experiment = bound-surface\nmodel.kind = two_qubit\ngrid = 40\nmu_list = 0.1, exp(-1.5)\nseed = 11\n")
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "backflow.cli", "--config", str(cfg), "--out", str(out)],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(out.read_bytes())
    for name in ("c.csv", "d.csv"):
        out = tmp_path / name
        assert main(["trajectory", "--seed", "11", "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1] and outputs[2] == outputs[3]
    record(8, ok, f"bound-surface {len(outputs[0])} bytes and trajectory {len(outputs[2])} bytes identical across runs")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
