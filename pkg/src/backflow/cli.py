"""Command-line entry point: ``backflow <experiment> [options]``.

Experiments
-----------
trajectory      per-time system value and the three bound contributions
bound-slice     lhs/rhs of every bound for a fixed ``t_ref`` and all ``s <= t_ref``
bound-surface   long-format table over every ``s <= t`` cell
verify          randomized property suites and theorem sweeps; JSON report

Configuration is a flat ``key = value`` file (``#`` starts a comment) plus
``--set key=value`` overrides, applied in that order. Unknown keys are an
error. Numbers in CSV output carry 17 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bounds as bd
from . import divergences as dv
from .models import SCENARIO_KEYS, ScenarioSpec, default_scenario
from .suites import run_all, tighter_statistics

logger = logging.getLogger("backflow")

EXPERIMENTS = ("trajectory", "bound-slice", "bound-surface", "verify")
CONFIG_KEYS = SCENARIO_KEYS + ("mu_list", "t_ref", "experiment", "seed")

TRAJECTORY_QUANTIFIERS = (("TD", bd.TD), ("TRE", bd.Quantifier("TRE", dv.MU_OPT)), ("SQRT_QJSD", bd.SQRT_QJSD))
COMPONENTS = ("system", "env", "corr_rho", "corr_sigma")
SLICE_FIELDS = ("lhs", "rhs_total", "slack", "rhs_env", "rhs_corr_rho", "rhs_corr_sigma")
SURFACE_HEADER = (
    "s", "t", "quantifier", "lhs", "rhs_total", "slack", "rhs_env", "rhs_corr_rho", "rhs_corr_sigma",
)


class ConfigError(ValueError):
    pass


_EXP_RE = re.compile(r"^exp\((.+)\)$")


def parse_mu(token: str) -> float:
    """A float, or ``exp(x)`` for ``e**x``."""
    token = token.strip()
    m = _EXP_RE.match(token)
    try:
        mu = math.exp(float(m.group(1))) if m else float(token)
    except ValueError:
        raise ConfigError(f"cannot parse telescopic parameter {token!r}") from None
    if not 0.0 < mu < 1.0:
        raise ConfigError(f"telescopic parameter {token!r} outside (0, 1)")
    return mu


@dataclass
class ExperimentConfig:
    experiment: str | None = None
    scenario: dict = field(default_factory=dict)
    mu_list: tuple = (dv.MU_OPT,)
    t_ref: float | None = None
    seed: int = 0

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        unknown = set(values) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls()
        for key, raw in values.items():
            if key in SCENARIO_KEYS:
                cfg.scenario[key] = raw
            elif key == "experiment":
                if raw not in EXPERIMENTS:
                    raise ConfigError(f"unknown experiment {raw!r}")
                cfg.experiment = raw
            elif key == "mu_list":
                cfg.mu_list = tuple(parse_mu(tok) for tok in str(raw).split(",") if tok.strip())
                if not cfg.mu_list:
                    raise ConfigError("mu_list is empty")
            elif key == "t_ref":
                cfg.t_ref = _as_float(key, raw)
            elif key == "seed":
                cfg.seed = _as_int(key, raw)
        return cfg

    def build_scenario(self) -> ScenarioSpec:
        try:
            return default_scenario(overrides=self.scenario)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def grid(self) -> int:
        return _as_int("grid", self.scenario.get("grid", 200))


def _as_float(key, raw) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from None


def _as_int(key, raw) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from None


def read_config_file(path: str | Path) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def parse_overrides(pairs: Sequence[str]) -> dict:
    values = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, value = (part.strip() for part in pair.split("=", 1))
        values[key] = value
    return values


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(stream, header: Sequence[str], rows) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])


def trajectory_header() -> list[str]:
    return ["time"] + [f"{name}_{c}" for name, _ in TRAJECTORY_QUANTIFIERS for c in COMPONENTS]


def run_trajectory(cfg: ExperimentConfig):
    traj = bd.evolve_pair(cfg.build_scenario())
    terms = [bd.compute_terms(traj, q) for _, q in TRAJECTORY_QUANTIFIERS]
    rows = []
    for i, t in enumerate(traj.times):
        row = [t]
        for tm in terms:
            row += [tm.system[i], tm.env[i], tm.corr_rho[i], tm.corr_sigma[i]]
        rows.append(row)
    return trajectory_header(), rows


def _t_index(traj: bd.Trajectory, t_ref: float | None) -> int:
    horizon = traj.times[-1]
    if t_ref is None:
        return len(traj) - 1
    if not -1e-12 <= t_ref <= horizon + 1e-12:
        raise ConfigError(f"t_ref={t_ref} outside [0, {horizon}]")
    return int(np.argmin(np.abs(traj.times - t_ref)))


def run_bound_slice(cfg: ExperimentConfig):
    traj = bd.evolve_pair(cfg.build_scenario())
    t = _t_index(traj, cfg.t_ref)
    qs = bd.default_quantifiers(cfg.mu_list)
    sweep = bd.BoundSweep(traj, qs)
    header = ["s"] + [f"{q.label}_{f}" for q in qs for f in SLICE_FIELDS]
    rows = []
    for s in range(t + 1):
        row = [traj.times[s]]
        for q in qs:
            tm = sweep.terms[q]
            lhs = tm.system[t] - tm.system[s]
            total = float(q.combine(tm.env[s], tm.corr_rho[s], tm.corr_sigma[s]))
            row += [lhs, total, total - lhs, tm.env[s], tm.corr_rho[s], tm.corr_sigma[s]]
        rows.append(row)
    return header, rows


def run_bound_surface(cfg: ExperimentConfig):
    traj = bd.evolve_pair(cfg.build_scenario())
    records = bd.check_bounds(traj, bd.default_quantifiers(cfg.mu_list))
    times = traj.times
    rows = (
        (times[r.s_index], times[r.t_index], r.quantifier, r.lhs, r.rhs_total, r.slack,
         r.rhs_env, r.rhs_corr_rho, r.rhs_corr_sigma)
        for r in records
    )
    return list(SURFACE_HEADER), rows


def run_verify(cfg: ExperimentConfig, corrupt_channel: bool = False) -> dict:
    results = run_all(seed=cfg.seed, grid=cfg.grid, corrupt_channel=corrupt_channel)
    return {
        "seed": cfg.seed,
        "grid": cfg.grid,
        "corrupt_channel": corrupt_channel,
        "passed": all(r.passed for r in results),
        "suites": [r.to_dict() for r in results],
        "statistics": {"tre_bound_tighter_than_alt_fraction": tighter_statistics(cfg.grid)},
    }


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="backflow", description="Entropic bounds on information backflow.")
    p.add_argument("experiment", nargs="?", choices=EXPERIMENTS)
    p.add_argument("--config", type=Path, help="flat key = value configuration file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out", default="-", help="output path, '-' for stdout (default)")
    p.add_argument("--seed", type=int)
    p.add_argument(
        "--corrupt-channel",
        action="store_true",
        help="verify only: replace random channels by non-trace-preserving maps (negative control)",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(args) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {}
    values.update(parse_overrides(args.overrides))
    if args.seed is not None:
        values["seed"] = args.seed
    if args.experiment:
        values["experiment"] = args.experiment
    cfg = ExperimentConfig.from_mapping(values)
    if cfg.experiment is None:
        raise ConfigError("no experiment given on the command line or in the config")
    return cfg


def _emit(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        if cfg.experiment == "verify":
            report = run_verify(cfg, corrupt_channel=args.corrupt_channel)
            for suite in report["suites"]:
                status = "PASS" if suite["passed"] else "FAIL"
                print(f"{status} {suite['name']} n={suite['count']} worst_slack={suite['worst_slack']:.3e}", file=sys.stderr)
            _emit(args.out, json.dumps(report, indent=2) + "\n")
            return 0 if report["passed"] else 1
        runner = {"trajectory": run_trajectory, "bound-slice": run_bound_slice, "bound-surface": run_bound_surface}
        header, rows = runner[cfg.experiment](cfg)
    except ConfigError as exc:
        print(f"backflow: config error: {exc}", file=sys.stderr)
        return 2
    buf = io.StringIO()
    write_csv(buf, header, rows)
    _emit(args.out, buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
