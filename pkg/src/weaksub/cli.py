"""Config-driven command line: evaluate exponents on grids, dump
simulated paths or time-1 samples to CSV, and run the equality-in-law
verification suites to JSON reports.

Configs are JSON with a strict schema (unknown keys are errors); see the
README for the documented fields. All runs are deterministic given the
seed: replicate r with purpose p uses the stream derived from
SeedSequence(seed, spawn_key=(p, r)).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .levy import (
    AtomicJumps,
    BrownianMotion,
    CompoundPoisson,
    IndependentStack,
    LevyLaw,
    SubordinatorSpec,
    ZeroJumps,
    validate_triplet,
)
from .subordination import simulate_strong, simulate_weak, weak_exponent
from .verify import (
    SCENARIOS,
    SuiteConfig,
    default_theta_grid,
    equality_in_law_suite,
    scenario_processes,
)

PURPOSES = {"exponent": 0, "simulate": 1, "verify": 2}


class ConfigError(ValueError):
    """Invalid experiment config; `errors` lists every violation found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def stream(seed: int, purpose: str, replicate: int = 0) -> np.random.Generator:
    """Independent RNG stream for (seed, replicate index, purpose tag)."""
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(PURPOSES[purpose], replicate)))


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


@dataclass
class ThetaGridSpec:
    size: int = 16
    scale: float = 0.5
    grid_seed: int = 20240817
    points: np.ndarray | None = None

    def build(self, dim: int) -> np.ndarray:
        if self.points is not None:
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != dim:
                raise ConfigError([f"theta grid points must have {dim} columns"])
            return pts
        return default_theta_grid(dim, self.size, self.scale, self.grid_seed)


@dataclass
class ExperimentConfig:
    seed: int
    scenario: str | None = None
    subordinator: SubordinatorSpec | None = None
    subordinate: LevyLaw | None = None
    horizon: float = 1.0
    replicates: int = 100_000
    theta_grid: ThetaGridSpec = field(default_factory=ThetaGridSpec)
    k: float = 4.0
    mode: str = "time1"  # simulate output: pooled "time1" samples or "paths"

    def processes(self) -> tuple[SubordinatorSpec, LevyLaw]:
        T, X = self.subordinator, self.subordinate
        if T is None or X is None:
            if self.scenario is None:
                raise ConfigError(["either a scenario or both subordinator "
                                   "and subordinate must be given"])
            dT, dX, _ = scenario_processes(self.scenario)
            T = dT if T is None else T
            X = dX if X is None else X
        return T, X


def _take(obj: dict, allowed: dict, errors: list[str], where: str) -> dict:
    for key in obj:
        if key not in allowed:
            errors.append(f"unknown key {key!r} in {where}")
    return {k: obj[k] for k in allowed if k in obj}


def _parse_jumps(obj, dim_hint, errors, where) -> AtomicJumps | ZeroJumps | None:
    atoms = obj.get("atoms", [])
    if not atoms:
        return None
    points, rates = [], []
    for i, atom in enumerate(atoms):
        got = _take(atom, {"point": None, "rate": None}, errors, f"{where}.atoms[{i}]")
        if "point" not in got or "rate" not in got:
            errors.append(f"{where}.atoms[{i}] needs point and rate")
            return None
        points.append(got["point"])
        rates.append(got["rate"])
    try:
        return AtomicJumps(points, rates)
    except ValueError as exc:
        errors.append(f"{where}: {exc}")
        return None


def _parse_subordinator(obj, errors) -> SubordinatorSpec | None:
    got = _take(obj, {"drift": None, "atoms": None}, errors, "subordinator")
    if "drift" not in got:
        errors.append("subordinator.drift required")
        return None
    d = np.asarray(got["drift"], dtype=float)
    jumps = _parse_jumps(obj, d.shape[0], errors, "subordinator")
    if jumps is None:
        jumps = ZeroJumps(d.shape[0])
    elif jumps.dim != d.shape[0]:
        errors.append("subordinator atom dimension differs from drift")
        return None
    try:
        spec = SubordinatorSpec(d, jumps)
    except ValueError as exc:
        errors.append(f"subordinator: {exc}")
        return None
    report = validate_triplet(spec)
    if not report.valid:
        for v in report:
            errors.append(f"subordinator: orthant violation ({v})"
                          if "orthant" in v or "negative" in v
                          else f"subordinator: {v}")
        return None
    return spec


def _parse_subordinate(obj, errors, where="subordinate") -> LevyLaw | None:
    family = obj.get("family")
    if family == "brownian":
        got = _take(obj, {"family": None, "mu": None, "sigma": None}, errors, where)
        try:
            return BrownianMotion(got.get("mu", []), got.get("sigma", []))
        except ValueError as exc:
            errors.append(f"{where}: {exc}")
            return None
    if family == "compound_poisson":
        got = _take(obj, {"family": None, "atoms": None}, errors, where)
        jumps = _parse_jumps(obj, None, errors, where)
        if jumps is None:
            errors.append(f"{where}: compound_poisson needs atoms")
            return None
        try:
            return CompoundPoisson(jumps)
        except ValueError as exc:
            errors.append(f"{where}: {exc}")
            return None
    if family == "stack":
        got = _take(obj, {"family": None, "blocks": None}, errors, where)
        blocks = [_parse_subordinate(b, errors, f"{where}.blocks[{i}]")
                  for i, b in enumerate(got.get("blocks", []))]
        if not blocks or any(b is None for b in blocks):
            errors.append(f"{where}: stack needs valid blocks")
            return None
        return IndependentStack(blocks)
    errors.append(f"{where}.family must be brownian, compound_poisson or stack")
    return None


TOP_LEVEL_KEYS = {"seed", "scenario", "subordinator", "subordinate", "horizon",
                  "replicates", "theta_grid", "k", "mode"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment config (strict schema)."""
    errors: list[str] = []
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError(["config must be a JSON object"])
    for key in raw:
        if key not in TOP_LEVEL_KEYS:
            errors.append(f"unknown key {key!r}")

    if "seed" not in raw:
        errors.append("seed required")
        seed = 0
    elif not isinstance(raw["seed"], int):
        errors.append("seed must be an integer")
        seed = 0
    else:
        seed = raw["seed"]

    scenario = raw.get("scenario")
    if scenario is not None and scenario not in SCENARIOS:
        errors.append(f"unknown scenario {scenario!r}; "
                      f"expected one of {', '.join(SCENARIOS)}")

    subordinator = None
    if "subordinator" in raw:
        subordinator = _parse_subordinator(raw["subordinator"], errors)
    subordinate = None
    if "subordinate" in raw:
        subordinate = _parse_subordinate(raw["subordinate"], errors)

    grid = ThetaGridSpec()
    if "theta_grid" in raw:
        got = _take(raw["theta_grid"],
                    {"size": None, "scale": None, "grid_seed": None, "points": None},
                    errors, "theta_grid")
        grid = ThetaGridSpec(
            size=got.get("size", 16), scale=got.get("scale", 0.5),
            grid_seed=got.get("grid_seed", 20240817),
            points=None if "points" not in got else np.asarray(got["points"]))

    horizon = float(raw.get("horizon", 1.0))
    if horizon <= 0:
        errors.append("horizon must be positive")
    replicates = int(raw.get("replicates", 100_000))
    if replicates < 0:
        errors.append("replicates must be nonnegative")
    mode = raw.get("mode", "time1")
    if mode not in ("time1", "paths"):
        errors.append("mode must be time1 or paths")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(seed=seed, scenario=scenario,
                            subordinator=subordinator, subordinate=subordinate,
                            horizon=horizon, replicates=replicates,
                            theta_grid=grid, k=float(raw.get("k", 4.0)),
                            mode=mode)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def run_exponent(config: ExperimentConfig, out_dir: Path) -> Path:
    """Evaluate the weak-subordination exponent on the theta grid and
    write one CSV row per grid point: theta coords, Re, Im, SE (empty
    when the value is exact)."""
    T, X = config.processes()
    n = T.dim
    grid = config.theta_grid.build(2 * n)
    out = out_dir / "exponent.csv"
    with out.open("w") as fp:
        cols = [f"theta_{j+1}" for j in range(2 * n)] + ["re", "im", "se"]
        fp.write(",".join(cols) + "\n")
        for theta in grid:
            val = weak_exponent(T, X, theta[:n], theta[n:])
            row = [_fmt(v) for v in theta] + [_fmt(val.real), _fmt(val.imag), ""]
            fp.write(",".join(row) + "\n")
    return out


def run_simulate(config: ExperimentConfig, out_dir: Path,
                 kind: str = "weak") -> Path:
    """Simulate replicate paths of (T, Z); `mode` selects pooled time-
    horizon samples (one CSV) or per-replicate path dumps."""
    T, X = config.processes()
    simulate = {"weak": simulate_weak, "strong": simulate_strong}[kind]
    n = T.dim
    if config.mode == "paths":
        out = out_dir / "paths"
        out.mkdir(parents=True, exist_ok=True)
        for r in range(config.replicates):
            path = simulate(T, X, config.horizon, stream(config.seed, "simulate", r),
                            sample_times=[config.horizon])
            with (out / f"rep_{r:06d}.csv").open("w") as fp:
                path.to_csv(fp)
        return out
    out = out_dir / "samples.csv"
    with out.open("w") as fp:
        cols = [f"T_{j+1}" for j in range(n)] + [f"Z_{j+1}" for j in range(n)]
        fp.write(",".join(cols) + "\n")
        for r in range(config.replicates):
            path = simulate(T, X, config.horizon, stream(config.seed, "simulate", r),
                            sample_times=[config.horizon])
            fp.write(",".join(_fmt(v) for v in path.values[-1]) + "\n")
    return out


def run_verify(config: ExperimentConfig, out_dir: Path, quiet: bool = False) -> int:
    """Run the scenario's equality-in-law suite; write report.json and a
    text summary; exit status 0 iff the suite passed (for the negative
    control, 0 iff the expected mismatch was observed)."""
    if config.scenario is None:
        raise ConfigError(["verify requires a scenario"])
    suite_config = SuiteConfig(n_paths=config.replicates, k=config.k,
                               grid_size=config.theta_grid.size,
                               grid_scale=config.theta_grid.scale,
                               grid_seed=config.theta_grid.grid_seed,
                               theta_grid=config.theta_grid.points)
    report = equality_in_law_suite(config.scenario, suite_config,
                                   stream(config.seed, "verify"),
                                   T=config.subordinator, X=config.subordinate)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(json.dumps(report.to_dict(), indent=2))
    (out_dir / "summary.txt").write_text(report.summary() + "\n")
    if not quiet:
        print(report.summary())
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weaksub",
        description="Subordination of multivariate Lévy processes: exponent "
                    "grids, exact path simulation, equality-in-law checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("exponent", "evaluate exponents on a theta grid"),
                        ("simulate", "simulate paths / time-horizon samples"),
                        ("verify", "run an equality-in-law suite")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--replicates", type=int, default=None,
                       help="override the config replicate count")
        p.add_argument("--quiet", action="store_true")
        if name == "simulate":
            p.add_argument("--kind", choices=("weak", "strong"), default="weak")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config.read_text())
    except (ConfigError, OSError) as exc:
        errors = exc.errors if isinstance(exc, ConfigError) else [str(exc)]
        print(json.dumps({"error": "invalid config", "details": errors}),
              file=sys.stderr)
        return 2
    if args.seed is not None:
        config.seed = args.seed
    if args.replicates is not None:
        config.replicates = args.replicates
    args.out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "exponent":
            out = run_exponent(config, args.out)
        elif args.command == "simulate":
            out = run_simulate(config, args.out, kind=args.kind)
        else:
            return run_verify(config, args.out, quiet=args.quiet)
    except ConfigError as exc:
        print(json.dumps({"error": "invalid config", "details": exc.errors}),
              file=sys.stderr)
        return 2
    if not args.quiet:
        print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
