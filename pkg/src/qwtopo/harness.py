"""Experiment orchestration and structured result output.

Reproduces the benchmark protocol: build a known network, simulate its
walk statistics, run the genetic search many times with derived seeds,
and report per-run outcomes as CSV or JSON.  The noisy variant sweeps
halt thresholds over Monte-Carlo noise samples.
"""
from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .ctqw import ConcatenatedDistribution, ProbeState, TimeGrid, concatenated_distribution
from .errors import ConfigError
from .ga import GAConfig, run_ga
from .graph import CouplingString, TopologySpec, build_topology
from .measurement import NoiseConfig, OutcomeTally, monte_carlo_sweep
from .seeding import derive_seed, label_code

__all__ = [
    "OUTPUT_DIR_ENV",
    "ReportFormat",
    "ExperimentSpec",
    "RunRecord",
    "BenchmarkEntry",
    "BenchmarkReport",
    "SweepReport",
    "make_probe",
    "run_seed",
    "benchmark_noiseless",
    "benchmark_noisy",
    "emit_report",
    "report_from_json",
    "resolve_output_path",
    "write_target",
    "load_target",
]

# Relative output paths are resolved under this directory when it is set.
OUTPUT_DIR_ENV = "QWTOPO_OUTPUT_DIR"


class ReportFormat(enum.Enum):
    CSV = "csv"
    JSON = "json"


def make_probe(spec: str, n: int) -> ProbeState:
    """Probe state from a CLI name: ``ramp``, ``uniform``, or ``site:<k>``."""
    if spec == "ramp":
        return ProbeState.ramp(n)
    if spec == "uniform":
        return ProbeState.uniform(n)
    if spec.startswith("site:"):
        try:
            site = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"cannot parse probe site in {spec!r}") from None
        return ProbeState.localized(n, site)
    raise ConfigError(f"unknown probe {spec!r}; expected ramp, uniform, or site:<k>")


def run_seed(master_seed: int, topology_label: str, n: int, run: int) -> int:
    """Per-run seed derived from (master seed, topology, n, run index).

    Stable under re-ordering and parallel execution: every run's seed
    depends only on its own coordinates.
    """
    return derive_seed(master_seed, label_code(topology_label), n, run)


@dataclass(frozen=True)
class ExperimentSpec:
    """One benchmark request: topology family, sizes, protocol knobs."""

    topology: TopologySpec
    n_values: tuple[int, ...]
    times: TimeGrid = field(default_factory=lambda: TimeGrid((0.5, 0.6)))
    runs: int = 100
    ga: GAConfig = field(default_factory=GAConfig)
    noise: NoiseConfig | None = None
    probe: str = "ramp"

    def __post_init__(self) -> None:
        n_values = tuple(int(n) for n in self.n_values)
        if not n_values:
            raise ConfigError("need at least one network size")
        if any(n < 2 for n in n_values):
            raise ConfigError(f"network sizes must be >= 2: {n_values}")
        object.__setattr__(self, "n_values", n_values)
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")


@dataclass(frozen=True)
class RunRecord:
    run: int
    seed: int
    success: bool
    generations: int
    evaluations: int
    chromosome: str
    score: float
    halted_by: str


@dataclass(frozen=True)
class BenchmarkEntry:
    topology: str
    n: int
    n_p: int
    records: tuple[RunRecord, ...]

    @property
    def success_rate(self) -> float:
        return sum(r.success for r in self.records) / len(self.records)

    @property
    def generations_mean(self) -> float | None:
        gens = [r.generations for r in self.records if r.success]
        return float(np.mean(gens)) if gens else None

    @property
    def generations_std(self) -> float | None:
        gens = [r.generations for r in self.records if r.success]
        return float(np.std(gens)) if gens else None


@dataclass(frozen=True)
class BenchmarkReport:
    config: dict
    entries: tuple[BenchmarkEntry, ...]


@dataclass(frozen=True)
class SweepReport:
    config: dict
    n_r: int
    tallies: dict[float, OutcomeTally]


def _ga_echo(ga: GAConfig) -> dict:
    return {
        "n_p": ga.n_p,
        "p_e": ga.p_e,
        "k": ga.k,
        "p_c": ga.p_c,
        "p_m": ga.p_m,
        "n_g": ga.n_g,
        "threshold": ga.threshold,
        "seed": ga.seed,
        "metric": ga.metric.value,
    }


def benchmark_noiseless(spec: ExperimentSpec) -> BenchmarkReport:
    """Run the search ``spec.runs`` times per network size, noiselessly.

    Run r of size n uses the derived seed run_seed(master, label, n, r)
    with the master seed taken from spec.ga.seed; success means the
    returned chromosome equals the true coupling string.
    """
    if spec.noise is not None:
        raise ConfigError("noiseless benchmark got a noise config; use benchmark_noisy")
    label = spec.topology.label()
    entries = []
    for n in spec.n_values:
        truth = build_topology(spec.topology, n)
        psi0 = make_probe(spec.probe, n)
        target = concatenated_distribution(truth, psi0, spec.times)
        n_p = spec.ga.resolved_n_p(truth.n_c)
        records = []
        for r in range(spec.runs):
            seed = run_seed(spec.ga.seed, label, n, r)
            result = run_ga(target, psi0, spec.times, replace(spec.ga, seed=seed))
            records.append(
                RunRecord(
                    run=r,
                    seed=seed,
                    success=result.best_chromosome == truth,
                    generations=result.generations_used,
                    evaluations=result.evaluations,
                    chromosome=result.best_chromosome.to_bitstring(),
                    score=result.best_score,
                    halted_by=result.halted_by.value,
                )
            )
        entries.append(BenchmarkEntry(topology=label, n=n, n_p=n_p, records=tuple(records)))
    config = {
        "protocol": "noiseless",
        "topology": label,
        "n_values": list(spec.n_values),
        "times": list(spec.times.times),
        "runs": spec.runs,
        "probe": spec.probe,
        "ga": _ga_echo(spec.ga),
    }
    return BenchmarkReport(config=config, entries=tuple(entries))


def benchmark_noisy(spec: ExperimentSpec) -> SweepReport:
    """Threshold sweep over Monte-Carlo noise samples for one size."""
    if spec.noise is None:
        raise ConfigError("noisy benchmark requires a noise config")
    if len(spec.n_values) != 1:
        raise ConfigError(f"sweep handles one network size at a time, got {spec.n_values}")
    n = spec.n_values[0]
    truth = build_topology(spec.topology, n)
    psi0 = make_probe(spec.probe, n)
    tallies = monte_carlo_sweep(truth, psi0, spec.times, spec.ga, spec.noise)
    config = {
        "protocol": "sweep",
        "topology": spec.topology.label(),
        "n_values": [n],
        "times": list(spec.times.times),
        "probe": spec.probe,
        "ga": _ga_echo(spec.ga),
        "noise": {
            "n_r": spec.noise.n_r,
            "thresholds": list(spec.noise.thresholds),
            "mc_runs": spec.noise.mc_runs,
            "inner_runs": spec.noise.inner_runs,
            "seed": spec.noise.seed,
        },
    }
    return SweepReport(config=config, n_r=spec.noise.n_r, tallies=tallies)


def resolve_output_path(path: str | Path) -> Path:
    """Resolve a relative output path under $QWTOPO_OUTPUT_DIR, if set."""
    path = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        return Path(base) / path
    return path


BENCHMARK_CSV_HEADER = "topology,n,run,seed,success,generations,evaluations,chromosome"
SWEEP_CSV_HEADER = "threshold,N_r,tp,fp,tn,fn,total"


def _benchmark_csv(report: BenchmarkReport) -> str:
    lines = [BENCHMARK_CSV_HEADER]
    for entry in report.entries:
        for r in entry.records:
            success = "true" if r.success else "false"
            lines.append(
                f"{entry.topology},{entry.n},{r.run},{r.seed},{success},"
                f"{r.generations},{r.evaluations},{r.chromosome}"
            )
    return "\n".join(lines) + "\n"


def _sweep_csv(report: SweepReport) -> str:
    lines = [SWEEP_CSV_HEADER]
    for threshold, tally in report.tallies.items():
        lines.append(
            f"{threshold},{report.n_r},{tally.true_positive},{tally.false_positive},"
            f"{tally.true_negative},{tally.false_negative},{tally.total}"
        )
    return "\n".join(lines) + "\n"


def _benchmark_json_obj(report: BenchmarkReport) -> dict:
    results = []
    for entry in report.entries:
        results.append(
            {
                "topology": entry.topology,
                "n": entry.n,
                "n_p": entry.n_p,
                "success_rate": entry.success_rate,
                "generations_mean": entry.generations_mean,
                "generations_std": entry.generations_std,
                "runs": [
                    {
                        "run": r.run,
                        "seed": r.seed,
                        "success": r.success,
                        "generations": r.generations,
                        "evaluations": r.evaluations,
                        "chromosome": r.chromosome,
                        "score": r.score,
                        "halted_by": r.halted_by,
                    }
                    for r in entry.records
                ],
                "raster": [[int(c) for c in r.chromosome] for r in entry.records],
            }
        )
    return {"config": report.config, "results": results}


def _sweep_json_obj(report: SweepReport) -> dict:
    results = []
    for threshold, tally in report.tallies.items():
        results.append(
            {
                "threshold": threshold,
                "N_r": report.n_r,
                "tp": tally.true_positive,
                "fp": tally.false_positive,
                "tn": tally.true_negative,
                "fn": tally.false_negative,
                "total": tally.total,
            }
        )
    return {"config": report.config, "results": results}


def report_to_text(report: BenchmarkReport | SweepReport, fmt: ReportFormat) -> str:
    """Serialize a report; output is byte-stable for identical inputs."""
    if fmt is ReportFormat.CSV:
        if isinstance(report, BenchmarkReport):
            return _benchmark_csv(report)
        return _sweep_csv(report)
    if isinstance(report, BenchmarkReport):
        obj = _benchmark_json_obj(report)
    else:
        obj = _sweep_json_obj(report)
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit_report(
    report: BenchmarkReport | SweepReport, fmt: ReportFormat, path: str | Path
) -> Path:
    """Write the report to disk; returns the resolved path."""
    target = resolve_output_path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(report_to_text(report, fmt))
    except OSError as exc:
        raise OSError(f"cannot write report to {target}: {exc}") from exc
    return target


def report_from_json(text: str) -> BenchmarkReport | SweepReport:
    """Rebuild a report from its JSON serialization."""
    obj = json.loads(text)
    config = obj["config"]
    if config.get("protocol") == "sweep":
        tallies = {}
        n_r = config["noise"]["n_r"]
        for row in obj["results"]:
            tallies[row["threshold"]] = OutcomeTally(
                true_positive=row["tp"],
                false_positive=row["fp"],
                true_negative=row["tn"],
                false_negative=row["fn"],
                total=row["total"],
            )
        return SweepReport(config=config, n_r=n_r, tallies=tallies)
    entries = []
    for res in obj["results"]:
        records = tuple(
            RunRecord(
                run=r["run"],
                seed=r["seed"],
                success=r["success"],
                generations=r["generations"],
                evaluations=r["evaluations"],
                chromosome=r["chromosome"],
                score=r["score"],
                halted_by=r["halted_by"],
            )
            for r in res["runs"]
        )
        entries.append(
            BenchmarkEntry(topology=res["topology"], n=res["n"], n_p=res["n_p"], records=records)
        )
    return BenchmarkReport(config=config, entries=tuple(entries))


def write_target(
    path: str | Path, dist: ConcatenatedDistribution, grid: TimeGrid
) -> Path:
    """Save a target distribution as JSON {n, times, slices}."""
    if len(grid) != dist.k:
        raise ConfigError(f"grid has {len(grid)} times but the distribution has {dist.k} slices")
    target = resolve_output_path(path)
    obj = {
        "n": dist.n,
        "times": list(grid.times),
        "slices": [list(map(float, s.probs)) for s in dist.slices],
    }
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write target to {target}: {exc}") from exc
    return target


def load_target(path: str | Path) -> tuple[TimeGrid, ConcatenatedDistribution]:
    """Load a JSON target file written by :func:`write_target`."""
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read target from {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"target file {path} is not valid JSON: {exc}") from None
    try:
        n = int(obj["n"])
        grid = TimeGrid(tuple(float(t) for t in obj["times"]))
        slices = np.asarray(obj["slices"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"target file {path} is malformed: {exc}") from None
    if slices.ndim != 2 or slices.shape != (len(grid), n):
        raise ConfigError(
            f"target file {path}: slices shape {slices.shape} does not match "
            f"{len(grid)} times and n={n}"
        )
    return grid, ConcatenatedDistribution.from_matrix(slices)
