"""Finite-resource measurement noise and threshold-sweep classification.

Measured probabilities are simulated by Poisson-sampling each bin with
N_r expected shots per time slice and renormalizing.  A reconstruction
against a noisy target halts when its fitness drops below a threshold
T; sweeping T and classifying each run as TP/FP/TN/FN reproduces the
four-outcome analysis.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .ctqw import ConcatenatedDistribution, ProbeState, SiteDistribution, TimeGrid, concatenated_distribution
from .errors import ConfigError
from .ga import GAConfig, HaltReason, RunResult, run_ga
from .graph import CouplingString
from .seeding import derive_seed

__all__ = [
    "default_thresholds",
    "NoiseConfig",
    "Outcome",
    "OutcomeTally",
    "sample_noisy_distribution",
    "classify_outcome",
    "monte_carlo_sweep",
]


def default_thresholds() -> tuple[float, ...]:
    """Twelve logarithmically spaced thresholds spanning [4e-4, 0.2]."""
    return tuple(float(t) for t in np.geomspace(4e-4, 0.2, 12))


@dataclass(frozen=True)
class NoiseConfig:
    """Noise model and sweep protocol parameters.

    ``n_r`` is the expected number of measurement shots per time slice;
    each Monte-Carlo run draws one noisy target and runs the search
    ``inner_runs`` times against it at every threshold.
    """

    n_r: int = 500
    thresholds: tuple[float, ...] = ()
    mc_runs: int = 100
    inner_runs: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_r < 1:
            raise ConfigError(f"resource count must be >= 1, got {self.n_r}")
        if not self.thresholds:
            object.__setattr__(self, "thresholds", default_thresholds())
        thresholds = tuple(float(t) for t in self.thresholds)
        if any(t <= 0 for t in thresholds):
            raise ConfigError(f"thresholds must be > 0: {thresholds}")
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ConfigError(f"thresholds must be strictly increasing: {thresholds}")
        object.__setattr__(self, "thresholds", thresholds)
        if self.mc_runs < 0:
            raise ConfigError(f"mc_runs must be >= 0, got {self.mc_runs}")
        if self.inner_runs < 1:
            raise ConfigError(f"inner_runs must be >= 1, got {self.inner_runs}")


class Outcome(enum.Enum):
    TP = "tp"
    FP = "fp"
    TN = "tn"
    FN = "fn"


@dataclass
class OutcomeTally:
    true_positive: int = 0
    false_positive: int = 0
    true_negative: int = 0
    false_negative: int = 0
    total: int = 0

    _FIELDS = {
        Outcome.TP: "true_positive",
        Outcome.FP: "false_positive",
        Outcome.TN: "true_negative",
        Outcome.FN: "false_negative",
    }

    def record(self, outcome: Outcome) -> None:
        name = self._FIELDS[outcome]
        setattr(self, name, getattr(self, name) + 1)
        self.total += 1


def sample_noisy_distribution(
    truth: ConcatenatedDistribution, n_r: int, rng: np.random.Generator
) -> ConcatenatedDistribution:
    """Estimate the distribution from Poisson counts with N_r shots per slice.

    Each bin draws count ~ Poisson(N_r * p) independently; the slice
    estimate is counts / sum(counts).  A slice whose counts are all
    zero falls back to uniform.
    """
    if n_r < 1:
        raise ConfigError(f"resource count must be >= 1, got {n_r}")
    slices = []
    for s in truth.slices:
        counts = rng.poisson(n_r * s.probs)
        total = counts.sum()
        if total == 0:
            estimate = np.full(s.n, 1.0 / s.n)
        else:
            estimate = counts / total
        slices.append(SiteDistribution(estimate))
    return ConcatenatedDistribution(tuple(slices))


def classify_outcome(result: RunResult, truth: CouplingString) -> Outcome:
    """Four-way outcome of one threshold-configured run.

    Halting below the threshold claims success (positive); hitting the
    generation cap claims failure (negative).  The claim is true or
    false according to whether the returned chromosome matches the real
    network.  A zero-fitness halt counts as a threshold halt, since a
    zero score is below any positive threshold.
    """
    matched = result.best_chromosome == truth
    if result.halted_by is HaltReason.MAX_GENERATIONS:
        return Outcome.FN if matched else Outcome.TN
    return Outcome.TP if matched else Outcome.FP


def monte_carlo_sweep(
    truth: CouplingString,
    psi0: ProbeState,
    grid: TimeGrid,
    ga: GAConfig,
    noise: NoiseConfig,
) -> dict[float, OutcomeTally]:
    """Outcome tallies per threshold over mc_runs noisy targets.

    Each Monte-Carlo run draws one noisy target (shared by all its
    thresholds and inner runs); each inner run re-seeds the search
    deterministically from (noise.seed, mc index, inner index), so a
    given inner run differs across thresholds only in when it halts.
    """
    ideal = concatenated_distribution(truth, psi0, grid)
    tallies = {t: OutcomeTally() for t in noise.thresholds}
    for mc in range(noise.mc_runs):
        noise_rng = np.random.default_rng(derive_seed(noise.seed, 0, mc))
        target = sample_noisy_distribution(ideal, noise.n_r, noise_rng)
        for threshold in noise.thresholds:
            for inner in range(noise.inner_runs):
                cfg = replace(ga, threshold=threshold, seed=derive_seed(noise.seed, 1, mc, inner))
                result = run_ga(target, psi0, grid, cfg)
                tallies[threshold].record(classify_outcome(result, truth))
    if noise.mc_runs == 0:
        return {}
    return tallies
