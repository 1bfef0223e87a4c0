"""Genetic search over coupling strings.

Each generation is scored against the target distribution, the best
individuals are cloned unchanged (elitism), and the remaining slots are
filled with children bred two at a time: tournament-select two parents,
single-point crossover with probability p_c, then per-gene bit-flip
mutation.  The search halts on a configured fitness threshold, on exact
zero fitness, or after n_g generations.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .ctqw import ConcatenatedDistribution, ProbeState, TimeGrid, batch_site_distributions
from .errors import ConfigError, ShapeError, StateError
from .fitness import Metric, batch_kld, batch_kolmogorov
from .graph import CouplingString

__all__ = [
    "ZERO_TOL",
    "HaltReason",
    "Individual",
    "GAConfig",
    "RunResult",
    "init_population",
    "tournament",
    "crossover",
    "mutate",
    "run_ga",
]

# Scores below this count as exactly zero for the noiseless halt test.
ZERO_TOL = 1e-15


class HaltReason(enum.Enum):
    ZERO_FITNESS = "ZeroFitness"
    THRESHOLD = "Threshold"
    MAX_GENERATIONS = "MaxGenerations"


@dataclass
class Individual:
    chromosome: CouplingString
    score: float | None = None


@dataclass(frozen=True)
class GAConfig:
    """Hyperparameters of the search.

    ``n_p=None`` means the population defaults to 2 * n_c ** 2 for the
    genome length at hand.
    """

    n_p: int | None = None
    p_e: float = 0.02
    k: int = 6
    p_c: float = 0.85
    p_m: float = 0.05
    n_g: int = 100
    threshold: float | None = None
    seed: int = 0
    metric: Metric = Metric.KLD

    def __post_init__(self) -> None:
        if self.n_p is not None and self.n_p < 2:
            raise ConfigError(f"population size must be >= 2, got {self.n_p}")
        if not 0 <= self.p_e < 1:
            raise ConfigError(f"elitist fraction must be in [0, 1), got {self.p_e}")
        if self.k < 1:
            raise ConfigError(f"tournament size must be >= 1, got {self.k}")
        if not 0 <= self.p_c <= 1:
            raise ConfigError(f"crossover probability must be in [0, 1], got {self.p_c}")
        if not 0 <= self.p_m <= 1:
            raise ConfigError(f"mutation probability must be in [0, 1], got {self.p_m}")
        if self.n_g < 1:
            raise ConfigError(f"generation budget must be >= 1, got {self.n_g}")
        if self.threshold is not None and self.threshold < 0:
            raise ConfigError(f"threshold must be >= 0, got {self.threshold}")
        if not isinstance(self.metric, Metric):
            raise ConfigError(f"metric must be a Metric, got {self.metric!r}")

    def resolved_n_p(self, n_c: int) -> int:
        return self.n_p if self.n_p is not None else 2 * n_c * n_c

    def elite_count(self, n_p: int) -> int:
        """round(p_e * n_p), bumped so the child count n_p - e is even.

        Children are produced in pairs, so the slots left after cloning
        the hall of fame must come in twos.
        """
        e = round(self.p_e * n_p)
        if (n_p - e) % 2:
            e = e + 1 if e + 1 <= n_p else e - 1
        return e


@dataclass(frozen=True)
class RunResult:
    best_chromosome: CouplingString
    best_score: float
    generations_used: int
    halted_by: HaltReason
    evaluations: int


def _nodes_for_genome(n_c: int) -> int:
    n = round((1 + np.sqrt(1 + 8 * n_c)) / 2)
    if n * (n - 1) // 2 != n_c:
        raise ConfigError(f"genome length {n_c} is not n(n-1)/2 for any integer n")
    return n


def init_population(n_p: int, n_c: int, rng: np.random.Generator) -> list[Individual]:
    """n_p individuals with genes drawn uniformly from {0, 1}, unscored."""
    if n_p < 2:
        raise ConfigError(f"population size must be >= 2, got {n_p}")
    if n_c < 1:
        raise ConfigError(f"genome length must be >= 1, got {n_c}")
    n = _nodes_for_genome(n_c)
    bits = rng.integers(0, 2, size=(n_p, n_c), dtype=np.uint8)
    return [Individual(CouplingString(row, n)) for row in bits]


def tournament(pop: list[Individual], k: int, rng: np.random.Generator) -> Individual:
    """Draw k individuals uniformly with replacement; return the fittest.

    Ties go to the earliest draw.
    """
    if k < 1:
        raise ConfigError(f"tournament size must be >= 1, got {k}")
    if any(ind.score is None for ind in pop):
        raise StateError("tournament requires every individual to be scored")
    draws = rng.integers(0, len(pop), size=k)
    scores = np.array([pop[i].score for i in draws])
    return pop[draws[int(np.argmin(scores))]]


def crossover(
    parent1: CouplingString,
    parent2: CouplingString,
    p_c: float,
    rng: np.random.Generator,
) -> tuple[CouplingString, CouplingString]:
    """Single-point crossover with probability p_c, else exact copies.

    The split point y is uniform over {0, ..., n_c - 2}; child 1 takes
    genes [0..y] from parent 1 and the rest from parent 2, child 2 the
    converse.  Genomes of length 1 have no valid split and pass through
    as copies.
    """
    if parent1.n != parent2.n:
        raise ShapeError(f"parents encode different sizes: n={parent1.n} vs n={parent2.n}")
    n_c = parent1.n_c
    if rng.random() < p_c and n_c >= 2:
        y = int(rng.integers(0, n_c - 1))
        c1 = np.concatenate([parent1.bits[: y + 1], parent2.bits[y + 1 :]])
        c2 = np.concatenate([parent2.bits[: y + 1], parent1.bits[y + 1 :]])
        return CouplingString(c1, parent1.n), CouplingString(c2, parent1.n)
    return CouplingString(parent1.bits, parent1.n), CouplingString(parent2.bits, parent2.n)


def mutate(child: CouplingString, p_m: float, rng: np.random.Generator) -> CouplingString:
    """Flip each gene independently with probability p_m."""
    flips = rng.random(child.n_c) < p_m
    return CouplingString(child.bits ^ flips.astype(np.uint8), child.n)


def _breed(
    bits: np.ndarray,
    scores: np.ndarray,
    n_children: int,
    cfg: GAConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Produce n_children new genomes from the scored population.

    All pairs are bred in one vectorized pass; the generator is consumed
    in a fixed order (tournament draws, crossover gates, split points
    for the crossing pairs, mutation flips), which keeps runs
    reproducible for a given seed.
    """
    n_p, n_c = bits.shape
    n_pairs = n_children // 2
    draws = rng.integers(0, n_p, size=(n_pairs, 2, cfg.k))
    best = np.argmin(scores[draws], axis=-1)
    winners = np.take_along_axis(draws, best[..., None], axis=-1)[..., 0]
    a = bits[winners[:, 0]]
    b = bits[winners[:, 1]]
    gates = rng.random(n_pairs) < cfg.p_c
    c1 = a.copy()
    c2 = b.copy()
    n_cross = int(gates.sum())
    if n_cross and n_c >= 2:
        splits = rng.integers(0, n_c - 1, size=n_cross)
        tail = np.arange(n_c)[None, :] > splits[:, None]
        c1[gates] = np.where(tail, b[gates], a[gates])
        c2[gates] = np.where(tail, a[gates], b[gates])
    children = np.empty((n_children, n_c), dtype=np.uint8)
    children[0::2] = c1
    children[1::2] = c2
    flips = rng.random(size=children.shape) < cfg.p_m
    children ^= flips.astype(np.uint8)
    return children


def _evaluate(
    bits: np.ndarray,
    cache: dict[bytes, float],
    n: int,
    amplitudes: np.ndarray,
    times: tuple[float, ...],
    target_flat: np.ndarray,
    metric: Metric,
) -> tuple[np.ndarray, int]:
    """Score every row, memoizing by genome; returns (scores, new evals)."""
    n_rows, n_c = bits.shape
    scores = np.empty(n_rows)
    pending: dict[bytes, list[int]] = {}
    for i in range(n_rows):
        key = bits[i].tobytes()
        hit = cache.get(key)
        if hit is None:
            pending.setdefault(key, []).append(i)
        else:
            scores[i] = hit
    if pending:
        keys = list(pending)
        fresh = np.frombuffer(b"".join(keys), dtype=np.uint8).reshape(len(keys), n_c)
        models = batch_site_distributions(fresh, n, amplitudes, times)
        flat = models.reshape(len(keys), -1)
        if metric is Metric.KLD:
            values = batch_kld(flat, target_flat)
        else:
            values = batch_kolmogorov(flat, target_flat)
        for key, value in zip(keys, values):
            val = float(value)
            cache[key] = val
            for i in pending[key]:
                scores[i] = val
    return scores, len(pending)


def run_ga(
    target: ConcatenatedDistribution,
    psi0: ProbeState,
    grid: TimeGrid,
    config: GAConfig,
) -> RunResult:
    """Search for the coupling string whose walk statistics match the target.

    Per generation: score everyone, halt if the generation's best beats
    the configured threshold (checked first) or is exactly zero within
    ZERO_TOL, otherwise clone the hall of fame and breed the rest.
    Returns the best individual ever seen.  ``evaluations`` counts
    distinct genomes scored; repeats are served from a memo and cost
    nothing.
    """
    n = target.n
    if psi0.n != n:
        raise ShapeError(f"probe has {psi0.n} amplitudes but the target has {n} sites")
    if len(grid) != target.k:
        raise ShapeError(f"grid has {len(grid)} times but the target has {target.k} slices")
    n_c = n * (n - 1) // 2
    if n_c < 1:
        raise ConfigError(f"need at least 2 nodes to search, got n={n}")
    n_p = config.resolved_n_p(n_c)
    if n_p < 2:
        raise ConfigError(f"population size must be >= 2, got {n_p}")
    e = config.elite_count(n_p)

    rng = np.random.default_rng(config.seed)
    bits = rng.integers(0, 2, size=(n_p, n_c), dtype=np.uint8)
    target_flat = target.flat
    cache: dict[bytes, float] = {}
    evaluations = 0
    best_score = np.inf
    best_bits = bits[0]

    for gen in range(config.n_g):
        scores, fresh = _evaluate(
            bits, cache, n, psi0.amplitudes, grid.times, target_flat, config.metric
        )
        evaluations += fresh
        leader = int(np.argmin(scores))
        current = float(scores[leader])
        if current < best_score:
            best_score = current
            best_bits = bits[leader].copy()
        if config.threshold is not None and current < config.threshold:
            return _result(best_bits, n, best_score, gen, HaltReason.THRESHOLD, evaluations)
        if abs(current) < ZERO_TOL:
            return _result(best_bits, n, best_score, gen, HaltReason.ZERO_FITNESS, evaluations)
        if gen == config.n_g - 1:
            break
        order = np.argsort(scores, kind="stable")[:e]
        elites = bits[order].copy()
        children = _breed(bits, scores, n_p - e, config, rng)
        bits = np.concatenate([elites, children], axis=0)

    return _result(best_bits, n, best_score, config.n_g, HaltReason.MAX_GENERATIONS, evaluations)


def _result(
    bits: np.ndarray,
    n: int,
    score: float,
    generations: int,
    reason: HaltReason,
    evaluations: int,
) -> RunResult:
    return RunResult(
        best_chromosome=CouplingString(bits, n),
        best_score=score,
        generations_used=generations,
        halted_by=reason,
        evaluations=evaluations,
    )
