"""Genetic algorithm over binary patterns with TPS fitness.

One flat population; each slot tries to improve itself by uniform crossover
with a random mate plus per-bit mutation. An offspring replaces its slot only
if strictly fitter and not already present cell-for-cell in the population.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .grid import Pattern
from .payoff import DEFAULT_PARAMS, PayoffParams, tps_of_bits


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 40
    p1: float = 0.2   # per-bit take-from-mate probability
    p2: float = 0.05  # per-bit mutation probability
    max_iterations: int = 10_000
    target_fitness: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population size must be >= 2")
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError("p1 and p2 must be in [0, 1]")


@dataclass(frozen=True)
class Solution:
    pattern: Pattern
    fitness: float


class Population:
    """GA working set: M bit rows with their fitnesses and a duplicate index."""

    def __init__(self, n: int, bits: np.ndarray, params: PayoffParams):
        self.n = n
        self.params = params
        self.bits = bits  # (M, n*n) uint8
        self.fitness = np.array(
            [tps_of_bits(row, n, params) for row in bits])
        self._counts = Counter(row.tobytes() for row in bits)

    def __len__(self) -> int:
        return len(self.bits)

    def contains_bits(self, row: np.ndarray) -> bool:
        return self._counts[row.tobytes()] > 0

    def replace(self, i: int, row: np.ndarray, fit: float) -> None:
        old = self.bits[i].tobytes()
        self._counts[old] -= 1
        if self._counts[old] <= 0:
            del self._counts[old]
        self.bits[i] = row
        self.fitness[i] = fit
        self._counts[row.tobytes()] += 1

    @property
    def best_fitness(self) -> float:
        return float(self.fitness.max())

    def solutions(self) -> list[Solution]:
        return [Solution(Pattern(self.n, tuple(int(v) for v in row)), float(f))
                for row, f in zip(self.bits, self.fitness)]


def init_population(cfg: GaConfig, n: int,
                    params: PayoffParams = DEFAULT_PARAMS,
                    rng: np.random.Generator | None = None) -> Population:
    """M patterns of i.i.d. fair-coin bits, fitness computed for each."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    bits = rng.integers(0, 2, size=(cfg.population_size, n * n),
                        dtype=np.uint8)
    return Population(n, bits, params)


def make_offspring(parent: Solution, mate: Solution, cfg: GaConfig,
                   rng: np.random.Generator) -> Pattern:
    """Uniform crossover (take-from-mate with p1) then per-bit mutation (p2)."""
    a = np.array(parent.pattern.cells, dtype=np.uint8)
    b = np.array(mate.pattern.cells, dtype=np.uint8)
    child = _offspring_bits(a, b, cfg.p1, cfg.p2, rng)
    return Pattern(parent.pattern.n, tuple(int(v) for v in child))


def _offspring_bits(parent: np.ndarray, mate: np.ndarray, p1: float,
                    p2: float, rng: np.random.Generator) -> np.ndarray:
    nn = parent.shape[0]
    child = np.where(rng.random(nn) < p1, mate, parent)
    return child ^ (rng.random(nn) < p2)


def ga_step(pop: Population, cfg: GaConfig, rng: np.random.Generator) -> None:
    """One sweep over all slots, replacing in place.

    Later slots see earlier replacements. The mate index may equal the slot
    itself, which degenerates to mutation-only offspring.
    """
    m = len(pop)
    nn = pop.n * pop.n
    mates = rng.integers(0, m, size=m)
    cross = rng.random((m, nn)) < cfg.p1
    flip = rng.random((m, nn)) < cfg.p2
    for i in range(m):
        child = np.where(cross[i], pop.bits[mates[i]], pop.bits[i]) ^ flip[i]
        child = child.astype(np.uint8, copy=False)
        fit = tps_of_bits(child, pop.n, pop.params)
        if fit > pop.fitness[i] and not pop.contains_bits(child):
            pop.replace(i, child, fit)


@dataclass(frozen=True)
class GaResult:
    solutions: tuple[Solution, ...] = field(repr=False)
    best_fitness: float
    iterations: int

    @property
    def best(self) -> Solution:
        return self.solutions[0]


def run_ga(cfg: GaConfig, n: int,
           params: PayoffParams = DEFAULT_PARAMS) -> GaResult:
    """Iterate until max_iterations or the target fitness is reached.

    Returns the population sorted by descending fitness.
    """
    rng = np.random.default_rng(cfg.seed)
    pop = init_population(cfg, n, params, rng)
    iterations = 0
    while iterations < cfg.max_iterations:
        if (cfg.target_fitness is not None
                and pop.best_fitness >= cfg.target_fitness):
            break
        ga_step(pop, cfg, rng)
        iterations += 1
    solutions = sorted(pop.solutions(), key=lambda s: s.fitness, reverse=True)
    return GaResult(tuple(solutions), solutions[0].fitness, iterations)
