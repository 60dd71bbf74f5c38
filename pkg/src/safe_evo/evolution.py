"""Generic evolutionary machinery over bounded real-vector genomes.

Tournament selection, single-point crossover, single-gene mutation and
elitist generational replacement, all driven by an explicit numpy
``Generator`` so that a run is fully reproducible from one integer seed.
The generator algorithm is pinned to numpy's default PCG64 stream; tests
freeze draw sequences against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

Bounds = tuple[tuple[float, float], ...]

RngStream = np.random.Generator


def make_rng(seed: int) -> RngStream:
    """Create the pinned deterministic random stream (PCG64) for ``seed``."""
    return np.random.default_rng(seed)


def spawn_seed(*components: int) -> int:
    """Derive a 64-bit child seed from an ordered tuple of integers.

    Used to give every run in a batch its own independent stream while
    keeping the whole batch reproducible from a single seed.
    """
    ss = np.random.SeedSequence(list(components))
    return int(ss.generate_state(1, np.uint64)[0])


def uniform_bounds(length: int, low: float, high: float) -> Bounds:
    """Per-gene bounds tuple with the same closed interval for every gene."""
    if length < 1:
        raise ValueError(f"genome length must be positive, got {length}")
    if not low < high:
        raise ValueError(f"empty bound interval ({low}, {high})")
    return tuple((low, high) for _ in range(length))


@dataclass(frozen=True)
class Genome:
    """Fixed-length list of real genes, each confined to its own interval."""

    genes: tuple[float, ...]
    bounds: Bounds

    def __post_init__(self) -> None:
        if len(self.genes) != len(self.bounds):
            raise ValueError(
                f"genome has {len(self.genes)} genes but {len(self.bounds)} bounds"
            )
        for i, (g, (lo, hi)) in enumerate(zip(self.genes, self.bounds)):
            if not lo <= g <= hi:
                raise ValueError(f"gene {i} value {g} outside [{lo}, {hi}]")

    def __len__(self) -> int:
        return len(self.genes)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.genes, dtype=np.float64)


@dataclass
class EvoParams:
    """Knobs of the generational loop.

    Defaults match the reference experimental setup: population 200,
    tournament 5, crossover 0.8, per-individual mutation 0.4, 2 elites,
    500 generations.
    """

    population_size: int = 200
    tournament_size: int = 5
    crossover_rate: float = 0.8
    mutation_prob: float = 0.4
    elite_count: int = 2
    max_generations: int = 500

    def __post_init__(self) -> None:
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must be in [1, population_size]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be a probability")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be a probability")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError("elite_count must be in [0, population_size)")
        if self.max_generations < 1:
            raise ValueError("max_generations must be positive")


def random_genome(bounds: Bounds, rng: RngStream) -> Genome:
    """Uniform genome over ``bounds``; one vectorised draw per genome."""
    lows = np.array([b[0] for b in bounds])
    highs = np.array([b[1] for b in bounds])
    genes = rng.uniform(lows, highs)
    return Genome(genes=tuple(float(g) for g in genes), bounds=bounds)


def random_population(n: int, bounds: Bounds, rng: RngStream) -> list[Genome]:
    return [random_genome(bounds, rng) for _ in range(n)]


def tournament_select(
    fitnesses: Sequence[float], params: EvoParams, rng: RngStream
) -> int:
    """Index of the best individual among ``tournament_size`` uniform draws.

    Draws are with replacement; ties go to the lowest population index
    among the drawn winners.
    """
    n = len(fitnesses)
    if n == 0:
        raise ValueError("cannot select from an empty population")
    draws = rng.integers(0, n, size=params.tournament_size)
    best = int(draws[0])
    for d in draws[1:]:
        d = int(d)
        if fitnesses[d] > fitnesses[best] or (
            fitnesses[d] == fitnesses[best] and d < best
        ):
            best = d
    return best


def single_point_crossover(
    p1: Genome, p2: Genome, rate: float, rng: RngStream
) -> tuple[Genome, Genome]:
    """Swap parent suffixes after a uniform cut point, with probability ``rate``.

    The cut point lies in {1, ..., L-1}; otherwise the children are plain
    copies. Parents must agree in length and bounds.
    """
    if len(p1) != len(p2):
        raise ValueError(f"parent length mismatch: {len(p1)} vs {len(p2)}")
    if p1.bounds != p2.bounds:
        raise ValueError("parent bounds mismatch")
    length = len(p1)
    if length < 2:
        raise ValueError("crossover needs genomes of length >= 2")
    if rng.uniform() < rate:
        cut = int(rng.integers(1, length))
        c1 = p1.genes[:cut] + p2.genes[cut:]
        c2 = p2.genes[:cut] + p1.genes[cut:]
        return Genome(c1, p1.bounds), Genome(c2, p1.bounds)
    return Genome(p1.genes, p1.bounds), Genome(p2.genes, p2.bounds)


def mutate(g: Genome, prob: float, rng: RngStream) -> Genome:
    """With probability ``prob`` replace one uniformly chosen gene.

    The replacement value is drawn uniformly from that gene's own bound
    interval; a single Bernoulli draw gates the whole genome.
    """
    if rng.uniform() >= prob:
        return g
    idx = int(rng.integers(0, len(g)))
    lo, hi = g.bounds[idx]
    value = float(rng.uniform(lo, hi))
    genes = g.genes[:idx] + (value,) + g.genes[idx + 1 :]
    return Genome(genes, g.bounds)


def next_generation(
    population: Sequence[Genome],
    fitnesses: Sequence[float],
    params: EvoParams,
    rng: RngStream,
) -> list[Genome]:
    """Elitist generational replacement.

    The ``elite_count`` highest-fitness individuals (ties by lowest index)
    are copied unchanged to the front of the new population; the rest is
    filled by repeating [two tournaments -> crossover -> mutate each child].
    When the remainder is odd the final pair's second child is discarded
    before it is mutated.
    """
    n = len(population)
    if n != len(fitnesses):
        raise ValueError(
            f"population size {n} does not match {len(fitnesses)} fitness values"
        )
    if n != params.population_size:
        raise ValueError(
            f"population size {n} does not match params.population_size "
            f"{params.population_size}"
        )
    order = sorted(range(n), key=lambda i: (-fitnesses[i], i))
    out: list[Genome] = [population[i] for i in order[: params.elite_count]]
    while len(out) < n:
        i = tournament_select(fitnesses, params, rng)
        j = tournament_select(fitnesses, params, rng)
        c1, c2 = single_point_crossover(
            population[i], population[j], params.crossover_rate, rng
        )
        out.append(mutate(c1, params.mutation_prob, rng))
        if len(out) < n:
            out.append(mutate(c2, params.mutation_prob, rng))
    return out
