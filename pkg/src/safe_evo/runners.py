"""Experiment runners: standard EA, novelty search, SAFE, random search and
the fixed 0.5/0.5 quality-novelty mix, all expressed over a domain adapter
so the maze and benchmark-function domains share one implementation.

Every run is driven by a single seeded random stream, so an identical
``RunConfig`` reproduces an identical ``RunResult``. "Best" always means
best raw objective (distance to goal, or function value), never internal
fitness, so algorithms are compared on a common scale.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import benchmarks
from .coevolution import (
    SafeGenerationResult,
    SolutionMetrics,
    _component_matrix,
    initial_state,
    objective_attachment,
    safe_generation,
)
from .evolution import (
    Bounds,
    EvoParams,
    Genome,
    make_rng,
    next_generation,
    random_genome,
    random_population,
    uniform_bounds,
)
from .maze import (
    DEFAULT_MAX_STEPS,
    DEFAULT_STOP_DISTANCE,
    CONTROLLER_BOUNDS,
    CONTROLLER_LENGTH,
    MazeGrid,
    Trajectory,
    load_maze,
    simulate,
    simulate_batch,
    simulate_endpoint,
)
from .novelty import (
    DEFAULT_ARCHIVE_CAPACITY,
    NoveltyArchive,
    NoveltyParams,
    generation_update,
)

ALGORITHM_NAMES = ("standard", "novelty", "safe", "random", "fixed-mix")


@dataclass
class DomainSpec:
    """What to optimise: a maze (path or bundled name) or a benchmark
    function plus dimension."""

    kind: str  # "maze" | "function"
    maze: str | Path | None = None
    function: str | None = None
    dim: int | None = None
    max_steps: int = DEFAULT_MAX_STEPS
    stop_distance: int = DEFAULT_STOP_DISTANCE

    def __post_init__(self) -> None:
        if self.kind == "maze":
            if self.maze is None:
                raise ValueError("maze domain needs a maze path or bundled name")
        elif self.kind == "function":
            if self.function is None or self.dim is None:
                raise ValueError("function domain needs a function name and dimension")
            if self.dim < 2:
                raise ValueError("function dimension must be >= 2")
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "maze":
            return f"maze:{Path(str(self.maze)).stem}"
        return f"{self.function}:d{self.dim}"


@dataclass
class DomainAdapter:
    """Uniform evaluation surface over a concrete domain.

    ``evaluate`` maps one genome to its metrics (novelty left at 0; the
    runner fills it in). ``evaluate_population`` is an optional batched
    fast path; ``champion_trajectory`` re-rolls a genome to a full
    trajectory in domains that have one. ``component_scaling`` states how
    the quality/novelty pair enters weighted mixes (see coevolution).
    """

    label: str
    kind: str
    genome_length: int
    bounds: Bounds
    evaluate: Callable[[Genome], SolutionMetrics]
    evaluate_population: Callable[[Sequence[Genome]], list[SolutionMetrics]] | None = None
    champion_trajectory: Callable[[Genome], Trajectory] | None = None
    component_scaling: str = "raw"

    def evaluate_all(self, genomes: Sequence[Genome]) -> list[SolutionMetrics]:
        if self.evaluate_population is not None:
            return self.evaluate_population(genomes)
        return [self.evaluate(g) for g in genomes]


def maze_base_quality(dist_to_goal: int) -> float:
    """1 / max(dist, 1): the goal-directed component, clamped so a robot
    sitting on the goal does not divide by zero."""
    return 1.0 / max(dist_to_goal, 1)


def maze_adapter(
    grid: MazeGrid,
    label: str = "maze",
    max_steps: int = DEFAULT_MAX_STEPS,
    stop_distance: int = DEFAULT_STOP_DISTANCE,
) -> DomainAdapter:
    """Adapter for the grid-maze domain; behaviour is the endpoint cell."""

    def evaluate(genome: Genome) -> SolutionMetrics:
        end, dist, _steps, ok = simulate_endpoint(grid, genome, max_steps, stop_distance)
        return SolutionMetrics(
            behavior=(float(end.col), float(end.row)),
            base_quality=maze_base_quality(dist),
            raw_objective=float(dist),
            success=ok,
        )

    def evaluate_population(genomes: Sequence[Genome]) -> list[SolutionMetrics]:
        rows = np.array([g.genes for g in genomes], dtype=np.float64)
        out = simulate_batch(grid, rows, max_steps, stop_distance)
        return [
            SolutionMetrics(
                behavior=(float(c), float(r)),
                base_quality=maze_base_quality(int(d)),
                raw_objective=float(d),
                success=bool(ok),
            )
            for c, r, d, _s, ok in out
        ]

    def champion_trajectory(genome: Genome) -> Trajectory:
        return simulate(grid, genome, max_steps, stop_distance)

    return DomainAdapter(
        label=label,
        kind="maze",
        genome_length=CONTROLLER_LENGTH,
        bounds=CONTROLLER_BOUNDS,
        evaluate=evaluate,
        evaluate_population=evaluate_population,
        champion_trajectory=champion_trajectory,
        component_scaling="raw",
    )


def function_adapter(name: str, dim: int) -> DomainAdapter:
    """Adapter for a benchmark function; the candidate vector itself is the
    behaviour point, and mixes use within-generation ranks because raw
    novelty distances and 1/(1+f) live on incommensurate scales."""
    if name not in benchmarks.FUNCTIONS:
        valid = ", ".join(sorted(benchmarks.FUNCTIONS))
        raise ValueError(f"unknown function {name!r}; valid names: {valid}")
    if dim < 2:
        raise ValueError("function dimension must be >= 2")
    bounds = uniform_bounds(dim, benchmarks.FUNCTION_LOW, benchmarks.FUNCTION_HIGH)

    def evaluate(genome: Genome) -> SolutionMetrics:
        value = benchmarks.evaluate(name, genome.genes)
        return SolutionMetrics(
            behavior=genome.genes,
            base_quality=1.0 / (1.0 + value),
            raw_objective=value,
            success=False,
        )

    return DomainAdapter(
        label=f"{name}:d{dim}",
        kind="function",
        genome_length=dim,
        bounds=bounds,
        evaluate=evaluate,
        component_scaling="rank",
    )


def make_adapter(spec: DomainSpec) -> DomainAdapter:
    if spec.kind == "maze":
        grid = load_maze(spec.maze)
        return maze_adapter(
            grid,
            label=spec.label,
            max_steps=spec.max_steps,
            stop_distance=spec.stop_distance,
        )
    return function_adapter(spec.function, spec.dim)


@dataclass
class RunConfig:
    algorithm: str
    domain: DomainSpec
    evo: EvoParams = field(default_factory=EvoParams)
    novelty: NoveltyParams = field(default_factory=NoveltyParams)
    archive_capacity: int = DEFAULT_ARCHIVE_CAPACITY
    random_budget: int | None = None  # None: max_generations * population_size
    seed: int = 0
    stop_on_success: bool | None = None  # None: True for mazes, False for functions

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHM_NAMES:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; valid: {', '.join(ALGORITHM_NAMES)}"
            )
        if self.archive_capacity < 1:
            raise ValueError("archive_capacity must be positive")
        if self.random_budget is not None and self.random_budget < 1:
            raise ValueError("random_budget must be positive")

    @property
    def effective_random_budget(self) -> int:
        if self.random_budget is not None:
            return self.random_budget
        return self.evo.max_generations * self.evo.population_size

    @property
    def effective_stop_on_success(self) -> bool:
        if self.stop_on_success is not None:
            return self.stop_on_success
        return self.domain.kind == "maze"


@dataclass
class TelemetryRecord:
    generation: int
    best_raw: float
    best_fitness: float
    mean_a: float | None = None
    mean_b: float | None = None


@dataclass
class RunResult:
    algorithm: str
    seed: int
    success: bool
    generations_to_success: int | None
    best_raw: float
    best_genome: Genome
    best_trajectory: Trajectory | None
    telemetry: list[TelemetryRecord]
    a_mean: float | None = None
    a_sd: float | None = None
    b_mean: float | None = None
    b_sd: float | None = None


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation; a single value has sd 0."""
    if len(values) == 1:
        return float(values[0]), 0.0
    return statistics.mean(values), statistics.stdev(values)


class _BestTracker:
    """Running best-by-raw-objective, first hit wins ties."""

    def __init__(self) -> None:
        self.raw: float | None = None
        self.genome: Genome | None = None

    def update(self, genomes: Sequence[Genome], metrics: Sequence[SolutionMetrics]) -> None:
        for g, m in zip(genomes, metrics):
            if self.raw is None or m.raw_objective < self.raw:
                self.raw = m.raw_objective
                self.genome = g


def _finish(
    config: RunConfig,
    adapter: DomainAdapter,
    best: _BestTracker,
    success_generation: int | None,
    telemetry: list[TelemetryRecord],
    coefficients: tuple[float, float, float, float] | None = None,
) -> RunResult:
    trajectory = None
    if adapter.champion_trajectory is not None and best.genome is not None:
        trajectory = adapter.champion_trajectory(best.genome)
    a_mean = a_sd = b_mean = b_sd = None
    if coefficients is not None:
        a_mean, a_sd, b_mean, b_sd = coefficients
    return RunResult(
        algorithm=config.algorithm,
        seed=config.seed,
        success=success_generation is not None,
        generations_to_success=success_generation,
        best_raw=best.raw,
        best_genome=best.genome,
        best_trajectory=trajectory,
        telemetry=telemetry,
        a_mean=a_mean,
        a_sd=a_sd,
        b_mean=b_mean,
        b_sd=b_sd,
    )


def _generational_run(
    config: RunConfig,
    adapter: DomainAdapter,
    score_generation: Callable[[list[SolutionMetrics]], list[float]],
) -> RunResult:
    """Shared loop of the single-population algorithms.

    Per generation: evaluate the whole population, score it with the
    algorithm's fitness rule, log telemetry, then breed. Evaluation count
    is exactly population_size times the number of logged generations.
    """
    rng = make_rng(config.seed)
    pop = random_population(config.evo.population_size, adapter.bounds, rng)
    best = _BestTracker()
    telemetry: list[TelemetryRecord] = []
    success_generation: int | None = None
    for gen in range(config.evo.max_generations):
        metrics = adapter.evaluate_all(pop)
        fitness = score_generation(metrics)
        best.update(pop, metrics)
        if success_generation is None and any(m.success for m in metrics):
            success_generation = gen
        telemetry.append(
            TelemetryRecord(
                generation=gen,
                best_raw=min(m.raw_objective for m in metrics),
                best_fitness=max(fitness),
            )
        )
        if success_generation is not None and config.effective_stop_on_success:
            break
        if gen == config.evo.max_generations - 1:
            break
        pop = next_generation(pop, fitness, config.evo, rng)
    return _finish(config, adapter, best, success_generation, telemetry)


def run_standard_ea(config: RunConfig, adapter: DomainAdapter | None = None) -> RunResult:
    """Plain generational EA; fitness is the goal-directed base quality."""
    adapter = adapter if adapter is not None else make_adapter(config.domain)

    def score(metrics: list[SolutionMetrics]) -> list[float]:
        return [m.base_quality for m in metrics]

    return _generational_run(config, adapter, score)


def run_novelty_search(config: RunConfig, adapter: DomainAdapter | None = None) -> RunResult:
    """Same loop with fitness replaced by phenotypic novelty; success is
    still tracked on the raw metrics even though fitness ignores them."""
    adapter = adapter if adapter is not None else make_adapter(config.domain)
    archive = NoveltyArchive(config.archive_capacity)

    def score(metrics: list[SolutionMetrics]) -> list[float]:
        scores = generation_update(
            [m.behavior for m in metrics], archive, k=config.novelty.k
        )
        for m, s in zip(metrics, scores):
            m.novelty_score = s
        return scores

    return _generational_run(config, adapter, score)


def run_fixed_mix(config: RunConfig, adapter: DomainAdapter | None = None) -> RunResult:
    """Control variant: fixed equal weighting of quality and novelty, with
    the solution archive active but no objective-function population."""
    adapter = adapter if adapter is not None else make_adapter(config.domain)
    archive = NoveltyArchive(config.archive_capacity)

    def score(metrics: list[SolutionMetrics]) -> list[float]:
        nov = generation_update(
            [m.behavior for m in metrics], archive, k=config.novelty.k
        )
        for m, s in zip(metrics, nov):
            m.novelty_score = s
        comp = _component_matrix(metrics, adapter.component_scaling)
        return [float(v) for v in 0.5 * comp[:, 0] + 0.5 * comp[:, 1]]

    return _generational_run(config, adapter, score)


def run_safe(config: RunConfig, adapter: DomainAdapter | None = None) -> RunResult:
    """Two-population coevolution; see the coevolution module.

    Telemetry adds the objective population's mean weights per generation.
    On the first successful generation the weight pairs attached to the
    successful solutions (the argmax objective of each) are summarised into
    the run's a/b statistics.
    """
    adapter = adapter if adapter is not None else make_adapter(config.domain)
    rng = make_rng(config.seed)
    state = initial_state(
        adapter.bounds,
        rng,
        solution_count=config.evo.population_size,
        objective_count=config.evo.population_size,
        archive_capacity=config.archive_capacity,
    )
    best = _BestTracker()
    telemetry: list[TelemetryRecord] = []
    success_generation: int | None = None
    coefficients: tuple[float, float, float, float] | None = None
    for gen in range(config.evo.max_generations):
        solutions = state.solutions
        objectives = state.objectives
        result: SafeGenerationResult = safe_generation(
            state,
            adapter.evaluate_all,
            solution_params=config.evo,
            objective_params=config.evo,
            rng=rng,
            k=config.novelty.k,
            scaling=adapter.component_scaling,
        )
        metrics = result.metrics
        best.update(solutions, metrics)
        if success_generation is None and any(m.success for m in metrics):
            success_generation = gen
            attach = objective_attachment(metrics, objectives, adapter.component_scaling)
            pairs = [
                objectives[attach[i]].genes
                for i, m in enumerate(metrics)
                if m.success
            ]
            a_mean, a_sd = _mean_sd([p[0] for p in pairs])
            b_mean, b_sd = _mean_sd([p[1] for p in pairs])
            coefficients = (a_mean, a_sd, b_mean, b_sd)
        weights = np.array([o.genes for o in objectives], dtype=np.float64)
        telemetry.append(
            TelemetryRecord(
                generation=gen,
                best_raw=min(m.raw_objective for m in metrics),
                best_fitness=max(result.solution_fitness),
                mean_a=float(weights[:, 0].mean()),
                mean_b=float(weights[:, 1].mean()),
            )
        )
        if success_generation is not None and config.effective_stop_on_success:
            break
        state = result.state
    return _finish(config, adapter, best, success_generation, telemetry, coefficients)


def run_random_search(config: RunConfig, adapter: DomainAdapter | None = None) -> RunResult:
    """Draw the whole budget of uniform genomes and keep the best.

    Maze draws are full simulations with the usual early-stop rule. The
    budget is always spent in full; telemetry groups draws into
    population-sized pseudo-generations, and a success is dated by the
    pseudo-generation of its draw so resource use stays comparable with
    the evolutionary runs.
    """
    adapter = adapter if adapter is not None else make_adapter(config.domain)
    rng = make_rng(config.seed)
    budget = config.effective_random_budget
    chunk = config.evo.population_size
    best = _BestTracker()
    telemetry: list[TelemetryRecord] = []
    success_index: int | None = None
    done = 0
    gen = 0
    while done < budget:
        size = min(chunk, budget - done)
        genomes = [random_genome(adapter.bounds, rng) for _ in range(size)]
        metrics = adapter.evaluate_all(genomes)
        best.update(genomes, metrics)
        if success_index is None:
            for i, m in enumerate(metrics):
                if m.success:
                    success_index = done + i
                    break
        telemetry.append(
            TelemetryRecord(
                generation=gen,
                best_raw=min(m.raw_objective for m in metrics),
                best_fitness=max(m.base_quality for m in metrics),
            )
        )
        done += size
        gen += 1
    success_generation = None if success_index is None else success_index // chunk
    return _finish(config, adapter, best, success_generation, telemetry)


ALGORITHMS: dict[str, Callable[[RunConfig, DomainAdapter | None], RunResult]] = {
    "standard": run_standard_ea,
    "novelty": run_novelty_search,
    "safe": run_safe,
    "random": run_random_search,
    "fixed-mix": run_fixed_mix,
}


def run_algorithm(config: RunConfig, adapter: DomainAdapter | None = None) -> RunResult:
    return ALGORITHMS[config.algorithm](config, adapter)
