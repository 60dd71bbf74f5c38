"""The SAFE engine: commensalistic coevolution of solutions and objective
functions.

Two populations evolve in lockstep. Candidate objective functions are
weight pairs (a, b) in [0, 1]^2 scoring a solution as

    a * base_quality + b * novelty_score

and each solution's fitness is the best score any candidate objective
function gives it. The objective-function population itself is driven
purely by genotypic novelty (Euclidean distance between the weight pairs),
so its fitness never depends on the solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import rankdata

from .evolution import (
    EvoParams,
    Genome,
    RngStream,
    next_generation,
    random_population,
    uniform_bounds,
)
from .novelty import (
    DEFAULT_ARCHIVE_CAPACITY,
    DEFAULT_K,
    NoveltyArchive,
    generation_update,
)

OBJECTIVE_LENGTH = 2
OBJECTIVE_BOUNDS = uniform_bounds(OBJECTIVE_LENGTH, 0.0, 1.0)

# How the two score components are fed into the weighted mix:
#   "raw"  - exactly as measured (the maze formulation);
#   "rank" - fractional ranks within the generation, used for the
#            function-optimisation domain where the raw component scales
#            are incommensurate (see the domain adapters).
ComponentScaling = str
COMPONENT_SCALINGS = ("raw", "rank")

# Under "rank" scaling the novelty rank enters at half strength. At equal
# strength the most-novel individuals displace the best-quality ones from
# the elite slots and the quality ratchet breaks; at half strength the top
# quality rank (1.0) always outranks any pure explorer (<= 0.5 + quality),
# which keeps convergence while novelty still shapes tournaments.
RANK_NOVELTY_WEIGHT = 0.5


@dataclass
class SolutionMetrics:
    """Per-candidate evaluation record.

    ``base_quality`` is the goal-directed component (1/dist style, already
    guarded against division by zero by the domain adapter); ``raw_objective``
    is the unnormalised quantity being minimised (distance to goal, or the
    benchmark function value). ``novelty_score`` is filled in by the engine
    once the whole generation is known.
    """

    behavior: tuple[float, ...]
    base_quality: float
    raw_objective: float
    success: bool
    novelty_score: float = 0.0

    def __post_init__(self) -> None:
        if self.base_quality < 0:
            raise ValueError("base_quality must be nonnegative")


def objective_score(objective: Genome | Sequence[float], metrics: SolutionMetrics) -> float:
    """Score a solution under one candidate objective function (weight pair)."""
    a, b = objective.genes if isinstance(objective, Genome) else objective
    return a * metrics.base_quality + b * metrics.novelty_score


def _component_matrix(
    metrics: Sequence[SolutionMetrics], scaling: ComponentScaling
) -> np.ndarray:
    """(n, 2) array of the per-solution (quality, novelty) mix inputs."""
    quality = np.array([m.base_quality for m in metrics], dtype=np.float64)
    nov = np.array([m.novelty_score for m in metrics], dtype=np.float64)
    if scaling == "raw":
        return np.column_stack([quality, nov])
    if scaling == "rank":
        n = len(metrics)
        return np.column_stack(
            [
                rankdata(quality, method="average") / n,
                RANK_NOVELTY_WEIGHT * rankdata(nov, method="average") / n,
            ]
        )
    raise ValueError(f"unknown component scaling {scaling!r}; valid: {COMPONENT_SCALINGS}")


def solutions_fitness(
    metrics: Sequence[SolutionMetrics],
    objectives: Sequence[Genome],
    scaling: ComponentScaling = "raw",
) -> list[float]:
    """Each solution's fitness: the max score over all candidate objectives.

    Metrics are computed once per solution by the caller; this is a pure
    (n x 2) @ (2 x m) product followed by a row-wise max.
    """
    if len(objectives) == 0:
        raise ValueError("objective population must be nonempty")
    comp = _component_matrix(metrics, scaling)
    weights = np.array([o.genes for o in objectives], dtype=np.float64)
    scores = comp @ weights.T
    return [float(s) for s in scores.max(axis=1)]


def objective_attachment(
    metrics: Sequence[SolutionMetrics],
    objectives: Sequence[Genome],
    scaling: ComponentScaling = "raw",
) -> list[int]:
    """Index of the objective function giving each solution its fitness
    (ties to the lowest index)."""
    if len(objectives) == 0:
        raise ValueError("objective population must be nonempty")
    comp = _component_matrix(metrics, scaling)
    weights = np.array([o.genes for o in objectives], dtype=np.float64)
    scores = comp @ weights.T
    return [int(i) for i in scores.argmax(axis=1)]


def objectives_fitness(
    objectives: Sequence[Genome],
    objective_archive: NoveltyArchive,
    k: int = DEFAULT_K,
) -> list[float]:
    """Genotypic novelty of each weight pair against cohort plus archive.

    The weight pair itself is the behaviour point; the archive is updated
    in place with this generation's points.
    """
    if len(objectives) == 0:
        raise ValueError("objective population must be nonempty")
    behaviors = [o.genes for o in objectives]
    return generation_update(behaviors, objective_archive, k=k)


@dataclass
class SafeState:
    solutions: list[Genome]
    objectives: list[Genome]
    solution_archive: NoveltyArchive
    objective_archive: NoveltyArchive
    generation: int = 0


def initial_state(
    solution_bounds,
    rng: RngStream,
    solution_count: int = 200,
    objective_count: int = 200,
    archive_capacity: int = DEFAULT_ARCHIVE_CAPACITY,
) -> SafeState:
    """Fresh random populations and empty archives. Solutions are drawn
    before objectives, pinning the stream order."""
    solutions = random_population(solution_count, solution_bounds, rng)
    objectives = random_population(objective_count, OBJECTIVE_BOUNDS, rng)
    return SafeState(
        solutions=solutions,
        objectives=objectives,
        solution_archive=NoveltyArchive(archive_capacity),
        objective_archive=NoveltyArchive(archive_capacity),
        generation=0,
    )


@dataclass
class SafeGenerationResult:
    """One evaluated-and-bred generation: the successor state plus the
    evaluation artefacts of the state that was just scored."""

    state: SafeState
    metrics: list[SolutionMetrics]
    solution_fitness: list[float]
    objective_fitness: list[float]


def safe_generation(
    state: SafeState,
    evaluate: Callable[[Sequence[Genome]], list[SolutionMetrics]],
    solution_params: EvoParams,
    objective_params: EvoParams,
    rng: RngStream,
    k: int = DEFAULT_K,
    scaling: ComponentScaling = "raw",
) -> SafeGenerationResult:
    """Advance both populations by one generation.

    In order: (1) evaluate every solution once, (2) score phenotypic
    novelty against the solution archive, (3) assign solution fitness as
    the max over the current objective population, (4) assign objective
    fitness as genotypic novelty, (5) breed both populations independently
    (solutions first). Archives are mutated in place.
    """
    metrics = evaluate(state.solutions)
    if len(metrics) != len(state.solutions):
        raise ValueError("evaluation hook returned a wrong-sized metrics list")
    nov = generation_update(
        [m.behavior for m in metrics], state.solution_archive, k=k
    )
    for m, s in zip(metrics, nov):
        m.novelty_score = s
    sol_fit = solutions_fitness(metrics, state.objectives, scaling=scaling)
    obj_fit = objectives_fitness(state.objectives, state.objective_archive, k=k)
    new_solutions = next_generation(state.solutions, sol_fit, solution_params, rng)
    new_objectives = next_generation(state.objectives, obj_fit, objective_params, rng)
    new_state = SafeState(
        solutions=new_solutions,
        objectives=new_objectives,
        solution_archive=state.solution_archive,
        objective_archive=state.objective_archive,
        generation=state.generation + 1,
    )
    return SafeGenerationResult(
        state=new_state,
        metrics=metrics,
        solution_fitness=sol_fit,
        objective_fitness=obj_fit,
    )
