"""Coevolution of solutions and their objective functions, with novelty
search, a deceptive grid-maze domain and real-parameter benchmarks."""

from .benchmarks import cigar, evaluate, rastrigin, rosenbrock
from .coevolution import (
    OBJECTIVE_BOUNDS,
    SafeState,
    SolutionMetrics,
    objective_score,
    objectives_fitness,
    safe_generation,
    solutions_fitness,
)
from .evolution import (
    EvoParams,
    Genome,
    make_rng,
    mutate,
    next_generation,
    random_genome,
    random_population,
    single_point_crossover,
    spawn_seed,
    tournament_select,
    uniform_bounds,
)
from .maze import (
    CONTROLLER_BOUNDS,
    CONTROLLER_LENGTH,
    MazeGrid,
    MazeParseError,
    Position,
    Trajectory,
    load_maze,
    manhattan,
    parse_maze,
    sense,
    simulate,
    step,
)
from .novelty import NoveltyArchive, NoveltyParams, generation_update, knn_novelty
from .runners import (
    ALGORITHM_NAMES,
    DomainAdapter,
    DomainSpec,
    RunConfig,
    RunResult,
    run_algorithm,
    run_fixed_mix,
    run_novelty_search,
    run_random_search,
    run_safe,
    run_standard_ea,
)

__version__ = "0.1.0"
