"""Grid-maze world and the reactive robot controller that moves through it.

The world is a rectangular cell grid with walls, a start and a goal, under
taxicab geometry. The robot senses four wall distances and four goal
quadrant indicators, combines them linearly through a 16-weight controller
into a horizontal and a vertical drive value, and moves one cell per axis
per step (blocked moves are skipped). Simulation is deterministic; the
inner loop is JIT-compiled because experiment batches run millions of
rollouts.

Coordinates: ``col`` grows rightward, ``row`` grows downward, origin at the
top-left cell. "Up" therefore means decreasing row. The grid boundary
behaves exactly like a wall.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
from numba import njit

from .evolution import Genome, uniform_bounds

WALL = "#"
EMPTY = "."
START = "S"
GOAL = "G"

CONTROLLER_LENGTH = 16
CONTROLLER_BOUNDS = uniform_bounds(CONTROLLER_LENGTH, -1.0, 1.0)

DEFAULT_MAX_STEPS = 300
DEFAULT_STOP_DISTANCE = 2

BUNDLED_MAZES = ("maze1", "maze2")


class Position(NamedTuple):
    col: int
    row: int


class MazeParseError(ValueError):
    """Raised for malformed maze text; carries 1-based line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.column = column


def manhattan(p: Position, q: Position) -> int:
    """Taxicab distance: sum of absolute coordinate differences."""
    return abs(p.col - q.col) + abs(p.row - q.row)


@dataclass(eq=False)
class MazeGrid:
    """Occupancy grid plus start/goal, with cached per-cell wall distances.

    ``walls`` is a (height, width) boolean array indexed [row, col]. The
    distance fields hold, for every cell, the number of consecutive empty
    cells between it and the first wall or boundary in each direction; they
    are derived once here and shared by every simulation on this grid.
    """

    width: int
    height: int
    walls: np.ndarray
    start: Position
    goal: Position

    def __post_init__(self) -> None:
        self.walls = np.ascontiguousarray(self.walls, dtype=np.bool_)
        if self.walls.shape != (self.height, self.width):
            raise ValueError(
                f"walls shape {self.walls.shape} does not match "
                f"{self.height}x{self.width}"
            )
        for name, pos in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(pos):
                raise ValueError(f"{name} {pos} outside the grid")
            if self.walls[pos.row, pos.col]:
                raise ValueError(f"{name} {pos} sits on a wall")
        if self.start == self.goal:
            raise ValueError("start and goal must differ")
        self._dist_up, self._dist_down, self._dist_left, self._dist_right = (
            _distance_fields(self.walls)
        )

    def in_bounds(self, pos: Position) -> bool:
        return 0 <= pos.col < self.width and 0 <= pos.row < self.height

    def is_wall(self, pos: Position) -> bool:
        return bool(self.walls[pos.row, pos.col])

    def to_text(self) -> str:
        rows = []
        for r in range(self.height):
            chars = [WALL if self.walls[r, c] else EMPTY for c in range(self.width)]
            rows.append("".join(chars))
        out = [list(row) for row in rows]
        out[self.start.row][self.start.col] = START
        out[self.goal.row][self.goal.col] = GOAL
        return "\n".join("".join(row) for row in out) + "\n"


def _distance_fields(walls: np.ndarray):
    """Empty-cell run lengths from each cell to the nearest wall/boundary."""
    h, w = walls.shape
    up = np.zeros((h, w), dtype=np.int32)
    down = np.zeros((h, w), dtype=np.int32)
    left = np.zeros((h, w), dtype=np.int32)
    right = np.zeros((h, w), dtype=np.int32)
    for r in range(1, h):
        up[r] = np.where(walls[r - 1], 0, up[r - 1] + 1)
    for r in range(h - 2, -1, -1):
        down[r] = np.where(walls[r + 1], 0, down[r + 1] + 1)
    for c in range(1, w):
        left[:, c] = np.where(walls[:, c - 1], 0, left[:, c - 1] + 1)
    for c in range(w - 2, -1, -1):
        right[:, c] = np.where(walls[:, c + 1], 0, right[:, c + 1] + 1)
    return up, down, left, right


def parse_maze(text: str) -> MazeGrid:
    """Parse an ASCII maze: '#' wall, '.' empty, one 'S' start, one 'G' goal."""
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MazeParseError("empty maze description")
    width = len(lines[0])
    if width == 0:
        raise MazeParseError("empty first row", line=1)
    height = len(lines)
    walls = np.zeros((height, width), dtype=np.bool_)
    start: Position | None = None
    goal: Position | None = None
    for r, line in enumerate(lines):
        if len(line) != width:
            raise MazeParseError(
                f"row width {len(line)} differs from first row width {width}",
                line=r + 1,
            )
        for c, ch in enumerate(line):
            if ch == WALL:
                walls[r, c] = True
            elif ch == START:
                if start is not None:
                    raise MazeParseError("duplicate start cell", line=r + 1, column=c + 1)
                start = Position(c, r)
            elif ch == GOAL:
                if goal is not None:
                    raise MazeParseError("duplicate goal cell", line=r + 1, column=c + 1)
                goal = Position(c, r)
            elif ch != EMPTY:
                raise MazeParseError(f"unknown character {ch!r}", line=r + 1, column=c + 1)
    if start is None:
        raise MazeParseError("missing start cell 'S'")
    if goal is None:
        raise MazeParseError("missing goal cell 'G'")
    return MazeGrid(width=width, height=height, walls=walls, start=start, goal=goal)


def load_maze(source: str | Path) -> MazeGrid:
    """Load a maze from a file path or a bundled name ('maze1', 'maze2')."""
    name = str(source)
    if name in BUNDLED_MAZES:
        text = (resources.files(__package__) / "mazes" / f"{name}.txt").read_text()
        return parse_maze(text)
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(
            f"maze {name!r} is neither a file nor one of {', '.join(BUNDLED_MAZES)}"
        )
    return parse_maze(path.read_text())


class SensorReading(NamedTuple):
    dist_up: int
    dist_down: int
    dist_left: int
    dist_right: int
    goal_up: float
    goal_down: float
    goal_left: float
    goal_right: float


def sense(grid: MazeGrid, pos: Position) -> SensorReading:
    """Eight sensor values at ``pos``.

    Distance sensors count the empty cells between the robot and the first
    wall or boundary in each cardinal direction. Goal sensors are quadrant
    indicators readable through walls: the vertical one on the goal's side
    equals the maze height, the horizontal one equals the width, the other
    two are 0. When the goal shares the robot's row (or column) both
    indicators on that axis are 0.
    """
    pos = Position(*pos)
    if not grid.in_bounds(pos):
        raise ValueError(f"{pos} outside the grid")
    if grid.is_wall(pos):
        raise ValueError(f"{pos} is a wall cell")
    c, r = pos.col, pos.row
    return SensorReading(
        dist_up=int(grid._dist_up[r, c]),
        dist_down=int(grid._dist_down[r, c]),
        dist_left=int(grid._dist_left[r, c]),
        dist_right=int(grid._dist_right[r, c]),
        goal_up=float(grid.height) if grid.goal.row < r else 0.0,
        goal_down=float(grid.height) if grid.goal.row > r else 0.0,
        goal_left=float(grid.width) if grid.goal.col < c else 0.0,
        goal_right=float(grid.width) if grid.goal.col > c else 0.0,
    )


class DriveSignal(NamedTuple):
    h: float  # horizontal drive; >= 0 steers right
    v: float  # vertical drive; >= 0 steers down


def controller_weights(controller: Genome | Sequence[float]) -> np.ndarray:
    """Controller as a float array of the 16 weights, validated for length."""
    if isinstance(controller, Genome):
        w = controller.as_array()
    else:
        w = np.asarray(controller, dtype=np.float64)
    if w.shape != (CONTROLLER_LENGTH,):
        raise ValueError(f"controller must have {CONTROLLER_LENGTH} weights, got shape {w.shape}")
    return w


def compute_drive(reading: SensorReading, controller: Genome | Sequence[float]) -> DriveSignal:
    """Weighted sums of the sensors: weights 1-8 drive h, weights 9-16 drive v.

    Within each half the weights pair with the sensors in the order
    dist_right, goal_right, dist_left, goal_left, dist_down, goal_down,
    dist_up, goal_up.
    """
    w = controller_weights(controller)
    s = np.array(
        [
            reading.dist_right,
            reading.goal_right,
            reading.dist_left,
            reading.goal_left,
            reading.dist_down,
            reading.goal_down,
            reading.dist_up,
            reading.goal_up,
        ],
        dtype=np.float64,
    )
    return DriveSignal(h=float(w[:8] @ s), v=float(w[8:] @ s))


def step(grid: MazeGrid, pos: Position, controller: Genome | Sequence[float]) -> Position:
    """One movement step: horizontal move first, then vertical.

    Sensors are read once at ``pos``. h >= 0 attempts a move right, else
    left; v >= 0 attempts a move down, else up, with the vertical block
    check done from the post-horizontal cell. A blocked move is skipped.
    """
    pos = Position(*pos)
    drive = compute_drive(sense(grid, pos), controller)
    col, row = pos.col, pos.row
    nc = col + 1 if drive.h >= 0 else col - 1
    if 0 <= nc < grid.width and not grid.walls[row, nc]:
        col = nc
    nr = row + 1 if drive.v >= 0 else row - 1
    if 0 <= nr < grid.height and not grid.walls[nr, col]:
        row = nr
    return Position(col, row)


@dataclass
class Trajectory:
    path: tuple[Position, ...]
    endpoint: Position
    dist_to_goal: int
    steps_taken: int
    success: bool


def trajectory_to_csv(trajectory: Trajectory) -> str:
    """Path as CSV text of ordered (col, row) pairs."""
    lines = ["col,row"]
    lines.extend(f"{p.col},{p.row}" for p in trajectory.path)
    return "\n".join(lines) + "\n"


@njit(cache=True)
def _sim_kernel(
    walls,
    dist_up,
    dist_down,
    dist_left,
    dist_right,
    goal_col,
    goal_row,
    width_f,
    height_f,
    weights,
    col,
    row,
    max_steps,
    stop_distance,
    path,
    record_path,
):
    height, width = walls.shape
    steps = 0
    if record_path:
        path[0, 0] = col
        path[0, 1] = row
    dist = abs(col - goal_col) + abs(row - goal_row)
    if dist <= stop_distance:
        return col, row, dist, steps, True
    for t in range(max_steps):
        du = dist_up[row, col]
        dd = dist_down[row, col]
        dl = dist_left[row, col]
        dr = dist_right[row, col]
        gu = height_f if goal_row < row else 0.0
        gd = height_f if goal_row > row else 0.0
        gl = width_f if goal_col < col else 0.0
        gr = width_f if goal_col > col else 0.0
        h = (
            weights[0] * dr
            + weights[1] * gr
            + weights[2] * dl
            + weights[3] * gl
            + weights[4] * dd
            + weights[5] * gd
            + weights[6] * du
            + weights[7] * gu
        )
        v = (
            weights[8] * dr
            + weights[9] * gr
            + weights[10] * dl
            + weights[11] * gl
            + weights[12] * dd
            + weights[13] * gd
            + weights[14] * du
            + weights[15] * gu
        )
        if h >= 0.0:
            nc = col + 1
            if nc < width and not walls[row, nc]:
                col = nc
        else:
            nc = col - 1
            if nc >= 0 and not walls[row, nc]:
                col = nc
        if v >= 0.0:
            nr = row + 1
            if nr < height and not walls[nr, col]:
                row = nr
        else:
            nr = row - 1
            if nr >= 0 and not walls[nr, col]:
                row = nr
        steps = t + 1
        if record_path:
            path[steps, 0] = col
            path[steps, 1] = row
        dist = abs(col - goal_col) + abs(row - goal_row)
        if dist <= stop_distance:
            return col, row, dist, steps, True
    return col, row, dist, steps, False


@njit(cache=True)
def _sim_batch_kernel(
    walls,
    dist_up,
    dist_down,
    dist_left,
    dist_right,
    goal_col,
    goal_row,
    width_f,
    height_f,
    weight_rows,
    start_col,
    start_row,
    max_steps,
    stop_distance,
    out,
):
    dummy = np.empty((1, 2), dtype=np.int32)
    for i in range(weight_rows.shape[0]):
        col, row, dist, steps, ok = _sim_kernel(
            walls,
            dist_up,
            dist_down,
            dist_left,
            dist_right,
            goal_col,
            goal_row,
            width_f,
            height_f,
            weight_rows[i],
            start_col,
            start_row,
            max_steps,
            stop_distance,
            dummy,
            False,
        )
        out[i, 0] = col
        out[i, 1] = row
        out[i, 2] = dist
        out[i, 3] = steps
        out[i, 4] = 1 if ok else 0


def _kernel_args(grid: MazeGrid):
    return (
        grid.walls,
        grid._dist_up,
        grid._dist_down,
        grid._dist_left,
        grid._dist_right,
        grid.goal.col,
        grid.goal.row,
        float(grid.width),
        float(grid.height),
    )


def simulate(
    grid: MazeGrid,
    controller: Genome | Sequence[float],
    max_steps: int = DEFAULT_MAX_STEPS,
    stop_distance: int = DEFAULT_STOP_DISTANCE,
) -> Trajectory:
    """Run a controller from the start cell and record the full path.

    The rollout halts the first time the taxicab distance to the goal drops
    to ``stop_distance`` or below (that run counts as a success), otherwise
    after ``max_steps`` steps. Purely deterministic.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    w = controller_weights(controller)
    path = np.empty((max_steps + 1, 2), dtype=np.int32)
    col, row, dist, steps, ok = _sim_kernel(
        *_kernel_args(grid),
        w,
        grid.start.col,
        grid.start.row,
        max_steps,
        stop_distance,
        path,
        True,
    )
    points = tuple(Position(int(c), int(r)) for c, r in path[: steps + 1])
    return Trajectory(
        path=points,
        endpoint=Position(int(col), int(row)),
        dist_to_goal=int(dist),
        steps_taken=int(steps),
        success=bool(ok),
    )


def simulate_endpoint(
    grid: MazeGrid,
    controller: Genome | Sequence[float],
    max_steps: int = DEFAULT_MAX_STEPS,
    stop_distance: int = DEFAULT_STOP_DISTANCE,
) -> tuple[Position, int, int, bool]:
    """Like :func:`simulate` but skips path recording; returns
    (endpoint, dist_to_goal, steps_taken, success)."""
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    w = controller_weights(controller)
    dummy = np.empty((1, 2), dtype=np.int32)
    col, row, dist, steps, ok = _sim_kernel(
        *_kernel_args(grid),
        w,
        grid.start.col,
        grid.start.row,
        max_steps,
        stop_distance,
        dummy,
        False,
    )
    return Position(int(col), int(row)), int(dist), int(steps), bool(ok)


def simulate_batch(
    grid: MazeGrid,
    weight_rows: np.ndarray,
    max_steps: int = DEFAULT_MAX_STEPS,
    stop_distance: int = DEFAULT_STOP_DISTANCE,
) -> np.ndarray:
    """Roll out many controllers in one JIT call.

    ``weight_rows`` is (n, 16); returns an (n, 5) int array with columns
    end_col, end_row, dist_to_goal, steps_taken, success.
    """
    w = np.ascontiguousarray(weight_rows, dtype=np.float64)
    if w.ndim != 2 or w.shape[1] != CONTROLLER_LENGTH:
        raise ValueError(f"weight_rows must be (n, {CONTROLLER_LENGTH}), got {w.shape}")
    out = np.empty((w.shape[0], 5), dtype=np.int64)
    _sim_batch_kernel(
        *_kernel_args(grid),
        w,
        grid.start.col,
        grid.start.row,
        max_steps,
        stop_distance,
        out,
    )
    return out
