"""Behaviour-space novelty scoring.

A point's novelty is the average Euclidean distance to its k nearest
neighbours among the current cohort and a fixed-capacity archive of
historically novel points. The archive fills unconditionally up to its
capacity; afterwards a new point enters only by strictly exceeding the
current minimum emergence-time score, evicting one minimum entry.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

DEFAULT_K = 15
DEFAULT_ARCHIVE_CAPACITY = 1000

BehaviorPoint = tuple[float, ...]


@dataclass
class NoveltyParams:
    k: int = DEFAULT_K

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass
class ArchiveEntry:
    point: BehaviorPoint
    emergence_score: float
    order: int  # insertion sequence number, breaks eviction ties


class NoveltyArchive:
    """Fixed-capacity store of behaviour points with emergence-time scores."""

    def __init__(self, capacity: int = DEFAULT_ARCHIVE_CAPACITY):
        if capacity < 1:
            raise ValueError("archive capacity must be positive")
        self.capacity = capacity
        self.entries: list[ArchiveEntry] = []
        self._dim: int | None = None
        self._next_order = 0
        self._min_index: int | None = None  # index of earliest minimum entry

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def min_score(self) -> float | None:
        if self._min_index is None:
            return None
        return self.entries[self._min_index].emergence_score

    def _check_dim(self, point: Sequence[float]) -> BehaviorPoint:
        pt = tuple(float(c) for c in point)
        if self._dim is None:
            self._dim = len(pt)
        elif len(pt) != self._dim:
            raise ValueError(
                f"behaviour point has dimension {len(pt)}, archive holds {self._dim}"
            )
        return pt

    def _rescan_min(self) -> None:
        best = 0
        for i, e in enumerate(self.entries):
            if e.emergence_score < self.entries[best].emergence_score or (
                e.emergence_score == self.entries[best].emergence_score
                and e.order < self.entries[best].order
            ):
                best = i
        self._min_index = best

    def offer(self, point: Sequence[float], score: float) -> bool:
        """Offer a scored point; returns True if it entered the archive.

        Below capacity every offer is accepted. Once full, the point must
        strictly exceed the current minimum emergence score; it then
        replaces the earliest-inserted minimum entry.
        """
        if score < 0:
            raise ValueError("emergence score must be nonnegative")
        pt = self._check_dim(point)
        entry = ArchiveEntry(pt, float(score), self._next_order)
        if len(self.entries) < self.capacity:
            self.entries.append(entry)
            self._next_order += 1
            if self._min_index is None or (
                score < self.entries[self._min_index].emergence_score
            ):
                self._min_index = len(self.entries) - 1
            return True
        assert self._min_index is not None
        if score > self.entries[self._min_index].emergence_score:
            self.entries[self._min_index] = entry
            self._next_order += 1
            self._rescan_min()
            return True
        return False

    def points_array(self) -> np.ndarray:
        """All archived points as one (m, d) float array; (0, 0) when empty."""
        if not self.entries:
            return np.empty((0, 0), dtype=np.float64)
        return np.array([e.point for e in self.entries], dtype=np.float64)

    def dump_csv(self, path) -> None:
        """Write entries as coordinate columns plus an emergence_score column."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            dim = self._dim or 0
            writer.writerow([f"c{i}" for i in range(dim)] + ["emergence_score"])
            for e in self.entries:
                writer.writerow([repr(c) for c in e.point] + [repr(e.emergence_score)])

    @classmethod
    def load_csv(cls, path, capacity: int = DEFAULT_ARCHIVE_CAPACITY) -> "NoveltyArchive":
        """Rebuild an archive dump; insertion order follows row order."""
        archive = cls(capacity)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or header[-1] != "emergence_score":
                raise ValueError(f"{path}: not an archive dump")
            for row in reader:
                point = tuple(float(c) for c in row[:-1])
                archive.offer(point, float(row[-1]))
        return archive


def knn_novelty(
    point: Sequence[float],
    cohort: Iterable[Sequence[float]],
    archive: NoveltyArchive | None = None,
    k: int = DEFAULT_K,
) -> float:
    """Mean Euclidean distance from ``point`` to its k nearest neighbours.

    Neighbours are the cohort points plus the archive contents; the caller
    must already have excluded the point itself from the cohort. With fewer
    than k neighbours the mean runs over all of them; no neighbours at all
    scores 0.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    p = np.asarray(point, dtype=np.float64)
    rows = [np.asarray(c, dtype=np.float64) for c in cohort]
    if archive is not None and len(archive) > 0:
        rows.extend(archive.points_array())
    if not rows:
        return 0.0
    for r in rows:
        if r.shape != p.shape:
            raise ValueError(
                f"dimension mismatch: point has {p.shape[0]}, neighbour has {r.shape[0]}"
            )
    dists = np.linalg.norm(np.stack(rows) - p, axis=1)
    k_eff = min(k, dists.shape[0])
    return float(np.mean(np.partition(dists, k_eff - 1)[:k_eff]))


def generation_update(
    behaviors: Sequence[Sequence[float]],
    archive: NoveltyArchive,
    k: int = DEFAULT_K,
) -> list[float]:
    """Score one generation's behaviours and feed them to the archive.

    Every individual is scored against (population minus itself) plus the
    archive as it stood at the start of the call, so within-generation
    ordering cannot change anyone's score. The scored points are then
    offered to the archive in population order. The archive is mutated in
    place; the per-individual scores are returned.
    """
    if len(behaviors) == 0:
        raise ValueError("cannot score an empty generation")
    pop = np.asarray(behaviors, dtype=np.float64)
    if pop.ndim != 2:
        raise ValueError("behaviours must share one fixed dimension")
    n = pop.shape[0]
    dists = cdist(pop, pop)
    np.fill_diagonal(dists, np.inf)
    if len(archive) > 0:
        arch = archive.points_array()
        if arch.shape[1] != pop.shape[1]:
            raise ValueError(
                f"dimension mismatch: behaviours have {pop.shape[1]}, "
                f"archive holds {arch.shape[1]}"
            )
        dists = np.hstack([dists, cdist(pop, arch)])
    available = dists.shape[1] - 1  # the diagonal inf never counts
    scores: list[float]
    if available == 0:
        scores = [0.0] * n
    else:
        k_eff = min(k, available)
        part = np.partition(dists, k_eff - 1, axis=1)[:, :k_eff]
        scores = [float(s) for s in part.mean(axis=1)]
    for point, score in zip(pop, scores):
        archive.offer(tuple(float(c) for c in point), score)
    return scores
