"""Real-parameter benchmark functions over x_i in [-100, 100].

Three classic minimisation landscapes in their raw (unrotated, unshifted)
forms: Rastrigin, Rosenbrock and Cigar. The global optimum value is 0 for
all three.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

FUNCTION_LOW = -100.0
FUNCTION_HIGH = 100.0


def _as_vector(x: Sequence[float] | np.ndarray, min_dim: int, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} expects a 1-D point, got shape {v.shape}")
    if v.shape[0] < min_dim:
        raise ValueError(f"{name} needs dimension >= {min_dim}, got {v.shape[0]}")
    return v


def rastrigin(x: Sequence[float] | np.ndarray) -> float:
    """sum_i (x_i^2 - 10*cos(2*pi*x_i) + 10); minimum 0 at the origin."""
    v = _as_vector(x, 1, "rastrigin")
    return float(np.sum(v * v - 10.0 * np.cos(2.0 * np.pi * v) + 10.0))


def rosenbrock(x: Sequence[float] | np.ndarray) -> float:
    """sum_{i<D} (100*(x_i^2 - x_{i+1})^2 + (x_i - 1)^2); minimum 0 at all-ones."""
    v = _as_vector(x, 2, "rosenbrock")
    head, tail = v[:-1], v[1:]
    return float(np.sum(100.0 * (head * head - tail) ** 2 + (head - 1.0) ** 2))


def cigar(x: Sequence[float] | np.ndarray) -> float:
    """x_1^2 + 1e6 * sum_{i>=2} x_i^2; minimum 0 at the origin."""
    v = _as_vector(x, 2, "cigar")
    return float(v[0] * v[0] + 1.0e6 * np.sum(v[1:] * v[1:]))


FUNCTIONS = {
    "rastrigin": rastrigin,
    "rosenbrock": rosenbrock,
    "cigar": cigar,
}


def evaluate(name: str, x: Sequence[float] | np.ndarray) -> float:
    """Dispatch to a benchmark function by its lowercase identifier."""
    try:
        fn = FUNCTIONS[name]
    except KeyError:
        valid = ", ".join(sorted(FUNCTIONS))
        raise ValueError(f"unknown function {name!r}; valid names: {valid}") from None
    return fn(x)
