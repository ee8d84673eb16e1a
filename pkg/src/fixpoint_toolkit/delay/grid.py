from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid as _scipy_cumulative_trapezoid

GRID_TOLERANCE = 1e-9


def steps_between(length: float, h: float, what: str) -> int:
    """Number of steps of size h in `length`, which must be a whole number."""
    ratio = length / h
    steps = int(round(ratio))
    if abs(ratio - steps) > GRID_TOLERANCE:
        raise ValueError(f"{what} = {length} is not an integer multiple of h = {h}")
    return steps


def cumulative_trapezoid(values: Sequence[float], h: float) -> np.ndarray:
    """Running composite-trapezoid integral over uniform nodes.

    output[0] = 0 and output[k] = output[k−1] + h·(values[k−1] + values[k])/2,
    summed left to right. Exact for affine integrands.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 1:
        raise ValueError("Need a one-dimensional array with at least one node")
    if values.size == 1:
        return np.zeros(1)
    return _scipy_cumulative_trapezoid(values, dx=h, initial=0)


@dataclass(frozen=True)
class GridFunction:
    """A function sampled on the uniform grid t_start = t0 − τ, ..., t_end = b.

    Attributes:
        t_start: First node, t0 − τ.
        t_end: Last node, b.
        h: Spacing; (t_end − t_start)/h and τ/h must be whole numbers.
        values: One value per node, both ends included.
        t0: Start of the integration interval; must be a node.
    """
    t_start: float
    t_end: float
    h: float
    values: np.ndarray
    t0: Optional[float] = None

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("Grid spacing must be positive")
        if self.t_end <= self.t_start:
            raise ValueError("Grid needs t_start < t_end")
        steps = steps_between(self.t_end - self.t_start, self.h, "t_end − t_start")
        values = np.asarray(self.values, dtype=float)
        if values.shape != (steps + 1,):
            raise ValueError(f"Expected {steps + 1} node values, got shape {values.shape}")
        t0 = self.t_start if self.t0 is None else self.t0
        steps_between(t0 - self.t_start, self.h, "τ")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "t0", float(t0))

    @classmethod
    def template(cls, t0: float, b: float, tau: float, h: float) -> "GridFunction":
        """All-zero grid function over [t0 − τ, b]."""
        steps = steps_between(b - (t0 - tau), h, "b − (t0 − τ)")
        steps_between(tau, h, "τ")
        return cls(t0 - tau, b, h, np.zeros(steps + 1), t0)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def delay_steps(self) -> int:
        """Index of t0, which is also τ/h."""
        return int(round((self.t0 - self.t_start) / self.h))

    @property
    def nodes(self) -> np.ndarray:
        nodes = np.linspace(self.t_start, self.t_end, self.size)
        nodes[self.delay_steps] = self.t0
        return nodes

    def norm(self) -> float:
        """Discrete Chebyshev norm: largest absolute node value."""
        return float(np.max(np.abs(self.values)))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.t_start, self.t_end, self.h, values, self.t0)
