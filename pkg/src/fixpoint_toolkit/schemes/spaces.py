from dataclasses import dataclass, field
from typing import Callable, Optional, Union
import logging
import math

import numpy as np

from .types import DomainKind

logger = logging.getLogger(__name__)

# Scalars are plain floats; vectors and grid-function values are 1-D float arrays.
Point = Union[float, np.ndarray]

DIVERGENCE_NORM = 1e100


class DomainViolationError(ValueError):
    """A point produced by a map or a scheme lies outside the domain."""


def norm(x: Point) -> float:
    """Absolute value for scalars, max-norm for vectors and grid functions."""
    if isinstance(x, np.ndarray):
        if x.size == 0:
            return 0.0
        return float(np.max(np.abs(x)))
    return abs(float(x))


def is_finite(x: Point) -> bool:
    if isinstance(x, np.ndarray):
        return bool(np.all(np.isfinite(x)))
    return math.isfinite(x)


def as_point(value) -> Point:
    """Coerce user input (number, list, array) into a Point."""
    if isinstance(value, np.ndarray):
        return value.astype(float)
    if isinstance(value, (list, tuple)):
        return np.asarray(value, dtype=float)
    return float(value)


@dataclass(frozen=True)
class DomainSpec:
    """Closed convex domain: an interval, a box, or a grid-function space.

    For a grid-function space the bounds are per node and normally infinite.
    """
    kind: DomainKind
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape:
            raise ValueError("Lower and upper bounds must have the same shape")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError("Bounds cannot be NaN")
        if not np.all(lower < upper):
            raise ValueError("Every coordinate needs lo < hi")
        if self.kind == DomainKind.INTERVAL and lower.size != 1:
            raise ValueError("An interval has exactly one coordinate")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def interval(cls, lo: float, hi: float) -> "DomainSpec":
        return cls(DomainKind.INTERVAL, np.array([lo]), np.array([hi]))

    @classmethod
    def real_line(cls) -> "DomainSpec":
        return cls.interval(-math.inf, math.inf)

    @classmethod
    def box(cls, lower, upper) -> "DomainSpec":
        return cls(DomainKind.BOX, np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))

    @classmethod
    def grid_space(cls, nodes: int) -> "DomainSpec":
        return cls(DomainKind.GRID, np.full(nodes, -math.inf), np.full(nodes, math.inf))

    @property
    def dimension(self) -> int:
        return int(self.lower.size)

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def contains(self, x: Point) -> bool:
        if self.kind == DomainKind.INTERVAL:
            if isinstance(x, np.ndarray):
                return False
            return bool(self.lower[0] <= x <= self.upper[0])
        values = np.asarray(x, dtype=float)
        if values.shape != self.lower.shape:
            return False
        return bool(np.all(self.lower <= values) and np.all(values <= self.upper))

    def sample(self, rng: np.random.Generator, count: int) -> list:
        """Draw `count` points uniformly from a bounded domain."""
        if not self.bounded:
            raise ValueError("Cannot sample an unbounded domain")
        draws = rng.uniform(self.lower, self.upper, size=(count, self.dimension))
        if self.kind == DomainKind.INTERVAL:
            return [float(row[0]) for row in draws]
        return [row for row in draws]


@dataclass(frozen=True)
class SelfMap:
    """A pure self-map T: C → C with an optional known fixed point.

    Attributes:
        eval: The map itself. Must be re-entrant and deterministic.
        domain: The domain C the map is claimed to preserve.
        known_fixed_point: Fixed point p when it is known in closed form or
            from an independent solver.
        name: Label used in traces and reports.
    """
    eval: Callable[[Point], Point]
    domain: DomainSpec
    known_fixed_point: Optional[Point] = None
    name: str = "T"
    fixed_point_tolerance: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        p = self.known_fixed_point
        if p is None:
            return
        residual = norm(self.eval(p) - p)
        if not residual <= self.fixed_point_tolerance * (1 + norm(p)):
            raise ValueError(
                f"Declared fixed point of {self.name} is not fixed: ‖Tp − p‖ = {residual:.3e}"
            )

    def __call__(self, x: Point) -> Point:
        return self.eval(x)

    def check_maps_into_domain(self, samples: int = 1000, seed: int = 0) -> None:
        """Spot-check that sampled points of the domain are mapped into it.

        Raises:
            DomainViolationError: If some sampled image leaves the domain.
            ValueError: If the domain is unbounded.
        """
        rng = np.random.default_rng(seed)
        for x in self.domain.sample(rng, samples):
            image = self.eval(x)
            if not self.domain.contains(image):
                raise DomainViolationError(
                    f"{self.name} maps {x!r} to {image!r}, outside its domain"
                )
        logger.debug("%s maps %d sampled points into its domain", self.name, samples)
