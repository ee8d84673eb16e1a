from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple
import logging
import math

import numpy as np

from ..schemes.iteration import step
from ..schemes.schedules import ScheduleSpec
from ..schemes.spaces import DIVERGENCE_NORM, Point, SelfMap, is_finite, norm
from ..schemes.types import SchemeKind

logger = logging.getLogger(__name__)

TAIL_FRACTION = 0.2
TAIL_TOLERANCE = 1e-5
RELATIVE_TAIL_TOLERANCE = 1e-4


class PerturbationKind(Enum):
    DECAYING = "decaying"  # c/(n+1)^q, q > 1
    CONSTANT = "constant"  # c
    NOISE = "noise"        # c·U(−1, 1), seeded


@dataclass(frozen=True)
class PerturbationSpec:
    kind: PerturbationKind
    c: float
    q: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("Perturbation amplitude c cannot be negative")
        if self.kind == PerturbationKind.DECAYING and self.q <= 1:
            raise ValueError("Decaying perturbations need q > 1")

    def sequence(self, horizon: int, like: Point) -> List[Point]:
        """The additive perturbations e_0..e_{horizon−1}, shaped like `like`."""
        shape = like.shape if isinstance(like, np.ndarray) else None
        if self.kind == PerturbationKind.NOISE:
            rng = np.random.default_rng(self.seed)
            draws = rng.uniform(-1.0, 1.0, size=(horizon,) + (shape or ()))
            return [self.c * (d if shape else float(d)) for d in draws]
        values = []
        for n in range(horizon):
            if self.kind == PerturbationKind.DECAYING:
                amplitude = self.c / (n + 1) ** self.q
            else:
                amplitude = self.c
            values.append(np.full(shape, amplitude) if shape else amplitude)
        return values


class StabilityRecord(NamedTuple):
    n: int
    z: Point
    eps: float
    err: float


@dataclass
class StabilityReport:
    """Perturbed two-step run z_{n+1} = f(T, z_n) + e_n and its tail verdicts.

    Verdicts are read from the last 20% of the records only. eps_to_zero and
    z_to_p are the two pieces of evidence (tail maximum at or below
    tail_threshold, the larger of the absolute tail_tolerance and
    relative_tolerance·‖z_0 − p‖); verdict_forward and verdict_converse
    both require them together, and `consistent` says the two limits agree,
    which is what stability predicts in either direction.
    """
    perturbation: PerturbationSpec
    z_trace: List[StabilityRecord] = field(default_factory=list)
    tail_fraction: float = TAIL_FRACTION
    tail_tolerance: float = TAIL_TOLERANCE
    relative_tolerance: float = RELATIVE_TAIL_TOLERANCE
    initial_err: float = float("nan")
    eps_tail_max: float = float("nan")
    err_tail_max: float = float("nan")
    err_tail_min: float = float("nan")
    diverged: bool = False

    @property
    def tail_threshold(self) -> float:
        # tail err settles near ε/(1 − k) for a one-step factor k, not at ε
        scaled = self.relative_tolerance * self.initial_err
        if not math.isfinite(scaled):
            return self.tail_tolerance
        return max(self.tail_tolerance, scaled)

    @property
    def eps_to_zero(self) -> bool:
        return self.eps_tail_max <= self.tail_threshold

    @property
    def z_to_p(self) -> bool:
        return self.err_tail_max <= self.tail_threshold

    @property
    def verdict_forward(self) -> bool:
        return self.eps_to_zero and self.z_to_p

    @property
    def verdict_converse(self) -> bool:
        return self.z_to_p and self.eps_to_zero

    @property
    def consistent(self) -> bool:
        return self.eps_to_zero == self.z_to_p


def stability_experiment(
    T: SelfMap,
    x0: Point,
    sched: ScheduleSpec,
    pert: PerturbationSpec,
    horizon: int,
) -> StabilityReport:
    """Measure T-stability of the two-step scheme with a controlled perturbation.

    Args:
        T: Self-map with a known fixed point p.
        x0: z_0.
        sched: Control sequences of the exact update f(T, ·).
        pert: Perturbation family.
        horizon: Number of perturbed steps, at least 20.

    Returns:
        StabilityReport with records (n, z_n, ε_n, ‖z_n − p‖) for
        n = 0..horizon−1, where ε_n = ‖z_{n+1} − f(T, z_n)‖.
    """
    if horizon < 20:
        raise ValueError("Horizon must be at least 20")
    p = T.known_fixed_point
    if p is None:
        raise ValueError(f"{T.name} has no known fixed point; stability needs ‖z_n − p‖")

    report = StabilityReport(perturbation=pert, initial_err=norm(x0 - p))
    perturbations = pert.sequence(horizon, x0)
    z = x0
    for n in range(horizon):
        exact = step(SchemeKind.NEW_TWO_STEP, z, T, sched.params(n), n)
        z_next = exact + perturbations[n]
        eps = norm(z_next - exact)
        report.z_trace.append(StabilityRecord(n, z, eps, norm(z - p)))
        if not is_finite(z_next) or norm(z_next) > DIVERGENCE_NORM:
            report.diverged = True
            logger.warning("Perturbed run on %s diverged at n=%d", T.name, n)
            break
        z = z_next

    tail_start = int(len(report.z_trace) * (1 - report.tail_fraction))
    tail = report.z_trace[tail_start:]
    report.eps_tail_max = max(record.eps for record in tail)
    report.err_tail_max = max(record.err for record in tail)
    report.err_tail_min = min(record.err for record in tail)
    if report.diverged:
        report.err_tail_max = float("inf")
    logger.info("Stability on %s with %s c=%g: ε→0 %s, z→p %s", T.name,
                pert.kind.value, pert.c, report.eps_to_zero, report.z_to_p)
    return report


def check_stability_recursion(
    report: StabilityReport, delta: float, sched: ScheduleSpec
) -> Tuple[bool, Optional[int]]:
    """Check ‖z_{n+1}−p‖ ≤ (1−α_n(1−δ))(1−β_n(1−δ))‖z_n−p‖ + ε_n along a run.

    Returns:
        (holds, first violating index or None).
    """
    records = report.z_trace
    for current, following in zip(records, records[1:]):
        n = current.n
        factor = (1 - sched.alpha(n) * (1 - delta)) * (1 - sched.beta(n) * (1 - delta))
        bound = factor * current.err + current.eps
        if following.err > bound + 1e-12 * (1 + bound):
            return False, n
    return True, None
