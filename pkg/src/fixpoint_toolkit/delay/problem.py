from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, NamedTuple
import logging

import numpy as np

from .grid import cumulative_trapezoid

logger = logging.getLogger(__name__)

C4_SLACK = 1e-12


class HypothesisViolationError(ValueError):
    """A solvability hypothesis fails for a delay problem."""


def c5_value(delta: float, t0: float, b: float) -> float:
    return 2 * delta * (b - t0)


@dataclass(frozen=True)
class DelayProblem:
    """x′(t) = f(t, x(t), x(t − τ)) on [t0, b], with x = φ on [t0 − τ, t0].

    Attributes:
        t0: Start of the integration interval.
        b: End of the integration interval.
        tau: Positive delay.
        f: Right-hand side f(t, x, x_delayed). Must accept numpy arrays
            elementwise (all three arguments broadcast together).
        phi: History function on [t0 − τ, t0]; also evaluated elementwise.
        delta: Lipschitz-type constant of the C4 condition.
        L: Non-negative weight of the residual terms in C4.
        name: Label used in reports.

    Raises:
        ValueError: If t0 ≥ b, τ ≤ 0 or L < 0.
        HypothesisViolationError: If 2δ(b − t0) ≥ 1.
    """
    t0: float
    b: float
    tau: float
    f: Callable
    phi: Callable
    delta: float
    L: float = 0.0
    name: str = "delay-problem"

    def __post_init__(self):
        if not self.t0 < self.b:
            raise ValueError(f"Need t0 < b, got t0={self.t0}, b={self.b}")
        if self.tau <= 0:
            raise ValueError("Delay τ must be positive")
        if self.delta <= 0:
            raise ValueError("δ must be positive")
        if self.L < 0:
            raise ValueError("L cannot be negative")
        value = c5_value(self.delta, self.t0, self.b)
        if value >= 1:
            raise HypothesisViolationError(
                f"C5 violated: 2δ(b−t0) = 2·{self.delta:g}·{self.b - self.t0:g} = {value:g} ≥ 1"
            )

    def rhs(self, t, x, x_delayed) -> np.ndarray:
        """f evaluated elementwise, broadcast to the shape of t."""
        values = np.asarray(self.f(t, x, x_delayed), dtype=float)
        return np.broadcast_to(values, np.shape(t)).astype(float)

    def history(self, t) -> np.ndarray:
        values = np.asarray(self.phi(t), dtype=float)
        return np.broadcast_to(values, np.shape(t)).astype(float)


class ConditionStatus(Enum):
    VERIFIED = "verified"
    ASSERTED = "asserted-by-caller"
    VIOLATED = "violated"


class ConditionResult(NamedTuple):
    status: ConditionStatus
    evidence: float


@dataclass
class ConditionsReport:
    """Status and one evidence scalar for each of C1..C5."""
    conditions: Dict[str, ConditionResult] = field(default_factory=dict)

    def __getitem__(self, name: str) -> ConditionResult:
        return self.conditions[name]

    @property
    def all_hold(self) -> bool:
        return all(result.status != ConditionStatus.VIOLATED for result in self.conditions.values())

    def summary_lines(self) -> List[str]:
        return [f"{name}: {result.status.value} (evidence {result.evidence:.6g})"
                for name, result in self.conditions.items()]


def _probe_continuity(values: np.ndarray) -> ConditionResult:
    if not np.all(np.isfinite(values)):
        return ConditionResult(ConditionStatus.VIOLATED, float("inf"))
    jump = float(np.max(np.abs(np.diff(values, axis=-1)))) if values.shape[-1] > 1 else 0.0
    return ConditionResult(ConditionStatus.ASSERTED, jump)


def check_conditions(prob: DelayProblem, sample_count: int = 200, seed: int = 0,
                     radius: float = 2.0) -> ConditionsReport:
    """Check C1–C5 for a delay problem as far as finite evidence allows.

    C1 and C5 are arithmetic and always verified. C2 and C3 (continuity of f
    and φ) can only be probed: both are evaluated on a grid and reported as
    asserted by the caller, with the largest jump between neighbouring
    nodes as evidence. C4 is spot-checked on seeded tuples (t, x, y, u, v),
    with u and v taken as constant functions so the integral terms can be
    computed; evidence is the largest slack (≤ 0 when it holds).

    Args:
        prob: The delay problem.
        sample_count: Number of C4 tuples.
        seed: Seed of the C4 sampler.
        radius: x, y, u, v are drawn from [−radius, radius] around φ(t0).
    """
    report = ConditionsReport()
    report.conditions["C1"] = ConditionResult(ConditionStatus.VERIFIED, prob.tau)

    probe_t = np.linspace(prob.t0, prob.b, 65)
    probe_states = np.linspace(-radius, radius, 5) + float(prob.history(prob.t0))
    f_values = np.array([[prob.rhs(probe_t, x, y) for y in probe_states] for x in probe_states])
    report.conditions["C2"] = _probe_continuity(f_values)
    history_t = np.linspace(prob.t0 - prob.tau, prob.t0, 65)
    report.conditions["C3"] = _probe_continuity(prob.history(history_t))

    rng = np.random.default_rng(seed)
    phi_t0 = float(prob.history(prob.t0))
    worst = -np.inf
    for _ in range(sample_count):
        t = rng.uniform(prob.t0, prob.b)
        x, y, u, v = phi_t0 + rng.uniform(-radius, radius, size=4)
        integral = phi_t0
        if t > prob.t0:
            s = np.linspace(prob.t0, t, 33)
            integral += cumulative_trapezoid(prob.rhs(s, u, v), s[1] - s[0])[-1]
        lhs = abs(float(prob.rhs(t, x, y)) - float(prob.rhs(t, u, v)))
        rhs = prob.delta * (abs(x - u) + abs(y - v)) + prob.L * abs(integral - u) + abs(integral - v)
        worst = max(worst, lhs - rhs)
    c4_status = ConditionStatus.VERIFIED if worst <= C4_SLACK else ConditionStatus.VIOLATED
    report.conditions["C4"] = ConditionResult(c4_status, float(worst))

    # DelayProblem refuses 2δ(b−t0) ≥ 1 at construction, so C5 holds here
    report.conditions["C5"] = ConditionResult(
        ConditionStatus.VERIFIED, c5_value(prob.delta, prob.t0, prob.b)
    )

    logger.debug("Conditions for %s: %s", prob.name, "; ".join(report.summary_lines()))
    return report
