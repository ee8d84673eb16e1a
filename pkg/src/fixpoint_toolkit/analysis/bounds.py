"""Error bounds from the rate comparison between the two-step scheme and Picard-Mann.

All three bounds are products over k = 0..n of per-index factors built from
δ and the schedule. On a linear map T(x) = δx they are attained exactly.
"""
from dataclasses import dataclass

from ..schemes.schedules import ScheduleSpec, StepParams
from ..schemes.types import SchemeKind


@dataclass(frozen=True)
class BoundInputs:
    delta: float
    sched: ScheduleSpec
    initial_err: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0,1), got {self.delta}")
        if self.initial_err < 0:
            raise ValueError("Initial error cannot be negative")
        if self.n < 0:
            raise ValueError("n cannot be negative")


def _damping(value: float, delta: float) -> float:
    return 1 - value * (1 - delta)


def new_scheme_bound(inp: BoundInputs) -> float:
    """δ^{2(n+1)} · Π_k (1−α_k(1−δ))(1−β_k(1−δ)) · ‖x_0 − p‖."""
    delta = inp.delta
    product = 1.0
    for k in range(inp.n + 1):
        product *= _damping(inp.sched.alpha(k), delta) * _damping(inp.sched.beta(k), delta)
    return delta ** (2 * (inp.n + 1)) * product * inp.initial_err


def picard_mann_bound(inp: BoundInputs) -> float:
    """δ^{n+1} · Π_k (1−α_k(1−δ)) · ‖u_0 − p‖."""
    delta = inp.delta
    product = 1.0
    for k in range(inp.n + 1):
        product *= _damping(inp.sched.alpha(k), delta)
    return delta ** (inp.n + 1) * product * inp.initial_err


def bound_ratio(inp: BoundInputs) -> float:
    """δ^{n+1} · Π_k (1−β_k(1−δ)), the quotient of the two bounds above."""
    delta = inp.delta
    product = 1.0
    for k in range(inp.n + 1):
        product *= _damping(inp.sched.beta(k), delta)
    return delta ** (inp.n + 1) * product


def scheme_contraction_factor(kind: SchemeKind, delta: float, params: StepParams) -> float:
    """One-step error factor |x_{n+1}| / |x_n| of a scheme on T(x) = δx.

    Args:
        kind: Scheme.
        delta: Slope of the linear map, in (0,1).
        params: (α, β, γ) at the index of the step.

    Returns:
        The factor, which is also the asymptotic per-step rate of the
        scheme on any smooth map whose derivative at p equals δ.
    """
    alpha, beta, gamma = params
    if kind == SchemeKind.PICARD:
        return delta
    if kind == SchemeKind.MANN:
        return _damping(alpha, delta)
    if kind == SchemeKind.ISHIKAWA:
        return (1 - alpha) + alpha * delta * _damping(beta, delta)
    if kind == SchemeKind.PICARD_MANN:
        return delta * _damping(alpha, delta)
    if kind == SchemeKind.SP:
        return _damping(gamma, delta) * _damping(beta, delta) * _damping(alpha, delta)
    inner = (1 - beta) * delta + beta * delta * _damping(gamma, delta)
    if kind == SchemeKind.CR:
        return inner * _damping(alpha, delta)
    if kind == SchemeKind.PICARD_S:
        return delta * inner
    if kind == SchemeKind.NEW_TWO_STEP:
        return delta ** 2 * _damping(alpha, delta) * _damping(beta, delta)
    raise ValueError(f"Unsupported scheme: {kind}")
