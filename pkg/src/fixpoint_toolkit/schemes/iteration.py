from dataclasses import dataclass, field
from typing import List, Optional
import logging

from .schedules import ScheduleSpec, StepParams
from .spaces import DIVERGENCE_NORM, DomainViolationError, Point, SelfMap, is_finite, norm
from .types import SchemeKind, StopReason

logger = logging.getLogger(__name__)


def _mix(a: float, x: Point, y: Point) -> Point:
    # (1−a)·x + a·y written literally so a=0 and a=1 are exact
    return (1 - a) * x + a * y


def _check_params(kind: SchemeKind, params: StepParams) -> None:
    for name in kind.consumes:
        value = getattr(params, name)
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{kind.value}: {name} must lie in [0,1], got {value}")


def step(kind: SchemeKind, x: Point, T: SelfMap, params: StepParams, n: int = 0) -> Point:
    """Apply one update of the given scheme.

    Args:
        kind: Which of the eight schemes to apply.
        x: Current iterate, inside T's domain.
        T: The self-map.
        params: (α_n, β_n, γ_n) for this index; unused entries are ignored.
        n: Iteration index, only used in error messages.

    Returns:
        The next iterate.

    Raises:
        DomainViolationError: If a finite result leaves T's domain.
        ValueError: If a consumed parameter lies outside [0,1].
    """
    _check_params(kind, params)
    alpha, beta, gamma = params

    if kind == SchemeKind.PICARD:
        x_next = T(x)
    elif kind == SchemeKind.MANN:
        x_next = _mix(alpha, x, T(x))
    elif kind == SchemeKind.ISHIKAWA:
        v = _mix(beta, x, T(x))
        x_next = _mix(alpha, x, T(v))
    elif kind == SchemeKind.PICARD_MANN:
        y = _mix(alpha, x, T(x))
        x_next = T(y)
    elif kind == SchemeKind.SP:
        z = _mix(gamma, x, T(x))
        y = _mix(beta, z, T(z))
        x_next = _mix(alpha, y, T(y))
    elif kind == SchemeKind.CR:
        tx = T(x)
        z = _mix(gamma, x, tx)
        y = _mix(beta, tx, T(z))
        x_next = _mix(alpha, y, T(y))
    elif kind == SchemeKind.PICARD_S:
        tx = T(x)
        z = _mix(gamma, x, tx)
        y = _mix(beta, tx, T(z))
        x_next = T(y)
    elif kind == SchemeKind.NEW_TWO_STEP:
        y = T(_mix(beta, x, T(x)))
        x_next = T(_mix(alpha, y, T(y)))
    else:
        raise ValueError(f"Unsupported scheme: {kind}")

    # non-finite values are left to the divergence guard in iterate()
    if is_finite(x_next) and not T.domain.contains(x_next):
        raise DomainViolationError(
            f"{kind.value} step at index {n} left the domain of {T.name}: {x_next!r}"
        )
    return x_next


@dataclass(frozen=True)
class IterationRecord:
    n: int
    x: Point
    err: Optional[float]
    residual: float


@dataclass
class IterationTrace:
    """Every iterate of one run, indexed consecutively from 0."""
    scheme: SchemeKind
    map_name: str
    fixed_point: Optional[Point]
    records: List[IterationRecord] = field(default_factory=list)
    stop_reason: Optional[StopReason] = None
    self_map: Optional[SelfMap] = field(default=None, repr=False, compare=False)

    @property
    def converged(self) -> bool:
        return self.stop_reason == StopReason.TOLERANCE

    @property
    def final(self) -> IterationRecord:
        if not self.records:
            raise ValueError("Trace has no records")
        return self.records[-1]

    @property
    def iterations(self) -> int:
        return self.final.n

    def errors(self) -> List[Optional[float]]:
        return [record.err for record in self.records]

    def residuals(self) -> List[float]:
        return [record.residual for record in self.records]


def iterate(
    kind: SchemeKind,
    T: SelfMap,
    x0: Point,
    sched: ScheduleSpec,
    tol: float,
    max_iter: int,
    stop_on_tol: bool = True,
) -> IterationTrace:
    """Run a scheme from x0 until tolerance, max_iter, or divergence.

    The run stops at the first index n where ‖x_n − Tx_n‖ ≤ tol, or where
    ‖x_n − p‖ ≤ tol when T has a known fixed point p. Both quantities are
    recorded for every iterate. A non-finite iterate or a norm above
    DIVERGENCE_NORM ends the run with StopReason.DIVERGENCE instead of
    raising.

    Args:
        kind: Scheme to run.
        T: The self-map.
        x0: Starting point inside T's domain.
        sched: Control sequences, read at index n for the step from x_n.
        tol: Positive stopping tolerance.
        max_iter: Maximum number of steps (at least 1).
        stop_on_tol: If False, run all max_iter steps regardless of tol.

    Returns:
        IterationTrace holding records n = 0..N.

    Raises:
        ValueError: If tol or max_iter are invalid or x0 is outside the domain.
    """
    if tol <= 0:
        raise ValueError("Tolerance must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if is_finite(x0) and not T.domain.contains(x0):
        raise DomainViolationError(f"Starting point {x0!r} is outside the domain of {T.name}")

    p = T.known_fixed_point
    trace = IterationTrace(scheme=kind, map_name=T.name, fixed_point=p, self_map=T)
    x = x0
    for n in range(max_iter + 1):
        if not is_finite(x) or norm(x) > DIVERGENCE_NORM:
            trace.records.append(IterationRecord(n, x, None if p is None else norm(x - p), float("nan")))
            trace.stop_reason = StopReason.DIVERGENCE
            break
        residual = norm(x - T(x))
        err = None if p is None else norm(x - p)
        trace.records.append(IterationRecord(n, x, err, residual))
        if not is_finite(residual):
            trace.stop_reason = StopReason.DIVERGENCE
            break
        if stop_on_tol and (residual <= tol or (err is not None and err <= tol)):
            trace.stop_reason = StopReason.TOLERANCE
            break
        if n == max_iter:
            trace.stop_reason = StopReason.MAX_ITER
            break
        x = step(kind, x, T, sched.params(n), n)

    if not stop_on_tol and trace.stop_reason == StopReason.MAX_ITER:
        final = trace.final
        if final.residual <= tol or (final.err is not None and final.err <= tol):
            trace.stop_reason = StopReason.TOLERANCE

    logger.debug("%s on %s stopped at n=%d: %s", kind.value, T.name,
                 trace.iterations, trace.stop_reason.name)
    return trace
