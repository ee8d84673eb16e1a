from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple
import logging
import math

from ..schemes.iteration import IterationTrace, iterate
from ..schemes.schedules import ScheduleSpec
from ..schemes.spaces import Point, SelfMap, norm
from ..schemes.types import SchemeKind

logger = logging.getLogger(__name__)

UNDEFINED_DENOMINATOR = 1e-300


@dataclass
class ComparisonReport:
    """Traces of several schemes run from the same start with the same schedule.

    Attributes:
        traces: One trace per requested scheme.
        iterations_to_tol: Index at which the tolerance was reached, or None
            when it was not (max_iter or divergence).
        ordering: Schemes sorted by iterations_to_tol (unreached last), then
            by final error (final residual when p is unknown), then by name.
    """
    traces: Dict[SchemeKind, IterationTrace]
    iterations_to_tol: Dict[SchemeKind, Optional[int]] = field(default_factory=dict)
    ordering: List[SchemeKind] = field(default_factory=list)

    def __post_init__(self):
        if not self.iterations_to_tol:
            self.iterations_to_tol = {
                kind: trace.iterations if trace.converged else None
                for kind, trace in self.traces.items()
            }
        if not self.ordering:
            self.ordering = sorted(self.traces, key=self._sort_key)

    def _sort_key(self, kind: SchemeKind) -> Tuple[float, float, str]:
        reached = self.iterations_to_tol[kind]
        final = self.traces[kind].final
        metric = final.err if final.err is not None else final.residual
        if metric is None or math.isnan(metric):
            metric = math.inf
        return (math.inf if reached is None else reached, metric, kind.value)

    def ordering_line(self) -> str:
        return " < ".join(kind.value for kind in self.ordering)


def compare_schemes(
    kinds: Sequence[SchemeKind],
    T: SelfMap,
    x0: Point,
    sched: ScheduleSpec,
    tol: float,
    max_iter: int,
    stop_on_tol: bool = True,
    max_workers: Optional[int] = None,
) -> ComparisonReport:
    """Run every requested scheme from the shared x0 and rank them.

    Args:
        kinds: Non-empty list of schemes; duplicates are ignored.
        T: The self-map.
        x0: Common starting point (u_0 = x_0 for every scheme).
        sched: Common control sequences.
        tol: Stopping tolerance.
        max_iter: Iteration cap.
        stop_on_tol: Passed through to iterate().
        max_workers: Run schemes on a thread pool of this size; None runs
            them one after another. The report does not depend on it.

    Returns:
        ComparisonReport with one trace per scheme.
    """
    unique = list(dict.fromkeys(kinds))
    if not unique:
        raise ValueError("At least one scheme is required")

    def run(kind: SchemeKind) -> IterationTrace:
        return iterate(kind, T, x0, sched, tol, max_iter, stop_on_tol=stop_on_tol)

    if max_workers is None:
        traces = [run(kind) for kind in unique]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            traces = list(pool.map(run, unique))

    report = ComparisonReport(traces=dict(zip(unique, traces)))
    logger.info("Convergence ordering on %s: %s", T.name, report.ordering_line())
    return report


class RatioPoint(NamedTuple):
    n: int
    ratio: Optional[float]


def _same_point(a: Point, b: Point) -> bool:
    return norm(a - b) <= 1e-12 * (1 + norm(b))


def rate_ratio_empirical(
    trace_a: IterationTrace, trace_b: IterationTrace, p: Point
) -> List[RatioPoint]:
    """ratio(n) = ‖a_n − p‖ / ‖b_n − p‖ over the common index range.

    Both traces must come from the same SelfMap instance.

    Entries whose denominator is at most 1e-300 are None (undefined).

    Raises:
        ValueError: If the traces come from different maps or fixed points,
            or either trace has no known fixed point.
    """
    if trace_a.map_name != trace_b.map_name or (
        trace_a.self_map is not None
        and trace_b.self_map is not None
        and trace_a.self_map is not trace_b.self_map
    ):
        raise ValueError(
            f"Traces come from different maps: {trace_a.map_name} vs {trace_b.map_name}"
        )
    for trace in (trace_a, trace_b):
        if trace.fixed_point is None or not _same_point(trace.fixed_point, p):
            raise ValueError(f"{trace.scheme.value} trace was not measured against p={p!r}")

    ratios = []
    for rec_a, rec_b in zip(trace_a.records, trace_b.records):
        denominator = norm(rec_b.x - p)
        if denominator <= UNDEFINED_DENOMINATOR:
            ratios.append(RatioPoint(rec_a.n, None))
        else:
            ratios.append(RatioPoint(rec_a.n, norm(rec_a.x - p) / denominator))
    return ratios


class EquivalenceResult(NamedTuple):
    both_converge: bool
    neither: bool

    @property
    def agree(self) -> bool:
        return self.both_converge or self.neither


def equivalence_check(
    T: SelfMap, x0: Point, sched: ScheduleSpec, tol: float, max_iter: int
) -> EquivalenceResult:
    """Run Picard-Mann and the two-step scheme from x0 and compare verdicts.

    A disagreement (one converges, the other does not) is returned as
    both_converge=False and neither=False and logged as a warning.
    """
    picard_mann = iterate(SchemeKind.PICARD_MANN, T, x0, sched, tol, max_iter)
    two_step = iterate(SchemeKind.NEW_TWO_STEP, T, x0, sched, tol, max_iter)
    result = EquivalenceResult(
        both_converge=picard_mann.converged and two_step.converged,
        neither=not picard_mann.converged and not two_step.converged,
    )
    if not result.agree:
        logger.warning(
            "Convergence verdicts disagree on %s: PicardMann=%s, NewTwoStep=%s",
            T.name, picard_mann.stop_reason.name, two_step.stop_reason.name,
        )
    return result
