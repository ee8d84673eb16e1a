from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Dict, Sequence, Tuple
import logging

import numpy as np

from ..schemes.spaces import Point, SelfMap, norm

logger = logging.getLogger(__name__)

CONDITION_SLACK = 1e-12
# largest double below 1: the weakest contraction constant still admissible
_DELTA_CEILING = float(np.nextafter(1.0, 0.0))


class ContractionForm(Enum):
    RESIDUAL = auto()  # ‖Tx−Ty‖ ≤ δ‖x−y‖ + L‖x−Tx‖
    BERINDE = auto()   # ‖Tx−Ty‖ ≤ δ‖x−y‖ + L‖Tx−y‖


def _l_term(form: ContractionForm, x: Point, y: Point, tx: Point) -> float:
    if form == ContractionForm.RESIDUAL:
        return norm(x - tx)
    return norm(tx - y)


def verify_condition(
    T: SelfMap,
    x: Point,
    y: Point,
    delta: float,
    L: float,
    form: ContractionForm = ContractionForm.RESIDUAL,
) -> Tuple[bool, float]:
    """Check the weak-contraction inequality for one pair of points.

    Returns:
        (holds, slack) with slack = ‖Tx−Ty‖ − δ‖x−y‖ − L·(L-term); the
        inequality holds when slack ≤ 1e-12.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0,1)")
    if L < 0:
        raise ValueError("L cannot be negative")
    tx, ty = T(x), T(y)
    slack = norm(tx - ty) - delta * norm(x - y) - L * _l_term(form, x, y, tx)
    return slack <= CONDITION_SLACK, slack


@dataclass(frozen=True)
class WeakContractionEstimate:
    """Empirical (δ̂, L̂) pair over a seeded sample of point pairs."""
    delta_hat: float
    L_hat: float
    samples: int
    max_violation: float
    sampler_seed: int
    form: ContractionForm = ContractionForm.RESIDUAL
    delta_by_L: Dict[float, float] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.delta_hat < 1.0 and self.max_violation <= CONDITION_SLACK


def estimate_weak_contraction(
    T: SelfMap,
    sampler: Tuple[int, int],
    L_grid: Sequence[float],
    form: ContractionForm = ContractionForm.RESIDUAL,
) -> WeakContractionEstimate:
    """Estimate the smallest δ that makes the condition hold on sampled pairs.

    For each L, δ̂(L) is the largest difference quotient
    (‖Tx−Ty‖ − L·(L-term)) / ‖x−y‖ over sampled pairs with x ≠ y, clamped
    below at 0. The pair with the smallest δ̂ is returned (smallest L on
    ties). Certification is claimed only for δ̂ < 1 and only over the
    sampled region.

    Args:
        T: Map on a bounded domain.
        sampler: (count, seed); count pairs are drawn uniformly.
        L_grid: Candidate values of L, all non-negative.
        form: Which L-term to use.

    Returns:
        WeakContractionEstimate. When no L gives δ̂ < 1, max_violation is
        the largest slack at the weakest admissible δ and is positive.
    """
    count, seed = sampler
    if count < 2:
        raise ValueError("Need at least two samples")
    if not L_grid:
        raise ValueError("L_grid cannot be empty")
    if any(L < 0 for L in L_grid):
        raise ValueError("L values cannot be negative")
    if not T.domain.bounded:
        raise ValueError(f"Domain of {T.name} is unbounded; certification needs a bounded region")

    rng = np.random.default_rng(seed)
    xs = T.domain.sample(rng, count)
    ys = T.domain.sample(rng, count)

    image_gap = np.empty(count)
    distance = np.empty(count)
    l_term = np.empty(count)
    for i, (x, y) in enumerate(zip(xs, ys)):
        tx, ty = T(x), T(y)
        image_gap[i] = norm(tx - ty)
        distance[i] = norm(x - y)
        l_term[i] = _l_term(form, x, y, tx)

    usable = distance > 0
    if not np.any(usable):
        raise ValueError("All sampled pairs coincide")

    delta_by_L: Dict[float, float] = {}
    for L in L_grid:
        quotients = (image_gap[usable] - L * l_term[usable]) / distance[usable]
        delta_by_L[float(L)] = max(0.0, float(np.max(quotients)))

    best_L = min(sorted(delta_by_L), key=lambda L: delta_by_L[L])
    delta_hat = delta_by_L[best_L]

    if delta_hat < 1.0:
        quotients = (image_gap[usable] - best_L * l_term[usable]) / distance[usable]
        max_violation = float(np.max((quotients - delta_hat) * distance[usable]))
        logger.info("%s certified: δ̂=%.6g at L=%g over %d pairs", T.name, delta_hat, best_L, count)
    else:
        slack = image_gap - _DELTA_CEILING * distance - best_L * l_term
        max_violation = float(np.max(slack))
        logger.info("%s not certifiable: δ̂=%.6g ≥ 1 for every L", T.name, delta_hat)

    return WeakContractionEstimate(
        delta_hat=delta_hat,
        L_hat=best_L,
        samples=count,
        max_violation=max_violation,
        sampler_seed=seed,
        form=form,
        delta_by_L=delta_by_L,
    )
