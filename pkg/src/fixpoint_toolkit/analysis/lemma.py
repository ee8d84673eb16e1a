from dataclasses import dataclass
from typing import Callable, Optional
import logging

import numpy as np

logger = logging.getLogger(__name__)

MU_SUM_EVIDENCE = 10.0


@dataclass(frozen=True)
class SequenceTriple:
    """Sequences a_n ≥ 0, μ_n ∈ (0,1), b_n ≥ 0 observed up to `horizon`."""
    a: Callable[[int], float]
    mu: Callable[[int], float]
    b: Callable[[int], float]
    horizon: int


@dataclass(frozen=True)
class LemmaCheck:
    hypothesis_holds: bool
    tail_max: float
    first_violation: Optional[int] = None
    mu_sum: float = 0.0
    mu_sum_diverging: bool = False
    b_over_mu_tail: float = 0.0


def lemma_weng_check(seq: SequenceTriple) -> LemmaCheck:
    """Finite-horizon evidence for a_{n+1} ≤ (1−μ_n)a_n + b_n ⇒ a_n → 0.

    The recursion inequality is checked at every index (with a 1e-12
    relative slack); the asymptotic hypotheses Σμ_n = ∞ and b_n/μ_n → 0 can
    only be reported as evidence, never decided.

    Returns:
        LemmaCheck whose tail_max is the largest a_n over the last 10% of
        the horizon.
    """
    if seq.horizon < 10:
        raise ValueError("Horizon must be at least 10")

    a = np.array([seq.a(n) for n in range(seq.horizon)], dtype=float)
    mu = np.array([seq.mu(n) for n in range(seq.horizon)], dtype=float)
    b = np.array([seq.b(n) for n in range(seq.horizon)], dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("a_n and b_n must be non-negative")
    if np.any(mu <= 0) or np.any(mu >= 1):
        raise ValueError("mu_n must lie in (0,1)")

    rhs = (1 - mu[:-1]) * a[:-1] + b[:-1]
    violated = np.nonzero(a[1:] > rhs + 1e-12 * (1 + np.abs(rhs)))[0]
    first_violation = int(violated[0]) if violated.size else None

    tail_start = seq.horizon - max(1, seq.horizon // 10)
    mu_sum = float(np.sum(mu))
    result = LemmaCheck(
        hypothesis_holds=first_violation is None,
        tail_max=float(np.max(a[tail_start:])),
        first_violation=first_violation,
        mu_sum=mu_sum,
        mu_sum_diverging=mu_sum > MU_SUM_EVIDENCE,
        b_over_mu_tail=float(np.max(b[tail_start:] / mu[tail_start:])),
    )
    if first_violation is not None:
        logger.info("Recursion inequality fails first at n=%d", first_violation)
    return result
