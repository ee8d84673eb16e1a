from dataclasses import dataclass
import logging

import numpy as np
from scipy.integrate import solve_ivp

from ..schemes.iteration import IterationTrace, iterate
from ..schemes.schedules import ScheduleSpec
from ..schemes.spaces import DomainSpec, SelfMap
from ..schemes.types import SchemeKind
from .grid import GridFunction, cumulative_trapezoid
from .problem import ConditionsReport, DelayProblem, check_conditions

logger = logging.getLogger(__name__)


def _check_grid_matches(prob: DelayProblem, grid: GridFunction) -> None:
    expected = (prob.t0 - prob.tau, prob.b, prob.t0)
    actual = (grid.t_start, grid.t_end, grid.t0)
    if not np.allclose(expected, actual, rtol=0, atol=1e-12):
        raise ValueError(f"Grid spans {actual}, problem needs (t0−τ, b, t0) = {expected}")


def build_operator(prob: DelayProblem, grid: GridFunction) -> SelfMap:
    """The integral operator whose fixed points solve the delay problem.

    (Tx)(t) = φ(t) on nodes t ≤ t0, and
    (Tx)(t) = φ(t0) + ∫_{t0}^{t} f(s, x(s), x(s − τ)) ds on nodes t > t0,
    with the integral taken by the cumulative trapezoid rule and x(s − τ)
    read from the node τ/h places to the left.

    Args:
        prob: The delay problem.
        grid: Template fixing the nodes (values are ignored).

    Returns:
        SelfMap on arrays of node values.

    Raises:
        ValueError: If the grid does not match the problem or φ is not finite
            on the history nodes. The returned map raises ValueError naming the
            node when f is not finite there.
    """
    _check_grid_matches(prob, grid)
    m = grid.delay_steps
    h = grid.h
    nodes = grid.nodes
    prefix = prob.history(nodes[: m + 1]).copy()
    if not np.all(np.isfinite(prefix)):
        bad = int(np.argmin(np.isfinite(prefix)))
        raise ValueError(f"φ is not finite at node t={nodes[bad]:.12g}")
    phi_t0 = prefix[m]
    integration_nodes = nodes[m:]

    def evaluate(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        integrand = prob.rhs(integration_nodes, x[m:], x[: x.size - m])
        finite = np.isfinite(integrand)
        if not np.all(finite):
            bad = int(np.argmin(finite))
            raise ValueError(f"f is not finite at node t={integration_nodes[bad]:.12g}")
        image = np.empty_like(x)
        image[: m + 1] = prefix
        image[m + 1:] = phi_t0 + cumulative_trapezoid(integrand, h)[1:]
        return image

    return SelfMap(evaluate, DomainSpec.grid_space(grid.size), name=prob.name)


def initial_guess(prob: DelayProblem, grid: GridFunction) -> np.ndarray:
    """φ on the history nodes, continued by the constant φ(t0)."""
    m = grid.delay_steps
    values = np.empty(grid.size)
    values[: m + 1] = prob.history(grid.nodes[: m + 1])
    values[m + 1:] = values[m]
    return values


@dataclass
class DDESolution:
    solution: GridFunction
    trace: IterationTrace
    report: ConditionsReport

    @property
    def converged(self) -> bool:
        return self.trace.converged


def solve_dde(
    prob: DelayProblem,
    h: float,
    sched: ScheduleSpec,
    tol: float,
    max_iter: int,
    seed: int = 0,
) -> DDESolution:
    """Solve the delay problem by iterating the two-step scheme on its operator.

    Iteration starts from the constant continuation of φ and stops when the
    discrete sup-norm residual ‖x − Tx‖ is at most tol.

    Returns:
        DDESolution; when max_iter is reached the trace says so and
        `converged` is False.

    Raises:
        HypothesisViolationError: If C5 fails.
        ValueError: If τ or b − (t0 − τ) is not a whole number of steps h.
    """
    report = check_conditions(prob, seed=seed)
    grid = GridFunction.template(prob.t0, prob.b, prob.tau, h)
    T = build_operator(prob, grid)
    trace = iterate(SchemeKind.NEW_TWO_STEP, T, initial_guess(prob, grid), sched, tol, max_iter)
    result = DDESolution(grid.with_values(trace.final.x), trace, report)
    if result.converged:
        logger.info("%s solved at h=%g after %d iterations", prob.name, h, trace.iterations)
    else:
        logger.warning("%s did not converge at h=%g: %s", prob.name, h, trace.stop_reason.name)
    return result


def method_of_steps_oracle(prob: DelayProblem, h: float) -> GridFunction:
    """Reference solution on the same grid from an adaptive Runge-Kutta solve.

    Only the first delay interval is supported: since b − t0 ≤ τ, every
    delayed argument t − τ lies in the history and is read from φ exactly,
    so the problem is a plain ODE on [t0, b].

    Raises:
        ValueError: If b − t0 > τ or the ODE solver fails.
    """
    if prob.b - prob.t0 > prob.tau + 1e-12:
        raise ValueError("The reference solver covers a single delay interval (b − t0 ≤ τ)")
    grid = GridFunction.template(prob.t0, prob.b, prob.tau, h)
    m = grid.delay_steps
    nodes = grid.nodes
    values = np.empty(grid.size)
    values[: m + 1] = prob.history(nodes[: m + 1])

    def rhs(t: float, x: np.ndarray) -> list:
        return [float(prob.rhs(t, x[0], prob.history(t - prob.tau)))]

    sol = solve_ivp(
        rhs, (nodes[m], nodes[-1]), [values[m]],
        method="DOP853", t_eval=nodes[m:], rtol=1e-12, atol=1e-14,
    )
    if not sol.success:
        raise ValueError(f"Reference solve failed: {sol.message}")
    values[m:] = sol.y[0]
    logger.debug("Reference solution computed with %d rhs evaluations", sol.nfev)
    return grid.with_values(values)
