"""Command-line entry point: `fixpoint <command> --config <path|-> [--out DIR] [--seed N]`.

Exit codes: 0 success, 1 configuration error, 2 hypothesis violation,
3 delay problem not solved within max_iter.
"""
from pathlib import Path
from typing import Callable, Dict, List, Optional
import argparse
import logging
import sys

import numpy as np

from .analysis.bounds import BoundInputs, bound_ratio, new_scheme_bound, picard_mann_bound
from .analysis.contraction import estimate_weak_contraction
from .analytics.plots import ConvergencePlotter, ordering_summary
from .data.config import COMMANDS, ConfigError, ConfigLoader, RunConfig
from .data.problems import ScalarProblem, delay_problem, scalar_problem
from .data.trace_csv import render_table, render_traces, write_table
from .delay.problem import HypothesisViolationError, c5_value
from .delay.solver import method_of_steps_oracle, solve_dde
from .experiments.comparison import compare_schemes
from .experiments.stability import PerturbationKind, PerturbationSpec, stability_experiment
from .schemes.spaces import DomainViolationError, as_point, norm

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_HYPOTHESIS = 2
EXIT_UNCONVERGED = 3


class _ArgumentParser(argparse.ArgumentParser):
    """Argument errors become ConfigError so they share exit code 1."""

    def error(self, message: str):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="fixpoint",
        description="Fixed-point iteration experiments: scheme comparison, "
                    "stability, delay equations, error bounds and contraction certificates.",
    )
    parser.add_argument("command", choices=COMMANDS, help="Experiment to run")
    parser.add_argument("--config", default=None,
                        help="JSON config file, or '-' to read it from stdin")
    parser.add_argument("--out", default=None, help="Output directory (overrides output_dir)")
    parser.add_argument("--seed", type=int, default=None, help="Seed (overrides seed)")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    return parser


def _scalar(cfg: RunConfig) -> ScalarProblem:
    if cfg.problem is None:
        raise ConfigError(f"{cfg.command} needs a problem")
    try:
        problem = scalar_problem(cfg.problem)
        x0 = as_point(cfg.x0) if cfg.x0 is not None else problem.x0
    except (KeyError, TypeError, ValueError) as error:
        raise ConfigError(f"Invalid problem {cfg.problem!r}: {error}")
    if not problem.self_map.domain.contains(x0):
        raise ConfigError(f"x0={cfg.x0!r} is outside the domain of {problem.self_map.name}")
    return ScalarProblem(problem.self_map, x0)


def cmd_compare(cfg: RunConfig) -> int:
    """Run every requested scheme, write compare.csv and compare.gp, print the ordering."""
    problem = _scalar(cfg)
    report = compare_schemes(
        cfg.scheme_kinds(), problem.self_map, problem.x0, cfg.schedule_spec(),
        cfg.tol, cfg.max_iter, stop_on_tol=cfg.stop_on_tol,
    )
    out = Path(cfg.output_dir)
    write_table(render_traces(report.traces.values()), out / "compare.csv")
    plotter = ConvergencePlotter(report.traces, "compare.csv")
    plotter.write_gnuplot(out / "compare.gp")
    if cfg.html_report:
        plotter.write_html(out / "compare.html")

    print(f"Ordering: {report.ordering_line()}")
    for line in ordering_summary(report.ordering, report.iterations_to_tol):
        print(f"  {line}")
    return EXIT_OK


def cmd_stability(cfg: RunConfig) -> int:
    """Perturbed two-step runs, one per perturbation kind, into stability.csv."""
    problem = _scalar(cfg)
    if problem.self_map.known_fixed_point is None:
        raise ConfigError(f"Stability needs a known fixed point; {problem.self_map.name} has none")
    sched = cfg.schedule_spec()
    reports = []
    for kind in cfg.perturbations:
        spec = PerturbationSpec(PerturbationKind(kind), cfg.c, cfg.q, seed=cfg.seed)
        reports.append(stability_experiment(problem.self_map, problem.x0, sched, spec, cfg.horizon))

    columns: Dict[str, List] = {"n": [], "perturbation": [], "z": [], "eps": [], "err": []}
    for report in reports:
        for record in report.z_trace:
            columns["n"].append(record.n)
            columns["perturbation"].append(report.perturbation.kind.value)
            columns["z"].append(norm(record.z) if isinstance(record.z, np.ndarray) else record.z)
            columns["eps"].append(record.eps)
            columns["err"].append(record.err)
    write_table(render_table(columns), Path(cfg.output_dir) / "stability.csv")

    for report in reports:
        print(
            f"{report.perturbation.kind.value} (c={cfg.c:g}): "
            f"verdict_forward={str(report.verdict_forward).lower()} "
            f"verdict_converse={str(report.verdict_converse).lower()} "
            f"eps_tail_max={report.eps_tail_max:.3e} err_tail_max={report.err_tail_max:.3e} "
            f"threshold={report.tail_threshold:.3e}"
        )
    return EXIT_OK


def cmd_dde(cfg: RunConfig) -> int:
    """Solve a delay problem with the two-step scheme and compare it with the reference solver."""
    if not isinstance(cfg.problem, str):
        raise ConfigError("dde needs the name of a built-in delay problem")
    try:
        prob = delay_problem(cfg.problem, t0=cfg.t0, b=cfg.b, tau=cfg.tau, delta=cfg.delta, L=cfg.L)
    except HypothesisViolationError:
        raise
    except ValueError as error:
        raise ConfigError(str(error))

    try:
        result = solve_dde(prob, cfg.h, cfg.schedule_spec(), cfg.tol, cfg.max_iter, seed=cfg.seed)
    except HypothesisViolationError:
        raise
    except ValueError as error:
        raise ConfigError(str(error))
    nodes = result.solution.nodes
    x = result.solution.values
    try:
        reference = method_of_steps_oracle(prob, cfg.h).values
    except ValueError as error:
        logger.warning("No reference solution: %s", error)
        reference = None

    columns: Dict[str, List] = {"t": list(nodes), "x": list(x)}
    if reference is not None:
        abs_err = np.abs(x - reference)
        columns["x_ref"] = list(reference)
        columns["abs_err"] = list(abs_err)
    else:
        columns["x_ref"] = [None] * len(nodes)
        columns["abs_err"] = [None] * len(nodes)
    write_table(render_table(columns), Path(cfg.output_dir) / "solution.csv")

    c5 = c5_value(prob.delta, prob.t0, prob.b)
    print(f"C5: 2δ(b−t0) = 2·{prob.delta:g}·{prob.b - prob.t0:g} = {c5:g} < 1")
    for line in result.report.summary_lines():
        print(f"  {line}")
    if reference is not None:
        print(f"sup error vs reference: {float(np.max(abs_err)):.3e}")
    print(f"iterations: {result.trace.iterations} ({result.trace.stop_reason.name.lower()})")
    if not result.converged:
        print(f"{prob.name} was not solved within max_iter={cfg.max_iter}", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


def cmd_bounds(cfg: RunConfig) -> int:
    """Tabulate both error bounds and their ratio for n = 0..n_max."""
    sched = cfg.schedule_spec()
    columns: Dict[str, List] = {
        "n": [], "new_scheme_bound": [], "picard_mann_bound": [], "bound_ratio": [],
    }
    try:
        for n in range(cfg.n_max + 1):
            inputs = BoundInputs(cfg.delta, sched, cfg.initial_err, n)
            columns["n"].append(n)
            columns["new_scheme_bound"].append(new_scheme_bound(inputs))
            columns["picard_mann_bound"].append(picard_mann_bound(inputs))
            columns["bound_ratio"].append(bound_ratio(inputs))
    except ValueError as error:
        raise ConfigError(str(error))
    write_table(render_table(columns), Path(cfg.output_dir) / "bounds.csv")
    print(
        f"n={cfg.n_max}: new_scheme_bound={columns['new_scheme_bound'][-1]:.6e} "
        f"picard_mann_bound={columns['picard_mann_bound'][-1]:.6e} "
        f"bound_ratio={columns['bound_ratio'][-1]:.6e}"
    )
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    """Estimate (δ, L) for a problem map and write certify.csv."""
    problem = _scalar(cfg)
    try:
        estimate = estimate_weak_contraction(problem.self_map, (cfg.samples, cfg.seed), cfg.L_grid)
    except ValueError as error:
        raise ConfigError(str(error))
    columns = {
        "L": list(estimate.delta_by_L),
        "delta_hat": list(estimate.delta_by_L.values()),
    }
    write_table(render_table(columns), Path(cfg.output_dir) / "certify.csv")
    if estimate.certified:
        print(f"certified: delta_hat={estimate.delta_hat:.12g} L_hat={estimate.L_hat:g} "
              f"over {estimate.samples} samples (seed {estimate.sampler_seed})")
    else:
        print(f"not certified: delta_hat={estimate.delta_hat:.12g} "
              f"max_violation={estimate.max_violation:.3e}")
    return EXIT_OK


HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    "compare": cmd_compare,
    "stability": cmd_stability,
    "dde": cmd_dde,
    "bounds": cmd_bounds,
    "certify": cmd_certify,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING,
            format="%(asctime)s - %(levelname)s - %(message)s",
        )
        cfg = ConfigLoader(args.config).load(
            args.command, overrides={"output_dir": args.out, "seed": args.seed}
        )
        return HANDLERS[cfg.command](cfg)
    except ConfigError as error:
        print(f"config error: {error}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisViolationError as error:
        print(f"hypothesis violated: {error}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except DomainViolationError as error:
        # the map left its claimed domain, so it is not a self-map there
        print(f"hypothesis violated: {error}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
