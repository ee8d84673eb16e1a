"""Tests for scheme comparison, rate ratios, equivalence and stability runs."""
import numpy as np
import pytest

from fixpoint_toolkit.data.problems import (
    cuberoot_map,
    linear_map,
    planar_map,
    scalar_problem,
    translation_map,
)
from fixpoint_toolkit.experiments.comparison import (
    compare_schemes,
    equivalence_check,
    rate_ratio_empirical,
)
from fixpoint_toolkit.experiments.stability import (
    RELATIVE_TAIL_TOLERANCE,
    TAIL_TOLERANCE,
    PerturbationKind,
    PerturbationSpec,
    StabilityRecord,
    StabilityReport,
    check_stability_recursion,
    stability_experiment,
)
from fixpoint_toolkit.schemes.iteration import iterate
from fixpoint_toolkit.schemes.spaces import DomainSpec, SelfMap
from fixpoint_toolkit.schemes.types import SchemeKind

ALL_SCHEMES = list(SchemeKind)


def test_example_ordering(cuberoot, cuberoot_root, quarter_schedule):
    report = compare_schemes(ALL_SCHEMES, cuberoot, 1.99, quarter_schedule, 1e-12, 100)
    assert report.ordering_line() == (
        "NewTwoStep < PicardS < CR < PicardMann < Picard < SP < Ishikawa < Mann"
    )
    assert report.iterations_to_tol[SchemeKind.ISHIKAWA] is None, "Ishikawa should not converge in 100 steps"
    assert report.iterations_to_tol[SchemeKind.MANN] is None
    for kind, trace in report.traces.items():
        if trace.converged:
            assert abs(trace.final.x - cuberoot_root) <= 1e-10


def test_new_scheme_is_first_to_converge(cuberoot, quarter_schedule):
    report = compare_schemes(ALL_SCHEMES, cuberoot, 1.99, quarter_schedule, 1e-12, 100)
    fastest = report.iterations_to_tol[SchemeKind.NEW_TWO_STEP]
    assert all(
        steps is None or fastest <= steps for steps in report.iterations_to_tol.values()
    ), "The two-step scheme should need the fewest iterations"


def test_thread_pool_gives_the_same_report(cuberoot, quarter_schedule):
    serial = compare_schemes(ALL_SCHEMES, cuberoot, 1.99, quarter_schedule, 1e-12, 100)
    pooled = compare_schemes(ALL_SCHEMES, cuberoot, 1.99, quarter_schedule, 1e-12, 100, max_workers=4)
    assert serial.ordering == pooled.ordering
    assert serial.iterations_to_tol == pooled.iterations_to_tol


def test_scaling_start_and_tolerance_keeps_iterations(quarter_schedule):
    """On a linear map, halving x0 and tol together changes nothing"""
    T = linear_map(0.5)
    full = compare_schemes(ALL_SCHEMES, T, 1.0, quarter_schedule, 1e-12, 200)
    half = compare_schemes(ALL_SCHEMES, T, 0.5, quarter_schedule, 0.5e-12, 200)
    assert full.iterations_to_tol == half.iterations_to_tol
    assert full.ordering == half.ordering


def test_unreached_schemes_go_last(quarter_schedule):
    report = compare_schemes(
        [SchemeKind.MANN, SchemeKind.PICARD], linear_map(0.5), 1.0, quarter_schedule, 1e-12, 20
    )
    assert report.ordering == [SchemeKind.PICARD, SchemeKind.MANN]
    assert report.iterations_to_tol == {SchemeKind.MANN: None, SchemeKind.PICARD: None}


def test_duplicate_and_empty_scheme_lists(half_map, quarter_schedule):
    report = compare_schemes([SchemeKind.PICARD, SchemeKind.PICARD], half_map, 1.0, quarter_schedule, 1e-12, 100)
    assert list(report.traces) == [SchemeKind.PICARD]
    with pytest.raises(ValueError):
        compare_schemes([], half_map, 1.0, quarter_schedule, 1e-12, 100)


def test_comparison_without_known_fixed_point(quarter_schedule):
    report = compare_schemes(
        [SchemeKind.PICARD, SchemeKind.MANN], translation_map(), 0.0, quarter_schedule, 1e-12, 10
    )
    # both unreached; Mann moves by α per step, so its residual is also 1
    assert report.iterations_to_tol == {SchemeKind.PICARD: None, SchemeKind.MANN: None}
    assert report.ordering == [SchemeKind.MANN, SchemeKind.PICARD], "Ties fall back to the scheme name"


@pytest.mark.parametrize("delta", [0.3, 0.5, 0.9])
def test_rate_ratio_follows_closed_form(delta, quarter_schedule):
    T = linear_map(delta)
    two_step = iterate(SchemeKind.NEW_TWO_STEP, T, 1.0, quarter_schedule, 1e-12, 20, stop_on_tol=False)
    picard_mann = iterate(SchemeKind.PICARD_MANN, T, 1.0, quarter_schedule, 1e-12, 20, stop_on_tol=False)
    points = rate_ratio_empirical(two_step, picard_mann, 0.0)
    assert [point.n for point in points] == list(range(21))
    per_step = delta * (1 - 0.25 * (1 - delta))
    for point in points:
        assert point.ratio == pytest.approx(per_step ** point.n, rel=1e-10)
    ratios = [point.ratio for point in points]
    assert all(later < earlier for earlier, later in zip(ratios, ratios[1:])), "Ratio should strictly decrease"
    if delta < 0.9:
        assert ratios[20] < 1e-6 * ratios[0]


def test_rate_ratio_needs_matching_traces(quarter_schedule):
    a = iterate(SchemeKind.NEW_TWO_STEP, linear_map(0.5), 1.0, quarter_schedule, 1e-12, 5)
    b = iterate(SchemeKind.PICARD_MANN, linear_map(0.3), 1.0, quarter_schedule, 1e-12, 5)
    with pytest.raises(ValueError, match="different maps"):
        rate_ratio_empirical(a, b, 0.0)
    c = iterate(SchemeKind.PICARD_MANN, linear_map(0.5), 1.0, quarter_schedule, 1e-12, 5)
    with pytest.raises(ValueError):
        rate_ratio_empirical(a, c, 0.25)


def test_rate_ratio_rejects_distinct_maps_with_one_name(quarter_schedule):
    def scaled(delta):
        return SelfMap(lambda x: delta * x, DomainSpec.interval(-1.0, 1.0), 0.0)

    slow, fast = scaled(0.9), scaled(0.5)
    assert slow.name == fast.name == "T"
    a = iterate(SchemeKind.NEW_TWO_STEP, fast, 1.0, quarter_schedule, 1e-12, 5)
    b = iterate(SchemeKind.PICARD_MANN, slow, 1.0, quarter_schedule, 1e-12, 5)
    with pytest.raises(ValueError, match="different maps"):
        rate_ratio_empirical(a, b, 0.0)


def test_rate_ratio_marks_undefined_entries(half_map, quarter_schedule):
    a = iterate(SchemeKind.NEW_TWO_STEP, half_map, 1.0, quarter_schedule, 1e-12, 3)
    b = iterate(SchemeKind.PICARD, half_map, 0.0, quarter_schedule, 1e-12, 3)
    points = rate_ratio_empirical(a, b, 0.0)
    assert len(points) == 1
    assert points[0].ratio is None


@pytest.mark.parametrize("delta", [0.3, 0.5, 0.9])
def test_ordering_survives_tighter_tolerance(delta, quarter_schedule):
    T = linear_map(delta)
    loose = compare_schemes(ALL_SCHEMES, T, 1.0, quarter_schedule, 1e-12, 2000)
    tight = compare_schemes(ALL_SCHEMES, T, 1.0, quarter_schedule, 1e-13, 2000)
    assert all(steps is not None for steps in tight.iterations_to_tol.values())
    assert loose.ordering == tight.ordering, f"Ordering changed with tol on linear-{delta}"


@pytest.mark.parametrize("T, x0", [(cuberoot_map(), 1.99), (linear_map(0.3), 1.0), (linear_map(0.9), 1.0)])
def test_equivalence_on_contractions(T, x0, quarter_schedule):
    result = equivalence_check(T, x0, quarter_schedule, 1e-12, 1000)
    assert result.both_converge, f"Both schemes should converge on {T.name}"
    assert result.agree


def test_equivalence_when_neither_converges(quarter_schedule):
    result = equivalence_check(translation_map(), 0.0, quarter_schedule, 1e-12, 50)
    assert result.neither and result.agree


STABILITY_PROBLEMS = ["cuberoot", "linear-0.3", "linear-0.5", "linear-0.9"]


@pytest.mark.parametrize("name", STABILITY_PROBLEMS)
def test_decaying_perturbation_is_stable_on_contractions(name, quarter_schedule):
    problem = scalar_problem(name)
    pert = PerturbationSpec(PerturbationKind.DECAYING, c=0.1, q=2.0)
    report = stability_experiment(problem.self_map, problem.x0, quarter_schedule, pert, 200)
    assert report.verdict_forward, f"Decaying push should not keep z away from p on {name}"
    assert report.consistent
    assert report.tail_threshold >= report.tail_tolerance


@pytest.mark.parametrize("name", STABILITY_PROBLEMS)
def test_constant_perturbation_is_caught_on_contractions(name, quarter_schedule):
    problem = scalar_problem(name)
    pert = PerturbationSpec(PerturbationKind.CONSTANT, c=0.1)
    report = stability_experiment(problem.self_map, problem.x0, quarter_schedule, pert, 200)
    assert not report.verdict_forward and not report.z_to_p
    assert report.consistent, f"ε and z limits should agree on {name}"


def test_slow_contraction_uses_the_relative_threshold(quarter_schedule):
    pert = PerturbationSpec(PerturbationKind.DECAYING, c=0.1, q=2.0)
    report = stability_experiment(linear_map(0.9), 1.0, quarter_schedule, pert, 200)
    # the tail error sits above the absolute floor but far below ‖z_0 − p‖
    assert report.err_tail_max > TAIL_TOLERANCE
    assert report.initial_err == 1.0
    assert report.tail_threshold == pytest.approx(RELATIVE_TAIL_TOLERANCE)
    assert report.z_to_p


def test_stability_with_decaying_perturbation(cuberoot, quarter_schedule):
    pert = PerturbationSpec(PerturbationKind.DECAYING, c=0.1, q=2.0)
    report = stability_experiment(cuberoot, 1.99, quarter_schedule, pert, 200)
    assert len(report.z_trace) == 200
    assert report.eps_to_zero and report.z_to_p
    assert report.verdict_forward and report.verdict_converse
    assert report.consistent
    assert report.err_tail_max <= TAIL_TOLERANCE
    assert report.z_trace[-1].err < 3e-6


def test_stability_with_constant_perturbation(cuberoot, quarter_schedule):
    pert = PerturbationSpec(PerturbationKind.CONSTANT, c=0.1)
    report = stability_experiment(cuberoot, 1.99, quarter_schedule, pert, 200)
    assert not report.verdict_forward, "A constant push must keep z away from p"
    assert not report.eps_to_zero and not report.z_to_p
    assert report.consistent
    assert report.err_tail_min > 0.01


def test_stability_without_perturbation(cuberoot, quarter_schedule):
    pert = PerturbationSpec(PerturbationKind.CONSTANT, c=0.0)
    report = stability_experiment(cuberoot, 1.99, quarter_schedule, pert, 50)
    assert all(record.eps == 0.0 for record in report.z_trace)
    assert report.verdict_forward and report.verdict_converse


def test_noise_perturbation_is_seeded(cuberoot, quarter_schedule):
    pert = PerturbationSpec(PerturbationKind.NOISE, c=1e-3, seed=5)
    first = stability_experiment(cuberoot, 1.99, quarter_schedule, pert, 40)
    second = stability_experiment(cuberoot, 1.99, quarter_schedule, pert, 40)
    assert [r.z for r in first.z_trace] == [r.z for r in second.z_trace]
    assert max(r.eps for r in first.z_trace) <= 1e-3 + 1e-15


def test_stability_on_vectors(quarter_schedule):
    pert = PerturbationSpec(PerturbationKind.DECAYING, c=0.1, q=2.0)
    report = stability_experiment(planar_map(), np.array([2.0, 2.0]), quarter_schedule, pert, 200)
    assert report.z_trace[0].err == pytest.approx(2.5)
    assert report.z_to_p


def test_stability_recursion_holds_along_a_run(cuberoot, quarter_schedule):
    pert = PerturbationSpec(PerturbationKind.DECAYING, c=0.1, q=2.0)
    report = stability_experiment(cuberoot, 1.99, quarter_schedule, pert, 200)
    holds, first = check_stability_recursion(report, 0.2, quarter_schedule)
    assert holds and first is None


def test_stability_recursion_reports_violation(quarter_schedule):
    report = StabilityReport(
        perturbation=PerturbationSpec(PerturbationKind.CONSTANT, c=0.0),
        z_trace=[StabilityRecord(0, 1.0, 0.0, 1.0), StabilityRecord(1, 2.0, 0.0, 2.0)],
    )
    assert check_stability_recursion(report, 0.5, quarter_schedule) == (False, 0)


def test_stability_arguments_are_validated(cuberoot, quarter_schedule):
    pert = PerturbationSpec(PerturbationKind.CONSTANT, c=0.1)
    with pytest.raises(ValueError):
        stability_experiment(cuberoot, 1.99, quarter_schedule, pert, 10)
    with pytest.raises(ValueError, match="fixed point"):
        stability_experiment(translation_map(), 0.0, quarter_schedule, pert, 50)
    with pytest.raises(ValueError):
        PerturbationSpec(PerturbationKind.DECAYING, c=0.1, q=1.0)
    with pytest.raises(ValueError):
        PerturbationSpec(PerturbationKind.CONSTANT, c=-0.1)
