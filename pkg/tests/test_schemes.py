"""Tests for the update rules, schedules, domains and the iterate driver."""
from decimal import Decimal

import numpy as np
import pytest

from conftest import decimal_T, decimal_mix
from fixpoint_toolkit.analysis.bounds import scheme_contraction_factor
from fixpoint_toolkit.data.problems import affine_map, cuberoot_map, linear_map, planar_map, translation_map
from fixpoint_toolkit.schemes.iteration import iterate, step
from fixpoint_toolkit.schemes.schedules import ParameterSequence, ScheduleSpec, StepParams
from fixpoint_toolkit.schemes.spaces import DomainSpec, DomainViolationError, SelfMap
from fixpoint_toolkit.schemes.types import SchemeKind, StopReason

ALL_SCHEMES = list(SchemeKind)
QUARTER = StepParams(0.25, 0.25, 0.25)


def test_picard_step_matches_extended_precision(cuberoot):
    """One Picard step from 1.99 is the cube root of 3.99"""
    expected = float(decimal_T(Decimal(1.99)))
    assert step(SchemeKind.PICARD, 1.99, cuberoot, QUARTER) == pytest.approx(expected, rel=1e-14)


def test_new_two_step_from_example_start(cuberoot):
    """One two-step update from 1.99 with α = β = 1/4"""
    quarter = Decimal(1) / 4
    x = Decimal(1.99)
    y = decimal_T(decimal_mix(quarter, x, decimal_T(x)))
    expected = float(decimal_T(decimal_mix(quarter, y, decimal_T(y))))
    result = step(SchemeKind.NEW_TWO_STEP, 1.99, cuberoot, QUARTER)
    assert result == pytest.approx(expected, rel=1e-14)
    assert result == pytest.approx(1.52715, abs=1e-5), "Two-step update should land near 1.52715"


def test_picard_mann_step_from_example_start(cuberoot):
    quarter = Decimal(1) / 4
    x = Decimal(1.99)
    expected = float(decimal_T(decimal_mix(quarter, x, decimal_T(x))))
    assert step(SchemeKind.PICARD_MANN, 1.99, cuberoot, QUARTER) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("kind", ALL_SCHEMES)
def test_fixed_point_is_invariant(kind, half_map):
    assert step(kind, 0.0, half_map, QUARTER) == 0.0, f"{kind.value} moved the fixed point"


@pytest.mark.parametrize("kind", ALL_SCHEMES)
def test_cuberoot_fixed_point_is_invariant(kind, cuberoot_root):
    T = SelfMap(cuberoot_map().eval, DomainSpec.interval(0.0, 4.0), cuberoot_root)
    moved = abs(step(kind, cuberoot_root, T, QUARTER) - cuberoot_root)
    assert moved <= 4 * np.finfo(float).eps * (1 + cuberoot_root), f"{kind.value} moved p by {moved:.3e}"


@pytest.mark.parametrize("kind", [SchemeKind.MANN, SchemeKind.ISHIKAWA, SchemeKind.SP])
def test_zero_parameters_leave_the_point_unchanged(kind, half_map):
    assert step(kind, 0.75, half_map, StepParams(0.0, 0.0, 0.0)) == 0.75


def test_degenerate_parameters_collapse_to_picard(half_map):
    picard = step(SchemeKind.PICARD, 0.75, half_map, QUARTER)
    assert step(SchemeKind.MANN, 0.75, half_map, StepParams(1.0, 0.0, 0.0)) == picard
    assert step(SchemeKind.CR, 0.75, half_map, StepParams(0.0, 0.0, 0.0)) == picard
    # PicardS with α = β = γ = 0: x ↦ T(Tx)
    assert step(SchemeKind.PICARD_S, 0.75, half_map, StepParams(0.0, 0.0, 0.0)) == 0.1875
    # α = β = 0: x ↦ T(Tx)
    assert step(SchemeKind.NEW_TWO_STEP, 0.75, half_map, StepParams(0.0, 0.0, 0.0)) == 0.1875
    # α = β = 1: x ↦ T⁴x
    assert step(SchemeKind.NEW_TWO_STEP, 0.75, half_map, StepParams(1.0, 1.0, 0.0)) == 0.046875


def test_unused_parameters_are_not_checked(half_map):
    assert step(SchemeKind.PICARD, 0.5, half_map, StepParams(2.0, -1.0, 3.0)) == 0.25
    assert step(SchemeKind.PICARD_S, 0.5, half_map, StepParams(2.0, 0.25, 0.25)) == pytest.approx(
        step(SchemeKind.PICARD_S, 0.5, half_map, QUARTER)
    )


@pytest.mark.parametrize("kind", [SchemeKind.MANN, SchemeKind.SP, SchemeKind.NEW_TWO_STEP])
def test_parameters_outside_unit_interval_raise(kind, half_map):
    with pytest.raises(ValueError):
        step(kind, 0.5, half_map, StepParams(1.5, 1.5, 1.5))


def test_step_leaving_domain_raises():
    doubling = affine_map(2.0)
    with pytest.raises(DomainViolationError, match="left the domain"):
        step(SchemeKind.PICARD, 0.9, doubling, QUARTER)


def test_step_on_vectors():
    T = planar_map()
    x = step(SchemeKind.PICARD, np.array([2.0, 2.0]), T, QUARTER)
    assert np.array_equal(x, np.array([1.25, 0.75]))


@pytest.mark.parametrize("kind", ALL_SCHEMES)
def test_one_step_error_factor_on_linear_map(kind, half_map, quarter_schedule):
    """On T(x) = δx every scheme shrinks the error by its contraction factor"""
    trace = iterate(kind, half_map, 1.0, quarter_schedule, 1e-12, 5, stop_on_tol=False)
    factor = scheme_contraction_factor(kind, 0.5, QUARTER)
    for before, after in zip(trace.records, trace.records[1:]):
        assert after.err == pytest.approx(factor * before.err, rel=1e-12)
        assert after.err < before.err, f"{kind.value} error did not decrease"


def test_picard_on_linear_map_follows_closed_form(half_map, quarter_schedule):
    trace = iterate(SchemeKind.PICARD, half_map, 1.0, quarter_schedule, 1e-12, 100)
    assert [r.n for r in trace.records] == list(range(len(trace.records))), "Indices must be consecutive"
    assert all(r.err == 0.5 ** r.n for r in trace.records), "Picard error should be exactly 0.5^n"
    # the residual 0.5^(n+1) reaches 1e-12 one index before the error does
    assert trace.iterations == 39
    assert trace.stop_reason == StopReason.TOLERANCE


def test_start_at_fixed_point_stops_immediately(half_map, quarter_schedule):
    trace = iterate(SchemeKind.NEW_TWO_STEP, half_map, 0.0, quarter_schedule, 1e-12, 100)
    assert len(trace.records) == 1
    assert trace.final.err == 0.0
    assert trace.converged


def test_translation_hits_max_iter(quarter_schedule):
    trace = iterate(SchemeKind.PICARD, translation_map(), 0.0, quarter_schedule, 1e-12, 10)
    assert trace.stop_reason == StopReason.MAX_ITER
    assert len(trace.records) == 11
    assert all(r.residual == 1.0 for r in trace.records)
    assert all(r.err is None for r in trace.records), "No fixed point means no error column"


def test_divergence_is_reported_not_raised(quarter_schedule):
    blow_up = SelfMap(lambda x: 1e60 * x, DomainSpec.real_line(), name="blow-up")
    trace = iterate(SchemeKind.PICARD, blow_up, 1.0, quarter_schedule, 1e-12, 10)
    assert trace.stop_reason == StopReason.DIVERGENCE
    assert trace.iterations == 2


def test_run_without_tolerance_stop_has_fixed_length(half_map, quarter_schedule):
    trace = iterate(SchemeKind.PICARD, half_map, 1.0, quarter_schedule, 1e-12, 20, stop_on_tol=False)
    assert len(trace.records) == 21
    assert trace.stop_reason == StopReason.MAX_ITER


def test_start_outside_domain_raises(half_map, quarter_schedule):
    with pytest.raises(DomainViolationError):
        iterate(SchemeKind.PICARD, half_map, 3.0, quarter_schedule, 1e-12, 10)


@pytest.mark.parametrize("tol, max_iter", [(0.0, 10), (-1.0, 10), (1e-12, 0)])
def test_invalid_stopping_rule_raises(tol, max_iter, half_map, quarter_schedule):
    with pytest.raises(ValueError):
        iterate(SchemeKind.PICARD, half_map, 1.0, quarter_schedule, tol, max_iter)


@pytest.mark.parametrize("kind", ALL_SCHEMES)
def test_converged_schemes_reach_the_root(kind, cuberoot, cuberoot_root, quarter_schedule):
    trace = iterate(kind, cuberoot, 1.99, quarter_schedule, 1e-12, 100)
    if trace.converged:
        assert abs(trace.final.x - cuberoot_root) <= 1e-10, f"{kind.value} converged to the wrong point"


def test_declared_fixed_point_is_checked():
    with pytest.raises(ValueError, match="not fixed"):
        SelfMap(lambda x: 0.5 * x, DomainSpec.interval(-1.0, 1.0), known_fixed_point=0.5)
    with pytest.raises(ValueError, match="not fixed"):
        SelfMap(lambda x: float("nan") * x, DomainSpec.interval(-1.0, 1.0), known_fixed_point=0.0)


def test_maps_into_domain_spot_check():
    linear_map(0.5).check_maps_into_domain(samples=200, seed=1)
    with pytest.raises(DomainViolationError):
        affine_map(0.5, offset=0.9).check_maps_into_domain(samples=200, seed=1)


def test_schedules():
    assert ParameterSequence.harmonic()(0) == 1.0
    assert ParameterSequence.harmonic()(3) == 0.25
    table = ParameterSequence.from_table([0.1, 0.2])
    assert table(1) == 0.2
    assert table.divergent_sum_attested is False
    with pytest.raises(ValueError):
        table(2)
    with pytest.raises(ValueError):
        ParameterSequence.constant(1.5)
    assert ParameterSequence.constant(0.0).divergent_sum_attested is False
    assert ScheduleSpec.constant(0.3).params(7) == StepParams(0.3, 0.3, 0.3)
    assert ScheduleSpec.constant(0.3, 0.6).params(0) == StepParams(0.3, 0.6, 0.6)


def test_scheme_names():
    assert SchemeKind.from_name("picards") == SchemeKind.PICARD_S
    assert SchemeKind.from_name("NewTwoStep") == SchemeKind.NEW_TWO_STEP
    assert SchemeKind.PICARD_S.consumes == frozenset({"beta", "gamma"})
    with pytest.raises(ValueError):
        SchemeKind.from_name("Halpern")
