"""Shared fixtures and the extended-precision oracle."""
from decimal import Decimal, getcontext

import pytest

from fixpoint_toolkit.data.problems import cuberoot_map, linear_map
from fixpoint_toolkit.schemes.schedules import ScheduleSpec

getcontext().prec = 50


def decimal_cuberoot_root() -> Decimal:
    """Real root of x³ − x − 2 by bisection on [1, 2], to 1e-40."""
    lo, hi = Decimal(1), Decimal(2)
    while hi - lo > Decimal("1e-40"):
        mid = (lo + hi) / 2
        if mid ** 3 - mid - 2 > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def decimal_T(x: Decimal) -> Decimal:
    """(x + 2)^(1/3) at 50 digits."""
    return (x + 2) ** (Decimal(1) / Decimal(3))


def decimal_mix(a: Decimal, x: Decimal, y: Decimal) -> Decimal:
    return (1 - a) * x + a * y


@pytest.fixture(scope="session")
def cuberoot_root() -> float:
    return float(decimal_cuberoot_root())


@pytest.fixture
def cuberoot():
    return cuberoot_map()


@pytest.fixture
def half_map():
    return linear_map(0.5)


@pytest.fixture
def quarter_schedule() -> ScheduleSpec:
    return ScheduleSpec.constant(0.25)
