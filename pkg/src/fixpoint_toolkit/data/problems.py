"""Named problem presets, so experiments need no external files."""
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union
import math

import numpy as np
from scipy.optimize import brentq

from ..delay.problem import DelayProblem
from ..schemes.spaces import DomainSpec, Point, SelfMap, as_point


@dataclass(frozen=True)
class ScalarProblem:
    """A self-map together with its default starting point."""
    self_map: SelfMap
    x0: Point


def cuberoot_map() -> SelfMap:
    """T(x) = (x + 2)^(1/3) on [0, 4]; p is the real root of x³ − x − 2."""
    def T(x):
        return float(np.cbrt(x + 2.0))
    p = brentq(lambda x: T(x) - x, 1.0, 2.0, xtol=1e-15)
    return SelfMap(T, DomainSpec.interval(0.0, 4.0), p, name="cuberoot")


def affine_map(slope: float, offset: float = 0.0, lo: float = -1.0, hi: float = 1.0,
               name: Optional[str] = None) -> SelfMap:
    """T(x) = slope·x + offset on [lo, hi]; fixed point known when |slope| < 1."""
    if not (math.isfinite(slope) and math.isfinite(offset)):
        raise ValueError("Affine map coefficients must be finite")
    def T(x):
        return slope * x + offset
    p = offset / (1 - slope) if abs(slope) < 1 else None
    return SelfMap(T, DomainSpec.interval(lo, hi), p, name=name or f"affine-{slope:g}-{offset:g}")


def linear_map(delta: float, lo: float = -1.0, hi: float = 1.0) -> SelfMap:
    """T(x) = δx with p = 0."""
    if not math.isfinite(delta):
        raise ValueError(f"Slope of a linear map must be finite, got {delta!r}")
    def T(x):
        return delta * x
    return SelfMap(T, DomainSpec.interval(lo, hi), 0.0, name=f"linear-{delta:g}")


def translation_map() -> SelfMap:
    """T(x) = x + 1 on the real line: no fixed point."""
    return SelfMap(lambda x: x + 1.0, DomainSpec.real_line(), name="translation")


def identity_map() -> SelfMap:
    return SelfMap(lambda x: x, DomainSpec.interval(-1.0, 1.0), name="identity")


def planar_map() -> SelfMap:
    """T(x) = x/2 + (1/4, −1/4) on the box [−2, 2]², p = (1/2, −1/2)."""
    shift = np.array([0.25, -0.25])
    return SelfMap(lambda x: 0.5 * x + shift, DomainSpec.box([-2.0, -2.0], [2.0, 2.0]),
                   np.array([0.5, -0.5]), name="planar")


def scalar_problem(spec: Union[str, Dict[str, Any]]) -> ScalarProblem:
    """Resolve a built-in name or an inline {"family": ...} object.

    Built-ins: "cuberoot", "linear-<δ>", "translation", "identity", "planar".
    Inline families: "linear" (delta, lo, hi), "affine" (slope, offset, lo,
    hi), "cuberoot".

    Raises:
        ValueError: For unknown names, families or parameters.
    """
    if isinstance(spec, dict):
        params = dict(spec)
        family = params.pop("family", None)
        x0 = params.pop("x0", None)
        if family == "linear":
            T = linear_map(float(params.pop("delta")), **_floats(params, "lo", "hi"))
        elif family == "affine":
            T = affine_map(float(params.pop("slope")), **_floats(params, "offset", "lo", "hi"))
        elif family == "cuberoot":
            T = cuberoot_map()
        else:
            raise ValueError(f"Unknown problem family: {family!r}")
        if params:
            raise ValueError(f"Unknown problem parameters: {sorted(params)}")
        start = as_point(x0) if x0 is not None else _default_start(T)
        return ScalarProblem(T, start)

    if spec == "cuberoot":
        return ScalarProblem(cuberoot_map(), 1.99)
    if spec.startswith("linear-"):
        try:
            delta = float(spec[len("linear-"):])
        except ValueError:
            raise ValueError(f"Cannot read δ from problem name {spec!r}")
        return ScalarProblem(linear_map(delta), 1.0)
    if spec == "translation":
        return ScalarProblem(translation_map(), 0.0)
    if spec == "identity":
        return ScalarProblem(identity_map(), 0.5)
    if spec == "planar":
        return ScalarProblem(planar_map(), np.array([2.0, 2.0]))
    raise ValueError(f"Unknown problem: {spec!r}")


def _floats(params: Dict[str, Any], *names: str) -> Dict[str, float]:
    return {name: float(params.pop(name)) for name in names if name in params}


def _default_start(T: SelfMap) -> Point:
    hi = T.domain.upper[0]
    return float(hi) if math.isfinite(hi) else 0.0


DELAY_PRESETS = {
    "negfeedback": dict(f=lambda t, x, y: -y, delta=1.0),
    "mixed-feedback": dict(f=lambda t, x, y: -x - 0.5 * y, delta=1.0),
    "still": dict(f=lambda t, x, y: 0.0, delta=0.01),
}


def delay_problem(name: str, **overrides: Optional[float]) -> DelayProblem:
    """A preset delay problem with φ ≡ 1, t0 = 0, b = 0.45, τ = 1.

    Presets: "negfeedback" (f = −x(t−τ), exact 1 − t), "mixed-feedback"
    (f = −x(t) − x(t−τ)/2, exact −1/2 + 3/2·e^{−t}), "still" (f ≡ 0).
    Keyword overrides t0, b, tau, delta, L replace the preset values; None
    keeps the preset.

    Raises:
        ValueError: For an unknown preset.
        HypothesisViolationError: If the overrides break 2δ(b − t0) < 1.
    """
    if name not in DELAY_PRESETS:
        raise ValueError(f"Unknown delay problem: {name!r}. Available: {sorted(DELAY_PRESETS)}")
    preset = DELAY_PRESETS[name]
    values = dict(t0=0.0, b=0.45, tau=1.0, delta=preset["delta"], L=0.0)
    values.update({key: float(value) for key, value in overrides.items() if value is not None})
    return DelayProblem(f=preset["f"], phi=lambda t: 1.0, name=name, **values)


def exact_delay_solution(name: str, t: np.ndarray) -> np.ndarray:
    """Closed-form solution of a preset on [t0, b] with t0 = 0 (first delay interval)."""
    t = np.asarray(t, dtype=float)
    if name == "negfeedback":
        return 1.0 - t
    if name == "mixed-feedback":
        return -0.5 + 1.5 * np.exp(-t)
    if name == "still":
        return np.ones_like(t)
    raise ValueError(f"No closed form for {name!r}")
