from dataclasses import dataclass, field
from enum import Enum, auto
from typing import NamedTuple, Optional, Tuple


class SequenceKind(Enum):
    CONSTANT = auto()
    HARMONIC = auto()  # 1/(n+1)
    TABLE = auto()


class StepParams(NamedTuple):
    alpha: float
    beta: float
    gamma: float


@dataclass(frozen=True)
class ParameterSequence:
    """One control sequence n ↦ value in [0,1], indexed from n=0.

    Attributes:
        kind: Constant, harmonic 1/(n+1), or an explicit table.
        value: The constant for kind=CONSTANT.
        table: Values for kind=TABLE; index n must lie inside the table.
        divergent_sum_attested: Whether Σ values = ∞. Derived for constant
            and harmonic sequences, supplied by the caller for tables.
    """
    kind: SequenceKind
    value: float = 0.0
    table: Tuple[float, ...] = ()
    divergent_sum_attested: Optional[bool] = None

    def __post_init__(self):
        if self.kind == SequenceKind.CONSTANT:
            if not 0.0 <= self.value <= 1.0:
                raise ValueError(f"Constant parameter must lie in [0,1], got {self.value}")
            attested = self.value > 0
        elif self.kind == SequenceKind.HARMONIC:
            attested = True
        else:
            if not self.table:
                raise ValueError("A table sequence needs at least one value")
            bad = [v for v in self.table if not 0.0 <= v <= 1.0]
            if bad:
                raise ValueError(f"Table values must lie in [0,1], got {bad}")
            attested = bool(self.divergent_sum_attested)
        object.__setattr__(self, "table", tuple(float(v) for v in self.table))
        object.__setattr__(self, "divergent_sum_attested", attested)

    @classmethod
    def constant(cls, value: float) -> "ParameterSequence":
        return cls(SequenceKind.CONSTANT, value=float(value))

    @classmethod
    def harmonic(cls) -> "ParameterSequence":
        return cls(SequenceKind.HARMONIC)

    @classmethod
    def from_table(cls, values, divergent_sum_attested: bool = False) -> "ParameterSequence":
        return cls(SequenceKind.TABLE, table=tuple(values),
                   divergent_sum_attested=divergent_sum_attested)

    def __call__(self, n: int) -> float:
        if n < 0:
            raise ValueError("Schedule index cannot be negative")
        if self.kind == SequenceKind.CONSTANT:
            return self.value
        if self.kind == SequenceKind.HARMONIC:
            return 1.0 / (n + 1)
        if n >= len(self.table):
            raise ValueError(f"Table schedule has {len(self.table)} values, index {n} requested")
        return self.table[n]


@dataclass(frozen=True)
class ScheduleSpec:
    """The three control sequences {α_n}, {β_n}, {γ_n} shared by all schemes."""
    alpha: ParameterSequence = field(default_factory=lambda: ParameterSequence.constant(0.5))
    beta: ParameterSequence = field(default_factory=lambda: ParameterSequence.constant(0.5))
    gamma: ParameterSequence = field(default_factory=lambda: ParameterSequence.constant(0.5))

    @classmethod
    def constant(cls, alpha: float, beta: Optional[float] = None,
                 gamma: Optional[float] = None) -> "ScheduleSpec":
        beta = alpha if beta is None else beta
        gamma = beta if gamma is None else gamma
        return cls(ParameterSequence.constant(alpha),
                   ParameterSequence.constant(beta),
                   ParameterSequence.constant(gamma))

    @classmethod
    def harmonic(cls) -> "ScheduleSpec":
        h = ParameterSequence.harmonic()
        return cls(h, h, h)

    def params(self, n: int) -> StepParams:
        return StepParams(self.alpha(n), self.beta(n), self.gamma(n))
