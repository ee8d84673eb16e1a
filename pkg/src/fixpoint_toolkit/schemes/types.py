from enum import Enum, auto
from typing import FrozenSet


class SchemeKind(Enum):
    PICARD = "Picard"
    MANN = "Mann"
    ISHIKAWA = "Ishikawa"
    PICARD_MANN = "PicardMann"
    SP = "SP"
    CR = "CR"
    PICARD_S = "PicardS"
    NEW_TWO_STEP = "NewTwoStep"

    @property
    def consumes(self) -> FrozenSet[str]:
        """Names of the schedule sequences read by the update rule."""
        return _CONSUMED[self]

    @classmethod
    def from_name(cls, name: str) -> "SchemeKind":
        for kind in cls:
            if kind.value.lower() == name.lower():
                return kind
        raise ValueError(f"Unknown scheme: {name!r}. Available: {[k.value for k in cls]}")


_CONSUMED = {
    SchemeKind.PICARD: frozenset(),
    SchemeKind.MANN: frozenset({"alpha"}),
    SchemeKind.ISHIKAWA: frozenset({"alpha", "beta"}),
    SchemeKind.PICARD_MANN: frozenset({"alpha"}),
    SchemeKind.SP: frozenset({"alpha", "beta", "gamma"}),
    SchemeKind.CR: frozenset({"alpha", "beta", "gamma"}),
    # the rule reads beta and gamma only; alpha never enters x ↦ Ty
    SchemeKind.PICARD_S: frozenset({"beta", "gamma"}),
    SchemeKind.NEW_TWO_STEP: frozenset({"alpha", "beta"}),
}


class StopReason(Enum):
    TOLERANCE = auto()  # residual (or error, when p is known) at or below tol
    MAX_ITER = auto()
    DIVERGENCE = auto()  # non-finite value or norm above the guard


class DomainKind(Enum):
    INTERVAL = auto()
    BOX = auto()
    GRID = auto()
