from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO, Union
import json
import sys

from ..experiments.stability import PerturbationKind
from ..schemes.schedules import ParameterSequence, ScheduleSpec
from ..schemes.types import SchemeKind

COMMANDS = ("compare", "stability", "dde", "bounds", "certify")

DEFAULT_PROBLEMS = {
    "compare": "cuberoot",
    "stability": "cuberoot",
    "certify": "cuberoot",
    "dde": "negfeedback",
    "bounds": None,
}


class ConfigError(ValueError):
    """The run configuration is malformed or out of range."""


@dataclass
class RunConfig:
    """Flat run configuration, one field per accepted JSON key."""
    command: str
    problem: Union[str, Dict[str, Any], None] = None
    x0: Union[float, List[float], None] = None
    schemes: List[str] = field(default_factory=lambda: [kind.value for kind in SchemeKind])
    schedule: Dict[str, Any] = field(default_factory=dict)
    tol: float = 1e-12
    max_iter: int = 100
    stop_on_tol: bool = True
    horizon: int = 200
    perturbations: List[str] = field(default_factory=lambda: ["decaying", "constant"])
    c: float = 0.1
    q: float = 2.0
    h: float = 0.01
    t0: Optional[float] = None
    b: Optional[float] = None
    tau: Optional[float] = None
    delta: Optional[float] = None
    L: Optional[float] = None
    initial_err: float = 1.0
    n_max: int = 20
    samples: int = 10_000
    L_grid: List[float] = field(default_factory=lambda: [0.0])
    seed: int = 0
    output_dir: str = "."
    html_report: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """Check types and ranges of every field.

        Raises:
            ConfigError: On the first invalid field.
        """
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.problem is None:
            self.problem = DEFAULT_PROBLEMS[self.command]
        if self.problem is not None and not isinstance(self.problem, (str, dict)):
            raise ConfigError("problem must be a name or an inline object")

        _require_number("tol", self.tol, positive=True)
        _require_number("c", self.c, minimum=0.0)
        _require_number("q", self.q)
        _require_number("h", self.h, positive=True)
        _require_number("initial_err", self.initial_err, minimum=0.0)
        for name in ("t0", "b", "tau", "delta", "L"):
            if getattr(self, name) is not None:
                _require_number(name, getattr(self, name))
        _require_int("max_iter", self.max_iter, minimum=1)
        _require_int("horizon", self.horizon, minimum=20)
        _require_int("n_max", self.n_max, minimum=0)
        _require_int("samples", self.samples, minimum=2)
        _require_int("seed", self.seed, minimum=0)
        for name in ("stop_on_tol", "html_report"):
            if not isinstance(getattr(self, name), bool):
                raise ConfigError(f"{name} must be true or false")
        if not isinstance(self.output_dir, str) or not self.output_dir:
            raise ConfigError("output_dir must be a non-empty path")

        if self.x0 is not None:
            if isinstance(self.x0, list):
                for value in self.x0:
                    _require_number("x0", value)
            else:
                _require_number("x0", self.x0)

        if not isinstance(self.schemes, list) or not self.schemes:
            raise ConfigError("schemes must be a non-empty list")
        try:
            self.scheme_kinds()
        except ValueError as error:
            raise ConfigError(str(error))

        if not isinstance(self.perturbations, list) or not self.perturbations:
            raise ConfigError("perturbations must be a non-empty list")
        valid_kinds = {kind.value for kind in PerturbationKind}
        unknown = [p for p in self.perturbations if p not in valid_kinds]
        if unknown:
            raise ConfigError(f"Unknown perturbations {unknown}; expected {sorted(valid_kinds)}")
        if "decaying" in self.perturbations and self.q <= 1:
            raise ConfigError("Decaying perturbations need q > 1")

        if not isinstance(self.L_grid, list) or not self.L_grid:
            raise ConfigError("L_grid must be a non-empty list")
        for value in self.L_grid:
            _require_number("L_grid", value, minimum=0.0)

        if not isinstance(self.schedule, dict):
            raise ConfigError("schedule must be an object with alpha/beta/gamma entries")
        self.schedule_spec()
        needed = {
            "compare": self.max_iter,
            "dde": self.max_iter,
            "stability": self.horizon,
            "bounds": self.n_max + 1,
        }.get(self.command, 0)
        for name, literal in self.schedule.items():
            if isinstance(literal, list) and len(literal) < needed:
                raise ConfigError(
                    f"schedule.{name} has {len(literal)} entries, {self.command} reads {needed}"
                )

        if self.command == "bounds":
            if self.delta is None or not 0.0 < self.delta < 1.0:
                raise ConfigError(f"bounds needs delta in (0,1), got {self.delta}")

    def scheme_kinds(self) -> List[SchemeKind]:
        return [SchemeKind.from_name(name) for name in self.schemes]

    def schedule_spec(self) -> ScheduleSpec:
        """Build the ScheduleSpec from the schedule literal.

        Each of alpha, beta, gamma is a number (constant), "harmonic", or a
        list of numbers (table); missing entries default to 1/4.
        """
        unknown = set(self.schedule) - {"alpha", "beta", "gamma"}
        if unknown:
            raise ConfigError(f"Unknown schedule keys: {sorted(unknown)}")
        sequences = {}
        for name in ("alpha", "beta", "gamma"):
            literal = self.schedule.get(name, 0.25)
            try:
                sequences[name] = _sequence(literal)
            except (TypeError, ValueError) as error:
                raise ConfigError(f"schedule.{name}: {error}")
        return ScheduleSpec(**sequences)


def _sequence(literal: Any) -> ParameterSequence:
    if literal == "harmonic":
        return ParameterSequence.harmonic()
    if isinstance(literal, list):
        for value in literal:
            _require_number("table value", value)
        return ParameterSequence.from_table(literal)
    _require_number("value", literal)
    return ParameterSequence.constant(literal)


def _require_number(name: str, value: Any, positive: bool = False,
                    minimum: Optional[float] = None) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{name} must be positive, got {value}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}")


def _require_int(name: str, value: Any, minimum: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}")


@dataclass
class ConfigLoader:
    """Loads a RunConfig from a JSON file, or from stdin when source is '-'.

    With no source every key takes its default.
    """
    source: Optional[str]
    stdin: Optional[TextIO] = field(default=None, repr=False)

    def load_document(self) -> Dict[str, Any]:
        """Read and decode the JSON document.

        Raises:
            ConfigError: If the file is missing, is not valid JSON, or is not
                a JSON object.
        """
        if self.source is None:
            return {}
        try:
            if self.source == "-":
                text = (self.stdin or sys.stdin).read()
            else:
                path = Path(self.source)
                if not path.exists():
                    raise ConfigError(f"Config file not found at {path}")
                text = path.read_text(encoding="utf-8")
            document = json.loads(text)
        except json.JSONDecodeError as error:
            raise ConfigError(f"Config is not valid JSON: {error}")
        if not isinstance(document, dict):
            raise ConfigError("Config must be a JSON object")
        return document

    def load(self, command: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """Load, merge command-line overrides, and validate.

        Args:
            command: Command given on the command line; a "command" key in
                the document must agree with it.
            overrides: Values from command-line flags (None entries ignored).

        Raises:
            ConfigError: On unknown keys or invalid values.
        """
        document = self.load_document()
        known = {f.name for f in fields(RunConfig)}
        unknown = sorted(set(document) - known)
        if unknown:
            raise ConfigError(f"Unknown config keys: {unknown}")
        if document.get("command", command) != command:
            raise ConfigError(
                f"Config is for {document['command']!r} but {command!r} was requested"
            )
        document["command"] = command
        for key, value in (overrides or {}).items():
            if value is not None:
                document[key] = value
        return RunConfig(**document)
