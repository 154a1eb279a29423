"""Structured pass/fail records emitted by checks, builders and pipelines."""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import Protocol, runtime_checkable

from lipnav.utils.formatting import format_scalar


class Status(StrEnum):
    """Outcome of a check."""

    PASS = "pass"
    FAIL = "fail"

    @classmethod
    def of(cls, ok: bool) -> "Status":
        return cls.PASS if ok else cls.FAIL


@runtime_checkable
class _Reportable(Protocol):
    def to_dict(self) -> dict[str, object]: ...


def jsonable(value: object) -> object:
    """Convert report payloads to JSON-ready values.

    Fractions become "p/q" strings so exact values survive the round trip.
    """
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, StrEnum):
        return str(value)
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, _Reportable):
        return jsonable(value.to_dict())
    return value


@dataclass(frozen=True)
class ValidationReport:
    """Result of checking the metric axioms on a distance matrix."""

    status: Status
    axiom: str | None = None
    points: tuple[str, ...] = ()
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def summary(self) -> str:
        if self.passed:
            return "pass"
        names = ",".join(self.points)
        return f"{self.axiom} at ({names}): {self.detail}"

    def to_dict(self) -> dict[str, object]:
        return {
            "check": "validate",
            "status": str(self.status),
            "axiom": self.axiom,
            "points": list(self.points),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class Violation:
    """One instance where the two sides of an inequality are in the wrong order."""

    points: tuple[str, ...]
    lhs: Fraction
    rhs: Fraction
    label: str = ""

    def to_dict(self) -> dict[str, object]:
        data: dict[str, object] = {
            "points": list(self.points),
            "lhs": self.lhs,
            "rhs": self.rhs,
        }
        if self.label:
            data["label"] = self.label
        return data


@dataclass
class PropertyReport:
    """Certificate for a metric-inequality check or a witness build."""

    check: str
    parameters: dict[str, object]
    status: Status
    violations: list[Violation] = field(default_factory=list)
    witness: dict[str, object] | None = None
    mode: str = "exact"
    tolerances: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    extra: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def violating_points(self) -> list[tuple[str, ...]]:
        return [v.points for v in self.violations]

    def to_dict(self) -> dict[str, object]:
        return {
            "check": self.check,
            "parameters": jsonable(self.parameters),
            "status": str(self.status),
            "violations": jsonable(self.violations),
            "witness": jsonable(self.witness),
            "mode": self.mode,
            "tolerances": dict(self.tolerances),
            "notes": list(self.notes),
            "extra": jsonable(self.extra),
        }


@dataclass
class DiameterResult:
    """Optimum of a per-pair diameter computation with its maximizers."""

    kind: str
    value: Fraction
    pair: tuple[str, str] | None
    functions: dict[str, dict[str, Fraction]]
    mode: str
    tolerances: dict[str, float]
    convention: str = "closed slices {f : ||f|| <= 1, F(f) >= 1 - alpha}"
    parameters: dict[str, object] = field(default_factory=dict)
    extra: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return True

    def to_dict(self) -> dict[str, object]:
        return {
            "check": f"diameter-{self.kind}",
            "status": "pass",
            "value": jsonable(self.value),
            "value_float": float(self.value),
            "pair": list(self.pair) if self.pair else None,
            "functions": jsonable(self.functions),
            "mode": self.mode,
            "tolerances": dict(self.tolerances),
            "convention": self.convention,
            "parameters": jsonable(self.parameters),
            "extra": jsonable(self.extra),
        }


@dataclass
class BundleEntry:
    """One claimed outcome inside a reproduction bundle."""

    name: str
    expected: str
    observed: str
    passed: bool
    detail: dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict[str, object]:
        return {
            "name": self.name,
            "expected": self.expected,
            "observed": self.observed,
            "status": str(Status.of(self.passed)),
            "detail": jsonable(self.detail),
        }


@dataclass
class ReproductionBundle:
    """All certificates produced by one reproduction pipeline."""

    target: str
    parameters: dict[str, object]
    mode: str
    entries: list[BundleEntry] = field(default_factory=list)

    def add(
        self,
        name: str,
        expected: str,
        observed: str,
        passed: bool,
        detail: Mapping[str, object] | None = None,
    ) -> BundleEntry:
        entry = BundleEntry(name, expected, observed, passed, dict(detail or {}))
        self.entries.append(entry)
        return entry

    @property
    def status(self) -> Status:
        return Status.of(all(entry.passed for entry in self.entries))

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def first_failure(self) -> BundleEntry | None:
        return next((e for e in self.entries if not e.passed), None)

    def to_dict(self) -> dict[str, object]:
        return {
            "check": f"reproduce-{self.target}",
            "status": str(self.status),
            "parameters": jsonable(self.parameters),
            "mode": self.mode,
            "entries": [entry.to_dict() for entry in self.entries],
        }


def flatten_scalars(data: Mapping[str, object], prefix: str = "") -> list[tuple[str, str]]:
    """Flatten nested report dicts to (key, value) rows, keeping scalars only."""
    rows: list[tuple[str, str]] = []
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            rows.extend(flatten_scalars(value, f"{name}."))
        elif isinstance(value, Sequence) and not isinstance(value, str):
            continue
        else:
            rows.append((name, "" if value is None else str(value)))
    return rows
