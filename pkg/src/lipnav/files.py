"""Loading and writing of space, function, free-vector and family files, and
report emission in json, csv or text."""

import csv
import hashlib
import io
import json
import os
import tempfile
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.table import Table

from lipnav.constants import REPORT_SCHEMA_VERSION
from lipnav.core.freespace import FreeVector
from lipnav.core.lipspace import LipschitzFunction
from lipnav.core.metric import FiniteMetricSpace, validate
from lipnav.core.properties import TrapezoidWitness, WitnessFamily
from lipnav.core.reports import flatten_scalars, jsonable
from lipnav.errors import MetricAxiomError, StructuralError
from lipnav.utils.formatting import format_scalar
from lipnav.utils.rationals import Scalar, as_fraction

FORMATS = ("json", "csv", "text")


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise StructuralError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc


def _require_object(data: object, what: str) -> dict[str, Any]:
    if not isinstance(data, dict):
        raise StructuralError(f"{what} must be a JSON object")
    return data


def _scalar(value: object, where: str) -> Scalar:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        # floats would lose exactness; rationals travel as strings
        raise StructuralError(f"{where}: expected an integer or rational string, got {value!r}")
    return value


def space_from_dict(data: Mapping[str, Any]) -> FiniteMetricSpace:
    """Build and validate a space from {"points", "base", "dist"}.

    Args:
        data: Parsed space document

    Returns:
        The validated space

    Raises:
        StructuralError: If fields are missing or malformed
        MetricAxiomError: If the matrix is not a metric
    """
    data = _require_object(data, "space")
    missing = [key for key in ("points", "dist") if key not in data]
    if missing:
        raise StructuralError(f"space is missing {', '.join(missing)}")
    points = data["points"]
    dist = data["dist"]
    if not isinstance(points, list) or not isinstance(dist, list):
        raise StructuralError("points and dist must be lists")
    rows = []
    for i, row in enumerate(dist):
        if not isinstance(row, list):
            raise StructuralError(f"dist row {i} must be a list")
        rows.append([_scalar(x, f"dist[{i}]") for x in row])
    base = data.get("base", 0)
    if isinstance(base, bool) or not isinstance(base, (int, str)):
        raise StructuralError(f"base must be an index or a point name, got {base!r}")
    space = FiniteMetricSpace.create([str(p) for p in points], rows, base)
    report = validate(space)
    if not report.passed:
        raise MetricAxiomError(report)
    return space


def space_to_dict(space: FiniteMetricSpace) -> dict[str, object]:
    return {
        "points": list(space.points),
        "base": space.base,
        "dist": [[format_scalar(x) for x in row] for row in space.dist],
    }


def space_digest(space: FiniteMetricSpace) -> str:
    """sha256 of the canonical space JSON (sorted keys, no whitespace)."""
    text = json.dumps(space_to_dict(space), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def load_space(path: Path) -> FiniteMetricSpace:
    """Load a space file; distances are parsed exactly."""
    return space_from_dict(_read_json(path))


def dump_space(space: FiniteMetricSpace, path: Path) -> None:
    write_atomic(path, json.dumps(space_to_dict(space), indent=2) + "\n")


def _resolve_space(
    data: Mapping[str, Any], space: FiniteMetricSpace | None, path: Path
) -> FiniteMetricSpace:
    ref = data.get("space")
    if isinstance(ref, dict):
        inline = space_from_dict(ref)
        if space is not None and inline != space:
            raise StructuralError(f"{path}: inline space differs from the loaded space")
        return inline
    if space is None:
        raise StructuralError(f"{path}: needs an inline space or a loaded --space")
    if ref is not None and ref != space_digest(space):
        raise StructuralError(f"{path}: space digest {ref} does not match the loaded space")
    return space


def _values(data: Mapping[str, Any], key: str, path: Path) -> dict[str, Scalar]:
    raw = data.get(key)
    if not isinstance(raw, dict):
        raise StructuralError(f"{path}: '{key}' must be an object of point -> rational")
    return {str(k): _scalar(v, f"{key}[{k}]") for k, v in raw.items()}


def load_function(path: Path, space: FiniteMetricSpace | None = None) -> LipschitzFunction:
    """Load {"space": <digest or inline>, "values": {point: rational}}.

    Unlisted points get value 0; a nonzero value at the base is rejected.
    """
    data = _require_object(_read_json(path), str(path))
    resolved = _resolve_space(data, space, path)
    return LipschitzFunction.from_mapping(resolved, _values(data, "values", path))


def load_free_vector(path: Path, space: FiniteMetricSpace) -> FreeVector:
    """Load {"weights": {point: rational}}; the base weight is implied."""
    data = _require_object(_read_json(path), str(path))
    resolved = _resolve_space(data, space, path)
    return FreeVector.create(resolved, _values(data, "weights", path))


def load_family(
    path: Path, space: FiniteMetricSpace, epsilon: Scalar | None = None
) -> WitnessFamily:
    """Load {"epsilon": r, "members": [{"A": [...], "u": p, "v": q}, ...]}.

    `epsilon` overrides the file's value.
    """
    data = _require_object(_read_json(path), str(path))
    members = data.get("members")
    if not isinstance(members, list):
        raise StructuralError(f"{path}: 'members' must be a list")
    eps = as_fraction(epsilon if epsilon is not None else _scalar(data.get("epsilon", 0), "epsilon"))
    witnesses = []
    for i, item in enumerate(members):
        item = _require_object(item, f"{path}: member {i}")
        try:
            A, u, v = item["A"], item["u"], item["v"]
        except KeyError as exc:
            raise StructuralError(f"{path}: member {i} lacks {exc.args[0]}") from None
        witnesses.append(TrapezoidWitness.create(space, A, u, v, eps))
    return WitnessFamily(tuple(witnesses), eps)


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def document(payload: Mapping[str, object], run: Mapping[str, object]) -> dict[str, object]:
    """Attach schema version and run settings to a report payload."""
    body = jsonable(payload)
    assert isinstance(body, dict)
    out: dict[str, object] = {"schema": REPORT_SCHEMA_VERSION, **body}
    out["run"] = jsonable(run)
    return out


def render(doc: Mapping[str, object], fmt: str) -> str:
    """Render a report document as json, csv (scalar fields only) or text."""
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    rows = flatten_scalars(doc)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["field", "value"])
        writer.writerows(rows)
        return buffer.getvalue()
    if fmt == "text":
        table = Table(title=str(doc.get("check", "report")), show_header=True)
        table.add_column("field", style="bold")
        table.add_column("value")
        for key, value in rows:
            style = {"pass": "green", "fail": "red"}.get(value, "")
            table.add_row(key, f"[{style}]{value}[/]" if style else value)
        buffer = io.StringIO()
        Console(file=buffer, width=120, color_system=None).print(table)
        return buffer.getvalue()
    raise StructuralError(f"unknown format {fmt!r}; use one of {', '.join(FORMATS)}")


def write_atomic(path: Path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def emit(doc: Mapping[str, object], fmt: str, output: Path | None = None) -> str:
    """Render `doc`; write it to `output` when given. Returns the rendered text."""
    text = render(doc, fmt)
    if output is not None:
        write_atomic(output, text)
    return text
