"""Reading predictions and annotations, writing reports.

Predictions CSV::

    instance_id,true_label,score:<label1>,...,score:<labelK>

The label set, and its order, is taken from the score columns.

Annotations CSV starts with a scale declaration, then one row per rater,
case and decision::

    #scales confidence=<max> complexity=<max>
    rater_id,instance_id,decision,assigned_label,confidence,complexity

Reports are rendered deterministically: keys sorted, floats with at most 12
significant digits and no trailing zeros, newline-terminated.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

from .analysis import SweepTable
from .core import (
    ComplexityAssignment,
    Dataset,
    Instance,
    LabelSet,
    NormalizationMode,
    PriorityVector,
    RaterAnnotation,
    validate_dataset,
)
from .elicitation import AnnotationSet
from .errors import (
    DuplicateAnnotation,
    InvalidComplexity,
    InvalidPriorities,
    OutOfScaleOrdinal,
    ParseError,
    UnknownInstance,
    ValidationError,
    Violation,
)

SCORE_PREFIX = "score:"
ANNOTATION_COLUMNS = ("rater_id", "instance_id", "decision", "assigned_label", "confidence",
                      "complexity")
_SCALES = re.compile(r"^#\s*scales\s+(.*)$")

ReportFormat = Literal["json", "tsv"]


def file_digest(path: str | Path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_rows(path: str | Path) -> list[tuple[int, list[str]]]:
    text = Path(path).read_text(encoding="utf-8-sig")
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        rows.append((lineno, [cell.strip() for cell in row]))
    return rows


def _parse_float(text: str, row: int, column: str, path) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: {text!r} is not a number", row, str(path)) from None
    if not math.isfinite(value):
        raise ParseError(f"column {column!r}: non-finite value {text!r}", row, str(path))
    return value


def parse_predictions(path: str | Path, mode: NormalizationMode = "soft") -> Dataset:
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty predictions file", path=str(path))
    header_line, header = rows[0]
    if header[:2] != ["instance_id", "true_label"]:
        raise ParseError("header must start with 'instance_id,true_label'", header_line, str(path))
    score_columns = header[2:]
    for col in score_columns:
        if not col.startswith(SCORE_PREFIX) or len(col) == len(SCORE_PREFIX):
            raise ParseError(f"unexpected column {col!r}; score columns look like "
                             f"'{SCORE_PREFIX}<label>'", header_line, str(path))
    labels = tuple(col[len(SCORE_PREFIX):] for col in score_columns)
    if len(labels) < 2:
        raise ParseError("need score columns for at least two labels", header_line, str(path))
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate score columns", header_line, str(path))
    label_set = LabelSet(labels)

    instances, lines = [], []
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno, str(path))
        rid, y = row[0], row[1]
        if y not in label_set:
            raise ParseError(f"missing score column '{SCORE_PREFIX}{y}' for label {y!r}",
                             lineno, str(path))
        scores = tuple(_parse_float(v, lineno, c, path) for v, c in zip(row[2:], score_columns))
        instances.append(Instance(rid, y, scores))
        lines.append(lineno)
    dataset = Dataset(label_set, tuple(instances))
    try:
        return validate_dataset(dataset, mode)
    except ValidationError as exc:
        remapped = [Violation(v.code, v.message, lines[v.row - 1] if v.row else None)
                    for v in exc.violations]
        raise ValidationError(remapped) from None


def format_predictions(dataset: Dataset) -> str:
    """CSV text for ``dataset``; floats use shortest round-trip repr."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["instance_id", "true_label",
                     *(SCORE_PREFIX + l for l in dataset.label_set)])
    for x in dataset.instances:
        writer.writerow([x.id, x.true_label, *(repr(s) for s in x.scores)])
    return out.getvalue()


def parse_gold(path: str | Path) -> dict[str, dict[str, str] | str]:
    """``instance_id,label`` or ``instance_id,decision,label``."""
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty gold file", path=str(path))
    header_line, header = rows[0]
    if header not in (["instance_id", "label"], ["instance_id", "decision", "label"]):
        raise ParseError("gold header must be 'instance_id,label' or "
                         "'instance_id,decision,label'", header_line, str(path))
    gold: dict[str, Any] = {}
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno, str(path))
        if len(header) == 2:
            gold[row[0]] = row[1]
        else:
            entry = gold.setdefault(row[0], {})
            if isinstance(entry, str):
                raise ParseError(f"instance {row[0]!r} mixes plain and per-decision gold",
                                 lineno, str(path))
            entry[row[1]] = row[2]
    return gold


def gold_from_dataset(dataset: Dataset) -> dict[str, str]:
    return {x.id: x.true_label for x in dataset.instances}


def _parse_scales(line: str, lineno: int, path) -> dict[str, int]:
    m = _SCALES.match(line.strip())
    if not m:
        raise ParseError("first line must be '#scales confidence=<max> complexity=<max>'",
                         lineno, str(path))
    scales = {}
    for item in m.group(1).split():
        key, _, value = item.partition("=")
        try:
            scales[key] = int(value)
        except ValueError:
            raise ParseError(f"bad scale declaration {item!r}", lineno, str(path)) from None
    for key in ("confidence", "complexity"):
        if scales.get(key, 0) < 1:
            raise ParseError(f"missing or invalid {key} scale", lineno, str(path))
    return scales


def _parse_ordinal(text: str, lineno: int, column: str, scale_max: int, path) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"column {column!r}: {text!r} is not an integer", lineno,
                         str(path)) from None
    if not 1 <= value <= scale_max:
        raise OutOfScaleOrdinal(f"{column} {value} outside the declared 1..{scale_max} scale",
                                lineno, str(path))
    return value


def parse_annotations(path: str | Path, gold: Mapping[str, Any]) -> AnnotationSet:
    text = Path(path).read_text(encoding="utf-8-sig")
    lines = text.splitlines()
    first = next((i for i, l in enumerate(lines) if l.strip()), None)
    if first is None:
        raise ParseError("empty annotations file", path=str(path))
    scales = _parse_scales(lines[first], first + 1, path)
    rows = [(n, r) for n, r in _read_rows(path) if n > first + 1]
    if not rows or rows[0][1] != list(ANNOTATION_COLUMNS):
        where = rows[0][0] if rows else first + 2
        raise ParseError("header must be " + ",".join(ANNOTATION_COLUMNS), where, str(path))

    grouped: dict[tuple[str, str], dict[str, Any]] = {}
    for lineno, row in rows[1:]:
        if len(row) != len(ANNOTATION_COLUMNS):
            raise ParseError(f"expected {len(ANNOTATION_COLUMNS)} fields, got {len(row)}",
                             lineno, str(path))
        rater, instance, decision, label, conf_text, cplx_text = row
        if instance not in gold:
            raise UnknownInstance(f"instance {instance!r} not in the gold standard", lineno,
                                  str(path))
        confidence = _parse_ordinal(conf_text, lineno, "confidence", scales["confidence"], path)
        complexity = _parse_ordinal(cplx_text, lineno, "complexity", scales["complexity"], path)
        entry = grouped.setdefault((rater, instance), {
            "labels": {}, "confidence": confidence, "complexity": complexity, "line": lineno})
        if decision in entry["labels"]:
            raise DuplicateAnnotation(
                f"rater {rater!r} already annotated decision {decision!r} of {instance!r} "
                f"(line {entry['line']})", lineno, str(path))
        if (confidence, complexity) != (entry["confidence"], entry["complexity"]):
            raise ParseError(f"rater {rater!r} gave {instance!r} different confidence/complexity "
                             "ratings across decisions", lineno, str(path))
        entry["labels"][decision] = label
    annotations = tuple(
        RaterAnnotation(rater, instance, e["labels"], e["confidence"], e["complexity"])
        for (rater, instance), e in grouped.items())
    return AnnotationSet(annotations, scales["confidence"], scales["complexity"], gold)


def parse_priorities(spec: str, label_set: LabelSet | None = None) -> PriorityVector:
    """``neg=0.52,pos=0.48`` or ``@path`` to a JSON object (either the map
    itself or a parameters file with a ``priorities`` key)."""
    if spec.startswith("@"):
        data = json.loads(Path(spec[1:]).read_text(encoding="utf-8"))
        if isinstance(data, dict) and "priorities" in data:
            data = data["priorities"]
        if not isinstance(data, dict):
            raise InvalidPriorities(f"{spec[1:]}: expected a JSON object of label weights")
        weights = {str(k): float(v) for k, v in data.items()}
    else:
        weights = {}
        for item in spec.split(","):
            label, sep, value = item.partition("=")
            if not sep:
                raise InvalidPriorities(f"bad priority item {item!r}; expected label=weight")
            try:
                weights[label.strip()] = float(value)
            except ValueError:
                raise InvalidPriorities(f"bad priority weight {value!r}") from None
    vector = PriorityVector(weights)
    if label_set is not None:
        vector.as_array(label_set)
    return vector


def parse_complexity(spec: str) -> ComplexityAssignment:
    """``const:<v>``, ``@file.csv`` (``instance_id,complexity``) or
    ``@file.json`` (an id-to-weight object, or a parameters file with a
    ``complexity`` key)."""
    if spec.startswith("const:"):
        try:
            return ComplexityAssignment.const(float(spec[len("const:"):]))
        except ValueError:
            raise InvalidComplexity(f"bad constant complexity {spec!r}") from None
    if not spec.startswith("@"):
        raise InvalidComplexity(f"complexity must be 'const:<v>' or '@file', got {spec!r}")
    path = Path(spec[1:])
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict) and "complexity" in data:
            data = data["complexity"]
        if not isinstance(data, dict):
            raise InvalidComplexity(f"{path}: expected a JSON object of instance weights")
        return ComplexityAssignment({str(k): float(v) for k, v in data.items()})
    rows = _read_rows(path)
    if not rows or rows[0][1] != ["instance_id", "complexity"]:
        raise ParseError("complexity header must be 'instance_id,complexity'", 1, str(path))
    values = {}
    for lineno, row in rows[1:]:
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", lineno, str(path))
        values[row[0]] = _parse_float(row[1], lineno, "complexity", path)
    return ComplexityAssignment(values)


# --- reports ----------------------------------------------------------------

@dataclass
class Report:
    metadata: dict[str, Any] = field(default_factory=dict)
    metrics: dict[str, Any] = field(default_factory=dict)
    parameters: dict[str, Any] = field(default_factory=dict)
    sweeps: list[SweepTable] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)

    def to_document(self) -> dict[str, Any]:
        doc = {
            "metadata": self.metadata,
            "metrics": self.metrics,
            "parameters": self.parameters,
            "sweeps": [sweep_to_document(s) for s in self.sweeps],
        }
        doc.update(self.extra)
        return doc


def sweep_to_document(table: SweepTable) -> dict[str, Any]:
    names = (*table.axis_names, *table.value_names)
    return {
        "name": table.name,
        "axes": list(table.axis_names),
        "values": list(table.value_names),
        "meta": table.meta,
        "rows": [dict(zip(names, (*point, *values))) for point, values in table.rows],
    }


def format_number(x: float | int) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return "null"
    text = format(x, ".12g")
    return "0" if text == "-0" else text


def _render_json(obj: Any, indent: int) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int, float)) or hasattr(obj, "dtype"):
        return format_number(obj.item() if hasattr(obj, "item") else obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {_render_json(obj[k], indent + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [inner + _render_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_json(obj: Any) -> str:
    return _render_json(obj, 0) + "\n"


def _flatten(prefix: str, obj: Any, out: list[tuple[str, str]]) -> None:
    if isinstance(obj, Mapping):
        for k in sorted(obj, key=str):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    elif isinstance(obj, str):
        out.append((prefix, obj))
    elif obj is None:
        out.append((prefix, ""))
    else:
        out.append((prefix, format_number(obj.item() if hasattr(obj, "item") else obj)))


def render_tsv(report: Report) -> str:
    lines: list[str] = []
    blocks = [("metadata", report.metadata), ("parameters", report.parameters),
              ("metrics", report.metrics)]
    blocks += [(k, report.extra[k]) for k in sorted(report.extra)]
    for title, block in blocks:
        lines.append(f"[{title}]")
        flat: list[tuple[str, str]] = []
        _flatten("", block, flat)
        lines.extend(f"{k}\t{v}" for k, v in flat)
        lines.append("")
    for table in report.sweeps:
        lines.append(f"[sweep {table.name}]")
        lines.append("\t".join((*table.axis_names, *table.value_names)))
        for point, values in table.rows:
            lines.append("\t".join(format_number(v) for v in (*point, *values)))
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def emit_report(report: Report, format: ReportFormat = "json") -> bytes:
    if format == "json":
        return render_json(report.to_document()).encode("utf-8")
    if format == "tsv":
        return render_tsv(report).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")
