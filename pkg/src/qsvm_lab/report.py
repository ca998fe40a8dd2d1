"""Classification reports and their JSON / CSV serialisations.

JSON reports are written with sorted keys and a trailing newline, so a
report's bytes depend only on its content.  The layout is described in
``docs/report-schema.md``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import DataError, SchemaError

SCHEMA = "qsvm-lab/classification-report"
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PointRecord:
    index: int
    row_id: int
    true_label: int
    predicted_label: int
    tie: bool
    score: float
    layer: int | None = None
    p1: float | None = None
    p2: float | None = None
    success_probability: float | None = None
    analytic_label: int | None = None

    @property
    def correct(self) -> bool:
        return self.predicted_label == self.true_label


POINT_COLUMNS = tuple(f.name for f in fields(PointRecord)) + ("correct",)


@dataclass(frozen=True)
class LayerAccuracy:
    layer: int
    correct: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total


@dataclass(frozen=True)
class ClassificationReport:
    config: dict
    dataset: dict
    training_vectors: tuple[tuple[float, ...], ...]
    points: tuple[PointRecord, ...]
    series: tuple[LayerAccuracy, ...] = field(default=())

    @property
    def n_test(self) -> int:
        """Number of distinct test points."""
        return len({p.index for p in self.points})

    @property
    def is_sweep(self) -> bool:
        return len(self.series) > 1

    @property
    def accuracy(self) -> float | None:
        """Single-run accuracy; ``None`` for empty test sets and sweeps."""
        if not self.points or self.is_sweep:
            return None
        return sum(p.correct for p in self.points) / len(self.points)

    def peak(self) -> LayerAccuracy | None:
        """Best layer of a sweep, earliest layer on ties."""
        if not self.series:
            return None
        return max(self.series, key=lambda s: (s.correct, -s.layer))

    def to_dict(self) -> dict:
        out = {
            "schema": SCHEMA,
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "dataset": self.dataset,
            "training_vectors": [list(v) for v in self.training_vectors],
            "n_test": self.n_test,
            "points": [_point_dict(p) for p in self.points],
        }
        if self.n_test == 0:
            out["empty_test_set"] = True
        acc = self.accuracy
        if acc is not None:
            out["accuracy"] = acc
            out["correct"] = sum(p.correct for p in self.points)
        if self.series:
            out["series"] = [{"layer": s.layer, "correct": s.correct, "total": s.total,
                              "accuracy": s.accuracy} for s in self.series]
            if self.is_sweep:
                best = self.peak()
                out["peak"] = {"layer": best.layer, "accuracy": best.accuracy}
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ClassificationReport":
        if d.get("schema") != SCHEMA:
            raise SchemaError(f"not a classification report (schema {d.get('schema')!r})")
        if d.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(f"unsupported report schema_version {d.get('schema_version')!r}")
        names = {f.name for f in fields(PointRecord)}
        try:
            points = tuple(PointRecord(**{k: v for k, v in p.items() if k in names})
                           for p in d["points"])
            series = tuple(LayerAccuracy(s["layer"], s["correct"], s["total"])
                           for s in d.get("series", ()))
            return cls(d["config"], d["dataset"],
                       tuple(tuple(v) for v in d["training_vectors"]), points, series)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed report: {exc}") from None


def _point_dict(p: PointRecord) -> dict:
    d = asdict(p)
    d["correct"] = p.correct
    return d


def to_json(report: ClassificationReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def parse_json(text: str) -> ClassificationReport:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"report is not valid JSON: {exc}") from None
    return ClassificationReport.from_dict(data)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else v for v in r])
    return buf.getvalue()


def points_csv(report: ClassificationReport) -> str:
    rows = [[_point_dict(p)[c] for c in POINT_COLUMNS] for p in report.points]
    return _csv_text(POINT_COLUMNS, rows)


def series_csv(report: ClassificationReport) -> str:
    rows = [[s.layer, s.correct, s.total, repr(s.accuracy)] for s in report.series]
    return _csv_text(("layer", "correct", "total", "accuracy"), rows)


def render(report: ClassificationReport, fmt: str = "json") -> dict[str, str]:
    """Serialised outputs keyed by role: ``main`` and, for CSV sweeps, ``points``."""
    if fmt == "json":
        return {"main": to_json(report)}
    if fmt == "csv":
        if report.is_sweep:
            return {"main": series_csv(report), "points": points_csv(report)}
        return {"main": points_csv(report)}
    raise ValueError(f"unknown report format {fmt!r}")


def companion_path(path: Path) -> Path:
    """``run.csv`` -> ``run_points.csv``."""
    return path.with_name(f"{path.stem}_points{path.suffix}")


def emit_report(report: ClassificationReport, fmt: str, path) -> list[Path]:
    """Write ``report`` to ``path``; CSV sweeps also write a ``*_points`` file."""
    path = Path(path)
    written = []
    for role, text in render(report, fmt).items():
        target = path if role == "main" else companion_path(path)
        try:
            target.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot write report to {target}: {exc.strerror or exc}") from exc
        written.append(target)
    return written
