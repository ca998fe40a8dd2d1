"""``qsvm-lab`` command-line experiment runner.

Exit codes: 0 success, 2 configuration error, 3 data or I/O error,
4 numerical error (singular F, starved post-selection).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import innerprod, preprocess, qsvm
from .encoding import FeatureVector, encode, normalize
from .errors import ConfigError, DataError, NumericalError, QsvmLabError
from .report import ClassificationReport, LayerAccuracy, PointRecord, emit_report, render

log = logging.getLogger("qsvm_lab")

BANKNOTE_ENV = "QSVM_BANKNOTE_CSV"
DATASETS = ("six-nine", "banknote")
METHODS = ("qsvm", "innerprod")
PREPROCESS = ("averages", "kmeans")
KMEANS_INITS = preprocess.KMEANS_INITS
FORMATS = ("json", "csv")
EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "six-nine"
    method: str = "innerprod"
    data_path: str | None = None
    train_path: str | None = None
    preprocess: str | None = None
    kmeans_init: str = "class-means"
    gamma: float = 2.0
    layers: tuple[int, int] = (1, 1)
    shots: int | None = None
    post_select: bool = True
    seed: int = 7
    n_test: int = 28

    def validate(self) -> "ExperimentConfig":
        """Return a copy with defaults resolved; raise :class:`ConfigError` naming the bad field."""
        def bad(name, msg):
            raise ConfigError(f"{name}: {msg}")

        if self.dataset not in DATASETS:
            bad("dataset", f"expected one of {DATASETS}, got {self.dataset!r}")
        if self.method not in METHODS:
            bad("method", f"expected one of {METHODS}, got {self.method!r}")
        pre = self.preprocess
        if self.dataset == "six-nine":
            if pre is not None:
                bad("preprocess", "only applies to the banknote dataset")
            if self.train_path is None and self.data_path is not None:
                bad("train_path", "a custom six-nine test file needs a matching training file")
        else:
            pre = pre or "averages"
            if pre not in PREPROCESS:
                bad("preprocess", f"expected one of {PREPROCESS}, got {pre!r}")
            if self.train_path is not None:
                bad("train_path", "only applies to the six-nine dataset")
            if self.n_test < 1:
                bad("n_test", f"must be positive, got {self.n_test}")
        if self.kmeans_init not in KMEANS_INITS:
            bad("kmeans_init", f"expected one of {KMEANS_INITS}, got {self.kmeans_init!r}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            bad("gamma", f"must be a positive real, got {self.gamma}")
        lo, hi = self.layers
        if not 1 <= lo <= hi <= innerprod.MAX_LAYERS:
            bad("layers", f"range {lo}..{hi} not within 1..{innerprod.MAX_LAYERS}")
        if self.method == "qsvm" and (lo, hi) != (1, 1):
            bad("layers", "layer repetition only applies to the innerprod method")
        if self.method == "innerprod" and not self.post_select:
            bad("post_select", "only applies to the qsvm method")
        if self.shots is not None and self.shots < 1:
            bad("shots", f"must be a positive integer or 'exact', got {self.shots}")
        return ExperimentConfig(**{**asdict(self), "preprocess": pre})

    def echo(self) -> dict:
        d = asdict(self)
        d["layers"] = list(self.layers)
        return d


def parse_layers(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return int(a), int(b)
        n = int(text)
        return n, n
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None


def parse_shots(text: str) -> int | None:
    if text.lower() == "exact":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'exact', got {text!r}") from None


def _packaged(name: str) -> Path:
    return Path(str(resources.files("qsvm_lab") / "data" / name))


def _load_six_nine(cfg: ExperimentConfig):
    train_path = Path(cfg.train_path) if cfg.train_path else _packaged("six_nine_train.csv")
    test_path = Path(cfg.data_path) if cfg.data_path else _packaged("six_nine_test.csv")
    train = preprocess.load_dataset(train_path, n_features=2)
    test = preprocess.load_dataset(test_path, n_features=2)
    if train.class_counts() != (1, 1):
        raise DataError(f"{train_path}: six-nine training file needs exactly one row per class")
    t1 = normalize(FeatureVector(train.X[train.y == 0][0], 0))
    t2 = normalize(FeatureVector(train.X[train.y == 1][0], 1))
    k12 = float(t1.features @ t2.features)
    if abs(k12 - 0.5) > 1e-9:
        log.warning("six-nine training vectors have kernel %.12g (reference value 0.5)", k12)
    return t1, t2, test, {"name": "six-nine", "n_train": len(train), "n_test": len(test),
                          "test_class_counts": list(test.class_counts())}


def _load_banknote(cfg: ExperimentConfig):
    path = cfg.data_path or os.environ.get(BANKNOTE_ENV)
    if not path:
        raise DataError(f"banknote dataset path not given (use --data-path or ${BANKNOTE_ENV})")
    data = preprocess.load_dataset(path, n_features=4)
    parts = preprocess.split(data, cfg.n_test, cfg.seed)
    info = {"name": "banknote", "n_rows": len(data), "class_counts": list(data.class_counts()),
            "n_train": len(parts.train), "n_test": len(parts.test),
            "train_class_counts": list(parts.train.class_counts()),
            "test_class_counts": list(parts.test.class_counts())}
    if cfg.preprocess == "averages":
        c0, c1 = preprocess.class_averages(parts.train)
        centers = (c0.features, c1.features)
    else:
        km = preprocess.kmeans(parts.train, init=cfg.kmeans_init, seed=cfg.seed)
        if not km.converged:
            log.warning("k-means stopped after %d iterations without converging", km.iterations)
        centers = (km.center_for_class(0), km.center_for_class(1))
        info["kmeans"] = {"iterations": km.iterations, "converged": km.converged, "sse": km.sse}
    t1 = normalize(FeatureVector(centers[0], 0))
    t2 = normalize(FeatureVector(centers[1], 1))
    return t1, t2, parts.test, info


def run_experiment(cfg: ExperimentConfig) -> ClassificationReport:
    """Load, pre-process, encode, and classify every test point of ``cfg``."""
    cfg = cfg.validate()
    loader = _load_six_nine if cfg.dataset == "six-nine" else _load_banknote
    t1, t2, test, info = loader(cfg)
    tests = [normalize(FeatureVector(x, int(c))) for x, c in zip(test.X, test.y)]
    ids = [int(r) for r in test.row_ids]
    vectors = (tuple(map(float, t1.features)), tuple(map(float, t2.features)))
    records: list[PointRecord] = []
    series: list[LayerAccuracy] = []

    if cfg.method == "qsvm":
        model = qsvm.train_model(t1, t2, cfg.gamma)
        sol = qsvm.solve_ls_svm(model.f)
        hhl = qsvm.HhlConfig(post_select=cfg.post_select)
        for i, v in enumerate(tests):
            pred = qsvm.classify_qsvm(model, v, hhl, cfg.shots, innerprod.point_seed(cfg.seed, i))
            ref = qsvm.classify_analytic(sol, model, v)
            records.append(PointRecord(
                i, ids[i], v.label, pred.label, pred.tie, pred.score,
                success_probability=pred.diagnostics["success_probability"],
                analytic_label=ref.label))
        if tests:
            series.append(LayerAccuracy(1, sum(r.correct for r in records), len(tests)))
    else:
        p1, p2 = encode(t1), encode(t2)
        preps = [encode(v) for v in tests]
        lo, hi = cfg.layers
        for layer in range(lo, hi + 1):
            correct = 0
            for i, (v, prep) in enumerate(zip(tests, preps)):
                pred = innerprod.classify_innerprod(p1, p2, prep, layer, cfg.shots,
                                                    innerprod.point_seed(cfg.seed, i, layer))
                rec = PointRecord(i, ids[i], v.label, pred.label, pred.tie, pred.score,
                                  layer=layer, p1=pred.diagnostics["p1"], p2=pred.diagnostics["p2"])
                records.append(rec)
                correct += rec.correct
            if tests:
                series.append(LayerAccuracy(layer, correct, len(tests)))

    return ClassificationReport(cfg.echo(), info, vectors, tuple(records), tuple(series))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsvm-lab",
                                description="Run a two-class quantum classification experiment.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--dataset", choices=DATASETS, default="six-nine")
    p.add_argument("--data-path", help="test file (six-nine) or full dataset (banknote; "
                                       f"falls back to ${BANKNOTE_ENV})")
    p.add_argument("--train-path", help="six-nine training file (default: packaged)")
    p.add_argument("--method", choices=METHODS, default="innerprod")
    p.add_argument("--preprocess", choices=PREPROCESS, help="banknote only (default: averages)")
    p.add_argument("--kmeans-init", choices=KMEANS_INITS, default="class-means")
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--layers", type=parse_layers, default=(1, 1), help="N or A..B (innerprod)")
    p.add_argument("--shots", type=parse_shots, default=None, help="integer or 'exact' (default)")
    p.add_argument("--post-select", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n-test", type=int, default=28, help="banknote test-set size")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _summary_line(report: ClassificationReport) -> str:
    if report.is_sweep:
        best = report.peak()
        return f"peak accuracy {best.accuracy:.4f} at layer {best.layer}"
    if report.accuracy is None:
        return "empty test set"
    return f"accuracy {report.accuracy:.4f} ({sum(p.correct for p in report.points)}/{report.n_test})"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = ExperimentConfig(
        dataset=args.dataset, method=args.method, data_path=args.data_path,
        train_path=args.train_path, preprocess=args.preprocess, kmeans_init=args.kmeans_init,
        gamma=args.gamma, layers=args.layers, shots=args.shots, post_select=args.post_select,
        seed=args.seed, n_test=args.n_test)
    try:
        report = run_experiment(cfg)
        if args.out:
            for path in emit_report(report, args.format, args.out):
                log.info("wrote %s", path)
        else:
            for text in render(report, args.format).values():
                sys.stdout.write(text)
    except ConfigError as exc:
        print(f"qsvm-lab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"qsvm-lab: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"qsvm-lab: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except QsvmLabError as exc:  # pragma: no cover - every subclass is mapped above
        print(f"qsvm-lab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(_summary_line(report), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
