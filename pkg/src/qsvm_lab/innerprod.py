"""Overlap classifier.

For preparations ``U_train`` and ``U_test`` the circuit ``U_train^dagger U_test``
leaves amplitude ``<train|test>`` on the all-zeros outcome, so the all-zeros
probability estimates the squared overlap.  A test point gets the class of
the training state with the larger estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import statevector as sv
from .errors import PreconditionError, ShapeError
from .qsvm import TIE_TOL, Prediction
from .statevector import Circuit

MAX_LAYERS = 60

# fixed seed offsets of the two overlap runs of one test point
SEED_OFFSET_TRAIN1 = 0
SEED_OFFSET_TRAIN2 = 1


@dataclass(frozen=True)
class OverlapEstimate:
    p_hat: float
    shots: int | None  # None: exact mode
    std_error: float

    @property
    def exact(self) -> bool:
        return self.shots is None


def build_overlap_circuit(train_prep: Circuit, test_prep: Circuit, layers: int = 1) -> Circuit:
    """``(U_train^dagger U_test)`` repeated ``layers`` times, starting with ``U_test``."""
    if train_prep.n_qubits != test_prep.n_qubits:
        raise ShapeError(
            f"training preparation has {train_prep.n_qubits} qubits, test has {test_prep.n_qubits}")
    if layers < 1:
        raise PreconditionError(f"layers must be >= 1, got {layers}")
    block = test_prep.then(sv.adjoint(train_prep))
    return Circuit(test_prep.n_qubits, block.ops * layers)


def estimate_overlap(circuit: Circuit, shots: int | None = None, seed: int = 0) -> OverlapEstimate:
    """All-zeros probability of ``circuit``, exactly or from ``shots`` samples."""
    state = sv.run(circuit)
    zeros = "0" * circuit.n_qubits
    if shots is None:
        return OverlapEstimate(sv.outcome_probability(state, zeros), None, 0.0)
    counts = sv.sample_counts(state, shots, seed)
    p = counts.frequency(zeros)
    return OverlapEstimate(p, shots, math.sqrt(p * (1 - p) / shots))


def classify_innerprod(train1_prep: Circuit, train2_prep: Circuit, test_prep: Circuit,
                       layers: int = 1, shots: int | None = None, seed: int = 0,
                       labels=(0, 1)) -> Prediction:
    """Class of the training preparation with the larger overlap estimate.

    Equal estimates are a tie and resolve to ``labels[0]``; in exact mode
    estimates within ``TIE_TOL`` count as equal.
    """
    if train1_prep.n_qubits != train2_prep.n_qubits:
        raise ShapeError("training preparations differ in width")
    e1 = estimate_overlap(build_overlap_circuit(train1_prep, test_prep, layers),
                          shots, seed + SEED_OFFSET_TRAIN1)
    e2 = estimate_overlap(build_overlap_circuit(train2_prep, test_prep, layers),
                          shots, seed + SEED_OFFSET_TRAIN2)
    diff = e1.p_hat - e2.p_hat
    if abs(diff) <= (TIE_TOL if shots is None else 0.0):
        label, tie = labels[0], True
    else:
        label, tie = (labels[0] if diff > 0 else labels[1]), False
    return Prediction(label, diff, tie, {
        "p1": e1.p_hat, "p2": e2.p_hat,
        "std_error1": e1.std_error, "std_error2": e2.std_error,
    })


def point_seed(seed: int, index: int, layer: int = 1) -> int:
    """Per-(layer, point) base seed; the two overlap runs add their offsets."""
    return seed + 2 * (index + 10_000 * layer)


def layer_sweep(train1_prep: Circuit, train2_prep: Circuit,
                tests: Sequence[tuple[Circuit, int]], layer_range: tuple[int, int],
                shots: int | None = None, seed: int = 0,
                labels=(0, 1)) -> list[tuple[int, float]]:
    """Accuracy of :func:`classify_innerprod` for every layer count in ``layer_range`` (inclusive)."""
    lo, hi = layer_range
    if not tests:
        raise PreconditionError("layer sweep needs at least one test point")
    if not 1 <= lo <= hi <= MAX_LAYERS:
        raise PreconditionError(f"layer range {lo}..{hi} not within 1..{MAX_LAYERS}")
    series = []
    for layer in range(lo, hi + 1):
        correct = 0
        for i, (prep, truth) in enumerate(tests):
            pred = classify_innerprod(train1_prep, train2_prep, prep, layer, shots,
                                      point_seed(seed, i, layer), labels)
            correct += pred.label == truth
        series.append((layer, correct / len(tests)))
    return series
