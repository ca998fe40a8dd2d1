"""Shared test helpers: random circuits, dense oracles, synthetic data."""
from __future__ import annotations

import math

import numpy as np

from qsvm_lab import statevector as sv

KINDS = ("U3", "RY", "RX", "RZ", "H", "X", "GPHASE")


def random_gate(rng, n_qubits: int) -> sv.GateOp:
    kind = KINDS[rng.integers(len(KINDS))]
    target = int(rng.integers(n_qubits))
    params = tuple(rng.uniform(-2 * math.pi, 2 * math.pi, sv.GATE_KINDS[kind]))
    others = [q for q in range(n_qubits) if q != target]
    n_ctrl = int(rng.integers(0, min(2, len(others)) + 1))
    ctrl_q = rng.choice(others, size=n_ctrl, replace=False) if n_ctrl else []
    controls = tuple((int(q), int(rng.integers(2))) for q in ctrl_q)
    return sv.GateOp(kind, target, params, controls)


def random_circuit(rng, n_qubits: int, n_gates: int) -> sv.Circuit:
    return sv.Circuit(n_qubits, [random_gate(rng, n_qubits) for _ in range(n_gates)])


def random_state(rng, n_qubits: int) -> sv.QuantumState:
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return sv.state_from_amplitudes(v / np.linalg.norm(v))


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def blob_rows(rng, n0: int, n1: int, sep: float = 3.0, n_features: int = 4):
    """Two Gaussian classes, shifted so both centers have nonzero norm."""
    shift = np.zeros(n_features)
    shift[0] = 1.0
    a = rng.normal(0, 1, (n0, n_features)) + sep * shift
    b = rng.normal(0, 1, (n1, n_features)) - sep * shift + 0.5
    X = np.vstack([a, b])
    y = np.r_[np.zeros(n0, int), np.ones(n1, int)]
    return X, y


def write_csv(path, X, y, header=None):
    with open(path, "w") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row, c in zip(X, y):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(c)}\n")
    return path
