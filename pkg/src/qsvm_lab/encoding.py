"""Classical feature vectors to state-preparation circuits.

Two encoders: a single RY rotation for 2-feature vectors, and a three-gate
U3 cascade that writes a 4-feature vector into the amplitudes of two qubits.
All angles come from two-argument arctangents so signed features keep their
signs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateVectorError, PreconditionError, ShapeError
from .statevector import Circuit, ry, u3

NORM_TOL = 1e-9

# qubit roles in the 2-qubit encoder: |branch, data>, branch is the high bit
DATA_QUBIT = 0
BRANCH_QUBIT = 1


@dataclass(frozen=True)
class FeatureVector:
    features: np.ndarray
    label: int | None = None

    def __post_init__(self):
        f = np.array(self.features, dtype=np.float64).reshape(-1)
        if f.size == 0:
            raise ShapeError("feature vector is empty")
        if not np.all(np.isfinite(f)):
            raise PreconditionError("features must be finite")
        if self.label is not None and self.label not in (0, 1):
            raise ShapeError(f"label must be 0 or 1, got {self.label!r}")
        f.flags.writeable = False
        object.__setattr__(self, "features", f)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.features))


@dataclass(frozen=True)
class EncodingParams:
    """Per-gate ``(role, theta, phi, lam)`` rows of an encoding circuit."""

    angles: tuple[tuple[str, float, float, float], ...]

    def theta(self, role: str) -> float:
        for r, theta, _, _ in self.angles:
            if r == role:
                return theta
        raise KeyError(role)


def as_vector(v) -> FeatureVector:
    return v if isinstance(v, FeatureVector) else FeatureVector(v)


def normalize(v) -> FeatureVector:
    """``v / ||v||``, keeping the label."""
    v = as_vector(v)
    n = v.norm
    if n == 0.0:
        raise DegenerateVectorError("cannot normalise the zero vector")
    return FeatureVector(v.features / n, v.label)


def _require_unit(v: FeatureVector) -> None:
    if abs(v.norm - 1.0) > NORM_TOL:
        raise PreconditionError(
            f"feature vector must be unit norm (|norm - 1| <= {NORM_TOL}), got norm {v.norm:.12g}")


def angle2(alpha: float, beta: float) -> float:
    """RY angle taking ``|0>`` to ``(alpha|0> + beta|1>) / norm``."""
    if alpha == 0.0 and beta == 0.0:
        raise DegenerateVectorError("angle of the zero vector is undefined")
    return 2.0 * math.atan2(beta, alpha)


def encode2(v) -> Circuit:
    """One-qubit preparation ``[RY(angle2(v))]`` for a unit 2-vector."""
    v = as_vector(v)
    if len(v) != 2:
        raise ShapeError(f"encode2 needs 2 features, got {len(v)}")
    _require_unit(v)
    return Circuit(1, [ry(0, angle2(*v.features))])


def _branch_angle(a: float, b: float) -> float:
    # zero-amplitude branch: any angle is unobservable, keep it at 0
    if a == 0.0 and b == 0.0:
        return 0.0
    return 2.0 * math.atan2(b, a)


def encoding_params(v, convention: str = "behavioral") -> EncodingParams:
    """U3 angles of the 2-qubit encoder for a unit 4-vector ``(a, b, c, d)``.

    ``convention="behavioral"`` picks the controlled gate's angle from
    ``atan2(d, c)`` so the prepared state is exactly ``a|00> + b|01> + c|10> + d|11>``.
    ``convention="literal"`` uses ``atan2(c, d)``, the argument order printed
    alongside the encoder; it swaps the ``|10>``/``|11>`` amplitudes unless
    ``c == d``, and is kept only for comparison.
    """
    v = as_vector(v)
    if len(v) != 4:
        raise ShapeError(f"encode4 needs 4 features, got {len(v)}")
    _require_unit(v)
    a, b, c, d = (float(t) for t in v.features)
    lo = math.hypot(a, b)
    hi = math.hypot(c, d)
    theta1 = 2.0 * math.atan2(hi, lo)
    theta2 = _branch_angle(a, b)
    if convention == "behavioral":
        theta3 = _branch_angle(c, d)
    elif convention == "literal":
        theta3 = _branch_angle(d, c)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return EncodingParams((("U3_1", theta1, 0.0, 0.0),
                           ("U3_2", theta2, 0.0, 0.0),
                           ("U3_3", theta3, 0.0, 0.0)))


def encode4(v, convention: str = "behavioral") -> Circuit:
    """Two-qubit preparation of a unit 4-vector.

    U3_1 splits amplitude between the branch qubit's ``|0>`` and ``|1>``;
    U3_2 (anti-controlled on the branch) and U3_3 (controlled) then rotate
    the data qubit into each branch's normalised pair.
    """
    p = encoding_params(v, convention)
    return Circuit(2, [
        u3(BRANCH_QUBIT, p.theta("U3_1")),
        u3(DATA_QUBIT, p.theta("U3_2"), controls=[(BRANCH_QUBIT, 0)]),
        u3(DATA_QUBIT, p.theta("U3_3"), controls=[(BRANCH_QUBIT, 1)]),
    ])


def encode(v, convention: str = "behavioral") -> Circuit:
    """Dispatch on length: 2 features -> :func:`encode2`, 4 -> :func:`encode4`."""
    v = as_vector(v)
    if len(v) == 2:
        return encode2(v)
    if len(v) == 4:
        return encode4(v, convention)
    raise ShapeError(f"no encoder for {len(v)} features (expected 2 or 4)")


def n_data_qubits(n_features: int) -> int:
    if n_features == 2:
        return 1
    if n_features == 4:
        return 2
    raise ShapeError(f"no encoder for {n_features} features (expected 2 or 4)")


def stack(vectors: Sequence[FeatureVector]) -> np.ndarray:
    return np.vstack([as_vector(v).features for v in vectors])
