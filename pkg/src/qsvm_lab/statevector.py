"""Dense state-vector simulation of small circuits.

Conventions: qubit 0 is the least-significant bit of the basis index, and
bitstrings are rendered with qubit ``n - 1`` leftmost, so ``"10"`` on two
qubits is basis index 2.  Controls carry a polarity: ``1`` fires on
``|1>``, ``0`` (anti-control) fires on ``|0>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import (
    CapacityError,
    PatternParseError,
    PreconditionError,
    QubitIndexError,
    ShapeError,
)

MAX_QUBITS = 12
MAX_UNITARY_QUBITS = 6

# kind -> number of angle parameters
GATE_KINDS = {"U3": 3, "RY": 1, "RX": 1, "RZ": 1, "H": 0, "X": 0, "GPHASE": 1}

_SQRT1_2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class QuantumState:
    """Register contents: ``2**n_qubits`` complex amplitudes."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise ShapeError(
                f"{amps.shape[0]} amplitudes do not fit {self.n_qubits} qubits")
        if not np.all(np.isfinite(amps)):
            raise PreconditionError("amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class GateOp:
    """One (multi-)controlled single-qubit gate.

    ``params`` holds the angles in radians: ``(theta, phi, lam)`` for U3, one
    angle for RX/RY/RZ/GPHASE, nothing for H and X.  ``controls`` is a tuple of
    ``(qubit, polarity)`` pairs.
    """

    kind: str
    target: int
    params: tuple[float, ...] = ()
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in GATE_KINDS:
            raise ShapeError(f"unknown gate kind {self.kind!r}")
        params = tuple(float(p) for p in self.params)
        if len(params) != GATE_KINDS[kind]:
            raise ShapeError(f"{kind} takes {GATE_KINDS[kind]} parameter(s), got {len(params)}")
        if not all(math.isfinite(p) for p in params):
            raise PreconditionError(f"{kind} angles must be finite")
        controls = tuple((int(q), int(p)) for q, p in self.controls)
        qubits = [q for q, _ in controls]
        if self.target < 0 or any(q < 0 for q in qubits):
            raise QubitIndexError("qubit indices must be non-negative")
        if self.target in qubits:
            raise QubitIndexError(f"target {self.target} also listed as a control")
        if len(set(qubits)) != len(qubits):
            raise QubitIndexError(f"repeated control qubit in {qubits}")
        if any(p not in (0, 1) for _, p in controls):
            raise ShapeError("control polarity must be 0 (anti) or 1")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "controls", controls)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,) + tuple(q for q, _ in self.controls)

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.params)

    def inverse(self) -> "GateOp":
        p = self.params
        if self.kind == "U3":
            params = (-p[0], -p[2], -p[1])
        elif self.kind in ("H", "X"):
            params = ()
        else:
            params = (-p[0],)
        return GateOp(self.kind, self.target, params, self.controls)

    def with_controls(self, extra: Iterable[tuple[int, int]]) -> "GateOp":
        return GateOp(self.kind, self.target, self.params, tuple(extra) + self.controls)

    def remap(self, mapping: Mapping[int, int]) -> "GateOp":
        return GateOp(self.kind, mapping[self.target], self.params,
                      tuple((mapping[q], p) for q, p in self.controls))


def gate_matrix(kind: str, params: Sequence[float] = ()) -> np.ndarray:
    """The 2x2 matrix of an uncontrolled gate."""
    kind = kind.upper()
    if kind == "U3":
        theta, phi, lam = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -np.exp(1j * lam) * s],
                         [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]])
    if kind == "RY":
        c, s = math.cos(params[0] / 2), math.sin(params[0] / 2)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "RX":
        c, s = math.cos(params[0] / 2), math.sin(params[0] / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RZ":
        h = params[0] / 2
        return np.array([[np.exp(-1j * h), 0], [0, np.exp(1j * h)]])
    if kind == "H":
        return np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=np.complex128)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=np.complex128)
    if kind == "GPHASE":
        return np.exp(1j * params[0]) * np.eye(2, dtype=np.complex128)
    raise ShapeError(f"unknown gate kind {kind!r}")


# gate constructors --------------------------------------------------------

def _ctl(controls) -> tuple[tuple[int, int], ...]:
    return tuple(controls) if controls else ()


def u3(target, theta, phi=0.0, lam=0.0, controls=()) -> GateOp:
    return GateOp("U3", target, (theta, phi, lam), _ctl(controls))


def ry(target, theta, controls=()) -> GateOp:
    return GateOp("RY", target, (theta,), _ctl(controls))


def rx(target, theta, controls=()) -> GateOp:
    return GateOp("RX", target, (theta,), _ctl(controls))


def rz(target, theta, controls=()) -> GateOp:
    return GateOp("RZ", target, (theta,), _ctl(controls))


def h(target, controls=()) -> GateOp:
    return GateOp("H", target, (), _ctl(controls))


def x(target, controls=()) -> GateOp:
    return GateOp("X", target, (), _ctl(controls))


def gphase(target, phi, controls=()) -> GateOp:
    return GateOp("GPHASE", target, (phi,), _ctl(controls))


def phase(target, lam, controls=()) -> GateOp:
    """diag(1, e^{i lam}) as a U3."""
    return GateOp("U3", target, (0.0, 0.0, lam), _ctl(controls))


@dataclass
class Circuit:
    """Ordered gate list on ``n_qubits`` qubits.

    Builder methods (:meth:`add`, :meth:`extend`) mutate and return ``self``;
    every other transformation returns a new circuit.
    """

    n_qubits: int
    ops: list[GateOp] = field(default_factory=list)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CapacityError("a circuit needs at least one qubit")
        ops, self.ops = list(self.ops), []
        self.extend(ops)

    def add(self, gate: GateOp) -> "Circuit":
        bad = [q for q in gate.qubits if q >= self.n_qubits]
        if bad:
            raise QubitIndexError(f"qubit(s) {bad} out of range for {self.n_qubits}-qubit circuit")
        self.ops.append(gate)
        return self

    def extend(self, gates: Iterable[GateOp]) -> "Circuit":
        for g in gates:
            self.add(g)
        return self

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, list(self.ops))

    def then(self, other: "Circuit") -> "Circuit":
        """This circuit followed by ``other`` (same width)."""
        if other.n_qubits != self.n_qubits:
            raise ShapeError(f"cannot compose {self.n_qubits}- and {other.n_qubits}-qubit circuits")
        return Circuit(self.n_qubits, self.ops + other.ops)

    def controlled(self, controls: Sequence[tuple[int, int]]) -> "Circuit":
        return Circuit(self.n_qubits, [g.with_controls(controls) for g in self.ops])

    def embed(self, n_qubits: int, qubits: Sequence[int]) -> "Circuit":
        """Place this circuit on ``qubits`` (qubit i -> qubits[i]) of a wider register."""
        if len(qubits) != self.n_qubits:
            raise ShapeError(f"need {self.n_qubits} target qubits, got {len(qubits)}")
        mapping = dict(enumerate(qubits))
        return Circuit(n_qubits, [g.remap(mapping) for g in self.ops])


@dataclass(frozen=True)
class ShotCounts:
    """Outcome tallies keyed by bitstring (qubit ``n - 1`` leftmost)."""

    shots: int
    counts: dict[str, int]
    n_qubits: int

    def count(self, pattern: str) -> int:
        """Number of shots matching a wildcard pattern."""
        mask, value = _pattern_mask(pattern, self.n_qubits)
        return sum(c for k, c in self.counts.items() if int(k, 2) & mask == value)

    def frequency(self, pattern: str) -> float:
        return self.count(pattern) / self.shots


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def new_state(n_qubits: int) -> QuantumState:
    """``|0...0>`` on ``n_qubits`` qubits (1 to 12)."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(n_qubits, amps)


def basis_state(n_qubits: int, index: int) -> QuantumState:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(n_qubits, amps)


def state_from_amplitudes(amplitudes, atol: float = 1e-10) -> QuantumState:
    """Wrap a normalised amplitude vector whose length is a power of two."""
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    n = int(round(math.log2(amps.shape[0]))) if amps.shape[0] else 0
    if amps.shape[0] == 0 or 1 << n != amps.shape[0]:
        raise ShapeError(f"length {amps.shape[0]} is not a power of two")
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"{n} qubits outside [1, {MAX_QUBITS}]")
    if abs(np.linalg.norm(amps) - 1.0) > atol:
        raise PreconditionError(f"state norm {np.linalg.norm(amps):.3g} is not 1")
    return QuantumState(n, amps)


def _control_mask(gate: GateOp) -> tuple[int, int]:
    mask = value = 0
    for q, pol in gate.controls:
        mask |= 1 << q
        value |= pol << q
    return mask, value


def _apply_in_place(buf: np.ndarray, gate: GateOp) -> None:
    mask, value = _control_mask(gate)
    _kernels.apply_1q(buf, gate.matrix(), gate.target, mask, value)


def apply_gate(state: QuantumState, gate: GateOp) -> QuantumState:
    """New state with ``gate`` applied."""
    bad = [q for q in gate.qubits if q >= state.n_qubits]
    if bad:
        raise QubitIndexError(f"qubit(s) {bad} out of range for {state.n_qubits}-qubit state")
    buf = np.array(state.amplitudes, dtype=np.complex128).reshape(-1, 1)
    _apply_in_place(buf, gate)
    return QuantumState(state.n_qubits, buf[:, 0])


def apply_circuit(state: QuantumState, circuit: Circuit) -> QuantumState:
    """New state with every gate of ``circuit`` applied in list order."""
    if circuit.n_qubits != state.n_qubits:
        raise ShapeError(
            f"circuit has {circuit.n_qubits} qubits, state has {state.n_qubits}")
    buf = np.array(state.amplitudes, dtype=np.complex128).reshape(-1, 1)
    for gate in circuit.ops:
        _apply_in_place(buf, gate)
    return QuantumState(state.n_qubits, buf[:, 0])


def run(circuit: Circuit) -> QuantumState:
    """``circuit`` applied to the all-zeros state."""
    return apply_circuit(new_state(circuit.n_qubits), circuit)


def adjoint(circuit: Circuit) -> Circuit:
    """Reversed gate list with every gate inverted."""
    return Circuit(circuit.n_qubits, [g.inverse() for g in reversed(circuit.ops)])


def _pattern_mask(pattern: str, n_qubits: int) -> tuple[int, int]:
    if not isinstance(pattern, str) or len(pattern) != n_qubits:
        raise PatternParseError(f"pattern {pattern!r} must have length {n_qubits}")
    mask = value = 0
    for pos, ch in enumerate(pattern):
        q = n_qubits - 1 - pos
        if ch == "*":
            continue
        if ch not in "01":
            raise PatternParseError(f"bad character {ch!r} in pattern {pattern!r}")
        mask |= 1 << q
        value |= (ch == "1") << q
    return mask, value


def pattern_from_bits(n_qubits: int, bits: Mapping[int, int]) -> str:
    """Build a wildcard pattern fixing ``{qubit: bit}``."""
    chars = ["*"] * n_qubits
    for q, b in bits.items():
        if not 0 <= q < n_qubits:
            raise QubitIndexError(f"qubit {q} out of range")
        chars[n_qubits - 1 - q] = "1" if b else "0"
    return "".join(chars)


def outcome_probability(state: QuantumState, outcome: str) -> float:
    """Born-rule probability of ``outcome``; ``*`` positions are summed over."""
    mask, value = _pattern_mask(outcome, state.n_qubits)
    idx = np.arange(len(state))
    p = float(np.sum(state.probabilities()[(idx & mask) == value]))
    return min(max(p, 0.0), 1.0)


def postselect(state: QuantumState, fixed: Mapping[int, int]) -> tuple[QuantumState | None, float]:
    """Condition on ``{qubit: bit}``.

    Returns the normalised state of the remaining qubits (in increasing index
    order) and the probability of the condition.  The state is ``None`` when
    that probability is zero or no qubit remains.
    """
    pattern = pattern_from_bits(state.n_qubits, fixed)
    mask, value = _pattern_mask(pattern, state.n_qubits)
    idx = np.arange(len(state))
    sub = state.amplitudes[(idx & mask) == value]
    prob = float(np.sum(np.abs(sub) ** 2))
    free = state.n_qubits - len(fixed)
    if free == 0 or prob == 0.0:
        return None, prob
    # surviving indices keep increasing order, which is the order of the
    # free qubits' own binary encoding
    return QuantumState(free, sub / math.sqrt(prob)), prob


def bitstring(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


def sample_counts(state: QuantumState, shots: int, seed: int) -> ShotCounts:
    """Draw ``shots`` terminal measurements of the full register.

    The generator is seeded from ``seed`` alone, so identical inputs give
    identical counts.
    """
    if shots < 1:
        raise PreconditionError(f"shots must be >= 1, got {shots}")
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs)
    counts = {bitstring(i, state.n_qubits): int(c) for i, c in enumerate(draws) if c}
    return ShotCounts(shots, counts, state.n_qubits)


def _embed_1q(mat: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for q in range(n_qubits - 1, -1, -1):
        out = np.kron(out, mat if q == qubit else np.eye(2))
    return out


def gate_unitary(gate: GateOp, n_qubits: int) -> np.ndarray:
    """Full ``2**n x 2**n`` matrix of one gate, built from Kronecker products."""
    dim = 1 << n_qubits
    proj = np.array([[1.0 + 0j]])
    for q in range(n_qubits - 1, -1, -1):
        pol = dict(gate.controls).get(q)
        if pol is None:
            f = np.eye(2)
        elif pol == 1:
            f = np.diag([0.0, 1.0])
        else:
            f = np.diag([1.0, 0.0])
        proj = np.kron(proj, f)
    full = _embed_1q(gate.matrix(), gate.target, n_qubits)
    return np.eye(dim) - proj + proj @ full


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of ``circuit`` (at most 6 qubits).

    Built gate by gate from Kronecker products, independently of the
    state-vector kernels, so it can serve as their oracle.
    """
    if circuit.n_qubits > MAX_UNITARY_QUBITS:
        raise CapacityError(
            f"circuit_unitary supports at most {MAX_UNITARY_QUBITS} qubits, got {circuit.n_qubits}")
    u = np.eye(1 << circuit.n_qubits, dtype=np.complex128)
    for gate in circuit.ops:
        u = gate_unitary(gate, circuit.n_qubits) @ u
    return u


def equal_up_to_global_phase(a, b, atol: float = 1e-10) -> bool:
    """Compare amplitude vectors after aligning the phase of ``a``'s largest entry."""
    a = np.asarray(getattr(a, "amplitudes", a), dtype=np.complex128).reshape(-1)
    b = np.asarray(getattr(b, "amplitudes", b), dtype=np.complex128).reshape(-1)
    if a.shape != b.shape:
        return False
    k = int(np.argmax(np.abs(a)))
    if abs(b[k]) == 0.0:
        return bool(np.allclose(a, b, atol=atol, rtol=0))
    rot = (a[k] / abs(a[k])) / (b[k] / abs(b[k]))
    return bool(np.allclose(a, b * rot, atol=atol, rtol=0))
