"""QSVM pipeline for two training vectors with the offset fixed to zero.

The least-squares SVM system reduces to ``F alpha = y`` with
``F = [[k11 + 1/gamma, k12], [k12, k22 + 1/gamma]]``.  For unit training
vectors ``F = c1*I + c2*X``, so ``exp(iFt)`` is an X rotation times a phase
and its eigenvectors are ``|+>`` and ``|->`` with eigenvalues ``c1 +/- c2``.

Register layout of :func:`qsvm_circuit` when the eigenphases are exactly
representable (``w = max(clock_qubits, data_qubits)``)::

    qubits 0..w-1   clock during HHL, data register afterwards
    qubit  w        index qubit (training point 1 on |0>, point 2 on |1>)
    qubit  w+1      HHL rotation ancilla (success on |1>)
    qubit  w+2      readout ancilla (Hadamard test)

Sharing is sound there because the uncompute returns the clock to exactly
``|0...0>``.  Otherwise the data register gets its own qubits above the
clock (``w = clock_qubits + data_qubits``).

Everything between the two readout Hadamards is controlled on the readout
qubit; the uncontrolled branch is the all-zeros reference.  With
post-selection on, the reference is moved into the ancilla's success sector
so that it interferes only with the heralded solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import statevector as sv
from .encoding import FeatureVector, NORM_TOL, angle2, as_vector, encode, n_data_qubits
from .errors import (
    ConfigError,
    InvalidRotationError,
    PreconditionError,
    ShapeError,
    SingularityError,
    StarvedPostSelectionError,
)
from .statevector import Circuit, GateOp

TIE_TOL = 1e-12
STARVED_PROBABILITY = 1e-6
_PHASE_EXACT_TOL = 1e-9


@dataclass(frozen=True)
class FMatrix:
    k11: float
    k12: float
    k22: float
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise PreconditionError(f"gamma must be positive, got {self.gamma}")

    @property
    def c1(self) -> float:
        """Diagonal entry ``k11 + 1/gamma`` (equal to ``1 + 1/gamma`` for unit data)."""
        return self.k11 + 1.0 / self.gamma

    @property
    def c2(self) -> float:
        return self.k12

    def matrix(self) -> np.ndarray:
        g = 1.0 / self.gamma
        return np.array([[self.k11 + g, self.k12], [self.k12, self.k22 + g]])

    @property
    def eigenvalues(self) -> tuple[float, float]:
        """``(c1 + c2, c1 - c2)``, i.e. the eigenvalues on ``|+>`` and ``|->``."""
        return self.c1 + self.c2, self.c1 - self.c2

    @property
    def lambda_min(self) -> float:
        return min(self.eigenvalues)


@dataclass(frozen=True)
class HhlConfig:
    clock_qubits: int = 2
    t0: float = math.pi / 2
    rotation_constant: float | None = None  # None -> smallest eigenvalue of F
    post_select: bool = True

    def resolved_constant(self, f: FMatrix) -> float:
        return f.lambda_min if self.rotation_constant is None else self.rotation_constant


@dataclass(frozen=True)
class SvmSolution:
    alpha: tuple[float, float]
    b_offset: float = 0.0


@dataclass(frozen=True)
class TrainedModel:
    train1_circuit: Circuit
    train2_circuit: Circuit
    train1_vector: FeatureVector
    train2_vector: FeatureVector
    labels: tuple[int, int]
    f: FMatrix
    y: tuple[float, float] = (1.0, -1.0)

    @property
    def n_data_qubits(self) -> int:
        return self.train1_circuit.n_qubits


@dataclass(frozen=True)
class Prediction:
    label: int
    score: float
    tie: bool
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class HhlLayout:
    input: int
    clock: tuple[int, ...]
    ancilla: int
    n_qubits: int


@dataclass(frozen=True)
class QsvmLayout:
    data: tuple[int, ...]
    clock: tuple[int, ...]
    index: int
    ancilla: int
    readout: int
    n_qubits: int


# ---------------------------------------------------------------------------
# classical side
# ---------------------------------------------------------------------------

def kernel(a, b) -> float:
    """Linear kernel ``a . b``."""
    a, b = as_vector(a), as_vector(b)
    if len(a) != len(b):
        raise ShapeError(f"kernel of vectors with lengths {len(a)} and {len(b)}")
    return float(np.dot(a.features, b.features))


def build_f_matrix(train1, train2, gamma: float = 2.0) -> FMatrix:
    t1, t2 = as_vector(train1), as_vector(train2)
    for name, t in (("train1", t1), ("train2", t2)):
        if abs(t.norm - 1.0) > NORM_TOL:
            raise PreconditionError(f"{name} must be unit norm, got norm {t.norm:.12g}")
    if not gamma > 0:
        raise PreconditionError(f"gamma must be positive, got {gamma}")
    f = FMatrix(kernel(t1, t1), kernel(t1, t2), kernel(t2, t2), float(gamma))
    if f.lambda_min <= 0.0:
        raise SingularityError(f"F has non-positive eigenvalue {f.lambda_min:.6g}")
    return f


def solve_ls_svm(f: FMatrix, y=(1.0, -1.0)) -> SvmSolution:
    """``alpha = F^-1 y`` by Cramer's rule on the 2x2 system."""
    (a, b), (c, d) = f.matrix()
    det = a * d - b * c
    if abs(det) < 1e-14:
        raise SingularityError(f"F is singular (det = {det:.3g})")
    y1, y2 = y
    return SvmSolution(((d * y1 - b * y2) / det, (a * y2 - c * y1) / det))


def _decide(score: float, labels: tuple[int, int]) -> tuple[int, bool]:
    if abs(score) <= TIE_TOL:
        return labels[0], True
    return (labels[0] if score > 0 else labels[1]), False


def classify_analytic(sol: SvmSolution, model: TrainedModel, test) -> Prediction:
    """Sign of ``alpha_1 k(x1, x0) + alpha_2 k(x2, x0) + b``."""
    t = as_vector(test)
    if abs(t.norm - 1.0) > NORM_TOL:
        raise PreconditionError(f"test vector must be unit norm, got norm {t.norm:.12g}")
    score = (sol.alpha[0] * kernel(model.train1_vector, t)
             + sol.alpha[1] * kernel(model.train2_vector, t) + sol.b_offset)
    label, tie = _decide(score, model.labels)
    return Prediction(label, float(score), tie)


def train_model(train1, train2, gamma: float = 2.0, labels=(0, 1)) -> TrainedModel:
    """Encode two unit training vectors and build their F matrix."""
    t1, t2 = as_vector(train1), as_vector(train2)
    if len(t1) != len(t2):
        raise ShapeError(f"training vectors have lengths {len(t1)} and {len(t2)}")
    f = build_f_matrix(t1, t2, gamma)
    return TrainedModel(encode(t1), encode(t2), t1, t2, tuple(labels), f)


# ---------------------------------------------------------------------------
# circuit side
# ---------------------------------------------------------------------------

def f_evolution_gate(f: FMatrix, t: float, target: int = 0) -> tuple[GateOp, GateOp]:
    """``exp(i F t)`` as ``(RX(-2 c2 t), GPHASE(c1 t))`` on ``target``.

    The rotation alone is ``exp(i c2 t X)``; the phase gate carries
    ``exp(i c1 t)``, which is global when uncontrolled but becomes a relative
    phase once both gates receive a control.
    """
    return sv.rx(target, -2.0 * f.c2 * t), sv.gphase(target, f.c1 * t)


def _swap(a: int, b: int) -> list[GateOp]:
    return [sv.x(b, [(a, 1)]), sv.x(a, [(b, 1)]), sv.x(b, [(a, 1)])]


def qft_circuit(n_qubits: int, qubits=None, width: int | None = None) -> Circuit:
    """QFT on ``qubits`` (``qubits[k]`` is bit k): ``|m> -> sum_j e^{2 pi i m j / N} |j> / sqrt(N)``."""
    qubits = list(range(n_qubits)) if qubits is None else list(qubits)
    width = n_qubits if width is None else width
    c = Circuit(width)
    m = len(qubits)
    for j in range(m - 1, -1, -1):
        c.add(sv.h(qubits[j]))
        for k in range(j - 1, -1, -1):
            c.add(sv.phase(qubits[j], math.pi / (1 << (j - k)), [(qubits[k], 1)]))
    for i in range(m // 2):
        c.extend(_swap(qubits[i], qubits[m - 1 - i]))
    return c


def check_hhl_config(f: FMatrix, cfg: HhlConfig) -> None:
    if cfg.clock_qubits < 1:
        raise ConfigError(f"clock_qubits must be >= 1, got {cfg.clock_qubits}")
    if not cfg.t0 > 0:
        raise ConfigError(f"t0 must be positive, got {cfg.t0}")
    const = cfg.resolved_constant(f)
    if not const > 0:
        raise InvalidRotationError(f"rotation constant must be positive, got {const}")
    if const > f.lambda_min * (1 + 1e-12):
        raise InvalidRotationError(
            f"rotation constant {const:.6g} exceeds smallest eigenvalue {f.lambda_min:.6g}")
    for lam in f.eigenvalues:
        frac = lam * cfg.t0 / (2 * math.pi)
        if not 0.0 <= frac < 1.0:
            raise ConfigError(
                f"eigenphase {frac:.6g} of eigenvalue {lam:.6g} outside [0, 1); reduce t0")


def phases_exact(f: FMatrix, cfg: HhlConfig) -> bool:
    """True when every eigenphase is an exact ``clock_qubits``-bit fraction."""
    n = 1 << cfg.clock_qubits
    for lam in f.eigenvalues:
        v = lam * cfg.t0 * n / (2 * math.pi)
        if abs(v - round(v)) > _PHASE_EXACT_TOL:
            return False
    return True


def clock_eigenvalue(m: int, cfg: HhlConfig) -> float:
    """Eigenvalue encoded by clock value ``m``."""
    return 2 * math.pi * m / ((1 << cfg.clock_qubits) * cfg.t0)


def standalone_hhl_layout(cfg: HhlConfig) -> HhlLayout:
    c = cfg.clock_qubits
    return HhlLayout(0, tuple(range(1, c + 1)), c + 1, c + 2)


def _phase_estimation(f: FMatrix, cfg: HhlConfig, lay: HhlLayout) -> Circuit:
    c = Circuit(lay.n_qubits)
    for q in lay.clock:
        c.add(sv.h(q))
    for k, q in enumerate(lay.clock):
        for g in f_evolution_gate(f, cfg.t0 * (1 << k), lay.input):
            c.add(g.with_controls([(q, 1)]))
    return c.then(sv.adjoint(qft_circuit(len(lay.clock), lay.clock, lay.n_qubits)))


def hhl_subcircuit(f: FMatrix, cfg: HhlConfig, layout: HhlLayout | None = None) -> Circuit:
    """Phase estimation, eigenvalue-conditioned ancilla rotation, uncompute.

    Default layout: input qubit 0, clock qubits 1..clock_qubits, ancilla
    last.  For clock value ``m`` with encoded eigenvalue ``lam_m >= C`` the
    ancilla receives ``RY(2 asin(C / lam_m))``; smaller (unpopulated when the
    phases are exact) values get no rotation.  Conditioning the output on
    clock ``0...0`` and ancilla ``1`` leaves the input qubit proportional to
    ``F^-1 |input>``.
    """
    check_hhl_config(f, cfg)
    lay = layout or standalone_hhl_layout(cfg)
    const = cfg.resolved_constant(f)
    qpe = _phase_estimation(f, cfg, lay)
    rot = Circuit(lay.n_qubits)
    for m in range(1, 1 << len(lay.clock)):
        lam = clock_eigenvalue(m, cfg)
        if lam < const * (1 - 1e-12):
            continue
        ratio = const / lam
        if ratio > 1.0 - 1e-12:
            ratio = 1.0
        ctrl = [(q, (m >> k) & 1) for k, q in enumerate(lay.clock)]
        rot.add(sv.ry(lay.ancilla, 2 * math.asin(ratio), ctrl))
    return qpe.then(rot).then(sv.adjoint(qpe))


def qsvm_layout(n_data: int, cfg: HhlConfig, fold: bool = True) -> QsvmLayout:
    """Qubit roles of the classification circuit.

    With ``fold`` the data register reuses the low clock qubits, which is
    sound only when the clock uncomputes to exactly ``|0...0>`` (exact
    eigenphases).  Otherwise data sits above the clock.  Index, HHL ancilla
    and readout follow, in that order.
    """
    c = cfg.clock_qubits
    if fold:
        data, w = tuple(range(n_data)), max(c, n_data)
    else:
        data, w = tuple(range(c, c + n_data)), c + n_data
    return QsvmLayout(data, tuple(range(c)), w, w + 1, w + 2, w + 3)


def folds_data(f: FMatrix, cfg: HhlConfig) -> bool:
    """Whether :func:`qsvm_circuit` shares qubits between data and clock."""
    return phases_exact(f, cfg)


def label_state_angle(y) -> float:
    """RY angle preparing ``(y1|0> + y2|1>) / ||y||`` on the index qubit."""
    return angle2(*y)


def qsvm_circuit(model: TrainedModel, test_prep: Circuit, hhl: HhlConfig | None = None) -> Circuit:
    """Full classification circuit for one query preparation ``test_prep``."""
    hhl = hhl or HhlConfig()
    n_data = model.n_data_qubits
    if test_prep.n_qubits != n_data or model.train2_circuit.n_qubits != n_data:
        raise ShapeError(
            f"test preparation has {test_prep.n_qubits} qubits, model expects {n_data}")
    lay = qsvm_layout(n_data, hhl, folds_data(model.f, hhl))
    n = lay.n_qubits
    on = [(lay.readout, 1)]

    body = _solver_prefix(model, hhl, lay)
    # training-data oracle: point 1 on index |0>, point 2 on index |1>
    body = body.then(model.train1_circuit.embed(n, lay.data).controlled([(lay.index, 0)]))
    body = body.then(model.train2_circuit.embed(n, lay.data).controlled([(lay.index, 1)]))
    # query: undo the test preparation and fold the index onto |0>
    body = body.then(sv.adjoint(test_prep).embed(n, lay.data))
    body.add(sv.h(lay.index))

    c = Circuit(n, [sv.h(lay.readout)])
    if hhl.post_select:
        c.add(sv.x(lay.ancilla, [(lay.readout, 0)]))
    c = c.then(body.controlled(on))
    c.add(sv.h(lay.readout))
    return c


def _solver_prefix(model: TrainedModel, hhl: HhlConfig, lay: QsvmLayout) -> Circuit:
    """Label-state preparation on the index qubit followed by HHL."""
    c = Circuit(lay.n_qubits, [sv.ry(lay.index, label_state_angle(model.y))])
    return c.then(hhl_subcircuit(
        model.f, hhl, HhlLayout(lay.index, lay.clock, lay.ancilla, lay.n_qubits)))


def _readout_patterns(lay: QsvmLayout, post_select: bool) -> tuple[str, str]:
    fixed = {q: 0 for q in range(lay.index)}
    fixed[lay.index] = 0
    if post_select:
        fixed[lay.ancilla] = 1
    p0 = sv.pattern_from_bits(lay.n_qubits, {**fixed, lay.readout: 0})
    p1 = sv.pattern_from_bits(lay.n_qubits, {**fixed, lay.readout: 1})
    return p0, p1


def classify_qsvm(model: TrainedModel, test, hhl: HhlConfig | None = None,
                  shots: int | None = None, seed: int = 0) -> Prediction:
    """Run :func:`qsvm_circuit` for ``test`` and read the sign of the overlap.

    ``shots=None`` is exact mode.  The score is the readout's Z expectation
    conditioned on data, clock and index all zero (and on the ancilla's
    success outcome when ``hhl.post_select``).
    """
    hhl = hhl or HhlConfig()
    t = as_vector(test)
    if abs(t.norm - 1.0) > NORM_TOL:
        raise PreconditionError(f"test vector must be unit norm, got norm {t.norm:.12g}")
    if len(t) != len(model.train1_vector):
        raise ShapeError(f"test has {len(t)} features, model has {len(model.train1_vector)}")
    circuit = qsvm_circuit(model, encode(t), hhl)
    lay = qsvm_layout(model.n_data_qubits, hhl, folds_data(model.f, hhl))
    state = sv.run(circuit)
    p0_pat, p1_pat = _readout_patterns(lay, hhl.post_select)
    # HHL success is read off the solver stage alone: in the full circuit the
    # readout's reference branch also carries ancilla = 1
    solved = sv.run(_solver_prefix(model, hhl, lay))
    herald = sv.pattern_from_bits(lay.n_qubits, {lay.ancilla: 1})

    if shots is None:
        success = sv.outcome_probability(solved, herald)
        if hhl.post_select and success < STARVED_PROBABILITY:
            raise StarvedPostSelectionError(
                f"post-selection success probability {success:.3g} below {STARVED_PROBABILITY}")
        p0 = sv.outcome_probability(state, p0_pat)
        p1 = sv.outcome_probability(state, p1_pat)
    else:
        counts = sv.sample_counts(state, shots, seed)
        success = sv.sample_counts(solved, shots, seed + 1).frequency(herald)
        p0, p1 = counts.frequency(p0_pat), counts.frequency(p1_pat)

    total = p0 + p1
    score = (p0 - p1) / total if total > 0 else 0.0
    label, tie = _decide(score, model.labels)
    return Prediction(label, float(score), tie, {
        "success_probability": float(success),
        "p_readout0": float(p0),
        "p_readout1": float(p1),
        "n_qubits": circuit.n_qubits,
    })
