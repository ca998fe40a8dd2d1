import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsvm_lab import statevector as sv
from qsvm_lab.encoding import (
    FeatureVector,
    angle2,
    encode,
    encode2,
    encode4,
    encoding_params,
    n_data_qubits,
    normalize,
)
from qsvm_lab.errors import DegenerateVectorError, PreconditionError, ShapeError

from _util import unit

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def prepared(circuit):
    return sv.run(circuit).amplitudes


def test_feature_vector_validation():
    with pytest.raises(ShapeError):
        FeatureVector([])
    with pytest.raises(PreconditionError):
        FeatureVector([1.0, float("nan")])
    with pytest.raises(ShapeError):
        FeatureVector([1.0, 0.0], label=2)


def test_normalize_keeps_label():
    v = normalize(FeatureVector([3.0, 4.0], 1))
    np.testing.assert_allclose(v.features, [0.6, 0.8])
    assert v.label == 1
    with pytest.raises(DegenerateVectorError):
        normalize([0.0, 0.0])


def test_angle2_quadrants():
    assert angle2(1, 0) == 0.0
    assert angle2(0, 1) == pytest.approx(math.pi)
    assert angle2(-1, 0) == pytest.approx(2 * math.pi)
    assert angle2(1, -1) == pytest.approx(-math.pi / 2)
    with pytest.raises(DegenerateVectorError):
        angle2(0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(a=finite, b=finite)
def test_encode2_round_trip(a, b):
    if math.hypot(a, b) < 1e-6:
        return
    v = unit([a, b])
    np.testing.assert_allclose(prepared(encode2(v)), v, atol=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.lists(finite, min_size=4, max_size=4))
def test_encode4_round_trip_exact_amplitudes(raw):
    if np.linalg.norm(raw) < 1e-6:
        return
    v = unit(raw)
    # real signed amplitudes are reproduced without any phase freedom
    np.testing.assert_allclose(prepared(encode4(v)), v, atol=1e-10)


@pytest.mark.parametrize("v", [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0],
                               [0, 0, 0.6, -0.8], [0.6, -0.8, 0, 0]])
def test_encode4_degenerate_branches(v):
    np.testing.assert_allclose(prepared(encode4(v)), v, atol=1e-12)


def test_encode4_gate_structure():
    c = encode4(unit([1, 2, 3, 4]))
    assert [g.kind for g in c] == ["U3"] * 3
    assert c.ops[0].target == 1 and c.ops[0].controls == ()
    assert c.ops[1].controls == ((1, 0),) and c.ops[2].controls == ((1, 1),)


def test_literal_convention_swaps_high_branch():
    v = unit([0.1, 0.2, 0.3, 0.9])
    out = prepared(encode4(v, convention="literal"))
    assert not np.allclose(out, v, atol=1e-6)
    np.testing.assert_allclose(out, v[[0, 1, 3, 2]], atol=1e-12)


def test_literal_convention_agrees_when_high_pair_equal():
    v = unit([0.4, -0.2, 0.5, 0.5])
    np.testing.assert_allclose(prepared(encode4(v, convention="literal")), v, atol=1e-12)


def test_encoding_params_angles():
    v = unit([1, 1, 1, 1])
    p = encoding_params(v)
    assert p.theta("U3_1") == pytest.approx(math.pi / 2)
    assert p.theta("U3_2") == pytest.approx(math.pi / 2)
    assert p.theta("U3_3") == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        encoding_params(v, convention="other")


def test_unit_norm_precondition():
    with pytest.raises(PreconditionError):
        encode4([1, 1, 1, 1])
    with pytest.raises(PreconditionError):
        encode2([1.0 + 2e-9, 0.0])
    encode2([1.0 + 5e-10, 0.0])


def test_dispatch_and_widths():
    assert encode(unit([1, 2])).n_qubits == 1
    assert encode(unit([1, 2, 3, 4])).n_qubits == 2
    with pytest.raises(ShapeError):
        encode(unit([1, 2, 3]))
    assert n_data_qubits(2) == 1 and n_data_qubits(4) == 2
    with pytest.raises(ShapeError):
        n_data_qubits(3)
