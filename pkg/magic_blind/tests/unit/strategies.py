# coding=utf-8
"""Hypothesis strategies shared by the unit tests."""
from hypothesis import strategies as st

from magic_blind.app.clifford import GATE_KINDS, TWO_QUBIT_GATES, CliffordCircuit, \
    CliffordGate, CliffordStructure
from magic_blind.app.pauli import PauliString, SinglePauliLabel


LABELS = SinglePauliLabel.all()


@st.composite
def paulis(draw, k=None, min_k=1, max_k=4, phase=True):
    """A Pauli string, with a random phase unless ``phase`` is False."""
    k = k or draw(st.integers(min_value=min_k, max_value=max_k))
    x = draw(st.lists(st.integers(0, 1), min_size=k, max_size=k))
    z = draw(st.lists(st.integers(0, 1), min_size=k, max_size=k))
    return PauliString(x, z, draw(st.integers(0, 3)) if phase else 0)


@st.composite
def gates(draw, k):
    """One gate on k wires."""
    kinds = GATE_KINDS if k > 1 else tuple(g for g in GATE_KINDS if g not in TWO_QUBIT_GATES)
    kind = draw(st.sampled_from(kinds))
    if kind in TWO_QUBIT_GATES:
        pair = draw(st.lists(st.integers(0, k - 1), min_size=2, max_size=2, unique=True))
        return CliffordGate(kind, *pair)
    return CliffordGate(kind, draw(st.integers(0, k - 1)))


@st.composite
def circuits(draw, k=None, min_k=1, max_k=4, max_gates=8):
    """A random Clifford circuit."""
    k = k or draw(st.integers(min_value=min_k, max_value=max_k))
    return CliffordCircuit(k, draw(st.lists(gates(k), max_size=max_gates)))


@st.composite
def structures(draw, max_n=3, max_t=2, max_gates=4):
    """A random Clifford structure."""
    n = draw(st.integers(1, max_n))
    t = draw(st.integers(0, max_t))
    layers = [draw(circuits(n, max_gates=max_gates)) for _i in range(t + 1)]
    return CliffordStructure(n, t, layers)


@st.composite
def labels(draw, k):
    """k single-qubit stabilizer labels."""
    return draw(st.lists(st.sampled_from(LABELS), min_size=k, max_size=k))
