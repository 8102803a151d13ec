"""
Dense statevector and density-matrix backend.

Qubit 0 is the most significant bit of a basis index, i.e. the leftmost Kronecker factor,
matching the left-to-right order of Pauli strings.
"""
from gettext import gettext as _
from itertools import product
from typing import NamedTuple
import logging

import numpy as np
from scipy.stats import unitary_group

from magic_blind.app.clifford import GATE, CliffordGate
from magic_blind.app.exceptions import CapacityError, ContractError, DimensionError
from magic_blind.app.pauli import PAULI, SinglePauliLabel, enumerate_paulis


log = logging.getLogger(__name__)


DENSE_CAP = 14
KEY_BITS_CAP = 24
TWIRL_CAP = 3

T_LABEL = 'T'

_S2 = 1 / np.sqrt(2)

FACTOR_MATRICES = {
    PAULI.I: np.eye(2, dtype=complex),
    PAULI.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PAULI.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    PAULI.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}

GATE_MATRICES = {
    GATE.H: np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    GATE.S: np.diag([1, 1j]).astype(complex),
    GATE.X: FACTOR_MATRICES[PAULI.X],
    GATE.Y: FACTOR_MATRICES[PAULI.Y],
    GATE.Z: FACTOR_MATRICES[PAULI.Z],
    GATE.CNOT: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    GATE.SWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}

T_MATRIX = np.diag([1, np.exp(1j * np.pi / 4)])

LABEL_AMPLITUDES = {
    '+Z': (1, 0),
    '-Z': (0, 1),
    '+X': (_S2, _S2),
    '-X': (_S2, -_S2),
    '+Y': (_S2, 1j * _S2),
    '-Y': (_S2, -1j * _S2),
    T_LABEL: (_S2, np.exp(1j * np.pi / 4) * _S2),
}


class Angle:
    """
    A multiple of π/2.

    Fields:
        quarter_turns (int): The multiple, in ``{0, 1, 2, 3}``.
    """

    __slots__ = ('quarter_turns',)

    def __init__(self, quarter_turns=0):
        """
        Reduce the multiple mod 4.
        """
        self.quarter_turns = int(quarter_turns) % 4

    @property
    def radians(self):
        """The angle in radians."""
        return self.quarter_turns * np.pi / 2

    def rotation(self, dagger=False):
        """The 2x2 matrix of Z(θ) = diag(1, e^{iθ}), or of its adjoint."""
        sign = -1 if dagger else 1
        return np.diag([1, np.exp(sign * 1j * self.radians)])

    def __add__(self, other):
        return Angle(self.quarter_turns + int(other))

    def __neg__(self):
        return Angle(-self.quarter_turns)

    def __eq__(self, other):
        if not isinstance(other, Angle):
            return NotImplemented
        return self.quarter_turns == other.quarter_turns

    def __hash__(self):
        return hash(self.quarter_turns)

    def __int__(self):
        return self.quarter_turns

    def __repr__(self):
        return 'Angle({q}π/2)'.format(q=self.quarter_turns)


class TGate(NamedTuple):
    """T = diag(1, e^{iπ/4}) on qubit q."""

    q: int


class ZRotation(NamedTuple):
    """Z(angle) on qubit q, or its adjoint when ``dagger`` is set."""

    q: int
    angle: Angle
    dagger: bool = False


class StateVector:
    """
    A normalized pure state on k qubits.

    Fields:
        amplitudes (numpy.ndarray): 2**k complex amplitudes.
    """

    __slots__ = ('amplitudes',)

    def __init__(self, amplitudes):
        """
        Check the length is a power of two and the norm is 1.
        """
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        k = int(round(np.log2(amplitudes.size))) if amplitudes.size else -1
        if k < 1 or amplitudes.size != 2 ** k:
            raise DimensionError(_('{d} amplitudes do not describe a qubit register').format(
                d=amplitudes.size))
        if abs(np.vdot(amplitudes, amplitudes).real - 1) > 1e-9:
            raise ContractError(_('State vector is not normalized'))
        self.amplitudes = amplitudes

    @property
    def k(self):
        """Number of qubits."""
        return int(self.amplitudes.size).bit_length() - 1

    def tensor(self):
        """Amplitudes as a rank-k tensor, axis j for qubit j."""
        return self.amplitudes.reshape([2] * self.k)

    def density(self):
        """The projector onto this state."""
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def append(self, other):
        """``self ⊗ other``, other on the higher indices."""
        return StateVector(np.kron(self.amplitudes, other.amplitudes))

    def permute(self, order):
        """New qubit j is old qubit ``order[j]``."""
        return StateVector(np.transpose(self.tensor(), order).reshape(-1))

    def __repr__(self):
        return 'StateVector(k={k})'.format(k=self.k)


class DensityMatrix:
    """
    A k-qubit density matrix.

    Operators that are not states (twirl sums, differences) are built with
    ``check=False``.

    Fields:
        matrix (numpy.ndarray): 2**k x 2**k complex matrix.
    """

    __slots__ = ('matrix',)

    def __init__(self, matrix, check=True):
        """
        Check Hermiticity, unit trace and, for k <= 4, positivity.
        """
        matrix = np.asarray(matrix, dtype=complex)
        d = matrix.shape[0]
        if matrix.ndim != 2 or matrix.shape != (d, d) or d < 2 or d & (d - 1):
            raise DimensionError(_('A density matrix must be square with a power-of-two side'))
        self.matrix = matrix
        if check:
            if not np.allclose(matrix, matrix.conj().T, atol=1e-9):
                raise ContractError(_('Density matrix is not Hermitian'))
            if abs(np.trace(matrix) - 1) > 1e-9:
                raise ContractError(_('Density matrix trace is {t}').format(t=np.trace(matrix)))
            if self.k <= 4 and np.linalg.eigvalsh(matrix).min() < -1e-7:
                raise ContractError(_('Density matrix is not positive semidefinite'))

    @property
    def k(self):
        """Number of qubits."""
        return int(self.matrix.shape[0]).bit_length() - 1

    def __repr__(self):
        return 'DensityMatrix(k={k})'.format(k=self.k)


def _check_cap(k, cap):
    if k > cap:
        raise CapacityError(_('{k} qubits exceed the dense cap of {c}').format(k=k, c=cap))


def _check_qubit(q, k):
    if not 0 <= q < k:
        raise DimensionError(_('Qubit {q} is out of range for {k} qubits').format(q=q + 1, k=k))


def _apply_matrix(tensor, u, targets):
    m = len(targets)
    u = np.asarray(u, dtype=complex).reshape([2] * (2 * m))
    out = np.tensordot(u, tensor, axes=(list(range(m, 2 * m)), list(targets)))
    return np.moveaxis(out, list(range(m)), list(targets))


def prepare(labels, cap=DENSE_CAP):
    """
    Product state from stabilizer labels and ``'T'`` (the state T|+⟩).

    Args:
        labels (sequence): SinglePauliLabel objects, their string forms, or ``'T'``.
        cap (int): Largest register allowed.

    """
    _check_cap(len(labels), cap)
    state = np.ones(1, dtype=complex)
    for label in labels:
        key = str(label) if isinstance(label, SinglePauliLabel) else label
        if key not in LABEL_AMPLITUDES:
            key = str(SinglePauliLabel.parse(key))
        state = np.kron(state, np.array(LABEL_AMPLITUDES[key], dtype=complex))
    return StateVector(state)


def apply_unitary(psi, u, targets):
    """
    Apply a 2^m x 2^m unitary to the listed qubits.
    """
    for q in targets:
        _check_qubit(q, psi.k)
    return StateVector(_apply_matrix(psi.tensor(), u, list(targets)).reshape(-1))


def apply_gate(psi, g):
    """
    Apply a Clifford gate, a :class:`TGate` or a :class:`ZRotation`.
    """
    if isinstance(g, CliffordGate):
        return apply_unitary(psi, GATE_MATRICES[g.kind], g.targets)
    if isinstance(g, TGate):
        return apply_unitary(psi, T_MATRIX, [g.q])
    if isinstance(g, ZRotation):
        return apply_unitary(psi, g.angle.rotation(g.dagger), [g.q])
    raise ContractError(_('Unsupported gate {g}').format(g=g))


def apply_circuit(psi, circuit):
    """Apply every gate of a circuit in order."""
    if circuit.k != psi.k:
        raise DimensionError(_('A {a}-qubit circuit cannot act on {b} qubits').format(
            a=circuit.k, b=psi.k))
    for gate in circuit:
        psi = apply_gate(psi, gate)
    return psi


def apply_pauli(psi, p):
    """Apply a Pauli string, phase included."""
    if p.k != psi.k:
        raise DimensionError(_('A {a}-qubit Pauli cannot act on {b} qubits').format(
            a=p.k, b=psi.k))
    tensor = psi.tensor()
    for q, factor in enumerate(p.factors()):
        if factor != PAULI.I:
            tensor = _apply_matrix(tensor, FACTOR_MATRICES[factor], [q])
    return StateVector(tensor.reshape(-1) * 1j ** p.phase)


def project(psi, q, bit):
    """
    Project qubit q onto ``|bit⟩``.

    Returns:
        tuple: ``(probability, normalized state)``; the state is None for probability 0.

    """
    _check_qubit(q, psi.k)
    tensor = psi.tensor().copy()
    index = [slice(None)] * psi.k
    index[q] = 1 - bit
    tensor[tuple(index)] = 0
    probability = float(np.vdot(tensor, tensor).real)
    if probability < 1e-15:
        return 0.0, None
    return probability, StateVector(tensor.reshape(-1) / np.sqrt(probability))


def measure(psi, q, rng):
    """
    Born-rule Z measurement of qubit q with collapse.

    Returns:
        tuple: ``(bit, post-measurement state)``.

    """
    p_one, _state = project(psi, q, 1)
    bit = 1 if rng.random() < p_one else 0
    return bit, project(psi, q, bit)[1]


def discard(psi, q):
    """
    Remove qubit q, which must be in a Z basis state.

    Returns:
        tuple: ``(bit, state on the remaining qubits)``; the state is None when k was 1.

    """
    p_one, _state = project(psi, q, 1)
    if 1e-12 < p_one < 1 - 1e-12:
        raise ContractError(_('Qubit {q} is not in a Z eigenstate and cannot be discarded').format(
            q=q + 1))
    bit = 1 if p_one >= 0.5 else 0
    if psi.k == 1:
        return bit, None
    rest = np.take(psi.tensor(), bit, axis=q).reshape(-1)
    return bit, StateVector(rest / np.linalg.norm(rest))


def z_distribution(psi):
    """
    Z-basis outcome probabilities, indexed by the basis index (qubit 0 most significant).
    """
    return np.abs(psi.amplitudes) ** 2


def key_averaged_view(builder, k, angles=0, cap=KEY_BITS_CAP):
    """
    Exact uniform average over every pad ``(a, r)`` on k qubits and every angle list.

    Args:
        builder (callable): ``builder(a, r, thetas)`` returning a StateVector or
            DensityMatrix; ``thetas`` is a tuple of :class:`Angle`.
        k (int): Pad width.
        angles (int): Number of angle secrets.
        cap (int): Largest number of enumerated secret bits.

    Raises:
        CapacityError: If ``2k + 2·angles`` exceeds the cap.

    """
    bits = 2 * k + 2 * angles
    if bits > cap:
        raise CapacityError(_('Averaging over {b} secret bits exceeds the cap of {c}').format(
            b=bits, c=cap))
    total = None
    count = 0
    for a in product((0, 1), repeat=k):
        for r in product((0, 1), repeat=k):
            for thetas in product(range(4), repeat=angles):
                state = builder(a, r, tuple(Angle(t) for t in thetas))
                matrix = state.density().matrix if isinstance(state, StateVector) else state.matrix
                total = matrix.copy() if total is None else total + matrix
                count += 1
    log.debug(_('Averaged {c} key assignments').format(c=count))
    return DensityMatrix(total / count)


def trace_distance(m1, m2):
    """
    Half the sum of singular values of ``m1 - m2``.
    """
    if m1.matrix.shape != m2.matrix.shape:
        raise DimensionError(_('Cannot compare {a}- and {b}-qubit matrices').format(
            a=m1.k, b=m2.k))
    return float(0.5 * np.sum(np.linalg.svd(m1.matrix - m2.matrix, compute_uv=False)))


def pauli_matrix(p):
    """The 2^k x 2^k matrix of a Pauli string."""
    matrix = np.ones((1, 1), dtype=complex)
    for factor in p.factors():
        matrix = np.kron(matrix, FACTOR_MATRICES[factor])
    return matrix * 1j ** p.phase


def circuit_unitary(circuit):
    """The 2^k x 2^k unitary of a Clifford circuit."""
    d = 2 ** circuit.k
    columns = np.eye(d, dtype=complex).reshape([d] + [2] * circuit.k)
    for gate in circuit:
        targets = [q + 1 for q in gate.targets]
        columns = _apply_matrix(columns, GATE_MATRICES[gate.kind], targets)
    return columns.reshape(d, d).T


def pauli_twirl_check(e1, e2, rho, cap=TWIRL_CAP):
    """
    ``Σ_Q Q† E1 Q ρ Q† E2† Q`` over every Pauli Q on k qubits.

    The sum vanishes when E1 and E2 differ as Pauli operators and equals
    ``4^k · E1 ρ E1†`` when they coincide.

    Returns:
        DensityMatrix: The sum, built without state checks.

    """
    k = rho.k
    if k > cap:
        raise CapacityError(_('Twirl checks are limited to {c} qubits').format(c=cap))
    if e1.k != k or e2.k != k:
        raise DimensionError(_('Deviations and state differ in width'))
    m1 = pauli_matrix(e1)
    m2 = pauli_matrix(e2)
    total = np.zeros_like(rho.matrix)
    for q in enumerate_paulis(k):
        mq = pauli_matrix(q)
        left = mq.conj().T @ m1 @ mq
        right = mq.conj().T @ m2.conj().T @ mq
        total = total + left @ rho.matrix @ right
    return DensityMatrix(total, check=False)


def stabilizer_density_matrix(st):
    """
    ``Π_j (I + S_j) / 2`` for the stabilizer generators S_j of a stabilizer state.
    """
    d = 2 ** st.k
    rho = np.eye(d, dtype=complex)
    for stabilizer in st.stabilizers():
        rho = rho @ (np.eye(d) + pauli_matrix(stabilizer)) / 2
    return DensityMatrix(rho)


def partial_trace(rho, keep):
    """
    Trace out every qubit not listed in ``keep``; kept qubits stay in ascending order.
    """
    k = rho.k
    keep = sorted(keep)
    tensor = rho.matrix.reshape([2] * (2 * k))
    for q in sorted((q for q in range(k) if q not in keep), reverse=True):
        width = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=q, axis2=q + width)
    d = 2 ** len(keep)
    return DensityMatrix(tensor.reshape(d, d), check=False)


def pauli_decomposition(u, m, w_priv):
    """
    Pauli weights of a unitary acting on m client wires and ``w_priv`` work wires.

    Writing ``U = Σ_E E ⊗ U_E`` with E over m-qubit Paulis, the weight of E is
    ``||U_E |0…0⟩||²`` with the work wires starting in ``|0…0⟩``.

    Returns:
        list: ``(PauliString, weight)`` pairs in enumeration order; weights sum to 1.

    """
    dm, dw = 2 ** m, 2 ** w_priv
    u = np.asarray(u, dtype=complex)
    if u.shape != (dm * dw, dm * dw):
        raise DimensionError(_('Unitary of shape {s} does not act on {m}+{w} qubits').format(
            s=u.shape, m=m, w=w_priv))
    blocks = u.reshape(dm, dw, dm, dw)
    weights = []
    for e in enumerate_paulis(m):
        u_e = np.einsum('ca,awcv->wv', pauli_matrix(e).conj().T, blocks) / dm
        weights.append((e, float(np.sum(np.abs(u_e[:, 0]) ** 2))))
    return weights


def random_unitary(k, rng):
    """Haar-random unitary on k qubits."""
    return unitary_group.rvs(2 ** k, random_state=rng)
