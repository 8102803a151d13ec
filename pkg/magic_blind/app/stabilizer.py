"""
Stabilizer-state simulation with destabilizers.

Rows ``0..k-1`` of the table are destabilizers and rows ``k..2k-1`` stabilizers; each row
is a Pauli string stored as bits plus a phase exponent. Stabilizer phases stay in
``{0, 2}``.
"""
from fractions import Fraction
from gettext import gettext as _
import logging

import numpy as np

from magic_blind.app.clifford import CliffordCircuit, CliffordTableau, conjugate_pauli, \
    conjugate_rows
from magic_blind.app.exceptions import ContractError, DimensionError
from magic_blind.app.pauli import PauliString, phase_exponent


log = logging.getLogger(__name__)


class StabilizerState:
    """
    A pure k-qubit stabilizer state.

    Fields:
        x (numpy.ndarray): uint8 (2k, k) X bits of destabilizers then stabilizers.
        z (numpy.ndarray): uint8 (2k, k) Z bits.
        phase (numpy.ndarray): int64 (2k,) phase exponents.
    """

    __slots__ = ('x', 'z', 'phase')

    def __init__(self, x, z, phase):
        """
        Take ownership of the arrays; stabilizer signs must be real.
        """
        x = np.asarray(x, dtype=np.uint8)
        z = np.asarray(z, dtype=np.uint8)
        phase = np.asarray(phase, dtype=np.int64) % 4
        rows, k = x.shape
        if rows != 2 * k or z.shape != x.shape or phase.shape != (rows,):
            raise DimensionError(_('A stabilizer table on {k} qubits needs {r} rows').format(
                k=k, r=2 * k))
        if np.any(phase[k:] % 2):
            raise ContractError(_('Stabilizer generators must carry a real sign'))
        self.x = x
        self.z = z
        self.phase = phase

    @property
    def k(self):
        """Number of qubits."""
        return self.x.shape[1]

    def copy(self):
        """An independent copy."""
        return StabilizerState(self.x.copy(), self.z.copy(), self.phase.copy())

    def row(self, index):
        """Row ``index`` as a PauliString."""
        return PauliString(self.x[index], self.z[index], self.phase[index])

    def stabilizers(self):
        """The k stabilizer generators."""
        return [self.row(self.k + j) for j in range(self.k)]

    def destabilizers(self):
        """The k destabilizer generators."""
        return [self.row(j) for j in range(self.k)]

    def validate(self):
        """
        Check the tableau invariants.

        Returns:
            bool: True iff stabilizers commute pairwise, destabilizer j anticommutes with
                stabilizer j only, and the destabilizers commute pairwise.

        """
        k = self.k
        symplectic = (self.x.astype(np.int64) @ self.z.T.astype(np.int64)
                      + self.z.astype(np.int64) @ self.x.T.astype(np.int64)) % 2
        expected = np.zeros((2 * k, 2 * k), dtype=np.int64)
        expected[:k, k:] = np.eye(k, dtype=np.int64)
        expected[k:, :k] = np.eye(k, dtype=np.int64)
        return bool(np.array_equal(symplectic, expected))

    def __repr__(self):
        return 'StabilizerState([{s}])'.format(s=', '.join(str(p) for p in self.stabilizers()))


def _left_multiply(state, rows, source):
    """
    Replace each row in ``rows`` by ``row[source] · row``.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return
    state.phase[rows] = (state.phase[rows] + state.phase[source] + phase_exponent(
        state.x[source], state.z[source], state.x[rows], state.z[rows])) % 4
    state.x[rows] ^= state.x[source]
    state.z[rows] ^= state.z[source]


def prepare_product(labels):
    """
    The product state with qubit j stabilized by ``labels[j]``.

    Args:
        labels (sequence): :class:`~magic_blind.app.pauli.SinglePauliLabel` per qubit.

    """
    k = len(labels)
    x = np.zeros((2 * k, k), dtype=np.uint8)
    z = np.zeros((2 * k, k), dtype=np.uint8)
    phase = np.zeros(2 * k, dtype=np.int64)
    for j, label in enumerate(labels):
        if label.axis == 'Z':
            x[j, j] = 1
        else:
            z[j, j] = 1
        x[k + j, j] = label.axis in ('X', 'Y')
        z[k + j, j] = label.axis in ('Y', 'Z')
        phase[k + j] = 0 if label.sign > 0 else 2
    return StabilizerState(x, z, phase)


def apply_clifford(st, c):
    """
    Conjugate every generator by a circuit or a tableau.

    Raises:
        DimensionError: If the widths differ.

    """
    if c.k != st.k:
        raise DimensionError(_('A {a}-qubit Clifford cannot act on a {b}-qubit state').format(
            a=c.k, b=st.k))
    result = st.copy()
    if isinstance(c, CliffordCircuit):
        for gate in c:
            conjugate_rows(result.x, result.z, result.phase, gate)
        return result
    if isinstance(c, CliffordTableau):
        for index in range(2 * st.k):
            image = conjugate_pauli(c, st.row(index))
            result.x[index], result.z[index], result.phase[index] = image.x, image.z, image.phase
        return result
    raise ContractError(_('Expected a CliffordCircuit or CliffordTableau, got {t}').format(
        t=type(c).__name__))


def apply_pauli(st, p):
    """
    Apply the Pauli p: every row anticommuting with p changes sign.
    """
    if p.k != st.k:
        raise DimensionError(_('A {a}-qubit Pauli cannot act on a {b}-qubit state').format(
            a=p.k, b=st.k))
    result = st.copy()
    anticommuting = (np.sum(result.x & p.z, axis=1) + np.sum(result.z & p.x, axis=1)) % 2
    result.phase = (result.phase + 2 * anticommuting) % 4
    return result


def _deterministic_outcome(st, q):
    k = st.k
    sx = np.zeros(k, dtype=np.uint8)
    sz = np.zeros(k, dtype=np.uint8)
    sp = 0
    for i in np.flatnonzero(st.x[:k, q]):
        row = k + i
        sp += int(st.phase[row]) + int(phase_exponent(st.x[row], st.z[row], sx, sz))
        sx ^= st.x[row]
        sz ^= st.z[row]
    return 1 if sp % 4 == 2 else 0


def _collapse(st, q, outcome):
    k = st.k
    result = st.copy()
    pivot = k + int(np.flatnonzero(result.x[k:, q])[0])
    others = [i for i in np.flatnonzero(result.x[:, q]) if i != pivot]
    _left_multiply(result, others, pivot)
    result.x[pivot - k] = result.x[pivot]
    result.z[pivot - k] = result.z[pivot]
    result.phase[pivot - k] = result.phase[pivot]
    result.x[pivot] = 0
    result.z[pivot] = 0
    result.z[pivot, q] = 1
    result.phase[pivot] = 2 * outcome
    return result


def is_deterministic(st, q):
    """True iff ±Z_q belongs to the stabilizer group."""
    return not st.x[st.k:, q].any()


def measure_z(st, q, rng):
    """
    Measure qubit q in the Z basis.

    Args:
        st (StabilizerState): The state.
        q (int): 0-based qubit.
        rng (numpy.random.Generator): Source of the fair coin for random outcomes.

    Returns:
        tuple: ``(outcome, deterministic, post-measurement state)``.

    """
    if not 0 <= q < st.k:
        raise DimensionError(_('Qubit {q} is out of range for {k} qubits').format(q=q + 1, k=st.k))
    if is_deterministic(st, q):
        return _deterministic_outcome(st, q), True, st
    outcome = int(rng.integers(2))
    return outcome, False, _collapse(st, q, outcome)


def project_z(st, q, outcome):
    """
    Project qubit q onto a chosen Z outcome.

    Returns:
        tuple: ``(probability, state)`` with probability a Fraction in {0, 1/2, 1};
            the state is None when the probability is 0.

    """
    if is_deterministic(st, q):
        if _deterministic_outcome(st, q) == outcome:
            return Fraction(1), st
        return Fraction(0), None
    return Fraction(1, 2), _collapse(st, q, outcome)


def is_stabilized_by(st, p):
    """
    True iff p, sign included, is an element of the stabilizer group.
    """
    if p.k != st.k:
        raise DimensionError(_('A {a}-qubit Pauli cannot be checked on a {b}-qubit state').format(
            a=p.k, b=st.k))
    k = st.k
    stab_x, stab_z = st.x[k:], st.z[k:]
    if np.any((np.sum(stab_x & p.z, axis=1) + np.sum(stab_z & p.x, axis=1)) % 2):
        return False
    destab_hits = (np.sum(st.x[:k] & p.z, axis=1) + np.sum(st.z[:k] & p.x, axis=1)) % 2
    product = PauliString.identity(k)
    for i in np.flatnonzero(destab_hits):
        product = st.row(k + i) * product
    return product == p


def discard(st, q):
    """
    Remove qubit q, which must already be a Z eigenstate.

    Returns:
        tuple: ``(bit, state on k-1 qubits)``; the state is None when k was 1.

    Raises:
        ContractError: If qubit q is entangled with or not diagonal in Z.

    """
    if not is_deterministic(st, q):
        raise ContractError(_('Qubit {q} is not in a Z eigenstate and cannot be discarded').format(
            q=q + 1))
    k = st.k
    result = st.copy()
    support = [int(i) for i in np.flatnonzero(result.x[:k, q])]
    pivot = support[0]
    for i in support[1:]:
        _left_multiply(result, [k + pivot], k + i)
    _left_multiply(result, support[1:], pivot)
    bit = 1 if result.phase[k + pivot] == 2 else 0
    stab_rows = [k + i for i in range(k) if i != pivot and result.z[k + i, q]]
    _left_multiply(result, stab_rows, k + pivot)
    destab_rows = [i for i in range(k) if i != pivot and result.z[i, q]]
    _left_multiply(result, destab_rows, k + pivot)
    if k == 1:
        return bit, None
    keep_rows = [i for i in range(2 * k) if i not in (pivot, k + pivot)]
    keep_cols = [j for j in range(k) if j != q]
    reduced = StabilizerState(
        result.x[np.ix_(keep_rows, keep_cols)], result.z[np.ix_(keep_rows, keep_cols)],
        result.phase[keep_rows])
    return bit, reduced


def z_distribution(st):
    """
    Exact distribution of measuring every qubit in Z.

    Returns:
        dict: Outcome string (qubit 0 first) to :class:`fractions.Fraction` probability.

    """
    distribution = {}

    def branch(state, q, prefix, weight):
        if q == state.k:
            distribution[prefix] = distribution.get(prefix, Fraction(0)) + weight
            return
        for outcome in (0, 1):
            probability, child = project_z(state, q, outcome)
            if probability:
                branch(child, q + 1, prefix + str(outcome), weight * probability)

    branch(st, 0, '', Fraction(1))
    return distribution
