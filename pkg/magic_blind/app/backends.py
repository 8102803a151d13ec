"""
Register handles for the two simulation backends.

The protocol engine only talks to these handles, so the same Client/Server code runs on
stabilizer tableaux and on dense statevectors. Handles are immutable; every operation
returns a new handle.
"""
from gettext import gettext as _
from hashlib import sha256
import logging

import numpy as np

from magic_blind.app import dense, stabilizer
from magic_blind.app.clifford import CliffordCircuit, CliffordGate, GATE
from magic_blind.app.exceptions import ContractError, DimensionError
from magic_blind.app.models import BACKEND


log = logging.getLogger(__name__)


class StabilizerRegister:
    """
    A register held as a :class:`~magic_blind.app.stabilizer.StabilizerState`.

    Fields:
        state (StabilizerState): The tableau.
    """

    backend = BACKEND.STABILIZER

    __slots__ = ('state',)

    def __init__(self, state):
        """Wrap a tableau."""
        self.state = state

    @classmethod
    def prepare(cls, labels):
        """Product state of stabilizer labels."""
        return cls(stabilizer.prepare_product(list(labels)))

    @property
    def k(self):
        """Visible wires."""
        return self.state.k

    def apply_circuit(self, circuit):
        """Apply a Clifford circuit on all wires."""
        return StabilizerRegister(stabilizer.apply_clifford(self.state, circuit))

    def apply_pauli(self, p):
        """Apply a Pauli string."""
        return StabilizerRegister(stabilizer.apply_pauli(self.state, p))

    def apply_rotation(self, q, angle, dagger=False):
        """
        Apply Z(angle) or its adjoint; Z(m·π/2) is exactly S^m.
        """
        turns = (-int(angle) if dagger else int(angle)) % 4
        gates = [CliffordGate(GATE.S, q)] * turns
        return self.apply_circuit(CliffordCircuit(self.k, gates))

    def apply_unitary(self, u, wires):
        """Arbitrary unitaries need the dense backend."""
        raise ContractError(_('Arbitrary unitaries require the dense backend'))

    def project(self, q, bit):
        """``(probability, register or None)`` for outcome ``bit`` on wire q."""
        probability, state = stabilizer.project_z(self.state, q, bit)
        return probability, (StabilizerRegister(state) if state is not None else None)

    def discard(self, q):
        """Remove a measured wire; returns ``(bit, register)``."""
        bit, state = stabilizer.discard(self.state, q)
        return bit, StabilizerRegister(state)

    def append(self, other):
        """``self ⊗ other``; the new wires follow the existing ones."""
        if other.backend != self.backend:
            raise ContractError(_('Cannot join registers of different backends'))
        return StabilizerRegister(_join_tableaux(self.state, other.state))

    def add_work(self, w_priv):
        """Private work wires need the dense backend."""
        raise ContractError(_('Private work wires require the dense backend'))

    def density_matrix(self):
        """The register as a dense matrix."""
        return dense.stabilizer_density_matrix(self.state)

    def to_dense(self):
        """An equivalent dense register."""
        rho = self.density_matrix().matrix
        values, vectors = np.linalg.eigh(rho)
        return DenseRegister(dense.StateVector(vectors[:, int(np.argmax(values))]))

    def fingerprint(self):
        """Canonical text of the stabilizer rows."""
        return ' '.join(str(p) for p in self.state.stabilizers())


def _join_tableaux(first, second):
    k1, k2 = first.k, second.k
    k = k1 + k2
    x = np.zeros((2 * k, k), dtype=np.uint8)
    z = np.zeros((2 * k, k), dtype=np.uint8)
    phase = np.zeros(2 * k, dtype=np.int64)
    for source, offset, width in ((first, 0, k1), (second, k1, k2)):
        for half in (0, 1):
            rows = slice(half * k + offset, half * k + offset + width)
            source_rows = slice(half * width, (half + 1) * width)
            x[rows, offset:offset + width] = source.x[source_rows]
            z[rows, offset:offset + width] = source.z[source_rows]
            phase[rows] = source.phase[source_rows]
    return stabilizer.StabilizerState(x, z, phase)


class DenseRegister:
    """
    A register held as a :class:`~magic_blind.app.dense.StateVector`.

    Private work wires of a deviating Server trail the visible wires and are never
    measured, discarded or handed back.

    Fields:
        state (StateVector): Amplitudes of the visible wires followed by the work wires.
        hidden (int): Number of trailing work wires.
    """

    backend = BACKEND.DENSE

    __slots__ = ('state', 'hidden')

    def __init__(self, state, hidden=0):
        """Wrap a statevector."""
        self.state = state
        self.hidden = int(hidden)

    @classmethod
    def prepare(cls, labels):
        """Product state of labels (stabilizer labels or ``'T'``)."""
        return cls(dense.prepare(list(labels)))

    @property
    def k(self):
        """Visible wires."""
        return self.state.k - self.hidden

    def _check(self, q):
        if not 0 <= q < self.k:
            raise DimensionError(
                _('Wire {q} is out of range for {k} wires').format(q=q + 1, k=self.k))

    def apply_circuit(self, circuit):
        """Apply a Clifford circuit on the visible wires."""
        if circuit.k != self.k:
            raise DimensionError(_('A {a}-qubit circuit cannot act on {b} wires').format(
                a=circuit.k, b=self.k))
        state = self.state
        for gate in circuit:
            state = dense.apply_gate(state, gate)
        return DenseRegister(state, self.hidden)

    def apply_pauli(self, p):
        """Apply a Pauli string on the visible wires."""
        if p.k != self.k:
            raise DimensionError(_('A {a}-qubit Pauli cannot act on {b} wires').format(
                a=p.k, b=self.k))
        if self.hidden:
            p = p.embed(self.state.k, list(range(self.k)))
        return DenseRegister(dense.apply_pauli(self.state, p), self.hidden)

    def apply_rotation(self, q, angle, dagger=False):
        """Apply Z(angle) or its adjoint on wire q."""
        self._check(q)
        return DenseRegister(dense.apply_gate(self.state, dense.ZRotation(q, angle, dagger)),
                             self.hidden)

    def apply_t(self, q):
        """Apply T on wire q."""
        self._check(q)
        return DenseRegister(dense.apply_gate(self.state, dense.TGate(q)), self.hidden)

    def apply_unitary(self, u, wires):
        """
        Apply a unitary to the listed wires; indices at or above k address work wires.
        """
        return DenseRegister(dense.apply_unitary(self.state, u, list(wires)), self.hidden)

    def project(self, q, bit):
        """``(probability, register or None)`` for outcome ``bit`` on wire q."""
        self._check(q)
        probability, state = dense.project(self.state, q, bit)
        return probability, (DenseRegister(state, self.hidden) if state is not None else None)

    def discard(self, q):
        """Remove a measured wire; returns ``(bit, register)``."""
        self._check(q)
        bit, state = dense.discard(self.state, q)
        return bit, DenseRegister(state, self.hidden)

    def append(self, other):
        """``self ⊗ other`` with the new wires placed before the work wires."""
        other = other if other.backend == self.backend else other.to_dense()
        if other.hidden:
            raise ContractError(_('Only registers without work wires can be appended'))
        joined = self.state.append(other.state)
        if self.hidden:
            k, h, extra = self.k, self.hidden, other.k
            order = list(range(k)) + list(range(k + h, k + h + extra)) + list(range(k, k + h))
            joined = joined.permute(order)
        return DenseRegister(joined, self.hidden)

    def add_work(self, w_priv):
        """Append ``w_priv`` fresh ``|0⟩`` work wires; returns the handle and their indices."""
        zeros = dense.prepare(['+Z'] * w_priv)
        start = self.state.k
        register = DenseRegister(self.state.append(zeros), self.hidden + w_priv)
        return register, list(range(start, start + w_priv))

    def density_matrix(self):
        """The visible wires as a density matrix, work wires traced out."""
        rho = self.state.density()
        if not self.hidden:
            return rho
        return dense.DensityMatrix(dense.partial_trace(rho, range(self.k)).matrix)

    def to_dense(self):
        """Already dense."""
        return self

    def fingerprint(self):
        """SHA-256 of the amplitudes rounded to 9 decimals."""
        values = np.round(self.state.amplitudes, 9) + 0.0
        return sha256(values.tobytes()).hexdigest()


def prepare_register(labels, backend):
    """A fresh register of labels on the requested backend."""
    if backend == BACKEND.DENSE:
        return DenseRegister.prepare(labels)
    if any(label == 'T' for label in labels):
        raise ContractError(_('The T state needs the dense backend'))
    return StabilizerRegister.prepare(labels)

