# coding=utf-8
"""Tests for Clifford tableaux and structures."""
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from magic_blind.app.clifford import GATE, CliffordCircuit, CliffordGate, CliffordStructure, \
    CliffordTableau, assemble_G, conjugate_pauli, injection_gadget, tableau_from_circuit, \
    update_keys
from magic_blind.app.dense import circuit_unitary, pauli_matrix
from magic_blind.app.exceptions import ContractError, DimensionError
from magic_blind.app.pauli import PauliString
from magic_blind.tests.unit.strategies import circuits, paulis, structures


class GateTestCase(unittest.TestCase):
    """Gate and circuit construction."""

    def test_arity(self):
        """Gates need the right number of distinct targets."""
        with self.assertRaises(ContractError):
            CliffordGate(GATE.CNOT, 1)
        with self.assertRaises(ContractError):
            CliffordGate(GATE.SWAP, 2, 2)
        with self.assertRaises(ContractError):
            CliffordGate('T', 0)

    def test_width(self):
        """A gate must fit its circuit."""
        with self.assertRaises(DimensionError):
            CliffordCircuit(2, [CliffordGate(GATE.H, 2)])

    def test_repr_is_one_based(self):
        """Gates print 1-based wires."""
        self.assertEqual(repr(CliffordGate(GATE.CNOT, 0, 2)), 'CNOT(1, 3)')


class TableauTestCase(unittest.TestCase):
    """Conjugation and its inverse."""

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_conjugation_matches_unitary(self, data):
        """C P C† from the tableau equals the matrix product, phase included."""
        circuit = data.draw(circuits())
        p = data.draw(paulis(k=circuit.k))
        u = circuit_unitary(circuit)
        image = conjugate_pauli(tableau_from_circuit(circuit), p)
        np.testing.assert_allclose(pauli_matrix(image), u @ pauli_matrix(p) @ u.conj().T,
                                   atol=1e-9)

    @given(circuits())
    @settings(max_examples=60, deadline=None)
    def test_symplectic(self, circuit):
        """Every circuit tableau is a valid Clifford tableau."""
        self.assertTrue(tableau_from_circuit(circuit).is_symplectic())

    @given(circuits())
    @settings(max_examples=60, deadline=None)
    def test_inverse(self, circuit):
        """The tableau inverse and the circuit inverse both undo the circuit."""
        tableau = tableau_from_circuit(circuit)
        identity = CliffordTableau.identity(circuit.k)
        self.assertEqual(tableau.then(tableau.inverse()), identity)
        self.assertEqual(tableau_from_circuit(circuit.then(circuit.inverse())), identity)

    def test_from_strings(self):
        """A Hadamard tableau is accepted, a non-symplectic one is not."""
        tableau = CliffordTableau.from_strings(['Z'], ['X'])
        self.assertEqual(tableau, tableau_from_circuit(CliffordCircuit(1, [CliffordGate('H', 0)])))
        self.assertEqual(tableau.render(), 'X1 -> +Z\nZ1 -> +X')
        with self.assertRaises(ContractError):
            CliffordTableau.from_strings(['X'], ['X'])

    def test_width_mismatch(self):
        """The tableau and the Pauli string must agree in width."""
        with self.assertRaises(DimensionError):
            conjugate_pauli(CliffordTableau.identity(2), PauliString.parse('X'))


class UpdateKeysTestCase(unittest.TestCase):
    """Pushing one-time pads through Cliffords."""

    def test_hadamard(self):
        """H X H = Z."""
        tableau = tableau_from_circuit(CliffordCircuit(1, [CliffordGate(GATE.H, 0)]))
        a, r, m = update_keys(tableau, [1], [0])
        self.assertEqual((list(a), list(r), m), ([0], [1], 0))

    def test_phase_gate(self):
        """S X S† = Y = i X Z, so the phase exponent is 1."""
        tableau = tableau_from_circuit(CliffordCircuit(1, [CliffordGate(GATE.S, 0)]))
        a, r, m = update_keys(tableau, [1], [0])
        self.assertEqual((list(a), list(r), m), ([1], [1], 1))

    def test_cnot(self):
        """An X key on the control spreads to the target."""
        tableau = tableau_from_circuit(CliffordCircuit(2, [CliffordGate(GATE.CNOT, 0, 1)]))
        a, r, _m = update_keys(tableau, [1, 0], [0, 1])
        self.assertEqual((list(a), list(r)), ([1, 1], [1, 1]))

    def test_length(self):
        """Keys must match the tableau width."""
        with self.assertRaises(DimensionError):
            update_keys(CliffordTableau.identity(2), [1], [0])


class StructureTestCase(unittest.TestCase):
    """Clifford structures and G."""

    def test_gadget(self):
        """F_i is CNOT then SWAP between the ancilla and wire n."""
        gadget = injection_gadget(2, 3)
        self.assertEqual(gadget.k, 5)
        self.assertEqual(list(gadget),
                         [CliffordGate(GATE.CNOT, 4, 2), CliffordGate(GATE.SWAP, 4, 2)])
        with self.assertRaises(ContractError):
            injection_gadget(0, 1)

    def test_layer_count(self):
        """t injections need t+1 layers on n wires."""
        with self.assertRaises(ContractError):
            CliffordStructure(1, 1, [CliffordCircuit(1)])
        with self.assertRaises(DimensionError):
            CliffordStructure(2, 0, [CliffordCircuit(1)])

    @given(structures())
    @settings(max_examples=40, deadline=None)
    def test_assemble_matches_flattened(self, structure):
        """Composing layer and gadget tableaux gives the tableau of the flattened circuit."""
        self.assertEqual(assemble_G(structure), tableau_from_circuit(structure.flattened()))
        self.assertEqual(structure.flattened().k, structure.n + structure.t)

    def test_render(self):
        """The public description lists every layer with 1-based wires."""
        structure = CliffordStructure(2, 1, [CliffordCircuit(2, [CliffordGate('H', 1)]),
                                             CliffordCircuit(2)])
        self.assertEqual(structure.render(), 'n=2 t=1\nC1: H(2)\nC2: I')
