# coding=utf-8
"""Tests for Pauli strings."""
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from magic_blind.app.dense import pauli_matrix
from magic_blind.app.exceptions import CapacityError, ContractError, DimensionError
from magic_blind.app.pauli import PauliString, SinglePauliLabel, commutes, enumerate_paulis, \
    factor_at, from_pad, is_harmful, multiply, to_pad
from magic_blind.tests.unit.strategies import paulis


class ParseTestCase(unittest.TestCase):
    """Compact and long text forms."""

    def test_round_trip(self):
        """Parsing and printing a phased string gives the same text."""
        for text in ('+XIZY', '-iZX', '+iY', '-I'):
            with self.subTest(text=text):
                self.assertEqual(str(PauliString.parse(text)), text)

    def test_no_prefix(self):
        """A bare string has phase 0."""
        self.assertEqual(PauliString.parse('XZ').phase, 0)

    def test_invalid(self):
        """Unknown letters and empty bodies are rejected."""
        for text in ('XQ', '+', '', '*X'):
            with self.subTest(text=text):
                with self.assertRaises(ContractError):
                    PauliString.parse(text)

    def test_render(self):
        """The long form names 1-based wires and skips identities."""
        self.assertEqual(PauliString.parse('-iXIZ').render(), '-i · X1 Z3')
        self.assertEqual(PauliString.identity(2).render(), '+ · I')

    def test_label(self):
        """Stabilizer labels parse with and without a sign."""
        self.assertEqual(SinglePauliLabel.parse('Y'), SinglePauliLabel('Y', 1))
        self.assertEqual(str(SinglePauliLabel.parse('-X')), '-X')
        self.assertEqual(len(SinglePauliLabel.all()), 6)
        with self.assertRaises(ContractError):
            SinglePauliLabel.parse('+T')


class AlgebraTestCase(unittest.TestCase):
    """Products, commutation and pads."""

    def test_x_times_z(self):
        """XZ = -iY."""
        product = multiply(PauliString.parse('X'), PauliString.parse('Z'))
        self.assertEqual(str(product), '-iY')

    def test_mismatched_width(self):
        """Strings on different widths cannot be combined."""
        with self.assertRaises(DimensionError):
            multiply(PauliString.parse('X'), PauliString.parse('XX'))
        with self.assertRaises(DimensionError):
            commutes(PauliString.parse('X'), PauliString.parse('XX'))

    @given(st.data())
    @settings(max_examples=100, deadline=None)
    def test_product_matches_matrices(self, data):
        """The product of two strings has the matrix of the product."""
        p = data.draw(paulis())
        q = data.draw(paulis(k=p.k))
        np.testing.assert_allclose(pauli_matrix(p * q), pauli_matrix(p) @ pauli_matrix(q),
                                   atol=1e-12)

    @given(st.data())
    @settings(max_examples=100, deadline=None)
    def test_commutation_matches_matrices(self, data):
        """commutes() agrees with the matrix commutator."""
        p = data.draw(paulis())
        q = data.draw(paulis(k=p.k))
        a, b = pauli_matrix(p), pauli_matrix(q)
        self.assertEqual(commutes(p, q), np.allclose(a @ b, b @ a))

    def test_commutes(self):
        """X and Z anticommute, XX and ZZ commute."""
        self.assertFalse(commutes(PauliString.parse('X'), PauliString.parse('Z')))
        self.assertTrue(commutes(PauliString.parse('XX'), PauliString.parse('ZZ')))

    def test_harmful(self):
        """Only X and Y factors are harmful."""
        self.assertFalse(is_harmful(PauliString.parse('ZIZ')))
        self.assertFalse(is_harmful(PauliString.parse('-III')))
        self.assertTrue(is_harmful(PauliString.parse('IYI')))
        self.assertTrue(is_harmful(PauliString.parse('XZ')))

    def test_from_pad_is_hermitian(self):
        """X^1 Z^1 is -iY, a Hermitian operator."""
        pad = from_pad([1], [1])
        self.assertEqual(str(pad), '-iY')
        matrix = pauli_matrix(pad)
        np.testing.assert_allclose(matrix, matrix.conj().T, atol=1e-12)

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=6), st.data())
    @settings(deadline=None)
    def test_pad_round_trip(self, a, data):
        """to_pad recovers the pad bits with no extra phase."""
        r = data.draw(st.lists(st.integers(0, 1), min_size=len(a), max_size=len(a)))
        x, z, m = to_pad(from_pad(a, r))
        self.assertEqual(list(x), a)
        self.assertEqual(list(z), r)
        self.assertEqual(m, 0)

    def test_factor_at(self):
        """Factors ignore the global phase."""
        p = PauliString.parse('-iXYZ')
        self.assertEqual([factor_at(p, i) for i in range(3)], ['X', 'Y', 'Z'])
        with self.assertRaises(DimensionError):
            factor_at(p, 3)

    def test_embed_and_restrict(self):
        """Embedding on wires and restricting back are inverse."""
        p = PauliString.parse('-XZ')
        wide = p.embed(4, [3, 1])
        self.assertEqual(str(wide), '-IZIX')
        self.assertEqual(wide.restrict([3, 1]), p)


class EnumerationTestCase(unittest.TestCase):
    """enumerate_paulis."""

    def test_counts(self):
        """4^k strings, one fewer without the identity."""
        self.assertEqual(len(list(enumerate_paulis(2))), 16)
        self.assertEqual(len(list(enumerate_paulis(2, include_identity=False))), 15)
        self.assertEqual(len(set(enumerate_paulis(3))), 64)

    def test_cap(self):
        """Widths above the cap are refused."""
        with self.assertRaises(CapacityError):
            next(enumerate_paulis(3, cap=2))
