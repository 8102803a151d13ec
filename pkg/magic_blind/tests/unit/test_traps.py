# coding=utf-8
"""Tests for trap construction, coverage and merging."""
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from magic_blind.app import dense
from magic_blind.app.clifford import GATE, CliffordStructure, assemble_G
from magic_blind.app.exceptions import CapacityError, ContractError, DimensionError, \
    InfeasibleError
from magic_blind.app.models import InjectionChoice
from magic_blind.app.pauli import PauliString, enumerate_paulis, multiply
from magic_blind.app.protocol import run_mbdqc
from magic_blind.app.rng import stream
from magic_blind.app.stabilizer import is_stabilized_by, prepare_product
from magic_blind.app.traps import COVERAGE, MERGE, Trap, TrapFamily, backpropagate, \
    broadbent_compile, compatible, covers_all_harmful, detects, explicit_family, \
    group_detects, incompatibility_graph, make_trap, merge_traps, parity, simulate_trap, \
    singleton_bipartite, singleton_family, singleton_groups, synthesize_input
from magic_blind.tests.unit.strategies import structures


def _texts(labels):
    return [str(label) for label in labels]


def _trap(stabilizer, Q=(1,)):
    """A trap built directly from a stabilizer, for compatibility checks."""
    stab = PauliString.parse(stabilizer)
    structure = CliffordStructure.identity(stab.k, 0)
    return Trap(tuple(Q), stab, synthesize_input(stab), structure)


class BackpropagateTestCase(unittest.TestCase):
    """Trap stabilizers."""

    def test_identity(self):
        """With no gates the stabilizer of output 1 is +Z."""
        self.assertEqual(backpropagate(CliffordStructure.identity(1, 0), [1]),
                         PauliString.parse('Z'))

    def test_gadget(self):
        """Output 1 of an injection traces back to the ancilla."""
        self.assertEqual(backpropagate(CliffordStructure.identity(1, 1), [1]),
                         PauliString.parse('IZ'))
        self.assertEqual(backpropagate(CliffordStructure.identity(1, 1), [2]),
                         PauliString.parse('ZZ'))

    @given(structures(max_n=3, max_t=2), st.data())
    @settings(max_examples=20, deadline=None)
    def test_dense_oracle(self, structure, data):
        """``G† Z_Q G`` matches the matrices, sign included."""
        k = structure.k
        Q = data.draw(st.sets(st.integers(1, k), min_size=1))
        stab = backpropagate(structure, Q)
        u = dense.circuit_unitary(structure.flattened())
        z_q = dense.pauli_matrix(PauliString.z_on(k, [q - 1 for q in Q]))
        np.testing.assert_allclose(dense.pauli_matrix(stab), u.conj().T @ z_q @ u, atol=1e-9)

    @given(structures(max_n=3, max_t=2), st.data())
    @settings(max_examples=20, deadline=None)
    def test_homomorphism(self, structure, data):
        """Disjoint unions multiply."""
        k = structure.k
        if k < 2:
            return
        wires = data.draw(st.permutations(list(range(1, k + 1))))
        cut = data.draw(st.integers(1, k - 1))
        first, second = wires[:cut], wires[cut:]
        self.assertEqual(backpropagate(structure, first + second),
                         multiply(backpropagate(structure, first),
                                  backpropagate(structure, second)))

    def test_bad_sets(self):
        """Q must be nonempty and within range."""
        structure = CliffordStructure.identity(1, 1)
        with self.assertRaises(ContractError):
            backpropagate(structure, [])
        with self.assertRaises(DimensionError):
            backpropagate(structure, [3])


class SynthesizeTestCase(unittest.TestCase):
    """Product inputs for trap stabilizers."""

    def test_identity_factor(self):
        """Identity factors default to +Z."""
        self.assertEqual(_texts(synthesize_input(PauliString.parse('ZI'))), ['+Z', '+Z'])

    def test_sign_absorbed(self):
        """A negative sign lands on the last non-identity factor."""
        self.assertEqual(_texts(synthesize_input(PauliString.parse('-X'))), ['-X'])
        stab = PauliString.parse('-ZXY')
        labels = synthesize_input(stab)
        self.assertEqual(_texts(labels), ['+Z', '+X', '-Y'])
        self.assertTrue(is_stabilized_by(prepare_product(list(labels)), stab))

    def test_random_free_wires(self):
        """Free wires may be randomized without losing the stabilizer."""
        stab = PauliString.parse('IXII')
        for seed in range(10):
            labels = synthesize_input(stab, stream(seed, 'free'))
            self.assertEqual(str(labels[1]), '+X')
            self.assertTrue(is_stabilized_by(prepare_product(list(labels)), stab))

    def test_unstabilizable(self):
        """±identity and imaginary strings stabilize nothing."""
        for text in ('II', '-II', 'iXZ'):
            with self.subTest(text=text), self.assertRaises(ContractError):
                synthesize_input(PauliString.parse(text))


class DetectionTestCase(unittest.TestCase):
    """Detection and simulation."""

    def setUp(self):
        """Build a two-output family on the identity structure."""
        self.structure = CliffordStructure.identity(2, 0)
        self.single = make_trap(self.structure, [1])
        self.pair = make_trap(self.structure, [1, 2])

    def test_detects(self):
        """Odd X/Y overlap with Q flips the parity."""
        self.assertTrue(detects(self.single, PauliString.parse('XI')))
        self.assertTrue(detects(self.single, PauliString.parse('YZ')))
        self.assertFalse(detects(self.single, PauliString.parse('ZI')))
        self.assertFalse(detects(self.pair, PauliString.parse('XX')))
        with self.assertRaises(DimensionError):
            detects(self.single, PauliString.parse('X'))

    def test_parity(self):
        """Parity is taken over 1-based positions."""
        self.assertEqual(parity((1, 0, 1), (1, 3)), 0)
        self.assertEqual(parity((1, 0, 1), (2, 3)), 1)

    def test_simulation(self):
        """An honest run never flips, X on the trap wire always does."""
        self.assertEqual(simulate_trap(self.single, rng=stream(0, 's'))[0], 0)
        self.assertEqual(simulate_trap(self.single, PauliString.parse('XI'), stream(0, 's'))[0], 1)

    @given(structures(max_n=2, max_t=2), st.integers(0, 2 ** 16))
    @settings(max_examples=5, deadline=None)
    def test_simulation_matches_detection(self, structure, seed):
        """
        Simulated parity flips exactly when the trap detects the deviation.

        Do the following:

        1. Build the singleton family of a random structure.
        2. Run every trap under every Pauli on the outputs.
        3. Compare the parity with :func:`detects`.
        """
        for trap in singleton_family(structure):
            for index, e in enumerate(enumerate_paulis(structure.k)):
                flipped, _outcomes = simulate_trap(trap, e, stream(seed, 'trap', index))
                self.assertEqual(bool(flipped), detects(trap, e))

    @given(structures(max_n=2, max_t=2), st.integers(0, 2 ** 16))
    @settings(max_examples=10, deadline=None)
    def test_protocol_run_passes(self, structure, seed):
        """Honest magic-free protocol runs of every singleton trap have even parity."""
        for trap in singleton_family(structure):
            injections = [InjectionChoice(label) for label in trap.injections]
            output = run_mbdqc(structure, list(trap.rho_labels), injections,
                               rng=stream(seed, 'run', trap.Q[0])).output
            self.assertEqual(parity(output, trap.Q), 0)


class FamilyTestCase(unittest.TestCase):
    """Singleton and explicit families."""

    def test_single_output(self):
        """n=1, t=0 gives one trap with input +Z."""
        family = singleton_family(CliffordStructure.identity(1, 0))
        self.assertEqual(len(family), 1)
        self.assertEqual(_texts(family[0].input_labels), ['+Z'])

    def test_injection(self):
        """The trap on output 1 of one injection injects +Z."""
        family = singleton_family(CliffordStructure.identity(1, 1))
        self.assertEqual(len(family), 2)
        self.assertEqual(family[0].Q, (1,))
        self.assertEqual(_texts(family[0].injections), ['+Z'])
        self.assertEqual(len(family[0].rho_labels), 1)

    @given(structures(max_n=2, max_t=1))
    @settings(max_examples=15, deadline=None)
    def test_singletons_valid(self, structure):
        """Every singleton trap is stabilized by its own input."""
        family = singleton_family(structure, stream(0, 'free'))
        self.assertEqual(len(family), structure.k)
        for trap in family:
            trap.validate()

    def test_width_mismatch(self):
        """Traps must share the family's width."""
        trap = make_trap(CliffordStructure.identity(2, 0), [1])
        with self.assertRaises(DimensionError):
            TrapFamily(CliffordStructure.identity(1, 0), [trap])

    def test_render(self):
        """A table row has Q, stabilizer and labels."""
        trap = make_trap(CliffordStructure.identity(2, 0), [1, 2])
        fields = trap.render().split('\t')
        self.assertEqual(fields[0], '1,2')
        self.assertEqual(fields[2], '+Z +Z')


class CoverageTestCase(unittest.TestCase):
    """Coverage of harmful deviations."""

    def test_singletons_cover(self):
        """A singleton family covers, in both modes."""
        family = singleton_family(CliffordStructure.identity(2, 1))
        self.assertTrue(covers_all_harmful(family))
        self.assertTrue(covers_all_harmful(family, COVERAGE.SINGLETON_PROOF))

    def test_pair_blind_spot(self):
        """Q = {1, 2} misses X⊗X."""
        family = explicit_family(CliffordStructure.identity(2, 0), [[1, 2]])
        report = covers_all_harmful(family)
        self.assertFalse(report.covered)
        self.assertEqual(report.witness, PauliString.parse('XX'))
        self.assertFalse(covers_all_harmful(family, COVERAGE.SINGLETON_PROOF))

    def test_explicit_singletons(self):
        """{{1}, {2}} covers in both modes."""
        family = explicit_family(CliffordStructure.identity(2, 0), [[1], [2]])
        self.assertTrue(covers_all_harmful(family))
        self.assertTrue(covers_all_harmful(family, COVERAGE.SINGLETON_PROOF))

    def test_errors(self):
        """The exhaustive mode has a cap; unknown modes are refused."""
        family = singleton_family(CliffordStructure.identity(3, 0))
        with self.assertRaises(CapacityError):
            covers_all_harmful(family, cap=2)
        with self.assertRaises(ContractError):
            covers_all_harmful(family, 'sampled')


class MergeTestCase(unittest.TestCase):
    """Compatibility and merging."""

    def test_compatible(self):
        """Factors must agree or be the identity on every wire."""
        self.assertTrue(compatible(_trap('XI'), _trap('IZ')))
        self.assertFalse(compatible(_trap('XX'), _trap('ZZ')))
        self.assertTrue(compatible(_trap('XX'), _trap('XI')))
        with self.assertRaises(DimensionError):
            compatible(_trap('X'), _trap('XI'))

    def test_one_group(self):
        """A pairwise compatible family merges into one group."""
        structure = CliffordStructure.identity(2, 0)
        family = TrapFamily(structure, [_trap('XI'), _trap('IZ'), _trap('XZ')])
        for strategy in (MERGE.GREEDY, MERGE.EXACT):
            plan = merge_traps(family, strategy)
            self.assertEqual(len(plan), 1)
            self.assertEqual(plan.groups[0].members, (0, 1, 2))
            self.assertEqual(_texts(plan.groups[0].input_labels), ['+X', '+Z'])

    def test_triangle(self):
        """Three mutually incompatible traps need three groups."""
        structure = CliffordStructure.identity(2, 0)
        family = TrapFamily(structure, [_trap('XI'), _trap('ZI'), _trap('YI')])
        self.assertEqual(incompatibility_graph(family).number_of_edges(), 3)
        self.assertEqual(len(merge_traps(family, MERGE.EXACT)), 3)
        self.assertEqual(len(merge_traps(family, MERGE.GREEDY)), 3)

    def test_infeasible_signs(self):
        """Dependent stabilizers with clashing signs have no joint input."""
        structure = CliffordStructure.identity(2, 0)
        family = TrapFamily(structure, [_trap('XI'), _trap('IZ'), _trap('-XZ')])
        with self.assertRaises(InfeasibleError):
            merge_traps(family)

    def test_caps(self):
        """Exact coloring has a cap and strategies must be known."""
        family = singleton_family(CliffordStructure.identity(3, 0))
        with self.assertRaises(CapacityError):
            merge_traps(family, MERGE.EXACT, cap=2)
        with self.assertRaises(ContractError):
            merge_traps(family, 'random')

    @given(structures(max_n=2, max_t=2))
    @settings(max_examples=15, deadline=None)
    def test_merged_groups(self, structure):
        """
        Merged singleton traps stay valid.

        Do the following:

        1. Merge the singleton family greedily and exactly.
        2. Assert the exact plan never uses more groups.
        3. Assert every group is a compatible partition whose joint input passes every
           member trap.
        """
        family = singleton_family(structure)
        greedy = merge_traps(family, MERGE.GREEDY)
        exact = merge_traps(family, MERGE.EXACT)
        self.assertGreaterEqual(len(greedy), len(exact))
        for plan in (greedy, exact):
            members = sorted(m for group in plan for m in group.members)
            self.assertEqual(members, list(range(len(family))))
            for group in plan:
                for first in group.traps:
                    for second in group.traps:
                        self.assertTrue(compatible(first, second))
                    flipped, _outcomes = simulate_trap(first, rng=stream(0, 'merged'),
                                                       input_labels=group.input_labels)
                    self.assertEqual(flipped, 0)

    def test_group_detection(self):
        """A group fails when any member flips."""
        plan = singleton_groups(singleton_family(CliffordStructure.identity(2, 0)))
        self.assertEqual(len(plan), 2)
        self.assertTrue(group_detects(plan.groups[1], PauliString.parse('IX')))
        self.assertFalse(group_detects(plan.groups[0], PauliString.parse('IX')))


class CompileTestCase(unittest.TestCase):
    """Compilation into Clifford structures."""

    def test_phase_gate(self):
        """S becomes two injections."""
        structure = broadbent_compile([('S', 0)], 1)
        self.assertEqual(structure.t, 2)
        self.assertTrue(all(len(layer) == 0 for layer in structure.layers))

    def test_t_gate(self):
        """One T, one injection."""
        self.assertEqual(broadbent_compile([('T', 0)], 1).t, 1)

    def test_hadamard(self):
        """H expands to six injections and four Hadamards."""
        structure = broadbent_compile([('H', 0)], 1)
        self.assertEqual(structure.t, 6)
        kinds = [gate.kind for layer in structure.layers for gate in layer]
        self.assertEqual(kinds.count(GATE.H), 4)

    def test_routing(self):
        """T on another wire is swapped onto the last wire and back."""
        structure = broadbent_compile([('T', 0), ('CNOT', 0, 1)], 2)
        self.assertEqual(structure.t, 1)
        self.assertEqual([g.kind for g in structure.layers[0]], [GATE.SWAP])
        self.assertEqual([g.kind for g in structure.layers[1]], [GATE.SWAP, GATE.CNOT])
        self.assertEqual(assemble_G(structure).k, 3)

    def test_unknown_gate(self):
        """Only H, S, CNOT and T compile."""
        with self.assertRaises(ContractError):
            broadbent_compile([('Y', 0)], 1)

    def test_bipartite(self):
        """The singleton graph of one identity injection has no edges."""
        self.assertTrue(singleton_bipartite(CliffordStructure.identity(1, 1)))
        self.assertIsInstance(singleton_bipartite(broadbent_compile([('H', 0)], 1)), bool)
