"""
Traps: magic-free runs whose output parity over a set of wires is fixed at 0.

A trap on the 1-based output set Q prepares a product input stabilized by
``G† Z_Q G``. An honest run then always has even parity over Q, and a Pauli deviation
flips it exactly when it anticommutes with ``Z_Q``. Compatible traps are merged into one
test round by coloring their incompatibility graph.
"""
from dataclasses import dataclass, field
from gettext import gettext as _
from types import SimpleNamespace
from typing import Any, List, Tuple
import logging

import networkx as nx
import numpy as np

from magic_blind.app import rng as rngs
from magic_blind.app.clifford import CliffordCircuit, CliffordGate, CliffordStructure, GATE, \
    assemble_G, conjugate_pauli
from magic_blind.app.exceptions import CapacityError, ContractError, DimensionError, \
    InfeasibleError
from magic_blind.app.pauli import ENUMERATION_CAP, PAULI, PauliString, SinglePauliLabel
from magic_blind.app.stabilizer import apply_clifford, apply_pauli, is_stabilized_by, \
    measure_z, prepare_product


log = logging.getLogger(__name__)


EXACT_COLORING_CAP = 14

MERGE = SimpleNamespace(
    GREEDY='greedy_largest_first',
    EXACT='exact_small',
)
MERGE_CHOICES = (MERGE.GREEDY, MERGE.EXACT)

COVERAGE = SimpleNamespace(
    EXHAUSTIVE='exhaustive',
    SINGLETON_PROOF='singleton_proof',
)

COMPILABLE_GATES = (GATE.H, GATE.S, GATE.CNOT, 'T')


@dataclass(frozen=True)
class Trap:
    """
    One trap.

    Fields:
        Q (tuple): Sorted 1-based output wires whose parity is checked.
        stabilizer (PauliString): ``G† Z_Q G`` on n+t wires, sign included.
        input_labels (tuple): n+t labels; the first n prepare ρ, the last t are injected.
        structure (CliffordStructure): The structure the trap was built for.
    """

    Q: Tuple[int, ...]
    stabilizer: PauliString
    input_labels: Tuple[SinglePauliLabel, ...]
    structure: Any = field(compare=False, repr=False)

    @property
    def k(self):
        """Output wires, n + t."""
        return self.stabilizer.k

    @property
    def rho_labels(self):
        """Labels of the n input wires."""
        return self.input_labels[:self.structure.n]

    @property
    def injections(self):
        """Labels of the t injected states."""
        return self.input_labels[self.structure.n:]

    def validate(self):
        """
        Check that the input is stabilized by the trap stabilizer.

        Raises:
            ContractError: If it is not.

        """
        if not is_stabilized_by(prepare_product(list(self.input_labels)), self.stabilizer):
            raise ContractError(_('Trap input does not satisfy {s}').format(s=self.stabilizer))

    def render(self):
        """One table row: Q, stabilizer, labels."""
        return '{q}\t{s}\t{l}'.format(q=','.join(str(q) for q in self.Q), s=self.stabilizer,
                                      l=' '.join(str(label) for label in self.input_labels))


@dataclass
class TrapFamily:
    """
    The traps test rounds are drawn from.

    Fields:
        structure (CliffordStructure): Shared structure.
        traps (list): The traps.
    """

    structure: CliffordStructure
    traps: List[Trap]

    def __post_init__(self):
        for trap in self.traps:
            if trap.k != self.structure.k:
                raise DimensionError(_('Trap on {a} wires in a family of width {b}').format(
                    a=trap.k, b=self.structure.k))

    @property
    def k(self):
        """n + t."""
        return self.structure.k

    def __len__(self):
        return len(self.traps)

    def __iter__(self):
        return iter(self.traps)

    def __getitem__(self, index):
        return self.traps[index]


@dataclass
class TrapGroup:
    """
    Pairwise compatible traps checked in one test round.

    Fields:
        members (tuple): Indices into the family.
        traps (tuple): The member traps.
        input_labels (tuple): Joint input satisfying every member stabilizer.
    """

    members: Tuple[int, ...]
    traps: Tuple[Trap, ...]
    input_labels: Tuple[SinglePauliLabel, ...]

    @property
    def structure(self):
        """Shared structure."""
        return self.traps[0].structure

    @property
    def rho_labels(self):
        """Labels of the n input wires."""
        return self.input_labels[:self.structure.n]

    @property
    def injections(self):
        """Labels of the t injected states."""
        return self.input_labels[self.structure.n:]


@dataclass
class MergePlan:
    """
    A partition of a family into test-round groups.

    Fields:
        strategy (str): How the coloring was found.
        groups (list): :class:`TrapGroup` per color.
    """

    strategy: str
    groups: List[TrapGroup]

    def __len__(self):
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)


@dataclass
class CoverageReport:
    """
    Whether a family detects every harmful deviation.

    Fields:
        covered (bool): The verdict.
        witness (PauliString): An undetected harmful deviation, if one was found.
        mode (str): How the verdict was reached.
    """

    covered: bool
    witness: Any = None
    mode: str = COVERAGE.EXHAUSTIVE

    def __bool__(self):
        return self.covered


def _check_Q(Q, k):
    Q = tuple(sorted(set(int(q) for q in Q)))
    if not Q:
        raise ContractError(_('A trap needs a nonempty set of output wires'))
    if Q[0] < 1 or Q[-1] > k:
        raise DimensionError(_('Trap wires {q} are out of range for {k} outputs').format(
            q=list(Q), k=k))
    return Q


def backpropagate(structure, Q):
    """
    ``G† Z_Q G`` for the 1-based output wires Q.

    Raises:
        ContractError: If Q is empty.
        DimensionError: If an index exceeds n+t.

    """
    Q = _check_Q(Q, structure.k)
    z_q = PauliString.z_on(structure.k, [q - 1 for q in Q])
    return conjugate_pauli(assemble_G(structure).inverse(), z_q)


def synthesize_input(stab, rng=None):
    """
    A product of single-qubit stabilizer states stabilized by ``stab``.

    Each non-identity factor gets its +1 eigenstate; the sign of ``stab`` goes on the
    last non-identity factor. Identity factors get ``+Z``, or a random label when ``rng``
    is given.

    Raises:
        ContractError: For ±identity or a non-Hermitian string.

    """
    if stab.is_identity() or stab.sign is None:
        raise ContractError(_('{s} cannot stabilize a state').format(s=stab))
    free = SinglePauliLabel.all()
    labels = []
    for factor in stab.factors():
        if factor != PAULI.I:
            labels.append(SinglePauliLabel(factor, 1))
        elif rng is not None:
            labels.append(free[int(rng.integers(len(free)))])
        else:
            labels.append(SinglePauliLabel(PAULI.Z, 1))
    last = stab.support()[-1]
    labels[last] = SinglePauliLabel(labels[last].axis, stab.sign)
    return tuple(labels)


def make_trap(structure, Q, rng=None):
    """Build and validate the trap for Q."""
    Q = _check_Q(Q, structure.k)
    stab = backpropagate(structure, Q)
    trap = Trap(Q, stab, synthesize_input(stab, rng), structure)
    trap.validate()
    return trap


def detects(trap, e):
    """
    True iff ``Z_Q`` and ``e`` anticommute, i.e. e has an odd number of X/Y factors on Q.
    """
    if e.k != trap.k:
        raise DimensionError(_('Deviation on {a} wires, trap on {b}').format(a=e.k, b=trap.k))
    return bool(sum(int(e.x[q - 1]) for q in trap.Q) % 2)


def group_detects(group, e):
    """A merged group fails iff any member's parity flips."""
    return any(detects(trap, e) for trap in group.traps)


def parity(outcomes, Q):
    """XOR of the 1-based outcome positions in Q."""
    return sum(int(outcomes[q - 1]) for q in Q) % 2


def simulate_trap(trap, deviation=None, rng=None, input_labels=None):
    """
    Run a trap on the stabilizer backend, with an optional Pauli before the measurements.

    Args:
        trap (Trap): The trap.
        deviation (PauliString): Applied to the n+t outputs of G.
        rng (numpy.random.Generator): Outcomes of wires outside Q may be random.
        input_labels (sequence): Overrides the trap's input, e.g. with a merged one.

    Returns:
        tuple: ``(parity over Q, outcomes)``.

    """
    rng = rngs.ensure(rng, label='trap')
    labels = list(input_labels if input_labels is not None else trap.input_labels)
    state = apply_clifford(prepare_product(labels), trap.structure.flattened())
    if deviation is not None:
        state = apply_pauli(state, deviation)
    outcomes = []
    for q in range(state.k):
        bit, _deterministic, state = measure_z(state, q, rng)
        outcomes.append(bit)
    return parity(outcomes, trap.Q), tuple(outcomes)


def singleton_family(structure, rng=None):
    """One single-wire trap per output wire 1..n+t."""
    return TrapFamily(structure, [make_trap(structure, [q], rng)
                                  for q in range(1, structure.k + 1)])


def explicit_family(structure, sets, rng=None):
    """Traps for the given 1-based wire sets."""
    return TrapFamily(structure, [make_trap(structure, Q, rng) for Q in sets])


def covers_all_harmful(family, mode=COVERAGE.EXHAUSTIVE, cap=ENUMERATION_CAP):
    """
    Check that every harmful deviation is detected by some trap in the family.

    Detection only depends on the X part of a deviation, so the exhaustive mode walks the
    2^k − 1 nonzero X masks.

    Raises:
        CapacityError: If exhaustive mode is asked for more than ``cap`` wires.

    """
    k = family.k
    if mode == COVERAGE.SINGLETON_PROOF:
        present = {trap.Q for trap in family}
        missing = [q for q in range(1, k + 1) if (q,) not in present]
        if not missing:
            return CoverageReport(True, None, mode)
        log.debug(_('Family lacks singletons {m}; no structural proof').format(m=missing))
        return CoverageReport(False, None, mode)
    if mode != COVERAGE.EXHAUSTIVE:
        raise ContractError(_('Unknown coverage mode "{m}"').format(m=mode))
    if k > cap:
        raise CapacityError(_('Exhaustive coverage on {k} wires exceeds the cap of {c}').format(
            k=k, c=cap))
    for mask in range(1, 2 ** k):
        x = [(mask >> (k - 1 - j)) & 1 for j in range(k)]
        e = PauliString(x, [0] * k)
        if not any(detects(trap, e) for trap in family):
            return CoverageReport(False, e, mode)
    return CoverageReport(True, None, mode)


def compatible(t1, t2):
    """
    True iff at every wire the two stabilizer factors are equal or one is identity.
    """
    if t1.k != t2.k:
        raise DimensionError(_('Traps on {a} and {b} wires').format(a=t1.k, b=t2.k))
    for f1, f2 in zip(t1.stabilizer.factors(), t2.stabilizer.factors()):
        if f1 != f2 and PAULI.I not in (f1, f2):
            return False
    return True


def incompatibility_graph(family):
    """Vertices are trap indices, edges join incompatible pairs."""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(family)))
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            if not compatible(family[i], family[j]):
                graph.add_edge(i, j)
    return graph


def _exact_coloring(graph):
    order = sorted(graph.nodes, key=lambda v: (-graph.degree(v), v))
    best = {'colors': len(order) + 1, 'coloring': None}
    coloring = {}

    def search(position, used):
        if used >= best['colors']:
            return
        if position == len(order):
            best['colors'], best['coloring'] = used, dict(coloring)
            return
        vertex = order[position]
        taken = {coloring[u] for u in graph.neighbors(vertex) if u in coloring}
        for color in range(used + 1):
            if color in taken:
                continue
            coloring[vertex] = color
            search(position + 1, max(used, color + 1))
            del coloring[vertex]

    search(0, 0)
    return best['coloring'] or {}


def _solve_gf2(rows, rhs, width):
    """Solve ``rows · s = rhs`` over GF(2); None when inconsistent. Free variables are 0."""
    matrix = np.array(rows, dtype=np.uint8).reshape(len(rows), width)
    vector = np.array(rhs, dtype=np.uint8)
    pivots = []
    row = 0
    for col in range(width):
        if row == len(matrix):
            break
        hits = np.flatnonzero(matrix[row:, col]) + row
        if not hits.size:
            continue
        pivot = hits[0]
        matrix[[row, pivot]] = matrix[[pivot, row]]
        vector[[row, pivot]] = vector[[pivot, row]]
        for other in range(len(matrix)):
            if other != row and matrix[other, col]:
                matrix[other] ^= matrix[row]
                vector[other] ^= vector[row]
        pivots.append(col)
        row += 1
    if vector[row:].any():
        return None
    solution = np.zeros(width, dtype=np.uint8)
    for position, col in enumerate(pivots):
        solution[col] = vector[position]
    return solution


def merged_input(traps):
    """
    The joint product input of pairwise compatible traps.

    Every wire takes the axis the members agree on; the signs solve one parity equation
    per member over GF(2).

    Raises:
        InfeasibleError: When the sign system has no solution.

    """
    k = traps[0].k
    axes = [PAULI.Z] * k
    for trap in traps:
        for wire, factor in enumerate(trap.stabilizer.factors()):
            if factor != PAULI.I:
                axes[wire] = factor
    rows = [[int(wire in trap.stabilizer.support()) for wire in range(k)] for trap in traps]
    rhs = [0 if trap.stabilizer.sign > 0 else 1 for trap in traps]
    solution = _solve_gf2(rows, rhs, k)
    if solution is None:
        raise InfeasibleError(_('No joint input satisfies traps {q}').format(
            q=[list(trap.Q) for trap in traps]))
    return tuple(SinglePauliLabel(axis, -1 if bit else 1) for axis, bit in zip(axes, solution))


def merge_traps(family, strategy=MERGE.GREEDY, cap=EXACT_COLORING_CAP):
    """
    Partition a family into groups of pairwise compatible traps.

    Args:
        family (TrapFamily): The traps.
        strategy (str): Largest-degree-first greedy coloring, or exact branch and bound.
        cap (int): Largest family the exact strategy accepts.

    Returns:
        MergePlan: Groups ordered by color, members by trap index.

    Raises:
        CapacityError: If the exact strategy is asked for more than ``cap`` traps.
        InfeasibleError: If a group has no joint input.

    """
    graph = incompatibility_graph(family)
    if strategy == MERGE.GREEDY:
        coloring = nx.greedy_color(graph, strategy='largest_first')
    elif strategy == MERGE.EXACT:
        if len(family) > cap:
            raise CapacityError(_('Exact coloring of {m} traps exceeds the cap of {c}').format(
                m=len(family), c=cap))
        coloring = _exact_coloring(graph)
    else:
        raise ContractError(_('Unknown merge strategy "{s}"').format(s=strategy))
    groups = []
    for color in sorted(set(coloring.values())):
        members = tuple(sorted(v for v, c in coloring.items() if c == color))
        traps = tuple(family[v] for v in members)
        groups.append(TrapGroup(members, traps, merged_input(traps)))
    log.debug(_('Merged {m} traps into {g} groups ({s})').format(
        m=len(family), g=len(groups), s=strategy))
    return MergePlan(strategy, groups)


def singleton_groups(family):
    """Each trap in its own group."""
    return MergePlan('singleton', [TrapGroup((i,), (trap,), trap.input_labels)
                                   for i, trap in enumerate(family)])


def _expand(gate):
    kind, targets = gate[0], tuple(gate[1:])
    if kind not in COMPILABLE_GATES:
        raise ContractError(_('Cannot compile gate "{k}"').format(k=kind))
    if kind == GATE.S:
        return [('T',) + targets] * 2
    if kind == GATE.H:
        h, tt = (GATE.H,) + targets, [('T',) + targets] * 2
        return [h] + tt + [h] + tt + [h] + tt + [h]
    return [(kind,) + targets]


def broadbent_compile(gates, n):
    """
    Compile a circuit over H, S, CNOT and T into a Clifford structure.

    S becomes TT and H becomes H TT H TT H TT H. Every T is moved onto wire n by
    SWAPs around it, and each one ends a layer.

    Args:
        gates (iterable): ``(kind, *targets)`` tuples with 0-based targets.
        n (int): Width.

    Returns:
        CliffordStructure: t is the number of T gates after expansion.

    """
    last = n - 1
    layers = []
    current = []
    for gate in gates:
        for kind, *targets in _expand(tuple(gate)):
            if kind != 'T':
                current.append(CliffordGate(kind, *targets))
                continue
            q = targets[0]
            if q != last:
                current.append(CliffordGate(GATE.SWAP, q, last))
            layers.append(CliffordCircuit(n, current))
            current = [CliffordGate(GATE.SWAP, q, last)] if q != last else []
    layers.append(CliffordCircuit(n, current))
    return CliffordStructure(n, len(layers) - 1, layers)


def singleton_bipartite(structure):
    """Whether the singleton family's incompatibility graph is bipartite."""
    return nx.is_bipartite(incompatibility_graph(singleton_family(structure)))
