"""
Clifford circuits, tableaux and the public Clifford structure of a computation.

Qubits are 0-based here; rendered output and error messages use 1-based wire labels.
"""
from gettext import gettext as _
from types import SimpleNamespace
import logging

import numpy as np

from magic_blind.app.exceptions import ContractError, DimensionError
from magic_blind.app.pauli import PauliString, commutes, from_pad, multiply, to_pad


log = logging.getLogger(__name__)


GATE = SimpleNamespace(
    H='H',
    S='S',
    CNOT='CNOT',
    SWAP='SWAP',
    X='X',
    Y='Y',
    Z='Z',
)

TWO_QUBIT_GATES = (GATE.CNOT, GATE.SWAP)
GATE_KINDS = (GATE.H, GATE.S, GATE.CNOT, GATE.SWAP, GATE.X, GATE.Y, GATE.Z)


class CliffordGate:
    """
    One gate of the restricted Clifford gate set.

    Fields:
        kind (str): One of :data:`GATE_KINDS`.
        targets (tuple): One index, or (control, target) for CNOT, or two indices for SWAP.
    """

    __slots__ = ('kind', 'targets')

    def __init__(self, kind, *targets):
        """
        Validate arity and distinctness of the targets.
        """
        if kind not in GATE_KINDS:
            raise ContractError(_('Unknown Clifford gate "{k}"').format(k=kind))
        targets = tuple(int(q) for q in targets)
        arity = 2 if kind in TWO_QUBIT_GATES else 1
        if len(targets) != arity or len(set(targets)) != arity or min(targets) < 0:
            raise ContractError(
                _('Gate {k} needs {a} distinct non-negative targets, got {t}').format(
                    k=kind, a=arity, t=list(targets)))
        self.kind = kind
        self.targets = targets

    def remapped(self, wires):
        """The same gate with target ``q`` moved to ``wires[q]``."""
        return CliffordGate(self.kind, *[wires[q] for q in self.targets])

    def __eq__(self, other):
        if not isinstance(other, CliffordGate):
            return NotImplemented
        return (self.kind, self.targets) == (other.kind, other.targets)

    def __hash__(self):
        return hash((self.kind, self.targets))

    def __repr__(self):
        return '{k}({t})'.format(k=self.kind, t=', '.join(str(q + 1) for q in self.targets))


class CliffordCircuit:
    """
    An ordered gate list on k qubits; the first gate is applied first.

    Fields:
        k (int): Qubit count.
        gates (tuple): The :class:`CliffordGate` sequence.
    """

    __slots__ = ('k', 'gates')

    def __init__(self, k, gates=()):
        """
        Check every gate index against k.
        """
        gates = tuple(gates)
        for gate in gates:
            if max(gate.targets) >= k:
                raise DimensionError(
                    _('Gate {g} does not fit on {k} qubits').format(g=gate, k=k))
        self.k = int(k)
        self.gates = gates

    def extended(self, k):
        """The same gates on a wider register (identity on the new wires)."""
        if k < self.k:
            raise DimensionError(_('Cannot shrink a circuit from {a} to {b} qubits').format(
                a=self.k, b=k))
        return CliffordCircuit(k, self.gates)

    def on_wires(self, wires, k):
        """Relabel qubit ``q`` to ``wires[q]`` inside a k-qubit register."""
        if len(wires) != self.k:
            raise DimensionError(_('Need {n} wires, got {w}').format(n=self.k, w=len(wires)))
        return CliffordCircuit(k, [gate.remapped(wires) for gate in self.gates])

    def then(self, other):
        """Concatenation: self first, then other."""
        if other.k != self.k:
            raise DimensionError(_('Cannot concatenate circuits on {a} and {b} qubits').format(
                a=self.k, b=other.k))
        return CliffordCircuit(self.k, self.gates + other.gates)

    def inverse(self):
        """The inverse circuit; S is inverted as three S gates."""
        gates = []
        for gate in reversed(self.gates):
            gates.extend([gate] * (3 if gate.kind == GATE.S else 1))
        return CliffordCircuit(self.k, gates)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __eq__(self, other):
        if not isinstance(other, CliffordCircuit):
            return NotImplemented
        return self.k == other.k and self.gates == other.gates

    def __repr__(self):
        return 'CliffordCircuit(k={k}, [{g}])'.format(
            k=self.k, g=', '.join(repr(gate) for gate in self.gates))


def conjugate_rows(x, z, phase, gate):
    """
    Conjugate every row of a Pauli table by one gate, in place.

    Rows are Pauli strings laid out as ``x[row, qubit]``, ``z[row, qubit]`` and
    ``phase[row]``; the update rules are the CHP ones with the sign kept as a phase.

    Args:
        x (numpy.ndarray): uint8 array of shape (rows, k).
        z (numpy.ndarray): uint8 array of shape (rows, k).
        phase (numpy.ndarray): int64 array of shape (rows,).
        gate (CliffordGate): The gate to conjugate by.

    """
    kind = gate.kind
    if kind in TWO_QUBIT_GATES:
        a, b = gate.targets
        if kind == GATE.CNOT:
            phase += 2 * (x[:, a] & z[:, b] & (x[:, b] ^ z[:, a] ^ 1))
            x[:, b] ^= x[:, a]
            z[:, a] ^= z[:, b]
        else:
            x[:, [a, b]] = x[:, [b, a]]
            z[:, [a, b]] = z[:, [b, a]]
    else:
        q = gate.targets[0]
        if kind == GATE.H:
            phase += 2 * (x[:, q] & z[:, q])
            x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()
        elif kind == GATE.S:
            phase += 2 * (x[:, q] & z[:, q])
            z[:, q] ^= x[:, q]
        elif kind == GATE.X:
            phase += 2 * z[:, q]
        elif kind == GATE.Z:
            phase += 2 * x[:, q]
        else:
            phase += 2 * (x[:, q] ^ z[:, q])
    phase %= 4


class CliffordTableau:
    """
    The conjugation action of a Clifford unitary C.

    Fields:
        x_images (tuple): ``C X_j C†`` for each qubit j, signs included.
        z_images (tuple): ``C Z_j C†`` for each qubit j, signs included.
    """

    __slots__ = ('x_images', 'z_images')

    def __init__(self, x_images, z_images):
        """
        Check that all images act on the same number of qubits.
        """
        x_images = tuple(x_images)
        z_images = tuple(z_images)
        k = len(x_images)
        if len(z_images) != k or any(p.k != k for p in x_images + z_images):
            raise DimensionError(_('A tableau on {k} qubits needs {k} X and {k} Z images of '
                                   'width {k}').format(k=k))
        self.x_images = x_images
        self.z_images = z_images

    @property
    def k(self):
        """Number of qubits."""
        return len(self.x_images)

    @classmethod
    def identity(cls, k):
        """The identity tableau."""
        return cls([PauliString.single(k, j, 'X') for j in range(k)],
                   [PauliString.single(k, j, 'Z') for j in range(k)])

    @classmethod
    def from_strings(cls, x_images, z_images):
        """
        Ingest a tableau written as compact Pauli strings.

        Raises:
            ContractError: If the images violate the symplectic conditions.

        """
        tableau = cls([PauliString.parse(s) for s in x_images],
                      [PauliString.parse(s) for s in z_images])
        if not tableau.is_symplectic():
            raise ContractError(_('The supplied images are not a Clifford tableau'))
        return tableau

    def matrix(self):
        """
        The 2k x 2k binary matrix; row j is the image of X_j, row k+j that of Z_j.
        """
        rows = [np.concatenate([p.x, p.z]) for p in self.x_images + self.z_images]
        return np.array(rows, dtype=np.uint8)

    def is_symplectic(self):
        """
        True iff each X_j image anticommutes with the Z_j image only, and images are Hermitian.
        """
        images = self.x_images + self.z_images
        k = self.k
        for i, p in enumerate(images):
            if p.sign is None:
                return False
            for j in range(i + 1, len(images)):
                paired = (j - i == k) and i < k
                if commutes(p, images[j]) == paired:
                    return False
        return True

    def conjugate(self, p):
        """See :func:`conjugate_pauli`."""
        return conjugate_pauli(self, p)

    def then(self, other):
        """The tableau of ``other ∘ self`` (self applied first)."""
        return CliffordTableau([other.conjugate(p) for p in self.x_images],
                               [other.conjugate(p) for p in self.z_images])

    def extended(self, k):
        """Embed on k qubits with identity on the added ones."""
        if k < self.k:
            raise DimensionError(_('Cannot shrink a tableau from {a} to {b} qubits').format(
                a=self.k, b=k))
        extra = PauliString.identity(k - self.k) if k > self.k else None
        wide = [p.tensor(extra) if extra else p for p in self.x_images]
        wide_z = [p.tensor(extra) if extra else p for p in self.z_images]
        return CliffordTableau(
            wide + [PauliString.single(k, j, 'X') for j in range(self.k, k)],
            wide_z + [PauliString.single(k, j, 'Z') for j in range(self.k, k)])

    def inverse(self):
        """
        The tableau of ``C†``.

        The bit part is the symplectic inverse ``Ω Mᵀ Ω``; each sign is then fixed by
        checking that conjugating the candidate image by C gives back +X_j or +Z_j.
        """
        k = self.k
        omega = np.block([[np.zeros((k, k), dtype=np.int64), np.eye(k, dtype=np.int64)],
                          [np.eye(k, dtype=np.int64), np.zeros((k, k), dtype=np.int64)]])
        inverse = (omega @ self.matrix().astype(np.int64).T @ omega) % 2
        images = []
        for row, generator in enumerate(
                [PauliString.single(k, j, 'X') for j in range(k)]
                + [PauliString.single(k, j, 'Z') for j in range(k)]):
            x, z = inverse[row, :k], inverse[row, k:]
            candidate = PauliString(x, z)
            if self.conjugate(candidate) != generator:
                candidate = -candidate
            images.append(candidate)
        return CliffordTableau(images[:k], images[k:])

    def render(self):
        """Text dump, one generator per line, e.g. ``X1 -> +ZI``."""
        lines = ['X{j} -> {p}'.format(j=j + 1, p=p) for j, p in enumerate(self.x_images)]
        lines += ['Z{j} -> {p}'.format(j=j + 1, p=p) for j, p in enumerate(self.z_images)]
        return '\n'.join(lines)

    def __eq__(self, other):
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return self.x_images == other.x_images and self.z_images == other.z_images

    def __repr__(self):
        return 'CliffordTableau(k={k})'.format(k=self.k)


def tableau_from_circuit(c):
    """
    The conjugation action of a circuit, first gate applied first.
    """
    k = c.k
    x = np.vstack([np.eye(k, dtype=np.uint8), np.zeros((k, k), dtype=np.uint8)])
    z = np.vstack([np.zeros((k, k), dtype=np.uint8), np.eye(k, dtype=np.uint8)])
    phase = np.zeros(2 * k, dtype=np.int64)
    for gate in c:
        conjugate_rows(x, z, phase, gate)
    images = [PauliString(x[row], z[row], phase[row]) for row in range(2 * k)]
    return CliffordTableau(images[:k], images[k:])


def conjugate_pauli(tab, p):
    """
    ``C P C†`` with exact phase.

    P is rewritten as ``i**m · Π_j X_j^{x_j} Z_j^{z_j}`` and each generator replaced by
    its image.

    Raises:
        DimensionError: If the tableau and the Pauli string differ in width.

    """
    if tab.k != p.k:
        raise DimensionError(_('Tableau on {a} qubits cannot conjugate a {b}-qubit Pauli').format(
            a=tab.k, b=p.k))
    result = PauliString.identity(p.k).with_phase(to_pad(p)[2])
    for j in range(p.k):
        if p.x[j]:
            result = multiply(result, tab.x_images[j])
        if p.z[j]:
            result = multiply(result, tab.z_images[j])
    return result


def update_keys(tab, a, r):
    """
    Push a one-time pad through a Clifford: ``C X^a Z^r C† = i**m X^{a'} Z^{r'}``.

    Args:
        tab (CliffordTableau): The Clifford C.
        a (sequence): X-key bits.
        r (sequence): Z-key bits.

    Returns:
        tuple: ``(a', r', m)``; the phase exponent m is informational only, decryption
            ignores it.

    """
    if len(a) != tab.k or len(r) != tab.k:
        raise DimensionError(_('Keys of length {a}/{r} do not match a {k}-qubit tableau').format(
            a=len(a), r=len(r), k=tab.k))
    return to_pad(conjugate_pauli(tab, from_pad(a, r)))


def injection_gadget(i, n):
    """
    The injection gadget F_i on n+i qubits.

    CNOT with the ancilla wire n+i-1 as control and wire n-1 as target, then SWAP of the
    same two wires, so the data ends up on the ancilla wire and is measured there.
    """
    if i < 1 or n < 1:
        raise ContractError(_('Injection index and width must be positive, got i={i} n={n}').format(
            i=i, n=n))
    ancilla = n + i - 1
    return CliffordCircuit(n + i, [CliffordGate(GATE.CNOT, ancilla, n - 1),
                                   CliffordGate(GATE.SWAP, ancilla, n - 1)])


class CliffordStructure:
    """
    The public Clifford structure C_1 .. C_{t+1} of a computation with t injections.

    Fields:
        n (int): Input width.
        t (int): Injection count.
        layers (tuple): t+1 :class:`CliffordCircuit` objects on n qubits each.
    """

    __slots__ = ('n', 't', 'layers')

    def __init__(self, n, t, layers):
        """
        Check the layer count and widths.
        """
        layers = tuple(layers)
        if n < 1 or t < 0:
            raise ContractError(_('Need n >= 1 and t >= 0, got n={n} t={t}').format(n=n, t=t))
        if len(layers) != t + 1:
            raise ContractError(_('A structure with t={t} needs {c} layers, got {l}').format(
                t=t, c=t + 1, l=len(layers)))
        for index, layer in enumerate(layers):
            if layer.k != n:
                raise DimensionError(_('Layer {i} acts on {k} qubits instead of {n}').format(
                    i=index + 1, k=layer.k, n=n))
        self.n = int(n)
        self.t = int(t)
        self.layers = layers

    @property
    def k(self):
        """Width of G, n + t."""
        return self.n + self.t

    @classmethod
    def identity(cls, n, t):
        """All layers empty."""
        return cls(n, t, [CliffordCircuit(n) for _i in range(t + 1)])

    def flattened(self):
        """
        G as one gate list on n+t qubits: C_1, F_1, C_2, ..., F_t, C_{t+1}.
        """
        k = self.k
        gates = []
        for i, layer in enumerate(self.layers):
            gates.extend(layer.gates)
            if i < self.t:
                gates.extend(injection_gadget(i + 1, self.n).gates)
        return CliffordCircuit(k, gates)

    def render(self):
        """Public description: one line per layer, 1-based wires."""
        lines = ['n={n} t={t}'.format(n=self.n, t=self.t)]
        for i, layer in enumerate(self.layers):
            lines.append('C{i}: {g}'.format(i=i + 1, g=' '.join(repr(g) for g in layer) or 'I'))
        return '\n'.join(lines)

    def __eq__(self, other):
        if not isinstance(other, CliffordStructure):
            return NotImplemented
        return (self.n, self.t, self.layers) == (other.n, other.t, other.layers)

    def __repr__(self):
        return 'CliffordStructure(n={n}, t={t})'.format(n=self.n, t=self.t)


def assemble_G(s):
    """
    The tableau of ``G = C_{t+1} ∘ F_t ∘ C_t ∘ ... ∘ F_1 ∘ C_1`` on n+t qubits.

    Built by composing layer and gadget tableaux, each extended by identity on the
    ancilla wires.
    """
    k = s.k
    tableau = CliffordTableau.identity(k)
    for i, layer in enumerate(s.layers):
        tableau = tableau.then(tableau_from_circuit(layer.extended(k)))
        if i < s.t:
            gadget = injection_gadget(i + 1, s.n)
            tableau = tableau.then(tableau_from_circuit(gadget).extended(k))
    log.debug(_('Assembled G for n={n} t={t}').format(n=s.n, t=s.t))
    return tableau
