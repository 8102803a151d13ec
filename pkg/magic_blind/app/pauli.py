"""
Exact arithmetic on k-qubit Pauli operators.

A :class:`PauliString` is ``i**phase`` times a tensor product of the Hermitian factors
I, X, Y, Z. Factor ``j`` is encoded by the pair ``(x[j], z[j])``: (0,0) is I, (1,0) is X,
(0,1) is Z and (1,1) is Y. One-time-pad keys ``X^a Z^r`` convert to this form through
:func:`from_pad` (``XZ = -iY`` is absorbed into the phase).
"""
from gettext import gettext as _
from itertools import product
from types import SimpleNamespace

import numpy as np

from magic_blind.app.exceptions import CapacityError, ContractError, DimensionError


PAULI = SimpleNamespace(I='I', X='X', Y='Y', Z='Z')

ENUMERATION_CAP = 10

_FACTOR = {(0, 0): PAULI.I, (1, 0): PAULI.X, (0, 1): PAULI.Z, (1, 1): PAULI.Y}
_BITS = {factor: bits for bits, factor in _FACTOR.items()}
_PREFIX = {0: '+', 1: '+i', 2: '-', 3: '-i'}
_PREFIX_PARSE = {'+': 0, '': 0, '+i': 1, 'i': 1, '-': 2, '-i': 3}


def _bit_vector(values):
    bits = np.array(values, dtype=np.uint8).reshape(-1)
    if np.any(bits > 1):
        raise ContractError(_('Bit vectors may only hold 0 and 1, got {v}').format(v=list(values)))
    bits.flags.writeable = False
    return bits


def phase_exponent(x1, z1, x2, z2):
    """
    Exponent of ``i`` produced when multiplying Hermitian Pauli factors.

    Works row-wise on arrays whose last axis indexes qubits, so a whole tableau can be
    multiplied by one row at once.

    Args:
        x1, z1: Bits of the left operand.
        x2, z2: Bits of the right operand.

    Returns:
        numpy.ndarray: Sum over the last axis of the per-qubit exponents (not reduced mod 4).

    """
    x1 = np.asarray(x1, dtype=np.int64)
    z1 = np.asarray(z1, dtype=np.int64)
    x2 = np.asarray(x2, dtype=np.int64)
    z2 = np.asarray(z2, dtype=np.int64)
    g = np.where(
        (x1 == 1) & (z1 == 1), z2 - x2,
        np.where(
            (x1 == 1) & (z1 == 0), z2 * (2 * x2 - 1),
            np.where((x1 == 0) & (z1 == 1), x2 * (1 - 2 * z2), 0)
        )
    )
    return g.sum(axis=-1)


class PauliString:
    """
    A k-qubit Pauli operator with its phase tracked exactly.

    Instances are immutable and hashable.

    Fields:
        x (numpy.ndarray): X-part bits, length k.
        z (numpy.ndarray): Z-part bits, length k.
        phase (int): Exponent of ``i`` in the global prefactor, in ``{0, 1, 2, 3}``.
    """

    __slots__ = ('x', 'z', 'phase')

    def __init__(self, x, z, phase=0):
        """
        Validate and freeze the bit vectors.
        """
        x = _bit_vector(x)
        z = _bit_vector(z)
        if x.size == 0 or x.shape != z.shape:
            raise DimensionError(
                _('Pauli bit vectors must be non-empty and of equal length, got {a} and {b}')
                .format(a=x.size, b=z.size))
        self.x = x
        self.z = z
        self.phase = int(phase) % 4

    @property
    def k(self):
        """Number of qubits."""
        return int(self.x.size)

    @classmethod
    def identity(cls, k):
        """The k-qubit identity."""
        return cls(np.zeros(k, dtype=np.uint8), np.zeros(k, dtype=np.uint8))

    @classmethod
    def single(cls, k, index, factor, sign=1):
        """
        A single non-trivial factor on one qubit.

        Args:
            k (int): Qubit count.
            index (int): 0-based qubit index.
            factor (str): One of ``'I'``, ``'X'``, ``'Y'``, ``'Z'``.
            sign (int): +1 or -1.

        """
        _check_index(index, k)
        x = np.zeros(k, dtype=np.uint8)
        z = np.zeros(k, dtype=np.uint8)
        x[index], z[index] = _BITS[factor]
        return cls(x, z, 0 if sign > 0 else 2)

    @classmethod
    def z_on(cls, k, indices):
        """Z on every listed 0-based index (Z_Q)."""
        z = np.zeros(k, dtype=np.uint8)
        for index in indices:
            _check_index(index, k)
            z[index] = 1
        return cls(np.zeros(k, dtype=np.uint8), z)

    @classmethod
    def parse(cls, text):
        """
        Parse the compact form, e.g. ``'+XIZY'``, ``'-iZX'`` or ``'XZ'``.

        Raises:
            ContractError: If the text is not a valid Pauli string.

        """
        text = text.strip()
        body = text.lstrip('+-i')
        prefix = text[:len(text) - len(body)]
        if prefix not in _PREFIX_PARSE or not body or any(c not in _BITS for c in body):
            raise ContractError(_('Cannot parse Pauli string "{t}"').format(t=text))
        bits = [_BITS[c] for c in body]
        return cls([b[0] for b in bits], [b[1] for b in bits], _PREFIX_PARSE[prefix])

    def factors(self):
        """Per-qubit factor letters, ignoring the phase."""
        return [_FACTOR[(int(a), int(b))] for a, b in zip(self.x, self.z)]

    @property
    def sign(self):
        """+1 or -1 for Hermitian strings, None when the phase is imaginary."""
        if self.phase % 2:
            return None
        return 1 if self.phase == 0 else -1

    @property
    def weight(self):
        """Number of non-identity factors."""
        return int(np.count_nonzero(self.x | self.z))

    def support(self):
        """0-based indices of the non-identity factors."""
        return [int(i) for i in np.flatnonzero(self.x | self.z)]

    def is_identity(self):
        """True for ``i**m`` times the identity, whatever m is."""
        return not (self.x.any() or self.z.any())

    def with_phase(self, phase):
        """Same factors, another phase."""
        return PauliString(self.x, self.z, phase)

    def tensor(self, other):
        """Tensor product ``self ⊗ other`` (self on the lower indices)."""
        return PauliString(
            np.concatenate([self.x, other.x]), np.concatenate([self.z, other.z]),
            self.phase + other.phase)

    def restrict(self, indices):
        """The factors on ``indices`` in that order, keeping the phase."""
        indices = list(indices)
        return PauliString(self.x[indices], self.z[indices], self.phase)

    def embed(self, k, wires):
        """Place this string on ``wires`` of a k-qubit register, identity elsewhere."""
        if len(wires) != self.k:
            raise DimensionError(_('Need {n} wires, got {w}').format(n=self.k, w=len(wires)))
        x = np.zeros(k, dtype=np.uint8)
        z = np.zeros(k, dtype=np.uint8)
        for position, wire in enumerate(wires):
            _check_index(wire, k)
            x[wire] = self.x[position]
            z[wire] = self.z[position]
        return PauliString(x, z, self.phase)

    def __mul__(self, other):
        return multiply(self, other)

    def __neg__(self):
        return PauliString(self.x, self.z, self.phase + 2)

    def __eq__(self, other):
        if not isinstance(other, PauliString):
            return NotImplemented
        return (self.phase == other.phase and np.array_equal(self.x, other.x)
                and np.array_equal(self.z, other.z))

    def __hash__(self):
        return hash((self.x.tobytes(), self.z.tobytes(), self.phase))

    def __str__(self):
        return _PREFIX[self.phase] + ''.join(self.factors())

    def __repr__(self):
        return 'PauliString({s})'.format(s=str(self))

    def render(self):
        """
        Long form with 1-based wire labels, e.g. ``'-i · X1 Z3'``.

        The identity renders as ``'+ · I'``.
        """
        terms = ['{f}{w}'.format(f=f, w=i + 1)
                 for i, f in enumerate(self.factors()) if f != PAULI.I]
        return '{p} · {t}'.format(p=_PREFIX[self.phase], t=' '.join(terms) or PAULI.I)


class SinglePauliLabel:
    """
    One of the six single-qubit stabilizer states, named by its stabilizer.

    Fields:
        axis (str): ``'X'``, ``'Y'`` or ``'Z'``.
        sign (int): +1 or -1.
    """

    __slots__ = ('axis', 'sign')

    AXES = (PAULI.X, PAULI.Y, PAULI.Z)

    def __init__(self, axis, sign=1):
        """
        Validate the axis and sign.
        """
        if axis not in self.AXES or sign not in (1, -1):
            raise ContractError(_('Invalid stabilizer label {s}{a}').format(a=axis, s=sign))
        self.axis = axis
        self.sign = sign

    @classmethod
    def parse(cls, text):
        """Parse ``'+Z'``, ``'-X'``, ``'Y'`` and the like."""
        text = text.strip()
        if len(text) == 1:
            text = '+' + text
        if len(text) != 2 or text[0] not in '+-':
            raise ContractError(_('Cannot parse stabilizer label "{t}"').format(t=text))
        return cls(text[1], 1 if text[0] == '+' else -1)

    @classmethod
    def all(cls):
        """The six labels in a fixed order."""
        return [cls(axis, sign) for axis in cls.AXES for sign in (1, -1)]

    def pauli(self, k=1, index=0):
        """The signed stabilizer as a PauliString on ``index`` of k qubits."""
        return PauliString.single(k, index, self.axis, self.sign)

    def __eq__(self, other):
        if not isinstance(other, SinglePauliLabel):
            return NotImplemented
        return (self.axis, self.sign) == (other.axis, other.sign)

    def __hash__(self):
        return hash((self.axis, self.sign))

    def __str__(self):
        return ('+' if self.sign > 0 else '-') + self.axis

    def __repr__(self):
        return 'SinglePauliLabel({s})'.format(s=str(self))


def _check_index(index, k):
    if not 0 <= index < k:
        raise DimensionError(
            _('Qubit {q} is out of range for {k} qubits').format(q=index + 1, k=k))


def _check_same_k(p, q):
    if p.k != q.k:
        raise DimensionError(
            _('Pauli strings act on {a} and {b} qubits').format(a=p.k, b=q.k))


def multiply(p, q):
    """
    Group product ``p · q`` with exact phase.

    Raises:
        DimensionError: If p and q act on a different number of qubits.

    """
    _check_same_k(p, q)
    exponent = int(phase_exponent(p.x, p.z, q.x, q.z))
    return PauliString(p.x ^ q.x, p.z ^ q.z, p.phase + q.phase + exponent)


def commutes(p, q):
    """
    True iff the symplectic inner product of p and q vanishes.
    """
    _check_same_k(p, q)
    return not (int(np.sum(p.x & q.z)) + int(np.sum(p.z & q.x))) % 2


def is_harmful(e):
    """
    True iff some factor of ``e`` is X or Y, i.e. it can flip a Z-basis outcome.
    """
    return bool(e.x.any())


def factor_at(p, i):
    """
    The tensor factor of p at 0-based index i, ignoring the global phase.
    """
    _check_index(i, p.k)
    return _FACTOR[(int(p.x[i]), int(p.z[i]))]


def enumerate_paulis(k, include_identity=True, cap=ENUMERATION_CAP):
    """
    Yield every phase-0 Pauli string on k qubits.

    Qubit 0 varies slowest; per qubit the order is I, X, Z, Y.

    Raises:
        CapacityError: If k is above ``cap``.

    """
    if k > cap:
        raise CapacityError(
            _('Enumerating 4^{k} Pauli strings exceeds the cap k <= {c}').format(k=k, c=cap))
    for digits in product(range(4), repeat=k):
        if not include_identity and not any(digits):
            continue
        yield PauliString([d & 1 for d in digits], [d >> 1 for d in digits])


def from_pad(a, r):
    """
    The one-time pad ``X^a Z^r`` as a PauliString.
    """
    a = _bit_vector(a)
    r = _bit_vector(r)
    return PauliString(a, r, -int(np.sum(a & r)))


def to_pad(p):
    """
    Split p into ``(a, r, m)`` with ``p = i**m · X^a Z^r``.
    """
    m = (p.phase + int(np.sum(p.x & p.z))) % 4
    return p.x.copy(), p.z.copy(), m
