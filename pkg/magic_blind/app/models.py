"""
Value types shared by the protocol engine, the verifier and the command line.
"""
from dataclasses import dataclass, field
from gettext import gettext as _
from hashlib import sha256
from types import SimpleNamespace
from typing import Any, Tuple

import numpy as np

from magic_blind.app.exceptions import ContractError, DimensionError
from magic_blind.app.pauli import SinglePauliLabel, from_pad


BACKEND = SimpleNamespace(
    AUTO='auto',
    STABILIZER='stab',
    DENSE='dense',
)
BACKEND_CHOICES = (BACKEND.AUTO, BACKEND.STABILIZER, BACKEND.DENSE)

MODE = SimpleNamespace(
    COMPUTATION='computation',
    MAGIC_FREE='magic-free',
    MIXED='mixed',
)

COMMUNICATION = SimpleNamespace(
    BACK_AND_FORTH='back-and-forth',
    NO_BACK_AND_FORTH='no-back-and-forth',
)
COMMUNICATION_CHOICES = (COMMUNICATION.BACK_AND_FORTH, COMMUNICATION.NO_BACK_AND_FORTH)

DIRECTION = SimpleNamespace(
    TO_SERVER='C->S',
    TO_CLIENT='S->C',
)

RESOURCE = SimpleNamespace(
    HIDDEN_MAGIC_GATE='HiddenMagicGate',
    BLIND_MEASUREMENTS='BlindMeasurements',
    MAGIC_BLIND_DQC='MagicBlindDQC',
)


class InjectionChoice:
    """
    One element of the injection set: the magic state T or a stabilizer state.

    Fields:
        value: ``'T'`` or a :class:`~magic_blind.app.pauli.SinglePauliLabel`.
    """

    __slots__ = ('value',)

    T = 'T'

    def __init__(self, value):
        """
        Accept ``'T'`` or a stabilizer label.
        """
        if value != self.T and not isinstance(value, SinglePauliLabel):
            raise ContractError(_('Injection must be T or a stabilizer label, got {v}').format(
                v=value))
        self.value = value

    @classmethod
    def parse(cls, text):
        """Parse ``'T'``, ``'+Z'``, ``'-X'`` and the like."""
        text = text.strip()
        if text == cls.T:
            return cls(cls.T)
        return cls(SinglePauliLabel.parse(text))

    @classmethod
    def all(cls):
        """The seven choices, T first."""
        return [cls(cls.T)] + [cls(label) for label in SinglePauliLabel.all()]

    @property
    def is_magic(self):
        """True for the T state."""
        return self.value == self.T

    @property
    def label(self):
        """The stabilizer label, or None for T."""
        return None if self.is_magic else self.value

    def __eq__(self, other):
        if not isinstance(other, InjectionChoice):
            return NotImplemented
        return str(self) == str(other)

    def __hash__(self):
        return hash(str(self))

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return 'InjectionChoice({v})'.format(v=self)


def injection_mode(choices):
    """
    Computation mode when every choice is T, magic-free when none is, else mixed.

    An empty list (t = 0) counts as magic-free: both modes coincide there.
    """
    magic = [choice.is_magic for choice in choices]
    if magic and all(magic):
        return MODE.COMPUTATION
    if not any(magic):
        return MODE.MAGIC_FREE
    return MODE.MIXED


@dataclass(frozen=True)
class KeyState:
    """
    The Client's one-time-pad key ``X^a Z^r`` on k wires.

    Fields:
        a (tuple): X-key bits.
        r (tuple): Z-key bits.
    """

    a: Tuple[int, ...]
    r: Tuple[int, ...]

    def __post_init__(self):
        if len(self.a) != len(self.r):
            raise DimensionError(_('Key halves have lengths {a} and {r}').format(
                a=len(self.a), r=len(self.r)))
        object.__setattr__(self, 'a', tuple(int(bit) for bit in self.a))
        object.__setattr__(self, 'r', tuple(int(bit) for bit in self.r))

    @property
    def k(self):
        """Number of padded wires."""
        return len(self.a)

    @classmethod
    def zeros(cls, k):
        """The trivial pad."""
        return cls((0,) * k, (0,) * k)

    def pad(self):
        """The pad as a PauliString."""
        return from_pad(np.array(self.a), np.array(self.r))

    def concat(self, other):
        """Keys of ``self`` followed by keys of ``other``."""
        return KeyState(self.a + other.a, self.r + other.r)

    def truncated(self, k):
        """Keys of the first k wires."""
        return KeyState(self.a[:k], self.r[:k])

    def __str__(self):
        return 'a={a} r={r}'.format(a=''.join(map(str, self.a)), r=''.join(map(str, self.r)))


@dataclass(frozen=True)
class RegisterPayload:
    """Encrypted qubits handed over as a backend register."""

    register: Any
    kind = 'register'

    @property
    def qubits(self):
        """Number of qubits carried."""
        return self.register.k

    def canonical(self):
        """Text the transcript digest is computed over."""
        return 'register k={k} {f}'.format(k=self.register.k, f=self.register.fingerprint())


@dataclass(frozen=True)
class AncillaPayload:
    """A single encrypted, rotated injection qubit."""

    register: Any
    kind = 'ancilla'

    @property
    def qubits(self):
        """Always one."""
        return self.register.k

    def canonical(self):
        """Text the transcript digest is computed over."""
        return 'ancilla {f}'.format(f=self.register.fingerprint())


@dataclass(frozen=True)
class OutcomeBit:
    """The raw ancilla measurement outcome b."""

    b: int
    kind = 'outcome'
    qubits = 0

    def canonical(self):
        """Text the transcript digest is computed over."""
        return 'outcome {b}'.format(b=self.b)


@dataclass(frozen=True)
class AngleMessage:
    """The blinded angle δ."""

    delta: Any
    kind = 'angle'
    qubits = 0

    def canonical(self):
        """Text the transcript digest is computed over."""
        return 'angle {d}'.format(d=int(self.delta))


@dataclass(frozen=True)
class OutcomeString:
    """The raw outcomes of the final Z measurements."""

    x: Tuple[int, ...]
    kind = 'outcomes'
    qubits = 0

    def canonical(self):
        """Text the transcript digest is computed over."""
        return 'outcomes {x}'.format(x=''.join(map(str, self.x)))


@dataclass(frozen=True)
class KeepRegisters:
    """Marks that the Server keeps its register between injections."""

    kind = 'keep'
    qubits = 0

    def canonical(self):
        """Text the transcript digest is computed over."""
        return 'keep'


QUANTUM_KINDS = ('register', 'ancilla')


@dataclass
class SessionTranscript:
    """
    The ordered messages of one session plus the Client's secret log.

    Fields:
        entries (list): ``(direction, message)`` pairs in protocol order.
        secrets (dict): Client-side log: ``keys`` (per layer), ``thetas`` and ``b_prime``.
    """

    entries: list = field(default_factory=list)
    secrets: dict = field(default_factory=lambda: {'keys': [], 'thetas': [], 'b_prime': []})

    def record(self, direction, message):
        """Append one message."""
        self.entries.append((direction, message))

    def kinds(self):
        """Message kinds in order."""
        return [message.kind for _direction, message in self.entries]

    def quantum_payloads(self, direction=DIRECTION.TO_SERVER):
        """Quantum messages sent in one direction."""
        return [message for sent, message in self.entries
                if sent == direction and message.kind in QUANTUM_KINDS]

    def quantum_qubits(self, direction=DIRECTION.TO_SERVER):
        """Total qubits sent in one direction."""
        return sum(message.qubits for message in self.quantum_payloads(direction))

    def lines(self):
        """
        One line per message: ``step<TAB>direction<TAB>kind<TAB>digest``.

        The digest is the first 16 hex digits of the SHA-256 of the message's canonical
        text.
        """
        lines = []
        for step, (direction, message) in enumerate(self.entries):
            digest = sha256(message.canonical().encode('utf-8')).hexdigest()[:16]
            lines.append('\t'.join([str(step), direction, message.kind, digest]))
        return lines

    def dump(self):
        """The transcript as text."""
        return '\n'.join(self.lines()) + '\n'
