"""
Server behaviors: honest, Pauli-deviating, unitary-deviating, noisy and round-targeted.

A deviation point is ``('layer', i)`` (just before the ancilla of injection i is
measured, on n+1 wires) or ``('final',)`` (just before the final measurements, on n
wires). Behaviors configured per verification run are turned into per-round behaviors
with :meth:`ServerBehavior.for_round`.
"""
from gettext import gettext as _
from types import SimpleNamespace
import logging

import numpy as np

from magic_blind.app.exceptions import ContractError, DimensionError
from magic_blind.app.pauli import PauliString, is_harmful


log = logging.getLogger(__name__)


FINAL = ('final',)

NOISE = SimpleNamespace(
    UNIFORM_HARMFUL='uniform_harmful',
    FIXED_PAULI='fixed_pauli',
    PER_QUBIT_DEPOLARIZING='per_qubit_depolarizing',
)
NOISE_KINDS = (NOISE.UNIFORM_HARMFUL, NOISE.FIXED_PAULI, NOISE.PER_QUBIT_DEPOLARIZING)


def layer_point(i):
    """Deviation point of injection i (1-based)."""
    return ('layer', int(i))


class ServerBehavior:
    """
    Base class: the honest Server.
    """

    name = 'honest'
    requires_dense = False

    def deviate(self, register, point):
        """
        Act on the Server's register at a deviation point.

        Returns:
            The register handle after the deviation.

        """
        return register

    def for_round(self, slot, rng, n, t):
        """The behavior used in physical round ``slot``."""
        return self

    def output_pauli(self, n, t):
        """
        The deviation folded onto the n+t output wires, or None when honest.

        Raises:
            ContractError: If the behavior has no output-Pauli form.

        """
        return None

    def __repr__(self):
        return '{c}()'.format(c=type(self).__name__)


class Honest(ServerBehavior):
    """Follows the protocol."""

    pass


class PauliDeviation(ServerBehavior):
    """
    Applies a fixed Pauli at each listed deviation point.

    Fields:
        deviations (dict): Deviation point to PauliString.
    """

    name = 'pauli'

    def __init__(self, deviations):
        """
        Keep only non-identity deviations.
        """
        self.deviations = {tuple(point): e for point, e in dict(deviations).items()
                           if not e.is_identity()}
        self.output = None

    @classmethod
    def from_output_pauli(cls, e, n, t):
        """
        Fold a Pauli on the n+t outputs of G into per-measurement deviations.

        Factor ``n+i-1`` acts on the measured wire n of injection i; the first n factors
        act before the final measurements.
        """
        if e.k != n + t:
            raise DimensionError(_('Output deviation acts on {k} wires, expected {w}').format(
                k=e.k, w=n + t))
        deviations = {FINAL: e.restrict(range(n))}
        for i in range(1, t + 1):
            factor = e.restrict([n + i - 1]).with_phase(0)
            deviations[layer_point(i)] = factor.embed(n + 1, [n])
        behavior = cls(deviations)
        behavior.output = e
        return behavior

    def deviate(self, register, point):
        """Apply the Pauli registered for this point, if any."""
        e = self.deviations.get(tuple(point))
        if e is None:
            return register
        if e.k != register.k:
            raise DimensionError(
                _('Deviation at {p} acts on {k} wires but the register has {r}').format(
                    p=point, k=e.k, r=register.k))
        return register.apply_pauli(e)

    def output_pauli(self, n, t):
        """The output Pauli this behavior was folded from."""
        output = self.output
        if output is None:
            if not self.deviations:
                return None
            raise ContractError(_('This Pauli deviation was not built from an output Pauli'))
        return output

    def __repr__(self):
        return 'PauliDeviation({d})'.format(
            d=', '.join('{p}: {e}'.format(p=p, e=e) for p, e in sorted(self.deviations.items())))


class UnitaryDeviation(ServerBehavior):
    """
    Applies an arbitrary unitary to all register wires plus fresh private work wires.

    Work wires start in ``|0…0⟩``, follow the register wires in the unitary's ordering
    and stay with the Server.

    Fields:
        unitaries (dict): Deviation point to a square numpy array.
        w_priv (int): Work wires added at each point.
    """

    name = 'unitary'
    requires_dense = True

    def __init__(self, unitaries, w_priv=0):
        """
        Check unitarity.
        """
        self.unitaries = {}
        for point, u in dict(unitaries).items():
            u = np.asarray(u, dtype=complex)
            if u.ndim != 2 or u.shape[0] != u.shape[1] or not np.allclose(
                    u @ u.conj().T, np.eye(u.shape[0]), atol=1e-9):
                raise ContractError(_('Deviation at {p} is not a unitary matrix').format(p=point))
            self.unitaries[tuple(point)] = u
        self.w_priv = int(w_priv)

    def deviate(self, register, point):
        """Join fresh work wires and apply the unitary."""
        u = self.unitaries.get(tuple(point))
        if u is None:
            return register
        if u.shape[0] != 2 ** (register.k + self.w_priv):
            raise DimensionError(
                _('Deviation at {p} needs {k} register wires plus {w} work wires').format(
                    p=point, k=register.k, w=self.w_priv))
        wires = list(range(register.k))
        if self.w_priv:
            register, work = register.add_work(self.w_priv)
            wires += work
        return register.apply_unitary(u, wires)

    def output_pauli(self, n, t):
        """Unitary deviations have no output-Pauli form."""
        raise ContractError(_('Unitary deviations need the protocol round model'))


class NoisyHonest(ServerBehavior):
    """
    Honest, except that each round is hit by noise with probability ``p_err``.

    Noise kinds:
        uniform_harmful: one uniformly random harmful Pauli on the n+t outputs.
        fixed_pauli: the given Pauli ``pauli``.
        per_qubit_depolarizing: each output wire independently gets X, Y or Z with
            probability ``p`` (one third each).

    Fields:
        p_err (float): Per-round noise probability.
        kind (str): One of :data:`NOISE_KINDS`.
        pauli (PauliString): Used by fixed_pauli.
        p (float): Used by per_qubit_depolarizing.
    """

    name = 'noisy'

    def __init__(self, p_err, kind=NOISE.UNIFORM_HARMFUL, pauli=None, p=None):
        """
        Validate the probabilities and the kind-specific parameter.
        """
        if not 0 <= p_err <= 1:
            raise ContractError(_('p_err must lie in [0, 1], got {p}').format(p=p_err))
        if kind not in NOISE_KINDS:
            raise ContractError(_('Unknown noise kind "{k}"').format(k=kind))
        if kind == NOISE.FIXED_PAULI and pauli is None:
            raise ContractError(_('fixed_pauli noise needs a Pauli'))
        if kind == NOISE.PER_QUBIT_DEPOLARIZING and (p is None or not 0 <= p <= 1):
            raise ContractError(_('per_qubit_depolarizing noise needs p in [0, 1]'))
        self.p_err = float(p_err)
        self.kind = kind
        self.pauli = pauli
        self.p = p

    def sample(self, rng, k):
        """
        Draw this round's output Pauli on k wires, or None for a clean round.
        """
        if rng.random() >= self.p_err:
            return None
        if self.kind == NOISE.FIXED_PAULI:
            if self.pauli.k != k:
                raise DimensionError(_('Noise Pauli acts on {a} wires, expected {k}').format(
                    a=self.pauli.k, k=k))
            return self.pauli
        if self.kind == NOISE.UNIFORM_HARMFUL:
            while True:
                x = rng.integers(2, size=k)
                if x.any():
                    return PauliString(x, rng.integers(2, size=k))
        hit = rng.random(k) < self.p
        which = rng.integers(1, 4, size=k) * hit
        return PauliString(which & 1, which >> 1)

    def for_round(self, slot, rng, n, t):
        """A PauliDeviation for a noisy round, else Honest."""
        e = self.sample(rng, n + t)
        if e is None or e.is_identity():
            return Honest()
        return PauliDeviation.from_output_pauli(e, n, t)

    def __repr__(self):
        return 'NoisyHonest(p_err={p}, kind={k})'.format(p=self.p_err, k=self.kind)


class RoundTargeted(ServerBehavior):
    """
    Applies the output Pauli ``e`` in the listed physical slots only.

    The slots are fixed before the rounds are planned, so they cannot depend on which
    slots hold test rounds.

    Fields:
        e (PauliString): Output Pauli on n+t wires.
        slots (frozenset): 0-based physical slots attacked.
    """

    name = 'targeted'

    def __init__(self, e, slots):
        """Store the attack."""
        self.e = e
        self.slots = frozenset(int(s) for s in slots)

    def for_round(self, slot, rng, n, t):
        """The Pauli deviation in attacked slots, honest elsewhere."""
        if slot in self.slots and not self.e.is_identity():
            return PauliDeviation.from_output_pauli(self.e, n, t)
        return Honest()

    def __repr__(self):
        return 'RoundTargeted({e}, {m} slots)'.format(e=self.e, m=len(self.slots))


def attacked(behavior):
    """True when a per-round behavior deviates at all."""
    if isinstance(behavior, PauliDeviation):
        return bool(behavior.deviations)
    return not isinstance(behavior, Honest) and type(behavior) is not ServerBehavior


def harmful_output(behavior, n, t):
    """True when the per-round behavior folds to a harmful output Pauli."""
    e = behavior.output_pauli(n, t)
    return e is not None and is_harmful(e)
