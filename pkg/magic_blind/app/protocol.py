"""
Client and Server state machines for blind state injection, blind measurements and
magic-blind delegated computation, plus the ideal resources they are compared with.

Every run goes through a :class:`ProtocolSession`, which keeps the Client's keys away
from the Server and records each message in a :class:`~magic_blind.app.models.SessionTranscript`.
Randomness is split in two: the Client draws pads and angles from a secret source, the
Server's measurements draw from a branch source. Scripted sources replay fixed values,
which is how exact averages over every key, angle and measurement branch are computed.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from gettext import gettext as _
from itertools import product
import logging

import numpy as np

from magic_blind.app import dense, stabilizer
from magic_blind.app.backends import DenseRegister, StabilizerRegister, prepare_register
from magic_blind.app.behaviors import FINAL, Honest, PauliDeviation, UnitaryDeviation, \
    layer_point
from magic_blind.app.clifford import injection_gadget, tableau_from_circuit, update_keys
from magic_blind.app.dense import Angle, KEY_BITS_CAP
from magic_blind.app.exceptions import CapacityError, ContractError, DimensionError
from magic_blind.app.models import BACKEND, COMMUNICATION, DIRECTION, MODE, RESOURCE, \
    AncillaPayload, AngleMessage, InjectionChoice, KeepRegisters, KeyState, OutcomeBit, \
    OutcomeString, RegisterPayload, SessionTranscript, injection_mode
from magic_blind.app.pauli import SinglePauliLabel


log = logging.getLogger(__name__)


BRANCH_EPSILON = 1e-12


class SecretSource:
    """
    Supplies the Client's pad bits and angles.
    """

    def bits(self, count):
        """The next ``count`` secret bits."""
        raise NotImplementedError

    def pad(self, k):
        """A fresh pad on k wires: k X-bits, then k Z-bits."""
        bits = self.bits(2 * k)
        return KeyState(bits[:k], bits[k:])

    def angle(self):
        """A fresh angle θ from two bits, high bit first."""
        high, low = self.bits(2)
        return Angle(2 * high + low)


class SampledSecrets(SecretSource):
    """Secret bits drawn from a numpy Generator."""

    def __init__(self, rng):
        """Keep the generator."""
        self.rng = rng

    def bits(self, count):
        """Uniform bits."""
        return [int(bit) for bit in self.rng.integers(2, size=count)]


class ScriptedSecrets(SecretSource):
    """
    Secret bits replayed from a fixed sequence.

    Raises:
        ContractError: When the session asks for more bits than scripted.
    """

    def __init__(self, values):
        """Keep the sequence."""
        self.values = tuple(int(v) for v in values)
        self.position = 0

    def bits(self, count):
        """The next ``count`` scripted bits."""
        end = self.position + count
        if end > len(self.values):
            raise ContractError(_('Scripted secrets exhausted after {n} bits').format(
                n=len(self.values)))
        chunk = list(self.values[self.position:end])
        self.position = end
        return chunk


def _forced(p_one):
    if p_one <= BRANCH_EPSILON:
        return 0
    if p_one >= 1 - BRANCH_EPSILON:
        return 1
    return None


class SampledBranches:
    """Measurement branches drawn with the Born rule."""

    def __init__(self, rng):
        """Keep the generator."""
        self.rng = rng

    def choose(self, p_one):
        """Draw one outcome given the probability of 1."""
        forced = _forced(p_one)
        if forced is not None:
            return forced
        return int(self.rng.random() < float(p_one))


class ScriptedBranches:
    """
    Measurement branches replayed from a prefix; unscripted random outcomes default to 0.

    Fields:
        weight: Product of the probabilities of the chosen outcomes.
        choices (list): Outcomes taken so far.
        decisions (list): For each outcome, whether both values were possible.
    """

    def __init__(self, script=()):
        """Start a replay."""
        self.script = tuple(script)
        self.choices = []
        self.decisions = []
        self.weight = Fraction(1)

    def choose(self, p_one):
        """The scripted outcome, checked to be possible."""
        depth = len(self.choices)
        forced = _forced(p_one)
        if depth < len(self.script):
            bit = self.script[depth]
            if forced is not None and bit != forced:
                raise ContractError(_('Scripted branch {d} has probability 0').format(d=depth))
        else:
            bit = 0 if forced is None else forced
        if forced is None:
            self.weight *= p_one if bit else 1 - p_one
        self.choices.append(bit)
        self.decisions.append(forced is None)
        return bit


def enumerate_branches(run):
    """
    Run ``run(branches)`` once per measurement branch.

    Yields:
        tuple: ``(weight, result)``; weights sum to 1.

    """
    pending = [()]
    while pending:
        prefix = pending.pop()
        branches = ScriptedBranches(prefix)
        result = run(branches)
        for depth in range(len(prefix), len(branches.choices)):
            if branches.decisions[depth]:
                pending.append(tuple(branches.choices[:depth]) + (1 - branches.choices[depth],))
        yield branches.weight, result


def enumerate_secrets(count, cap=KEY_BITS_CAP):
    """
    Every assignment of ``count`` secret bits with its uniform weight.

    Raises:
        CapacityError: If ``count`` exceeds ``cap``.

    """
    if count > cap:
        raise CapacityError(_('Enumerating {b} secret bits exceeds the cap of {c}').format(
            b=count, c=cap))
    weight = Fraction(1, 2 ** count)
    for values in product((0, 1), repeat=count):
        yield weight, values


def secret_bits(n, t, communication=COMMUNICATION.NO_BACK_AND_FORTH):
    """
    Secret bits one session consumes: pads for every encryption plus ancilla pads and θ.
    """
    encryptions = t + 1 if communication == COMMUNICATION.BACK_AND_FORTH else 1
    return 2 * n * encryptions + 4 * t


def measure(register, q, branches):
    """Z-measure wire q of a register handle; returns ``(bit, register)``."""
    p_one, one = register.project(q, 1)
    bit = branches.choose(p_one)
    if bit:
        return 1, one
    return 0, register.project(q, 0)[1]


def layer_circuit(circuit, n):
    """The n+1 wire circuit of one injection: the layer, then the gadget."""
    return circuit.extended(n + 1).then(injection_gadget(1, n))


class Client:
    """
    The Client of one session: holds the current keys and draws secrets.

    Fields:
        n (int): Register width.
        keys (KeyState): Pad currently on the register.
    """

    def __init__(self, n, secrets, backend):
        """Start with no register sent."""
        self.n = n
        self.secrets = secrets
        self.backend = backend
        self.keys = None

    def encrypt(self, register):
        """Pad a plain register with fresh keys."""
        self.keys = self.secrets.pad(register.k)
        return register.apply_pauli(self.keys.pad())

    def decrypt(self, register):
        """Remove the current pad."""
        return register.apply_pauli(self.keys.pad())

    def prepare_ancilla(self, choice):
        """
        ``X^ã Z^r̃ Z(θ)|A⟩`` with fresh ã, r̃ and θ.

        Returns:
            tuple: ``(register, ancilla keys, θ)``.

        """
        theta = self.secrets.angle()
        register = prepare_register([choice.value], self.backend).apply_rotation(0, theta)
        keys = self.secrets.pad(1)
        return register.apply_pauli(keys.pad()), keys, theta

    def blind_angle(self, tableau, ancilla_keys, theta, choice, b):
        """
        Decode b, compute δ and update the keys through one injection.

        Returns:
            tuple: ``(δ, b′)``.

        """
        n = self.n
        joint = self.keys.concat(ancilla_keys)
        a, r = [[int(bit) for bit in half] for half in update_keys(tableau, joint.a, joint.r)[:2]]
        b_prime = int(b) ^ a[n]
        phi = b_prime if choice.is_magic else 0
        delta = Angle(phi + int(theta))
        if a[n - 1]:
            delta = -delta
        if choice.is_magic:
            a[n - 1] ^= b_prime
        self.keys = KeyState(a[:n], r[:n])
        return delta, b_prime

    def finish(self, tableau):
        """Push the keys through the last layer."""
        a, r = update_keys(tableau, self.keys.a, self.keys.r)[:2]
        self.keys = KeyState(a, r)
        return self.keys

    def decode(self, x):
        """``x ⊕ a``."""
        return tuple(int(bit) ^ key for bit, key in zip(x, self.keys.a))


class Server:
    """
    The Server of one session: holds the register and follows (or deviates from) the steps.
    """

    def __init__(self, behavior, branches):
        """Start empty."""
        self.behavior = behavior
        self.branches = branches
        self.register = None
        self.pre_measurement = None

    def receive(self, register):
        """Take a register, or append an ancilla to the one held."""
        self.register = register if self.register is None else self.register.append(register)

    def run_injection(self, circuit, point):
        """Apply the layer and gadget, then measure the ancilla wire."""
        register = self.behavior.deviate(self.register.apply_circuit(circuit), point)
        b, self.register = measure(register, register.k - 1, self.branches)
        return b

    def correct(self, delta):
        """Apply ``Z†(δ)`` on the data wire and drop the measured wire."""
        n = self.register.k - 1
        register = self.register.apply_rotation(n - 1, delta, dagger=True)
        self.register = register.discard(n)[1]

    def measure_all(self, circuit):
        """Apply the last layer and measure every wire."""
        register = self.behavior.deviate(self.register.apply_circuit(circuit), FINAL)
        self.pre_measurement = register
        outcomes = []
        for q in range(register.k):
            bit, register = measure(register, q, self.branches)
            outcomes.append(bit)
        self.register = register
        return tuple(outcomes)

    def hand_back(self):
        """Give the register away."""
        register, self.register = self.register, None
        return register


class ProtocolSession:
    """
    One Client/Server session over an ordered channel.

    Fields:
        client (Client): Client side.
        server (Server): Server side.
        transcript (SessionTranscript): Messages so far.
    """

    def __init__(self, n, behavior=None, secrets=None, branches=None,
                 backend=BACKEND.STABILIZER, probe=None):
        """
        Args:
            n (int): Register width.
            behavior (ServerBehavior): Defaults to Honest.
            secrets (SecretSource): Client randomness.
            branches: Server measurement randomness (``choose(p_one)``).
            backend (str): ``'stab'`` or ``'dense'``.
            probe (callable): Called as ``probe(session, message)`` after every message.

        """
        self.client = Client(n, secrets, backend)
        self.server = Server(behavior or Honest(), branches)
        self.transcript = SessionTranscript()
        self.probe = probe

    def _send(self, direction, message):
        self.transcript.record(direction, message)
        if self.probe is not None:
            self.probe(self, message)

    def send_register(self, plain):
        """Encrypt and hand over a register."""
        encrypted = self.client.encrypt(plain)
        self.transcript.secrets['keys'].append(self.client.keys)
        self.server.receive(encrypted)
        self._send(DIRECTION.TO_SERVER, RegisterPayload(encrypted))

    def resume(self, register, keys):
        """Start from a register the Server already holds under ``keys``."""
        self.client.keys = keys
        self.server.receive(register)

    def return_register(self):
        """Get the register back and decrypt it."""
        register = self.server.hand_back()
        self._send(DIRECTION.TO_CLIENT, RegisterPayload(register))
        return self.client.decrypt(register)

    def keep_register(self):
        """Tell the Server to keep its register for the next injection."""
        self._send(DIRECTION.TO_SERVER, KeepRegisters())

    def inject(self, index, circuit, choice):
        """
        One blind state injection on the held register.

        Returns:
            int: The decoded outcome b′.

        """
        n = self.client.n
        ancilla, ancilla_keys, theta = self.client.prepare_ancilla(choice)
        self.server.receive(ancilla)
        self._send(DIRECTION.TO_SERVER, AncillaPayload(ancilla))
        layer = layer_circuit(circuit, n)
        b = self.server.run_injection(layer, layer_point(index))
        self._send(DIRECTION.TO_CLIENT, OutcomeBit(b))
        delta, b_prime = self.client.blind_angle(
            tableau_from_circuit(layer), ancilla_keys, theta, choice, b)
        self.server.correct(delta)
        self._send(DIRECTION.TO_SERVER, AngleMessage(delta))
        self.transcript.secrets['thetas'].append(theta)
        self.transcript.secrets['b_prime'].append(b_prime)
        self.transcript.secrets['keys'].append(self.client.keys)
        return b_prime

    def measure(self, circuit):
        """Blind measurements of the held register after a last layer; returns x."""
        self.client.finish(tableau_from_circuit(circuit))
        raw = self.server.measure_all(circuit)
        self._send(DIRECTION.TO_CLIENT, OutcomeString(raw))
        return self.client.decode(raw)


@dataclass
class InjectionResult:
    """
    Outcome of one blind state injection.

    Fields:
        register: Server-held register, still encrypted under ``keys``.
        keys (KeyState): The Client's pad on it.
        b_prime (int): Decoded outcome for a stabilizer injection, None for T.
        label (int): 1-based wire label ``n+i`` under which b′ is stored.
        transcript (SessionTranscript): The messages.
    """

    register: object
    keys: KeyState
    b_prime: object
    label: int
    transcript: SessionTranscript

    def decrypted(self):
        """The register with the pad removed."""
        return self.register.apply_pauli(self.keys.pad())


@dataclass
class MBDQCResult:
    """
    Outcome of one delegated computation.

    Fields:
        output (tuple): x, followed by b′ of each stabilizer injection.
        mode (str): Computation, magic-free or mixed.
        transcript (SessionTranscript): The messages.
        pre_measurement: Server register just before the final measurements.
        keys (KeyState): The pad on ``pre_measurement``.
    """

    output: tuple
    mode: str
    transcript: SessionTranscript
    pre_measurement: object = None
    keys: KeyState = None
    b_prime: list = field(default_factory=list)


def _labels(rho):
    return [label if isinstance(label, SinglePauliLabel) else SinglePauliLabel.parse(label)
            for label in rho]


def _is_state(rho):
    return isinstance(rho, (dense.StateVector, stabilizer.StabilizerState))


def select_backend(backend, rho, injections, behavior):
    """
    Resolve ``'auto'``: dense when a T state, a dense input or a unitary deviation is involved.

    Raises:
        ContractError: If the stabilizer backend is forced on a run that needs dense.

    """
    needs_dense = (any(choice.is_magic for choice in injections)
                   or isinstance(rho, dense.StateVector)
                   or (behavior is not None and behavior.requires_dense))
    if backend == BACKEND.AUTO:
        backend = BACKEND.DENSE if needs_dense else BACKEND.STABILIZER
    elif backend == BACKEND.STABILIZER and needs_dense:
        raise ContractError(_('This run involves T states or unitaries and needs the dense '
                              'backend'))
    log.debug(_('Selected backend {b}').format(b=backend))
    return backend


def plain_register(rho, backend):
    """The unencrypted input register for labels or a prepared state."""
    if isinstance(rho, dense.StateVector):
        return DenseRegister(rho)
    if isinstance(rho, stabilizer.StabilizerState):
        register = StabilizerRegister(rho)
        return register.to_dense() if backend == BACKEND.DENSE else register
    return prepare_register(_labels(rho), backend)


def _width(rho):
    return rho.k if _is_state(rho) else len(rho)


def _check_dense_width(backend, n, t, behavior):
    if backend != BACKEND.DENSE:
        return
    width = n + (1 if t else 0)
    if isinstance(behavior, UnitaryDeviation):
        width += behavior.w_priv * len(behavior.unitaries)
    if width > dense.DENSE_CAP:
        raise CapacityError(_('{w} simulated qubits exceed the dense cap of {c}').format(
            w=width, c=dense.DENSE_CAP))


def _sources(rng, secrets, branches):
    if secrets is None or branches is None:
        if rng is None:
            raise ContractError(_('Either a generator or both secret and branch sources are '
                                  'required'))
    return (secrets or SampledSecrets(rng)), (branches or SampledBranches(rng))


def blind_state_injection(circuit, choice, index=1, rho=None, register=None, keys=None,
                          behavior=None, rng=None, secrets=None, branches=None,
                          backend=BACKEND.AUTO):
    """
    Inject ``choice`` after the Clifford ``circuit`` without revealing either.

    The input is either a fresh plain ``rho`` (encrypted here) or a Server-held
    ``register`` under ``keys``.

    Returns:
        InjectionResult: The encrypted output register and its keys. With an honest
            Server the decrypted register is ``T_n ∘ C[ρ]`` for T, and otherwise the
            post-measurement state of ``F ∘ C[ρ ⊗ A]`` with b′ reported.

    """
    n = circuit.k
    if rho is None and register is None:
        raise ContractError(_('blind_state_injection needs rho or an encrypted register'))
    backend = select_backend(backend, rho if register is None else register.state, [choice],
                             behavior)
    _check_dense_width(backend, n, 1, behavior)
    secrets, branches = _sources(rng, secrets, branches)
    session = ProtocolSession(n, behavior, secrets, branches, backend)
    if register is None:
        if _width(rho) != n:
            raise DimensionError(_('Input has {k} qubits, circuit has {n}').format(
                k=_width(rho), n=n))
        session.send_register(plain_register(rho, backend))
    else:
        if register.backend != backend:
            register = register.to_dense()
        session.resume(register, keys)
    b_prime = session.inject(index, circuit, choice)
    return InjectionResult(session.server.register, session.client.keys,
                           None if choice.is_magic else b_prime, n + index, session.transcript)


def blind_measurements(circuit, rho=None, register=None, keys=None, behavior=None, rng=None,
                       secrets=None, branches=None, backend=BACKEND.AUTO):
    """
    Measure ``C[ρ]`` in the Z basis blindly.

    Returns:
        tuple: ``(x, transcript)``.

    """
    n = circuit.k
    if rho is None and register is None:
        raise ContractError(_('blind_measurements needs rho or an encrypted register'))
    backend = select_backend(backend, rho if register is None else register.state, [], behavior)
    secrets, branches = _sources(rng, secrets, branches)
    session = ProtocolSession(n, behavior, secrets, branches, backend)
    if register is None:
        session.send_register(plain_register(rho, backend))
    else:
        session.resume(register, keys)
    x = session.measure(circuit)
    return x, session.transcript


def run_mbdqc(structure, rho, injections, communication=COMMUNICATION.NO_BACK_AND_FORTH,
              behavior=None, rng=None, secrets=None, branches=None, backend=BACKEND.AUTO,
              allow_mixed=False, probe=None):
    """
    Delegate the computation described by a Clifford structure and injection choices.

    Args:
        structure (CliffordStructure): Public layers C_1..C_{t+1}.
        rho: n stabilizer labels, or a StateVector.
        injections (sequence): t InjectionChoice values; all T (computation mode) or
            none T (magic-free mode).
        communication (str): With or without returning the register between injections.
        behavior (ServerBehavior): Server behavior, Honest by default.
        rng (numpy.random.Generator): Source for sampled secrets and branches.
        secrets (SecretSource): Overrides the Client randomness.
        branches: Overrides the Server measurement randomness.
        backend (str): ``'auto'``, ``'stab'`` or ``'dense'``.
        allow_mixed (bool): Run mixed injection modes, with no correctness contract.
        probe (callable): Passed to the session.

    Returns:
        MBDQCResult: n output bits in computation mode, n+t in magic-free mode.

    Raises:
        ContractError: On mixed injection modes unless allowed.
        DimensionError: If the input or injection counts do not match the structure.

    """
    n, t = structure.n, structure.t
    injections = tuple(injections)
    if len(injections) != t:
        raise DimensionError(_('{t} injections are needed, got {c}').format(t=t, c=len(injections)))
    if _width(rho) != n:
        raise DimensionError(_('Input has {k} qubits, structure has {n}').format(
            k=_width(rho), n=n))
    mode = injection_mode(injections)
    if mode == MODE.MIXED:
        if not allow_mixed:
            raise ContractError(_('mixed injection modes: injections must be all T or all '
                                  'stabilizer states'))
        log.warning(_('Running mixed injection modes; outputs carry no correctness contract'))
    backend = select_backend(backend, rho, injections, behavior)
    _check_dense_width(backend, n, t, behavior)
    secrets, branches = _sources(rng, secrets, branches)
    session = ProtocolSession(n, behavior, secrets, branches, backend, probe)
    session.send_register(plain_register(rho, backend))
    b_prime = []
    for i, (layer, choice) in enumerate(zip(structure.layers[:-1], injections), 1):
        b_prime.append(session.inject(i, layer, choice))
        if communication == COMMUNICATION.BACK_AND_FORTH:
            session.send_register(session.return_register())
        else:
            session.keep_register()
    x = session.measure(structure.layers[-1])
    output = x + tuple(bit for bit, choice in zip(b_prime, injections) if not choice.is_magic)
    return MBDQCResult(output, mode, session.transcript, session.server.pre_measurement,
                       session.client.keys, b_prime)


def _register_distribution(register):
    if isinstance(register, StabilizerRegister):
        return stabilizer.z_distribution(register.state)
    probabilities = dense.z_distribution(register.state)
    k = register.state.k
    return {format(index, '0{k}b'.format(k=k)): float(p)
            for index, p in enumerate(probabilities) if p > BRANCH_EPSILON}


def _sample_all(register, branches):
    outcomes = []
    for q in range(register.k):
        bit, register = measure(register, q, branches)
        outcomes.append(bit)
    return tuple(outcomes), register


def _oracle_register(kind, circuit=None, choice=None, rho=None, structure=None, injections=()):
    injections = tuple(injections)
    if kind == RESOURCE.HIDDEN_MAGIC_GATE:
        backend = select_backend(BACKEND.AUTO, rho, [choice], None)
        register = plain_register(rho, backend).apply_circuit(circuit)
        if choice.is_magic:
            return register.apply_t(circuit.k - 1), backend
        ancilla = prepare_register([choice.value], backend)
        return register.append(ancilla).apply_circuit(injection_gadget(1, circuit.k)), backend
    if kind == RESOURCE.BLIND_MEASUREMENTS:
        backend = select_backend(BACKEND.AUTO, rho, [], None)
        return plain_register(rho, backend).apply_circuit(circuit), backend
    if kind == RESOURCE.MAGIC_BLIND_DQC:
        mode = injection_mode(injections)
        if mode == MODE.MIXED:
            raise ContractError(_('mixed injection modes have no ideal resource'))
        backend = select_backend(BACKEND.AUTO, rho, injections, None)
        register = plain_register(rho, backend)
        if mode == MODE.COMPUTATION:
            n = structure.n
            for layer in structure.layers[:-1]:
                register = register.apply_circuit(layer).apply_t(n - 1)
            return register.apply_circuit(structure.layers[-1]), backend
        register = register.append(prepare_register([c.value for c in injections], backend)) \
            if injections else register
        return register.apply_circuit(structure.flattened()), backend
    raise ContractError(_('Unknown resource "{k}"').format(k=kind))


def ideal_resource_oracle(kind, rng=None, branches=None, **inputs):
    """
    Sample the honest branch of an ideal resource directly.

    Args:
        kind (str): One of :data:`~magic_blind.app.models.RESOURCE`.
        rng (numpy.random.Generator): Measurement randomness.
        branches: Overrides the measurement randomness.
        inputs: ``circuit``, ``choice`` and ``rho`` for the hidden-magic gate and blind
            measurements; ``structure``, ``rho`` and ``injections`` for delegated computation.

    Returns:
        ``(register, b′)`` for the hidden-magic gate (b′ None for T), the bit tuple x for
        blind measurements, and the output bits for delegated computation.

    """
    branches = branches or SampledBranches(rng)
    register, _backend = _oracle_register(kind, **inputs)
    if kind == RESOURCE.HIDDEN_MAGIC_GATE:
        if inputs['choice'].is_magic:
            return register, None
        n = inputs['circuit'].k
        bit, register = measure(register, n, branches)
        return register.discard(n)[1], bit
    return _sample_all(register, branches)[0]


def ideal_distribution(kind, **inputs):
    """
    Exact output distribution of an ideal resource with a classical output.

    Returns:
        dict: Bit string to probability (Fractions on the stabilizer backend).

    """
    if kind == RESOURCE.HIDDEN_MAGIC_GATE:
        raise ContractError(_('The hidden-magic gate has a quantum output'))
    register, _backend = _oracle_register(kind, **inputs)
    return _register_distribution(register)


def protocol_distribution(structure, rho, injections, communication=COMMUNICATION.NO_BACK_AND_FORTH,
                          behavior=None, backend=BACKEND.AUTO, cap=KEY_BITS_CAP,
                          allow_mixed=False):
    """
    Exact output distribution of :func:`run_mbdqc`, averaged over every secret and branch.
    """
    n, t = structure.n, structure.t
    distribution = {}
    runs = 0
    for weight, values in enumerate_secrets(secret_bits(n, t, communication), cap):

        def run(branches, values=values):
            return run_mbdqc(structure, rho, injections, communication, behavior,
                             secrets=ScriptedSecrets(values), branches=branches,
                             backend=backend, allow_mixed=allow_mixed).output

        for branch_weight, output in enumerate_branches(run):
            key = ''.join(str(bit) for bit in output)
            distribution[key] = distribution.get(key, 0) + weight * branch_weight
            runs += 1
    log.debug(_('Enumerated {r} protocol runs').format(r=runs))
    return distribution


def total_variation(p, q):
    """Half the L1 distance of two distributions given as dicts."""
    return 0.5 * sum(abs(float(p.get(key, 0)) - float(q.get(key, 0))) for key in set(p) | set(q))


@dataclass
class ServerView:
    """
    Everything the Server holds after one protocol step, averaged over secrets and branches.

    Fields:
        public (str): The leaked Clifford structure and communication pattern.
        blocks (dict): Classical record (bit tuple) to the weighted density matrix of the
            held qubits.
        step (int): Transcript index the view was taken after.
        kind (str): Kind of the message at that step.
    """

    public: str
    blocks: dict
    step: int
    kind: str

    def density(self):
        """The view as one DensityMatrix: held qubits ⊗ diagonal classical record."""
        records = sorted(self.blocks)
        width = len(records[0]) if records else 0
        total = None
        for record in records:
            projector = np.zeros((2 ** width, 2 ** width))
            index = int(''.join(str(bit) for bit in record), 2) if width else 0
            projector[index, index] = 1
            term = np.kron(self.blocks[record], projector)
            total = term if total is None else total + term
        return dense.DensityMatrix(total)


def view_distance(v1, v2):
    """
    Trace distance of two server views; 1.0 when the public parts differ.
    """
    if v1.public != v2.public or v1.kind != v2.kind:
        return 1.0
    total = 0.0
    for record in set(v1.blocks) | set(v2.blocks):
        m1 = v1.blocks.get(record)
        m2 = v2.blocks.get(record)
        m1 = np.zeros_like(m2) if m1 is None else m1
        m2 = np.zeros_like(m1) if m2 is None else m2
        if m1.shape != m2.shape:
            return 1.0
        total += float(np.sum(np.linalg.svd(m1 - m2, compute_uv=False)))
    return 0.5 * total


def _classical_record(transcript):
    bits = []
    for _direction, message in transcript.entries:
        if isinstance(message, OutcomeBit):
            bits.append(message.b)
        elif isinstance(message, AngleMessage):
            bits.extend([int(message.delta) >> 1, int(message.delta) & 1])
        elif isinstance(message, OutcomeString):
            bits.extend(message.x)
    return tuple(bits)


def _public(structure, communication):
    return '{s}\n{c}'.format(s=structure.render(), c=communication)


def server_views(structure, rho, injections, communication=COMMUNICATION.NO_BACK_AND_FORTH,
                 cap=KEY_BITS_CAP, allow_mixed=False):
    """
    Exact honest-Server views after every protocol step.

    Returns:
        list: One :class:`ServerView` per transcript step.

    Raises:
        CapacityError: If the secrets of one session exceed ``cap`` bits.

    """
    n, t = structure.n, structure.t
    public = _public(structure, communication)
    steps = []
    kinds = []
    for weight, values in enumerate_secrets(secret_bits(n, t, communication), cap):

        def run(branches, values=values):
            snapshots = []

            def probe(session, message):
                held = session.server.register
                matrix = held.density_matrix().matrix if held is not None else np.ones((1, 1))
                snapshots.append((message.kind, _classical_record(session.transcript), matrix))

            run_mbdqc(structure, rho, injections, communication, Honest(),
                      secrets=ScriptedSecrets(values), branches=branches,
                      backend=BACKEND.DENSE, allow_mixed=allow_mixed, probe=probe)
            return snapshots

        for branch_weight, snapshots in enumerate_branches(run):
            scale = float(weight * branch_weight)
            for step, (kind, record, matrix) in enumerate(snapshots):
                if len(steps) <= step:
                    steps.append({})
                    kinds.append(kind)
                blocks = steps[step]
                blocks[record] = blocks.get(record, 0) + scale * matrix
    return [ServerView(public, blocks, step, kinds[step]) for step, blocks in enumerate(steps)]


def server_view(structure, rho, injections, step, communication=COMMUNICATION.NO_BACK_AND_FORTH,
                cap=KEY_BITS_CAP):
    """The exact Server view after one transcript step."""
    views = server_views(structure, rho, injections, communication, cap)
    if not 0 <= step < len(views):
        raise DimensionError(_('Step {s} is outside the {c}-step transcript').format(
            s=step, c=len(views)))
    return views[step]


@dataclass
class ReductionReport:
    """
    Result of comparing a unitary attack with its Pauli-mixture prediction.

    Fields:
        weights (list): ``(PauliString, weight)`` of the attack restricted to the Client wires.
        exact (dict): Key-averaged output distribution under the unitary.
        predicted (dict): ``Σ_E weight_E ·`` output distribution under the Pauli E.
        distance (float): Trace distance between the two.
        tolerance (float): Pass threshold.
    """

    weights: list
    exact: dict
    predicted: dict
    distance: float
    tolerance: float

    @property
    def passed(self):
        """True when the distance is below the tolerance."""
        return self.distance < self.tolerance


def pauli_reduction_check(structure, rho, injections, unitary, w_priv=0, point=FINAL,
                          communication=COMMUNICATION.NO_BACK_AND_FORTH, tolerance=1e-6,
                          cap=KEY_BITS_CAP):
    """
    Check that a unitary attack acts on the Client's outputs as a mixture of Pauli attacks.

    Args:
        structure (CliffordStructure): Public structure.
        rho: Input labels.
        injections (sequence): Injection choices.
        unitary (numpy.ndarray): Acts on the register wires at ``point`` followed by
            ``w_priv`` work wires.
        w_priv (int): Adversary work wires.
        point (tuple): Deviation point.
        communication (str): Communication pattern.
        tolerance (float): Largest accepted distance.
        cap (int): Secret enumeration cap.

    Returns:
        ReductionReport: Weights, both distributions and their distance.

    """
    m = structure.n if tuple(point) == FINAL else structure.n + 1
    weights = dense.pauli_decomposition(unitary, m, w_priv)
    exact = protocol_distribution(structure, rho, injections, communication,
                                  UnitaryDeviation({point: unitary}, w_priv), BACKEND.DENSE, cap)
    predicted = {}
    for e, weight in weights:
        if weight < 1e-15:
            continue
        part = protocol_distribution(structure, rho, injections, communication,
                                     PauliDeviation({point: e}), BACKEND.DENSE, cap)
        for key, probability in part.items():
            predicted[key] = predicted.get(key, 0.0) + weight * float(probability)
    distance = total_variation(exact, predicted)
    log.info(_('Pauli reduction check: distance={d}').format(d=distance))
    return ReductionReport(weights, exact, predicted, distance, tolerance)


def parse_injections(values):
    """InjectionChoice values from text or existing choices."""
    return tuple(v if isinstance(v, InjectionChoice) else InjectionChoice.parse(v) for v in values)
