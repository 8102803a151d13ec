"""
Experiment definitions: a JSON document validated by REST framework serializers.

Gate targets, trap sets and attacked slots are 1-based in experiment files and 0-based
in the objects built from them.
"""
from dataclasses import dataclass, field
from gettext import gettext as _
from typing import Any, Optional
import json

from magic_blind.app.settings import configure, default_caps

configure()

from rest_framework import serializers  # noqa: E402

from magic_blind.app.behaviors import (  # noqa: E402
    FINAL, NOISE, NOISE_KINDS, Honest, NoisyHonest,
    PauliDeviation, RoundTargeted, layer_point,
)
from magic_blind.app.bounds import DELTA_CONVENTION, DELTA_CONVENTIONS, BoundParams  # noqa: E402
from magic_blind.app.clifford import (  # noqa: E402
    GATE_KINDS, TWO_QUBIT_GATES, CliffordCircuit,
    CliffordGate, CliffordStructure,
)
from magic_blind.app.exceptions import ConfigError, MagicBlindError  # noqa: E402
from magic_blind.app.models import (  # noqa: E402
    BACKEND, BACKEND_CHOICES, COMMUNICATION,
    COMMUNICATION_CHOICES, MODE, InjectionChoice, injection_mode,
)
from magic_blind.app.pauli import ENUMERATION_CAP, PauliString, SinglePauliLabel  # noqa: E402
from magic_blind.app.traps import (  # noqa: E402
    COMPILABLE_GATES, COVERAGE, EXACT_COLORING_CAP, MERGE, MERGE_CHOICES,
    broadbent_compile, explicit_family, merge_traps, singleton_family,
)
from magic_blind.app.verifier import (  # noqa: E402
    ROUND_MODEL, ROUND_MODELS, SyntheticComputation,
    VerificationConfig, VerificationParams,
)


FAMILY_KINDS = ('singleton', 'explicit', 'merged')
BEHAVIOR_KINDS = ('honest', 'pauli', 'noisy', 'targeted')
INJECTION_MODES = (MODE.COMPUTATION, MODE.MAGIC_FREE)
SEED_MAX = (1 << 64) - 1


class PauliField(serializers.CharField):
    """
    A Pauli string in compact form, e.g. ``"-XIZ"``.
    """

    default_error_messages = {
        'invalid_pauli': _('"{value}" is not a Pauli string.'),
    }

    def to_internal_value(self, data):
        """Parse into a PauliString."""
        text = super().to_internal_value(data)
        try:
            return PauliString.parse(text)
        except MagicBlindError:
            self.fail('invalid_pauli', value=text)

    def to_representation(self, value):
        """Compact form."""
        return str(value)


class LabelField(serializers.Field):
    """
    A single-qubit state: a stabilizer label such as ``"+X"``, a computational-basis bit,
    or ``"T"`` where magic states are allowed.
    """

    default_error_messages = {
        'invalid_label': _('"{value}" is not a state label.'),
    }

    def __init__(self, allow_magic=False, **kwargs):
        """Choose whether ``"T"`` is accepted."""
        self.allow_magic = allow_magic
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        """A SinglePauliLabel, or an InjectionChoice when magic states are allowed."""
        if data in (0, 1) and not isinstance(data, bool):
            label = SinglePauliLabel('Z', 1 if data == 0 else -1)
            return InjectionChoice(label) if self.allow_magic else label
        if not isinstance(data, str):
            self.fail('invalid_label', value=data)
        try:
            if self.allow_magic:
                return InjectionChoice.parse(data)
            return SinglePauliLabel.parse(data)
        except MagicBlindError:
            self.fail('invalid_label', value=data)

    def to_representation(self, value):
        """Text form."""
        return str(value)


class GateField(serializers.Field):
    """
    One Clifford gate: ``{"kind": "CNOT", "targets": [1, 2]}`` or ``["CNOT", 1, 2]``.
    """

    kinds = GATE_KINDS

    default_error_messages = {
        'invalid_gate': _('{value} is not a gate record.'),
        'unknown_kind': _('Unknown gate "{kind}".'),
        'arity': _('Gate {kind} needs {arity} distinct targets >= 1.'),
    }

    def parse_record(self, data):
        """``(kind, 0-based targets)`` of a gate record."""
        if isinstance(data, dict):
            kind, targets = data.get('kind'), data.get('targets')
        elif isinstance(data, (list, tuple)) and data:
            kind, targets = data[0], list(data[1:])
        else:
            self.fail('invalid_gate', value=data)
        if kind not in self.kinds:
            self.fail('unknown_kind', kind=kind)
        arity = 2 if kind in TWO_QUBIT_GATES else 1
        if (not isinstance(targets, (list, tuple)) or len(targets) != arity
                or len(set(targets)) != arity
                or not all(isinstance(q, int) and q >= 1 for q in targets)):
            self.fail('arity', kind=kind, arity=arity)
        return kind, [q - 1 for q in targets]

    def to_internal_value(self, data):
        """A CliffordGate with 0-based targets."""
        kind, targets = self.parse_record(data)
        return CliffordGate(kind, *targets)

    def to_representation(self, value):
        """Record form with 1-based targets."""
        return {'kind': value.kind, 'targets': [q + 1 for q in value.targets]}


class CircuitGateField(GateField):
    """
    One gate of a circuit to compile: H, S, CNOT or T.
    """

    kinds = COMPILABLE_GATES

    def to_internal_value(self, data):
        """A ``(kind, *targets)`` tuple with 0-based targets."""
        kind, targets = self.parse_record(data)
        return (kind,) + tuple(targets)

    def to_representation(self, value):
        """Record form with 1-based targets."""
        return {'kind': value[0], 'targets': [q + 1 for q in value[1:]]}


class StructureSerializer(serializers.Serializer):
    """
    The public Clifford structure: explicit layers, or a circuit over H, S, CNOT and T
    compiled into layers with one T per layer boundary.
    """

    n = serializers.IntegerField(min_value=1, help_text=_('Input qubits'))
    t = serializers.IntegerField(min_value=0, required=False, help_text=_('Injections'))
    layers = serializers.ListField(
        child=serializers.ListField(child=GateField(), allow_empty=True),
        required=False,
        help_text=_('t+1 gate lists on n wires'),
    )
    circuit = serializers.ListField(
        child=CircuitGateField(),
        required=False,
        help_text=_('Gates over H, S, CNOT and T, compiled into layers'),
    )

    def validate(self, data):
        """Check the layer count and that every target is a wire."""
        n = data['n']
        if 'circuit' in data:
            if 'layers' in data or 't' in data:
                raise serializers.ValidationError(
                    {'circuit': [_('Give either a circuit or t and layers.')]})
            if any(max(gate[1:]) >= n for gate in data['circuit']):
                raise serializers.ValidationError(
                    {'circuit': [_('A gate targets a wire above n={n}.').format(n=n)]})
            compiled = broadbent_compile(data['circuit'], n)
            data['t'] = compiled.t
            data['layers'] = [list(layer.gates) for layer in compiled.layers]
            return data
        if 'layers' not in data or 't' not in data:
            raise serializers.ValidationError(
                {'layers': [_('Give t and layers, or a circuit.')]})
        t, layers = data['t'], data['layers']
        if len(layers) != t + 1:
            raise serializers.ValidationError(
                {'layers': [_('Expected {c} layers for t={t}, got {l}.').format(
                    c=t + 1, t=t, l=len(layers))]})
        errors = {}
        for index, layer in enumerate(layers):
            for gate in layer:
                if max(gate.targets) >= n:
                    errors.setdefault(str(index), []).append(
                        _('{g} targets a wire above n={n}.').format(g=gate, n=n))
        if errors:
            raise serializers.ValidationError({'layers': errors})
        return data


class InjectionsSerializer(serializers.Serializer):
    """
    Computation mode, or magic-free mode with explicit stabilizer labels.
    """

    mode = serializers.ChoiceField(choices=INJECTION_MODES, default=MODE.COMPUTATION)
    labels = serializers.ListField(child=LabelField(allow_magic=True), required=False)

    def validate(self, data):
        """Labels must agree with the mode; mixed lists are checked with allow_mixed."""
        labels = data.get('labels', [])
        if labels and injection_mode(labels) == MODE.MIXED:
            return data
        if data['mode'] == MODE.COMPUTATION and any(not choice.is_magic for choice in labels):
            raise serializers.ValidationError(
                {'labels': [_('Computation mode only injects T.')]})
        if data['mode'] == MODE.MAGIC_FREE and any(choice.is_magic for choice in labels):
            raise serializers.ValidationError(
                {'labels': [_('Magic-free mode needs stabilizer labels.')]})
        return data


class VerificationSerializer(serializers.Serializer):
    """
    Round counts, tolerance and the computation-round model.
    """

    d = serializers.IntegerField(min_value=1)
    s = serializers.IntegerField(min_value=0)
    w = serializers.IntegerField(min_value=0)
    z_star = serializers.ChoiceField(choices=(0, 1), required=False, allow_null=True)
    round_model = serializers.ChoiceField(choices=ROUND_MODELS, default=ROUND_MODEL.REDUCED)
    c = serializers.FloatField(min_value=0, required=False, allow_null=True,
                               help_text=_('Bias of a synthetic computation'))

    def validate(self, data):
        """w must not exceed s; a synthetic computation needs c < 1/2 and z*."""
        if data['w'] > data['s']:
            raise serializers.ValidationError({'w': [_('w must not exceed s.')]})
        if data.get('c') is not None:
            if data['c'] >= 0.5:
                raise serializers.ValidationError({'c': [_('c must be below 1/2.')]})
            if data.get('z_star') is None:
                raise serializers.ValidationError(
                    {'z_star': [_('A synthetic computation needs z_star.')]})
            if data['round_model'] != ROUND_MODEL.REDUCED:
                raise serializers.ValidationError(
                    {'round_model': [_('A synthetic computation needs the reduced model.')]})
        return data


class FamilySerializer(serializers.Serializer):
    """
    Which traps test rounds use.
    """

    kind = serializers.ChoiceField(choices=FAMILY_KINDS, default='singleton')
    sets = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=1),
        required=False,
    )
    strategy = serializers.ChoiceField(choices=MERGE_CHOICES, default=MERGE.GREEDY)

    def validate(self, data):
        """Explicit families need their sets."""
        if data['kind'] == 'explicit' and not data.get('sets'):
            raise serializers.ValidationError({'sets': [_('An explicit family needs sets.')]})
        return data


class BehaviorSerializer(serializers.Serializer):
    """
    The Server's behavior; Paulis act on the n+t outputs.
    """

    kind = serializers.ChoiceField(choices=BEHAVIOR_KINDS, default='honest')
    pauli = PauliField(required=False)
    p_err = serializers.FloatField(min_value=0, max_value=1, default=0.0)
    noise = serializers.ChoiceField(choices=NOISE_KINDS, default=NOISE.UNIFORM_HARMFUL)
    p = serializers.FloatField(min_value=0, max_value=1, required=False)
    slots = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False)

    def validate(self, data):
        """Each kind needs its own parameters."""
        needs_pauli = data['kind'] in ('pauli', 'targeted') or (
            data['kind'] == 'noisy' and data['noise'] == NOISE.FIXED_PAULI)
        if needs_pauli and 'pauli' not in data:
            raise serializers.ValidationError({'pauli': [_('This behavior needs a Pauli.')]})
        if data['kind'] == 'targeted' and 'slots' not in data:
            raise serializers.ValidationError({'slots': [_('A targeted behavior needs slots.')]})
        if (data['kind'] == 'noisy' and data['noise'] == NOISE.PER_QUBIT_DEPOLARIZING
                and 'p' not in data):
            raise serializers.ValidationError({'p': [_('Depolarizing noise needs p.')]})
        return data


class BoundsSerializer(serializers.Serializer):
    """
    Extra parameters of the analytic bounds.
    """

    c = serializers.FloatField(min_value=0, default=0.0)
    p_err = serializers.FloatField(min_value=0, max_value=1, default=0.0)
    k = serializers.IntegerField(min_value=1, required=False)
    delta_convention = serializers.ChoiceField(choices=DELTA_CONVENTIONS,
                                               default=DELTA_CONVENTION.RANGE)

    def validate_c(self, value):
        """c < 1/2."""
        if value >= 0.5:
            raise serializers.ValidationError(_('c must be below 1/2.'))
        return value


class SweepSerializer(serializers.Serializer):
    """
    Attacked-round counts and the Pauli of an adversary sweep.
    """

    m_grid = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=1)
    pauli = PauliField()


class CaseSerializer(serializers.Serializer):
    """
    One input/injection pair compared by the blindness check.
    """

    input = serializers.ListField(child=LabelField())
    injections = serializers.ListField(child=LabelField(allow_magic=True), required=False)


class BlindnessSerializer(serializers.Serializer):
    """
    Cases sharing the structure whose Server views must coincide.
    """

    cases = serializers.ListField(child=CaseSerializer(), min_length=2)


class ReductionSerializer(serializers.Serializer):
    """
    Random adversary unitaries for the Pauli-reduction check.
    """

    count = serializers.IntegerField(min_value=1, default=20)
    w_priv = serializers.IntegerField(min_value=0, max_value=2, default=1)
    point = serializers.ChoiceField(choices=('final', 'layer'), default='final')


class TwirlSerializer(serializers.Serializer):
    """
    Width of the exhaustive twirl check.
    """

    k = serializers.IntegerField(min_value=1, max_value=3, default=2)


class ExperimentSerializer(serializers.Serializer):
    """
    A complete experiment definition.
    """

    structure = StructureSerializer()
    input = serializers.ListField(child=LabelField(), min_length=1,
                                  help_text=_('n stabilizer labels or basis bits'))
    injections = InjectionsSerializer(required=False)
    communication = serializers.ChoiceField(choices=COMMUNICATION_CHOICES,
                                            default=COMMUNICATION.NO_BACK_AND_FORTH)
    backend = serializers.ChoiceField(choices=BACKEND_CHOICES, default=BACKEND.AUTO)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, default=0)
    trials = serializers.IntegerField(min_value=1, default=1)
    allow_mixed = serializers.BooleanField(default=False)
    verification = VerificationSerializer(required=False)
    family = FamilySerializer(required=False)
    behavior = BehaviorSerializer(required=False)
    bounds = BoundsSerializer(required=False)
    sweep = SweepSerializer(required=False)
    blindness = BlindnessSerializer(required=False)
    reduction = ReductionSerializer(required=False)
    twirl = TwirlSerializer(required=False)
    caps = serializers.DictField(child=serializers.IntegerField(min_value=1), required=False)

    def validate_caps(self, value):
        """Only the enumeration caps can be lowered."""
        unknown = sorted(set(value) - set(default_caps()))
        if unknown:
            raise serializers.ValidationError(_('Unknown caps: {u}.').format(u=', '.join(unknown)))
        return value

    def validate(self, data):
        """Cross-field checks: widths, injection count and every index against n+t and N."""
        n, t = data['structure']['n'], data['structure']['t']
        k = n + t
        errors = {}
        if len(data['input']) != n:
            errors['input'] = [_('Expected {n} labels, got {c}.').format(n=n, c=len(data['input']))]
        labels = data.get('injections', {}).get('labels', [])
        if labels and len(labels) != t:
            errors['injections'] = {'labels': [_('Expected {t} labels, got {c}.').format(
                t=t, c=len(labels))]}
        if data.get('injections', {}).get('mode') == MODE.MAGIC_FREE and not labels and t:
            errors['injections'] = {'labels': [_('Magic-free mode needs {t} labels.').format(t=t)]}
        if labels and injection_mode(labels) == MODE.MIXED and not data['allow_mixed']:
            errors['injections'] = {'labels': [_('mixed injection modes are not allowed.')]}
        behavior = data.get('behavior', {})
        if 'pauli' in behavior and behavior['pauli'].k != k:
            errors['behavior'] = {'pauli': [_('Expected {k} factors, got {c}.').format(
                k=k, c=behavior['pauli'].k)]}
        for index, Q in enumerate(data.get('family', {}).get('sets', [])):
            if max(Q) > k:
                errors.setdefault('family', {}).setdefault('sets', {})[str(index)] = [
                    _('Index {q} exceeds n+t={k}.').format(q=max(Q), k=k)]
        if 'sweep' in data and data['sweep']['pauli'].k != k:
            errors['sweep'] = {'pauli': [_('Expected {k} factors.').format(k=k)]}
        verification = data.get('verification')
        if verification:
            N = verification['d'] + verification['s']
            for name, values in (('sweep', data.get('sweep', {}).get('m_grid', [])),
                                 ('behavior', behavior.get('slots', []))):
                if values and max(values) > N:
                    errors.setdefault(name, {})['slots' if name == 'behavior' else 'm_grid'] = [
                        _('Value {v} exceeds N={N}.').format(v=max(values), N=N)]
        for index, case in enumerate(data.get('blindness', {}).get('cases', [])):
            if len(case['input']) != n or len(case.get('injections', [])) != t:
                errors.setdefault('blindness', {}).setdefault('cases', {})[str(index)] = [
                    _('Each case needs {n} inputs and {t} injections.').format(n=n, t=t)]
        if errors:
            raise serializers.ValidationError(errors)
        return data


def flatten_errors(errors, prefix=''):
    """
    Turn ``serializer.errors`` into ``'field.path: message'`` strings.
    """
    flat = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            key = str(key)
            path = key if not prefix else ('{p}.{k}'.format(p=prefix, k=key)
                                           if key != 'non_field_errors' else prefix)
            flat.extend(flatten_errors(value, path))
    elif isinstance(errors, (list, tuple)):
        for index, value in enumerate(errors):
            if isinstance(value, (dict, list)):
                flat.extend(flatten_errors(value, '{p}.{i}'.format(p=prefix, i=index)))
            else:
                flat.append('{p}: {m}'.format(p=prefix or 'config', m=value))
    else:
        flat.append('{p}: {m}'.format(p=prefix or 'config', m=errors))
    return flat


@dataclass
class ExperimentConfig:
    """
    A validated experiment.

    Fields:
        structure (CliffordStructure): Public structure.
        rho (list): Input labels.
        injections (tuple): InjectionChoice per layer boundary.
        communication (str): Communication pattern.
        backend (str): Requested backend.
        seed (int): Master seed.
        trials (int): Trial count.
        allow_mixed (bool): Allow mixed injection modes in simulate.
        verification (dict): Validated verification section, if any.
        family_spec (dict): Trap family section.
        behavior_spec (dict): Behavior section.
        bounds (dict): Bounds section.
        sweep (dict): Adversary sweep section, if any.
        blindness (dict): Blindness cases, if any.
        reduction (dict): Reduction-check section.
        twirl (dict): Twirl-check section.
        caps (dict): Enumeration caps, the defaults with the document's overrides.
        echo (dict): The document as read.
    """

    structure: CliffordStructure
    rho: list
    injections: tuple
    communication: str = COMMUNICATION.NO_BACK_AND_FORTH
    backend: str = BACKEND.AUTO
    seed: int = 0
    trials: int = 1
    allow_mixed: bool = False
    verification: Optional[dict] = None
    family_spec: dict = field(default_factory=dict)
    behavior_spec: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    sweep: Optional[dict] = None
    blindness: Optional[dict] = None
    reduction: dict = field(default_factory=dict)
    twirl: dict = field(default_factory=dict)
    caps: dict = field(default_factory=dict)
    echo: Any = None

    @property
    def n(self):
        """Input width."""
        return self.structure.n

    @property
    def t(self):
        """Injection count."""
        return self.structure.t

    @property
    def mode(self):
        """Computation, magic-free or mixed."""
        return injection_mode(self.injections)

    def behavior(self):
        """The configured ServerBehavior."""
        spec = self.behavior_spec
        kind = spec.get('kind', 'honest')
        if kind == 'pauli':
            return PauliDeviation.from_output_pauli(spec['pauli'], self.n, self.t)
        if kind == 'noisy':
            return NoisyHonest(spec['p_err'], spec['noise'], spec.get('pauli'), spec.get('p'))
        if kind == 'targeted':
            return RoundTargeted(spec['pauli'], [slot - 1 for slot in spec['slots']])
        return Honest()

    def family(self):
        """The trap family, or its merge plan."""
        spec = self.family_spec
        if spec.get('sets'):
            family = explicit_family(self.structure, spec['sets'])
        else:
            family = singleton_family(self.structure)
        if spec.get('kind') == 'merged':
            return merge_traps(family, spec.get('strategy', MERGE.GREEDY),
                               self.caps.get('exact_coloring', EXACT_COLORING_CAP))
        return family

    def coverage_mode(self):
        """Exhaustive when the output width allows it."""
        if self.structure.k <= self.caps.get('pauli', ENUMERATION_CAP):
            return COVERAGE.EXHAUSTIVE
        return COVERAGE.SINGLETON_PROOF

    def verification_params(self, seed=None):
        """VerificationParams of the verification section."""
        v = self.verification
        return VerificationParams(v['d'], v['s'], v['w'], self.seed if seed is None else seed)

    def verification_config(self, seed=None, behavior=None):
        """The VerificationConfig of this experiment."""
        v = self.verification
        computation = None
        if v.get('c') is not None:
            computation = SyntheticComputation(v['c'], v['z_star'])
        return VerificationConfig(
            structure=self.structure,
            rho=self.rho,
            params=self.verification_params(seed),
            family=self.family(),
            behavior=behavior or self.behavior(),
            z_star=v.get('z_star'),
            computation=computation,
            round_model=v['round_model'],
            communication=self.communication,
            backend=self.backend,
        )

    def bound_params(self, delta_convention=None):
        """BoundParams from the verification and bounds sections."""
        v = self.verification
        b = self.bounds
        return BoundParams(
            d=v['d'], s=v['s'], w=v['w'], k=b.get('k') or self.structure.k,
            c=b.get('c', 0.0) if v.get('c') is None else v['c'], p_err=b.get('p_err', 0.0),
            delta_convention=delta_convention or b.get('delta_convention', DELTA_CONVENTION.RANGE),
        )

    def deviation_point(self):
        """Where reduction-check unitaries act."""
        return FINAL if self.reduction.get('point', 'final') == 'final' else layer_point(1)


def _line_column(error):
    return _('line {l} column {c}: {m}').format(l=error.lineno, c=error.colno, m=error.msg)


def parse_config(text):
    """
    Parse and validate an experiment definition.

    Args:
        text (str): The JSON document.

    Returns:
        ExperimentConfig: The validated experiment.

    Raises:
        ConfigError: With every schema violation, or the JSON syntax error position.

    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError(['json: {e}'.format(e=_line_column(error))])
    if not isinstance(data, dict):
        raise ConfigError([_('config: Expected a JSON object.')])
    serializer = ExperimentSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError(flatten_errors(serializer.errors))
    valid = serializer.validated_data
    structure_data = valid['structure']
    n, t = structure_data['n'], structure_data['t']
    structure = CliffordStructure(n, t, [CliffordCircuit(n, layer)
                                         for layer in structure_data['layers']])
    injections = valid.get('injections', {})
    labels = injections.get('labels') or []
    if injections.get('mode', MODE.COMPUTATION) == MODE.COMPUTATION and not labels:
        labels = [InjectionChoice(InjectionChoice.T)] * t
    return ExperimentConfig(
        structure=structure,
        rho=list(valid['input']),
        injections=tuple(labels),
        communication=valid['communication'],
        backend=valid['backend'],
        seed=valid['seed'],
        trials=valid['trials'],
        allow_mixed=valid['allow_mixed'],
        verification=valid.get('verification'),
        family_spec=valid.get('family', {}),
        behavior_spec=valid.get('behavior', {}),
        bounds=valid.get('bounds', {}),
        sweep=valid.get('sweep'),
        blindness=valid.get('blindness'),
        reduction=valid.get('reduction', {}),
        twirl=valid.get('twirl', {}),
        caps=dict(default_caps(), **valid.get('caps', {})),
        echo=data,
    )
