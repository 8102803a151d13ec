"""
Verified delegated computation: interleaved computation and test rounds, a trap check
against a failure threshold, and a majority vote over the computation rounds.

Rounds run either through the full protocol engine (``round_model='protocol'``) or
through the reduced model, where a round's deviation is its Pauli on the n+t outputs:
a test round fails iff a trap of its group detects that Pauli, and a computation round
is corrupted whenever the Pauli is harmful.
"""
from collections import Counter
from dataclasses import dataclass, field
from gettext import gettext as _
from types import SimpleNamespace
from typing import Any, List, Optional
import logging
import math

import numpy as np
from scipy import stats

from magic_blind.app import rng as rngs
from magic_blind.app.behaviors import Honest, RoundTargeted, attacked, harmful_output
from magic_blind.app.bounds import BoundParams, security_error
from magic_blind.app.exceptions import ContractError
from magic_blind.app.models import BACKEND, COMMUNICATION, RESOURCE, InjectionChoice
from magic_blind.app.pauli import is_harmful
from magic_blind.app.protocol import ideal_distribution, run_mbdqc, server_views, \
    view_distance
from magic_blind.app.traps import MergePlan, TrapFamily, group_detects, parity, \
    singleton_groups


log = logging.getLogger(__name__)


ROUND_MODEL = SimpleNamespace(
    PROTOCOL='protocol',
    REDUCED='reduced',
)
ROUND_MODELS = (ROUND_MODEL.PROTOCOL, ROUND_MODEL.REDUCED)

ROUND_KIND = SimpleNamespace(COMPUTATION='computation', TEST='test')

CSV_COLUMNS = ('trial', 'verdict', 'decision_bit', 'trap_failures', 'wrong', 'attacked_rounds')


@dataclass(frozen=True)
class VerificationParams:
    """
    Round counts and the trap-failure tolerance.

    Fields:
        d (int): Computation rounds.
        s (int): Test rounds.
        w (int): Tolerated trap failures; a run is rejected at ``max(w, 1)`` failures.
        seed (int): 64-bit master seed.
    """

    d: int
    s: int
    w: int
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.s < 0:
            raise ContractError(_('Need d >= 1 and s >= 0, got d={d} s={s}').format(
                d=self.d, s=self.s))
        if not 0 <= self.w <= self.s:
            raise ContractError(_('Need 0 <= w <= s, got w={w} s={s}').format(w=self.w, s=self.s))

    @property
    def N(self):
        """Total rounds."""
        return self.d + self.s

    @property
    def threshold(self):
        """Failures at which the run is rejected."""
        return max(self.w, 1)


@dataclass
class RoundPlan:
    """
    Where each logical round runs and which trap group each test round uses.

    Logical rounds ``0..d-1`` are computation rounds, ``d..N-1`` test rounds.

    Fields:
        sigma (numpy.ndarray): Logical round to 0-based physical slot.
        trap_choice (list): Group index per test round.
        d (int): Computation rounds.
    """

    sigma: np.ndarray
    trap_choice: List[int]
    d: int

    def slots(self):
        """
        Per physical slot: ``(kind, group index or None)``.
        """
        table = [None] * len(self.sigma)
        for logical, slot in enumerate(self.sigma):
            if logical < self.d:
                table[int(slot)] = (ROUND_KIND.COMPUTATION, None)
            else:
                table[int(slot)] = (ROUND_KIND.TEST, self.trap_choice[logical - self.d])
        return table


@dataclass(frozen=True)
class Verdict:
    """
    Accept with a decision bit, or reject.

    Fields:
        accepted (bool): Whether the run was accepted.
        z (int): Decision bit when accepted, else None.
    """

    accepted: bool
    z: Optional[int] = None

    @classmethod
    def accept(cls, z):
        """Accept(z)."""
        return cls(True, int(z))

    @classmethod
    def reject(cls):
        """Reject."""
        return cls(False, None)

    def __str__(self):
        return 'accept({z})'.format(z=self.z) if self.accepted else 'reject'


class SyntheticComputation:
    """
    A computation whose decision bit equals ``z_star`` with probability ``1 − c``.
    """

    def __init__(self, c, z_star):
        """Check c < 1/2."""
        if not 0 <= c < 0.5:
            raise ContractError(_('Synthetic computations need 0 <= c < 1/2, got {c}').format(c=c))
        self.c = float(c)
        self.z_star = int(z_star)

    def p_one(self):
        """Probability of a 1."""
        return self.c if self.z_star == 0 else 1 - self.c

    def __repr__(self):
        return 'SyntheticComputation(c={c}, z_star={z})'.format(c=self.c, z=self.z_star)


@dataclass
class VerificationConfig:
    """
    Everything one verification experiment needs.

    Fields:
        structure (CliffordStructure): Public structure.
        rho (list): Input labels of the computation.
        params (VerificationParams): Round counts, threshold and seed.
        family: TrapFamily or MergePlan the test rounds draw from.
        behavior (ServerBehavior): Server behavior, turned into per-round behaviors.
        z_star (int): Known correct decision bit, if any.
        computation (SyntheticComputation): Replaces the honest computation output.
        round_model (str): ``'protocol'`` or ``'reduced'``.
        communication (str): Communication pattern of every round.
        backend (str): Backend of protocol-model rounds.
    """

    structure: Any
    rho: list
    params: VerificationParams
    family: Any
    behavior: Any = field(default_factory=Honest)
    z_star: Optional[int] = None
    computation: Optional[SyntheticComputation] = None
    round_model: str = ROUND_MODEL.REDUCED
    communication: str = COMMUNICATION.NO_BACK_AND_FORTH
    backend: str = BACKEND.AUTO

    def __post_init__(self):
        if self.round_model not in ROUND_MODELS:
            raise ContractError(_('Unknown round model "{m}"').format(m=self.round_model))
        if self.computation is not None:
            if self.round_model != ROUND_MODEL.REDUCED:
                raise ContractError(_('Synthetic computations need the reduced round model'))
            if self.z_star is None:
                self.z_star = self.computation.z_star
        self._p_one = None

    @property
    def groups(self):
        """Test-round units: the groups of a merge plan, or singleton groups of a family."""
        if isinstance(self.family, MergePlan):
            return list(self.family)
        if isinstance(self.family, TrapFamily):
            return list(singleton_groups(self.family))
        return list(self.family)

    @property
    def injections(self):
        """Computation rounds inject T everywhere."""
        return [InjectionChoice(InjectionChoice.T)] * self.structure.t

    def honest_p_one(self):
        """Probability that an honest computation round outputs 1."""
        if self.computation is not None:
            return self.computation.p_one()
        if self._p_one is None:
            distribution = ideal_distribution(RESOURCE.MAGIC_BLIND_DQC, structure=self.structure,
                                              rho=self.rho, injections=self.injections)
            self._p_one = float(sum(p for bits, p in distribution.items() if bits[0] == '1'))
        return self._p_one

    def honest_error(self):
        """Probability that an honest computation round misses z*."""
        p_one = self.honest_p_one()
        return 1 - p_one if self.z_star == 1 else p_one


def plan_rounds(params, groups, rng):
    """
    Draw the permutation of rounds and a uniform trap group for every test round.

    Raises:
        ContractError: If there are test rounds but no trap groups.

    """
    if params.s and not len(groups):
        raise ContractError(_('Test rounds need a nonempty trap family'))
    sigma = rng.permutation(params.N)
    choice = [int(g) for g in rng.integers(len(groups), size=params.s)] if params.s else []
    return RoundPlan(sigma, choice, params.d)


def majority(bits):
    """1 iff more than half the bits are 1."""
    return int(sum(bits) > len(bits) / 2)


def _protocol_round(config, kind, group, behavior, rng):
    structure = config.structure
    if kind == ROUND_KIND.TEST:
        injections = [InjectionChoice(label) for label in group.injections]
        output = run_mbdqc(structure, list(group.rho_labels), injections, config.communication,
                           behavior, rng=rng, backend=config.backend).output
        return any(parity(output, trap.Q) for trap in group.traps)
    output = run_mbdqc(structure, config.rho, config.injections, config.communication, behavior,
                       rng=rng, backend=config.backend).output
    return output[0]


def _reduced_round(config, kind, group, behavior, rng):
    n, t = config.structure.n, config.structure.t
    e = behavior.output_pauli(n, t)
    if kind == ROUND_KIND.TEST:
        return e is not None and group_detects(group, e)
    if harmful_output(behavior, n, t):
        if config.z_star is None:
            raise ContractError(_('The reduced round model needs a known z*'))
        return 1 - config.z_star
    return int(rng.random() < config.honest_p_one())


def run_verified_dqc(config, trial=0, behavior=None):
    """
    One verification run.

    Args:
        config (VerificationConfig): The experiment.
        trial (int): Trial counter; selects the random streams.
        behavior (ServerBehavior): Overrides the configured behavior.

    Returns:
        tuple: ``(Verdict, row)`` where row is a dict keyed by :data:`CSV_COLUMNS` plus
            ``flips``, the physical slots of failed test rounds.

    """
    params = config.params
    behavior = behavior or config.behavior
    groups = config.groups
    n, t = config.structure.n, config.structure.t
    plan = plan_rounds(params, groups, rngs.stream(params.seed, 'plan', trial))
    play = _protocol_round if config.round_model == ROUND_MODEL.PROTOCOL else _reduced_round
    outputs = []
    flips = []
    attacked_rounds = 0
    for slot, (kind, choice) in enumerate(plan.slots()):
        round_rng = rngs.stream(params.seed, 'round', trial, slot)
        round_behavior = behavior.for_round(slot, round_rng, n, t)
        attacked_rounds += attacked(round_behavior)
        group = groups[choice] if kind == ROUND_KIND.TEST else None
        result = play(config, kind, group, round_behavior, round_rng)
        if kind == ROUND_KIND.TEST:
            if result:
                flips.append(slot)
        else:
            outputs.append(int(result))
    failures = len(flips)
    if failures >= params.threshold:
        verdict = Verdict.reject()
    else:
        verdict = Verdict.accept(majority(outputs))
    wrong = int(verdict.accepted and config.z_star is not None and verdict.z != config.z_star)
    row = {
        'trial': trial,
        'verdict': 'accept' if verdict.accepted else 'reject',
        'decision_bit': '' if verdict.z is None else verdict.z,
        'trap_failures': failures,
        'wrong': wrong,
        'attacked_rounds': attacked_rounds,
        'flips': flips,
    }
    return verdict, row


def _rate(count, trials):
    p = count / trials
    return p, math.sqrt(p * (1 - p) / trials)


@dataclass
class RunStats:
    """
    Aggregated verification runs.

    Fields:
        rows (list): Per-trial rows.
        trials (int): Number of runs.
        accept_count (int): Accepted runs.
        accept_and_wrong_count (int): Accepted runs with a wrong decision bit.
        trap_failure_histogram (Counter): Failed test rounds per trial.
    """

    rows: list = field(default_factory=list)
    trials: int = 0
    accept_count: int = 0
    accept_and_wrong_count: int = 0
    trap_failure_histogram: Counter = field(default_factory=Counter)

    def add(self, verdict, row):
        """Count one run."""
        self.rows.append(row)
        self.trials += 1
        self.accept_count += int(verdict.accepted)
        self.accept_and_wrong_count += row['wrong']
        self.trap_failure_histogram[row['trap_failures']] += 1

    def flip_log(self):
        """``(trial, slot)`` for every failed test round."""
        return [(row['trial'], slot) for row in self.rows for slot in row['flips']]

    @property
    def accept_rate(self):
        """``(rate, standard error)``."""
        return _rate(self.accept_count, self.trials)

    @property
    def reject_rate(self):
        """``(rate, standard error)``."""
        return _rate(self.trials - self.accept_count, self.trials)

    @property
    def accept_and_wrong_rate(self):
        """``(rate, standard error)``."""
        return _rate(self.accept_and_wrong_count, self.trials)

    def csv_rows(self):
        """Rows as lists in :data:`CSV_COLUMNS` order."""
        return [[row[column] for column in CSV_COLUMNS] for row in self.rows]

    def summary(self):
        """Rates with standard errors and the failure histogram."""
        summary = {'trials': self.trials}
        for name in ('accept_rate', 'reject_rate', 'accept_and_wrong_rate'):
            rate, stderr = getattr(self, name)
            summary[name] = {'value': rate, 'stderr': stderr}
        summary['trap_failure_histogram'] = {
            str(failures): count for failures, count in sorted(self.trap_failure_histogram.items())}
        return summary


def monte_carlo(config, trials):
    """
    Independent seeded runs of :func:`run_verified_dqc`.

    Raises:
        ContractError: If trials < 1.

    """
    if trials < 1:
        raise ContractError(_('Need at least one trial, got {t}').format(t=trials))
    run = RunStats()
    for trial in range(trials):
        run.add(*run_verified_dqc(config, trial))
    log.info(_('Monte Carlo: {a}/{t} accepted, {w} accepted and wrong').format(
        a=run.accept_count, t=trials, w=run.accept_and_wrong_count))
    return run


@dataclass
class SweepRow:
    """
    One attacked-round count of an adversary sweep.

    Fields:
        m (int): Attacked physical rounds.
        empirical (float): Accept-and-wrong rate.
        stderr (float): Its standard error.
        exact (float): Exact accept-and-wrong probability under the reduced model.
        envelope (float): The security error bound.
    """

    m: int
    empirical: float
    stderr: float
    exact: float
    envelope: float

    def as_list(self):
        """CSV form."""
        return [self.m, self.empirical, self.stderr, self.exact, self.envelope]


def exact_attack_probability(config, e, m):
    """
    Exact probability of accept-and-wrong when e hits m uniformly chosen slots.

    j of the attacked slots are test rounds (hypergeometric); each attacked test round
    fails with the fraction q of groups that detect e; the remaining m − j attacked
    computation rounds are wrong when e is harmful, and the others err with the honest
    error c.
    """
    params = config.params
    d, s, N = params.d, params.s, params.N
    groups = config.groups
    harmful = is_harmful(e)
    q = sum(group_detects(group, e) for group in groups) / len(groups) if groups else 0.0
    c = config.honest_error()
    total = 0.0
    for j in range(max(0, m - d), min(m, s) + 1):
        weight = stats.hypergeom.pmf(j, N, s, m)
        accepted = stats.binom.cdf(params.threshold - 1, j, q)
        hit = m - j if harmful else 0
        if config.z_star == 0:
            wrong = stats.binom.sf(math.floor(d / 2 - hit), d - hit, c)
        else:
            wrong = stats.binom.sf(math.ceil(d / 2 - hit) - 1, d - hit, c)
        total += float(weight * accepted * wrong)
    return total


def adversary_sweep(config, m_grid, e, trials):
    """
    Accept-and-wrong rates when the Server applies e on m slots it picks blindly.

    The attacked slots of each trial come from their own stream, independent of the
    round plan.

    Returns:
        list: One :class:`SweepRow` per m.

    """
    params = config.params
    if config.z_star is None:
        raise ContractError(_('An adversary sweep needs a known z*'))
    if params.s:
        envelope = security_error(BoundParams(
            params.d, params.s, params.w, config.structure.k, c=config.honest_error())).p_d
    else:
        envelope = 1.0
    rows = []
    for m in m_grid:
        if not 0 <= m <= params.N:
            raise ContractError(_('Cannot attack {m} of {N} rounds').format(m=m, N=params.N))
        run = RunStats()
        for trial in range(trials):
            attack_rng = rngs.stream(params.seed, 'attack', trial)
            slots = attack_rng.choice(params.N, size=m, replace=False)
            run.add(*run_verified_dqc(config, trial, RoundTargeted(e, slots)))
        rate, stderr = run.accept_and_wrong_rate
        rows.append(SweepRow(int(m), rate, stderr, exact_attack_probability(config, e, m),
                             envelope))
        log.info(_('Sweep m={m}: empirical {r:.3e} ± {s:.1e}').format(m=m, r=rate, s=stderr))
    return rows


def round_view_check(structure, rho, group, communication=COMMUNICATION.NO_BACK_AND_FORTH):
    """
    Largest distance between the Server's views of a computation round and a test round.
    """
    computation = server_views(structure, rho, [InjectionChoice(InjectionChoice.T)] * structure.t,
                               communication)
    test = server_views(structure, list(group.rho_labels),
                        [InjectionChoice(label) for label in group.injections], communication)
    return max(view_distance(a, b) for a, b in zip(computation, test))
