from collections import Counter
from gettext import gettext as _
import logging

from magic_blind.app import rng as rngs
from magic_blind.app.models import MODE, RESOURCE
from magic_blind.app.protocol import ideal_distribution, run_mbdqc, total_variation
from magic_blind.app.tasks.bundle import ResultBundle


log = logging.getLogger(__name__)


def simulate(config):
    """
    Run the delegated computation ``config.trials`` times and compare with the ideal resource.

    Args:
        config (ExperimentConfig): The experiment.

    Returns:
        ResultBundle: ``histogram.csv``, ``transcript.txt`` of the first trial and a summary
            with the total-variation distance to the exact distribution.

    """
    structure = config.structure
    n, t = structure.n, structure.t
    behavior = config.behavior()
    log.info(_('Simulating: n={n} t={t} mode={m} trials={c}').format(
        n=n, t=t, m=config.mode, c=config.trials))
    histogram = Counter()
    first = None
    for trial in range(config.trials):
        rng = rngs.stream(config.seed, 'simulate', trial)
        result = run_mbdqc(structure, config.rho, config.injections, config.communication,
                           behavior.for_round(trial, rng, n, t), rng=rng,
                           backend=config.backend, allow_mixed=config.allow_mixed)
        histogram[''.join(str(bit) for bit in result.output)] += 1
        first = first or result

    ideal = None
    if config.mode != MODE.MIXED:
        ideal = {bits: float(p) for bits, p in ideal_distribution(
            RESOURCE.MAGIC_BLIND_DQC, structure=structure, rho=config.rho,
            injections=config.injections).items() if p}
    empirical = {bits: count / config.trials for bits, count in histogram.items()}

    bundle = ResultBundle('simulate', config.echo, config.seed)
    outcomes = sorted(set(histogram) | set(ideal or {}))
    bundle.add_csv('histogram.csv', ('output', 'count', 'empirical', 'ideal'), [
        [bits, histogram.get(bits, 0), empirical.get(bits, 0.0),
         '' if ideal is None else ideal.get(bits, 0.0)] for bits in outcomes])
    bundle.add_text('transcript.txt', first.transcript.dump())
    bundle.results = {
        'mode': config.mode,
        'communication': config.communication,
        'trials': config.trials,
        'histogram': dict(sorted(histogram.items())),
        'ideal': ideal,
        'total_variation': None if ideal is None else total_variation(empirical, ideal),
        'quantum_qubits_to_server': first.transcript.quantum_qubits(),
        'messages': len(first.transcript.entries),
    }
    return bundle
