"""
Checks that exercise a property exhaustively and report pass or fail.
"""
from gettext import gettext as _
import logging

import numpy as np

from magic_blind.app import dense
from magic_blind.app import rng as rngs
from magic_blind.app.behaviors import FINAL
from magic_blind.app.dense import KEY_BITS_CAP
from magic_blind.app.exceptions import ConfigError
from magic_blind.app.models import InjectionChoice
from magic_blind.app.pauli import enumerate_paulis
from magic_blind.app.protocol import pauli_reduction_check, server_views, view_distance
from magic_blind.app.tasks.bundle import ResultBundle


log = logging.getLogger(__name__)

TWIRL_TOLERANCE = 1e-9
BLINDNESS_TOLERANCE = 1e-9
REDUCTION_TOLERANCE = 1e-6


def random_density_matrix(k, rng):
    """A full-rank mixed state: a random eigenbasis with Dirichlet eigenvalues."""
    u = dense.random_unitary(k, rng)
    weights = rng.dirichlet(np.ones(2 ** k))
    return dense.DensityMatrix(u @ np.diag(weights) @ u.conj().T)


def twirl_check(config):
    """
    Twirl every ordered pair of k-qubit Paulis over a random mixed state.

    Off-diagonal pairs must vanish; a diagonal pair must give ``4^k · EρE†``.

    Returns:
        ResultBundle: ``twirl.csv`` with one row per pair.

    """
    k = config.twirl.get('k', 2)
    rho = random_density_matrix(k, rngs.stream(config.seed, 'twirl'))
    paulis = list(enumerate_paulis(k))
    rows = []
    worst = 0.0
    for e1 in paulis:
        m1 = dense.pauli_matrix(e1)
        for e2 in paulis:
            total = dense.pauli_twirl_check(e1, e2, rho).matrix
            expected = 4 ** k * m1 @ rho.matrix @ m1.conj().T if e1 == e2 else 0
            error = float(np.linalg.norm(total - expected, 2))
            worst = max(worst, error)
            rows.append([str(e1), str(e2), int(e1 == e2), error])
    log.info(_('Twirl check on k={k}: largest deviation {w:.3e}').format(k=k, w=worst))
    bundle = ResultBundle('twirl-check', config.echo, config.seed)
    bundle.add_csv('twirl.csv', ('e1', 'e2', 'diagonal', 'norm_error'), rows)
    bundle.passed = worst < TWIRL_TOLERANCE
    bundle.results = {'k': k, 'pairs': len(rows), 'max_error': worst,
                      'tolerance': TWIRL_TOLERANCE}
    return bundle


def _cases(config):
    default = [InjectionChoice(InjectionChoice.T)] * config.t
    return [(list(case['input']), list(case.get('injections') or default))
            for case in config.blindness['cases']]


def blindness_check(config):
    """
    Compare the exact Server views of several inputs sharing the Clifford structure.

    Every case is compared with the first one at every transcript step.

    Returns:
        ResultBundle: ``blindness.csv`` with one row per case and step.

    Raises:
        ConfigError: If no blindness cases are configured.

    """
    if not config.blindness:
        raise ConfigError([_('blindness: This section is required by blindness-check.')])
    cases = _cases(config)
    views = [server_views(config.structure, rho, injections, config.communication,
                          config.caps.get('key_bits', KEY_BITS_CAP))
             for rho, injections in cases]
    reference = views[0]
    rows = []
    worst = 0.0
    for index, other in enumerate(views[1:], start=2):
        if len(other) != len(reference):
            worst = 1.0
            rows.append([index, '', '', 1.0])
            continue
        for v1, v2 in zip(reference, other):
            distance = view_distance(v1, v2)
            worst = max(worst, distance)
            rows.append([index, v1.step, v1.kind, distance])
    log.info(_('Blindness check over {c} cases: max distance {w:.3e}').format(
        c=len(cases), w=worst))
    bundle = ResultBundle('blindness-check', config.echo, config.seed)
    bundle.add_csv('blindness.csv', ('case', 'step', 'kind', 'distance'), rows)
    bundle.passed = worst < BLINDNESS_TOLERANCE
    bundle.results = {
        'cases': [{'input': [str(label) for label in rho],
                   'injections': [str(choice) for choice in injections]}
                  for rho, injections in cases],
        'steps': len(reference),
        'max_distance': worst,
        'tolerance': BLINDNESS_TOLERANCE,
    }
    return bundle


def reduction_check(config):
    """
    Random unitary attacks against their Pauli-mixture predictions.

    Each unitary is Haar random on the Client wires at the deviation point plus
    ``w_priv`` work wires, so it generally entangles the two.

    Returns:
        ResultBundle: ``reduction.csv`` with one row per unitary.

    """
    spec = config.reduction
    count, w_priv = spec.get('count', 20), spec.get('w_priv', 1)
    point = config.deviation_point()
    m = config.n if point == FINAL else config.n + 1
    rows = []
    worst = 0.0
    for index in range(count):
        unitary = dense.random_unitary(m + w_priv, rngs.stream(config.seed, 'unitary', index))
        report = pauli_reduction_check(config.structure, config.rho, config.injections, unitary,
                                       w_priv, point, config.communication, REDUCTION_TOLERANCE,
                                       config.caps.get('key_bits', KEY_BITS_CAP))
        worst = max(worst, report.distance)
        rows.append([index, report.distance, int(report.passed)])
    bundle = ResultBundle('reduction-check', config.echo, config.seed)
    bundle.add_csv('reduction.csv', ('unitary', 'distance', 'passed'), rows)
    bundle.passed = worst < REDUCTION_TOLERANCE
    bundle.results = {'unitaries': count, 'w_priv': w_priv, 'point': list(point),
                      'max_distance': worst, 'tolerance': REDUCTION_TOLERANCE}
    return bundle
