from gettext import gettext as _
import logging

from magic_blind.app.exceptions import CapacityError, InfeasibleError
from magic_blind.app.pauli import ENUMERATION_CAP
from magic_blind.app.tasks.bundle import ResultBundle
from magic_blind.app.traps import (
    EXACT_COLORING_CAP,
    MERGE,
    covers_all_harmful,
    explicit_family,
    merge_traps,
    singleton_bipartite,
    singleton_family,
)


log = logging.getLogger(__name__)

TRAP_COLUMNS = ('index', 'Q', 'stabilizer', 'input_labels')


def _merge(family, strategy, cap):
    try:
        plan = merge_traps(family, strategy, cap)
    except (CapacityError, InfeasibleError) as error:
        log.info(_('{s} merge unavailable: {e}').format(s=strategy, e=error))
        return None
    return [[index + 1 for index in group.members] for group in plan]


def traps(config):
    """
    Build the trap family, check coverage of harmful deviations and merge compatible traps.

    Args:
        config (ExperimentConfig): The experiment.

    Returns:
        ResultBundle: ``traps.tsv`` and a summary. The bundle fails when some harmful
            deviation goes undetected.

    """
    structure = config.structure
    sets = config.family_spec.get('sets')
    family = explicit_family(structure, sets) if sets else singleton_family(structure)
    for trap in family:
        trap.validate()
    mode = config.coverage_mode()
    coverage = covers_all_harmful(family, mode, config.caps.get('pauli', ENUMERATION_CAP))
    log.info(_('{c} traps on n+t={k}: covered={v} ({m})').format(
        c=len(family), k=structure.k, v=coverage.covered, m=mode))

    exact_cap = config.caps.get('exact_coloring', EXACT_COLORING_CAP)
    greedy = _merge(family, MERGE.GREEDY, exact_cap)
    exact = _merge(family, MERGE.EXACT, exact_cap) if len(family) <= exact_cap else None

    bundle = ResultBundle('traps', config.echo, config.seed)
    bundle.add_text('traps.tsv', '\n'.join(
        ['\t'.join(TRAP_COLUMNS)]
        + ['{i}\t{r}'.format(i=index + 1, r=trap.render()) for index, trap in enumerate(family)]))
    bundle.passed = coverage.covered
    bundle.results = {
        'traps': len(family),
        'coverage': {
            'covered': coverage.covered,
            'mode': coverage.mode,
            'witness': None if coverage.witness is None else str(coverage.witness),
        },
        'merge': {
            MERGE.GREEDY: greedy,
            MERGE.EXACT: exact,
        },
        'singleton_graph_bipartite': singleton_bipartite(structure),
    }
    return bundle
