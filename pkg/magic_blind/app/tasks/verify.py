from gettext import gettext as _
import logging

from magic_blind.app.bounds import eps_cor, eps_rob, security_error
from magic_blind.app.exceptions import ConfigError, ContractError
from magic_blind.app.tasks.bundle import ResultBundle
from magic_blind.app.verifier import CSV_COLUMNS, adversary_sweep, monte_carlo


log = logging.getLogger(__name__)

SWEEP_COLUMNS = ('m', 'empirical', 'stderr', 'exact', 'envelope')


def _bounds(config, delta_convention):
    """Analytic bounds next to the Monte-Carlo rates; None where they do not apply."""
    v = config.verification
    found = {'eps_cor': None, 'eps_rob': None, 'p_d': None}
    c = v.get('c') if v.get('c') is not None else config.bounds.get('c', 0.0)
    found['eps_cor'] = eps_cor(v['d'], c)
    if v['s']:
        p_err = config.bounds.get('p_err', 0.0)
        try:
            reject, wrong = eps_rob(v['d'], v['s'], v['w'], c, p_err)
            found['eps_rob'] = {'reject': reject, 'wrong': wrong}
        except ContractError as error:
            log.debug(_('Robustness bound skipped: {e}').format(e=error))
        found['p_d'] = security_error(config.bound_params(delta_convention)).p_d
    return found


def verify(config, delta_convention=None):
    """
    Monte-Carlo runs of the verified delegated computation.

    Args:
        config (ExperimentConfig): The experiment; needs a ``verification`` section.
        delta_convention (str): Overrides the Δ reading of the security bound.

    Returns:
        ResultBundle: ``runstats.csv``, ``flips.csv``, ``sweep.csv`` when a sweep is
            configured, and rates with standard errors next to the bounds.

    Raises:
        ConfigError: If the verification section is missing.

    """
    if not config.verification:
        raise ConfigError([_('verification: This section is required by verify.')])
    vconfig = config.verification_config()
    log.info(_('Running verify: trials={t} d={d} s={s} w={w} model={m}').format(
        t=config.trials, d=vconfig.params.d, s=vconfig.params.s, w=vconfig.params.w,
        m=vconfig.round_model))
    run = monte_carlo(vconfig, config.trials)

    bundle = ResultBundle('verify', config.echo, config.seed)
    bundle.add_csv('runstats.csv', CSV_COLUMNS, run.csv_rows())
    bundle.add_csv('flips.csv', ('trial', 'slot'), run.flip_log())
    bundle.results = run.summary()
    bundle.results['groups'] = len(vconfig.groups)
    bundle.results['bounds'] = _bounds(config, delta_convention)

    if config.sweep:
        rows = adversary_sweep(vconfig, config.sweep['m_grid'], config.sweep['pauli'],
                               config.trials)
        bundle.add_csv('sweep.csv', SWEEP_COLUMNS, [row.as_list() for row in rows])
        bundle.results['sweep'] = [
            dict(zip(SWEEP_COLUMNS, row.as_list()),
                 dominated=row.empirical <= row.envelope + 3 * row.stderr)
            for row in rows]
    return bundle
