from gettext import gettext as _
import logging

from magic_blind.app.bounds import security_error
from magic_blind.app.exceptions import ConfigError
from magic_blind.app.tasks.bundle import ResultBundle


log = logging.getLogger(__name__)


def _table(breakdown):
    rows = [('field', 'value')]
    for name, value in sorted(breakdown.as_dict().items()):
        if isinstance(value, dict):
            rows.extend(('{n}.{k}'.format(n=name, k=key), '{v:.6e}'.format(v=item))
                        for key, item in sorted(value.items()))
        elif isinstance(value, float):
            rows.append((name, '{v:.6e}'.format(v=value)))
        else:
            rows.append((name, str(value)))
    width = max(len(name) for name, _value in rows)
    return '\n'.join('{n:<{w}}  {v}'.format(n=name, w=width, v=value) for name, value in rows)


def bounds(config, delta_convention=None):
    """
    The security error p_d and its breakdown.

    Args:
        config (ExperimentConfig): Needs a ``verification`` section with s >= 1.
        delta_convention (str): Overrides the Δ reading.

    Returns:
        ResultBundle: ``bounds.json`` and a text table.

    Raises:
        ConfigError: If the verification section is missing.

    """
    if not config.verification:
        raise ConfigError([_('verification: This section is required by bounds.')])
    params = config.bound_params(delta_convention)
    log.info(_('Computing bounds: d={d} s={s} w={w} k={k} c={c} delta={dc}').format(
        d=params.d, s=params.s, w=params.w, k=params.k, c=params.c, dc=params.delta_convention))
    breakdown = security_error(params)
    bundle = ResultBundle('bounds', config.echo, config.seed)
    bundle.add_json('bounds.json', breakdown.as_dict())
    bundle.add_text('bounds.txt', _table(breakdown))
    bundle.results = {'p_d': breakdown.p_d, 'vacuous': breakdown.vacuous,
                      'delta': breakdown.delta, 'delta_convention': params.delta_convention}
    return bundle
