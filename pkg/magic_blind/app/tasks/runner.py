from gettext import gettext as _
import logging

from magic_blind.app.exceptions import ContractError

from .bounds import bounds
from .checks import blindness_check, reduction_check, twirl_check
from .simulate import simulate
from .traps import traps
from .verify import verify


log = logging.getLogger(__name__)

SUBCOMMANDS = {
    'simulate': simulate,
    'verify': verify,
    'traps': traps,
    'bounds': bounds,
    'twirl-check': twirl_check,
    'blindness-check': blindness_check,
    'reduction-check': reduction_check,
}
TAKES_DELTA_CONVENTION = ('verify', 'bounds')


def run_subcommand(name, config, out_dir=None, delta_convention=None):
    """
    Run one subcommand and write its result bundle.

    Args:
        name (str): One of :data:`SUBCOMMANDS`.
        config (ExperimentConfig): The validated experiment.
        out_dir (str): Where to write; nothing is written when None.
        delta_convention (str): Δ reading for verify and bounds.

    Returns:
        ResultBundle: The bundle, already written when ``out_dir`` was given.

    Raises:
        ContractError: If the subcommand is unknown.

    """
    if name not in SUBCOMMANDS:
        raise ContractError(_('Unknown subcommand "{n}"').format(n=name))
    log.info(_('Running {n}: seed={s}').format(n=name, s=config.seed))
    if name in TAKES_DELTA_CONVENTION:
        bundle = SUBCOMMANDS[name](config, delta_convention=delta_convention)
    else:
        bundle = SUBCOMMANDS[name](config)
    if out_dir is not None:
        bundle.write(out_dir)
    log.info(_('Finished {n}: passed={p}').format(n=name, p=bundle.passed))
    return bundle
