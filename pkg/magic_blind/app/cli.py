"""
The ``magic-blind`` command line.

Exit codes: 0 on success, 2 when the input breaks a contract (config, capacity, dimension
or precondition errors), 3 when a check ran and its property did not hold, 1 otherwise.
"""
from dataclasses import replace
from gettext import gettext as _
import argparse
import logging
import sys

from magic_blind import __version__
from magic_blind.app.bounds import DELTA_CONVENTIONS
from magic_blind.app.exceptions import CheckFailed, ConfigError, MagicBlindError
from magic_blind.app.models import BACKEND_CHOICES
from magic_blind.app.settings import configure


log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONTRACT = 2
EXIT_CHECK_FAILED = 3

SUBCOMMAND_HELP = {
    'simulate': _('Run the delegated computation and compare with the ideal resource.'),
    'verify': _('Monte-Carlo runs of verified delegated computation.'),
    'traps': _('Build, check and merge the trap family.'),
    'bounds': _('Compute the security error bound.'),
    'twirl-check': _('Exhaustive Pauli twirl check.'),
    'blindness-check': _('Compare exact Server views across inputs.'),
    'reduction-check': _('Check that unitary attacks reduce to Pauli attacks.'),
}


def seed(text):
    """An unsigned 64-bit integer."""
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(_('seed must fit in 64 unsigned bits'))
    return value


def positive(text):
    """An integer >= 1."""
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(_('must be at least 1'))
    return value


def build_parser():
    """The argument parser with one subparser per subcommand."""
    parser = argparse.ArgumentParser(
        prog='magic-blind',
        description=_('Simulate and verify magic-blind delegated quantum computation.'),
    )
    parser.add_argument('--version', action='version', version=__version__)
    subparsers = parser.add_subparsers(dest='subcommand', metavar='SUBCOMMAND')
    subparsers.required = True
    for name, help_text in SUBCOMMAND_HELP.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument('--config', required=True, metavar='PATH',
                         help=_('Experiment definition (JSON).'))
        sub.add_argument('--seed', type=seed, help=_('Master seed; overrides the config.'))
        sub.add_argument('--trials', type=positive, help=_('Trial count; overrides the config.'))
        sub.add_argument('--out', metavar='DIR',
                         help=_('Output directory; defaults to $MAGIC_BLIND_OUTPUT_DIR.'))
        sub.add_argument('--backend', choices=BACKEND_CHOICES,
                         help=_('Simulation backend; overrides the config.'))
        sub.add_argument('--delta-convention', choices=DELTA_CONVENTIONS,
                         help=_('How the security margin is computed.'))
        sub.add_argument('-v', '--verbose', action='count', default=0,
                         help=_('More logging; repeat for debug output.'))
    return parser


def load_config(path, args):
    """
    Read and validate an experiment file and apply the command-line overrides.

    Raises:
        ConfigError: If the file cannot be read or fails validation.

    """
    from magic_blind.app.serializers import parse_config

    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except OSError as error:
        raise ConfigError(['config: {e}'.format(e=error)])
    config = parse_config(text)
    overrides = {name: getattr(args, name) for name in ('seed', 'trials', 'backend')
                 if getattr(args, name) is not None}
    if args.delta_convention:
        overrides['bounds'] = dict(config.bounds, delta_convention=args.delta_convention)
    return replace(config, **overrides)


def main(argv=None):
    """
    Entry point of the console script.

    Args:
        argv (list): Arguments without the program name; ``sys.argv[1:]`` when None.

    Returns:
        int: The exit code.

    """
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')
    settings = configure()
    out_dir = args.out or settings['OUTPUT_DIR']

    from magic_blind.app.tasks import run_subcommand

    try:
        config = load_config(args.config, args)
        bundle = run_subcommand(args.subcommand, config, out_dir, args.delta_convention)
        if not bundle.passed:
            raise CheckFailed(_('{n} did not pass; see {d}').format(n=args.subcommand, d=out_dir))
    except CheckFailed as error:
        log.error(str(error))
        return EXIT_CHECK_FAILED
    except ConfigError as error:
        for entry in error.errors:
            log.error(entry)
        return EXIT_CONTRACT
    except MagicBlindError as error:
        log.error('{c}: {e}'.format(c=error.code, e=error))
        return EXIT_CONTRACT
    except Exception:
        log.exception(_('Unexpected failure in {n}').format(n=args.subcommand))
        return EXIT_UNEXPECTED
    log.info(_('Results in {d}').format(d=out_dir))
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
