class MagicBlindError(Exception):
    """
    Base class for errors raised by the magic-blind package.

    Every subclass carries a short machine-readable ``code`` used in result bundles and
    in the command line exit status.
    """

    code = 'error'


class DimensionError(MagicBlindError, ValueError):
    """
    Operands act on a different number of qubits, or an index is out of range.
    """

    code = 'dimension'


class CapacityError(MagicBlindError, ValueError):
    """
    An enumeration or simulation cap was exceeded.
    """

    code = 'capacity'


class ContractError(MagicBlindError, ValueError):
    """
    A precondition of an operation does not hold.
    """

    code = 'contract'


class InfeasibleError(MagicBlindError):
    """
    The joint sign system of a merged trap group has no solution.
    """

    code = 'infeasible'


class ConfigError(MagicBlindError, ValueError):
    """
    An experiment definition failed schema validation.

    Attributes:
        errors (list): One ``'field.path: message'`` string per violation.
    """

    code = 'config'

    def __init__(self, errors):
        """
        Keep the full error list; the message lists every entry.
        """
        self.errors = list(errors)
        super().__init__('; '.join(self.errors))


class CheckFailed(MagicBlindError):
    """
    A check subcommand ran to completion but its property did not hold.
    """

    code = 'check-failed'
