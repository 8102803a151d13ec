from .bounds import bounds  # noqa
from .checks import blindness_check, reduction_check, twirl_check  # noqa
from .simulate import simulate  # noqa
from .traps import traps  # noqa
from .verify import verify  # noqa
from .runner import SUBCOMMANDS, run_subcommand  # noqa
