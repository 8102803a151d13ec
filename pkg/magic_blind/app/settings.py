"""
Defaults, and the standalone Django configuration used by the serializers and the command
line.

Library modules do not read these; they take caps as keyword arguments.
"""
import os

import django
from django.conf import settings

from magic_blind.app.dense import KEY_BITS_CAP
from magic_blind.app.pauli import ENUMERATION_CAP
from magic_blind.app.traps import EXACT_COLORING_CAP


MAGIC_BLIND = {
    'KEY_BITS_CAP': KEY_BITS_CAP,
    'PAULI_CAP': ENUMERATION_CAP,
    'EXACT_COLORING_CAP': EXACT_COLORING_CAP,
    'RESULT_SCHEMA': 'magic-blind/1',
    'OUTPUT_DIR': os.environ.get('MAGIC_BLIND_OUTPUT_DIR', './magic-blind-results'),
}


def configure(**overrides):
    """
    Configure Django once, without a settings module.

    Args:
        overrides: Entries replacing those of :data:`MAGIC_BLIND`.

    Returns:
        dict: The effective ``MAGIC_BLIND`` settings.

    """
    if not settings.configured:
        settings.configure(
            INSTALLED_APPS=['rest_framework', 'magic_blind.app.MagicBlindAppConfig'],
            USE_I18N=False,
            MAGIC_BLIND=dict(MAGIC_BLIND),
        )
        django.setup()
    settings.MAGIC_BLIND.update(overrides)
    return settings.MAGIC_BLIND


def default_caps():
    """The enumeration caps an experiment file may lower, keyed as in its ``caps`` section."""
    current = configure()
    return {
        'key_bits': current['KEY_BITS_CAP'],
        'pauli': current['PAULI_CAP'],
        'exact_coloring': current['EXACT_COLORING_CAP'],
    }
