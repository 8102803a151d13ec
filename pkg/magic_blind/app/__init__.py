from django.apps import AppConfig


class MagicBlindAppConfig(AppConfig):
    """Entry point for the magic-blind application."""

    name = 'magic_blind.app'
    label = 'magic_blind'
