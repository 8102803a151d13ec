__version__ = '1.0.0b1.dev'

default_app_config = 'magic_blind.app.MagicBlindAppConfig'
