# -*- coding: utf-8 -*-
#
# magic_blind documentation build configuration file.
#
# Only the values that differ from the Sphinx defaults are set here.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))  # noqa

import magic_blind

try:
    import sphinx_rtd_theme
except ImportError:
    sphinx_rtd_theme = False

# -- General configuration -----------------------------------------------------

extensions = []

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'magic_blind'
copyright = u'2019, magic_blind developers'

version = magic_blind.__version__
release = magic_blind.__version__

exclude_patterns = ['_build']

pygments_style = 'sphinx'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'sphinx_rtd_theme' if sphinx_rtd_theme else 'default'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()] if sphinx_rtd_theme else []

htmlhelp_basename = 'MagicBlinddoc'
