# -*- coding: utf-8 -*-
#
# Sphinx configuration of the cellfree documentation.

extensions = [
    'sphinx.ext.mathjax',
    'sphinx.ext.githubpages',
]

source_suffix = '.rst'
master_doc = 'index'

project = u'cellfree'
copyright = u'2026, cellfree developers'
author = u'cellfree developers'
version = u'0.1.0'
release = u'0.1.0'

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'

html_theme = 'sphinxdoc'
htmlhelp_basename = 'cellfreedoc'

man_pages = [
    (master_doc, 'cellfree', u'cellfree Documentation', [author], 1)
]
