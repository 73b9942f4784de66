# Sphinx configuration for the qwkb documentation
import os
import sys
sys.path.insert(0, os.path.abspath('../..'))

project = u'qwkb'
copyright = u'2026'
author = u''
release = u'0.1'
version = u'.'.join(release.split('.')[:2])

extensions = [
	'sphinx.ext.autodoc',
	'sphinx.ext.mathjax',
	'sphinx.ext.napoleon',
]

# numpy-style sections only
napoleon_google_docstring = False
napoleon_numpy_docstring = True
autodoc_member_order = 'bysource'

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'qwkbdoc'

latex_documents = [
	(master_doc, 'qwkb.tex', u'qwkb: exact WKB analysis of q-difference equations', author, 'manual'),
]
man_pages = [
	(master_doc, 'qwkb', u'qwkb Documentation', [author], 1),
]
