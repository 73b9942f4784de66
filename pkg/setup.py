import os
from setuptools import setup


with open('README.md', 'r') as f:
	long_description = f.read()

setup(name='qwkb',
	version = '0.1',
	description = 'Exact WKB analysis of q-difference equations',
	long_description = long_description,
	long_description_content_type = 'text/markdown', 
	packages = ['qwkb',],
	install_requires = [
		'numpy', 
		'scipy>=1.0',
		'matplotlib',
		'mpmath',
		'sympy>=1.9',
		],
	extras_require = {'test': ['pytest']},
	entry_points = {'console_scripts': ['qwkb = qwkb.cli:main']},
	python_requires='>=3.7',
	)
