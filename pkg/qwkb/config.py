r""" Run configuration and numerical defaults
"""
import os
import json
from dataclasses import dataclass, field, fields

from .errors import ConfigError

__all__ = ['DEFAULTS', 'RunConfig', 'find_model_file', 'read_json', 'worker_count']


DEFAULTS = {
	# curve
	'newton_tol': 1e-13,
	'newton_maxiter': 50,
	'sheet_tol': 1e-12,
	# series
	'series_order': 8,
	'residual_tol': 1e-10,
	'residual_tol_float': 1e-8,
	# network
	'max_generation': 2,
	'max_abs_n': 2,
	'max_mass': 50.,
	'stop_radius': 1e-4,
	'max_steps': 4000,
	'max_step': 0.02,
	'rtol': 1e-10,
	'atol': 1e-12,
	'path_tol': 1e-6,
	'saddle_tol': 1e-3,
	'saddle_proximity': 0.05,
	'saddle_steps': 21,
	# periods
	'quad_epsabs': 1e-12,
	'quad_epsrel': 1e-12,
	'quad_limit': 200,
	'samples': 400,
	# stokesalg
	'truncation_order': 6,
	}


def worker_count(threads = None):
	r""" Number of worker threads: explicit value, then QWKB_THREADS, then 1
	"""
	if threads is not None:
		return max(1, int(threads))
	try:
		return max(1, int(os.environ.get('QWKB_THREADS', '1')))
	except ValueError:
		raise ConfigError("QWKB_THREADS must be an integer, got %r" % os.environ['QWKB_THREADS'])


def find_model_file(name):
	r""" Locate a model file by path or by bare name on QWKB_MODEL_PATH

	Parameters
	----------
	name: str
		Either a path to an existing file or a bare name; for bare names
		``<name>`` and ``<name>.json`` are searched in every directory of
		the environment variable ``QWKB_MODEL_PATH``.

	Returns
	-------
	str or None
		Path to the file, or None when nothing matches
	"""
	if os.path.isfile(name):
		return name
	for directory in os.environ.get('QWKB_MODEL_PATH', '').split(os.pathsep):
		if not directory:
			continue
		for candidate in [name, name + '.json']:
			path = os.path.join(directory, candidate)
			if os.path.isfile(path):
				return path
	return None


def read_json(filename):
	with open(filename, 'r') as f:
		try:
			return json.load(f)
		except ValueError as e:
			raise ConfigError("could not parse %s: %s" % (filename, e), filename = filename)


@dataclass
class RunConfig:
	r""" Settings of a single CLI invocation

	Built from the parsed command line; any key not declared here raises
	:class:`~qwkb.errors.ConfigError`. Numeric settings left as ``None`` take
	their value from :data:`DEFAULTS`.
	"""
	subcommand: str
	model: str = None
	params: dict = field(default_factory = dict)
	theta: float = 0.
	max_generation: int = None
	max_abs_n: int = None
	max_mass: float = None
	stop_radius: float = None
	order: int = None
	sign: int = 1
	n: int = 0
	mode: str = 'xi_graded'
	path: str = None
	svg: str = None
	dump: str = None
	threads: int = None
	format: str = 'text'
	verbose: int = 0
	verify: bool = False
	points: list = None
	theta_range: tuple = None
	steps: int = None
	loop: complex = None
	cycle: str = None
	radius: float = None
	hbar: complex = 1.
	action: str = None

	@classmethod
	def from_mapping(cls, subcommand, mapping):
		names = set(f.name for f in fields(cls))
		unknown = sorted(k for k in mapping if k not in names)
		if unknown:
			raise ConfigError("unknown configuration keys: %s" % ', '.join(unknown), keys = unknown)
		return cls(subcommand = subcommand, **{k: v for k, v in mapping.items() if k != 'subcommand'})

	def get(self, key):
		value = getattr(self, key, None)
		if value is None:
			return DEFAULTS[key]
		return value
