# Exceptions and warnings raised by qwkb

__all__ = ['QwkbError',
	'LogPunctureHit',
	'DegenerateSheets',
	'NonSimpleBranchPoint',
	'DivergentProduct',
	'ResidualTooLarge',
	'CapExceeded',
	'StiffRegion',
	'NonInvertibleToken',
	'MalformedWord',
	'MalformedDetour',
	'DegenerateModuli',
	'IncompleteAssignment',
	'BranchTrackingLost',
	'EndpointSingularityUnresolved',
	'ConfigError',
	'DegenerateGraph',
	]


class QwkbError(Exception):
	r""" Base class for every error raised by this package
	"""
	kind = 'error'

	def __init__(self, message = '', **data):
		Exception.__init__(self, message)
		self.data = data
		for key, value in data.items():
			setattr(self, key, value)


# curve
class LogPunctureHit(QwkbError):
	kind = 'log_puncture_hit'

class DegenerateSheets(QwkbError):
	kind = 'degenerate_sheets'

class NonSimpleBranchPoint(QwkbError):
	kind = 'non_simple_branch_point'

class DivergentProduct(QwkbError):
	kind = 'divergent_product'

# series
class ResidualTooLarge(QwkbError):
	r""" The q-Riccati residual exceeded tolerance

	Attributes
	----------
	point: complex
		Sample point in the w-plane
	order: int
		Power of hbar at which the residual was found
	residual: float
		Absolute value of that coefficient
	"""
	kind = 'residual_too_large'

# network
class CapExceeded(QwkbError):
	kind = 'cap_exceeded'

class StiffRegion(QwkbError):
	kind = 'stiff_region'

# stokesalg
class NonInvertibleToken(QwkbError):
	kind = 'non_invertible_token'

class MalformedWord(QwkbError):
	kind = 'malformed_word'

class MalformedDetour(QwkbError):
	kind = 'malformed_detour'

# models
class DegenerateModuli(QwkbError):
	kind = 'degenerate_moduli'

class IncompleteAssignment(QwkbError):
	kind = 'incomplete_assignment'

# periods
class BranchTrackingLost(QwkbError):
	kind = 'branch_tracking_lost'

class EndpointSingularityUnresolved(QwkbError):
	kind = 'endpoint_singularity_unresolved'

# config
class ConfigError(QwkbError):
	kind = 'config_error'


class DegenerateGraph(UserWarning):
	r""" Issued when a Stokes graph is built at a phase close to a saddle
	"""
	pass
