r""" Leading order quantum periods

The differentials :math:`\lambda_{\pm,n} = (\log y_\pm + 2\pi i n)\,dx/x` live
on the logarithmic cover of the curve, so along every contour the logarithms
are continued from a labeled starting point and never evaluated on the
principal branch.  A reference continuation is computed on a fine polyline
with :func:`~qwkb.curve.track_sheets`; the adaptive quadrature then picks, at
each node, the branch closest to the reference.

On the cover :math:`x = w^c` we have :math:`dx/x = c\,dw/w`.
"""
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, IntegrationWarning

from .curve import sheets_at, track_sheets, unwrap_log, classify_punctures, branch_points, SheetLabeling
from .series import riccati_coeffs, log_r_coeffs
from .errors import DegenerateSheets, EndpointSingularityUnresolved, ConfigError
from .config import DEFAULTS

__all__ = ['ContourSpec',
	'contour_period',
	'cycle_period',
	'voros_leading',
	'residue_formula',
	'period_series',
	'bundle_edge',
	'voros_cycle',
	]

logger = logging.getLogger(__name__)


@dataclass
class ContourSpec:
	r""" A closed loop or an open path on the cover

	Attributes
	----------
	kind: str
		``'loop'`` or ``'segment'``
	center: complex
		Center of a loop
	radius: float or None
		Radius of a loop; by default half the distance from the center to the
		nearest branch point
	winding: int
		Number of counterclockwise turns of a loop
	start, end: complex
		End points of a segment
	via: list of complex
		Intermediate points of a segment, joined by straight pieces
	shift: int
		Logarithmic shift :math:`\Delta n` inserted by :func:`voros_leading`
	flip: bool
		Swap the roles of the two sheets of a segment
	samples: int
		Reference samples per piece
	"""
	kind: str = 'loop'
	center: complex = 0j
	radius: float = None
	winding: int = 1
	start: complex = None
	end: complex = None
	via: list = field(default_factory = list)
	shift: int = 0
	flip: bool = False
	samples: int = None

	@classmethod
	def loop(cls, center = 0., radius = None, winding = 1, samples = None):
		assert winding != 0, "a loop winds at least once"
		return cls('loop', complex(center), radius, int(winding), samples = samples)

	@classmethod
	def segment(cls, start, end, via = (), shift = 0, flip = False, samples = None):
		return cls('segment', start = complex(start), end = complex(end), via = [complex(v) for v in via],
			shift = int(shift), flip = flip, samples = samples)


class _Piece:
	r""" A smooth parametrization :math:`t \in [0,1] \mapsto w(t)` """
	def __init__(self, w, dw):
		self.w = w
		self.dw = dw


def _circle(center, radius, winding):
	def w(t):
		return center + radius*np.exp(2j*np.pi*winding*t)
	def dw(t):
		return 2j*np.pi*winding*radius*np.exp(2j*np.pi*winding*t)
	return _Piece(w, dw)


def _straight(a, b):
	# w'(t) vanishes at both ends so that square root end points become smooth
	def w(t):
		return a + (b - a)*t*t*(3 - 2*t)
	def dw(t):
		return (b - a)*6*t*(1 - t)
	return _Piece(w, dw)


def _pieces(model, spec):
	if spec.kind == 'loop':
		radius = spec.radius
		if radius is None:
			radius = _default_radius(model, spec.center)
		_check_clearance(model, spec.center, radius)
		return [_circle(spec.center, radius, spec.winding)], radius
	if spec.kind != 'segment':
		raise ConfigError("unknown contour kind %r" % (spec.kind,))
	pts = [spec.start] + list(spec.via) + [spec.end]
	return [_straight(a, b) for a, b in zip(pts[:-1], pts[1:]) if a != b], None


def _branch_positions(model):
	return [b.position for b in branch_points(model)]


def _default_radius(model, center):
	dist = [abs(p - center) for p in _branch_positions(model)]
	if center != 0:
		dist.append(abs(center))
	return 0.5*min(dist)


def _check_clearance(model, center, radius):
	positions = _branch_positions(model)
	scale = max(abs(p) for p in positions)
	clearance = 1e-3*scale
	for p in positions:
		if abs(abs(p - center) - radius) < clearance:
			raise ConfigError("loop of radius %g about %s passes within %g of the branch point %s"
				% (radius, center, clearance, p))
	if center != 0 and abs(abs(center) - radius) < clearance:
		raise ConfigError("loop of radius %g about %s passes through the origin" % (radius, center))


def _continue(values, L_prev = None):
	r""" Continued logarithm of ``values``, on the branch closest to ``L_prev`` at the start """
	L = unwrap_log(values)
	if L_prev is not None:
		L = L + 2j*np.pi*np.round((L_prev - L[0]).imag/(2*np.pi))
	return L


def _loop_start(model, spec, w0):
	r""" Labeled sheets and their logarithms at the first point of a loop

	Around a regular puncture :math:`y_\pm` continue to :math:`e^{\pm\mu}`;
	elsewhere the global labeling is used.
	"""
	punctures = {p.location: p for p in classify_punctures(model)}
	origin = punctures.get('origin')
	if spec.center == 0 and origin is not None and origin.kind == 'regular':
		mu = complex(origin.mu)
		path = w0*np.geomspace(1e-6, 1., 200)
		Y = track_sheets(model, path, (np.exp(mu), np.exp(-mu)))
		L = np.column_stack([_continue(Y[:, 0], mu), _continue(Y[:, 1], -mu)])
		return Y[-1], L[-1]
	labeling = SheetLabeling(model, scale = max(abs(p) for p in _branch_positions(model)))
	pair = labeling.at(w0)
	return pair, np.log(np.array(pair))


def _segment_start(model, w1, flip):
	r""" Sheets at the first sample after a branch point

	The sheet :math:`y_s` is the one in the upper half plane (the larger one
	when both are real) and the logarithms agree at the branch point.
	"""
	ya, yb = sheets_at(model, w1)
	if (ya.imag, abs(ya)) < (yb.imag, abs(yb)):
		ya, yb = yb, ya
	if flip:
		ya, yb = yb, ya
	La = np.log(ya)
	return (ya, yb), np.array([La, La - np.log(ya/yb)])


def _reference(model, spec, pieces, samples):
	r""" Continued :math:`(\log y_s, \log y_{s'})` on a grid of each piece """
	refs = []
	eps = 0. if spec.kind == 'loop' else 1e-4
	pair = None
	L_prev = None
	for k, piece in enumerate(pieces):
		t = np.linspace(eps, 1 - eps, samples)
		ws = piece.w(t)
		if k == 0:
			if spec.kind == 'loop':
				pair, L_prev = _loop_start(model, spec, ws[0])
			else:
				pair, L_prev = _segment_start(model, ws[0], spec.flip)
		Y = track_sheets(model, ws, pair)
		L = np.column_stack([_continue(Y[:, 0], L_prev[0]), _continue(Y[:, 1], L_prev[1])])
		refs.append((t, L))
		pair = (Y[-1, 0], Y[-1, 1])
		L_prev = L[-1]
	return refs


def _log_at(model, w, Lref):
	r""" Logarithms of the two sheets at ``w`` on the branches closest to ``Lref`` """
	try:
		ya, yb = sheets_at(model, w)
	except DegenerateSheets:
		return np.array(Lref)
	out = []
	for target in Lref:
		best = None
		for y in (ya, yb):
			L = np.log(y)
			L = L + 2j*np.pi*np.round((target - L).imag/(2*np.pi))
			if best is None or abs(L - target) < abs(best - target):
				best = L
		out.append(best)
	return np.array(out)


def _interp(t, ts, L):
	return np.array([np.interp(t, ts, L[:, j].real) + 1j*np.interp(t, ts, L[:, j].imag) for j in range(2)])


def _cquad(f, limit = None):
	r""" Adaptive Gauss-Kronrod quadrature of a complex function on [0, 1]

	Returns
	-------
	(complex, float, bool)
		Value, error estimate and whether quad flagged the result
	"""
	opts = {'epsabs': DEFAULTS['quad_epsabs'], 'epsrel': DEFAULTS['quad_epsrel'],
		'limit': DEFAULTS['quad_limit'] if limit is None else limit}
	with warnings.catch_warnings(record = True) as caught:
		warnings.simplefilter('always', IntegrationWarning)
		re, err_re = quad(lambda t: f(t).real, 0., 1., **opts)
		im, err_im = quad(lambda t: f(t).imag, 0., 1., **opts)
	flagged = any(issubclass(w.category, IntegrationWarning) for w in caught)
	return re + 1j*im, float(np.hypot(err_re, err_im)), flagged


def _integrate(model, spec, integrand):
	r""" Sum over the pieces of :math:`\int f(L_s, L_{s'}, w)\, c\,dw/w` """
	c = model.cover_degree
	samples = DEFAULTS['samples'] if spec.samples is None else spec.samples
	pieces, _ = _pieces(model, spec)
	if len(pieces) == 0:
		return 0j, 0., False
	refs = _reference(model, spec, pieces, samples)
	total, err, flagged = 0j, 0., False
	for piece, (ts, L) in zip(pieces, refs):
		def f(t, piece = piece, ts = ts, L = L):
			w = piece.w(t)
			logs = _log_at(model, w, _interp(t, ts, L))
			return integrand(logs, w)*c*piece.dw(t)/w
		value, e, bad = _cquad(f)
		total += value
		err += e
		flagged = flagged or bad
	return total, err, flagged


def contour_period(model, spec, sign = 1, n = 0, hbar = 1.):
	r""" Period :math:`\frac{1}{\hbar}\int (\log y_\pm + 2\pi i n)\,\frac{dx}{x}` along a contour

	Parameters
	----------
	model: QdeModel
	spec: ContourSpec
	sign: int
		+1 for :math:`y_+`, -1 for :math:`y_-`
	n: int
		Logarithmic index
	hbar: complex

	Returns
	-------
	complex
	"""
	assert sign in (1, -1), "sign must be +1 or -1"
	col = 0 if sign == 1 else 1
	shift = 2j*np.pi*n
	value, err, flagged = _integrate(model, spec, lambda L, w: L[col] + shift)
	if flagged:
		warnings.warn("quadrature of the period did not reach tolerance (error estimate %.2e)" % err)
	logger.debug("period of %s contour, sign %+d, n = %d: %s (error %.2e)", spec.kind, sign, n, value, err)
	return value/hbar


def cycle_period(model, cycles, hbar = 1.):
	r""" Sum of periods over lifted contours

	Parameters
	----------
	model: QdeModel
	cycles: list of (ContourSpec, int, int)
		Contour, sheet sign and logarithmic index of each term; for example
		the flavor cycle :math:`c_+ + c_-` around a regular puncture

	Returns
	-------
	complex
	"""
	return sum(contour_period(model, spec, sign, n, hbar) for spec, sign, n in cycles)


def voros_leading(model, spec, shift = None, hbar = 1.):
	r""" Leading exponent :math:`\frac{1}{\hbar}\int (\log y_s - \log y_{s'} + 2\pi i\,\Delta n)\,\frac{dx}{x}`

	The path runs between branch points, where the two logarithms agree;
	the end points are resolved by the substitution
	:math:`w = w_b + (w_1 - w_b)(3t^2 - 2t^3)`.  The single valued prefactor of
	the WKB solution does not enter the leading exponent and is not included.

	Parameters
	----------
	model: QdeModel
	spec: ContourSpec
		A segment; ``spec.shift`` is the default :math:`\Delta n`
	shift: int or None
	hbar: complex

	Returns
	-------
	complex
	"""
	if spec.kind != 'segment':
		raise ConfigError("Voros exponents are taken along segments between branch points")
	for p in (spec.start, spec.end):
		T0 = complex(model.T0(p))
		if abs(T0*T0 - 1) > 1e-8*max(1, abs(T0)**2):
			raise ConfigError("%s is not a branch point" % (p,))
	shift = spec.shift if shift is None else int(shift)
	value, err, flagged = _integrate(model, spec, lambda L, w: L[0] - L[1] + 2j*np.pi*shift)
	if flagged or err > 1e-6*max(1., abs(value)):
		raise EndpointSingularityUnresolved("Voros integral from %s to %s did not converge (error %.2e)"
			% (spec.start, spec.end, err), error = err)
	logger.debug("Voros exponent from %s to %s, shift %d: %s", spec.start, spec.end, shift, value)
	return value/hbar


def residue_formula(model, puncture = 'origin', sign = 1, n = 0, hbar = 1., winding = 1):
	r""" Closed form :math:`\frac{2\pi i c}{\hbar}(\pm\mu + 2\pi i n)` of a period around a regular puncture

	Here :math:`y_\pm \to e^{\pm\mu}` at the puncture; the loop winds
	``winding`` times counterclockwise in the cover coordinate.

	Returns
	-------
	complex
	"""
	found = [p for p in classify_punctures(model) if p.location == puncture]
	if not found or found[0].kind != 'regular':
		raise ConfigError("the puncture at %s is not regular" % puncture)
	mu = complex(found[0].mu)
	c = model.cover_degree
	return 2j*np.pi*c*winding*(sign*mu + 2j*np.pi*n)/hbar


def period_series(model, spec, sign = 1, n = 0, order = None, hbar = 1.):
	r""" Coefficients of the :math:`\hbar` expansion of a closed period

	.. math::

		\oint \log\mathcal{R}\,\frac{dx}{x} = \oint(\log y_\pm + 2\pi i n)\frac{dx}{x}
			+ \sum_{k\ge 1}\hbar^k\oint D_k\,\frac{dx}{x}

	The :math:`D_k` have poles at the branch points, so only loops are accepted.

	Returns
	-------
	list of complex
		:math:`[Z_0/\hbar, Z_1, \ldots, Z_N]` with :math:`Z_0` the leading period
	"""
	if spec.kind != 'loop':
		raise ConfigError("higher order corrections are computed on closed loops only")
	order = DEFAULTS['series_order'] if order is None else int(order)
	out = [contour_period(model, spec, sign, n, hbar)]
	if order == 0:
		return out
	logr = log_r_coeffs(riccati_coeffs(model, sign, order), n)
	col = 0 if sign == 1 else 1
	for k in range(1, order + 1):
		Dk = logr.D(k)
		def integrand(L, w, Dk = Dk):
			y = np.exp(L[col])
			r = sign*(y - complex(model.T0(w)))
			return complex(Dk.evaluate(w, r))
		value, err, flagged = _integrate(model, spec, integrand)
		if flagged:
			warnings.warn("quadrature of the order %d correction did not reach tolerance" % k)
		out.append(value)
	return out


def bundle_edge(bundle, name):
	r""" Segment of a named edge of a :class:`~qwkb.models.ModelBundle` """
	edge = bundle.edges[name]
	start = bundle.branch_names[edge['start']]
	end = bundle.branch_names[edge['end']]
	return ContourSpec.segment(start, end, edge.get('via', ()), edge.get('shift', 0), edge.get('flip', False))


def voros_cycle(bundle, name, hbar = 1.):
	r""" Leading Voros exponent of a named charge of a :class:`~qwkb.models.ModelBundle`

	The charge is the integer combination of edges listed in
	``bundle.cycles[name]['edges']`` plus ``d0`` copies of the D0 charge,
	whose exponent :math:`-4\pi^2/\hbar` is not the lift of any edge.

	Returns
	-------
	complex
	"""
	cycle = bundle.cycles[name]
	value = -4*np.pi**2*cycle.get('d0', 0)/hbar
	for edge, coeff in sorted(cycle['edges'].items()):
		value += coeff*voros_leading(bundle.model, bundle_edge(bundle, edge), hbar = hbar)
	return value
