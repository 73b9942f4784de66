r""" WKB curves of q-difference equations in involutive form

A second order q-difference equation in involutive form

.. math::

	\psi(qx) + \psi(q^{-1}x) = 2T(x,\hbar)\psi(x), \qquad q = e^\hbar,

has the WKB curve :math:`y + y^{-1} = 2T_0(x)` where
:math:`T(x,\hbar) = \sum_k T_k(x)\hbar^k`.  The potential is stored on a cyclic
cover :math:`x = w^c` so that every :math:`T_k` is a Laurent polynomial in
:math:`w`.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import sympy
import mpmath

from .errors import (ConfigError, LogPunctureHit, DegenerateSheets, NonSimpleBranchPoint,
	DivergentProduct, DegenerateModuli, BranchTrackingLost)
from .marriage import sheet_match
from .config import DEFAULTS, read_json

__all__ = ['QdeModel',
	'BranchPoint',
	'Puncture',
	'exact_number',
	'load_model',
	'sheets_at',
	'larger_first',
	'branch_points',
	'classify_punctures',
	'qpochhammer',
	'log_cut_pairs',
	'track_sheets',
	'unwrap_log',
	'SheetLabeling',
	'ray_shifts',
	'SYMMETRIES',
	]

logger = logging.getLogger(__name__)


SYMMETRIES = {
	'neg': lambda w: -w,
	'inv': lambda w: 1./w,
	'conj': lambda w: np.conj(w),
	'negconj': lambda w: -np.conj(w),
	}

MODEL_KEYS = ['name', 'cover_degree', 'parameters', 'T', 'symmetries', 'sheet_anchor', 'log_cut_pairs']


def exact_number(z):
	r""" Convert a number to an exact complex rational sympy expression

	Floats are read from their shortest decimal representation, so ``0.97``
	becomes ``97/100``; pairs ``[re, im]`` and strings such as ``"3/100*I"`` are
	accepted as well.
	"""
	if isinstance(z, (list, tuple)):
		assert len(z) == 2, "complex numbers are given as [re, im]"
		return sympy.expand(exact_number(z[0]) + sympy.I*exact_number(z[1]))
	if isinstance(z, bool):
		raise ConfigError("expected a number, got %r" % (z,))
	if isinstance(z, complex):
		return sympy.expand(exact_number(z.real) + sympy.I*exact_number(z.imag))
	if isinstance(z, float):
		if not np.isfinite(z):
			raise ConfigError("non-finite coefficient %r" % (z,))
		return sympy.Rational(repr(float(z)))
	if isinstance(z, str):
		value = sympy.sympify(z, rational = True)
	else:
		value = sympy.sympify(z)
	value = sympy.expand(value)
	re, im = value.as_real_imag()
	if not (re.is_Rational and im.is_Rational):
		raise ConfigError("coefficient %s is not a complex rational" % (value,))
	return re + sympy.I*im


def _is_exact_input(z):
	if isinstance(z, (list, tuple)):
		return all(_is_exact_input(zi) for zi in z)
	return not isinstance(z, (float, complex))


def _mp(a):
	re, im = a.as_real_imag()
	return mpmath.mpc(mpmath.mpf(int(re.p))/int(re.q), mpmath.mpf(int(im.p))/int(im.q))


class QdeModel:
	r""" A q-difference equation in involutive form

	Parameters
	----------
	name: str
		Identifier of the model
	trace_coeffs: list of dict
		Entry ``k`` maps integer exponents of :math:`w` to the coefficients of
		:math:`T_k(w)`; any number accepted by :func:`exact_number` may be used.
	cover_degree: int
		Degree :math:`c` of the cover :math:`x = w^c` (1 or 2)
	parameters: dict
		Named moduli of the model, kept for reference
	symmetries: list of str
		Names of maps in :data:`SYMMETRIES` preserving the set of branch points
	sheet_anchor: complex or None
		Point at which the sheet :math:`y_+` is the one of larger modulus;
		if None, :math:`2 R e^{i/2}` with :math:`R` the largest branch point modulus
	log_cut_pairs: dict or None
		Maps ``'origin'`` or ``'infinity'`` to the index of the branch point
		its logarithmic cut ends on, overriding the default pairing
	"""
	def __init__(self, name, trace_coeffs, cover_degree = 1, parameters = None, symmetries = (),
		sheet_anchor = None, log_cut_pairs = None, exact = None):
		if cover_degree not in (1, 2):
			raise ConfigError("cover_degree must be 1 or 2, got %r" % (cover_degree,))
		if len(trace_coeffs) == 0:
			raise ConfigError("T must contain at least the leading order T_0")
		for s in symmetries:
			if s not in SYMMETRIES:
				raise ConfigError("unknown symmetry %r" % (s,))

		self.name = str(name)
		self.cover_degree = int(cover_degree)
		self.parameters = dict(parameters or {})
		self.symmetries = tuple(symmetries)
		self.sheet_anchor = None if sheet_anchor is None else complex(sheet_anchor)
		self.log_cut_pairs = dict(log_cut_pairs or {})
		for key in self.log_cut_pairs:
			if key not in ('origin', 'infinity'):
				raise ConfigError("log_cut_pairs keys are 'origin' and 'infinity', got %r" % (key,))

		if exact is None:
			exact = all(_is_exact_input(c) for Tk in trace_coeffs for c in Tk.values())
		self.exact = bool(exact)

		coeffs = []
		for Tk in trace_coeffs:
			Tk_exact = {}
			for e, c in Tk.items():
				if int(e) != e:
					raise ConfigError("exponents of w must be integers, got %r" % (e,))
				value = exact_number(c)
				if value != 0:
					Tk_exact[int(e)] = Tk_exact.get(int(e), 0) + value
			coeffs.append({e: c for e, c in Tk_exact.items() if c != 0})
		self.trace_coeffs = tuple(coeffs)

		if self.cover_degree == 2:
			if all(e % 2 == 0 for Tk in self.trace_coeffs for e in Tk):
				raise ConfigError("cover_degree 2 requires odd powers of w")

		T0 = self.trace_coeffs[0]
		self._exps = np.array(sorted(T0), dtype = int)
		self._coefs = np.array([complex(T0[e]) for e in sorted(T0)], dtype = complex)

	def __repr__(self):
		return "<QdeModel %s: c=%d, T0=%s>" % (self.name, self.cover_degree, self.T0_expr())

	@property
	def order(self):
		r""" Highest power of hbar present in T """
		return len(self.trace_coeffs) - 1

	def T(self, k):
		r""" Exact Laurent coefficients of :math:`T_k` (empty beyond the stored order) """
		if k < len(self.trace_coeffs):
			return self.trace_coeffs[k]
		return {}

	def T0_expr(self, var = 'w'):
		w = sympy.Symbol(var)
		return sum((c*w**e for e, c in sorted(self.trace_coeffs[0].items())), sympy.Integer(0))

	def exponent_range(self):
		if len(self._exps) == 0:
			return 0, 0
		return int(min(self._exps.min(), 0)), int(max(self._exps.max(), 0))

	def is_constant(self):
		return all(e == 0 for e in self._exps)

	def T0(self, w):
		w = np.asarray(w, dtype = complex)
		out = np.zeros(w.shape, dtype = complex)
		for e, a in zip(self._exps, self._coefs):
			out += a*w**float(e) if e < 0 else a*w**int(e)
		return out

	def dT0(self, w):
		r""" Derivative of :math:`T_0` with respect to :math:`w` """
		w = np.asarray(w, dtype = complex)
		out = np.zeros(w.shape, dtype = complex)
		for e, a in zip(self._exps, self._coefs):
			if e != 0:
				out += e*a*w**float(e - 1)
		return out

	def d2T0(self, w):
		w = np.asarray(w, dtype = complex)
		out = np.zeros(w.shape, dtype = complex)
		for e, a in zip(self._exps, self._coefs):
			if e not in (0, 1):
				out += e*(e-1)*a*w**float(e - 2)
		return out

	def x_of_w(self, w):
		return np.asarray(w, dtype = complex)**self.cover_degree

	def to_mapping(self):
		r""" Model file representation (see :func:`load_model`) """
		T = []
		for k, Tk in enumerate(self.trace_coeffs):
			terms = []
			for e in sorted(Tk):
				re, im = Tk[e].as_real_imag()
				terms.append([e, str(re), str(im)])
			T.append([k, terms])
		out = {'name': self.name, 'cover_degree': self.cover_degree, 'T': T,
			'parameters': {k: [float(np.real(v)), float(np.imag(v))] for k, v in self.parameters.items()}}
		if self.symmetries:
			out['symmetries'] = list(self.symmetries)
		if self.sheet_anchor is not None:
			out['sheet_anchor'] = [self.sheet_anchor.real, self.sheet_anchor.imag]
		if self.log_cut_pairs:
			out['log_cut_pairs'] = dict(self.log_cut_pairs)
		return out


def load_model(source):
	r""" Build a :class:`QdeModel` from a model file or its parsed contents

	The model file is a JSON object with keys ``name``, ``cover_degree``,
	``parameters``, ``T`` given as a list of ``[hbar_order, [[exponent, re, im], ...]]``,
	and the optional keys ``symmetries``, ``sheet_anchor`` and ``log_cut_pairs``.

	Parameters
	----------
	source: str or dict
		Path to a model file or the decoded mapping

	Returns
	-------
	QdeModel
	"""
	if isinstance(source, str):
		source = read_json(source)
	if not isinstance(source, dict):
		raise ConfigError("a model must be a JSON object")
	unknown = sorted(k for k in source if k not in MODEL_KEYS)
	if unknown:
		raise ConfigError("unknown model keys: %s" % ', '.join(unknown), keys = unknown)
	for key in ['name', 'T']:
		if key not in source:
			raise ConfigError("model is missing the key %r" % key)

	orders = {}
	for entry in source['T']:
		try:
			k, terms = entry
			k = int(k)
			Tk = {}
			for term in terms:
				e, re, im = term
				Tk[int(e)] = exact_number([re, im]) + Tk.get(int(e), 0)
		except (TypeError, ValueError) as e:
			raise ConfigError("malformed T entry %r: %s" % (entry, e))
		if k < 0 or k in orders:
			raise ConfigError("hbar order %r repeated or negative" % (k,))
		orders[k] = Tk
	if 0 not in orders:
		raise ConfigError("T must contain the hbar order 0")
	trace_coeffs = [orders.get(k, {}) for k in range(max(orders) + 1)]
	exact = all(_is_exact_input(term[1:]) for entry in source['T'] for term in entry[1])

	parameters = {}
	for key, value in source.get('parameters', {}).items():
		if isinstance(value, (list, tuple)):
			value = complex(float(value[0]), float(value[1]))
		parameters[key] = value

	anchor = source.get('sheet_anchor', None)
	if anchor is not None:
		anchor = complex(float(anchor[0]), float(anchor[1]))

	return QdeModel(source['name'], trace_coeffs,
		cover_degree = int(source.get('cover_degree', 1)),
		parameters = parameters,
		symmetries = source.get('symmetries', ()),
		sheet_anchor = anchor,
		log_cut_pairs = source.get('log_cut_pairs', None),
		exact = exact)


def sheets_at(model, w, branch_choice = 1):
	r""" Values :math:`(y_+, y_-)` of the two sheets above a point

	The sheets are :math:`y_\pm = T_0 \pm \sqrt{T_0^2-1}` with the principal
	square root; the root of larger modulus is computed directly and the other
	as its reciprocal so that :math:`y_+ y_- = 1` to working precision.

	Parameters
	----------
	model: QdeModel
	w: complex
		Point on the cover
	branch_choice: int
		+1 returns :math:`(y_+, y_-)`, -1 the swapped pair

	Returns
	-------
	(complex, complex)
	"""
	w = complex(w)
	emin, emax = model.exponent_range()
	if not np.isfinite(w) or (w == 0 and emin < 0):
		raise LogPunctureHit("T_0 has a pole at w = %r" % (w,), point = w)
	T0 = complex(model.T0(w))
	r2 = T0*T0 - 1.
	if abs(r2) < DEFAULTS['sheet_tol']*max(1., abs(T0)**2):
		raise DegenerateSheets("sheets meet at w = %r" % (w,), point = w)
	r = np.sqrt(r2)
	a = T0 + r
	b = T0 - r
	if abs(a) >= abs(b):
		yp, ym = a, 1./a
	else:
		yp, ym = 1./b, b
	if branch_choice < 0:
		return ym, yp
	return yp, ym


def larger_first(pair):
	r""" Order a pair of sheet values by decreasing modulus """
	a, b = pair
	if abs(a) >= abs(b):
		return a, b
	return b, a


def _branch_positions(model):
	emin, emax = model.exponent_range()
	T0 = model.trace_coeffs[0]
	positions = []
	signs = []
	for s in (1, -1):
		# w^{-emin}(T_0 - s), highest degree first
		coeffs = [complex(T0.get(e, 0) - (s if e == 0 else 0)) for e in range(emax, emin - 1, -1)]
		while len(coeffs) > 1 and coeffs[0] == 0:
			coeffs.pop(0)
		if len(coeffs) < 2:
			continue
		C = scipy.linalg.companion(coeffs)
		roots = scipy.linalg.eigvals(C)
		for root in roots:
			if abs(root) < 1e-14:
				continue
			positions.append(_newton_polish(model, root, s))
			signs.append(s)
	return positions, signs


def _newton_polish(model, w, s):
	tol = DEFAULTS['newton_tol']
	items = [(e, _mp(c)) for e, c in model.trace_coeffs[0].items()]
	with mpmath.workdps(30):
		z = mpmath.mpc(w)
		for it in range(DEFAULTS['newton_maxiter']):
			f = sum(c*z**e for e, c in items) - s
			df = sum(e*c*z**(e-1) for e, c in items if e != 0)
			if df == 0:
				break
			step = f/df
			z -= step
			if abs(step) < tol*max(1, abs(z)):
				break
		logger.debug("branch point %s: residual %.2e after %d Newton steps", complex(z), float(abs(f)), it + 1)
		return complex(z)


def _c0(model, w, s):
	c = model.cover_degree
	dT0_dx = complex(model.dT0(w))/(c*w**(c-1))
	return complex(np.sqrt(2*s*dT0_dx))


def _wrap(angle):
	r""" Angle reduced to (-pi, pi] """
	a = np.angle(np.exp(1j*angle))
	if a <= -np.pi:
		a += 2*np.pi
	return float(a)


@dataclass(frozen = True)
class BranchPoint:
	r""" A simple square-root branch point :math:`T_0(w_b) = \pm 1`

	Attributes
	----------
	position: complex
		Location on the cover
	sign_class: int
		Value of :math:`T_0` at the branch point
	c0: complex
		Local coefficient, :math:`T_0 \approx s(1 + c_0^2 (x-x_0)/2)`
	signature: str
		``'+-'`` or ``'-+'``, the dominance type of its Stokes lines
	enc_log_shift: int
		Logarithmic shift :math:`\ell` of the cut encircling it, 0 otherwise
	ref_angle: float
		Direction from the branch point along which its sheet labels arrive
		(the logarithmic cut or the straight path to the sheet anchor)
	ref_pair: tuple
		Labeled :math:`(y_+, y_-)` at distance ``radius`` along ``ref_angle``
	radius: float
		Radius of the small circle used to label the local sheets
	puncture: str or None
		Location of the puncture whose logarithmic cut ends here
	"""
	position: complex
	sign_class: int
	c0: complex
	signature: str = '+-'
	enc_log_shift: int = 0
	ref_angle: float = 0.
	ref_pair: tuple = (1., 1.)
	radius: float = 0.
	puncture: str = None


@dataclass(frozen = True)
class Puncture:
	r""" Critical point of the curve at :math:`w=0` or :math:`w=\infty`

	Attributes
	----------
	location: str
		``'origin'`` or ``'infinity'``
	kind: str
		``'logarithmic'``, ``'regular'``, ``'apparent'`` or ``'colliding'``
	degree_k: int or None
		For logarithmic punctures the degree :math:`k<0` of :math:`T_0` in the
		local coordinate (:math:`w` or :math:`1/w`)
	limit_values: tuple
		Limiting values of :math:`(y_+, y_-)`
	mu: complex or None
		Residue exponent of a regular puncture, :math:`y_\pm \to e^{\pm\mu}`
	exponent: sympy.Rational or None
		Local exponent :math:`k` of :math:`\log y_\pm \sim \pm b\,x^k` at an apparent or
		colliding puncture
	"""
	location: str
	kind: str
	degree_k: int = None
	limit_values: tuple = ()
	mu: complex = None
	exponent: object = None


def _local_exponent(T0, location, cover_degree):
	r""" Exponent :math:`k` of :math:`\log y_\pm \sim \pm b\,x^{k}` where :math:`y_\pm \to \pm 1`

	With :math:`T_0 - a_0 \sim t\,u^m` in the local coordinate :math:`u` of
	the cover (:math:`w` or :math:`1/w`), :math:`\log y \sim \sqrt{2a_0t}\,u^{m/2}`
	and :math:`x = w^c` gives :math:`k = m/(2c)`; ``None`` when :math:`T_0` is
	constant.
	"""
	if location == 'origin':
		powers = [e for e in T0 if e > 0 and T0[e] != 0]
		m = min(powers) if powers else None
	else:
		powers = [-e for e in T0 if e < 0 and T0[e] != 0]
		m = min(powers) if powers else None
	if m is None:
		return None
	return sympy.Rational(m, 2*cover_degree)


def classify_punctures(model):
	r""" Classify the punctures of the curve at the origin and at infinity

	Laurent data on the cover has no finite poles away from :math:`w=0`, so
	the classification is complete with these two points.  A divergent
	:math:`T_0` gives a logarithmic puncture; a finite limit :math:`a_0 \ne \pm 1`
	a regular puncture with :math:`a_0 = \cosh\mu`.  When :math:`a_0 = \pm 1`
	both sheets tend to :math:`a_0` and :math:`\log y_\pm \sim \pm b\,x^k`: an
	integer :math:`k` gives an apparent singularity, a half-integer (or any
	other fractional) :math:`k` a regular puncture that collided with a branch
	point.

	Returns
	-------
	list of Puncture
		The origin first, then infinity
	"""
	T0 = model.trace_coeffs[0]
	exps = sorted(T0)
	out = []
	for location in ['origin', 'infinity']:
		if location == 'origin':
			lead = exps[0] if exps else 0
			diverges = lead < 0
			k = lead
		else:
			lead = exps[-1] if exps else 0
			diverges = lead > 0
			k = -lead
		if diverges:
			out.append(Puncture(location, 'logarithmic', degree_k = int(k),
				limit_values = (complex(np.inf), 0j)))
			continue
		a0 = T0.get(0, sympy.Integer(0))
		if a0 == 1 or a0 == -1:
			k = _local_exponent(T0, location, model.cover_degree)
			kind = 'apparent' if k is not None and k.q == 1 else 'colliding'
			logger.debug("puncture at %s: y -> %s with local exponent %s (%s)", location, a0, k, kind)
			out.append(Puncture(location, kind, limit_values = (complex(a0), complex(a0)), exponent = k))
			continue
		a = complex(a0)
		mu = complex(np.log(a + np.sqrt(a*a - 1)))
		out.append(Puncture(location, 'regular', limit_values = (np.exp(mu), np.exp(-mu)), mu = mu))
	return out


def log_cut_pairs(model, positions, punctures):
	r""" Pair every logarithmic puncture with the branch point its cut ends on

	The puncture at infinity is paired with the branch point of largest
	modulus and the origin with the one of smallest modulus; moduli equal to
	relative precision 1e-8 are ordered by real part, then imaginary part.
	``model.log_cut_pairs`` overrides the choice.

	Returns
	-------
	dict
		Maps puncture location to an index into ``positions``
	"""
	pairs = {}
	if len(positions) == 0:
		return pairs
	positions = np.asarray(positions, dtype = complex)
	mod = np.abs(positions)
	for p in punctures:
		if p.kind != 'logarithmic':
			continue
		if p.location in model.log_cut_pairs:
			i = int(model.log_cut_pairs[p.location])
			if not 0 <= i < len(positions):
				raise ConfigError("log_cut_pairs index %d out of range" % i)
			pairs[p.location] = i
			continue
		target = mod.max() if p.location == 'infinity' else mod.min()
		I = [i for i in range(len(positions)) if abs(mod[i] - target) <= 1e-8*max(target, 1e-300)]
		I.sort(key = lambda i: (positions[i].real, positions[i].imag))
		pairs[p.location] = I[0]
	return pairs


def track_sheets(model, path, start, max_halvings = 24):
	r""" Continue a labeled pair of sheets along a path

	Consecutive samples are matched by :func:`~qwkb.marriage.sheet_match`;
	when the match is ambiguous the step is halved.

	Parameters
	----------
	model: QdeModel
	path: array-like (n,)
		Points on the cover
	start: (complex, complex)
		Labeled :math:`(y_+, y_-)` near ``path[0]``; it is snapped onto the
		exact sheet values there.

	Returns
	-------
	np.array((n,2), dtype = complex)
		Labeled sheet values along the path
	"""
	path = np.asarray(path, dtype = complex).flatten()
	out = np.zeros((len(path), 2), dtype = complex)
	try:
		pair, _ = sheet_match(start, sheets_at(model, path[0]))
	except DegenerateSheets as e:
		raise BranchTrackingLost("path starts on a branch point", point = path[0])
	out[0] = pair
	for k in range(1, len(path)):
		pair = _advance(model, path[k-1], path[k], pair, max_halvings)
		out[k] = pair
	return out


def _advance(model, w0, w1, pair, depth):
	try:
		new, ratio = sheet_match(pair, sheets_at(model, w1))
	except DegenerateSheets:
		raise BranchTrackingLost("path crosses a branch point near %r" % (w1,), point = w1)
	if ratio < 0.25:
		return new
	if depth == 0:
		raise BranchTrackingLost("lost track of the sheets near %r" % (w1,), point = w1)
	mid = 0.5*(w0 + w1)
	pair = _advance(model, w0, mid, pair, depth - 1)
	return _advance(model, mid, w1, pair, depth - 1)


def unwrap_log(values):
	r""" Logarithm continued along a sequence of samples

	Raises :class:`~qwkb.errors.BranchTrackingLost` when consecutive samples
	differ in argument by more than :math:`0.9\pi`.
	"""
	values = np.asarray(values, dtype = complex)
	steps = np.log(values[1:]/values[:-1])
	bad = np.abs(steps.imag) > 0.9*np.pi
	if np.any(bad):
		k = int(np.argmax(bad))
		raise BranchTrackingLost("argument jumps by %.3f between samples %d and %d" % (steps[k].imag, k, k+1),
			point = k)
	return np.log(values[0]) + np.hstack([0, np.cumsum(steps)])


class SheetLabeling:
	r""" Global labeling of the two sheets by continuation from an anchor point

	At the anchor the sheet of larger modulus is :math:`y_+`; labels
	elsewhere follow by continuation along straight paths.

	Parameters
	----------
	model: QdeModel
	anchor: complex or None
		Defaults to ``model.sheet_anchor`` and then to :math:`2Re^{i/2}`
	scale: float
		Coordinate scale :math:`R` used for the default anchor
	"""
	def __init__(self, model, anchor = None, scale = 1.):
		self.model = model
		if anchor is None:
			anchor = model.sheet_anchor
		if anchor is None:
			anchor = 2*scale*np.exp(0.5j)
		self.anchor = complex(anchor)
		self.anchor_pair = larger_first(sheets_at(model, self.anchor))

	def along(self, path, start = None):
		if start is None:
			start = self.anchor_pair
		return track_sheets(self.model, path, start)

	def at(self, w, samples = 400):
		r""" Labeled :math:`(y_+, y_-)` at ``w`` continued from the anchor """
		path = self.anchor + (complex(w) - self.anchor)*np.linspace(0, 1, samples)
		Y = self.along(path)
		return Y[-1, 0], Y[-1, 1]

	def local_angles(self, position, sign_class, theta):
		r""" Directions of the three Stokes rays leaving a branch point at phase ``theta``

		Near the branch point :math:`\int (\lambda_+ - \lambda_-) \approx K u^{3/2}`
		with :math:`u = w - w_b`; the rays are where :math:`e^{-i\vartheta}Ku^{3/2}`
		is real.
		"""
		c = self.model.cover_degree
		K = (c/position)*np.sqrt(2*sign_class*complex(self.model.dT0(position)))
		return [float((2./3)*(theta - np.angle(K) + np.pi*m)) for m in range(3)]

	def ray_sheets(self, position, sign_class, theta, ref_angle, ref_pair, radius, samples = 64):
		r""" Labeled sheets and dominance type at the start of each local Stokes ray

		The labeling ``ref_pair`` given at :math:`w_b + \rho e^{i\phi}` is continued
		around the circle of radius :math:`\rho` to each ray without crossing the
		direction opposite to :math:`\phi`.

		Returns
		-------
		list of (float, (complex, complex), str)
			Ray angle, labeled sheets and ``'+-'`` when :math:`\psi_+` dominates
		"""
		c = self.model.cover_degree
		rays = []
		for alpha in self.local_angles(position, sign_class, theta):
			delta = _wrap(alpha - ref_angle)
			phis = ref_angle + delta*np.linspace(0, 1, samples)
			pts = position + radius*np.exp(1j*phis)
			Y = track_sheets(self.model, pts, ref_pair)
			yp, ym = Y[-1]
			J0 = (2./3)*np.log(yp/ym)*c*(pts[-1] - position)/position
			kind = '+-' if (np.exp(-1j*theta)*J0).real > 0 else '-+'
			rays.append((float(ref_angle + delta), (complex(yp), complex(ym)), kind))
		return rays


def ray_shifts(rays, ref_angle, shift):
	r""" Logarithmic shift carried by each of the three rays of a branch point

	The two rays adjacent to the reference direction carry ``shift``, the ray
	farthest from it carries ``-shift``, so the three add up to ``shift``.  For
	q-Airy the branch point inside the cut from infinity emits
	:math:`(-1), (-1), (+1)`, the labels of the factors
	:math:`S^{(-1)}, S^{(-1)}, S^{(+1)}` of its monodromy.
	"""
	far = int(np.argmax([abs(_wrap(alpha - ref_angle)) for alpha, _, _ in rays]))
	return [-shift if i == far else shift for i in range(len(rays))]


def _signature(rays, ref_angle):
	ccw = [(alpha - ref_angle) % (2*np.pi) for alpha, _, _ in rays]
	return rays[int(np.argmin(ccw))][2]


def branch_points(model, theta = 0.):
	r""" Locate and classify the square-root branch points

	Roots of :math:`T_0(w) = \pm 1` are found as companion-matrix eigenvalues
	of :math:`w^{-e_{min}}(T_0(w)\mp 1)` and polished by Newton's method in
	30-digit arithmetic.  The signature of each branch point is read from
	the dominance type of its Stokes rays at phase ``theta`` under the global
	sheet labeling: branch points at the end of a logarithmic cut take their
	labels along the cut (:math:`y_+` diverging at the puncture), the others
	from the sheet anchor.

	Parameters
	----------
	model: QdeModel
	theta: float
		Phase :math:`\vartheta = \arg\hbar`

	Returns
	-------
	list of BranchPoint
		Sorted by real part, then imaginary part
	"""
	if model.is_constant():
		raise DegenerateModuli("T_0 is constant; the curve has no branch points")
	positions, signs = _branch_positions(model)
	order = sorted(range(len(positions)), key = lambda i: (round(positions[i].real, 12), round(positions[i].imag, 12)))
	positions = [positions[i] for i in order]
	signs = [signs[i] for i in order]

	scale = max(abs(p) for p in positions)
	for i, (w, s) in enumerate(zip(positions, signs)):
		if abs(w*complex(model.dT0(w))) < 1e-8:
			raise NonSimpleBranchPoint("branch point at %r is not simple" % (w,), point = w)
		for j in range(i):
			if abs(positions[j] - w) < 1e-8*scale:
				raise NonSimpleBranchPoint("branch point at %r is not simple" % (w,), point = w)

	punctures = classify_punctures(model)
	degrees = {p.location: p.degree_k for p in punctures}
	pairs = log_cut_pairs(model, positions, punctures)
	encircled = {}
	for location in ['infinity', 'origin']:
		if location in pairs and pairs[location] not in encircled:
			encircled[pairs[location]] = location

	labeling = SheetLabeling(model, scale = scale)
	bps = []
	for i, (w, s) in enumerate(zip(positions, signs)):
		others = [abs(w - p) for j, p in enumerate(positions) if j != i] + [abs(w)]
		radius = 1e-3*min(others)
		location = encircled.get(i, None)
		if location == 'infinity':
			ref_angle = float(np.angle(w))
			far = w + 10*(abs(w) + scale)*np.exp(1j*ref_angle)
			start = larger_first(sheets_at(model, far))
			path = w + np.exp(1j*ref_angle)*np.geomspace(abs(far - w), radius, 600)
		elif location == 'origin':
			ref_angle = float(np.angle(-w))
			start = larger_first(sheets_at(model, 1e-4*w))
			path = w*(1. - np.geomspace(1. - 1e-4, radius/abs(w), 600))
		else:
			ref_angle = float(np.angle(labeling.anchor - w))
			start = labeling.anchor_pair
			path = w + radius*np.exp(1j*ref_angle) + (labeling.anchor - w - radius*np.exp(1j*ref_angle))*np.linspace(1, 0, 400)
		Y = track_sheets(model, path, start)
		ref_pair = (complex(Y[-1, 0]), complex(Y[-1, 1]))

		rays = labeling.ray_sheets(w, s, theta, ref_angle, ref_pair, radius)
		signature = _signature(rays, ref_angle)
		shift = 0
		if location is not None:
			k = degrees[location]
			shift = k if signature == '+-' else -k
		bps.append(BranchPoint(complex(w), int(s), _c0(model, w, s), signature, int(shift),
			ref_angle, ref_pair, radius, location))
		logger.debug("branch point %d at %s: sign %+d, signature %s, shift %d", i, w, s, signature, shift)
	return bps


def qpochhammer(x, q, terms = None):
	r""" The q-Pochhammer symbol :math:`(x;q)_n = \prod_{k=0}^{n-1}(1 - x q^k)`

	Evaluated with :func:`mpmath.qp`; ``terms = None`` gives the infinite
	product.  It satisfies :math:`(qx;q)_\infty (1-x) = (x;q)_\infty`.

	Parameters
	----------
	x: complex
	q: complex
		Must satisfy :math:`|q| < 1`
	terms: int or None
		Number of factors

	Returns
	-------
	complex
	"""
	if abs(q) >= 1:
		raise DivergentProduct("(x;q) requires |q| < 1, got |q| = %g" % abs(q), q = q)
	if terms is not None:
		assert terms >= 1, "terms must be positive"
	if q == 0:
		return complex(1 - x)
	if terms is None:
		return complex(mpmath.qp(x, q))
	return complex(mpmath.qp(x, q, int(terms)))
