r""" Built-in q-difference equations with their monodromy data

Each bundle wires a :class:`~qwkb.curve.QdeModel` to the path words of its
monodromies, the closed form of their regularized traces, numeric closures
for the Voros symbols and the dictionary relating Voros symbols to charge
variables :math:`X_\gamma`.

========================  ==================================================  =====
name                      equation                                            cover
========================  ==================================================  =====
``qairy``                 :math:`\psi(qx)+\psi(q^{-1}x) = 2x\psi(x)`           1
``qairy_kappa``           :math:`\ldots = 2(x+\kappa)\psi(x)`                  1
``qhyper``                :math:`\ldots = 2Q^{-1}(q^{-1}x^{1/2}+x^{-1/2})\psi`  2
``qmathieu``              :math:`\ldots = (\kappa-\tau(x+x^{-1}))\psi(x)`      1
``qramanujan``            :math:`\ldots = 2x^{-1/2}\psi(x)`                    2
========================  ==================================================  =====
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import sympy

from .curve import QdeModel, exact_number, classify_punctures
from .stokesalg import (SymExpr, Mat2, var, parse_word, compose_path, regularized_trace,
	substitute, evaluate, symbol)
from .errors import DegenerateModuli, IncompleteAssignment, ConfigError

__all__ = ['ModelBundle',
	'builtin',
	'list_builtins',
	'charge_map',
	'verify_bundle',
	'mathieu_rescaled',
	'airy_kappa_deviation',
	'hyper_matches_mathieu',
	]

logger = logging.getLogger(__name__)


@dataclass
class ModelBundle:
	r""" A model together with its curated monodromy data

	Attributes
	----------
	model: QdeModel
	paths: dict
		Name to :class:`~qwkb.stokesalg.PathWord`
	expected: dict
		Name to the expected regularized trace of the path
	modes: dict
		Name to the regularization mode used for the path
	expected_matrices: dict
		Name to the expected :class:`~qwkb.stokesalg.Mat2` of the path, where
		the full matrix is known
	closures: dict
		Name to ``(path, values, trace)``: ``values(hbar)`` gives numeric Voros
		symbols and ``trace(hbar)`` the resulting value of the trace
	charge_dictionary: dict
		Charge name to a monomial in Voros symbols and anchor constants
	charge_expected: dict
		Path name to the expected trace in charge variables
	edges: dict
		Named open lifts between branch points for leading-order Voros
		exponents: ``start``, ``end`` (branch point names), ``via``
		(intermediate points) and ``shift`` (logarithmic shift
		:math:`\Delta n` of the integrand)
	cycles: dict
		Charges as integer combinations of edges: ``edges`` maps edge names to
		coefficients and ``d0`` counts copies of the D0 charge, whose exponent
		is :math:`-4\pi^2/\hbar`
	branch_names: dict
		Branch point name to position
	charge_relations: list
		``(name, lhs, rhs)`` with ``lhs`` in charge variables that must equal
		``rhs`` after substituting the charge dictionary
	cycle_total: float or None
		Expected sum of :math:`\hbar` times the leading Voros exponents of
		``cycles``; for q-Mathieu this is :math:`\hbar\log X_{D0} = -4\pi^2`
	"""
	model: QdeModel
	paths: dict = field(default_factory = dict)
	expected: dict = field(default_factory = dict)
	modes: dict = field(default_factory = dict)
	expected_matrices: dict = field(default_factory = dict)
	closures: dict = field(default_factory = dict)
	charge_dictionary: dict = field(default_factory = dict)
	charge_expected: dict = field(default_factory = dict)
	edges: dict = field(default_factory = dict)
	cycles: dict = field(default_factory = dict)
	branch_names: dict = field(default_factory = dict)
	charge_relations: list = field(default_factory = list)
	cycle_total: float = None

	@property
	def name(self):
		return self.model.name

	def add_path(self, name, word, expected = None, mode = 'xi_graded', matrix = None):
		self.paths[name] = parse_word(word)
		self.modes[name] = mode
		if expected is not None:
			self.expected[name] = expected
		if matrix is not None:
			self.expected_matrices[name] = matrix

	def monodromy(self, name):
		return compose_path(self.paths[name])

	def trace(self, name, mode = None):
		return regularized_trace(self.monodromy(name), mode or self.modes[name])


def _param(params, key, default):
	r""" Numeric and exact value of a modulus """
	value = params.pop(key, default)
	exact = exact_number(value)
	return complex(exact), exact


def _diamond(rho):
	r""" Square of half diagonal ``rho`` around the origin, traversed counterclockwise from ``-rho`` """
	return [-rho, -1j*rho, rho, 1j*rho, -rho]


def _qairy(params):
	model = QdeModel('qairy', [{1: 1}], parameters = {}, symmetries = ('conj',))
	bundle = ModelBundle(model)
	Y, xi = var('Y xi')
	bundle.add_path('full_loop', 'cut*cut*Sinv(-1,xi)*Toff(Y)*Sinv(0)*Toff(Y)',
		expected = -Y**2 - Y**-2,
		matrix = Mat2(-Y**-2, 0, (xi.inverse()*Y**-2 + 1)*1j, -Y**2))
	bundle.closures['birkhoff'] = ('full_loop',
		lambda hbar: {'Y': 1j*np.exp(-np.pi**2/(2*hbar))},
		lambda hbar: np.exp(np.pi**2/hbar) + np.exp(-np.pi**2/hbar))
	bundle.branch_names = {'x1': -1., 'x2': 1.}
	bundle.edges = {'d0_loop': {'start': 'x1', 'end': 'x1', 'via': _diamond(0.5), 'shift': 0}}
	bundle.cycles = {'d0_loop': {'edges': {'d0_loop': 1}}}
	bundle.cycle_total = 2*np.pi**2
	return bundle


def _qramanujan(params):
	# q-Airy in the variable x -> x^{-2}, on the double cover x = w^2
	model = QdeModel('qramanujan', [{-1: 1}], cover_degree = 2, symmetries = ('conj',))
	bundle = _qairy(params)
	bundle.model = model
	bundle.branch_names = {'x1': -1., 'x2': 1.}
	# the origin is a logarithmic puncture here
	bundle.edges = {}
	bundle.cycles = {}
	bundle.cycle_total = None
	return bundle


def _qairy_kappa(params):
	kappa, k = _param(params, 'kappa', 0.5)
	if k == 1 or k == -1:
		raise DegenerateModuli("qairy_kappa: a branch point meets the puncture at x = 0 when kappa = %s" % k,
			kappa = kappa)
	model = QdeModel('qairy_kappa', [{1: 1, 0: k}], parameters = {'kappa': kappa},
		symmetries = ('conj',) if kappa.imag == 0 else ())
	bundle = ModelBundle(model)
	Y1, Y2, xi = var('Y1 Y2 xi')
	bundle.add_path('full_loop', 'cut*cut*Sinv(-1,xi)*Toff(Y1)*Sinv(0)*Toff(Y2)',
		expected = -Y1*Y2 - (Y1*Y2).inverse())
	origin = [p for p in classify_punctures(model) if p.location == 'origin'][0]
	mu = origin.mu
	bundle.closures['residue'] = ('full_loop',
		lambda hbar: {'Y1': -np.exp(2j*np.pi*mu/hbar), 'Y2': 1.},
		lambda hbar: np.exp(2j*np.pi*mu/hbar) + np.exp(-2j*np.pi*mu/hbar))
	bundle.branch_names = {'x1': -kappa - 1, 'x2': -kappa + 1}
	rho = 0.5*min(abs(-kappa - 1), abs(-kappa + 1))
	bundle.edges = {'d0_loop': {'start': 'x1', 'end': 'x1', 'via': _diamond(rho), 'shift': 0}}
	bundle.cycles = {'d0_loop': {'edges': {'d0_loop': 1}}}
	if kappa.imag == 0 and abs(kappa) < 1:
		bundle.cycle_total = 4*np.pi**2 - 4*np.pi*np.arccos(kappa.real)
	return bundle


def _conifold_paths(bundle):
	XA, XB = var('XA XB')
	bundle.add_path('full_loop', 'Sinv(-1,xi1)*Tdiaginv(XB)*S(0)*Toffinv(XA)*Sinv(0)*Tdiag(XB)*S(1,xi2)*Toff(XA)',
		expected = XB**2 + XB**-2 + XA**2*XB**-2, mode = 'drop_all_xi')
	bundle.add_path('half_monodromy', 'Sinv(-1,xi1)*Tdiaginv(XB)*S(0)*Toffinv(XA)',
		expected = XA/XB, mode = 'drop_all_xi')
	bundle.charge_dictionary = {'Xg1': XA**2*XB**-4, 'Xg2': XA**2}
	Xg1, Xg2 = var('Xg1 Xg2')
	bundle.charge_expected = {'half_monodromy': (Xg1*Xg2)**sympy.Rational(1, 4)}


def _qhyper(params):
	Q, q = _param(params, 'Q', 0.97)
	if q == 0:
		raise ConfigError("qhyper: Q must be nonzero")
	if sympy.expand(q**2 - 4) == 0:
		raise DegenerateModuli("qhyper: branch points collide at Q = %s" % q, Q = Q)
	Tk = [{1: 1/q, -1: 1/q}]
	for k in range(1, 9):
		Tk.append({1: (-1)**k/(q*sympy.factorial(k))})
	model = QdeModel('qhyper', Tk, cover_degree = 2, parameters = {'Q': Q}, symmetries = ('neg', 'inv'))
	bundle = ModelBundle(model)
	_conifold_paths(bundle)
	return bundle


def _mathieu_branch_names(kappa, tau):
	out = {}
	for s, (a, b) in [(1, ('x1', 'x2')), (-1, ('x3', 'x4'))]:
		d = np.sqrt(complex((kappa - 2*s)**2 - 4*tau**2))
		# x3 is the outer root of the pair with s = -1
		sgn = 1 if s == 1 else -1
		out[a] = complex((kappa - 2*s - sgn*d)/(2*tau))
		out[b] = complex((kappa - 2*s + sgn*d)/(2*tau))
	return out


def _qmathieu(params):
	kappa, k = _param(params, 'kappa', 0.03j)
	tau, t = _param(params, 'tau', 0.97)
	if t == 0:
		raise DegenerateModuli("qmathieu: tau = 0 leaves a constant T_0", tau = tau)
	if sympy.expand((k - 2)**2 - 4*t**2) == 0 or sympy.expand((k + 2)**2 - 4*t**2) == 0:
		raise DegenerateModuli("qmathieu: branch points collide at kappa = %s, tau = %s" % (k, t),
			kappa = kappa, tau = tau)
	if k == 2 or k == -2:
		raise DegenerateModuli("qmathieu: a regular puncture collides at kappa = %s" % k, kappa = kappa)
	symmetries = ('inv', 'neg') if k == 0 else ('inv',)
	model = QdeModel('qmathieu', [{0: k/2, 1: -t/2, -1: -t/2}], parameters = {'kappa': kappa, 'tau': tau},
		symmetries = symmetries)
	bundle = ModelBundle(model)
	Y31, Y42, Y43, Y21 = var('Y31 Y42 Y43 Y21')
	rho = SymExpr.monomial(symbol('(x1/x2)', 'anchor'))
	bundle.add_path('full_loop', 'Sinv(-1,xi1)*Tdiaginv(Y31)*S(0)*Toffinv(Y43)*Sinv(0)*Tdiag(Y42)*S(1,xi2)*Toff(Y21)',
		expected = Y31*Y42*Y43*Y21*rho + Y43*Y21/(Y31*Y42) + Y21/(Y31*Y42*Y43) + Y31*Y42*Y43/Y21)
	bundle.add_path('lift_gamma3', 'Tdiag(Y42)*cut*Toff(Y21)*cut*Tdiaginv(Y31)*cut',
		expected = Y31*Y42/Y21 + Y21/(Y31*Y42),
		matrix = Mat2.diag(Y31*Y42/Y21, Y21/(Y31*Y42)))
	bundle.add_path('lift_gamma1', 'Tdiaginv(Y31)*cut*Toffinv(Y43)*cut*Tdiag(Y42)*cut',
		expected = -(Y31*Y43*Y42).inverse() - Y31*Y43*Y42,
		matrix = Mat2.diag(-(Y31*Y43*Y42).inverse(), -Y31*Y43*Y42))

	XD0 = var('XD0')
	bundle.charge_dictionary = {
		'Xg1': XD0*rho.inverse()*(Y31*Y42*Y43)**-2,
		'Xg2': rho*Y21**2,
		'Xg3': (Y31*Y42/Y21)**2,
		'Xg4': Y43**2,
		}
	Xg1, Xg2, Xg3, Xg4 = var('Xg1 Xg2 Xg3 Xg4')
	bundle.charge_relations = [('D0', Xg1*Xg2*Xg3*Xg4, XD0)]
	half = sympy.Rational(1, 2)
	bundle.charge_expected = {'full_loop': Xg2*Xg3**half*Xg4**half + Xg3**-half*Xg4**half
		+ Xg3**-half*Xg4**-half + Xg3**half*Xg4**half}

	bundle.branch_names = _mathieu_branch_names(kappa, tau)
	names = bundle.branch_names
	r_in = min(abs(names['x2']), abs(names['x4']))
	r_out = max(abs(names['x1']), abs(names['x3']))
	bundle.edges = {
		'e21': {'start': 'x2', 'end': 'x1', 'via': [], 'shift': 0},
		'e21_log': {'start': 'x2', 'end': 'x1', 'via': [], 'shift': -1},
		'e43': {'start': 'x4', 'end': 'x3', 'via': [], 'shift': 0},
		# inner pair joined above the origin, outer pair below it
		'e42': {'start': 'x4', 'end': 'x2', 'via': [0.6j*r_in], 'shift': 0},
		'e31': {'start': 'x3', 'end': 'x1', 'via': [-1.25j*r_out], 'shift': 0},
		}
	bundle.cycles = {
		'gamma1': {'edges': {'e21': 1, 'e21_log': -1, 'e31': -1, 'e43': -1, 'e42': -1}, 'd0': 1},
		'gamma2': {'edges': {'e21_log': 1}},
		'gamma3': {'edges': {'e31': 1, 'e42': 1, 'e21': -1}},
		'gamma4': {'edges': {'e43': 1}},
		}
	bundle.cycle_total = -4*np.pi**2
	return bundle


_BUILTINS = {
	'qairy': (_qairy, "q-Airy: T = x"),
	'qairy_kappa': (_qairy_kappa, "q-Airy with mass: T = x + kappa (kappa = 1/2)"),
	'qhyper': (_qhyper, "q-hypergeometric (conifold): T = Q^-1 (q^-1 x^1/2 + x^-1/2) (Q = 0.97)"),
	'qmathieu': (_qmathieu, "q-Mathieu (local F0): 2T = kappa - tau (x + 1/x) (kappa = 0.03i, tau = 0.97)"),
	'qramanujan': (_qramanujan, "Ramanujan function: T = x^-1/2"),
	}


def list_builtins():
	r""" Names and one-line descriptions of the built-in models """
	return [(name, desc) for name, (_, desc) in sorted(_BUILTINS.items())]


def builtin(name, params = None):
	r""" Construct a built-in model bundle

	Parameters
	----------
	name: str
		One of ``qairy``, ``qairy_kappa``, ``qhyper``, ``qmathieu``, ``qramanujan``
	params: dict
		Moduli: ``kappa`` for qairy_kappa; ``Q`` for qhyper; ``kappa`` and
		``tau`` for qmathieu.  Floats are read exactly from their decimal form.

	Returns
	-------
	ModelBundle

	Raises
	------
	DegenerateModuli
		When branch points collide with each other or with a puncture
	ConfigError
		For unknown names or parameters
	"""
	if name not in _BUILTINS:
		raise ConfigError("unknown builtin model %r; choose from %s" % (name, ', '.join(sorted(_BUILTINS))))
	params = dict(params or {})
	bundle = _BUILTINS[name][0](params)
	if params:
		raise ConfigError("unknown parameters for %s: %s" % (name, ', '.join(sorted(params))))
	logger.debug("built %s with paths %s", bundle.model, sorted(bundle.paths))
	return bundle


def _exponents(expr_key, names):
	d = dict(expr_key)
	return [sympy.Rational(int(d[s].numerator), int(d[s].denominator)) if s in d else 0 for s in names]


def charge_map(bundle, expr, assignment = None):
	r""" Rewrite an expression in Voros symbols as one in charge variables

	Every monomial :math:`\prod_s s^{v_s}` of ``expr`` is written as
	:math:`\prod_\gamma X_\gamma^{a_\gamma}` with rational :math:`a_\gamma` solving
	:math:`\sum_\gamma a_\gamma\, e(\gamma) = v`, where :math:`e(\gamma)` is the exponent
	vector of the assigned monomial of :math:`X_\gamma`.  When the assigned
	monomials are linearly dependent the free coefficients are set to zero.

	Parameters
	----------
	bundle: ModelBundle or None
	expr: SymExpr
	assignment: dict or None
		Charge name to monomial; defaults to ``bundle.charge_dictionary``

	Returns
	-------
	SymExpr

	Raises
	------
	IncompleteAssignment
		If a monomial of ``expr`` is not a product of powers of the assigned monomials
	"""
	if assignment is None:
		assignment = bundle.charge_dictionary
	assignment = {symbol(k).name: v if isinstance(v, SymExpr)
		else SymExpr.monomial(v) for k, v in assignment.items()}
	charges = sorted(assignment)
	for c in charges:
		if not assignment[c].is_monomial():
			raise IncompleteAssignment("charge %s is not assigned a monomial" % c, charge = c)
	names = sorted(set(s for c in charges for s in assignment[c].symbols()) | set(expr.symbols()))
	columns = [_exponents(assignment[c].terms()[0][0], names) for c in charges]
	A = sympy.Matrix(len(names), len(charges), lambda i, j: columns[j][i])

	out = SymExpr()
	for key, coeff in expr.terms():
		v = sympy.Matrix(_exponents(key, names))
		try:
			sol, params = A.gauss_jordan_solve(v)
		except ValueError:
			raise IncompleteAssignment("term %s is not expressible in %s" % (SymExpr({key: coeff}), ', '.join(charges)),
				term = str(SymExpr({key: coeff})))
		if params.shape[0] > 0:
			sol = sol.subs({p: 0 for p in params})
		term = SymExpr({(): coeff})
		for c, a in zip(charges, sol):
			if a != 0:
				term = term*SymExpr.monomial(c, sympy.Rational(a))
		out = out + term
	return out


def verify_bundle(bundle):
	r""" Check every curated identity of a bundle

	Returns
	-------
	list of (str, bool, str, str)
		Check name, whether it passed, expected and obtained values
	"""
	results = []
	for name in sorted(bundle.paths):
		M = bundle.monodromy(name)
		if name in bundle.expected_matrices:
			want = bundle.expected_matrices[name]
			results.append(('%s.matrix' % name, M == want, str(want), str(M)))
		if name in bundle.expected:
			got = regularized_trace(M, bundle.modes[name])
			want = bundle.expected[name]
			results.append(('%s.trace' % name, got == want, str(want), str(got)))
		if name in bundle.charge_expected:
			got = charge_map(bundle, regularized_trace(M, bundle.modes[name]))
			want = bundle.charge_expected[name]
			results.append(('%s.charges' % name, got == want, str(want), str(got)))
	for name, lhs, rhs in bundle.charge_relations:
		got = substitute(lhs, bundle.charge_dictionary)
		results.append(('relation.%s' % name, got == rhs, str(rhs), str(got)))
	hbar = 1.7
	for name, (path, values, trace) in sorted(bundle.closures.items()):
		if path not in bundle.paths:
			continue
		got = evaluate(bundle.trace(path), values(hbar))
		want = trace(hbar)
		ok = abs(got - want) <= 1e-10*max(1., abs(want))
		results.append(('%s.closure' % name, ok, repr(complex(want)), repr(complex(got))))
	return results


def mathieu_rescaled(kappa, tau):
	r""" Laurent coefficients of the q-Mathieu :math:`T_0` after :math:`x\to -2x/\tau`, :math:`\kappa\to 2\kappa`

	Returns
	-------
	dict
		Exponent to coefficient of :math:`\kappa + x + \tau^2/(4x)`
	"""
	k, t = exact_number(kappa), exact_number(tau)
	model = builtin('qmathieu', {'kappa': 2*k, 'tau': t}).model
	return {e: sympy.expand(c*(-2/t)**e) for e, c in model.T(0).items()}


def airy_kappa_deviation(kappa, tau):
	r""" Largest coefficient difference between the rescaled q-Mathieu curve and q-Airy with mass

	The difference is :math:`\tau^2/4`, so the curves agree as :math:`\tau\to 0`.
	"""
	mathieu = mathieu_rescaled(kappa, tau)
	airy = builtin('qairy_kappa', {'kappa': exact_number(kappa)}).model.T(0)
	keys = set(mathieu) | set(airy)
	return max(abs(complex(mathieu.get(e, 0) - airy.get(e, 0))) for e in keys)


def hyper_matches_mathieu(Q):
	r""" Whether q-hypergeometric :math:`T_0` on its double cover equals q-Mathieu at :math:`\kappa=0`, :math:`\tau=-2/Q` """
	q = exact_number(Q)
	hyper = builtin('qhyper', {'Q': q}).model.T(0)
	mathieu = builtin('qmathieu', {'kappa': 0, 'tau': -2/q}).model.T(0)
	keys = set(hyper) | set(mathieu)
	return all(sympy.expand(hyper.get(e, 0) - mathieu.get(e, 0)) == 0 for e in keys)
