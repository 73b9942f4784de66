r""" Symbolic calculus of Stokes, transport and cut matrices

Entries of the matrices are finite sums of Laurent monomials in named
symbols: Voros symbols :math:`Y`, logarithmic shifts
:math:`\xi_k = (x/x_k)^{2\pi i/\hbar}`, soliton and charge variables
:math:`X`.  Exponents are exact rationals and coefficients exact elements of
:math:`\mathbb{Q}(i)`.
"""
import re
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

import numpy as np
import sympy
from sympy.polys.domains import QQ, QQ_I

from .errors import NonInvertibleToken, MalformedWord, MalformedDetour
from .config import DEFAULTS

__all__ = ['Symbol',
	'symbol',
	'var',
	'SymExpr',
	'Mat2',
	'PathWord',
	'parse_word',
	'stokes_matrix',
	'stokes_matrix_inv',
	'transport_matrix',
	'branch_cut_matrix',
	'log_cut_matrix',
	'log_puncture_matrices',
	'compose_path',
	'regularized_trace',
	'xi_grading',
	'substitute',
	'evaluate',
	'fg_cross_ratio',
	'framed_transport',
	'framed_words',
	]

logger = logging.getLogger(__name__)

KINDS = ('voros', 'shift', 'soliton', 'charge', 'anchor', 'path')


@dataclass(frozen = True)
class Symbol:
	r""" A named variable of the monodromy ring

	Attributes
	----------
	name: str
	kind: str
		One of ``voros``, ``shift``, ``soliton``, ``charge``, ``anchor`` or ``path``
	anchor: str or None
		For shift symbols, the branch point :math:`x_k` in :math:`(x/x_k)^{2\pi i/\hbar}`
	"""
	name: str
	kind: str = 'voros'
	anchor: str = None

	@property
	def weight(self):
		r""" Power of :math:`x^{2\pi i/\hbar}` carried by the symbol """
		return 1 if self.kind == 'shift' else 0


_SYMBOLS = {}


def _infer_kind(name):
	if name.startswith('xi'):
		return 'shift', 'x' + (name[2:] or '0')
	if name.startswith('(') and name.endswith(')'):
		return 'anchor', None
	if name.startswith('Xg') or name == 'XD0':
		return 'charge', None
	if name in ('XA', 'XB') or name.startswith('Y'):
		return 'voros', None
	if name.startswith('P'):
		return 'path', None
	return 'soliton', None


def symbol(name, kind = None, anchor = None):
	r""" The unique :class:`Symbol` of a given name

	Kinds are inferred from the name when not given: ``xi<k>`` is a shift
	anchored at ``x<k>``, ``Y..``, ``XA`` and ``XB`` are Voros symbols,
	``Xg..`` and ``XD0`` charges, ``P..`` path lifts, a parenthesized
	``(xa/xb)`` an anchor ratio and anything else a soliton variable.
	"""
	if isinstance(name, Symbol):
		return name
	assert re.match(r'^[A-Za-z(][A-Za-z0-9_/()]*$', name), "invalid symbol name %r" % (name,)
	if name in _SYMBOLS:
		s = _SYMBOLS[name]
		assert kind is None or kind == s.kind, "symbol %s already declared with kind %s" % (name, s.kind)
		assert anchor is None or anchor == s.anchor, "symbol %s already anchored at %s" % (name, s.anchor)
		return s
	k, a = _infer_kind(name)
	kind = kind or k
	anchor = anchor if anchor is not None else a
	assert kind in KINDS, "unknown symbol kind %r" % (kind,)
	s = Symbol(name, kind, anchor if kind == 'shift' else None)
	_SYMBOLS[name] = s
	return s


def _qq(e):
	if QQ.of_type(e):
		return e
	if isinstance(e, int):
		return QQ(e)
	if isinstance(e, Fraction):
		return QQ(e.numerator, e.denominator)
	return QQ.from_sympy(sympy.Rational(sympy.sympify(e)))


def _coeff(c):
	if QQ_I.of_type(c):
		return c
	if isinstance(c, int):
		return QQ_I.convert(c)
	if isinstance(c, Fraction):
		return QQ_I.from_sympy(sympy.Rational(c.numerator, c.denominator))
	if isinstance(c, complex):
		return QQ_I.from_sympy(sympy.Rational(repr(c.real)) + sympy.I*sympy.Rational(repr(c.imag)))
	return QQ_I.from_sympy(sympy.sympify(c))


def _rational(e):
	r""" sympy Rational of an exponent """
	return sympy.Rational(int(e.numerator), int(e.denominator))


class SymExpr:
	r""" Finite sum of monomials :math:`c\prod_s s^{e_s}` in named symbols

	Monomials are tuples of ``(name, exponent)`` sorted by name; zero
	coefficients and zero exponents never appear.  Instances are immutable.

	Parameters
	----------
	terms: dict
		Maps monomials to coefficients
	"""
	__slots__ = ['_terms', '_hash']

	def __init__(self, terms = None):
		out = {}
		for key, c in (terms or {}).items():
			key = tuple(sorted((symbol(s).name, _qq(e)) for s, e in key if e != 0))
			merged = {}
			for s, e in key:
				merged[s] = merged.get(s, QQ(0)) + e
			key = tuple(sorted((s, e) for s, e in merged.items() if e != 0))
			c = _coeff(c)
			out[key] = out.get(key, QQ_I.zero) + c
		self._terms = {k: c for k, c in out.items() if c != QQ_I.zero}
		self._hash = None

	@classmethod
	def constant(cls, c):
		return cls({(): c})

	@classmethod
	def monomial(cls, name, exponent = 1, coeff = 1):
		return cls({((symbol(name).name, exponent),): coeff})

	@classmethod
	def _raw(cls, terms):
		out = cls.__new__(cls)
		out._terms = {k: c for k, c in terms.items() if c != QQ_I.zero}
		out._hash = None
		return out

	def _coerce(self, other):
		if isinstance(other, SymExpr):
			return other
		return SymExpr.constant(other)

	def terms(self):
		r""" Sorted list of ``(monomial, coefficient)`` pairs """
		return sorted(self._terms.items(), key = lambda kc: tuple((s, float(e)) for s, e in kc[0]))

	def symbols(self):
		return sorted(set(s for key in self._terms for s, e in key))

	def __add__(self, other):
		other = self._coerce(other)
		out = dict(self._terms)
		for k, c in other._terms.items():
			out[k] = out.get(k, QQ_I.zero) + c
		return SymExpr._raw(out)

	__radd__ = __add__

	def __neg__(self):
		return SymExpr._raw({k: -c for k, c in self._terms.items()})

	def __sub__(self, other):
		return self + (-self._coerce(other))

	def __rsub__(self, other):
		return self._coerce(other) - self

	@staticmethod
	def _mul_keys(k1, k2):
		merged = dict(k1)
		for s, e in k2:
			merged[s] = merged.get(s, QQ(0)) + e
		return tuple(sorted((s, e) for s, e in merged.items() if e != 0))

	def __mul__(self, other):
		other = self._coerce(other)
		out = {}
		for k1, c1 in self._terms.items():
			for k2, c2 in other._terms.items():
				k = SymExpr._mul_keys(k1, k2)
				out[k] = out.get(k, QQ_I.zero) + c1*c2
		return SymExpr._raw(out)

	__rmul__ = __mul__

	def is_zero(self):
		return len(self._terms) == 0

	def is_monomial(self):
		return len(self._terms) == 1

	def inverse(self):
		r""" Inverse of a monomial """
		if not self.is_monomial():
			raise NonInvertibleToken("%s is not a monomial" % (self,), expr = self)
		(key, c), = self._terms.items()
		return SymExpr._raw({tuple((s, -e) for s, e in key): QQ_I.quo(QQ_I.one, c)})

	def __truediv__(self, other):
		return self*self._coerce(other).inverse()

	def __rtruediv__(self, other):
		return self._coerce(other)*self.inverse()

	def __pow__(self, p):
		if isinstance(p, int):
			if p < 0:
				return self.inverse()**(-p)
			out = SymExpr.constant(1)
			for _ in range(p):
				out = out*self
			return out
		p = _qq(p)
		if p.denominator == 1:
			return self**int(p.numerator)
		assert self.is_monomial(), "rational powers are defined for monomials only"
		(key, c), = self._terms.items()
		assert c == QQ_I.one, "rational powers need a unit coefficient"
		return SymExpr._raw({tuple((s, e*p) for s, e in key): c})

	def __eq__(self, other):
		if not isinstance(other, SymExpr):
			try:
				other = SymExpr.constant(other)
			except (TypeError, ValueError, sympy.SympifyError):
				return NotImplemented
		return self._terms == other._terms

	def __hash__(self):
		if self._hash is None:
			self._hash = hash(tuple((k, str(c)) for k, c in self.terms()))
		return self._hash

	def weight(self, key):
		r""" Signed sum of the exponents of shift symbols in a monomial """
		return sum((e for s, e in key if _SYMBOLS[s].kind == 'shift'), QQ(0))

	def weights(self):
		return sorted(set(self.weight(k) for k in self._terms))

	def filter(self, keep):
		r""" Sum of the terms whose monomial satisfies ``keep`` """
		return SymExpr._raw({k: c for k, c in self._terms.items() if keep(k)})

	def to_sympy(self):
		out = sympy.Integer(0)
		for key, c in self.terms():
			m = QQ_I.to_sympy(c)
			for s, e in key:
				m = m*sympy.Symbol(s)**_rational(e)
			out += m
		return out

	def __str__(self):
		if self.is_zero():
			return '0'
		return sympy.sstr(self.to_sympy(), order = 'lex')

	def __repr__(self):
		return "SymExpr(%s)" % (self,)


def var(names):
	r""" SymExpr monomials for whitespace-separated symbol names """
	out = [SymExpr.monomial(name) for name in names.split()]
	if len(out) == 1:
		return out[0]
	return out


def _as_expr(value):
	if isinstance(value, SymExpr):
		return value
	if isinstance(value, (str, Symbol)):
		return SymExpr.monomial(value)
	return SymExpr.constant(value)


class Mat2:
	r""" A 2x2 matrix with :class:`SymExpr` entries

	Parameters
	----------
	a, b, c, d:
		Entries of ``[[a, b], [c, d]]``
	truncation: int or None
		Order of the power series truncation of the entries, if any
	"""
	__slots__ = ['entries', 'truncation']

	def __init__(self, a, b, c, d, truncation = None):
		self.entries = tuple(_as_expr(v) for v in (a, b, c, d))
		self.truncation = truncation

	@classmethod
	def identity(cls):
		return cls(1, 0, 0, 1)

	@classmethod
	def diag(cls, a, d, truncation = None):
		return cls(a, 0, 0, d, truncation = truncation)

	def __getitem__(self, ij):
		i, j = ij
		return self.entries[2*i + j]

	def rows(self):
		a, b, c, d = self.entries
		return [[a, b], [c, d]]

	def _merge_truncation(self, other):
		orders = [t for t in (self.truncation, other.truncation) if t is not None]
		return min(orders) if orders else None

	def __mul__(self, other):
		if not isinstance(other, Mat2):
			other = _as_expr(other)
			return Mat2(*[e*other for e in self.entries], truncation = self.truncation)
		a, b, c, d = self.entries
		e, f, g, h = other.entries
		return Mat2(a*e + b*g, a*f + b*h, c*e + d*g, c*f + d*h, truncation = self._merge_truncation(other))

	def __rmul__(self, other):
		other = _as_expr(other)
		return Mat2(*[other*e for e in self.entries], truncation = self.truncation)

	def __add__(self, other):
		return Mat2(*[x + y for x, y in zip(self.entries, other.entries)], truncation = self._merge_truncation(other))

	def __neg__(self):
		return Mat2(*[-e for e in self.entries], truncation = self.truncation)

	def __eq__(self, other):
		if not isinstance(other, Mat2):
			return NotImplemented
		return self.entries == other.entries

	def __hash__(self):
		return hash(self.entries)

	def det(self):
		a, b, c, d = self.entries
		return a*d - b*c

	def trace(self):
		return self.entries[0] + self.entries[3]

	def is_diagonal(self):
		return self.entries[1].is_zero() and self.entries[2].is_zero()

	def adjugate(self):
		a, b, c, d = self.entries
		return Mat2(d, -b, -c, a, truncation = self.truncation)

	def inverse(self):
		r""" Inverse by the adjugate over the (monomial) determinant

		Truncated diagonal matrices are inverted entry by entry as truncated
		power series; :class:`~qwkb.errors.NonInvertibleToken` signals an
		entry outside that contract.
		"""
		if self.truncation is not None:
			if not self.is_diagonal():
				raise NonInvertibleToken("truncated matrix is not diagonal")
			a, _, _, d = self.entries
			return Mat2.diag(_series_inverse(a, self.truncation), _series_inverse(d, self.truncation),
				truncation = self.truncation)
		det = self.det()
		if det == 1:
			return self.adjugate()
		return self.adjugate()*det.inverse()

	def map(self, f):
		return Mat2(*[f(e) for e in self.entries], truncation = self.truncation)

	def __str__(self):
		a, b, c, d = [str(e) for e in self.entries]
		return "[[%s, %s], [%s, %s]]" % (a, b, c, d)

	def __repr__(self):
		return "Mat2(%s)" % (self,)


def _series_inverse(p, order):
	r""" Inverse of :math:`\sum_j c_j u^j` with :math:`c_0\ne 0` truncated at :math:`u^{order}` """
	terms = dict(p.terms())
	c0 = terms.pop((), None)
	if c0 is None:
		raise NonInvertibleToken("entry %s has no constant term" % (p,), expr = p)
	if not terms:
		return SymExpr._raw({(): QQ_I.quo(QQ_I.one, c0)})
	keys = list(terms)
	names = sorted(set(s for key in keys for s, e in key))
	vecs = [np.array([float(dict(key).get(s, 0)) for s in names]) for key in keys]
	exact = [dict(key) for key in keys]
	ref = keys[0]
	s0, e0 = ref[0]
	ratios = []
	for key, v in zip(exact, vecs):
		if set(key) != set(dict(ref)):
			raise NonInvertibleToken("entry %s is not a series in a single monomial" % (p,), expr = p)
		r = key[s0]/e0
		if any(key[s] != r*e for s, e in ref) or r <= 0:
			raise NonInvertibleToken("entry %s is not a series in a single monomial" % (p,), expr = p)
		ratios.append(r)
	num = reduce(gcd, [int(r.numerator) for r in ratios])
	den = reduce(lambda a, b: a*b//gcd(a, b), [int(r.denominator) for r in ratios])
	g = QQ(num, den)
	base = tuple((s, e*g) for s, e in ref)
	coeffs = {0: c0}
	for key, r in zip(keys, ratios):
		coeffs[int(r/g)] = terms[key]
	inv0 = QQ_I.quo(QQ_I.one, c0)
	q = [inv0]
	for n in range(1, order + 1):
		acc = QQ_I.zero
		for j in range(1, n + 1):
			if j in coeffs:
				acc += coeffs[j]*q[n-j]
		q.append(-inv0*acc)
	return SymExpr._raw({tuple((s, e*n) for s, e in base): qn for n, qn in enumerate(q)})


def _xi(xi):
	if xi is None:
		return SymExpr.constant(1)
	return _as_expr(xi)


def stokes_matrix(ell, xi = 'xi'):
	r""" The Stokes matrix :math:`S^{(\ell)} = \begin{pmatrix}-\xi^\ell & i\\ i & 0\end{pmatrix}`

	:math:`\ell = 0` gives the branch-point matrix :math:`S` with :math:`S^3 = \mathbb{I}`.
	"""
	x = _xi(xi) if ell != 0 else SymExpr.constant(1)
	return Mat2(-(x**int(ell)), 1j, 1j, 0)


def stokes_matrix_inv(ell, xi = 'xi'):
	r""" :math:`[S^{(\ell)}]^{-1} = \begin{pmatrix}0 & -i\\ -i & -\xi^\ell\end{pmatrix}` """
	x = _xi(xi) if ell != 0 else SymExpr.constant(1)
	return Mat2(0, -1j, -1j, -(x**int(ell)))


def transport_matrix(kind, Y):
	r""" Transport between the normalizations at two branch points

	``offdiag`` (opposite signatures) gives :math:`\begin{pmatrix}0 & iY\\ iY^{-1} & 0\end{pmatrix}`,
	``diag`` (equal signatures) gives :math:`\mathrm{diag}(Y, Y^{-1})`.
	"""
	Y = _as_expr(Y)
	if kind == 'offdiag':
		return Mat2(0, Y*1j, Y.inverse()*1j, 0)
	if kind == 'diag':
		return Mat2.diag(Y, Y.inverse())
	raise ValueError("transport kind must be 'offdiag' or 'diag', got %r" % (kind,))


def branch_cut_matrix():
	r""" The square-root cut :math:`\beta = \begin{pmatrix}0 & i\\ i & 0\end{pmatrix}`, :math:`\beta^2 = -\mathbb{I}` """
	return Mat2(0, 1j, 1j, 0)


def log_cut_matrix(ell, xi = 'xi'):
	r""" Jump across a logarithmic cut, :math:`\xi^{\ell\sigma_3}` """
	x = _xi(xi)
	return Mat2.diag(x**int(ell), x**(-int(ell)))


def log_puncture_matrices(k, xi = 'xi', order = None):
	r""" Diagonal Stokes matrices of a logarithmic puncture of degree ``k``

	With :math:`u = \xi^k`,

	.. math::

		L_- = \mathrm{diag}\big(1 + u^{-1}, (1+u^{-1})^{-1}\big), \qquad
		L_+ = \mathrm{diag}\big((1+u)^{-1}, 1 + u\big),

	where both inverses are expanded in powers of :math:`u`:
	:math:`(1+u)^{-1} = \sum_{j=0}^{N}(-u)^j` and
	:math:`(1+u^{-1})^{-1} = \sum_{j=1}^{N+1}(-1)^{j-1}u^j`.  The flatness
	relation :math:`L_-\,\xi^{k\sigma_3} = L_+^{-1}` then holds term by term.

	Returns
	-------
	(Mat2, Mat2)
		:math:`(L_+, L_-)`
	"""
	if order is None:
		order = DEFAULTS['truncation_order']
	assert order >= 1, "order must be positive"
	u = _xi(xi)**int(k)
	geom = reduce(lambda a, b: a + b, [(-u)**j for j in range(order + 1)])
	shifted = reduce(lambda a, b: a + b, [(u**j)*((-1)**(j-1)) for j in range(1, order + 2)])
	Lp = Mat2.diag(geom, 1 + u, truncation = order)
	Lm = Mat2.diag(1 + u.inverse(), shifted, truncation = order)
	return Lp, Lm


@dataclass(frozen = True)
class Token:
	name: str
	args: tuple = ()
	inverse: bool = False

	def __str__(self):
		s = self.name
		if self.args:
			s += '(' + ','.join(str(a) for a in self.args) + ')'
		if self.inverse:
			s += '^-1'
		return s


# name: (base name, inverse)
_ALIASES = {
	'S': ('S', False), 'Sinv': ('S', True),
	'Toff': ('Toff', False), 'Toffinv': ('Toff', True),
	'Tdiag': ('Tdiag', False), 'Tdiaginv': ('Tdiag', True),
	'Lp': ('Lp', False), 'Lpinv': ('Lp', True),
	'Lm': ('Lm', False), 'Lminv': ('Lm', True),
	'cut': ('cut', False), 'cutinv': ('cut', True), 'beta': ('cut', False),
	'logcut': ('logcut', False), 'logcutinv': ('logcut', True),
	}

_TOKEN = re.compile(r'^([A-Za-z]+)\s*(?:\(([^()]*)\))?\s*(\^\s*(?:-1|\{-1\}))?$')
_MONOMIAL = re.compile(r'^([A-Za-z][A-Za-z0-9_]*)(?:\s*\^\s*\{?(-?\d+(?:/\d+)?)\}?)?$')


class PathWord:
	r""" A product of Stokes, transport and cut matrices, read left to right

	Parameters
	----------
	tokens: list of Token
	text: str
		Source text, if parsed
	"""
	def __init__(self, tokens, text = None):
		self.tokens = list(tokens)
		self.text = text

	def __len__(self):
		return len(self.tokens)

	def __str__(self):
		return ' * '.join(str(t) for t in self.tokens)

	def __repr__(self):
		return "PathWord(%s)" % (self,)


def _int_arg(tok, a, position):
	try:
		return int(a)
	except ValueError:
		raise MalformedWord("%s expects an integer, got %r" % (tok, a), position = position)


def _monomial_arg(tok, a, position):
	m = _MONOMIAL.match(a)
	if m is None:
		raise MalformedWord("%s expects a symbol, got %r" % (tok, a), position = position)
	name, power = m.groups()
	return (name, power or '1')


def parse_word(text):
	r""" Parse a word such as ``Sinv(-1,xi1) * Toff(Y1) * Sinv(0) * Toff(Y2)``

	Tokens are separated by ``*``:

	* ``S(l[,xi])``, ``Sinv(l[,xi])``: Stokes matrices :math:`S^{(\ell)}(\xi)` and inverses
	* ``Toff(Y)``, ``Tdiag(Y)`` and ``Toffinv``, ``Tdiaginv``: transports; ``Y``
	  may carry a rational power, e.g. ``Y^2`` or ``X^1/2``
	* ``Lp(k[,xi[,order]])``, ``Lm(...)``: logarithmic puncture matrices
	* ``cut`` (or ``beta``): the square-root cut matrix
	* ``logcut(l[,xi])``: the logarithmic cut jump :math:`\xi^{\ell\sigma_3}`

	Any token may be followed by ``^-1``.  The empty word is the identity.

	Raises
	------
	MalformedWord
	"""
	tokens = []
	stripped = text.strip()
	if stripped == '':
		return PathWord([], text)
	for position, raw in enumerate(stripped.split('*')):
		raw = raw.strip()
		m = _TOKEN.match(raw)
		if m is None:
			raise MalformedWord("cannot parse token %d: %r" % (position, raw), position = position)
		name, args, inv = m.groups()
		if name not in _ALIASES:
			raise MalformedWord("unknown token %r" % name, position = position)
		base, inverse = _ALIASES[name]
		if inv:
			inverse = not inverse
		args = [a.strip() for a in args.split(',')] if args is not None and args.strip() else []
		if base == 'S':
			if not 1 <= len(args) <= 2:
				raise MalformedWord("%s takes (l[,xi])" % name, position = position)
			parsed = (_int_arg(name, args[0], position),) + tuple(_monomial_arg(name, a, position) for a in args[1:])
		elif base in ('Toff', 'Tdiag'):
			if len(args) != 1:
				raise MalformedWord("%s takes one symbol" % name, position = position)
			parsed = (_monomial_arg(name, args[0], position),)
		elif base in ('Lp', 'Lm'):
			if not 1 <= len(args) <= 3:
				raise MalformedWord("%s takes (k[,xi[,order]])" % name, position = position)
			parsed = [_int_arg(name, args[0], position)]
			if len(args) > 1:
				parsed.append(_monomial_arg(name, args[1], position))
			if len(args) > 2:
				parsed.append(_int_arg(name, args[2], position))
			parsed = tuple(parsed)
		elif base == 'cut':
			if args:
				raise MalformedWord("cut takes no arguments", position = position)
			parsed = ()
		else:
			if not 1 <= len(args) <= 2:
				raise MalformedWord("%s takes (l[,xi])" % name, position = position)
			parsed = (_int_arg(name, args[0], position),) + tuple(_monomial_arg(name, a, position) for a in args[1:])
		tokens.append(Token(base, parsed, inverse))
	return PathWord(tokens, text)


def _monomial(arg):
	name, power = arg
	return SymExpr.monomial(name, sympy.Rational(power))


def _token_matrix(tok, order):
	args = tok.args
	if tok.name == 'S':
		xi = _monomial(args[1]) if len(args) > 1 else 'xi'
		if tok.inverse:
			return stokes_matrix_inv(args[0], xi)
		return stokes_matrix(args[0], xi)
	if tok.name == 'Toff':
		M = transport_matrix('offdiag', _monomial(args[0]))
	elif tok.name == 'Tdiag':
		M = transport_matrix('diag', _monomial(args[0]))
	elif tok.name == 'cut':
		M = branch_cut_matrix()
	elif tok.name == 'logcut':
		xi = _monomial(args[1]) if len(args) > 1 else 'xi'
		M = log_cut_matrix(args[0], xi)
	else:
		xi = _monomial(args[1]) if len(args) > 1 else 'xi'
		Lp, Lm = log_puncture_matrices(args[0], xi, args[2] if len(args) > 2 else order)
		M = Lp if tok.name == 'Lp' else Lm
	if tok.inverse:
		try:
			return M.inverse()
		except NonInvertibleToken as e:
			raise NonInvertibleToken("token %s: %s" % (tok, e), token = str(tok))
	return M


def compose_path(word, order = None):
	r""" Multiply the matrices of a path word from left to right

	Parameters
	----------
	word: PathWord or str
	order: int
		Truncation order for logarithmic puncture tokens without an explicit one

	Returns
	-------
	Mat2
	"""
	if isinstance(word, str):
		word = parse_word(word)
	if order is None:
		order = DEFAULTS['truncation_order']
	M = Mat2.identity()
	for tok in word.tokens:
		M = M*_token_matrix(tok, order)
	if M.truncation is None:
		assert M.det() == 1, "determinant of %s is not 1" % (word,)
	return M


def _rewrite_anchors(key):
	r""" Replace a weight-zero product of shift symbols by anchor ratios :math:`(x_a/x_b)^{2\pi i/\hbar}` """
	exps = {}
	rest = []
	for s, e in key:
		sym = _SYMBOLS[s]
		if sym.kind == 'shift':
			exps[sym.anchor] = exps.get(sym.anchor, QQ(0)) + e
		else:
			rest.append((s, e))
	anchors = sorted(a for a, e in exps.items() if e != 0)
	if anchors:
		ref = anchors[0]
		for a in anchors[1:]:
			name = '(%s/%s)' % (ref, a)
			symbol(name, 'anchor')
			rest.append((name, exps[a]))
	return SymExpr._mul_keys(tuple(rest), ())


def regularized_trace(m, mode = 'xi_graded'):
	r""" Trace of the weight-zero part of a q-periodic monodromy matrix

	Parameters
	----------
	m: Mat2
	mode: str
		``xi_graded`` keeps every term of total shift weight zero and writes
		products such as :math:`\xi_1^{-1}\xi_2` as anchor ratios
		:math:`(x_1/x_2)^{2\pi i/\hbar}`; ``drop_all_xi`` keeps only the terms
		free of shift symbols.

	Returns
	-------
	SymExpr
	"""
	tr = m.trace()
	if mode == 'drop_all_xi':
		return tr.filter(lambda key: all(_SYMBOLS[s].kind != 'shift' for s, e in key))
	if mode != 'xi_graded':
		raise ValueError("mode must be 'xi_graded' or 'drop_all_xi', got %r" % (mode,))
	out = {}
	for key, c in tr.terms():
		if tr.weight(key) != 0:
			continue
		k = _rewrite_anchors(key)
		out[k] = out.get(k, QQ_I.zero) + c
	return SymExpr._raw(out)


def xi_grading(m):
	r""" Split a matrix into its blocks of fixed shift weight

	Returns
	-------
	dict
		Maps each weight (a ``Fraction``) to the Mat2 of terms of that weight
	"""
	weights = set()
	for e in m.entries:
		weights.update(e.weights())
	out = {}
	for w in sorted(weights):
		out[Fraction(int(w.numerator), int(w.denominator))] = m.map(lambda e: e.filter(lambda key: e.weight(key) == w))
	return out


def substitute(expr, mapping):
	r""" Replace symbols by expressions

	Parameters
	----------
	expr: SymExpr or Mat2
	mapping: dict
		Symbol names to SymExpr (or anything convertible); non-integer
		exponents require monomial replacements with unit coefficient
	"""
	if isinstance(expr, Mat2):
		return expr.map(lambda e: substitute(e, mapping))
	mapping = {symbol(k).name: _as_expr(v) for k, v in mapping.items()}
	out = SymExpr()
	for key, c in expr.terms():
		term = SymExpr._raw({(): c})
		kept = []
		for s, e in key:
			if s in mapping:
				term = term*(mapping[s]**e)
			else:
				kept.append((s, e))
		out = out + term*SymExpr._raw({tuple(kept): QQ_I.one})
	return out


def evaluate(expr, values):
	r""" Numeric value of an expression

	Parameters
	----------
	expr: SymExpr or Mat2
	values: dict
		Complex value for every symbol name; rational powers use the
		principal branch

	Returns
	-------
	complex or np.ndarray((2,2))
	"""
	if isinstance(expr, Mat2):
		return np.array([[evaluate(e, values) for e in row] for row in expr.rows()], dtype = complex)
	total = 0j
	for key, c in expr.terms():
		term = complex(QQ_I.to_sympy(c))
		for s, e in key:
			if s not in values:
				raise KeyError("no value given for symbol %s" % s)
			if e.denominator == 1:
				term *= complex(values[s])**int(e.numerator)
			else:
				term *= complex(values[s])**(float(e.numerator)/float(e.denominator))
		total += term
	return total


def _wedge(u, v):
	return u[0]*v[1] - u[1]*v[0]


def fg_cross_ratio(case, ell, ell_p, Y = 'Y', xi_b = 'xib', xi_bp = 'xibp'):
	r""" Cross-ratio of the four vanishing solutions around an edge

	The solutions :math:`\mathfrak{s}_1, \mathfrak{s}_2` are the columns of the
	normalization at :math:`\mathfrak{b}`; :math:`\mathfrak{s}_3, \mathfrak{s}_4` are
	the columns of :math:`S^{(\ell')}(\xi_{\mathfrak{b}'})\,T^{-1}\,[S^{(-\ell)}(\xi_\mathfrak{b})]^{-1}`
	expressed in that basis, with :math:`T` anti-diagonal for opposite
	signatures and diagonal for equal signatures.  The returned quantity is

	.. math::

		\frac{(\mathfrak{s}_1\wedge\mathfrak{s}_2)(\mathfrak{s}_3\wedge\mathfrak{s}_4)}
			{(\mathfrak{s}_2\wedge\mathfrak{s}_3)(\mathfrak{s}_1\wedge\mathfrak{s}_4)},

	with the orientation of the last wedge reversed for equal signatures.
	In that case the reversed wedge makes the result :math:`+1` for
	:math:`\ell = \ell' = 0`; the formula as written above gives :math:`-1`.

	Parameters
	----------
	case: str
		``opposite_signature`` or ``same_signature``
	ell, ell_p: int
		Logarithmic shifts at the two branch points

	Returns
	-------
	SymExpr
	"""
	if case == 'opposite_signature':
		T = transport_matrix('offdiag', Y)
	elif case == 'same_signature':
		T = transport_matrix('diag', Y)
	else:
		raise ValueError("case must be 'opposite_signature' or 'same_signature', got %r" % (case,))
	M = stokes_matrix(ell_p, xi_bp)*T.inverse()*stokes_matrix_inv(-ell, xi_b)
	one, zero = SymExpr.constant(1), SymExpr.constant(0)
	s1 = (zero, one)
	s2 = (one, zero)
	s3 = (M[0, 1], M[1, 1])
	s4 = (M[0, 0], M[1, 0])
	num = _wedge(s1, s2)*_wedge(s3, s4)
	if case == 'opposite_signature':
		den = _wedge(s2, s3)*_wedge(s1, s4)
	else:
		den = _wedge(s2, s3)*_wedge(s4, s1)
	return num/den


def _sheets_of(detour_type):
	(i, j), n = detour_type[:2], detour_type[2] if len(detour_type) > 2 else 0
	return str(i), str(j), int(n)


def framed_words(detours, lifts):
	r""" Closed words in the product of unipotent detour matrices

	Each detour of type :math:`(ij, n)` contributes :math:`1 + X E_{ij}`; a word
	starting on sheet :math:`s` survives in the trace when the sheets chain
	up and return to :math:`s`.

	Parameters
	----------
	detours: list of (name, (i, j, n))
	lifts: dict
		Path-lift symbol for each sheet, e.g. ``{'i': 'P_i', 'j': 'P_j'}``

	Returns
	-------
	list of (str, tuple of str, int)
		Start sheet, detour names and net logarithmic shift of each word
	"""
	sheets = list(lifts)
	parsed = []
	for name, kind in detours:
		i, j, n = _sheets_of(kind)
		if i not in lifts or j not in lifts:
			raise MalformedDetour("detour %s of type (%s%s,%d) leaves the sheets %s" % (name, i, j, n, sheets),
				detour = name)
		parsed.append((symbol(name).name, i, j, n))

	words = []
	def walk(start, current, k, chosen, shift):
		if k == len(parsed):
			if current == start:
				words.append((start, tuple(chosen), shift))
			return
		walk(start, current, k + 1, chosen, shift)
		name, i, j, n = parsed[k]
		if i == current:
			walk(start, j, k + 1, chosen + [name], shift + n)

	for s in sheets:
		walk(s, s, 0, [], 0)
	return words


def framed_transport(detours, lifts, keep_all = False):
	r""" Trace of a framed transport, keeping words of zero net logarithmic shift

	Parameters
	----------
	detours: list of (name, (i, j, n))
		Soliton variables and their types, in the order met along the path
	lifts: dict
		Path-lift symbol of each sheet
	keep_all: bool
		If True, return every term of the trace without filtering

	Returns
	-------
	SymExpr
	"""
	out = SymExpr()
	for start, names, shift in framed_words(detours, lifts):
		if shift != 0 and not keep_all:
			continue
		term = SymExpr.monomial(lifts[start])
		for name in names:
			term = term*SymExpr.monomial(name)
		out = out + term
	return out
