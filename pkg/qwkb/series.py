r""" All-order WKB series from the q-Riccati equation

The ratio :math:`\mathcal{R}(x) = \psi(qx)/\psi(x)` of a solution satisfies

.. math::

	\mathcal{R}(x)\mathcal{R}(q^{-1}x) - 2T(x,\hbar)\mathcal{R}(q^{-1}x) + 1 = 0,

which is solved order by order in :math:`\hbar` starting from
:math:`\mathcal{R}_0 = y_\pm = T_0 \pm r`, :math:`r = \sqrt{T_0^2-1}`.  All
coefficients live in the ring of expressions :math:`a + b r` with :math:`a, b`
rational functions of the cover coordinate; arithmetic is exact over
:math:`\mathbb{Q}(i)`.
"""
import logging
from math import factorial

import mpmath
import numpy as np
import sympy
from sympy.polys.rings import ring
from sympy.polys.domains import QQ_I

from .errors import ResidualTooLarge, DegenerateSheets
from .config import DEFAULTS

__all__ = ['SeriesRing',
	'RationalExpr',
	'LogTerm',
	'RiccatiSeries',
	'LogRSeries',
	'riccati_coeffs',
	'log_r_coeffs',
	'log_r_direct',
	's_coeffs',
	'verify_riccati',
	]

logger = logging.getLogger(__name__)


def _lowest_power(p):
	return min(m[0] for m in p.monoms())


class SeriesRing:
	r""" Exact arithmetic on :math:`a + b\,r` with :math:`r^2 = T_0^2 - 1`

	Elements are stored as :math:`(A + B r)/(w^i P^j)` where :math:`A, B` are
	polynomials over :math:`\mathbb{Q}(i)` in the cover coordinate, :math:`i,j\ge 0`
	and :math:`P` is the monic part of the numerator of :math:`T_0^2-1`, so
	that :math:`T_0^2 - 1 = \lambda P w^d`.  The coordinate is called ``x``
	when the model lives on the x-plane and ``w`` on a double cover.

	Parameters
	----------
	model: QdeModel
	"""
	def __init__(self, model):
		self.model = model
		self.cover_degree = model.cover_degree
		self.var = 'x' if model.cover_degree == 1 else 'w'
		self.R, self.W = ring(self.var, QQ_I)

		T0, m0 = self._laurent_poly(model.T(0))
		# T0^2 - 1 = (tau^2 - W^{2 m0}) / W^{2 m0}
		Dn = T0**2 - self.W**(2*m0)
		if Dn == 0:
			raise DegenerateSheets("T_0^2 - 1 vanishes identically")
		s = _lowest_power(Dn)
		Dn = self._shift(Dn, -s)
		self.lam = Dn.LC
		self.P = Dn.monic()
		self.dexp = s - 2*m0
		self._P_prime = self.P.diff(self.W)

		self.zero = RationalExpr(self, self.R.zero, self.R.zero)
		self.one = RationalExpr(self, self.R.one, self.R.zero)
		self.r = RationalExpr(self, self.R.zero, self.R.one)
		self._T = {}
		T0e = self.T(0)
		theta_T0 = self.from_laurent({e: c*sympy.Rational(e, self.cover_degree) for e, c in model.T(0).items()})
		# theta r = (T0 theta T0 / D) r
		self._G = T0e*theta_T0*self.inv_D()

	def _shift(self, p, k):
		r""" Multiply a polynomial by :math:`w^k`; requires exact divisibility for k < 0 """
		if p == 0:
			return p
		return self.R.from_dict({(m[0] + k,): c for m, c in p.terms()})

	def _laurent_poly(self, Tk):
		r""" Polynomial :math:`\tau` and shift :math:`m\ge 0` with :math:`T = \tau/w^m` """
		if len(Tk) == 0:
			return self.R.zero, 0
		m = max(0, -min(Tk))
		p = self.R.from_dict({(e + m,): QQ_I.from_sympy(sympy.sympify(c)) for e, c in Tk.items()})
		return p, m

	def from_laurent(self, Tk):
		r""" RationalExpr of a Laurent polynomial given as ``{exponent: coefficient}`` """
		p, m = self._laurent_poly(Tk)
		return RationalExpr(self, p, self.R.zero, m, 0)

	def constant(self, c):
		return RationalExpr(self, self.R.ground_new(QQ_I.from_sympy(sympy.sympify(c))), self.R.zero)

	def T(self, k):
		r""" Coefficient :math:`T_k` of the potential as a RationalExpr """
		if k not in self._T:
			self._T[k] = self.from_laurent(self.model.T(k))
		return self._T[k]

	def inv_D(self):
		r""" :math:`1/(T_0^2-1)` """
		lam_inv = QQ_I.quo(QQ_I.one, self.lam)
		if self.dexp <= 0:
			A = self._shift(self.R.ground_new(lam_inv), -self.dexp)
			return RationalExpr(self, A, self.R.zero, 0, 1)
		return RationalExpr(self, self.R.ground_new(lam_inv), self.R.zero, self.dexp, 1)

	def D_poly(self):
		return self.P, self.lam, self.dexp


class RationalExpr:
	r""" Exact element :math:`(A + B r)/(w^i P^j)` of a :class:`SeriesRing`

	Instances are immutable and kept in a reduced form: neither :math:`P` nor
	:math:`w` divides both :math:`A` and :math:`B` when it occurs in the
	denominator.
	"""
	__slots__ = ['ring', 'A', 'B', 'i', 'j', '_numeric']

	def __init__(self, ring, A, B, i = 0, j = 0):
		self.ring = ring
		self._numeric = None
		if A == 0 and B == 0:
			i, j = 0, 0
		else:
			if ring.P.is_ground:
				j = 0
			while j > 0:
				qa, ra = divmod(A, ring.P)
				if ra != 0:
					break
				qb, rb = divmod(B, ring.P)
				if rb != 0:
					break
				A, B, j = qa, qb, j - 1
			if i > 0:
				low = min(_lowest_power(p) for p in (A, B) if p != 0)
				k = min(low, i)
				if k > 0:
					A, B, i = ring._shift(A, -k), ring._shift(B, -k), i - k
		self.A, self.B, self.i, self.j = A, B, int(i), int(j)

	def _lift(self, i, j):
		r""" Numerator pair over the larger denominator :math:`w^i P^j` """
		rg = self.ring
		factor = rg.P**(j - self.j)
		return rg._shift(self.A*factor, i - self.i), rg._shift(self.B*factor, i - self.i)

	def _coerce(self, other):
		if isinstance(other, RationalExpr):
			assert other.ring is self.ring, "expressions belong to different rings"
			return other
		return self.ring.constant(other)

	def __add__(self, other):
		other = self._coerce(other)
		i, j = max(self.i, other.i), max(self.j, other.j)
		A1, B1 = self._lift(i, j)
		A2, B2 = other._lift(i, j)
		return RationalExpr(self.ring, A1 + A2, B1 + B2, i, j)

	__radd__ = __add__

	def __neg__(self):
		return RationalExpr(self.ring, -self.A, -self.B, self.i, self.j)

	def __sub__(self, other):
		return self + (-self._coerce(other))

	def __rsub__(self, other):
		return self._coerce(other) - self

	def __mul__(self, other):
		other = self._coerce(other)
		rg = self.ring
		i, j = self.i + other.i, self.j + other.j
		A = self.A*other.A
		BB = self.B*other.B
		B = self.A*other.B + self.B*other.A
		if BB != 0:
			# r^2 = lam P w^dexp
			BB = BB*rg.P*rg.lam
			if rg.dexp >= 0:
				A = A + rg._shift(BB, rg.dexp)
			else:
				A = rg._shift(A, -rg.dexp) + BB
				B = rg._shift(B, -rg.dexp)
				i -= rg.dexp
		return RationalExpr(rg, A, B, i, j)

	__rmul__ = __mul__

	def conjugate(self):
		r""" The image under :math:`r \mapsto -r` """
		return RationalExpr(self.ring, self.A, -self.B, self.i, self.j)

	def inverse(self):
		r""" Multiplicative inverse :math:`(a - br)/(a^2 - b^2r^2)`

		The norm :math:`a^2 - b^2 r^2` must be a monomial times a power of
		:math:`P`, which covers every division needed by the recursions.
		"""
		rg = self.ring
		norm = self*self.conjugate()
		assert norm.B == 0
		N = norm.A
		if N == 0:
			raise ZeroDivisionError("division by zero in the series ring")
		s = _lowest_power(N)
		N = rg._shift(N, -s)
		t = 0
		while not N.is_ground:
			q, rem = divmod(N, rg.P)
			if rem != 0 or rg.P.is_ground:
				raise ArithmeticError("%s is not invertible in the series ring" % (self,))
			N, t = q, t + 1
		c = QQ_I.quo(QQ_I.one, N.LC)
		# 1/norm = w^(norm.i - s) P^(norm.j - t) / c'
		inv = RationalExpr(rg, rg.R.ground_new(c), rg.R.zero, s, 0)
		k = norm.j - t
		if k >= 0:
			inv = RationalExpr(rg, inv.A*rg.P**k, rg.R.zero, inv.i, 0)
		else:
			inv = RationalExpr(rg, inv.A, rg.R.zero, inv.i, -k)
		inv = inv*RationalExpr(rg, rg._shift(rg.R.one, norm.i), rg.R.zero)
		return self.conjugate()*inv

	def __truediv__(self, other):
		if isinstance(other, RationalExpr):
			return self*other.inverse()
		c = QQ_I.from_sympy(sympy.sympify(other))
		return RationalExpr(self.ring, self.A.quo_ground(c), self.B.quo_ground(c), self.i, self.j)

	def __rtruediv__(self, other):
		return self._coerce(other)*self.inverse()

	def __pow__(self, k):
		assert int(k) == k, "only integer powers"
		k = int(k)
		base = self if k >= 0 else self.inverse()
		out = self.ring.one
		for _ in range(abs(k)):
			out = out*base
		return out

	def __eq__(self, other):
		try:
			return (self - other).is_zero()
		except (TypeError, sympy.SympifyError):
			return NotImplemented

	def __hash__(self):
		return hash((str(self.A), str(self.B), self.i, self.j))

	def is_zero(self):
		return self.A == 0 and self.B == 0

	def _scalar_theta(self, A):
		r""" :math:`\theta` of :math:`A/(w^i P^j)` """
		rg = self.ring
		W, P = rg.W, rg.P
		num = W*A.diff(W)*P - self.i*A*P - self.j*W*A*rg._P_prime
		out = RationalExpr(rg, num, rg.R.zero, self.i, self.j + 1)
		return out/sympy.Integer(rg.cover_degree)

	def theta(self):
		r""" The Euler derivative :math:`\theta = x\,d/dx = c^{-1} w\,d/dw`

		Uses :math:`\theta r = T_0\,\theta T_0\, r/(T_0^2-1)`.
		"""
		rg = self.ring
		a = self._scalar_theta(self.A)
		db = self._scalar_theta(self.B)
		b = RationalExpr(rg, self.B, rg.R.zero, self.i, self.j)
		return a + (db + b*rg._G)*rg.r

	def parts(self):
		r""" The pair :math:`(a, b)` with self :math:`= a + b r` """
		rg = self.ring
		return RationalExpr(rg, self.A, rg.R.zero, self.i, self.j), RationalExpr(rg, self.B, rg.R.zero, self.i, self.j)

	def as_fraction(self):
		r""" Numerator and monic denominator as sympy expressions in the coordinate and ``r`` """
		rg = self.ring
		w = sympy.Symbol(rg.var)
		r = sympy.Symbol('r')
		num = sympy.expand(self.A.as_expr() + self.B.as_expr()*r)
		den = w**self.i*rg.P.as_expr()**self.j
		return num, den

	def __repr__(self):
		num, den = self.as_fraction()
		if den == 1:
			return str(num)
		return "(%s)/(%s)" % (num, den)

	def _numeric_data(self):
		if self._numeric is None:
			def arr(p):
				if p == 0:
					return np.zeros(0, dtype = int), np.zeros(0, dtype = complex)
				terms = p.terms()
				return (np.array([m[0] for m, c in terms], dtype = int),
					np.array([complex(QQ_I.to_sympy(c)) for m, c in terms], dtype = complex))
			self._numeric = (arr(self.A), arr(self.B), arr(self.ring.P))
		return self._numeric

	def evaluate(self, w, r = None):
		r""" Numeric value at the cover coordinate ``w``

		Parameters
		----------
		w: complex or array-like
		r: complex or array-like, optional
			Value of :math:`r`; defaults to the principal square root of
			:math:`T_0(w)^2 - 1`.
		"""
		w = np.asarray(w, dtype = complex)
		if r is None:
			T0 = self.ring.model.T0(w)
			r = np.sqrt(T0*T0 - 1)
		(ea, ca), (eb, cb), (ep, cp) = self._numeric_data()
		def ev(e, c):
			out = np.zeros(w.shape, dtype = complex)
			for ek, ck in zip(e, c):
				out += ck*w**int(ek)
			return out
		return (ev(ea, ca) + ev(eb, cb)*r)/(w**self.i*ev(ep, cp)**self.j)


class LogTerm:
	r""" The logarithmic leading term :math:`\log\mathcal{R}_0 + 2\pi i n`

	Parameters
	----------
	R0: RationalExpr
	n: int
		Logarithmic index
	"""
	def __init__(self, R0, n = 0):
		self.R0 = R0
		self.n = int(n)

	def theta(self):
		r""" :math:`\theta\log\mathcal{R}_0`, rational in :math:`(x, r)` and independent of n """
		return self.R0.theta()*self.R0.inverse()

	def evaluate(self, w, r = None):
		return np.log(self.R0.evaluate(w, r)) + 2j*np.pi*self.n

	def __repr__(self):
		if self.n == 0:
			return "log(%s)" % (self.R0,)
		return "log(%s) + 2*pi*I*%d" % (self.R0, self.n)


class RiccatiSeries:
	r""" Coefficients :math:`\mathcal{R}_0, \ldots, \mathcal{R}_N` of the q-Riccati series

	Attributes
	----------
	model: QdeModel
	sign: int
		+1 for :math:`\mathcal{R}_0 = y_+`, -1 for :math:`y_-`
	coeffs: list of RationalExpr
	ring: SeriesRing
	"""
	def __init__(self, model, sign, coeffs, ring):
		self.model = model
		self.sign = int(sign)
		self.coeffs = list(coeffs)
		self.ring = ring

	@property
	def order(self):
		return len(self.coeffs) - 1

	def __getitem__(self, k):
		return self.coeffs[k]

	def __len__(self):
		return len(self.coeffs)


class LogRSeries:
	r""" Expansion :math:`\log\mathcal{R} = \log\mathcal{R}_0 + \sum_{n\ge 1} D_n\hbar^n`

	Attributes
	----------
	series: RiccatiSeries
	leading: LogTerm
	coeffs: list of RationalExpr
		:math:`D_1, \ldots, D_N`
	"""
	def __init__(self, series, coeffs, n = 0):
		self.series = series
		self.leading = LogTerm(series[0], n)
		self.coeffs = list(coeffs)

	@property
	def order(self):
		return len(self.coeffs)

	def D(self, n):
		assert n >= 1, "D_n is defined for n >= 1"
		return self.coeffs[n-1]


def _shift_coeffs(R, k):
	r""" Coefficient of :math:`\hbar^k` in :math:`\mathcal{R}(q^{-1}x) = \sum_j (-\hbar)^j\theta^j\mathcal{R}/j!`

	``R`` is a list of lists: ``R[a][j]`` holds :math:`\theta^j\mathcal{R}_a`.
	Returns the full coefficient and the part without the :math:`j=0` term.
	"""
	tail = None
	for j in range(1, k + 1):
		term = R[k-j][j]/sympy.Rational((-1)**j*factorial(j))
		tail = term if tail is None else tail + term
	return tail


def _extend_thetas(R, k):
	r""" Make sure ``R[a]`` holds :math:`\theta^j\mathcal{R}_a` for all :math:`a + j \le k` """
	for a in range(len(R)):
		while len(R[a]) <= k - a:
			R[a].append(R[a][-1].theta())


def riccati_coeffs(model, sign = 1, N = None, ring = None):
	r""" Solve the q-Riccati equation to order :math:`\hbar^N`

	With :math:`\mathcal{P} = \mathcal{R}(q^{-1}x) = \sum_k P_k\hbar^k`, the order
	:math:`n` part of the q-Riccati equation is linear in :math:`\mathcal{R}_n`
	with coefficient :math:`2(\mathcal{R}_0 - T_0) = \pm 2r`, so

	.. math::

		\mathcal{R}_n = \mp\frac{1}{2r}\Big[(\mathcal{R}_0 - 2T_0)\tilde P_n
			+ \sum_{a=1}^{n-1}\mathcal{R}_aP_{n-a} - 2\sum_{a=1}^{n}T_aP_{n-a}\Big],

	where :math:`\tilde P_n = P_n - \mathcal{R}_n` only involves lower orders.

	Parameters
	----------
	model: QdeModel
	sign: int
		Choice of sheet for :math:`\mathcal{R}_0 = T_0 \pm r`
	N: int
		Truncation order; defaults to ``DEFAULTS['series_order']``
	ring: SeriesRing, optional
		Reuse an existing ring for the model

	Returns
	-------
	RiccatiSeries
	"""
	if N is None:
		N = DEFAULTS['series_order']
	assert N >= 0, "order must be nonnegative"
	assert sign in (1, -1), "sign must be +1 or -1"
	if ring is None:
		ring = SeriesRing(model)

	R0 = ring.T(0) + ring.r*sign
	coeffs = [R0]
	# thetas[a][j] = theta^j R_a
	thetas = [[R0]]
	P = [R0]
	inv_2r = (ring.r*(2*sign)).inverse()
	for n in range(1, N + 1):
		_extend_thetas(thetas, n)
		Pt = _shift_coeffs(thetas, n)
		rest = (R0 - ring.T(0)*2)*Pt
		for a in range(1, n):
			rest = rest + coeffs[a]*P[n-a]
		for a in range(1, n + 1):
			Ta = ring.T(a)
			if not Ta.is_zero():
				rest = rest - Ta*P[n-a]*2
		Rn = -rest*inv_2r
		coeffs.append(Rn)
		thetas.append([Rn])
		P.append(Rn + Pt)
		logger.debug("R_%d: denominator degree %d", n, Rn.j)
	return RiccatiSeries(model, sign, coeffs, ring)


def log_r_coeffs(series, n = 0):
	r""" Coefficients :math:`D_n` of :math:`\log\mathcal{R}` by the determinant formula

	With :math:`u_k = \mathcal{R}_k/\mathcal{R}_0`,

	.. math::

		D_n = \frac{(-1)^{n-1}}{n}\det\begin{pmatrix}
			u_1 & 1 & & \\
			2u_2 & u_1 & 1 & \\
			\vdots & & \ddots & 1\\
			n u_n & u_{n-1} & \cdots & u_1
		\end{pmatrix},

	the determinant of the lower Hessenberg matrix being expanded along its
	last row.

	Parameters
	----------
	series: RiccatiSeries
		Must have order at least 1
	n: int
		Logarithmic index of the leading term

	Returns
	-------
	LogRSeries
	"""
	assert series.order >= 1, "the series must have order at least 1"
	R0_inv = series[0].inverse()
	u = [None] + [series[k]*R0_inv for k in range(1, series.order + 1)]
	dets = [series.ring.one]
	D = []
	for m in range(1, series.order + 1):
		det = None
		for k in range(1, m + 1):
			# h_{mk}: first column m u_m, otherwise u_{m-k+1}
			h = u[m]*m if k == 1 else u[m-k+1]
			term = h*dets[k-1]
			if (m - k) % 2 == 1:
				term = -term
			det = term if det is None else det + term
		dets.append(det)
		Dm = det/sympy.Integer(m)
		if (m - 1) % 2 == 1:
			Dm = -Dm
		D.append(Dm)
	return LogRSeries(series, D, n)


def log_r_direct(series, n = 0):
	r""" Coefficients :math:`D_n` from the power series :math:`\log(1+U) = \sum_m (-1)^{m-1}U^m/m`

	Second code path for :func:`log_r_coeffs`, with :math:`U = \sum_k u_k\hbar^k`.
	"""
	assert series.order >= 1, "the series must have order at least 1"
	N = series.order
	ring = series.ring
	R0_inv = series[0].inverse()
	U = [ring.zero] + [series[k]*R0_inv for k in range(1, N + 1)]
	D = [ring.zero for _ in range(N + 1)]
	power = list(U)
	for m in range(1, N + 1):
		for k in range(m, N + 1):
			if not power[k].is_zero():
				term = power[k]/sympy.Integer(m)
				D[k] = D[k] + (term if m % 2 == 1 else -term)
		# next power of U, truncated at order N
		nxt = [ring.zero for _ in range(N + 1)]
		for a in range(m, N + 1):
			if power[a].is_zero():
				continue
			for b in range(1, N + 1 - a):
				if not U[b].is_zero():
					nxt[a+b] = nxt[a+b] + power[a]*U[b]
		power = nxt
	return LogRSeries(series, D[1:], n)


def s_coeffs(logr, N = None):
	r""" Coefficients of the WKB exponent from the recursion

	.. math::

		S_{n-1} = D_n + \sum_{k=1}^{n}\frac{1}{(k+1)!}\theta^k S_{n-k-1},

	with :math:`S_{-1} = \log\mathcal{R}_0 + 2\pi i n`.  Only :math:`S_{-1}` depends on
	the logarithmic index.

	Returns
	-------
	list
		:math:`[S_{-1}, S_0, \ldots, S_{N-1}]`; the first entry is a :class:`LogTerm`
	"""
	if N is None:
		N = logr.order
	assert logr.order >= N, "log R series has order %d < %d" % (logr.order, N)
	S_log = logr.leading
	# thetas[m][k] = theta^k S_{m-1}; for S_{-1} start at theta^1
	thetas = [[None, S_log.theta()]]
	S = [S_log]
	for n in range(1, N + 1):
		value = logr.D(n)
		for k in range(1, n + 1):
			m = n - k
			while len(thetas[m]) <= k:
				thetas[m].append(thetas[m][-1].theta())
			value = value + thetas[m][k]/sympy.Integer(factorial(k + 1))
		S.append(value)
		thetas.append([value])
	return S


def _residual_taylor(series, N, w0, dps = 40):
	r""" Taylor coefficients in :math:`\hbar` of the q-Riccati residual at one point

	The truncated sums :math:`\sum_k\mathcal{R}_k\hbar^k` are evaluated in
	mpmath at :math:`w_0` and at :math:`w_0e^{-\hbar/c}`, with :math:`r`
	continued to the root closest to its value at :math:`w_0`.
	"""
	model = series.model
	c = model.cover_degree
	w, r = sympy.Symbol(series.ring.var), sympy.Symbol('r')
	R = []
	for k in range(N + 1):
		num, den = series[k].as_fraction()
		R.append(sympy.lambdify((w, r), num/den, modules = 'mpmath'))
	T = [sympy.lambdify(w, sum((cf*w**e for e, cf in model.T(k).items()), sympy.Integer(0)), modules = 'mpmath')
		for k in range(N + 1)]

	with mpmath.workdps(dps):
		w0 = mpmath.mpc(w0)

		def root(x, ref = None):
			t = T[0](x)
			s = mpmath.sqrt(t*t - 1)
			if ref is not None and abs(s - ref) > abs(s + ref):
				s = -s
			return s

		r0 = root(w0)
		Rx = [R[k](w0, r0) for k in range(N + 1)]
		Tx = [T[k](w0) for k in range(N + 1)]

		def g(h):
			ws = w0*mpmath.exp(-h/c)
			rs = root(ws, r0)
			Rs = sum(R[k](ws, rs)*h**k for k in range(N + 1))
			Rh = sum(Rx[k]*h**k for k in range(N + 1))
			Th = sum(Tx[k]*h**k for k in range(N + 1))
			return Rh*Rs - 2*Th*Rs + 1

		coeffs = mpmath.taylor(g, 0, N)
	return [complex(a) for a in coeffs]


def verify_riccati(series, N = None, sample_points = (2, 3j, -2.5), tol = None):
	r""" Substitute the truncated series back into the q-Riccati equation

	At each sample point the residual
	:math:`\mathcal{R}(x)\mathcal{R}(xe^{-\hbar}) - 2T(x)\mathcal{R}(xe^{-\hbar}) + 1`
	of the truncated series is a function of :math:`\hbar`; its Taylor
	coefficients of order :math:`m\le N` are computed with :func:`mpmath.taylor`
	in 40-digit arithmetic and must vanish.

	Parameters
	----------
	series: RiccatiSeries
	N: int
		Highest order checked; defaults to the series order
	sample_points: list of complex
		Points in the x-plane; on a double cover the principal root is used
	tol: float
		Per-order tolerance; defaults to ``residual_tol`` (or ``residual_tol_float``
		for models given with floating point data)

	Returns
	-------
	float
		Largest absolute residual over all orders and points
	"""
	if N is None:
		N = series.order
	assert N <= series.order, "series order %d is below %d" % (series.order, N)
	if tol is None:
		tol = DEFAULTS['residual_tol'] if series.model.exact else DEFAULTS['residual_tol_float']
	c = series.model.cover_degree
	points = [complex(x)**(1./c) if c > 1 else complex(x) for x in sample_points]

	worst = 0.
	for w in points:
		coeffs = _residual_taylor(series, N, w)
		for m, a in enumerate(coeffs):
			value = abs(a)
			worst = max(worst, value)
			if not value < tol:
				raise ResidualTooLarge("q-Riccati residual %.3e at order %d, w = %s" % (value, m, w),
					point = w, order = m, residual = value)
		logger.debug("q-Riccati residual at w = %s through order %d: %.3e", w, N, max(abs(a) for a in coeffs))
	return worst
