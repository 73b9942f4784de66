r""" Stokes graphs (exponential networks) of q-difference equations

A trajectory of type :math:`(ij, n)` is a curve along which

.. math::

	\mathrm{Im}\left[e^{-i\vartheta}\int \delta_{ij,n}\, \frac{dx}{x}\right] = 0,
	\qquad \delta_{ij,n} = \log y_i - \log y_j + 2\pi i n,

with the real part increasing.  In the coordinate :math:`\zeta = \log w` of
the cover :math:`x = w^c` the trajectory solves

.. math::

	\frac{d\zeta}{dt} = \frac{u}{|u|}, \quad u = \frac{e^{i\vartheta}}{c\,\delta},\qquad
	\frac{d L}{d\zeta} = \frac{w T_0'(w)}{\sinh L},

where :math:`L = \log y` is carried along for both sheets, so the logarithmic
branch is continued exactly rather than snapped to the principal value.
"""
import logging
import warnings
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.integrate import RK45
from scipy.optimize import brentq

from .curve import branch_points, classify_punctures, log_cut_pairs, SheetLabeling, ray_shifts, BranchPoint, Puncture
from .errors import CapExceeded, StiffRegion, DegenerateGraph
from .config import DEFAULTS, worker_count
from .pgf import PGF, write_blocks, read_blocks

__all__ = ['TrajectoryLabel',
	'Trajectory',
	'StokesGraph',
	'NetworkTracer',
	'build_graph',
	'spawn_labels',
	'find_saddles',
	'dump',
	'read_dump',
	]

logger = logging.getLogger(__name__)


@dataclass(frozen = True, order = True)
class TrajectoryLabel:
	r""" Type :math:`(ij, n)` of a trajectory

	Attributes
	----------
	i, j: str
		Sheets ``'+'`` or ``'-'``
	n: int
		Logarithmic shift :math:`n = n_i - n_j`
	"""
	i: str
	j: str
	n: int = 0

	def __post_init__(self):
		assert self.i in ('+', '-') and self.j in ('+', '-'), "sheets are '+' or '-'"
		if self.i == self.j and self.n == 0:
			raise ValueError("the label (%s%s,0) is trivial" % (self.i, self.j))

	@property
	def diagonal(self):
		return self.i == self.j

	@property
	def pair(self):
		return self.i + self.j

	def __str__(self):
		return "(%s%s,%d)" % (self.i, self.j, self.n)

	@classmethod
	def parse(cls, text):
		text = text.strip()
		assert text[0] == '(' and text[-1] == ')', "labels are written (ij,n)"
		pair, n = text[1:-1].split(',')
		return cls(pair[0], pair[1], int(n))


@dataclass
class Trajectory:
	r""" A traced Stokes line

	Attributes
	----------
	id: int
	label: TrajectoryLabel
	points: np.ndarray
		Polyline on the cover
	logs: np.ndarray((n,2))
		Continued :math:`(\log y_i, \log y_j)` at every vertex; zero for
		trajectories of type :math:`(ii, n)`, whose integrand is constant
	mass: np.ndarray
		Accumulated :math:`|\int \delta\, dx/x|` at every vertex
	parent: str
		``bp:<index>``, ``puncture:<location>`` or ``int:<intersection id>``
	generation: int
	stokes_shift: int or None
		For primary lines, the :math:`\ell` of the Stokes matrix :math:`S^{(\ell)}`
	source: int or None
		Index of the emitting branch point
	stop: str
		Reason the integration stopped
	capped: bool
		True when the trajectory was truncated by a cap
	"""
	id: int
	label: TrajectoryLabel
	points: np.ndarray
	logs: np.ndarray
	mass: np.ndarray
	parent: str
	generation: int = 0
	stokes_shift: int = None
	source: int = None
	stop: str = ''
	capped: bool = False

	def __len__(self):
		return len(self.points)

	@property
	def primary(self):
		return self.parent.startswith('bp:')

	def delta(self, k = -1):
		r""" Integrand :math:`\delta_{ij,n}` at vertex ``k`` """
		shift = 2j*np.pi*self.label.n
		if self.label.diagonal:
			return shift
		return self.logs[k, 0] - self.logs[k, 1] + shift


@dataclass
class StokesGraph:
	r""" Traced trajectories with their intersections and cuts

	Attributes
	----------
	model_name: str
	theta: float
	branch_points: list of BranchPoint
	punctures: list of Puncture
	trajectories: list of Trajectory
	intersections: list of dict
		``id``, ``position``, ``incoming`` (pair of trajectory ids) and ``spawned`` ids
	sqrt_cuts: list of (int, np.ndarray)
		Owning trajectory id and polyline of each square-root cut
	log_cuts: list of (str, int, np.ndarray)
		Puncture location, branch point index and end points of each logarithmic cut
	caps: dict
	history: list of dict
	"""
	model_name: str = ''
	theta: float = 0.
	branch_points: list = field(default_factory = list)
	punctures: list = field(default_factory = list)
	trajectories: list = field(default_factory = list)
	intersections: list = field(default_factory = list)
	sqrt_cuts: list = field(default_factory = list)
	log_cuts: list = field(default_factory = list)
	caps: dict = field(default_factory = dict)
	history: list = field(default_factory = list)

	def count(self):
		return len(self.trajectories)

	def primary(self):
		return [t for t in self.trajectories if t.primary]

	def spirals(self):
		return [t for t in self.trajectories if t.parent.startswith('puncture:')]

	def by_label(self, label):
		if isinstance(label, str):
			label = TrajectoryLabel.parse(label)
		return [t for t in self.trajectories if t.label == label]

	def get(self, tid):
		for t in self.trajectories:
			if t.id == tid:
				return t
		raise KeyError(tid)


def spawn_labels(a, b, max_generation, max_abs_n):
	r""" Labels of the trajectories born where lines of type ``a`` and ``b`` cross

	* :math:`(+-,n)\times(-+,m)` spawns :math:`(+-,n+k(m+n))` and
	  :math:`(-+,m+k(m+n))` for :math:`k\ge 1`, and :math:`(\pm\pm,(k+1)(m+n))` for :math:`k\ge 0`;
	* :math:`(+-,n)\times(\pm\pm,m)` spawns :math:`(+-,k(n+m))` for :math:`k\ge 1`;
	* lines of the same type, and two lines of type :math:`(\pm\pm)`, spawn nothing.

	The families are truncated at :math:`k \le` ``max_generation`` and
	:math:`|n| \le` ``max_abs_n``.

	Returns
	-------
	list of TrajectoryLabel
	"""
	if a.diagonal and b.diagonal:
		return []
	if a.pair == b.pair:
		return []
	out = []
	if not a.diagonal and not b.diagonal:
		p, m = (a, b) if a.i == '+' else (b, a)
		s = p.n + m.n
		if s == 0:
			return []
		for k in range(1, max_generation + 1):
			out.append(TrajectoryLabel('+', '-', p.n + k*s))
			out.append(TrajectoryLabel('-', '+', m.n + k*s))
		for k in range(max_generation):
			out.append(TrajectoryLabel('+', '+', (k+1)*s))
			out.append(TrajectoryLabel('-', '-', (k+1)*s))
	else:
		off, diag = (b, a) if a.diagonal else (a, b)
		s = off.n + diag.n
		for k in range(1, max_generation + 1):
			out.append(TrajectoryLabel(off.i, off.j, k*s))
	seen = []
	for label in out:
		if abs(label.n) <= max_abs_n and label not in seen:
			seen.append(label)
	return seen


def _registers(a, b):
	r""" Whether a crossing of lines of types ``a`` and ``b`` is recorded """
	return not (a.diagonal and b.diagonal) and a.pair != b.pair


def _cross(u, v):
	return (np.conj(u)*v).imag


def _segment_hits(P, Q, chunk = 64):
	r""" Crossings of two polylines as ``(i, j, s, t)``: segment indices and fractions """
	hits = []
	if len(P) < 2 or len(Q) < 2:
		return hits
	nP, nQ = len(P) - 1, len(Q) - 1
	startsP = np.arange(0, nP, chunk)
	startsQ = np.arange(0, nQ, chunk)

	def boxes(X, starts, n):
		out = np.zeros((len(starts), 4))
		for k, s in enumerate(starts):
			seg = X[s:min(s + chunk, n) + 1]
			out[k] = [seg.real.min(), seg.real.max(), seg.imag.min(), seg.imag.max()]
		return out

	bP = boxes(P, startsP, nP)
	bQ = boxes(Q, startsQ, nQ)
	overlap = ((bP[:, None, 0] <= bQ[None, :, 1]) & (bQ[None, :, 0] <= bP[:, None, 1])
		& (bP[:, None, 2] <= bQ[None, :, 3]) & (bQ[None, :, 2] <= bP[:, None, 3]))
	for kp, kq in zip(*np.nonzero(overlap)):
		i0, j0 = startsP[kp], startsQ[kq]
		a0 = P[i0:min(i0 + chunk, nP)]
		a1 = P[i0 + 1:min(i0 + chunk, nP) + 1]
		b0 = Q[j0:min(j0 + chunk, nQ)]
		b1 = Q[j0 + 1:min(j0 + chunk, nQ) + 1]
		da = (a1 - a0)[:, None]
		db = (b1 - b0)[None, :]
		r = b0[None, :] - a0[:, None]
		d = _cross(da, db)
		with np.errstate(divide = 'ignore', invalid = 'ignore'):
			s = _cross(r, db)/d
			t = _cross(r, da)/d
		ok = (d != 0) & (s >= 0) & (s < 1) & (t >= 0) & (t < 1)
		for i, j in zip(*np.nonzero(ok)):
			hits.append((int(i0 + i), int(j0 + j), float(s[i, j]), float(t[i, j])))
	hits.sort()
	return hits


def _principal_shift(L):
	r""" Integer :math:`k` with :math:`L - 2\pi i k` on the principal branch """
	return int(np.round(L.imag/(2*np.pi)))


class NetworkTracer:
	r""" Trace the Stokes graph of a model at a fixed phase

	Primary lines leave every branch point along its three local Stokes
	rays; every branch point paired with a logarithmic puncture also emits
	the spirals :math:`(\pm\pm, n)`, :math:`0 < |n| \le` ``max_abs_n``.  Crossings
	then spawn new lines generation by generation.

	Parameters
	----------
	model: QdeModel
	theta: float
		Phase :math:`\vartheta = \arg\hbar`
	max_generation: int
		Number of generations of spawned lines and length of each spawned family
	max_abs_n: int
		Largest logarithmic shift kept
	max_mass: float
		Trajectories stop when their mass exceeds this value
	stop_radius: float
		Trajectories stop within ``stop_radius`` times the coordinate scale of
		the origin (and beyond its inverse)
	spirals: bool
		Emit the spiral families of logarithmic punctures
	threads: int
		Size of the worker pool (see :func:`~qwkb.config.worker_count`)
	strict: bool
		Raise :class:`~qwkb.errors.CapExceeded` and :class:`~qwkb.errors.StiffRegion`
		instead of flagging the trajectory
	critical_phases: list of float
		Known saddle phases; building the graph within ``saddle_tol`` of one
		issues :class:`~qwkb.errors.DegenerateGraph`
	verbose: bool
		Print a table with one line per generation
	"""
	def __init__(self, model, theta = 0., max_generation = None, max_abs_n = None, max_mass = None,
		stop_radius = None, max_steps = None, rtol = None, atol = None, spirals = True, threads = None,
		strict = False, critical_phases = (), verbose = False):
		self.model = model
		self.theta = float(theta)
		self.max_generation = DEFAULTS['max_generation'] if max_generation is None else int(max_generation)
		self.max_abs_n = DEFAULTS['max_abs_n'] if max_abs_n is None else int(max_abs_n)
		self.max_mass = DEFAULTS['max_mass'] if max_mass is None else float(max_mass)
		self.stop_radius = DEFAULTS['stop_radius'] if stop_radius is None else float(stop_radius)
		self.max_steps = DEFAULTS['max_steps'] if max_steps is None else int(max_steps)
		self.rtol = DEFAULTS['rtol'] if rtol is None else rtol
		self.atol = DEFAULTS['atol'] if atol is None else atol
		self.max_step = DEFAULTS['max_step']
		self.path_tol = DEFAULTS['path_tol']
		self.spirals = spirals
		self.threads = worker_count(threads)
		self.strict = strict
		self.critical_phases = list(critical_phases)
		self.verbose = verbose
		assert self.max_generation >= 0, "max_generation must be nonnegative"
		assert self.max_mass > 0, "max_mass must be positive"

		self.branch_points = branch_points(model, self.theta)
		self.punctures = classify_punctures(model)
		positions = [b.position for b in self.branch_points]
		self.scale = max(abs(p) for p in positions)
		self.pairs = log_cut_pairs(model, positions, self.punctures)
		self._init_logging()

	def _init_logging(self):
		self._total_steps = 0
		self._total_projections = 0
		self._total_rhs_evals = 0
		self.history = []

	@property
	def caps(self):
		return {'max_generation': self.max_generation, 'max_abs_n': self.max_abs_n,
			'max_mass': self.max_mass, 'stop_radius': self.stop_radius}

	def _check_phase(self):
		tol = DEFAULTS['saddle_tol']
		has_spirals = self.spirals and len(self.pairs) > 0
		near_d0 = has_spirals and abs(np.sin(self.theta)) < tol
		near = [p for p in self.critical_phases if abs(np.angle(np.exp(1j*(self.theta - p)))) < tol]
		if near_d0 or near:
			warnings.warn("theta = %g is within %g of a critical phase; the graph is degenerate" % (self.theta, tol),
				DegenerateGraph)

	########################################################################
	# Seeds
	########################################################################

	def primary_seeds(self, indices = None):
		r""" Initial data of the three primary lines of each branch point """
		model = self.model
		c = model.cover_degree
		labeling = SheetLabeling(model, scale = self.scale)
		seeds = []
		for idx, b in enumerate(self.branch_points):
			if indices is not None and idx not in indices:
				continue
			rays = labeling.ray_sheets(b.position, b.sign_class, self.theta, b.ref_angle, b.ref_pair, b.radius)
			shifts = ray_shifts(rays, b.ref_angle, b.enc_log_shift)
			label = TrajectoryLabel(b.signature[0], b.signature[1], 0)
			for m, ((alpha, (yp, ym), kind), ell) in enumerate(zip(rays, shifts)):
				if kind != b.signature:
					yp, ym = ym, yp
				yi, yj = (yp, ym) if label.i == '+' else (ym, yp)
				w0 = b.position + b.radius*np.exp(1j*alpha)
				Li = np.log(yi)
				Lj = Li - np.log(yi/yj)
				J0 = (2./3)*(Li - Lj)*c*(w0 - b.position)/b.position
				I0 = np.exp(1j*self.theta)*(np.exp(-1j*self.theta)*J0).real
				seeds.append({'w': w0, 'L': (Li, Lj), 'I': I0, 'mass': abs(J0), 'label': label,
					'parent': 'bp:%d' % idx, 'generation': 0, 'stokes_shift': int(ell), 'source': idx, 'ray': m})
		return seeds

	def spiral_seeds(self):
		r""" Initial data of the spiral families at the ends of logarithmic cuts

		A logarithmic cut runs from a puncture to the branch point paired
		with it.  The spirals start at that branch point, offset by its
		radius along the reference angle, and not at the puncture.
		"""
		seeds = []
		if not self.spirals:
			return seeds
		for location in ['origin', 'infinity']:
			if location not in self.pairs:
				continue
			idx = self.pairs[location]
			b = self.branch_points[idx]
			w0 = b.position + b.radius*np.exp(1j*b.ref_angle)
			for n in range(1, self.max_abs_n + 1):
				for sgn in (1, -1):
					for sheet in ('+', '-'):
						seeds.append({'w': w0, 'L': (0j, 0j), 'I': 0j, 'mass': 0.,
							'label': TrajectoryLabel(sheet, sheet, sgn*n), 'parent': 'puncture:%s' % location,
							'generation': 0, 'stokes_shift': None, 'source': idx})
		return seeds

	########################################################################
	# Integration
	########################################################################

	def _rhs(self, label):
		model = self.model
		c = model.cover_degree
		e = np.exp(1j*self.theta)
		shift = 2j*np.pi*label.n
		diagonal = label.diagonal

		def rhs(t, Y):
			zeta, Li, Lj = Y[0], Y[1], Y[2]
			delta = shift if diagonal else Li - Lj + shift
			u = e/(c*delta)
			dz = u/abs(u)
			if diagonal:
				return np.array([dz, 0, 0, c*delta*dz], dtype = complex)
			w = np.exp(zeta)
			g = w*complex(model.dT0(w))*dz
			return np.array([dz, g/np.sinh(Li), g/np.sinh(Lj), c*delta*dz], dtype = complex)
		return rhs

	def _correct(self, Y, label):
		r""" Project back onto the Stokes condition and onto :math:`\cosh L = T_0` """
		model = self.model
		c = model.cover_degree
		e = np.exp(-1j*self.theta)
		Y = Y.copy()
		changed = False
		h = (e*Y[3]).imag
		if abs(h) > 0.1*self.path_tol*(1 + abs(Y[3])):
			delta = 2j*np.pi*label.n + (0 if label.diagonal else Y[1] - Y[2])
			dz = -1j*h/(e*c*delta)
			Y[0] += dz
			if not label.diagonal:
				w = np.exp(Y[0])
				g = w*complex(model.dT0(w))*dz
				Y[1] += g/np.sinh(Y[1])
				Y[2] += g/np.sinh(Y[2])
			Y[3] -= 1j*h/e
			changed = True
		if not label.diagonal:
			T0 = complex(model.T0(np.exp(Y[0])))
			for k in (1, 2):
				for it in range(4):
					res = np.cosh(Y[k]) - T0
					if abs(res) <= 1e-12*max(1, abs(T0)):
						break
					Y[k] -= res/np.sinh(Y[k])
					changed = True
		return Y, changed

	def _stop_reason(self, w, Y, seed, left):
		if abs(w) < self.stop_radius*self.scale:
			return 'origin'
		if abs(w) > self.scale/self.stop_radius:
			return 'infinity'
		for k, b in enumerate(self.branch_points):
			if k == seed.get('source') and not left:
				continue
			if abs(w - b.position) < 5*b.radius:
				return 'branch_point:%d' % k
		if not seed['label'].diagonal and abs(Y[1] - Y[2] + 2j*np.pi*seed['label'].n) < 1e-12:
			return 'degenerate'
		return ''

	def evolve(self, seed):
		r""" Integrate one trajectory from its seed

		Returns
		-------
		(dict, dict)
			Trajectory data and integration counters; ``integral`` holds
			:math:`\int \delta\, dx/x` at every vertex
		"""
		label = seed['label']
		rhs = self._rhs(label)
		e = np.exp(-1j*self.theta)
		Y = np.array([np.log(seed['w']), seed['L'][0], seed['L'][1], seed['I']], dtype = complex)
		I_ref = (e*seed['I']).real
		points = [complex(seed['w'])]
		logs = [(Y[1], Y[2])]
		masses = [float(seed['mass'])]
		integrals = [complex(Y[3])]
		stats = {'steps': 0, 'projections': 0, 'rhs_evals': 0}
		source = seed.get('source')
		w_src = self.branch_points[source].position if source is not None else None
		left = source is None

		def solver_at(t, Y):
			return RK45(rhs, t, Y, 1e12, rtol = self.rtol, atol = self.atol, max_step = self.max_step)

		solver = solver_at(0., Y)
		stop = ''
		capped = False
		while True:
			if stats['steps'] >= self.max_steps:
				stop, capped = 'max_steps', True
				break
			solver.step()
			stats['steps'] += 1
			if solver.status == 'failed':
				if self.strict:
					raise StiffRegion("integration failed near w = %r" % (points[-1],), point = points[-1],
						label = str(label))
				stop = 'stiff'
				break
			Y, changed = self._correct(solver.y, label)
			if changed:
				stats['projections'] += 1
				stats['rhs_evals'] += solver.nfev
				solver = solver_at(solver.t, Y)
			w = complex(np.exp(Y[0]))
			points.append(w)
			logs.append((Y[1], Y[2]))
			masses.append(float(seed['mass'] + (e*Y[3]).real - I_ref))
			integrals.append(complex(Y[3]))
			if not left and abs(w - w_src) > 50*self.branch_points[source].radius:
				left = True
			stop = self._stop_reason(w, Y, seed, left)
			if stop:
				break
			if masses[-1] >= self.max_mass:
				stop, capped = 'max_mass', True
				break
		stats['rhs_evals'] += solver.nfev
		if stop == 'max_steps':
			if self.strict:
				raise CapExceeded("trajectory %s reached max_steps = %d" % (label, self.max_steps),
					label = str(label), cap = 'max_steps')
			warnings.warn("trajectory %s from %s truncated after %d steps" % (label, seed['parent'], self.max_steps))
		logger.debug("trajectory %s from %s: %d points, mass %.3g, stop %s", label, seed['parent'],
			len(points), masses[-1], stop)
		data = dict(seed)
		data.update({'points': np.array(points, dtype = complex),
			'logs': np.array(logs, dtype = complex).reshape(-1, 2) if not label.diagonal else np.zeros((len(points), 2), dtype = complex),
			'mass': np.maximum.accumulate(np.array(masses)), 'integral': np.array(integrals, dtype = complex),
			'stop': stop, 'capped': capped})
		return data, stats

	def _evolve_all(self, seeds):
		if self.threads > 1 and len(seeds) > 1:
			with ThreadPoolExecutor(max_workers = self.threads) as pool:
				results = list(pool.map(self.evolve, seeds))
		else:
			results = [self.evolve(seed) for seed in seeds]
		for _, stats in results:
			self._total_steps += stats['steps']
			self._total_projections += stats['projections']
			self._total_rhs_evals += stats['rhs_evals']
		return [data for data, _ in results]

	########################################################################
	# Intersections
	########################################################################

	def _interpolate(self, traj, k, s):
		w = traj.points[k] + s*(traj.points[k+1] - traj.points[k])
		L = traj.logs[k] + s*(traj.logs[k+1] - traj.logs[k])
		m = traj.mass[k] + s*(traj.mass[k+1] - traj.mass[k])
		return w, L, m

	def _absolute(self, traj, L):
		r""" Label of ``traj`` measured against principal logarithms, and those logarithms """
		if traj.label.diagonal:
			return traj.label, None
		ki, kj = _principal_shift(L[0]), _principal_shift(L[1])
		logs = {traj.label.i: L[0] - 2j*np.pi*ki, traj.label.j: L[1] - 2j*np.pi*kj}
		return TrajectoryLabel(traj.label.i, traj.label.j, traj.label.n + ki - kj), logs

	def _intersect(self, trajectories, generation, next_id, next_hit):
		r""" Register crossings involving a line of the given generation and seed their children """
		eps = 1e-9*self.scale
		found = []
		for ia, a in enumerate(trajectories):
			for b in trajectories[ia+1:]:
				if a.generation != generation and b.generation != generation:
					continue
				if not _registers(a.label, b.label):
					continue
				for i, j, s, t in _segment_hits(a.points, b.points):
					w, La, ma = self._interpolate(a, i, s)
					_, Lb, mb = self._interpolate(b, j, t)
					if abs(w - a.points[0]) < eps or abs(w - b.points[0]) < eps:
						continue
					found.append((a.id, b.id, i, s, w, a, b, La, Lb, ma + mb))
		found.sort(key = lambda h: (h[0], h[1], h[2], h[3]))

		hits = []
		seeds = []
		for a_id, b_id, _, _, w, a, b, La, Lb, mass in found:
			la, logs_a = self._absolute(a, La)
			lb, logs_b = self._absolute(b, Lb)
			logs = logs_a if logs_a is not None else logs_b
			gen = max(a.generation, b.generation) + 1
			labels = spawn_labels(la, lb, self.max_generation, self.max_abs_n) if gen <= self.max_generation else []
			hit = {'id': next_hit, 'position': complex(w), 'incoming': (a_id, b_id), 'spawned': []}
			for label in labels:
				Li = logs[label.i]
				Lj = logs[label.j]
				seeds.append({'w': complex(w), 'L': (Li, Lj) if not label.diagonal else (0j, 0j), 'I': 0j,
					'mass': float(mass), 'label': label, 'parent': 'int:%d' % next_hit, 'generation': gen,
					'stokes_shift': None, 'source': None})
				hit['spawned'].append(next_id)
				next_id += 1
			hits.append(hit)
			next_hit += 1
		return hits, seeds

	########################################################################
	# Driver
	########################################################################

	def _make(self, tid, data):
		return Trajectory(tid, data['label'], data['points'], data['logs'], data['mass'], data['parent'],
			data['generation'], data['stokes_shift'], data['source'], data['stop'], data['capped'])

	def build(self):
		r""" Trace the graph

		Returns
		-------
		StokesGraph
		"""
		self._check_phase()
		self._init_logging()
		graph = StokesGraph(self.model.name, self.theta, list(self.branch_points), list(self.punctures),
			caps = self.caps)

		seeds = self.primary_seeds() + self.spiral_seeds()
		trajectories = [self._make(k, data) for k, data in enumerate(self._evolve_all(seeds))]
		self._record(0, trajectories, [], 0)

		next_hit = 0
		for generation in range(self.max_generation):
			hits, seeds = self._intersect(trajectories, generation, len(trajectories), next_hit)
			next_hit += len(hits)
			graph.intersections.extend(hits)
			start = len(trajectories)
			children = [self._make(start + k, data) for k, data in enumerate(self._evolve_all(seeds))]
			trajectories.extend(children)
			self._record(generation + 1, children, hits, len(seeds))
			if len(children) == 0:
				break

		graph.trajectories = trajectories
		graph.history = self.history
		self._cuts(graph)
		return graph

	def _cuts(self, graph):
		for t in graph.primary():
			w_b = self.branch_points[t.source].position
			graph.sqrt_cuts.append((t.id, w_b + (t.points - w_b)*np.exp(0.03j)))
		for location in ['origin', 'infinity']:
			if location not in self.pairs:
				continue
			idx = self.pairs[location]
			w_b = self.branch_points[idx].position
			if location == 'origin':
				end = 0j
			else:
				end = w_b*3*self.scale/abs(w_b)
			graph.log_cuts.append((location, idx, np.array([w_b, end], dtype = complex)))

	def _record(self, generation, trajectories, hits, spawned):
		capped = sum(1 for t in trajectories if t.capped)
		self.history.append({'generation': generation, 'trajectories': len(trajectories),
			'intersections': len(hits), 'spawned': spawned, 'capped': capped,
			'total_steps': self._total_steps, 'total_projections': self._total_projections,
			'total_rhs_evals': self._total_rhs_evals})
		if self.verbose:
			self._iter_message(generation, len(trajectories), len(hits), spawned, capped)

	def _iter_message(self, generation, lines, hits, spawned, capped):
		if generation == 0:
			head1 = " gen | lines | crossings | spawned |    steps | projections | capped |"
			head2 = "-----|-------|-----------|---------|----------|-------------|--------|"
			print(head1)
			print(head2)
		iter_message = "%4d | %5d | %9d | %7d | %8d | %11d | %6d |" % \
			(generation, lines, hits, spawned, self._total_steps, self._total_projections, capped)
		print(iter_message)


def build_graph(model, theta = 0., caps = None, **kwargs):
	r""" Trace the Stokes graph of ``model`` at phase ``theta``

	Parameters
	----------
	model: QdeModel
	theta: float
	caps: dict
		Any of ``max_generation``, ``max_abs_n``, ``max_mass``, ``stop_radius``
	kwargs:
		Passed to :class:`NetworkTracer`

	Returns
	-------
	StokesGraph
	"""
	caps = dict(caps or {})
	for key in caps:
		assert key in ('max_generation', 'max_abs_n', 'max_mass', 'stop_radius'), "unknown cap %r" % key
	kwargs.update(caps)
	return NetworkTracer(model, theta, **kwargs).build()


def _approach(traj, target, exclude_until):
	r""" Closest approach of a trajectory to a point

	Returns
	-------
	(float, float, complex) or None
		Distance, signed perpendicular miss distance and integrand at the
		closest vertex
	"""
	d = np.abs(traj.points - target)
	start = 0
	if exclude_until is not None:
		far = np.nonzero(d > exclude_until)[0]
		if len(far) == 0:
			return None
		start = far[0]
	if start >= len(d) - 1:
		return None
	k = start + int(np.argmin(d[start:]))
	k = min(max(k, 1), len(traj.points) - 1)
	tangent = traj.points[k] - traj.points[k-1]
	if tangent == 0:
		return None
	miss = _cross(tangent, target - traj.points[k])/abs(tangent)
	return float(d[k]), float(miss), traj.delta(k)


def find_saddles(model, theta_range, resolution = None, proximity = None, max_mass = None, threads = None):
	r""" Phases at which a primary line connects two branch points

	Primary lines are traced on a grid of phases; for every line and target
	branch point (its own source included, once the line has left it) the
	signed miss distance at the closest approach is recorded.  Sign changes
	are refined with :func:`scipy.optimize.brentq` and kept when the refined
	line ends within ``proximity`` of the target with a vanishing exponent
	difference; lines only passing through a branch point carry a nonzero
	multiple of :math:`2\pi i` there and are discarded.

	Parameters
	----------
	model: QdeModel
	theta_range: (float, float)
	resolution: int
		Number of phases in the grid
	proximity: float
		Relative to the coordinate scale

	Returns
	-------
	list of (float, (int, int))
		One entry per critical phase, with the connected branch point indices
	"""
	a, b = map(float, theta_range)
	assert np.isfinite(a) and np.isfinite(b) and a < b, "theta_range must be a finite increasing pair"
	resolution = DEFAULTS['saddle_steps'] if resolution is None else int(resolution)
	proximity = DEFAULTS['saddle_proximity'] if proximity is None else proximity
	tol = DEFAULTS['saddle_tol']

	def trace(theta):
		tracer = NetworkTracer(model, theta, max_generation = 0, spirals = False, max_mass = max_mass,
			threads = threads)
		data = tracer._evolve_all(tracer.primary_seeds())
		return tracer, data

	def misses(theta):
		tracer, data = trace(theta)
		out = {}
		scale = tracer.scale
		for seed in data:
			traj = tracer._make(0, seed)
			for k, bp in enumerate(tracer.branch_points):
				exclude = 50*bp.radius if k == seed['source'] else None
				approach = _approach(traj, bp.position, exclude)
				if approach is None:
					continue
				dist, miss, delta = approach
				if dist < 0.5*scale:
					out[(seed['source'], seed['ray'], k)] = (dist, miss, delta, scale)
		return out

	grid = np.linspace(a, b, resolution)
	samples = [misses(theta) for theta in grid]
	found = []
	for t0, t1, m0, m1 in zip(grid[:-1], grid[1:], samples[:-1], samples[1:]):
		for key in sorted(set(m0) & set(m1)):
			if np.sign(m0[key][1]) == np.sign(m1[key][1]):
				continue
			def f(theta, key = key):
				m = misses(theta).get(key)
				return m[1] if m is not None else np.nan
			try:
				fa, fb = f(t0), f(t1)
				if not (np.isfinite(fa) and np.isfinite(fb)) or np.sign(fa) == np.sign(fb):
					continue
				theta_c = brentq(f, t0, t1, xtol = 0.1*tol)
			except ValueError:
				continue
			m = misses(theta_c).get(key)
			if m is None:
				continue
			dist, miss, delta, scale = m
			if dist < proximity*scale and abs(delta) < np.pi:
				found.append((float(theta_c), (key[0], key[2])))
				logger.debug("saddle at theta = %.6f between branch points %d and %d", theta_c, key[0], key[2])
	found.sort()
	out = []
	for theta_c, pair in found:
		if out and abs(theta_c - out[-1][0]) < tol:
			continue
		out.append((theta_c, pair))
	return out


########################################################################
# Dumps
########################################################################

def _opt(value):
	return '' if value is None else value


def dump(graph, f = None):
	r""" Write a graph as tab separated records

	Blocks ``graph``, ``branch_points``, ``punctures``, ``trajectories``,
	``points``, ``intersections`` and ``cuts``; every polyline vertex is
	included.  Floats are written exactly, so :func:`read_dump` recovers the
	graph bit for bit.

	Parameters
	----------
	graph: StokesGraph
	f: file-like or None
		If None the records are returned as a string
	"""
	meta = PGF('graph')
	keys = ['model', 'theta'] + sorted(graph.caps)
	meta.add('key', keys)
	meta.add('value', [graph.model_name or '-', float(graph.theta)] + [graph.caps[k] for k in sorted(graph.caps)])

	bps = PGF('branch_points')
	B = graph.branch_points
	columns = [('index', list(range(len(B)))),
		('re', [b.position.real for b in B]), ('im', [b.position.imag for b in B]),
		('sign_class', [b.sign_class for b in B]),
		('c0_re', [b.c0.real for b in B]), ('c0_im', [b.c0.imag for b in B]),
		('signature', [b.signature for b in B]), ('shift', [b.enc_log_shift for b in B]),
		('ref_angle', [b.ref_angle for b in B]),
		('yp_re', [complex(b.ref_pair[0]).real for b in B]), ('yp_im', [complex(b.ref_pair[0]).imag for b in B]),
		('ym_re', [complex(b.ref_pair[1]).real for b in B]), ('ym_im', [complex(b.ref_pair[1]).imag for b in B]),
		('radius', [b.radius for b in B]), ('puncture', [_opt(b.puncture) for b in B])]
	for name, col in columns:
		bps.add(name, col)

	punc = PGF('punctures')
	P = graph.punctures
	punc.add('location', [p.location for p in P])
	punc.add('kind', [p.kind for p in P])
	punc.add('degree_k', [_opt(p.degree_k) for p in P])
	punc.add('mu_re', [_opt(None if p.mu is None else complex(p.mu).real) for p in P])
	punc.add('mu_im', [_opt(None if p.mu is None else complex(p.mu).imag) for p in P])

	T = graph.trajectories
	trajs = PGF('trajectories')
	trajs.add('id', [t.id for t in T])
	trajs.add('label', [str(t.label) for t in T])
	trajs.add('parent', [t.parent for t in T])
	trajs.add('generation', [t.generation for t in T])
	trajs.add('stokes_shift', [_opt(t.stokes_shift) for t in T])
	trajs.add('source', [_opt(t.source) for t in T])
	trajs.add('stop', [t.stop for t in T])
	trajs.add('capped', [bool(t.capped) for t in T])
	trajs.add('npoints', [len(t.points) for t in T])

	pts = PGF('points')
	ids, ks, re, im, lire, liim, ljre, ljim, mass = [], [], [], [], [], [], [], [], []
	for t in T:
		for k in range(len(t.points)):
			ids.append(t.id)
			ks.append(k)
			re.append(float(t.points[k].real))
			im.append(float(t.points[k].imag))
			lire.append(float(t.logs[k, 0].real))
			liim.append(float(t.logs[k, 0].imag))
			ljre.append(float(t.logs[k, 1].real))
			ljim.append(float(t.logs[k, 1].imag))
			mass.append(float(t.mass[k]))
	for name, col in [('id', ids), ('k', ks), ('re', re), ('im', im), ('Li_re', lire), ('Li_im', liim),
		('Lj_re', ljre), ('Lj_im', ljim), ('mass', mass)]:
		pts.add(name, col)

	I = graph.intersections
	ints = PGF('intersections')
	ints.add('id', [h['id'] for h in I])
	ints.add('re', [float(h['position'].real) for h in I])
	ints.add('im', [float(h['position'].imag) for h in I])
	ints.add('a', [h['incoming'][0] for h in I])
	ints.add('b', [h['incoming'][1] for h in I])
	ints.add('spawned', [','.join(str(s) for s in h['spawned']) for h in I])

	cuts = PGF('cuts')
	kinds, owners, anchors, ks, re, im = [], [], [], [], [], []
	for tid, line in graph.sqrt_cuts:
		for k, z in enumerate(line):
			kinds.append('sqrt')
			owners.append(str(tid))
			anchors.append(tid)
			ks.append(k)
			re.append(float(z.real))
			im.append(float(z.imag))
	for location, idx, line in graph.log_cuts:
		for k, z in enumerate(line):
			kinds.append('log')
			owners.append(location)
			anchors.append(idx)
			ks.append(k)
			re.append(float(z.real))
			im.append(float(z.imag))
	for name, col in [('kind', kinds), ('owner', owners), ('anchor', anchors), ('k', ks), ('re', re), ('im', im)]:
		cuts.add(name, col)

	return write_blocks([meta, bps, punc, trajs, pts, ints, cuts], f)


def _none(value):
	return None if value == '' else value


def read_dump(text):
	r""" Rebuild a :class:`StokesGraph` from the records written by :func:`dump` """
	blocks = read_blocks(text)
	meta = dict(zip(blocks['graph']['key'], blocks['graph']['value']))
	model_name = meta.pop('model')
	graph = StokesGraph('' if model_name == '' else str(model_name), float(meta.pop('theta')))
	graph.caps = dict(meta)

	for row in blocks['branch_points'].rows():
		graph.branch_points.append(BranchPoint(complex(row['re'], row['im']), int(row['sign_class']),
			complex(row['c0_re'], row['c0_im']), str(row['signature']), int(row['shift']), float(row['ref_angle']),
			(complex(row['yp_re'], row['yp_im']), complex(row['ym_re'], row['ym_im'])), float(row['radius']),
			_none(row['puncture'])))

	for row in blocks['punctures'].rows():
		mu = None if row['mu_re'] == '' else complex(row['mu_re'], row['mu_im'])
		graph.punctures.append(Puncture(row['location'], row['kind'], _none(row['degree_k']), mu = mu))

	pts = blocks['points']
	ids = np.array(pts['id'], dtype = int)
	for row in blocks['trajectories'].rows():
		I = np.nonzero(ids == row['id'])[0]
		points = np.array([complex(pts['re'][k], pts['im'][k]) for k in I], dtype = complex)
		logs = np.array([[complex(pts['Li_re'][k], pts['Li_im'][k]), complex(pts['Lj_re'][k], pts['Lj_im'][k])]
			for k in I], dtype = complex).reshape(-1, 2)
		mass = np.array([pts['mass'][k] for k in I], dtype = float)
		graph.trajectories.append(Trajectory(int(row['id']), TrajectoryLabel.parse(row['label']), points, logs, mass,
			str(row['parent']), int(row['generation']), _none(row['stokes_shift']), _none(row['source']),
			'' if row['stop'] == '' else str(row['stop']), bool(row['capped'])))

	for row in blocks['intersections'].rows():
		spawned = str(row['spawned'])
		graph.intersections.append({'id': int(row['id']), 'position': complex(row['re'], row['im']),
			'incoming': (int(row['a']), int(row['b'])),
			'spawned': [int(s) for s in spawned.split(',')] if spawned != '' else []})

	cuts = blocks['cuts']
	lines = {}
	for row in cuts.rows():
		key = (row['kind'], str(row['owner']), row['anchor'])
		lines.setdefault(key, []).append(complex(row['re'], row['im']))
	for (kind, owner, anchor), line in lines.items():
		if kind == 'sqrt':
			graph.sqrt_cuts.append((int(anchor), np.array(line, dtype = complex)))
		else:
			graph.log_cuts.append((owner, int(anchor), np.array(line, dtype = complex)))
	return graph
