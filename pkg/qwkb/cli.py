r""" Command line interface

Usage::

	qwkb curve --model qmathieu --param kappa=3/100*I --param tau=0.97
	qwkb series --model qairy --sign + --order 4 --verify
	qwkb trace --model qmathieu --theta 0.6 --svg out.svg --dump out.tsv
	qwkb saddles --model qairy --range -1.5,1.5 --steps 21
	qwkb monodromy --model qairy --path full_loop
	qwkb period --model qairy --loop 0 --sign + --n 1 --order 2
	qwkb models list
	qwkb verify --model qmathieu

Every subcommand accepts ``--format text|records``; records are tab
separated blocks readable by :func:`qwkb.pgf.read_blocks`.  Errors raised by
the library exit with status 1 and print ``error<TAB>kind<TAB>message``;
usage errors exit with status 2.
"""
import sys
import logging
import argparse

import numpy as np

from .curve import load_model, branch_points, classify_punctures
from .series import riccati_coeffs, log_r_coeffs, log_r_direct, verify_riccati
from .network import build_graph, find_saddles, dump
from .render import render_svg
from .stokesalg import parse_word, compose_path, regularized_trace
from .models import builtin, list_builtins, verify_bundle
from .periods import ContourSpec, contour_period, residue_formula, period_series, voros_cycle
from .config import RunConfig, find_model_file
from .errors import QwkbError, ConfigError
from .pgf import PGF, write_blocks

__all__ = ['main', 'build_parser']

logger = logging.getLogger(__name__)


def _parse_param(text):
	if '=' not in text:
		raise argparse.ArgumentTypeError("parameters are given as key=value, got %r" % text)
	key, value = text.split('=', 1)
	return key.strip(), value.strip()


def _parse_sign(text):
	if text in ('+', '+1', '1'):
		return 1
	if text in ('-', '-1'):
		return -1
	raise argparse.ArgumentTypeError("sign must be + or -, got %r" % text)


def _parse_range(text):
	try:
		a, b = [float(v) for v in text.split(',')]
	except ValueError:
		raise argparse.ArgumentTypeError("range is given as a,b, got %r" % text)
	return a, b


def build_parser():
	parser = argparse.ArgumentParser(prog = 'qwkb', description = "Exact WKB analysis of q-difference equations")
	common = argparse.ArgumentParser(add_help = False)
	common.add_argument('--format', choices = ['text', 'records'], default = 'text')
	common.add_argument('--threads', type = int, default = None)
	common.add_argument('-v', '--verbose', action = 'count', default = 0)

	model = argparse.ArgumentParser(add_help = False)
	model.add_argument('--model', required = True, help = "builtin name or model file")
	model.add_argument('--param', action = 'append', type = _parse_param, default = [], dest = 'params',
		help = "modulus of a builtin model, key=value")

	sub = parser.add_subparsers(dest = 'subcommand')
	sub.required = True

	p = sub.add_parser('curve', parents = [common, model], help = "branch points and punctures")
	p.add_argument('--theta', type = float, default = 0.)

	p = sub.add_parser('series', parents = [common, model], help = "q-Riccati and log R coefficients")
	p.add_argument('--sign', type = _parse_sign, default = 1)
	p.add_argument('--order', type = int, default = None)
	p.add_argument('--n', type = int, default = 0)
	p.add_argument('--verify', action = 'store_true')
	p.add_argument('--points', type = lambda s: [complex(v) for v in s.split(',')], default = None)

	p = sub.add_parser('trace', parents = [common, model], help = "Stokes graph at a phase")
	p.add_argument('--theta', type = float, default = 0.)
	p.add_argument('--gen', type = int, default = None, dest = 'max_generation')
	p.add_argument('--nmax', type = int, default = None, dest = 'max_abs_n')
	p.add_argument('--mass', type = float, default = None, dest = 'max_mass')
	p.add_argument('--stop-radius', type = float, default = None, dest = 'stop_radius')
	p.add_argument('--svg', default = None)
	p.add_argument('--dump', default = None)

	p = sub.add_parser('saddles', parents = [common, model], help = "critical phases")
	p.add_argument('--range', type = _parse_range, default = (-np.pi/2, np.pi/2), dest = 'theta_range')
	p.add_argument('--steps', type = int, default = None)

	p = sub.add_parser('monodromy', parents = [common, model], help = "compose a path word")
	p.add_argument('--path', required = True, help = "curated path name or a word")
	p.add_argument('--mode', choices = ['xi_graded', 'drop_all_xi'], default = None)

	p = sub.add_parser('period', parents = [common, model], help = "leading order periods")
	group = p.add_mutually_exclusive_group(required = True)
	group.add_argument('--loop', type = complex, default = None, help = "center of a loop")
	group.add_argument('--cycle', default = None, help = "named cycle of a builtin model")
	p.add_argument('--radius', type = float, default = None)
	p.add_argument('--sign', type = _parse_sign, default = 1)
	p.add_argument('--n', type = int, default = 0)
	p.add_argument('--order', type = int, default = None)
	p.add_argument('--hbar', type = complex, default = 1.)

	p = sub.add_parser('models', parents = [common], help = "list the builtin models")
	p.add_argument('action', choices = ['list'])

	p = sub.add_parser('verify', parents = [common, model], help = "check the curated identities")
	return parser


def _load(cfg):
	r""" Bundle (or None) and model named by the configuration """
	if cfg.model in dict(list_builtins()):
		bundle = builtin(cfg.model, dict(cfg.params))
		return bundle, bundle.model
	if cfg.params:
		raise ConfigError("--param applies to builtin models only")
	path = find_model_file(cfg.model)
	if path is None:
		raise ConfigError("no builtin model or model file named %r" % cfg.model)
	return None, load_model(path)


def _bundle(cfg):
	bundle, _ = _load(cfg)
	if bundle is None:
		raise ConfigError("%s requires a builtin model" % cfg.subcommand)
	return bundle


def _fmt(z):
	z = complex(z)
	return "%.16g%+.16gj" % (z.real, z.imag)


class _Output:
	r""" Collects text lines and record blocks; prints one of the two """
	def __init__(self, cfg, out):
		self.cfg = cfg
		self.out = out
		self.lines = []
		self.blocks = []

	def line(self, text = ''):
		self.lines.append(text)

	def block(self, name, columns):
		pgf = PGF(name)
		for key, col in columns:
			pgf.add(key, col)
		self.blocks.append(pgf)

	def flush(self):
		if self.cfg.format == 'records':
			if self.blocks:
				self.out.write(write_blocks(self.blocks))
		else:
			for line in self.lines:
				self.out.write(line + "\n")


def _cmd_curve(cfg, out):
	_, model = _load(cfg)
	bps = branch_points(model, cfg.theta)
	punctures = classify_punctures(model)
	out.line("model %s" % model.name)
	out.line("branch points:")
	for k, b in enumerate(bps):
		out.line("  %d  w = %s  T0 = %+d  signature %s  shift %d  puncture %s"
			% (k, _fmt(b.position), b.sign_class, b.signature, b.enc_log_shift, b.puncture or '-'))
	out.line("punctures:")
	for p in punctures:
		extra = ''
		if p.degree_k is not None:
			extra = "  degree %d" % p.degree_k
		if p.mu is not None:
			extra = "  mu = %s" % _fmt(p.mu)
		if p.exponent is not None:
			extra = "  exponent %s" % p.exponent
		out.line("  %s  %s%s" % (p.location, p.kind, extra))
	out.block('branch_points', [('index', list(range(len(bps)))),
		('re', [b.position.real for b in bps]), ('im', [b.position.imag for b in bps]),
		('sign_class', [b.sign_class for b in bps]), ('signature', [b.signature for b in bps]),
		('shift', [b.enc_log_shift for b in bps]), ('puncture', [b.puncture or '' for b in bps])])
	out.block('punctures', [('location', [p.location for p in punctures]), ('kind', [p.kind for p in punctures]),
		('degree_k', ['' if p.degree_k is None else p.degree_k for p in punctures])])
	return 0


def _cmd_series(cfg, out):
	_, model = _load(cfg)
	order = cfg.get('series_order') if cfg.order is None else cfg.order
	series = riccati_coeffs(model, cfg.sign, order)
	out.line("q-Riccati coefficients of %s, sheet %s" % (model.name, '+' if cfg.sign == 1 else '-'))
	names, nums, dens = [], [], []
	for k in range(len(series)):
		num, den = series[k].as_fraction()
		out.line("  R_%d = (%s)/(%s)" % (k, num, den))
		names.append('R_%d' % k)
		nums.append(str(num).replace(' ', ''))
		dens.append(str(den).replace(' ', ''))
	if order >= 1:
		logr = log_r_coeffs(series, cfg.n)
		for k in range(1, order + 1):
			num, den = logr.D(k).as_fraction()
			out.line("  D_%d = (%s)/(%s)" % (k, num, den))
			names.append('D_%d' % k)
			nums.append(str(num).replace(' ', ''))
			dens.append(str(den).replace(' ', ''))
	out.block('series', [('name', names), ('numerator', nums), ('denominator', dens)])
	if cfg.verify:
		kw = {} if cfg.points is None else {'sample_points': cfg.points}
		worst = verify_riccati(series, **kw)
		direct = log_r_direct(series, cfg.n)
		agree = all(logr.D(k) == direct.D(k) for k in range(1, order + 1)) if order >= 1 else True
		out.line("largest residual %.3e; determinant and direct logarithm agree: %s" % (worst, agree))
		out.block('verify', [('residual', [worst]), ('log_agree', [agree])])
		if not agree:
			return 1
	return 0


def _cmd_trace(cfg, out):
	_, model = _load(cfg)
	caps = {k: getattr(cfg, k) for k in ['max_generation', 'max_abs_n', 'max_mass', 'stop_radius']
		if getattr(cfg, k) is not None}
	graph = build_graph(model, cfg.theta, caps, threads = cfg.threads, verbose = cfg.verbose > 0)
	out.line("model %s, theta = %.6g" % (model.name, cfg.theta))
	out.line("%d branch points, %d primary lines, %d trajectories, %d intersections"
		% (len(graph.branch_points), len(graph.primary()), graph.count(), len(graph.intersections)))
	for t in graph.trajectories:
		shift = '' if t.stokes_shift is None else "  l = %+d" % t.stokes_shift
		out.line("  %3d  %-9s %-14s gen %d  points %5d  mass %8.3f  stop %s%s"
			% (t.id, t.label, t.parent, t.generation, len(t), t.mass[-1], t.stop, shift))
	T = graph.trajectories
	out.block('trajectories', [('id', [t.id for t in T]), ('label', [str(t.label) for t in T]),
		('parent', [t.parent for t in T]), ('generation', [t.generation for t in T]),
		('stokes_shift', ['' if t.stokes_shift is None else t.stokes_shift for t in T]),
		('stop', [t.stop for t in T]), ('capped', [t.capped for t in T])])
	if cfg.dump is not None:
		with open(cfg.dump, 'w') as f:
			dump(graph, f)
	if cfg.svg is not None:
		render_svg(graph, cfg.svg)
	return 0


def _cmd_saddles(cfg, out):
	_, model = _load(cfg)
	found = find_saddles(model, cfg.theta_range, cfg.steps, threads = cfg.threads)
	out.line("%d critical phases in (%g, %g)" % (len(found), cfg.theta_range[0], cfg.theta_range[1]))
	for theta, (i, j) in found:
		out.line("  theta = %.8f  branch points %d -> %d" % (theta, i, j))
	out.block('saddles', [('theta', [t for t, _ in found]), ('source', [p[0] for _, p in found]),
		('target', [p[1] for _, p in found])])
	return 0


def _cmd_monodromy(cfg, out):
	bundle, model = _load(cfg)
	if bundle is not None and cfg.path in bundle.paths:
		word = bundle.paths[cfg.path]
		mode = cfg.mode or bundle.modes[cfg.path]
	else:
		word = parse_word(cfg.path)
		mode = cfg.mode or 'xi_graded'
	M = compose_path(word)
	tr = regularized_trace(M, mode)
	out.line("word  %s" % word)
	out.line("matrix")
	for row in M.rows():
		out.line("  [%s]" % ', '.join(str(e) for e in row))
	out.line("trace (%s)  %s" % (mode, tr))
	out.block('monodromy', [('word', [str(word).replace(' ', '')]), ('mode', [mode]),
		('m11', [str(M[0, 0]).replace(' ', '')]), ('m12', [str(M[0, 1]).replace(' ', '')]),
		('m21', [str(M[1, 0]).replace(' ', '')]), ('m22', [str(M[1, 1]).replace(' ', '')]),
		('trace', [str(tr).replace(' ', '')])])
	return 0


def _cmd_period(cfg, out):
	bundle, model = _load(cfg)
	if cfg.cycle is not None:
		if bundle is None or cfg.cycle not in bundle.cycles:
			raise ConfigError("no cycle named %r" % cfg.cycle)
		value = voros_cycle(bundle, cfg.cycle, hbar = cfg.hbar)
		out.line("Voros exponent of %s: %s" % (cfg.cycle, _fmt(value)))
		out.line("note: the single valued prefactor is not included on open segments")
		out.block('period', [('cycle', [cfg.cycle]), ('re', [value.real]), ('im', [value.imag])])
		return 0
	spec = ContourSpec.loop(cfg.loop, cfg.radius)
	if cfg.order is not None:
		values = period_series(model, spec, cfg.sign, cfg.n, cfg.order, cfg.hbar)
	else:
		values = [contour_period(model, spec, cfg.sign, cfg.n, cfg.hbar)]
	out.line("period around %s, sheet %s, n = %d: %s" % (_fmt(cfg.loop), '+' if cfg.sign == 1 else '-', cfg.n,
		_fmt(values[0])))
	for k, v in enumerate(values[1:], 1):
		out.line("  hbar^%d coefficient  %s" % (k, _fmt(v)))
	out.block('period', [('order', list(range(len(values)))), ('re', [complex(v).real for v in values]),
		('im', [complex(v).imag for v in values])])
	return 0


def _cmd_models(cfg, out):
	rows = list_builtins()
	for name, desc in rows:
		out.line("%-12s %s" % (name, desc))
	out.block('models', [('name', [n for n, _ in rows]), ('description', [d for _, d in rows])])
	return 0


def _cmd_verify(cfg, out):
	bundle = _bundle(cfg)
	model = bundle.model
	results = list(verify_bundle(bundle))

	for sign in (1, -1):
		series = riccati_coeffs(model, sign)
		try:
			worst = verify_riccati(series)
			results.append(('riccati.%s' % ('+' if sign == 1 else '-'), True, '0', '%.3e' % worst))
		except QwkbError as e:
			results.append(('riccati.%s' % ('+' if sign == 1 else '-'), False, '0', str(e)))
		N = min(6, series.order)
		det, direct = log_r_coeffs(series), log_r_direct(series)
		ok = all(det.D(k) == direct.D(k) for k in range(1, N + 1))
		results.append(('log_r.%s' % ('+' if sign == 1 else '-'), ok, 'equal', 'equal' if ok else 'differ'))

	origin = [p for p in classify_punctures(model) if p.location == 'origin'][0]
	if origin.kind == 'regular':
		spec = ContourSpec.loop(0.)
		for sign in (1, -1):
			for n in (-1, 0, 1):
				want = residue_formula(model, 'origin', sign, n)
				got = contour_period(model, spec, sign, n)
				ok = abs(got - want) < 1e-8
				results.append(('residue.%+d.%d' % (sign, n), ok, _fmt(want), _fmt(got)))

	if bundle.cycle_total is not None:
		got = sum(voros_cycle(bundle, name) for name in sorted(bundle.cycles))
		ok = abs(got - bundle.cycle_total) < 1e-6*max(1, abs(bundle.cycle_total))
		results.append(('cycles.total', ok, _fmt(bundle.cycle_total), _fmt(got)))

	failed = [r for r in results if not r[1]]
	for name, ok, want, got in results:
		if ok:
			out.line("ok      %s" % name)
		else:
			out.line("FAILED  %s\n        expected %s\n        got      %s" % (name, want, got))
	out.line("%d checks, %d failed" % (len(results), len(failed)))
	out.block('verify', [('check', [r[0] for r in results]), ('ok', [bool(r[1]) for r in results]),
		('expected', [r[2].replace('\t', ' ').replace('\n', ' ') for r in results]),
		('got', [r[3].replace('\t', ' ').replace('\n', ' ') for r in results])])
	return 1 if failed else 0


_COMMANDS = {
	'curve': _cmd_curve,
	'series': _cmd_series,
	'trace': _cmd_trace,
	'saddles': _cmd_saddles,
	'monodromy': _cmd_monodromy,
	'period': _cmd_period,
	'models': _cmd_models,
	'verify': _cmd_verify,
	}


def _config(args):
	mapping = dict(vars(args))
	subcommand = mapping.pop('subcommand')
	mapping['params'] = dict(mapping.get('params') or [])
	return RunConfig.from_mapping(subcommand, mapping)


def main(argv = None, out = None):
	r""" Run the command line interface

	Parameters
	----------
	argv: list of str or None
		Arguments without the program name; defaults to ``sys.argv[1:]``
	out: file-like or None
		Destination of the output; defaults to standard output

	Returns
	-------
	int
		Exit status
	"""
	out = sys.stdout if out is None else out
	parser = build_parser()
	args = parser.parse_args(argv)
	level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
	logging.basicConfig(level = level, format = "%(levelname)s %(name)s: %(message)s")
	try:
		cfg = _config(args)
		output = _Output(cfg, out)
		status = _COMMANDS[cfg.subcommand](cfg, output)
		output.flush()
	except QwkbError as e:
		out.write("error\t%s\t%s\n" % (e.kind, str(e).replace('\t', ' ').replace('\n', ' ')))
		return 1
	return status


if __name__ == '__main__':
	sys.exit(main())
