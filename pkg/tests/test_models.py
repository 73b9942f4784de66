import numpy as np
import pytest
import sympy
from qwkb.models import *
from qwkb.stokesalg import var, regularized_trace, evaluate
from qwkb.errors import ConfigError, DegenerateModuli, IncompleteAssignment


def test_builtins_verify():
	for name, desc in list_builtins():
		bundle = builtin(name)
		results = verify_bundle(bundle)
		for check, ok, want, got in results:
			print(name, check, ok)
			assert ok, "%s %s: expected %s, got %s" % (name, check, want, got)
		assert len(results) > 0


def test_qairy_full_loop():
	bundle = builtin('qairy')
	Y = var('Y')
	assert bundle.trace('full_loop') == -Y**2 - Y**-2
	assert bundle.monodromy('full_loop').det() == 1


def test_mathieu_charges():
	bundle = builtin('qmathieu')
	tr = bundle.trace('full_loop')
	Xg2, Xg3, Xg4 = var('Xg2 Xg3 Xg4')
	half = sympy.Rational(1, 2)
	out = charge_map(bundle, tr)
	print(out)
	assert out == Xg2*Xg3**half*Xg4**half + Xg3**-half*Xg4**half + Xg3**-half*Xg4**-half + Xg3**half*Xg4**half


def test_charge_map_incomplete():
	Y1, Y2 = var('Y1 Y2')
	with pytest.raises(IncompleteAssignment):
		charge_map(None, Y1*Y2, {'Xg1': Y1**2})
	with pytest.raises(IncompleteAssignment):
		charge_map(None, Y1, {'Xg1': Y1 + Y2})
	Xg1 = var('Xg1')
	assert charge_map(None, Y1, {'Xg1': Y1**2}) == Xg1**sympy.Rational(1, 2)


def test_conifold_trace():
	bundle = builtin('qhyper', {'Q': 0.97})
	XA, XB = var('XA XB')
	assert bundle.trace('half_monodromy') == XA/XB
	assert regularized_trace(bundle.monodromy('full_loop'), 'drop_all_xi') == XB**2 + XB**-2 + XA**2*XB**-2


def test_closures():
	bundle = builtin('qairy')
	path, values, trace = bundle.closures['birkhoff']
	for hbar in [0.5, 1.7, 3.]:
		got = evaluate(bundle.trace(path), values(hbar))
		assert abs(got - trace(hbar)) <= 1e-10*abs(trace(hbar))


def test_mathieu_rescaled():
	kappa, tau = sympy.Rational(1, 4), sympy.Rational(1, 10)
	coeffs = mathieu_rescaled(kappa, tau)
	assert coeffs[0] == kappa
	assert coeffs[1] == 1
	assert coeffs[-1] == tau**2/4
	assert abs(airy_kappa_deviation(kappa, tau) - 0.01/4) < 1e-15
	assert airy_kappa_deviation(kappa, sympy.Rational(1, 100)) < airy_kappa_deviation(kappa, tau)


def test_hyper_matches_mathieu():
	for Q in [0.97, 3, sympy.Rational(1, 3)]:
		assert hyper_matches_mathieu(Q)


def test_builtin_errors():
	with pytest.raises(ConfigError):
		builtin('qbessel')
	with pytest.raises(ConfigError):
		builtin('qairy', {'kappa': 1})
	with pytest.raises(DegenerateModuli):
		builtin('qairy_kappa', {'kappa': 1})
	with pytest.raises(DegenerateModuli):
		builtin('qmathieu', {'kappa': 0, 'tau': 1})
	with pytest.raises(DegenerateModuli):
		builtin('qhyper', {'Q': 2})


def test_cycles_declared():
	for params in [{'kappa': 0, 'tau': 0.97}, {}]:
		bundle = builtin('qmathieu', params)
		assert sorted(bundle.cycles) == ['gamma1', 'gamma2', 'gamma3', 'gamma4']
		assert abs(bundle.cycle_total + 4*np.pi**2) < 1e-12
		for e in bundle.edges.values():
			assert e['start'] in bundle.branch_names and e['end'] in bundle.branch_names
		for c in bundle.cycles.values():
			assert set(c['edges']) <= set(bundle.edges)
		# edges cancel in the sum, one D0 charge remains
		net = {}
		for c in bundle.cycles.values():
			for e, coeff in c['edges'].items():
				net[e] = net.get(e, 0) + coeff
		assert all(v == 0 for v in net.values())
		assert sum(c.get('d0', 0) for c in bundle.cycles.values()) == 1
	assert abs(builtin('qairy_kappa', {'kappa': 0.5}).cycle_total - 8*np.pi**2/3) < 1e-12


if __name__ == '__main__':
	test_builtins_verify()
