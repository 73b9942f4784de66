import numpy as np
import pytest
from qwkb.periods import *
from qwkb.models import builtin
from qwkb.errors import ConfigError


def test_residue_qairy():
	model = builtin('qairy').model
	loop = ContourSpec.loop(0.)
	for n, expected in [(0, -np.pi**2), (1, -np.pi**2 - 4*np.pi**2), (-1, -np.pi**2 + 4*np.pi**2)]:
		Z = contour_period(model, loop, 1, n)
		R = residue_formula(model, 'origin', 1, n)
		print(n, Z, R)
		assert abs(Z - expected) < 1e-8
		assert abs(R - expected) < 1e-12

	assert abs(contour_period(model, loop, -1, 0) - np.pi**2) < 1e-8


def test_residue_kappa():
	model = builtin('qairy_kappa', {'kappa': 0.5}).model
	loop = ContourSpec.loop(0., radius = 0.25)
	Z = contour_period(model, loop, 1, 0)
	print(Z)
	assert abs(Z + 2*np.pi**2/3) < 1e-8
	assert abs(residue_formula(model) + 2*np.pi**2/3) < 1e-12


def test_orientation_and_hbar():
	model = builtin('qairy').model
	Z = contour_period(model, ContourSpec.loop(0.), 1, 0)
	Zrev = contour_period(model, ContourSpec.loop(0., winding = -1), 1, 0)
	assert abs(Z + Zrev) < 1e-8
	Z2 = contour_period(model, ContourSpec.loop(0., winding = 2), 1, 0)
	assert abs(Z2 - 2*Z) < 1e-8

	hbar = 0.7 + 0.2j
	assert abs(contour_period(model, ContourSpec.loop(0.), 1, 0, hbar) - Z/hbar) < 1e-8


def test_flavor_cycle():
	model = builtin('qairy_kappa', {'kappa': 0.5}).model
	loop = ContourSpec.loop(0., radius = 0.2)
	total = cycle_period(model, [(loop, 1, 0), (loop, -1, 0)])
	assert abs(total) < 1e-8


def test_voros_trivial():
	model = builtin('qairy').model
	assert voros_leading(model, ContourSpec.segment(1., 1.)) == 0


def test_cycle_totals():
	for name, params in [('qairy', {}), ('qairy_kappa', {'kappa': 0.5}),
			('qmathieu', {'kappa': 0, 'tau': 0.97}), ('qmathieu', {})]:
		bundle = builtin(name, params)
		total = sum(voros_cycle(bundle, c) for c in sorted(bundle.cycles))
		print(name, params, total, bundle.cycle_total)
		assert abs(total - bundle.cycle_total) < 1e-6

	assert abs(builtin('qairy').cycle_total - 2*np.pi**2) < 1e-12
	assert abs(builtin('qmathieu').cycle_total + 4*np.pi**2) < 1e-12


def test_log_shifted_edge():
	# the shift adds 2 pi i dn log(x1/x2) along the straight edge
	bundle = builtin('qmathieu')
	x = bundle.branch_names
	plain = voros_leading(bundle.model, bundle_edge(bundle, 'e21'))
	shifted = voros_leading(bundle.model, bundle_edge(bundle, 'e21_log'))
	print(plain, shifted)
	assert abs(shifted - plain + 2j*np.pi*np.log(x['x1']/x['x2'])) < 1e-6
	assert abs(voros_cycle(bundle, 'gamma2') - shifted) < 1e-12
	hbar = 0.5 + 0.1j
	assert abs(voros_cycle(bundle, 'gamma4', hbar) - voros_cycle(bundle, 'gamma4')/hbar) < 1e-8


def test_qairy_segment_not_real():
	# any lift from -1 to 1 picks up -+pi^2 -+ 2 pi i log 2, so the real
	# exponent at theta = 0 belongs to the loop around the origin
	model = builtin('qairy').model
	values = []
	for via in ([0.5j], [-0.5j]):
		V = voros_leading(model, ContourSpec.segment(-1., 1., via))
		print(via, V)
		assert abs(abs(V.real) - np.pi**2) < 1e-6
		assert abs(abs(V.imag) - 2*np.pi*np.log(2)) < 1e-6
		values.append(V)
	assert abs(values[0].real + values[1].real) < 1e-6

	bundle = builtin('qairy')
	V = voros_cycle(bundle, 'd0_loop')
	print(V)
	assert abs(V.imag) < 1e-8
	assert abs(V.real - 2*np.pi**2) < 1e-6


def test_period_series_qairy():
	model = builtin('qairy').model
	Z = period_series(model, ContourSpec.loop(0.), 1, 0, order = 4)
	print(Z)
	assert len(Z) == 5
	assert abs(Z[0] + np.pi**2) < 1e-8
	for z in Z[1:]:
		assert abs(z) < 1e-8


def test_errors():
	model = builtin('qairy').model
	with pytest.raises(ConfigError):
		voros_leading(model, ContourSpec.loop(0.))
	with pytest.raises(ConfigError):
		voros_leading(model, ContourSpec.segment(1., 2.))
	with pytest.raises(ConfigError):
		period_series(model, ContourSpec.segment(-1., 1.), order = 1)
	with pytest.raises(ConfigError):
		contour_period(model, ContourSpec.loop(0., radius = 1.))
	with pytest.raises(ConfigError):
		residue_formula(builtin('qramanujan').model)


if __name__ == '__main__':
	test_cycle_totals()
