import numpy as np
import pytest
import sympy
from qwkb.curve import *
from qwkb.models import builtin
from qwkb.errors import (DegenerateModuli, DegenerateSheets, LogPunctureHit, ConfigError,
	DivergentProduct, NonSimpleBranchPoint)


def test_sheets_at():
	model = builtin('qairy').model
	yp, ym = sheets_at(model, 1.25)
	assert abs(yp - 2) < 1e-14 and abs(ym - 0.5) < 1e-14

	ym2, yp2 = sheets_at(model, 1.25, branch_choice = -1)
	assert yp2 == yp and ym2 == ym

	for w in [0.3 + 2j, -4., 1e-3j, 7 - 0.1j]:
		yp, ym = sheets_at(model, w)
		assert abs(yp*ym - 1) < 1e-12
		assert abs(yp + ym - 2*w) < 1e-12

	yp, ym = sheets_at(model, 1e-9)
	assert abs(abs(yp.imag) - 1) < 1e-8 and abs(yp + ym) < 1e-8

	with pytest.raises(DegenerateSheets):
		sheets_at(model, 1.)

	ram = builtin('qramanujan').model
	with pytest.raises(LogPunctureHit):
		sheets_at(ram, 0.)


def test_branch_points_qairy():
	model = builtin('qairy').model
	B = branch_points(model)
	print(B)
	assert len(B) == 2
	assert abs(B[0].position + 1) < 1e-13 and abs(B[1].position - 1) < 1e-13
	assert [b.sign_class for b in B] == [-1, 1]
	for b in B:
		assert abs(b.c0) > 0
		assert b.signature in ('+-', '-+')
		assert abs(model.T0(b.position) - b.sign_class) < 1e-12

	# only the branch point paired with the cut to infinity is encircled
	shifts = sorted(b.enc_log_shift for b in B)
	assert shifts[0] == 0 and abs(shifts[1]) == 1


def test_branch_points_kappa():
	kappa = 0.5
	model = builtin('qairy_kappa', {'kappa': kappa}).model
	B = branch_points(model)
	pos = sorted(b.position.real for b in B)
	assert np.allclose(pos, [-kappa - 1, -kappa + 1])


def test_branch_points_mathieu():
	bundle = builtin('qmathieu', {'kappa': 0.03j, 'tau': 0.97})
	B = branch_points(bundle.model)
	assert len(B) == 4
	P = np.array([b.position for b in B])
	for name, x in bundle.branch_names.items():
		print(name, x, np.min(np.abs(P - x)))
		assert np.min(np.abs(P - x)) < 1e-12

	# closed under w -> 1/w
	for p in P:
		assert np.min(np.abs(P - 1./p)) < 1e-10

	# both punctures are logarithmic and each encircles one branch point
	assert sum(1 for b in B if b.enc_log_shift != 0) == 2


def test_branch_points_errors():
	with pytest.raises(DegenerateModuli):
		branch_points(QdeModel('flat', [{0: 2}]))
	# T_0 - 1 = (w - 2)^2
	with pytest.raises(NonSimpleBranchPoint):
		branch_points(QdeModel('double', [{2: 1, 1: -4, 0: 5}]))


def test_classify_punctures():
	P = classify_punctures(builtin('qairy').model)
	origin, infinity = P
	assert origin.location == 'origin' and origin.kind == 'regular'
	assert abs(origin.mu - 0.5j*np.pi) < 1e-14
	assert infinity.kind == 'logarithmic' and infinity.degree_k == -1

	P = classify_punctures(builtin('qhyper').model)
	assert [p.kind for p in P] == ['logarithmic', 'logarithmic']

	P = classify_punctures(QdeModel('collide', [{1: 1, 0: 1}]))
	assert P[0].kind == 'colliding'
	assert P[0].exponent == sympy.Rational(1, 2)

	# T_0 = 1 + w^2: the origin is apparent, infinity stays logarithmic
	P = classify_punctures(QdeModel('apparent', [{2: 1, 0: 1}]))
	assert [p.kind for p in P] == ['apparent', 'logarithmic']
	assert P[0].exponent == 1
	assert P[0].limit_values == (1, 1)

	# on the double cover the w^2 term gives k = 1/2
	P = classify_punctures(QdeModel('collide2', [{3: 1, 2: 1, 0: -1}], cover_degree = 2))
	assert P[0].kind == 'colliding'
	assert P[0].exponent == sympy.Rational(1, 2)

	P = classify_punctures(builtin('qairy_kappa', {'kappa': 0.5}).model)
	assert abs(np.cosh(P[0].mu) - 0.5) < 1e-14


def test_log_continuation():
	model = builtin('qairy').model
	path = 10*np.exp(2j*np.pi*np.linspace(0, 1, 1001))
	start = larger_first(sheets_at(model, path[0]))
	Y = track_sheets(model, path, start)
	L = unwrap_log(Y[:,0])
	print(L[-1] - L[0])
	assert abs(L[-1] - L[0] - 2j*np.pi) < 1e-6
	assert abs(Y[-1, 0] - Y[0, 0]) < 1e-10


def test_ray_shifts():
	model = builtin('qmathieu').model
	labeling = SheetLabeling(model, scale = 2.)
	for b in branch_points(model, theta = 0.6):
		if b.enc_log_shift == 0:
			continue
		rays = labeling.ray_sheets(b.position, b.sign_class, 0.6, b.ref_angle, b.ref_pair, b.radius)
		shifts = ray_shifts(rays, b.ref_angle, b.enc_log_shift)
		print(b.position, shifts)
		assert sorted(shifts) == sorted([-b.enc_log_shift, b.enc_log_shift, b.enc_log_shift])
		assert sum(shifts) == b.enc_log_shift


def test_ray_shifts_qairy():
	# the branch point inside the cut from infinity: S^(-1), S^(-1), S^(+1)
	model = builtin('qairy').model
	theta = np.pi/5
	labeling = SheetLabeling(model, scale = 1.)
	found = []
	for b in branch_points(model, theta):
		rays = labeling.ray_sheets(b.position, b.sign_class, theta, b.ref_angle, b.ref_pair, b.radius)
		shifts = sorted(ray_shifts(rays, b.ref_angle, b.enc_log_shift))
		print(b.position, b.puncture, shifts)
		found.append(shifts)
	assert sorted(found) == [[-1, -1, 1], [0, 0, 0]]


def test_load_model():
	data = {'name': 'airy', 'cover_degree': 1, 'T': [[0, [[1, '1', '0']]], [2, [[0, '1/3', '0']]]]}
	model = load_model(data)
	assert model.exact
	assert model.order == 2
	assert model.T(1) == {}
	assert model.T(0) == {1: 1}

	again = load_model(model.to_mapping())
	assert again.trace_coeffs == model.trace_coeffs

	with pytest.raises(ConfigError):
		load_model({'name': 'x', 'T': [[0, [[1, '1', '0']]]], 'colour': 'red'})
	with pytest.raises(ConfigError):
		load_model({'name': 'x', 'T': [[1, [[1, '1', '0']]]]})
	with pytest.raises(ConfigError):
		load_model({'name': 'x', 'cover_degree': 2, 'T': [[0, [[2, '1', '0']]]]})
	with pytest.raises(ConfigError):
		load_model(['not', 'a', 'model'])


def test_qpochhammer():
	assert qpochhammer(0, 0.5) == 1
	assert qpochhammer(0.3, 0) == 0.7
	x, q = 0.3, 0.5
	lhs = qpochhammer(q*x, q, 200)*(1 - x)
	rhs = qpochhammer(x, q, 200)
	assert abs(lhs - rhs) < 1e-12
	assert abs(qpochhammer(x, q) - rhs) < 1e-12
	with pytest.raises(DivergentProduct):
		qpochhammer(0.3, 1.)


if __name__ == '__main__':
	test_ray_shifts()
