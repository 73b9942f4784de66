import numpy as np
import pytest
from qwkb.series import *
from qwkb.curve import QdeModel
from qwkb.models import builtin
from qwkb.errors import ResidualTooLarge


def _models():
	return [builtin('qairy').model,
		builtin('qairy_kappa', {'kappa': 0.5}).model,
		builtin('qramanujan').model]


def test_leading_order():
	for model in _models():
		ring = SeriesRing(model)
		for sign in [1, -1]:
			series = riccati_coeffs(model, sign, 0, ring = ring)
			R0 = series[0]
			assert R0 + R0.inverse() == ring.T(0)*2


def test_first_correction_qairy():
	model = builtin('qairy').model
	ring = SeriesRing(model)
	x = ring.from_laurent({1: 1})
	for sign in [1, -1]:
		series = riccati_coeffs(model, sign, 1, ring = ring)
		expected = x*ring.inv_D()/(-2*sign)
		print(sign, series[1])
		assert series[1] == expected


def test_riccati_residual():
	for model in _models():
		for sign in [1, -1]:
			series = riccati_coeffs(model, sign, 8)
			worst = verify_riccati(series)
			print(model.name, sign, worst)
			assert worst < 1e-10


def test_riccati_residual_mathieu():
	model = builtin('qmathieu', {'kappa': 0.03j, 'tau': 0.97}).model
	for sign in [1, -1]:
		series = riccati_coeffs(model, sign, 8)
		worst = verify_riccati(series, sample_points = (2, 0.7j, -2.5))
		print(sign, worst)
		assert worst < 1e-10


def test_residual_detects_errors():
	model = builtin('qairy').model
	series = riccati_coeffs(model, 1, 3)
	series.coeffs[2] = series.coeffs[2] + 1
	with pytest.raises(ResidualTooLarge):
		verify_riccati(series)

	# the highest order alone, with the sign of R_3 flipped
	series = riccati_coeffs(model, 1, 3)
	series.coeffs[3] = -series.coeffs[3]
	assert verify_riccati(series, N = 2) < 1e-10
	with pytest.raises(ResidualTooLarge) as err:
		verify_riccati(series)
	assert err.value.order == 3


def test_log_r_two_ways():
	for model in _models():
		series = riccati_coeffs(model, 1, 6)
		det = log_r_coeffs(series)
		direct = log_r_direct(series)
		for n in range(1, 7):
			assert det.D(n) == direct.D(n), "D_%d differs for %s" % (n, model.name)

	# D_1 = R_1/R_0
	assert det.D(1) == series[1]*series[0].inverse()


def test_log_index():
	model = builtin('qairy').model
	series = riccati_coeffs(model, 1, 4)
	S0 = s_coeffs(log_r_coeffs(series, n = 0))
	S1 = s_coeffs(log_r_coeffs(series, n = 1))
	assert len(S0) == 5
	assert isinstance(S0[0], LogTerm)
	w = 2.3 + 0.4j
	assert abs(S1[0].evaluate(w) - S0[0].evaluate(w) - 2j*np.pi) < 1e-14
	for a, b in zip(S0[1:], S1[1:]):
		assert a == b


def test_theta():
	model = builtin('qairy').model
	ring = SeriesRing(model)
	x = ring.from_laurent({1: 1})
	assert x.theta() == x
	assert (x*x).theta() == x*x*2
	# theta r = T_0 theta T_0 / r
	assert ring.r.theta() == x*x*ring.r*ring.inv_D()

	w = 0.8 + 0.3j
	h = 1e-6
	f = lambda z: (x*x*ring.r).evaluate(z)
	num = (f(w*np.exp(h)) - f(w*np.exp(-h)))/(2*h)
	assert abs((x*x*ring.r).theta().evaluate(w) - num) < 1e-6


def test_float_model():
	model = QdeModel('airy_float', [{1: 1.1}])
	assert not model.exact
	series = riccati_coeffs(model, 1, 4)
	assert verify_riccati(series) < 1e-8


if __name__ == '__main__':
	test_riccati_residual()
