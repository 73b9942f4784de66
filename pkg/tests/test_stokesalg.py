import numpy as np
import pytest
from qwkb.stokesalg import *
from qwkb.stokesalg import _wedge
from qwkb.errors import MalformedWord, NonInvertibleToken, MalformedDetour


def test_branch_point_stokes_cube():
	S = stokes_matrix(0)
	M = S*S*S
	print(M)
	assert M == Mat2.identity()
	assert S.det() == 1
	assert S*stokes_matrix_inv(0) == Mat2.identity()


def test_shifted_stokes_relation():
	xi = var('xi')
	for ell in range(-3, 4):
		M = stokes_matrix(-ell)*stokes_matrix(ell)*stokes_matrix(-ell)
		print(ell, M)
		assert M == Mat2.diag(xi**(-ell), xi**ell)
		assert stokes_matrix(ell).det() == 1
		assert stokes_matrix(ell)*stokes_matrix_inv(ell) == Mat2.identity()


def test_transport_and_cuts():
	Y, xi = var('Y xi')
	T = transport_matrix('offdiag', Y)
	assert T == Mat2(0, Y*1j, Y.inverse()*1j, 0)
	assert T.det() == 1
	assert transport_matrix('diag', Y) == Mat2.diag(Y, Y**-1)

	beta = branch_cut_matrix()
	assert beta*beta == -Mat2.identity()
	assert log_cut_matrix(2, 'xi') == Mat2.diag(xi**2, xi**-2)

	with pytest.raises(ValueError):
		transport_matrix('sideways', Y)


def test_log_puncture_flatness():
	for k in [-2, -1, 1]:
		for order in [1, 4, 8]:
			Lp, Lm = log_puncture_matrices(k, 'xi', order)
			lhs = Lm*log_cut_matrix(k, 'xi')
			rhs = Lp.inverse()
			print(k, order, lhs, rhs)
			assert lhs == rhs


def test_parse_word():
	w = parse_word('Sinv(-1,xi1) * Toff(Y1) * Sinv(0) * Toff(Y2^2)')
	assert len(w) == 4
	assert w.tokens[0].name == 'S' and w.tokens[0].inverse
	assert w.tokens[3].args == (('Y2', '2'),)

	# inverse suffix on an inverse alias
	w = parse_word('Sinv(0)^-1')
	assert not w.tokens[0].inverse

	assert len(parse_word('')) == 0
	assert compose_path('') == Mat2.identity()


def test_parse_errors():
	for text in ['S(0)*Foo', 'S(x)', 'Toff()', 'cut(1)', 'S(0)**Toff(Y)', 'Toff(Y+1)']:
		with pytest.raises(MalformedWord):
			parse_word(text)
	with pytest.raises(NonInvertibleToken):
		compose_path('Lminv(1)')
	# the inverse of L+ exists as a truncated series
	M = compose_path('Lp(1)*Lpinv(1)', order = 5)
	assert M.truncation == 5


def test_compose_determinant():
	for word in ['cut*cut*Sinv(-1,xi)*Toff(Y)*Sinv(0)*Toff(Y)',
		'Sinv(-1,xi1)*Tdiaginv(Y31)*S(0)*Toffinv(Y43)*Sinv(0)*Tdiag(Y42)*S(1,xi2)*Toff(Y21)',
		'logcut(2)*Toff(X^1/2)*logcutinv(2)']:
		M = compose_path(word)
		print(word, M)
		assert M.det() == 1


def test_ring_laws():
	a, b, c = var('Ya Yb Yc')
	assert a*(b + c) == a*b + a*c
	assert (a + b)*(a - b) == a**2 - b**2
	assert a*a.inverse() == 1
	assert (a*b)**-1 == a.inverse()*b.inverse()
	assert (a**2)**0.5 == a
	assert (a + b - b) == a
	assert (a - a).is_zero()
	with pytest.raises(NonInvertibleToken):
		(a + b).inverse()


def test_regularized_trace_modes():
	Y, xi = var('Y xi')
	M = compose_path('cut*cut*Sinv(-1,xi)*Toff(Y)*Sinv(0)*Toff(Y)')
	tr = regularized_trace(M, 'xi_graded')
	print(tr)
	assert tr == -Y**2 - Y**-2

	grades = xi_grading(M)
	print(sorted(grades))
	assert sum(grades.values(), Mat2(0, 0, 0, 0)) == M

	M = compose_path('Sinv(-1,xi1)*Tdiaginv(XB)*S(0)*Toffinv(XA)*Sinv(0)*Tdiag(XB)*S(1,xi2)*Toff(XA)')
	XA, XB = var('XA XB')
	assert regularized_trace(M, 'drop_all_xi') == XB**2 + XB**-2 + XA**2*XB**-2
	with pytest.raises(ValueError):
		regularized_trace(M, 'everything')


def test_substitute_evaluate():
	Y, Z = var('Y Z')
	expr = Y**2 + 3*Y.inverse()
	out = substitute(expr, {'Y': Z**2})
	assert out == Z**4 + 3*Z**-2
	val = evaluate(expr, {'Y': 2.})
	assert abs(val - 5.5) < 1e-14
	M = evaluate(transport_matrix('diag', Y), {'Y': 2j})
	assert np.allclose(M, np.diag([2j, -0.5j]))
	with pytest.raises(KeyError):
		evaluate(expr, {'Z': 1.})


def test_fg_cross_ratio():
	Y, xib = var('Y xib')
	assert fg_cross_ratio('opposite_signature', 0, 0) == Y**-2
	assert fg_cross_ratio('opposite_signature', 1, 0) == Y**-2*xib
	assert fg_cross_ratio('same_signature', 0, 0) == 1
	# without reversing the last wedge the same signature case gives -1
	M = stokes_matrix(0, 'xibp')*transport_matrix('diag', 'Y').inverse()*stokes_matrix_inv(0, 'xib')
	one, zero = SymExpr.constant(1), SymExpr.constant(0)
	s1, s2, s3, s4 = (zero, one), (one, zero), (M[0, 1], M[1, 1]), (M[0, 0], M[1, 0])
	direct = _wedge(s1, s2)*_wedge(s3, s4)/(_wedge(s2, s3)*_wedge(s1, s4))
	assert direct == -1
	with pytest.raises(ValueError):
		fg_cross_ratio('parallel', 0, 0)


def test_framed_transport():
	lifts = {'i': 'P_i', 'j': 'P_j'}
	a, b, c, d, Pi, Pj = var('a b c d P_i P_j')
	detours = [('a', ('i', 'j', 0)), ('b', ('j', 'i', 0)), ('c', ('j', 'i', 1)), ('d', ('i', 'j', -1))]
	out = framed_transport(detours, lifts)
	print(out)
	assert out == Pi + Pi*a*b + Pj + Pj*c*d

	# without shifts every closed word survives
	flat = [(name, (i, j, 0)) for name, (i, j, n) in detours]
	out = framed_transport(flat, lifts)
	print(out)
	assert len(out.terms()) == 6

	assert framed_transport(detours, lifts, keep_all = True) == \
		Pi + Pi*a*b + Pi*a*c + Pj + Pj*b*d + Pj*c*d
	assert framed_transport([], lifts) == Pi + Pj

	words = framed_words(detours, lifts)
	assert ('i', ('a', 'c'), 1) in words

	with pytest.raises(MalformedDetour):
		framed_transport([('a', ('i', 'k', 0))], lifts)


if __name__ == '__main__':
	test_framed_transport()
