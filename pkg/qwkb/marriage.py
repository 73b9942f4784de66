r""" Continuity matching of sheet values between neighboring samples
"""
import numpy as np
from scipy.spatial.distance import cdist
from scipy.optimize import linear_sum_assignment

__all__ = ['hungarian_sort', 'sheet_match']


def _as_points(a, sphere):
	a = np.array(a, dtype = complex).flatten().reshape(-1,1)
	if not sphere:
		return np.hstack([a.real, a.imag])
	# stereographic image on the Riemann sphere; infinity maps to the north pole
	with np.errstate(invalid = 'ignore', over = 'ignore'):
		m = np.abs(a)**2
		X = np.hstack([2*a.real/(m+1), 2*a.imag/(m+1), (m-1)/(m+1)])
	X[~np.isfinite(m).flatten()] = [0, 0, 1]
	return X


def hungarian_sort(a, b, sphere = False):
	r""" Permutation aligning two vectors of complex numbers entry-wise

	Uses the Hungarian algorithm (via :func:`scipy.optimize.linear_sum_assignment`)
	to find the permutation :math:`\mathcal{I}` minimizing

	.. math::

		\sum_k | a_k - b_{\mathcal{I}_k} |.

	Parameters
	----------
	a: array-like (n,)
		Reference values
	b: array-like (n,)
		Values to be permuted
	sphere: bool
		If True, compare points on the Riemann sphere (chordal distance)

	Returns
	-------
	I: np.array((n,), dtype = int)
		permutation such that a - b[I] is small
	"""
	A = _as_points(a, sphere)
	B = _as_points(b, sphere)
	assert A.shape == B.shape, "a and b must be the same shape"
	X = cdist(A, B)
	row, col = linear_sum_assignment(X)
	I = np.argsort(row)
	return col[I]


def sheet_match(prev, cand):
	r""" Match a pair of sheet values to the previous labeled pair

	Parameters
	----------
	prev: array-like (2,)
		Labeled values :math:`(y_+, y_-)` at the previous sample
	cand: array-like (2,)
		Unlabeled values at the next sample

	Returns
	-------
	pair: np.array((2,), dtype = complex)
		``cand`` reordered to continue ``prev``
	ratio: float
		Cost of the chosen assignment divided by the cost of the other one;
		values close to one mean the matching is ambiguous.
	"""
	prev = np.asarray(prev, dtype = complex)
	cand = np.asarray(cand, dtype = complex)
	I = hungarian_sort(prev, cand, sphere = True)
	P = _as_points(prev, True)
	C = _as_points(cand, True)
	X = cdist(P, C)
	best = X[0, I[0]] + X[1, I[1]]
	other = X[0, I[1]] + X[1, I[0]]
	if other == 0:
		return cand[I], 1.
	return cand[I], best/other
