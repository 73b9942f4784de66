import io
import os
import json

import numpy as np
import pytest
from qwkb.cli import main
from qwkb.pgf import read_blocks
from qwkb.stokesalg import var


def run(*argv):
	out = io.StringIO()
	status = main(list(argv), out = out)
	text = out.getvalue()
	print(text)
	return status, text


def test_models_list():
	status, text = run('models', 'list')
	assert status == 0
	for name in ['qairy', 'qairy_kappa', 'qhyper', 'qmathieu', 'qramanujan']:
		assert name in text


def test_monodromy_records():
	status, text = run('monodromy', '--model', 'qairy', '--path', 'full_loop', '--format', 'records')
	assert status == 0
	blocks = read_blocks(text)
	row = blocks['monodromy'].rows()[0]
	Y = var('Y')
	assert row['mode'] == 'xi_graded'
	assert row['trace'] == str(-Y**2 - Y**-2).replace(' ', '')


def test_monodromy_word():
	status, text = run('monodromy', '--model', 'qairy', '--path', 'S(0)*S(0)*S(0)')
	assert status == 0
	assert 'trace (xi_graded)  2' in text


def test_verify():
	status, text = run('verify', '--model', 'qairy')
	assert status == 0
	assert 'cycles.total' in text
	assert 'FAILED' not in text


def test_curve_params():
	status, text = run('curve', '--model', 'qairy_kappa', '--param', 'kappa=1/2', '--format', 'records')
	assert status == 0
	B = read_blocks(text)['branch_points']
	assert np.allclose(sorted(B['re']), [-1.5, 0.5])
	kinds = read_blocks(text)['punctures']['kind']
	assert kinds == ['regular', 'logarithmic']


def test_model_file(tmpdir):
	fname = os.path.join(str(tmpdir), 'airy.json')
	with open(fname, 'w') as f:
		json.dump({'name': 'airy', 'T': [[0, [[1, '1', '0']]]]}, f)
	status, text = run('curve', '--model', fname)
	assert status == 0
	assert 'model airy' in text


def test_series_verify():
	status, text = run('series', '--model', 'qairy', '--order', '3', '--verify')
	assert status == 0
	assert 'R_3' in text and 'D_3' in text
	assert 'agree: True' in text


def test_period():
	status, text = run('period', '--model', 'qairy', '--loop', '0', '--n', '1', '--format', 'records')
	assert status == 0
	row = read_blocks(text)['period'].rows()[0]
	assert abs(complex(row['re'], row['im']) + 5*np.pi**2) < 1e-8


def test_errors():
	status, text = run('curve', '--model', 'no_such_model')
	assert status == 1
	assert text.startswith('error\tconfig_error\t')

	status, text = run('curve', '--model', 'qairy_kappa', '--param', 'kappa=1')
	assert status == 1
	assert text.startswith('error\tdegenerate_moduli\t')

	status, text = run('monodromy', '--model', 'qairy', '--path', 'S(0)*Frobenius')
	assert status == 1
	assert 'malformed_word' in text


def test_usage_errors():
	with pytest.raises(SystemExit) as e:
		main(['period', '--model', 'qairy'], out = io.StringIO())
	assert e.value.code == 2
	with pytest.raises(SystemExit) as e:
		main(['series', '--model', 'qairy', '--sign', 'both'], out = io.StringIO())
	assert e.value.code == 2


if __name__ == '__main__':
	test_verify()
