import io
import os

import numpy as np
import pytest
from qwkb.pgf import PGF, write_blocks, read_blocks
from qwkb.marriage import hungarian_sort, sheet_match
from qwkb.config import RunConfig, worker_count, find_model_file
from qwkb.errors import ConfigError


def test_hungarian_sort():
	a = np.array([1+1j, -2, 3j, 0.5])
	I = np.array([2, 0, 3, 1])
	b = np.empty_like(a)
	b[I] = a
	J = hungarian_sort(a, b)
	assert np.all(b[J] == a)
	J = hungarian_sort(a, b, sphere = True)
	assert np.all(b[J] == a)


def test_sheet_match():
	pair, ratio = sheet_match([2., 0.5], [0.49, 2.01])
	assert pair[0] == 2.01 and pair[1] == 0.49
	assert ratio < 0.25
	# near a branch point the choice is ambiguous
	pair, ratio = sheet_match([1.01, 0.99], [1., 1.])
	assert ratio == 1.


def test_blocks():
	a = PGF('first')
	a.add('x', [0.1, 1/3., -2.5e-17])
	a.add('name', ['a', '', 'c'])
	b = PGF('second')
	b.add('n', [1, 2])
	b.add('flag', [True, False])
	text = write_blocks([a, b])
	blocks = read_blocks(text)
	assert list(blocks) == ['first', 'second']
	assert blocks['first']['x'] == [0.1, 1/3., -2.5e-17]
	assert blocks['first']['name'] == ['a', '', 'c']
	assert blocks['second']['flag'] == [1, 0]
	assert blocks['second'].rows()[1] == {'n': 2, 'flag': 0}

	f = io.StringIO()
	write_blocks([a], f)
	assert f.getvalue() == write_blocks([a])


def test_run_config():
	cfg = RunConfig.from_mapping('series', {'model': 'qairy', 'order': None})
	assert cfg.get('series_order') == 8
	assert cfg.get('max_mass') == 50.
	with pytest.raises(ConfigError):
		RunConfig.from_mapping('series', {'model': 'qairy', 'colour': 'red'})


def test_worker_count(monkeypatch):
	monkeypatch.delenv('QWKB_THREADS', raising = False)
	assert worker_count() == 1
	assert worker_count(4) == 4
	monkeypatch.setenv('QWKB_THREADS', '3')
	assert worker_count() == 3
	monkeypatch.setenv('QWKB_THREADS', 'many')
	with pytest.raises(ConfigError):
		worker_count()


def test_find_model_file(tmpdir, monkeypatch):
	fname = os.path.join(str(tmpdir), 'mymodel.json')
	with open(fname, 'w') as f:
		f.write('{}')
	monkeypatch.setenv('QWKB_MODEL_PATH', str(tmpdir))
	assert find_model_file('mymodel') == fname
	assert find_model_file(fname) == fname
	assert find_model_file('missing') is None


if __name__ == '__main__':
	test_blocks()
