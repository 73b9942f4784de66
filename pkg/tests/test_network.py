import warnings

import numpy as np
import pytest
from qwkb.network import *
from qwkb.render import render_svg
from qwkb.models import builtin
from qwkb.errors import DegenerateGraph


def test_labels():
	L = TrajectoryLabel('+', '-', 0)
	assert str(L) == '(+-,0)'
	assert TrajectoryLabel.parse('(+-,0)') == L
	assert TrajectoryLabel.parse('(--,-2)') == TrajectoryLabel('-', '-', -2)
	assert TrajectoryLabel('-', '-', 1).diagonal and not L.diagonal
	with pytest.raises(ValueError):
		TrajectoryLabel('+', '+', 0)


def test_spawn_labels():
	T = TrajectoryLabel
	out = spawn_labels(T('+', '-', 0), T('-', '+', 1), 2, 3)
	print([str(l) for l in out])
	assert out == [T('+', '-', 1), T('-', '+', 2), T('+', '-', 2), T('-', '+', 3),
		T('+', '+', 1), T('-', '-', 1), T('+', '+', 2), T('-', '-', 2)]
	# symmetric in its arguments
	assert spawn_labels(T('-', '+', 1), T('+', '-', 0), 2, 3) == out

	assert spawn_labels(T('+', '-', 0), T('-', '+', 0), 2, 3) == []
	assert spawn_labels(T('+', '-', 1), T('+', '+', 1), 2, 3) == [T('+', '-', 2)]
	assert spawn_labels(T('+', '+', 1), T('-', '-', 1), 2, 3) == []
	assert spawn_labels(T('+', '-', 0), T('+', '-', 1), 2, 3) == []


def test_primary_seeds_mathieu():
	model = builtin('qmathieu').model
	tracer = NetworkTracer(model, 0.6, max_generation = 0)
	assert len(tracer.branch_points) == 4
	seeds = tracer.primary_seeds()
	assert len(seeds) == 12
	for idx, b in enumerate(tracer.branch_points):
		ells = sorted(s['stokes_shift'] for s in seeds if s['source'] == idx)
		print(idx, b.position, b.enc_log_shift, ells)
		if b.enc_log_shift == 0:
			assert ells == [0, 0, 0]
		else:
			assert sorted(abs(e) for e in ells) == [1, 1, 1]
			assert sum(ells) == b.enc_log_shift

	# two logarithmic punctures, each emitting (++,n) and (--,n) for 0 < |n| <= 2
	assert len(tracer.spiral_seeds()) == 2*2*2*2


def test_trajectories_on_curve():
	bundle = builtin('qmathieu')
	graph = build_graph(bundle.model, 0.6, caps = {'max_generation': 0, 'max_mass': 8.}, spirals = False)
	assert graph.count() == 12
	assert len(graph.primary()) == 12
	model = bundle.model
	for t in graph.trajectories:
		assert len(t) > 1
		assert np.all(np.diff(t.mass) >= 0)
		err = np.max(np.abs(np.cosh(t.logs[:,0]) - model.T0(t.points)))
		assert err < 1e-8, "trajectory %d leaves the curve (%g)" % (t.id, err)
		assert t.mass[0] >= 0
	assert len(graph.sqrt_cuts) == 12
	assert sorted(loc for loc, _, _ in graph.log_cuts) == ['infinity', 'origin']


def test_generations():
	model = builtin('qmathieu').model
	graph = build_graph(model, 0.6, caps = {'max_generation': 1, 'max_abs_n': 1, 'max_mass': 6.})
	print(graph.history)
	assert graph.history[0]['generation'] == 0
	for h in graph.intersections:
		for tid in h['spawned']:
			child = graph.get(tid)
			assert child.parent == 'int:%d' % h['id']
			assert child.generation == 1
			assert abs(child.points[0] - h['position']) < 1e-12
			assert abs(child.label.n) <= 1
	assert len(graph.spirals()) == 2*2*2
	with pytest.raises(KeyError):
		graph.get(10**6)


def test_dump_round_trip():
	model = builtin('qairy').model
	graph = build_graph(model, 0.4, caps = {'max_generation': 1, 'max_mass': 5.})
	text = dump(graph)
	again = read_dump(text)
	assert again.model_name == graph.model_name
	assert again.theta == graph.theta
	assert again.caps == graph.caps
	assert again.branch_points == graph.branch_points
	assert len(again.trajectories) == len(graph.trajectories)
	for a, b in zip(again.trajectories, graph.trajectories):
		assert a.id == b.id and a.label == b.label and a.parent == b.parent
		assert a.stokes_shift == b.stokes_shift and a.source == b.source and a.stop == b.stop
		assert np.array_equal(a.points, b.points)
		assert np.array_equal(a.logs, b.logs)
		assert np.array_equal(a.mass, b.mass)
	assert [h['spawned'] for h in again.intersections] == [h['spawned'] for h in graph.intersections]
	assert len(again.sqrt_cuts) == len(graph.sqrt_cuts)
	# a second dump is identical
	assert dump(again) == text


def test_degenerate_phase():
	model = builtin('qmathieu').model
	with warnings.catch_warnings(record = True) as w:
		warnings.simplefilter('always')
		build_graph(model, 0., caps = {'max_generation': 0, 'max_mass': 2.})
	assert any(issubclass(x.category, DegenerateGraph) for x in w)


def test_find_saddles_qairy():
	model = builtin('qairy').model
	saddles = find_saddles(model, (-np.pi/2, np.pi/2), resolution = 20, max_mass = 30.)
	print(saddles)
	assert len(saddles) == 1
	assert abs(saddles[0][0]) < 1e-3
	# the connection at theta = 0 is the loop around the origin, not a segment from -1 to 1
	source, target = saddles[0][1]
	assert source == target

	assert find_saddles(model, (0.1, 1.0), resolution = 10, max_mass = 30.) == []


def test_find_saddles_kappa():
	model = builtin('qairy_kappa', {'kappa': 0.5}).model
	saddles = find_saddles(model, (-0.05, 0.05), resolution = 5, max_mass = 40.)
	print(saddles)
	assert len(saddles) == 1
	theta, (source, target) = saddles[0]
	assert abs(theta) < 1e-3
	assert source == target


def test_spirals_close_at_zero_phase():
	model = builtin('qairy').model
	with warnings.catch_warnings(record = True) as w:
		warnings.simplefilter('always')
		graph = build_graph(model, 0., caps = {'max_generation': 0, 'max_abs_n': 1, 'max_mass': 100.})
	assert any(issubclass(x.category, DegenerateGraph) for x in w)
	spirals = graph.spirals()
	assert len(spirals) == 4
	for t in spirals:
		r = np.abs(t.points)
		dev = np.max(np.abs(r - r[0]))/r[0]
		print(t.label, len(t), dev, t.stop)
		assert len(t) > 10
		assert dev < 1e-6


def test_encircled_signatures():
	model = builtin('qmathieu').model
	tracer = NetworkTracer(model, 0.6, max_generation = 0)
	sigs = sorted(b.signature for b in tracer.branch_points if b.enc_log_shift != 0)
	assert sigs == ['+-', '-+']


def test_stokes_condition_along_lines():
	theta = 0.6
	model = builtin('qmathieu').model
	tracer = NetworkTracer(model, theta, max_generation = 0, max_abs_n = 1, max_mass = 8.)
	e = np.exp(-1j*theta)
	for seed in tracer.primary_seeds() + tracer.spiral_seeds():
		data, _ = tracer.evolve(seed)
		I = data['integral']
		assert len(I) == len(data['points'])
		err = np.abs((e*I).imag) - 1e-6*(1 + data['mass'])
		assert np.all(err <= 0), "line %s from %s violates the Stokes condition" % (seed['label'], seed['parent'])


def test_relabeling_covariance():
	# L_i -> L_i + 2 pi i together with n -> n - 1 leaves the line unchanged
	model = builtin('qmathieu').model
	tracer = NetworkTracer(model, 0.6, max_generation = 0, max_mass = 6.)
	for seed in tracer.primary_seeds(indices = [0]):
		moved = dict(seed)
		Li, Lj = seed['L']
		label = seed['label']
		moved['L'] = (Li + 2j*np.pi, Lj)
		moved['label'] = TrajectoryLabel(label.i, label.j, label.n - 1)
		a, _ = tracer.evolve(seed)
		b, _ = tracer.evolve(moved)
		assert a['stop'] == b['stop']
		m = b['mass'][b['mass'] <= a['mass'][-1]]
		pts = b['points'][:len(m)]
		ref = np.interp(m, a['mass'], a['points'].real) + 1j*np.interp(m, a['mass'], a['points'].imag)
		err = np.max(np.abs(pts - ref))
		print(label, err)
		assert err < 1e-6
		ta = tracer._make(0, a)
		tb = tracer._make(1, b)
		assert tracer._absolute(ta, a['logs'][-1])[0] == tracer._absolute(tb, b['logs'][-1])[0]


def test_build_deterministic():
	model = builtin('qmathieu').model
	caps = {'max_generation': 1, 'max_abs_n': 1, 'max_mass': 5.}
	assert dump(build_graph(model, 0.6, caps = caps)) == dump(build_graph(model, 0.6, caps = caps, threads = 1))
def test_render_svg():
	model = builtin('qairy').model
	graph = build_graph(model, 0.4, caps = {'max_generation': 0, 'max_mass': 5.})
	svg1 = render_svg(graph)
	svg2 = render_svg(graph)
	assert svg1 == svg2
	assert 'traj-0' in svg1
	assert 'branch-points' in svg1
	assert 'logcut-infinity' in svg1


if __name__ == '__main__':
	test_find_saddles_qairy()
