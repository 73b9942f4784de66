r""" SVG drawings of Stokes graphs
"""
import io

import numpy as np
import matplotlib
from matplotlib.figure import Figure
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.lines import Line2D

__all__ = ['render_svg']

_COLORS = {'+-': '#1f77b4', '-+': '#d62728', '++': '#2ca02c', '--': '#9467bd'}


def render_svg(graph, f = None, size = 6., window = None):
	r""" Draw a Stokes graph

	Trajectories are colored by sheet pair and carry the element id
	``traj-<id>``; square-root cuts and logarithmic cuts are dashed.  The
	output does not depend on the time of drawing, so equal graphs give equal
	files.

	Parameters
	----------
	graph: StokesGraph
	f: file-like or str or None
		Destination; if None the SVG text is returned
	size: float
		Width and height in inches
	window: float or None
		Half width of the plotted square; defaults to three times the largest
		branch point modulus

	Returns
	-------
	str or None
	"""
	if window is None:
		R = max([abs(b.position) for b in graph.branch_points] + [1e-3])
		window = 3*R

	fig = Figure(figsize = (size, size))
	FigureCanvasSVG(fig)
	ax = fig.add_subplot(111)

	for tid, line in graph.sqrt_cuts:
		ax.plot(line.real, line.imag, ls = '--', lw = 0.6, color = '0.6', gid = 'sqrtcut-%d' % tid)
	for location, idx, line in graph.log_cuts:
		ax.plot(line.real, line.imag, ls = '--', lw = 1.2, color = 'k', gid = 'logcut-%s' % location)

	for t in graph.trajectories:
		color = _COLORS[t.label.pair]
		lw = 1.2 if t.generation == 0 else 0.8
		ax.plot(t.points.real, t.points.imag, color = color, lw = lw, gid = 'traj-%d' % t.id)

	if graph.intersections:
		Z = np.array([h['position'] for h in graph.intersections])
		ax.plot(Z.real, Z.imag, 'k.', ms = 3, gid = 'intersections')
	Z = np.array([b.position for b in graph.branch_points])
	ax.plot(Z.real, Z.imag, 'x', color = 'orange', ms = 7, mew = 2, gid = 'branch-points')
	ax.plot([0], [0], 'ko', ms = 4, gid = 'origin')

	handles = [Line2D([0], [0], color = _COLORS[p], label = p) for p in ['+-', '-+', '++', '--']]
	ax.legend(handles = handles, loc = 'upper right', fontsize = 8)
	ax.set_xlim(-window, window)
	ax.set_ylim(-window, window)
	ax.set_aspect('equal')
	ax.set_title(r"%s, $\vartheta = %.4g$" % (graph.model_name, graph.theta))

	out = io.StringIO()
	with matplotlib.rc_context({'svg.hashsalt': 'qwkb', 'svg.fonttype': 'path'}):
		fig.savefig(out, format = 'svg', metadata = {'Date': None})
	text = out.getvalue()
	if f is None:
		return text
	if isinstance(f, str):
		with open(f, 'w') as fh:
			fh.write(text)
	else:
		f.write(text)
