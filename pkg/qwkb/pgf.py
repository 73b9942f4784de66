r""" Tab separated column records, readable by PGFPlots

A document is a sequence of named blocks; each block is a header line
``#block <name>``, a line of column names and one line per row.  Floats are
written with :func:`repr` so that reading a document back returns the same
numbers bit for bit.
"""
import io

__all__ = ['PGF', 'write_blocks', 'read_blocks']


def _format(value):
	if isinstance(value, bool):
		return str(int(value))
	if isinstance(value, int):
		return str(value)
	if isinstance(value, float):
		return repr(value)
	if isinstance(value, str):
		assert '\t' not in value and '\n' not in value, "text fields cannot contain tabs or newlines"
		return value if value != '' else '-'
	try:
		return repr(float(value))
	except TypeError:
		return str(value)


def _parse(text):
	try:
		return int(text)
	except ValueError:
		pass
	try:
		return float(text)
	except ValueError:
		return text


class PGF:
	r""" A named table of equal length columns
	"""
	def __init__(self, name = None):
		self.name = name
		self.column_names = []
		self.columns = []

	def add(self, name, column):
		if len(self.columns) > 0:
			assert len(self.columns[0]) == len(column), "column %s has the wrong length" % name
		self.columns.append(list(column))
		self.column_names.append(name)

	def keys(self):
		return self.column_names

	def __getitem__(self, key):
		i = self.column_names.index(key)
		return self.columns[i]

	def __len__(self):
		if len(self.columns) == 0:
			return 0
		return len(self.columns[0])

	def rows(self):
		return [dict(zip(self.column_names, row)) for row in zip(*self.columns)]

	def write_to(self, f):
		if self.name is not None:
			f.write("#block %s\n" % self.name)
		f.write('\t'.join(self.column_names) + "\n")
		for j in range(len(self)):
			f.write('\t'.join(_format(col[j]) for col in self.columns) + "\n")

	def write(self, filename):
		with open(filename, 'w') as f:
			self.write_to(f)

	def read(self, filename):
		with open(filename, 'r') as f:
			lines = f.read().split('\n')
		self._read_lines([line for line in lines if line != ''])
		return self

	def _read_lines(self, lines):
		if lines and lines[0].startswith('#block '):
			self.name = lines[0][len('#block '):]
			lines = lines[1:]
		self.column_names = lines[0].split('\t') if lines else []
		self.columns = [[] for name in self.column_names]
		for line in lines[1:]:
			for j, col in enumerate(line.split('\t')):
				self.columns[j].append(_parse(col) if col != '-' else '')


def write_blocks(blocks, f = None):
	r""" Write several tables, separated by blank lines

	Parameters
	----------
	blocks: list of PGF
	f: file-like or None
		If None the document is returned as a string
	"""
	out = io.StringIO() if f is None else f
	for k, block in enumerate(blocks):
		if k > 0:
			out.write("\n")
		block.write_to(out)
	if f is None:
		return out.getvalue()


def read_blocks(text):
	r""" Parse a document written by :func:`write_blocks`

	Returns
	-------
	dict
		Block name to PGF, in document order
	"""
	blocks = {}
	for chunk in text.split("\n\n"):
		lines = [line for line in chunk.split("\n") if line != '']
		if not lines:
			continue
		block = PGF()
		block._read_lines(lines)
		blocks[block.name] = block
	return blocks
