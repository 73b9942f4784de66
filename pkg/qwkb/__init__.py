
# Errors and configuration
from .errors import *
from .config import DEFAULTS, RunConfig, worker_count

# Utilities
from .marriage import *
from .pgf import PGF, write_blocks, read_blocks

# Curve and WKB series
from .curve import *
from .series import *

# Stokes graphs
from .network import *
from .render import render_svg

# Stokes matrix calculus and built-in models
from .stokesalg import *
from .models import *

# Quantum periods
from .periods import *
