"""
Numerical laboratory for thermoelastic transmission problems: an elastic
string coupled at one end to an Euler-Bernoulli beam, with Cattaneo heat
conduction on one of the two components.
"""

__version__ = "0.1.0"

from .model import MaterialParams, SystemKind, S1, S2, validate_params  # noqa: F401,E402
from .discretization import assemble_generator, build_grids  # noqa: F401,E402
