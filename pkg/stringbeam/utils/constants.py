"""
Numerical constants for the thermoelastic string/beam laboratory.

Defines defaults, tolerances, iteration limits and allowed enum values
shared by the numerical modules and the experiment configuration.
"""

import math

# Material defaults (all constants 1, both lengths pi)
DEFAULT_PARAM_VALUE = 1.0
DEFAULT_LENGTH = math.pi
PARAM_NAMES = (
    "alpha1", "beta1", "gamma1", "delta1", "tau1", "kappa1",
    "alpha2", "beta2", "gamma2", "delta2", "tau2", "kappa2",
    "ell1", "ell2",
)

# Grids
MIN_CELLS = 4
DEFAULT_CELLS = 256

# Time integration
DEFAULT_DT = 5e-3
DEFAULT_T_END = 100.0
DEFAULT_STRIDE = 20
ENERGY_SLACK = 1e-10
MIN_FIT_SAMPLES = 10
ENERGY_UNDERFLOW = 1e-300

# Banded LU
PIVOT_FLOOR = 1e-300
DENSE_ORACLE_MAX_DIM = 48

# Iterative eigen / singular value solvers
SVD_TOL = 1e-8
EIG_TOL = 1e-8
MAX_ITERATIONS = 500
SVD_BLOCK_SIZE = 3
NEAR_SINGULAR_SHIFT = 1e-13
MAX_RESTARTS = 5
NORM_ITERATIONS = 40
EIG_SUBSPACE_MARGIN = 6
EIG_SUBSPACE_GROWTH = 4
STAGNATION_WINDOW = 25

# Resolvent scans
S1_BETA_RANGE = (1.0, 500.0)
S2_BETA_RANGE = (10.0, 1000.0)
DEFAULT_SCAN_COUNT = 60
DEFAULT_WORKERS = 1
ENVELOPE_BINS_PER_DECADE = 5
MIN_ENVELOPE_BINS = 3
MIN_RESOLVED_DECADES = 0.5

# Eigen sweeps
DEFAULT_SIGMA_MIN = 1.0
DEFAULT_SIGMA_MAX = 12.0
DEFAULT_SHIFT_COUNT = 20
DEFAULT_EIGS_PER_SHIFT = 2
DEFAULT_ABSCISSA_GRIDS = (256, 512, 1024)
DEDUPE_RELATIVE = 1e-8

# Characteristic roots
DEFAULT_ROOT_FREQUENCIES = (1e2, 1e3, 1e4)
DISCRIMINANT_FLOOR = 1e-14

# Frequency probe
DEFAULT_PROBE_COUNT = 4
POINTS_PER_FREQUENCY = 20
MAX_PROBE_CELLS = 16384
DEFAULT_CROSS_CHECK_FREQUENCY = 3.3
MODE_CONDITION_LIMIT = 1e12

# Zero-resolvent oracle
QUADRATURE_TOL = 1e-10
DEFAULT_ZERO_RESOLVENT_GRIDS = (32, 64, 128)
DEFAULT_ZERO_RESOLVENT_SAMPLES = 5

# CSV output
CSV_DIGITS = 17

# Enum values
ALLOWED_SYSTEMS = ["S1", "S2"]
ALLOWED_RECIPES = ["modal", "random", "interface_bump"]
DEFAULT_RECIPE = "modal"
ALLOWED_COMMANDS = [
    "simulate", "resolvent-scan", "eigen-branch",
    "char-roots", "lack-exp", "zero-resolvent-check",
]
