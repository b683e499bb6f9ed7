"""
Spectral module - resolvent scans, eigenvalue branches, frequency probe.
"""

from .resolvent import (  # noqa: F401
    ResolventScan,
    GrowthFit,
    shift_seed,
    resolvent_point,
    resolvent_norm,
    resolvent_scan,
    fit_resolvent_growth,
    upper_envelope,
)
from .eigen import (  # noqa: F401
    EigenBranch,
    AbscissaTable,
    sigma_shifts,
    eigen_branch,
    spectral_abscissa_study,
)
from .probe import (  # noqa: F401
    ProbeTable,
    required_cells,
    string_forcing,
    probe_gains,
    lack_exp_probe,
)
