"""
Evolution module - implicit midpoint stepping, energy traces, decay fits.
"""

from .integrator import (  # noqa: F401
    EnergyTrace,
    TRACE_FIELDS,
    step_implicit_midpoint,
    simulate,
)
from .decay import DecayModel, DecayFit, fit_decay  # noqa: F401
from .initial_data import (  # noqa: F401
    Modal,
    RandomSeeded,
    InterfaceBump,
    Recipe,
    parse_recipe,
    make_initial_data,
)
