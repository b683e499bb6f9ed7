"""
Discretization module - grids, generator assembly, state sampling.
"""

from .grids import Grid1D, build_grids  # noqa: F401
from .generator import (  # noqa: F401
    StateLayout,
    BlockGenerator,
    assemble_generator,
    apply_generator,
    energy,
    dissipation,
    solve,
)
from .sampling import sample_state, nodal_profiles, heat_coordinates  # noqa: F401
from .bands import (  # noqa: F401
    FrequencyBands,
    frequency_bands,
    beam_top,
    string_cutoff,
    resolved_frequency,
    matched_string_cells,
    warn_if_trapped,
)
