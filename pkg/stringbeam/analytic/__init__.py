"""
Analytic module - characteristic roots, frequency sequences, the mode
system and the exact zero resolvent.
"""

from .cardano import (  # noqa: F401
    CardanoSolution,
    solve_depressed_cubic,
    cubic_roots_cardano,
)
from .roots import (  # noqa: F401
    CharacteristicCoefficients,
    CharacteristicRoots,
    AsymptoticTable,
    characteristic_roots,
    root_table,
    write_root_table,
    verify_root_asymptotics,
)
from .dirichlet import (  # noqa: F401
    DirichletSequence,
    FrequencySequence,
    continued_fraction,
    dirichlet_sequence,
    resonant_frequencies,
)
from .modes import (  # noqa: F401
    ModeSolution,
    ModeGainTable,
    mode_coefficients,
    mode_gain_table,
)
from .zero_resolvent import (  # noqa: F401
    Forcing,
    ZeroResolventSolution,
    ConvergenceStudy,
    iterated_integral,
    zero_resolvent_s1,
    zero_resolvent_convergence,
)
