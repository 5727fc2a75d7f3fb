"""Dirac-Bergmann constraint analysis for quadratic Lagrangians.

Builds the Hamiltonian, generates and classifies constraints, reduces with the
Dirac bracket and extracts normal-mode spectra; an independent time-domain
oracle and parameter sweeps sit on top.
"""

from .algebra import (
    AffinePhaseFn,
    BracketMatrix,
    PhaseSpace,
    QuadHamiltonian,
    bracket,
    bracket_observable,
    dirac_bracket_matrix,
    numerical_rank,
)
from .engine import (
    Analysis,
    ConstraintLedger,
    ConstraintRecord,
    Klass,
    Mode,
    ModeKind,
    QuadLagrangian,
    ReducedSystem,
    SpectrumReport,
    analyze,
    classify,
    constraint_chain,
    gauge_fix,
    legendre,
    reduce,
    spectrum,
)

__version__ = "0.1.0"
