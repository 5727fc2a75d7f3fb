"""Exception hierarchy shared by the library and the CLI."""


class DiracLadderError(Exception):
    """Base class for every error raised by this package."""


class ContractError(DiracLadderError, ValueError):
    """Arguments violate an operation's preconditions (shapes, domains)."""


class NotSecondClassError(DiracLadderError):
    """The bracket matrix of a supposed second-class set is singular."""


class InadmissibleGaugeError(DiracLadderError):
    """Gauge conditions fail to turn the first-class set into a second-class one."""


class DegenerateEliminationError(DiracLadderError):
    """Constraint equations cannot be solved for a subset of coordinates."""


class RunawayChainError(DiracLadderError):
    """Constraint generation did not close within the allowed number of stages."""


class InconsistentConstraintsError(DiracLadderError):
    """A consistency condition reduces to a nonzero constant (no motion exists)."""


class CriticalPointError(DiracLadderError):
    """A closed-form expression is evaluated exactly where it diverges."""


class GaugeRequired(DiracLadderError):
    """First-class constraints are present and no gauge conditions were supplied."""
