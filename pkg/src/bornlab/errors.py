"""Exception hierarchy shared by all bornlab modules."""


class BornlabError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(BornlabError):
    """Operands have incompatible matrix dimensions."""


class NotHermitian(BornlabError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class InvariantViolation(BornlabError):
    """A constructed object fails its own invariants (indicates a bug or bad input)."""


class IncompleteFamily(BornlabError):
    """A question family cannot produce 2^N nonzero complete-question atoms."""


class NonCommutingFamily(BornlabError):
    """Questions in a family fail the pairwise commutation requirement."""


class SizeLimit(BornlabError):
    """An enumeration would exceed the supported size cap."""


class NonPureConditioning(BornlabError):
    """Empirical conditioning requires rank-1 atoms; a higher-rank atom was given."""


class InvalidPOVM(BornlabError):
    """An effect list fails positivity or closure."""


class IndexOutOfRange(BornlabError):
    """An outcome index does not address any ancilla projector."""


class BranchCut(BornlabError):
    """A unitary has an eigenphase at +/-pi; its generator is not unique."""


class ZeroTime(BornlabError):
    """A propagator with t = 0 carries no Hamiltonian information."""


class ParseError(BornlabError):
    """A scenario or matrix file could not be parsed."""


class ValidationError(BornlabError):
    """A scenario payload is structurally invalid for its kind."""
