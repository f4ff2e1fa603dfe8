"""Exception types shared across the package."""


class QrelaxError(Exception):
    """Base class for all package errors."""


class InvalidMatrix(QrelaxError):
    """Matrix input is malformed (non-finite, non-square, ...)."""


class NotPsd(QrelaxError):
    """Matrix required to be positive semidefinite is not."""


class ParseError(QrelaxError):
    """Instance document violates the schema.

    Carries ``path``, a dotted location of the offending field.
    """

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class DimError(QrelaxError):
    """Dimension mismatch between instance fields."""


class InvalidConstraint(QrelaxError):
    """Constraint data violates a model invariant (e.g. zero Q)."""


class RangeConditionViolated(QrelaxError):
    """A type-B decomposition was forced on a constraint with c not in Range(Q)."""


class EmptyInterior(QrelaxError):
    """Convex quadratic constraint has empty interior (delta^2 < 0)."""


class AlphaInvalid(QrelaxError):
    """Computed or supplied artificial bound alpha_u is invalid."""


class SettingViolated(QrelaxError):
    """Instance lacks the setting a constraint family or theorem requires."""


class SizeCapExceeded(QrelaxError):
    """A requested PSD block exceeds the configured size cap."""


class NoFeasiblePointFound(QrelaxError):
    """Grid scan found no feasible point (not a proof of infeasibility)."""


class FixtureNotFound(QrelaxError):
    """Named bundled fixture does not exist."""


class SolverFailure(QrelaxError):
    """Conic solve ended without a usable status."""
