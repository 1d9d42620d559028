"""Exception types shared across the package."""


class JvlabError(Exception):
    """Base class for all package-specific errors."""


class GroupMismatch(JvlabError):
    """Operands belong to different groups, or a group acts on a foreign tree."""


class ScalarModeMismatch(JvlabError):
    """Exact and float scalar modes were mixed in one operation."""


class BaseVertexHasNoPredecessor(JvlabError):
    """predecessor() was called on the base vertex."""


class ResourceLimit(JvlabError):
    """A ball enumeration exceeded the configured vertex cap."""


class DegenerateParameter(JvlabError):
    """Deformation parameter outside [0, 1); t = 1 has no orthonormalized basis."""


class NotASubgroup(JvlabError):
    """The supplied element set is not a subgroup of the ambient group."""


class ConvergenceFailure(JvlabError):
    """An iterative eigensolver did not reach tolerance within its iteration cap."""
