"""Exception types shared across the package."""


class MaxdetError(ValueError):
    """Base class for all maxdet errors."""


class DimensionError(MaxdetError):
    """Operand has the wrong shape (e.g. non-square where square is required)."""


class StructureError(MaxdetError):
    """Matrix fails a structural requirement (block sums, normalized form, ...)."""


class InvariantError(MaxdetError):
    """Input violates a type invariant (asymmetric Gram, bad diagonal, ...)."""


class PreconditionError(MaxdetError):
    """Operation called with arguments outside its contract."""


class RegistryError(MaxdetError):
    """Registry is incomplete, mixed, or otherwise unusable for the request."""
