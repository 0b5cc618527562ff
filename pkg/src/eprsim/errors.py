"""Exception types shared across the package."""


class EprError(Exception):
    """Base class for all eprsim errors."""


class DimensionError(EprError, ValueError):
    """Operands have incompatible or invalid dimensions."""


class SlotError(EprError, IndexError):
    """A particle or observer slot index is out of range."""


class NormalizationError(EprError, ValueError):
    """A state or distribution does not carry unit total weight."""


class UnitarityError(EprError, ValueError):
    """A matrix that must be unitary is not, at the required tolerance."""


class CapacityError(EprError, ValueError):
    """A computation exceeds a configured size limit."""


class ConsistencyError(EprError, RuntimeError):
    """A repeated measurement violated the record-consistency contract."""
