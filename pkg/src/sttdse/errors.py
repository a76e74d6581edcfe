"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a device or timing equation."""


class ValidationError(ValueError):
    """A model, table, or config document is malformed."""


class ShapeError(ValidationError):
    """A layer's dimensions do not produce an integral output shape."""


class TechRangeError(ValueError):
    """A capacity query falls outside a technology table's knots."""
