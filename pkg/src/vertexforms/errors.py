"""Exception types shared across the package."""


class InvalidLatticeError(ValueError):
    """Gram matrix fails the even/nondegenerate requirements."""


class FieldOrderError(ValueError):
    """A phase exponent is incompatible with the fixed cyclotomic order."""


class CosetMismatchError(ValueError):
    """Arguments live in cosets that the operation does not accept."""


class EnumerationUnsupportedError(ValueError):
    """Whole weight-space enumeration requested on an indefinite lattice."""


class InsufficientWindowError(RuntimeError):
    """A truncation order is too small; carries the minimal valid bound."""

    def __init__(self, message, needed=None):
        super().__init__(message)
        self.needed = needed
