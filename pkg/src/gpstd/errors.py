"""Exception types raised by the decomposition pipeline."""


class DimensionError(ValueError):
    """Input sizes do not match the tensor shape."""


class DomainError(ValueError):
    """Argument outside the domain of an operation (degree, order, rank)."""


class StructureError(ValueError):
    """A monomial cannot be reached from the generating matrix columns."""


class NumericalError(RuntimeError):
    """A dense linear-algebra kernel failed."""


class InconsistentSystem(ValueError):
    """Some linear system A[F, alpha] g = b[F, alpha] has no solution.

    This usually means the requested length ``r`` is below the rank of the
    tensor; retry with a larger ``r``.
    """

    def __init__(self, message, alpha=None, residual=None):
        super().__init__(message)
        self.alpha = alpha
        self.residual = residual


class SingularVandermonde(ValueError):
    """The points are not independent with respect to the monomial basis."""

    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class NoConvergence(RuntimeError):
    """An iterative solver stopped without reaching its residual target.

    ``best`` holds the best iterate found, ``residual`` its residual norm.
    The decomposition driver attaches its best-effort result as
    ``decomposition``.
    """

    def __init__(self, message, best=None, residual=None, decomposition=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.decomposition = decomposition
