"""Exception hierarchy shared by all modules."""


class VexpdoError(Exception):
    """Base class for errors raised by this package."""


class GridMismatchError(VexpdoError, ValueError):
    """Two sampled objects live on different grids."""


class SupportError(VexpdoError, ValueError):
    """A function's support leaves the admissible region of the grid."""


class InfeasibleDecompositionError(VexpdoError, ValueError):
    """No admissible p1 exists for the requested (p0, theta) split.

    Attributes
    ----------
    node : tuple of int
        Grid index of the first violating node.
    value : float
        The offending value of 1/p1 at that node.
    """

    def __init__(self, message, node=None, value=None):
        super().__init__(message)
        self.node = node
        self.value = value


class PreconditionError(VexpdoError, ValueError):
    """An operation's documented precondition does not hold."""

    def __init__(self, message, nodes=None):
        super().__init__(message)
        self.nodes = [] if nodes is None else list(nodes)


class EllipticityError(VexpdoError, ValueError):
    """A symbol is not bounded away from zero where it must be."""

    def __init__(self, message, point=None, value=None):
        super().__init__(message)
        self.point = point
        self.value = value


class DerivativeUnavailableError(VexpdoError, ValueError):
    """A derivative beyond the symbol's order cap was requested."""


class NumericError(VexpdoError, ArithmeticError):
    """A computation produced non-finite values."""


class ConfigError(VexpdoError, ValueError):
    """An experiment configuration is malformed."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
