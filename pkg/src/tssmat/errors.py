"""Exception types raised across the package.

Everything derives from :class:`TssError` so callers (and the CLI) can catch
one type. Most errors are also ``ValueError`` since they describe bad input.
"""


class TssError(Exception):
    """Base class for all package errors."""

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class BadNodeId(TssError, ValueError):
    pass


class DisconnectedGraph(TssError, ValueError):
    pass


class CycleDetected(TssError, ValueError):
    pass


class BadLeafCount(TssError, ValueError):
    pass


class EmptyOrFullSubset(TssError, ValueError):
    pass


class NotATreeEdge(TssError, ValueError):
    pass


class NonFiniteInput(TssError, ValueError):
    pass


class ShapeMismatch(TssError, ValueError):
    """A generator (or other array) does not have the shape it must have."""

    def __init__(self, node, generator, expected, got):
        self.node = node
        self.generator = generator
        self.expected = tuple(expected)
        self.got = tuple(got)
        super().__init__(
            f"node {node}: generator {generator} has shape {self.got}, "
            f"expected {self.expected}"
        )


class MissingGenerator(TssError, ValueError):
    pass


class LengthMismatch(TssError, ValueError):
    pass


class LayoutMismatch(TssError, ValueError):
    pass


class NotSquare(TssError, ValueError):
    pass


class SingularMatrix(TssError, ArithmeticError):
    pass


class SingularPivotBlock(TssError, ArithmeticError):
    """Block-confined pivoting found no usable pivot inside a node's group."""

    def __init__(self, node, message=None):
        self.node = node
        super().__init__(message or f"no acceptable pivot inside block group of node {node}")
