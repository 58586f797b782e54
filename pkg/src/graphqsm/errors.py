"""Exception types shared across the package."""


class GraphQSMError(Exception):
    """Base class for errors raised by graphqsm."""


class GraphFormatError(GraphQSMError, ValueError):
    """Graph file content is malformed or inconsistent."""


class InadmissibleGraphError(GraphQSMError, ValueError):
    """Graph violates connectivity, minimum degree, or Betti-number requirements."""


class SizeLimitError(GraphQSMError, ValueError):
    """A configured search or enumeration bound was exceeded."""


class InsufficientDepthError(GraphQSMError, ValueError):
    """A cylinder is too shallow for the requested exact computation."""


class ConvergenceError(GraphQSMError, RuntimeError):
    """Iterative eigen-solver failed to converge."""


class CrossCheckError(GraphQSMError, AssertionError):
    """Two independent computations that must agree did not."""


class DepthOverflowError(GraphQSMError, ValueError):
    """A crossed-product computation needs more resolution or longer words than allowed."""


class RankMismatchError(GraphQSMError, ValueError):
    """Graphs with different Betti numbers admit no boundary conjugacy."""
