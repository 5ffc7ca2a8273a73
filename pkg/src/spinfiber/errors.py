"""Exception hierarchy. Every error raised by the package derives from SpinFiberError."""


class SpinFiberError(Exception):
    pass


class PreconditionError(SpinFiberError, ValueError):
    pass


class BranchCutError(SpinFiberError, ValueError):
    """Principal matrix logarithm does not exist (eigenvalue on the closed negative real axis)."""


class ConvergenceError(SpinFiberError, RuntimeError):
    pass


class DegenerateMetricError(SpinFiberError, ValueError):
    pass


class SingularTransformError(SpinFiberError, ValueError):
    pass


class SignatureError(SpinFiberError, ValueError):
    pass


class NotAnIsometryGeneratorError(SpinFiberError, ValueError):
    pass


class NotAnIsometryError(SpinFiberError, ValueError):
    pass


class GridMismatchError(SpinFiberError, ValueError):
    pass


class SingularFrameError(SpinFiberError, ValueError):
    pass


class FlowEscapeError(SpinFiberError, RuntimeError):
    pass


class AlignmentError(SpinFiberError, ValueError):
    """A base shift or spacetime map does not land on the sample lattice."""


class SupportError(SpinFiberError, ValueError):
    """Nonzero samples would leave the grid or collide with other samples."""


class ScaleFactorError(SpinFiberError, ValueError):
    pass


class StencilError(SpinFiberError, ValueError):
    pass
