class BellSplitError(Exception):
    """
    Base class for every error raised by bellsplit.
    """

    def __init__(self, message: str, details=None):
        super().__init__(message)
        self.details = details


class NotUnitary(BellSplitError):
    """
    Exception thrown when a matrix fails the unitarity test.
    """

    def __init__(self, details=None):
        super().__init__("Matrix is not unitary", details)


class NotHermitian(BellSplitError):
    """
    Exception thrown when an eigensolver receives a non-Hermitian matrix.
    """

    def __init__(self, details=None):
        super().__init__("Matrix is not Hermitian", details)


class NotRankOne(BellSplitError):
    """
    Exception thrown when an input polarization matrix is zero or entangled.
    """

    def __init__(self, details=None):
        super().__init__("Input polarization matrix is not rank one", details)


class MatrixFormatError(BellSplitError):
    """
    Exception thrown when a serialized matrix has the wrong shape or values.
    """

    def __init__(self, details=None):
        super().__init__("Malformed matrix", details)


class DegenerateTransmission(BellSplitError):
    """
    Exception thrown when the transmission eigenvalues do not fix a unique
    polar decomposition.
    """

    def __init__(self, details=None):
        super().__init__("Degenerate transmission eigenvalues", details)


class DegenerateXi(BellSplitError):
    """
    Exception thrown when xi_1 == xi_2 and c_1 is undefined.
    """

    def __init__(self, details=None):
        super().__init__("Degenerate singular values of gamma_2", details)


class QuadratureNotConverged(BellSplitError):
    """
    Exception thrown when an overlap integral misses its error target.
    """

    def __init__(self, details=None):
        super().__init__("Quadrature did not converge", details)


class EmptyWindow(BellSplitError):
    """
    Exception thrown when a wavepacket has no amplitude inside the
    coincidence window.
    """

    def __init__(self, details=None):
        super().__init__("No wavepacket amplitude inside the coincidence window", details)


class ZeroCoincidence(BellSplitError):
    """
    Exception thrown when no coincidence events survive postselection.
    """

    def __init__(self, details=None):
        super().__init__("Coincidence probability vanishes", details)


class InconsistentRoutes(BellSplitError):
    """
    Exception thrown when two independent routes to the same quantity disagree.
    """

    def __init__(self, details=None):
        super().__init__("Independent evaluation routes disagree", details)


class ConfigError(BellSplitError):
    """
    Exception thrown for unusable configuration.
    """

    def __init__(self, details=None):
        super().__init__("Invalid configuration", details)
