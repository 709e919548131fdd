"""Exception hierarchy shared across the library.

Everything numeric derives from NumericsError so callers (and the CLI,
which maps it to exit code 2) can catch one type.
"""


class NumericsError(Exception):
    """Base class for all numerical failures raised by this package."""


class PoleError(NumericsError):
    """A gamma-type function was evaluated at (or too close to) a pole."""


class DomainError(NumericsError):
    """Argument outside the mathematical domain (e.g. x <= 0 for K_mu(x))."""


class UnderflowError(NumericsError):
    """A requested plain-float value is below the representable range."""


class NonConvergenceError(NumericsError):
    """A truncated sum never fell below its stopping threshold."""


class CancellationError(NumericsError):
    """Catastrophic cancellation detected: the largest intermediate term
    exceeds the guard ratio relative to the computed sum."""


class DegenerateParametersError(NumericsError):
    """Two spectral parameters coincide, so series coefficients hit
    gamma poles."""


class NonTemperedError(NumericsError):
    """Spectral parameters have a nonzero real part beyond tolerance."""


class MissingCoefficientError(NumericsError):
    """A Fourier coefficient required by the truncated expansion is absent."""

    def __init__(self, m1: int, m2: int):
        self.m1 = m1
        self.m2 = m2
        super().__init__(f"missing Fourier coefficient A({m1},{m2})")


class AccuracyRangeError(NumericsError):
    """A cached evaluator was queried outside its validated argument range."""


class DegenerateLatticeError(NumericsError):
    """Matrix factorization hit a vanishing pivot."""
