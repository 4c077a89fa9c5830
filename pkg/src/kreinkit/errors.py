"""Exception hierarchy.

Every error carries a stable ``code`` string; the CLI emits it verbatim in
its error JSON.
"""


class KreinkitError(Exception):
    code = "KreinkitError"


class ConfigInvalid(KreinkitError, ValueError):
    code = "ConfigInvalid"


class SpectralPointInSpectrum(KreinkitError, ValueError):
    code = "SpectralPointInSpectrum"


class BranchCutViolation(SpectralPointInSpectrum):
    """Spectral parameter on the cut (-inf, 0] of the free Laplacian."""

    code = "BranchCutViolation"


class DegenerateRadius(KreinkitError, ValueError):
    code = "DegenerateRadius"


class SingularAtCenter(KreinkitError, ValueError):
    """A 1/r singularity sits exactly at the evaluation point."""

    code = "SingularAtCenter"


class KreinMatrixSingular(KreinkitError, ArithmeticError):
    """``Theta + Gamma(z)`` is numerically singular at the requested z."""

    code = "KreinMatrixSingular"


class BoundaryViolation(KreinkitError, ValueError):
    code = "BoundaryViolation"


class ZeroInSpectrum(SpectralPointInSpectrum):
    code = "ZeroInSpectrum"


class ThetaSingular(KreinkitError, ArithmeticError):
    code = "ThetaSingular"


class GammaNotAntiHermitian(KreinkitError, ValueError):
    code = "GammaNotAntiHermitian"


class GammaNotPositive(KreinkitError, ValueError):
    code = "GammaNotPositive"


class WPlusOneSingular(KreinkitError, ArithmeticError):
    """``W + 1`` is singular: the extension is not parametrizable by a Theta."""

    code = "WPlusOneSingular"


class SolveFailed(KreinkitError, ArithmeticError):
    code = "SolveFailed"


class IntervalOutsideResolventSet(KreinkitError, ValueError):
    code = "IntervalOutsideResolventSet"
