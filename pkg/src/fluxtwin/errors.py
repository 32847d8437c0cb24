"""Exception hierarchy shared by every fluxtwin module."""


class FluxTwinError(Exception):
    """Base class for all errors raised by fluxtwin."""


class InvalidMassError(FluxTwinError, ValueError):
    pass


class CoincidenceError(FluxTwinError, ValueError):
    """A configuration lies within the exclusion radius of a triple coincidence."""


class InvalidWordError(FluxTwinError, ValueError):
    pass


class InvalidGeometryError(FluxTwinError, ValueError):
    pass


class SamplingTooCoarseError(FluxTwinError, RuntimeError):
    """Angle unwrapping could not reach the per-step bound after max refinement."""


class InvalidLoopError(FluxTwinError, ValueError):
    pass


class NotALoopError(FluxTwinError, ValueError):
    """A twin word does not induce the identity permutation."""


class DegenerateTimeError(FluxTwinError, ValueError):
    pass


class TruncationError(FluxTwinError, RuntimeError):
    """Series tail estimate exceeds the requested tolerance."""


class TruncationWarning(UserWarning):
    pass


class InvalidOperatorError(FluxTwinError, ValueError):
    pass


class OracleError(FluxTwinError, RuntimeError):
    """An analytic oracle (e.g. Bessel-zero bracketing) failed."""


class ConfigError(FluxTwinError, ValueError):
    pass
