"""Exception and warning types shared across the package."""


class ShiftRateError(Exception):
    """Base class for all errors raised by shiftrate."""


class CaseNotApplicable(ShiftRateError):
    pass


class NonErgodicMatrix(ShiftRateError):
    pass


class UnimodularMatrix(ShiftRateError):
    pass


class RationalEigenvalue(ShiftRateError):
    pass


class PrecisionExhausted(ShiftRateError):
    pass


class FrequencyOverflow(ShiftRateError):
    pass


class NullSetPoint(ShiftRateError):
    """A Rademacher sign was requested on its dyadic discontinuity set."""


class WindowExhausted(ShiftRateError):
    """A finite bit window has run out of usable bits."""


class ConfigInvalid(ShiftRateError):
    pass


class PeriodicOrbitWarning(UserWarning):
    """An exact rational orbit revisited a previous point."""
