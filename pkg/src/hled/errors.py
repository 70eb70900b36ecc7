"""Exception hierarchy shared across the package."""


class HledError(Exception):
    """Base class for all domain errors."""


class NonPositiveField(HledError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"field must be > 0: {name}")


class FractionOutOfRange(HledError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"field out of its fractional range: {name}")


class CurrentOutOfRange(HledError):
    def __init__(self, current: float, i_max: float):
        self.current = current
        self.i_max = i_max
        super().__init__(f"drive current {current} A outside [0, {i_max}] A")


class TimeOutOfRange(HledError):
    def __init__(self, t: float, t_end: float):
        super().__init__(f"time {t} s outside program span [0, {t_end}] s")


class DriveProgramError(HledError):
    """Pulse list violates ordering / overlap / span constraints."""


class NonPhysicalTemperature(HledError):
    def __init__(self, dT_air: float, T0: float):
        super().__init__(
            f"air temperature rise {dT_air} K at or below absolute zero (T0={T0} K)"
        )


class NoConvergence(HledError):
    """Scalar solve failed to bracket or converge; parameters likely invalid."""


class ConfigError(HledError):
    """Simulation configuration incompatible with the drive program."""


class SweepSpecError(HledError):
    def __init__(self, detail: str):
        super().__init__(detail)


class EmptyTrace(HledError):
    pass


class TooShort(HledError):
    """Trace does not span enough cycles for steady-state extraction."""


class NonPositiveValue(HledError):
    """Log-domain fit received a value <= 0."""


class DegenerateX(HledError):
    """All abscissae identical; slope is undefined."""


class NotDecaying(HledError):
    """Exponential-decay fit found no interior optimum (or zero amplitude)."""


class NonUniformTimeBase(HledError):
    pass


class UnknownFigure(HledError):
    def __init__(self, name: str, known):
        super().__init__(f"unknown figure {name!r}; known: {', '.join(sorted(known))}")
