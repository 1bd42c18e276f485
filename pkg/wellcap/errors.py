from __future__ import annotations


class WellcapError(RuntimeError):
    exit_code = 1


class ProblemFormatError(WellcapError, ValueError):
    exit_code = 2


class ConfigError(WellcapError):
    exit_code = 2


class ScheduleError(WellcapError, ValueError):
    exit_code = 2


class UnsupportedNormError(WellcapError, ValueError):
    exit_code = 3


class ConsistencyError(WellcapError):
    exit_code = 4


class DegeneracyError(WellcapError):
    exit_code = 4


class PerturbationError(WellcapError):
    exit_code = 6


class NonGenericError(PerturbationError):
    def __init__(self, message: str, simplex: tuple[int, ...] | None = None) -> None:
        super().__init__(message)
        self.simplex = simplex
