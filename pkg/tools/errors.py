# tools/errors.py


class LabError(Exception):
    """Base class for every error raised by the laboratory."""


class ConfigError(LabError):
    pass


class ScheduleError(LabError):
    """A construction schedule violates its recursions or a query is out of range."""


class WordTooLong(ScheduleError):
    def __init__(self, height, max_len):
        super().__init__(
            f"word of height {height} exceeds materialization guard {max_len}; "
            "use the symbolic path"
        )
        self.height = height
        self.max_len = max_len


class LevelSetError(LabError):
    pass


class UnresolvablePosition(LabError):
    pass


class ToleranceUnreachable(LabError):
    def __init__(self, result, tolerance):
        super().__init__(
            f"certified width {result.width} at stage {result.stage} "
            f"does not meet tolerance {tolerance}"
        )
        self.result = result
        self.tolerance = tolerance


class SynthesisStall(LabError):
    def __init__(self, message, stage=None, required_length=None, blocking_window=None):
        super().__init__(message)
        self.stage = stage
        self.required_length = required_length
        self.blocking_window = blocking_window


class UnidentifiableKappa(LabError):
    pass


class OverlappingRegions(LabError):
    pass


class EngineInconsistency(LabError):
    pass
