"""Exception hierarchy.

Data/validation problems derive from :class:`DataError` (CLI exit code 2);
numerical failures during training or simulation derive from
:class:`RuntimeFailure` (CLI exit code 3).
"""


class MotionError(Exception):
    """Base class for every error raised by this package."""


class DataError(MotionError, ValueError):
    pass


class RuntimeFailure(MotionError, RuntimeError):
    pass


class MissingFile(DataError, FileNotFoundError):
    pass


class MalformedRow(DataError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"MalformedRow at line {line}: {reason}")
        self.line = line


class NonMonotonicTime(DataError):
    def __init__(self, line: int):
        super().__init__(f"NonMonotonicTime at line {line}")
        self.line = line


class TooShort(DataError):
    pass


class InvalidTrajectory(DataError):
    pass


class IoFailure(DataError, OSError):
    pass


class TrajectoryShorterThanWindow(DataError):
    pass


class EmptySequence(DataError):
    pass


class EmptyChannelSet(DataError):
    pass


class EmptyList(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class StaleCache(DataError):
    pass


class InvalidDims(DataError):
    pass


class InvalidConfig(DataError):
    pass


class EmptyTrainingSet(DataError):
    pass


class OverlapTooShort(DataError):
    pass


class CheckpointMismatch(DataError):
    pass


class InvalidParams(DataError):
    pass


class DivergenceDetected(RuntimeFailure):
    def __init__(self, step: int, what: str = "loss"):
        super().__init__(f"DivergenceDetected: non-finite {what} at step {step}")
        self.step = step


class UnstableSimulation(RuntimeFailure):
    def __init__(self, step: int):
        super().__init__(f"UnstableSimulation: |position| > 10 m at control step {step}")
        self.step = step
