class OdescError(Exception):
    """Base class for every error raised by the dynamics package."""


class UsageError(OdescError, ValueError):
    """An argument or precondition was violated by the caller."""


class NotInStage(OdescError, LookupError):
    """A point lies in a gap between the intervals of a solenoid stage."""

    def __init__(self, x, stage: int):
        self.x = x
        self.stage = stage
        super().__init__(f"{x} lies in no stage-{stage} interval")
