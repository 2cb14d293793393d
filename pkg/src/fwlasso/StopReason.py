from enum import Enum, unique


@unique
class StopReason(Enum):
    """
    Why a solve returned.
    """

    TOLERANCE = 0
    MAX_ITER = 1
    STATIONARY = 2

    def __str__(self) -> str:
        return self.name.lower()

    @classmethod
    def from_str(cls, reason_str: str):
        reason = cls.__members__.get(reason_str.strip().upper())
        if reason is None:
            raise ValueError(f"Invalid stop reason: {reason_str}")

        return reason
