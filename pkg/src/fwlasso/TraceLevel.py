from enum import Enum, unique


@unique
class TraceLevel(Enum):
    """
    Granularity of the rows recorded in a solver trace. Levels are ordered.
    """

    NONE = 0
    SUMMARY = 1
    ITERATION = 2

    def __str__(self) -> str:
        return self.name.lower()

    def __lt__(self, other) -> bool:
        if isinstance(other, TraceLevel):
            return self.value < other.value
        return NotImplemented

    def __ge__(self, other) -> bool:
        if isinstance(other, TraceLevel):
            return self.value >= other.value
        return NotImplemented

    @classmethod
    def from_str(cls, level_str: str):
        level = cls.__members__.get(level_str.strip().upper())
        if level is None:
            raise ValueError(f"Invalid trace level: {level_str}")

        return level
