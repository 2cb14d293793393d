from enum import Enum, unique

SAMPLING_MODES_DESCRIPTIONS = [
    'Fixed number of sampled coordinates per iteration',
    'Fraction of p, rounded up',
    'Confidence that the best sampled coordinate lies in the top fraction of the gradient',
    'Confidence that the sample hits at least one active feature',
    'Every coordinate, i.e. the deterministic Frank-Wolfe iteration'
]

@unique
class SamplingMode(Enum):
    """
    Enumeration of the rules used to size the coordinate sample drawn at every iteration.
    """

    FIXED_SIZE = 0
    FRACTION_OF_P = 1
    CONFIDENCE_TOP_FRACTION = 2
    CONFIDENCE_ACTIVE_SET = 3
    FULL_DETERMINISTIC = 4

    def __str__(self) -> str:
        return self.name.lower()

    def __int__(self) -> int:
        return self.value

    def get_description(self) -> str:
        """
        Retrieve the description of the sampling mode.
        """
        return SAMPLING_MODES_DESCRIPTIONS[self.value]

    @classmethod
    def from_str(cls, mode_str: str):
        """
        Initialize a sampling mode using its name (case insensitive).

        Args:
            mode_str (str): The name of the mode, e.g. ``fixed_size``.

        Returns:
            SamplingMode: The mode corresponding to the given name.

        Raises:
            ValueError: If the provided name is invalid.
        """
        mode = cls.__members__.get(mode_str.strip().upper())
        if mode is None:
            raise ValueError(f"Invalid sampling mode: {mode_str}")

        return mode
