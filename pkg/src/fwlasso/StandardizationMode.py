from enum import Enum, unique

STANDARDIZATION_MODES_DESCRIPTIONS = [
    'Leave the design matrix and the response untouched',
    'Scale every column to unit Euclidean norm and center the response',
    'Center every column, scale it to unit norm and center the response'
]

@unique
class StandardizationMode(Enum):
    """
    Represents the ways a design matrix can be standardized before solving.

    ``UNIT_NORM_COLUMNS`` keeps the matrix sparse and is the default for sparse inputs.
    ``CENTER_AND_UNIT_NORM`` densifies every column transiently while centering it.
    """

    NONE = 0
    UNIT_NORM_COLUMNS = 1
    CENTER_AND_UNIT_NORM = 2

    def __str__(self) -> str:
        """
        Returns the command-line spelling of the mode.
        """
        return _CLI_NAMES[self.value]

    def __int__(self) -> int:
        return self.value

    def get_description(self) -> str:
        """
        Retrieve the description of the mode.
        """
        return STANDARDIZATION_MODES_DESCRIPTIONS[self.value]

    @property
    def centers_response(self) -> bool:
        return self is not StandardizationMode.NONE

    @classmethod
    def from_str(cls, mode_str: str):
        """
        Creates a StandardizationMode from its command-line spelling or member name.

        Parameters:
            mode_str (str): ``none``, ``unit`` or ``center`` (member names are accepted too).

        Returns:
            StandardizationMode: The matching mode.

        Raises:
            ValueError: If the provided string is invalid.
        """
        key = mode_str.strip().lower()
        for member in cls:
            if key == _CLI_NAMES[member.value] or key == member.name.lower():
                return member

        raise ValueError(f"Invalid standardization mode: {mode_str}")


_CLI_NAMES = ('none', 'unit', 'center')
