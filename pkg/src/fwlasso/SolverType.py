from enum import Enum, unique

SOLVER_TYPES_DESCRIPTIONS = [
    'Randomized Frank-Wolfe on the l1-constrained problem',
    'Cyclic coordinate descent on the l1-penalized problem',
    'Stochastic coordinate descent on the l1-penalized problem'
]

@unique
class SolverType(Enum):
    """
    Solver families. Frank-Wolfe sweeps radii upwards, coordinate descent sweeps penalties downwards.
    """

    FW = 0
    CD = 1
    SCD = 2

    def __str__(self) -> str:
        return self.name.lower()

    def __int__(self) -> int:
        return self.value

    def get_description(self) -> str:
        return SOLVER_TYPES_DESCRIPTIONS[self.value]

    @property
    def is_constrained(self) -> bool:
        """
        True when the solver works on the radius delta instead of the penalty lambda.
        """
        return self is SolverType.FW

    @classmethod
    def from_str(cls, solver_str: str):
        """
        Creates a SolverType from its name.

        Parameters:
            solver_str (str): ``fw``, ``cd`` or ``scd`` (case insensitive).

        Returns:
            SolverType: The SolverType instance corresponding to the input string.

        Raises:
            ValueError: If the provided string is invalid.
        """
        solver = cls.__members__.get(solver_str.strip().upper())
        if solver is None:
            raise ValueError(f"Invalid solver: {solver_str}")

        return solver
