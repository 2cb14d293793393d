from typing import Union


class FWLassoError(Exception):
    """
    Base class of every error raised by fwlasso.
    """


class DataError(FWLassoError, ValueError):
    """
    Input data could not be read or does not describe a valid dataset.
    """


class DataParseError(DataError):
    """
    A line of a text dataset is malformed.

    Attributes:
        line_number (int): 1-based line of the offending input, or None when unknown.
    """

    def __init__(self, message: str, line_number: Union[int, None] = None) -> None:
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"

        super().__init__(message)


class DimensionError(DataError):
    """
    Shapes or indices are inconsistent, e.g. a feature index above an explicit p.
    """


class EmptyDatasetError(DataError):
    """
    The input holds no rows.
    """


class ContractViolation(FWLassoError, ValueError):
    """
    A documented precondition of an operation was broken by the caller.
    """


class SolverError(FWLassoError, RuntimeError):
    """
    A solver could not produce a trustworthy result.
    """


class NumericError(SolverError):
    """
    A non-finite intermediate appeared inside an iteration.

    Attributes:
        state (dict): Snapshot of the scalars involved, for diagnosis.
    """

    def __init__(self, message: str, state: Union[dict, None] = None) -> None:
        self.state = dict() if state is None else state
        super().__init__(f"{message} (state: {self.state})")


class StateAuditError(SolverError):
    """
    A cached quantity drifted from its direct recomputation.
    """


class DegenerateProblemError(SolverError):
    """
    The problem has no informative direction, e.g. X^T y = 0.
    """


class OracleFailure(SolverError):
    """
    The reference solver did not reach the requested duality gap within its iteration cap.
    """
