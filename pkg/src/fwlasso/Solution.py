import csv

from dataclasses import dataclass, field
from typing import TextIO, Union

import numpy as np

from .OpCounter import OpCounter
from .StopReason import StopReason


@dataclass
class Solution:
    """
    Result of a single solve.

    Attributes:
        alpha (dict): Sparse coefficients ``{index: value}``, zeros omitted.
        objective (float): ``0.5 * ||X alpha - y||^2``.
        iterations (int): FW iterations or CD epochs performed.
        stop_reason (StopReason): Why the solve returned.
        counters (OpCounter): Algorithmic cost of the solve.
        diagnostic_counters (OpCounter): Cost of audits and diagnostic gaps, kept apart from ``counters``.
        penalized_objective (float, optional): ``objective + lam * ||alpha||_1`` for penalized solves.
    """

    alpha: dict
    objective: float
    iterations: int
    stop_reason: StopReason
    counters: OpCounter = field(default_factory=OpCounter)
    diagnostic_counters: OpCounter = field(default_factory=OpCounter)
    penalized_objective: Union[float, None] = None

    @property
    def nnz(self) -> int:
        return len(self.alpha)

    @property
    def l1_norm(self) -> float:
        return float(sum(abs(value) for value in self.alpha.values()))

    def dense(self, p: int) -> np.ndarray:
        """
        Coefficients as a dense vector of length p.
        """
        alpha = np.zeros(p)
        for j, value in self.alpha.items():
            alpha[j] = value

        return alpha

    def to_dict(self) -> dict:
        description = {
            'objective': self.objective,
            'iterations': self.iterations,
            'stop_reason': str(self.stop_reason),
            'nnz': self.nnz,
            'l1_norm': self.l1_norm,
            'counters': self.counters.as_dict(),
            'diagnostic_counters': self.diagnostic_counters.as_dict(),
            'alpha': {str(j): value for j, value in sorted(self.alpha.items())},
        }
        if self.penalized_objective is not None:
            description['penalized_objective'] = self.penalized_objective

        return description


@dataclass(frozen=True)
class TraceRow:
    k: int
    objective: float
    nnz: int
    dot_products: int
    gap: Union[float, None] = None


@dataclass
class Trace:
    """
    Rows recorded by a solver at its trace level.
    """

    rows: list[TraceRow] = field(default_factory=list)

    def append(self, row: TraceRow) -> None:
        self.rows.append(row)

    @property
    def has_gap(self) -> bool:
        return any(row.gap is not None for row in self.rows)

    def objectives(self) -> np.ndarray:
        return np.array([row.objective for row in self.rows])

    def to_csv(self, text_stream: TextIO) -> None:
        """
        Write ``k,objective,nnz,dot_products`` rows; a ``gap`` column is added when any row has one.
        """
        has_gap = self.has_gap
        writer = csv.writer(text_stream, lineterminator='\n')
        writer.writerow(['k', 'objective', 'nnz', 'dot_products'] + (['gap'] if has_gap else []))
        for row in self.rows:
            record = [row.k, repr(float(row.objective)), row.nnz, row.dot_products]
            if has_gap:
                record.append('' if row.gap is None else repr(float(row.gap)))

            writer.writerow(record)

    def __len__(self) -> int:
        return len(self.rows)
