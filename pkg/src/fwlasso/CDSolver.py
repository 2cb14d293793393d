import logging

from dataclasses import dataclass
from typing import Union

import numpy as np

from .CDOrder import CDOrder
from .LassoProblem import CdProblem
from .OpCounter import OpCounter
from .Sampling import DEFAULT_SEED, make_rng
from .Solution import Solution, Trace, TraceRow
from .StopReason import StopReason
from .TraceLevel import TraceLevel
from .FWLassoErrors import ContractViolation, StateAuditError

logger = logging.getLogger(__name__)

AUDIT_TOLERANCE = 1e-8


def soft_threshold(x, t: float):
    """
    Soft-thresholding operator ``sign(x) * max(|x| - t, 0)``, elementwise for arrays.

    Args:
        x: Scalar or array.
        t (float): Threshold, ``t >= 0``.

    Returns:
        Same shape as x.

    Raises:
        ContractViolation: If t is negative.
    """
    if t < 0:
        raise ContractViolation(f"Threshold must be non-negative, got {t}")

    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


@dataclass(frozen=True)
class CdOptions:
    """
    Options of a coordinate descent solve.

    Attributes:
        epsilon (float): Stop after a full epoch whose largest coefficient change is at most epsilon.
        max_epochs (int): Epoch cap.
        order (CDOrder): Visiting order of the coordinates within an epoch.
        seed (int): Seed of the generator used by the random orders.
        active_set (bool): Cycle on the nonzero coefficients between full sweeps.
        check_interval (int): Audit the residual every this many epochs; 0 disables.
        trace_level (TraceLevel): Rows recorded in the trace.
    """

    epsilon: float = 1e-3
    max_epochs: int = 10000
    order: CDOrder = CDOrder.CYCLIC
    seed: int = DEFAULT_SEED
    active_set: bool = False
    check_interval: int = 100
    trace_level: TraceLevel = TraceLevel.SUMMARY

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ContractViolation(f"epsilon must be positive, got {self.epsilon}")

        if self.max_epochs < 1:
            raise ContractViolation(f"max_epochs must be at least 1, got {self.max_epochs}")

        if self.check_interval < 0:
            raise ContractViolation("check_interval must be non-negative")


@dataclass
class CdState:
    """
    Dense coefficients, the residual ``R = y - X alpha`` and the epoch count.
    """

    alpha: np.ndarray
    R: np.ndarray
    epoch: int = 0

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.alpha))


class CDSolver:
    """
    Coordinate descent for the penalized Lasso in residual-update form.

    Each coordinate update costs one dot product ``z_j^T R`` and, when the coefficient moves, one
    axpy on the residual, so its counters are directly comparable with the Frank-Wolfe solver's.
    """

    def __init__(self, problem: CdProblem, options: Union[CdOptions, None] = None) -> None:
        self.problem = problem
        self.options = CdOptions() if options is None else options


    def initial_state(self, warm_start: Union[dict, np.ndarray, None] = None,
                      ctr: Union[OpCounter, None] = None) -> CdState:
        """
        Build the starting state; the residual of a warm start costs one axpy per nonzero.
        """
        problem = self.problem
        ctr = OpCounter() if ctr is None else ctr
        alpha = np.zeros(problem.p)
        if isinstance(warm_start, dict):
            for j, value in warm_start.items():
                if not 0 <= j < problem.p:
                    raise ContractViolation(f"Warm start index {j} out of range for p={problem.p}")

                alpha[j] = value
        elif warm_start is not None:
            warm_start = np.asarray(warm_start, dtype=np.float64)
            if warm_start.shape != (problem.p,):
                raise ContractViolation(f"Warm start must have length {problem.p}, got shape {warm_start.shape}")

            alpha[:] = warm_start

        R = np.array(problem.y, dtype=np.float64)
        for j in np.flatnonzero(alpha):
            problem.X.col_axpy(int(j), -alpha[j], R, ctr)

        return CdState(alpha, R)


    def _coordinates(self, order: CDOrder, rng: np.random.Generator) -> np.ndarray:
        p = self.problem.p
        if order is CDOrder.RANDOM_PERMUTATION:
            return rng.permutation(p)

        if order is CDOrder.IID_UNIFORM:
            return rng.integers(0, p, size=p)

        return np.arange(p)


    def cd_epoch(self, state: CdState, order: CDOrder, rng: np.random.Generator, ctr: OpCounter,
                 coordinates: Union[np.ndarray, None] = None) -> float:
        """
        Run one epoch of exact single-coordinate minimizations.

        Args:
            state (CdState): State updated in place.
            order (CDOrder): Visiting order; ``IID_UNIFORM`` draws p coordinates with replacement.
            rng (np.random.Generator): Generator for the random orders.
            ctr (OpCounter): Ledger receiving one dot product per visited coordinate.
            coordinates (np.ndarray, optional): Restrict the epoch to these coordinates, visited in order.

        Returns:
            float: The largest absolute coefficient change of the epoch.
        """
        problem = self.problem
        X = problem.X
        lam = problem.lam
        visit = self._coordinates(order, rng) if coordinates is None else coordinates

        max_delta = 0.0
        for j in visit:
            j = int(j)
            norm_sq = problem.col_norms_sq[j]
            if norm_sq == 0.0:
                continue

            old = state.alpha[j]
            rho = X.col_dot_dense(j, state.R, ctr) + old * norm_sq
            new = float(soft_threshold(rho, lam)) / norm_sq
            ctr.touch()

            delta = new - old
            if delta != 0.0:
                X.col_axpy(j, -delta, state.R, ctr)
                state.alpha[j] = new
                max_delta = max(max_delta, abs(delta))

        state.epoch += 1

        return max_delta


    def penalized_objective(self, state: CdState) -> float:
        return 0.5 * float(state.R @ state.R) + self.problem.lam * float(np.sum(np.abs(state.alpha)))


    def audit(self, state: CdState) -> None:
        """
        Compare the cached residual with ``y - X alpha``.

        Raises:
            StateAuditError: If the residual drifted beyond tolerance.
        """
        problem = self.problem
        direct = problem.y - problem.X.matvec(state.alpha)
        drift = float(np.max(np.abs(state.R - direct), initial=0.0))
        if drift > AUDIT_TOLERANCE * (1.0 + float(np.max(np.abs(problem.y), initial=0.0))):
            raise StateAuditError(f"epoch {state.epoch}: cached residual drifted by {drift:.3e}")


    def solve_penalized(self, warm_start: Union[dict, np.ndarray, None] = None,
                        trace: Union[Trace, None] = None) -> Solution:
        """
        Run epochs until a full epoch moves no coefficient by more than epsilon.

        With ``active_set`` the solver alternates a full sweep with sweeps over the nonzero
        coefficients only, until those settle; convergence is always confirmed by a full sweep. An
        ``IID_UNIFORM`` epoch that meets the tolerance is confirmed by a cyclic sweep over all p
        coordinates.

        Args:
            warm_start (Union[dict, np.ndarray, None], optional): Starting coefficients. Defaults to zero.
            trace (Trace, optional): Receives one row per epoch (``ITERATION``) or a final row (``SUMMARY``).

        Returns:
            Solution: Coefficients, objective ``0.5 * ||X alpha - y||^2`` and counters.
        """
        options = self.options
        ctr = OpCounter()
        rng = make_rng(options.seed)
        state = self.initial_state(warm_start, ctr)
        record = trace is not None and options.trace_level >= TraceLevel.ITERATION

        if record:
            trace.append(TraceRow(0, self.penalized_objective(state), state.nnz, ctr.dot_products))

        stop_reason = StopReason.MAX_ITER
        while state.epoch < options.max_epochs:
            max_delta = self._step(state, options.order, rng, ctr, record, trace)
            if max_delta <= options.epsilon and options.order is CDOrder.IID_UNIFORM and state.epoch < options.max_epochs:
                # Draws with replacement can miss coordinates; a cyclic sweep visits every one.
                max_delta = self._step(state, CDOrder.CYCLIC, rng, ctr, record, trace)

            if max_delta <= options.epsilon:
                stop_reason = StopReason.TOLERANCE
                break

            if not options.active_set:
                continue

            while state.epoch < options.max_epochs:
                active = np.flatnonzero(state.alpha)
                if len(active) == 0 or self._step(state, CDOrder.CYCLIC, rng, ctr, record, trace, active) <= options.epsilon:
                    break

        if options.check_interval:
            self.audit(state)

        objective = 0.5 * float(state.R @ state.R)
        penalized = self.penalized_objective(state)
        if trace is not None and options.trace_level is TraceLevel.SUMMARY:
            trace.append(TraceRow(state.epoch, penalized, state.nnz, ctr.dot_products))

        logger.info("CD finished: lambda=%g, %d epochs (%s), objective=%.6g, nnz=%d, dot products=%d",
                    self.problem.lam, state.epoch, stop_reason, penalized, state.nnz, ctr.dot_products)

        alpha = {int(j): float(state.alpha[j]) for j in np.flatnonzero(state.alpha)}

        return Solution(alpha, objective, state.epoch, stop_reason, ctr, penalized_objective=penalized)


    def _step(self, state: CdState, order: CDOrder, rng: np.random.Generator, ctr: OpCounter,
              record: bool, trace: Union[Trace, None], coordinates: Union[np.ndarray, None] = None) -> float:
        max_delta = self.cd_epoch(state, order, rng, ctr, coordinates)
        if self.options.check_interval and state.epoch % self.options.check_interval == 0:
            self.audit(state)

        if record:
            trace.append(TraceRow(state.epoch, self.penalized_objective(state), state.nnz, ctr.dot_products))

        logger.debug("CD epoch %d: max change %.3e", state.epoch, max_delta)

        return max_delta
