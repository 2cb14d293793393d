import math
import logging

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .LassoProblem import FwProblem
from .OpCounter import OpCounter
from .Sampling import SamplingPlan, draw_subset, make_rng
from .Solution import Solution, Trace, TraceRow
from .StopReason import StopReason
from .TraceLevel import TraceLevel
from .FWLassoErrors import ContractViolation, NumericError, StateAuditError

logger = logging.getLogger(__name__)

# Coefficients smaller than this after the (1 - lambda) rescale are dropped from the sparse map.
PRUNE_THRESHOLD = 1e-14

# Line-search denominators at or below this mean X alpha already equals the chosen vertex image.
DENOMINATOR_FLOOR = 1e-30

AUDIT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class FwOptions:
    """
    Options of a Frank-Wolfe solve.

    Attributes:
        epsilon (float): Stop when the largest coefficient change of an iteration is at most epsilon
            (or, with ``stop_on_gap``, when the duality gap is). Defaults to 1e-3.
        max_iter (int): Iteration cap. Defaults to 10000.
        sampling (SamplingPlan): How candidate coordinates are drawn. Defaults to the full search.
        check_interval (int): Audit the cached quantities every this many iterations; 0 disables.
        trace_level (TraceLevel): Rows recorded in the trace. Defaults to ``SUMMARY``.
        audit_gap (int): Record the duality gap in the trace every this many iterations; 0 disables.
            The cost goes to the diagnostic counters.
        stop_on_gap (bool): Use the duality gap instead of the coefficient change as the stopping
            rule. Costs p dot products per iteration, charged to the solve.
        stall_patience (int): After this many consecutive randomized iterations that leave the
            coefficients unchanged, the next iteration searches all p coordinates; the solve stops
            only if that step is zero too. A randomized step that meets the change rule is
            confirmed the same way.
    """

    epsilon: float = 1e-3
    max_iter: int = 10000
    sampling: SamplingPlan = field(default_factory=SamplingPlan.full)
    check_interval: int = 100
    trace_level: TraceLevel = TraceLevel.SUMMARY
    audit_gap: int = 0
    stop_on_gap: bool = False
    stall_patience: int = 10

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ContractViolation(f"epsilon must be positive, got {self.epsilon}")

        if self.max_iter < 1:
            raise ContractViolation(f"max_iter must be at least 1, got {self.max_iter}")

        if self.check_interval < 0 or self.audit_gap < 0:
            raise ContractViolation("check_interval and audit_gap must be non-negative")

        if self.stall_patience < 1:
            raise ContractViolation(f"stall_patience must be at least 1, got {self.stall_patience}")


@dataclass
class FwState:
    """
    Iterate of a Frank-Wolfe solve together with its cached products.

    Attributes:
        alpha (dict): Sparse coefficients ``{index: value}``.
        p_vec (np.ndarray): Cached ``X alpha``.
        S (float): Tracks ``alpha^T X^T X alpha``.
        F (float): Tracks ``y^T X alpha``.
        k (int): Iterations performed.
    """

    alpha: dict
    p_vec: np.ndarray
    S: float = 0.0
    F: float = 0.0
    k: int = 0

    @property
    def nnz(self) -> int:
        return len(self.alpha)

    def l1_norm(self) -> float:
        return float(sum(abs(value) for value in self.alpha.values()))


class FWSolver:
    """
    Randomized Frank-Wolfe solver for the constrained Lasso.

    Every iteration draws a random subset of coordinates, computes the gradient on that subset only
    (one dot product per sampled column), moves toward the signed vertex ``+-delta * e_i`` of the
    l1 ball with the best sampled gradient coordinate, and picks the step by an exact line search.
    The objective is tracked through the scalars S and F, so an iteration never touches the
    unsampled columns. With the full search (kappa = p) this is the classical deterministic method.
    """

    def __init__(self, problem: FwProblem, options: Union[FwOptions, None] = None) -> None:
        """
        Initialize the solver.

        Args:
            problem (FwProblem): The constrained problem; shared, never modified.
            options (FwOptions, optional): Solve options. Defaults to ``FwOptions()``.
        """
        self.problem = problem
        self.options = FwOptions() if options is None else options
        self._stationary_floor = 1e-14 * (1.0 + float(np.max(np.abs(problem.sigma), initial=0.0)))


    def initial_state(self, warm_start: Union[dict, np.ndarray, None] = None,
                      ctr: Union[OpCounter, None] = None) -> FwState:
        """
        Build the starting state, recomputing the cached products of a warm start from scratch.

        Args:
            warm_start (Union[dict, np.ndarray, None], optional): Feasible starting coefficients. Defaults to None (zero).
            ctr (OpCounter, optional): Ledger charged one axpy per nonzero of the warm start.

        Returns:
            FwState: The initial state.

        Raises:
            ContractViolation: If the warm start lies outside the l1 ball or has an index out of range.
        """
        problem = self.problem
        ctr = OpCounter() if ctr is None else ctr
        alpha = _as_sparse(warm_start, problem.p)
        p_vec = np.zeros(problem.m)
        if not alpha:
            return FwState(alpha, p_vec)

        l1_norm = sum(abs(value) for value in alpha.values())
        if l1_norm > problem.delta * (1.0 + 1e-9):
            raise ContractViolation(f"Warm start has l1 norm {l1_norm} > delta={problem.delta}; rescale it first")

        for j, value in alpha.items():
            problem.X.col_axpy(j, value, p_vec, ctr)

        return FwState(alpha, p_vec, float(p_vec @ p_vec), float(problem.y @ p_vec))


    def select_vertex(self, state: FwState, sample: Union[np.ndarray, None], ctr: OpCounter) -> tuple[int, float, float]:
        """
        Find the sampled coordinate with the largest gradient magnitude.

        Args:
            state (FwState): Current state.
            sample (Union[np.ndarray, None]): Sorted candidate indices, or None for all p coordinates.
            ctr (OpCounter): Ledger receiving one dot product per candidate.

        Returns:
            tuple[int, float, float]: ``i*``, the signed vertex weight ``delta~ = -delta * sign(g_i*)``
            (with sign(0) = +1) and the gradient coordinate ``g_i*``. Ties go to the lowest index.
        """
        problem = self.problem
        if sample is not None and len(sample) == 0:
            raise ContractViolation("Sample must not be empty")

        products = problem.X.cols_dot_dense(sample, state.p_vec, ctr)
        gradient = products - (problem.sigma if sample is None else problem.sigma[sample])

        position = int(np.argmax(np.abs(gradient)))
        index = position if sample is None else int(sample[position])
        g = float(gradient[position])
        signed_delta = -problem.delta if g >= 0 else problem.delta

        return index, signed_delta, g


    def line_search(self, state: FwState, index: int, signed_delta: float, g: float) -> tuple[float, bool]:
        """
        Exact minimizer over [0, 1] of the objective along the segment toward the chosen vertex.

        Args:
            state (FwState): Current state.
            index (int): The chosen coordinate.
            signed_delta (float): Signed vertex weight.
            g (float): Gradient coordinate at ``index``.

        Returns:
            tuple[float, bool]: The step in [0, 1], and True when the segment is degenerate
            (zero curvature) and the step was forced to 0.

        Raises:
            NumericError: If an intermediate is not finite.
        """
        problem = self.problem
        G = g + problem.sigma[index]
        numerator = state.S - signed_delta * g - state.F
        denominator = state.S - 2.0 * signed_delta * G + signed_delta ** 2 * problem.col_norms_sq[index]

        if not (math.isfinite(numerator) and math.isfinite(denominator)):
            raise NumericError("non-finite line search", {
                'k': state.k, 'index': index, 'S': state.S, 'F': state.F, 'g': g,
                'numerator': numerator, 'denominator': denominator,
            })

        if denominator <= DENOMINATOR_FLOOR:
            return 0.0, True

        return min(1.0, max(0.0, numerator / denominator)), False


    def apply_step(self, state: FwState, index: int, signed_delta: float, step: float, g: float, ctr: OpCounter) -> float:
        """
        Move to ``(1 - step) * alpha + step * signed_delta * e_index`` and update the caches.

        Args:
            state (FwState): State updated in place; ``k`` is incremented.
            index (int): The chosen coordinate.
            signed_delta (float): Signed vertex weight.
            step (float): Step in [0, 1].
            g (float): Gradient coordinate at ``index``.
            ctr (OpCounter): Ledger receiving one axpy.

        Returns:
            float: The largest absolute coefficient change.
        """
        state.k += 1
        if step == 0.0:
            return 0.0

        problem = self.problem
        keep = 1.0 - step
        old_value = state.alpha.get(index, 0.0)
        largest_change = 0.0

        for j in list(state.alpha):
            if j == index:
                continue

            value = state.alpha[j]
            largest_change = max(largest_change, step * abs(value))
            value *= keep
            if abs(value) < PRUNE_THRESHOLD:
                del state.alpha[j]
            else:
                state.alpha[j] = value

        new_value = keep * old_value + signed_delta * step
        largest_change = max(largest_change, abs(new_value - old_value))
        if abs(new_value) < PRUNE_THRESHOLD:
            state.alpha.pop(index, None)
        else:
            state.alpha[index] = new_value

        state.p_vec *= keep
        problem.X.col_axpy(index, signed_delta * step, state.p_vec, ctr)

        G = g + problem.sigma[index]
        state.S = (keep ** 2 * state.S + 2.0 * signed_delta * step * keep * G
                   + signed_delta ** 2 * step ** 2 * problem.col_norms_sq[index])
        state.F = keep * state.F + signed_delta * step * problem.sigma[index]

        return largest_change


    def objective(self, state: FwState) -> float:
        """
        Objective from the tracked scalars: ``0.5 * y^T y + 0.5 * S - F``.
        """
        return float(0.5 * self.problem.yty + 0.5 * state.S - state.F)


    def audit(self, state: FwState, ctr: OpCounter) -> None:
        """
        Compare the cached ``X alpha``, S and F with a direct recomputation.

        Args:
            state (FwState): The state to check.
            ctr (OpCounter): Diagnostic ledger, charged one axpy per nonzero.

        Raises:
            StateAuditError: If a cache drifted beyond tolerance or alpha left the l1 ball.
        """
        problem = self.problem
        direct = np.zeros(problem.m)
        for j, value in state.alpha.items():
            problem.X.col_axpy(j, value, direct, ctr)

        y_scale = 1.0 + float(np.max(np.abs(problem.y), initial=0.0))
        drift = float(np.max(np.abs(state.p_vec - direct), initial=0.0))
        if drift > AUDIT_TOLERANCE * y_scale:
            raise StateAuditError(f"iteration {state.k}: cached X alpha drifted by {drift:.3e}")

        S_direct = float(direct @ direct)
        F_direct = float(problem.y @ direct)
        if abs(state.S - S_direct) > AUDIT_TOLERANCE * (1.0 + abs(S_direct)):
            raise StateAuditError(f"iteration {state.k}: S={state.S!r} but ||X alpha||^2={S_direct!r}")

        if abs(state.F - F_direct) > AUDIT_TOLERANCE * (1.0 + abs(F_direct)):
            raise StateAuditError(f"iteration {state.k}: F={state.F!r} but y^T X alpha={F_direct!r}")

        if state.l1_norm() > problem.delta * (1.0 + 1e-10):
            raise StateAuditError(f"iteration {state.k}: ||alpha||_1={state.l1_norm()!r} exceeds delta={problem.delta!r}")

        logger.debug("Audit passed at iteration %d (drift %.3e)", state.k, drift)


    def duality_gap(self, state: FwState, ctr: OpCounter) -> float:
        """
        Frank-Wolfe duality gap ``alpha^T grad + delta * ||grad||_inf``, an upper bound on the primal gap.

        Args:
            state (FwState): The iterate.
            ctr (OpCounter): Ledger receiving p dot products.

        Returns:
            float: The non-negative gap.
        """
        problem = self.problem
        gradient = problem.X.full_gradient(state.p_vec, problem.sigma, ctr)
        inner = sum(value * gradient[j] for j, value in state.alpha.items())

        return max(0.0, float(inner + problem.delta * np.max(np.abs(gradient))))


    def solve(self, warm_start: Union[dict, np.ndarray, None] = None,
              seed: Union[int, None] = None) -> tuple[Solution, Trace]:
        """
        Run the solver.

        Args:
            warm_start (Union[dict, np.ndarray, None], optional): Feasible start (``||alpha_0||_1 <= delta``). Defaults to zero.
            seed (int, optional): Overrides the sampling plan seed, e.g. with a per-grid-point child seed.

        Returns:
            tuple[Solution, Trace]: The solution and the recorded trace.

        Raises:
            ContractViolation: If the warm start is infeasible or the plan does not fit p.
            NumericError: On a non-finite line search.
            StateAuditError: If an audit fails.
        """
        problem = self.problem
        options = self.options
        plan = options.sampling
        p = problem.p

        ctr = OpCounter()
        diagnostics = OpCounter()
        trace = Trace()
        rng = make_rng(plan.seed if seed is None else seed)
        state = self.initial_state(warm_start, ctr)

        kappa = None if plan.is_adaptive else plan.resolve(p)
        logger.debug("FW solve: delta=%g, kappa=%s, epsilon=%g", problem.delta, kappa or 'adaptive', options.epsilon)

        if options.trace_level >= TraceLevel.ITERATION:
            trace.append(TraceRow(0, self.objective(state), state.nnz, ctr.dot_products))

        stop_reason = StopReason.MAX_ITER
        stalled = 0
        confirm = False
        while state.k < options.max_iter:
            size = plan.resolve(p, state.nnz) if kappa is None else kappa
            full_search = size == p or confirm
            confirm = False

            sample = None if full_search else draw_subset(p, size, rng)
            index, signed_delta, g = self.select_vertex(state, sample, ctr)
            if abs(g) <= self._stationary_floor:
                step, degenerate = 0.0, True
            else:
                step, degenerate = self.line_search(state, index, signed_delta, g)

            change = self.apply_step(state, index, signed_delta, step, g, ctr)

            if options.check_interval and state.k % options.check_interval == 0:
                self.audit(state, diagnostics)

            gap = None
            if options.audit_gap and state.k % options.audit_gap == 0:
                gap = self.duality_gap(state, diagnostics)

            if options.trace_level >= TraceLevel.ITERATION:
                trace.append(TraceRow(state.k, self.objective(state), state.nnz, ctr.dot_products, gap))

            if step == 0.0:
                # With the full search a zero step certifies a non-positive duality gap.
                if full_search:
                    stop_reason = StopReason.STATIONARY
                    break

                stalled += 1
                if stalled >= options.stall_patience:
                    logger.debug("Randomized FW stalled for %d iterations at k=%d (degenerate=%s), searching all "
                                 "coordinates", stalled, state.k, degenerate)
                    stalled = 0
                    confirm = True

                continue

            stalled = 0
            if options.stop_on_gap:
                if self.duality_gap(state, ctr) <= options.epsilon:
                    stop_reason = StopReason.TOLERANCE
                    break
            elif change <= options.epsilon:
                if full_search:
                    stop_reason = StopReason.TOLERANCE
                    break

                confirm = True

        if options.check_interval:
            self.audit(state, diagnostics)

        objective = self.objective(state)
        if options.trace_level is TraceLevel.SUMMARY:
            gap = self.duality_gap(state, diagnostics) if options.audit_gap else None
            trace.append(TraceRow(state.k, objective, state.nnz, ctr.dot_products, gap))

        logger.info("FW finished: delta=%g, %d iterations (%s), objective=%.6g, nnz=%d, dot products=%d",
                    problem.delta, state.k, stop_reason, objective, state.nnz, ctr.dot_products)

        solution = Solution(dict(state.alpha), objective, state.k, stop_reason, ctr, diagnostics)

        return solution, trace


def _as_sparse(alpha: Union[dict, np.ndarray, None], p: int) -> dict:
    if alpha is None:
        return dict()

    if isinstance(alpha, dict):
        sparse_alpha = {int(j): float(value) for j, value in alpha.items() if value != 0.0}
    else:
        alpha = np.asarray(alpha, dtype=np.float64)
        if alpha.shape != (p,):
            raise ContractViolation(f"Warm start must have length {p}, got shape {alpha.shape}")

        sparse_alpha = {int(j): float(alpha[j]) for j in np.flatnonzero(alpha)}

    if any(not 0 <= j < p for j in sparse_alpha):
        raise ContractViolation(f"Warm start index out of range for p={p}")

    return sparse_alpha


def curvature_bound(problem: FwProblem) -> float:
    """
    Computable upper bound ``2 * delta^2 * max_ij |z_i^T z_j|`` of the curvature constant.

    Forms the dense Gram matrix; meant for small p.
    """
    dense = problem.X.to_dense()
    gram = dense.T @ dense

    return 2.0 * problem.delta ** 2 * float(np.max(np.abs(gram), initial=0.0))
