import logging

from dataclasses import dataclass
from typing import Union

import numpy as np

from .SparseColumnMatrix import SparseColumnMatrix
from .CDSolver import soft_threshold
from .FWLassoErrors import ContractViolation, OracleFailure

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITER = 200000


@dataclass(frozen=True)
class OracleResult:
    """
    Certified reference solution.

    Attributes:
        alpha (np.ndarray): Dense optimal coefficients.
        objective (float): ``0.5 * ||X alpha - y||^2`` (plus the penalty for penalized problems).
        certified_gap (float): Duality gap at ``alpha``; bounds the distance to the optimal value.
        iterations (int): Iterations performed.
    """

    alpha: np.ndarray
    objective: float
    certified_gap: float
    iterations: int = 0


def _dense(X: Union[SparseColumnMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(X, SparseColumnMatrix):
        return X.to_dense()

    return np.asarray(X, dtype=np.float64)


def project_l1_ball(v: np.ndarray, delta: float) -> np.ndarray:
    """
    Euclidean projection onto ``{x : ||x||_1 <= delta}`` by sorting the magnitudes.

    Args:
        v (np.ndarray): Point to project.
        delta (float): Radius, ``delta >= 0``.

    Returns:
        np.ndarray: The projection (a copy of v when v is already inside the ball).
    """
    if delta < 0:
        raise ContractViolation(f"Radius must be non-negative, got {delta}")

    v = np.asarray(v, dtype=np.float64)
    magnitudes = np.abs(v)
    if magnitudes.sum() <= delta:
        return v.copy()

    if delta == 0:
        return np.zeros_like(v)

    ordered = np.sort(magnitudes)[::-1]
    cumulative = np.cumsum(ordered)
    ranks = np.arange(1, len(v) + 1)
    last = np.flatnonzero(ordered > (cumulative - delta) / ranks)[-1]
    threshold = (cumulative[last] - delta) / (last + 1)

    return np.sign(v) * np.maximum(magnitudes - threshold, 0.0)


def _lipschitz(dense: np.ndarray) -> float:
    if dense.size == 0:
        return 0.0

    return float(np.linalg.norm(dense, 2) ** 2)


def _constrained_gap(alpha: np.ndarray, gradient: np.ndarray, delta: float) -> float:
    return float(alpha @ gradient + delta * np.max(np.abs(gradient), initial=0.0))


def solve_constrained_reference(X: Union[SparseColumnMatrix, np.ndarray], y: np.ndarray, delta: float,
                                tol: float = DEFAULT_TOLERANCE, max_iter: int = DEFAULT_MAX_ITER) -> OracleResult:
    """
    Solve the constrained Lasso to a certified duality gap with accelerated projected gradient.

    The iteration restarts its momentum whenever the objective increases. Densifies X.

    Args:
        X (Union[SparseColumnMatrix, np.ndarray]): Design matrix.
        y (np.ndarray): Response.
        delta (float): l1 radius, ``delta >= 0``.
        tol (float, optional): Required duality gap. Defaults to 1e-10.
        max_iter (int, optional): Iteration cap.

    Returns:
        OracleResult: The certified solution.

    Raises:
        OracleFailure: If the gap is not reached within ``max_iter`` iterations.
    """
    if delta < 0:
        raise ContractViolation(f"delta must be non-negative, got {delta}")

    dense = _dense(X)
    y = np.asarray(y, dtype=np.float64)
    p = dense.shape[1]
    alpha = np.zeros(p)

    def objective(a):
        residual = dense @ a - y
        return 0.5 * float(residual @ residual)

    if delta == 0 or p == 0:
        return OracleResult(alpha, objective(alpha), 0.0, 0)

    lipschitz = _lipschitz(dense)
    if lipschitz == 0.0:
        return OracleResult(alpha, objective(alpha), 0.0, 0)

    extrapolated = alpha.copy()
    momentum = 1.0
    current = objective(alpha)
    for iteration in range(1, max_iter + 1):
        gradient = dense.T @ (dense @ extrapolated - y)
        candidate = project_l1_ball(extrapolated - gradient / lipschitz, delta)
        value = objective(candidate)

        if value > current and momentum > 1.0:
            # Restart: drop the momentum and take a plain projected step from alpha.
            momentum = 1.0
            extrapolated = alpha.copy()
            continue

        next_momentum = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum ** 2))
        extrapolated = candidate + ((momentum - 1.0) / next_momentum) * (candidate - alpha)
        alpha, current, momentum = candidate, value, next_momentum

        gap = _constrained_gap(alpha, dense.T @ (dense @ alpha - y), delta)
        if gap <= tol:
            logger.debug("Constrained oracle converged in %d iterations (gap %.3e)", iteration, gap)
            return OracleResult(alpha, current, max(gap, 0.0), iteration)

    raise OracleFailure(f"Constrained oracle did not reach gap {tol} within {max_iter} iterations")


def solve_penalized_reference(X: Union[SparseColumnMatrix, np.ndarray], y: np.ndarray, lam: float,
                              tol: float = DEFAULT_TOLERANCE, max_iter: int = DEFAULT_MAX_ITER) -> OracleResult:
    """
    Solve the penalized Lasso to a certified duality gap with accelerated proximal gradient.

    The gap uses the dual point obtained by scaling the residual into ``||X^T theta||_inf <= lam``.
    ``lam = 0`` is solved directly by least squares.

    Args:
        X (Union[SparseColumnMatrix, np.ndarray]): Design matrix.
        y (np.ndarray): Response.
        lam (float): Penalty, ``lam >= 0``.
        tol (float, optional): Required duality gap. Defaults to 1e-10.
        max_iter (int, optional): Iteration cap.

    Returns:
        OracleResult: The certified solution; ``objective`` includes the penalty.

    Raises:
        OracleFailure: If the gap is not reached within ``max_iter`` iterations.
    """
    if lam < 0:
        raise ContractViolation(f"lambda must be non-negative, got {lam}")

    dense = _dense(X)
    y = np.asarray(y, dtype=np.float64)

    if lam == 0:
        alpha = least_squares_reference(dense, y)
        residual = dense @ alpha - y
        return OracleResult(alpha, 0.5 * float(residual @ residual), 0.0, 0)

    def primal(a):
        residual = y - dense @ a
        return 0.5 * float(residual @ residual) + lam * float(np.sum(np.abs(a)))

    def gap_at(a):
        residual = y - dense @ a
        correlation = float(np.max(np.abs(dense.T @ residual), initial=0.0))
        theta = residual * min(1.0, lam / correlation) if correlation > 0 else residual
        dual = 0.5 * float(y @ y) - 0.5 * float((y - theta) @ (y - theta))
        return primal(a) - dual

    alpha = np.zeros(dense.shape[1])
    lipschitz = _lipschitz(dense)
    if lipschitz == 0.0 or gap_at(alpha) <= tol:
        return OracleResult(alpha, primal(alpha), max(gap_at(alpha), 0.0), 0)

    extrapolated = alpha.copy()
    momentum = 1.0
    current = primal(alpha)
    for iteration in range(1, max_iter + 1):
        gradient = dense.T @ (dense @ extrapolated - y)
        candidate = soft_threshold(extrapolated - gradient / lipschitz, lam / lipschitz)
        value = primal(candidate)

        if value > current and momentum > 1.0:
            momentum = 1.0
            extrapolated = alpha.copy()
            continue

        next_momentum = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum ** 2))
        extrapolated = candidate + ((momentum - 1.0) / next_momentum) * (candidate - alpha)
        alpha, current, momentum = candidate, value, next_momentum

        gap = gap_at(alpha)
        if gap <= tol:
            logger.debug("Penalized oracle converged in %d iterations (gap %.3e)", iteration, gap)
            return OracleResult(alpha, current, max(gap, 0.0), iteration)

    raise OracleFailure(f"Penalized oracle did not reach gap {tol} within {max_iter} iterations")


def least_squares_reference(X: Union[SparseColumnMatrix, np.ndarray], y: np.ndarray) -> np.ndarray:
    """
    Minimum-norm least-squares coefficients.
    """
    return np.linalg.lstsq(_dense(X), np.asarray(y, dtype=np.float64), rcond=None)[0]
