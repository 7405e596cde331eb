"""
Exploratory factor analysis of the metrics table.

Columns are standardized with the sample standard deviation, correlated, and the
correlation matrix is diagonalized with cyclic Jacobi rotations. Factors with
eigenvalue >= 1 are retained, principal-component loadings are formed and then rotated
orthogonally to maximize the oblimax criterion

    Q(L) = ln(sum L^4) - 2 ln(sum L^2)

by gradient projection.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DataError, UsageError
from ..models import FactorReport
from .table import MetricsTable

logger = logging.getLogger(__name__)

JACOBI_MAX_SWEEPS = 100
ROTATION_MAX_ITER = 1000
ROTATION_TOL = 1e-10


# ============================================================================
# STANDARDIZATION AND CORRELATION
# ============================================================================

@dataclass
class Standardized:
    """Z-scores plus the column statistics needed to undo them"""
    z: np.ndarray
    columns: List[str]
    means: np.ndarray
    stds: np.ndarray

    def inverse(self, z: Optional[np.ndarray] = None) -> np.ndarray:
        z = self.z if z is None else z
        return z * self.stds + self.means


def standardize(data, columns: Optional[Sequence[str]] = None) -> Standardized:
    """
    Column-wise z-scores with sample (n-1) standard deviation.

    Args:
        data: MetricsTable, DataFrame or 2-D array
        columns: Columns to use (names for tables, defaults to all)

    Raises:
        DataError: fewer than 2 rows, missing values, or a zero-variance column (named)
    """
    if isinstance(data, MetricsTable):
        frame = data.require(columns) if columns else data.frame.select_dtypes("number")
        names, values = list(frame.columns), frame.to_numpy(dtype=np.float64)
    elif hasattr(data, "columns"):
        frame = data[list(columns)] if columns else data
        names, values = [str(c) for c in frame.columns], frame.to_numpy(dtype=np.float64)
    else:
        values = np.asarray(data, dtype=np.float64)
        names = list(columns) if columns else [f"x{i}" for i in range(values.shape[1])]

    if values.ndim != 2 or values.shape[0] < 2:
        raise DataError("standardize needs at least 2 rows")
    if not np.all(np.isfinite(values)):
        raise DataError("standardize: missing or non-finite values")

    means = values.mean(axis=0)
    stds = values.std(axis=0, ddof=1)
    for name, mean, std in zip(names, means, stds):
        if std <= 1e-12 * max(1.0, abs(mean)):
            raise DataError(f"column {name} has zero variance")
    return Standardized(z=(values - means) / stds, columns=names, means=means, stds=stds)


def correlation_matrix(z) -> np.ndarray:
    """Pearson correlation of standardized columns: zᵀz / (n-1) with a unit diagonal"""
    z = z.z if isinstance(z, Standardized) else np.asarray(z, dtype=np.float64)
    if z.shape[0] < 2:
        raise DataError("correlation needs at least 2 rows")
    r = z.T @ z / (z.shape[0] - 1)
    r = (r + r.T) / 2.0
    np.fill_diagonal(r, 1.0)
    return np.clip(r, -1.0, 1.0)


# ============================================================================
# EIGENDECOMPOSITION
# ============================================================================

def eigendecompose(R: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-pairs of a symmetric matrix by cyclic Jacobi rotations.

    Returns:
        (eigenvalues in descending order, eigenvectors as columns); each eigenvector is
        signed so its largest-magnitude entry is positive

    Raises:
        DataError: R is not square or not symmetric within 1e-10
    """
    a = np.array(R, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DataError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DataError("matrix has non-finite entries")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-10:
        raise DataError("matrix is not symmetric")
    a = (a + a.T) / 2.0
    n = a.shape[0]
    v = np.eye(n)

    scale = np.linalg.norm(a)
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(max(0.0, np.sum(a * a) - np.sum(np.diag(a) ** 2)))
        if off <= 1e-15 * scale or off == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning("Jacobi eigendecomposition stopped after %d sweeps", JACOBI_MAX_SWEEPS)

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values, v = values[order], v[:, order]
    for j in range(n):
        if v[np.argmax(np.abs(v[:, j])), j] < 0:
            v[:, j] = -v[:, j]
    return values, v


def retain_factors(eigenvalues: Sequence[float]) -> int:
    """Number of eigenvalues >= 1"""
    return int(sum(1 for value in eigenvalues if value >= 1.0))


def loadings(eigenvalues: np.ndarray, eigenvectors: np.ndarray, k: int) -> np.ndarray:
    """Principal-component loadings: column i is v_i · sqrt(λ_i)"""
    p = eigenvectors.shape[1]
    if not 1 <= k <= p:
        raise UsageError(f"k must be between 1 and {p}, got {k}")
    lam = np.clip(np.asarray(eigenvalues[:k], dtype=np.float64), 0.0, None)
    return eigenvectors[:, :k] * np.sqrt(lam)


# ============================================================================
# OBLIMAX ROTATION
# ============================================================================

def oblimax_criterion(L: np.ndarray) -> float:
    """ln(sum L^4) - 2 ln(sum L^2)"""
    return math.log(np.sum(L ** 4)) - 2.0 * math.log(np.sum(L ** 2))


def _criterion_and_gradient(L: np.ndarray) -> Tuple[float, np.ndarray]:
    s4 = np.sum(L ** 4)
    s2 = np.sum(L ** 2)
    q = math.log(s4) - 2.0 * math.log(s2)
    grad = 4.0 * L ** 3 / s4 - 4.0 * L / s2
    return q, grad


@dataclass
class RotationResult:
    """Rotated loadings and the orthogonal matrix that produced them"""
    loadings: np.ndarray
    rotation: np.ndarray
    history: List[float] = field(default_factory=list)
    converged: bool = True
    iterations: int = 0


def oblimax_rotate(L: np.ndarray, max_iter: int = ROTATION_MAX_ITER,
                   tol: float = ROTATION_TOL) -> RotationResult:
    """
    Orthogonal rotation maximizing the oblimax criterion.

    Gradient projection onto the orthogonal group with a backtracking step; a step is
    only accepted when the criterion does not decrease, so the history is monotone.
    Non-convergence returns the best iterate with converged=False and a warning.
    """
    A = np.asarray(L, dtype=np.float64)
    p, k = A.shape
    T = np.eye(k)
    if k < 2 or not np.any(A):
        q = oblimax_criterion(A) if np.any(A) else float("-inf")
        return RotationResult(loadings=A.copy(), rotation=T, history=[q])

    q, grad_L = _criterion_and_gradient(A)
    G = A.T @ grad_L
    history = [q]
    step = 1.0
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        M = T.T @ G
        projected = G - T @ ((M + M.T) / 2.0)
        norm = np.linalg.norm(projected)
        if norm < tol:
            converged = True
            break

        step *= 2.0
        accepted = False
        for _ in range(40):
            U, _, Vt = np.linalg.svd(T + step * projected)
            candidate = U @ Vt
            q_new, grad_new = _criterion_and_gradient(A @ candidate)
            if q_new >= q + 0.5 * norm ** 2 * step:
                accepted = True
                break
            step /= 2.0
        if not accepted:
            if q_new >= q:
                T, q, G = candidate, q_new, A.T @ grad_new
                history.append(q)
            # no ascent direction left at machine precision
            converged = norm < 1e-6
            break
        T, q, G = candidate, q_new, A.T @ grad_new
        history.append(q)

    if not converged:
        logger.warning("oblimax rotation did not converge after %d iterations", iterations)
    return RotationResult(loadings=A @ T, rotation=T, history=history,
                          converged=converged, iterations=iterations)


# ============================================================================
# FULL PIPELINE
# ============================================================================

@dataclass
class FactorModel:
    """Retained eigen-pairs with unrotated and rotated loadings"""
    columns: List[str]
    num_rows: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    retained_k: int
    loadings_unrotated: np.ndarray
    loadings_rotated: np.ndarray
    rotation: np.ndarray
    criterion_history: List[float] = field(default_factory=list)
    converged: bool = True

    def to_report(self) -> FactorReport:
        return FactorReport(
            columns=self.columns,
            num_rows=self.num_rows,
            eigenvalues=self.eigenvalues.tolist(),
            retained_k=self.retained_k,
            loadings_unrotated=self.loadings_unrotated.tolist(),
            loadings_rotated=self.loadings_rotated.tolist(),
            rotation=self.rotation.tolist(),
            criterion_history=list(self.criterion_history),
            converged=self.converged,
        )


def factor_analysis(table: MetricsTable, columns: Sequence[str]) -> FactorModel:
    """
    standardize → correlation_matrix → eigendecompose → retain_factors → loadings →
    oblimax_rotate

    At least one factor is always kept (a correlation matrix has a leading
    eigenvalue >= 1 in any case).
    """
    z = standardize(table, columns)
    R = correlation_matrix(z)
    values, vectors = eigendecompose(R)
    k = max(1, retain_factors(values))
    unrotated = loadings(values, vectors, k)
    rotated = oblimax_rotate(unrotated)
    logger.info("Factor analysis on %d rows x %d columns: k=%d", z.z.shape[0], len(z.columns), k)
    return FactorModel(
        columns=z.columns,
        num_rows=z.z.shape[0],
        eigenvalues=values,
        eigenvectors=vectors,
        retained_k=k,
        loadings_unrotated=unrotated,
        loadings_rotated=rotated.loadings,
        rotation=rotated.rotation,
        criterion_history=rotated.history,
        converged=rotated.converged,
    )
