"""File housing the floating point layer: tolerances, float matrices and Jacobi eigensolving
"""
# ======== standard imports ========
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence
import logging
import math
# ==================================

# ======= third party imports ======
import numpy as np
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg import Scalar, Polynomial, PolyMatrix
# ==================================

logger = logging.getLogger(__name__)


@dataclass
class Tolerances(StrataObject):
    ''' Numeric thresholds shared by rank, membership and eigen computations '''
    eigen: float = 1e-9
    residual: float = 1e-9
    convergence: float = 1e-12
    max_sweeps: int = 100
    strict_minors: bool = True

    attribute_doc_strings = {
        "eigen": "Relative threshold: an eigenvalue above eigen*max(1, |lambda|max) counts toward rank",
        "residual": "Largest relation residual still counted as zero",
        "convergence": "Relative off-diagonal Frobenius norm at which Jacobi sweeps stop",
        "max_sweeps": "Sweep cap before NoConvergence is raised",
        "strict_minors": "Use M_i > 0 (True) or M_i >= 0 (False) in implicit stratum conditions"
    }

    example = {
        "eigen": 1e-9,
        "residual": 1e-9,
        "convergence": 1e-12,
        "max_sweeps": 100,
        "strict_minors": True
    }

    def validate_positive(self):
        for name in ('eigen', 'residual', 'convergence'):
            value = getattr(self, name)
            self.check_type(name, value, (int, float))
            if value <= 0:
                raise self.SUIBoundsError(name, 0, None, value)

    def validate_max_sweeps(self):
        self.check_type('max_sweeps', self.max_sweeps, int)
        self.check_bound('max_sweeps', self.max_sweeps, min_bound=1)

    def validate_strict_minors(self):
        self.check_type('strict_minors', self.strict_minors, bool)


@dataclass
class FloatMatrix(StrataObject):
    ''' Double precision image of an exact matrix '''
    values: np.ndarray
    symmetric: bool = False

    class NoConvergence(StrataObject.StrataCapException):
        pass

    attribute_doc_strings = {
        "values": "Finite entries, rows by columns",
        "symmetric": "Set when built by symmetrised evaluation"
    }

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float, ndmin=2) if np.size(self.values) else np.zeros((0, 0))
        super().__post_init__()

    def validate_values(self):
        if not np.all(np.isfinite(self.values)):
            raise self.StrataUserInputException('values', 'Entries must be finite.')
        if self.symmetric and not np.array_equal(self.values, self.values.T):
            raise self.StrataUserInputException('values', 'Symmetric flag set on a non-symmetric matrix.')

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @classmethod
    def from_exact(cls, rows: Sequence[Sequence[Scalar]], symmetric: bool = False) -> FloatMatrix:
        values = np.array([[float(v) for v in row] for row in rows], dtype=float)
        if symmetric:
            values = np.triu(values) + np.triu(values, 1).T
        return cls(values, symmetric)


def sym_eigen(S: FloatMatrix, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    ''' Cyclic Jacobi rotations; ascending eigenvalues '''
    if not S.symmetric:
        raise StrataObject.StrataUserInputException('S', 'Jacobi eigensolving needs a symmetric matrix.')
    a = S.values.copy()
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    scale = max(1.0, float(np.linalg.norm(a)))
    for sweep in range(max_sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < tol * scale:
            logger.debug('Jacobi converged after %d sweeps on a %dx%d matrix', sweep, n, n)
            return np.sort(np.diag(a))
        if sweep == max_sweeps:
            break
        for k in range(n - 1):
            for l in range(k + 1, n):
                if a[k, l] == 0.0:
                    continue
                diff = a[l, l] - a[k, k]
                if abs(a[k, l]) < abs(diff) * 1.0e-36:
                    t = a[k, l] / diff
                else:
                    phi = diff / (2.0 * a[k, l])
                    t = 1.0 / (abs(phi) + math.sqrt(phi * phi + 1.0))
                    if phi < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # a <- R^T a R, touching only rows and columns k, l
                col_k, col_l = a[:, k].copy(), a[:, l].copy()
                a[:, k] = c * col_k - s * col_l
                a[:, l] = s * col_k + c * col_l
                row_k, row_l = a[k, :].copy(), a[l, :].copy()
                a[k, :] = c * row_k - s * row_l
                a[l, :] = s * row_k + c * row_l
                a[k, l] = a[l, k] = 0.0
    raise FloatMatrix.NoConvergence(f'Jacobi did not converge within {max_sweeps} sweeps.')


def rank_threshold(values: np.ndarray, tol: float) -> float:
    largest = float(np.max(np.abs(values))) if values.size else 0.0
    return tol * max(1.0, largest)


def numeric_rank(values: np.ndarray, tol: float = 1e-9) -> int:
    ''' Rank of a rectangular float matrix by singular values '''
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0
    singular = np.linalg.svd(values, compute_uv=False)
    return int(np.sum(singular > rank_threshold(singular, tol)))


class PolyEvaluator:
    ''' Vectorised float evaluation of one Polynomial at many points '''

    def __init__(self, poly: Polynomial) -> None:
        terms = poly.sorted_terms()
        self.context = poly.context
        self.exponents = np.array([e for e, _ in terms], dtype=int).reshape(len(terms), len(poly.context))
        self.coefficients = np.array([float(c) for _, c in terms], dtype=float)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if not len(self.coefficients):
            return np.zeros(points.shape[0])
        powers = np.prod(points[:, None, :] ** self.exponents[None, :, :], axis=2)
        return powers @ self.coefficients


class MatrixEvaluator:
    ''' Float evaluation of a PolyMatrix at many points; shape (points, rows, cols) '''

    def __init__(self, matrix: PolyMatrix) -> None:
        self.shape = matrix.shape
        self.symmetric = matrix.symmetric
        self.entries = {
            (i, j): PolyEvaluator(matrix[i, j])
            for i in range(matrix.rows) for j in range(matrix.cols)
            if not self.symmetric or j >= i}

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros((points.shape[0],) + self.shape)
        for (i, j), evaluator in self.entries.items():
            out[:, i, j] = evaluator(points)
            if self.symmetric:
                out[:, j, i] = out[:, i, j]
        return out
