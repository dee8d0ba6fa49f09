"""File housing exact dense linear algebra over Q(sqrt D)
"""
# ======== standard imports ========
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence
import logging
# ==================================

# ======= third party imports ======
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg.scalar import Scalar
# ==================================

logger = logging.getLogger(__name__)

ScalarVector = tuple[Scalar, ...]


class ScalarMatrix:
    ''' Immutable dense matrix of Scalars sharing one field '''
    __slots__ = ('_rows', '_d', '_key')

    class ShapeMismatch(StrataObject.StrataUserInputException):
        pass

    def __init__(self, rows: Sequence[Sequence[Scalar | int | Fraction]], d: int = 0) -> None:
        rows = tuple(tuple(Scalar.coerce(v, d) for v in row) for row in rows)
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise self.ShapeMismatch('rows', f'Ragged matrix with row lengths {sorted(widths)}.')
        self._rows = rows
        self._d = d
        self._key = None

    @classmethod
    def identity(cls, n: int, d: int = 0) -> ScalarMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], d)

    @classmethod
    def diagonal(cls, values: Sequence[Scalar | int | Fraction], d: int = 0) -> ScalarMatrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], d)

    @property
    def d(self) -> int:
        return self._d

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self._rows), len(self._rows[0]) if self._rows else 0)

    @property
    def rows(self) -> tuple[ScalarVector, ...]:
        return self._rows

    def __getitem__(self, index: tuple[int, int]) -> Scalar:
        i, j = index
        return self._rows[i][j]

    def column(self, j: int) -> ScalarVector:
        return tuple(row[j] for row in self._rows)

    def transpose(self) -> ScalarMatrix:
        n_rows, n_cols = self.shape
        return ScalarMatrix([[self._rows[i][j] for i in range(n_rows)] for j in range(n_cols)], self._d)

    def __matmul__(self, other: ScalarMatrix) -> ScalarMatrix:
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise self.ShapeMismatch('matmul', f'Cannot multiply {self.shape} by {other.shape}.')
        zero = Scalar.zero(self._d)
        cols = [other.column(j) for j in range(m)]
        result = []
        for row in self._rows:
            out = []
            for col in cols:
                total = zero
                for a, b in zip(row, col):
                    if a and b:
                        total = total + a * b
                out.append(total)
            result.append(out)
        return ScalarMatrix(result, self._d)

    def apply(self, vector: Sequence[Scalar]) -> ScalarVector:
        zero = Scalar.zero(self._d)
        out = []
        for row in self._rows:
            total = zero
            for a, b in zip(row, vector):
                if a and b:
                    total = total + a * b
            out.append(total)
        return tuple(out)

    def __sub__(self, other: ScalarMatrix) -> ScalarMatrix:
        return ScalarMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)], self._d)

    def is_identity(self) -> bool:
        return all(v == (1 if i == j else 0) for i, row in enumerate(self._rows) for j, v in enumerate(row))

    def sort_key(self) -> tuple:
        if self._key is None:
            self._key = tuple(v.sort_key() for row in self._rows for v in row)
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return self._d == other._d and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self.sort_key())

    def to_payload(self) -> list[list[list[str]]]:
        return [[v.to_payload() for v in row] for row in self._rows]

    def __repr__(self) -> str:
        body = '; '.join(' '.join(str(v) for v in row) for row in self._rows)
        return f"{self.__class__.__name__}([{body}])"


@dataclass
class LinearSolution(StrataObject):
    ''' Outcome of an exact linear solve; consistent=False stands for Inconsistent '''
    consistent: bool
    rank: int
    particular: Optional[tuple] = None
    nullspace: list = field(default_factory=list)
    pivots: tuple = ()

    attribute_doc_strings = {
        "consistent": "False when rank(A) < rank(A|b)",
        "rank": "Rank of the coefficient matrix",
        "particular": "Solution with every free variable set to zero",
        "nullspace": "Basis of the kernel of A, one vector per free column, reduced echelon convention",
        "pivots": "Pivot column of each echelon row"
    }


def _fraction_free_echelon(rows: list[list[Scalar]], n_cols: int, d: int) -> tuple[list[list[Scalar]], list[int]]:
    ''' Bareiss forward elimination; pivot = first non-zero entry in column order '''
    prev = Scalar.one(d)
    pivots = []
    r = 0
    for c in range(n_cols):
        if r >= len(rows):
            break
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pivot = rows[r][c]
        prev_inverse = prev.inverse()
        for i in range(r + 1, len(rows)):
            row = rows[i]
            factor = row[c]
            pivot_line = rows[r]
            if factor:
                rows[i] = [(pivot * row[j] - factor * pivot_line[j]) * prev_inverse for j in range(len(row))]
            elif pivot != prev:
                rows[i] = [v * pivot * prev_inverse if v else v for v in row]
        prev = pivot
        pivots.append(c)
        r += 1
    return rows, pivots


def solve_linear(A: Sequence[Sequence[Scalar]], b: Sequence[Scalar], d: int | None = None, n_cols: int | None = None) -> LinearSolution:
    ''' Exact solution of A x = b with a deterministic particular solution and kernel basis '''
    if d is None:
        sample = next((v for row in A for v in row if isinstance(v, Scalar)), None)
        if sample is None:
            sample = next((v for v in b if isinstance(v, Scalar)), None)
        d = sample.d if sample is not None else 0
    n_rows = len(A)
    if len(b) != n_rows:
        raise StrataObject.SUIFixedLengthError('b', n_rows, b)
    if n_cols is None:
        n_cols = len(A[0]) if n_rows else 0
    rows = [[Scalar.coerce(v, d) for v in row] + [Scalar.coerce(rhs, d)] for row, rhs in zip(A, b)]
    rows, pivots = _fraction_free_echelon(rows, n_cols, d)
    rank = len(pivots)
    for row in rows[rank:]:
        if row[n_cols]:
            logger.debug('Inconsistent system: rank %d, augmented rank %d', rank, rank + 1)
            return LinearSolution(consistent=False, rank=rank, pivots=tuple(pivots))
    # reduced echelon form
    reduced = [list(row) for row in rows[:rank]]
    for r in range(rank - 1, -1, -1):
        c = pivots[r]
        inverse = reduced[r][c].inverse()
        reduced[r] = [v * inverse if v else v for v in reduced[r]]
        for i in range(r):
            factor = reduced[i][c]
            if factor:
                reduced[i] = [v - factor * w for v, w in zip(reduced[i], reduced[r])]
    zero = Scalar.zero(d)
    particular = [zero] * n_cols
    for r, c in enumerate(pivots):
        particular[c] = reduced[r][n_cols]
    pivot_set = set(pivots)
    nullspace = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        vector = [zero] * n_cols
        vector[free] = Scalar.one(d)
        for r, c in enumerate(pivots):
            vector[c] = -reduced[r][free]
        nullspace.append(tuple(vector))
    return LinearSolution(
        consistent=True, rank=rank, particular=tuple(particular),
        nullspace=nullspace, pivots=tuple(pivots))


def nullspace(A: Sequence[Sequence[Scalar]], d: int | None = None) -> list[ScalarVector]:
    d = d if d is not None else (A[0][0].d if A and A[0] and isinstance(A[0][0], Scalar) else 0)
    return solve_linear(A, [Scalar.zero(d)] * len(A), d).nullspace
