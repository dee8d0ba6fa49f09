"""File housing matrices of polynomials and their determinants
"""
# ======== standard imports ========
from __future__ import annotations

from itertools import combinations
from typing import Callable, Mapping, Sequence
import logging
# ==================================

# ======= third party imports ======
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg.scalar import Scalar
from orbitstrata.model.exactalg.polynomial import Polynomial
# ==================================

logger = logging.getLogger(__name__)

COFACTOR_LIMIT = 4


class PolyMatrix:
    ''' Rectangular row-major matrix of Polynomials sharing one context.

        A symmetric matrix is checked entry by entry at construction.
    '''
    __slots__ = ('_rows', '_cols', '_entries', '_symmetric', '_context', '_d')

    class NotSquare(StrataObject.StrataUserInputException):
        def __init__(self, shape: tuple[int, int]):
            super().__init__('matrix', f'Expected a square matrix, got shape {shape}.')

    class ShapeMismatch(StrataObject.StrataUserInputException):
        pass

    class NotSymmetric(StrataObject.StrataUserInputException):
        pass

    def __init__(self, rows: int, cols: int, entries: Sequence[Polynomial], symmetric: bool = False,
                 context: Sequence[str] | None = None, d: int | None = None) -> None:
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise self.ShapeMismatch('entries', f'{len(entries)} entries do not fill a {rows}x{cols} matrix.')
        if entries:
            context = entries[0].context if context is None else tuple(context)
            d = entries[0].d if d is None else d
        elif context is None or d is None:
            raise self.ShapeMismatch('entries', 'An empty matrix needs an explicit context and field.')
        for index, entry in enumerate(entries):
            if entry.context != tuple(context):
                raise Polynomial.ContextMismatch(tuple(context), entry.context)
            if entry.d != d:
                raise Scalar.MixedField(d, entry.d)
        self._rows = rows
        self._cols = cols
        self._entries = entries
        self._context = tuple(context)
        self._d = d
        self._symmetric = False
        if symmetric:
            if rows != cols:
                raise self.NotSquare((rows, cols))
            for i in range(rows):
                for j in range(i + 1, cols):
                    if entries[i * cols + j] != entries[j * cols + i]:
                        raise self.NotSymmetric('entries', f'Entry ({i},{j}) differs from ({j},{i}).')
            self._symmetric = True

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Polynomial]], symmetric: bool = False,
                  context: Sequence[str] | None = None, d: int | None = None) -> PolyMatrix:
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else 0
        if any(len(row) != n_cols for row in rows):
            raise cls.ShapeMismatch('rows', 'Ragged rows.')
        return cls(n_rows, n_cols, [p for row in rows for p in row], symmetric, context, d)

    @classmethod
    def from_function(cls, rows: int, cols: int, entry: Callable[[int, int], Polynomial],
                      symmetric: bool = False, context: Sequence[str] | None = None,
                      d: int | None = None) -> PolyMatrix:
        cache: dict[tuple[int, int], Polynomial] = {}
        entries = []
        for i in range(rows):
            for j in range(cols):
                if symmetric and j < i:
                    entries.append(cache[(j, i)])
                else:
                    cache[(i, j)] = entry(i, j)
                    entries.append(cache[(i, j)])
        return cls(rows, cols, entries, symmetric, context, d)

    # ----- accessors -----
    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return (self._rows, self._cols)

    @property
    def symmetric(self) -> bool:
        return self._symmetric

    @property
    def context(self) -> tuple[str, ...]:
        return self._context

    @property
    def d(self) -> int:
        return self._d

    @property
    def entries(self) -> tuple[Polynomial, ...]:
        return self._entries

    def __getitem__(self, index: tuple[int, int]) -> Polynomial:
        i, j = index
        if not (0 <= i < self._rows and 0 <= j < self._cols):
            raise IndexError(index)
        return self._entries[i * self._cols + j]

    def row(self, i: int) -> tuple[Polynomial, ...]:
        return self._entries[i * self._cols:(i + 1) * self._cols]

    def to_rows(self) -> list[list[Polynomial]]:
        return [list(self.row(i)) for i in range(self._rows)]

    def is_square(self) -> bool:
        return self._rows == self._cols

    # ----- algebra -----
    def transpose(self) -> PolyMatrix:
        return PolyMatrix.from_function(self._cols, self._rows, lambda i, j: self[j, i],
                                        symmetric=self._symmetric, context=self._context, d=self._d)

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self._cols != other._rows:
            raise self.ShapeMismatch('matmul', f'Cannot multiply {self.shape} by {other.shape}.')

        def entry(i: int, j: int) -> Polynomial:
            total = Polynomial.zero(self._context, self._d)
            for k in range(self._cols):
                a, b = self[i, k], other[k, j]
                if a and b:
                    total = total + a * b
            return total

        return PolyMatrix.from_function(self._rows, other._cols, entry, context=self._context, d=self._d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self.shape, self._entries))

    def map(self, fn: Callable[[Polynomial], Polynomial], context: Sequence[str] | None = None) -> PolyMatrix:
        ''' Apply fn entrywise; symmetry is kept when the source is symmetric '''
        return PolyMatrix.from_function(self._rows, self._cols, lambda i, j: fn(self[i, j]),
                                        symmetric=self._symmetric, context=context, d=self._d)

    def substitute(self, assignment: Mapping[str, Polynomial], target_context: Sequence[str]) -> PolyMatrix:
        target_context = tuple(target_context)
        return self.map(lambda p: p.subst(assignment, target_context), context=target_context)

    def evaluate(self, point) -> list[list[Scalar]]:
        cache: dict[int, Scalar] = {}
        out = []
        for i in range(self._rows):
            row = []
            for j in range(self._cols):
                index = min(i, j) * self._cols + max(i, j) if self._symmetric else i * self._cols + j
                if index not in cache:
                    cache[index] = self._entries[index].evaluate(point)
                row.append(cache[index])
            out.append(row)
        return out

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> PolyMatrix:
        symmetric = self._symmetric and tuple(row_indices) == tuple(col_indices)
        return PolyMatrix.from_function(len(row_indices), len(col_indices),
                                        lambda i, j: self[row_indices[i], col_indices[j]],
                                        symmetric=symmetric, context=self._context, d=self._d)

    # ----- determinants and minors -----
    def det(self) -> Polynomial:
        return polymat_det(self)

    def leading_principal_minors(self) -> list[Polynomial]:
        if not self.is_square():
            raise self.NotSquare(self.shape)
        return [self.submatrix(range(k), range(k)).det() for k in range(1, self._rows + 1)]

    def principal_minors(self, order: int) -> list[Polynomial]:
        if not self.is_square():
            raise self.NotSquare(self.shape)
        return [self.submatrix(idx, idx).det() for idx in combinations(range(self._rows), order)]

    def minors(self, order: int) -> list[Polynomial]:
        ''' All order x order minors; rows and columns chosen in lexicographic order '''
        return [self.submatrix(r, c).det()
                for r in combinations(range(self._rows), order)
                for c in combinations(range(self._cols), order)]

    def to_payload(self) -> dict:
        return {
            "rows": self._rows,
            "cols": self._cols,
            "symmetric": self._symmetric,
            "context": list(self._context),
            "entries": [[p.to_payload() for p in self.row(i)] for i in range(self._rows)],
        }

    def __repr__(self) -> str:
        return f"PolyMatrix({self._rows}x{self._cols}, context={self._context})"


def cofactor_det(M: PolyMatrix) -> Polynomial:
    ''' Laplace expansion along the first row '''
    if not M.is_square():
        raise PolyMatrix.NotSquare(M.shape)
    rows = M.to_rows()

    def expand(rows: list[list[Polynomial]]) -> Polynomial:
        n = len(rows)
        if n == 0:
            return Polynomial.constant(1, M.context, M.d)
        if n == 1:
            return rows[0][0]
        if n == 2:
            return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
        total = Polynomial.zero(M.context, M.d)
        for j, pivot in enumerate(rows[0]):
            if pivot.is_zero():
                continue
            minor = [row[:j] + row[j + 1:] for row in rows[1:]]
            term = pivot * expand(minor)
            total = total - term if j % 2 else total + term
        return total

    return expand(rows)


def bareiss_det(M: PolyMatrix) -> Polynomial:
    ''' Fraction-free elimination; every division is exact '''
    if not M.is_square():
        raise PolyMatrix.NotSquare(M.shape)
    n = M.rows
    if n == 0:
        return Polynomial.constant(1, M.context, M.d)
    work = M.to_rows()
    sign = 1
    prev = Polynomial.constant(1, M.context, M.d)
    for k in range(n - 1):
        if work[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not work[i][k].is_zero()), None)
            if swap is None:
                return Polynomial.zero(M.context, M.d)
            work[k], work[swap] = work[swap], work[k]
            sign = -sign
        pivot = work[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                numerator = pivot * work[i][j] - work[i][k] * work[k][j]
                work[i][j] = numerator.exquo(prev) if k else numerator
            work[i][k] = Polynomial.zero(M.context, M.d)
        logger.debug('Bareiss step %d of %d: pivot with %d terms', k + 1, n - 1, len(pivot))
        prev = pivot
    det = work[n - 1][n - 1]
    return -det if sign < 0 else det


def polymat_det(M: PolyMatrix) -> Polynomial:
    if not M.is_square():
        raise PolyMatrix.NotSquare(M.shape)
    if M.rows <= COFACTOR_LIMIT:
        return cofactor_det(M)
    return bareiss_det(M)
