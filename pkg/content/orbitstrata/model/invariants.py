"""Data models and operations on minimal integrity bases (MIBs)

Covers the gradient Gram matrix, the P-hat matrix obtained by expressing
that Gram matrix in the basis itself, Hilbert decomposition of invariants
and the degree-bounded search for relations among basis elements.
"""
# ======== standard imports ========
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence
import logging
import warnings
# ==================================

# ======= third party imports ======
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg import Scalar, Polynomial, PolyMatrix, Monomial, poly_divexact, solve_linear
# ==================================

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def weighted_monomials(weights: tuple[int, ...], degree: int) -> tuple[Monomial, ...]:
    ''' Exponent vectors e with sum(w*e) == degree, graded lex descending '''
    if degree < 0:
        return ()
    if not weights:
        return ((),) if degree == 0 else ()

    # bounded integer compositions, first weight outermost
    def compose(index: int, remaining: int) -> list[tuple[int, ...]]:
        if index == len(weights) - 1:
            return [(remaining // weights[index],)] if remaining % weights[index] == 0 else []
        out = []
        for k in range(remaining // weights[index], -1, -1):
            for rest in compose(index + 1, remaining - k * weights[index]):
                out.append((k,) + rest)
        return out

    found = compose(0, degree)
    return tuple(sorted(found, key=lambda e: (sum(e), e), reverse=True))


@dataclass
class MIBEntry(StrataObject):
    ''' One named basis element with its declared degree '''
    name: str
    degree: int
    poly: Polynomial

    attribute_doc_strings = {
        "name": "Identifier used for this element in p-variable expressions",
        "degree": "Declared homogeneous degree d_a",
        "poly": "The invariant polynomial in x-variables"
    }

    def validate_name(self):
        self.check_type('name', self.name, str)
        if not self.name.isidentifier():
            raise self.StrataUserInputException('name', f'{self.name!r} is not an identifier.')

    def validate_degree(self):
        self.check_type('degree', self.degree, int)
        self.check_bound('degree', self.degree, min_bound=1)

    def validate_poly(self):
        self.check_type('poly', self.poly, Polynomial)


@dataclass
class Decomposition(StrataObject):
    ''' A polynomial in basis variables plus the syzygy directions left free '''
    poly: Polynomial
    syzygies: list[Polynomial] = field(default_factory=list)

    attribute_doc_strings = {
        "poly": "Deterministic representative: every free coordinate set to zero",
        "syzygies": "Basis-variable polynomials that expand to zero; empty when unique"
    }

    @property
    def unique(self) -> bool:
        return not self.syzygies


@dataclass
class MIB(StrataObject):
    ''' An ordered minimal integrity basis over a shared variable context '''
    vars: tuple[str, ...]
    entries: list[MIBEntry]

    class NotHomogeneous(StrataObject.StrataUserInputException):
        def __init__(self, name: str, degree: int) -> None:
            super().__init__('mib', f'Entry {name} is not homogeneous of degree {degree}.')

    class NotInRing(StrataObject.StrataException):
        def __init__(self, degree: int, message: str = '') -> None:
            self.degree = degree
            super().__init__(f'Component of degree {degree} is not in the ring generated by the basis. {message}')

    attribute_doc_strings = {
        "vars": "Variable context shared by every basis polynomial",
        "entries": "Ordered basis elements p_1..p_q"
    }

    def __post_init__(self):
        self.vars = tuple(self.vars)
        self._expansions: dict[Monomial, Polynomial] = {}
        super().__post_init__()

    def validate_entries(self):
        self.check_iterable_typing('entries', self.entries, MIBEntry)
        names = [entry.name for entry in self.entries]
        if len(set(names)) != len(names):
            raise self.StrataUserInputException('entries', f'Duplicate basis names in {names}.')
        for name in names:
            if name in self.vars:
                raise self.StrataUserInputException('entries', f'Basis name {name} clashes with a variable.')
        for entry in self.entries:
            if entry.poly.context != self.vars:
                raise Polynomial.ContextMismatch(self.vars, entry.poly.context)
            if entry.poly.is_zero() or not entry.poly.is_homogeneous(entry.degree):
                raise self.NotHomogeneous(entry.name, entry.degree)
        if len({entry.poly.d for entry in self.entries}) > 1:
            raise self.StrataUserInputException('entries', 'Basis polynomials live in different fields.')

    @classmethod
    def from_polys(cls, vars: Sequence[str], names: Sequence[str], degrees: Sequence[int],
                   polys: Sequence[Polynomial]) -> MIB:
        return cls(tuple(vars), [MIBEntry(n, d, p) for n, d, p in zip(names, degrees, polys)])

    # ----- accessors -----
    @property
    def q(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(entry.name for entry in self.entries)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(entry.degree for entry in self.entries)

    @property
    def polys(self) -> list[Polynomial]:
        return [entry.poly for entry in self.entries]

    @property
    def d(self) -> int:
        return self.entries[0].poly.d if self.entries else 0

    @property
    def p_context(self) -> tuple[str, ...]:
        return self.names

    def p_variables(self) -> list[Polynomial]:
        return Polynomial.variables(self.p_context, self.d)

    # ----- expansion -----
    def expand_monomial(self, exponents: Monomial) -> Polynomial:
        ''' The product of basis polynomials p^e as an x-polynomial '''
        cached = self._expansions.get(exponents)
        if cached is not None:
            return cached
        index = next((i for i, k in enumerate(exponents) if k), None)
        if index is None:
            result = Polynomial.constant(1, self.vars, self.d)
        else:
            lowered = exponents[:index] + (exponents[index] - 1,) + exponents[index + 1:]
            result = self.expand_monomial(lowered) * self.entries[index].poly
        self._expansions[exponents] = result
        return result

    def compose(self, f: Polynomial) -> Polynomial:
        ''' f(p(x)) for f in basis variables '''
        if f.context != self.p_context:
            raise Polynomial.ContextMismatch(self.p_context, f.context)
        total = Polynomial.zero(self.vars, self.d)
        for exponents, coeff in f.terms.items():
            total = total + self.expand_monomial(exponents).scale(coeff)
        return total

    def evaluate(self, point) -> tuple[Scalar, ...]:
        ''' The orbit map p(x) at an exact point '''
        return tuple(entry.poly.evaluate(point) for entry in self.entries)


def _matching_system(targets: Sequence[Polynomial], target: Polynomial | None) -> tuple[list[list[Scalar]], list[Scalar]]:
    ''' Coefficient-matching rows, one per x-monomial, in graded lex order '''
    support = set()
    for poly in targets:
        support.update(poly.terms)
    if target is not None:
        support.update(target.terms)
    ordered = sorted(support, key=lambda e: (sum(e), e), reverse=True)
    columns = [poly.terms for poly in targets]
    d = targets[0].d if targets else (target.d if target is not None else 0)
    zero = Scalar.zero(d)
    A = [[column.get(e, zero) for column in columns] for e in ordered]
    b = [target.coefficient(e) if target is not None else zero for e in ordered]
    return A, b


def decompose_invariant(q_poly: Polynomial, mib: MIB) -> Decomposition:
    ''' Express q_poly as a polynomial in the basis, one homogeneous component at a time '''
    if q_poly.context != mib.vars:
        raise Polynomial.ContextMismatch(mib.vars, q_poly.context)
    weights = mib.degrees
    result = Polynomial.zero(mib.p_context, mib.d)
    syzygies: list[Polynomial] = []
    for degree, component in q_poly.homogeneous_components().items():
        monomials = weighted_monomials(weights, degree)
        if not monomials:
            raise MIB.NotInRing(degree, 'No basis monomial has this weighted degree.')
        expansions = [mib.expand_monomial(e) for e in monomials]
        A, b = _matching_system(expansions, component)
        solution = solve_linear(A, b, d=mib.d, n_cols=len(monomials))
        if not solution.consistent:
            raise MIB.NotInRing(degree)
        result = result + Polynomial(mib.p_context, dict(zip(monomials, solution.particular)), mib.d)
        for vector in solution.nullspace:
            syzygies.append(Polynomial(mib.p_context, dict(zip(monomials, vector)), mib.d))
        logger.debug('Decomposed degree %d over %d basis monomials, %d free directions',
                     degree, len(monomials), len(solution.nullspace))
    return Decomposition(result, syzygies)


def gradient_gram(mib: MIB) -> PolyMatrix:
    ''' Entry (a,b) is sum_j d_j p_a * d_j p_b '''
    gradients = [entry.poly.gradient() for entry in mib.entries]

    def entry(a: int, b: int) -> Polynomial:
        total = Polynomial.zero(mib.vars, mib.d)
        for ga, gb in zip(gradients[a], gradients[b]):
            if ga and gb:
                total = total + ga * gb
        return total

    return PolyMatrix.from_function(mib.q, mib.q, entry, symmetric=True, context=mib.vars, d=mib.d)


def gradient_gram_at(mib: MIB, point) -> list[list[Scalar]]:
    ''' The gradient Gram matrix evaluated exactly at one point '''
    gradients = [[g.evaluate(point) for g in entry.poly.gradient()] for entry in mib.entries]
    zero = Scalar.zero(mib.d)
    out = [[zero] * mib.q for _ in range(mib.q)]
    for a in range(mib.q):
        for b in range(a, mib.q):
            total = zero
            for x, y in zip(gradients[a], gradients[b]):
                if x and y:
                    total = total + x * y
            out[a][b] = out[b][a] = total
    return out


@dataclass
class PHatMatrix(StrataObject):
    ''' Gram matrix of basis gradients rewritten in the basis variables '''
    base: MIB
    mat: PolyMatrix
    nonunique: list[tuple[int, int]] = field(default_factory=list)

    class NotAnInvariantBasis(StrataObject.StrataUserInputException):
        def __init__(self, a: int, b: int, cause: Exception) -> None:
            super().__init__('mib', f'Gram entry ({a + 1},{b + 1}) is not expressible in the basis: {cause}')

    attribute_doc_strings = {
        "base": "The basis the matrix is built from",
        "mat": "Symmetric q x q matrix in basis variables",
        "nonunique": "Entries resolved by the deterministic representative of a non-unique decomposition"
    }

    def validate_mat(self):
        if self.mat.shape != (self.base.q, self.base.q) or not self.mat.symmetric:
            raise self.StrataUserInputException('mat', 'Expected a symmetric q x q matrix.')
        if self.mat.context != self.base.p_context:
            raise Polynomial.ContextMismatch(self.base.p_context, self.mat.context)

    @property
    def q(self) -> int:
        return self.base.q

    def __getitem__(self, index: tuple[int, int]) -> Polynomial:
        return self.mat[index]

    def grading_holds(self) -> bool:
        ''' Entry (a,b) has weighted degree d_a + d_b - 2 '''
        weights = self.base.degrees
        return all(
            self.mat[a, b].is_weighted_homogeneous(weights, weights[a] + weights[b] - 2)
            for a in range(self.q) for b in range(a, self.q))

    def euler_row_holds(self) -> bool:
        ''' First row equals 2 d_a p_a when p_1 is the squared norm '''
        p = self.base.p_variables()
        return all(self.mat[0, a] == p[a].scale(2 * self.base.degrees[a]) for a in range(self.q))

    def evaluate(self, p_point) -> list[list[Scalar]]:
        return self.mat.evaluate(p_point)

    def to_payload(self) -> dict:
        return {
            "names": list(self.base.names),
            "degrees": list(self.base.degrees),
            "matrix": self.mat.to_payload(),
            "nonunique": [list(pair) for pair in self.nonunique],
        }


def pmatrix(mib: MIB) -> PHatMatrix:
    gram = gradient_gram(mib)
    flagged: list[tuple[int, int]] = []

    def entry(a: int, b: int) -> Polynomial:
        try:
            decomposition = decompose_invariant(gram[a, b], mib)
        except MIB.NotInRing as error:
            raise PHatMatrix.NotAnInvariantBasis(a, b, error) from error
        if not decomposition.unique:
            warnings.warn(f'P-hat entry ({a + 1},{b + 1}) has a non-unique decomposition; '
                          'using the representative with free coordinates at zero.')
            flagged.append((a, b))
        logger.debug('P-hat entry (%d,%d): %d terms', a + 1, b + 1, len(decomposition.poly))
        return decomposition.poly

    mat = PolyMatrix.from_function(mib.q, mib.q, entry, symmetric=True, context=mib.p_context, d=mib.d)
    return PHatMatrix(mib, mat, flagged)


@dataclass
class Relation(StrataObject):
    ''' A polynomial in basis variables vanishing identically on p(x) '''
    poly: Polynomial
    weighted_degree: int

    attribute_doc_strings = {
        "poly": "Relation F_A(p), monic in its graded lex leading term",
        "weighted_degree": "Weighted degree with the basis degrees as weights"
    }

    def validate_poly(self):
        self.check_type('poly', self.poly, Polynomial)
        if self.poly.is_zero():
            raise self.StrataUserInputException('poly', 'The zero polynomial is not a relation.')

    def holds_on(self, mib: MIB) -> bool:
        return mib.compose(self.poly).is_zero()


def _rank(vectors: Sequence[Sequence[Scalar]], d: int, width: int) -> int:
    if not vectors:
        return 0
    columns = [[vector[i] for vector in vectors] for i in range(width)]
    return solve_linear(columns, [Scalar.zero(d)] * width, d=d, n_cols=len(vectors)).rank


def find_relations(mib: MIB, max_weighted_degree: int) -> list[Relation]:
    ''' Kernel of the expansion map, degree by degree, modulo multiples of earlier finds '''
    if mib.q == 0:
        return []
    StrataObject.check_bound('max_weighted_degree', max_weighted_degree, min_bound=2 * min(mib.degrees))
    weights = mib.degrees
    d = mib.d
    found: list[Relation] = []
    for degree in range(min(weights), max_weighted_degree + 1):
        monomials = weighted_monomials(weights, degree)
        if len(monomials) < 2:
            continue
        expansions = [mib.expand_monomial(e) for e in monomials]
        A, b = _matching_system(expansions, None)
        kernel = solve_linear(A, b, d=d, n_cols=len(monomials)).nullspace
        if not kernel:
            continue
        index = {e: i for i, e in enumerate(monomials)}
        zero = Scalar.zero(d)
        # multiples of earlier relations reaching this degree
        span: list[tuple[Scalar, ...]] = []
        for relation in found:
            for shift in weighted_monomials(weights, degree - relation.weighted_degree):
                vector = [zero] * len(monomials)
                for exps, coeff in relation.poly.terms.items():
                    vector[index[tuple(a + s for a, s in zip(exps, shift))]] = coeff
                span.append(tuple(vector))
        rank = _rank(span, d, len(monomials))
        for vector in kernel:
            new_rank = _rank(span + [vector], d, len(monomials))
            if new_rank == rank:
                continue
            span.append(vector)
            rank = new_rank
            poly = Polynomial(mib.p_context, dict(zip(monomials, vector)), d).monic()
            found.append(Relation(poly, degree))
            logger.info('Relation of weighted degree %d: %s', degree, poly)
        logger.debug('Weighted degree %d: kernel dimension %d', degree, len(kernel))
    return found


@dataclass
class FactorCheck(StrataObject):
    candidate: Polynomial
    divides: bool
    quotient: Optional[Polynomial] = None

    attribute_doc_strings = {
        "candidate": "Candidate factor of det P-hat",
        "divides": "True when the candidate divides the determinant exactly",
        "quotient": "The exact cofactor when it divides"
    }


@dataclass
class ActiveFactorReport(StrataObject):
    determinant: Polynomial
    checks: list[FactorCheck]

    attribute_doc_strings = {
        "determinant": "Exact det P-hat in basis variables",
        "checks": "One divisibility outcome per candidate"
    }

    @property
    def all_divide(self) -> bool:
        return all(check.divides and check.quotient is not None and not check.quotient.is_zero()
                   for check in self.checks)


def active_factor_check(phat: PHatMatrix, candidates: Sequence[Polynomial]) -> ActiveFactorReport:
    determinant = phat.mat.det()
    logger.info('det P-hat computed: %d terms', len(determinant))
    checks = []
    for candidate in candidates:
        if candidate.is_zero():
            raise Polynomial.ZeroDivisor()
        quotient = poly_divexact(determinant, candidate)
        checks.append(FactorCheck(candidate, quotient is not None, quotient))
    return ActiveFactorReport(determinant, checks)
