"""File housing sparse multivariate polynomials over Q(sqrt D)
"""
# ======== standard imports ========
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence
from operator import add
import heapq
import logging
# ==================================

# ======= third party imports ======
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg.scalar import Scalar
# ==================================

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]


def grlex_key(exponents: Monomial) -> tuple[int, Monomial]:
    ''' Sort key of the graded lexicographic order; larger key means larger monomial '''
    return (sum(exponents), exponents)


def _heap_key(exponents: Monomial) -> tuple[int, tuple[int, ...]]:
    return (-sum(exponents), tuple(-e for e in exponents))


class Polynomial:
    ''' Sparse polynomial in a named-variable context over Q(sqrt D).

        Terms map exponent tuples (one entry per context variable) to
        non-zero Scalars. The canonical term order is graded lex, descending,
        with the context order deciding between variables.
    '''
    __slots__ = ('_context', '_terms', '_d')

    class ContextMismatch(StrataObject.StrataException):
        def __init__(self, left: Sequence[str], right: Sequence[str]):
            super().__init__(f'Polynomial contexts differ: {tuple(left)} vs {tuple(right)}.')

    class UnknownVariable(StrataObject.StrataUserInputException):
        def __init__(self, name: str, context: Sequence[str]):
            super().__init__(name, f'Variable is not one of {tuple(context)}.')

    class IncompleteAssignment(StrataObject.StrataException):
        def __init__(self, missing: Iterable[str]):
            super().__init__(f'No substitution given for {sorted(missing)}.')

    class Indivisible(StrataObject.StrataException):
        pass

    class ZeroDivisor(StrataObject.StrataException, ZeroDivisionError):
        def __init__(self):
            super().__init__('Division by the zero polynomial.')

    def __init__(self, context: Sequence[str], terms: Mapping[Monomial, Scalar | int | Fraction] | None = None, d: int = 0) -> None:
        context = tuple(context)
        if len(set(context)) != len(context):
            raise StrataObject.StrataUserInputException('context', f'Duplicate variable names in {context}.')
        clean: dict[Monomial, Scalar] = {}
        for exponents, coeff in (terms or {}).items():
            exponents = tuple(exponents)
            if len(exponents) != len(context) or any((not isinstance(e, int)) or e < 0 for e in exponents):
                raise StrataObject.StrataUserInputException(
                    'terms', f'Exponent vector {exponents} does not fit context {context}.')
            coeff = Scalar.coerce(coeff, d)
            if coeff.is_zero():
                continue
            if exponents in clean:
                coeff = clean[exponents] + coeff
                if coeff.is_zero():
                    del clean[exponents]
                    continue
            clean[exponents] = coeff
        self._context = context
        self._terms = clean
        self._d = d

    @classmethod
    def _new(cls, context: tuple[str, ...], terms: dict[Monomial, Scalar], d: int) -> Polynomial:
        obj = object.__new__(cls)
        obj._context = context
        obj._terms = terms
        obj._d = d
        return obj

    # ----- constructors -----
    @classmethod
    def zero(cls, context: Sequence[str], d: int = 0) -> Polynomial:
        return cls(context, {}, d)

    @classmethod
    def constant(cls, value: Scalar | int | Fraction, context: Sequence[str], d: int = 0) -> Polynomial:
        context = tuple(context)
        return cls(context, {(0,) * len(context): value}, d)

    @classmethod
    def variable(cls, name: str, context: Sequence[str], d: int = 0) -> Polynomial:
        context = tuple(context)
        if name not in context:
            raise cls.UnknownVariable(name, context)
        exponents = tuple(int(v == name) for v in context)
        return cls(context, {exponents: 1}, d)

    @classmethod
    def variables(cls, context: Sequence[str], d: int = 0) -> list[Polynomial]:
        return [cls.variable(name, context, d) for name in context]

    # ----- accessors -----
    @property
    def context(self) -> tuple[str, ...]:
        return self._context

    @property
    def d(self) -> int:
        return self._d

    @property
    def terms(self) -> dict[Monomial, Scalar]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, exponents: Monomial) -> Scalar:
        return self._terms.get(tuple(exponents), Scalar.zero(self._d))

    def sorted_terms(self) -> list[tuple[Monomial, Scalar]]:
        return sorted(self._terms.items(), key=lambda item: grlex_key(item[0]), reverse=True)

    def leading_term(self) -> tuple[Monomial, Scalar]:
        if not self._terms:
            raise self.ZeroDivisor()
        exponents = max(self._terms, key=grlex_key)
        return exponents, self._terms[exponents]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def constant_value(self) -> Scalar:
        return self.coefficient((0,) * len(self._context))

    @property
    def total_degree(self) -> int:
        ''' Largest total degree; -1 for the zero polynomial '''
        return max((sum(e) for e in self._terms), default=-1)

    def weighted_degree(self, weights: Sequence[int]) -> int:
        return max((sum(w * e for w, e in zip(weights, exps)) for exps in self._terms), default=-1)

    def is_weighted_homogeneous(self, weights: Sequence[int], degree: int | None = None) -> bool:
        degrees = {sum(w * e for w, e in zip(weights, exps)) for exps in self._terms}
        if not degrees:
            return True
        if len(degrees) > 1:
            return False
        return degree is None or degrees == {degree}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        return self.is_weighted_homogeneous((1,) * len(self._context), degree)

    def homogeneous_components(self, weights: Sequence[int] | None = None) -> dict[int, Polynomial]:
        weights = (1,) * len(self._context) if weights is None else tuple(weights)
        grouped: dict[int, dict[Monomial, Scalar]] = {}
        for exps, coeff in self._terms.items():
            grouped.setdefault(sum(w * e for w, e in zip(weights, exps)), {})[exps] = coeff
        return {deg: Polynomial._new(self._context, grouped[deg], self._d) for deg in sorted(grouped)}

    # ----- arithmetic -----
    def _check(self, other: Polynomial) -> None:
        if other._context != self._context:
            raise self.ContextMismatch(self._context, other._context)
        if other._d != self._d:
            raise Scalar.MixedField(self._d, other._d)

    def _lift(self, other) -> Polynomial | None:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (Scalar, int, Fraction)) and not isinstance(other, bool):
            return Polynomial.constant(Scalar.coerce(other, self._d), self._context, self._d)
        return None

    def __add__(self, other) -> Polynomial:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for exps, coeff in other._terms.items():
            current = terms.get(exps)
            if current is None:
                terms[exps] = coeff
            else:
                total = current + coeff
                if total.is_zero():
                    del terms[exps]
                else:
                    terms[exps] = total
        return Polynomial._new(self._context, terms, self._d)

    def __radd__(self, other) -> Polynomial:
        return self + other

    def __neg__(self) -> Polynomial:
        return Polynomial._new(self._context, {e: -c for e, c in self._terms.items()}, self._d)

    def __sub__(self, other) -> Polynomial:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def scale(self, factor: Scalar | int | Fraction) -> Polynomial:
        factor = Scalar.coerce(factor, self._d)
        if factor.is_zero():
            return Polynomial.zero(self._context, self._d)
        return Polynomial._new(self._context, {e: c * factor for e, c in self._terms.items()}, self._d)

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, (Scalar, int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        terms: dict[Monomial, Scalar] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exps = tuple(map(add, e1, e2))
                product = c1 * c2
                current = terms.get(exps)
                terms[exps] = product if current is None else current + product
        return Polynomial._new(self._context, {e: c for e, c in terms.items() if not c.is_zero()}, self._d)

    def __rmul__(self, other) -> Polynomial:
        return self * other

    def __pow__(self, exponent: int) -> Polynomial:
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f'Polynomial powers need a non-negative integer, got {exponent!r}.')
        result = Polynomial.constant(1, self._context, self._d)
        base = self
        while exponent > 0:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def monic(self) -> Polynomial:
        ''' Scale so the graded-lex leading coefficient is one '''
        if self.is_zero():
            return self
        _, lead = self.leading_term()
        return self.scale(lead.inverse())

    # ----- calculus and composition -----
    def diff(self, var: str) -> Polynomial:
        if var not in self._context:
            raise self.UnknownVariable(var, self._context)
        i = self._context.index(var)
        terms = {}
        for exps, coeff in self._terms.items():
            k = exps[i]
            if k == 0:
                continue
            lowered = exps[:i] + (k - 1,) + exps[i + 1:]
            terms[lowered] = coeff * k
        return Polynomial._new(self._context, terms, self._d)

    def gradient(self) -> list[Polynomial]:
        return [self.diff(var) for var in self._context]

    def subst(self, assignment: Mapping[str, Polynomial], target_context: Sequence[str] | None = None) -> Polynomial:
        ''' Compose: replace every context variable by a polynomial of the target context '''
        missing = [v for v in self._context if v not in assignment]
        if missing:
            raise self.IncompleteAssignment(missing)
        images = [assignment[v] for v in self._context]
        if target_context is None:
            if not images:
                raise self.IncompleteAssignment(['<target context>'])
            target_context = images[0].context
        target_context = tuple(target_context)
        for image in images:
            if image.context != target_context:
                raise self.ContextMismatch(target_context, image.context)
            if image.d != self._d:
                raise Scalar.MixedField(self._d, image.d)
        powers: list[dict[int, Polynomial]] = [{} for _ in images]

        def power(i: int, k: int) -> Polynomial:
            cached = powers[i].get(k)
            if cached is None:
                cached = images[i] if k == 1 else power(i, k - 1) * images[i]
                powers[i][k] = cached
            return cached

        result = Polynomial.zero(target_context, self._d)
        for exps, coeff in self._terms.items():
            term = Polynomial.constant(coeff, target_context, self._d)
            for i, k in enumerate(exps):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def exquo(self, divisor: Polynomial) -> Polynomial:
        ''' Exact quotient by single-divisor reduction in graded lex order.

            A singleton is its own Groebner basis, so the remainder vanishes
            exactly when the divisor divides. Raises Indivisible otherwise.
        '''
        self._check(divisor)
        if divisor.is_zero():
            raise self.ZeroDivisor()
        if self.is_zero():
            return self
        lead_exps, lead_coeff = divisor.leading_term()
        lead_inverse = lead_coeff.inverse()
        divisor_terms = [(e, c) for e, c in divisor._terms.items() if e != lead_exps]
        remainder = dict(self._terms)
        heap = [_heap_key(e) for e in remainder]
        heapq.heapify(heap)
        quotient: dict[Monomial, Scalar] = {}
        while remainder:
            key = heapq.heappop(heap)
            exps = tuple(-e for e in key[1])
            coeff = remainder.pop(exps, None)
            if coeff is None:
                continue
            shift = tuple(a - b for a, b in zip(exps, lead_exps))
            if any(s < 0 for s in shift):
                raise self.Indivisible(
                    f'Leading monomial {exps} is not a multiple of {lead_exps}.')
            factor = coeff * lead_inverse
            quotient[shift] = factor
            for e, c in divisor_terms:
                target = tuple(map(add, shift, e))
                current = remainder.get(target)
                if current is None:
                    remainder[target] = -(factor * c)
                    heapq.heappush(heap, _heap_key(target))
                else:
                    updated = current - factor * c
                    if updated.is_zero():
                        del remainder[target]
                    else:
                        remainder[target] = updated
        return Polynomial._new(self._context, quotient, self._d)

    # ----- evaluation -----
    def evaluate(self, point: Mapping[str, Scalar | int | Fraction] | Sequence[Scalar | int | Fraction]) -> Scalar:
        if isinstance(point, Mapping):
            missing = [v for v in self._context if v not in point]
            if missing:
                raise self.IncompleteAssignment(missing)
            values = [Scalar.coerce(point[v], self._d) for v in self._context]
        else:
            if len(point) != len(self._context):
                raise StrataObject.SUIFixedLengthError('point', len(self._context), point)
            values = [Scalar.coerce(v, self._d) for v in point]
        powers: list[dict[int, Scalar]] = [{0: Scalar.one(self._d)} for _ in values]
        total = Scalar.zero(self._d)
        for exps, coeff in self._terms.items():
            term = coeff
            for i, k in enumerate(exps):
                if k:
                    cached = powers[i].get(k)
                    if cached is None:
                        cached = values[i] ** k
                        powers[i][k] = cached
                    term = term * cached
            total = total + term
        return total

    # ----- comparison and rendering -----
    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._context == other._context and self._d == other._d and self._terms == other._terms
        if isinstance(other, (Scalar, int, Fraction)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._context, self._d, frozenset(self._terms.items())))

    def to_payload(self) -> dict:
        from orbitstrata.model.tickets.notation import render_poly
        return {
            "text": render_poly(self),
            "terms": [[list(e), c.to_payload()] for e, c in self.sorted_terms()],
        }

    def __str__(self) -> str:
        from orbitstrata.model.tickets.notation import render_poly
        return render_poly(self)

    def __repr__(self) -> str:
        return f"Polynomial({self._context}, {str(self)!r}, d={self._d})"


def scalar_arith(op: str, x: Scalar, y: Scalar) -> Scalar:
    ''' Field arithmetic selected by name: add, sub, mul or div '''
    operations = {
        'add': lambda: x + y,
        'sub': lambda: x - y,
        'mul': lambda: x * y,
        'div': lambda: x / y,
    }
    StrataObject.check_choice_validity('op', op, operations)
    return operations[op]()


def poly_arith(op: str, f: Polynomial, g: Polynomial | Scalar) -> Polynomial:
    operations = {
        'add': lambda: f + g,
        'sub': lambda: f - g,
        'mul': lambda: f * g,
        'scale': lambda: f.scale(g),
    }
    StrataObject.check_choice_validity('op', op, operations)
    return operations[op]()


def poly_diff(f: Polynomial, var: str) -> Polynomial:
    return f.diff(var)


def poly_subst(f: Polynomial, assignment: Mapping[str, Polynomial], target_context: Sequence[str] | None = None) -> Polynomial:
    return f.subst(assignment, target_context)


def poly_divexact(f: Polynomial, g: Polynomial) -> Polynomial | None:
    ''' Exact quotient f / g, or None when g does not divide f '''
    try:
        return f.exquo(g)
    except Polynomial.Indivisible:
        return None
