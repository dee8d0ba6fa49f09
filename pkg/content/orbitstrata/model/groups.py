"""Finite orthogonal matrix groups: closure, fixed spaces, stabilizers and induced actions
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
from orbitstrata.model.exactalg import Scalar, ScalarMatrix, nullspace
# ==================================

logger = logging.getLogger(__name__)

DEFAULT_CAP = 10_000


class OrthMatrix(ScalarMatrix):
    ''' Square matrix with M^T M = I exactly '''
    __slots__ = ()

    class NotOrthogonal(StrataObject.StrataUserInputException):
        pass

    def __init__(self, rows: Sequence[Sequence[Scalar | int | Fraction]], d: int = 0, check: bool = True) -> None:
        super().__init__(rows, d)
        n_rows, n_cols = self.shape
        if n_rows != n_cols:
            raise self.NotOrthogonal('matrix', f'Expected a square matrix, got shape {self.shape}.')
        if check and not (self.transpose() @ self).is_identity():
            raise self.NotOrthogonal('matrix', f'{self!r} does not satisfy M^T M = I.')

    @classmethod
    def of(cls, matrix: ScalarMatrix) -> OrthMatrix:
        ''' Wrap a product of orthogonal matrices without re-checking '''
        return cls(matrix.rows, matrix.d, check=False)

    @property
    def n(self) -> int:
        return self.shape[0]

    def inverse(self) -> OrthMatrix:
        return OrthMatrix.of(self.transpose())

    def compose(self, other: OrthMatrix) -> OrthMatrix:
        return OrthMatrix.of(self @ other)

    def conjugate(self, h: OrthMatrix) -> OrthMatrix:
        ''' g h g^-1 '''
        return OrthMatrix.of(self @ h @ self.transpose())


@dataclass
class FiniteGroup(StrataObject):
    ''' An explicit finite matrix group with deterministically ordered elements '''
    elements: list[OrthMatrix]
    generators: tuple[int, ...] = ()

    class CapExceeded(StrataObject.StrataCapException):
        def __init__(self, cap: int) -> None:
            super().__init__(f'Group closure exceeded {cap} elements; the group is infinite or too large. '
                             'Supply the derived data directly.')

    class NotASubgroup(StrataObject.StrataUserInputException):
        def __init__(self, name: str) -> None:
            super().__init__(name, 'Some element is not contained in the ambient group.')

    class NotStable(StrataObject.StrataException):
        pass

    attribute_doc_strings = {
        "elements": "Group elements; the identity comes first",
        "generators": "Indices into elements of the generating set"
    }

    def __post_init__(self):
        self.generators = tuple(self.generators)
        self._members = set(self.elements)
        super().__post_init__()

    def validate_elements(self):
        self.check_iterable_typing('elements', self.elements, OrthMatrix)
        if not self.elements:
            raise self.StrataUserInputException('elements', 'A group needs at least its identity.')
        if len({m.shape for m in self.elements}) != 1 or len({m.d for m in self.elements}) != 1:
            raise self.StrataUserInputException('elements', 'Elements differ in size or field.')
        if len(self._members) != len(self.elements):
            raise self.StrataUserInputException('elements', 'Duplicate elements.')
        if not any(m.is_identity() for m in self.elements):
            raise self.StrataUserInputException('elements', 'The identity is missing.')

    def validate_generators(self):
        for index in self.generators:
            self.check_bound('generators', index, 0, len(self.elements) - 1)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def n(self) -> int:
        return self.elements[0].n

    @property
    def d(self) -> int:
        return self.elements[0].d

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, matrix: OrthMatrix) -> bool:
        return matrix in self._members

    def generating_set(self) -> list[OrthMatrix]:
        if self.generators:
            return [self.elements[i] for i in self.generators]
        return list(self.elements)

    def is_subset_of(self, other: FiniteGroup) -> bool:
        return all(m in other for m in self.elements)

    def same_elements(self, other: FiniteGroup) -> bool:
        return self._members == other._members

    def verify_closure(self) -> bool:
        ''' Exhaustive check of identity, products and inverses '''
        return (
            any(m.is_identity() for m in self.elements)
            and all(a.compose(b) in self for a in self.elements for b in self.elements)
            and all(a.inverse() in self for a in self.elements))

    def to_payload(self) -> dict:
        return {
            "order": self.order,
            "generators": list(self.generators),
            "elements": [m.to_payload() for m in self.elements],
        }


def close_group(generators: Sequence[OrthMatrix], cap: int = DEFAULT_CAP) -> FiniteGroup:
    ''' Breadth-first closure; each layer is ordered by entries '''
    StrataObject.check_iterable_typing('generators', generators, OrthMatrix)
    if not generators:
        raise StrataObject.StrataUserInputException('generators', 'At least one generator is required.')
    if len({g.shape for g in generators}) != 1 or len({g.d for g in generators}) != 1:
        raise StrataObject.StrataUserInputException('generators', 'Generators differ in size or field.')
    identity = OrthMatrix.of(ScalarMatrix.identity(generators[0].n, generators[0].d))
    elements = [identity]
    seen = {identity}
    layer = [identity]
    while layer:
        fresh = set()
        for element in layer:
            for generator in generators:
                product = element.compose(generator)
                if product not in seen and product not in fresh:
                    fresh.add(product)
        if len(seen) + len(fresh) > cap:
            raise FiniteGroup.CapExceeded(cap)
        layer = sorted(fresh, key=lambda m: m.sort_key())
        elements.extend(layer)
        seen.update(layer)
    indices = tuple(elements.index(g) for g in dict.fromkeys(generators))
    logger.debug('Closed %d generators into a group of order %d', len(generators), len(elements))
    return FiniteGroup(elements, indices)


@dataclass
class SubspaceBasis(StrataObject):
    ''' Orthonormal basis of a linear subspace V of R^n, with coordinate labels '''
    n: int
    vectors: list[tuple[Scalar, ...]]
    labels: tuple[str, ...]
    d: int = 0

    class NonRationalBasis(StrataObject.StrataUserInputException):
        def __init__(self) -> None:
            super().__init__('subspace', 'Orthonormalisation leaves the coefficient field and the fixed space '
                             'is not coordinate-aligned.')

    attribute_doc_strings = {
        "n": "Dimension of the ambient space",
        "vectors": "Orthonormal basis vectors of V",
        "labels": "Names of the v-coordinates, one per basis vector",
        "d": "The field Q(sqrt d) of the entries"
    }

    def __post_init__(self):
        self.vectors = [tuple(Scalar.coerce(v, self.d) for v in vector) for vector in self.vectors]
        self.labels = tuple(self.labels)
        super().__post_init__()

    def validate_shape(self):
        for vector in self.vectors:
            if len(vector) != self.n:
                raise self.SUIFixedLengthError('vectors', self.n, vector)
        if len(self.labels) != len(self.vectors):
            raise self.SUIFixedLengthError('labels', len(self.vectors), self.labels)

    def validate_orthonormal(self):
        for i, u in enumerate(self.vectors):
            for j, w in enumerate(self.vectors[i:], start=i):
                if _dot(u, w) != (1 if i == j else 0):
                    raise self.StrataUserInputException('vectors', f'Basis vectors {i} and {j} are not orthonormal.')

    @property
    def nu(self) -> int:
        return len(self.vectors)

    @classmethod
    def coordinate(cls, n: int, keep: Sequence[int], x_vars: Sequence[str], d: int = 0) -> SubspaceBasis:
        vectors = [tuple(1 if i == k else 0 for i in range(n)) for k in keep]
        return cls(n, vectors, tuple(x_vars[k] for k in keep), d)

    def coordinate_indices(self) -> Optional[list[int]]:
        ''' Ambient coordinates spanned, when every vector is a unit axis '''
        indices = []
        for vector in self.vectors:
            support = [i for i, v in enumerate(vector) if v]
            if len(support) != 1 or vector[support[0]] != 1:
                return None
            indices.append(support[0])
        return indices

    def coordinates_of(self, x: Sequence[Scalar]) -> tuple[Scalar, ...]:
        return tuple(_dot(b, x) for b in self.vectors)

    def embed(self, v: Sequence[Scalar]) -> tuple[Scalar, ...]:
        ''' x = B v '''
        zero = Scalar.zero(self.d)
        out = [zero] * self.n
        for coeff, vector in zip(v, self.vectors):
            coeff = Scalar.coerce(coeff, self.d)
            if coeff:
                out = [o + coeff * b for o, b in zip(out, vector)]
        return tuple(out)

    def contains(self, x: Sequence[Scalar]) -> bool:
        return tuple(self.embed(self.coordinates_of(x))) == tuple(Scalar.coerce(v, self.d) for v in x)


def _dot(u: Sequence[Scalar], w: Sequence[Scalar]) -> Scalar:
    total = None
    for a, b in zip(u, w):
        term = a * b
        total = term if total is None else total + term
    return total if total is not None else Scalar.zero(0)


def _orthonormalize(vectors: list[tuple[Scalar, ...]], d: int) -> list[tuple[Scalar, ...]]:
    out: list[tuple[Scalar, ...]] = []
    for vector in vectors:
        w = list(vector)
        for u in out:
            projection = _dot(w, u)
            if projection:
                w = [a - projection * b for a, b in zip(w, u)]
        root = _dot(w, w).sqrt()
        if root is None:
            raise SubspaceBasis.NonRationalBasis()
        inverse = root.inverse()
        out.append(tuple(a * inverse for a in w))
    return out


def fix_subspace(H: FiniteGroup, x_vars: Sequence[str] | None = None) -> SubspaceBasis:
    ''' V = {x | h x = x for every h in H} '''
    n, d = H.n, H.d
    x_vars = tuple(x_vars) if x_vars is not None else tuple(f'x{i + 1}' for i in range(n))
    identity = ScalarMatrix.identity(n, d)
    stacked = []
    for h in H.generating_set():
        stacked.extend((h - identity).rows)
    basis = nullspace(stacked, d) if stacked else [tuple(identity.rows[i]) for i in range(n)]
    aligned = []
    for vector in basis:
        support = [i for i, v in enumerate(vector) if v]
        if len(support) == 1 and vector[support[0]] == 1:
            aligned.append(support[0])
    if len(aligned) == len(basis):
        logger.debug('Fixed space is coordinate-aligned: %s', [x_vars[i] for i in aligned])
        return SubspaceBasis.coordinate(n, aligned, x_vars, d)
    vectors = _orthonormalize(basis, d)
    return SubspaceBasis(n, vectors, tuple(f'v{i + 1}' for i in range(len(vectors))), d)


def isotropy_at(G: FiniteGroup, x: Sequence[Scalar | int | Fraction]) -> FiniteGroup:
    if len(x) != G.n:
        raise StrataObject.SUIFixedLengthError('x', G.n, x)
    point = tuple(Scalar.coerce(v, G.d) for v in x)
    kept = [g for g in G if g.apply(point) == point]
    return FiniteGroup(kept, tuple(range(len(kept))))


def stabilizer(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    ''' {g in G | g H g^-1 = H} '''
    if not H.is_subset_of(G):
        raise FiniteGroup.NotASubgroup('H')
    kept = [g for g in G if all(g.conjugate(h) in H for h in H)]
    return FiniteGroup(kept, tuple(range(len(kept))))


def restrict_to_subspace(s: OrthMatrix, V: SubspaceBasis) -> OrthMatrix:
    ''' Matrix of s on V in the basis of V '''
    images = [s.apply(b) for b in V.vectors]
    for image in images:
        if not V.contains(image):
            raise FiniteGroup.NotStable(f'{s!r} maps the subspace outside itself.')
    # column j holds the coordinates of s b_j
    columns = [V.coordinates_of(image) for image in images]
    rows = [[columns[j][i] for j in range(V.nu)] for i in range(V.nu)]
    return OrthMatrix(rows, V.d)


def induced_action(stab: FiniteGroup, H: FiniteGroup, V: SubspaceBasis) -> FiniteGroup:
    ''' The action of stab on V in the basis of V; represents Stab(H,G)/H '''
    if not H.is_subset_of(stab):
        raise FiniteGroup.NotASubgroup('H')
    restricted: dict[OrthMatrix, None] = {}
    for s in stab:
        restricted.setdefault(restrict_to_subspace(s, V), None)
    elements = sorted(restricted, key=lambda m: (not m.is_identity(), m.sort_key()))
    return FiniteGroup(elements, tuple(range(len(elements))))


def _check_subgroups(G: FiniteGroup, **groups: FiniteGroup) -> None:
    for name, group in groups.items():
        if not group.is_subset_of(G):
            raise FiniteGroup.NotASubgroup(name)


def orbit_type_leq(H: FiniteGroup, K: FiniteGroup, G: FiniteGroup) -> bool:
    ''' True iff g H g^-1 is contained in K for some g in G '''
    _check_subgroups(G, H=H, K=K)
    if H.order > K.order:
        return False
    return any(all(g.conjugate(h) in K for h in H) for g in G)


def orbit_type_lt(H: FiniteGroup, K: FiniteGroup, G: FiniteGroup) -> bool:
    ''' Strict version: H is conjugate to a proper subgroup of K '''
    return orbit_type_leq(H, K, G) and H.order < K.order
