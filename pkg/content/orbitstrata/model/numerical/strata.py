"""File housing numeric stratum classification, orbit space membership and region sampling
"""
# ======== standard imports ========
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence
import logging
# ==================================

# ======= third party imports ======
import numpy as np
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg import Scalar, Polynomial, PolyMatrix
from orbitstrata.model.invariants import MIB, PHatMatrix, gradient_gram_at
from orbitstrata.model.numerical.base import (
    Tolerances, FloatMatrix, PolyEvaluator, MatrixEvaluator, sym_eigen, rank_threshold)
# ==================================

logger = logging.getLogger(__name__)


@dataclass
class StratumSignature(StrataObject):
    ''' Rank and semi-definiteness of a symmetric matrix at a point '''
    rank: int
    psd: bool
    eigenvalues: list[float]
    tolerance: float

    attribute_doc_strings = {
        "rank": "Number of eigenvalues above the scaled tolerance",
        "psd": "True when no eigenvalue is below minus the scaled tolerance",
        "eigenvalues": "Ascending eigenvalues",
        "tolerance": "Relative tolerance used"
    }

    def validate_rank(self):
        self.check_bound('rank', self.rank, 0, len(self.eigenvalues))

    @classmethod
    def of(cls, matrix: FloatMatrix, tolerances: Tolerances | None = None) -> StratumSignature:
        tolerances = tolerances or Tolerances()
        eigenvalues = sym_eigen(matrix, tolerances.convergence, tolerances.max_sweeps)
        threshold = rank_threshold(eigenvalues, tolerances.eigen)
        return cls(
            rank=int(np.sum(eigenvalues > threshold)),
            psd=bool(eigenvalues.size == 0 or eigenvalues[0] > -threshold),
            eigenvalues=[float(v) for v in eigenvalues],
            tolerance=tolerances.eigen)


def minor_sums(M: PolyMatrix, up_to: int | None = None) -> list[Polynomial]:
    ''' M_i = sum of the order i principal minors, i = 1..q (or 1..up_to) '''
    if not M.is_square():
        raise PolyMatrix.NotSquare(M.shape)
    sums = []
    for order in range(1, (M.rows if up_to is None else up_to) + 1):
        total = Polynomial.zero(M.context, M.d)
        for minor in M.principal_minors(order):
            total = total + minor
        sums.append(total)
        logger.debug('M_%d: %d terms', order, len(total))
    return sums


@dataclass
class PointClassification(StrataObject):
    p: list[Scalar]
    signature: StratumSignature

    attribute_doc_strings = {
        "p": "Exact image p(x) of the point under the orbit map",
        "signature": "Rank and semi-definiteness of the gradient Gram matrix at x"
    }


def classify_point_x(x: Sequence[Scalar | int], mib: MIB, tolerances: Tolerances | None = None) -> PointClassification:
    if len(x) != len(mib.vars):
        raise StrataObject.SUIFixedLengthError('x', len(mib.vars), x)
    point = [Scalar.coerce(v, mib.d) for v in x]
    gram = FloatMatrix.from_exact(gradient_gram_at(mib, point), symmetric=True)
    return PointClassification(list(mib.evaluate(point)), StratumSignature.of(gram, tolerances))


@dataclass
class MembershipReport(StrataObject):
    member: bool
    rank: int
    relation_residuals: list[float] = field(default_factory=list)
    eigenvalues: list[float] = field(default_factory=list)

    attribute_doc_strings = {
        "member": "True when every relation vanishes and P-hat is positive semi-definite",
        "rank": "Rank of P-hat at the point",
        "relation_residuals": "F_A(p) for every relation",
        "eigenvalues": "Ascending eigenvalues of P-hat at the point"
    }


def orbit_space_membership(p_point: Sequence[float], phat: PHatMatrix, relations: Sequence[Polynomial] = (),
                           tolerances: Tolerances | None = None) -> MembershipReport:
    tolerances = tolerances or Tolerances()
    if len(p_point) != phat.q:
        raise StrataObject.SUIFixedLengthError('p_point', phat.q, p_point)
    point = np.array([float(v) for v in p_point], dtype=float)
    residuals = [float(PolyEvaluator(relation)(point)[0]) for relation in relations]
    values = MatrixEvaluator(phat.mat)(point)[0]
    signature = StratumSignature.of(FloatMatrix(values, symmetric=True), tolerances)
    member = signature.psd and all(abs(r) < tolerances.residual for r in residuals)
    return MembershipReport(member, signature.rank, residuals, signature.eigenvalues)


def sample_box(box: Sequence[tuple[float, float]], n: int, rng: np.random.Generator) -> np.ndarray:
    low = np.array([lo for lo, _ in box], dtype=float)
    high = np.array([hi for _, hi in box], dtype=float)
    return rng.uniform(low, high, size=(n, len(box)))


def region_mask(inequalities: Sequence[Polynomial], points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    ''' Points where every polynomial exceeds +tol '''
    mask = np.ones(points.shape[0], dtype=bool)
    for poly in inequalities:
        mask &= PolyEvaluator(poly)(points) > tol
    return mask


@dataclass
class RegionSample(StrataObject):
    points: np.ndarray
    tested: int
    empty: bool

    attribute_doc_strings = {
        "points": "Samples satisfying every strict inequality, in draw order",
        "tested": "Number of uniform draws",
        "empty": "Set when no draw fell inside the region"
    }


def sample_region(region, box: Sequence[tuple[float, float]], n: int, seed: int,
                  tol: float = 1e-9) -> RegionSample:
    ''' Seeded uniform draws in the box filtered by the region's strict inequalities '''
    StrataObject.check_bound('n', n, min_bound=1)
    if len(box) != region.dimension:
        raise StrataObject.SUIFixedLengthError('box', region.dimension, box)
    points = sample_box(box, n, np.random.default_rng(seed))
    kept = points[region_mask(region.strict_polys(), points, tol)]
    if not len(kept):
        logger.warning('No sample out of %d fell inside the region', n)
    return RegionSample(kept, n, not len(kept))


@dataclass
class StratumConditions(StrataObject):
    ''' Implicit description: relations vanish and M_i for i <= rank are positive '''
    equations: list[Polynomial]
    minor_sums: list[Polynomial]
    rank: int
    strict: bool = True

    attribute_doc_strings = {
        "equations": "Relations and active factors required to vanish",
        "minor_sums": "M_1..M_rank of P-hat",
        "rank": "Rank of P-hat on the stratum",
        "strict": "Compare M_i with > (True) or >= (False)"
    }

    def holds_at(self, p_point: Sequence[float], tolerances: Tolerances | None = None) -> bool:
        tolerances = tolerances or Tolerances()
        point = np.array([float(v) for v in p_point], dtype=float)
        if any(abs(PolyEvaluator(f)(point)[0]) >= tolerances.residual for f in self.equations):
            return False
        for m in self.minor_sums:
            value = PolyEvaluator(m)(point)[0]
            if (value <= tolerances.eigen) if self.strict else (value < -tolerances.eigen):
                return False
        return True


def stratum_conditions(phat: PHatMatrix, equations: Sequence[Polynomial], rank: int,
                       tolerances: Tolerances | None = None) -> StratumConditions:
    tolerances = tolerances or Tolerances()
    StrataObject.check_bound('rank', rank, 0, phat.q)
    sums = minor_sums(phat.mat, up_to=rank)
    return StratumConditions(list(equations), sums, rank, tolerances.strict_minors)
