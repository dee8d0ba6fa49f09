"""Rational parametrization of a singular stratum through its fixed-point subspace

The pipeline restricts the basis to V = Fix(H), expresses the restrictions
through a basis of the induced group on V (p|_V = phi o lambda), builds
Lambda-hat and the Jacobian J of phi, and checks P-hat(phi) = J^T Lambda-hat J
exactly before describing the parameter region Delta.
"""
# ======== standard imports ========
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence
import logging
import os
import warnings
# ==================================

# ======= third party imports ======
import numpy as np
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg import Scalar, Polynomial, PolyMatrix
from orbitstrata.model.invariants import (
    MIB, PHatMatrix, Relation, decompose_invariant, find_relations, gradient_gram_at, pmatrix)
from orbitstrata.model.groups import (
    FiniteGroup, OrthMatrix, SubspaceBasis, close_group, fix_subspace, induced_action, stabilizer)
from orbitstrata.model.numerical.base import FloatMatrix, MatrixEvaluator, PolyEvaluator, Tolerances
from orbitstrata.model.numerical.strata import StratumSignature, region_mask, sample_box
# ==================================

logger = logging.getLogger(__name__)

PROBE_CHUNK = 2048
THREADS_ENV = 'ORBITSTRATA_THREADS'


def probe_threads() -> int:
    ''' Worker count for sampling probes, capped by ORBITSTRATA_THREADS '''
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except ValueError:
        raise StrataObject.SUITypeError(THREADS_ENV, int, value)
    StrataObject.check_bound(THREADS_ENV, threads, min_bound=1)
    return threads


class Stage(Enum):
    RESTRICT = "restrict_mib"
    PHI = "compute_phi"
    LAMBDA_HAT = "lambda_pmatrix"
    JACOBIAN = "jacobian"
    FACTORIZATION = "verify_factorization"
    RELATIONS = "verify_relations_on_phi"
    DELTA = "delta_region"
    INDUCED = "induced_action"


@dataclass
class SubspaceSpec(StrataObject):
    ''' V given by zero coordinates, by generators of H, or by an explicit basis '''
    zero_coords: Optional[list[int]] = None
    generators: Optional[list[OrthMatrix]] = None
    basis: Optional[SubspaceBasis] = None

    attribute_doc_strings = {
        "zero_coords": "1-based coordinates vanishing on V, e.g. [3, 4, 6]",
        "generators": "Generators of the isotropy subgroup H; V = Fix(H)",
        "basis": "Explicit orthonormal basis of V"
    }

    def validate_one_form(self):
        given = [form is not None for form in (self.zero_coords, self.generators, self.basis)]
        if sum(given) != 1:
            raise self.StrataUserInputException('subspace', 'Give exactly one of zero_coords, generators or basis.')
        if self.zero_coords is not None:
            self.check_iterable_typing('zero_coords', self.zero_coords, int)
            if len(set(self.zero_coords)) != len(self.zero_coords):
                raise self.StrataUserInputException('zero_coords', 'Repeated coordinate.')
        if self.generators is not None:
            self.check_iterable_typing('generators', self.generators, OrthMatrix)

    def group(self, cap: int = 10_000) -> Optional[FiniteGroup]:
        return close_group(self.generators, cap) if self.generators is not None else None

    def resolve(self, x_vars: Sequence[str], d: int = 0) -> SubspaceBasis:
        n = len(x_vars)
        if self.basis is not None:
            if self.basis.n != n:
                raise self.SUIFixedLengthError('basis', n, self.basis.vectors[0] if self.basis.vectors else ())
            return self.basis
        if self.zero_coords is not None:
            for k in self.zero_coords:
                self.check_bound('zero_coords', k, 1, n)
            keep = [i for i in range(n) if i + 1 not in self.zero_coords]
            return SubspaceBasis.coordinate(n, keep, x_vars, d)
        return fix_subspace(self.group(), x_vars)


@dataclass
class RegionDescription(StrataObject):
    ''' Delta: Lambda-hat positive definite and rank J = l '''
    strict_inequalities: list[Polynomial]
    jacobian_minors: list[Polynomial]
    dimension: int

    attribute_doc_strings = {
        "strict_inequalities": "Leading principal minors of Lambda-hat, each required > 0",
        "jacobian_minors": "All l x l minors of J, required not all zero at the point",
        "dimension": "Number l of lambda parameters"
    }

    def validate_sizes(self):
        self.check_bound('strict_inequalities', len(self.strict_inequalities), self.dimension, self.dimension)

    def strict_polys(self) -> list[Polynomial]:
        return list(self.strict_inequalities)

    def rank_everywhere(self) -> bool:
        ''' Some l x l minor is a non-zero constant, so rank J = l on all of R^l '''
        return any(m.is_constant() and not m.is_zero() for m in self.jacobian_minors)

    def to_payload(self) -> dict:
        return {
            "dimension": self.dimension,
            "strict_inequalities": [{"poly": p.to_payload(), "relation": "> 0"} for p in self.strict_inequalities],
            "rank_condition": {
                "minors": [m.to_payload() for m in self.jacobian_minors],
                "requirement": "not all zero",
                "holds_everywhere": self.rank_everywhere(),
            },
        }


@dataclass
class FactorizationReport(StrataObject):
    holds: bool
    mismatched: list[tuple[int, int]] = field(default_factory=list)

    attribute_doc_strings = {
        "holds": "P-hat(phi) equals J^T Lambda-hat J in every entry",
        "mismatched": "Entries (a, b), 0-based, where the two sides differ"
    }


@dataclass
class RelationsReport(StrataObject):
    all_vanish: bool
    residuals: list[Polynomial] = field(default_factory=list)

    attribute_doc_strings = {
        "all_vanish": "Every relation composed with phi is the zero polynomial",
        "residuals": "F_A(phi(lambda)) for every relation, in input order"
    }


@dataclass
class ConnectivityReport(StrataObject):
    tested: int
    in_region: int
    min_rank: int
    rank_deficient_points: list[list[float]] = field(default_factory=list)
    exact: bool = False

    class EmptySample(StrataObject.StrataUserInputException):
        def __init__(self, tested: int) -> None:
            super().__init__('box', f'None of {tested} samples satisfied the region inequalities.')

    attribute_doc_strings = {
        "tested": "Number of uniform draws",
        "in_region": "Draws satisfying every strict inequality",
        "min_rank": "Smallest numeric rank of J among in-region draws",
        "rank_deficient_points": "In-region draws where rank J < l, sorted",
        "exact": "Rank l holds everywhere because some minor of J is a non-zero constant"
    }


@dataclass
class ConventionReport(StrataObject):
    holds: bool
    mismatched: list[int] = field(default_factory=list)
    sign_flips: list[str] = field(default_factory=list)

    attribute_doc_strings = {
        "holds": "Computed phi equals the reference after the sign flips",
        "mismatched": "0-based indices of phi components that differ",
        "sign_flips": "Lambda variables substituted by their negatives"
    }


@dataclass
class RankCoherenceReport(StrataObject):
    tested: int
    in_region: int
    mismatches: int

    attribute_doc_strings = {
        "tested": "Exact rational points of V drawn",
        "in_region": "Points whose lambda image lies in Delta with rank J = l",
        "mismatches": "In-region points where the gradient Gram rank differs from l"
    }


@dataclass
class Parametrization(StrataObject):
    ''' Everything produced for one stratum '''
    V: SubspaceBasis
    lambda_mib: MIB
    phi: list[Polynomial]
    lambda_hat: PolyMatrix
    jac: PolyMatrix
    delta: RegionDescription
    coregular_K: bool
    factorization: FactorizationReport
    relations_check: RelationsReport
    lambda_relations: list[Relation] = field(default_factory=list)
    relation_bound: int = 0
    induced_order: Optional[int] = None
    diagnostics: list[str] = field(default_factory=list)
    annotations: list[str] = field(default_factory=list)

    class LambdaNotGenerating(StrataObject.StrataUserInputException):
        def __init__(self, name: str, cause: Exception) -> None:
            self.name = name
            super().__init__('lambda_mib', f'The restriction of {name} is not generated by the lambda basis: {cause}')

    class StageError(StrataObject.StrataException):
        def __init__(self, stage: Stage, cause: Exception) -> None:
            self.stage = stage
            self.cause = cause
            self.exit_code = getattr(cause, 'exit_code', 2)
            super().__init__(f'[{stage.value}] {cause}')

    class FactorizationMismatch(StrataObject.StrataVerificationFailure):
        def __init__(self, report: FactorizationReport) -> None:
            self.report = report
            super().__init__(f'P-hat(phi) differs from J^T Lambda-hat J at entries {report.mismatched}.')

    attribute_doc_strings = {
        "V": "Fixed-point subspace with its v-coordinates",
        "lambda_mib": "Basis of the invariants of the induced group on V",
        "phi": "q polynomials in lambda with p|_V = phi o lambda",
        "lambda_hat": "Symmetric l x l P-hat matrix of the lambda basis",
        "jac": "l x q Jacobian, J[alpha, a] = d phi_a / d lambda_alpha",
        "delta": "Parameter region description",
        "coregular_K": "No relation among the lambdas up to relation_bound",
        "factorization": "Outcome of the P-hat(phi) = J^T Lambda-hat J check",
        "relations_check": "Outcome of composing relations and active factors with phi",
        "lambda_relations": "Relations found among the lambdas",
        "relation_bound": "Weighted degree bound of the lambda relation search",
        "induced_order": "Order of the induced group on V when H and G are finite",
        "diagnostics": "Warnings and downgrades collected along the pipeline",
        "annotations": "Claims carried from the problem file, not checked"
    }

    @property
    def l(self) -> int:
        return self.lambda_mib.q

    @property
    def q(self) -> int:
        return len(self.phi)

    def boundary_image(self, lambda_point: Sequence[Scalar | int | Fraction]) -> tuple[Scalar, ...]:
        ''' phi at a lambda value, typically on the border of Delta '''
        return tuple(f.evaluate(lambda_point) for f in self.phi)

    def to_payload(self) -> dict:
        payload = super().to_payload()
        payload["V"] = {"nu": self.V.nu, "labels": list(self.V.labels),
                        "coordinate_aligned": self.V.coordinate_indices() is not None}
        payload["lambda_mib"] = [{"name": e.name, "degree": e.degree, "poly": e.poly.to_payload()}
                                 for e in self.lambda_mib.entries]
        payload["globality"] = "global" if self.coregular_K else "local (induced group not coregular)"
        payload["annotations"] = [{"claim": a, "checked": False} for a in self.annotations]
        return payload


# ----- stages -----
def restrict_mib(mib: MIB, V: SubspaceBasis | SubspaceSpec) -> list[Polynomial]:
    ''' Each p_a composed with the inclusion of V into R^n '''
    if isinstance(V, SubspaceSpec):
        V = V.resolve(mib.vars, mib.d)
    if V.d != mib.d:
        raise Scalar.MixedField(mib.d, V.d)
    target = V.labels
    aligned = V.coordinate_indices()
    v_vars = Polynomial.variables(target, mib.d)
    zero = Polynomial.zero(target, mib.d)
    if aligned is not None:
        assignment = {x: zero for x in mib.vars}
        for label, index in zip(v_vars, aligned):
            assignment[mib.vars[index]] = label
    else:
        assignment = {}
        for i, x in enumerate(mib.vars):
            image = zero
            for vector, v in zip(V.vectors, v_vars):
                if vector[i]:
                    image = image + v.scale(vector[i])
            assignment[x] = image
    return [p.subst(assignment, target) for p in mib.polys]


def compute_phi(p_restricted: Sequence[Polynomial], lambda_mib: MIB, names: Sequence[str] | None = None,
                diagnostics: list[str] | None = None) -> list[Polynomial]:
    ''' Decompose each restricted p_a over the lambda basis '''
    names = list(names) if names is not None else [f'p{a + 1}' for a in range(len(p_restricted))]
    phi = []
    for name, restricted in zip(names, p_restricted):
        try:
            decomposition = decompose_invariant(restricted, lambda_mib)
        except MIB.NotInRing as error:
            raise Parametrization.LambdaNotGenerating(name, error) from error
        if not decomposition.unique:
            message = (f'{name}: decomposition over the lambda basis is not unique; '
                       'the parametrization is not global')
            warnings.warn(message)
            if diagnostics is not None:
                diagnostics.append(message)
        phi.append(decomposition.poly)
    return phi


def lambda_pmatrix(lambda_mib: MIB) -> PolyMatrix:
    return pmatrix(lambda_mib).mat


def jacobian(phi: Sequence[Polynomial], context: Sequence[str] | None = None, d: int | None = None) -> PolyMatrix:
    ''' l x q matrix with J[alpha, a] = d phi_a / d lambda_alpha '''
    if context is None:
        if not phi:
            raise StrataObject.StrataUserInputException('context', 'Required when phi is empty.')
        context = phi[0].context
    if d is None:
        d = phi[0].d if phi else 0
    context = tuple(context)
    return PolyMatrix.from_function(len(context), len(phi), lambda alpha, a: phi[a].diff(context[alpha]),
                                    context=context, d=d)


def phat_on_phi(phat: PHatMatrix, phi: Sequence[Polynomial]) -> PolyMatrix:
    if len(phi) != phat.q:
        raise StrataObject.SUIFixedLengthError('phi', phat.q, phi)
    assignment = dict(zip(phat.base.p_context, phi))
    return phat.mat.substitute(assignment, phi[0].context)


def verify_factorization(phat: PHatMatrix, phi: Sequence[Polynomial], lambda_hat: PolyMatrix,
                         jac: PolyMatrix) -> FactorizationReport:
    ''' Exact entrywise comparison of P-hat(phi) with J^T Lambda-hat J '''
    l, q = jac.shape
    if lambda_hat.shape != (l, l) or q != phat.q:
        raise StrataObject.StrataUserInputException(
            'jac', f'Shapes do not compose: Lambda-hat {lambda_hat.shape}, J {jac.shape}, q = {phat.q}.')
    lhs = phat_on_phi(phat, phi)
    rhs = jac.transpose() @ lambda_hat @ jac
    mismatched = [(a, b) for a in range(q) for b in range(q) if lhs[a, b] != rhs[a, b]]
    if mismatched:
        logger.info('Factorization fails at %d entries', len(mismatched))
    else:
        logger.info('Factorization holds in all %d entries', q * q)
    return FactorizationReport(not mismatched, mismatched)


def verify_relations_on_phi(relations: Sequence[Polynomial], phi: Sequence[Polynomial]) -> RelationsReport:
    residuals = []
    for relation in relations:
        if len(phi) != len(relation.context):
            raise StrataObject.SUIFixedLengthError('phi', len(relation.context), phi)
        residuals.append(relation.subst(dict(zip(relation.context, phi)), phi[0].context))
    return RelationsReport(all(r.is_zero() for r in residuals), residuals)


def delta_region(lambda_hat: PolyMatrix, jac: PolyMatrix) -> RegionDescription:
    if not lambda_hat.symmetric:
        raise StrataObject.StrataUserInputException('lambda_hat', 'Lambda-hat must be symmetric.')
    l = lambda_hat.rows
    return RegionDescription(lambda_hat.leading_principal_minors(), jac.minors(l), l)


def _probe_chunk(args) -> tuple[int, int, np.ndarray, np.ndarray]:
    inequalities, jac_evaluator, box, size, seed_sequence, tol, l = args
    rng = np.random.default_rng(seed_sequence)
    points = sample_box(box, size, rng)
    kept = points[region_mask(inequalities, points, tol)]
    if not len(kept):
        return size, 0, np.zeros(0, dtype=int), kept
    singular = np.linalg.svd(jac_evaluator(kept), compute_uv=False)
    thresholds = tol * np.maximum(1.0, singular.max(axis=1, initial=0.0))
    ranks = np.sum(singular > thresholds[:, None], axis=1)
    return size, len(kept), ranks, kept[ranks < l]


def connectivity_probe(region: RegionDescription, jac: PolyMatrix, box: Sequence[tuple[float, float]],
                       samples: int, seed: int, threads: int | None = None,
                       tolerances: Tolerances | None = None) -> ConnectivityReport:
    ''' Numeric rank of J at seeded samples of Delta; chunked so results ignore the thread count '''
    tolerances = tolerances or Tolerances()
    StrataObject.check_bound('samples', samples, min_bound=1)
    l = region.dimension
    if len(box) != l:
        raise StrataObject.SUIFixedLengthError('box', l, box)
    threads = threads or probe_threads()
    sizes = [PROBE_CHUNK] * (samples // PROBE_CHUNK)
    if samples % PROBE_CHUNK:
        sizes.append(samples % PROBE_CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    evaluator = MatrixEvaluator(jac)
    jobs = [(region.strict_polys(), evaluator, box, size, child, tolerances.eigen, l)
            for size, child in zip(sizes, seeds)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(_probe_chunk, jobs))
    tested = sum(r[0] for r in results)
    in_region = sum(r[1] for r in results)
    if in_region == 0:
        raise ConnectivityReport.EmptySample(tested)
    min_rank = int(min(int(r[2].min()) for r in results if r[1]))
    deficient = sorted(point.tolist() for r in results for point in r[3])
    logger.info('Probe: %d of %d samples in region, min rank %d', in_region, tested, min_rank)
    return ConnectivityReport(tested, in_region, min_rank, deficient, region.rank_everywhere())


def convention_check(phi: Sequence[Polynomial], expected: Sequence[Polynomial],
                     sign_flips: Sequence[str] = ()) -> ConventionReport:
    ''' Compare phi with a reference after lambda_i -> -lambda_i for the named variables '''
    if len(phi) != len(expected):
        raise StrataObject.SUIFixedLengthError('expected', len(phi), expected)
    context = phi[0].context
    for name in sign_flips:
        if name not in context:
            raise Polynomial.UnknownVariable(name, context)
    assignment = {v: (-p if v in sign_flips else p)
                  for v, p in zip(context, Polynomial.variables(context, phi[0].d))}
    flipped = [f.subst(assignment, context) for f in phi]
    mismatched = [a for a, (f, g) in enumerate(zip(flipped, expected)) if f != g]
    return ConventionReport(not mismatched, mismatched, list(sign_flips))


def rank_coherence(mib: MIB, V: SubspaceBasis, lambda_mib: MIB, region: RegionDescription,
                   samples: int = 50, seed: int = 0, tolerances: Tolerances | None = None) -> RankCoherenceReport:
    ''' Rank of the gradient Gram at v in V with lambda(v) in Delta should equal l '''
    tolerances = tolerances or Tolerances()
    rng = np.random.default_rng(seed)
    minors = [PolyEvaluator(m) for m in region.jacobian_minors]
    in_region = mismatches = 0
    for _ in range(samples):
        v = [Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 11))) for _ in range(V.nu)]
        lam = np.array([[float(value) for value in lambda_mib.evaluate(v)]])
        if not region_mask(region.strict_polys(), lam, tolerances.eigen)[0]:
            continue
        if not any(abs(minor(lam)[0]) > tolerances.eigen for minor in minors):
            continue
        in_region += 1
        x = V.embed([Scalar.coerce(c, mib.d) for c in v])
        gram = FloatMatrix.from_exact(gradient_gram_at(mib, x), symmetric=True)
        if StratumSignature.of(gram, tolerances).rank != region.dimension:
            mismatches += 1
    return RankCoherenceReport(samples, in_region, mismatches)


# ----- orchestration -----
@contextmanager
def _stage(stage: Stage):
    try:
        yield
    except Parametrization.StageError:
        raise
    except StrataObject.StrataException as error:
        raise Parametrization.StageError(stage, error) from error


def parametrize_stratum(problem, job) -> Parametrization:
    ''' Full pipeline for one strata job of a loaded problem '''
    mib = problem.mib
    diagnostics: list[str] = []
    with _stage(Stage.RESTRICT):
        V = job.subspace.resolve(mib.vars, mib.d)
        restricted = restrict_mib(mib, V)
        if restricted and restricted[0].context != job.lambda_mib.vars:
            raise StrataObject.StrataUserInputException(
                'lambda_mib', f'Lambda basis variables {job.lambda_mib.vars} differ from V coordinates {V.labels}.')
    induced_order = None
    if job.subspace.generators is not None and problem.group is None:
        diagnostics.append('No ambient group given; the group induced on V is not computed.')
    elif job.subspace.generators is not None:
        with _stage(Stage.INDUCED):
            H = job.subspace.group()
            if not H.is_subset_of(problem.group):
                raise FiniteGroup.NotASubgroup('subspace.generators')
            K = induced_action(stabilizer(problem.group, H), H, V)
            induced_order = K.order
            logger.info('Stab(H,G) induces a group of order %d on V', K.order)
    with _stage(Stage.PHI):
        phi = compute_phi(restricted, job.lambda_mib, mib.names, diagnostics)
    with _stage(Stage.LAMBDA_HAT):
        lambda_hat = lambda_pmatrix(job.lambda_mib)
    with _stage(Stage.JACOBIAN):
        jac = jacobian(phi, job.lambda_mib.p_context, mib.d)
    with _stage(Stage.FACTORIZATION):
        factorization = verify_factorization(problem.pmatrix(), phi, lambda_hat, jac)
    if not factorization.holds:
        raise Parametrization.FactorizationMismatch(factorization)
    with _stage(Stage.RELATIONS):
        relations_check = verify_relations_on_phi(problem.vanishing_for(job), phi)
    if not relations_check.all_vanish:
        diagnostics.append('Some relation or active factor does not vanish on phi.')
    with _stage(Stage.DELTA):
        delta = delta_region(lambda_hat, jac)
    bound = job.relation_bound or 2 * max(job.lambda_mib.degrees) + 2
    lambda_relations = find_relations(job.lambda_mib, bound)
    if lambda_relations:
        diagnostics.append(f'The lambda basis satisfies {len(lambda_relations)} relation(s) up to weighted '
                           f'degree {bound}; the parametrization is local.')
    else:
        diagnostics.append(f'No lambda relation up to weighted degree {bound}; coregularity is only checked up to this bound.')
    return Parametrization(
        V=V, lambda_mib=job.lambda_mib, phi=phi, lambda_hat=lambda_hat, jac=jac, delta=delta,
        coregular_K=not lambda_relations, factorization=factorization, relations_check=relations_check,
        lambda_relations=lambda_relations, relation_bound=bound, induced_order=induced_order,
        diagnostics=diagnostics, annotations=list(job.annotations))
