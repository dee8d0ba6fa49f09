"""File housing problem files: the JSON schema, its records and load_problem
"""
# ======== standard imports ========
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional
import json
import logging
# ==================================

# ======= third party imports ======
import numpy as np
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg import Polynomial
from orbitstrata.model.invariants import MIB, MIBEntry, PHatMatrix, pmatrix
from orbitstrata.model.groups import DEFAULT_CAP, FiniteGroup, OrthMatrix, SubspaceBasis, close_group
from orbitstrata.model.parametrize import SubspaceSpec
from orbitstrata.model.tickets.notation import parse_poly, parse_scalar
# ==================================

logger = logging.getLogger(__name__)

DEFAULT_FIELD = 3
SPOT_CHECKS = 10


@dataclass
class ExprEntry(StrataObject):
    ''' One {name, degree, expr} record of a basis listing '''
    name: str
    degree: int
    expr: str

    attribute_doc_strings = {
        "name": "Identifier of the basis element",
        "degree": "Declared homogeneous degree",
        "expr": "Polynomial expression in the file's grammar"
    }

    example = {
        "name": "p1",
        "degree": 2,
        "expr": "x1^2 + x2^2"
    }

    def validate_name(self):
        self.check_type('name', self.name, str)

    def validate_degree(self):
        if isinstance(self.degree, float) and self.degree.is_integer():
            self.degree = self._warncast('degree', self.degree, float, int)
        self.check_type('degree', self.degree, int)

    def validate_expr(self):
        self.check_type('expr', self.expr, str)

    def to_entry(self, context: tuple[str, ...], d: int) -> MIBEntry:
        return MIBEntry(self.name, self.degree, parse_poly(self.expr, context, d))


@dataclass
class StrataJob(StrataObject):
    ''' One stratum to parametrize: where V lies and how its invariants are generated '''
    subspace: SubspaceSpec
    lambda_mib: MIB
    relation_bound: Optional[int] = None
    active_factors: list[int] = field(default_factory=list)
    expected_phi: list[Polynomial] = field(default_factory=list)
    sign_flips: list[str] = field(default_factory=list)
    annotations: list[str] = field(default_factory=list)

    attribute_doc_strings = {
        "subspace": "The fixed-point subspace V",
        "lambda_mib": "Basis of the induced group's invariants, in V's coordinates",
        "relation_bound": "Weighted degree bound for the lambda relation search",
        "active_factors": "Indices of candidate factors expected to vanish on this stratum",
        "expected_phi": "Reference parametrization compared after sign flips",
        "sign_flips": "Lambda variables negated before comparing with expected_phi",
        "annotations": "Claims reported but not checked"
    }

    def validate_relation_bound(self):
        if self.relation_bound is not None:
            self.check_type('relation_bound', self.relation_bound, int)
            self.check_bound('relation_bound', self.relation_bound, min_bound=2 * min(self.lambda_mib.degrees))

    def validate_expected(self):
        for f in self.expected_phi:
            if f.context != self.lambda_mib.p_context:
                raise Polynomial.ContextMismatch(self.lambda_mib.p_context, f.context)
        for name in self.sign_flips:
            self.check_choice_validity('sign_flips', name, self.lambda_mib.p_context)

    def validate_annotations(self):
        self.check_iterable_typing('annotations', self.annotations, str)


@dataclass
class ProblemSpec(StrataObject):
    ''' A fully parsed and validated problem file '''
    name: str
    field_D: int
    x_vars: tuple[str, ...]
    mib: MIB
    relations: list[Polynomial] = field(default_factory=list)
    generators: list[OrthMatrix] = field(default_factory=list)
    candidate_factors: list[Polynomial] = field(default_factory=list)
    strata_jobs: list[StrataJob] = field(default_factory=list)

    class SchemaViolation(StrataObject.StrataUserInputException):
        def __init__(self, path: str, message: str) -> None:
            self.path = path
            super().__init__(path, message)

    class ValidationFailure(StrataObject.StrataUserInputException):
        pass

    attribute_doc_strings = {
        "name": "Problem label",
        "field_D": "Coefficients live in Q(sqrt field_D); 0 means the rationals",
        "x_vars": "Coordinates of R^n",
        "mib": "The minimal integrity basis p_1..p_q",
        "relations": "Known relations F_A(p), in basis variables",
        "generators": "Generators of G when it is finite and listed",
        "candidate_factors": "Expected factors of det P-hat, in basis variables",
        "strata_jobs": "Strata to parametrize"
    }

    example = {
        "name": "z2_reflection",
        "field_D": 0,
        "x_vars": ["x", "y"],
        "mib": [{"name": "p1", "degree": 1, "expr": "x"}, {"name": "p2", "degree": 2, "expr": "y^2"}],
        "group": {"generators": [[["1", "0"], ["0", "-1"]]]},
        "strata_jobs": [{
            "subspace": {"zero_coords": [2]},
            "lambda_mib": [{"name": "l1", "degree": 1, "expr": "x"}]
        }]
    }

    def __post_init__(self):
        self.x_vars = tuple(self.x_vars)
        self._phat: Optional[PHatMatrix] = None
        self._group: Optional[FiniteGroup] = None
        super().__post_init__()

    def validate_context(self):
        if self.mib.vars != self.x_vars:
            raise Polynomial.ContextMismatch(self.x_vars, self.mib.vars)
        for f in self.relations + self.candidate_factors:
            if f.context != self.mib.p_context:
                raise Polynomial.ContextMismatch(self.mib.p_context, f.context)
        for g in self.generators:
            if g.n != len(self.x_vars):
                raise self.ValidationFailure('group', f'Generator of size {g.n} does not act on R^{len(self.x_vars)}.')

    def validate_jobs(self):
        for k, job in enumerate(self.strata_jobs):
            for index in job.active_factors:
                self.check_bound(f'strata_jobs[{k}].active_factors', index, 0, len(self.candidate_factors) - 1)

    @property
    def q(self) -> int:
        return self.mib.q

    @property
    def group(self) -> Optional[FiniteGroup]:
        if not self.generators:
            return None
        if self._group is None:
            self._group = close_group(self.generators, DEFAULT_CAP)
        return self._group

    def pmatrix(self) -> PHatMatrix:
        if self._phat is None:
            self._phat = pmatrix(self.mib)
        return self._phat

    def vanishing_for(self, job: StrataJob) -> list[Polynomial]:
        ''' Relations of the basis plus the candidate factors active on the job's stratum '''
        return list(self.relations) + [self.candidate_factors[i] for i in job.active_factors]

    def job(self, index: int) -> StrataJob:
        self.check_bound('job', index, 0, len(self.strata_jobs) - 1)
        return self.strata_jobs[index]


# ----- schema helpers -----
def _require(payload: dict, key: str, kind: type | tuple[type, ...], path: str) -> Any:
    if key not in payload:
        raise ProblemSpec.SchemaViolation(f'{path}.{key}', 'Missing required field.')
    value = payload[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ProblemSpec.SchemaViolation(f'{path}.{key}', f'Expected {kind}, got {type(value).__name__}.')
    return value


def _optional(payload: dict, key: str, kind: type | tuple[type, ...], path: str, default: Any) -> Any:
    return _require(payload, key, kind, path) if key in payload else default


def _expr_list(values: list, path: str) -> list[str]:
    for i, value in enumerate(values):
        if not isinstance(value, str):
            raise ProblemSpec.SchemaViolation(f'{path}[{i}]', 'Expected an expression string.')
    return values


def _entries(values: list, path: str) -> list[ExprEntry]:
    entries = []
    for i, record in enumerate(values):
        if not isinstance(record, dict):
            raise ProblemSpec.SchemaViolation(f'{path}[{i}]', 'Expected an object with name, degree and expr.')
        entries.append(ExprEntry(
            _require(record, 'name', str, f'{path}[{i}]'),
            _require(record, 'degree', (int, float), f'{path}[{i}]'),
            _require(record, 'expr', str, f'{path}[{i}]')))
    return entries


def _basis(entries: list[ExprEntry], context: tuple[str, ...], d: int, path: str) -> MIB:
    mib_entries = []
    for i, entry in enumerate(entries):
        try:
            mib_entries.append(entry.to_entry(context, d))
        except StrataObject.StrataUserInputException as error:
            raise ProblemSpec.ValidationFailure(f'{path}[{i}]', str(error)) from error
    return MIB(context, mib_entries)


def _matrix(rows: Any, d: int, path: str) -> OrthMatrix:
    if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
        raise ProblemSpec.SchemaViolation(path, 'Expected a row-major array of arrays.')
    parsed = []
    for i, row in enumerate(rows):
        parsed_row = []
        for j, value in enumerate(row):
            if isinstance(value, bool) or not isinstance(value, (str, int)):
                raise ProblemSpec.SchemaViolation(f'{path}[{i}][{j}]', 'Expected an integer or a scalar expression.')
            parsed_row.append(parse_scalar(str(value), d))
        parsed.append(parsed_row)
    return OrthMatrix(parsed, d)


def _subspace(payload: Any, x_vars: tuple[str, ...], d: int, path: str) -> SubspaceSpec:
    if not isinstance(payload, dict) or len(payload) != 1:
        raise ProblemSpec.SchemaViolation(path, 'Expected exactly one of zero_coords, generators or basis.')
    if 'zero_coords' in payload:
        coords = _require(payload, 'zero_coords', list, path)
        if not all(isinstance(k, int) and not isinstance(k, bool) for k in coords):
            raise ProblemSpec.SchemaViolation(f'{path}.zero_coords', 'Expected integers.')
        return SubspaceSpec(zero_coords=coords)
    if 'generators' in payload:
        matrices = _require(payload, 'generators', list, path)
        return SubspaceSpec(generators=[_matrix(m, d, f'{path}.generators[{i}]') for i, m in enumerate(matrices)])
    if 'basis' in payload:
        basis = _require(payload, 'basis', dict, path)
        labels = _require(basis, 'labels', list, f'{path}.basis')
        vectors = _require(basis, 'vectors', list, f'{path}.basis')
        parsed = [[parse_scalar(str(v), d) for v in vector] for vector in vectors]
        return SubspaceSpec(basis=SubspaceBasis(len(x_vars), parsed, tuple(labels), d))
    raise ProblemSpec.SchemaViolation(path, f'Unknown subspace form {next(iter(payload))!r}.')


def _job(payload: Any, x_vars: tuple[str, ...], d: int, path: str) -> StrataJob:
    if not isinstance(payload, dict):
        raise ProblemSpec.SchemaViolation(path, 'Expected an object.')
    subspace = _subspace(_require(payload, 'subspace', dict, path), x_vars, d, f'{path}.subspace')
    V = subspace.resolve(x_vars, d)
    lambda_entries = _entries(_require(payload, 'lambda_mib', list, path), f'{path}.lambda_mib')
    lambda_mib = _basis(lambda_entries, V.labels, d, f'{path}.lambda_mib')
    expected = [parse_poly(expr, lambda_mib.p_context, d)
                for expr in _expr_list(_optional(payload, 'expected_phi', list, path, []), f'{path}.expected_phi')]
    return StrataJob(
        subspace=subspace,
        lambda_mib=lambda_mib,
        relation_bound=_optional(payload, 'relation_bound', int, path, None),
        active_factors=_optional(payload, 'active_factors', list, path, []),
        expected_phi=expected,
        sign_flips=_optional(payload, 'sign_flips', list, path, []),
        annotations=_optional(payload, 'annotations', list, path, []))


def _spot_check(mib: MIB, relations: list[Polynomial], seed: int = 0) -> None:
    ''' Cheap rejection at random rational points before the exact composition '''
    rng = np.random.default_rng(seed)
    for _ in range(SPOT_CHECKS):
        x = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) for _ in mib.vars]
        p = mib.evaluate(x)
        for index, relation in enumerate(relations):
            if relation.evaluate(p):
                raise ProblemSpec.ValidationFailure(
                    f'relations[{index}]', f'{relation} does not vanish at x = {[str(v) for v in x]}.')
    for index, relation in enumerate(relations):
        if not mib.compose(relation).is_zero():
            raise ProblemSpec.ValidationFailure(f'relations[{index}]', f'{relation} is not a relation of the basis.')


def problem_from_payload(payload: Any) -> ProblemSpec:
    if not isinstance(payload, dict):
        raise ProblemSpec.SchemaViolation('$', 'Expected a JSON object.')
    name = _require(payload, 'name', str, '$')
    d = _optional(payload, 'field_D', int, '$', DEFAULT_FIELD)
    x_vars = tuple(_expr_list(_require(payload, 'x_vars', list, '$'), '$.x_vars'))
    mib = _basis(_entries(_require(payload, 'mib', list, '$'), '$.mib'), x_vars, d, '$.mib')
    relations = [parse_poly(expr, mib.p_context, d)
                 for expr in _expr_list(_optional(payload, 'relations', list, '$', []), '$.relations')]
    _spot_check(mib, relations)
    group = _optional(payload, 'group', dict, '$', {})
    generators = [_matrix(m, d, f'$.group.generators[{i}]')
                  for i, m in enumerate(_optional(group, 'generators', list, '$.group', []))]
    candidates = [parse_poly(expr, mib.p_context, d)
                  for expr in _expr_list(_optional(payload, 'candidate_factors', list, '$', []), '$.candidate_factors')]
    jobs = [_job(job, x_vars, d, f'$.strata_jobs[{k}]')
            for k, job in enumerate(_optional(payload, 'strata_jobs', list, '$', []))]
    problem = ProblemSpec(name, d, x_vars, mib, relations, generators, candidates, jobs)
    logger.info('Loaded problem %s: n = %d, q = %d, %d job(s)', name, len(x_vars), mib.q, len(jobs))
    return problem


def load_problem(path: str | Path) -> ProblemSpec:
    path = Path(path)
    if not path.is_file():
        raise ProblemSpec.SchemaViolation(str(path), 'No such problem file.')
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as error:
        raise ProblemSpec.SchemaViolation(str(path), f'Invalid JSON: {error}') from error
    return problem_from_payload(payload)
