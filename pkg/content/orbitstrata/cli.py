"""Command line entry point: python -m orbitstrata <command> problem.json

Exit codes: 0 success, 1 verification failed, 2 input error, 3 cap exceeded.
"""
# ======== standard imports ========
from __future__ import annotations

from contextlib import contextmanager
from functools import wraps
from typing import Optional
import logging
import sys
import warnings
# ==================================

# ======= third party imports ======
import click
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.invariants import active_factor_check, find_relations
from orbitstrata.model.numerical.base import Tolerances
from orbitstrata.model.numerical.strata import classify_point_x, orbit_space_membership, stratum_conditions
from orbitstrata.model.parametrize import (
    compute_phi, connectivity_probe, convention_check, delta_region, jacobian, lambda_pmatrix,
    parametrize_stratum, restrict_mib)
from orbitstrata.model.tickets.notation import parse_scalar
from orbitstrata.model.tickets.problem import load_problem
from orbitstrata.model.tickets.report import Report
# ==================================

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION = 1

problem_argument = click.argument('problem', type=click.Path(exists=True, dir_okay=False))
out_option = click.option('--out', type=click.Path(dir_okay=False), default=None,
                          help='Write the JSON report here instead of standard output.')


def _emit(report: Report, out: Optional[str]) -> None:
    if out:
        report.write(out)
        logger.info('Report written to %s', out)
    else:
        click.echo(report.to_json(indent=2, sort_keys=True))


@contextmanager
def _collect_warnings(report: Report):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        yield
    for warning in caught:
        report.diagnostics.append(str(warning.message))
        logger.warning('%s', warning.message)


def exits_on_error(command):
    ''' Map the exception tree onto exit codes '''
    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            code = command(*args, **kwargs)
        except StrataObject.StrataException as error:
            click.echo(f'error: {error}', err=True)
            sys.exit(error.exit_code)
        sys.exit(code or EXIT_OK)
    return wrapper


def _parse_point(text: str, d: int) -> list:
    return [parse_scalar(part.strip(), d) for part in text.split(',')]


def _parse_box(text: str) -> list[tuple[float, float]]:
    box = []
    for part in text.split(','):
        try:
            low, high = (float(v) for v in part.split(':'))
        except ValueError:
            raise StrataObject.StrataUserInputException('box', f'Expected "lo:hi" intervals, got {part!r}.')
        if not low < high:
            raise StrataObject.SUIBoundsError('box', low, None, high)
        box.append((low, high))
    return box


@click.group(name='orbitstrata')
@click.option('-v', '--verbose', count=True, help='INFO logging; repeat for DEBUG.')
def main(verbose: int) -> None:
    ''' Orbit space stratification of compact linear groups '''
    level = logging.WARNING if not verbose else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s: %(message)s')


@main.command()
@problem_argument
@out_option
@exits_on_error
def pmatrix(problem: str, out: Optional[str]) -> int:
    ''' Compute and render P-hat, with the Euler row and grading checks '''
    report = Report.for_file('pmatrix', problem)
    with _collect_warnings(report):
        spec = load_problem(problem)
        with report.timed('pmatrix'):
            phat = spec.pmatrix()
    names = spec.mib.names
    report.results = {
        "names": list(names),
        "degrees": list(spec.mib.degrees),
        "entries": {f'P{a + 1}{b + 1}': phat[a, b].to_payload()
                    for a in range(phat.q) for b in range(a, phat.q)},
        "euler_row": phat.euler_row_holds(),
        "grading": phat.grading_holds(),
        "nonunique": [list(pair) for pair in phat.nonunique],
    }
    if not report.results["euler_row"]:
        report.diagnostics.append('First row differs from 2 d_a p_a; p1 is not the squared norm.')
    _emit(report, out)
    return EXIT_OK if report.results["grading"] else EXIT_VERIFICATION


@main.command()
@problem_argument
@click.option('--max-degree', type=int, required=True, help='Weighted degree bound of the search.')
@out_option
@exits_on_error
def relations(problem: str, max_degree: int, out: Optional[str]) -> int:
    ''' Degree-bounded search for relations among the basis elements '''
    report = Report.for_file('relations', problem)
    with _collect_warnings(report):
        spec = load_problem(problem)
        with report.timed('find_relations'):
            found = find_relations(spec.mib, max_degree)
    report.results = {
        "max_weighted_degree": max_degree,
        "coregular_up_to_bound": not found,
        "relations": [{"weighted_degree": r.weighted_degree, "poly": r.poly.to_payload()} for r in found],
    }
    _emit(report, out)
    return EXIT_OK


@main.command()
@problem_argument
@click.option('--job', 'job_index', type=int, default=0, show_default=True)
@out_option
@exits_on_error
def stratum(problem: str, job_index: int, out: Optional[str]) -> int:
    ''' Parametrize one stratum through its fixed-point subspace '''
    report = Report.for_file('stratum', problem)
    with _collect_warnings(report):
        spec = load_problem(problem)
        job = spec.job(job_index)
        with report.timed('parametrize_stratum'):
            result = parametrize_stratum(spec, job)
    report.results = result.to_payload()
    report.diagnostics.extend(result.diagnostics)
    failed = not result.relations_check.all_vanish
    if job.expected_phi:
        convention = convention_check(result.phi, job.expected_phi, job.sign_flips)
        report.results["convention"] = convention.to_payload()
        failed |= not convention.holds
    report.diagnostics.extend(f'unchecked: {claim}' for claim in result.annotations)
    _emit(report, out)
    return EXIT_VERIFICATION if failed else EXIT_OK


@main.command()
@problem_argument
@click.option('--strict/--non-strict', default=True, help='Compare minor sums with > (strict) or >=.')
@out_option
@exits_on_error
def verify(problem: str, strict: bool, out: Optional[str]) -> int:
    ''' Divisibility of det P-hat by each candidate factor, and relation vanishing on every stratum '''
    report = Report.for_file('verify', problem)
    tolerances = Tolerances(strict_minors=strict)
    with _collect_warnings(report):
        spec = load_problem(problem)
        phat = spec.pmatrix()
        with report.timed('active_factor_check'):
            factors = active_factor_check(phat, spec.candidate_factors)
        jobs = []
        for k, job in enumerate(spec.strata_jobs):
            with report.timed(f'job_{k}'):
                result = parametrize_stratum(spec, job)
            conditions = stratum_conditions(phat, spec.vanishing_for(job), result.l, tolerances)
            jobs.append({
                "job": k,
                "relations_vanish": result.relations_check.all_vanish,
                "factorization": result.factorization.holds,
                "conditions": conditions.to_payload(),
            })
    report.results = {
        "determinant_terms": len(factors.determinant),
        "factors": [{"candidate": c.candidate.to_payload(), "divides": c.divides,
                     "quotient_terms": len(c.quotient) if c.quotient is not None else None}
                    for c in factors.checks],
        "jobs": jobs,
    }
    _emit(report, out)
    ok = factors.all_divide and all(j["relations_vanish"] and j["factorization"] for j in jobs)
    return EXIT_OK if ok else EXIT_VERIFICATION


@main.command()
@problem_argument
@click.option('--point', required=True, help='Comma separated coordinates, e.g. "1,1,0,1/2,rt".')
@click.option('--tol', type=float, default=1e-9, show_default=True)
@out_option
@exits_on_error
def classify(problem: str, point: str, tol: float, out: Optional[str]) -> int:
    ''' Rank of the gradient Gram matrix and the orbit map image at a point '''
    report = Report.for_file('classify', problem)
    tolerances = Tolerances(eigen=tol, residual=tol)
    with _collect_warnings(report):
        spec = load_problem(problem)
        x = _parse_point(point, spec.field_D)
        classification = classify_point_x(x, spec.mib, tolerances)
        membership = orbit_space_membership([float(v) for v in classification.p], spec.pmatrix(),
                                            spec.relations, tolerances)
    report.results = {
        "p": [str(v) for v in classification.p],
        "rank": classification.signature.rank,
        "eigenvalues": classification.signature.eigenvalues,
        "member": membership.member,
    }
    _emit(report, out)
    return EXIT_OK


@main.command()
@problem_argument
@click.option('--job', 'job_index', type=int, default=0, show_default=True)
@click.option('--box', required=True, help='Per-lambda intervals "lo:hi,lo:hi,...".')
@click.option('--samples', type=int, default=10_000, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--threads', type=int, default=None, help='Defaults to ORBITSTRATA_THREADS or all cores.')
@out_option
@exits_on_error
def probe(problem: str, job_index: int, box: str, samples: int, seed: int,
          threads: Optional[int], out: Optional[str]) -> int:
    ''' Sample Delta and report the numeric rank of J '''
    report = Report.for_file('probe', problem)
    with _collect_warnings(report):
        spec = load_problem(problem)
        job = spec.job(job_index)
        with report.timed('jacobian'):
            V = job.subspace.resolve(spec.mib.vars, spec.mib.d)
            phi = compute_phi(restrict_mib(spec.mib, V), job.lambda_mib, spec.mib.names, report.diagnostics)
            jac = jacobian(phi, job.lambda_mib.p_context, spec.mib.d)
            region = delta_region(lambda_pmatrix(job.lambda_mib), jac)
        with report.timed('connectivity_probe'):
            result = connectivity_probe(region, jac, _parse_box(box), samples, seed, threads)
    report.results = {"region": region.to_payload(), "probe": result.to_payload()}
    _emit(report, out)
    return EXIT_OK if result.min_rank == region.dimension else EXIT_VERIFICATION
