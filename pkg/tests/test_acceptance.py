""" End-to-end checks on O(3) acting on R^8 (a vector plus a symmetric traceless tensor) """
# ======== standard imports ========
from fractions import Fraction
import json
# ==================================

# ======= third party imports ======
from click.testing import CliRunner
import numpy as np
import pytest
# ==================================

# ========= program imports ========
from orbitstrata.cli import main
from orbitstrata.model.exactalg import PolyMatrix, Scalar
from orbitstrata.model.invariants import active_factor_check
from orbitstrata.model.numerical import (
    FloatMatrix, PolyEvaluator, classify_point_x, orbit_space_membership, sample_region, sym_eigen)
from orbitstrata.model.parametrize import connectivity_probe, convention_check, parametrize_stratum, rank_coherence
from conftest import L_NAMES
# ==================================

PHAT = {
    (0, 0): '4*p1', (0, 1): '4*p2', (0, 2): '6*p3', (0, 3): '6*p4', (0, 4): '8*p5',
    (1, 1): '4*p2', (1, 2): '0', (1, 3): '4*p4', (1, 4): '4*p5',
    (2, 2): '108*(p1 - p2)^2',
    (2, 3): '18*(-2*p1*p2 + 2*p2^2 + p5)',
    (2, 4): '12*(p2*p3 + p1*p4 - p2*p4)',
    (3, 3): '12*(p2^2 + p5)',
    (3, 4): '4*(p2*p3 + 3*p1*p4 - p2*p4)',
    (4, 4): '4/3*(p3*p4 + p4^2 + 9*p1*p5)',
}

LAMBDA_HAT = [
    ['1', '0', '0', '0'],
    ['0', '4*l2', '0', '2*l4'],
    ['0', '0', '4*l3', '4*l4'],
    ['0', '2*l4', '4*l4', '4*l3^2 + 16*l2*l3'],
]

X_T = [1, 1, 0, 0, 0, 0, 1, 1]
BOX = [(-2.0, 2.0)] * 4


def test_phat_entries(o3_phat, p_poly):
    for (a, b), expr in PHAT.items():
        assert o3_phat[a, b] == p_poly(expr), f'P{a + 1}{b + 1}'
        assert o3_phat[b, a] == o3_phat[a, b]
    assert o3_phat.euler_row_holds()
    assert o3_phat.grading_holds()
    assert o3_phat.nonunique == []
    assert str(o3_phat[4, 4]) == '12*p1*p5 + 4/3*p3*p4 + 4/3*p4^2'


@pytest.mark.slow
def test_active_factor_divides_determinant(o3_problem, o3_phat):
    report = active_factor_check(o3_phat, o3_problem.candidate_factors)
    assert report.all_divide
    assert report.checks[0].quotient.weighted_degree(o3_problem.mib.degrees) == (
        report.determinant.weighted_degree(o3_problem.mib.degrees)
        - o3_problem.candidate_factors[0].weighted_degree(o3_problem.mib.degrees))


def test_fixed_space(o3_problem, o3_stratum):
    V = o3_stratum.V
    assert V.nu == 5
    assert V.labels == ('x1', 'x2', 'x5', 'x7', 'x8')
    aligned = o3_problem.job(1).subspace.resolve(o3_problem.x_vars, 3)
    assert aligned.labels == V.labels


def test_phi_matches_published_form(o3_problem, o3_stratum, l_poly):
    job = o3_problem.job(0)
    assert o3_stratum.phi == [l_poly(e) for e in (
        'l1^2 + l2 + l3', 'l3', '-2*rt*l1^3 + 6*rt*l1*l2', 'rt*l1*l3 - 3/2*l4',
        'l1^2*l3 + 3*l2*l3 - rt*l1*l4')]
    report = convention_check(o3_stratum.phi, job.expected_phi, job.sign_flips)
    assert report.holds
    assert not convention_check(o3_stratum.phi, job.expected_phi).holds


def test_lambda_hat(o3_stratum, l_poly):
    expected = PolyMatrix.from_rows([[l_poly(e) for e in row] for row in LAMBDA_HAT], symmetric=True)
    assert o3_stratum.lambda_hat == expected
    assert o3_stratum.delta.strict_inequalities == [
        l_poly('1'), l_poly('4*l2'), l_poly('16*l2*l3'), l_poly('16*(4*l2 + l3)*(4*l2*l3^2 - l4^2)')]


def test_factorization_and_active_factor(o3_stratum):
    assert o3_stratum.factorization.holds
    assert o3_stratum.factorization.mismatched == []
    assert o3_stratum.relations_check.all_vanish
    assert o3_stratum.jac.shape == (4, 5)
    assert o3_stratum.induced_order is None


def test_zero_coordinate_job_agrees(o3_problem, o3_stratum):
    other = parametrize_stratum(o3_problem, o3_problem.job(1))
    assert other.phi == o3_stratum.phi
    assert other.lambda_hat == o3_stratum.lambda_hat


def test_delta_matches_closed_form(o3_stratum):
    points = np.random.default_rng(42).uniform(-2.0, 2.0, size=(100_000, 4))
    minors = np.array([PolyEvaluator(m)(points) for m in o3_stratum.delta.strict_inequalities])
    l2, l3, l4 = points[:, 1], points[:, 2], points[:, 3]
    closed = np.array([l2, l3, 4 * l2 * l3 ** 2 - l4 ** 2])
    decided = (np.abs(minors).min(axis=0) > 1e-9) & (np.abs(closed).min(axis=0) > 1e-9)
    by_minors = np.all(minors > 0, axis=0)
    by_closed = np.all(closed > 0, axis=0)
    assert decided.sum() > 99_000
    assert np.array_equal(by_minors[decided], by_closed[decided])


def test_delta_soundness_by_eigenvalues(o3_stratum):
    region = sample_region(o3_stratum.delta, BOX, 2000, seed=5)
    assert not region.empty
    names = o3_stratum.lambda_hat.context
    assert names == L_NAMES
    for point in region.points[:200]:
        values = [[PolyEvaluator(o3_stratum.lambda_hat[i, j])(point)[0] for j in range(4)] for i in range(4)]
        assert sym_eigen(FloatMatrix(values, symmetric=True))[0] > 0
    sample = sample_region(o3_stratum.delta, BOX, 10_000, seed=42)
    l2, l3, l4 = sample.points[:, 1], sample.points[:, 2], sample.points[:, 3]
    assert np.all((l2 > 0) & (l3 > 0) & (l4 ** 2 < 4 * l2 * l3 ** 2))


def test_connectivity_probe(o3_stratum):
    report = connectivity_probe(o3_stratum.delta, o3_stratum.jac, BOX, 10_000, seed=42)
    assert report.in_region > 0
    assert report.min_rank == 4
    assert report.rank_deficient_points == []
    assert not report.exact


def test_rank_coherence(o3_problem, o3_stratum):
    report = rank_coherence(o3_problem.mib, o3_stratum.V, o3_stratum.lambda_mib, o3_stratum.delta,
                            samples=60, seed=1)
    assert report.in_region > 0
    assert report.mismatches == 0


def test_classification(o3_problem, o3_phat):
    rng = np.random.default_rng(2024)
    generic = [Fraction(int(rng.integers(-200, 201)), 100) for _ in range(8)]
    assert classify_point_x(generic, o3_problem.mib).signature.rank == 5

    typical = classify_point_x(X_T, o3_problem.mib)
    assert typical.signature.rank == 4
    assert typical.p == [4, 2, Scalar(0, 4, 3), Scalar(0, 2, 3), 8]
    membership = orbit_space_membership([float(v) for v in typical.p], o3_phat)
    assert membership.member
    assert membership.rank == 4

    assert classify_point_x([0] * 8, o3_problem.mib).signature.rank == 0


def test_typical_point_lies_in_fixed_space(o3_stratum):
    x_t = [Scalar(v, 0, 3) for v in X_T]
    assert o3_stratum.V.contains(x_t)
    lam = o3_stratum.lambda_mib.evaluate(o3_stratum.V.coordinates_of(x_t))
    assert lam == (1, 1, 2, 0)
    assert list(o3_stratum.boundary_image(lam)) == [4, 2, Scalar(0, 4, 3), Scalar(0, 2, 3), 8]


@pytest.mark.slow
def test_stratum_command(data_dir, tmp_path):
    out = tmp_path / 'stratum.json'
    result = CliRunner().invoke(main, ['stratum', str(data_dir / 'o3_r8.json'), '--job', '0', '--out', str(out)])
    assert result.exit_code == 0
    report = json.loads(out.read_text())
    assert report["results"]["convention"]["holds"]
    assert report["results"]["factorization"]["holds"]
    assert any(d.startswith('unchecked:') for d in report["diagnostics"])
