""" Jacobi eigenvalues, numeric rank, point classification and region sampling """
# ======= third party imports ======
import numpy as np
import pytest
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg import Polynomial
from orbitstrata.model.numerical import (
    FloatMatrix, MatrixEvaluator, PolyEvaluator, Tolerances, classify_point_x, minor_sums, numeric_rank,
    orbit_space_membership, sample_region, stratum_conditions, sym_eigen)
from orbitstrata.model.parametrize import RegionDescription
from orbitstrata.model.tickets.notation import parse_poly
# ==================================


def random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return FloatMatrix(a + a.T, symmetric=True)


@pytest.mark.parametrize('n', [1, 2, 3, 5, 8])
def test_jacobi_matches_lapack(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        S = random_symmetric(rng, n)
        assert np.allclose(sym_eigen(S), np.linalg.eigvalsh(S.values), atol=1e-9)


def test_jacobi_trace_and_determinant():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        S = random_symmetric(rng, int(rng.integers(1, 7)))
        eigenvalues = sym_eigen(S)
        assert np.isclose(eigenvalues.sum(), np.trace(S.values), rtol=1e-9, atol=1e-9)
        assert np.isclose(eigenvalues.prod(), np.linalg.det(S.values), rtol=1e-8, atol=1e-8)
        assert list(eigenvalues) == sorted(eigenvalues)


def test_jacobi_on_larger_matrix():
    rng = np.random.default_rng(3)
    S = random_symmetric(rng, 30)
    assert np.allclose(sym_eigen(S), np.linalg.eigvalsh(S.values), atol=1e-8)
    diagonal = FloatMatrix(np.diag([3.0, -1.0, 2.0]), symmetric=True)
    assert list(sym_eigen(diagonal)) == [-1.0, 2.0, 3.0]


def test_jacobi_errors():
    with pytest.raises(StrataObject.StrataUserInputException):
        sym_eigen(FloatMatrix([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(FloatMatrix.NoConvergence) as error:
        sym_eigen(FloatMatrix([[1.0, 2.0], [2.0, 1.0]], symmetric=True), max_sweeps=0)
    assert error.value.exit_code == 3
    assert sym_eigen(FloatMatrix([], symmetric=True)).size == 0


def test_float_matrix_validation():
    with pytest.raises(StrataObject.StrataUserInputException):
        FloatMatrix([[np.nan]])
    with pytest.raises(StrataObject.StrataUserInputException):
        FloatMatrix([[1.0, 2.0], [3.0, 1.0]], symmetric=True)


def test_numeric_rank():
    u = np.array([1.0, 2.0, 3.0])
    assert numeric_rank(np.outer(u, u)) == 1
    assert numeric_rank(np.eye(3)) == 3
    assert numeric_rank(np.zeros((2, 4))) == 0
    assert numeric_rank(np.diag([1.0, 1e-12])) == 1
    assert numeric_rank(np.diag([1e6, 1e-4]), tol=1e-9) == 1
    assert numeric_rank(np.diag([1e6, 1e-2]), tol=1e-9) == 2


def test_tolerances_validation():
    assert Tolerances().eigen == 1e-9
    with pytest.raises(StrataObject.SUIBoundsError):
        Tolerances(eigen=-1.0)
    with pytest.raises(StrataObject.SUIBoundsError):
        Tolerances(max_sweeps=0)
    with pytest.raises(StrataObject.SUITypeError):
        Tolerances(strict_minors='yes')


def test_evaluators_agree_with_exact(dihedral6):
    phat = dihedral6.pmatrix()
    det = phat.mat.det()
    points = np.array([[5.0, -11.0], [1.0, 2.0], [0.5, 0.25]])
    assert np.allclose(PolyEvaluator(det)(points), [144.0, -108.0, 36 * (0.125 - 0.0625)])
    values = MatrixEvaluator(phat.mat)(points)
    assert values.shape == (3, 2, 2)
    assert np.array_equal(values[0], [[20.0, -66.0], [-66.0, 225.0]])
    assert PolyEvaluator(Polynomial.zero(('a',)))(np.zeros((4, 1))).shape == (4,)


def test_classify_points(dihedral6):
    mib = dihedral6.mib
    origin = classify_point_x([0, 0], mib)
    assert origin.signature.rank == 0
    assert origin.p == [0, 0]
    on_axis = classify_point_x([1, 0], mib)
    assert on_axis.signature.rank == 1
    assert on_axis.signature.psd
    generic = classify_point_x([1, 2], mib)
    assert generic.signature.rank == 2
    assert generic.p == [5, -11]
    with pytest.raises(StrataObject.SUIFixedLengthError):
        classify_point_x([1, 2, 3], mib)


def test_membership(dihedral6, z2_minus_identity):
    phat = dihedral6.pmatrix()
    assert orbit_space_membership([5, -11], phat).member
    outside = orbit_space_membership([1, 2], phat)
    assert not outside.member
    assert outside.eigenvalues[0] < 0

    relation = z2_minus_identity.relations
    phat = z2_minus_identity.pmatrix()
    inside = orbit_space_membership([1, 1, 1], phat, relation)
    assert inside.member
    assert inside.rank == 2
    off_variety = orbit_space_membership([1, 2, 1], phat, relation)
    assert not off_variety.member
    assert off_variety.relation_residuals == [-3.0]


def test_minor_sums_are_eigenvalue_symmetric_functions(dihedral6):
    phat = dihedral6.pmatrix()
    sums = minor_sums(phat.mat)
    assert len(sums) == 2
    assert sums[1] == phat.mat.det()
    values = MatrixEvaluator(phat.mat)(np.array([5.0, -11.0]))[0]
    eigenvalues = np.linalg.eigvalsh(values)
    assert np.isclose(float(sums[0].evaluate([5, -11])), eigenvalues.sum())
    assert np.isclose(float(sums[1].evaluate([5, -11])), eigenvalues.prod())
    assert len(minor_sums(phat.mat, up_to=1)) == 1


def test_stratum_conditions(dihedral6):
    phat = dihedral6.pmatrix()
    factor = dihedral6.candidate_factors[0]
    boundary = stratum_conditions(phat, [factor], 1)
    assert boundary.holds_at([1, 1])
    assert not boundary.holds_at([5, -11])
    interior = stratum_conditions(phat, [], 2)
    assert interior.holds_at([5, -11])
    assert not interior.holds_at([1, 2])
    origin = stratum_conditions(phat, dihedral6.mib.p_variables(), 0)
    assert origin.minor_sums == []
    assert origin.holds_at([0, 0])
    with pytest.raises(StrataObject.SUIBoundsError):
        stratum_conditions(phat, [], 3)


def test_non_strict_conditions_accept_boundary(dihedral6):
    phat = dihedral6.pmatrix()
    strict = stratum_conditions(phat, [], 2)
    relaxed = stratum_conditions(phat, [], 2, Tolerances(strict_minors=False))
    assert not strict.holds_at([1, 1])
    assert relaxed.holds_at([1, 1])


def region(*constants):
    return RegionDescription([parse_poly(c, ('l1',)) for c in constants], [], len(constants))


def test_sample_region_trivial_cases():
    everything = sample_region(region('1'), [(-1.0, 1.0)], 100, seed=3)
    assert len(everything.points) == 100
    assert not everything.empty
    nothing = sample_region(region('-1'), [(-1.0, 1.0)], 100, seed=3)
    assert nothing.empty
    assert nothing.tested == 100


def test_sample_region_is_seeded():
    first = sample_region(region('l1'), [(-1.0, 1.0)], 500, seed=11)
    second = sample_region(region('l1'), [(-1.0, 1.0)], 500, seed=11)
    assert np.array_equal(first.points, second.points)
    assert np.all(first.points > 0)
    with pytest.raises(StrataObject.SUIFixedLengthError):
        sample_region(region('l1'), [(0.0, 1.0), (0.0, 1.0)], 10, seed=0)


@pytest.mark.parametrize('problem', ['dihedral6', 'z2_minus_identity'])
def test_phat_is_positive_semidefinite_on_images(request, problem):
    spec = request.getfixturevalue(problem)
    points = np.random.default_rng(99).uniform(-3.0, 3.0, size=(1000, len(spec.x_vars)))
    images = np.column_stack([PolyEvaluator(p)(points) for p in spec.mib.polys])
    phat = spec.pmatrix()
    for p in images:
        report = orbit_space_membership(p, phat, spec.relations, Tolerances(residual=1e-7))
        assert report.member
