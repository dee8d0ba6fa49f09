""" Scalars in Q(sqrt D), sparse polynomials, polynomial matrices and exact linear solving """
# ======== standard imports ========
from fractions import Fraction
# ==================================

# ======= third party imports ======
import pytest
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg import (
    Polynomial, PolyMatrix, Scalar, bareiss_det, cofactor_det, nullspace, poly_arith, poly_diff,
    poly_divexact, poly_subst, polymat_det, scalar_arith, solve_linear)
from orbitstrata.model.tickets.notation import parse_poly
from conftest import random_poly
# ==================================

XY = ('x', 'y')


def xy(expr: str, d: int = 0) -> Polynomial:
    return parse_poly(expr, XY, d)


# ----- scalars -----
def test_scalar_field_arithmetic():
    assert Scalar(1, 2, 3) * Scalar(1, -2, 3) == -11
    assert Scalar.root(3) * Scalar.root(3) == 3
    assert Scalar(1, 1, 3).inverse() == Scalar(Fraction(-1, 2), Fraction(1, 2), 3)
    assert scalar_arith('div', Scalar(1, 0, 2), Scalar(0, 1, 2)) == Scalar(0, Fraction(1, 2), 2)
    assert scalar_arith('sub', Scalar(1, 1, 5), Scalar(1, 1, 5)).is_zero()


def test_scalar_errors():
    with pytest.raises(Scalar.MixedField):
        Scalar(1, 1, 2) + Scalar(1, 1, 3)
    with pytest.raises(Scalar.DivisionByZero):
        Scalar(1, 0, 0) / Scalar(0, 0, 0)
    with pytest.raises(ZeroDivisionError):
        Scalar(0, 0, 3).inverse()
    with pytest.raises(Scalar.FieldError):
        Scalar(1, 0, 4)
    with pytest.raises(Scalar.FieldError):
        Scalar(0, 1, 0)
    with pytest.raises(StrataObject.SUIChoiceError):
        scalar_arith('pow', Scalar(1), Scalar(1))


def test_scalar_sign_and_sqrt():
    assert Scalar(1, -1, 3).sign() == -1
    assert Scalar(2, -1, 3).sign() == 1
    assert Scalar(0, 0, 3).sign() == 0
    assert Scalar(4, 2, 3).sqrt() == Scalar(1, 1, 3)
    assert Scalar(3, 0, 3).sqrt() == Scalar.root(3)
    assert Scalar(Fraction(9, 4), 0, 0).sqrt() == Fraction(3, 2)
    assert Scalar(2, 0, 0).sqrt() is None
    assert Scalar(-1, 0, 0).sqrt() is None


def test_scalar_float_and_payload():
    assert float(Scalar(1, 1, 2)) == pytest.approx(1 + 2 ** 0.5)
    assert Scalar(Fraction(1, 2), -3, 5).to_payload() == ['1/2', '-3']


# ----- polynomials -----
def test_polynomial_products_and_rendering():
    f = xy('x + y') * xy('x - y')
    assert f == xy('x^2 - y^2')
    assert str(f) == 'x^2 - y^2'
    assert poly_arith('scale', xy('x + 1'), 2) == xy('2*x + 2')
    assert xy('2*x + 4*y').monic() == xy('x + 2*y')


def test_polynomial_ring_laws(rng):
    for _ in range(1000):
        d = rng.choice((0, 2, 3, 5))
        f, g, h = (random_poly(rng, XY, d, terms=3, max_degree=2) for _ in range(3))
        assert (f + g) + h == f + (g + h)
        assert f * g == g * f
        assert f * (g + h) == f * g + f * h
        assert f - f == Polynomial.zero(XY, d)


def test_leibniz_rule(rng):
    for _ in range(1000):
        f, g = (random_poly(rng, XY, 3, terms=3, max_degree=3) for _ in range(2))
        assert poly_diff(f * g, 'x') == poly_diff(f, 'x') * g + f * poly_diff(g, 'x')


def test_diff_unknown_variable():
    with pytest.raises(Polynomial.UnknownVariable):
        xy('x^2').diff('z')


def test_substitution():
    t = parse_poly('t', ('t',), 0)
    composed = poly_subst(xy('x^2 + y'), {'x': t + 1, 'y': t})
    assert composed == parse_poly('t^2 + 3*t + 1', ('t',), 0)
    with pytest.raises(Polynomial.IncompleteAssignment):
        xy('x + y').subst({'x': t})


def test_context_mismatch():
    with pytest.raises(Polynomial.ContextMismatch):
        xy('x') + parse_poly('x', ('x', 'z'), 0)


def test_exact_division():
    assert xy('x^2 - y^2').exquo(xy('x - y')) == xy('x + y')
    assert poly_divexact(xy('x^2 + y^2'), xy('x - y')) is None
    with pytest.raises(Polynomial.Indivisible):
        xy('x^2 + y^2').exquo(xy('x - y'))
    with pytest.raises(Polynomial.ZeroDivisor):
        xy('x').exquo(Polynomial.zero(XY))


def test_division_recovers_factor(rng):
    for _ in range(200):
        d = rng.choice((0, 3))
        f = random_poly(rng, XY, d, terms=3, max_degree=3)
        g = random_poly(rng, XY, d, terms=3, max_degree=2)
        if g.is_zero():
            continue
        assert poly_divexact(f * g, g) == f


def test_evaluate_and_components():
    f = xy('x^2 + rt*y + 1', 3)
    assert f.evaluate([1, 2]) == Scalar(2, 2, 3)
    assert f.evaluate({'x': 0, 'y': 0}) == 1
    components = f.homogeneous_components()
    assert sorted(components) == [0, 1, 2]
    assert components[2] == xy('x^2', 3)
    assert xy('x^2*y + y^3').is_homogeneous(3)
    assert xy('x^2 + y').is_weighted_homogeneous((1, 2), 2)


# ----- matrices -----
def test_small_determinants():
    M = PolyMatrix.from_rows([[xy('x'), xy('y')], [xy('y'), xy('x')]], symmetric=True)
    assert M.det() == xy('x^2 - y^2')
    assert M.leading_principal_minors() == [xy('x'), xy('x^2 - y^2')]
    with pytest.raises(PolyMatrix.NotSquare):
        PolyMatrix.from_rows([[xy('x'), xy('y'), xy('1')]]).det()
    with pytest.raises(PolyMatrix.NotSymmetric):
        PolyMatrix.from_rows([[xy('x'), xy('y')], [xy('x'), xy('x')]], symmetric=True)


def test_bareiss_matches_cofactor(rng):
    for size in (3, 4, 5):
        for _ in range(5):
            entries = [random_poly(rng, XY, 0, terms=2, max_degree=1) for _ in range(size * size)]
            M = PolyMatrix(size, size, entries, context=XY, d=0)
            assert bareiss_det(M) == cofactor_det(M)
            assert polymat_det(M) == cofactor_det(M)


def test_minors_count():
    J = PolyMatrix.from_rows([[xy('x'), xy('1'), xy('y')], [xy('0'), xy('x'), xy('1')]])
    assert len(J.minors(2)) == 3
    assert J.minors(2)[0] == xy('x^2')


def test_matrix_product_and_transpose():
    A = PolyMatrix.from_rows([[xy('x'), xy('1')]])
    assert (A.transpose() @ A) == PolyMatrix.from_rows(
        [[xy('x^2'), xy('x')], [xy('x'), xy('1')]])


# ----- linear systems -----
def test_solve_linear_consistent():
    solution = solve_linear([[1, 2], [2, 4]], [3, 6], d=0)
    assert solution.consistent
    assert solution.rank == 1
    assert solution.particular == (3, 0)
    assert solution.nullspace == [(-2, 1)]


def test_solve_linear_inconsistent():
    solution = solve_linear([[1, 2], [2, 4]], [3, 7], d=0)
    assert not solution.consistent
    assert solution.particular is None


def test_solve_linear_over_quadratic_field():
    rt = Scalar.root(3)
    solution = solve_linear([[rt, Scalar(1, 0, 3)], [Scalar(1, 0, 3), -rt]], [Scalar(4, 0, 3), Scalar(0, 0, 3)])
    x, y = solution.particular
    assert rt * x + y == 4
    assert x - rt * y == 0
    assert nullspace([[rt, Scalar(3, 0, 3)]], 3) == [(Scalar(0, -1, 3), Scalar(1, 0, 3))]


def test_random_systems_are_solved(rng):
    for _ in range(100):
        A = [[Scalar(rng.randint(-3, 3)) for _ in range(4)] for _ in range(3)]
        x = [Scalar(rng.randint(-3, 3)) for _ in range(4)]
        b = [sum((a * v for a, v in zip(row, x)), Scalar(0)) for row in A]
        solution = solve_linear(A, b, d=0)
        assert solution.consistent
        for row, rhs in zip(A, b):
            assert sum((a * v for a, v in zip(row, solution.particular)), Scalar(0)) == rhs
        for vector in solution.nullspace:
            for row in A:
                assert sum((a * v for a, v in zip(row, vector)), Scalar(0)) == 0
