""" Shared fixtures: shipped problem files, contexts and random polynomial factories """
# ======== standard imports ========
from fractions import Fraction
from pathlib import Path
import random
# ==================================

# ======= third party imports ======
import pytest
# ==================================

# ========= program imports ========
from orbitstrata.model.exactalg import Polynomial, Scalar
from orbitstrata.model.tickets.notation import parse_poly
from orbitstrata.model.tickets.problem import load_problem
# ==================================

DATA = Path(__file__).resolve().parent.parent / 'content' / 'data'

P_NAMES = ('p1', 'p2', 'p3', 'p4', 'p5')
L_NAMES = ('l1', 'l2', 'l3', 'l4')


def random_scalar(rng: random.Random, d: int, allow_zero: bool = True) -> Scalar:
    while True:
        a = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        b = Fraction(rng.randint(-9, 9), rng.randint(1, 4)) if d else 0
        value = Scalar(a, b, d)
        if allow_zero or value:
            return value


def random_poly(rng: random.Random, context, d: int, terms: int = 4, max_degree: int = 3) -> Polynomial:
    found = {}
    for _ in range(rng.randint(0, terms)):
        exponents = tuple(rng.randint(0, max_degree) for _ in context)
        found[exponents] = random_scalar(rng, d)
    return Polynomial(context, found, d)


@pytest.fixture
def rng():
    return random.Random(20240404)


@pytest.fixture
def poly_factory(rng):
    def make(context=('x', 'y', 'z'), d=0, terms=4, max_degree=3):
        return random_poly(rng, tuple(context), d, terms, max_degree)
    return make


@pytest.fixture
def p_poly():
    def make(expr: str) -> Polynomial:
        return parse_poly(expr, P_NAMES, 3)
    return make


@pytest.fixture
def l_poly():
    def make(expr: str) -> Polynomial:
        return parse_poly(expr, L_NAMES, 3)
    return make


@pytest.fixture(scope='session')
def data_dir():
    return DATA


@pytest.fixture(scope='session')
def o3_problem():
    return load_problem(DATA / 'o3_r8.json')


@pytest.fixture(scope='session')
def o3_phat(o3_problem):
    return o3_problem.pmatrix()


@pytest.fixture(scope='session')
def o3_stratum(o3_problem):
    from orbitstrata.model.parametrize import parametrize_stratum
    return parametrize_stratum(o3_problem, o3_problem.job(0))


@pytest.fixture(scope='session')
def z2_minus_identity():
    return load_problem(DATA / 'z2_minus_identity.json')


@pytest.fixture(scope='session')
def z2_reflection():
    return load_problem(DATA / 'z2_reflection.json')


@pytest.fixture(scope='session')
def dihedral6():
    return load_problem(DATA / 'dihedral6.json')
