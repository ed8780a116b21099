import random

import pytest
from gmpy2 import mpq
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qsteenrod.poly import Polynomial, Ring, pack
from qsteenrod.qfield import QUniPoly

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.builds(lambda a, b: mpq(a, b), st.integers(-9, 9), st.integers(1, 5))
nonzero_rationals = rationals.filter(bool)


@st.composite
def polynomials(draw, n=None, max_deg=4, max_terms=6, ring=Ring.RAT, homogeneous=None):
    n = draw(st.integers(1, 4)) if n is None else n
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        if homogeneous is None:
            exps = [draw(st.integers(0, max_deg)) for _ in range(n)]
        else:
            exps = [0] * n
            for _ in range(homogeneous):
                exps[draw(st.integers(0, n - 1))] += 1
        c = draw(rationals)
        if ring is Ring.QPOLY:
            c = QUniPoly((c, draw(rationals)))
        terms[pack(exps)] = c
    return Polynomial(n, terms, ring)


def random_poly(rng: random.Random, n: int, degree: int, terms: int = 6) -> Polynomial:
    """Homogeneous random polynomial with small rational coefficients."""
    out = {}
    for _ in range(terms):
        exps = [0] * n
        for _ in range(degree):
            exps[rng.randrange(n)] += 1
        out[pack(exps)] = mpq(rng.randint(-9, 9), rng.randint(1, 4))
    return Polynomial(n, out)


@pytest.fixture
def rng():
    return random.Random(12345)
