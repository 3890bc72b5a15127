import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from fglring.poly import GeneratorSet, GradedPoly

settings.register_profile(
    "default",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SMALL = GeneratorSet(["x_1", "x_2", "x_3"], [1, 2, 3])


@st.composite
def polys(draw, gens=SMALL, max_terms=5, max_exp=3, coeffs=st.integers(-9, 9)):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        e = tuple(draw(st.integers(0, max_exp)) for _ in gens.names)
        terms[e] = draw(coeffs)
    return GradedPoly.from_dict(gens, terms)


@st.composite
def homogeneous_polys(draw, w, gens=SMALL, max_terms=4):
    mons = gens.monomials_of_weight(w)
    picked = draw(st.lists(st.sampled_from(mons), max_size=max_terms)) if mons else []
    return GradedPoly(gens, {m: draw(st.integers(-9, 9)) for m in picked})


@pytest.fixture
def rng():
    return random.Random(20240611)
