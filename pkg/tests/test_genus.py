from fractions import Fraction
from math import factorial

import pytest

from fglring.genus import OdeError, OdeFit, krichever_ode_check, ode_fit, residual_modulo_ideal
from fglring.poly import GeneratorSet
from fglring.series import TruncSeries

G = GeneratorSet(["a"], [1])
a = G.gen("a")


def exp_series(order):
    """(e^{a x} - 1) / a."""
    return TruncSeries(("x",), order, G, {(k,): a ** (k - 1) * Fraction(1, factorial(k)) for k in range(1, order + 1)})


def test_identity_function():
    x = TruncSeries.variable(("x",), 10, G, "x")
    fit = ode_fit(x)
    assert fit.ok and not fit.q1 and not fit.q2 and not fit.q3


def test_multiplicative():
    # with E = e^{ax}: lhs = -2aE^2 - aE, matched by q1 = -a/2, q2 = a^2/12, q3 = 0
    fit = ode_fit(exp_series(12))
    assert fit.ok and fit.homogeneous
    assert fit.q1 == a * Fraction(-1, 2)
    assert fit.q2 == a * a * Fraction(1, 12)
    assert not fit.q3


@pytest.mark.parametrize("d2", [3, 4, 5])
def test_alternate_trio_agrees(d2):
    base = ode_fit(exp_series(12))
    alt = ode_fit(exp_series(12), degrees=(0, 1, d2))
    assert (alt.q1, alt.q2, alt.q3) == (base.q1, base.q2, base.q3)
    assert alt.ok


def test_preconditions():
    with pytest.raises(OdeError):
        ode_fit(exp_series(5))
    with pytest.raises(OdeError):
        ode_fit(exp_series(8) + 1)
    with pytest.raises(OdeError):
        ode_fit(exp_series(8) * 2)
    with pytest.raises(OdeError):
        ode_fit(exp_series(8), degrees=(1, 0, 2))


def test_krichever_exponential():
    check = krichever_ode_check(10)
    fit = check.fit
    K = fit.q1.gens
    chi = lambda n: K.gen(f"chi_{n}")
    assert fit.homogeneous
    assert fit.q1 == chi(1) * Fraction(-1, 2)
    assert fit.q2 == chi(1) ** 2 * Fraction(1, 12) - chi(2) * Fraction(1, 3)
    assert fit.q3 == chi(3) * Fraction(-1, 2)
    # over the free ring the residual starts where the first relation lives
    assert min(d for (d,) in fit.residual.terms) == 4
    assert check.residual and all(r["in_ideal"] for r in check.residual)
    assert [r["weight"] for r in check.residual] == [r["degree"] + 1 for r in check.residual]
    assert check.ok and check.to_json()["passed"]


def test_residual_check_rejects_non_relations():
    fit = krichever_ode_check(10).fit
    K = fit.q1.gens
    bumped = fit.residual + TruncSeries(("x",), fit.residual.order, K, {(4,): K.gen("chi_5")})
    recs = residual_modulo_ideal(OdeFit(fit.q1, fit.q2, fit.q3, bumped))
    assert [r["in_ideal"] for r in recs][0] is False
