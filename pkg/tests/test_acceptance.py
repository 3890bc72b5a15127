"""Acceptance suite: one PASS/FAIL line per criterion, exact comparisons only.

Run under pytest (the lines are written straight to the terminal) or as
``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction

import pytest

from fglring.fgl import FglSpec, buchstaber_expand, krichever_expand, krichever_generators
from fglring.genus import krichever_ode_check
from fglring.iso import (
    ab_from_c,
    ab_series_from_chi,
    brel_check,
    c_from_ab,
    closed_form_ab,
    defect_v2w,
    defect_vw,
    e12_series,
    e14_series,
    fkb_check,
    universal_ab_series,
)
from fglring.poly import GeneratorSet, GradedPoly
from fglring.series import TruncSeries, compose, divide_antisym, reversion
from fglring.universal import (
    KINDS,
    claim_memberships,
    d_of,
    lambda_certificate,
    perturbed_certificate,
    rho,
    torsion_scan,
    universal_ring,
)

RESULTS = {}


def report(n, ok, what, elapsed, budget):
    ok = ok and elapsed < budget
    line = f"ACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL'}  {what}  [{elapsed:.2f}s < {budget}s]"
    RESULTS[n] = ok
    return line, ok


@pytest.fixture
def emit(request):
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def out(line):
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print("\n" + line, end="")
        else:
            print(line)

    return out


def _check(n, what, budget, fn, emit):
    t = time.perf_counter()
    detail = ""
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure of the criterion, reported as such
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    line, ok = report(n, ok, f"{what}{' - ' + detail if detail else ''}", time.perf_counter() - t, budget)
    emit(line)
    assert ok, line


# 1


def c1():
    FK, FB = fkb_check(10)
    return FK == FB and FK.order == 10, f"{len(FK.terms)} coefficients compared"


def test_c1_fkb(emit):
    _check(1, "Krichever law equals Buchstaber law of (A_K, B_K) to order 10", 30, c1, emit)


# 2


def c2():
    W = 12
    gens = krichever_generators(W)
    chi = {n: gens.gen(f"chi_{n}") for n in range(1, W + 1)}
    A, B = ab_series_from_chi(W, gens)
    Acf, Bcf = closed_form_ab(lambda n: chi[n], gens.zero(), W)
    bad = [n for n in range(1, W + 1) if A.coeff((n,)) != Acf[n] or B.coeff((n,)) != Bcf[n]]
    return not bad, f"weights 1..{W}" + (f", mismatches at {bad}" if bad else "")


def test_c2_cbk(emit):
    _check(2, "closed forms for A_n, B_n in chi agree with the series expansion", 10, c2, emit)


# 3


def c3():
    A, B = universal_ab_series(13)
    ok12 = defect_vw(A, B, 10) == e12_series(A, B, 10)
    ok14 = defect_v2w(A, B, 10) == e14_series(A, B, 10)
    return ok12 and ok14, f"vw: {'equal' if ok12 else 'DIFFER'}, v^2 w: {'equal' if ok14 else 'DIFFER'}"


def test_c3_defect_slices(emit):
    _check(3, "vw and v^2 w defect coefficients equal their closed forms to u^10", 60, c3, emit)


# 4


def c4():
    W = 12
    cd = ab_from_c(W)
    round_trip = c_from_ab(cd.A, cd.B, W, cd.gens) == cd.C
    brel = brel_check(W)
    return round_trip and all(r["passed"] for r in brel), f"round trip {round_trip}, Brel weights 0..{W}"


def test_c4_round_trip_brel(emit):
    _check(4, "C -> (A, B) -> C is the identity and Brel holds", 10, c4, emit)


# 5


def c5():
    rows = claim_memberships(8, certificates=False)
    ring = universal_ring("buchstaber", 8)
    bad = [(r["claim"], r["k"]) for r in rows if not r["member"]]
    # certificates are re-verified inside membership; check one more time from scratch
    from fglring.iso import s_family

    A, B = universal_ab_series(9)
    g = A.gens
    Ad = {k: A.coeff((k,)) for k in range(1, 10) if A.coeff((k,))}
    Bd = {k: B.coeff((k,)) for k in range(1, 10) if B.coeff((k,))}
    S = s_family(Ad, c_from_ab(Ad, Bd, 8, g), 8, g)
    for k in range(3, 9):
        res = ring.membership(S[k])
        if not (res.member and ring.verify_certificate(S[k], res.certificate)):
            bad.append(("S_k recheck", k))
    return not bad and len(rows) == 18, f"{len(rows)} claims, k = 3..8" + (f", failing {bad}" if bad else "")


def test_c5_membership(emit):
    _check(5, "2S_k, S_k and B' - 2M coefficients lie in the I_ass slice with certificates", 300, c5, emit)


# 6 and 7

TABLE = {1: None, 2: None, 3: None, 4: None, 5: 5, 6: 2, 7: 7, 8: 2, 9: 3, 10: 1}


def c6():
    bad = []
    for n, want in TABLE.items():
        got = {kind: rho(kind, n) for kind in KINDS}
        lam = lambda_certificate(n)
        alt = rho("buchstaber", n, perturbed_certificate(n, lam, 1))
        if got["buchstaber"] != want or got["krichever"] != want or alt != want:
            bad.append((n, got, alt))
    shown = ", ".join(f"{n}:{'inf' if v is None else v}" for n, v in TABLE.items())
    return not bad, f"rho = {shown}" + (f"; mismatches {bad}" if bad else "")


def test_c6_rho_table(emit):
    _check(6, "rho table in both coordinates, invariant under the lambda certificate", 600, c6, emit)


def c7():
    odd = []
    found = {}
    for w in range(1, 9):
        scan = torsion_scan("buchstaber", w)
        found[w] = scan["torsion"]
        odd += [(w, d) for d in scan["flagged"]]
    tors = {w: t for w, t in found.items() if t}
    return not odd, f"torsion by weight {tors}, all powers of 2"


def test_c7_torsion(emit):
    _check(7, "invariant factors modulo I_ass are powers of 2 for w <= 8", 600, c7, emit)


# 8


def c8():
    primes = {2: 2, 3: 3, 4: 2, 5: 5, 7: 7, 8: 2, 9: 3, 11: 11, 13: 13, 16: 2}
    ones = [6, 10, 12, 14, 15]
    bad = [m for m, p in primes.items() if d_of(m) != p] + [m for m in ones if d_of(m) != 1]
    return not bad, "prime powers give p, others 1"


def test_c8_kummer(emit):
    _check(8, "d(n+1) = p for n+1 = p^k and 1 otherwise", 1, c8, emit)


# 9


def c9():
    check = krichever_ode_check(10)
    fit = check.fit
    degrees = [r["degree"] for r in check.residual]
    return check.ok, (
        f"q1 = {fit.q1}, q2 = {fit.q2}, q3 = {fit.q3}; residual vanishes in R_K (x) Q "
        f"at x^{degrees[0]}..x^{degrees[-1]}" if degrees else "residual identically zero"
    )


def test_c9_ode(emit):
    _check(9, "Krichever exponential satisfies the third-order ODE to order 10", 60, c9, emit)


# 10


def _rand_poly(rng, gens, w):
    mons = gens.monomials_of_weight(w)
    return GradedPoly(gens, {m: rng.randint(-5, 5) for m in rng.sample(mons, min(len(mons), 3))})


def c10():
    rng = random.Random(7)
    G = GeneratorSet(["x_1", "x_2", "x_3"], [1, 2, 3])
    Z = GeneratorSet(["z"], [1])
    N = 100
    fails = {"law": 0, "antisym": 0, "reversion": 0}
    for _ in range(N):
        kind = rng.choice(("buchstaber", "krichever"))
        if kind == "buchstaber":
            A = [G.one(), _rand_poly(rng, G, 1), G.zero()] + [_rand_poly(rng, G, n) for n in range(3, 7)]
            B = [G.one(), G.zero()] + [_rand_poly(rng, G, n) for n in range(2, 7)]
            F = buchstaber_expand(TruncSeries.univariate(G, A, 6), TruncSeries.univariate(G, B, 6), 5)
        else:
            F = krichever_expand(G, 5, chi={n: _rand_poly(rng, G, n) for n in range(1, 6)})
        unit = F.coeff((1, 0)) == 1 and F.coeff((0, 1)) == 1 and not any(
            F.coeff((k, 0)) or F.coeff((0, k)) for k in range(2, 6)
        )
        if not (unit and F.is_symmetric() and F.is_graded(-1) and not F.constant_term()):
            fails["law"] += 1
    UV = ("u", "v")
    for _ in range(N):
        sym = {}
        for d in range(6):
            for i in range(d + 1):
                c = rng.randint(-4, 4)
                sym[(i, d - i)] = sym.get((i, d - i), 0) + c
                sym[(d - i, i)] = sym.get((d - i, i), 0) + c
        s = TruncSeries(UV, 6, Z, {e: Z.const(c) for e, c in sym.items()})
        t = TruncSeries(UV, 6, Z, {e: Z.const(c) for e, c in sym.items() if sum(e) > 0})
        u, v = TruncSeries.variable(UV, 6, Z, "u"), TruncSeries.variable(UV, 6, Z, "v")
        p, q = (u - v) * s, (u - v) * (1 + t)
        r = divide_antisym(p, q)
        if r * q.divide_by_difference() != p.divide_by_difference():
            fails["antisym"] += 1
    for _ in range(N):
        coeffs = [0, 1] + [rng.randint(-6, 6) for _ in range(7)]
        s = TruncSeries.univariate(Z, [Z.const(c) for c in coeffs], 8, "x")
        r = reversion(s)
        x = TruncSeries.variable(("x",), 8, Z, "x")
        if compose(s, [r]) != x or compose(r, [s]) != x:
            fails["reversion"] += 1
    return not any(fails.values()), f"{N} instances each, failures {fails}"


def test_c10_properties(emit):
    _check(10, "law invariants, antisymmetric division, reversion over random instances", 60, c10, emit)


if __name__ == "__main__":
    checks = [
        (1, "FKB", 30, c1), (2, "cBK", 10, c2), (3, "e12/e14", 60, c3), (4, "C1/C2, Brel", 10, c4),
        (5, "membership", 300, c5), (6, "rho", 600, c6), (7, "torsion", 600, c7), (8, "Kummer", 1, c8),
        (9, "ODE", 60, c9), (10, "properties", 60, c10),
    ]
    ok = True
    for n, what, budget, fn in checks:
        t = time.perf_counter()
        good, detail = fn()
        line, good = report(n, good, f"{what} - {detail}", time.perf_counter() - t, budget)
        print(line)
        ok = ok and good
    sys.exit(0 if ok else 1)
