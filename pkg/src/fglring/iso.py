"""Explicit isomorphism between the Buchstaber and Krichever coefficient
rings: chi -> (A, B), the C-generators, M(u), the obstructions S_k and the
closed forms for the vw and v^2 w slices of the associativity defect.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .fgl import (
    FglSpec,
    b_series,
    beta_series,
    buchstaber_expand,
    buchstaber_generators,
    family,
    krichever_expand,
    krichever_generators,
    series_from_family,
    associativity_defect,
)
from .poly import GeneratorSet, GradedPoly
from .series import TruncSeries


class IsoError(AssertionError):
    """A claimed identity failed; carries the first differing index."""


@dataclass
class CoeffDict:
    """Families A_n, B_n (and optionally C_n / chi_n) up to weight W."""

    gens: GeneratorSet
    W: int
    A: dict[int, GradedPoly] = field(default_factory=dict)
    B: dict[int, GradedPoly] = field(default_factory=dict)
    C: dict[int, GradedPoly] = field(default_factory=dict)

    def a(self, n):
        return self.A.get(n, self.gens.zero())

    def b(self, n):
        return self.B.get(n, self.gens.zero())

    def series(self, order: int | None = None) -> tuple[TruncSeries, TruncSeries]:
        order = self.W if order is None else order
        return (series_from_family(self.gens, self.A, order), series_from_family(self.gens, self.B, order))


def closed_form_ab(c: Callable[[int], GradedPoly], zero: GradedPoly, W: int) -> tuple[dict, dict]:
    """A_n, B_n in terms of a family c_n, for n <= W."""
    A: dict[int, GradedPoly] = {}
    B: dict[int, GradedPoly] = {}
    for m in range(1, W + 1):
        if m == 1:
            A[1] = c(1)
            B[1] = zero
        elif m == 2:
            A[2] = zero
        if m >= 2:
            B[m] = c(m) if m % 2 == 0 else 2 * c(m)
        if m >= 3 and m % 2 == 1:
            n = (m - 1) // 2
            s = c(m) + sum((c(k) * c(2 * n - k + 1) for k in range(1, n + 1)), zero)
            A[m] = (3 - 2 * n) * s + (n - 2) * c(1) * c(2 * n)
        elif m >= 4 and m % 4 == 0:
            n = m // 4
            s = 2 * c(4 * n)
            s = s + sum((c(2 * k) * c(4 * n - 2 * k) for k in range(1, 2 * n)), zero)
            s = s + 4 * sum((c(2 * k - 1) * c(4 * n - 2 * k + 1) for k in range(1, 2 * n + 1)), zero)
            A[m] = (1 - n) * s + (4 * n - 5) * c(1) * c(4 * n - 1)
        elif m >= 6 and m % 4 == 2:
            n = (m - 2) // 4
            s = c(4 * n + 2)
            s = s + sum((c(2 * k) * c(4 * n - 2 * k + 2) for k in range(1, n + 1)), zero)
            s = s + 2 * sum((c(2 * k - 1) * c(4 * n - 2 * k + 3) for k in range(1, 2 * n + 2)), zero)
            A[m] = (1 - 2 * n) * s + (4 * n - 3) * c(1) * c(4 * n + 1)
    return A, B


def ab_series_from_chi(W: int, gens: GeneratorSet | None = None, normalize: bool = True):
    """A_K(u) = b^2 - chi_1 u b - u^2 b beta [- chi_2 u^2], B_K(u) = b - chi_1 u."""
    gens = krichever_generators(W) if gens is None else gens
    chi = family(gens, "chi")
    b = b_series(gens, W, chi)
    beta = beta_series(gens, W, chi)
    u = TruncSeries.variable(("u",), W, gens, "u")
    chi1 = chi.get(1, gens.zero())
    chi2 = chi.get(2, gens.zero())
    A = b * b - u * b * chi1 - u * u * b * beta
    if normalize:
        A = A - u * u * chi2
    B = b - u * chi1
    return A, B


def ab_from_chi(W: int) -> CoeffDict:
    """A_n, B_n as polynomials in chi, by series expansion and by closed form.

    Raises :class:`IsoError` at the first index where the two disagree.
    """
    gens = krichever_generators(W)
    A_ser, B_ser = ab_series_from_chi(W, gens)
    chi = family(gens, "chi")
    A_cf, B_cf = closed_form_ab(lambda n: chi.get(n, gens.zero()), gens.zero(), W)
    out = CoeffDict(gens, W, C=dict(chi))
    for n in range(1, W + 1):
        a, b = A_ser.coeff((n,)), B_ser.coeff((n,))
        if a != A_cf.get(n, gens.zero()):
            raise IsoError(f"A_{n}: series {a} != closed form {A_cf.get(n)}")
        if b != B_cf.get(n, gens.zero()):
            raise IsoError(f"B_{n}: series {b} != closed form {B_cf.get(n)}")
        if a:
            out.A[n] = a
        if b:
            out.B[n] = b
    return out


def c_generators(W: int) -> GeneratorSet:
    return GeneratorSet.family("C", range(1, W + 1))


def ab_from_c(W: int, gens: GeneratorSet | None = None) -> CoeffDict:
    gens = c_generators(W) if gens is None else gens
    C = family(gens, "C")
    A, B = closed_form_ab(lambda n: C.get(n, gens.zero()), gens.zero(), W)
    return CoeffDict(gens, W, A={k: v for k, v in A.items() if v}, B={k: v for k, v in B.items() if v}, C=C)


def c_from_ab(A: Mapping[int, GradedPoly], B: Mapping[int, GradedPoly], W: int, gens: GeneratorSet) -> dict[int, GradedPoly]:
    """C_1 = A_1, C_2n = B_2n and the recurrence for C_{2n+1}."""
    zero = gens.zero()
    a = lambda n: A.get(n, zero)
    b = lambda n: B.get(n, zero)
    C: dict[int, GradedPoly] = {}
    for m in range(1, W + 1):
        if m == 1:
            C[1] = a(1)
        elif m % 2 == 0:
            C[m] = b(m)
        else:
            n = (m - 1) // 2
            s = sum((C[k] * C[2 * n - k + 1] for k in range(1, n + 1)), zero)
            C[m] = a(m) + (n - 1) * b(m) - (3 - 2 * n) * s - (n - 2) * C[1] * C[2 * n]
    return C


def c_from_m(A: TruncSeries, B: TruncSeries, W: int) -> dict[int, GradedPoly]:
    """C_1 = A_1, C_2n = B_2n, C_{2n+1} = M_{2n+1} - n B_{2n+1}.

    Agrees with :func:`c_from_ab` only modulo the associativity ideal.
    """
    M = m_series(A, B, W)
    C: dict[int, GradedPoly] = {}
    for m in range(1, W + 1):
        if m == 1:
            C[1] = A.coeff((1,))
        elif m % 2 == 0:
            C[m] = B.coeff((m,))
        else:
            C[m] = M.coeff((m - 1,)) - (m - 1) // 2 * B.coeff((m,))
    return C


def m_series(A: TruncSeries, B: TruncSeries, order: int) -> TruncSeries:
    """M(u) = (A_1 B - B_2 u - (A - B^2)/u) / (B + A_1 u) to u^order."""
    n = order + 1
    A, B = A.truncate(n), B.truncate(n)
    if A.order < n or B.order < n:
        raise ValueError(f"A and B must be known to u^{n}")
    u = TruncSeries.variable(("u",), n, A.gens, "u")
    A1, B2 = A.coeff((1,)), B.coeff((2,))
    q = (A - B * B).divide_by("u")
    num = B.truncate(order) * A1 - u.truncate(order) * B2 - q
    den = (B + u * A1).truncate(order)
    return num * den.invert_unit()


def s_family(A: Mapping[int, GradedPoly], C: Mapping[int, GradedPoly], W: int, gens: GeneratorSet) -> dict[int, GradedPoly]:
    """S_k = A_k minus the closed form of A_k in the C_n, 3 <= k <= W."""
    A_cf, _ = closed_form_ab(lambda n: C.get(n, gens.zero()), gens.zero(), W)
    return {k: A.get(k, gens.zero()) - A_cf[k] for k in range(3, W + 1)}


def half_second_derivative(B: TruncSeries) -> TruncSeries:
    """B''(u)/2 with integer coefficients k(k-1)/2 B_k."""
    terms = {(k - 2,): p * (k * (k - 1) // 2) for (k,), p in B.terms.items() if k >= 2}
    return TruncSeries(B.vars, B.order - 2, B.gens, terms)


def half_derivative(B: TruncSeries) -> TruncSeries:
    """The literal series B'(u)/2; every k B_k must be even."""
    terms = {}
    for (k,), p in B.terms.items():
        if k >= 1:
            terms[(k - 1,)] = _halve(k * p)
    return TruncSeries(B.vars, B.order - 1, B.gens, terms)


def _halve(p: GradedPoly) -> GradedPoly:
    if any(c % 2 for c in p.terms.values()):
        raise IsoError(f"{p} is not divisible by 2")
    return GradedPoly(p.gens, {m: c // 2 for m, c in p.terms.items()})


def e12_series(A: TruncSeries, B: TruncSeries, order: int) -> TruncSeries:
    """B'(B + A_1 u) - 2 A_1 B + 2 B_2 u + 2 (A - B^2)/u to u^order."""
    n = order + 1
    A, B = A.truncate(n), B.truncate(n)
    gens = A.gens
    u = TruncSeries.variable(("u",), order, gens, "u")
    A1, B2 = A.coeff((1,)), B.coeff((2,))
    Bo = B.truncate(order)
    dB = B.derivative("u")
    q = (A - B * B).divide_by("u")
    return dB * (Bo + u * A1) - Bo * (2 * A1) + u * (2 * B2) + q * 2


def e14_series(A: TruncSeries, B: TruncSeries, order: int) -> TruncSeries:
    """Closed form of the v^2 w coefficient of the defect, to u^order."""
    n = order + 2
    A, B = A.truncate(n + 1), B.truncate(n + 1)
    gens = A.gens
    A1, A3 = A.coeff((1,)), A.coeff((3,))
    B2, B3 = B.coeff((2,)), B.coeff((3,))
    u = TruncSeries.variable(("u",), order, gens, "u")
    Bo = B.truncate(order)
    dB = B.derivative("u").truncate(order)
    hB = half_second_derivative(B).truncate(order)
    lin = A1 * u + Bo
    main = hB * lin * lin + dB * (Bo * A1 - u * B2) + Bo * (5 * B2 - A1 * A1) + u * (3 * (A1 * B2 - A3 + B3))
    # the two singular terms only cancel together, so combine before dividing by u^2
    un = TruncSeries.variable(("u",), n, gens, "u")
    dBn = B.derivative("u")
    An, Bn = A.truncate(n), B.truncate(n)
    BB = Bn * Bn
    sing = -((dBn * un - Bn * 3) * (An - BB)) + un * A1 * (An - BB * 4)
    return main + sing.divide_by("u").divide_by("u")


def defect_slice(A: TruncSeries, B: TruncSeries, order: int, v_pow: int, w_pow: int) -> TruncSeries:
    """Coefficient of v^v_pow w^w_pow in the Buchstaber defect, to u^order."""
    total = order + v_pow + w_pow
    F = buchstaber_expand(A, B, total, caps=(None, v_pow + w_pow + 1), strict=False)
    N = associativity_defect(F, total, caps=(None, v_pow, w_pow))
    return N.extract({"v": v_pow, "w": w_pow})


def defect_vw(A: TruncSeries, B: TruncSeries, order: int) -> TruncSeries:
    return defect_slice(A, B, order, 1, 1)


def defect_v2w(A: TruncSeries, B: TruncSeries, order: int) -> TruncSeries:
    return defect_slice(A, B, order, 2, 1)


def assert_series_equal(lhs: TruncSeries, rhs: TruncSeries, what: str) -> None:
    diff = lhs.first_difference(rhs)
    if diff is not None:
        raise IsoError(f"{what}: first difference at {diff}: {lhs.coeff(diff)} != {rhs.coeff(diff)}")


def brel_sides(cd: CoeffDict, W: int) -> tuple[TruncSeries, TruncSeries]:
    """A(u) and (B + A_1 u)(B - u B'/2) - B_2 u^2, both to u^W."""
    A, B = cd.series(W + 1)
    gens = cd.gens
    u = TruncSeries.variable(("u",), W, gens, "u")
    Bo = B.truncate(W)
    rhs = (Bo + u * cd.a(1)) * (Bo - u * half_derivative(B)) - u * u * cd.b(2)
    return A.truncate(W), rhs


def brel_check(W: int) -> list[dict]:
    cd = ab_from_c(W + 1)
    lhs, rhs = brel_sides(cd, W)
    return [
        {"identity": "Brel", "weight": k, "passed": lhs.coeff((k,)) == rhs.coeff((k,))}
        for k in range(W + 1)
    ]


def universal_ab_series(W: int) -> tuple[TruncSeries, TruncSeries]:
    spec = FglSpec.universal_buchstaber(W)
    return spec.A, spec.B


def fkb_check(order: int) -> tuple[TruncSeries, TruncSeries]:
    """Krichever law and the Buchstaber law of (A_K, B_K), both to ``order``."""
    W = order + 1
    gens = krichever_generators(W)
    FK = krichever_expand(gens, order)
    A, B = ab_series_from_chi(W, gens)
    FB = buchstaber_expand(A, B, order)
    return FK, FB


def _by_weight(lhs: TruncSeries, rhs: TruncSeries, identity: str, shift: int) -> list[dict]:
    """One record per coefficient weight; a monomial of degree d has weight d + shift."""
    bad = {}
    for e in set(lhs.terms) | set(rhs.terms):
        if lhs.coeff(e) != rhs.coeff(e):
            w = sum(e) + shift
            bad.setdefault(w, e)
    n = min(lhs.order, rhs.order)
    return [
        {"identity": identity, "weight": d + shift, "passed": d + shift not in bad}
        for d in range(n + 1)
        if d + shift >= 1
    ]


def verify_report(W: int = 12, order: int = 10, slice_order: int = 10, log=None) -> list[dict]:
    """Every identity of the isomorphism, checked exactly and reported per weight."""
    say = log or (lambda msg: None)
    out: list[dict] = []

    say("cBK")
    gens = krichever_generators(W)
    chi = family(gens, "chi")
    A_ser, B_ser = ab_series_from_chi(W, gens)
    A_cf, B_cf = closed_form_ab(lambda n: chi.get(n, gens.zero()), gens.zero(), W)
    for n in range(1, W + 1):
        ok = A_ser.coeff((n,)) == A_cf.get(n, gens.zero()) and B_ser.coeff((n,)) == B_cf.get(n, gens.zero())
        out.append({"identity": "cBK", "weight": n, "passed": ok})

    say("normalization")
    A0, B0 = ab_series_from_chi(order + 1, normalize=False)
    A1, B1 = ab_series_from_chi(order + 1, normalize=True)
    F0 = buchstaber_expand(A0, B0, order, strict=False)
    F1 = buchstaber_expand(A1, B1, order, strict=False)
    out += _by_weight(F0, F1, "normalization", -1)

    say("FKB")
    FK, FB = fkb_check(order)
    out += _by_weight(FK, FB, "FKB", -1)

    say("C round trip, B odd, S_k")
    cd = ab_from_c(W)
    back = c_from_ab(cd.A, cd.B, W, cd.gens)
    S = s_family(cd.A, cd.C, W, cd.gens)
    for n in range(1, W + 1):
        out.append({"identity": "C1C2_roundtrip", "weight": n, "passed": back[n] == cd.C[n]})
        if n % 2 == 1 and n >= 3:
            ok = all(c % 2 == 0 for c in cd.b(n).terms.values())
            out.append({"identity": "B_odd_even_coefficients", "weight": n, "passed": ok})
        if n >= 3:
            out.append({"identity": "S_k_zero", "weight": n, "passed": not S[n]})

    say("Brel")
    out += brel_check(W)[1:]

    say("M integrality, e12 = (B + A_1 u)(B' - 2M)")
    A, B = universal_ab_series(W + 1)
    M = m_series(A, B, W - 1)
    for k in range(W):
        out.append({"identity": "M_integral", "weight": k + 1, "passed": M.coeff((k,)).is_integral()})
    u = TruncSeries.variable(("u",), W - 1, A.gens, "u")
    Bo = B.truncate(W - 1)
    rhs = (Bo + u * A.coeff((1,))) * (B.derivative("u").truncate(W - 1) - M * 2)
    out += _by_weight(e12_series(A, B, W - 1), rhs, "e12_factor", 1)

    say("defect slices")
    A, B = universal_ab_series(slice_order + 3)
    out += _by_weight(defect_vw(A, B, slice_order), e12_series(A, B, slice_order), "e12", 1)
    out += _by_weight(defect_v2w(A, B, slice_order), e14_series(A, B, slice_order), "e14", 2)
    return out
