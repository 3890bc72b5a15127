"""Formal group laws: Buchstaber and Krichever expansions, associativity
defect, logarithm and exponential.

All bivariate laws are series in ``(u, v)``; the defect lives in
``(u, v, w)``.  A law truncated at total degree N determines every
coefficient a_{i,j} of weight <= N - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .poly import GeneratorSet, GradedPoly
from .series import SeriesError, TruncSeries, compose, divide_antisym, reversion

UV = ("u", "v")
UVW = ("u", "v", "w")


class FglError(ValueError):
    pass


# generator sets for the universal laws


def buchstaber_generators(max_weight: int) -> GeneratorSet:
    """A_1, A_3, A_4, ..., B_2, B_3, ... (A_2 = B_1 = 0)."""
    a_idx = [k for k in range(1, max_weight + 1) if k != 2]
    b_idx = list(range(2, max_weight + 1))
    return GeneratorSet.family("A", a_idx) + GeneratorSet.family("B", b_idx)


def krichever_generators(max_weight: int, prefix: str = "chi") -> GeneratorSet:
    return GeneratorSet.family(prefix, range(1, max_weight + 1))


def generic_generators(order: int) -> GeneratorSet:
    """a_i_j, 1 <= i <= j, i + j <= order, of weight i + j - 1."""
    pairs = [(i, d - i) for d in range(2, order + 1) for i in range(1, d // 2 + 1)]
    return GeneratorSet([f"a_{i}_{j}" for i, j in pairs], [i + j - 1 for i, j in pairs])


def family(gens: GeneratorSet, prefix: str) -> dict[int, GradedPoly]:
    """``{n: generator prefix_n}`` for every such generator in ``gens``."""
    out = {}
    for name in gens.names:
        head, _, idx = name.rpartition("_")
        if head == prefix and idx.isdigit():
            out[int(idx)] = gens.gen(name)
    return out


def series_from_family(gens: GeneratorSet, coeffs: Mapping[int, GradedPoly], order: int, var: str = "u") -> TruncSeries:
    """1 + sum coeffs[k] u^k, truncated."""
    terms = {(0,): gens.one()}
    for k, p in coeffs.items():
        if 1 <= k <= order:
            terms[(k,)] = p
    return TruncSeries((var,), order, gens, terms)


@dataclass(frozen=True)
class FglSpec:
    """Tagged description of a formal group law.

    ``generic``: coefficient table ``{(i, j): a_ij}``; ``buchstaber``: the
    series A, B; ``krichever``: ``{n: chi_n}`` (absent indices are zero).
    """

    kind: str
    gens: GeneratorSet
    coefficients: Optional[Mapping[tuple[int, int], GradedPoly]] = None
    A: Optional[TruncSeries] = None
    B: Optional[TruncSeries] = None
    chi: Optional[Mapping[int, GradedPoly]] = field(default=None)

    @classmethod
    def generic(cls, gens, coefficients):
        for (i, j), p in coefficients.items():
            if i < 1 or j < 1:
                raise FglError("generic coefficients need i, j >= 1")
            if coefficients.get((j, i), gens.zero()) != p:
                raise FglError(f"a_{i},{j} != a_{j},{i}: the law must be commutative")
        return cls("generic", gens, coefficients=dict(coefficients))

    @classmethod
    def buchstaber(cls, A: TruncSeries, B: TruncSeries, strict: bool = True):
        check_buchstaber(A, B, strict)
        return cls("buchstaber", A.gens, A=A, B=B)

    @classmethod
    def krichever(cls, gens, chi: Mapping[int, GradedPoly] | None = None):
        return cls("krichever", gens, chi=dict(family(gens, "chi") if chi is None else chi))

    @classmethod
    def universal_generic(cls, order: int):
        """Commutative law with independent symbols a_i_j; not associative."""
        gens = generic_generators(order)
        coeffs = {}
        for name in gens.names:
            _, i, j = name.split("_")
            i, j = int(i), int(j)
            coeffs[i, j] = coeffs[j, i] = gens.gen(name)
        return cls.generic(gens, coeffs)

    @classmethod
    def universal_buchstaber(cls, max_weight: int):
        gens = buchstaber_generators(max_weight)
        A = series_from_family(gens, family(gens, "A"), max_weight)
        B = series_from_family(gens, family(gens, "B"), max_weight)
        return cls.buchstaber(A, B)

    @classmethod
    def universal_krichever(cls, max_weight: int):
        return cls.krichever(krichever_generators(max_weight))

    def expand(self, order: int, caps=None) -> TruncSeries:
        if self.kind == "generic":
            terms = {(1, 0): self.gens.one(), (0, 1): self.gens.one()}
            terms.update(self.coefficients)
            return TruncSeries(UV, order, self.gens, terms, caps)
        if self.kind == "buchstaber":
            return buchstaber_expand(self.A, self.B, order, caps=caps, strict=False)
        if self.kind == "krichever":
            return krichever_expand(self.gens, order, chi=self.chi, caps=caps)
        raise FglError(f"unknown kind {self.kind!r}")


def coefficient(F: TruncSeries, i: int, j: int) -> GradedPoly:
    """a_{i,j} of an expanded law."""
    return F.coeff((i, j))


def check_buchstaber(A: TruncSeries, B: TruncSeries, strict: bool = True) -> None:
    if A.constant_term() != 1 or B.constant_term() != 1:
        raise FglError("Buchstaber law needs A(0) = B(0) = 1")
    if strict and (A.coeff((2,)) or B.coeff((1,))):
        raise FglError("Buchstaber law is normalized by A_2 = B_1 = 0")


def _bivariate(s: TruncSeries, var: str, order: int, shift=(0, 0), caps=None) -> TruncSeries:
    """(u^a v^b) * s(var) as a series in (u, v)."""
    k = UV.index(var)
    terms = {}
    for (n,), p in s.terms.items():
        e = [shift[0], shift[1]]
        e[k] += n
        terms[tuple(e)] = p
    return TruncSeries(UV, order, s.gens, terms, caps)


def buchstaber_expand(A: TruncSeries, B: TruncSeries, order: int, caps=None, strict: bool = True) -> TruncSeries:
    """(u^2 A(v) - v^2 A(u)) / (u B(v) - v B(u)) to total degree ``order``."""
    check_buchstaber(A, B, strict)
    if order < 2:
        raise FglError("order must be >= 2")
    n = order + 1
    num = _bivariate(A, "v", n, (2, 0), caps) - _bivariate(A, "u", n, (0, 2), caps)
    den = _bivariate(B, "v", n, (1, 0), caps) - _bivariate(B, "u", n, (0, 1), caps)
    return divide_antisym(num, den)


def b_series(gens: GeneratorSet, order: int, chi: Mapping[int, GradedPoly] | None = None) -> TruncSeries:
    """b(u) = 1 + chi_1 u + sum_i (chi_{2i} u^{2i} + 2 chi_{2i+1} u^{2i+1})."""
    chi = family(gens, "chi") if chi is None else chi
    coeffs = {}
    for m in range(1, order + 1):
        c = chi.get(m)
        if c is None:
            continue
        coeffs[m] = c if m == 1 or m % 2 == 0 else 2 * c
    return series_from_family(gens, coeffs, order)


def beta_series(gens: GeneratorSet, order: int, chi: Mapping[int, GradedPoly] | None = None) -> TruncSeries:
    """beta(u) = sum_k ((k+1) chi_{2k+2} u^{2k} + (2k+3) chi_{2k+3} u^{2k+1})."""
    chi = family(gens, "chi") if chi is None else chi
    terms = {}
    for m in range(order + 1):
        c = chi.get(m + 2)
        if c is None:
            continue
        k = m // 2
        terms[(m,)] = (k + 1) * c if m % 2 == 0 else (2 * k + 3) * c
    return TruncSeries(("u",), order, gens, terms)


def krichever_expand(gens: GeneratorSet, order: int, chi: Mapping[int, GradedPoly] | None = None, caps=None) -> TruncSeries:
    """u b(v) + v b(u) - chi_1 u v + u^2 v^2 (b(u)beta(u) - b(v)beta(v)) / (u b(v) - v b(u))."""
    if order < 2:
        raise FglError("order must be >= 2")
    chi = family(gens, "chi") if chi is None else chi
    b = b_series(gens, order, chi)
    chi1 = chi.get(1, gens.zero())
    F = _bivariate(b, "v", order, (1, 0), caps) + _bivariate(b, "u", order, (0, 1), caps)
    F = F - TruncSeries(UV, order, gens, {(1, 1): chi1}, caps)
    if order >= 4:
        n = order - 3
        bb = b.truncate(n) * beta_series(gens, n, chi)
        num = _bivariate(bb, "u", n) - _bivariate(bb, "v", n)
        bn = b.truncate(n)
        den = _bivariate(bn, "v", n, (1, 0)) - _bivariate(bn, "u", n, (0, 1))
        frac = divide_antisym(num, den)
        shifted = {(e[0] + 2, e[1] + 2): p for e, p in frac.terms.items()}
        F = F + TruncSeries(UV, order, gens, shifted, caps)
    return F


def associativity_defect(F: TruncSeries, order: int | None = None, caps=None) -> TruncSeries:
    """F(F(u,v),w) - F(u,F(v,w)) in (u, v, w)."""
    if F.vars != UV:
        raise FglError("expected a law in (u, v)")
    order = F.order if order is None else order
    if order > F.order:
        raise FglError(f"law known to degree {F.order}, defect requested to {order}")
    if F.coeff((1, 0)) != 1 or F.coeff((0, 1)) != 1 or F.constant_term():
        raise FglError("law must satisfy F(u,0) = u and F(0,v) = v to first order")
    gens = F.gens
    w = TruncSeries.variable(UVW, order, gens, "w", caps)
    u = TruncSeries.variable(UVW, order, gens, "u", caps)
    X = F.embed(UVW, order, caps)
    G = compose(F, [X, w])
    if caps is None and F.is_symmetric():
        # F(u, F(v, w)) = F(F(w, v), u)
        return G - G.swap("u", "w")
    Y = F.rename(("v", "w")).embed(UVW, order, caps)
    H = compose(F, [u, Y])
    return G - H


def logarithm(F: TruncSeries, order: int | None = None) -> TruncSeries:
    """g with g' = 1 / F_v(u, 0); coefficients rational."""
    order = F.order if order is None else order
    if order > F.order:
        raise FglError("law not expanded far enough")
    gens = F.gens
    terms = {(0,): gens.one()}
    for (i, j), p in F.terms.items():
        if j == 1 and 1 <= i < order:
            terms[(i,)] = p
    dF = TruncSeries(("u",), order - 1, gens, terms)
    return dF.invert_unit().integrate("u")


def exponential(F: TruncSeries, order: int | None = None, var: str = "x") -> TruncSeries:
    """Reversion of the logarithm, as a series in ``var``."""
    g = logarithm(F, order)
    return reversion(g).rename((var,))


def addition_law_difference(F: TruncSeries, f: TruncSeries) -> TruncSeries:
    """F(f(x), f(y)) - f(x + y) in (x, y), to the common order."""
    n = min(F.order, f.order)
    XY = ("x", "y")
    fx = f.rename(("x",)).embed(XY, n)
    fy = f.rename(("y",)).embed(XY, n)
    lhs = compose(F.truncate(n), [fx, fy])
    s = TruncSeries(XY, n, F.gens, {(1, 0): F.gens.one(), (0, 1): F.gens.one()})
    rhs = compose(f.rename(("t",)).truncate(n), [s])
    return lhs - rhs


def addition_law_holds(F: TruncSeries, f: TruncSeries) -> bool:
    """Check f(x + y) == F(f(x), f(y)) to the common order."""
    return not addition_law_difference(F, f)
