"""Graded slices of the associativity ideal and the invariants read off them:
d(n+1), the elements e_n, the order function rho and torsion of graded
components, all by exact integer linear algebra at bounded weight.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Optional, Sequence

from .exact_arith import ExactArithError, Lattice, Membership, QuotientGroup, gcd_extended
from .fgl import FglSpec, associativity_defect, buchstaber_generators, krichever_generators
from .poly import GeneratorSet, GradedPoly, PolyError
from .series import TruncSeries

log = logging.getLogger(__name__)

KINDS = ("buchstaber", "krichever")
MODULI = ("ass", "ass+I2")

INFINITY = None  # rho value for elements of infinite order


class UniversalError(ValueError):
    pass


def d_of(n_plus_1: int) -> int:
    """gcd of the binomials C(n+1, 1), ..., C(n+1, n)."""
    if n_plus_1 < 2:
        raise UniversalError("d(n+1) needs n+1 >= 2")
    g, _ = gcd_extended([comb(n_plus_1, i) for i in range(1, n_plus_1)])
    return g


def prime_power_base(m: int) -> Optional[int]:
    """p if m = p^k for a prime p and k >= 1, else None."""
    if m < 2:
        return None
    p = next(q for q in range(2, m + 1) if m % q == 0)
    while m % p == 0:
        m //= p
    return p if m == 1 else None


def kummer_d(n_plus_1: int) -> int:
    return prime_power_base(n_plus_1) or 1


def binomial_row(n: int) -> list[int]:
    return [comb(n + 1, i) for i in range(1, n + 1)]


def lambda_certificate(n: int) -> list[int]:
    _, lambdas = gcd_extended(binomial_row(n))
    return lambdas


def perturbed_certificate(n: int, lambdas: Sequence[int], t: int = 1) -> list[int]:
    """lambdas plus t times a kernel vector of the binomial row."""
    row = binomial_row(n)
    lam = list(lambdas)
    if n < 2:
        return lam
    g, _ = gcd_extended(row[:2])
    lam[0] += t * row[1] // g
    lam[1] -= t * row[0] // g
    return lam


def e_n(F, n: int, lambdas: Sequence[int] | None = None) -> GradedPoly:
    """lambda_1 a_{1,n} + ... + lambda_n a_{n,1} for a law or its expansion."""
    if n < 1:
        raise UniversalError("n must be >= 1")
    if isinstance(F, FglSpec):
        F = F.expand(n + 1)
    if F.order < n + 1:
        raise UniversalError(f"law must be expanded to degree {n + 1}")
    row = binomial_row(n)
    lambdas = lambda_certificate(n) if lambdas is None else list(lambdas)
    if len(lambdas) != n or sum(l * c for l, c in zip(lambdas, row)) != d_of(n + 1):
        raise UniversalError(f"invalid lambda certificate {lambdas} for n = {n}")
    out = F.gens.zero()
    for i, lam in enumerate(lambdas, start=1):
        if lam:
            out = out + F.coeff((i, n + 1 - i)) * lam
    return out


@dataclass(frozen=True)
class AbelianPresentation:
    """Free rank and torsion invariant factors (each > 1, dividing the next)."""

    free_rank: int
    torsion: tuple[int, ...]
    quotient: QuotientGroup = field(repr=False, compare=False)

    def order_of(self, vec: dict) -> Optional[int]:
        return self.quotient.order_of(vec)

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


class GradedIdealSlice:
    """Weight-w component of Z[generators] and the integer span of the ideal."""

    def __init__(self, ring: "UniversalRing", weight: int, modulo: str = "ass"):
        if modulo not in MODULI:
            raise UniversalError(f"modulo must be one of {MODULI}")
        self.ring = ring
        self.weight = weight
        self.modulo = modulo
        self.basis = ring.basis(weight)
        self.column = {m: i for i, m in enumerate(self.basis)}
        self.nrows = 0

    def _build(self, track: bool) -> Lattice:
        lattice = Lattice(len(self.basis), track=track)
        nrows = 0
        for src, idx, g in self.ring.relations(self.weight, self.modulo):
            wg = next(iter(g.weights()))
            for m in self.ring.gens.monomials_of_weight(self.weight - wg):
                lattice.add({self.column[gm + m]: c for gm, c in g.terms.items()}, tag=(src, idx, m))
                nrows += 1
        self.nrows = nrows
        log.debug("slice w=%d modulo=%s: %d rows, %d columns, rank %d",
                  self.weight, self.modulo, nrows, len(self.basis), lattice.rank)
        return lattice

    @cached_property
    def lattice(self) -> Lattice:
        return self._build(track=False)

    @cached_property
    def tracked_lattice(self) -> Lattice:
        return self._build(track=True)

    def vector(self, p: GradedPoly) -> dict:
        p = self.ring.coerce(p)
        if not p.is_homogeneous(self.weight):
            raise UniversalError(f"{p} is not homogeneous of weight {self.weight}")
        p = p.to_integral()
        return {self.column[m]: c for m, c in p.terms.items()}

    @cached_property
    def presentation(self) -> AbelianPresentation:
        q = self.lattice.quotient()
        return AbelianPresentation(q.free_rank, q.invariant_factors, q)

    def order_of(self, p: GradedPoly) -> Optional[int]:
        return self.presentation.order_of(self.vector(p))

    def membership(self, p: GradedPoly) -> Membership:
        return self.tracked_lattice.contains(self.vector(p))

    def in_rational_span(self, p: GradedPoly) -> bool:
        """True if some nonzero multiple of p lies in the ideal slice.

        p may have rational coefficients.
        """
        p = self.ring.coerce(p)
        if not p:
            return True
        q = (p * p.denominator()).to_integral()
        return self.lattice.rational_order(self.vector(q)) is not None


class UniversalRing:
    """Z[generators] with the associativity ideal of a universal law, known
    through weight ``max_weight``."""

    def __init__(self, kind: str, max_weight: int):
        if kind not in KINDS:
            raise UniversalError(f"kind must be one of {KINDS}")
        if max_weight < 1:
            raise UniversalError("max_weight must be >= 1")
        self.kind = kind
        self.max_weight = max_weight
        if kind == "buchstaber":
            self.spec = FglSpec.universal_buchstaber(max_weight + 1)
        else:
            self.spec = FglSpec.universal_krichever(max_weight + 1)
        self.gens = self.spec.gens
        self.law = self.spec.expand(max_weight + 1)
        self._slices: dict = {}

    @cached_property
    def defect(self) -> TruncSeries:
        return associativity_defect(self.law, self.max_weight + 1)

    @cached_property
    def ideal_generators(self) -> list[GradedPoly]:
        """Defect coefficients of weight <= max_weight, deduplicated up to sign."""
        seen = set()
        out = []
        for e in sorted(self.defect.terms, key=lambda e: (sum(e), tuple(-x for x in e))):
            p = self.defect.terms[e]
            if p in seen or -p in seen:
                continue
            seen.add(p)
            out.append(p)
        return out

    @cached_property
    def law_coefficients(self) -> list[tuple[tuple[int, int], GradedPoly]]:
        """a_{i,j} with i <= j and weight <= max_weight."""
        out = []
        for (i, j), p in sorted(self.law.terms.items(), key=lambda t: (sum(t[0]), t[0])):
            if 1 <= i <= j and i + j - 1 <= self.max_weight:
                out.append(((i, j), p))
        return out

    def relations(self, weight: int, modulo: str):
        """Homogeneous generators of weight <= ``weight`` for the chosen ideal."""
        for idx, g in enumerate(self.ideal_generators):
            if next(iter(g.weights())) <= weight:
                yield "ass", idx, g
        if modulo == "ass+I2":
            coeffs = [p for _, p in self.law_coefficients]
            for x in range(len(coeffs)):
                for y in range(x, len(coeffs)):
                    prod = coeffs[x] * coeffs[y]
                    if prod and next(iter(prod.weights())) <= weight:
                        yield "I2", (x, y), prod

    def basis(self, weight: int) -> list[int]:
        """Weight-w monomials: decomposables first, then graded lex."""
        mons = self.gens.monomials_of_weight(weight)
        deg = self.gens.mono_degree
        unpack = self.gens.unpack
        return sorted(mons, key=lambda m: (-deg(m), tuple(-e for e in unpack(m))))

    def coerce(self, p: GradedPoly) -> GradedPoly:
        if p.gens == self.gens:
            return p
        try:
            return p.rename({}, self.gens)
        except PolyError as exc:
            raise UniversalError(f"cannot express {p} over {self.gens}: {exc}") from None

    def slice(self, weight: int, modulo: str = "ass") -> GradedIdealSlice:
        if weight > self.max_weight:
            raise UniversalError(f"weight {weight} above ring bound {self.max_weight}")
        key = (weight, modulo)
        if key not in self._slices:
            self._slices[key] = GradedIdealSlice(self, weight, modulo)
        return self._slices[key]

    def relation_poly(self, source: str, index) -> GradedPoly:
        if source == "ass":
            return self.ideal_generators[index]
        coeffs = [p for _, p in self.law_coefficients]
        x, y = index
        return coeffs[x] * coeffs[y]

    def membership(self, p: GradedPoly, modulo: str = "ass"):
        """Certificate that p lies in the ideal slice, else the order of p."""
        p = self.coerce(p)
        ws = p.weights()
        if len(ws) > 1:
            raise UniversalError("membership needs a homogeneous polynomial")
        if not ws:
            return Membership(True, certificate={})
        res = self.slice(ws.pop(), modulo).membership(p)
        if res.member and not self.verify_certificate(p, res.certificate):
            raise UniversalError("membership certificate failed to re-verify")
        return res

    def verify_certificate(self, p: GradedPoly, cert: dict) -> bool:
        total = self.gens.zero()
        for (src, idx, m), c in cert.items():
            total = total + self.relation_poly(src, idx) * GradedPoly(self.gens, {m: c})
        return total == self.coerce(p)

    def certificate_json(self, cert: dict) -> list[dict]:
        """Certificate terms as ``coefficient * multiplier * relation``, sorted."""
        out = []
        for (src, idx, m), c in cert.items():
            out.append({
                "source": src,
                "index": list(idx) if isinstance(idx, tuple) else idx,
                "multiplier": list(self.gens.unpack(m)),
                "coefficient": str(c),
                "relation": self.relation_poly(src, idx).to_json(),
            })
        out.sort(key=lambda r: (r["source"], str(r["index"]), r["multiplier"]))
        return out

    def e(self, n: int, lambdas: Sequence[int] | None = None) -> GradedPoly:
        return e_n(self.law, n, lambdas)

    def presentation(self, weight: int, modulo: str = "ass") -> AbelianPresentation:
        return self.slice(weight, modulo).presentation

    def rho(self, n: int, lambdas: Sequence[int] | None = None) -> Optional[int]:
        """Order of e_n modulo I_ass + I^2; None stands for infinity."""
        return self.slice(n, "ass+I2").order_of(self.e(n, lambdas))


_RINGS: dict = {}


def universal_ring(kind: str, max_weight: int) -> UniversalRing:
    """Shared ring instance per (kind, max_weight).

    Keyed exactly, so generator lists in reports never depend on what was
    computed earlier in the process.
    """
    key = (kind, max_weight)
    ring = _RINGS.get(key)
    if ring is None:
        ring = _RINGS[key] = UniversalRing(kind, max_weight)
    return ring


def ideal_generators(kind: str, max_weight: int) -> list[GradedPoly]:
    if max_weight < 2:
        raise UniversalError("max_weight must be >= 2")
    return UniversalRing(kind, max_weight).ideal_generators


def component_presentation(kind: str, weight: int, modulo: str = "ass") -> AbelianPresentation:
    return universal_ring(kind, weight).presentation(weight, modulo)


def rho(kind: str, n: int, lambdas: Sequence[int] | None = None) -> Optional[int]:
    if n < 1:
        raise UniversalError("n must be >= 1")
    return universal_ring(kind, n).rho(n, lambdas)


def expected_rho(n: int) -> Optional[int]:
    """The tabulated value of rho(n) for the universal Buchstaber law."""
    if n <= 4:
        return INFINITY
    p = prime_power_base(n)
    if p is not None:
        return p
    m = n + 2
    if m & (m - 1) == 0 and m >= 8:
        return 2
    return 1


def is_power_of_two(d: int) -> bool:
    return d > 0 and d & (d - 1) == 0


def torsion_scan(kind: str, weight: int) -> dict:
    """Invariant factors of the weight-w component modulo I_ass."""
    pres = component_presentation(kind, weight, "ass")
    odd = [d for d in pres.torsion if not is_power_of_two(d)]
    return {
        "kind": kind,
        "weight": weight,
        "free_rank": pres.free_rank,
        "torsion": list(pres.torsion),
        "only_two_torsion": not odd,
        "flagged": odd,
    }


def membership(p: GradedPoly, kind: str = "buchstaber", modulo: str = "ass"):
    ws = p.weights()
    if len(ws) > 1:
        raise UniversalError("membership needs a homogeneous polynomial")
    w = max(ws) if ws else 1
    return universal_ring(kind, w).membership(p, modulo)


def membership_record(ring: UniversalRing, p: GradedPoly, modulo: str = "ass", certificates: bool = True) -> dict:
    """JSON-ready membership result; a certificate is re-verified before it is reported."""
    res = ring.membership(p, modulo)
    rec = {"poly": p.to_text(), "member": res.member, "order": res.order}
    if certificates and res.member:
        rec["certificate"] = ring.certificate_json(res.certificate)
    return rec


def claim_memberships(W: int, certificates: bool = False) -> list[dict]:
    """2 S_k, S_k and the u^{k-1} coefficient of B' - 2M in the weight-k slice."""
    from .iso import c_from_ab, m_series, s_family, universal_ab_series

    A, B = universal_ab_series(W + 1)
    gens = A.gens
    Ad = {k: A.coeff((k,)) for k in range(1, W + 2) if A.coeff((k,))}
    Bd = {k: B.coeff((k,)) for k in range(1, W + 2) if B.coeff((k,))}
    S = s_family(Ad, c_from_ab(Ad, Bd, W, gens), W, gens)
    M = m_series(A, B, W)
    dB = B.derivative("u")
    ring = universal_ring("buchstaber", W)
    rows = []
    for k in range(3, W + 1):
        claims = [("2S_k", 2 * S[k]), ("S_k", S[k]), ("B'-2M", dB.coeff((k - 1,)) - 2 * M.coeff((k - 1,)))]
        for name, p in claims:
            rec = membership_record(ring, p, "ass", certificates)
            rec.update(claim=name, k=k)
            rows.append(rec)
    return rows


def ideal_coincidence(weight: int) -> dict:
    """Compare, at one weight, I_ass^K with the ideal of Z[chi] generated by
    the images of I_ass^B under A_n, B_n -> their chi expressions."""
    from .iso import ab_from_chi

    RB = universal_ring("buchstaber", weight)
    RK = universal_ring("krichever", weight)
    cd = ab_from_chi(weight + 1)
    assign = {}
    for name in RB.gens.names:
        head, _, idx = name.partition("_")
        fam = cd.A if head == "A" else cd.B
        assign[name] = RK.coerce(fam.get(int(idx), cd.gens.zero()))
    sl = RK.slice(weight, "ass")
    image = Lattice(len(sl.basis), track=False)
    for g in RB.ideal_generators:
        wg = next(iter(g.weights()))
        if wg > weight:
            continue
        h = g.substitute(assign, RK.gens)
        for m in RK.gens.monomials_of_weight(weight - wg):
            image.add({sl.column[gm + m]: c for gm, c in h.terms.items()})
    k_lat = sl.lattice
    b_in_k = all(k_lat.contains(r).member for r in image.rows())
    k_in_b = all(image.contains(r).member for r in k_lat.rows())
    return {"weight": weight, "B_in_K": b_in_k, "K_in_B": k_in_b, "rank": image.rank}
