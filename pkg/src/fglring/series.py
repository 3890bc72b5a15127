"""Truncated power series in up to three formal variables with polynomial
coefficients.

Truncation is by total degree ``order``.  Optionally a series carries
per-variable degree caps, which is how the low-order slices of the
associativity defect are extracted without expanding the full trivariate
series; a capped series is still exact for every monomial it keeps.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Optional, Sequence, Union

from .poly import BITS, GeneratorSet, GradedPoly, PolyError

Exps = tuple


class SeriesError(ValueError):
    pass


def _add_into(acc: dict, terms: dict, scale=1) -> None:
    get = acc.get
    for m, c in terms.items():
        acc[m] = get(m, 0) + scale * c


def _mul_into(acc: dict, a: dict, b: dict) -> None:
    if len(a) > len(b):
        a, b = b, a
    get = acc.get
    bi = list(b.items())
    for m1, c1 in a.items():
        for m2, c2 in bi:
            m = m1 + m2
            acc[m] = get(m, 0) + c1 * c2


class TruncSeries:
    """Immutable truncated series ``{exponent tuple: GradedPoly}``."""

    __slots__ = ("vars", "order", "gens", "caps", "terms")

    def __init__(
        self,
        vars: Sequence[str],
        order: int,
        gens: GeneratorSet,
        terms: Mapping[Exps, Union[GradedPoly, dict]] | None = None,
        caps: Optional[Sequence[Optional[int]]] = None,
    ):
        self.vars = tuple(vars)
        if not 1 <= len(self.vars) <= 3:
            raise SeriesError("series take one to three variables")
        self.order = int(order)
        self.gens = gens
        self.caps = tuple(caps) if caps is not None and any(c is not None for c in caps) else None
        if self.caps is not None and len(self.caps) != len(self.vars):
            raise SeriesError("caps must match variables")
        out = {}
        for e, p in (terms or {}).items():
            e = tuple(e)
            if not self._keeps(e):
                continue
            if isinstance(p, dict):
                p = GradedPoly(gens, p)
            elif not isinstance(p, GradedPoly):
                p = gens.const(p)
            elif p.gens != gens:
                raise SeriesError("coefficient over a different generator set")
            if p:
                out[e] = p
        self.terms = out

    def _keeps(self, e: Exps) -> bool:
        if len(e) != len(self.vars) or min(e) < 0:
            raise SeriesError(f"bad exponent {e}")
        if sum(e) > self.order:
            return False
        if self.caps is not None:
            return all(c is None or x <= c for x, c in zip(e, self.caps))
        return True

    # constructors

    def like(self, terms: Mapping[Exps, Union[GradedPoly, dict]], order: int | None = None, caps="same") -> "TruncSeries":
        return TruncSeries(
            self.vars,
            self.order if order is None else order,
            self.gens,
            terms,
            self.caps if caps == "same" else caps,
        )

    @classmethod
    def variable(cls, vars, order, gens, name, caps=None) -> "TruncSeries":
        vars = tuple(vars)
        e = tuple(int(v == name) for v in vars)
        if sum(e) != 1:
            raise SeriesError(f"{name!r} is not one of {vars}")
        return cls(vars, order, gens, {e: gens.one()}, caps)

    @classmethod
    def constant(cls, vars, order, gens, c, caps=None) -> "TruncSeries":
        c = c if isinstance(c, GradedPoly) else gens.const(c)
        return cls(vars, order, gens, {(0,) * len(vars): c}, caps)

    @classmethod
    def univariate(cls, gens, coeffs: Iterable, order: int, var: str = "u") -> "TruncSeries":
        """``sum coeffs[k] * var**k`` truncated at ``order``."""
        return cls((var,), order, gens, {(k,): c for k, c in enumerate(coeffs) if k <= order})

    # protocol

    def __repr__(self):
        return f"TruncSeries({self.vars}, order={self.order}, {len(self.terms)} terms)"

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.vars == other.vars
            and self.order == other.order
            and self.gens == other.gens
            and self.caps == other.caps
            and self.terms == other.terms
        )

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, exps: Sequence[int]) -> GradedPoly:
        return self.terms.get(tuple(exps), self.gens.zero())

    def degrees(self) -> list[int]:
        return sorted({sum(e) for e in self.terms})

    def _check(self, other: "TruncSeries") -> None:
        if self.vars != other.vars or self.order != other.order:
            raise SeriesError(f"series mismatch: {self.vars}/{self.order} vs {other.vars}/{other.order}")
        if self.caps != other.caps:
            raise SeriesError("series truncation caps differ")
        if self.gens != other.gens:
            raise SeriesError("series over different generator sets")

    def _as_series(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        if isinstance(other, (GradedPoly, Rational)):
            return TruncSeries.constant(self.vars, self.order, self.gens, other, self.caps)
        return NotImplemented

    # arithmetic

    def __add__(self, other):
        other = self._as_series(other)
        if other is NotImplemented:
            return other
        out = {e: dict(p.terms) for e, p in self.terms.items()}
        for e, p in other.terms.items():
            _add_into(out.setdefault(e, {}), p.terms)
        return self.like(out)

    __radd__ = __add__

    def __neg__(self):
        return self.like({e: -p for e, p in self.terms.items()})

    def __sub__(self, other):
        other = self._as_series(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        return self.like({e: p * c for e, p in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (GradedPoly, Rational)):
            return self.scale(other)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        high = self.gens._high
        mask = 0
        for p in self.terms.values():
            mask |= p._or_mask()
        for p in other.terms.values():
            mask |= p._or_mask()
        if mask & high:
            raise PolyError("exponent too large for packed monomials")
        n = self.order
        caps = self.caps
        b_items = sorted(((sum(e), e, p.terms) for e, p in other.terms.items()), key=lambda t: t[0])
        out: dict = {}
        for ea, pa in self.terms.items():
            da = sum(ea)
            ta = pa.terms
            for db, eb, tb in b_items:
                if da + db > n:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                if caps is not None and any(c is not None and x > c for x, c in zip(e, caps)):
                    continue
                acc = out.get(e)
                if acc is None:
                    out[e] = acc = {}
                _mul_into(acc, ta, tb)
        return self.like(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = TruncSeries.constant(self.vars, self.order, self.gens, 1, self.caps)
        for _ in range(k):
            result = result * self
        return result

    def constant_term(self) -> GradedPoly:
        return self.coeff((0,) * len(self.vars))

    def invert_unit(self) -> "TruncSeries":
        """Multiplicative inverse; the constant term must be 1 or -1."""
        c0 = self.constant_term()
        if c0 != 1 and c0 != -1:
            raise SeriesError(f"constant term {c0} is not a unit")
        u = c0.constant_term()
        by_deg: dict[int, list] = {}
        for e, p in self.terms.items():
            d = sum(e)
            if d:
                by_deg.setdefault(d, []).append((e, p.terms))
        inv_by_deg: dict[int, list] = {0: [((0,) * len(self.vars), {0: u})]}
        caps = self.caps
        result = {((0,) * len(self.vars)): {0: u}}
        for d in range(1, self.order + 1):
            acc: dict = {}
            for k in range(1, d + 1):
                for es, ts in by_deg.get(k, ()):
                    for ei, ti in inv_by_deg.get(d - k, ()):
                        e = tuple(x + y for x, y in zip(es, ei))
                        if caps is not None and any(c is not None and x > c for x, c in zip(e, caps)):
                            continue
                        _mul_into(acc.setdefault(e, {}), ts, ti)
            layer = []
            for e, t in acc.items():
                t = {m: -u * c for m, c in t.items() if c}
                if t:
                    layer.append((e, t))
                    result[e] = t
            inv_by_deg[d] = layer
        return self.like(result)

    def _var(self, var: Union[str, int]) -> int:
        if isinstance(var, int):
            return var
        try:
            return self.vars.index(var)
        except ValueError:
            raise SeriesError(f"unknown variable {var!r}") from None

    def _shift_caps(self, i: int, delta: int):
        if self.caps is None or self.caps[i] is None:
            return self.caps
        caps = list(self.caps)
        caps[i] += delta
        return caps

    def divide_by(self, var: Union[str, int] = 0) -> "TruncSeries":
        """Exact division by a variable; the order drops by one."""
        i = self._var(var)
        bad = {e: p for e, p in self.terms.items() if e[i] == 0}
        if bad:
            e, p = min(bad.items())
            raise SeriesError(f"not divisible by {self.vars[i]}: coefficient at {e} is {p}")
        out = {}
        for e, p in self.terms.items():
            e = list(e)
            e[i] -= 1
            out[tuple(e)] = p
        return self.like(out, order=self.order - 1, caps=self._shift_caps(i, -1))

    def divide_by_difference(self, x: Union[str, int] = 0, y: Union[str, int] = 1) -> "TruncSeries":
        """Exact division by (x - y), one y-power slice at a time.

        Any remainder is an error: ``x`` must be uncapped and every slice
        ``P_j + Q_{j-1}`` must vanish at x = 0.
        """
        i, j = self._var(x), self._var(y)
        if self.caps is not None and self.caps[i] is not None:
            raise SeriesError("cannot divide by (x - y) with x capped")
        n = self.order
        top = n if self.caps is None or self.caps[j] is None else min(n, self.caps[j])
        slices: dict[int, dict] = {}
        for e, p in self.terms.items():
            slices.setdefault(e[j], {})[e] = p.terms
        out: dict = {}
        prev: dict = {}  # Q_{j-1} as {exps with y-exponent j-1: terms}
        for k in range(top + 1):
            cur: dict = {}
            for e, t in slices.get(k, {}).items():
                _add_into(cur.setdefault(e, {}), t)
            for e, t in prev.items():
                if sum(e) + 1 > n:
                    continue
                e2 = list(e)
                e2[j] += 1
                _add_into(cur.setdefault(tuple(e2), {}), t)
            nxt = {}
            for e, t in cur.items():
                t = {m: c for m, c in t.items() if c}
                if not t:
                    continue
                if e[i] == 0:
                    raise SeriesError(
                        f"nonzero remainder dividing by ({self.vars[i]} - {self.vars[j]}) "
                        f"at {e}: {GradedPoly(self.gens, t)}"
                    )
                e2 = list(e)
                e2[i] -= 1
                e2 = tuple(e2)
                nxt[e2] = t
                out[e2] = t
            prev = nxt
        return self.like(out, order=n - 1)

    def swap(self, x: Union[str, int] = 0, y: Union[str, int] = 1) -> "TruncSeries":
        i, j = self._var(x), self._var(y)

        def sw(seq):
            seq = list(seq)
            seq[i], seq[j] = seq[j], seq[i]
            return tuple(seq)

        return TruncSeries(self.vars, self.order, self.gens, {sw(e): p for e, p in self.terms.items()},
                           sw(self.caps) if self.caps else None)

    def is_symmetric(self, x=0, y=1) -> bool:
        return self.swap(x, y).terms == self.terms

    def is_antisymmetric(self, x=0, y=1) -> bool:
        return self.swap(x, y).terms == (-self).terms

    def derivative(self, var: Union[str, int] = 0) -> "TruncSeries":
        i = self._var(var)
        out = {}
        for e, p in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = p * e[i]
        return self.like(out, order=self.order - 1, caps=self._shift_caps(i, -1))

    def integrate(self, var: Union[str, int] = 0) -> "TruncSeries":
        """Antiderivative with zero constant; coefficients become rational."""
        i = self._var(var)
        out = {}
        for e, p in self.terms.items():
            e2 = list(e)
            e2[i] += 1
            out[tuple(e2)] = p * Fraction(1, e[i] + 1)
        return self.like(out, order=self.order + 1, caps=self._shift_caps(i, 1))

    def truncate(self, order: int) -> "TruncSeries":
        return self.like(self.terms, order=min(order, self.order))

    def with_caps(self, caps) -> "TruncSeries":
        return self.like(self.terms, caps=caps)

    def embed(self, vars: Sequence[str], order: int | None = None, caps=None) -> "TruncSeries":
        """Re-express in a larger variable list (by name)."""
        vars = tuple(vars)
        pos = [vars.index(v) for v in self.vars]
        out = {}
        for e, p in self.terms.items():
            e2 = [0] * len(vars)
            for k, x in zip(pos, e):
                e2[k] = x
            out[tuple(e2)] = p
        return TruncSeries(vars, self.order if order is None else order, self.gens, out, caps)

    def rename(self, vars: Sequence[str]) -> "TruncSeries":
        return TruncSeries(vars, self.order, self.gens, self.terms, self.caps)

    def extract(self, fixed: Mapping[str, int]) -> "TruncSeries":
        """Coefficient of a monomial in some variables, as a series in the rest."""
        idx = {self._var(v): k for v, k in fixed.items()}
        keep = [i for i in range(len(self.vars)) if i not in idx]
        if not keep:
            raise SeriesError("extract must leave at least one variable")
        out = {}
        for e, p in self.terms.items():
            if all(e[i] == k for i, k in idx.items()):
                out[tuple(e[i] for i in keep)] = p
        caps = [self.caps[i] for i in keep] if self.caps else None
        return TruncSeries([self.vars[i] for i in keep], self.order - sum(idx.values()), self.gens, out, caps)

    def map_coeffs(self, fn) -> "TruncSeries":
        return self.like({e: fn(p) for e, p in self.terms.items()})

    def is_graded(self, shift: int = -1) -> bool:
        """Coefficient of a degree-d monomial is homogeneous of weight d + shift."""
        return all(p.is_homogeneous(sum(e) + shift) for e, p in self.terms.items())

    def first_difference(self, other: "TruncSeries"):
        """Smallest exponent where two series differ, or None."""
        for e in sorted(self.terms.keys() | other.terms.keys(), key=lambda e: (sum(e), e)):
            if self.coeff(e) != other.coeff(e):
                return e
        return None

    def to_json(self) -> dict:
        terms = sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]))
        data = {"vars": list(self.vars), "order": self.order, "terms": [[list(e), p.to_json()] for e, p in terms]}
        if self.caps:
            data["caps"] = list(self.caps)
        return data

    @classmethod
    def from_json(cls, gens: GeneratorSet, data: dict) -> "TruncSeries":
        terms = {tuple(e): GradedPoly.from_json(gens, p) for e, p in data["terms"]}
        return cls(data["vars"], data["order"], gens, terms, data.get("caps"))


def divide_antisym(p: TruncSeries, q: TruncSeries, x=0, y=1) -> TruncSeries:
    """p/q for antisymmetric p, q: both divided by (x - y), then q inverted."""
    p._check(q)
    if p.caps is None:
        if not p.is_antisymmetric(x, y):
            raise SeriesError("numerator is not antisymmetric")
        if not q.is_antisymmetric(x, y):
            raise SeriesError("denominator is not antisymmetric")
    num = p.divide_by_difference(x, y)
    den = q.divide_by_difference(x, y)
    return num * den.invert_unit()


def compose(outer: TruncSeries, inners: Sequence[TruncSeries]) -> TruncSeries:
    """Substitute ``inners[k]`` for the k-th variable of ``outer``.

    Every inner series must have zero constant term and share variables,
    order and caps.  Horner evaluation runs over layers of the first outer
    variable; the remaining variables use cached powers.
    """
    if len(inners) != len(outer.vars):
        raise SeriesError("need one inner series per outer variable")
    tmpl = inners[0]
    for s in inners:
        tmpl._check(s)
        if s.constant_term():
            raise SeriesError("inner series must have zero constant term")
    if outer.gens != tmpl.gens:
        raise SeriesError("outer and inner series over different generator sets")
    powers: list[list[TruncSeries]] = [[] for _ in inners]

    def power(k: int, e: int) -> TruncSeries:
        pw = powers[k]
        if not pw:
            pw.append(TruncSeries.constant(tmpl.vars, tmpl.order, tmpl.gens, 1, tmpl.caps))
        while len(pw) <= e:
            pw.append(pw[-1] * inners[k])
        return pw[e]

    def evaluate(terms: dict, k: int) -> TruncSeries:
        # terms: {exps over outer vars k..: poly}
        if k == len(inners) - 1:
            acc: dict = {}
            for e, p in terms.items():
                pw = power(k, e[0])
                for ex, t in pw.terms.items():
                    _mul_into(acc.setdefault(ex, {}), p.terms, t.terms)
            return tmpl.like(acc)
        layers: dict[int, dict] = {}
        for e, p in terms.items():
            layers.setdefault(e[0], {})[e[1:]] = p
        top = max(layers)
        acc = evaluate(layers[top], k + 1)
        for i in range(top - 1, -1, -1):
            acc = acc * inners[k]
            if i in layers:
                acc = acc + evaluate(layers[i], k + 1)
        return acc

    if not outer.terms:
        return tmpl.like({})
    return evaluate(outer.terms, 0)


def reversion(s: TruncSeries) -> TruncSeries:
    """Functional inverse of a univariate series with s(0) = 0, s'(0) = 1."""
    if len(s.vars) != 1:
        raise SeriesError("reversion needs a univariate series")
    if s.constant_term() or s.coeff((1,)) != 1:
        raise SeriesError("reversion needs s(0) = 0 and s'(0) = 1")
    x = TruncSeries.variable(s.vars, s.order, s.gens, s.vars[0])
    h = s - x
    f = x
    # each pass of f <- x - h(f) fixes one more degree
    for _ in range(s.order):
        f = x - compose(h, [f]) if h else x
    return f
