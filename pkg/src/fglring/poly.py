"""Sparse multivariate polynomials in weighted generators.

A monomial is packed into one Python int, ``BITS`` bits per generator, so
monomial multiplication is integer addition.  Coefficients are ``int`` or
``Fraction``; nothing coerces between them behind your back, use
:meth:`GradedPoly.is_integral` where integrality is claimed.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from functools import reduce
from math import lcm
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

BITS = 8
_FIELD = (1 << BITS) - 1

Coeff = Union[int, Fraction]


class PolyError(ValueError):
    pass


class GeneratorSet:
    """Ordered, uniquely named generators with positive integer weights."""

    def __init__(self, names: Sequence[str], weights: Sequence[int]):
        names = tuple(names)
        weights = tuple(int(w) for w in weights)
        if len(names) != len(weights):
            raise PolyError("names and weights differ in length")
        if len(set(names)) != len(names):
            raise PolyError("generator names must be unique")
        if any(w < 1 for w in weights):
            raise PolyError("generator weights must be >= 1")
        self.names = names
        self.weights = weights
        self._index = {n: i for i, n in enumerate(names)}
        self._high = sum(1 << (BITS * i + BITS - 1) for i in range(len(names)))
        self._wcache: dict[int, int] = {}

    @classmethod
    def family(cls, prefix: str, indices: Iterable[int]) -> "GeneratorSet":
        """Generators ``prefix_n`` of weight n."""
        idx = list(indices)
        return cls([f"{prefix}_{n}" for n in idx], idx)

    def __add__(self, other: "GeneratorSet") -> "GeneratorSet":
        return GeneratorSet(self.names + other.names, self.weights + other.weights)

    def __eq__(self, other):
        return self is other or (
            isinstance(other, GeneratorSet)
            and self.names == other.names
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.names, self.weights))

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def __repr__(self):
        return f"GeneratorSet({list(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PolyError(f"unknown generator {name!r}") from None

    def weight(self, name: str) -> int:
        return self.weights[self.index(name)]

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != len(self.names):
            raise PolyError("exponent vector has wrong length")
        m = 0
        for i, e in enumerate(exps):
            if not 0 <= e <= _FIELD >> 1:
                raise PolyError(f"exponent {e} out of range")
            m |= e << (BITS * i)
        return m

    def unpack(self, m: int) -> tuple[int, ...]:
        return tuple((m >> (BITS * i)) & _FIELD for i in range(len(self.names)))

    def mono_weight(self, m: int) -> int:
        w = self._wcache.get(m)
        if w is None:
            w = 0
            i = 0
            x = m
            while x:
                w += (x & _FIELD) * self.weights[i]
                x >>= BITS
                i += 1
            self._wcache[m] = w
        return w

    def mono_degree(self, m: int) -> int:
        d = 0
        while m:
            d += m & _FIELD
            m >>= BITS
        return d

    def gen(self, name: str) -> "GradedPoly":
        return GradedPoly(self, {1 << (BITS * self.index(name)): 1})

    def const(self, c: Coeff) -> "GradedPoly":
        return GradedPoly(self, {0: c} if c else {})

    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def one(self) -> "GradedPoly":
        return GradedPoly(self, {0: 1})

    def monomials_of_weight(self, w: int) -> list[int]:
        """All packed monomials of weight exactly ``w``, deterministic order."""
        out: list[int] = []
        n = len(self.names)

        def rec(i, left, m):
            if left == 0:
                out.append(m)
                return
            if i == n:
                return
            wi = self.weights[i]
            for e in range(left // wi, -1, -1):
                rec(i + 1, left - e * wi, m | (e << (BITS * i)))

        rec(0, w, 0)
        return out


def _clean(terms: dict) -> dict:
    return {m: c for m, c in terms.items() if c}


class GradedPoly:
    """Immutable sparse polynomial over a :class:`GeneratorSet`."""

    __slots__ = ("gens", "terms", "_or")

    def __init__(self, gens: GeneratorSet, terms: Mapping[int, Coeff] | None = None):
        self.gens = gens
        self.terms = _clean(terms) if terms else {}
        self._or = None

    # construction helpers

    @classmethod
    def from_dict(cls, gens: GeneratorSet, data: Mapping[Union[str, tuple], Coeff]) -> "GradedPoly":
        """Build from ``{exponent-tuple or generator-name: coeff}``."""
        terms: dict[int, Coeff] = {}
        for key, c in data.items():
            if isinstance(key, str):
                m = 1 << (BITS * gens.index(key))
            else:
                m = gens.pack(key)
            terms[m] = terms.get(m, 0) + c
        return cls(gens, terms)

    # basic protocol

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"GradedPoly({self.to_text()})"

    def __str__(self):
        return self.to_text()

    def __eq__(self, other):
        if isinstance(other, GradedPoly):
            return self.gens == other.gens and self.terms == other.terms
        if isinstance(other, Rational):
            return self.terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            if other.gens != self.gens:
                raise PolyError("generator sets differ")
            return other
        if isinstance(other, Rational):
            return self.gens.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            out[m] = out.get(m, 0) + c
        return GradedPoly(self.gens, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly(self.gens, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _or_mask(self) -> int:
        if self._or is None:
            self._or = reduce(int.__or__, self.terms, 0)
        return self._or

    def __mul__(self, other):
        if isinstance(other, Rational):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if (self._or_mask() | other._or_mask()) & self.gens._high:
            raise PolyError("exponent too large for packed monomials")
        return GradedPoly(self.gens, mul_terms(self.terms, other.terms))

    __rmul__ = __mul__

    def scale(self, c: Coeff) -> "GradedPoly":
        if not c:
            return self.gens.zero()
        return GradedPoly(self.gens, {m: c * x for m, x in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise PolyError("negative power")
        result = self.gens.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # grading

    def weights(self) -> set[int]:
        mw = self.gens.mono_weight
        return {mw(m) for m in self.terms}

    def weight_component(self, w: int) -> "GradedPoly":
        mw = self.gens.mono_weight
        return GradedPoly(self.gens, {m: c for m, c in self.terms.items() if mw(m) == w})

    def components(self) -> dict[int, "GradedPoly"]:
        """Weight filtration: ``{w: component}``, summing back to self."""
        mw = self.gens.mono_weight
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(mw(m), {})[m] = c
        return {w: GradedPoly(self.gens, t) for w, t in sorted(parts.items())}

    def is_homogeneous(self, w: int | None = None) -> bool:
        ws = self.weights()
        if not ws:
            return True
        return len(ws) == 1 and (w is None or ws == {w})

    def linear_part(self) -> "GradedPoly":
        md = self.gens.mono_degree
        return GradedPoly(self.gens, {m: c for m, c in self.terms.items() if md(m) == 1})

    def constant_term(self) -> Coeff:
        return self.terms.get(0, 0)

    def coeff(self, exps: Union[Sequence[int], str]) -> Coeff:
        m = 1 << (BITS * self.gens.index(exps)) if isinstance(exps, str) else self.gens.pack(exps)
        return self.terms.get(m, 0)

    def variables(self) -> set[str]:
        used = self._or_mask()
        return {n for i, n in enumerate(self.gens.names) if (used >> (BITS * i)) & _FIELD}

    # coefficient domain

    def is_integral(self) -> bool:
        return all(
            isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1)
            for c in self.terms.values()
        )

    def denominator(self) -> int:
        return lcm(1, *(Fraction(c).denominator for c in self.terms.values()))

    def to_integral(self) -> "GradedPoly":
        if not self.is_integral():
            raise PolyError(f"non-integral coefficients in {self}")
        return GradedPoly(self.gens, {m: int(c) for m, c in self.terms.items()})

    def to_rational(self) -> "GradedPoly":
        return GradedPoly(self.gens, {m: Fraction(c) for m, c in self.terms.items()})

    # maps between rings

    def substitute(self, assignment: Mapping[str, "GradedPoly"], target: GeneratorSet | None = None) -> "GradedPoly":
        """Replace each generator by a homogeneous polynomial of equal weight."""
        used = self.variables()
        missing = sorted(used - set(assignment))
        if missing:
            raise PolyError(f"no assignment for {missing}")
        if target is None:
            target = next(iter(assignment.values())).gens if assignment else self.gens
        for name in used:
            img = assignment[name]
            if img.gens != target:
                raise PolyError(f"image of {name} lives over a different generator set")
            if not img.is_homogeneous(self.gens.weight(name)):
                raise PolyError(f"image of {name} is not homogeneous of weight {self.gens.weight(name)}")
        powers: dict[tuple[int, int], GradedPoly] = {}

        def power(i, e):
            key = (i, e)
            if key not in powers:
                powers[key] = assignment[self.gens.names[i]] ** e
            return powers[key]

        out = target.zero()
        for m, c in self.terms.items():
            term = target.const(c)
            for i, e in enumerate(self.gens.unpack(m)):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def rename(self, mapping: Mapping[str, str], target: GeneratorSet) -> "GradedPoly":
        """Move monomials to ``target`` by renaming generators one to one."""
        shift = []
        for i, name in enumerate(self.gens.names):
            new = mapping.get(name, name)
            shift.append(target.index(new) if new in target else None)
        out: dict[int, Coeff] = {}
        for m, c in self.terms.items():
            nm = 0
            for i, e in enumerate(self.gens.unpack(m)):
                if e:
                    if shift[i] is None:
                        raise PolyError(f"{self.gens.names[i]} has no image in target")
                    nm += e << (BITS * shift[i])
            out[nm] = out.get(nm, 0) + c
        return GradedPoly(target, out)

    def exact_div(self, other: "GradedPoly") -> "GradedPoly":
        """Exact quotient self/other; raises if the division leaves a remainder."""
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        key = self.gens.unpack
        lead_m = max(other.terms, key=key)
        lead_e = key(lead_m)
        lead_c = other.terms[lead_m]
        rest = self
        q: dict[int, Coeff] = {}
        while rest:
            m = max(rest.terms, key=key)
            e = key(m)
            if any(a < b for a, b in zip(e, lead_e)):
                raise PolyError("division leaves a remainder")
            c = Fraction(rest.terms[m]) / lead_c
            if c.denominator == 1:
                c = int(c)
            qm = m - lead_m
            q[qm] = c
            rest = rest - GradedPoly(self.gens, {qm: c}) * other
        return GradedPoly(self.gens, q)

    # rendering

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Coeff]]:
        mw = self.gens.mono_weight
        items = [(mw(m), self.gens.unpack(m), c) for m, c in self.terms.items()]
        items.sort(key=lambda t: (t[0], tuple(-e for e in t[1])))
        return [(e, c) for _, e, c in items]

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = []
            for name, e in zip(self.gens.names, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append(("- " if neg else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def to_json(self) -> list:
        return [[list(e), str(c)] for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, gens: GeneratorSet, data: list) -> "GradedPoly":
        terms = {}
        for exps, c in data:
            q = Fraction(c)
            terms[gens.pack(exps)] = int(q) if q.denominator == 1 else q
        return cls(gens, terms)


def parse_poly(text: str, gens: GeneratorSet) -> GradedPoly:
    """Read a polynomial written like ``to_text`` output, e.g. ``2*A_1*B_4 - A_5^2``.

    Only +, -, *, integer powers and division by integer constants are allowed.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise PolyError(f"cannot parse {text!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return gens.const(node.value)
        if isinstance(node, ast.Name):
            if node.id not in gens.names:
                raise PolyError(f"unknown generator {node.id!r}")
            return gens.gen(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise PolyError("exponents must be integer literals")
                return ev(node.left) ** node.right.value
            if isinstance(node.op, ast.Div):
                den = ev(node.right)
                if den.variables() or not den:
                    raise PolyError("can only divide by a nonzero constant")
                return ev(node.left).scale(1 / Fraction(den.constant_term()))
            ops = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b}
            f = ops.get(type(node.op))
            if f is not None:
                return f(ev(node.left), ev(node.right))
        raise PolyError(f"unsupported syntax in {text!r}")

    return ev(tree)


def mul_terms(a: dict, b: dict) -> dict:
    """Raw product of two packed-monomial term dicts, zeros dropped."""
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    bi = list(b.items())
    for m1, c1 in a.items():
        for m2, c2 in bi:
            m = m1 + m2
            out[m] = get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def gens_json(gens: GeneratorSet) -> dict:
    return {"names": list(gens.names), "weights": list(gens.weights)}
