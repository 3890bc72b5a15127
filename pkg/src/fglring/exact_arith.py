"""Exact integer linear algebra: extended gcd, Hermite and Smith normal forms,
lattice membership and finitely generated abelian quotients.

Integers are Python ints and rationals are :class:`fractions.Fraction`, so
there is no overflow anywhere.  Matrices are plain lists of rows.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Hashable, Iterable, Optional, Sequence

IntMatrix = list  # list[list[int]], rectangular


class ExactArithError(ValueError):
    """Raised on invalid input to an exact-arithmetic routine."""


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b) >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def gcd_extended(values: Sequence[int]) -> tuple[int, list[int]]:
    """Euclid certificate for a list: returns (g, lambdas), sum(l*v) == g."""
    values = list(values)
    if not values:
        raise ExactArithError("gcd_extended needs a non-empty list")
    if not any(values):
        raise ExactArithError("gcd of an all-zero list is undefined")
    g = 0
    lambdas = [0] * len(values)
    for i, v in enumerate(values):
        x, y, new_g = xgcd(g, v)
        lambdas = [x * lam for lam in lambdas]
        lambdas[i] += y
        g = new_g
    assert sum(lam * v for lam, v in zip(lambdas, values)) == g
    return g, lambdas


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)] for row in a]


def determinant(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _check_rect(m: IntMatrix) -> tuple[int, int]:
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if any(len(r) != cols for r in m):
        raise ExactArithError("matrix is not rectangular")
    return rows, cols


def hnf(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(h, t)`` with ``t`` unimodular and ``t @ m == h``.  Pivots are
    positive, entries above a pivot lie in ``[0, pivot)``, zero rows last.
    """
    rows, cols = _check_rect(m)
    h = [list(r) for r in m]
    t = identity(rows)
    r = 0
    for j in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if h[i][j]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(h[i][j]))
            h[r], h[piv] = h[piv], h[r]
            t[r], t[piv] = t[piv], t[r]
            done = True
            for i in range(r + 1, rows):
                if h[i][j]:
                    q = h[i][j] // h[r][j]
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    t[i] = [x - q * y for x, y in zip(t[i], t[r])]
                    if h[i][j]:
                        done = False
            if done:
                break
        if r < rows and h[r][j]:
            if h[r][j] < 0:
                h[r] = [-x for x in h[r]]
                t[r] = [-x for x in t[r]]
            p = h[r][j]
            for i in range(r):
                q = h[i][j] // p
                if q:
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    t[i] = [x - q * y for x, y in zip(t[i], t[r])]
            r += 1
    return h, t


@dataclass(frozen=True)
class SnfResult:
    """Smith form data: ``left @ m @ right`` is diagonal with ``diagonal``."""

    diagonal: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def snf(m: IntMatrix) -> SnfResult:
    rows, cols = _check_rect(m)
    a = [list(r) for r in m]
    left = identity(rows)
    right = identity(cols)

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        left[i], left[k] = left[k], left[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in right:
            r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x - q * y for x, y in zip(left[dst], left[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for r in a:
            r[dst] -= q * r[src]
        for r in right:
            r[dst] -= q * r[src]

    diag = []
    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, a[i][t] // p)
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, a[t][j] // p)
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            # restore the divisibility chain: fold the offending row into row t
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
        diag.append(a[t][t])
    return SnfResult(tuple(diag), left, right)


@dataclass(frozen=True)
class Membership:
    """Outcome of a lattice membership query.

    ``certificate`` maps row tags to integer coefficients when the vector is a
    member.  Otherwise ``order`` is the least k > 0 with k*v in the lattice,
    or None when no such k exists.
    """

    member: bool
    certificate: Optional[dict] = None
    order: Optional[int] = None

    @property
    def infinite(self) -> bool:
        return not self.member and self.order is None


class _Row:
    __slots__ = ("vec", "combo")

    def __init__(self, vec, combo):
        self.vec = vec
        self.combo = combo


def _axpy(dst: dict, src: dict, q: int) -> None:
    """dst -= q * src for sparse dicts."""
    for k, v in src.items():
        x = dst.get(k, 0) - q * v
        if x:
            dst[k] = x
        else:
            dst.pop(k, None)


def _lincomb(a: dict, b: dict, x: int, y: int) -> dict:
    out = {}
    for k in a.keys() | b.keys():
        v = x * a.get(k, 0) + y * b.get(k, 0)
        if v:
            out[k] = v
    return out


class Lattice:
    """Sublattice of Z^n spanned by sparse integer rows.

    Rows are kept in echelon form by unimodular gcd steps as they arrive,
    which is cheap for the very sparse rows coming from ideal slices.  Each
    basis row remembers the combination of input tags that produced it.
    """

    def __init__(self, ncols: int, track: bool = True):
        self.ncols = ncols
        self.track = track
        self._pivots: dict[int, _Row] = {}
        self._cols: list[int] = []  # sorted pivot columns

    def __len__(self):
        return len(self._pivots)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def add(self, vec: dict, tag: Hashable = None) -> bool:
        """Insert a row; returns True if the rank went up."""
        vec = {k: v for k, v in vec.items() if v}
        if any(not 0 <= k < self.ncols for k in vec):
            raise ExactArithError("column index out of range")
        combo = {tag: 1} if self.track and vec else {}
        touched = []
        grew = False
        while vec:
            j = min(vec)
            row = self._pivots.get(j)
            if row is None:
                if vec[j] < 0:
                    vec = {k: -v for k, v in vec.items()}
                    combo = {k: -v for k, v in combo.items()}
                self._pivots[j] = _Row(vec, combo)
                insort(self._cols, j)
                touched.append(j)
                grew = True
                break
            a, b = row.vec[j], vec[j]
            if b % a == 0:
                q = b // a
                _axpy(vec, row.vec, q)
                if self.track:
                    _axpy(combo, row.combo, q)
                continue
            x, y, g = xgcd(a, b)
            new_vec = _lincomb(row.vec, vec, x, y)
            vec = _lincomb(row.vec, vec, -b // g, a // g)
            if self.track:
                new_combo = _lincomb(row.combo, combo, x, y)
                combo = _lincomb(row.combo, combo, -b // g, a // g)
                row.combo = new_combo
            row.vec = new_vec
            touched.append(j)
        for j in sorted(set(touched), reverse=True):
            self._settle(j)
        return grew

    def _reduce_row(self, row: _Row, after: int) -> None:
        """Reduce ``row`` at every pivot column greater than ``after``."""
        cols = self._cols
        for k in cols[bisect_right(cols, after):]:
            x = row.vec.get(k)
            if x:
                prow = self._pivots[k]
                q = x // prow.vec[k]
                if q:
                    _axpy(row.vec, prow.vec, q)
                    if self.track:
                        _axpy(row.combo, prow.combo, q)

    def _settle(self, j: int) -> None:
        """Restore reduced Hermite form after pivot row ``j`` changed."""
        self._reduce_row(self._pivots[j], j)
        cols = self._cols
        for i in reversed(cols[: bisect_left(cols, j)]):
            row = self._pivots[i]
            if row.vec.get(j):
                self._reduce_row(row, i)

    def rows(self) -> list[dict]:
        return [dict(self._pivots[j].vec) for j in sorted(self._pivots)]

    def contains(self, vec: dict) -> Membership:
        """Integer membership with certificate, else order of the class."""
        rest = {k: v for k, v in vec.items() if v}
        cert: dict = {}
        while rest:
            j = min(rest)
            row = self._pivots.get(j)
            if row is None or rest[j] % row.vec[j]:
                break
            q = rest[j] // row.vec[j]
            _axpy(rest, row.vec, q)
            for k, c in row.combo.items():
                x = cert.get(k, 0) + q * c
                if x:
                    cert[k] = x
                else:
                    cert.pop(k, None)
        else:
            return Membership(True, certificate=cert if self.track else None)
        return Membership(False, order=self.rational_order(vec))

    def rational_order(self, vec: dict) -> Optional[int]:
        # echelon rows are a Z-basis, so the coordinates over Q are unique
        rest = {k: Fraction(v) for k, v in vec.items() if v}
        den = 1
        while rest:
            j = min(rest)
            row = self._pivots.get(j)
            if row is None:
                return None
            q = rest[j] / row.vec[j]
            den = lcm(den, q.denominator)
            for k, v in row.vec.items():
                x = rest.get(k, 0) - q * v
                if x:
                    rest[k] = x
                else:
                    rest.pop(k, None)
        return den

    def reduce(self) -> None:
        """Bring the echelon basis to reduced Hermite form."""
        cols = sorted(self._pivots)
        for idx, p in enumerate(cols):
            prow = self._pivots[p]
            piv = prow.vec[p]
            for j in cols[:idx]:
                row = self._pivots[j]
                q = row.vec.get(p, 0) // piv
                if q:
                    _axpy(row.vec, prow.vec, q)
                    if self.track:
                        _axpy(row.combo, prow.combo, q)

    def quotient(self) -> "QuotientGroup":
        return QuotientGroup(self)


class QuotientGroup:
    """The abelian group Z^n / L, presented via HNF pre-reduction and SNF.

    Unit pivots of the reduced HNF eliminate a coordinate outright; only the
    remaining rows and columns go through the dense Smith form.
    """

    def __init__(self, lattice: Lattice):
        lattice.reduce()
        self.ncols = lattice.ncols
        pivots = lattice._pivots
        self._unit = {j: dict(r.vec) for j, r in pivots.items() if r.vec[j] == 1}
        self._cols = [j for j in range(self.ncols) if j not in self._unit]
        pos = {j: i for i, j in enumerate(self._cols)}
        hard = [r.vec for j, r in sorted(pivots.items()) if j not in self._unit]
        dense = []
        for v in hard:
            row = [0] * len(self._cols)
            for k, x in v.items():
                row[pos[k]] = x
            dense.append(row)
        self._pos = pos
        if dense:
            res = snf(dense)
            self._diag = [d for d in res.diagonal]
            self._right = res.right
        else:
            self._diag = []
            self._right = identity(len(self._cols))
        self.free_rank = len(self._cols) - sum(1 for d in self._diag if d)
        self.invariant_factors = tuple(d for d in self._diag if d > 1)

    def coordinates(self, vec: dict) -> list[int]:
        v = {k: x for k, x in vec.items() if x}
        for j in sorted(self._unit):
            c = v.get(j, 0)
            if c:
                _axpy(v, self._unit[j], c)
        dense = [0] * len(self._cols)
        for k, x in v.items():
            dense[self._pos[k]] = x
        n = len(dense)
        return [sum(dense[i] * self._right[i][j] for i in range(n)) for j in range(n)]

    def order_of(self, vec: dict) -> Optional[int]:
        """Order of the class of ``vec``; None means infinite order."""
        y = self.coordinates(vec)
        k = 1
        for i, yi in enumerate(y):
            if not yi:
                continue
            d = self._diag[i] if i < len(self._diag) else 0
            if d == 0:
                return None
            k = lcm(k, d // gcd(d, yi))
        return k


def lattice_membership(v: Sequence[int], basis: IntMatrix) -> Membership:
    """Is ``v`` an integer combination of the rows of ``basis``?

    The certificate is a list c with ``sum(c[i] * basis[i]) == v``.
    """
    rows, cols = _check_rect(basis)
    if len(v) != cols and rows:
        raise ExactArithError(f"vector length {len(v)} != basis width {cols}")
    lat = Lattice(len(v))
    for i, r in enumerate(basis):
        lat.add(dict(enumerate(r)), tag=i)
    res = lat.contains(dict(enumerate(v)))
    if res.member:
        cert = [0] * rows
        for i, c in res.certificate.items():
            cert[i] = c
        return Membership(True, certificate=cert)
    return res


def is_unimodular(m: IntMatrix) -> bool:
    return abs(determinant(m)) == 1


def sparse_from_dense(rows: Iterable[Sequence[int]]) -> list[dict]:
    return [{j: x for j, x in enumerate(r) if x} for r in rows]
