"""Fit of the third-order differential equation

    f f''' - 3 f' f'' = 6 q1 f'^2 + 12 q2 f f' + 12 q3 f^2

to a series f with f(0) = 0, f'(0) = 1, over rational polynomial coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .poly import GradedPoly, PolyError
from .series import TruncSeries


class OdeError(ValueError):
    pass


@dataclass(frozen=True)
class OdeFit:
    q1: GradedPoly
    q2: GradedPoly
    q3: GradedPoly
    residual: TruncSeries

    @property
    def ok(self) -> bool:
        return not self.residual

    @property
    def homogeneous(self) -> bool:
        return all(q.is_homogeneous(w) for w, q in ((1, self.q1), (2, self.q2), (3, self.q3)))

    def to_json(self) -> dict:
        return {
            "q1": self.q1.to_text(),
            "q2": self.q2.to_text(),
            "q3": self.q3.to_text(),
            "residual_identically_zero": self.ok,
            "residual_order": self.residual.order,
            "homogeneous": self.homogeneous,
        }


def ode_sides(f: TruncSeries):
    """Left side and the three right-hand basis series, all to order N - 3."""
    n = f.order - 3
    f1 = f.derivative()
    f2 = f1.derivative()
    f3 = f2.derivative()
    f0, f1, f2 = f.truncate(n), f1.truncate(n), f2.truncate(n)
    lhs = f0 * f3 - f1 * f2 * 3
    return lhs, f1 * f1 * 6, f0 * f1 * 12, f0 * f0 * 12


def ode_fit(f: TruncSeries, order: int | None = None, degrees: Sequence[int] = (0, 1, 2)) -> OdeFit:
    """Solve for q1, q2, q3 from the equations at ``degrees``, then check the rest.

    q1 enters first at degree 0, q2 at degree 1 and q3 at degree 2, so the
    solve is triangular; ``degrees`` may pick a later equation for q3.
    """
    if len(f.vars) != 1:
        raise OdeError("f must be univariate")
    if order is not None:
        f = f.truncate(order)
    if f.order < 6:
        raise OdeError("order must be >= 6")
    if f.constant_term() or f.coeff((1,)) != 1:
        raise OdeError("f needs f(0) = 0 and f'(0) = 1")
    d0, d1, d2 = degrees
    if not (d0 == 0 and d1 == 1 and 2 <= d2 <= f.order - 3):
        raise OdeError(f"unsupported equation degrees {tuple(degrees)}")
    lhs, p1, p2, p3 = ode_sides(f)

    def solve(rhs: GradedPoly, pivot: GradedPoly, name: str) -> GradedPoly:
        if not pivot:
            raise OdeError(f"singular system: {name} has zero coefficient")
        try:
            return rhs.exact_div(pivot)
        except PolyError as exc:
            raise OdeError(f"{name} is not determined polynomially: {exc}") from None

    c = lambda s, d: s.coeff((d,))
    q1 = solve(c(lhs, d0), c(p1, d0), "q1")
    q2 = solve(c(lhs, d1) - q1 * c(p1, d1), c(p2, d1), "q2")
    q3 = solve(c(lhs, d2) - q1 * c(p1, d2) - q2 * c(p2, d2), c(p3, d2), "q3")
    residual = lhs - (p1 * q1 + p2 * q2 + p3 * q3)
    return OdeFit(q1, q2, q3, residual)


def residual_modulo_ideal(fit: OdeFit, kind: str = "krichever") -> list[dict]:
    """Per-degree status of the residual in R (x) Q, R the universal ring of ``kind``.

    The universal Krichever law is associative only modulo I_ass, so its
    exponential satisfies the equation there and not over the free ring.
    """
    from .universal import universal_ring

    records = []
    terms = fit.residual.terms
    if not terms:
        return records
    ring = universal_ring(kind, max(d for (d,) in terms) + 1)
    for (d,), p in sorted(terms.items()):
        ws = p.weights()
        if len(ws) != 1:
            raise OdeError(f"residual at x^{d} is not homogeneous")
        w = ws.pop()
        records.append({
            "degree": d,
            "weight": w,
            "in_ideal": ring.slice(w, "ass").in_rational_span(p),
        })
    return records


@dataclass(frozen=True)
class OdeCheck:
    order: int
    fit: OdeFit
    residual: list

    @property
    def ok(self) -> bool:
        return self.fit.homogeneous and all(r["in_ideal"] for r in self.residual)

    def to_json(self) -> dict:
        out = self.fit.to_json()
        out.update(order=self.order, residual_modulo_ideal=self.residual, passed=self.ok)
        return out


def krichever_ode_check(order: int = 10) -> OdeCheck:
    """Fit the equation to the exponential of the universal Krichever law."""
    from .fgl import FglSpec, exponential

    if order < 6:
        raise OdeError("order must be >= 6")
    F = FglSpec.universal_krichever(order + 1).expand(order + 1)
    fit = ode_fit(exponential(F, order), order)
    return OdeCheck(order, fit, residual_modulo_ideal(fit, "krichever"))
