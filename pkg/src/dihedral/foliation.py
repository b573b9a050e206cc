"""The degree-two plane foliation attached to the connection family.

The foliation is defined by the one-form

    omega = ((2*l0 + l1)*x + l1*(y - 1)) * y * dx
          - ((l0 + 2*l1)*y + l0*(x - 1)) * x * dy

It is certified here to (i) have exactly seven order-one singular points,
(ii) coincide with the foliation induced by a three-variable Lotka-Volterra
vector field after an affine normalization, with the parameter triple
(A, B, C) lying on a single orbit of the order-three homography
J(z) = -1/(1+z) and satisfying A*B*C = 1, and (iii) admit invariant
algebraic curves of arbitrarily high degree, each certified by an exact
divisibility quotient.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from .connection import l0, l1

__all__ = [
    "x",
    "y",
    "t",
    "foliation_form",
    "singular_points",
    "DegenerateParameterError",
    "lv_parameters",
    "lotka_volterra_form",
    "lv_equivalence",
    "lv_converse",
    "j_map",
    "j_orbit_check",
    "CurveCertificate",
    "invariant_curve_check",
    "quintic_component_check",
    "quotient_dependence_check",
]

x, y, t = sp.symbols("x y t")
u0, u1 = sp.symbols("u0 u1")


class DegenerateParameterError(ValueError):
    """A parameter choice at which the Lotka-Volterra triple degenerates."""


def foliation_form(l0_value=None, l1_value=None):
    """Coefficients (P, Q) of omega = P dx + Q dy."""
    P = ((2 * l0 + l1) * x + l1 * (y - 1)) * y
    Q = -((l0 + 2 * l1) * y + l0 * (x - 1)) * x
    if l0_value is not None:
        sub = {l0: sp.Rational(l0_value), l1: sp.Rational(l1_value)}
        P, Q = P.subs(sub), Q.subs(sub)
    return sp.expand(P), sp.expand(Q)


def _check_degenerate(l0_value, l1_value) -> None:
    l0v, l1v = sp.Rational(l0_value), sp.Rational(l1_value)
    if l0v == 0:
        raise DegenerateParameterError("l0 = 0 degenerates A = l1/l0")
    if l1v == 0:
        raise DegenerateParameterError("l1 = 0 degenerates C = -(l0+l1)/l1")
    if l0v + l1v == 0:
        raise DegenerateParameterError("l0 + l1 = 0 degenerates B = -l0/(l0+l1)")


def singular_points(l0_value=None, l1_value=None) -> list[tuple]:
    """The seven projective singular points [X : Y : Z], each certified by
    exact vanishing of both coefficients of omega in an adapted chart."""
    if l0_value is not None:
        _check_degenerate(l0_value, l1_value)
        lam0, lam1 = sp.Rational(l0_value), sp.Rational(l1_value)
    else:
        lam0, lam1 = l0, l1
    points = [
        (sp.S.Zero, sp.S.Zero, sp.S.One),
        (sp.S.Zero, sp.S.One, sp.S.One),
        (sp.S.One, sp.S.Zero, sp.S.One),
        (lam1**2, lam0**2, (lam0 + lam1) ** 2),
        (sp.S.One, sp.S.One, sp.S.Zero),
        (sp.S.Zero, sp.S.One, sp.S.Zero),
        (sp.S.One, sp.S.Zero, sp.S.Zero),
    ]
    P, Q = foliation_form()
    sub = {l0: lam0, l1: lam1}
    for X, Y, Z in points:
        if Z != 0:
            vals = {x: X / Z, y: Y / Z}
            ok = (
                sp.cancel(sp.together(P.subs(sub).subs(vals))) == 0
                and sp.cancel(sp.together(Q.subs(sub).subs(vals))) == 0
            )
        else:
            ok = _infinity_singular(X, Y, sub)
        if not ok:
            raise ArithmeticError(f"point [{X}:{Y}:{Z}] is not singular")
    if l0_value is not None and len({(sp.cancel(a), sp.cancel(b), sp.cancel(c)) for a, b, c in [
        (X / Z, Y / Z, 1) if Z != 0 else (X, Y, 0) for X, Y, Z in points
    ]}) < 7:
        raise DegenerateParameterError("singular points collide")
    return points


def _infinity_singular(X, Y, sub) -> bool:
    """Vanishing of the foliation at a point of the line at infinity.

    In the chart (s, v) with x = 1/v, y = s/v the homogenized foliation is
    generated by a one-form with polynomial coefficients after clearing v;
    a point [X : Y : 0] corresponds to (s, v) = (Y/X, 0) (or the symmetric
    chart when X = 0)."""
    P, Q = foliation_form()
    P, Q = P.subs(sub), Q.subs(sub)
    s, v = sp.symbols("s v")
    if X != 0:
        # x = 1/v, y = s/v; dx = -dv/v^2, dy = (v ds - s dv)/v^2
        Pe = P.subs({x: 1 / v, y: s / v})
        Qe = Q.subs({x: 1 / v, y: s / v})
        cs_p = sp.cancel(Qe * v * v**3)
        cv_p = sp.cancel((-Pe - s * Qe) * v**3)
        point = {s: Y / X, v: 0}
        return (
            sp.expand(cs_p.subs(point)) == 0 and sp.expand(cv_p.subs(point)) == 0
        )
    # chart around [0:1:0]: y = 1/v, x = s/v
    Pe = P.subs({x: s / v, y: 1 / v})
    Qe = Q.subs({x: s / v, y: 1 / v})
    cs = sp.cancel(Pe * v)
    cv = sp.cancel(-Qe - s * Pe)
    cs_p = sp.cancel(cs * v**3)
    cv_p = sp.cancel(cv * v**3)
    point = {s: X / Y, v: 0}
    return sp.expand(cs_p.subs(point)) == 0 and sp.expand(cv_p.subs(point)) == 0


# ---------------------------------------------------------------------------
# Lotka-Volterra equivalence.
# ---------------------------------------------------------------------------


def lv_parameters(l0_value=None, l1_value=None):
    """(A, B, C) = (l1/l0, -l0/(l0+l1), -(l0+l1)/l1)."""
    if l0_value is not None:
        _check_degenerate(l0_value, l1_value)
        lam0, lam1 = sp.Rational(l0_value), sp.Rational(l1_value)
    else:
        lam0, lam1 = l0, l1
    return (
        sp.cancel(lam1 / lam0),
        sp.cancel(-lam0 / (lam0 + lam1)),
        sp.cancel(-(lam0 + lam1) / lam1),
    )


def lotka_volterra_form(A, B, C):
    """The three-variable form annihilating both the Lotka-Volterra field
    V = (x(Cy+t), y(At+x), t(Bx+y)) and the radial field."""
    Vx = x * (C * y + t)
    Vy = y * (A * t + x)
    Vt = t * (B * x + y)
    return (
        sp.expand(y * Vt - t * Vy),
        sp.expand(t * Vx - x * Vt),
        sp.expand(x * Vy - y * Vx),
    )


def _normalized_plane_form(A, B, C):
    """Restrict the three-variable form to t = 1 and move the singular
    points (1/B, 0) and (0, A) to (1, 0) and (0, 1) via x -> x/B, y -> A*y."""
    w_x, w_y, _ = lotka_volterra_form(A, B, C)
    p = w_x.subs(t, 1)
    q = w_y.subs(t, 1)
    p_n = p.subs({x: x / B, y: A * y}) / B  # dx -> dx/B
    q_n = q.subs({x: x / B, y: A * y}) * A  # dy -> A dy
    return sp.cancel(p_n), sp.cancel(q_n)


def lv_equivalence(l0_value=None, l1_value=None):
    """Wedge coefficient of omega with the normalized Lotka-Volterra plane
    form; contractually the zero rational function."""
    A, B, C = lv_parameters(l0_value, l1_value)
    p_n, q_n = _normalized_plane_form(A, B, C)
    if l0_value is not None:
        P, Q = foliation_form(l0_value, l1_value)
    else:
        P, Q = foliation_form()
    wedge = sp.cancel(sp.together(P * q_n - Q * p_n))
    return sp.cancel(wedge)


def lv_converse(gamma1, gamma2):
    """The degree-two family with parameters (gamma1, gamma2) matches omega
    at (l0, l1) = (gamma2, gamma1); returns the difference of coefficient
    pairs, contractually (0, 0)."""
    g1, g2 = sp.Rational(gamma1), sp.Rational(gamma2)
    P, Q = foliation_form(g2, g1)
    P2, Q2 = foliation_form()
    sub = {l0: g2, l1: g1}
    return sp.expand(P - P2.subs(sub)), sp.expand(Q - Q2.subs(sub))


def j_map(zv):
    return sp.cancel(-1 / (1 + zv))


def j_orbit_check() -> bool:
    """B = J(A), C = J(J(A)), and J composed three times is the identity."""
    A, B, C = lv_parameters()
    zv = sp.Symbol("zeta")
    j3 = j_map(j_map(j_map(zv)))
    abc = sp.cancel(A * B * C)
    return (
        sp.cancel(j_map(A) - B) == 0
        and sp.cancel(j_map(j_map(A)) - C) == 0
        and sp.cancel(j3 - zv) == 0
        and abc == 1
    )


def quotient_dependence_check() -> bool:
    """omega(c*l0, c*l1) = c * omega(l0, l1) identically: the form up to
    scale only depends on l0/l1."""
    c = sp.Symbol("c")
    P, Q = foliation_form()
    Ps, Qs = (e.subs({l0: c * l0, l1: c * l1}) for e in (P, Q))
    return sp.expand(Ps - c * P) == 0 and sp.expand(Qs - c * Q) == 0


# ---------------------------------------------------------------------------
# Invariant curves upstairs.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurveCertificate:
    curve: sp.Expr
    wedge_coefficient: sp.Expr
    quotient: sp.Expr
    divides: bool
    extension: bool = False

    def reverify(self) -> bool:
        return sp.expand(self.curve * self.quotient - self.wedge_coefficient) == 0


def _upstairs_form(p, q):
    """Polynomial form obtained by clearing denominators of
    l0 * (du0/u0 - du1/u1) + l1 * (du0/(u0-1) - du1/(u1-1))
    at (l0, l1) = (p, q)."""
    a0 = sp.together(sp.Rational(p) / u0 + sp.Rational(q) / (u0 - 1))
    a1 = sp.together(-sp.Rational(p) / u1 - sp.Rational(q) / (u1 - 1))
    den = u0 * (u0 - 1) * u1 * (u1 - 1)
    c0 = sp.expand(sp.cancel(a0 * den))
    c1 = sp.expand(sp.cancel(a1 * den))
    return c0, c1  # coefficients of du0, du1


def invariant_curve_check(n: int = None, p: int = None, q: int = None, c=1):
    """Divisibility certificate that F = u0^p (u0-1)^q - c u1^p (u1-1)^q is
    invariant for the upstairs foliation with parameters (p, q).

    The classical family is the case (p, q, c) = (n, 1, 1); supplying
    general (p, q, c) is an extension flagged on the certificate."""
    extension = n is None
    if n is not None:
        p, q, c = n, 1, 1
    if p < 1 or q < 1:
        raise ValueError("exponents must be positive integers")
    c = sp.Rational(c)
    if c == 0:
        raise ValueError("the curve constant must be nonzero")
    F = sp.expand(u0**p * (u0 - 1) ** q - c * u1**p * (u1 - 1) ** q)
    c0, c1 = _upstairs_form(p, q)
    dF0, dF1 = sp.diff(F, u0), sp.diff(F, u1)
    wedge = sp.expand(c0 * dF1 - c1 * dF0)
    quotient, remainder = sp.div(wedge, F, u0, u1)
    divides = sp.expand(remainder) == 0
    return CurveCertificate(F, wedge, sp.expand(quotient), divides, extension)


def quintic_component_check():
    """Invariance certificates for the individual components of the polar
    quintic downstairs: the three lines x = 0, y = 0, the line at infinity
    (checked in the chart via the homogeneous coordinate), and the conic
    x^2 + y^2 + 1 - 2(xy + x + y) = 0."""
    P, Q = foliation_form()
    results = {}
    for name, F in (
        ("x=0", x),
        ("y=0", y),
        ("conic", x**2 + y**2 + 1 - 2 * (x * y + x + y)),
    ):
        dF0, dF1 = sp.diff(F, x), sp.diff(F, y)
        wedge = sp.expand(P * dF1 - Q * dF0)
        quotient, remainder = sp.div(wedge, F, x, y)
        results[name] = CurveCertificate(
            F, wedge, sp.expand(quotient), sp.expand(remainder) == 0
        )
    # line at infinity: chart x = 1/v, y = s/v, line v = 0
    s, v = sp.symbols("s v")
    Pe = P.subs({x: 1 / v, y: s / v})
    Qe = Q.subs({x: 1 / v, y: s / v})
    cs = sp.expand(sp.cancel(Qe * v * v**3))
    cv = sp.expand(sp.cancel((-Pe - s * Qe) * v**3))
    F = v
    wedge = sp.expand(cs * sp.diff(F, v) - cv * sp.diff(F, s))
    quotient, remainder = sp.div(wedge, F, s, v)
    results["infinity"] = CurveCertificate(
        F, wedge, sp.expand(quotient), sp.expand(remainder) == 0
    )
    return results
