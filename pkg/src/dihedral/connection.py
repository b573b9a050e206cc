"""The two-parameter family of logarithmic flat connections on the plane.

The family lives on the affine chart ``(x, y)`` of the projective plane and
has polar locus the quintic ``x * y * t * (x^2 + y^2 + t^2 - 2(xy + xt + yt))``
(conic + three tangent lines; ``t = 1`` here, the line at infinity is reached
by the chart change ``X = x/y, Y = 1/y``).

Two independent routes to the same object are implemented and cross-checked:

* ``build_connection`` assembles the matrix one-form directly,
  ``Omega = -(l0*A0 + l1*A1 + A2) / (2*Delta)``, from stored matrices that
  are linear in the parameters;
* ``upstairs_data`` carries the construction chain: an abelian logarithmic
  one-form ``omega0`` on the double cover ``P1 x P1``, its eta-invariant
  Riccati form, the pushforward through the 2:1 covering
  ``x = (u0-1)(u1-1), y = u0*u1`` with fiber coordinate
  ``w = (u0-u1)(z+1)/(z-1)``, and the fiber trivialization
  ``w = y*W + x - 1`` that lands on ``build_connection``'s family.

The checks (`verify_flatness`, `verify_eta_invariance`,
`verify_pullback_identity`, `verify_phi_conjugation`, `residue_table`) are
exact rational-function identities with fully symbolic parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import sympy as sp

from . import cas
from .cas import (CurveParametrization, MatrixOneForm, MatrixTwoForm, OneForm,
                  matrix_exterior_derivative, matrix_wedge, ratcancel)

x, y = sp.symbols("x y")
u0, u1, z = sp.symbols("u0 u1 z")
w, W = sp.symbols("w W")
l0, l1 = sp.symbols("lambda0 lambda1")

#: Affine equation of the conic component of the polar quintic.
QUINTIC_CONIC = x**2 + y**2 + 1 - 2 * (x * y + x + y)

#: Rational parametrization of the conic (image of the diagonal of the cover).
CONIC_PARAM_VAR = sp.Symbol("u")
CONIC_PARAM = CurveParametrization(CONIC_PARAM_VAR,
                                   {x: (CONIC_PARAM_VAR - 1) ** 2,
                                    y: CONIC_PARAM_VAR ** 2})

#: Covering map P1 x P1 -> P2 (expanded invariant coordinates).
COVERING_MAP = {x: (u0 - 1) * (u1 - 1), y: u0 * u1}

#: Fiber coordinate of the projectivized pushforward.
FIBER_COORDINATE = (u0 - u1) * (z + 1) / (z - 1)


@dataclass(frozen=True)
class ParameterPoint:
    """The two parameters; ``None`` keeps them fully symbolic."""

    l0: Optional[sp.Rational] = None
    l1: Optional[sp.Rational] = None

    def substitution(self) -> Mapping[sp.Symbol, sp.Expr]:
        sub = {}
        if self.l0 is not None:
            sub[l0] = sp.Rational(self.l0)
        if self.l1 is not None:
            sub[l1] = sp.Rational(self.l1)
        return sub

    def is_degenerate(self) -> bool:
        if self.l0 is None or self.l1 is None:
            return False
        return self.l0 == 0 and self.l1 == 0


def _matrix_form(entries) -> MatrixOneForm:
    """Build a matrix one-form in (x, y) from nested ``((dx, dy), ...)`` data."""
    comps = {
        x: sp.Matrix(2, 2, lambda i, j: entries[i][j][0]),
        y: sp.Matrix(2, 2, lambda i, j: entries[i][j][1]),
    }
    return MatrixOneForm.make((x, y), comps)


# The three parameter-linear matrices of the family.  A2 is upper-triangular
# with opposite diagonal entries; all three are trace-free.
A0 = _matrix_form([
    [(2 * (x - 1), -(x - 1) * (x + y - 1) / y),
     (2 * (2 * x - y + 2), -(x + y - 1) * (2 * x - y + 2) / y)],
    [(-2 * y, x + y - 1),
     (-2 * (x - 1), (x - 1) * (x + y - 1) / y)],
])

A1 = _matrix_form([
    [((x - 1) * (x + y - 1) / x, -2 * (x - 1)),
     ((x + y - 1) * (2 * x - y + 2) / x, -2 * (2 * x - y + 2))],
    [(-y * (x + y - 1) / x, 2 * y),
     (-(x - 1) * (x + y - 1) / x, 2 * (x - 1))],
])

A2 = _matrix_form([
    [(-x + y + 1, (x**2 - x * y - 2 * x - y + 1) / y),
     (-2 * (x - y + 3), 2 * (x - 1) * (x - y + 1) / y)],
    [(sp.Integer(0), sp.Integer(0)),
     (x - y - 1, -(x**2 - x * y - 2 * x - y + 1) / y)],
])


@dataclass(frozen=True)
class ConnectionMatrix:
    """``Omega = -(l0*A0 + l1*A1 + A2) / (2 * Delta)`` with ``d Omega = Omega ^ Omega``."""

    omega: MatrixOneForm
    parameters: ParameterPoint

    @property
    def quintic_conic(self) -> sp.Expr:
        return QUINTIC_CONIC


def build_connection(p: ParameterPoint = ParameterPoint()) -> ConnectionMatrix:
    """Assemble the connection matrix for the given (possibly symbolic) parameters."""
    lam0 = l0 if p.l0 is None else sp.Rational(p.l0)
    lam1 = l1 if p.l1 is None else sp.Rational(p.l1)
    denom = 2 * QUINTIC_CONIC
    comps = {
        v: -(lam0 * A0[v] + lam1 * A1[v] + A2[v]) / denom
        for v in (x, y)
    }
    return ConnectionMatrix(MatrixOneForm.make((x, y), comps), p)


def verify_flatness(c: ConnectionMatrix) -> MatrixTwoForm:
    """Residual ``d Omega - Omega ^ Omega``; identically zero for the family."""
    return matrix_exterior_derivative(c.omega).subtract(
        matrix_wedge(c.omega, c.omega))


def trace_form(c: ConnectionMatrix) -> OneForm:
    """Entrywise trace of the connection matrix; identically zero."""
    return c.omega.trace()


# ---------------------------------------------------------------------------
# the construction chain on the double cover
# ---------------------------------------------------------------------------

def _g_dx(lam0, lam1, wv, xv, yv):
    """dx-numerator of the pushforward Riccati form (times ``2*Delta*x``).

    Derived from the covering construction: with ``b = u0 - u1`` (so
    ``b^2 = Delta`` on the cover) the pushforward of ``dz + omega0*z``
    in the fiber coordinate ``w`` is
    ``dw - (omega0^push / (2b)) w^2 - (d Delta / (2 Delta)) w + (omega0^push * b / 2)``,
    which is rational in ``(x, y, w)``.
    """
    return (-2 * lam0 * xv**3 + 4 * lam0 * xv**2 * yv + 4 * lam0 * xv**2
            - 2 * lam0 * xv * yv**2 + 4 * lam0 * xv * yv - 2 * lam0 * xv
            - lam1 * xv**3 + lam1 * xv**2 * yv + 3 * lam1 * xv**2
            + lam1 * xv * yv**2 + 2 * lam1 * xv * yv - 3 * lam1 * xv
            - lam1 * yv**3 + 3 * lam1 * yv**2 - 3 * lam1 * yv + lam1
            + wv**2 * (2 * lam0 * xv + lam1 * xv + lam1 * yv - lam1)
            + wv * (-2 * xv**2 + 2 * xv * yv + 2 * xv))


def _g_dy(lam0, lam1, wv, xv, yv):
    """dy-numerator (times ``2*Delta*y``); equals ``-_g_dx(l1, l0, -w, y, x)``."""
    return -_g_dx(lam1, lam0, -wv, yv, xv)


@dataclass(frozen=True)
class UpstairsData:
    """The construction chain: abelian form upstairs + pushforward Riccati data."""

    omega0: OneForm                     # in (u0, u1)
    riccati_upstairs: OneForm           # dz + omega0*z, as a form in (u0, u1, z)
    riccati_pushforward: OneForm        # dw + ... in (x, y, w)


def abelian_form(p: ParameterPoint = ParameterPoint()) -> OneForm:
    """``omega0 = l0 (du0/u0 - du1/u1) + l1 (du0/(u0-1) - du1/(u1-1))``."""
    lam0 = l0 if p.l0 is None else sp.Rational(p.l0)
    lam1 = l1 if p.l1 is None else sp.Rational(p.l1)
    return OneForm.make((u0, u1), {
        u0: lam0 / u0 + lam1 / (u0 - 1),
        u1: -lam0 / u1 - lam1 / (u1 - 1),
    })


def upstairs_data(p: ParameterPoint = ParameterPoint()) -> UpstairsData:
    om0 = abelian_form(p)
    lam0 = l0 if p.l0 is None else sp.Rational(p.l0)
    lam1 = l1 if p.l1 is None else sp.Rational(p.l1)
    riccati0 = OneForm.make((u0, u1, z), {
        u0: om0[u0] * z,
        u1: om0[u1] * z,
        z: sp.Integer(1),
    })
    denom = 2 * QUINTIC_CONIC
    push = OneForm.make((x, y, w), {
        x: _g_dx(lam0, lam1, w, x, y) / (denom * x),
        y: _g_dy(lam0, lam1, w, x, y) / (denom * y),
        w: sp.Integer(1),
    })
    return UpstairsData(om0, riccati0, push)


def verify_eta_invariance(u: UpstairsData) -> bool:
    """``((u0-u1)/z) * (dz + omega0*z)`` is invariant under ``(u0,u1,z) -> (u1,u0,1/z)``."""
    scaled = u.riccati_upstairs.scale((u0 - u1) / z)
    swapped = cas.substitute_one_form(scaled, {u0: u1, u1: u0, z: 1 / z}, (u0, u1, z))
    return scaled.add(swapped.map(lambda e: -e)).is_zero()


def verify_pullback_identity(u: UpstairsData) -> bool:
    """The pushforward Riccati form pulls back to the same foliation upstairs.

    Pull ``riccati_pushforward`` back through the covering map + fiber
    coordinate into ``(u0, u1, z)`` and wedge with ``dz + omega0*z``; the
    result must vanish identically.
    """
    mapping = dict(COVERING_MAP)
    mapping[w] = FIBER_COORDINATE
    pulled = cas.substitute_one_form(u.riccati_pushforward, mapping, (u0, u1, z))
    return cas.wedge(pulled, u.riccati_upstairs).is_zero()


def deck_symmetry_holds(u: UpstairsData) -> bool:
    """The pushforward Riccati data obeys ``g_y(l0,l1,w,x,y) = -g_x(l1,l0,-w,y,x)``.

    Swapping the two affine lines exchanges the branches of ``u0 - u1``, so
    the fiber coordinate flips sign along with the components.
    """
    gx = u.riccati_pushforward[x]
    gy = u.riccati_pushforward[y]
    swapped = cas.substitute_scalar(gx, {x: y, y: x, w: -w, l0: l1, l1: l0})
    return cas.is_zero(gy + swapped)


def riccati_of_connection(c: ConnectionMatrix) -> OneForm:
    """Riccati form ``dW + a2 W^2 + a1 W + a0`` of the matrix family.

    For ``Omega = ((-a1/2, -a0), (a2, a1/2))`` (the flatness convention
    ``d Omega = Omega ^ Omega``) the projectivization on ``W = Z1/Z2`` is
    ``dW + Omega_21 W^2 - 2 Omega_11 W - Omega_12``.
    """
    om = c.omega
    comps = {}
    for v in (x, y):
        m = om[v]
        comps[v] = m[1, 0] * W**2 - 2 * m[0, 0] * W - m[0, 1]
    comps[W] = sp.Integer(1)
    return OneForm.make((x, y, W), comps)


def verify_phi_conjugation(p: ParameterPoint = ParameterPoint()) -> bool:
    """The fiber trivialization carries the pushforward onto the matrix family.

    Substitute ``w = y*W + x - 1`` into the pushforward Riccati form, divide
    by the resulting ``dW``-coefficient (a rational function of ``x, y``
    only), and compare with the Riccati form of ``build_connection``.
    """
    u = upstairs_data(p)
    moved = cas.substitute_one_form(u.riccati_pushforward,
                                    {w: y * W + x - 1}, (x, y, W))
    scale = moved[W]
    if cas.is_zero(scale):
        return False
    normalized = moved.scale(1 / scale)
    target = riccati_of_connection(build_connection(p))
    return normalized.add(target.map(lambda e: -e)).is_zero()


def verify_phi_conjugation_negative_control(p: ParameterPoint = ParameterPoint()) -> bool:
    """Same check with the ``x - 1`` shift dropped from the fiber map; must fail."""
    u = upstairs_data(p)
    moved = cas.substitute_one_form(u.riccati_pushforward, {w: y * W}, (x, y, W))
    scale = moved[W]
    if cas.is_zero(scale):
        return False
    normalized = moved.scale(1 / scale)
    target = riccati_of_connection(build_connection(p))
    return normalized.add(target.map(lambda e: -e)).is_zero()


# ---------------------------------------------------------------------------
# residues along the four polar divisors
# ---------------------------------------------------------------------------

_S = sp.Symbol("s")

#: Expected residue determinants, in divisor order (y=0, x=0, conic, L_inf).
EXPECTED_RESIDUE_DETERMINANTS = {
    "y=0": -(l0 - 1) ** 2 / 4,
    "x=0": -l1 ** 2 / 4,
    "conic": sp.Rational(-1, 16),
    "line_at_infinity": -(l0 + l1) ** 2 / 4,
}


def line_at_infinity_form(c: ConnectionMatrix) -> MatrixOneForm:
    """The connection matrix in the chart ``X = x/y, Y = 1/y`` (infinity is ``Y = 0``)."""
    Xc, Yc = sp.symbols("Xc Yc")
    return cas.substitute_matrix_one_form(c.omega, {x: Xc / Yc, y: 1 / Yc}, (Xc, Yc))


def residue_table(c: ConnectionMatrix):
    """Residue matrices and determinants along the four polar divisors.

    Returns a list of ``(divisor label, residue matrix, determinant)``.
    Eigenvalues of a trace-free 2x2 matrix are ``+-sqrt(-det)``, so the
    determinant column carries the full local spectral data.
    """
    out = []

    res_y0 = cas.residue_along(c.omega, y,
                               CurveParametrization(_S, {x: _S, y: sp.Integer(0)}))
    out.append(("y=0", res_y0, ratcancel(res_y0.det())))

    res_x0 = cas.residue_along(c.omega, x,
                               CurveParametrization(_S, {x: sp.Integer(0), y: _S}))
    out.append(("x=0", res_x0, ratcancel(res_x0.det())))

    res_conic = cas.residue_along(c.omega, QUINTIC_CONIC, CONIC_PARAM)
    out.append(("conic", res_conic, ratcancel(res_conic.det())))

    Xc, Yc = sp.symbols("Xc Yc")
    chart = line_at_infinity_form(c)
    res_inf = cas.residue_along(chart, Yc,
                                CurveParametrization(_S, {Xc: _S, Yc: sp.Integer(0)}))
    out.append(("line_at_infinity", res_inf, ratcancel(res_inf.det())))
    return out
