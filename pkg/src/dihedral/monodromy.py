"""Numerical monodromy of the line-restricted systems and the dihedral model.

The Riccati equation attached to a line restriction is promoted to a
trace-free rank-two linear system, parallel-transported around each of the
five punctures {0, 1, t1, t2, infinity} with an adaptive Runge-Kutta
integrator, and the resulting representation is compared against the
dihedral model rho_{u,v} through conjugacy-invariant data only (traces,
determinants, commutators, and the product relation).
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .connection import l0, l1
from .isomonodromy import line_restriction_data, x as _x

__all__ = [
    "Loop",
    "LineRestriction",
    "MonodromyRecord",
    "DihedralReport",
    "RelationReport",
    "riccati_to_system",
    "puncture_loop",
    "infinity_loop",
    "transport",
    "monodromy_representation",
    "verify_dihedral",
    "rho_uv_relations",
    "dihedral_trace_targets",
]

_IDENTITY = np.eye(2, dtype=complex)


class IntegrationError(RuntimeError):
    """Raised when the adaptive step size underflows near a singularity."""


def _poly_coeffs(expr: sp.Expr) -> np.ndarray:
    poly = sp.Poly(sp.expand(expr), _x)
    return np.array([complex(c) for c in poly.all_coeffs()], dtype=complex)


@dataclass(frozen=True)
class Loop:
    """Closed polyline based at ``base``, encircling one puncture."""

    base: complex
    waypoints: tuple[complex, ...]
    label: str

    def __post_init__(self) -> None:
        if self.waypoints[0] != self.waypoints[-1]:
            raise ValueError("loop must be closed (first waypoint = last)")
        if self.waypoints[0] != self.base:
            raise ValueError("loop must start at its base point")

    def reversed(self) -> "Loop":
        return Loop(self.base, tuple(reversed(self.waypoints)), self.label)

    def min_distance(self, points: Sequence[complex]) -> float:
        best = math.inf
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            for p in points:
                best = min(best, _segment_distance(a, b, p))
        return best


def _segment_distance(a: complex, b: complex, p: complex) -> float:
    d = b - a
    den = abs(d) ** 2
    if den == 0.0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / den
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


@dataclass(frozen=True)
class LineRestriction:
    """Rank-two system attached to a line, in the finite coordinate chart."""

    l0_value: sp.Rational
    l1_value: sp.Rational
    alpha_value: sp.Rational
    z_value: sp.Rational
    punctures: dict[str, complex]
    system: Callable[[complex], np.ndarray]
    safety_radius: float

    @property
    def finite_punctures(self) -> dict[str, complex]:
        return {k: v for k, v in self.punctures.items() if k != "inf"}


def riccati_to_system(
    a2: sp.Expr, a1: sp.Expr, a0: sp.Expr, denominator: sp.Expr
) -> Callable[[complex], np.ndarray]:
    """Trace-free system matrix for the Riccati equation dW + (a2 W^2 + a1 W + a0)/D dx = 0.

    Returns x |-> M(x) with M = [[a1/2, a0], [-a2, -a1/2]] / D, under the sign
    convention dZ = -M(x) Z dx; the projectivization w = Z1/Z2 of a solution
    satisfies the Riccati equation.
    """
    c2, c1, c0, cd = (_poly_coeffs(e) for e in (a2, a1, a0, denominator))

    def system(xv: complex) -> np.ndarray:
        d = np.polyval(cd, xv)
        v2 = np.polyval(c2, xv)
        v1 = np.polyval(c1, xv)
        v0 = np.polyval(c0, xv)
        return np.array([[v1 / 2, v0], [-v2, -v1 / 2]], dtype=complex) / d

    return system


def line_restriction_system(
    l0_value, l1_value, alpha_value, z_value
) -> LineRestriction:
    """Build the transported system for the line with slope data (alpha, z)."""
    l0_value, l1_value = sp.Rational(l0_value), sp.Rational(l1_value)
    alpha_value = sp.Rational(alpha_value)
    z_value = sp.sympify(z_value)  # may be an exact square root for lines
    # specified through beta
    data = line_restriction_data(l0_value, l1_value, alpha_value, z_value)
    system = riccati_to_system(
        data.coefficients.a2,
        data.coefficients.a1,
        data.coefficients.a0,
        data.coefficients.denominator,
    )
    punctures = {
        "0": 0j,
        "1": 1 + 0j,
        "t1": complex(data.t1),
        "t2": complex(data.t2),
        "inf": complex("inf"),
    }
    finite = list(punctures.values())[:4]
    pairwise = [abs(p - q) for i, p in enumerate(finite) for q in finite[i + 1 :]]
    return LineRestriction(
        l0_value=l0_value,
        l1_value=l1_value,
        alpha_value=alpha_value,
        z_value=z_value,
        punctures=punctures,
        system=system,
        safety_radius=0.1 * min(pairwise),
    )


# ---------------------------------------------------------------------------
# Loop construction: lassos from a common base point on the imaginary axis.
# ---------------------------------------------------------------------------


def _base_point(lr: LineRestriction) -> complex:
    top = max(abs(p) for p in lr.finite_punctures.values())
    return 1j * (top + 1.0)


def puncture_loop(
    lr: LineRestriction, label: str, arc_points: int = 64
) -> Loop:
    """Counterclockwise lasso around one finite puncture.

    The approach segment drops vertically-in-angle from the base point to the
    top of a circle of radius equal to the safety radius, so every segment
    keeps imaginary part >= radius and stays clear of the other (real)
    punctures by at least the safety radius.
    """
    base = _base_point(lr)
    center = lr.punctures[label]
    # chords of the arc polyline dip inside the circle, so keep a margin
    # above the safety radius (other punctures are >= 10 radii away)
    r = 1.5 * lr.safety_radius
    entry = center + 1j * r
    arc = [
        center + r * cmath.exp(1j * (math.pi / 2 + 2 * math.pi * k / arc_points))
        for k in range(1, arc_points)
    ]
    pts = (base, entry, *arc, entry, base)
    return Loop(base, pts, label)


def infinity_loop(lr: LineRestriction, arc_points: int = 128) -> Loop:
    """Clockwise circle enclosing every finite puncture, i.e. a positive loop
    around infinity, attached to the base point by a vertical segment."""
    base = _base_point(lr)
    radius = 2.0 * max(abs(p) for p in lr.finite_punctures.values()) + 2.0
    top = 1j * radius
    arc = [
        radius * cmath.exp(1j * (math.pi / 2 - 2 * math.pi * k / arc_points))
        for k in range(1, arc_points)
    ]
    pts = (base, top, *arc, top, base)
    return Loop(base, pts, "inf")


# ---------------------------------------------------------------------------
# Adaptive Dormand-Prince 5(4) transport.
# ---------------------------------------------------------------------------

_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (
    5179 / 57600,
    0.0,
    7571 / 16695,
    393 / 640,
    -92097 / 339200,
    187 / 2100,
    1 / 40,
)
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)

_MIN_STEP = 1e-13


def _integrate_segment(
    system: Callable[[complex], np.ndarray],
    a: complex,
    b: complex,
    y0: np.ndarray,
    tol: float,
    halve: bool,
) -> np.ndarray:
    """Transport y0 along the straight segment a -> b for dY = -M(x) Y dx."""
    direction = b - a
    length = abs(direction)
    if length == 0.0:
        return y0

    def f(t: float, y: np.ndarray) -> np.ndarray:
        return -direction * (system(a + t * direction) @ y)

    t, y = 0.0, y0
    h = min(0.1, 1.0)
    ks = [None] * 7
    while t < 1.0:
        h = min(h, 1.0 - t)
        if halve and t + h < 1.0:
            h *= 0.5
        if h < _MIN_STEP:
            raise IntegrationError(
                f"step size underflow at x = {a + t * direction}"
            )
        ks[0] = f(t, y)
        for i in range(1, 7):
            yi = y + h * sum(
                aij * ks[j] for j, aij in enumerate(_DP_A[i]) if aij != 0.0
            )
            ks[i] = f(t + _DP_C[i] * h, yi)
        y5 = y + h * sum(b5 * k for b5, k in zip(_DP_B5, ks) if b5 != 0.0)
        y4 = y + h * sum(b4 * k for b4, k in zip(_DP_B4, ks) if b4 != 0.0)
        err = np.max(np.abs(y5 - y4))
        scale = tol * max(1.0, float(np.max(np.abs(y))))
        if err <= scale:
            t += h
            y = y5
            factor = 5.0 if err == 0.0 else 0.9 * (scale / err) ** 0.2
            h *= min(5.0, max(0.2, factor))
        else:
            h *= max(0.2, 0.9 * (scale / err) ** 0.2)
    return y


def _transport_once(
    system: Callable[[complex], np.ndarray],
    loop: Loop,
    tol: float,
    halve: bool,
) -> np.ndarray:
    y = _IDENTITY
    for a, b in zip(loop.waypoints, loop.waypoints[1:]):
        y = _integrate_segment(system, a, b, y, tol, halve)
    return y


@dataclass(frozen=True)
class MonodromyRecord:
    label: str
    matrix: np.ndarray
    error_estimate: float
    loop: Loop = field(repr=False)

    @property
    def trace(self) -> complex:
        return complex(self.matrix[0, 0] + self.matrix[1, 1])

    @property
    def det(self) -> complex:
        return complex(
            self.matrix[0, 0] * self.matrix[1, 1]
            - self.matrix[0, 1] * self.matrix[1, 0]
        )


def transport(
    system: Callable[[complex], np.ndarray],
    loop: Loop,
    tol: float = 1e-10,
    punctures: Sequence[complex] = (),
    safety_radius: float = 0.0,
) -> MonodromyRecord:
    """Fundamental-solution matrix along a loop, with a step-halving error
    estimate obtained by repeating the full loop at half the step size."""
    if punctures and safety_radius > 0.0:
        d = loop.min_distance(punctures)
        if d < safety_radius * (1 - 1e-9):
            raise ValueError(
                f"loop '{loop.label}' violates the safety radius: "
                f"distance {d:.3g} < {safety_radius:.3g}"
            )
    full = _transport_once(system, loop, tol, halve=False)
    halved = _transport_once(system, loop, tol, halve=True)
    estimate = float(np.max(np.abs(full - halved)))
    return MonodromyRecord(loop.label, full, estimate, loop)


def _thread_count() -> int:
    raw = os.environ.get("DIHEDRAL_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else min(5, os.cpu_count() or 1)


def monodromy_representation(
    lr: LineRestriction, tol: float = 1e-10
) -> list[MonodromyRecord]:
    """One record per puncture, all loops based at the common base point,
    ordered by the angular position of the punctures seen from the base."""
    base = _base_point(lr)
    loops = [puncture_loop(lr, lbl) for lbl in ("0", "1", "t1", "t2")]
    loops.append(infinity_loop(lr))
    finite = list(lr.finite_punctures.values())

    def angle(loop: Loop) -> float:
        if loop.label == "inf":
            return math.inf  # the boundary loop closes the angular sweep
        return cmath.phase(lr.punctures[loop.label] - base)

    loops.sort(key=angle)
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        records = list(
            pool.map(
                lambda lp: transport(
                    lr.system, lp, tol, finite, lr.safety_radius
                ),
                loops,
            )
        )
    return records


# ---------------------------------------------------------------------------
# Dihedral verification.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DihedralReport:
    antidiagonal_traces: dict[str, float]
    commutator_residuals: dict[str, float]
    product_residual: float
    product_order: tuple[str, ...]
    passed: bool


def _comm_residual(m1: np.ndarray, m2: np.ndarray) -> float:
    return float(np.max(np.abs(m1 @ m2 - m2 @ m1)))


def verify_dihedral(
    records: Sequence[MonodromyRecord], tol: float = 1e-6
) -> DihedralReport:
    """Checks the dihedral signature of a five-loop representation:

    (i) the monodromies at t1 and t2 have trace ~ 0 (anti-diagonal classes),
    (ii) the three diagonal-class monodromies (0, 1, infinity) commute,
    (iii) some cyclic rotation of the geometric order (or its reverse)
    multiplies to the identity.
    """
    by_label = {r.label: r for r in records}
    anti = {lbl: abs(by_label[lbl].trace) for lbl in ("t1", "t2")}
    diag = ["0", "1", "inf"]
    comm = {
        f"[{a},{b}]": _comm_residual(by_label[a].matrix, by_label[b].matrix)
        for i, a in enumerate(diag)
        for b in diag[i + 1 :]
    }
    orders = []
    labels = [r.label for r in records]
    for seq in (labels, labels[::-1]):
        for k in range(5):
            orders.append(tuple(seq[k:] + seq[:k]))
    best_order, best_res = None, math.inf
    for order in orders:
        prod = _IDENTITY
        for lbl in order:
            prod = prod @ by_label[lbl].matrix
        res = float(np.max(np.abs(prod - _IDENTITY)))
        if res < best_res:
            best_order, best_res = order, res
    passed = (
        all(v <= tol for v in anti.values())
        and all(v <= tol for v in comm.values())
        and best_res <= tol
    )
    return DihedralReport(anti, comm, best_res, best_order, passed)


def dihedral_trace_targets(l0_value, l1_value) -> list[sp.Expr]:
    """Exact trace multiset of the dihedral representation on a generic line:
    {a1 + 1/a1, -(a0 + 1/a0), 0, 0, a0/a1 + a1/a0} with a_j = e^{-i pi lambda_j}."""
    a0 = sp.exp(-sp.I * sp.pi * sp.Rational(l0_value))
    a1 = sp.exp(-sp.I * sp.pi * sp.Rational(l1_value))
    return [a1 + 1 / a1, -(a0 + 1 / a0), sp.S.Zero, sp.S.Zero, a0 / a1 + a1 / a0]


# ---------------------------------------------------------------------------
# The exact two-parameter dihedral family.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationReport:
    residuals: dict[str, object]
    passed: bool


def _rho_matrices(u, v, b_override=None):
    if isinstance(u, sp.Expr) or isinstance(v, sp.Expr):
        mat = sp.Matrix
        a = mat([[0, 1], [-1, 0]])
        b = b_override if b_override is not None else mat([[u, 0], [0, 1 / u]])
        c = mat([[v, 0], [0, 1 / v]])
        return a, b, c, sp.eye(2), True
    a = np.array([[0, 1], [-1, 0]], dtype=complex)
    b = (
        b_override
        if b_override is not None
        else np.array([[u, 0], [0, 1 / u]], dtype=complex)
    )
    c = np.array([[v, 0], [0, 1 / v]], dtype=complex)
    return a, b, c, _IDENTITY, False


def rho_uv_relations(u, v, b_override=None) -> RelationReport:
    """Verify the defining relations of the dihedral family generated by
    a = [[0,1],[-1,0]], b = diag(u, 1/u), c = diag(v, 1/v):

    (ab)^2(ba)^-2 = I, (ac)^2(ca)^-2 = I, [b, c] = I, and the product
    d1 d2 d3 d4 d5 = I of the five local images
    d1 = b, d2 = a, d3 = b a b^-1, d4 = c, d5 = (a b a c)^-1.
    """
    a, b, c, eye, symbolic = _rho_matrices(u, v, b_override)

    if symbolic:
        inv = lambda m: m.inv()
        resid = lambda m: sp.simplify(m - eye)
        iszero = lambda r: r == sp.zeros(2, 2)
    else:
        inv = np.linalg.inv
        resid = lambda m: float(np.max(np.abs(m - eye)))
        iszero = lambda r: r <= 1e-12

    ab, ba, ac, ca = a @ b, b @ a, a @ c, c @ a
    d = [b, a, b @ a @ inv(b), c, inv(a @ b @ a @ c)]
    prod = eye
    for m in d:
        prod = prod @ m
    residuals = {
        "(ab)^2(ba)^-2": resid(ab @ ab @ inv(ba @ ba)),
        "(ac)^2(ca)^-2": resid(ac @ ac @ inv(ca @ ca)),
        "[b,c]": resid(b @ c @ inv(b) @ inv(c)),
        "d1..d5": resid(prod),
    }
    return RelationReport(residuals, all(iszero(r) for r in residuals.values()))


def rho_uv_from_parameters(l0_value, l1_value) -> tuple[complex, complex]:
    """The dihedral parameters u = -e^{-i pi l0}, v = e^{-i pi l1}."""
    u = -cmath.exp(-1j * math.pi * float(sp.Rational(l0_value)))
    v = cmath.exp(-1j * math.pi * float(sp.Rational(l1_value)))
    return u, v
