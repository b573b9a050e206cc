"""Exact-arithmetic kernel: rational functions, differential forms, residues.

Everything here is a thin, contract-shaped layer over sympy's exact
multivariate rational arithmetic.  All values are immutable after
construction and every operation is a pure function, so the kernel is
safe to share across threads.

Conventions
-----------
* Scalars are sympy expressions over exact rationals (``sympy.Rational``).
* A :class:`OneForm` stores one rational-function component per base
  variable; a :class:`TwoForm` stores one component per ordered pair
  ``i < j`` of base variables (antisymmetry is by construction).
* Matrix-valued forms hold a 2x2 ``sympy.Matrix`` per component.
* Residues along a divisor ``f = 0`` are computed as
  ``substitute((f * Omega_x) / (df/dx), param)`` and cross-checked
  against the ``y``-branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import sympy as sp


class ContextError(ValueError):
    """A variable does not belong to the expression's context."""


class PoleError(ZeroDivisionError):
    """A substitution landed identically inside a pole."""


class PoleOrderError(ValueError):
    """A divisor along which a form was expected to have a simple pole
    carries a higher-order pole (or is not a polar divisor at all)."""


class DegenerateInputError(ValueError):
    """An elimination/resultant input is degenerate (degree zero)."""


# ---------------------------------------------------------------------------
# scalar helpers
# ---------------------------------------------------------------------------

def ratcancel(expr: sp.Expr) -> sp.Expr:
    """Reduce a rational expression to lowest terms."""
    return sp.cancel(sp.together(expr))


def is_zero(expr: sp.Expr) -> bool:
    """Exact zero test for a rational expression.

    Normalizes with :func:`sympy.together` and expands the numerator; this
    avoids the multivariate gcd cost of ``simplify`` on large inputs.
    """
    num, _den = sp.fraction(sp.together(expr))
    return sp.expand(num) == 0


def partial_derivative(f: sp.Expr, v: sp.Symbol) -> sp.Expr:
    """Quotient-rule derivative of a rational function, reduced."""
    if not isinstance(v, sp.Symbol):
        raise ContextError(f"not a variable: {v!r}")
    return ratcancel(sp.diff(f, v))


def rational_from_string(text: str) -> sp.Rational:
    """Parse an exact rational in ``p/q`` or integer syntax.

    Raises ``ValueError`` for anything else (including ``q = 0``).
    """
    text = text.strip()
    if "/" in text:
        p_str, q_str = text.split("/", 1)
        p, q = int(p_str), int(q_str)
        if q == 0:
            raise ValueError(f"zero denominator in rational {text!r}")
        return sp.Rational(p, q)
    return sp.Rational(int(text))


def rational_to_string(r: sp.Rational) -> str:
    """Render an exact rational as ``p/q`` (or ``p`` when the denominator is 1)."""
    r = sp.Rational(r)
    return str(r.p) if r.q == 1 else f"{r.p}/{r.q}"


def render_polynomial(p: sp.Expr, variables: Sequence[sp.Symbol]) -> str:
    """Deterministic textual rendering (sorted monomials, ``^`` exponents).

    Used for golden files and report certificates.
    """
    poly = sp.Poly(sp.expand(p), *variables)
    pieces = []
    for monom, coeff in sorted(poly.terms(), reverse=True):
        factors = []
        for v, e in zip(variables, monom):
            if e == 1:
                factors.append(str(v))
            elif e > 1:
                factors.append(f"{v}^{e}")
        c = sp.Rational(coeff)
        body = "*".join(factors)
        if not body:
            pieces.append(rational_to_string(c))
        elif c == 1:
            pieces.append(body)
        elif c == -1:
            pieces.append(f"-{body}")
        else:
            pieces.append(f"{rational_to_string(c)}*{body}")
    if not pieces:
        return "0"
    out = pieces[0]
    for piece in pieces[1:]:
        out += " - " + piece[1:] if piece.startswith("-") else " + " + piece
    return out


# ---------------------------------------------------------------------------
# curve parametrizations and substitution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveParametrization:
    """A rational parametrization ``base variable -> function(parameter)``."""

    parameter: sp.Symbol
    images: Mapping[sp.Symbol, sp.Expr]

    def check_on_curve(self, defining: sp.Expr) -> bool:
        """True iff the parametrization annihilates the defining polynomial."""
        return is_zero(defining.subs(dict(self.images)))

    def apply(self, f: sp.Expr) -> sp.Expr:
        return substitute_scalar(f, dict(self.images))


def substitute_scalar(f: sp.Expr, mapping: Mapping[sp.Symbol, sp.Expr]) -> sp.Expr:
    """Exact composed rational function, reduced.

    Raises :class:`PoleError` when the substitution lands identically in a
    pole of ``f``.
    """
    num, den = sp.fraction(sp.together(f))
    den_sub = ratcancel(den.subs(mapping, simultaneous=True))
    if den_sub == 0:
        raise PoleError(f"substitution lands in a pole of {f}")
    num_sub = num.subs(mapping, simultaneous=True)
    return ratcancel(num_sub / den_sub)


# ---------------------------------------------------------------------------
# differential forms
# ---------------------------------------------------------------------------

def _ordered_pairs(variables: Sequence[sp.Symbol]):
    n = len(variables)
    for i in range(n):
        for j in range(i + 1, n):
            yield variables[i], variables[j]


@dataclass(frozen=True)
class OneForm:
    """A scalar one-form ``sum_i f_i dx_i`` with rational-function coefficients."""

    variables: tuple
    components: Mapping[sp.Symbol, sp.Expr]

    @staticmethod
    def make(variables: Sequence[sp.Symbol], components: Mapping[sp.Symbol, sp.Expr]) -> "OneForm":
        comps = {v: ratcancel(components.get(v, sp.Integer(0))) for v in variables}
        return OneForm(tuple(variables), comps)

    def __getitem__(self, v: sp.Symbol) -> sp.Expr:
        if v not in self.components:
            raise ContextError(f"{v} is not a base variable of this form")
        return self.components[v]

    def map(self, fn: Callable[[sp.Expr], sp.Expr]) -> "OneForm":
        return OneForm(self.variables, {v: ratcancel(fn(c)) for v, c in self.components.items()})

    def scale(self, g: sp.Expr) -> "OneForm":
        return self.map(lambda c: g * c)

    def add(self, other: "OneForm") -> "OneForm":
        _require_same_context(self, other)
        return OneForm(self.variables,
                       {v: ratcancel(self.components[v] + other.components[v]) for v in self.variables})

    def is_zero(self) -> bool:
        return all(is_zero(c) for c in self.components.values())


@dataclass(frozen=True)
class TwoForm:
    """A scalar two-form; only components for ordered pairs ``i < j`` are stored."""

    variables: tuple
    components: Mapping[tuple, sp.Expr]

    @staticmethod
    def make(variables: Sequence[sp.Symbol], components: Mapping[tuple, sp.Expr]) -> "TwoForm":
        comps = {}
        for vi, vj in _ordered_pairs(variables):
            comps[(vi, vj)] = ratcancel(components.get((vi, vj), sp.Integer(0)))
        return TwoForm(tuple(variables), comps)

    def __getitem__(self, pair: tuple) -> sp.Expr:
        vi, vj = pair
        if (vi, vj) in self.components:
            return self.components[(vi, vj)]
        if (vj, vi) in self.components:
            return ratcancel(-self.components[(vj, vi)])
        raise ContextError(f"({vi},{vj}) is not a variable pair of this form")

    def is_zero(self) -> bool:
        return all(is_zero(c) for c in self.components.values())


def _require_same_context(a, b):
    if a.variables != b.variables:
        raise ContextError(f"context mismatch: {a.variables} vs {b.variables}")


def exterior_derivative(form: OneForm) -> TwoForm:
    """``d(sum f_i dx_i) = sum_{i<j} (d_i f_j - d_j f_i) dx_i ^ dx_j``."""
    comps = {}
    for vi, vj in _ordered_pairs(form.variables):
        comps[(vi, vj)] = partial_derivative(form.components[vj], vi) - \
            partial_derivative(form.components[vi], vj)
    return TwoForm.make(form.variables, comps)


def wedge(a: OneForm, b: OneForm) -> TwoForm:
    """Antisymmetric product of two scalar one-forms."""
    _require_same_context(a, b)
    comps = {}
    for vi, vj in _ordered_pairs(a.variables):
        comps[(vi, vj)] = a.components[vi] * b.components[vj] - a.components[vj] * b.components[vi]
    return TwoForm.make(a.variables, comps)


def substitute_one_form(form: OneForm,
                        mapping: Mapping[sp.Symbol, sp.Expr],
                        new_variables: Sequence[sp.Symbol]) -> OneForm:
    """Pull a one-form back through ``x_i = x_i(new variables)``.

    Coefficients compose and the basis transforms with the chain rule
    ``dx_i -> sum_v (d x_i / d v) dv``.  Old variables without an image are
    assumed to coincide with a new variable of the same name.
    """
    full = {v: mapping.get(v, v) for v in form.variables}
    comps = {v: sp.Integer(0) for v in new_variables}
    for old in form.variables:
        coeff = substitute_scalar(form.components[old], full)
        image = full[old]
        for v in new_variables:
            jac = sp.diff(image, v)
            if jac != 0:
                comps[v] += coeff * jac
    return OneForm.make(new_variables, comps)


# --- matrix-valued forms ---------------------------------------------------

@dataclass(frozen=True)
class MatrixOneForm:
    """A 2x2-matrix-valued one-form: one ``sympy.Matrix`` per base variable."""

    variables: tuple
    components: Mapping[sp.Symbol, sp.Matrix]

    @staticmethod
    def make(variables: Sequence[sp.Symbol], components: Mapping[sp.Symbol, sp.Matrix]) -> "MatrixOneForm":
        zero = sp.zeros(2, 2)
        comps = {v: sp.Matrix(2, 2, lambda i, j: ratcancel(components.get(v, zero)[i, j]))
                 for v in variables}
        return MatrixOneForm(tuple(variables), comps)

    def __getitem__(self, v: sp.Symbol) -> sp.Matrix:
        if v not in self.components:
            raise ContextError(f"{v} is not a base variable of this form")
        return self.components[v]

    def entry(self, i: int, j: int) -> OneForm:
        return OneForm.make(self.variables, {v: m[i, j] for v, m in self.components.items()})

    def map_entries(self, fn: Callable[[sp.Expr], sp.Expr]) -> "MatrixOneForm":
        return MatrixOneForm(self.variables,
                             {v: m.applyfunc(lambda e: ratcancel(fn(e)))
                              for v, m in self.components.items()})

    def add(self, other: "MatrixOneForm") -> "MatrixOneForm":
        _require_same_context(self, other)
        return MatrixOneForm.make(self.variables,
                                  {v: self.components[v] + other.components[v]
                                   for v in self.variables})

    def trace(self) -> OneForm:
        return OneForm.make(self.variables, {v: m.trace() for v, m in self.components.items()})

    def is_zero(self) -> bool:
        return all(is_zero(m[i, j]) for m in self.components.values()
                   for i in range(2) for j in range(2))


@dataclass(frozen=True)
class MatrixTwoForm:
    variables: tuple
    components: Mapping[tuple, sp.Matrix]

    @staticmethod
    def make(variables: Sequence[sp.Symbol], components: Mapping[tuple, sp.Matrix]) -> "MatrixTwoForm":
        zero = sp.zeros(2, 2)
        comps = {}
        for vi, vj in _ordered_pairs(variables):
            m = components.get((vi, vj), zero)
            comps[(vi, vj)] = sp.Matrix(2, 2, lambda i, j: ratcancel(m[i, j]))
        return MatrixTwoForm(tuple(variables), comps)

    def __getitem__(self, pair: tuple) -> sp.Matrix:
        vi, vj = pair
        if (vi, vj) in self.components:
            return self.components[(vi, vj)]
        if (vj, vi) in self.components:
            return -self.components[(vj, vi)]
        raise ContextError(f"({vi},{vj}) is not a variable pair of this form")

    def subtract(self, other: "MatrixTwoForm") -> "MatrixTwoForm":
        _require_same_context(self, other)
        return MatrixTwoForm.make(self.variables,
                                  {k: self.components[k] - other.components[k]
                                   for k in self.components})

    def is_zero(self) -> bool:
        return all(is_zero(m[i, j]) for m in self.components.values()
                   for i in range(2) for j in range(2))

    def max_abs_at(self, point: Mapping[sp.Symbol, sp.Expr]) -> sp.Expr:
        vals = [abs(sp.nsimplify(m[i, j].subs(point)))
                for m in self.components.values() for i in range(2) for j in range(2)]
        return max(vals) if vals else sp.Integer(0)


def matrix_exterior_derivative(omega: MatrixOneForm) -> MatrixTwoForm:
    comps = {}
    for vi, vj in _ordered_pairs(omega.variables):
        comps[(vi, vj)] = omega.components[vj].applyfunc(lambda e: sp.diff(e, vi)) - \
            omega.components[vi].applyfunc(lambda e: sp.diff(e, vj))
    return MatrixTwoForm.make(omega.variables, comps)


def matrix_wedge(a: MatrixOneForm, b: MatrixOneForm) -> MatrixTwoForm:
    """Matrix product with wedge of entries: ``(A ^ B)_ik = sum_j A_ij ^ B_jk``."""
    _require_same_context(a, b)
    comps = {}
    for vi, vj in _ordered_pairs(a.variables):
        comps[(vi, vj)] = a.components[vi] * b.components[vj] - a.components[vj] * b.components[vi]
    return MatrixTwoForm.make(a.variables, comps)


def substitute_matrix_one_form(omega: MatrixOneForm,
                               mapping: Mapping[sp.Symbol, sp.Expr],
                               new_variables: Sequence[sp.Symbol]) -> MatrixOneForm:
    """Entrywise pullback with the chain rule (see :func:`substitute_one_form`)."""
    entries = [[substitute_one_form(omega.entry(i, j), mapping, new_variables)
                for j in range(2)] for i in range(2)]
    comps = {v: sp.Matrix(2, 2, lambda i, j: entries[i][j].components[v])
             for v in new_variables}
    return MatrixOneForm.make(new_variables, comps)


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------

def residue_along(omega: MatrixOneForm, f: sp.Expr,
                  param: CurveParametrization) -> sp.Matrix:
    """Residue matrix of a simple-pole matrix one-form along ``f = 0``.

    Computes ``substitute((f * Omega_x) / (df/dx), param)`` for the first
    base variable with ``df/dx`` nonzero on the divisor, then asserts that
    the other branch restricts to the same matrix.  Raises
    :class:`PoleOrderError` when the pole is not simple (the quotient still
    has the divisor in its denominator) and ``AssertionError``-style
    :class:`PoleOrderError` when the branches disagree.
    """
    sub = dict(param.images)
    branches = []
    for v in omega.variables:
        dfv = sp.diff(f, v)
        if dfv == 0:
            continue
        if is_zero(ratcancel(dfv.subs(sub))):
            continue
        mat = sp.Matrix(2, 2, lambda i, j: _restrict_to_divisor(
            f * omega.components[v][i, j] / dfv, sub))
        branches.append((v, mat))
    if not branches:
        raise PoleOrderError(f"no usable branch for divisor {f}")
    for _v, mat in branches[1:]:
        diff = branches[0][1] - mat
        if not all(is_zero(diff[i, j]) for i in range(2) for j in range(2)):
            raise PoleOrderError(
                f"branch cross-check failed along {f}: not a simple pole or wrong divisor")
    return branches[0][1]


def _restrict_to_divisor(expr: sp.Expr, sub: Mapping[sp.Symbol, sp.Expr]) -> sp.Expr:
    expr = ratcancel(expr)
    num, den = sp.fraction(expr)
    den_r = ratcancel(den.subs(sub))
    if den_r == 0:
        raise PoleOrderError(
            "higher-order pole: residue quotient still singular on the divisor")
    num_r = ratcancel(num.subs(sub))
    return ratcancel(num_r / den_r)


# ---------------------------------------------------------------------------
# resultants and divisibility
# ---------------------------------------------------------------------------

def resultant(p: sp.Expr, q: sp.Expr, v: sp.Symbol) -> sp.Expr:
    """Sylvester resultant, convention ``Res(f,g) = lc(f)^deg(g) * prod g(roots of f)``."""
    if p == 0 or q == 0 or sp.degree(p, v) <= 0 or sp.degree(q, v) <= 0:
        raise DegenerateInputError(f"resultant inputs must have positive degree in {v}")
    return sp.expand(sp.resultant(p, q, v))


def divides_exactly(f: sp.Expr, g: sp.Expr, v: sp.Symbol):
    """``(True, q)`` iff ``g = f * q`` exactly; division is done with ``f``
    made monic in ``v`` over the fraction field of the remaining variables."""
    if f == 0:
        raise DegenerateInputError("division by the zero polynomial")
    quotient = ratcancel(sp.together(g / f))
    _num, den = sp.fraction(quotient)
    if den.free_symbols or not den.is_number:
        return False, None
    # denominator is a nonzero constant: exact polynomial quotient
    if not is_zero(sp.expand(g - f * quotient)):
        return False, None
    return True, sp.expand(quotient)


# ---------------------------------------------------------------------------
# quadratic extension K[delta]/(delta^2 - D)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadExt:
    """Element ``base + rad * delta`` of ``K[delta]/(delta^2 - D)``.

    ``K`` is the rational-function field; all arithmetic reduces
    ``delta^2 -> D``.  Elements are comparable only when their
    discriminants are identical.
    """

    base: sp.Expr
    rad: sp.Expr
    disc: sp.Expr

    @staticmethod
    def scalar(value: sp.Expr, disc: sp.Expr) -> "QuadExt":
        return QuadExt(ratcancel(value), sp.Integer(0), disc)

    @staticmethod
    def delta(disc: sp.Expr) -> "QuadExt":
        return QuadExt(sp.Integer(0), sp.Integer(1), disc)

    def _check(self, other: "QuadExt"):
        if not is_zero(self.disc - other.disc):
            raise ContextError("quadratic-extension elements with different discriminants")

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        return QuadExt(ratcancel(self.base + other.base),
                       ratcancel(self.rad + other.rad), self.disc)

    def __neg__(self):
        return QuadExt(ratcancel(-self.base), ratcancel(-self.rad), self.disc)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        self._check(other)
        base = self.base * other.base + self.rad * other.rad * self.disc
        rad = self.base * other.rad + self.rad * other.base
        return QuadExt(ratcancel(base), ratcancel(rad), self.disc)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._coerce(other) - self

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.base, ratcancel(-self.rad), self.disc)

    def norm(self) -> sp.Expr:
        """``(a + b delta)(a - b delta) = a^2 - b^2 D`` as a base-field element."""
        return ratcancel(self.base ** 2 - self.rad ** 2 * self.disc)

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if is_zero(n):
            raise PoleError("non-invertible quadratic-extension element")
        conj = self.conjugate()
        return QuadExt(ratcancel(conj.base / n), ratcancel(conj.rad / n), self.disc)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def _coerce(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            return other
        return QuadExt.scalar(sp.sympify(other), self.disc)

    def is_zero(self) -> bool:
        return is_zero(self.base) and is_zero(self.rad)

    def subs(self, mapping) -> "QuadExt":
        return QuadExt(substitute_scalar(self.base, mapping),
                       substitute_scalar(self.rad, mapping),
                       substitute_scalar(self.disc, mapping))
