"""Check registry and deterministic report assembly.

Every verification in the package is exposed as a named check producing
one or more ``CheckReport`` records.  Reports serialize to JSON with
sorted, fixed-precision fields so that repeated runs over the same inputs
are byte-identical.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import sympy as sp

from . import cas, connection, foliation, isomonodromy, monodromy

__all__ = [
    "CheckReport",
    "render_residual",
    "run_check",
    "run_all",
    "reports_to_json",
    "CHECKS",
]


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    params: dict[str, str] = field(default_factory=dict)
    status: str = "pass"  # pass | fail | reconciled
    residual: str = "0"
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "notes": self.notes,
            "params": dict(sorted(self.params.items())),
            "residual": self.residual,
            "status": self.status,
        }


def render_residual(value) -> str:
    """Exact zero renders as "0"; numbers render with fixed precision."""
    if value is None:
        return "0"
    if isinstance(value, sp.Expr):
        return "0" if value == 0 else sp.sstr(value)
    if isinstance(value, complex):
        return f"{abs(value):.12e}"
    if isinstance(value, float):
        return f"{value:.12e}"
    return str(value)


def _exact_report(check_id, params, residual, notes="") -> CheckReport:
    zero = residual == 0 or (isinstance(residual, sp.Expr) and residual == 0)
    return CheckReport(
        check_id,
        params,
        "pass" if zero else "fail",
        render_residual(residual if not zero else sp.S.Zero),
        notes,
    )


def _bool_report(check_id, params, ok, notes="") -> CheckReport:
    return CheckReport(
        check_id, params, "pass" if ok else "fail", "0" if ok else "1", notes
    )


def _params(**kwargs) -> dict[str, str]:
    out = {}
    for k, v in kwargs.items():
        if v is None:
            out[k] = "symbolic"
        elif isinstance(v, (sp.Rational, int)):
            out[k] = cas.rational_to_string(sp.Rational(v))
        else:
            out[k] = str(v)
    return out


def _point(l0_value, l1_value) -> connection.ParameterPoint:
    if l0_value is None:
        return connection.ParameterPoint()
    return connection.ParameterPoint(sp.Rational(l0_value), sp.Rational(l1_value))


# ---------------------------------------------------------------------------
# Individual checks.
# ---------------------------------------------------------------------------


def check_flatness(l0_value=None, l1_value=None, **_) -> list[CheckReport]:
    params = _params(l0=l0_value, l1=l1_value)
    conn = connection.build_connection(_point(l0_value, l1_value))
    residual = connection.verify_flatness(conn)
    flat = residual.is_zero()
    trace = connection.trace_form(conn)
    return [
        _bool_report("flatness", params, flat, "d Omega - Omega ^ Omega"),
        _bool_report("trace-free", params, trace.is_zero(), "trace(Omega)"),
    ]


def check_construction(l0_value=None, l1_value=None, **_) -> list[CheckReport]:
    params = _params(l0=l0_value, l1=l1_value)
    p = _point(l0_value, l1_value)
    up = connection.upstairs_data(p)
    return [
        _bool_report(
            "construction-eta",
            params,
            connection.verify_eta_invariance(up),
            "deck invariance of the abelian form",
        ),
        _bool_report(
            "construction-pullback",
            params,
            connection.verify_pullback_identity(up),
            "pullback wedge identity on the double cover",
        ),
        _bool_report(
            "construction-deck",
            params,
            connection.deck_symmetry_holds(up),
            "deck symmetry of the upstairs data",
        ),
        _bool_report(
            "construction-phi",
            params,
            connection.verify_phi_conjugation(p),
            "conjugation proportionality",
        ),
    ]


_TABLE2_DETS = {
    "y=0": lambda L0, L1: -((L0 - 1) ** 2) / 4,
    "x=0": lambda L0, L1: -(L1**2) / 4,
    "conic": lambda L0, L1: sp.Rational(-1, 16),
    "line_at_infinity": lambda L0, L1: -((L0 + L1) ** 2) / 4,
}


def check_residues(
    l0_value=None, l1_value=None, alpha_value=None, z_value=None, **_
) -> list[CheckReport]:
    params = _params(l0=l0_value, l1=l1_value)
    conn = connection.build_connection(_point(l0_value, l1_value))
    L0 = connection.l0 if l0_value is None else sp.Rational(l0_value)
    L1 = connection.l1 if l1_value is None else sp.Rational(l1_value)
    out = []
    for label, _matrix, det in connection.residue_table(conn):
        target = _TABLE2_DETS[label](L0, L1)
        out.append(
            _exact_report(
                f"residue-det-{label}",
                params,
                sp.cancel(det - target),
                "plane residue determinant",
            )
        )
    line_params = _params(
        l0=l0_value, l1=l1_value, alpha=alpha_value, z=z_value
    )
    line = isomonodromy.verify_line_residues(
        l0_value, l1_value, alpha_value, z_value
    )
    for label, det, matches in line:
        out.append(
            _bool_report(
                f"line-residue-det-{label}",
                line_params,
                matches,
                f"determinant {sp.sstr(det)}",
            )
        )
    return out


def check_pvi(l0_value=None, l1_value=None, **_) -> list[CheckReport]:
    params = _params(l0=l0_value, l1=l1_value)
    if l0_value is None:
        residual = isomonodromy.pvi_residual()
    else:
        residual = isomonodromy.pvi_verify(l0_value, l1_value)
    closed = sp.cancel(
        isomonodromy.q_from_residues() - isomonodromy.pvi_solution()
    )
    return [
        _exact_report("pvi-residual", params, sp.cancel(sp.together(residual))),
        _exact_report(
            "pvi-q-from-residues",
            _params(l0=None, l1=None),
            closed,
            "apparent-singularity root equals the closed form",
        ),
    ]


def sign_ledger_reports() -> list[CheckReport]:
    out = []
    for e in isomonodromy.verify_chart_relations():
        if e.convention in ("printed", "flipped"):
            status = "pass" if e.convention == "printed" else "reconciled"
            note = f"sign ledger: {e.relation} -> {e.convention}"
            residual = "0"
        elif e.convention == "reconciled":
            status = "reconciled"
            note = f"sign ledger: {e.relation} -> reconciled; {e.note}"
            residual = "0"
        else:
            status = "fail"
            note = f"sign ledger: {e.relation} -> failed under both signs"
            residual = sp.sstr(e.residual_printed)
        out.append(
            CheckReport(f"garnier-{e.relation}", {}, status, residual, note)
        )
    for e in isomonodromy.verify_derived_chart_relations():
        ok = e.convention in ("relabeled", "relabeled-flipped")
        out.append(
            CheckReport(
                f"garnier-derived-{e.relation}",
                {},
                "reconciled" if ok else "fail",
                "0" if ok else sp.sstr(e.residual_printed),
                f"sign ledger (derived chart): {e.relation} -> "
                f"{e.convention}; {e.note}",
            )
        )
    return out


def check_garnier(full: bool = False, **_) -> list[CheckReport]:
    out = sign_ledger_reports()
    parity = isomonodromy.garnier_parity_table()
    out.append(
        _bool_report(
            "garnier-parity",
            {},
            all(kind == "even" for _n, kind in parity),
            "chart quantities even under z -> -z",
        )
    )
    golden = isomonodromy.hamiltonian_eval(2, 3, 1, 1, 1, -1)
    target = (
        -9 * connection.l0 - 54 * connection.l1 + 54,
        -sp.Rational(23, 8) * connection.l0 - sp.Rational(25, 2) * connection.l1 + 12,
        -sp.Rational(19, 12) * connection.l0 + sp.Rational(16, 3) * connection.l1
        - sp.Rational(8, 3),
    )
    ham_res = sum(sp.expand(g - t) for g, t in zip(golden, target))
    out.append(
        _exact_report(
            "garnier-hamiltonian-golden",
            _params(t1=2, t2=3, p1=1, p2=1, q1=1, q2=-1),
            ham_res,
            "H, H1, H2 at the pinned chart point",
        )
    )
    disc = isomonodromy.chart_transcription_discrepancy()
    out.append(
        CheckReport(
            "garnier-chart-transcription",
            {},
            "reconciled" if disc["Pq"] == 0 else "fail",
            sp.sstr(sp.factor(disc["Sq"])),
            "transcribed chart equals the relabeled derived chart except "
            "for one Sq term (the recorded residual)",
        )
    )
    if full:
        schlesinger = isomonodromy.verify_schlesinger()
        out.append(
            _bool_report(
                "garnier-isomonodromy-schlesinger",
                {},
                schlesinger.all_zero,
                "moving-pole deformation equations hold identically in "
                "(l0, l1, alpha, z); complete symbolic isomonodromy "
                "certificate",
            )
        )
        derivation = isomonodromy.derive_sp_gamma()
        out.append(
            _bool_report(
                "garnier-sp-gamma-derivation",
                {},
                derivation.delta_free and derivation.matches_transcribed,
                derivation.note,
            )
        )
        for r in isomonodromy.verify_symmetrized_system():
            out.append(
                _bool_report(
                    f"garnier-symmetrized-{r.quantity}-k{r.k}",
                    {},
                    r.vanishes,
                    "evolution residual in the delta-extension, as "
                    "transcribed",
                )
            )
    return out


def check_quartic(l0_value=2, l1_value=3, tol=1e-6, **_) -> list[CheckReport]:
    quartic = isomonodromy.elimination_quartic()
    out = [
        _bool_report(
            "quartic-degree", {}, sp.degree(quartic, isomonodromy.X) == 4
        ),
        _bool_report(
            "quartic-vanishes",
            {},
            isomonodromy.quartic_vanishes_on_chart(quartic),
            "P(Sq, t1, t2) = 0 on the parametrized surface",
        ),
    ]
    probes = isomonodromy.quartic_probe(l0_value, l1_value, tol)
    expected = {"t1 -> 0": [2, 2], "t1 -> 1": [2, 2], "t1 -> oo": [4],
                "t1 = t2 generic": [1, 1, 1, 1]}
    for probe in probes:
        out.append(
            _bool_report(
                f"quartic-multiplicity-{probe.locus}",
                _params(l0=l0_value, l1=l1_value, tol=tol),
                probe.pattern == expected[probe.locus],
                f"pattern {probe.pattern}, normalization {probe.normalization}",
            )
        )
    return out


def check_monodromy(
    l0_value=sp.Rational(1, 3),
    l1_value=sp.Rational(1, 5),
    alpha_value=3,
    z_value=2,
    tol=1e-10,
    **_,
) -> list[CheckReport]:
    params = _params(
        l0=l0_value, l1=l1_value, alpha=alpha_value, z=z_value, tol=tol
    )
    lr = monodromy.line_restriction_system(
        l0_value, l1_value, alpha_value, z_value
    )
    records = monodromy.monodromy_representation(lr, tol)
    out = []
    for r in records:
        entries = ";".join(
            f"{v.real:.12e}{v.imag:+.12e}j"
            for v in (
                r.matrix[0, 0],
                r.matrix[0, 1],
                r.matrix[1, 0],
                r.matrix[1, 1],
            )
        )
        out.append(
            CheckReport(
                f"monodromy-loop-{r.label}",
                params,
                "pass" if abs(r.det - 1) <= 1e-9 else "fail",
                f"{abs(r.det - 1):.12e}",
                f"trace {r.trace.real:.12e}{r.trace.imag:+.12e}j; "
                f"entries {entries}; step-halving error {r.error_estimate:.3e}",
            )
        )
    report = monodromy.verify_dihedral(records, 1e-6)
    out.append(
        _bool_report(
            "monodromy-dihedral",
            params,
            report.passed,
            f"antidiagonal traces {sorted(report.antidiagonal_traces)}, "
            f"product order {list(report.product_order)}, "
            f"product residual {report.product_residual:.3e}",
        )
    )
    u, v = monodromy.rho_uv_from_parameters(l0_value, l1_value)
    rel = monodromy.rho_uv_relations(u, v)
    out.append(
        _bool_report(
            "monodromy-rho-relations",
            params,
            rel.passed,
            "group relations at the numerical parameters",
        )
    )
    return out


def check_foliation(**_) -> list[CheckReport]:
    out = []
    ok = True
    try:
        foliation.singular_points()
    except ArithmeticError:
        ok = False
    out.append(
        _bool_report("foliation-singular-points", {}, ok, "seven certified points")
    )
    out.append(
        _exact_report(
            "foliation-lv-wedge", {}, foliation.lv_equivalence(),
            "wedge with the normalized Lotka-Volterra form",
        )
    )
    out.append(
        _bool_report("foliation-j-orbit", {}, foliation.j_orbit_check(),
                     "B = J(A), C = J^2(A), J^3 = id, ABC = 1")
    )
    out.append(
        _bool_report(
            "foliation-quotient", {}, foliation.quotient_dependence_check(),
            "form is homogeneous linear in the parameters",
        )
    )
    for name, cert in foliation.quintic_component_check().items():
        out.append(
            _bool_report(
                f"foliation-invariant-{name}", {}, cert.divides and cert.reverify()
            )
        )
    return out


def check_curve(n: int = 1, **_) -> list[CheckReport]:
    cert = foliation.invariant_curve_check(int(n))
    return [
        CheckReport(
            "invariant-curve",
            _params(n=int(n)),
            "pass" if cert.divides and cert.reverify() else "fail",
            "0" if cert.divides else "1",
            f"quotient {sp.sstr(cert.quotient)}",
        )
    ]


def check_rho(**_) -> list[CheckReport]:
    u, v = sp.symbols("u v", nonzero=True)
    rep = monodromy.rho_uv_relations(u, v)
    return [
        _bool_report(
            "rho-relations-symbolic", {}, rep.passed,
            "all group relations over the rational function field",
        )
    ]


CHECKS = {
    "flatness": check_flatness,
    "construction": check_construction,
    "residues": check_residues,
    "pvi": check_pvi,
    "garnier": check_garnier,
    "quartic": check_quartic,
    "monodromy": check_monodromy,
    "foliation": check_foliation,
    "curve": check_curve,
    "rho": check_rho,
}


def run_check(name: str, **kwargs) -> list[CheckReport]:
    if name not in CHECKS:
        raise KeyError(f"unknown check id: {name}")
    return CHECKS[name](**kwargs)


def _thread_count() -> int:
    raw = os.environ.get("DIHEDRAL_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def run_all(check_names=None, **kwargs) -> list[CheckReport]:
    """Run a list of checks (default: all) and merge deterministically.

    Checks execute in parallel tasks; the merged report is sorted by
    check id and then by rendered parameters, independent of completion
    order.
    """
    names = list(CHECKS) if check_names is None else list(check_names)
    for name in names:
        if name not in CHECKS:
            raise KeyError(f"unknown check id: {name}")
    results: list[CheckReport] = []
    if kwargs.get("full") is None:
        kwargs["full"] = True
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        for part in pool.map(lambda n: CHECKS[n](**kwargs), names):
            results.extend(part)
    results.sort(key=lambda r: (r.check_id, sorted(r.params.items())))
    return results


def reports_to_json(reports: list[CheckReport]) -> str:
    return json.dumps(
        [r.to_dict() for r in reports], indent=2, sort_keys=True
    )
