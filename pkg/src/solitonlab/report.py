"""Identity-suite orchestration over scenario point plans, and report emission.

run_suite walks every plan point, evaluates each applicable identity with
its resolved tolerance, gathers derived constants (curvature scalar, solved
soliton constants, conformal factors, fitted fluid parameters) with their
spread across points, and assembles a deterministic report.  Identities are
either *asserted* (they decide the verdict) or merely *reported*;
conditional identities additionally carry an ``applicable`` flag and only
count toward the verdict when their hypothesis holds.

The JSON document is stable: identical scenarios yield byte-identical
reports when the timestamp is suppressed.
"""

from __future__ import annotations

import dataclasses
import datetime
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .expressions import EvalDomainError
from .geometry import (
    GeometryError,
    bianchi_first_residual,
    contracted_bianchi_residual,
    fd_convergence_ratio,
    laplacian_routes,
    max_abs,
    metric_at,
    metric_compatibility_residual,
    ricci,
    riemann_antisymmetry_residual,
)
from .scenario import Scenario
from .solitons import (
    ETA_FAMILIES,
    PointSamples,
    ckv_fit,
    classify,
    eta_closed_forms,
    eta_projection_solve,
    gradient_soliton_residual,
    lambda_closed_form,
    lambda_from_projection,
    laplacian_identity_check,
    nabla_decomposition_check,
    phi_closed_form,
    potential_field_identities,
    soliton_residual,
    torse_consequence_residuals,
    torse_forming_residual,
    torse_lie_residual,
    two_form_pack,
)
from .spacetimes import (
    FluidState,
    FluidValues,
    UnitNormError,
    efe_residual,
    einstein_eigen_check,
    fluid_from_ricci,
)

__all__ = [
    "DEFAULT_TOLERANCES",
    "TOLERANCE_ENV_VAR",
    "IdentityReport",
    "resolve_tolerances",
    "run_suite",
    "emit_report",
    "exit_code_for",
]

TOLERANCE_ENV_VAR = "SOLITONLAB_TOL"

_GENERIC_DEFAULT = 1e-5

DEFAULT_TOLERANCES: dict[str, float] = {
    "default": _GENERIC_DEFAULT,
    "riemann_antisymmetry": 1e-6,
    "bianchi_first": 1e-5,
    "bianchi_contracted": 1e-4,
    "metric_compatibility": 1e-5,
    "efe_residual": 1e-5,
    "scalar_curvature_relation": 1e-5,
    "perfect_fluid_fit": 1e-5,
    "einstein_eigen_multiset": 1e-5,
    "ricci_operator_bilinear": 1e-9,
    "nabla_decomposition": 1e-5,
    "f_skew_adjoint": 1e-9,
    "torse_forming": 1e-5,
    "torse_geodesic_flow": 1e-5,
    "torse_eta_derivative": 1e-5,
    "torse_curvature_action": 1e-5,
    "torse_eta_curvature": 1e-5,
    "torse_lie_form": 1e-5,
    "soliton_residual": 1e-9,
    "potential_curvature_identity": 1e-5,
    "rotation_divergence_identity": 1e-5,
    "potential_norm_identity": 1e-5,
    "eta_backsubstitution": 1e-9,
    "eta_vs_closed_form": 1e-5,
    "phi_lambda_consistency": 1e-12,
    "lambda_projection_vs_closed_form": 1e-5,
    "laplacian_two_route": 1e-6,
    "laplacian_identity": 1e-5,
    "applicability": 1e-6,
    "unit_timelike": 1e-6,
    "steady_classification": 1e-9,
    "ckv_fit": 1e-6,
}

# canonical emission order for identities; keeps reports byte-stable
_IDENTITY_ORDER = [
    "riemann_antisymmetry",
    "bianchi_first",
    "bianchi_contracted",
    "metric_compatibility",
    "efe_residual",
    "scalar_curvature_relation",
    "perfect_fluid_fit",
    "einstein_eigen_multiset",
    "ricci_operator_bilinear",
    "nabla_decomposition",
    "f_skew_adjoint",
    "torse_forming",
    "torse_geodesic_flow",
    "torse_eta_derivative",
    "torse_curvature_action",
    "torse_eta_curvature",
    "torse_lie_form",
    "soliton_residual",
    "potential_curvature_identity",
    "rotation_divergence_identity",
    "potential_norm_identity",
    "eta_backsubstitution",
    "eta_vs_closed_form",
    "phi_lambda_consistency",
    "lambda_projection_vs_closed_form",
    "laplacian_two_route",
    "laplacian_identity",
]


def resolve_tolerances(overrides: dict[str, float] | None = None) -> dict[str, float]:
    """Built-in defaults, then the environment override, then scenario values.

    Setting SOLITONLAB_TOL replaces the generic default tolerance; identities
    whose built-in tolerance equals that generic value follow it.  Scenario
    overrides always win.
    """
    tols = dict(DEFAULT_TOLERANCES)
    env = os.environ.get(TOLERANCE_ENV_VAR)
    if env:
        try:
            value = float(env)
        except ValueError as exc:
            raise ValueError(f"{TOLERANCE_ENV_VAR} must be a number, got {env!r}") from exc
        if value <= 0:
            raise ValueError(f"{TOLERANCE_ENV_VAR} must be positive")
        for key, tol in DEFAULT_TOLERANCES.items():
            if tol == _GENERIC_DEFAULT:
                tols[key] = value
        tols["default"] = value
    if overrides:
        tols.update(overrides)
    return tols


@dataclass
class _PointRecord:
    coordinates: tuple[float, ...]
    identities: dict[str, dict] = field(default_factory=dict)
    derived: dict[str, float] = field(default_factory=dict)
    error: str | None = None

    def add(
        self,
        name: str,
        residual: float | None,
        tolerance: float,
        asserted: bool,
        applicable: bool = True,
    ) -> None:
        passed = None if residual is None else bool(residual <= tolerance)
        self.identities[name] = {
            "residual": residual,
            "tolerance": tolerance,
            "passed": passed,
            "asserted": asserted,
            "applicable": applicable,
        }


@dataclass
class IdentityReport:
    """Suite outcome: per-point residuals, derived constants, verdict."""

    scenario: Scenario
    tolerances: dict[str, float]
    points: list[_PointRecord]
    summary: dict
    warnings: list[str]

    @property
    def verdict(self) -> str:
        return self.summary["verdict"]

    def to_dict(self, include_timestamp: bool = True) -> dict:
        doc: dict[str, Any] = {
            "schema_version": "1.0",
            "tool": {"name": "solitonlab", "version": __version__},
        }
        if include_timestamp:
            doc["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        doc["scenario"] = self.scenario.to_dict()
        doc["tolerances"] = {k: self.tolerances[k] for k in sorted(self.tolerances)}
        doc["warnings"] = list(self.warnings)
        doc["points"] = [
            {
                "coordinates": list(rec.coordinates),
                "error": rec.error,
                "identities": {
                    name: rec.identities[name]
                    for name in _IDENTITY_ORDER
                    if name in rec.identities
                },
                "derived": {k: rec.derived[k] for k in sorted(rec.derived)},
            }
            for rec in self.points
        ]
        doc["summary"] = self.summary
        return _json_safe(doc)

    def to_text(self) -> str:
        lines = [f"scenario: {self.scenario.name}", f"verdict: {self.verdict.upper()}"]
        n_err = sum(1 for rec in self.points if rec.error)
        lines.append(f"points: {len(self.points)} planned, {len(self.points) - n_err} evaluated, {n_err} errors")
        worst: dict[str, dict] = {}
        for rec in self.points:
            for name, info in rec.identities.items():
                if info["residual"] is None:
                    continue
                if name not in worst or info["residual"] > worst[name]["residual"]:
                    worst[name] = info
        if worst:
            lines.append("identities (worst over points):")
            for name in _IDENTITY_ORDER:
                if name not in worst:
                    continue
                info = worst[name]
                status = "pass" if info["passed"] else "FAIL"
                tag = "asserted" if info["asserted"] else ("reported" if info["applicable"] else "inapplicable")
                lines.append(
                    f"  {name:34s} {info['residual']:10.3e} <= {info['tolerance']:8.1e}  {status}  [{tag}]"
                )
        derived = self.summary.get("derived", {})
        if derived:
            lines.append("derived constants:")
            for name in sorted(derived):
                stats = derived[name]
                lines.append(f"  {name:26s} mean={stats['mean']:+.9g} spread={stats['spread']:.3e}")
        cls = self.summary.get("classification")
        if cls:
            lines.append(
                f"classification: {cls['category']} (constant={cls['value']:+.9g}, convention={cls['convention']})"
            )
        ckv = self.summary.get("ckv")
        if ckv:
            extra = "" if ckv.get("theta") is None else f", einstein theta={ckv['theta']:+.6g}"
            lines.append(f"conformal fit: {ckv['category']} (residual={ckv['residual']:.3e}{extra})")
        health = self.summary.get("numerics_health", {})
        if health:
            ratio = health.get("fd_convergence_ratio")
            ratio_txt = "n/a (flat)" if ratio is None else f"{ratio:.3f}"
            lines.append(
                f"numerics: ricci asymmetry max={health.get('ricci_asymmetry_max', 0.0):.3e}, "
                f"fd convergence ratio={ratio_txt}"
            )
        for w in self.warnings:
            lines.append(f"warning: {w}")
        for f_ in self.summary.get("failures", []):
            lines.append(
                f"failure: point {f_['point']} {f_['identity']} residual {f_['residual']:.3e} > {f_['tolerance']:.1e}"
            )
        for e in self.summary.get("errors", []):
            lines.append(f"error: point {e['point']}: {e['message']}")
        return "\n".join(lines) + "\n"


def _json_safe(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _plan_warnings(scenario: Scenario) -> list[str]:
    warnings = []
    for i, point in enumerate(scenario.points):
        try:
            metric_at(scenario.metric, point, scenario.numerics)
        except (EvalDomainError, GeometryError) as exc:
            warnings.append(f"plan point {i} {list(point)}: metric not evaluable there ({exc})")
    return warnings


def _effective_constants(scenario: Scenario, rec: _PointRecord) -> tuple[float | None, float | None]:
    params = scenario.soliton
    if params is None:
        return None, None
    lam = params.lam
    mu = params.mu
    if lam is None:
        lam = rec.derived.get("eta_lambda" if params.family in ETA_FAMILIES else "lambda_projection")
    if mu is None and params.family in ETA_FAMILIES:
        mu = rec.derived.get("eta_mu")
    return lam, mu


def _evaluate_point(scenario: Scenario, point, tols: dict[str, float], solve: bool) -> _PointRecord:
    rec = _PointRecord(coordinates=tuple(float(v) for v in point))
    m = scenario.metric
    cfg = scenario.numerics
    coords = scenario.coords
    v = scenario.vector_field

    g_sample = metric_at(m, point, cfg)
    g = g_sample.components
    g_inv = np.linalg.inv(g)
    s_sample = ricci(m, point, cfg)
    s = s_sample.components
    r = float(np.einsum("ij,ij->", g_inv, s))
    rec.derived["scalar_curvature"] = r
    rec.derived["ricci_asymmetry"] = s_sample.symmetry_defect or 0.0

    rec.add("riemann_antisymmetry", riemann_antisymmetry_residual(m, point, cfg), tols["riemann_antisymmetry"], True)
    rec.add("bianchi_first", bianchi_first_residual(m, point, cfg), tols["bianchi_first"], True)
    rec.add("bianchi_contracted", contracted_bianchi_residual(m, point, cfg), tols["bianchi_contracted"], True)
    rec.add("metric_compatibility", metric_compatibility_residual(m, point, cfg), tols["metric_compatibility"], True)

    v_val = v.value(m, point, cfg) if v is not None else None
    unit_timelike = False
    if v_val is not None:
        unit_timelike = abs(float(v_val @ g @ v_val) + 1.0) <= tols["unit_timelike"]

    # fluid block
    fluid_values: FluidValues | None = None
    efe_ok = False
    if scenario.fluid is not None:
        base = scenario.fluid.at(point, coords)
        if unit_timelike:
            fitted, fit = fluid_from_ricci(s, g, v_val, base.kappa, base.lam, tols["perfect_fluid_fit"])
            rec.derived["sigma_fit"] = fitted.sigma
            rec.derived["rho_fit"] = fitted.rho
            fit_residual = max(fit.residual, fit.isotropy_spread)
            rec.add("perfect_fluid_fit", fit_residual, tols["perfect_fluid_fit"], scenario.fluid_fit_requested)
            fluid_values = fitted if scenario.fluid_fit_requested else base
        else:
            rec.add("perfect_fluid_fit", None, tols["perfect_fluid_fit"], False, applicable=False)
            fluid_values = None if scenario.fluid_fit_requested else base

        if fluid_values is not None:
            rec.add(
                "scalar_curvature_relation",
                abs(
                    r
                    - (4.0 * fluid_values.lam + fluid_values.kappa * (fluid_values.sigma - 3.0 * fluid_values.rho))
                ),
                tols["scalar_curvature_relation"],
                scenario.assert_field_equation,
            )
            bilinear = max_abs(g @ (g_inv @ s) - s)
            rec.add("ricci_operator_bilinear", bilinear, tols["ricci_operator_bilinear"], True)
        if fluid_values is not None and unit_timelike:
            fluid_state = scenario.fluid
            if scenario.fluid_fit_requested:
                fluid_state = FluidState(fluid_values.sigma, fluid_values.rho, fluid_values.kappa, fluid_values.lam)
            efe = efe_residual(m, fluid_state, v, point, cfg)
            efe_norm = max_abs(efe.components)
            efe_ok = efe_norm <= tols["applicability"]
            rec.add("efe_residual", efe_norm, tols["efe_residual"], scenario.assert_field_equation)
            eig = einstein_eigen_check(m, fluid_state, v, point, cfg, tols["applicability"])
            rec.add(
                "einstein_eigen_multiset",
                eig.max_deviation,
                tols["einstein_eigen_multiset"],
                asserted=eig.applicable,
                applicable=eig.applicable,
            )

    # vector-field block: unconditional decomposition and skewness
    if v is not None:
        rec.add("nabla_decomposition", nabla_decomposition_check(m, v, point, cfg), tols["nabla_decomposition"], True)
        pack = two_form_pack(m, v, point, cfg)
        rec.add("f_skew_adjoint", pack.skew_defect, tols["f_skew_adjoint"], True)

        torse_asserted = "torse" in scenario.assertions and unit_timelike
        rec.add("torse_forming", torse_forming_residual(m, v, point, cfg), tols["torse_forming"], torse_asserted, applicable=unit_timelike)
        tc = torse_consequence_residuals(m, v, point, cfg)
        rec.add("torse_geodesic_flow", tc.geodesic_flow, tols["torse_geodesic_flow"], torse_asserted, applicable=tc.unit_timelike)
        rec.add("torse_eta_derivative", tc.eta_derivative, tols["torse_eta_derivative"], torse_asserted, applicable=tc.unit_timelike)
        rec.add("torse_curvature_action", tc.curvature_action, tols["torse_curvature_action"], torse_asserted, applicable=tc.unit_timelike)
        rec.add("torse_eta_curvature", tc.eta_curvature, tols["torse_eta_curvature"], torse_asserted, applicable=tc.unit_timelike)
        rec.add("torse_lie_form", torse_lie_residual(m, v, point, cfg), tols["torse_lie_form"], torse_asserted, applicable=unit_timelike)

        if v.is_gradient:
            div_route, trace_route = laplacian_routes(m, v.potential, point, cfg)
            rec.derived["laplacian"] = trace_route
            rec.add("laplacian_two_route", abs(div_route - trace_route), tols["laplacian_two_route"], True)

    # soliton block
    params = scenario.soliton
    if solve and params is not None and v is not None:
        samples = PointSamples.from_geometry(m, v, point, cfg)
        lie_xi_xi = abs(float(v_val @ samples.lie_vg @ v_val)) if v_val is not None else None
        projection_valid = unit_timelike and lie_xi_xi is not None and lie_xi_xi <= tols["applicability"]

        if params.family in ETA_FAMILIES:
            if unit_timelike:
                sol = eta_projection_solve(samples, params.alpha, params.beta, params.p_at(point, coords))
                rec.derived["eta_lambda"] = sol.lam
                rec.derived["eta_mu"] = sol.mu
                rec.derived["div_xi"] = sol.div_xi
                rec.add("eta_backsubstitution", sol.back_substitution, tols["eta_backsubstitution"], True)
                if fluid_values is not None:
                    cf_lam, cf_mu = eta_closed_forms(
                        fluid_values, params.alpha, params.beta, params.p_at(point, coords), sol.div_xi
                    )
                    deviation = max(abs(sol.lam - cf_lam), abs(sol.mu - cf_mu))
                    applicable = efe_ok and projection_valid
                    rec.add("eta_vs_closed_form", deviation, tols["eta_vs_closed_form"], applicable, applicable=applicable)
        elif params.family != "gradient_ricci_yamabe":
            if v_val is not None:
                lam_proj = lambda_from_projection(samples, params)
                rec.derived["lambda_projection"] = lam_proj
                if fluid_values is not None:
                    closed = lambda_closed_form(
                        fluid_values, params.alpha, params.beta, params.p_at(point, coords)
                    )
                    applicable = efe_ok and projection_valid
                    rec.add(
                        "lambda_projection_vs_closed_form",
                        abs(lam_proj - closed),
                        tols["lambda_projection_vs_closed_form"],
                        applicable,
                        applicable=applicable,
                    )

        if fluid_values is not None:
            lam_any = params.lam if params.lam is not None else rec.derived.get(
                "eta_lambda" if params.family in ETA_FAMILIES else "lambda_projection", 0.0
            )
            p_val = params.p_at(point, coords)
            consistency = abs(
                phi_closed_form(fluid_values, params.alpha, params.beta, p_val, lam_any)
                + lam_any
                - lambda_closed_form(fluid_values, params.alpha, params.beta, p_val)
            )
            rec.add("phi_lambda_consistency", consistency, tols["phi_lambda_consistency"], True)

        lam_eff, mu_eff = _effective_constants(scenario, rec)
        if params.family == "gradient_ricci_yamabe":
            if v.is_gradient and lam_eff is not None:
                res = gradient_soliton_residual(m, v.potential, dataclasses.replace(params, lam=lam_eff), point, cfg)
                rec.add(
                    "soliton_residual",
                    max_abs(res.components),
                    tols["soliton_residual"],
                    scenario.assert_soliton_residual,
                )
        elif lam_eff is not None and (params.family not in ETA_FAMILIES or mu_eff is not None):
            eff = dataclasses.replace(params, lam=float(lam_eff), mu=None if mu_eff is None else float(mu_eff))
            res_norm = max_abs(soliton_residual(samples, eff).components)
            rec.add("soliton_residual", res_norm, tols["soliton_residual"], scenario.assert_soliton_residual)
            # the three consequence identities are derived from the plain
            # (non-eta) soliton equation; the vertical term changes the
            # covariant-derivative split, so they do not carry over
            if fluid_values is not None and params.family not in ETA_FAMILIES:
                ident = potential_field_identities(
                    m, v, fluid_values, eff, point, cfg, applicability_tol=tols["applicability"]
                )
                rec.add(
                    "potential_curvature_identity",
                    ident.curvature_identity,
                    tols["potential_curvature_identity"],
                    asserted=ident.applicable,
                    applicable=ident.applicable,
                )
                rec.add(
                    "rotation_divergence_identity",
                    ident.divergence_identity,
                    tols["rotation_divergence_identity"],
                    asserted=ident.applicable,
                    applicable=ident.applicable,
                )
                rec.add(
                    "potential_norm_identity",
                    ident.norm_gradient_identity,
                    tols["potential_norm_identity"],
                    asserted=ident.applicable,
                    applicable=ident.applicable,
                )

        if (
            params.family in ETA_FAMILIES
            and v.is_gradient
            and fluid_values is not None
        ):
            try:
                lap_res = laplacian_identity_check(
                    m, v.potential, fluid_values, params.alpha, params.beta, point, cfg, mu=None
                )
                rec.add("laplacian_identity", abs(lap_res), tols["laplacian_identity"], True)
            except UnitNormError:
                rec.add("laplacian_identity", None, tols["laplacian_identity"], False, applicable=False)
    return rec


def run_suite(scenario: Scenario, solve: bool = True) -> IdentityReport:
    """Evaluate every applicable identity at every plan point.

    Per-point numerical failures are recorded in the report rather than
    raised; the suite only fails outright when no point is evaluable.
    """
    tols = resolve_tolerances(scenario.tolerances)
    warnings = _plan_warnings(scenario)
    records: list[_PointRecord] = []
    for point in scenario.points:
        try:
            records.append(_evaluate_point(scenario, point, tols, solve))
        except (EvalDomainError, GeometryError, UnitNormError, ValueError) as exc:
            rec = _PointRecord(coordinates=tuple(float(x) for x in point))
            rec.error = str(exc)
            records.append(rec)

    summary = _summarize(scenario, records, tols, solve)
    return IdentityReport(scenario, tols, records, summary, warnings)


def _summarize(scenario: Scenario, records: list[_PointRecord], tols: dict[str, float], solve: bool) -> dict:
    derived: dict[str, dict] = {}
    keys = sorted({k for rec in records for k in rec.derived})
    for key in keys:
        values = [rec.derived[key] for rec in records if key in rec.derived]
        derived[key] = {
            "values": values,
            "mean": float(np.mean(values)),
            "spread": float(max(values) - min(values)),
        }

    failures = []
    for i, rec in enumerate(records):
        for name in _IDENTITY_ORDER:
            info = rec.identities.get(name)
            if info and info["asserted"] and info["applicable"] and info["passed"] is False:
                failures.append(
                    {
                        "point": i,
                        "identity": name,
                        "residual": info["residual"],
                        "tolerance": info["tolerance"],
                    }
                )
    errors = [{"point": i, "message": rec.error} for i, rec in enumerate(records) if rec.error]
    all_failed = len(errors) == len(records) and records

    classification = None
    if solve and scenario.soliton is not None:
        lam_key = "eta_lambda" if scenario.soliton.family in ETA_FAMILIES else "lambda_projection"
        lam_value = scenario.soliton.lam
        source = "explicit"
        if lam_value is None and lam_key in derived:
            lam_value = derived[lam_key]["mean"]
            source = lam_key
        if lam_value is not None:
            result = classify(lam_value, tolerance=tols["steady_classification"])
            classification = {
                "value": result.lam,
                "category": result.category,
                "convention": result.convention,
                "tolerance": result.tolerance,
                "source": source,
                "spread": derived.get(lam_key, {}).get("spread", 0.0),
            }

    ckv_summary = None
    good_points = [rec.coordinates for rec in records if rec.error is None]
    if solve and scenario.vector_field is not None and len(good_points) >= 2:
        try:
            analysis = ckv_fit(
                scenario.metric,
                scenario.vector_field,
                good_points,
                scenario.numerics,
                tolerance=tols["ckv_fit"],
                params=scenario.soliton,
            )
            ckv_summary = {
                "category": analysis.category,
                "phis": list(analysis.phis),
                "residual": analysis.residual,
                "theta": analysis.theta,
                "psi": analysis.psi,
            }
        except (EvalDomainError, GeometryError, UnitNormError):
            ckv_summary = None

    health: dict[str, Any] = {}
    asym = [rec.derived.get("ricci_asymmetry") for rec in records if "ricci_asymmetry" in rec.derived]
    if asym:
        health["ricci_asymmetry_max"] = float(max(asym))
    for rec in records:
        if rec.error is None:
            try:
                health["fd_convergence_ratio"] = fd_convergence_ratio(
                    scenario.metric, rec.coordinates, scenario.numerics
                )
            except (EvalDomainError, GeometryError):
                health["fd_convergence_ratio"] = None
            break

    verdict = "fail" if (failures or all_failed) else "pass"
    return {
        "derived": derived,
        "classification": classification,
        "ckv": ckv_summary,
        "numerics_health": health,
        "failures": failures,
        "errors": errors,
        "verdict": verdict,
    }


def emit_report(report: IdentityReport, fmt: str = "json", include_timestamp: bool = True) -> str:
    """Serialise; json is the stable machine format, text a human summary."""
    if fmt == "json":
        return json.dumps(report.to_dict(include_timestamp=include_timestamp), indent=2, allow_nan=False) + "\n"
    if fmt == "text":
        return report.to_text()
    raise ValueError(f"unknown report format {fmt!r}")


def exit_code_for(report: IdentityReport) -> int:
    """0 for a passing report, 1 for any asserted identity failure."""
    return 0 if report.verdict == "pass" else 1
