"""End-to-end analysis: run requested stages in dependency order and
assemble an auditable report.

Every verdict in the report sits next to the residuals that justify it,
rendered in the input grammar so they can be re-checked independently.
Reports are deterministic for a fixed request and seed, except for the
wall-clock timings section.
"""

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .cartan import (
    FLAT_TABLE,
    OdeProblem,
    REDUCED_TABLE,
    STRUCTURE_NAMES,
    check_einstein_conditions,
    family_detect,
    family_invariants,
    family_invariants_residuals,
    invariant_K,
    verify_appendix,
)
from .connection import cartan_connection_report, metric_connection_report
from .curvature import (
    curvature_tensors,
    einstein_residual,
    metric_from_family,
    family_metric,
)
from .errors import (
    DegenerateOdeError,
    ExpressionSyntaxError,
    FamilyRejectionError,
    OdeCartanError,
    PetrovDegeneracyError,
    UnknownSymbolError,
)
from .expression import Expression
from .parse import parse_expression
from .petrov import classify_at_point
from .symbols import J2_CHART, SymbolTable
from .cartan import FamilyData

STAGES = ("inv", "cond", "metric", "einstein", "petrov", "conn", "appendix")

_ALIASES = {
    "invariants": "inv",
    "conditions": "cond",
    "connection": "conn",
    "einstein": "einstein",
    "metric": "metric",
    "petrov": "petrov",
    "appendix": "appendix",
    "inv": "inv",
    "cond": "cond",
    "conn": "conn",
}

_DEPENDENCIES = {
    "cond": ("inv",),
    "einstein": ("metric",),
    "petrov": ("metric",),
    "conn": ("inv",),
    "appendix": ("inv",),
}

_FAMILY_STAGES = frozenset(("metric", "einstein", "petrov", "conn"))

CONVENTIONS = {
    "ricci": "Ric_ij = R^k_ikj with R^i_jkl = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj",
    "orientation": "volume form dx^dy^dz^dt; 'plus' labels the +1 eigenspace of the Hodge star",
    "lowered_connection": "antisymmetry is checked as g_ij w^j_k + g_kj w^j_i = 0",
    "coframe_display": "third coframe form carries the squared second q-derivative prefactor and groups its middle coefficient as (gamma - F_q/3); first connection form ends in d(alpha)/alpha - gamma dx; both forced by the structure equations",
    "cosmological_constant": "-1",
}


class AnalysisInputError(OdeCartanError):
    """Unusable request: nothing can run (exit code 2)."""

    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


@dataclass
class AnalysisRequest:
    ode: str
    opaque: dict = field(default_factory=dict)       # name -> tuple of args
    stages: tuple = ("inv", "cond")
    specializations: dict = field(default_factory=dict)  # name -> expression text
    points: int = 5
    seed: int = 0

    def normalized_stages(self):
        requested = []
        for s in self.stages:
            s = s.strip().lower()
            if s == "all":
                return tuple(STAGES)
            if s not in _ALIASES:
                raise AnalysisInputError("bad-stage", f"unknown stage {s!r}")
            if _ALIASES[s] not in requested:
                requested.append(_ALIASES[s])
        return tuple(requested)


@dataclass
class AnalysisReport:
    data: dict
    verdicts: dict          # stage -> bool for populated, requested stages
    stage_errors: dict      # stage -> {code, message}

    @property
    def exit_code(self):
        if self.data.get("error") or self.stage_errors:
            return 2
        return 0 if all(self.verdicts.values()) else 1


def _closure(requested):
    out = []

    def add(stage):
        for dep in _DEPENDENCIES.get(stage, ()):
            add(dep)
        if stage not in out:
            out.append(stage)

    for s in requested:
        add(s)
    # the condition verdicts are a free byproduct of extraction
    if "inv" in out and "cond" not in out:
        out.append("cond")
    return tuple(s for s in STAGES if s in out)


def _render_form(form):
    if form.is_zero:
        return "0"
    bits = []
    for idx in sorted(form.comps):
        names = "^".join(f"d{form.chart.coords[a]}" for a in idx) or "1"
        bits.append(f"({form.comps[idx].render()}) {names}")
    return " + ".join(bits)


def _point_to_json(point):
    return {k: str(v) for k, v in sorted(point.items())}


def analyze(request):
    """Run the pipeline and return an AnalysisReport."""
    requested = request.normalized_stages()
    stages = _closure(requested)
    timings = {}
    verdicts = {}
    stage_errors = {}

    table = SymbolTable()
    for name, args in request.opaque.items():
        table.declare(name, tuple(args))

    report = {
        "input": {
            "ode": request.ode,
            "opaque": {n: list(a) for n, a in request.opaque.items()},
            "stages": list(requested),
            "specializations": dict(sorted(request.specializations.items())),
            "points": request.points,
            "seed": request.seed,
        },
        "fqq_nonzero": None,
        "structure_functions": {"run": False},
        "conditions": {"run": False},
        "family": None,
        "invariants_kne": {"run": False},
        "metric": {"run": False},
        "einstein_residual_zero": {"run": False},
        "petrov": {"run": False},
        "connection": {"run": False},
        "appendix_residuals": {"run": False},
        "timings": timings,
        "conventions": dict(CONVENTIONS),
    }

    try:
        rhs = parse_expression(request.ode, J2_CHART, table)
    except (ExpressionSyntaxError, UnknownSymbolError) as exc:
        report["error"] = {"code": "parse-error", "message": str(exc)}
        report["fqq_nonzero"] = {"verdict": False, "fqq": None}
        return AnalysisReport(report, verdicts, {"parse": report["error"]})

    fqq = rhs.differentiate("q").differentiate("q")
    report["fqq_nonzero"] = {"verdict": not fqq.is_zero, "fqq": fqq.render()}
    try:
        prob = OdeProblem(rhs, table)
    except DegenerateOdeError as exc:
        report["error"] = {"code": "degenerate-ode", "message": str(exc)}
        return AnalysisReport(report, verdicts, {"ode": report["error"]})

    # family detection always runs; it is cheap and the report requires it
    family = None
    try:
        family = family_detect(prob)
        report["family"] = {
            "accepted": True,
            "A": family.A.render(),
            "B": family.B.render(),
            "C": family.C.render(),
        }
    except FamilyRejectionError as exc:
        report["family"] = {
            "accepted": False,
            "reason": exc.reason,
            "detail": exc.detail,
        }

    requested_family_stages = [s for s in stages if s in _FAMILY_STAGES]
    if family is None and requested_family_stages:
        err = {
            "code": "family-rejected",
            "message": "a family-only stage was requested but "
            + report["family"]["reason"],
        }
        for s in requested_family_stages:
            stage_errors[s] = err
        stages = tuple(s for s in stages if s not in _FAMILY_STAGES)

    if family is not None:
        kne = family_invariants(family)
        report["invariants_kne"] = {
            "run": True,
            "k": kne.k.render(),
            "n": kne.n.render(),
            "e": kne.e.render(),
        }

    sf = None
    failed = set()
    for stage in stages:
        broken_deps = [d for d in _DEPENDENCIES.get(stage, ()) if d in failed]
        if broken_deps:
            stage_errors[stage] = {
                "code": "dependency-failed",
                "message": f"stage {broken_deps[0]!r} did not complete",
            }
            failed.add(stage)
            continue
        started = time.perf_counter()
        try:
            if stage == "inv":
                sf = prob.structure()
                report["structure_functions"] = {
                    "run": True,
                    "consistent": True,
                    "values": {n: getattr(sf, n).render() for n in STRUCTURE_NAMES},
                }
                if "inv" in requested:
                    verdicts["inv"] = True
                if family is not None:
                    res = family_invariants_residuals(family, sf)
                    match = {k: v.render() for k, v in res.items()}
                    report["invariants_kne"]["extraction_residuals"] = match
                    report["invariants_kne"]["matches_extraction"] = all(
                        v.is_zero for v in res.values()
                    )
            elif stage == "cond":
                cond = check_einstein_conditions(sf)
                report["conditions"] = {
                    "run": True,
                    "verdicts": {
                        v.name: {"residual": v.residual.render(), "holds": v.holds}
                        for v in cond.verdicts
                    },
                    "all_hold": cond.all_hold,
                }
                if "cond" in requested or "inv" in requested:
                    verdicts["cond"] = cond.all_hold
            elif stage == "metric":
                metric, proj = metric_from_family(family)
                report["metric"] = {
                    "run": True,
                    "components": [[e.render() for e in row] for row in metric.g],
                    "determinant": metric.det.render(),
                    "projectability": {
                        "projects": proj.projects,
                        "vertical_residuals": [e.render() for e in proj.vertical_residuals],
                        "invariance_residuals": [e.render() for e in proj.invariance_residuals],
                        "match_residuals": [e.render() for e in proj.match_residuals],
                    },
                }
                if "metric" in requested:
                    verdicts["metric"] = proj.projects
            elif stage == "einstein":
                metric, _ = metric_from_family(family)
                tensors = curvature_tensors(metric)
                residual = einstein_residual(metric, tensors, Fraction(-1))
                flat_components = [
                    residual[i][j].render() for i in range(4) for j in range(i, 4)
                ]
                holds = all(
                    residual[i][j].is_zero for i in range(4) for j in range(4)
                )
                report["einstein_residual_zero"] = {
                    "run": True,
                    "verdict": holds,
                    "residual_components": flat_components,
                    "scalar_curvature": tensors.scalar.render(),
                }
                if "einstein" in requested:
                    verdicts["einstein"] = holds and tensors.scalar == -4
            elif stage == "petrov":
                outcome = _petrov_stage(request, family)
                report["petrov"] = outcome
                report["conventions"]["d_eigenspace"] = outcome.get("d_eigenspace")
                if "petrov" in requested:
                    verdicts["petrov"] = outcome["consistent_assignment"] and bool(
                        outcome["points"]
                    )
            elif stage == "conn":
                mrep = metric_connection_report(family)
                crep = cartan_connection_report(family)
                report["connection"] = {
                    "run": True,
                    "metric_connection": {
                        "torsion_zero": all(r.is_zero for r in mrep.torsion_residuals),
                        "antisymmetry_zero": all(r.is_zero for r in mrep.antisymmetry_residuals),
                        "curvature_matches": all(r.is_zero for r in mrep.curvature_residuals),
                        "horizontal": all(r.is_zero for r in mrep.horizontality_residuals),
                        "ricci_is_minus_metric": all(r.is_zero for r in mrep.ricci_residuals),
                        "torsion_residuals": [_render_form(f) for f in mrep.torsion_residuals],
                        "ricci_residuals": [e.render() for e in mrep.ricci_residuals],
                    },
                    "cartan_connection": {
                        "algebra_valued": all(r.is_zero for r in crep.algebra_residuals),
                        "curvature_matches": all(r.is_zero for r in crep.curvature_residuals),
                        "invariants_zero": crep.invariants_zero,
                        "curvature_zero": crep.curvature_zero,
                        "flatness_matches_invariants": crep.flatness_matches_invariants,
                        "algebra_residuals": [_render_form(f) for f in crep.algebra_residuals],
                    },
                }
                if "conn" in requested:
                    verdicts["conn"] = mrep.all_zero and crep.all_zero
            elif stage == "appendix":
                res = verify_appendix(prob, sf)
                report["appendix_residuals"] = {
                    "run": True,
                    "residuals": [_render_form(f) for f in res],
                    "all_zero": all(f.is_zero for f in res),
                }
                if "appendix" in requested:
                    verdicts["appendix"] = all(f.is_zero for f in res)
        except PetrovDegeneracyError as exc:
            stage_errors[stage] = {"code": "petrov-degenerate", "message": str(exc)}
            failed.add(stage)
        except AnalysisInputError as exc:
            stage_errors[stage] = {"code": exc.code, "message": str(exc)}
            failed.add(stage)
        except OdeCartanError as exc:
            stage_errors[stage] = {"code": "stage-failed", "message": str(exc)}
            failed.add(stage)
        finally:
            timings[stage] = round(time.perf_counter() - started, 6)

    return AnalysisReport(report, verdicts, stage_errors)


def _specialized_family(request, family):
    table = family.problem.table
    coeffs = {"A": family.A, "B": family.B, "C": family.C}
    for name, text in request.specializations.items():
        if name not in coeffs:
            raise AnalysisInputError(
                "bad-specialization", f"{name!r} is not a family coefficient"
            )
        try:
            value = parse_expression(text, J2_CHART, table)
        except (ExpressionSyntaxError, UnknownSymbolError) as exc:
            raise AnalysisInputError("bad-specialization", str(exc)) from exc
        bad = [s.render() for s in value.symbols() if s.name not in ("x", "y")]
        if bad:
            raise AnalysisInputError(
                "bad-specialization",
                f"specialization of {name} may only use x and y, found {bad}",
            )
        coeffs[name] = value
    return FamilyData(family.problem, coeffs["A"], coeffs["B"], coeffs["C"])


def _petrov_stage(request, family):
    fd = _specialized_family(request, family)
    metric = family_metric(fd)
    leftover = sorted(
        {s.render() for row in metric.g for e in row for s in e.symbols() if not s.is_coordinate}
    )
    if leftover:
        raise AnalysisInputError(
            "petrov-needs-specialization",
            f"metric still contains opaque symbols {leftover}; "
            "provide rational specializations for A and B",
        )
    tensors = curvature_tensors(metric)
    rng = random.Random(request.seed)
    results = []
    skipped = []
    attempts = 0
    budget = max(50, 40 * request.points)
    while len(results) < request.points and attempts < budget:
        attempts += 1
        point = {
            c: Fraction(rng.randint(-100, 100), rng.randint(1, 100))
            for c in ("x", "y", "z", "t")
        }
        try:
            results.append(classify_at_point(metric, tensors, point))
        except PetrovDegeneracyError as exc:
            skipped.append({"point": _point_to_json(point), "reason": str(exc)})
    if len(results) < request.points:
        raise PetrovDegeneracyError(
            f"could not find {request.points} admissible sample points"
        )
    labels = [(r.label_plus, r.label_minus) for r in results]
    consistent = len(set(labels)) == 1
    d_eigenspace = None
    if consistent and labels:
        plus, minus = labels[0]
        if plus == "D" and minus != "D":
            d_eigenspace = "plus"
        elif minus == "D" and plus != "D":
            d_eigenspace = "minus"
        elif plus == "D" and minus == "D":
            d_eigenspace = "both"
    return {
        "run": True,
        "specializations": dict(sorted(request.specializations.items())),
        "points": [
            {
                "point": _point_to_json(r.point),
                "label_plus": r.label_plus,
                "label_minus": r.label_minus,
            }
            for r in results
        ],
        "labels": sorted({f"{a}+{b}" for a, b in labels}),
        "consistent_assignment": consistent,
        "d_eigenspace": d_eigenspace,
        "skipped_points": skipped,
    }


def emit_report(report, fmt="json"):
    """Serialize a report; JSON is the stable machine interface."""
    if fmt == "json":
        return json.dumps(report.data, indent=2, sort_keys=False) + "\n"
    if fmt == "text":
        return _text_view(report)
    raise AnalysisInputError("bad-format", f"unknown format {fmt!r}")


def _text_view(report):
    d = report.data
    lines = []
    lines.append(f"ODE: y''' = {d['input']['ode']}")
    if d.get("error"):
        lines.append(f"ERROR [{d['error']['code']}]: {d['error']['message']}")
        return "\n".join(lines) + "\n"
    fqq = d["fqq_nonzero"]
    lines.append(f"F_qq = {fqq['fqq']}  (nonzero: {fqq['verdict']})")
    fam = d["family"]
    if fam["accepted"]:
        lines.append(f"family: accepted  A={fam['A']}  B={fam['B']}  C={fam['C']}")
    else:
        lines.append(f"family: rejected ({fam['reason']}; {fam['detail']})")
    if d["structure_functions"].get("run"):
        vals = d["structure_functions"]["values"]
        nonzero = {k: v for k, v in vals.items() if v != "0"}
        lines.append(
            "structure functions: all zero" if not nonzero else f"structure functions: {nonzero}"
        )
    if d["conditions"].get("run"):
        lines.append(f"reduction conditions hold: {d['conditions']['all_hold']}")
    if d["invariants_kne"].get("run"):
        kne = d["invariants_kne"]
        lines.append(f"invariants: k={kne['k']}  n={kne['n']}  e={kne['e']}")
        if "matches_extraction" in kne:
            lines.append(f"invariants match extraction: {kne['matches_extraction']}")
    if d["metric"].get("run"):
        lines.append(
            f"metric determinant: {d['metric']['determinant']}; projects: "
            f"{d['metric']['projectability']['projects']}"
        )
    if d["einstein_residual_zero"].get("run"):
        e = d["einstein_residual_zero"]
        lines.append(
            f"Einstein (Ric = -G): {e['verdict']}; scalar curvature {e['scalar_curvature']}"
        )
    if d["petrov"].get("run"):
        p = d["petrov"]
        lines.append(
            f"Petrov labels {p['labels']} at {len(p['points'])} points; "
            f"stable: {p['consistent_assignment']}"
        )
    if d["connection"].get("run"):
        c = d["connection"]
        lines.append(
            "metric connection checks: "
            + str(
                all(
                    c["metric_connection"][k]
                    for k in (
                        "torsion_zero",
                        "antisymmetry_zero",
                        "curvature_matches",
                        "horizontal",
                        "ricci_is_minus_metric",
                    )
                )
            )
        )
        lines.append(
            "cartan connection checks: "
            + str(
                c["cartan_connection"]["algebra_valued"]
                and c["cartan_connection"]["curvature_matches"]
                and c["cartan_connection"]["flatness_matches_invariants"]
            )
        )
    if d["appendix_residuals"].get("run"):
        lines.append(f"closed-form differentials hold: {d['appendix_residuals']['all_zero']}")
    for stage, err in sorted(report.stage_errors.items()):
        lines.append(f"stage {stage} error [{err['code']}]: {err['message']}")
    lines.append(f"exit code: {report.exit_code}")
    return "\n".join(lines) + "\n"
