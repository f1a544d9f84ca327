"""Scenario files and the ``mapcert`` command line runner.

A scenario is one JSON document::

    {"name": "two_lines_r3", "dimension": 3,
     "a_parts": [{"type": "linear_subspace", "basis": [[0, 1, 0]]}, ...],
     "b_parts": [...], "a_restrictor": "self", "b_restrictor": "self",
     "reference_point": [0, 0, 0], "starts": [[...]], "deltas": [0.1, 0.01],
     "epsilon": 0.0, "sigma": 2, "sampling": {"seed": 0},
     "analyses": ["cq", "map", "certify"]}

``run`` writes ``report.json`` plus CSV traces and plot tables into
``<out>/<name>/``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .cones import NotInSet, UnsupportedCone, closed_form_cone, cone_membership, restricted_normal_samples
from .cq import NEG_INF, cq_number, cq_report, exact_value_for, joint_cq_condition_holds, joint_cq_number
from .linalg import angles
from .map_engine import (
    GeoBoundParams,
    InsufficientData,
    StartOutsideRadius,
    ball_containment_check,
    boundary_fact_check,
    certificate_verify,
    estimate_rate,
    finite_hit_check,
    gap_monotonicity_check,
    geo_bound_verify,
    is_cauchy,
    issue_certificate,
    step_distance_check,
    run_map,
    starts_in_ball,
    subspace_limit_check,
    trace_to_csv,
)
from .regularity import joint_regularity_check
from .restrictors import RestrictorChoice, resolve_union
from .sampling import SamplingConfig
from .sets import AffineSubspace, DescriptorError, SetDescriptor, Union, from_dict

SCHEMA_VERSION = "mapcert.report/1"
ANALYSES = ("project", "cones", "cq", "regularity", "map", "certify")
OUT_ENV = "MAPCERT_OUT"
DEFAULT_OUT = "mapcert-out"
SEEDED_STARTS = 10

_REQUIRED = {"name", "dimension", "a_parts", "b_parts", "reference_point", "analyses"}
_OPTIONAL = {"description", "a_restrictor", "b_restrictor", "starts", "deltas", "epsilon", "sigma",
             "sampling", "max_iter", "gap_tol"}
_SAMPLING_FIELDS = {"seed", "directions_per_shell", "radius_ladder", "membership_tol", "angular_dedup",
                    "shell_depth", "shoot_directions", "base_points"}


class ScenarioError(ValueError):
    """Malformed or semantically invalid scenario."""


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    dimension: int
    a_parts: tuple[SetDescriptor, ...]
    b_parts: tuple[SetDescriptor, ...]
    a_restrictor: RestrictorChoice
    b_restrictor: RestrictorChoice
    reference_point: np.ndarray
    starts: tuple[np.ndarray, ...]
    deltas: tuple[float, ...]
    epsilon: float
    sigma: int
    sampling: SamplingConfig
    analyses: tuple[str, ...]
    description: str = ""
    max_iter: int = 10000
    gap_tol: float = 1e-12

    @property
    def A(self) -> SetDescriptor:
        return self.a_parts[0] if len(self.a_parts) == 1 else Union(list(self.a_parts))

    @property
    def B(self) -> SetDescriptor:
        return self.b_parts[0] if len(self.b_parts) == 1 else Union(list(self.b_parts))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "dimension": self.dimension,
            "a_parts": [p.to_dict() for p in self.a_parts],
            "b_parts": [p.to_dict() for p in self.b_parts],
            "a_restrictor": self.a_restrictor.to_dict(),
            "b_restrictor": self.b_restrictor.to_dict(),
            "reference_point": self.reference_point.tolist(),
            "starts": [s.tolist() for s in self.starts],
            "deltas": list(self.deltas),
            "epsilon": self.epsilon,
            "sigma": self.sigma,
            "sampling": self.sampling.to_dict(),
            "analyses": list(self.analyses),
            "max_iter": self.max_iter,
            "gap_tol": self.gap_tol,
        }


def _vector(obj, dim: int, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
        raise ScenarioError(f"{where}: expected an array of numbers")
    if len(obj) != dim:
        raise ScenarioError(f"{where}: expected {dim} coordinates, got {len(obj)}")
    return np.array(obj, dtype=float)


def _sampling(obj, where: str = "sampling") -> SamplingConfig:
    if obj is None:
        return SamplingConfig()
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    extra = set(obj) - _SAMPLING_FIELDS
    if extra:
        raise ScenarioError(f"{where}: unknown field(s) {sorted(extra)}")
    kw = dict(obj)
    if "radius_ladder" in kw:
        kw["radius_ladder"] = tuple(kw["radius_ladder"])
    try:
        return SamplingConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def scenario_from_dict(obj: dict, where: str = "scenario") -> Scenario:
    """Validate a scenario document; unknown fields are rejected."""
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected a JSON object")
    missing = _REQUIRED - set(obj)
    if missing:
        raise ScenarioError(f"{where}: missing field(s) {sorted(missing)}")
    extra = set(obj) - _REQUIRED - _OPTIONAL
    if extra:
        raise ScenarioError(f"{where}: unknown field(s) {sorted(extra)}")
    dim = obj["dimension"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ScenarioError(f"{where}.dimension: expected a positive integer")
    parts = {}
    for side in ("a_parts", "b_parts"):
        items = obj[side]
        if not isinstance(items, list) or not items:
            raise ScenarioError(f"{where}.{side}: expected a nonempty array of sets")
        built = []
        for k, item in enumerate(items):
            try:
                S = from_dict(item, f"{where}.{side}[{k}]")
            except DescriptorError as exc:
                raise ScenarioError(str(exc)) from None
            if S.dim != dim:
                raise ScenarioError(f"{where}.{side}[{k}]: set lives in R^{S.dim}, scenario dimension is {dim}")
            built.append(S)
        parts[side] = tuple(built)
    restrictors = {}
    for side in ("a_restrictor", "b_restrictor"):
        try:
            restrictors[side] = RestrictorChoice.from_dict(obj.get(side, "self"), f"{where}.{side}")
        except DescriptorError as exc:
            raise ScenarioError(str(exc)) from None
        R = restrictors[side].descriptor
        if R is not None and R.dim != dim:
            raise ScenarioError(f"{where}.{side}: restrictor dimension {R.dim} differs from {dim}")
    c = _vector(obj["reference_point"], dim, f"{where}.reference_point")
    starts_raw = obj.get("starts", [])
    if not isinstance(starts_raw, list):
        raise ScenarioError(f"{where}.starts: expected an array of vectors")
    starts = tuple(_vector(s, dim, f"{where}.starts[{k}]") for k, s in enumerate(starts_raw))
    deltas = obj.get("deltas", [0.1, 0.01])
    if (not isinstance(deltas, list) or not deltas
            or not all(isinstance(d, (int, float)) and not isinstance(d, bool) and d > 0 for d in deltas)):
        raise ScenarioError(f"{where}.deltas: expected a nonempty array of positive numbers")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ScenarioError(f"{where}.deltas: must be strictly decreasing")
    analyses = obj["analyses"]
    if not isinstance(analyses, list) or not analyses:
        raise ScenarioError(f"{where}.analyses: expected a nonempty array")
    bad = [a for a in analyses if a not in ANALYSES]
    if bad:
        raise ScenarioError(f"{where}.analyses: unknown tag(s) {bad}; valid tags: {', '.join(ANALYSES)}")
    if len(set(analyses)) != len(analyses):
        raise ScenarioError(f"{where}.analyses: duplicate tags")
    if "map" in analyses and not starts:
        raise ScenarioError(f"{where}.starts: the map analysis needs at least one start")
    eps = obj.get("epsilon", 0.0)
    if not isinstance(eps, (int, float)) or isinstance(eps, bool) or eps < 0:
        raise ScenarioError(f"{where}.epsilon: expected a nonnegative number")
    sigma = obj.get("sigma", 1)
    if sigma not in (1, 2) or isinstance(sigma, bool):
        raise ScenarioError(f"{where}.sigma: expected 1 or 2")
    name = obj["name"]
    if not isinstance(name, str) or not name or any(ch in name for ch in "/\\"):
        raise ScenarioError(f"{where}.name: expected a nonempty file-safe string")
    max_iter = obj.get("max_iter", 10000)
    if not isinstance(max_iter, int) or isinstance(max_iter, bool) or max_iter < 1:
        raise ScenarioError(f"{where}.max_iter: expected a positive integer")
    gap_tol = obj.get("gap_tol", 1e-12)
    if not isinstance(gap_tol, (int, float)) or isinstance(gap_tol, bool) or gap_tol < 0:
        raise ScenarioError(f"{where}.gap_tol: expected a nonnegative number")
    return Scenario(
        name=name, dimension=dim, a_parts=parts["a_parts"], b_parts=parts["b_parts"],
        a_restrictor=restrictors["a_restrictor"], b_restrictor=restrictors["b_restrictor"],
        reference_point=c, starts=starts, deltas=tuple(float(d) for d in deltas),
        epsilon=float(eps), sigma=int(sigma), sampling=_sampling(obj.get("sampling"), f"{where}.sampling"),
        analyses=tuple(analyses), description=str(obj.get("description", "")),
        max_iter=max_iter, gap_tol=float(gap_tol),
    )


def bundled_scenarios() -> list[str]:
    """Names of the scenarios shipped with the package."""
    root = resources.files("mapcert") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _read_text(path) -> tuple[str, str]:
    p = Path(path)
    if p.exists():
        return p.read_text(), str(p)
    name = p.name[:-5] if p.name.endswith(".json") else p.name
    if name in bundled_scenarios() and p.parent == Path("."):
        return (resources.files("mapcert") / "scenarios" / f"{name}.json").read_text(), f"<bundled>/{name}.json"
    raise FileNotFoundError(f"no scenario file {path!s}")


def parse_scenario(path) -> Scenario:
    """Load and validate a scenario file (or a bundled scenario name)."""
    text, label = _read_text(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{label}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return scenario_from_dict(obj, label)


# ---------------------------------------------------------------------------
# report helpers

def _clean(x):
    """JSON-ready copy: numpy to Python, non-finite floats to strings."""
    if x is NEG_INF:
        return "-inf"
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "+inf" if x > 0 else "-inf"
        return x
    return x


def _num(x) -> float:
    return float("-inf") if x is NEG_INF else float(x)


def _write_table(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(v if isinstance(v, str) else format(float(v), ".17g") for v in r))
    path.write_text("\n".join(lines) + "\n")


@dataclass
class _Context:
    s: Scenario
    out: Path
    checks: dict = field(default_factory=dict)
    cache: dict = field(default_factory=dict)

    def check(self, name: str, value) -> bool:
        self.checks[name] = None if value is None else bool(value)
        return value

    def restrictor_sets(self):
        s = self.s
        At = resolve_union(s.a_restrictor, list(s.a_parts), list(s.b_parts))
        Bt = resolve_union(s.b_restrictor, list(s.b_parts), list(s.a_parts))
        return At, Bt

    def c_in_both(self) -> bool:
        s = self.s
        tol = s.sampling.membership_tol * max(1.0, float(np.linalg.norm(s.reference_point)))
        return s.A.distance(s.reference_point) <= tol and s.B.distance(s.reference_point) <= tol


def _projection(S: SetDescriptor, x) -> dict:
    r = S.project(x)
    return {"points": r.points, "distance": r.distance, "multi_valued": r.multi_valued, "selection": r.selection}


def analysis_project(ctx: _Context) -> dict:
    s = ctx.s
    pts = [("reference_point", s.reference_point)] + [(f"start[{k}]", x) for k, x in enumerate(s.starts)]
    return {name: {"P_A": _projection(s.A, x), "P_B": _projection(s.B, x)} for name, x in pts}


def _cone_side(S, R, choice_other, c, cfg, ctx, label):
    samp = restricted_normal_samples(S, R, c, cfg)
    lim = samp.limit_directions()
    out = {
        "samples": len(samp),
        "limit_directions": lim,
        "smallest_delta": float(np.min(samp.delta_tags)) if len(samp) else None,
        "closed_form": None,
    }
    try:
        C = closed_form_cone(S, R, c)
    except (UnsupportedCone, NotImplementedError):
        return out
    inside = [cone_membership(C, u, 1e-3) for u in lim]
    out["closed_form"] = C.to_dict()
    out["closed_form_agreement"] = float(np.mean(inside)) if inside else 1.0
    ctx.check(f"cones.{label}.matches_closed_form", all(inside))
    return out


def analysis_cones(ctx: _Context) -> dict:
    s = ctx.s
    At, Bt = ctx.restrictor_sets()
    out = {}
    for label, S, R, other in (("A", s.A, Bt, s.b_restrictor), ("B", s.B, At, s.a_restrictor)):
        try:
            out[label] = _cone_side(S, R, other, s.reference_point, s.sampling, ctx, label)
        except NotInSet as exc:
            out[label] = {"skipped": str(exc)}
    return out


def analysis_cq(ctx: _Context) -> dict:
    s = ctx.s
    rep = cq_report(list(s.a_parts), s.a_restrictor, list(s.b_parts), s.b_restrictor,
                    s.reference_point, s.deltas, s.sampling)
    ctx.cache["cq"] = rep
    out = rep.to_dict()
    cond = joint_cq_condition_holds(list(s.a_parts), s.a_restrictor, list(s.b_parts), s.b_restrictor,
                                    s.reference_point, s.sampling)
    out["cq_condition"] = {"holds": cond.holds, "max_inner": cond.max_inner,
                           "witness": None if cond.witness is None else {"u": cond.witness[0], "v": cond.witness[1]}}
    if len(s.a_parts) > 1 or len(s.b_parts) > 1:
        At, Bt = ctx.restrictor_sets()
        out["union_theta"] = cq_number(s.A, RestrictorChoice.custom(At), s.B, RestrictorChoice.custom(Bt),
                                       s.reference_point, s.deltas[0], s.sampling)
    ctx.check("cq.monotone_in_delta", rep.monotone)
    finite = [v for v in rep.theta_by_delta.values() if v is not NEG_INF]
    if finite and rep.alpha_bar is not NEG_INF:
        ctx.check("cq.alpha_below_theta", _num(rep.alpha_bar) <= min(finite) + 0.01)
    if rep.exact_value is not None and rep.alpha_bar is not NEG_INF:
        ctx.check("cq.exact_matches_alpha", abs(rep.exact_value - _num(rep.alpha_bar)) <= 0.02)
    _write_table(ctx.out / "theta_vs_delta.csv", ["delta", "theta"],
                 [(d, _num(v)) for d, v in sorted(rep.theta_by_delta.items(), reverse=True)])
    out["plot_table"] = "theta_vs_delta.csv"
    return out


def analysis_regularity(ctx: _Context) -> dict:
    s = ctx.s
    At, Bt = ctx.restrictor_sets()
    out = {}
    for delta in s.deltas:
        key = repr(float(delta))
        a_side = joint_regularity_check(list(s.a_parts), Bt, s.epsilon, delta, s.reference_point, s.sampling)
        b_side = joint_regularity_check(list(s.b_parts), At, s.epsilon, delta, s.reference_point, s.sampling)
        out[key] = {"A_members": [v.to_dict() for v in a_side], "B_members": [v.to_dict() for v in b_side],
                    "A_joint_regular": all(v.passed for v in a_side),
                    "B_joint_regular": all(v.passed for v in b_side)}
    ctx.cache["regularity"] = out
    return {"by_delta": out, "epsilon": s.epsilon}


def _trace_checks(ctx: _Context, k: int, t) -> dict:
    s = ctx.s
    c = s.reference_point
    row = t.to_dict()
    row["csv"] = f"trace_{k}.csv"
    trace_to_csv(t, ctx.out / row["csv"])
    row["gap_monotone"] = gap_monotonicity_check(t)
    ed = step_distance_check(s.A, t, c)
    row["step_distances"] = {"holds": ed.holds, "steps_checked": ed.steps_checked, "failures": list(ed.failures)}
    row["boundary_fact"] = boundary_fact_check(s.A, s.B, t, s.sampling.membership_tol)
    row["finite_hit"] = finite_hit_check(s.A, s.B, t, s.sampling.membership_tol)
    row["cauchy"] = is_cauchy(t)
    try:
        row["rate"] = estimate_rate(t)
    except InsufficientData as exc:
        row["rate"] = None
        row["rate_note"] = str(exc)
    return row


def analysis_map(ctx: _Context) -> dict:
    s = ctx.s
    rows, gap_rows = [], []
    for k, x in enumerate(s.starts):
        t = run_map(s.A, s.B, x, s.max_iter, s.gap_tol)
        row = _trace_checks(ctx, k, t)
        ctx.check(f"map.start[{k}].gap_monotone", row["gap_monotone"])
        ctx.check(f"map.start[{k}].step_distances", row["step_distances"]["holds"])
        if row["boundary_fact"] is not None:
            ctx.check(f"map.start[{k}].boundary_fact", row["boundary_fact"])
        if row["finite_hit"] is not None:
            ctx.check(f"map.start[{k}].finite_hit", row["finite_hit"])
        rows.append(row)
        gap_rows.extend((k, n, g) for n, g in enumerate(t.gaps))
        subspaces = all(isinstance(P, AffineSubspace) and P.is_linear for P in (s.A, s.B))
        if subspaces and t.terminated_by != "max_iter":
            row["subspace_limit"] = ctx.check(f"map.start[{k}].subspace_limit", subspace_limit_check(s.A, s.B, t))
        exact = exact_value_for(s.a_parts, s.a_restrictor, s.b_parts, s.b_restrictor, s.reference_point)
        if (exact is not None and exact[1] == "lines" and len(s.a_parts) == len(s.b_parts) == 1
                and 0 < exact[0] < 1):
            p = GeoBoundParams(exact[0], exact[0])
            row["geo_bound"] = ctx.check(f"map.start[{k}].geo_bound", geo_bound_verify(t, p, s.reference_point))
    out = {"traces": rows, "global_convergence": all(r["cauchy"] for r in rows)}
    if ctx.c_in_both():
        for rho in (0.05, 0.1):
            out[f"ball_containment_rho_{rho}"] = ctx.check(
                f"map.ball_containment_rho_{rho}",
                ball_containment_check(s.A, s.B, s.reference_point, rho, 256, s.sampling.seed))
    _write_table(ctx.out / "gap_vs_n.csv", ["start", "n", "gap"], gap_rows)
    out["plot_table"] = "gap_vs_n.csv"
    return out


def _theta3d(ctx: _Context, delta: float) -> tuple[float, str]:
    s = ctx.s
    exact = exact_value_for(s.a_parts, s.a_restrictor, s.b_parts, s.b_restrictor, s.reference_point)
    if exact is not None and exact[1] in ("lines", "subspaces"):
        # constant in delta for subspaces
        return exact[0], f"closed form ({exact[1]})"
    th = joint_cq_number(list(s.a_parts), s.a_restrictor, list(s.b_parts), s.b_restrictor,
                         s.reference_point, 3 * delta, s.sampling)
    return _num(th), "sampled (inner estimate)"


def analysis_certify(ctx: _Context) -> dict:
    s = ctx.s
    delta = s.deltas[0]
    th, source = _theta3d(ctx, delta)
    out = {"delta": delta, "theta3d": th, "theta3d_source": source, "sigma": s.sigma,
           "sigma_note": "sigma = 2 requires both collections to be jointly regular"}
    reg = ctx.cache.get("regularity", {}).get(repr(float(delta)))
    if reg is not None:
        out["regularity_supports_sigma"] = bool(reg["A_joint_regular"] and (s.sigma == 1 or reg["B_joint_regular"]))
    try:
        cert = issue_certificate(th, s.epsilon, s.sigma, delta)
    except ValueError as exc:
        out["certificate"] = None
        out["not_issued"] = str(exc)
        ctx.check("certify.issued", False)
        return out
    out["certificate"] = cert.to_dict()
    results = []
    seeded = starts_in_ball(s.reference_point, cert.radius, SEEDED_STARTS, s.sampling.seed)
    for label, x in [(f"start[{k}]", x) for k, x in enumerate(s.starts)] + \
                    [(f"seeded[{k}]", x) for k, x in enumerate(seeded)]:
        t = run_map(s.A, s.B, x, s.max_iter, s.gap_tol)
        try:
            ok = certificate_verify(t, cert, s.reference_point)
        except StartOutsideRadius as exc:
            results.append({"start": label, "verified": None, "note": str(exc)})
            continue
        results.append({"start": label, "verified": ok, "iterations": len(t)})
        ctx.check(f"certify.{label}", ok)
    out["verifications"] = results
    return out


_DISPATCH: dict[str, Callable[[_Context], dict]] = {
    "project": analysis_project,
    "cones": analysis_cones,
    "cq": analysis_cq,
    "regularity": analysis_regularity,
    "map": analysis_map,
    "certify": analysis_certify,
}


def build_report(s: Scenario, out_dir: Path) -> tuple[dict, int]:
    """Run every analysis of ``s`` in file order; returns the report and exit status."""
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = _Context(s, out_dir)
    analyses = {}
    status = 0
    for tag in s.analyses:
        before = dict(ctx.checks)
        try:
            body = _DISPATCH[tag](ctx)
        except Exception as exc:  # recorded, the next analysis still runs
            analyses[tag] = {"status": "error", "error": f"{type(exc).__name__}: {exc}"}
            status = 1
            continue
        new = {k: v for k, v in ctx.checks.items() if k not in before}
        ok = all(v is not False for v in new.values())
        body["status"] = "passed" if ok else "failed"
        analyses[tag] = body
        if not ok:
            status = 1
    report = {
        "schema_version": SCHEMA_VERSION,
        "mapcert_version": __version__,
        "scenario": s.to_dict(),
        "conventions": {
            "theta_bar": "value at the smallest scheduled delta; the full curve is reported",
            "sampled_values": "inner estimates from certified samples",
            "map_selection": "lexicographically smallest nearest point",
        },
        "analyses": analyses,
        "verifications": dict(sorted(ctx.checks.items())),
        "status": "passed" if status == 0 else "failed",
    }
    report = _clean(report)
    (out_dir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report, status


def run_scenario(s: Scenario, out_dir) -> int:
    """Write the artifacts of ``s`` under ``out_dir/<name>``; returns the exit status."""
    _, status = build_report(s, Path(out_dir) / s.name)
    return status


def angle_summary(s: Scenario) -> dict:
    """Principal angles of every (A_i, B_j) pair of subspaces."""
    pairs = []
    for i, A in enumerate(s.a_parts):
        for j, B in enumerate(s.b_parts):
            if not (isinstance(A, AffineSubspace) and isinstance(B, AffineSubspace)):
                raise ScenarioError(f"angle: pair ({i}, {j}) is not a pair of affine subspaces")
            r = angles(A.basis, B.basis)
            pairs.append({"i": i, "j": j, "principal_cosines": list(r.principal_cosines),
                          "dixmier_c0": r.dixmier_c0, "friedrichs_c": r.friedrichs_c,
                          "intersection_dim": r.intersection_dim})
    return {"scenario": s.name, "pairs": pairs}


# ---------------------------------------------------------------------------
# command line

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mapcert", description="Restricted normal cones, CQ-numbers and MAP certificates.")
    p.add_argument("--version", action="version", version=f"mapcert {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the analyses of one or more scenarios")
    r.add_argument("scenarios", nargs="+", help="scenario files or bundled scenario names")
    r.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    r.add_argument("--seed", type=int, help="override the sampling seed")
    a = sub.add_parser("angle", help="principal angles for subspace scenarios")
    a.add_argument("scenario")
    v = sub.add_parser("validate", help="parse and validate scenario files")
    v.add_argument("scenarios", nargs="+")
    sub.add_parser("list", help="list bundled scenarios")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "list":
            print("\n".join(bundled_scenarios()))
            return 0
        if args.command == "validate":
            for path in args.scenarios:
                s = parse_scenario(path)
                print(f"ok {s.name}")
            return 0
        if args.command == "angle":
            print(json.dumps(_clean(angle_summary(parse_scenario(args.scenario))), indent=2, sort_keys=True))
            return 0
        scenarios = [parse_scenario(p) for p in args.scenarios]
        out = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
        status = 0
        for s in scenarios:
            if args.seed is not None:
                s = replace(s, sampling=replace(s.sampling, seed=args.seed))
            code = run_scenario(s, out)
            print(f"{'PASS' if code == 0 else 'FAIL'} {s.name} -> {out / s.name / 'report.json'}")
            status = max(status, code)
        return status
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
