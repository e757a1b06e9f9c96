"""Batch driver: ``bnlab <command> [flags]`` writes one JSON report per run.

Exit status is 0 when every recorded check passes, 1 when a check fails (the
report is still written) and 2 on malformed input or usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import caselab, strata
from . import theta as th
from .curves import CurveError, Divisor, PlaneCurve, Place, curve_load
from .models import STANDARD, bpf_pool, load_standard, pencil_through

OUT_DIR_ENV = "BNLAB_REPORT_DIR"
DEFAULT_BRANCH = [-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0]

SAMPLING = {"strata-sample", "omega0", "clifford-scan", "mukai-scan", "incidence", "caselab-g4",
            "caselab-g5", "fay", "quadrisecant", "coble"}

JOB_KEYS = {"command", "curve", "seed", "tol", "precision", "out", "trials", "cliff", "branch",
            "tau", "divisor", "divisor2", "z", "char", "samples"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def dumps(obj, indent: int = 1, level: int = 0) -> str:
    """JSON with sorted keys and 17 significant digits for every float."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        obj = list(obj)
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    return json.dumps(str(obj))


def _plain(obj):
    """Round-trip through the report encoder so validation sees what gets written."""
    return json.loads(dumps(obj))


class Report:
    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.results: list = []
        self.checks: list = []

    def row(self, **kw):
        self.results.append(kw)

    def check(self, name, measured, relation, threshold):
        ops = {"<=": lambda a, b: a <= b, ">=": lambda a, b: a >= b, "==": lambda a, b: a == b,
               "<": lambda a, b: a < b, ">": lambda a, b: a > b}
        ok = bool(ops[relation](measured, threshold))
        self.checks.append({"name": name, "measured": measured, "relation": relation,
                            "threshold": threshold, "passed": ok})
        return ok

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def as_dict(self) -> dict:
        ident = dumps({"command": self.command, "inputs": self.inputs})
        return {
            "schema_version": "1",
            "run_id": hashlib.sha256(ident.encode()).hexdigest()[:16],
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "checks": self.checks,
            "passed": self.passed,
            "versions": {"bnlab": __version__, "numpy": np.__version__},
        }


def report_schema() -> dict:
    return json.loads(resources.files("bnlab").joinpath("data", "report_schema.json").read_text())


def write_report(doc: dict, path: Path) -> str:
    doc = _plain(doc)
    jsonschema.validate(doc, report_schema())
    text = dumps(doc) + "\n"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return text


# ---------------------------------------------------------------------------
# input handling


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_curve(source) -> tuple[PlaneCurve, dict]:
    """A standard model name or a path to a curve description."""
    if source in STANDARD:
        return load_standard(source), {"curve": source, "cliff": STANDARD[source]["cliff"]}
    desc = _read_json(source)
    try:
        C = curve_load(desc)
    except (CurveError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{source}: {exc}") from exc
    digest = hashlib.sha256(Path(source).read_bytes()).hexdigest()[:16]
    return C, {"curve": Path(source).name, "curve_sha256": digest, "cliff": desc.get("cliff")}


def parse_divisor(C: PlaneCurve, source) -> Divisor:
    """[[point, mult], ...] or [[point, branch, mult], ...] with projective points."""
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise UsageError(f"divisor: {exc.msg} at column {exc.colno}") from exc
    terms = []
    try:
        for item in source:
            pt, rest = item[0], item[1:]
            branch, mult = (0, rest[0]) if len(rest) == 1 else (rest[0], rest[1])
            P = C.place(pt, int(branch))
            terms.append((P, int(mult)))
        D = Divisor(terms)
        C.check_divisor(D)
    except (CurveError, TypeError, ValueError, IndexError) as exc:
        raise UsageError(f"divisor: {exc}") from exc
    return D


def divisor_json(C: PlaneCurve, D: Divisor) -> list:
    F = C.field
    return [[[F.to_str(x) for x in P.point], P.branch, k] for P, k in sorted(D.items())]


def load_branch(source, default):
    if source is None:
        return list(default)
    data = _read_json(source) if isinstance(source, str) and not source.lstrip().startswith("[") else source
    if isinstance(data, str):
        data = json.loads(data)
    if isinstance(data, dict):
        unknown = set(data) - {"branch"}
        if unknown:
            raise UsageError(f"{source}: unknown keys {sorted(unknown)}")
        data = data.get("branch")
    try:
        return [float(x) for x in data]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"branch points: {exc}") from exc


def load_tau(source):
    data = _read_json(source) if isinstance(source, str) else source
    if isinstance(data, dict):
        data = data.get("tau")
    try:
        return np.array([[complex(a, b) for a, b in row] for row in data])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"tau must be rows of [re, im] pairs: {exc}") from exc


def _places_json(C, places):
    F = C.field
    return [[[F.to_str(x) for x in P.point], P.branch] for P in places]


# ---------------------------------------------------------------------------
# commands


def cmd_curve_info(a, rep):
    C, meta = load_curve(a.curve)
    rep.inputs.update(meta)
    K = C.canonical_divisor()
    rep.row(genus=C.genus, degree=C.degree, field=C.field.to_json(),
            singular_points=[[list(map(C.field.to_str, pt)), m] for pt, m in C.singular_points],
            rational_points=len(C.rational_points), deg_K=K.degree, h0_K=C.h0(K))
    rep.check("deg K = 2g-2", K.degree, "==", 2 * C.genus - 2)
    rep.check("h0(K) = g", C.h0(K), "==", C.genus)


def cmd_rr(a, rep):
    C, meta = load_curve(a.curve)
    rep.inputs.update(meta)
    if a.divisor is None:
        raise UsageError("rr needs --divisor")
    D = parse_divisor(C, a.divisor)
    rep.inputs["divisor"] = divisor_json(C, D)
    K = C.canonical_divisor()
    h, hk = C.h0(D), C.h0(K - D)
    rep.row(deg=D.degree, h0=h, h0_K_minus_D=hk)
    rep.check("h0(D) - h0(K-D) = deg D - g + 1", h - hk, "==", D.degree - C.genus + 1)


def _strata_trials(C, rng, trials, rep):
    fails = 0
    for t in range(trials):
        D = strata.random_effective(C, int(rng.integers(0, C.genus)), rng)
        X = strata.extension_space(C, D)
        if X.dim == 0:
            continue
        e = strata.random_functional(C, X.dim, rng)
        if t % 2:
            structured = strata.structured_functionals(C, D, rng)
            if structured:
                e = structured[int(rng.integers(0, len(structured)))][1]
        r = strata.h0_ext(C, D, e)
        fails += not r.identities_hold
        if t < 20:
            rep.row(trial=t, D=divisor_json(C, D), **r.as_dict())
    return fails


def cmd_strata_sample(a, rep):
    C, meta = load_curve(a.curve)
    rep.inputs.update(meta)
    rng = np.random.default_rng(a.seed)
    trials = a.trials or 500
    fails = _strata_trials(C, rng, trials, rep)
    rep.check("rank-formula and cone identity failures", fails, "==", 0)


def cmd_omega0(a, rep):
    C, meta = load_curve(a.curve)
    rep.inputs.update(meta)
    rng = np.random.default_rng(a.seed)
    g = C.genus
    if a.divisor is not None:
        D = parse_divisor(C, a.divisor)
    else:
        while True:
            D = strata.random_effective(C, g - 2, rng)
            if C.h0(D) == 1:
                break
    rep.inputs["divisor"] = divisor_json(C, D)
    om = strata.omega0(C, D)
    X = strata.extension_space(C, D)
    rep.row(deg_D=D.degree, h0_D=X.LD.dim, ext_dim=X.dim, omega0_dim=len(om))
    if D.degree == g - 2 and X.LD.dim == 1:
        rep.check("omega0 dim = g-2", len(om), "==", g - 2)
        supp = set(D.support())
        P = next(Place(pt) for pt in C.rational_points if Place(pt) not in supp)
        idx = strata.stratum_index(C, D, strata.eval_class(C, D, P))
        rep.check("eval functional stratum index", idx, "==", 1)


def special_divisors(C: PlaneCurve) -> list:
    """Pencils cut by lines through singular points: the extremal divisors for the Clifford bound."""
    out = []
    for pt, _ in C.singular_points:
        try:
            out.append(pencil_through(C, pt))
        except CurveError:
            continue
    return out


def cmd_clifford_scan(a, rep):
    C, meta = load_curve(a.curve)
    rep.inputs.update(meta)
    cliff = a.cliff if a.cliff is not None else meta.get("cliff")
    if cliff is None:
        raise UsageError("clifford-scan needs --cliff (or a curve file with a cliff entry)")
    rep.inputs["cliff"] = cliff
    rng = np.random.default_rng(a.seed)
    r = strata.clifford_scan(C, int(cliff), a.trials or 500, rng, special=special_divisors(C))
    rep.row(**r)
    rep.check("samples above g+1-Cliff", r["exceeded"], "==", 0)
    rep.check("max h0(E)", r["max_h0_E"], "<=", r["bound"])


def cmd_mukai_scan(a, rep):
    C, meta = load_curve(a.curve)
    rep.inputs.update(meta)
    rng = np.random.default_rng(a.seed)
    r = strata.mukai_scan(C, a.trials or 500, rng, bpf_pool(C))
    rep.row(samples=r["samples"], pool_degrees=r["pool_degrees"], failures=r["failures"][:10])
    rep.check("twist inequality failures", len(r["failures"]), "==", 0)


def cmd_incidence(a, rep):
    C, meta = load_curve(a.curve)
    rep.inputs.update(meta)
    rng = np.random.default_rng(a.seed)
    g = C.genus
    x = parse_divisor(C, a.divisor) if a.divisor is not None else strata.random_effective(C, g - 2, rng)
    y = parse_divisor(C, a.divisor2) if a.divisor2 is not None else strata.random_effective(C, g - 2, rng)
    rep.inputs.update(x=divisor_json(C, x), y=divisor_json(C, y))
    pool = C.rational_points[: 30]
    inc = strata.incidence_case(C, x, y, pool)
    rep.row(kind=inc.kind, p=_places_json(C, [inc.p]) if inc.p else None,
            q=_places_json(C, [inc.q]) if inc.q else None)
    rep.check("case determined", inc.kind != "Indeterminate", "==", True)


def cmd_caselab_g4(a, rep):
    C, meta = load_curve(a.curve or "quintic_g4")
    rep.inputs.update(meta)
    rng = np.random.default_rng(a.seed)
    M = caselab.canonical_model(C)
    data = caselab.genus4_system(M)
    rep.check("quadric space dim", data.dim_quadrics, "==", 1)
    rep.check("cubic space dim", data.dim_cubics, "==", 5)
    rep.check("linear multiples of Q dim", data.dim_linear_times_Q, "==", 4)
    T = caselab.cubic_threefold(data, rng)
    rep.check("threefold nullspace dim", T["nullspace_dim"], "==", 1)
    rep.check("quadric negative control nullspace", T["quadric_nullspace_dim"], "==", 0)
    rep.check("held-out image points on T", T["holdout_zero"], "==", True)
    node = caselab.node_check(T["T"], data, M, rng)
    rep.row(T=_poly_json(T["T"]), Q=_poly_json(data.Q), node=node)
    rep.check("images of Q minus C agree", node["images_agree"], "==", True)
    rep.check("gradient of T at t0 vanishes", node["gradient_zero"], "==", True)
    rep.check("Hessian of T at t0 nonzero", node["hessian_nonzero"], "==", True)
    rep.check("tangent cone proportional to Q", node["cone_proportional_to_Q"], "==", True)
    al = caselab.alpha_checks(data, M, rng)
    rep.row(alpha=al)
    rep.check("alpha quartics vanish on C", al["vanish_on_curve"], "==", True)
    rep.check("q^2 difference identity", al["q2_difference"], "==", True)
    rep.check("alpha linear in direction", al["linear_in_direction"], "==", True)


def _poly_json(f):
    return [[*e, f.field.to_str(c)] for e, c in sorted(f.terms.items(), reverse=True)]


def cmd_caselab_g5(a, rep):
    C, meta = load_curve(a.curve or "sextic_g5")
    rep.inputs.update(meta)
    rng = np.random.default_rng(a.seed)
    M = caselab.canonical_model(C)
    quads, net = caselab.genus5_net(M)
    rep.check("quadric space dim", len(quads), "==", 3)
    r = caselab.discriminant_quintic(net, rng)
    rep.row(gamma=_poly_json(r["gamma"]), zeros=[[int(x) for x in z] for z in r["zeros"]], ranks=r["ranks"])
    rep.check("discriminant degree", r["degree"], "==", 5)
    rep.check("sampled zeros", len(r["zeros"]), ">=", 25)
    rep.check("max rank at zeros", max(r["ranks"]), "<=", 4)


def cmd_caselab_g6(a, rep):
    C, meta = load_curve(a.curve or "sextic_g6")
    rep.inputs.update(meta)
    tc = caselab.tetragonal_config(C)
    rep.row(model="tetragonal", h0=tc.h0, relation=tc.relation, omega0_dims=tc.omega0_dims,
            x=[divisor_json(C, x) for x in tc.x])
    rep.check("pencils with h0 = 2", sum(h == 2 for h in tc.h0), "==", 5)
    rep.check("relations x0 + xi ~ K - Di", sum(tc.relation), "==", 4)
    rep.check("omega0 dims equal to 1", sum(d == 1 for d in tc.omega0_dims), "==", 5)
    T = load_standard("trigonal_g6")
    tr = caselab.trigonal_omega(T)
    rep.row(model="trigonal", **{k: v for k, v in tr.items() if k != "D"})
    rep.check("trigonal omega0 dim", tr["omega0_dim"], "==", 2)
    Q = load_standard("quintic_g6")
    pq = caselab.plane_quintic_omega(Q)
    rep.row(model="plane_quintic", omega0_dim=pq["omega0_dim"], generator_prop_eval_p=pq["generator_prop_eval_p"],
            p_is_base_point=pq["p_is_base_point"], eval_q_index=pq["eval_q_index"])
    rep.check("plane quintic omega0 dim", pq["omega0_dim"], "==", 1)
    rep.check("generator proportional to eval_p", pq["generator_prop_eval_p"], "==", True)
    rep.check("eval_q stratum index", pq["eval_q_index"], "==", 1)


def _riemann(a, default=DEFAULT_BRANCH):
    if a.tau is not None:
        rm = th.RiemannMatrix(load_tau(a.tau))
        return rm, None, {"tau": [[[z.real, z.imag] for z in row] for row in rm.tau]}
    branch = load_branch(a.branch, default)
    data = th.hyperelliptic_periods(branch)
    return data.rm, data, {"branch": branch}


def cmd_theta_eval(a, rep):
    rm, _, inp = _riemann(a)
    rep.inputs.update(inp)
    z = np.zeros(rm.g) if a.z is None else np.array([complex(*p) for p in json.loads(a.z)])
    char = th.ThetaChar.from_index(rm.g, a.char or 0)
    tol = a.tol or 1e-14
    v = th.theta(rm, z, char, tol)
    w = th.theta(rm, z, char, tol * 1e-2 if tol >= 1e-12 else tol)
    rep.inputs.update(z=[[x.real, x.imag] for x in z], char=a.char or 0, tol=tol)
    rep.row(value=v, parity=char.parity)
    rep.check("tighter truncation changes value by", abs(v - w), "<=", tol * math.exp(math.pi * z.imag @ rm.Yinv @ z.imag) + 1e-15)


def _fay_like(a, rep, quad: bool):
    rm, data, inp = _riemann(a)
    if data is None:
        raise UsageError("Fay checks need hyperelliptic branch points")
    rep.inputs.update(inp)
    rng = np.random.default_rng(a.seed)
    tol = a.tol or 1e-7
    trials = a.trials or 20
    worst, worst_sigma2 = 0.0, 1.0
    n_idx = 4**data.g
    quadruples = []
    for t in range(trials):
        pts = th.random_points(data, 4, rng)
        quadruples.append(pts)
        for idx in [0] + sorted(int(i) for i in rng.choice(np.arange(1, n_idx), 7, replace=False)):
            r = th.quadrisecant_residual(data, pts, idx) if quad else th.fay_residual(data, pts, idx)
            worst = max(worst, r["residual"])
            if quad:
                worst_sigma2 = min(worst_sigma2, r["sigma2"])
        if t < 5:
            rep.row(points=pts, residual=r["residual"], sv=r["sv"])
    rep.check("worst residual", worst, "<=", tol)
    if quad:
        rep.check("worst sigma2/sigma1", worst_sigma2, ">=", 1e-3)
    neg = th.negative_control(data, quadruples, 1e-2, quad)
    rep.row(control="tau + 0.01i I", median=neg["median"], min=neg["min"])
    rep.check("perturbed tau median residual", neg["median"], ">=", 1e-3)


def cmd_fay(a, rep):
    _fay_like(a, rep, quad=False)


def cmd_quadrisecant(a, rep):
    _fay_like(a, rep, quad=True)


def cmd_coble(a, rep):
    rm, _, inp = _riemann(a)
    rep.inputs.update(inp)
    rng = np.random.default_rng(a.seed)
    tol = a.tol or 1e-8
    r = th.coble_solve(rm, rng, n_samples=a.samples, tol=tol)
    rep.row(nullspace_dim=r["nullspace_dim"], n_unknowns=r["n_unknowns"],
            singular_values=r["singular_values"])
    rep.check("nullspace dim", r["nullspace_dim"], ">=", 1)
    if r["nullspace_dim"]:
        rep.row(coefficients=r["coefficients"])
        rep.check("fresh-point value residual", r["max_value_residual"], "<=", 1e-6)
        rep.check("fresh-point gradient residual", r["max_gradient_residual"], "<=", 1e-6)


def cmd_gamma00(a, rep):
    rm, _, inp = _riemann(a)
    rep.inputs.update(inp)
    prec = a.precision
    rep.inputs["precision"] = prec
    r = th.gamma00_rank(rm, threshold=a.tol or 1e-8, precision=prec)
    expected = min(1 + rm.g * (rm.g + 1) // 2, 2**rm.g)
    rep.row(rank=r["rank"], rows=r["rows"], cols=r["cols"], sv_ratios=r["sv_ratios"])
    rep.check("rank of multiplicity-4 conditions", r["rank"], "==", expected)


COMMANDS = {
    "curve-info": cmd_curve_info,
    "rr": cmd_rr,
    "strata-sample": cmd_strata_sample,
    "omega0": cmd_omega0,
    "clifford-scan": cmd_clifford_scan,
    "mukai-scan": cmd_mukai_scan,
    "incidence": cmd_incidence,
    "caselab-g4": cmd_caselab_g4,
    "caselab-g5": cmd_caselab_g5,
    "caselab-g6": cmd_caselab_g6,
    "theta-eval": cmd_theta_eval,
    "fay": cmd_fay,
    "quadrisecant": cmd_quadrisecant,
    "coble": cmd_coble,
    "gamma00": cmd_gamma00,
}

NEEDS_CURVE = {"curve-info", "rr", "strata-sample", "omega0", "clifford-scan", "mukai-scan", "incidence"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bnlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--job", help="JSON job file; keys mirror the flags")
        s.add_argument("--curve", help="standard model name or curve JSON path")
        s.add_argument("--seed", type=int)
        s.add_argument("--tol", type=float)
        s.add_argument("--precision", type=int, help="decimal digits for extended precision")
        s.add_argument("--out", help="report path")
        s.add_argument("--trials", type=int)
        s.add_argument("--cliff", type=int)
        s.add_argument("--branch", help="JSON file with branch points")
        s.add_argument("--tau", help="JSON file with a period matrix as [re, im] pairs")
        s.add_argument("--divisor")
        s.add_argument("--divisor2")
        s.add_argument("--z")
        s.add_argument("--char", type=int)
        s.add_argument("--samples", type=int)
    m = sub.add_parser("report-merge")
    m.add_argument("reports", nargs="+")
    m.add_argument("--out")
    return p


def _apply_job(args):
    job = _read_json(args.job)
    if not isinstance(job, dict):
        raise UsageError(f"{args.job}: job must be a JSON object")
    unknown = set(job) - JOB_KEYS
    if unknown:
        raise UsageError(f"{args.job}: unknown keys {sorted(unknown)}")
    if "command" in job and job["command"] != args.command:
        raise UsageError(f"{args.job}: job is for {job['command']!r}, not {args.command!r}")
    for k, v in job.items():
        if k == "command":
            continue
        if getattr(args, k, None) is None:
            if k in ("divisor", "divisor2", "z", "tau") and not isinstance(v, str):
                v = v if k == "tau" else json.dumps(v)
            if k == "branch" and not isinstance(v, str):
                v = json.dumps(v)
            setattr(args, k, v)


def _out_path(args) -> Path:
    if args.out:
        return Path(args.out)
    base = Path(os.environ.get(OUT_DIR_ENV, "."))
    suffix = f"-{args.seed}" if getattr(args, "seed", None) is not None else ""
    return base / f"{args.command}{suffix}.json"


def merge_reports(paths) -> dict:
    prov, results, checks = [], [], []
    for path in paths:
        raw = Path(path).read_bytes()
        doc = _read_json(path)
        try:
            jsonschema.validate(doc, report_schema())
        except jsonschema.ValidationError as exc:
            raise UsageError(f"{path}: not a report ({exc.message})") from exc
        prov.append({"file": Path(path).name, "run_id": doc["run_id"], "command": doc["command"],
                     "sha256": hashlib.sha256(raw).hexdigest(), "passed": doc["passed"]})
        results.extend({"source": doc["run_id"], **r} for r in doc["results"])
        checks.extend({**c, "name": f"{doc['command']}: {c['name']}"} for c in doc["checks"])
    rep = Report("report-merge", {"reports": [p["file"] for p in prov]})
    rep.results, rep.checks = results, checks
    doc = rep.as_dict()
    doc["provenance"] = prov
    return doc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "report-merge":
            doc = merge_reports(args.reports)
            path = Path(args.out) if args.out else Path(os.environ.get(OUT_DIR_ENV, ".")) / "merged.json"
            write_report(doc, path)
            print(f"report-merge: {len(doc['provenance'])} reports -> {path}")
            return 0 if doc["passed"] else 1
        if args.job:
            _apply_job(args)
        if args.command in SAMPLING and args.seed is None:
            raise UsageError(f"{args.command} samples randomly and needs --seed")
        if args.command in NEEDS_CURVE and not args.curve:
            raise UsageError(f"{args.command} needs --curve")
        inputs = {k: v for k, v in (("seed", args.seed), ("trials", args.trials), ("tol", args.tol)) if v is not None}
        rep = Report(args.command, inputs)
        COMMANDS[args.command](args, rep)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    path = _out_path(args)
    write_report(rep.as_dict(), path)
    status = "PASS" if rep.passed else "FAIL"
    print(f"{args.command}: {status} ({sum(c['passed'] for c in rep.checks)}/{len(rep.checks)} checks) -> {path}")
    for c in rep.checks:
        if not c["passed"]:
            print(f"  failed: {c['name']}: {c['measured']} {c['relation']} {c['threshold']}")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
