"""Command-line front end: one subcommand per analysis, JSON or text reports.

The positional polytope is a JSON file or the name of a bundled corpus entry.
By default it is read as the polytope carrying P and the coordinate ring
(the anticanonical moment polytope of the mirror variety); ``--role delta``
reads it as the other member of the pair.

Exit status: 0 when every check passes, 1 when a check fails (the report is
still written), 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__, corpus
from .cech import AMBIENT, BOUNDARY, ToricSpace, cech_cohomology, concentration_and_serre
from .coordring import graded_basis, nontriviality_certificate, roots
from .fan import (
    dual_fan,
    heights_to_json,
    induced_fan,
    load_heights,
    mpcp_check,
    mpcs_check,
    regularity_flags,
    sample_generic_heights,
)
from .hochschild import boundary_category, graded_hh_rank, selftest
from .linalg import INFINITE, group_index
from .logcoh import hlog_low_degree_table, mdeg_injectivity_check
from .mirror import analyze, connectedness_condition, forbidden_characteristics
from .polytope import LatticePolytope, codim_ge2_points, is_reflexive, lattice_points, polar_dual

REPORT_FORMAT = "toricmirror-report"
REPORT_VERSION = 1

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


def jsonable(x: Any) -> Any:
    """Fractions become "a/b" strings (integers stay bare); tuples become lists."""
    if isinstance(x, bool) or x is None or isinstance(x, (str, float)):
        return x
    if isinstance(x, int):
        return int(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, str) else k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [jsonable(v) for v in items]
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"cannot serialise {type(x).__name__}")


@dataclass
class Report:
    command: str
    seed: int
    input: dict
    parameters: dict
    checks: list[dict] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def check(self, cid: str, label: str, ok: bool | None, detail: Any = None) -> None:
        entry = {"id": cid, "label": label, "ok": ok}
        if detail is not None:
            entry["detail"] = detail
        self.checks.append(entry)

    @property
    def ok(self) -> bool:
        return all(c["ok"] is not False for c in self.checks)

    def to_json(self, with_timing: bool) -> dict:
        out = {
            "format": REPORT_FORMAT,
            "format_version": REPORT_VERSION,
            "tool_version": __version__,
            "command": self.command,
            "seed": self.seed,
            "input": self.input,
            "parameters": self.parameters,
            "ok": self.ok,
            "checks": self.checks,
            "results": self.results,
        }
        if with_timing:
            out["timing"] = self.timing
        return jsonable(out)

    def to_text(self, with_timing: bool) -> str:
        lines = [f"toricmirror {__version__} {self.command} (seed {self.seed})"]
        src = self.input.get("source")
        if src:
            lines.append(f"input: {src} as {self.input.get('role')}")
        for c in self.checks:
            mark = {True: "PASS", False: "FAIL", None: "SKIP"}[c["ok"]]
            lines.append(f"  [{mark}] {c['id']}: {c['label']}")
            if c["ok"] is not True and "detail" in c:
                lines.append(f"         {json.dumps(jsonable(c['detail']))}")
        for key, val in self.results.items():
            text = json.dumps(jsonable(val))
            lines.append(f"  {key}: {text if len(text) <= 160 else text[:157] + '...'}")
        if with_timing:
            lines.append(f"  time: {self.timing.get('total_seconds', 0):.3f} s")
        lines.append("result: " + ("all checks passed" if self.ok else "some checks failed"))
        return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# input


@dataclass
class Pair:
    source: str
    role: str
    delta: LatticePolytope
    dual: LatticePolytope

    def echo(self) -> dict:
        return {"source": self.source, "role": self.role, "delta": self.delta.to_json(), "dual": self.dual.to_json()}


def read_polytope(name_or_path: str) -> tuple[LatticePolytope, str]:
    path = Path(name_or_path)
    try:
        if path.suffix == ".json" or path.exists():
            if not path.exists():
                raise InputError(f"no such file: {name_or_path}")
            return LatticePolytope.load(path), str(path)
        return corpus.load(name_or_path), f"corpus:{name_or_path}"
    except KeyError as exc:
        raise InputError(str(exc).strip("'\"")) from exc
    except (ValueError, json.JSONDecodeError, TypeError) as exc:
        raise InputError(f"cannot parse {name_or_path}: {exc}") from exc


def read_pair(name_or_path: str | None, role: str) -> Pair:
    if name_or_path is None:
        raise InputError("this command needs a polytope")
    poly, source = read_polytope(name_or_path)
    if not poly.is_lattice or not poly.origin_interior():
        raise InputError("input must be a lattice polytope with the origin in its interior")
    if not is_reflexive(poly):
        raise InputError("input polytope is not reflexive")
    other = polar_dual(poly, strict=True)
    if role == "dual":
        return Pair(source, role, other, poly)
    return Pair(source, role, poly, other)


def read_heights(path: str | None, P: Sequence[tuple[int, ...]], generic: bool, rng: random.Random) -> dict:
    if path and generic:
        raise InputError("--heights and --generic are exclusive")
    if generic:
        return sample_generic_heights(P, rng)
    if not path:
        return {p: Fraction(1) for p in P}
    try:
        kappa = load_heights(path)
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except (ValueError, KeyError, json.JSONDecodeError, TypeError) as exc:
        raise InputError(f"cannot parse heights {path}: {exc}") from exc
    if set(kappa) != set(map(tuple, P)):
        raise InputError("heights must be given on exactly the points of P")
    return kappa


def parse_point(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad point {text!r}") from exc


# ----------------------------------------------------------------------------
# commands


def cmd_analyze(args: argparse.Namespace, rep: Report) -> None:
    pair = read_pair(args.polytope, args.role)
    A = lattice_points(pair.delta)
    P0 = lattice_points(pair.dual)
    P = codim_ge2_points(pair.dual)
    rep.check("reflexive", "both polytopes are lattice polytopes, each the polar of the other", True)
    involution = polar_dual(pair.dual, strict=True).vertices == pair.delta.vertices
    rep.check("duality", "polar duality is an involution on the pair", involution)
    idx = group_index(list(P), pair.delta.rank) if len(P) else INFINITE
    rep.results.update(
        {
            "rank": pair.delta.rank,
            "A_count": len(A),
            "P0_count": len(P0),
            "P_count": len(P),
            "P": list(P),
            "faces_of_dual": _face_counts(pair.dual),
            "group_index": idx,
        }
    )


def _face_counts(poly: LatticePolytope) -> list[int]:
    counts = [0] * poly.rank
    for f in poly.faces:
        if 0 <= f.dim < poly.rank:
            counts[f.dim] += 1
    return counts


def cmd_dual(args: argparse.Namespace, rep: Report) -> None:
    pair = read_pair(args.polytope, args.role)
    back = polar_dual(pair.dual, strict=True)
    rep.check("duality", "polar duality is an involution on the pair", back.vertices == pair.delta.vertices)
    other = pair.delta if args.role == "dual" else pair.dual
    rep.results["polar_dual"] = other.to_json()


def _fans(args: argparse.Namespace, pair: Pair, rep: Report) -> tuple:
    P = codim_ge2_points(pair.dual)
    if not len(P):
        raise InputError("P is empty; there is no refined fan")
    kappa = read_heights(args.heights, list(P), args.generic, random.Random(args.seed))
    rep.input["heights"] = heights_to_json(kappa)
    try:
        sk = induced_fan(P, kappa)
    except ValueError as exc:
        raise InputError(f"heights do not induce a fan: {exc}") from exc
    return P, kappa, dual_fan(pair.delta), sk


def cmd_fan(args: argparse.Namespace, rep: Report) -> None:
    pair = read_pair(args.polytope, args.role)
    P, kappa, sigma, sk = _fans(args, pair, rep)
    simp, smooth = regularity_flags(sk)
    rep.check("refined-fan-simplicial", "every maximal cone of the refined fan is simplicial", simp)
    rep.results.update(
        {
            "sigma": sigma.to_json(),
            "sigma_kappa": sk.to_json(),
            "sigma_regularity": dict(zip(("simplicial", "smooth"), regularity_flags(sigma))),
            "sigma_kappa_regularity": {"simplicial": simp, "smooth": smooth},
        }
    )


def cmd_conditions(args: argparse.Namespace, rep: Report) -> None:
    pair = read_pair(args.polytope, args.role)
    P, kappa, sigma, sk = _fans(args, pair, rep)
    mp = mpcp_check(sigma, sk, P)
    rep.check("mpcp", "refinement is projective, simplicial, with rays exactly P", mp.ok, mp.to_json()["failures"] or None)
    ms = mpcs_check(sigma, sk) if mp.ok else None
    rep.check(
        "mpcs",
        "refinement is unimodular away from cones over maximal cones",
        None if ms is None else ms.ok,
        None if ms is None else (ms.to_json()["failures"] or None),
    )
    conn = connectedness_condition(pair.delta, pair.dual)
    rep.check("connectedness", "no edge and its dual face both have interior points", conn.ok, conn.violations or None)
    forb = None
    if mp.ok:
        forb = forbidden_characteristics(sk, P)
    rep.results["forbidden_primes"] = None if forb is None else sorted(forb)
    rep.results["forbidden_prime_sources"] = None if forb is None else {str(q): s for q, s in forb.items()}
    hyp = analyze(pair.delta, kappa)
    rep.results["component_counts"] = hyp.to_json()["component_counts"]
    rep.results["monomial_divisor"] = hyp.to_json()["monomial_divisor"]
    rep.results["group_index"] = hyp.group_index


def cmd_cohomology(args: argparse.Namespace, rep: Report) -> None:
    pair = read_pair(args.polytope, args.role)
    try:
        space = ToricSpace.of(pair.delta)
    except ValueError as exc:
        raise InputError(f"{exc}; the face fan must be smooth") from exc
    twists = sorted(set(args.twist or [0]))
    tables = {}
    for k in twists:
        tables[k] = cech_cohomology(space, k, args.space)
        rep.results.setdefault("ranks", {})[str(k)] = tables[k].ranks
    if args.space == BOUNDARY:
        serre = concentration_and_serre(space, twists)
        rep.check("concentration", f"boundary cohomology sits in degrees 0 and {space.boundary_dim}", serre.concentration)
        rep.check("serre", "h^q(O(k)) = h^(d-q)(O(-k))", serre.serre, serre.failures or None)
        rep.check("top-unit", "h^d(O) = 1", serre.top_unit)
        agree = {str(k): (tables[k].ranks[0], len(graded_basis(k, pair.dual))) for k in twists if k >= 0}
        rep.check(
            "sections",
            "h^0(O(k)) counts boundary lattice points of the cone at height k",
            all(a == b for a, b in agree.values()),
            {k: {"h0": a, "graded_basis": b} for k, (a, b) in agree.items()},
        )
    rep.results["space"] = args.space
    rep.results["dimension"] = space.boundary_dim if args.space == BOUNDARY else space.rank


def cmd_logtable(args: argparse.Namespace, rep: Report) -> None:
    pair = read_pair(args.polytope, args.role)
    P, kappa, sigma, sk = _fans(args, pair, rep)
    simp, _ = regularity_flags(sk)
    if not simp:
        rep.check("refined-fan-simplicial", "the refined fan is simplicial (try --generic)", False)
        return
    inj = mdeg_injectivity_check(sk, args.bound, sigma)
    rep.check("mdeg-injective", f"M*-degree is injective on contributing vectors of size <= {args.bound}", inj)
    conn = connectedness_condition(pair.delta, pair.dual)
    if not conn.ok:
        rep.check("connectedness", "the low-degree table needs the connectedness condition", None, conn.violations)
        return
    table = hlog_low_degree_table(pair.delta, sk, args.bound)
    rep.check("off-grid-vanishing", "no contribution off {0} and P below z-degree 4", table.clause_iii)
    rep.results["table"] = table.to_json()


def cmd_deform(args: argparse.Namespace, rep: Report) -> None:
    pair = read_pair(args.polytope, args.role)
    p = parse_point(args.point)
    if len(p) != pair.dual.rank:
        raise InputError("point has the wrong dimension")
    P = set(codim_ge2_points(pair.dual))
    is_root = p in set(roots(pair.dual))
    if p not in P and not is_root:
        raise InputError(f"{p} is neither in P nor a facet-interior point")
    run_gauge = args.gauge_bound is not None
    cert = nontriviality_certificate(
        p, pair.dual, args.gauge_bound or 0, witness_bound=args.height_bound, gauge=run_gauge
    )
    if p in P:
        rep.check("witnesses", "witness pair found and every membership predicate holds", cert.witnesses is not None and cert.witnesses.ok)
        rep.check("product", "the witness product is the single eps monomial", cert.contradiction_monomial is not None)
        if run_gauge:
            rep.check("gauge", "no gauge transformation trivialises the deformation", cert.gauge_verdict != "feasible", cert.gauge_verdict)
    else:
        if run_gauge:
            rep.check("root-gauge", "a gauge transformation trivialises the root deformation", cert.gauge_verdict == "feasible", cert.gauge_verdict)
        else:
            rep.check("root-gauge", "gauge solve not requested (pass --gauge-bound)", None)
    rep.results["in_P"] = p in P
    rep.results["certificate"] = cert.to_json()


def cmd_hochschild(args: argparse.Namespace, rep: Report) -> None:
    ran = False
    if args.selftest:
        ran = True
        st = selftest(args.trials, args.seed, args.length_cap, args.product_trials)
        rep.check("selftest", "randomised Gerstenhaber and pushforward identities", st.ok, st.to_json()["failures"] or None)
        rep.results["selftest"] = st.to_json()
    if args.polytope is not None:
        ran = True
        pair = read_pair(args.polytope, args.role)
        cat = boundary_category(pair.delta, args.twists)
        d = pair.delta.rank - 1
        slices = [tuple(map(int, s.split(","))) for s in args.bidegree] if args.bidegree else [(j, -2 * d) for j in range(3)]
        out = []
        for j, t in slices:
            try:
                r = graded_hh_rank(cat, (j, t), args.length_cap)
            except ValueError as exc:
                raise InputError(str(exc)) from exc
            out.append(r.to_json())
            rep.check(f"hh-{j},{t}", f"truncated HH^{j} in cohomological degree {t} vanishes (spot-check)", r.rank == 0)
        rep.results["hh_ranks"] = out
        rep.results["category"] = {"name": cat.name, "objects": cat.objects}
    if not ran:
        raise InputError("pass --selftest and/or a polytope")


def cmd_tropical(args: argparse.Namespace, rep: Report) -> None:
    from .tropical import TropicalData, SamplingError, cyl_section_check, mollified_section_check, star_check

    pair = read_pair(args.polytope, args.role)
    try:
        data = TropicalData(pair.delta, args.t)
        reps = [
            star_check(data, args.epsilon, args.samples, args.seed),
            mollified_section_check(pair.delta, None, args.delta, args.section_samples, args.seed),
            cyl_section_check(pair.delta, None, args.a, args.delta, args.section_samples, args.seed),
        ]
    except (ValueError, SamplingError) as exc:
        raise InputError(str(exc)) from exc
    labels = {
        "star": "the cut-off region function is radially increasing near its unit level",
        "mollified-section": "mollified section matches F on shrunken stars and lies near the skeleton",
        "cylindrized-section": "cylindrized section obeys the argument bound and is non-integral",
    }
    for r in reps:
        rep.check(r.check, labels[r.check], r.ok, None if r.ok else r.witness)
        rep.results[r.check] = r.to_json()
    if args.csv:
        out = Path(args.csv)
        out.mkdir(parents=True, exist_ok=True)
        for r in reps:
            (out / f"{r.check}.csv").write_text(r.to_csv())


def cmd_report_all(args: argparse.Namespace, rep: Report) -> None:
    targets = [args.polytope] if args.polytope else corpus.names()
    sections = {}
    for name in targets:
        sub = {}
        for cname, fn, extra in _REPORT_ALL_STEPS:
            ns = argparse.Namespace(**{**_DEFAULTS, **extra, "polytope": name, "role": args.role, "seed": args.seed})
            r = Report(cname, args.seed, {}, {})
            try:
                fn(ns, r)
            except InputError as exc:
                sub[cname] = {"skipped": str(exc)}
                continue
            sub[cname] = {"ok": r.ok, "checks": r.checks}
            for c in r.checks:
                rep.check(f"{name}/{cname}/{c['id']}", c["label"], c["ok"])
        sections[name] = sub
    rep.results["polytopes"] = sections


_DEFAULTS = {
    "heights": None,
    "generic": False,
    "twist": [-1, 0, 1],
    "space": BOUNDARY,
    "bound": 3,
    "point": None,
    "height_bound": 6,
    "gauge_bound": None,
}

_REPORT_ALL_STEPS: list[tuple[str, Callable, dict]] = [
    ("analyze", cmd_analyze, {}),
    ("conditions", cmd_conditions, {}),
    ("cohomology", cmd_cohomology, {}),
    ("logtable", cmd_logtable, {"generic": True}),
]


COMMANDS = {
    "analyze": cmd_analyze,
    "dual": cmd_dual,
    "fan": cmd_fan,
    "conditions": cmd_conditions,
    "cohomology": cmd_cohomology,
    "logtable": cmd_logtable,
    "deform": cmd_deform,
    "hochschild": cmd_hochschild,
    "tropical": cmd_tropical,
    "report-all": cmd_report_all,
}


# ----------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--role", choices=("dual", "delta"), default="dual", help="which member of the pair the file holds")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte-identical reports)")

    def poly(p: argparse.ArgumentParser, required: bool = True) -> None:
        p.add_argument("polytope", nargs=None if required else "?", help="JSON file or corpus name")

    def heights(p: argparse.ArgumentParser) -> None:
        p.add_argument("--heights", help="JSON file of heights on P (default: all 1)")
        p.add_argument("--generic", action="store_true", help="sample generic heights from the seed")

    parser = argparse.ArgumentParser(prog="toricmirror", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"toricmirror {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    poly(sub.add_parser("analyze", parents=[common], help="lattice point counts and reflexivity"))
    poly(sub.add_parser("dual", parents=[common], help="the polar dual"))
    p = sub.add_parser("fan", parents=[common], help="the fan and its refinement by heights")
    poly(p)
    heights(p)
    p = sub.add_parser("conditions", parents=[common], help="MPCP, MPCS, connectedness and forbidden primes")
    poly(p)
    heights(p)
    p = sub.add_parser("cohomology", parents=[common], help="Čech cohomology of O(k)")
    poly(p)
    p.add_argument("--twist", type=int, action="append", help="twist k (repeatable; default 0)")
    p.add_argument("--space", choices=(BOUNDARY, AMBIENT), default=BOUNDARY)
    p = sub.add_parser("logtable", parents=[common], help="low-degree log cohomology table")
    poly(p)
    heights(p)
    p.add_argument("--bound", type=int, default=3)
    p = sub.add_parser("deform", parents=[common], help="non-triviality certificate of a deformation direction")
    poly(p)
    p.add_argument("--point", required=True, help="comma-separated lattice point, e.g. 1,1")
    p.add_argument("--height-bound", type=int, default=6)
    p.add_argument("--gauge-bound", type=int, default=None, help="also run the brute-force gauge solve up to this degree")
    p = sub.add_parser("hochschild", parents=[common], help="Gerstenhaber self-test and truncated HH ranks")
    poly(p, required=False)
    p.add_argument("--selftest", action="store_true")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--product-trials", type=int, default=None)
    p.add_argument("--length-cap", type=int, default=5)
    p.add_argument("--twists", type=int, nargs="+", default=[0, 1])
    p.add_argument("--bidegree", action="append", help="j,t slice (repeatable)")
    p = sub.add_parser("tropical", parents=[common], help="sampled tropical checks")
    poly(p)
    p.add_argument("--t", type=float, default=100.0)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--a", type=float, default=0.01)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--section-samples", type=int, default=1_000)
    p.add_argument("--csv", help="directory for per-check CSV sample dumps")
    poly(sub.add_parser("report-all", parents=[common], help="every applicable analysis"), required=False)
    return parser


def _parameters(args: argparse.Namespace) -> dict:
    skip = {"command", "format", "output", "timing", "polytope", "role", "seed"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(args: argparse.Namespace) -> tuple[Report, int]:
    rep = Report(args.command, args.seed, {"source": args.polytope, "role": args.role}, _parameters(args))
    start = time.perf_counter()
    try:
        COMMANDS[args.command](args, rep)
    except InputError as exc:
        rep.check("input", "input is valid", False, str(exc))
        rep.timing["total_seconds"] = time.perf_counter() - start
        return rep, EXIT_INPUT_ERROR
    if args.polytope is not None and args.command != "report-all":
        try:
            rep.input.update(read_pair(args.polytope, args.role).echo())
        except InputError:
            pass
    rep.timing["total_seconds"] = time.perf_counter() - start
    return rep, EXIT_OK if rep.ok else EXIT_CHECK_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT_ERROR if exc.code else EXIT_OK
    rep, code = run(args)
    if args.format == "json":
        text = json.dumps(rep.to_json(args.timing), indent=2) + "\n"
    else:
        text = rep.to_text(args.timing)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_INPUT_ERROR:
        sys.stderr.write(f"toricmirror: {rep.checks[-1]['detail']}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
