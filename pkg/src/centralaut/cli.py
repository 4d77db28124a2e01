"""Command-line front end.

Exit codes: 0 when every check passes, 2 for invalid input, 3 when a
mathematical check fails.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import acceptance, corpus
from .abelian import AbelianPGroup, make_group
from .endomat import (
    ENUM_BOUND,
    aut_order,
    canonicalize,
    count_abc,
    enumerate_abc,
    enumerate_autos,
    identity,
    theorem_lower_bound,
)
from .errors import CentralAutError, CheckFailed, InputError
from .extension import (
    EXHAUSTION_BOUND,
    CentralExtensionGroup,
    extend_automorphism,
    extension_family,
    extension_from_json,
    family_closure,
    hypotheses,
)
from .oracle import abelian_table, brute_aut_count, brute_bound, center_and_inn, check_conjecture_A, table_from_extension
from .tablegroup import TableGroup

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 2, 3


def factored(value: int, p: int) -> str:
    """``p^k*m`` with m prime to p."""
    if value == 0:
        return "0"
    k = 0
    while value % p == 0:
        value //= p
        k += 1
    return f"{p}^{k}*{value}"


def count_entry(value: int, p: int) -> dict:
    return {"value": str(value), "factored": factored(value, p)}


@dataclass
class RunReport:
    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def check(self, name: str, ok: bool, witness=None):
        entry = {"status": "pass" if ok else "fail"}
        if not ok and witness is not None:
            entry["witness"] = witness
        self.checks[name] = entry

    def skip(self, name: str, reason: str):
        self.checks[name] = {"status": "skipped", "reason": reason}

    @property
    def failed(self) -> list:
        return [k for k, v in self.checks.items() if v["status"] == "fail"]

    def to_json(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "results": self.results,
                "checks": self.checks, "timing": self.timing}

    def render(self) -> str:
        lines = [f"{self.command}"]
        for k, v in self.results.items():
            if k == "criteria":                # per-criterion records are JSON-only
                continue
            if isinstance(v, dict) and "value" in v:
                v = f"{v['value']}  ({v['factored']})"
            elif not isinstance(v, str):
                v = json.dumps(v)
            lines.append(f"  {k}: {v}")
        for k, v in self.checks.items():
            extra = v.get("reason") or v.get("witness") or ""
            lines.append(f"  [{v['status']}] {k}{': ' + str(extra) if extra else ''}")
        return "\n".join(lines)


# -- input helpers ---------------------------------------------------------------------

def _parse_exponents(text: str) -> list:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise InputError(f"cannot parse exponent list {text!r}") from None


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _group(args) -> AbelianPGroup:
    if args.group:
        d = _load_json(args.group)
        return make_group(d.get("p"), d.get("exponents", []))
    if args.p is None or args.exponents is None:
        raise InputError("give --p and --exponents, or --group FILE")
    return make_group(args.p, _parse_exponents(args.exponents))


def _extension(source: str) -> CentralExtensionGroup:
    if source in corpus.EXTENSIONS:
        return corpus.extension(source)
    return extension_from_json(_load_json(source))


def _table(source: str) -> tuple:
    """(table group, prime or None) from a builtin name or a JSON file."""
    if source in corpus.TABLES:
        return corpus.table(source), corpus.prime_of(source)
    if source in corpus.EXTENSIONS:
        G = corpus.extension(source)
        return table_from_extension(G, bound=max(brute_bound(), G.order)), G.p
    d = _load_json(source)
    if "cocycle" in d:
        G = extension_from_json(d)
        return table_from_extension(G, bound=max(brute_bound(), G.order)), G.p
    if "table" not in d:
        raise InputError(f"{source}: expected a table {{'order', 'table'}} or an extension descriptor")
    return TableGroup.from_json(d, name=Path(source).stem), None


# -- commands ---------------------------------------------------------------------------

def cmd_aut_order(args, report: RunReport):
    g = _group(args)
    report.inputs["group"] = g.descriptor()
    value = aut_order(g)
    report.results["aut_order"] = count_entry(value, g.p)
    if not args.verify_bruteforce:
        report.skip("bruteforce", "not requested (--verify-bruteforce)")
        return
    bound = args.brute_bound
    if g.order <= bound:
        brute = brute_aut_count(abelian_table(g), bound=bound, jobs=args.jobs)
        report.results["bruteforce"] = count_entry(brute, g.p)
        report.check("formula equals brute-force count", brute == value, {"brute": str(brute)})
        return
    try:
        n = sum(1 for _ in enumerate_autos(g))
    except CentralAutError:
        report.skip("bruteforce", f"|H| = {g.order} exceeds the brute bound {bound} and End is too large to enumerate")
        return
    report.results["enumerated"] = count_entry(n, g.p)
    report.check("formula equals matrix enumeration", n == value, {"enumerated": str(n)})


def cmd_count_restricted(args, report: RunReport):
    g = _group(args)
    report.inputs["group"] = g.descriptor()
    value = count_abc(g)
    report.results["count"] = count_entry(value, g.p)
    if args.enumerate:
        try:
            n = sum(1 for _ in enumerate_abc(g))
            report.results["enumerated"] = count_entry(n, g.p)
            report.check("formula equals enumeration", n == value, {"enumerated": str(n)})
        except CentralAutError as exc:
            report.skip("enumeration", str(exc))
    else:
        report.skip("enumeration", "not requested (--enumerate)")
    if g.n >= 3 and g.exponents[0] >= 3:
        bound = theorem_lower_bound(g)
        report.results["lower_bound"] = count_entry(bound, g.p)
        report.check("count >= |Z| p^(n^2-3n)", value >= bound)
    else:
        report.skip("lower bound", "needs n >= 3 and e_1 >= 3")


def _theta(G: CentralExtensionGroup, text: str):
    if text == "identity":
        return identity(G.Z)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError:
        raise InputError(f"--theta must be 'identity' or a JSON matrix, got {text!r}") from None
    if isinstance(raw, int):
        raw = [[raw]]                   # shorthand for a cyclic Z
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise InputError(f"--theta must be a matrix (list of rows), got {text!r}")
    return canonicalize(G.Z, raw)


def cmd_extend(args, report: RunReport):
    G = _extension(args.extension)
    report.inputs["extension"] = args.extension
    report.results["group"] = {"name": G.name, "order": str(G.order), "q_order": G.Q.order, "z": G.Z.descriptor()}
    h = hypotheses(G, bound=args.exhaustion_bound)
    report.results["hypotheses_mode"] = h.pop("mode")
    for key, ok in h.items():
        report.check(f"hypothesis {key}", ok)
    if report.failed:
        return
    inner = None
    if G.order <= args.brute_bound:
        _, inner_maps = center_and_inn(table_from_extension(G, bound=args.brute_bound), bound=args.brute_bound)
        inner = set(inner_maps)
    if args.all:
        family = extension_family(G, homomorphism=args.homomorphism, samples=args.samples,
                                  bound=args.exhaustion_bound, enum_bound=args.enum_bound)
    else:
        family = [extend_automorphism(G, _theta(G, args.theta), homomorphism=args.homomorphism,
                                      samples=args.samples, bound=args.exhaustion_bound)]
    report.results["automorphisms"] = [g.to_json() for g in family]
    report.results["count"] = count_entry(len(family), G.p)
    report.check("coboundary identity holds for every lift", all(g.verified["coboundary"] for g in family))
    report.check("every lift is a homomorphism", True)   # a failure raises HomomorphismCheckFailed
    report.results["homomorphism_mode"] = sorted({g.verified["homomorphism"] for g in family})
    report.check("identity on G/Z", all(g.verified["identity_on_quotient"] for g in family))
    movers = [g for g in family if not g.theta.is_identity()]
    if inner is None:
        report.skip("non-inner (oracle)", f"|G| = {G.order} exceeds the brute bound; theta != id moves the centre")
    else:
        hits = [g.to_json()["theta"] for g in movers if tuple(int(v) for v in g.permutation()) in inner]
        report.check("lifts with theta != id are not inner", not hits, hits)
    if args.all:
        c = family_closure(family, max_pairs=args.closure_pairs)
        report.results["closure"] = {"pairs": c.pairs, "mode": c.mode, "literal_members": c.exact,
                                     "non_member_pairs": len(c.non_members)}
        report.check("composites satisfy the restricted congruences on Z", c.restricted)
        report.check("composites are identity on G/Z", c.trivial_on_quotient)


def cmd_verify_conjecture(args, report: RunReport):
    T, p = _table(args.group)
    p = args.p or p
    report.inputs["group"] = args.group
    v = check_conjecture_A(T, p, bound=args.brute_bound, aut_count=brute_aut_count(T, args.brute_bound, args.jobs)
                           if T.order <= args.brute_bound else None)
    report.results["order"] = count_entry(v.order, v.p)
    report.results["aut_order"] = count_entry(v.aut_order, v.p)
    report.results["applicable"] = v.applicable
    report.results["reason"] = v.reason
    report.results["holds"] = v.holds
    if v.applicable:
        report.check("|G| divides |Aut(G)|", v.holds, {"order": str(v.order), "aut_order": str(v.aut_order)})
    else:
        report.skip("|G| divides |Aut(G)|", f"not applicable: {v.reason}")


def cmd_selftest(args, report: RunReport):
    report.results["criteria"] = []
    for r in acceptance.run_all(args.scale):
        report.results["criteria"].append(r.to_json())
        report.check(f"criterion {r.number}: {r.title}", r.passed, r.detail if not r.passed else None)
        if not args.json:
            print(r.line(), file=sys.stderr, flush=True)


def cmd_replay(args, report: RunReport):
    d = _load_json(args.report)
    argv = d.get("inputs", {}).get("argv")
    if not isinstance(argv, list) or argv[:1] == ["replay"]:
        raise InputError("report has no replayable inputs.argv")
    raise _Replay(argv)


class _Replay(Exception):
    def __init__(self, argv):
        self.argv = argv


COMMANDS = {
    "aut-order": cmd_aut_order,
    "count-restricted": cmd_count_restricted,
    "extend": cmd_extend,
    "verify-conjecture": cmd_verify_conjecture,
    "selftest": cmd_selftest,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="centralaut", description="Automorphisms of finite p-groups.")
    ap.add_argument("--json", action="store_true", help="emit a JSON report")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for brute-force counts")
    ap.add_argument("--brute-bound", type=int, default=None, help="largest table order for brute force")
    sub = ap.add_subparsers(dest="command", required=True)

    def group_args(sp):
        sp.add_argument("--p", type=int)
        sp.add_argument("--exponents", help="comma-separated, e.g. 1,1,2")
        sp.add_argument("--group", help="JSON descriptor {'p': .., 'exponents': [..]}")

    sp = sub.add_parser("aut-order", help="|Aut(H)| of an abelian p-group")
    group_args(sp)
    sp.add_argument("--verify-bruteforce", action="store_true")

    sp = sub.add_parser("count-restricted", help="size of the restricted matrix set and the lower bound")
    group_args(sp)
    sp.add_argument("--enumerate", action="store_true")

    sp = sub.add_parser("extend", help="lift centre automorphisms of an extension")
    sp.add_argument("extension", help="extension JSON file or builtin name (" + ", ".join(corpus.EXTENSIONS) + ")")
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--theta", help="'identity' or a JSON matrix such as [[10]]")
    mode.add_argument("--all", action="store_true", help="lift every restricted theta")
    sp.add_argument("--homomorphism", choices=["auto", "exhaustive", "sampled", "none"], default="auto")
    sp.add_argument("--samples", type=int, default=None, help="random pairs for sampled checks")
    sp.add_argument("--exhaustion-bound", type=int, default=EXHAUSTION_BOUND)
    sp.add_argument("--enum-bound", type=int, default=ENUM_BOUND)
    sp.add_argument("--closure-pairs", type=int, default=10_000)

    sp = sub.add_parser("verify-conjecture", help="brute-force |G| | |Aut(G)|")
    sp.add_argument("group", help="builtin name (" + ", ".join(corpus.TABLES) + ") or JSON file")
    sp.add_argument("--p", type=int)

    sp = sub.add_parser("selftest", help="run the acceptance suite")
    sp.add_argument("--scale", choices=acceptance.SCALES, default="small")

    sp = sub.add_parser("replay", help="re-run the command recorded in a JSON report")
    sp.add_argument("report")
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    if args.brute_bound is None:
        args.brute_bound = brute_bound()
    if getattr(args, "samples", 0) is None:
        args.samples = 200 if args.all else 10_000
    sub_argv = [a for a in argv if a not in ("--json",)]
    report = RunReport(args.command, {"argv": sub_argv})
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, report)
    except _Replay as r:
        return main((["--json"] if args.json else []) + r.argv)
    except InputError as exc:
        return _fail(args, report, EXIT_INPUT, f"{type(exc).__name__}: {exc}")
    except CheckFailed as exc:
        return _fail(args, report, EXIT_CHECK, f"{type(exc).__name__}: {exc}")
    report.timing["seconds"] = round(time.perf_counter() - t0, 3)
    print(json.dumps(report.to_json(), indent=2) if args.json else report.render())
    if report.failed:
        print(f"check failed: {report.failed[0]}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def _fail(args, report: RunReport, code: int, message: str) -> int:
    report.results["error"] = message
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    print(f"error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
