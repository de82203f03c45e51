"""Command-line front end.

Every subcommand prints a JSON report (``--md`` for markdown) and exits with
0 (pass), 1 (fail), 2 (usage error) or 3 (undecided: the exact comparison hit
the precision cap, see OCTAK_MAX_BITS).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Callable

from . import ktheory, residue, sconstr, wreath
from .abgroup import AbGroupDescriptor
from .errors import (BudgetExceeded, DimensionMismatch, NormalFormFailure, NotAModuleVector, NotIdempotent,
                     NotUnitNorm, OctakError, ParseError, PrecisionExhausted, UnsupportedDegree, UnsupportedStem)
from .field import FieldKind, format_element, pythag_factor
from .omod import (CofibCertificate, OMatrix, Refusal, cokernel, find_splittings, is_cofibration,
                   is_monomorphism, pushout, splitting_commutes, splitting_iso)
from .syntax import parse_element, parse_field, parse_matrix, parse_sign_pattern

SCHEMA = "octak/1"
EXIT = {"pass": 0, "fail": 1, "usage": 2, "undecided": 3}

GRAMMAR = """\
fields:    Q | Q(i) | Q(sqrt(D)) | Q(sqrt(D),+) | Q(sqrt(D),-)
elements:  sums of terms  a, a/b, a*i, a/b*sqrt(D), i, sqrt(D)   e.g. 3/5+4/5*i
matrices:  row-major, e.g. "[[1/2],[1/2]]" or '[["3/5+4/5*i"]]'
signs:     rows over + 0 - separated by commas, e.g. "+0,++"
           values starting with '-' need the --opt=VALUE form: --x=-3/5+4/5*i
exit:      0 pass, 1 fail, 2 usage, 3 undecided (raise OCTAK_MAX_BITS)
"""


@dataclass
class CommandReport:
    command: str
    inputs: dict
    status: str
    payload: dict = field(default_factory=dict)
    summary: str = ""

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "command": self.command, "inputs": self.inputs, "status": self.status,
                "payload": self.payload, "summary": self.summary}

    def render_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False)

    def render_markdown(self) -> str:
        lines = [f"## {self.command}: {self.status}", "", self.summary, ""]
        table = self.payload.get("markdown")
        if table:
            lines += [table, ""]
        rows = {k: v for k, v in self.payload.items() if k != "markdown"}
        if rows:
            lines += ["| key | value |", "|---|---|"]
            for k in sorted(rows):
                v = json.dumps(rows[k], sort_keys=True, ensure_ascii=False)
                lines.append(f"| {k} | `{v}` |")
        return "\n".join(lines).rstrip() + "\n"

    @property
    def exit_code(self) -> int:
        return EXIT[self.status]


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _matrix(args) -> OMatrix:
    F = parse_field(args.field)
    rows = parse_matrix(args.matrix, F)
    return OMatrix.from_rows(rows, F)


# ---------------------------------------------------------------------------
# subcommands


def cmd_check_cofib(args) -> CommandReport:
    A = _matrix(args)
    cert = is_cofibration(A)
    payload = {"monomorphism": is_monomorphism(A)}
    if isinstance(cert, Refusal):
        payload["refusal"] = cert.to_json()
        return CommandReport("check-cofib", {}, "fail", payload, f"not a cofibration: {cert}")
    payload["certificate"] = cert.to_json()
    payload["cokernel_rank"] = cokernel(cert).rank
    return CommandReport("check-cofib", {}, "pass", payload,
                         f"cofibration O({cert.n_from}) >-> O({cert.n_to})")


def _finite_units(F):
    if F.kind is FieldKind.GAUSSIAN:
        return None
    return [F(1), F(-1)]


def cmd_split(args) -> CommandReport:
    A = _matrix(args)
    cert = is_cofibration(A)
    if isinstance(cert, Refusal):
        return CommandReport("split", {}, "fail", {"refusal": cert.to_json()}, f"not a cofibration: {cert}")
    phi = splitting_iso(cert)
    ok = splitting_commutes(cert, phi)
    payload = {"splitting": phi.to_json(), "commutes": ok, "cokernel_rank": cokernel(cert).rank}
    units = _finite_units(A.field)
    if units is not None and cert.n_to <= 4:
        found = find_splittings(cert, units)
        payload["splittings_found"] = len(found)
        ok = ok and len(found) == 1
    return CommandReport("split", {}, _status(ok), payload,
                         "unique splitting" if ok else "splitting check failed")


def cmd_pushout(args) -> CommandReport:
    F = parse_field(args.field)
    iota_m = OMatrix.from_rows(parse_matrix(args.cofib, F), F)
    f = OMatrix.from_rows(parse_matrix(args.map, F), F)
    cert = is_cofibration(iota_m)
    if isinstance(cert, Refusal):
        return CommandReport("pushout", {}, "fail", {"refusal": cert.to_json()}, f"--cofib is not a cofibration: {cert}")
    po = pushout(cert, f)
    new = is_cofibration(po.cofib.to_matrix())
    ok = (isinstance(new, CofibCertificate) and po.square_commutes()
          and cokernel(new).rank == cokernel(cert).rank)
    payload = {"cofibration": po.cofib.to_json(), "attach": po.attach.to_json(),
               "square_commutes": po.square_commutes(), "cokernel_rank": cokernel(cert).rank}
    return CommandReport("pushout", {}, _status(ok), payload,
                         "cobase change is a cofibration" if ok else "cobase change check failed")


def cmd_gl_ab(args) -> CommandReport:
    G = wreath.wreath_group(args.n, args.w)
    H = wreath.derived_subgroup(G)
    ab = wreath.quotient_invariants(G, H)
    target = AbGroupDescriptor.cyclic(args.w) + (AbGroupDescriptor.cyclic(2) if args.n >= 2 else AbGroupDescriptor())
    ok = ab == target
    payload = {"order": G.order, "abelianization": list(ab.torsion), "text": str(ab),
               "expected": str(target), "derived_order": H.order}
    return CommandReport("gl-ab", {}, _status(ok), payload, f"GL_{args.n} abelianizes to {ab}")


def cmd_perfect(args) -> CommandReport:
    G = wreath.wreath_group(args.n, args.w)
    H = wreath.derived_subgroup(G)
    HH = wreath.derived_subgroup(H)
    ok = HH.order == H.order
    payload = {"order": G.order, "derived_order": H.order, "second_derived_order": HH.order, "perfect": ok}
    return CommandReport("perfect", {}, _status(ok), payload,
                         f"[G,G] of order {H.order} is {'perfect' if ok else 'not perfect'}")


def cmd_commutator_table(args) -> CommandReport:
    res = wreath.commutator_table_check(args.n, args.w)
    ok = all(r.passed for r in res.values())
    payload = {c: {"checked": r.checked, "failures": [list(f) for f in r.failures], "passed": r.passed}
               for c, r in res.items()}
    return CommandReport("commutator-table", {}, _status(ok), {"cases": payload},
                         f"{sum(r.passed for r in res.values())} of {len(res)} cases agree")


def cmd_k0_finf(args) -> CommandReport:
    G, ledger = residue.k0_f_infinity()
    ok = ledger.all_verified() and G == AbGroupDescriptor.trivial()
    payload = {"group": str(G), "relations": len(ledger.relations), "ledger": ledger.to_json()}
    return CommandReport("k0-finf", {}, _status(ok), payload, f"K_0(F_inf) = {G}")


def cmd_faces(args) -> CommandReport:
    faces = residue.enumerate_faces(args.n)
    payload = {"count": len(faces), "faces": [residue.format_face(f) for f in faces]}
    if args.pattern:
        A = residue.SignMatrix(tuple(parse_sign_pattern(args.pattern)))
        if A.ncols != args.n:
            raise ParseError(f"pattern has size {A.ncols}, expected {args.n}", args.pattern, 0)
        M = residue.module_image(A)
        payload["image"] = M.to_json()
    return CommandReport("faces", {}, "pass", payload, f"{len(faces)} faces of the {args.n}-octahedron")


def cmd_k0_reduce(args) -> CommandReport:
    A = residue.SignMatrix(tuple(parse_sign_pattern(args.pattern)))
    try:
        trace = residue.k0_reduce(A)
    except NotIdempotent as exc:
        return CommandReport("k0-reduce", {}, "fail", {"reason": "NotIdempotent"}, str(exc))
    except NormalFormFailure as exc:
        return CommandReport("k0-reduce", {}, "fail", {"reason": "NormalFormFailure"}, str(exc))
    M = residue.module_image(A)
    return CommandReport("k0-reduce", {}, "pass", {"trace": trace.to_json(), "module_size": len(M)},
                         f"[M] = {trace.copies}[F_inf]")


def cmd_k_groups(args) -> CommandReport:
    F = parse_field(args.field)
    if args.max_degree > 2:
        raise UnsupportedDegree(f"K_i is assembled only for i <= 2, got --max-degree {args.max_degree}")
    w, S = ktheory.unit_group_structure(F)
    groups = {str(i): ktheory.k_group(F, i).to_json() for i in range(args.max_degree + 1)}
    return CommandReport("k-groups", {}, "pass", {"w": w, "S": str(S), "groups": groups},
                         "; ".join(f"K_{i} = {g['text']}" for i, g in groups.items()))


def cmd_ah_table(args) -> CommandReport:
    page = ktheory.ah_e2_page(args.w, args.pmax, args.qmax)
    payload = page.to_json()
    payload["markdown"] = page.to_markdown()
    return CommandReport("ah-table", {}, "pass", payload, f"E2 page for mu_{args.w}")


def cmd_pythag_factor(args) -> CommandReport:
    F = parse_field(args.field)
    x = parse_element(args.x, F)
    try:
        fac = pythag_factor(x)
    except NotUnitNorm as exc:
        return CommandReport("pythag-factor", {}, "fail", {"reason": "NotUnitNorm"}, str(exc))
    back = fac.recompose()
    ok = back == x
    payload = {"unit": format_element(F(1) if fac.unit == 0 else [F(1), F(0, 1), F(-1), F(0, -1)][fac.unit]),
               "exponents": fac.as_dict(), "recomposed": format_element(back), "roundtrip": ok}
    return CommandReport("pythag-factor", {}, _status(ok), payload,
                         " * ".join([f"i^{fac.unit}"] + [f"(({format_element(F(a, b))})/({format_element(F(a, -b))}))^{e}"
                                                         for (a, b), e in fac.exponents]))


def cmd_sconstr_count(args) -> CommandReport:
    census = sconstr.enumerate_s_objects(args.n, args.rank, args.w)
    ok = census.bijection_holds and census.faces_valid
    payload = census.to_json()
    if census.samples:
        payload["markdown"] = census.samples[-1].to_markdown()
    return CommandReport("sconstr-count", {}, _status(ok), payload,
                         f"S_{args.n}: {census.count_free} staircases of free modules, "
                         f"{census.count_eset} of pointed E-sets")


# ---------------------------------------------------------------------------


def _w_arg(text: str) -> int:
    w = int(text)
    if w not in (1, 2, 4):
        raise argparse.ArgumentTypeError("W must be 1, 2 or 4 (roots of unity in Q or Q(i))")
    return w


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="octak", description="Exact checks for K-theory of archimedean valuation rings.",
                                epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_, epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--md", action="store_true", help="markdown output")
        sp.set_defaults(func=fn)
        return sp

    sp = add("check-cofib", cmd_check_cofib, "decide whether a matrix is a cofibration")
    sp.add_argument("--field", default="Q")
    sp.add_argument("--matrix", required=True)
    sp = add("split", cmd_split, "splitting isomorphism of a cofibration")
    sp.add_argument("--field", default="Q")
    sp.add_argument("--matrix", required=True)
    sp = add("pushout", cmd_pushout, "cobase change of a cofibration along a map")
    sp.add_argument("--field", default="Q")
    sp.add_argument("--cofib", required=True)
    sp.add_argument("--map", required=True)
    for name, fn, h in (("gl-ab", cmd_gl_ab, "abelianization of mu_W wr S_N"),
                        ("perfect", cmd_perfect, "is the commutator subgroup perfect")):
        sp = add(name, fn, h)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--w", type=_w_arg, default=2)
    sp = add("commutator-table", cmd_commutator_table, "check the [tau_i, f_j] table")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--w", type=_w_arg, default=2)
    add("k0-finf", cmd_k0_finf, "K_0 of the residue field at infinity")
    sp = add("faces", cmd_faces, "faces of the octahedron, optionally a projector image")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--pattern")
    sp = add("k0-reduce", cmd_k0_reduce, "reduce an idempotent sign pattern to copies of F_inf")
    sp.add_argument("--pattern", required=True)
    sp = add("k-groups", cmd_k_groups, "K_0, K_1, K_2 descriptors")
    sp.add_argument("--field", default="Q")
    sp.add_argument("--max-degree", type=int, default=2)
    sp = add("ah-table", cmd_ah_table, "Atiyah-Hirzebruch E2 page for B mu_W")
    sp.add_argument("--w", type=int, required=True)
    sp.add_argument("--pmax", type=int, default=2)
    sp.add_argument("--qmax", type=int, default=2)
    sp = add("pythag-factor", cmd_pythag_factor, "factor a norm-one element of Q(i)")
    sp.add_argument("--field", default="Q(i)")
    sp.add_argument("--x", required=True)
    sp = add("sconstr-count", cmd_sconstr_count, "count S_n objects on both sides of the bijection")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--w", type=_w_arg, default=2)
    return p


def run(argv: list[str]) -> tuple[CommandReport, bool]:
    """Parse and dispatch; returns the report and whether markdown was requested."""
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "md", "command") and v is not None}
    try:
        report = args.func(args)
    except (ParseError, UnsupportedDegree, UnsupportedStem, BudgetExceeded, NotAModuleVector, DimensionMismatch,
            ValueError) as exc:
        report = CommandReport(args.command, {}, "usage", {"error": type(exc).__name__}, str(exc))
    except PrecisionExhausted as exc:
        report = CommandReport(args.command, {}, "undecided", {"error": "PrecisionExhausted", "bits": exc.bits},
                               str(exc))
    except OctakError as exc:
        report = CommandReport(args.command, {}, "fail", {"error": type(exc).__name__}, str(exc))
    report.inputs = inputs
    return report, args.md


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        report, md = run(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    out = report.render_markdown() if md else report.render_json()
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    if report.status == "usage":
        sys.stderr.write(f"octak {report.command}: {report.summary}\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
