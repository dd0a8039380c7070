"""Command-line front end: ``dgformal <command> [options] INPUT``."""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .dga import DGAlgebra, cohomology, validate
from .document import DocumentError, from_algebra, parse, read_source
from .errors import DGFormalError, InputError, InvariantError
from .parallel import worker_count
from .report import Report
from .scalars import QQ, DomainKind

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class _Fail(Exception):
    def __init__(self, code, message, payload=None):
        super().__init__(message)
        self.code, self.message, self.payload = code, message, payload


def _load(path: str, need_valid: bool = True) -> DGAlgebra:
    try:
        text, name = read_source(path)
    except InputError as exc:
        raise _Fail(EXIT_INPUT, str(exc)) from None
    result = parse(text)
    if not result.ok:
        raise _Fail(EXIT_INPUT, f"{name}: invalid document",
                    {"diagnostics": [d.to_json() for d in result.diagnostics]})
    try:
        A = result.document.to_algebra()
    except DGFormalError as exc:
        raise _Fail(EXIT_INPUT, f"{name}: {exc}") from None
    if need_valid:
        check = A.with_domain(A.domain.field) if A.domain.kind is DomainKind.POLY_T else A
        report = validate(check)
        if not report.ok:
            raise _Fail(EXIT_INPUT, f"{name}: not a DG algebra", report.to_json())
    return A


def _over_field(A: DGAlgebra, notes: list) -> DGAlgebra:
    if A.domain.is_field:
        return A
    notes.append("structure constants in QQ[t]; computing over QQ(t) (generic fiber)")
    return A.with_domain(A.domain.field)


def _fmt_vec(A: DGAlgebra, vec: dict) -> dict:
    return {A.names[k]: A.domain.format(c) for k, c in sorted(vec.items())}


# -- commands -------------------------------------------------------------------


def cmd_validate(args):
    A = _load(args.input, need_valid=False)
    check = A.with_domain(A.domain.field) if A.domain.kind is DomainKind.POLY_T else A
    rep = validate(check)
    payload = {"algebra": A.label, "dim": A.dim, "domain": A.domain.tag, **rep.to_json()}
    if not rep.ok:
        raise _Fail(EXIT_INPUT, f"{args.input}: {len(rep.violations)} violation(s)", payload)
    return payload, f"{A.label or args.input}: valid DG algebra of dimension {A.dim} over {A.domain.tag}"


def cmd_cohomology(args):
    notes = []
    A = _over_field(_load(args.input), notes)
    H = cohomology(A)
    Hb = H.algebra
    payload = {"betti": list(H.betti()),
               "classes": [{"name": n, "degree": d, "representative": _fmt_vec(A, H.representatives[i])}
                           for i, (n, d) in enumerate(zip(Hb.names, Hb.degrees))],
               "products": [[Hb.names[i], Hb.names[j], _fmt_vec(Hb, v)]
                            for (i, j), v in sorted(Hb.mult.items())
                            if Hb.unit not in (i, j)],
               "notes": notes}
    return payload, "Betti numbers: " + " ".join(map(str, H.betti()))


def cmd_gr(args):
    from .filtration import associated_graded

    A = _load(args.input)
    G = associated_graded(A, args.seed)
    B = G.algebra
    payload = {"weight_dims": {str(w): {str(d): n for d, n in v.items()} for w, v in G.weight_dims().items()},
               "basis": [{"name": B.names[i], "degree": B.degrees[i], "weight": B.weights[i],
                          "kind": G.kinds[i], "splitting": _fmt_vec(A, G.splitting[i])}
                         for i in range(B.dim)],
               "differential": [[B.names[i], _fmt_vec(B, v)] for i, v in sorted(B.diff.items())]}
    lines = [f"weight {w}: " + ", ".join(f"deg {d}: {n}" for d, n in v.items())
             for w, v in G.weight_dims().items()]
    return payload, "\n".join(lines)


def cmd_rees(args):
    from .filtration import rees_expansion

    A = _load(args.input)
    R = rees_expansion(A, args.seed)
    B = R.algebra
    payload = {"max_order": R.max_order, "trivial": R.is_trivial(),
               "d_terms": {str(l): [[B.names[i], _fmt_vec(B, v)] for i, v in sorted(t.items()) if v]
                           for l, t in sorted(R.d_terms.items()) if l},
               "m_terms": {str(l): [[B.names[i], B.names[j], _fmt_vec(B, v)]
                                    for (i, j), v in sorted(t.items()) if v]
                           for l, t in sorted(R.m_terms.items()) if l}}
    return payload, f"Rees expansion of order {R.max_order}" + (" (trivial)" if R.is_trivial() else "")


def cmd_hh(args):
    from .filtration import associated_graded
    from .hochschild import HochschildComplex, hh_table

    notes = []
    A = _over_field(_load(args.input), notes)
    G = associated_graded(A, args.seed)
    C = HochschildComplex(G, derived=not args.classical)
    degrees = [args.degree] if args.degree is not None else list(range(0, 5))
    weights = [args.weight] if args.weight is not None else list(range(-5, 1))
    table = hh_table(C, degrees, weights)
    rows = [{"n": n, "w": w, "dim": table[(n, w)], "cochains": C.slice(n, w).dim}
            for n in degrees for w in weights]
    payload = {"complex": "classical" if args.classical else "derived", "table": rows, "notes": notes}
    text = "\n".join(f"HH^{r['n']}_{r['w']} = {r['dim']}  ({r['cochains']} cochains)" for r in rows)
    return payload, text


def cmd_ks(args):
    from .formality import ks_cocycle

    notes = []
    A = _over_field(_load(args.input), notes)
    K = ks_cocycle(A, args.seed)
    payload = K.to_json()
    payload["notes"] = notes
    return payload, "Kodaira-Spencer cocycle: " + ("zero" if K.is_zero() else f"nonzero, order {K.max_order}") \
        + ", closed"


def cmd_obstruct(args):
    from .formality import obstruction_test

    if args.stage < 1:
        raise _Fail(EXIT_INPUT, "--stage must be at least 1")
    notes = []
    A = _over_field(_load(args.input), notes)
    rep = obstruction_test(A, args.stage, args.seed)
    # nested so the stage status does not collide with the report status
    return {"obstruction": rep.to_json(), "notes": notes}, f"stage {args.stage}: {rep.status}"


def cmd_certify(args):
    from .formality import certify

    if args.pmax < 1:
        raise _Fail(EXIT_INPUT, "--pmax must be at least 1")
    notes = []
    A = _over_field(_load(args.input), notes)
    v = certify(A, args.pmax, args.seed, massey=True)
    payload = v.to_json()
    payload["notes"] = payload["notes"] + notes
    stages = ", ".join(f"{r.stage}:{r.status}" for r in v.reports)
    return payload, f"verdict: {v.label()}  [stages {stages}]"


def cmd_massey(args):
    from .massey import massey_triple

    parts = [p.strip() for p in args.classes.split(",")]
    if len(parts) != 3 or not all(parts):
        raise _Fail(EXIT_INPUT, "--classes needs three comma-separated class names")
    notes = []
    A = _over_field(_load(args.input), notes)
    H = cohomology(A)
    r = massey_triple(H, *parts)
    product = r.to_json(H)
    payload = {"classes": parts, "product": product, "notes": notes}
    if r.defined:
        val = ", ".join(f"{c}*{n}" for n, c in product["value"].items()) or "0"
        text = f"<{', '.join(parts)}> = {val}" + ("  (nonzero modulo indeterminacy)" if r.nonzero else "")
    else:
        text = f"<{', '.join(parts)}> undefined: {r.reason}"
    return payload, text


def _point(text: str):
    try:
        return QQ.parse(text)
    except DGFormalError as exc:
        raise _Fail(EXIT_INPUT, f"bad rational point {text!r}: {exc}") from None


def cmd_fiber(args):
    from .family import fiber

    A = _load(args.input)
    c = _point(args.at)
    Fc = fiber(A, c)
    H = cohomology(Fc)
    payload = {"at": QQ.format(c), "betti": list(H.betti()), "document": from_algebra(Fc).to_json()}
    return payload, f"fiber at t={QQ.format(c)}: Betti numbers " + " ".join(map(str, H.betti()))


def cmd_flatness(args):
    from .family import flatness_check

    A = _load(args.input)
    rep = flatness_check(A)
    pts = ", ".join(QQ.format(c) for c in rep.exceptional_points) or "none"
    return rep.to_json(), f"flat: {'yes' if rep.flat else 'no'}; exceptional points: {pts}"


def cmd_scan(args):
    from .family import theorem_q_scan

    A = _load(args.input)
    pts = [_point(p.strip()) for p in args.points.split(",") if p.strip()]
    rep = theorem_q_scan(A, pts, args.pmax)
    payload = rep.to_json()
    timings = {"generic": rep.generic.seconds, **{QQ.format(p.point): p.seconds for p in rep.points}}
    lines = [f"hypotheses: {payload['dashboard']['hypotheses']}",
             f"generic: {rep.generic.verdict.label()}"]
    lines += [f"t={QQ.format(p.point)}: {p.verdict.label()}" for p in rep.points]
    return payload, "\n".join(lines), timings


COMMANDS = {
    "validate": (cmd_validate, "check the DG algebra identities"),
    "cohomology": (cmd_cohomology, "cohomology algebra with representatives"),
    "gr": (cmd_gr, "associated graded of the canonical filtration"),
    "rees": (cmd_rees, "higher terms of the Rees expansion"),
    "hh": (cmd_hh, "weight-graded Hochschild cohomology dimensions"),
    "ks": (cmd_ks, "Kodaira-Spencer cocycle of the Rees deformation"),
    "obstruct": (cmd_obstruct, "a single obstruction stage"),
    "certify": (cmd_certify, "formality verdict up to a stage bound"),
    "massey": (cmd_massey, "triple Massey product"),
    "fiber": (cmd_fiber, "specialize a family at t = c"),
    "flatness": (cmd_flatness, "flatness report of a family"),
    "scan": (cmd_scan, "fiberwise certification with hypothesis dashboard"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dgformal", description="Exact formality checks for DG algebras.")
    parser.add_argument("--version", action="version", version=f"dgformal {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="algebra document (path or shipped fixture name such as E1)")
        p.add_argument("--json", action="store_true", help="print the full report as JSON")
        p.add_argument("--output", "-o", help="write the full JSON report to this file")
        if name in ("gr", "rees", "hh", "ks", "obstruct", "certify"):
            p.add_argument("--seed", type=int, default=None, help="perturb the splitting (testing aid)")
        if name == "hh":
            p.add_argument("--degree", type=int)
            p.add_argument("--weight", type=int)
            p.add_argument("--classical", action="store_true", help="only components with q <= n")
        elif name == "obstruct":
            p.add_argument("--stage", type=int, required=True)
        elif name == "certify":
            p.add_argument("--pmax", type=int, default=5)
        elif name == "massey":
            p.add_argument("--classes", required=True, help="three classes, e.g. x1,x1,x2")
        elif name == "fiber":
            p.add_argument("--at", required=True)
        elif name == "scan":
            p.add_argument("--points", required=True, help="comma-separated rationals")
            p.add_argument("--pmax", type=int, default=3)
    return parser


def run(argv=None) -> tuple[int, Report]:
    """Parse arguments and execute; returns (exit code, report)."""
    return execute(build_parser().parse_args(argv))


def execute(args) -> tuple[int, Report]:
    command = {k: v for k, v in vars(args).items() if k not in ("json", "output")}
    start = time.perf_counter()
    code = EXIT_OK
    timings: dict = {}
    try:
        worker_count()
        fn = COMMANDS[args.command][0]
        out = fn(args)
        payload, text = out[0], out[1]
        if len(out) > 2:
            timings.update(out[2])
        status = "ok"
    except _Fail as exc:
        code = exc.code
        payload = {"error": exc.message, **(exc.payload or {})}
        text, status = exc.message, "error"
    except InvariantError as exc:
        code, payload, text, status = EXIT_INTERNAL, {"error": f"internal invariant failed: {exc}"}, \
            f"internal invariant failed: {exc}", "error"
    except DocumentError as exc:
        code = EXIT_INPUT
        payload = {"error": str(exc), "diagnostics": [d.to_json() for d in exc.diagnostics]}
        text, status = str(exc), "error"
    except DGFormalError as exc:
        code, payload, text, status = EXIT_INPUT, {"error": str(exc)}, str(exc), "error"
    payload = {"status": status, **payload}
    timings["total_seconds"] = round(time.perf_counter() - start, 6)
    return code, Report(command, payload, timings, __version__, summary=text)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:          # argparse prints usage and exits 2
        return int(exc.code or 0)
    code, report = execute(args)
    if args.json:
        sys.stdout.write(report.dumps())
    else:
        stream = sys.stdout if code == EXIT_OK else sys.stderr
        print(report.summary, file=stream)
        for d in report.payload.get("diagnostics", []):
            print(f"  {d['line']}:{d['column']}: {d['message']}", file=stream)
        for v in report.payload.get("violations", []):
            print(f"  {v['identity']} fails at ({', '.join(v['witness'])}): {v['detail']}", file=stream)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(report.dumps())
    return code


if __name__ == "__main__":
    sys.exit(main())
