"""Command-line front end.

Exit codes: 0 Yes (or success), 1 No, 2 Unknown, 64 usage error,
65 bad input (parse errors, inputs outside an operation's domain),
70 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

from . import canonical as K
from . import classify as Q
from . import flux as F
from . import oracle as OR
from . import poset as P
from . import semantics as M
from . import signature as S
from .ordinal import OrdinalSyntaxError

EX_USAGE, EX_DATAERR, EX_SOFTWARE = 64, 65, 70
_CODES = {"Yes": 0, "No": 1, "Unknown": 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


# -- JSON helpers --------------------------------------------------------------------


def ast_json(node):
    if isinstance(node, S.Rose):
        return {"node": "Rose", "k": node.k}
    if isinstance(node, S.CantorTree):
        return {"node": "CantorTree"}
    if isinstance(node, S.Ord):
        from .ordinal import Ordinal, expr_str
        a = node.alpha
        return {"node": "Ord", "alpha": str(a) if isinstance(a, Ordinal) else expr_str(a)}
    if isinstance(node, S.Genus):
        return {"node": "Genus", "inner": ast_json(node.inner)}
    if isinstance(node, S.Wedge):
        return {"node": "Wedge", "parts": [ast_json(p) for p in node.parts]}
    if isinstance(node, S.Conv):
        return {"node": "Conv", "family": family_json(node.family), "base": ast_json(node.base)}
    return family_json(node)


def family_json(f):
    if isinstance(f, S.Const):
        return {"family": "Const", "member": ast_json(f.y)}
    if isinstance(f, S.Param):
        return {"family": "Param", "template": ast_json(f.template)}
    if isinstance(f, S.Accum):
        return {"family": "Accum", "gen": family_json(f.gen)}
    if isinstance(f, S.Stride):
        return {"family": "Stride", "k": f.k, "r": f.r, "inner": family_json(f.inner)}
    if isinstance(f, S.WedgeFam):
        return {"family": "WedgeFam", "a": family_json(f.a), "b": family_json(f.b)}
    return {"family": "Prefix", "head": [ast_json(h) for h in f.head], "tail": family_json(f.tail)}


def _mult(m):
    return m if isinstance(m, str) else int(m)


def types_json(sig):
    return [{"structure": z.text(), "type": M.describe(z.top), "multiplicity": _mult(m),
             "maxKind": z.max_kind, "genusMark": z.genus_mark}
            for z, m in P.maximal_end_types(sig)]


# -- command implementations ------------------------------------------------------------
# Each returns (payload, exit code).


def cmd_parse(a, sig):
    return {"expr": a.expr, "text": S.to_text(sig), "ast": ast_json(sig)}, 0


def cmd_normalize(a, sig):
    trace = [] if a.trace else None
    nf = K.normalize(sig, trace)
    out = {"input": S.to_text(sig), "normalForm": S.to_text(nf)}
    if trace is not None:
        out["trace"] = trace
    return out, 0


def cmd_stable(a, sig):
    st = K.is_stable(sig)
    code = {"Stable": 0, "Unstable": 1}.get(st.status, 2)
    return st.to_json(), code


def cmd_self_similar(a, sig):
    v = K.is_self_similar(sig)
    return v.to_json(), _CODES[v.answer]


def cmd_decompose(a, sig):
    comps = K.wedge_decomposition(sig)
    return {"components": [{"sig": S.to_text(c.sig), "type": None if c.top is None else M.describe(c.top)}
                           for c in comps]}, 0


def cmd_endspace(a, sig):
    return M.char_pair(sig).to_json(), 0


def cmd_genus(a, sig):
    g = M.genus_class(sig)
    out = {"genus": g.to_json()}
    # finite genus under a convergence depends on how base vertices are counted
    if g.kind == "Finite" and any(isinstance(t, S.Conv) for t in S.subterms(sig)):
        out["vertexModel"] = "canonical"
    return out, 0


def cmd_max_ends(a, sig):
    return {"types": types_json(sig)}, 0


def cmd_compare(a, x, y):
    fwd, back = P.leq(x, y).answer, P.leq(y, x).answer
    if fwd == back == "Yes":
        rel = "Equal"
    elif fwd == "Yes":
        rel = "Less"
    elif back == "Yes":
        rel = "Greater"
    elif fwd == back == "No":
        rel = "Incomparable"
    else:
        rel = "Unknown"
    return {"answer": fwd, "relation": rel, "forward": fwd, "backward": back}, _CODES[fwd]


def cmd_embeds(a, x, y):
    v = P.clopen_embeds(x, y)
    return v.to_json(), _CODES[v.answer]


def cmd_successor(a, sig):
    out = P.immediate_successor(sig, a.kind)
    return {"input": S.to_text(sig), "kind": a.kind, "result": S.to_text(out)}, 0


def cmd_mub(a, *sigs):
    out = P.minimal_upper_bound(list(sigs), a.kind)
    return {"inputs": [S.to_text(s) for s in sigs], "kind": a.kind, "result": S.to_text(out)}, 0


def cmd_gcd(a, sig):
    w = Q.gcd_witness_search(sig)
    return {"found": w is not None, "witness": None if w is None else w.to_json()}, 0 if w else 1


def _verdict_out(v, trace):
    out = v.to_json()
    if not trace:
        out.pop("trace", None)
    return out, _CODES[v.answer]


def cmd_classify_maps(a, sig):
    return _verdict_out(Q.classify_maps(sig), a.trace)


def cmd_classify_homeo(a, sig):
    return _verdict_out(Q.classify_homeo(sig), a.trace)


def cmd_iso(a, x, y):
    v = K.isomorphic(x, y)
    return v.to_json(), _CODES[v.answer]


def _model(spec):
    fixtures = {"decorated-spine": F.DECORATED_SPINE, "unit-density": F.UNIT_DENSITY}
    if spec in fixtures:
        return fixtures[spec]
    return F.load_model(spec)


def cmd_flux(a):
    model = _model(a.model)
    out = {"model": model.to_json()}
    if a.cork:
        m, n = a.cork
        out["cork"] = F.cork(model, F.X(m), F.X(n))
        return out, 0
    f = F.parse_action(a.action or "shift:0")
    F.validate(model, f)
    n = a.n
    m = F.least_admissible(model, f, n)
    out.update({"action": a.action or "shift:0", "m": m, "n": n, "flux": F.phi(model, f, m, n)})
    return out, 0


def cmd_oracle(a, *sigs):
    op = a.op
    if op == "endspace":
        xi = OR.end_space_ordinal(sigs[0])
        return {"xi": str(xi)}, 0
    if op == "cb":
        alpha, n = OR.ms_via_oracle(sigs[0])
        return {"alpha": str(alpha), "n": n}, 0
    if op == "rank":
        ok = OR.type_rank_check(sigs[0], sigs[1])
        return {"answer": "Yes" if ok else "No"}, 0 if ok else 1
    res = OR.small_embed_check(sigs[0], sigs[1], a.depth)
    return {"answer": res}, {"Yes": 0, "No": 1}.get(res, 2)


# -- atlas ----------------------------------------------------------------------------------


def atlas_entries():
    text = resources.files("endcalc").joinpath("data/atlas.json").read_text(encoding="utf-8")
    return json.loads(text)


def check_entry(e):
    """Failures (as strings) of one atlas entry and the modules it touched."""
    failures, used = [], {"cli"}

    def expect(key, got, want):
        if got != want:
            failures.append(f"{key}: expected {want!r}, got {got!r}")

    if "expr" in e:
        sig = S.parse(e["expr"])
        used |= {"signature", "ordinal"}
        for key, spec in e["expected"].items():
            want = spec["value"]
            if key == "classify-maps" or key == "classify-homeo":
                v = (Q.classify_maps if key == "classify-maps" else Q.classify_homeo)(sig)
                used |= {"classify", "poset", "canonical", "semantics"}
                got = {"answer": v.answer}
                if "theorem" in want:
                    got["theorem"] = v.theorem
                if "category" in want:
                    got["category"] = v.category
                expect(key, got, want)
            elif key == "stable":
                used.add("canonical")
                expect(key, K.is_stable(sig).status, want)
            elif key == "self-similar":
                used.add("canonical")
                expect(key, K.is_self_similar(sig).answer, want)
            elif key == "normalize":
                used.add("canonical")
                expect(key, S.to_text(K.normalize(sig)), want)
            elif key == "genus":
                used.add("semantics")
                expect(key, M.genus_class(sig).to_json(), want)
            elif key == "msForm":
                used |= {"semantics", "oracle"}
                alpha, n = M.ms_form(sig)
                expect(key, {"alpha": str(alpha), "n": n}, want)
                oa, on = OR.ms_via_oracle(sig)
                expect("oracle msForm", {"alpha": str(oa), "n": on}, want)
            elif key == "max-ends":
                used.add("poset")
                got = [[z.text(), _mult(m)] for z, m in P.maximal_end_types(sig)]
                expect(key, sorted(map(str, got)), sorted(map(str, want)))
            else:
                failures.append(f"unknown expectation {key}")
    if "model" in e:
        used.add("flux")
        model = F.model_from_json(e["model"])
        for key, spec in e["expected"].items():
            if key == "cork":
                for m, n, want in spec["value"]:
                    expect(f"cork({m},{n})", F.cork(model, F.X(m), F.X(n)), want)
            elif key in ("flux", "flux-derived"):
                for action, want in spec["value"]:
                    expect(f"flux({action})", F.flux_value(model, F.parse_action(action)), want)
            else:
                failures.append(f"unknown expectation {key}")
    return failures, used


def cmd_atlas(a):
    entries = atlas_entries()
    if not a.check:
        return {"entries": [{"name": e["name"], "expr": e.get("expr"), "note": e.get("note", "")}
                            for e in entries]}, 0
    report, modules = [], set()
    for e in entries:
        try:
            fails, used = check_entry(e)
        except Exception as exc:  # an atlas entry must never crash the whole check
            fails, used = [f"error: {exc}"], set()
        modules |= used
        report.append({"name": e["name"], "ok": not fails, "failures": fails})
    passed = all(r["ok"] for r in report)
    return {"passed": passed, "entries": report, "modules": sorted(modules)}, 0 if passed else 1


# -- argument handling ------------------------------------------------------------------


_SINGLE = {
    "parse": cmd_parse, "normalize": cmd_normalize, "stable": cmd_stable,
    "self-similar": cmd_self_similar, "decompose": cmd_decompose, "endspace": cmd_endspace,
    "genus": cmd_genus, "max-ends": cmd_max_ends, "types": cmd_max_ends, "successor": cmd_successor,
    "gcd": cmd_gcd, "classify-maps": cmd_classify_maps, "classify-homeo": cmd_classify_homeo,
}
_PAIR = {"compare": cmd_compare, "embeds": cmd_embeds, "iso": cmd_iso}


def _global_options(suppress):
    # repeated on every subcommand; there the defaults are suppressed so that
    # options given before the subcommand survive
    opts = argparse.ArgumentParser(add_help=False)
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    opts.add_argument("--json", action="store_true", help="machine-readable output", **kw)
    opts.add_argument("--trace", action="store_true", help="include rewrite or decision traces", **kw)
    opts.add_argument("--jobs", type=int, help="worker processes for batch input",
                      **(kw or {"default": 1}))
    return opts


def build_parser():
    common = _global_options(suppress=True)
    p = _Parser(prog="endcalc", description="End-space calculus for locally finite graphs.",
                parents=[_global_options(suppress=False)])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in _SINGLE:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("expr", help="signature expression, or '-' to read one per line from stdin")
        if name == "successor":
            sp.add_argument("--kind", choices=["one", "cantor"], default="one")
    for name in _PAIR:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("expr")
        sp.add_argument("other")
    sp = sub.add_parser("mub", parents=[common])
    sp.add_argument("exprs", nargs="+")
    sp.add_argument("--kind", choices=["one", "cantor"], default="one")
    sp = sub.add_parser("flux", parents=[common])
    sp.add_argument("--model", required=True, help="JSON model file or fixture name (decorated-spine, unit-density)")
    sp.add_argument("--action", help="shift:<k>[;swap:p.j,q.k;...]")
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--cork", type=int, nargs=2, metavar=("M", "N"), help="print cork(X_M, X_N)")
    sp = sub.add_parser("oracle", parents=[common])
    sp.add_argument("op", choices=["endspace", "cb", "rank", "embed"])
    sp.add_argument("exprs", nargs="+")
    sp.add_argument("--depth", type=int, default=6)
    sp = sub.add_parser("atlas", parents=[common])
    sp.add_argument("--check", action="store_true")
    return p


def _run_one(command, args, texts):
    sigs = [S.parse(t) for t in texts]
    if command in _SINGLE:
        return _SINGLE[command](args, *sigs)
    if command in _PAIR:
        return _PAIR[command](args, *sigs)
    if command == "mub":
        return cmd_mub(args, *sigs)
    return cmd_oracle(args, *sigs)


def _line_job(job):
    command, args, line = job
    try:
        return _run_one(command, args, [line])
    except (S.ParseError, OrdinalSyntaxError) as exc:
        return _error_payload(exc), EX_DATAERR


def _error_payload(exc):
    out = {"error": str(exc)}
    if hasattr(exc, "offset"):
        out["offset"] = exc.offset
        out["expected"] = list(getattr(exc, "expected", ()))
    return out


def render(payload) -> str:
    if "answer" in payload and "theorem" in payload:
        s = f"{payload['answer']} ({payload['theorem']})"
        if payload.get("category") is not None:
            s += f" category {payload['category']}"
        return s
    lines = []
    for k, v in payload.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v, ensure_ascii=False)
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def emit(payload, as_json, stream=None):
    stream = stream or sys.stdout
    if as_json:
        print(json.dumps(payload, ensure_ascii=False, sort_keys=True), file=stream)
    else:
        print(render(payload), file=stream)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command
    try:
        if cmd == "flux":
            payload, code = cmd_flux(args)
        elif cmd == "atlas":
            payload, code = cmd_atlas(args)
        else:
            texts = ([args.expr] if cmd in _SINGLE else
                     [args.expr, args.other] if cmd in _PAIR else list(args.exprs))
            if cmd in _SINGLE and args.expr == "-":
                lines = [ln.strip() for ln in sys.stdin if ln.strip()]
                jobs = [(cmd, args, ln) for ln in lines]
                if args.jobs > 1:
                    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                        results = list(pool.map(_line_job, jobs))
                else:
                    results = [_line_job(j) for j in jobs]
                worst = 0
                for (payload, code), ln in zip(results, lines):
                    payload = {"input": ln, **payload} if args.json else payload
                    emit(payload, args.json)
                    worst = max(worst, code)
                return worst
            payload, code = _run_one(cmd, args, texts)
    except (S.ParseError, OrdinalSyntaxError) as exc:
        emit(_error_payload(exc), args.json, sys.stderr)
        return EX_DATAERR
    except (K.NotDecomposable, P.NotLocalStructure, F.ModelError, M.Uncountable,
            M.EmptyEndSpace, OR.OracleError, OSError, ValueError) as exc:
        emit({"error": str(exc)}, args.json, sys.stderr)
        return EX_DATAERR
    except Exception as exc:  # anything else is a bug
        emit({"error": f"internal error: {exc!r}"}, args.json, sys.stderr)
        return EX_SOFTWARE
    emit(payload, args.json)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
