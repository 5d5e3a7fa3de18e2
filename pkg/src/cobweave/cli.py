"""Command line driver: every pipeline as a subcommand, reports as JSON lines.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or input error,
3 a size or search budget was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FsPath

from . import fixtures
from .automata import (Fsa, InputError, Psa, accepts, as_word, enumerate_language,
                       machine_from_json, show)
from .boolsemi import BoolMat, BudgetExceeded, SizeError
from .catauto import (BoundError, CatFsa, CatTransducer, arrow_language, cat_apply,
                      cat_naturality_check, catfsa_from_json, cattransducer_from_json,
                      check_finitary, check_ulf, encode_fsa, encode_transducer, t_phi)
from .cobordism import diagram_from_json, diagram_to_json, floating_line
from .operad import (CfGrammar, cs_factorize, epsilon_cycles, grammar_from_json,
                     grammar_naturality_check, grammar_transduce, language_of_arrows,
                     operadic_eval)
from .subregular import cohomology, k_factors, nilpotency_report, sl_check
from .tqft import check_naturality
from .transducers import Transducer, apply, compose, transducer_from_json

BUILTIN = {
    "ab": fixtures.ab_fixture,
    "even": fixtures.even_length,
    "dyck": fixtures.dyck_psa,
    "c_to_ab": fixtures.c_to_ab,
    "identity_ab": lambda: Transducer.identity(("A", "B")),
    "ab-cat": lambda: encode_fsa(fixtures.ab_fixture()),
    "c_to_ab-cat": lambda: _cat_transducer(fixtures.c_to_ab()),
    "dyck-grammar": fixtures.dyck_grammar,
    "ab-grammar": fixtures.ab_grammar,
    "floating-ABAB": lambda: floating_line("ABAB"),
}


def _cat_transducer(t: Transducer) -> CatTransducer:
    return encode_transducer(t.alpha, t.beta, t.alpha.target, t.beta.target)


class UsageError(Exception):
    pass


def _read(ref: str):
    """Parsed JSON from a file, or a built-in object named fixture:NAME."""
    if ref.startswith("fixture:"):
        name = ref.split(":", 1)[1]
        if name not in BUILTIN:
            raise UsageError(f"unknown fixture {name!r}; known: {', '.join(sorted(BUILTIN))}")
        return BUILTIN[name]()
    path = FsPath(ref)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"{ref}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{ref}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _load(ref: str, what: str):
    obj = _read(ref)
    if not isinstance(obj, dict):
        return obj
    try:
        if what == "machine":
            if "species" in obj:
                return grammar_from_json(obj)
            if "tau" in obj:
                return catfsa_from_json(obj)
            return machine_from_json(obj)
        if what == "transducer":
            if "left" in obj:
                return cattransducer_from_json(obj)
            return transducer_from_json(obj)
        if what == "diagram":
            return diagram_from_json(obj)
        if what == "grammar":
            return grammar_from_json(obj)
    except InputError as exc:
        raise InputError(f"{ref}: {exc}") from exc
    raise UsageError(f"cannot read {what} from {ref}")


def _expect(obj, kinds, ref: str, what: str):
    if not isinstance(obj, kinds):
        raise UsageError(f"{ref} is not a {what}")
    return obj


def _word(text: str | None):
    if text is None:
        return None
    # comma separated when letters are longer than one character
    if "," in text:
        return tuple(x for x in text.split(",") if x)
    return as_word(text)


def _words(ws) -> list:
    return sorted((show(w) for w in ws), key=lambda s: (len(s), s))


def _join(labels) -> str:
    labels = [str(x) for x in labels]
    return "".join(labels) if all(len(x) == 1 for x in labels) else ",".join(labels)


def _path_words(paths) -> list:
    return sorted((_join(p.labels) for p in paths), key=lambda s: (len(s), s))


def _matrix(m: BoolMat) -> dict:
    return {"rows": m.rows, "cols": m.cols, "entries": [[int(x) for x in r] for r in m.tolist()]}


def cmd_accept(args) -> tuple:
    m = _load(args.machine, "machine")
    w = _word(args.word) or ()
    if isinstance(m, (Fsa, Psa)):
        ok = accepts(m, w)
    elif isinstance(m, CatFsa):
        ok = any(p.labels == tuple(w) for p in arrow_language(m, len(w)))
    elif isinstance(m, CfGrammar):
        ok = any(p.labels == tuple(w) for p in language_of_arrows(m, len(w)))
    else:
        raise UsageError(f"{args.machine} is not a machine")
    return [{"check": "accept", "word": show(str(x) for x in w), "accepted": ok}], True


def cmd_eval(args) -> tuple:
    m = _load(args.machine, "machine")
    d = _load(args.diagram, "diagram")
    fills = {}
    if args.fill:
        raw = _read(args.fill)
        if not isinstance(raw, dict):
            raise UsageError(f"{args.fill} must map hole names to diagrams")
        fills = {k: diagram_from_json(v) for k, v in raw.items()}
    out = operadic_eval(m, d, fills)
    if isinstance(out, BoolMat):
        return [{"check": "eval", "matrix": _matrix(out)}], True
    return [{"check": "eval", "residual": diagram_to_json(out),
             "holes": [h.name for h in out.holes()]}], True


def cmd_apply(args) -> tuple:
    t = _load(args.transducer, "transducer")
    m = _load(args.machine, "machine")
    if isinstance(t, CatTransducer):
        if isinstance(m, CfGrammar):
            g = grammar_transduce(t, m)
            return [{"check": "apply", "grammar": g.to_json(),
                     "language": _path_words(language_of_arrows(g, args.bound))}], True
        out = cat_apply(t, _expect(m, CatFsa, args.machine, "categorical automaton"))
        return [{"check": "apply", "automaton": out.to_json(),
                 "language": _path_words(arrow_language(out, args.bound))}], True
    out = apply(t, _expect(m, (Fsa, Psa), args.machine, "word automaton"))
    return [{"check": "apply", "automaton": out.to_json(),
             "language": _words(enumerate_language(out, args.bound))}], True


def cmd_compose(args) -> tuple:
    t2 = _expect(_load(args.second, "transducer"), Transducer, args.second, "word transducer")
    t1 = _expect(_load(args.first, "transducer"), Transducer, args.first, "word transducer")
    t = compose(t2, t1)
    records = [{"check": "compose", "transducer": t.to_json()}]
    ok = True
    if args.machine:
        m = _expect(_load(args.machine, "machine"), (Fsa, Psa), args.machine, "word automaton")
        fused = set(enumerate_language(apply(t, m), args.bound))
        stepwise = set(enumerate_language(apply(t2, apply(t1, m)), args.bound))
        ok = fused == stepwise
        records.append({"check": "compose-agrees", "passed": ok, "bound": args.bound,
                        "only_fused": _words(fused - stepwise),
                        "only_stepwise": _words(stepwise - fused)})
    return records, ok


def cmd_naturality(args) -> tuple:
    t = _load(args.transducer, "transducer")
    m = _load(args.machine, "machine")
    if isinstance(t, Transducer):
        rep = check_naturality(t, _expect(m, Fsa, args.machine, "finite automaton"))
        records = [dict(sq, check="square") for sq in rep.squares]
        records += [dict(n, check="note") for n in rep.notes]
    elif isinstance(m, CfGrammar):
        rep = grammar_naturality_check(t, m, size_bound=args.bound)
        records = [dict(sq, check="square") for sq in rep.squares]
    else:
        rep = cat_naturality_check(t, _expect(m, CatFsa, args.machine, "categorical automaton"))
        records = [dict(sq, check="square") for sq in rep.squares]
    return records, rep.ok


def cmd_subregular(args) -> tuple:
    m = _expect(_load(args.machine, "machine"), Fsa, args.machine, "finite automaton")
    fs = k_factors(m, args.k, markers=args.markers)
    records = [{"check": "factors", "k": args.k, "markers": args.markers, "factors": fs.strings(),
                "short_words": _words(fs.short_words)},
               {"check": "strictly-local", "k": args.k, "holds": sl_check(m, args.k)}]
    for e in nilpotency_report(m, args.k):
        records.append({"check": "nilpotency", "first": show(e.first), "second": show(e.second),
                        "is_zero": e.is_zero, "reversed_is_zero": e.reversed_is_zero})
    if args.ker is not None or args.im is not None:
        rep = cohomology(m, _word(args.ker or ""), _word(args.im or ""))
        records.append({"check": "cohomology", "ker": rep.ker_size, "im": rep.im_size,
                        "quotient": rep.quotient_size, "im_in_ker": rep.im_in_ker,
                        "representatives": [[int(x) for x in v.tolist()[0]] if v.rows == 1 else
                                            [int(r[0]) for r in v.tolist()]
                                            for v in rep.class_representatives]})
    return records, True


def cmd_cat(args) -> tuple:
    m = _expect(_load(args.machine, "machine"), CatFsa, args.machine, "categorical automaton")
    fin = check_finitary(m.tau, args.bound)
    ulf = check_ulf(m.tau, args.bound)
    records = [{"check": "finitary", **fin.to_json()}, {"check": "ulf", **ulf.to_json()}]
    if not fin:
        return records, False
    records.append({"check": "arrow-language", "bound": args.bound,
                    "arrows": _path_words(arrow_language(m, args.bound))})
    if args.word is not None:
        labels = _word(args.word)
        path = m.base_cat.path_of(labels)
        records.append({"check": "path-operator", "path": _join(labels),
                        "basis": [str(x) for x in m.states_cat.objects],
                        "matrix": _matrix(t_phi(m, path, max(args.bound, len(path))))})
    ok = True
    if args.transducer:
        t = _expect(_load(args.transducer, "transducer"), CatTransducer, args.transducer,
                    "categorical transducer")
        out = cat_apply(t, m)
        records.append({"check": "apply", "arrows": _path_words(arrow_language(out, args.bound))})
        rep = cat_naturality_check(t, m)
        records += [dict(sq, check="square") for sq in rep.squares]
        ok = rep.ok
    return records, ok


def cmd_grammar(args) -> tuple:
    g = _expect(_load(args.grammar, "grammar"), CfGrammar, args.grammar, "grammar")
    records = [{"check": "grammar", "chromatic": g.is_chromatic(),
                "epsilon_cycles": [str(c) for c in epsilon_cycles(g)]},
               {"check": "language", "bound": args.bound,
                "arrows": _path_words(language_of_arrows(g, args.bound))}]
    ok = True
    if args.transducer:
        t = _expect(_load(args.transducer, "transducer"), CatTransducer, args.transducer,
                    "categorical transducer")
        out = grammar_transduce(t, g)
        records.append({"check": "transduced-language", "bound": args.bound,
                        "arrows": _path_words(language_of_arrows(out, args.bound))})
        rep = grammar_naturality_check(t, g, size_bound=max(args.k, 1) * 2)
        records += [dict(sq, check="square") for sq in rep.squares]
        ok = rep.ok
    return records, ok


def cmd_cs(args) -> tuple:
    g = _expect(_load(args.grammar, "grammar"), CfGrammar, args.grammar, "grammar")
    try:
        cs = cs_factorize(g, args.k)
    except AssertionError as exc:
        return [{"check": "triangle", "passed": False, "detail": str(exc)}], False
    original = language_of_arrows(g, args.bound)
    transduced = language_of_arrows(grammar_transduce(cs.transducer, cs.contour_grammar), args.bound)
    agree = {p.labels for p in original} == {p.labels for p in transduced}
    return [{"check": "triangle", "passed": True, "depth": args.k, "trees": cs.trees_checked},
            {"check": "relabel", "colors": {str(c): [str(x) for x in pair]
                                            for c, pair in cs.relabel.items()}},
            {"check": "contour-functor", **cs.functor.to_json()},
            {"check": "languages-agree", "passed": agree, "bound": args.bound,
             "arrows": _path_words(original)}], agree


def cmd_suite(args) -> tuple:
    from .suite import run_suite
    only = None
    if args.criteria:
        try:
            only = {int(x) for x in args.criteria.split(",")}
        except ValueError as exc:
            raise UsageError("--criteria takes comma separated numbers") from exc
    results = run_suite(args.seed, only)
    for r in results:
        budget = "" if r.within_budget else f" (over the {r.budget:g}s budget)"
        print(f"criterion {r.number}: {'exact' if r.exact else 'FAILED'} "
              f"in {r.seconds:.2f}s{budget}  {r.title}", file=sys.stderr)
    # timings vary between runs, so the report and the exit code depend on exactness only
    records = []
    for r in results:
        rec = r.to_json(timings=args.timings)
        rec["passed"] = r.exact
        records.append(rec)
    return records, all(r.exact for r in results)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cobweave", description=__doc__.splitlines()[0])
    p.add_argument("--out", help="write the JSON-lines report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(fn=fn)
        sp.add_argument("--out", default=argparse.SUPPRESS,
                        help="write the JSON-lines report here instead of stdout")
        return sp

    sp = add("accept", cmd_accept, "decide membership of a word")
    sp.add_argument("machine")
    sp.add_argument("--word", default="")

    sp = add("eval", cmd_eval, "evaluate a cobordism diagram")
    sp.add_argument("machine")
    sp.add_argument("diagram")
    sp.add_argument("--fill", help="JSON object mapping hole names to diagrams")

    sp = add("apply", cmd_apply, "apply a transducer to an automaton or grammar")
    sp.add_argument("transducer")
    sp.add_argument("machine")
    sp.add_argument("--bound", type=int, default=8)

    sp = add("compose", cmd_compose, "compose two transducers (second after first)")
    sp.add_argument("second")
    sp.add_argument("first")
    sp.add_argument("--machine", help="also compare against stepwise application")
    sp.add_argument("--bound", type=int, default=6)

    sp = add("check-naturality", cmd_naturality, "check naturality squares")
    sp.add_argument("transducer")
    sp.add_argument("machine")
    sp.add_argument("--bound", type=int, default=6, help="tree size bound for grammars")

    sp = add("subregular", cmd_subregular, "k-factors, strict locality, nilpotency")
    sp.add_argument("machine")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--markers", action="store_true")
    sp.add_argument("--ker", help="word whose operator kernel is taken")
    sp.add_argument("--im", help="word whose operator image is divided out")

    sp = add("cat", cmd_cat, "categorical automaton checks")
    sp.add_argument("machine")
    sp.add_argument("--bound", type=int, default=6)
    sp.add_argument("--word", help="base path labels for a path operator")
    sp.add_argument("--transducer")

    sp = add("grammar", cmd_grammar, "grammar language and transduction")
    sp.add_argument("grammar")
    sp.add_argument("--bound", type=int, default=8)
    sp.add_argument("--k", type=int, default=3, help="tree size bound is twice this")
    sp.add_argument("--transducer")

    sp = add("cs-factorize", cmd_cs, "factor a grammar through its tree-contour grammar")
    sp.add_argument("grammar")
    sp.add_argument("--k", type=int, default=3, help="tree depth for the triangle check")
    sp.add_argument("--bound", type=int, default=8)

    sp = add("suite", cmd_suite, "run the property suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--criteria", help="comma separated criterion numbers")
    sp.add_argument("--timings", action="store_true", help="include run times in the report")
    return p


def _default(x):
    if isinstance(x, (set, frozenset)):
        return sorted(map(str, x))
    if isinstance(x, tuple):
        return list(x)
    return str(x)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    for name in ("bound", "k"):
        if getattr(args, name, 1) is not None and getattr(args, name, 1) < 1:
            print(f"error: --{name} must be positive", file=sys.stderr)
            return 2
    try:
        records, ok = args.fn(args)
    except (UsageError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BudgetExceeded, SizeError, BoundError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    lines = "".join(json.dumps(r, sort_keys=True, ensure_ascii=False, default=_default) + "\n"
                    for r in records)
    if args.out:
        FsPath(args.out).write_text(lines)
    else:
        sys.stdout.write(lines)
    failed = [r for r in records if r.get("commutes") is False or r.get("passed") is False]
    print(f"{args.command}: {len(records)} records, {len(failed)} failed", file=sys.stderr)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
