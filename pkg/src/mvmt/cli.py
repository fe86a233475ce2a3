"""Command-line interface.

Reports are plain, line-oriented, and deterministic for fixed inputs; the
``--kv`` flag switches to machine-readable ``key=value`` lines.  Exit codes:
0 success or a true/holds outcome, 3 relation fails or not closed, 2 usage
error, 1 any other error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import fixtures
from .algebra import (
    CONJ,
    check_strong_conj_filter_law,
    find_conj_unit,
    is_integral,
    load_algebra,
)
from .backforth import (
    find_system_fixed,
    find_system_mixed,
    first_inextensible,
)
from .bridge import (
    FLAT,
    TD_OPTIMAL,
    canonical_sentence,
    gaifman_graph,
    is_boolean_model,
    n_core_bounded,
    n_maps_to,
    separating_sentence,
    translate,
    tree_depth,
)
from .errors import MvmtError, NoUnit
from .language import (
    ALL_CLASS_TAGS,
    EnumerationBounds,
    enumerate_sentences,
    format_formula,
    parse_formula,
    parse_language,
)
from .morphisms import KINDS, find_morphisms
from .preservation import check_closure, replay_reference_examples
from .semantics import evaluate, satisfies
from .structure import load_model, save_model

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_FAILS = 3


class Reporter:
    def __init__(self, kv: bool):
        self.kv = kv

    def emit(self, key: str, value):
        if self.kv:
            print(f"{key}={value}")
        else:
            print(f"{key}: {value}")

    def text(self, line: str):
        if not self.kv:
            print(line)


def _read_source(arg: str, suffix: str) -> str:
    """File path, or the name of a bundled fixture."""
    if os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as handle:
            return handle.read()
    bare = arg if arg.endswith(suffix) else arg + suffix
    if os.sep not in arg and bare in _bundled_names(suffix):
        return fixtures.fixture_text(bare)
    raise MvmtError(f"no such file or bundled fixture: {arg!r}")


def _bundled_names(suffix: str):
    names = fixtures.ALGEBRA_FIXTURES if suffix == ".alg" else fixtures.MODEL_FIXTURES
    return {n + suffix for n in names}


def _load_algebra_arg(arg: str):
    return load_algebra(_read_source(arg, ".alg"))


def _load_model_arg(arg: str, algebra):
    return load_model(_read_source(arg, ".model"), algebra)


def _print_model(report: Reporter, model, key="model"):
    if report.kv:
        for line in save_model(model).splitlines():
            print(f"{key}={line}")
    else:
        print(save_model(model), end="")


def cmd_algebra(args, report):
    algebra = _load_algebra_arg(args.file)
    report.emit("algebra", algebra.name)
    report.emit("carrier", " ".join(algebra.carrier))
    report.emit("kind", algebra.kind)
    report.emit("filter", " ".join(e for e in algebra.carrier if e in algebra.filter))
    report.emit("top", algebra.top)
    if algebra.signature.has(CONJ):
        try:
            unit = find_conj_unit(algebra)
            report.emit("conj-unit", unit)
            report.emit("integral", "yes" if is_integral(algebra) else "no")
            law = check_strong_conj_filter_law(algebra)
            report.emit("conj-filter-law", "pass" if law.ok else "fail")
            if not law.ok:
                a, b, direction = law.first
                report.emit("conj-filter-violation", f"{a},{b} ({direction})")
        except NoUnit:
            report.emit("conj-unit", "none")
    else:
        report.emit("integral", "n/a (no conj)")
    return EXIT_OK


def cmd_eval(args, report):
    algebra = _load_algebra_arg(args.algebra)
    model = _load_model_arg(args.model, algebra)
    formula = parse_formula(args.formula, model.language, algebra.signature)
    report.emit("value", evaluate(model, formula))
    valid = satisfies(model, formula)
    report.emit("valid", "true" if valid else "false")
    return EXIT_OK if valid else EXIT_FAILS


def cmd_morph(args, report):
    algebra = _load_algebra_arg(args.algebra)
    to_algebra = (
        _load_algebra_arg(args.to_algebra) if args.to_algebra else algebra
    )
    source = _load_model_arg(args.source, algebra)
    target = _load_model_arg(args.target, to_algebra)
    if args.count:
        count = find_morphisms(args.kind, source, target, "count")
        report.emit("count", count)
        return EXIT_OK if count else EXIT_FAILS
    mode = "all" if args.all else "first"
    witnesses = find_morphisms(args.kind, source, target, mode)
    report.emit("exists", "true" if witnesses else "false")
    if args.all:
        report.emit("count", len(witnesses))
    for w in witnesses:
        g_text = " ".join(f"{a}->{b}" for a, b in w.g)
        if w.f is None:
            report.emit("witness", g_text)
        else:
            f_text = " ".join(f"{a}->{b}" for a, b in w.f)
            report.emit("witness", f"g: {g_text} | f: {f_text}")
    return EXIT_OK if witnesses else EXIT_FAILS


def cmd_translate(args, report):
    algebra = _load_algebra_arg(args.algebra)
    model = _load_model_arg(args.model, algebra)
    _print_model(report, translate(model))
    return EXIT_OK


def cmd_gaifman(args, report):
    algebra = _load_algebra_arg(args.algebra)
    model = _load_model_arg(args.model, algebra)
    graph = gaifman_graph(model)
    report.emit("vertices", " ".join(graph.vertices))
    for a, b in sorted(graph.edges):
        report.emit("edge", f"{a} {b}")
    return EXIT_OK


def cmd_treedepth(args, report):
    algebra = _load_algebra_arg(args.algebra)
    model = _load_model_arg(args.model, algebra)
    graph = gaifman_graph(model)
    depth, forest = tree_depth(graph, cap=args.cap)
    report.emit("treedepth", depth)

    def walk(node, indent):
        report.text("  " * indent + node.vertex)
        if report.kv:
            report.emit("forest-node", f"{node.vertex} depth={indent}")
        for child in node.children:
            walk(child, indent + 1)

    for root in forest.roots:
        walk(root, 0)
    return EXIT_OK


def cmd_canonical(args, report):
    algebra = _load_algebra_arg(args.algebra)
    model = _load_model_arg(args.model, algebra)
    if not is_boolean_model(model):
        model = translate(model)
    style = FLAT if args.style == "flat" else TD_OPTIMAL
    sentence = canonical_sentence(model, style)
    report.emit("sentence", format_formula(sentence))
    return EXIT_OK


def cmd_nmap(args, report):
    algebra = _load_algebra_arg(args.algebra)
    to_algebra = (
        _load_algebra_arg(args.to_algebra) if args.to_algebra else algebra
    )
    source = _load_model_arg(args.source, algebra)
    target = _load_model_arg(args.target, to_algebra)
    result = n_maps_to(source, target, args.n, args.bound)
    report.emit("n", result.n)
    report.emit("size-bound", result.size_bound)
    if result.holds_up_to_bound:
        report.emit("result", "holds-up-to-bound")
        return EXIT_OK
    report.emit("result", "refuted")
    _print_model(report, result.witness, key="witness")
    return EXIT_FAILS


def cmd_ncore(args, report):
    algebra = _load_algebra_arg(args.algebra)
    model = _load_model_arg(args.model, algebra)
    core = n_core_bounded(model, args.n, args.bound)
    report.emit("n", args.n)
    report.emit("size-bound", args.bound)
    if core is None:
        report.emit("result", "not-found-within-bounds")
        return EXIT_FAILS
    report.emit("result", "found")
    _print_model(report, core, key="core")
    return EXIT_OK


def cmd_separate(args, report):
    algebra = _load_algebra_arg(args.algebra)
    models = [_load_model_arg(m, algebra) for m in args.models]
    sentence = separating_sentence(models, args.n, args.bound)
    report.emit("sentence", format_formula(sentence))
    return EXIT_OK


def cmd_bf(args, report):
    algebra = _load_algebra_arg(args.algebra)
    to_algebra = (
        _load_algebra_arg(args.to_algebra) if args.to_algebra else algebra
    )
    source = _load_model_arg(args.source, algebra)
    target = _load_model_arg(args.target, to_algebra)
    if args.mode == "fixed":
        system = find_system_fixed(source, target, args.n)
    else:
        system = find_system_mixed(source, target, args.n)
    if system is not None:
        report.emit("system", "exists")
        for k, size in enumerate(system.level_sizes()):
            report.emit(f"level {k}", size)
        return EXIT_OK
    report.emit("system", "none")
    failure = first_inextensible(source, target, args.n, mixed=args.mode == "mixed")
    if failure is not None:
        level, iso, reason = failure
        report.emit("failed-at-level", level)
        report.emit("inextensible-map", iso)
        report.emit("reason", reason)
    return EXIT_FAILS


def cmd_preserve(args, report):
    pool = [_load_algebra_arg(a) for a in args.algebras.split(",")]
    language = parse_language(args.language) if args.language else None
    sentence = parse_formula(
        args.formula,
        language if language else _guess_language(args.formula, pool),
        pool[0].signature,
    )
    result = check_closure(
        sentence, args.kind, pool, args.max_domain, language=language
    )
    report.emit("kind", result.kind)
    report.emit("max-domain", result.max_domain)
    report.emit("pairs-checked", result.pairs_checked)
    report.emit("closed", "true (up to bounds)" if result.closed else "false")
    if result.closed:
        return EXIT_OK
    M, N, witness = result.counterexample
    report.emit("counterexample-source", M.name)
    report.emit("counterexample-target", N.name)
    report.emit("witness", " ".join(f"{a}->{b}" for a, b in witness.g))
    if args.emit:
        os.makedirs(args.emit, exist_ok=True)
        for model in (M, N):
            path = os.path.join(args.emit, f"{model.name}.model")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(save_model(model))
            report.emit("emitted", path)
    return EXIT_FAILS


def _guess_language(formula_text, pool):
    # parse once against a permissive language built from the formula's atoms
    from .language import PredicateLanguage
    import re

    names = {}
    for match in re.finditer(r"([A-Za-z_][A-Za-z0-9_]*)\s*\(([^)]*)\)", formula_text):
        name, inner = match.groups()
        if name in ("exists", "forall", "and", "or"):
            continue
        names[name] = len([p for p in inner.split(",") if p.strip()])
    if not names:
        raise MvmtError("cannot infer a language; pass --language")
    return PredicateLanguage(tuple(sorted(names.items())))


def cmd_replay(args, report):
    result = replay_reference_examples(Fraction(args.cut_alpha))
    for entry in result.entries:
        report.emit(entry.name, entry.status)
        for line in entry.details:
            report.text(f"  {line}")
    return EXIT_OK if result.ok else EXIT_FAILS


def cmd_enumerate(args, report):
    language = parse_language(args.language)
    from .algebra import ConnectiveSignature, JOIN, MEET

    names = args.connectives.split(",") if args.connectives else [JOIN, MEET, CONJ]
    signature = ConnectiveSignature(
        tuple(
            (n, 2 if n in (JOIN, MEET, CONJ) else 0)
            for n in dict.fromkeys([JOIN, MEET] + names)
        )
    )
    bounds = EnumerationBounds(
        max_qd=args.max_qd,
        max_vars=args.max_vars,
        max_connectives=args.max_conn,
        cap=args.cap,
    )
    whitelist = names if args.connectives else None
    count = 0
    for sentence in enumerate_sentences(
        language, signature, bounds, whitelist, class_tag=args.class_tag
    ):
        count += 1
        report.emit("sentence", format_formula(sentence))
    report.emit("count", count)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvmt",
        description="Finite many-valued model theory at desk scale",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--kv", action="store_true", help="key=value output")

    p = sub.add_parser("algebra", help="load and validate an algebra file")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("eval", help="evaluate a formula in a model")
    p.add_argument("--algebra", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("morph", help="search for morphism witnesses")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--algebra", required=True)
    p.add_argument("--to-algebra")
    p.add_argument("--all", action="store_true")
    p.add_argument("--count", action="store_true")
    common(p)
    p.set_defaults(func=cmd_morph)

    p = sub.add_parser("translate", help="threshold a model at its filter")
    p.add_argument("--algebra", required=True)
    p.add_argument("--model", required=True)
    common(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("gaifman", help="print the Gaifman graph edge list")
    p.add_argument("--algebra", required=True)
    p.add_argument("--model", required=True)
    common(p)
    p.set_defaults(func=cmd_gaifman)

    p = sub.add_parser("treedepth", help="exact tree-depth of the Gaifman graph")
    p.add_argument("--algebra", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--cap", type=int, default=12)
    common(p)
    p.set_defaults(func=cmd_treedepth)

    p = sub.add_parser("canonical", help="canonical conjunctive sentence")
    p.add_argument("--algebra", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--style", choices=["flat", "td"], default="td")
    common(p)
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("nmap", help="bounded tree-depth-relative map check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--algebra", required=True)
    p.add_argument("--to-algebra")
    common(p)
    p.set_defaults(func=cmd_nmap)

    p = sub.add_parser("ncore", help="bounded core search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--algebra", required=True)
    p.add_argument("--model", required=True)
    common(p)
    p.set_defaults(func=cmd_ncore)

    p = sub.add_parser("separate", help="separating sentence from bounded cores")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--algebra", required=True)
    p.add_argument("models", nargs="+")
    common(p)
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("bf", help="back-and-forth system search")
    p.add_argument("--mode", choices=["fixed", "mixed"], default="fixed")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--algebra", required=True)
    p.add_argument("--to-algebra")
    p.add_argument("source")
    p.add_argument("target")
    common(p)
    p.set_defaults(func=cmd_bf)

    p = sub.add_parser("preserve", help="closure of a sentence under a map kind")
    p.add_argument("--formula", required=True)
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--algebras", required=True, help="comma-separated files")
    p.add_argument("--max-domain", type=int, required=True)
    p.add_argument("--language")
    p.add_argument("--emit", help="directory for counterexample model files")
    common(p)
    p.set_defaults(func=cmd_preserve)

    p = sub.add_parser("replay", help="run the bundled worked examples")
    p.add_argument("--cut-alpha", default="1/2")
    common(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("enumerate", help="enumerate sentences within bounds")
    p.add_argument("--language", required=True, help='e.g. "R:1 P:1"')
    p.add_argument("--connectives", help="comma-separated whitelist")
    p.add_argument("--max-qd", type=int, required=True)
    p.add_argument("--max-vars", type=int, required=True)
    p.add_argument("--max-conn", type=int, default=2)
    p.add_argument("--cap", type=int, default=200_000)
    p.add_argument("--class", dest="class_tag", choices=ALL_CLASS_TAGS)
    common(p)
    p.set_defaults(func=cmd_enumerate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report = Reporter(kv=getattr(args, "kv", False))
    try:
        return args.func(args, report)
    except MvmtError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
