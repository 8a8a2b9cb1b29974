"""Command-line entry point.

Exit codes: 0 success / finite / valid, 1 refuted / infinite,
2 inconclusive / limit, 3 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import fields, replace
from pathlib import Path

from .catalog import CASE_IDS, FAMILY_NAMES, CatalogError, make_family
from .diagram import Diagram, diagram_of_matrix
from .exchange_core import (
    MutationError,
    MutationWord,
    Seed,
    apply_word,
    matrix_to_text,
    parse_matrix_text,
)
from .growth import GrowthConfig, growth_report
from .mutation_class import enumerate_class
from .tropical import certificate_for_case, replay_certificate
from .unfolding import (
    UNFOLDING_PAIRS,
    UnfoldingSpec,
    check_unfolding_static,
    load_pair,
    verify_unfolding,
)

EXIT_INPUT = 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _params(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"bad parameter list {text!r}") from None


def _load_matrix(args):
    if getattr(args, "input", None):
        text = _read(args.input)
        head = next((ln.split("#", 1)[0].strip() for ln in text.splitlines()
                     if ln.split("#", 1)[0].strip()), "")
        if head.startswith("v"):
            return Diagram.from_text(text)
        return parse_matrix_text(text)
    if getattr(args, "family", None):
        return make_family(args.family, *_params(args.n))
    raise InputError("give --input FILE or --family NAME")


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def _emit(args, command: str, payload: dict, text_lines: list[str], code: int) -> int:
    if args.format == "structured":
        doc = {"command": command, "input_digest": _digest(payload.get("input")),
               **payload, "exit_status": code}
        out = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        out = "\n".join(text_lines) + "\n"
    target = getattr(args, "out", None)
    if target:
        Path(target).write_text(out)
    else:
        sys.stdout.write(out)
    return code


def _matrix_rows(m):
    return [list(r) for r in m.entries] if hasattr(m, "entries") else [list(r) for r in m.w]


# ---------------------------------------------------------------------------


def cmd_mutate(args) -> int:
    b = _load_matrix(args)
    if isinstance(b, Diagram):
        d = b
        for k in MutationWord.parse(args.word, reduce=args.reduce):
            d = d.mutate(k)
        payload = {"input": _matrix_rows(b), "word": args.word, "diagram": d.to_text()}
        return _emit(args, "mutate", payload, [d.to_text().rstrip()], 0)
    word = MutationWord.parse(args.word, reduce=args.reduce)
    s = apply_word(Seed.initial(b), word)
    payload = {"input": _matrix_rows(b), "word": str(word),
               "b": _matrix_rows(s.b), "c": [list(r) for r in s.c]}
    lines = [matrix_to_text(s.b).rstrip()]
    if args.show_c:
        lines += ["# C-matrix", matrix_to_text(s.c).rstrip()]
    return _emit(args, "mutate", payload, lines, 0)


def cmd_class(args) -> int:
    src = _load_matrix(args)
    d = src if isinstance(src, Diagram) else diagram_of_matrix(src)
    res = enumerate_class(d, max_nodes=args.max_nodes, labeled=args.labeled)
    info = res.to_dict()
    payload = {"input": [list(r) for r in d.w], **info}
    lines = [f"status: {info['status']}"]
    if "class_size" in info:
        lines.append(f"class size: {info['class_size']}")
    if "witness" in info:
        lines.append(f"witness: {info['witness'] or '(empty word)'}")
        lines.append(f"offending weight: {info['offending_weight']}")
    return _emit(args, "class", payload, lines, res.exit_code())


def _growth_config(args) -> GrowthConfig:
    cfg = GrowthConfig()
    if args.config:
        try:
            data = json.loads(_read(args.config))
        except json.JSONDecodeError as exc:
            raise InputError(f"config is not valid JSON: {exc}") from None
        known = {f.name for f in fields(GrowthConfig)}
        growth = data.get("growth", data)
        bad = set(growth) - known - {"max_vertices", "radius"}
        if bad:
            raise InputError(f"unknown config keys: {sorted(bad)}")
        cfg = replace(cfg, **{k: v for k, v in growth.items() if k in known})
        if args.max_vertices is None:
            args.max_vertices = growth.get("max_vertices")
        if args.radius is None:
            args.radius = growth.get("radius")
    overrides = {k: getattr(args, k) for k in ("delta", "slope_tolerance")
                 if getattr(args, k) is not None}
    return replace(cfg, **overrides)


def cmd_growth(args) -> int:
    b = _load_matrix(args)
    if isinstance(b, Diagram):
        from .diagram import matrix_of_diagram
        b = matrix_of_diagram(b)
    cfg = _growth_config(args)
    if args.radius is None:
        raise InputError("--radius is required")
    family = args.family
    if family and args.n:
        family = f"{family}({args.n})"
    rep = growth_report(b, args.radius, args.max_vertices or 10**6,
                        family=family, config=cfg, threads=args.threads)
    info = rep.to_dict(timing=args.timing)
    kind = rep.classification.kind
    code = 2 if (kind == "Inconclusive" or rep.truncated) else 0
    lines = [f"family: {info['family']}", f"radius: {rep.radius}",
             f"last radius reached: {len(rep.counts) - 1}",
             "counts: " + " ".join(map(str, rep.counts)),
             f"classification: {info['classification']}",
             f"saturated: {rep.saturated}", f"truncated: {rep.truncated}",
             f"vertices_visited: {rep.vertices_visited}"]
    if args.timing:
        lines.append(f"wall_time_ms: {rep.wall_time_ms}")
    return _emit(args, "growth", {"input": _matrix_rows(b), **info}, lines, code)


def cmd_certify(args) -> int:
    if args.replay:
        cert = replay_certificate(_read(args.replay))
    else:
        if args.case not in CASE_IDS:
            raise InputError(f"unknown case {args.case!r}; known: {', '.join(CASE_IDS)}")
        cert = certificate_for_case(args.case)
    text = cert.to_json()
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    if args.format == "structured" and not args.out:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        print(f"case: {cert.case}")
        print(f"verdict: {cert.verdict}")
        print(f"N: {cert.power}")
        print(f"epsilon: {cert.epsilon_a}, {cert.epsilon_b}")
        for r in cert.reasons:
            print(f"reason: {r}")
    return 0 if cert.valid else 1


def cmd_unfold(args) -> int:
    if args.action == "list":
        for k, v in UNFOLDING_PAIRS.items():
            print(f"{k}\t{v}")
        return 0
    if args.pair:
        spec = load_pair(args.pair)
    elif args.input:
        spec = UnfoldingSpec.from_text(_read(args.input))
    else:
        raise InputError("give --input FILE or --pair NAME")
    if args.action == "emit":
        sys.stdout.write(spec.to_text())
        return 0
    st = check_unfolding_static(spec)
    res = verify_unfolding(spec, depth=args.depth, max_nodes=args.max_nodes)
    info = res.to_dict()
    payload = {"input": spec.to_text(), "static_ok": st.ok, **info}
    lines = [f"static: {'ok' if st.ok else 'violated'}",
             f"verdict: {info['verdict']}", f"depth: {res.depth}", f"nodes: {res.nodes}"]
    if res.witness is not None:
        lines.append(f"witness: {res.witness or '(empty word)'}")
        lines += [f"diagnostic: {x}" for x in res.diagnostics or []]
    return _emit(args, "unfold", payload, lines, res.exit_code())


def cmd_catalog(args) -> int:
    if args.action == "list":
        names = list(FAMILY_NAMES)
        if args.format == "structured":
            sys.stdout.write(json.dumps({"families": names, "cases": list(CASE_IDS),
                                         "unfoldings": list(UNFOLDING_PAIRS)},
                                        indent=2) + "\n")
        else:
            print("families: " + " ".join(names))
            print("cases: " + " ".join(CASE_IDS))
        return 0
    if not args.name:
        raise InputError("catalog emit needs --name")
    b = make_family(args.name, *_params(args.n))
    text = diagram_of_matrix(b).to_text() if args.emit_format == "diagram" else matrix_to_text(b)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clustergrowth", description="Cluster mutation combinatorics.")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, source=True):
        sp.add_argument("--format", choices=("text", "structured"), default=argparse.SUPPRESS)
        sp.add_argument("--out")
        if source:
            sp.add_argument("--input", help="matrix or diagram file ('-' for stdin)")
            sp.add_argument("--family")
            sp.add_argument("--n", help="family parameters, comma separated")

    sp = sub.add_parser("mutate", help="apply a mutation word")
    common(sp)
    sp.add_argument("--word", required=True)
    sp.add_argument("--reduce", action="store_true", help="cancel repeated letters")
    sp.add_argument("--show-c", action="store_true")
    sp.set_defaults(func=cmd_mutate)

    sp = sub.add_parser("class", help="enumerate a mutation class")
    common(sp)
    sp.add_argument("--max-nodes", type=int, default=10**6)
    sp.add_argument("--labeled", action="store_true")
    sp.set_defaults(func=cmd_class)

    sp = sub.add_parser("growth", help="exchange-graph ball sizes")
    common(sp)
    sp.add_argument("--radius", type=int)
    sp.add_argument("--max-vertices", type=int)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--config", help="JSON file with growth settings")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--slope-tolerance", type=float)
    sp.add_argument("--timing", action="store_true", help="include wall_time_ms")
    sp.set_defaults(func=cmd_growth)

    sp = sub.add_parser("certify", help="ping-pong certificate")
    common(sp, source=False)
    sp.add_argument("--case")
    sp.add_argument("--replay", help="recheck a certificate file")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("unfold", help="unfolding checks")
    sp.add_argument("action", choices=("verify", "emit", "list"))
    common(sp, source=False)
    sp.add_argument("--input")
    sp.add_argument("--pair")
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--max-nodes", type=int, default=10**5)
    sp.set_defaults(func=cmd_unfold)

    sp = sub.add_parser("catalog", help="catalog listing")
    sp.add_argument("action", choices=("list", "emit"))
    sp.add_argument("--format", dest="emit_format", choices=("matrix", "diagram"),
                    default="matrix", help="emit format (matrix or diagram)")
    sp.add_argument("--structured", action="store_const", dest="format",
                    const="structured", default=argparse.SUPPRESS)
    sp.add_argument("--name")
    sp.add_argument("--n")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_catalog)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "certify" and not (args.case or args.replay):
            raise InputError("certify needs --case or --replay")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MutationError, CatalogError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
