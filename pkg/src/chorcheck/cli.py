"""Command line front end: compose processes, generate LTSs, check conformance.

Exit codes are a stable contract:

* 0  success / all requested conformance relations hold
* 1  usage, I/O or parse problems
* 2  the given processes cannot be composed
* 3  state-space exploration exceeded a bound
* 4  at least one requested conformance relation does not hold
"""

from __future__ import annotations

import argparse
import re
import sys

from .bpmn_xml import (
    BpmnDocument,
    MalformedModelError,
    UnsupportedElementError,
    load_choreography,
    load_collaboration,
)
from .composition import CompositionError, compose, well_composed
from .conformance import (
    DistinguishingTrace,
    NonSimulablePair,
    check_bbc,
    check_tbc,
    export_aut,
    parse_aut,
    AutSyntaxError,
)
from .model import Choreography, Collaboration
from .semantics import (
    BoundExceeded,
    ExplorationBounds,
    generate_lts,
    hiding_set,
)
from .text_syntax import (
    ParseError,
    parse_choreography,
    parse_collaboration,
    parse_process,
    print_model,
)

_INPUT_ERRORS = (
    OSError,
    ParseError,
    MalformedModelError,
    UnsupportedElementError,
    AutSyntaxError,
    ValueError,
)


def _detect_format(path: str, override: str) -> str:
    if override != "auto":
        return override
    if path.endswith(".bpmn") or path.endswith(".xml"):
        return "bpmn"
    if path.endswith(".aut"):
        return "aut"
    return "text"


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_side(path: str, fmt: str, kind: str):
    """Load one input; returns ('model', model) or ('lts', lts)."""
    fmt = _detect_format(path, fmt)
    if fmt == "aut":
        return "lts", parse_aut(_read(path))
    if fmt == "bpmn":
        doc = BpmnDocument.from_path(path)
        model = load_choreography(doc) if kind == "choreography" else load_collaboration(doc)
        return "model", model
    text = _read(path)
    if kind == "choreography":
        return "model", parse_choreography(text)
    return "model", parse_collaboration(text)


def _detect_kind(path: str, fmt: str) -> str:
    fmt = _detect_format(path, fmt)
    if fmt == "bpmn":
        text = _read(path)
        return "choreography" if "<choreography" in text or ":choreography" in text else "collaboration"
    if fmt == "text":
        stripped = re.sub(r"//[^\n]*", "", _read(path)).lstrip()
        return "collaboration" if stripped.startswith("pool") else "choreography"
    raise ValueError("cannot infer the model kind of an .aut file; pass --kind")


def _bounds(args) -> ExplorationBounds:
    return ExplorationBounds(
        max_tokens_per_edge=args.max_tokens,
        max_messages_per_edge=args.max_messages,
        max_states=args.max_states,
    )


def _add_bounds_flags(parser):
    parser.add_argument("--max-tokens", type=int, default=2,
                        help="token bound per sequence edge (default 2)")
    parser.add_argument("--max-messages", type=int, default=4,
                        help="message bound per message edge (default 4)")
    parser.add_argument("--max-states", type=int, default=100_000,
                        help="state count bound (default 100000)")


def _split_names(raw: str) -> list[str]:
    names = [n.strip() for n in raw.split(",") if n.strip()]
    if not names:
        raise ValueError("empty participant name list")
    return names


def cmd_compose(args) -> int:
    try:
        processes = [parse_process(_read(p)) for p in args.files]
        names = _split_names(args.names)
        if len(names) != len(processes):
            print("error: need as many names as process files", file=sys.stderr)
            return 1
        try:
            collab = compose(processes, names)
        except CompositionError as err:
            print("not composable:")
            for issue in err.issues:
                print(f"  {type(issue).__name__}: {issue}")
            return 2
        issues = well_composed(collab)
        print("well-composed: ok" if not issues else "well-composed: NO")
        text = print_model(collab)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except _INPUT_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def cmd_lts(args) -> int:
    try:
        if _detect_format(args.model, args.format) == "aut":
            lts = parse_aut(_read(args.model))
        else:
            kind = args.kind if args.kind != "auto" else _detect_kind(args.model, args.format)
            _, model = _load_side(args.model, args.format, kind)
            lts = generate_lts(model, _bounds(args))
    except BoundExceeded as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except _INPUT_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    data = export_aut(lts)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode("ascii"))
    print(f"{lts.n_states} states, {len(lts.transitions)} transitions", file=sys.stderr)
    return 0


def _format_trace(labels) -> str:
    return " · ".join(str(l) for l in labels)


def _print_verdict(result, report: str):
    name = result.relation
    if report == "lines":
        parts = [name, "true" if result.verdict else "false"]
        ce = result.counterexample
        if isinstance(ce, DistinguishingTrace):
            parts += ["·".join(str(l) for l in ce.labels), ce.side]
        elif isinstance(ce, NonSimulablePair):
            path = "·".join(str(l) for l in ce.path) or "-"
            parts += [path, str(ce.offending), ce.side]
        print(" ".join(parts))
        return
    print(f"{name.upper()}: {'true' if result.verdict else 'false'}")
    ce = result.counterexample
    if isinstance(ce, DistinguishingTrace):
        print(f"  counterexample: {_format_trace(ce.labels)}")
        print(f"  (this trace is allowed only by the {ce.side})")
    elif isinstance(ce, NonSimulablePair):
        prefix = _format_trace(ce.path) if ce.path else "(the initial state)"
        print(f"  counterexample: after {prefix}")
        print(f"  only the {ce.side} can perform {ce.offending}")


def cmd_check(args) -> int:
    try:
        _, choreo = _load_side(args.choreography, args.format, "choreography")

        if args.processes:
            if args.collaboration:
                print("error: give either a collaboration file or --processes",
                      file=sys.stderr)
                return 1
            files = [p.strip() for p in args.processes.split(",") if p.strip()]
            processes = [parse_process(_read(p)) for p in files]
            names = _split_names(args.names or "")
            if len(names) != len(processes):
                print("error: need as many names as process files", file=sys.stderr)
                return 1
            try:
                collab = compose(processes, names)
            except CompositionError as err:
                print("not composable:")
                for issue in err.issues:
                    print(f"  {type(issue).__name__}: {issue}")
                return 2
        elif args.collaboration:
            _, collab = _load_side(args.collaboration, args.format, "collaboration")
        else:
            print("error: a collaboration file or --processes is required",
                  file=sys.stderr)
            return 1

        bounds = _bounds(args)
        if isinstance(choreo, Choreography):
            choreo_lts = generate_lts(choreo, bounds)
        else:
            choreo_lts = choreo
        if isinstance(collab, Collaboration):
            collab_lts = generate_lts(collab, bounds)
        else:
            collab_lts = collab
        if isinstance(choreo, Choreography) and isinstance(collab, Collaboration):
            hidden = hiding_set(choreo, collab)
        else:
            hidden = collab_lts.labels() - choreo_lts.labels()
    except BoundExceeded as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except _INPUT_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    results = []
    if args.relation in ("tbc", "both"):
        results.append(check_tbc(choreo_lts, collab_lts, hidden))
    if args.relation in ("bbc", "both"):
        results.append(check_bbc(choreo_lts, collab_lts, hidden))
    for result in results:
        _print_verdict(result, args.report)
    return 0 if all(r.verdict for r in results) else 4


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chorcheck",
        description="Compose BPMN processes and check collaborations against choreographies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compose = sub.add_parser("compose", help="compose process files into a collaboration")
    p_compose.add_argument("files", nargs="+", help="process files in textual syntax")
    p_compose.add_argument("--names", required=True,
                           help="comma-separated participant names, one per file")
    p_compose.add_argument("-o", "--out", help="write the collaboration here")
    p_compose.set_defaults(func=cmd_compose)

    p_lts = sub.add_parser("lts", help="generate the LTS of a model as .aut")
    p_lts.add_argument("model", help="model file (text, .bpmn or .aut)")
    p_lts.add_argument("--kind", choices=("auto", "choreography", "collaboration"),
                       default="auto")
    p_lts.add_argument("--format", choices=("auto", "text", "bpmn", "aut"), default="auto")
    p_lts.add_argument("-o", "--out", help="write the .aut here instead of stdout")
    _add_bounds_flags(p_lts)
    p_lts.set_defaults(func=cmd_lts)

    p_check = sub.add_parser("check", help="check a collaboration against a choreography")
    p_check.add_argument("choreography", help="choreography file (text, .bpmn or .aut)")
    p_check.add_argument("collaboration", nargs="?",
                         help="collaboration file (text, .bpmn or .aut)")
    p_check.add_argument("--processes",
                         help="comma-separated process files to compose instead")
    p_check.add_argument("--names", help="participant names for --processes")
    p_check.add_argument("--relation", choices=("bbc", "tbc", "both"), default="both")
    p_check.add_argument("--report", choices=("human", "lines"), default="human")
    p_check.add_argument("--format", choices=("auto", "text", "bpmn", "aut"), default="auto")
    _add_bounds_flags(p_check)
    p_check.set_defaults(func=cmd_check)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    return args.func(args)


def run():  # console-script entry point
    sys.exit(main())


if __name__ == "__main__":
    run()
