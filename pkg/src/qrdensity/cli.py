"""Command-line front end: ``qrd <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .density import analyze, decimal_string, dyadic_dict
from .diagrams import OverlapDiagram, quotient_diagram, render_ascii, render_overlap
from .empirical import MIN_BOUND, empirical_density, q_epsilon_count, write_prime_csv
from .errors import (
    ConsistencyError,
    DomainError,
    QrdError,
    ResourceLimitError,
    SizeLimitError,
    WrongPathError,
)
from .tuples import StandardTuple, build_structure, generator_from_mapping, gaps_for_quotient_spec

log = logging.getLogger("qrdensity")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_SIZE = 3
EXIT_RESOURCE = 4
EXIT_CONSISTENCY = 5

_EXIT_CODES = [
    (DomainError, EXIT_USAGE),
    (SizeLimitError, EXIT_SIZE),
    (ResourceLimitError, EXIT_RESOURCE),
    (ConsistencyError, EXIT_CONSISTENCY),
    (WrongPathError, EXIT_CONSISTENCY),
]


class UsageError(DomainError):
    pass


def _load_json(source: str) -> dict:
    text = source
    if not source.lstrip().startswith("{"):
        path = Path(source)
        if not path.is_file():
            raise UsageError(f"--tuple is neither inline JSON nor an existing file: {source}")
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("input JSON must be an object")
    return data


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _tuple_arg(args) -> StandardTuple:
    if not args.tuple:
        raise UsageError("--tuple is required")
    return StandardTuple.from_mapping(_load_json(args.tuple))


def _emit(args, payload: dict, text_lines: Sequence[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(text_lines))


def _analysis_lines(an) -> list[str]:
    def reps(xs):
        return "none" if xs is None else "[" + ", ".join("{" + ",".join(map(str, sorted(r.Z))) + "}" for r in xs) + "]"

    lines = [
        f"tuple: a={list(an.tuple.a)} b={list(an.tuple.b)} s={an.tuple.s}",
        f"B: {list(an.B)}",
        f"sigma: {list(an.sigma)}",
        f"admissible: {an.admissible}",
        f"K_max: {an.kmax.as_lists()}",
        f"Lambda': {reps(an.lambda_prime)}",
        f"Sigma: {sorted(an.Sigma)}",
        f"Sigma (columns): {sorted(an.Sigma_columns)}",
        f"classes: {[sorted(c) for c in an.classes]}",
        f"mu: {an.mu}",
        f"sigma_count: {an.sigma_count}",
        f"d: {an.d}",
        f"condition39: {an.condition39}",
        f"M1: {'empty' if not an.M1 else reps(an.M1)}",
        f"epsilon: {an.epsilon}",
        f"alpha: {an.alpha}",
        f"beta: {an.beta}",
        f"omega: {an.omega}",
        f"formula_path: {an.formula_path}",
        f"formula_density: {an.formula_density} ({decimal_string(an.formula_density)})",
        f"formula_agrees: {an.formula_agrees}",
        f"density_plus: {an.density_plus} ({decimal_string(an.density_plus)})",
        f"density_minus: {an.density_minus} ({decimal_string(an.density_minus)})",
    ]
    lines.extend(f"note: {n}" for n in an.notes)
    return lines


def cmd_analyze(args) -> int:
    an = analyze(_tuple_arg(args), check=args.check)
    _emit(args, an.to_dict(), _analysis_lines(an))
    return EXIT_OK


def cmd_density(args) -> int:
    an = analyze(_tuple_arg(args), check=args.check)
    q = an.density_plus
    _emit(args, {"density": dyadic_dict(q), "formula_path": an.formula_path}, [str(q), decimal_string(q)])
    return EXIT_OK


def _check_bound(bound: int) -> None:
    if bound < MIN_BOUND:
        raise UsageError(f"--bound must be >= {MIN_BOUND}, got {bound}")


def cmd_empirical(args) -> int:
    t = _tuple_arg(args)
    _check_bound(args.bound)
    rep = empirical_density(t, args.bound)
    if args.csv:
        rows = write_prime_csv(args.csv, t, args.bound)
        log.info("wrote %d rows to %s", rows, args.csv)
    d = rep.to_dict()
    _emit(
        args,
        d,
        [
            f"bound: {rep.prime_bound}",
            f"odd primes: {rep.primes_considered}",
            f"allowable: {rep.allowable_count}",
            f"pi_plus: {rep.pi_plus_count}",
            f"theoretical: {rep.theoretical_density} ({decimal_string(rep.theoretical_density)})",
            f"estimated: {d['estimated_density_float']:.6f}",
            f"error: {d['absolute_error']:.6f}",
        ],
    )
    return EXIT_OK


def cmd_qcount(args) -> int:
    if args.prime is None:
        raise UsageError("--prime is required")
    rep = q_epsilon_count(args.prime, _tuple_arg(args), args.epsilon)
    d = rep.to_dict()
    _emit(args, d, [f"{k}: {v}" for k, v in d.items()])
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.tuple:
        gen = _load_json(args.tuple)
    elif args.gaps:
        gen = {"gaps": args.gaps, "s": args.s}
        if args.seed or args.multipliers:
            gen.update(seed=args.seed, multipliers=args.multipliers)
        else:
            gen["prime_mode"] = True
    elif args.blocks:
        blocks = [_int_list(b) for b in args.blocks]
        gen = {"gaps": list(gaps_for_quotient_spec(blocks, args.s)), "s": args.s, "prime_mode": True}
    else:
        raise UsageError("generate needs --tuple (generator JSON), --gaps or --blocks")
    t, gaps = generator_from_mapping(gen)
    an = analyze(t, check=args.check)
    payload = {"gaps": list(gaps), "tuple": t.to_dict(), "analysis": an.to_dict()}
    _emit(args, payload, [f"gaps: {list(gaps)}", f"generated: {t.to_json()}"] + _analysis_lines(an))
    return EXIT_OK


def cmd_render(args) -> int:
    if args.gaps:
        od = OverlapDiagram(args.s, tuple(args.gaps))
        text = render_overlap(od)
        payload = {"gaps": list(od.gaps), "s": od.s, "text": text}
    else:
        qd = quotient_diagram(build_structure(_tuple_arg(args)))
        text = render_ascii(qd)
        payload = dict(qd.to_dict(), text=text)
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tuple", help="tuple JSON inline or a path to a JSON file")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="qrd", description="Density of primes with residue-uniform progression unions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="full parameter report")
    a.add_argument("--check", action="store_true", help="run every internal cross-check")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("density", parents=[common], help="exact density only")
    d.add_argument("--check", action="store_true")
    d.set_defaults(func=cmd_density)

    e = sub.add_parser("empirical", parents=[common], help="sieve-based density estimate")
    e.add_argument("--bound", type=int, default=10**6)
    e.add_argument("--csv", help="write one row per prime to this file")
    e.set_defaults(func=cmd_empirical)

    q = sub.add_parser("qcount", parents=[common], help="count residue-uniform windows for one prime")
    q.add_argument("--prime", type=int)
    q.add_argument("--epsilon", type=int, choices=(1, -1), default=1)
    q.set_defaults(func=cmd_qcount)

    g = sub.add_parser("generate", parents=[common], help="build a tuple from gaps by the recurrence")
    g.add_argument("--gaps", type=_int_list)
    g.add_argument("--blocks", nargs="+", help="per-block gap lists, e.g. 1 1,2")
    g.add_argument("--s", type=int, default=2)
    g.add_argument("--seed", type=_int_list)
    g.add_argument("--multipliers", type=_int_list)
    g.add_argument("--check", action="store_true")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("render", parents=[common], help="ASCII diagram")
    r.add_argument("--gaps", type=_int_list, help="render a bare overlap diagram instead of a tuple")
    r.add_argument("--s", type=int, default=2)
    r.set_defaults(func=cmd_render)
    return p


def _exit_code(exc: QrdError) -> int:
    for cls, code in _EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return EXIT_ERROR


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except QrdError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": _exit_code(exc)}
        if args.format == "json":
            print(json.dumps(err, sort_keys=True), file=sys.stderr)
        else:
            print(f"error: {err['error']}: {err['message']}", file=sys.stderr)
        return err["exit_code"]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
