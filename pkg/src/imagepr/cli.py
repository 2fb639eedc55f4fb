"""Command-line front end.

Exit codes: 0 when the checked property holds (or the search outcome matches
``--expect``), 1 when it fails, 2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import colouring, linalg, systems, verify
from .colouring import STAGED, colour_name, colour_of


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi) if sep else int(lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected m or m..m', got {text!r}") from None
    if a < 1 or b < a:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return a, b


def _load_colouring(source: str):
    if source == "staged":
        return STAGED
    return colouring.load_spec(Path(source).read_text())


def _emit(args, text: str, obj) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _bool_text(flag: bool) -> str:
    return "true" if flag else "false"


def cmd_coeffs(args) -> int:
    cs = systems.coefficient_sequence(args.n)
    _emit(args, " ".join(map(str, cs)), {"coefficients": [str(c) for c in cs]})
    return 0


def cmd_colour(args) -> int:
    spec = _load_colouring(args.colouring)
    lo, hi = args.range
    pairs = [(m, colour_of(spec, m)) for m in range(lo, hi + 1)]
    text = "\n".join(f"{m} {colour_name(c)}" for m, c in pairs)
    _emit(args, text, {"values": [m for m, _ in pairs], "colours": [int(c) for _, c in pairs]})
    return 0


def cmd_build(args) -> int:
    system = systems.build_system(args.kind, args.depth)
    matrix_text, sidecar_text = system.dumps()
    if args.sidecar:
        Path(args.sidecar).write_text(sidecar_text)
    obj = dict(system.sidecar(), matrix=linalg.matrix_to_json(system.matrix))
    _emit(args, matrix_text, obj)
    return 0


def cmd_bmatrix(args) -> int:
    system = systems.build_system(args.kind, args.depth)
    b = linalg.dependence_matrix(system.matrix)
    _emit(args, linalg.format_matrix(b), linalg.matrix_to_json(b))
    return 0


def cmd_search(args) -> int:
    spec = _load_colouring(args.colouring)
    if args.matrix:
        target = linalg.parse_matrix(Path(args.matrix).read_text())
        divisibility = args.divisibility
    else:
        if args.kind is None or args.depth is None:
            raise ValueError("search needs KIND DEPTH or --matrix FILE")
        target = systems.build_system(args.kind, args.depth)
        divisibility = args.divisibility
    var_bound = args.var_bound[0] if len(args.var_bound) == 1 else args.var_bound
    outcome = verify.find_monochromatic_image(
        target,
        spec,
        args.y_bound,
        var_bound,
        divisibility=divisibility,
        image_max=args.image_max,
        workers=args.workers,
    )
    if isinstance(outcome, verify.Witness):
        assignment = " ".join(f"{k}={v}" for k, v in outcome.assignment.items())
        text = (
            f"witness colour={colour_name(outcome.colour)} {assignment}\n"
            f"image {' '.join(map(str, outcome.image))}"
        )
        kind = "witness"
    else:
        text = f"exhausted y_bound={outcome.y_bound} var_bound={outcome.to_json()['var_bound']}"
        kind = "exhausted"
    _emit(args, text, outcome.to_json())
    if args.expect is None:
        return 0
    return 0 if args.expect == kind else 1


def cmd_verify_obstruction(args) -> int:
    report = verify.verify_obstruction(args.n)
    failures = report.failures()
    lines = [f"checked n = 1..{args.n}: {'pass' if report.passed else 'FAIL'}"]
    for r in failures[:10]:
        lines.append(
            f"  n={r.n} congruence={r.congruence_holds} opposite={r.class_opposite} "
            f"cleared={r.exception_cleared}"
        )
    _emit(args, "\n".join(lines), report.to_json())
    return 0 if report.passed else 1


def cmd_verify_b(args) -> int:
    ok = verify.verify_B_equality(args.depth)
    _emit(args, _bool_text(ok), {"depth": args.depth, "b_equal": ok})
    return 0 if ok else 1


def cmd_verify_q(args) -> int:
    ok = verify.verify_image_equality_over_Q(args.depth)
    _emit(args, _bool_text(ok), {"depth": args.depth, "images_equal_over_q": ok})
    return 0 if ok else 1


def cmd_columns(args) -> int:
    m = linalg.parse_matrix(Path(args.file).read_text())
    cert = verify.columns_condition(m, limit=args.limit)
    if cert is None:
        _emit(args, "not satisfied", {"satisfied": False})
        return 1
    text = ["satisfied"]
    for k, block in enumerate(cert.blocks, 1):
        text.append(f"B{k}: {' '.join(map(str, block))}")
    _emit(args, "\n".join(text), cert.to_json())
    return 0


def cmd_schur(args) -> int:
    ok = verify.schur_exhaustive(args.n, args.k, limit=args.limit)
    _emit(args, _bool_text(ok), {"n": args.n, "k": args.k, "every_colouring_has_triple": ok})
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="imagepr",
        description="Finite checks for image partition regularity counterexamples.",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(func=func)
        return p

    p = add("coeffs", cmd_coeffs, "print c_1..c_n")
    p.add_argument("n", type=_positive)

    p = add("colour", cmd_colour, "colour a range m..m'")
    p.add_argument("range", type=_range)
    p.add_argument("--colouring", default="staged", help="'staged' or a residue-table JSON file")

    p = add("build", cmd_build, "print the matrix of system 1 or 2")
    p.add_argument("kind", type=systems.SystemKind.parse)
    p.add_argument("depth", type=_positive)
    p.add_argument("--sidecar", help="also write the JSON sidecar here")

    p = add("bmatrix", cmd_bmatrix, "print B(A) for system 1 or 2")
    p.add_argument("kind", type=systems.SystemKind.parse)
    p.add_argument("depth", type=_positive)

    p = add("search", cmd_search, "bounded monochromatic-image search")
    p.add_argument("kind", nargs="?", type=systems.SystemKind.parse)
    p.add_argument("depth", nargs="?", type=_positive)
    p.add_argument("--matrix", help="search an explicit matrix file instead")
    p.add_argument("--divisibility", type=_int_list, help="one modulus per variable")
    p.add_argument("--y-bound", type=_positive, required=True)
    p.add_argument("--var-bound", type=_int_list, required=True, help="one bound, or one per variable")
    p.add_argument("--image-max", type=_positive)
    p.add_argument("--colouring", default="staged")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--expect", choices=("witness", "exhausted"))

    p = add("verify-obstruction", cmd_verify_obstruction, "per-stage obstruction checks for n <= N")
    p.add_argument("n", type=_positive)

    p = add("verify-b-equality", cmd_verify_b, "B(A_1) == B(A_2) at a depth")
    p.add_argument("depth", type=_positive)

    p = add("verify-q-images", cmd_verify_q, "equal column spans over Q at a depth")
    p.add_argument("depth", type=_positive)

    p = add("columns-condition", cmd_columns, "columns condition for a matrix file")
    p.add_argument("file")
    p.add_argument("--limit", type=_positive, default=verify.DEFAULT_COLUMN_LIMIT)

    p = add("schur", cmd_schur, "exhaustive Schur check on 1..N with k colours")
    p.add_argument("n", type=_positive)
    p.add_argument("k", type=_positive)
    p.add_argument("--limit", type=_positive, default=verify.DEFAULT_ENUMERATION_LIMIT)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"imagepr: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
