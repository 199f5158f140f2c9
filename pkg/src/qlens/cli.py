"""Command-line front end.

Exit codes: 0 success, 2 input or parse error, 3 verification failure (or no
witness found), 4 violated precondition such as inadmissible weights.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .gysin import EulerInput, KKGroups, builtin_euler_cpn, check_rank_duality, gysin_kgroups, wp_ktheory_predict
from .lattice import FGAbelianGroup, read_matrix
from .qsphere import format_element, parse
from .weighted import (
    WeightError,
    WeightVector,
    emit_pimsner_presentation,
    frame_power,
    is_admissible,
    read_frame,
    read_witness,
    solve_witness,
    verify_frame,
    verify_grading_witness,
    wp_generators,
    write_witness,
)

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_PRECONDITION = 0, 2, 3, 4


class InputError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("QLENS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"QLENS_THREADS must be a positive integer, got {raw!r}")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")


def parse_machine(text: str) -> list[dict[str, str]]:
    """Split machine output into blank-line separated ``key: value`` blocks."""
    blocks, cur = [], {}
    for ln in text.splitlines():
        if not ln.strip():
            if cur:
                blocks.append(cur)
                cur = {}
            continue
        k, _, v = ln.partition(":")
        cur[k.strip()] = v.strip()
    if cur:
        blocks.append(cur)
    return blocks


def kkgroups_from_machine(block: dict[str, str]) -> KKGroups:
    return KKGroups(*(FGAbelianGroup.parse(block[k]) for k in ("k0", "k1", "k0_hom", "k1_hom")))


# --- subcommands ------------------------------------------------------------


def cmd_normalize(args, out) -> int:
    if (args.expr is None) == (args.file is None):
        raise InputError("give exactly one of an inline expression or --file")
    text = args.expr if args.expr is not None else _read(args.file)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise InputError("no expression given")
    for k, ln in enumerate(lines):
        x = parse(ln, args.n)
        if args.output == "machine":
            out.write(f"n: {args.n}\nnormal_form: {format_element(x)}\n")
            if k + 1 < len(lines):
                out.write("\n")
        else:
            out.write(format_element(x) + "\n")
    return EXIT_OK


def cmd_kgroups(args, out) -> int:
    if (args.matrix is None) == (args.cpn is None):
        raise InputError("give exactly one of --matrix or --cpn")
    if args.cpn is not None:
        if args.cpn < 0:
            raise InputError("--cpn needs a nonnegative dimension")
        A, source = builtin_euler_cpn(args.cpn), f"builtin-CPn({args.cpn})"
    else:
        A, source = read_matrix(_read(args.matrix)), f"user-file({args.matrix})"
    if not A.is_square():
        raise InputError(f"Euler matrix must be square, got {A.rows}x{A.cols}")
    if any(d < 1 for d in args.d):
        raise InputError("--d values must be positive")
    other = read_matrix(_read(args.compare)) if args.compare else None
    if other is not None and not other.is_square():
        raise InputError("comparison matrix must be square")

    def job(d):
        g = gysin_kgroups(EulerInput(A, d, source))
        h = gysin_kgroups(EulerInput(other, d, args.compare)) if other is not None else None
        return d, g, h

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(job, args.d))

    blocks = []
    for d, g, h in results:
        if args.output == "machine":
            lines = [
                f"matrix: {source}",
                f"d: {d}",
                f"k0: {g.k0}",
                f"k1: {g.k1}",
                f"k0_hom: {g.k0_hom}",
                f"k1_hom: {g.k1_hom}",
                f"duality: {'ok' if check_rank_duality(g) else 'FAIL'}",
            ]
            if h is not None:
                lines.append(f"isomorphic: {'yes' if g == h else 'no'}")
            blocks.append("\n".join(lines) + "\n")
        else:
            text = f"matrix: {source}\nd: {d}\n" + g.report()
            if h is not None:
                text += f"compare: {args.compare}\n" + "".join("  " + ln + "\n" for ln in h.report().splitlines())
                text += f"isomorphic: {'yes' if g == h else 'no'}\n"
            blocks.append(text)
    out.write("\n".join(blocks))
    dual_ok = all(check_rank_duality(g) for _, g, _ in results)
    return EXIT_OK if dual_ok else EXIT_VERIFY


def cmd_wp(args, out) -> int:
    m = WeightVector(tuple(args.weights))
    gens = wp_generators(m, args.family, args.cap, p=args.p)
    admissible = is_admissible(m)
    machine = args.output == "machine"
    lines = [f"weights: {m}", f"admissible: {'yes' if admissible else 'no'}"]
    lines.append(f"family: {args.family}")
    if args.family == "general":
        lines.append(f"cap: {args.cap}")
    if machine:
        lines.append(f"generators: {len(gens)}")
        lines += [f"generator.{k}: {format_element(x)}" for k, x in enumerate(gens)]
    else:
        lines.append(f"generators ({len(gens)}):")
        lines += [f"  {format_element(x)}" for x in gens]
    if admissible:
        k0, k1 = wp_ktheory_predict(m)
        sep = ":" if machine else " ="
        lines += [f"K0{sep} {k0}", f"K1{sep} {k1}"]
        code = EXIT_OK
    else:
        lines.append("prediction: refused (weights not admissible)")
        code = EXIT_PRECONDITION
    out.write("\n".join(lines) + "\n")
    return code


def cmd_witness(args, out) -> int:
    if args.verify:
        if args.weights:
            raise InputError("--verify takes no weights")
        w = read_witness(_read(args.verify))
        rep = verify_grading_witness(w)
        out.write(rep.to_machine() if args.output == "machine" else rep.to_text())
        return EXIT_OK if rep.passed else EXIT_VERIFY
    if not args.weights or args.degree is None:
        raise InputError("give weights and --degree, or --verify FILE")
    if args.cap < 0:
        raise InputError("--cap must be nonnegative")
    m = WeightVector(tuple(args.weights))
    w = solve_witness(m, args.degree, args.cap)
    if w is None:
        out.write(f"status: none-found\nweights: {m}\ndegree: {args.degree}\ncap: {args.cap}\n")
        return EXIT_VERIFY
    text = write_witness(w)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    out.write(text)
    return EXIT_OK


def cmd_pimsner(args, out) -> int:
    f = read_frame(_read(args.frame))
    if args.power < 1:
        raise InputError("--power must be positive")
    if args.power > 1:
        f = frame_power(f, args.power)
    rep = verify_frame(f)
    if not rep.passed:
        out.write(rep.to_machine() if args.output == "machine" else rep.to_text())
        return EXIT_VERIFY
    if args.b_list:
        lines = [ln for ln in _read(args.b_list).splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        bs = [parse(ln, f.n) for ln in lines]
    else:
        bs = wp_generators(f.weights, "general", 1)
    out.write(emit_pimsner_presentation(f, bs))
    return EXIT_OK


# --- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "machine"), default="text")

    p = argparse.ArgumentParser(prog="qlens", description="Exact computations for quantum lens spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("normalize", parents=[common], help="normal form of a sphere expression")
    s.add_argument("expr", nargs="?")
    s.add_argument("-n", type=int, required=True, help="sphere index (generators z0..zn)")
    s.add_argument("--file")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("kgroups", parents=[common], help="K-theory and K-homology from an Euler matrix")
    s.add_argument("--matrix")
    s.add_argument("--cpn", type=int)
    s.add_argument("--d", type=int, nargs="+", required=True)
    s.add_argument("--compare", help="second matrix file; report whether the groups agree")
    s.set_defaults(func=cmd_kgroups)

    s = sub.add_parser("wp", parents=[common], help="weighted projective space generators and K-theory")
    s.add_argument("weights", type=int, nargs="+")
    s.add_argument("--family", choices=("general", "sharp", "teardrop"), default="general")
    s.add_argument("--cap", type=int, default=3)
    s.add_argument("--p", type=int, nargs="+", help="pairwise coprime base for the sharp family")
    s.set_defaults(func=cmd_wp)

    s = sub.add_parser("witness", parents=[common], help="find or verify a strong-grading witness")
    s.add_argument("weights", type=int, nargs="*")
    s.add_argument("--degree", type=int)
    s.add_argument("--cap", type=int, default=3)
    s.add_argument("--verify")
    s.add_argument("--out")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("pimsner", parents=[common], help="Cuntz-Pimsner presentation from a frame file")
    s.add_argument("frame")
    s.add_argument("--b-list")
    s.add_argument("--power", type=int, default=1)
    s.set_defaults(func=cmd_pimsner)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except WeightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
