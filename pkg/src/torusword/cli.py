"""Command-line interface.

Subcommands: fixed-point, complexity, fractal, code-orbit, graph, verify.
Exit codes: 0 success / all checks passed, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys

import numpy as np

from . import battery as bat
from . import graphs as gr
from . import substitution as sub
from . import torus as tor
from .words import StabilizationPolicy, complexity


def _open_out(args):
    if args.out and args.out != "-":
        return open(args.out, "w", encoding="utf-8", newline="")
    return contextlib.nullcontext(sys.stdout)


def _policy(args) -> StabilizationPolicy:
    cap = getattr(args, "prefix_cap", None)
    return StabilizationPolicy(cap=cap) if cap else StabilizationPolicy()


def _load_substitution(path: str) -> sub.Substitution:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    images = doc["images"]
    if isinstance(images, dict):
        labels = doc.get("labels", sorted(images))
        alphabet = sub.Alphabet(len(labels), tuple(labels))
        return sub.Substitution(alphabet, [images[lab] for lab in labels])
    alphabet = sub.Alphabet(len(images), tuple(doc["labels"]) if "labels" in doc else None)
    return sub.Substitution(alphabet, images)


def _word_source(args, parser):
    """(word, k, description) from --kbonacci / --morphism / --example."""
    if getattr(args, "kbonacci", None):
        s = sub.k_bonacci(args.kbonacci)
        return sub.fixed_point(s), args.kbonacci - 1, f"{args.kbonacci}-bonacci"
    if getattr(args, "morphism", None):
        s = _load_substitution(args.morphism)
        return sub.fixed_point(s), None, "morphism"
    example = getattr(args, "example", None)
    if example == "circle":
        alpha = args.alpha if args.alpha is not None else 1.0 / bat.PHI
        T = tor.circle_rotation(alpha)
        return T.coding(args.x0[0] if args.x0 else 0.0), 1, f"circle({alpha})"
    if example == "hexagon":
        T = tor.hexagon_example(args.seed)
        x0 = np.array(args.x0) if args.x0 else tor.hexagon_interior_point(T)
        return T.coding(x0), 2, T.name
    parser.error("need a word source: --kbonacci, --morphism or --example")


def _translation_source(args, parser) -> tor.PiecewiseTranslation:
    if args.example == "circle":
        alpha = args.alpha if args.alpha is not None else 1.0 / bat.PHI
        return tor.circle_rotation(alpha)
    if args.example == "hexagon":
        return tor.hexagon_example(args.seed)
    parser.error("--example must be circle or hexagon")


def cmd_fixed_point(args, parser) -> int:
    if args.kbonacci:
        s = sub.k_bonacci(args.kbonacci)
    elif args.morphism:
        s = _load_substitution(args.morphism)
    else:
        parser.error("need --kbonacci or --morphism")
    w = sub.fixed_point(s, args.seed_letter)
    data = w.prefix(args.length)
    text = "".join(s.alphabet.label(int(c)) for c in data)
    with _open_out(args) as out:
        out.write(text + ("\n" if text else ""))
    return 0


def cmd_complexity(args, parser) -> int:
    w, k, _name = _word_source(args, parser)
    if args.k is not None:
        k = args.k
    report = complexity(w, args.nmax, _policy(args))
    with _open_out(args) as out:
        if args.format == "json":
            rows = [
                {"n": e.n, "p_n": e.p, "prefix_len": e.prefix_len, "stabilized": e.stabilized}
                for e in report.rows()
            ]
            json.dump({"rows": rows, "k": k}, out, sort_keys=True, indent=2)
            out.write("\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            header = ["n", "p_n", "prefix_len", "stabilized"]
            if k is not None:
                header.append("kn_plus_1")
            writer.writerow(header)
            for e in report.rows():
                row = [e.n, e.p, e.prefix_len, str(e.stabilized).lower()]
                if k is not None:
                    row.append(k * e.n + 1)
                writer.writerow(row)
    return 0


def cmd_fractal(args, parser) -> int:
    if args.kbonacci:
        s = sub.k_bonacci(args.kbonacci)
    elif args.morphism:
        s = _load_substitution(args.morphism)
    else:
        parser.error("need --kbonacci or --morphism")
    cloud = sub.fractal_cloud(s, args.points, tol=args.tol)
    if args.format == "bin":
        path = args.out or "-"
        if path == "-":
            cloud.to_binary(sys.stdout.buffer)
        else:
            with open(path, "wb") as out:
                cloud.to_binary(out)
    else:
        with _open_out(args) as out:
            cloud.to_csv(out)
    return 0


def cmd_code_orbit(args, parser) -> int:
    T = _translation_source(args, parser)
    x0 = np.array(args.x0) if args.x0 else (
        tor.hexagon_interior_point(T) if args.example == "hexagon" else np.array([0.0])
    )
    result = T.orbit(x0, args.steps)
    with _open_out(args) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["step"] + [f"x{i + 1}" for i in range(T.k)] + ["cell"])
        for j in range(result.cells.size):
            writer.writerow(
                [j] + [repr(float(c)) for c in result.points[j]] + [int(result.cells[j])]
            )
        if result.truncated:
            print(f"warning: orbit truncated ({result.reason})", file=sys.stderr)
    return 0


def cmd_graph(args, parser) -> int:
    if args.example == "four-vertex":
        G = gr.four_vertex_example()
    else:
        w, _k, _name = _word_source(args, parser)
        G = gr.build_rauzy_graph(w, args.order, _policy(args))
        if G.provisional:
            print("warning: factor sets not stabilized; graph is provisional", file=sys.stderr)
    with _open_out(args) as out:
        if args.format == "csv":
            gr.stats_csv([G], out)
        else:
            out.write(G.to_dot(with_weights=args.weights))
    basis = gr.cycle_space(G)
    row = G.stats_row()
    print(
        f"|V|={row['vertices']} |E|={row['edges']} components={row['components']} "
        f"dimZ={basis.dimension} chi={row['chi']}",
        file=sys.stderr,
    )
    return 0


def cmd_verify(args, parser) -> int:
    report = bat.run_battery(seed=args.seed, only=args.only or None, prefix_cap=args.prefix_cap)
    sys.stdout.write(report.summary())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as out:
            out.write(report.to_json())
    elif args.format == "json":
        sys.stdout.write(report.to_json())
    return 0 if report.all_passed else 1


def _add_common(p, tol=False, prefix_cap=False):
    p.add_argument("--seed", type=int, default=0, help="seed for all pseudo-random sampling")
    p.add_argument("--out", help="output path (default stdout)")
    if tol:
        p.add_argument("--tol", type=float, default=1e-12, help="eigen-residual tolerance")
    if prefix_cap:
        p.add_argument("--prefix-cap", type=int, help="hard cap on prefix length")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusword",
        description="Coded torus translations: words, fractal clouds, Rauzy graphs, verification.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fixed-point", help="emit a prefix of a substitution fixed point")
    p.add_argument("--kbonacci", type=int)
    p.add_argument("--morphism", help="JSON file with per-letter images")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed-letter", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_fixed_point)

    p = subs.add_parser("complexity", help="complexity table of a word source")
    p.add_argument("--kbonacci", type=int)
    p.add_argument("--morphism")
    p.add_argument("--example", choices=["circle", "hexagon"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--x0", type=float, nargs="*")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--k", type=int, help="torus dimension for the kn+1 reference column")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p, prefix_cap=True)
    p.set_defaults(func=cmd_complexity)

    p = subs.add_parser("fractal", help="emit a fractal point cloud")
    p.add_argument("--kbonacci", type=int)
    p.add_argument("--morphism")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--format", choices=["csv", "bin"], default="csv")
    _add_common(p, tol=True)
    p.set_defaults(func=cmd_fractal)

    p = subs.add_parser("code-orbit", help="orbit of a piecewise translation as CSV")
    p.add_argument("--example", choices=["circle", "hexagon"], required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--x0", type=float, nargs="*")
    p.add_argument("--steps", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_code_orbit)

    p = subs.add_parser("graph", help="Rauzy graph as DOT or stats CSV")
    p.add_argument("--kbonacci", type=int)
    p.add_argument("--morphism")
    p.add_argument("--example", choices=["circle", "hexagon", "four-vertex"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--x0", type=float, nargs="*")
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--format", choices=["dot", "csv"], default="dot")
    p.add_argument("--weights", action="store_true", help="include weights in DOT labels")
    _add_common(p, prefix_cap=True)
    p.set_defaults(func=cmd_graph)

    p = subs.add_parser("verify", help="run the verification battery")
    p.add_argument("--only", action="append", help="run only the named check (repeatable)")
    p.add_argument("--format", choices=["summary", "json"], default="summary")
    _add_common(p, prefix_cap=True)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
