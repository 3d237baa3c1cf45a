"""Command-line front end.

Exit codes: 0 success or feasible, 1 certified infeasible (or a failed
check), 2 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import circuit as cc
from .circuit import BudgetExceeded, CircuitError, index_to_state, read_truth_table
from .constraints import GLOBAL, LOCAL_FREE
from .hamiltonian import HamiltonianError, format_hamiltonian, read_hamiltonian, write_hamiltonian
from .lp import LpError
from .oracle import TOL, encoding_margin, local_minima

EXIT_OK, EXIT_INFEASIBLE, EXIT_ERROR = 0, 1, 2


class CliError(RuntimeError):
    pass


def _echo_config(args) -> None:
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["env"] = {"ISING_ENUM_CAP": cc.DEFAULT_ENUMERATION_CAP}
    print("# config " + json.dumps(cfg, sort_keys=True))


def _section(name: str) -> None:
    print(f"=== {name} ===")


def _parse_state(text: str, d: int, what: str) -> tuple[int, ...]:
    toks = text.replace(",", " ").split()
    table = {"+1": 1, "1": 1, "-1": -1, "+": 1, "-": -1}
    try:
        state = tuple(table[t] for t in toks)
    except KeyError as exc:
        raise CliError(f"bad {what} token {exc.args[0]!r}; use +1/-1") from None
    if len(state) != d:
        raise CliError(f"{what} has {len(state)} spins, expected {d}")
    return state


def _fmt_state(s) -> str:
    return ",".join("%+d" % v for v in s)


def _level_summary(H, c) -> list[int]:
    return [len(local_minima(H, index_to_state(k, c.n))) for k in range(1 << c.n)]


# ---------------------------------------------------------------- subcommands

def cmd_synth(args) -> int:
    from .synth import synthesize

    c = read_truth_table(args.table)
    mode = LOCAL_FREE if args.no_local_minima else GLOBAL
    res = synthesize(c, mode, margin=args.margin, tol=args.tol)
    _section("result")
    print(f"status {res.status}")
    if not res.feasible:
        print("infeasible")
        return EXIT_INFEASIBLE
    H = res.hamiltonian
    print(f"l1_norm {float(res.l1_norm)!r}")
    print(f"margin {float(res.margin)!r}")
    mins = _level_summary(H, c)
    if all(k == 1 for k in mins):
        print("certified: 1 local minimum per input level")
    else:
        print(f"certified: encodes; local minima per input level {mins}")
    _section("hamiltonian")
    print(format_hamiltonian(H), end="")
    if args.output:
        write_hamiltonian(H, args.output)
        print(f"# wrote {args.output}")
    return EXIT_OK


def cmd_check(args) -> int:
    H = read_hamiltonian(args.hamiltonian)
    c = read_truth_table(args.table)
    if (H.n, H.m) != (c.n, c.m):
        raise CliError(f"Hamiltonian shape ({H.n},{H.m}) does not match circuit shape ({c.n},{c.m})")
    margin = encoding_margin(H, c)
    mins = _level_summary(H, c)
    _section("check")
    print(f"margin {float(margin)!r}")
    print(f"encodes {margin > args.tol}")
    print(f"local_minima_per_level {' '.join(map(str, mins))}")
    ok = margin > args.tol and (not args.no_local_minima or all(k == 1 for k in mins))
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_classify(args) -> int:
    from .classify import classify_shape

    rep = classify_shape(args.n, args.m, jobs=args.jobs, cache_dir=args.cache_dir)
    _section("report")
    print(rep.to_text(), end="")
    _section("csv")
    print(rep.to_csv(), end="")
    if rep.violations:
        print(f"# WARNING: {len(rep.violations)} type-0 circuits were infeasible")
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
        print(f"# wrote {args.csv}")
    if args.png:
        from .plotting import plot_classification

        plot_classification(rep, args.png)
        print(f"# wrote {args.png}")
    return EXIT_OK


def cmd_diagram(args) -> int:
    from .residual import ResidualPartition, write_legend, write_ppm

    points = None
    if args.hamiltonian:
        H = read_hamiltonian(args.hamiltonian)
        if H.m != 2:
            raise CliError("diagram needs a Hamiltonian with m = 2")
        J12 = float(H.J[0, 1])
        from .plotting import affine_images

        points = affine_images(H.linear, H.h, H.n)
    else:
        J12 = args.j12
    part = ResidualPartition.for_m2(J12)
    labels = part.rasterize(args.radius, args.resolution)
    prefix = Path(args.output)
    write_ppm(labels, prefix.with_suffix(".ppm"))
    write_legend(2, prefix.with_suffix(".legend.txt"))
    _section("diagram")
    print(f"J12 {J12!r}")
    for k in (-1, 0, 1, 2, 3):
        print(f"pixels label={k} {int((labels == k).sum())}")
    if points is not None:
        for p in points:
            print(f"image {float(p[0])!r} {float(p[1])!r}")
    print(f"# wrote {prefix.with_suffix('.ppm')} and {prefix.with_suffix('.legend.txt')}")
    if args.png:
        from .plotting import plot_partition

        plot_partition(labels, args.radius, args.png, title=f"J12 = {J12:g}", points=points)
        print(f"# wrote {args.png}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .dynamics import glauber_sample, greedy_descend

    H = read_hamiltonian(args.hamiltonian)
    x = _parse_state(args.input, H.n, "input")
    y0 = _parse_state(args.start, H.m, "start") if args.start else (-1,) * H.m
    _section("simulate")
    if args.mode == "greedy":
        traj = greedy_descend(H, x, y0, args.step_cap)
        print(f"terminal {_fmt_state(traj.final_state)} reason {traj.terminal_reason} steps {traj.steps}")
    else:
        target = _parse_state(args.target, H.m, "target") if args.target else None
        res = glauber_sample(H, x, y0, args.beta, args.steps, args.seed, target, args.burn_in)
        traj = res.trajectory
        for k, p in enumerate(res.occupancy):
            print(f"occupancy {_fmt_state(index_to_state(k, H.m))} {float(p)!r}")
        if target is not None:
            print(f"target_fraction {res.target_fraction!r}")
    _section("trajectory")
    text = traj.to_text()
    if args.dump:
        Path(args.dump).write_text(text)
        print(f"# wrote {args.dump}")
    else:
        print(text, end="")
    if args.png:
        from .plotting import plot_trajectory

        plot_trajectory(traj, args.png)
        print(f"# wrote {args.png}")
    return EXIT_OK


def cmd_refine(args) -> int:
    from .synth import refine_spanning_trees

    c = read_truth_table(args.table)
    results = refine_spanning_trees(c, max_iters=args.max_iters, tol=args.tol)
    _section("refine")
    print("iteration l1_norm margin certified")
    for i, r in enumerate(results):
        print(f"{i} {float(r.l1_norm)!r} {float(r.margin)!r} {r.certificate}")
    last = results[-1]
    print(f"stop_reason {last.metadata['stop_reason']}")
    print(f"l1_ratio {float(last.l1_norm / results[0].l1_norm)!r}")
    _section("hamiltonian")
    print(format_hamiltonian(last.hamiltonian), end="")
    if args.output:
        write_hamiltonian(last.hamiltonian, args.output)
        print(f"# wrote {args.output}")
    return EXIT_OK


def cmd_aux_search(args) -> int:
    from .synth import SearchExhausted, auxiliary_search

    c = read_truth_table(args.table)
    try:
        found = auxiliary_search(c, args.k, args.strategy, args.seed, args.trials, args.cap, args.jobs)
    except SearchExhausted as exc:
        _section("aux-search")
        print(f"not found: {exc}")
        return EXIT_INFEASIBLE
    _section("aux-search")
    if found is None:
        print(f"infeasible: no auxiliary map with k = {args.k}")
        return EXIT_INFEASIBLE
    g, res = found
    print(f"found k {g.k} after {res.metadata['candidates_tried']} candidates")
    _section("auxiliary map")
    print(cc.format_truth_table(g.as_circuit(c.n), args.format), end="")
    _section("hamiltonian")
    print(format_hamiltonian(res.hamiltonian), end="")
    if args.output:
        write_hamiltonian(res.hamiltonian, args.output)
        print(f"# wrote {args.output}")
    return EXIT_OK


def cmd_voronoi_build(args) -> int:
    from .voronoi import hamiltonian_from_voronoi, is_voronoi_solution, perturb_to_injective, read_embedding

    B = read_embedding(args.embedding)
    c = read_truth_table(args.table)
    _section("voronoi")
    if not is_voronoi_solution(c, B):
        print("not a Voronoi solution")
        return EXIT_INFEASIBLE
    if not B.is_injective():
        if not args.perturb:
            raise CliError("embedding is not injective on the output cube; pass --perturb")
        B = perturb_to_injective(c, B, seed=args.seed)
        print("perturbed to an injective embedding")
    H = hamiltonian_from_voronoi(c, B)
    margin = encoding_margin(H, c)
    print(f"margin {float(margin)!r}")
    print(f"encodes {margin > args.tol}")
    _section("hamiltonian")
    print(format_hamiltonian(H), end="")
    if args.output:
        write_hamiltonian(H, args.output)
        print(f"# wrote {args.output}")
    return EXIT_OK if margin > args.tol else EXIT_INFEASIBLE


def cmd_table(args) -> int:
    """Print a named circuit as a truth table."""
    named = {"and": cc.AND, "or": cc.OR, "xor": cc.XOR, "copy": cc.COPY,
             "xor_and": cc.XOR_AND, "xor_xor": cc.XOR_XOR, "identity2": cc.IDENTITY2}
    c = named[args.name]
    text = cc.format_truth_table(c, args.format)
    if args.output:
        Path(args.output).write_text(text)
        print(f"# wrote {args.output}")
    else:
        print(text, end="")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isingcircuits", description="Ising circuit synthesis and certification")
    p.add_argument("--tol", type=float, default=TOL, help="strict-margin tolerance for certification (default %(default)g)")
    p.add_argument("--format", choices=[cc.SPIN, cc.BOOLEAN], default=cc.SPIN,
                   help="convention for truth tables written by the tool (default %(default)s)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="truth table -> L1-minimal Hamiltonian")
    s.add_argument("table")
    s.add_argument("--no-local-minima", action="store_true", help="also forbid spurious local minima")
    s.add_argument("--margin", type=float, default=1.0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("check", help="certify a Hamiltonian against a truth table")
    s.add_argument("hamiltonian")
    s.add_argument("table")
    s.add_argument("--no-local-minima", action="store_true", help="also require one local minimum per level")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("classify", help="type and feasibility counts for a whole shape")
    s.add_argument("n", type=int)
    s.add_argument("m", type=int)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--cache-dir")
    s.add_argument("--csv")
    s.add_argument("--png")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("diagram", help="raster of the m=2 minimizing partition")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--j12", type=float)
    g.add_argument("--hamiltonian", help="take J from this m=2 Hamiltonian and overlay its input images")
    s.add_argument("--radius", type=float, default=3.0)
    s.add_argument("--resolution", type=int, default=200)
    s.add_argument("-o", "--output", default="partition", help="prefix for .ppm and .legend.txt")
    s.add_argument("--png")
    s.set_defaults(func=cmd_diagram)

    s = sub.add_parser("simulate", help="greedy or Glauber dynamics at a pinned input")
    s.add_argument("hamiltonian")
    s.add_argument("--input", required=True, help="input spins, e.g. +1,-1")
    s.add_argument("--start", help="initial output spins (default all -1)")
    s.add_argument("--mode", choices=["greedy", "glauber"], default="greedy")
    s.add_argument("--step-cap", type=int)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=10000)
    s.add_argument("--burn-in", type=int, default=0)
    s.add_argument("--target")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dump")
    s.add_argument("--png")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("refine", help="spanning-tree refinement of the local-minimum-free solution")
    s.add_argument("table")
    s.add_argument("--max-iters", type=int, default=20)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_refine)

    s = sub.add_parser("aux-search", help="search for k auxiliary spins that make the circuit feasible")
    s.add_argument("table")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--strategy", choices=["exhaustive", "random"], default="exhaustive")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--cap", type=int, help="candidate budget (default ISING_AUX_CAP)")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_aux_search)

    s = sub.add_parser("voronoi-build", help="embedding + truth table -> Hamiltonian")
    s.add_argument("embedding")
    s.add_argument("table")
    s.add_argument("--perturb", action="store_true", help="perturb a non-injective embedding first")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_voronoi_build)

    s = sub.add_parser("table", help="print a named circuit as a truth table")
    s.add_argument("name", choices=["and", "or", "xor", "copy", "xor_and", "xor_xor", "identity2"])
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _echo_config(args)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
    except cc.TruthTableFormatError as exc:
        print(f"error: malformed truth table: {exc}", file=sys.stderr)
    except HamiltonianError as exc:
        print(f"error: Hamiltonian: {exc}", file=sys.stderr)
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
    except LpError as exc:
        print(f"error: LP solver: {exc}", file=sys.stderr)
    except (CliError, CircuitError, ValueError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
