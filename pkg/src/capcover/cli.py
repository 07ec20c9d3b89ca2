"""``capcover`` command line: solve, gen, oracle, verify, bench."""
from __future__ import annotations

import argparse
import csv
import logging
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import io
from .generators import FAMILIES, generate
from .model import Infeasible, Instance, SolverConfig, Trace
from .oracle import MAX_K, MAX_K_ROOTED, MAX_N, MAX_N_ROOTED, NoRootAssignment, TooLarge, exact_caprmmtc, exact_capmmtc
from .search import search_solve
from .verify import check_solution

CSV_FIELDS = ["n", "k", "lambda", "family", "seed", "makespan", "opt", "ratio", "iterations", "runtime_ms"]


def _setup_logging():
    level = os.environ.get("CAPCOVER_LOG", "off").lower()
    levels = {"off": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(stream=sys.stderr, level=levels.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _config(args) -> SolverConfig:
    return SolverConfig(gamma_s=args.gamma_s, beta=args.beta, epsilon=args.epsilon, seed=args.seed)


def _add_solver_flags(p):
    p.add_argument("--gamma-s", type=float, default=4.0, help="Steiner acceptance factor")
    p.add_argument("--beta", type=float, default=4.0, help="uncapacitated subroutine factor")
    p.add_argument("--epsilon", type=float, default=0.05, help="relative width of the final guess bracket")
    p.add_argument("--seed", type=int, default=0)


def _load_instance(path, args):
    inst, meta = io.read_instance(path)
    k = args.k if getattr(args, "k", None) is not None else inst.k
    lam = args.lam if getattr(args, "lam", None) is not None else inst.lam
    roots = inst.roots if getattr(args, "rooted", False) else None
    if getattr(args, "rooted", False) and roots is None:
        raise ValueError("--rooted needs an instance with roots")
    return Instance(inst.graph, k, lam, roots), meta


def cmd_solve(args) -> int:
    try:
        inst, _ = _load_instance(args.instance, args)
        cfg = _config(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    start = time.perf_counter()
    try:
        sol = search_solve(inst, cfg)
    except Infeasible as exc:
        print(f"infeasible: {exc}")
        return 2
    elapsed = (time.perf_counter() - start) * 1000
    text = io.dumps_solution(sol, elapsed if args.timing else None)
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    print(f"makespan {sol.makespan:.6g} trees {len(sol.trees)} t_star {sol.t_star:.6g}",
          file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_gen(args) -> int:
    try:
        if args.k * args.lam < args.n:
            raise ValueError(f"k*lambda = {args.k * args.lam} < n = {args.n}")
        inst, meta = generate(args.family, args.n, args.k, args.lam, args.seed, args.rooted, args.clusters)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = io.dumps_instance(inst, meta)
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_oracle(args) -> int:
    try:
        inst, _ = _load_instance(args.instance, args)
        opt, witness = exact_caprmmtc(inst) if inst.rooted else exact_capmmtc(inst)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"opt {opt!r}")
    for t in witness.trees:
        root = f" root {t.root}" if t.root is not None else ""
        print(f"part {sorted(t.cover)}{root} cost {t.cost!r}")
    return 0


def cmd_verify(args) -> int:
    try:
        inst, _ = io.read_instance(args.instance)
        sol = io.read_solution(args.solution)
        if not sol.rooted:
            inst = Instance(inst.graph, inst.k, inst.lam)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rep = check_solution(inst, sol, rooted=sol.rooted)
    for line in rep.lines():
        print(line)
    return 0 if rep.ok else 3


def _bench_row(job):
    family, n, k, lam, seed, rooted, cfg = job
    inst, _ = generate(family, n, k, lam, seed, rooted)
    trace = Trace()
    start = time.perf_counter()
    sol = search_solve(inst, cfg, trace)
    elapsed = (time.perf_counter() - start) * 1000
    opt = None
    small = (n <= MAX_N_ROOTED and k <= MAX_K_ROOTED) if rooted else (n <= MAX_N and k <= MAX_K)
    if small:
        try:
            opt = (exact_caprmmtc(inst) if rooted else exact_capmmtc(inst))[0]
        except (TooLarge, NoRootAssignment):
            opt = None
    if opt is None:
        ratio = ""
    elif opt > 0:
        ratio = f"{sol.makespan / opt:.6f}"
    else:
        ratio = "1.000000" if sol.makespan == 0 else "inf"
    return [n, k, lam, family, seed, f"{sol.makespan:.6f}", "" if opt is None else f"{opt:.6f}", ratio,
            sol.refinements, f"{elapsed:.1f}"]


def bench_jobs(families, n_min, n_max, k_max, lam_max, count, seed, rooted, cfg):
    """Deterministic list of bench instances; ``k * lambda >= n`` always."""
    rng = random.Random(seed)
    jobs = []
    for i in range(count):
        family = families[i % len(families)]
        n = rng.randint(n_min, n_max)
        options = [(k, lam) for k in range(1, k_max + 1) for lam in range(1, lam_max + 1)
                   if k * lam >= n and (not rooted or (k <= n and (lam > 1 or k == n)))]
        if not options:
            raise ValueError(f"no (k, lambda) with k <= {k_max}, lambda <= {lam_max} can cover n={n}")
        k, lam = rng.choice(options)
        jobs.append((family, n, k, lam, seed * 100003 + i, rooted, cfg))
    return jobs


def cmd_bench(args) -> int:
    if args.out and os.path.exists(args.out) and not args.force:
        print(f"error: {args.out} exists; pass --force to overwrite", file=sys.stderr)
        return 1
    families = args.families.split(",")
    try:
        if any(f not in FAMILIES for f in families):
            raise ValueError(f"unknown family in {args.families!r}")
        cfg = _config(args)
        jobs = bench_jobs(families, args.n_min, args.n_max, args.k_max, args.lambda_max, args.count,
                          args.seed, args.rooted, cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_row, jobs))
    else:
        rows = [_bench_row(j) for j in jobs]
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capcover", description="Capacitated min-max tree cover tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="approximate an instance")
    p.add_argument("instance")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--rooted", action="store_true")
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true", help="record runtime in the solution header")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rooted", action="store_true")
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="exact optimum of a tiny instance")
    p.add_argument("instance")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--rooted", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="check a solution file against its instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="generator sweep to CSV")
    p.add_argument("--families", default=",".join(FAMILIES))
    p.add_argument("--n-min", type=int, default=5)
    p.add_argument("--n-max", type=int, default=9)
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--lambda-max", type=int, default=5)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--rooted", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
