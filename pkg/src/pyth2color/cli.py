"""Command-line front end.

Exit codes: 0 the requested fact was established, 1 a violation (or a
verdict other than the expected one), 2 indeterminate, 3 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import platform
import sys
import time

import numpy as np

from . import __version__
from ._accel import HAS_JIT
from .cnf import RemapTable, decode_model, emit, encode, parse, split as split_cnf
from .hypergraph import bfs_levels, build, remove_pendants, restore_coloring, write_level_csv
from .orchestrate import PoolConfig, run_campaign
from .solver import ExternalSolverError, Verdict, solve, solve_external
from .split import choose_bfs, choose_random, independence_score
from .structure import (
    check_bicycle_antipode_theorem,
    check_lower_sum_property,
    check_sum_property,
    check_upper_sum_property,
    find_bicycles,
    find_sub_sts,
)
from .triples import enumerate_primitive, enumerate_triples, load_triples, save_triples
from .verify import count_colors, render, verify, violations_json, write_ppm

log = logging.getLogger("pyth2color")

EXIT_OK, EXIT_VIOLATION, EXIT_INDETERMINATE, EXIT_USAGE = 0, 1, 2, 3
SOLVER_ENV = "PYTH2COLOR_SOLVER"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- helpers -----------------------------------------------------------------


def _write_json(path, data) -> None:
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def _load_coloring(path) -> dict[int, bool]:
    with open(path) as f:
        data = json.load(f)
    return {int(k): bool(v) for k, v in data.items()}


def _dump_coloring(coloring) -> dict[str, bool]:
    return {str(k): bool(v) for k, v in sorted(coloring.items())}


def _solver_choice(name: str) -> str:
    if name == "external":
        path = os.environ.get(SOLVER_ENV)
        if not path:
            raise UsageError(f"--solver external needs ${SOLVER_ENV} set to a solver binary")
        return path
    return name


class RunDir:
    """Collects artifacts and writes ``manifest.json`` describing the run."""

    def __init__(self, path: str | None, command: str, args: argparse.Namespace, argv: list[str]):
        self.path = path
        self.argv = list(argv)
        self.command = command
        self.params = {k: v for k, v in vars(args).items() if k not in ("func",) and not callable(v)}
        self.artifacts: list[str] = []
        self.result: dict = {}
        if path:
            os.makedirs(path, exist_ok=True)

    def file(self, name: str) -> str:
        full = os.path.join(self.path, name) if self.path else name
        self.artifacts.append(name)
        return full

    def finish(self, exit_code: int) -> int:
        if not self.path:
            return exit_code
        manifest = {
            "command": self.command,
            "argv": self.argv,
            "parameters": self.params,
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "jit": HAS_JIT,
            "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "artifacts": self.artifacts,
            "result": self.result,
            "exit_code": exit_code,
        }
        _write_json(os.path.join(self.path, "manifest.json"), manifest)
        return exit_code


def _out(args, run: RunDir, default_name: str) -> str:
    if getattr(args, "out", None):
        run.artifacts.append(args.out)
        return args.out
    return run.file(default_name)


# -- commands ----------------------------------------------------------------


def cmd_gen(args, run: RunDir) -> int:
    triples = enumerate_primitive(args.bound) if args.primitive else enumerate_triples(args.bound)
    save_triples(triples, _out(args, run, "triples.json"))
    run.result = {"triples": len(triples)}
    print(f"{len(triples)} triples with c <= {args.bound}")
    return EXIT_OK


def cmd_reduce(args, run: RunDir) -> int:
    sys_ = build(load_triples(args.triples))
    reduced, trace = remove_pendants(sys_)
    save_triples(reduced.edges, _out(args, run, "reduced.json"))
    trace_path = args.trace or run.file("trace.json")
    _write_json(trace_path, [{"edge": list(e), "degree_one": sorted(free)} for e, free in trace.removed])
    run.result = {"edges": len(sys_), "reduced_edges": len(reduced), "removed": len(trace)}
    print(f"{len(sys_)} edges -> {len(reduced)} after removing {len(trace)} pendants")
    return EXIT_OK


def cmd_encode(args, run: RunDir) -> int:
    triples = load_triples(args.triples)
    sys_ = build(triples)
    bound = args.bound if args.bound is not None else max(sys_.vertices, default=0)
    doc, table = encode(sys_, bound)
    with open(_out(args, run, "formula.cnf"), "w") as f:
        f.write(emit(doc))
    _write_json(args.remap or run.file("remap.json"), table.to_json())
    run.result = {"variables": doc.var_count, "clauses": doc.clause_count}
    return EXIT_OK


def _load_doc_and_table(args):
    with open(args.cnf) as f:
        doc = parse(f.read())
    table = None
    if getattr(args, "remap", None):
        with open(args.remap) as f:
            table = RemapTable.from_json(json.load(f))
    return doc, table


def cmd_split(args, run: RunDir) -> int:
    doc, table = _load_doc_and_table(args)
    if table is None:
        raise UsageError("split needs --remap")
    if args.specials:
        specials = [int(x) for x in args.specials.split(",")]
    else:
        if not args.triples:
            raise UsageError("split without --specials needs --triples to choose them")
        sys_ = build(load_triples(args.triples))
        plan = choose_bfs(sys_, args.m) if args.method == "bfs" else choose_random(sys_, args.m, args.seed)
        specials = list(plan.specials)
    out_dir = args.out_dir or run.path or "."
    os.makedirs(out_dir, exist_ok=True)
    cubes = split_cnf(doc, table, specials)
    for i, (cube, cdoc) in enumerate(cubes):
        with open(os.path.join(out_dir, f"cube_{i}.cnf"), "w") as f:
            f.write(emit(cdoc))
        run.artifacts.append(f"cube_{i}.cnf")
    run.result = {"specials": specials, "cubes": len(cubes)}
    print(f"wrote {len(cubes)} cubes on specials {specials} to {out_dir}")
    return EXIT_OK


def _verdict_exit(verdict: Verdict, expect: str | None) -> int:
    if verdict is Verdict.INDETERMINATE:
        return EXIT_INDETERMINATE
    if expect and verdict.value.lower() != expect:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_solve(args, run: RunDir) -> int:
    doc, table = _load_doc_and_table(args)
    solver = _solver_choice(args.solver)
    if solver == "embedded":
        res = solve(doc, max_conflicts=args.max_conflicts, time_limit=args.time_limit, seed=args.seed)
    else:
        res = solve_external(doc, solver, timeout=args.time_limit)
    print(f"s {'SATISFIABLE' if res.is_sat else res.verdict.value}")
    if res.is_sat and table is not None:
        coloring = decode_model(res.model, table)
        _write_json(args.coloring_out or run.file("coloring.json"), _dump_coloring(coloring))
    run.result = {"verdict": res.verdict.value, "stats": res.stats.as_dict(), "diagnostics": res.diagnostics}
    return _verdict_exit(res.verdict, args.expect)


def cmd_campaign(args, run: RunDir) -> int:
    names = sorted(
        (n for n in os.listdir(args.dir) if n.startswith("cube_") and n.endswith(".cnf")),
        key=lambda n: int(n[5:-4]),
    )
    if not names:
        raise UsageError(f"no cube_<i>.cnf files in {args.dir}")
    from .cnf import Cube

    cubes = []
    for n in names:
        with open(os.path.join(args.dir, n)) as f:
            cubes.append((Cube(), parse(f.read())))
    config = PoolConfig(
        pool_size=args.pool,
        max_conflicts=args.max_conflicts,
        time_limit=args.time_limit,
        solver=_solver_choice(args.solver),
        seed=args.seed,
    )
    result = run_campaign(cubes, config)
    result.write_log(run.file("campaign.jsonl"))
    summary = result.summary()
    if result.winner is not None:
        summary["winning_file"] = names[result.winner]
        if args.remap:
            with open(args.remap) as f:
                table = RemapTable.from_json(json.load(f))
            _write_json(run.file("coloring.json"), _dump_coloring(decode_model(result.model, table)))
    run.result = summary
    print(f"campaign {result.outcome.value}" + (f" (cube {names[result.winner]})" if result.winner is not None else ""))
    return _verdict_exit(result.outcome, args.expect)


def cmd_verify(args, run: RunDir) -> int:
    coloring = _load_coloring(args.coloring)
    bad = verify(args.bound, coloring)
    with open(_out(args, run, "violations.json"), "w") as f:
        f.write(violations_json(bad) + "\n")
    run.result = {"violations": len(bad)}
    print(f"{len(bad)} violations")
    return EXIT_OK if not bad else EXIT_VIOLATION


def cmd_render(args, run: RunDir) -> int:
    coloring = _load_coloring(args.coloring) if args.coloring else {}
    img = render(args.bound, coloring, args.height)
    write_ppm(_out(args, run, "coloring.ppm"), img)
    run.result = count_colors(img)
    return EXIT_OK


def cmd_analyze(args, run: RunDir) -> int:
    sys_ = build(load_triples(args.triples)) if args.triples else build(enumerate_triples(args.bound))
    what = args.what
    if what in ("sum", "upper-sum", "lower-sum"):
        check = {"sum": check_sum_property, "upper-sum": check_upper_sum_property, "lower-sum": check_lower_sum_property}[what]
        rep = check(sys_)
        run.result = rep.as_dict()
        print(json.dumps(rep.as_dict()))
        return EXIT_OK if rep.holds else EXIT_VIOLATION
    if what == "bicycles":
        bikes = find_bicycles(sys_, args.max_k)
        ok = check_bicycle_antipode_theorem(sys_, bikes)
        run.result = {"bicycles": [b.as_dict() for b in bikes], "antipodes_never_maximal": ok}
        _write_json(run.file("bicycles.json"), run.result)
        print(f"{len(bikes)} bicycles with k <= {args.max_k}; antipodes never the two largest points: {ok}")
        return EXIT_OK if ok else EXIT_VIOLATION
    if what == "sub-sts":
        found = find_sub_sts(sys_, args.order, time_limit=args.time_limit)
        run.result = {"order": args.order, "found": [list(e) for e in found.edges] if found else None}
        if found is None:
            print("none found")
            return EXIT_OK
        print(f"found: {[list(e) for e in found.edges]}")
        return EXIT_VIOLATION
    if what == "bfs":
        base = remove_pendants(sys_)[0] if args.reduce else sys_
        if not base.edges:
            raise UsageError("no edges left to search")
        levels = bfs_levels(base, base.edges[0])
        write_level_csv(levels, _out(args, run, "bfs_levels.csv"))
        run.result = {"seed": list(levels.seed), "sizes": levels.sizes, "unreachable": len(levels.unreachable)}
        print(" ".join(map(str, levels.sizes)))
        return EXIT_OK
    if what == "independence":
        base = remove_pendants(sys_)[0] if args.reduce else sys_
        plan = choose_bfs(base, args.m) if args.method == "bfs" else choose_random(base, args.m, args.seed)
        rep = independence_score(
            base, plan, trials=args.trials, removal_fraction=args.removal_fraction,
            cost_metric=args.metric, seed=args.seed, max_conflicts=args.max_conflicts,
        )
        with open(run.file("independence.json"), "w") as f:
            f.write(rep.to_json())
        rep.write_csv(run.file("independence.csv"))
        run.result = rep.as_dict()
        print(f"variance of per-assignment mean {rep.metric}: {rep.variance}")
        return EXIT_OK if not rep.incomplete else EXIT_INDETERMINATE
    raise UsageError(f"unknown analysis {what}")


def cmd_pipeline(args, run: RunDir) -> int:
    """gen -> reduce -> encode -> split -> campaign -> decode -> restore -> verify -> render."""
    N = args.bound
    triples = enumerate_triples(N)
    save_triples(triples, run.file("triples.json"))
    full = build(triples)
    if args.reduce:
        work, trace = remove_pendants(full)
    else:
        work, trace = full, None
    save_triples(work.edges, run.file("reduced.json"))
    doc, table = encode(work, N)
    with open(run.file("formula.cnf"), "w") as f:
        f.write(emit(doc))
    _write_json(run.file("remap.json"), table.to_json())
    solver = _solver_choice(args.solver)
    stage: dict = {"edges": len(full), "solved_edges": len(work)}

    if not work.edges:
        model_coloring: dict[int, bool] = {}
        outcome = Verdict.SAT
    elif args.m > 0:
        plan = choose_bfs(work, args.m) if args.method == "bfs" else choose_random(work, args.m, args.seed)
        stage["plan"] = plan.as_dict()
        cubes = split_cnf(doc, table, plan.specials)
        cube_dir = os.path.join(run.path, "cubes")
        os.makedirs(cube_dir, exist_ok=True)
        for i, (_, cdoc) in enumerate(cubes):
            with open(os.path.join(cube_dir, f"cube_{i}.cnf"), "w") as f:
                f.write(emit(cdoc))
        run.artifacts.append("cubes/")
        config = PoolConfig(
            pool_size=args.pool, max_conflicts=args.max_conflicts, time_limit=args.time_limit,
            solver=solver, seed=args.seed,
        )
        result = run_campaign(cubes, config)
        result.write_log(run.file("campaign.jsonl"))
        stage["campaign"] = {k: v for k, v in result.summary().items() if k != "cubes"}
        outcome = result.outcome
        model_coloring = decode_model(result.model, table) if result.model else {}
    else:
        if solver == "embedded":
            res = solve(doc, max_conflicts=args.max_conflicts, time_limit=args.time_limit, seed=args.seed)
        else:
            res = solve_external(doc, solver, timeout=args.time_limit)
        stage["solve"] = {"verdict": res.verdict.value, "stats": res.stats.as_dict()}
        outcome = res.verdict
        model_coloring = decode_model(res.model, table) if res.model else {}

    stage["outcome"] = outcome.value
    run.result = stage
    if outcome is not Verdict.SAT:
        print(f"pipeline N={N}: {outcome.value}")
        return EXIT_INDETERMINATE if outcome is Verdict.INDETERMINATE else EXIT_VIOLATION

    coloring = restore_coloring(trace, model_coloring, work) if trace is not None else model_coloring
    _write_json(run.file("coloring.json"), _dump_coloring(coloring))
    bad = verify(N, coloring)
    with open(run.file("violations.json"), "w") as f:
        f.write(violations_json(bad) + "\n")
    img = render(N, coloring, args.height)
    write_ppm(run.file("coloring.ppm"), img)
    stage["violations"] = len(bad)
    stage["pixels"] = count_colors(img)
    print(f"pipeline N={N}: SAT, {len(bad)} violations, artifacts in {run.path}")
    return EXIT_OK if not bad else EXIT_VIOLATION


# -- parser ------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pyth2color", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--run-dir", help="directory for artifacts and manifest.json")
        return sp

    def solver_opts(sp):
        sp.add_argument("--solver", default="embedded", help=f"'embedded', 'external' (${SOLVER_ENV}) or a binary path")
        sp.add_argument("--max-conflicts", type=_positive)
        sp.add_argument("--time-limit", type=float)
        sp.add_argument("--seed", type=int, default=0)

    sp = add("gen", cmd_gen, "enumerate triples with c <= bound")
    sp.add_argument("--bound", type=_nonneg, required=True)
    sp.add_argument("--primitive", action="store_true")
    sp.add_argument("--out")

    sp = add("reduce", cmd_reduce, "remove pendant triples")
    sp.add_argument("--triples", required=True)
    sp.add_argument("--out")
    sp.add_argument("--trace")

    sp = add("encode", cmd_encode, "write the DIMACS CNF of a triple list")
    sp.add_argument("--triples", required=True)
    sp.add_argument("--bound", type=_nonneg)
    sp.add_argument("--out")
    sp.add_argument("--remap")

    sp = add("split", cmd_split, "write the 2^m cube files")
    sp.add_argument("--cnf", required=True)
    sp.add_argument("--remap", required=True)
    sp.add_argument("--specials", help="comma-separated original integers")
    sp.add_argument("--triples", help="triple list to choose specials from")
    sp.add_argument("--m", type=_positive, default=2)
    sp.add_argument("--method", choices=("bfs", "random"), default="bfs")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-dir")

    sp = add("solve", cmd_solve, "solve one CNF file")
    sp.add_argument("--cnf", required=True)
    sp.add_argument("--remap")
    sp.add_argument("--coloring-out")
    sp.add_argument("--expect", choices=("sat", "unsat"))
    solver_opts(sp)

    sp = add("campaign", cmd_campaign, "solve a directory of cube files with early termination")
    sp.add_argument("--dir", required=True)
    sp.add_argument("--remap")
    sp.add_argument("--pool", type=_positive, default=10)
    sp.add_argument("--expect", choices=("sat", "unsat"))
    solver_opts(sp)

    sp = add("verify", cmd_verify, "check a coloring against every triple <= bound")
    sp.add_argument("--bound", type=_nonneg, required=True)
    sp.add_argument("--coloring", required=True)
    sp.add_argument("--out")

    sp = add("render", cmd_render, "draw a coloring as a P6 pixmap")
    sp.add_argument("--bound", type=_positive, required=True)
    sp.add_argument("--coloring")
    sp.add_argument("--height", type=_positive)
    sp.add_argument("--out")

    sp = add("analyze", cmd_analyze, "structure checks, BFS levels, independence")
    sp.add_argument(
        "what", choices=("sum", "upper-sum", "lower-sum", "bicycles", "sub-sts", "bfs", "independence")
    )
    sp.add_argument("--bound", type=_nonneg, default=200)
    sp.add_argument("--triples")
    sp.add_argument("--max-k", type=int, default=2)
    sp.add_argument("--order", type=int, default=7)
    sp.add_argument("--time-limit", type=float)
    sp.add_argument("--reduce", action="store_true")
    sp.add_argument("--m", type=_positive, default=2)
    sp.add_argument("--method", choices=("bfs", "random"), default="random")
    sp.add_argument("--trials", type=_positive, default=10)
    sp.add_argument("--removal-fraction", type=float, default=0.1)
    sp.add_argument("--metric", choices=("decisions", "time"), default="decisions")
    sp.add_argument("--max-conflicts", type=_positive)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = add("pipeline", cmd_pipeline, "gen, reduce, encode, split, campaign, restore, verify, render")
    sp.add_argument("--bound", type=_positive, required=True)
    sp.add_argument("--reduce", action="store_true")
    sp.add_argument("--m", type=_nonneg, default=2)
    sp.add_argument("--method", choices=("bfs", "random"), default="bfs")
    sp.add_argument("--pool", type=_positive, default=4)
    sp.add_argument("--height", type=_positive)
    solver_opts(sp)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    run_dir = args.run_dir
    if args.command == "pipeline" and not run_dir:
        run_dir = f"run-N{args.bound}-{time.strftime('%Y%m%d-%H%M%S')}"
    rd = RunDir(run_dir, args.command, args, argv)
    try:
        code = args.func(args, rd)
    except (UsageError, ExternalSolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    return rd.finish(code)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
