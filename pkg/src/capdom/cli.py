"""Command-line entry point.

    capdom solve --algo <name> [flags] <instance>
    capdom verify --model <m> <instance> <solution>
    capdom gen random|mcq-reduce [flags]
    capdom td compute|validate|nice [flags]
    capdom bench [flags]

Exit codes: 0 success / verification PASS, 1 verification FAIL,
2 usage error, 3 infeasible instance, 4 search budget exhausted.
"""
from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from . import baker, fileio, greedy, hardness, oracle, tddp, treewidth
from .core import (
    CapdomError,
    DemandModel,
    InfeasibleInstance,
    Instance,
    ParseError,
    Solution,
    random_instance,
    verify_solution,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4

ALGOS = (
    "greedy-unsplit",
    "greedy-split",
    "greedy-unweighted",
    "dp",
    "baker",
    "oracle",
)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def _model_for(algo: str, flag: str | None) -> DemandModel:
    forced = {
        "greedy-unsplit": DemandModel.UNSPLITTABLE,
        "greedy-split": DemandModel.SPLITTABLE,
        "greedy-unweighted": DemandModel.SPLITTABLE,
    }
    if algo in forced:
        if flag is not None and DemandModel(flag) is not forced[algo]:
            raise _Usage(f"--model {flag} conflicts with --algo {algo}")
        return forced[algo]
    return DemandModel(flag) if flag else DemandModel.UNSPLITTABLE


class _Usage(Exception):
    pass


def _solve(args) -> int:
    inst = fileio.load_instance(_read(args.instance))
    model = _model_for(args.algo, args.model)
    trace_lines: list[str] = []
    comments: list[str] = []
    if args.algo == "greedy-unsplit":
        result = greedy.greedy_unsplittable(inst)
        solution, trace_lines = result.solution, result.trace_lines()
    elif args.algo == "greedy-split":
        result = greedy.greedy_splittable(inst)
        solution, trace_lines = result.solution, result.trace_lines()
    elif args.algo == "greedy-unweighted":
        result = greedy.greedy_unweighted_splittable(inst)
        solution, trace_lines = result.solution, result.trace_lines()
    elif args.algo == "dp":
        if args.td:
            td = treewidth.load_td(_read(args.td))
            report = treewidth.validate_td(inst, td)
            if not report.passed:
                raise CapdomError(f"supplied decomposition is invalid: {report}")
        else:
            td = treewidth.heuristic_decomposition(inst)
        solution = tddp.solve_td(inst, treewidth.make_nice(td), model)
    elif args.algo == "baker":
        if args.k is None:
            raise _Usage("--algo baker requires --k")
        result = baker.baker_solve(inst, args.k, model)
        solution = result.solution
        for comp, costs in enumerate(result.shift_costs):
            for r, cost in enumerate(costs):
                comments.append(f"shift component={comp} r={r} cost={cost}")
    elif args.algo == "oracle":
        budget = oracle.SearchBudget(max_nodes=args.budget)
        solution = oracle.exact_solve(inst, model, budget)
    else:
        raise _Usage(f"unknown algorithm {args.algo}")

    report = verify_solution(inst, solution, model)
    if not report.passed:
        sys.stderr.write(f"internal error: produced solution failed verification\n{report}\n")
        return EXIT_FAIL
    _emit(
        fileio.save_solution(
            solution,
            model,
            trace_lines=trace_lines if args.trace else None,
            comments=comments or None,
        ),
        args.output,
    )
    return EXIT_OK


def _verify(args) -> int:
    inst = fileio.load_instance(_read(args.instance))
    solution, file_model = fileio.load_solution(_read(args.solution))
    model = DemandModel(args.model) if args.model else file_model
    report = verify_solution(inst, solution, model)
    sys.stdout.write(str(report) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def _gen(args) -> int:
    if args.kind == "random":
        inst = random_instance(
            args.n, args.edge_prob, args.max_w, args.max_c, args.max_d, args.seed
        )
        _emit(fileio.save_instance(inst), args.output)
        return EXIT_OK
    cq = hardness.load_clique_instance(_read(args.clique))
    gadget = hardness.reduce(cq)
    _emit(
        fileio.save_instance(gadget.instance, comments=[f"budget {gadget.budget}"]),
        args.output,
    )
    roles_path = args.roles
    if roles_path is None and args.output is not None:
        roles_path = args.output + ".roles"
    if roles_path is not None:
        _emit("\n".join(hardness.role_lines(gadget)) + "\n", roles_path)
    return EXIT_OK


def _td(args) -> int:
    inst = fileio.load_instance(_read(args.instance))
    if args.action == "compute":
        td = treewidth.heuristic_decomposition(inst)
        _emit(treewidth.save_td(td, inst.n), args.output)
        return EXIT_OK
    if args.action == "validate":
        td = treewidth.load_td(_read(args.td_file))
        report = treewidth.validate_td(inst, td)
        sys.stdout.write(str(report) + "\n")
        return EXIT_OK if report.passed else EXIT_FAIL
    td = (
        treewidth.load_td(_read(args.td_file))
        if args.td_file
        else treewidth.heuristic_decomposition(inst)
    )
    report = treewidth.validate_td(inst, td)
    if not report.passed:
        raise CapdomError(f"decomposition is invalid: {report}")
    ntd = treewidth.make_nice(td)
    projected = treewidth.project_nice(ntd)
    _emit(treewidth.save_td(projected, inst.n), args.output)
    return EXIT_OK


def _harmonic(n: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


def _bench(args) -> int:
    model = DemandModel(args.model)
    algo = args.algo
    if algo is None:
        algo = "greedy-unsplit" if model is DemandModel.UNSPLITTABLE else "greedy-split"
    if _model_for(algo, None) is not model and algo != "greedy-unweighted":
        raise _Usage(f"--algo {algo} does not solve the {model.value} model")
    if algo == "greedy-unweighted":
        if model is not DemandModel.SPLITTABLE:
            raise _Usage("greedy-unweighted benches the split model")
        if args.max_w != 1:
            raise _Usage("greedy-unweighted requires --max-w 1")
    bound_of = {
        "greedy-unsplit": lambda h: h,
        "greedy-split": lambda h: 4 * h + 2,
        "greedy-unweighted": lambda h: 2 * h + 1,
    }[algo]
    runner = {
        "greedy-unsplit": greedy.greedy_unsplittable,
        "greedy-split": greedy.greedy_splittable,
        "greedy-unweighted": greedy.greedy_unweighted_splittable,
    }[algo]

    rng = random.Random(args.seed)
    rows = ["index,n,m,algo,model,cost,opt,opt_algo,ratio,bound"]
    for index in range(args.batch):
        inst = random_instance(
            args.n,
            args.edge_prob,
            args.max_w,
            args.max_c,
            args.max_d,
            rng.randrange(2**32),
        )
        cost = runner(inst).solution.cost
        if args.n <= args.oracle_threshold:
            opt_algo = "oracle"
            opt = oracle.exact_solve(inst, model, oracle.SearchBudget(args.budget)).cost
        else:
            opt_algo = "dp"
            td = treewidth.heuristic_decomposition(inst)
            opt = tddp.solve_td(inst, treewidth.make_nice(td), model).cost
        ratio = 1.0 if opt == 0 else cost / opt
        bound = float(bound_of(_harmonic(args.n)))
        rows.append(
            f"{index},{inst.n},{len(inst.edges)},{algo},{model.value},"
            f"{cost},{opt},{opt_algo},{ratio:.6f},{bound:.6f}"
        )
    _emit("\n".join(rows) + "\n", args.output)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capdom", description="Soft-capacitated domination toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run a solver on an instance file")
    solve.add_argument("--algo", required=True, choices=ALGOS)
    solve.add_argument("--model", choices=[m.value for m in DemandModel])
    solve.add_argument("--k", type=int, help="band width for the shifting scheme")
    solve.add_argument("--td", help="tree decomposition file for --algo dp")
    solve.add_argument("--trace", action="store_true", help="append iteration trace lines")
    solve.add_argument("--budget", type=int, default=5_000_000, help="oracle node limit")
    solve.add_argument("-o", "--output")
    solve.add_argument("instance")

    verify = sub.add_parser("verify", help="check a solution file")
    verify.add_argument("--model", choices=[m.value for m in DemandModel])
    verify.add_argument("instance")
    verify.add_argument("solution")

    gen = sub.add_parser("gen", help="generate instances")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    gen_random = gen_sub.add_parser("random")
    gen_random.add_argument("--n", type=int, required=True)
    gen_random.add_argument("--edge-prob", type=float, default=0.3)
    gen_random.add_argument("--max-w", type=int, default=5)
    gen_random.add_argument("--max-c", type=int, default=5)
    gen_random.add_argument("--max-d", type=int, default=5)
    gen_random.add_argument("--seed", type=int, required=True)
    gen_random.add_argument("-o", "--output")
    gen_mcq = gen_sub.add_parser("mcq-reduce")
    gen_mcq.add_argument("--roles", help="sidecar file for node roles")
    gen_mcq.add_argument("-o", "--output")
    gen_mcq.add_argument("clique")

    td = sub.add_parser("td", help="tree decomposition utilities")
    td.add_argument("action", choices=["compute", "validate", "nice"])
    td.add_argument("instance")
    td.add_argument("td_file", nargs="?")
    td.add_argument("--td", dest="td_file_flag", help=argparse.SUPPRESS)
    td.add_argument("-o", "--output")

    bench = sub.add_parser("bench", help="greedy-vs-exact ratio table as CSV")
    bench.add_argument("--n", type=int, required=True)
    bench.add_argument("--batch", type=int, required=True)
    bench.add_argument("--seed", type=int, required=True)
    bench.add_argument("--model", required=True, choices=[m.value for m in DemandModel])
    bench.add_argument("--algo", choices=["greedy-unsplit", "greedy-split", "greedy-unweighted"])
    bench.add_argument("--edge-prob", type=float, default=0.3)
    bench.add_argument("--max-w", type=int, default=5)
    bench.add_argument("--max-c", type=int, default=4)
    bench.add_argument("--max-d", type=int, default=4)
    bench.add_argument("--oracle-threshold", type=int, default=9)
    bench.add_argument("--budget", type=int, default=5_000_000)
    bench.add_argument("-o", "--output")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "td_file_flag", None) and not getattr(args, "td_file", None):
        args.td_file = args.td_file_flag
    try:
        if args.command == "solve":
            return _solve(args)
        if args.command == "verify":
            return _verify(args)
        if args.command == "gen":
            return _gen(args)
        if args.command == "td":
            return _td(args)
        if args.command == "bench":
            return _bench(args)
        parser.error(f"unknown command {args.command}")
    except _Usage as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_USAGE
    except InfeasibleInstance as exc:
        sys.stderr.write(f"infeasible instance: {exc}\n")
        return EXIT_INFEASIBLE
    except oracle.BudgetExhausted as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except (CapdomError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    return EXIT_USAGE


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
