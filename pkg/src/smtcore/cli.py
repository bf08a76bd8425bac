"""Command-line surface: solve, core, allmus, verify, bench, boolean-core.

Exit codes follow the solving convention: 10 for sat, 20 for unsat, 1 for
errors, 2 for capped (incomplete) enumeration.  `boolean-core` is the
plug-in Boolean extractor surface (DIMACS in, core out) and exits 0 on
success so it can serve as an external extractor command.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from . import dimacs
from .cnf import cnf_convert
from .cores import (ExtractorConfig, ExtractionError, check_core,
                    lemma_lift_core, self_extractor_command,
                    smt_assumption_core, smt_proof_core)
from .mus import all_minimal_cores
from .parser import parse_file, render_instance
from .smt import smt_solve

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_ERROR = 1
EXIT_INCOMPLETE = 2

METHODS = ("lift-proof", "lift-selectors", "lift-external", "smt-proof", "smt-selectors")


def _default_budget() -> int | None:
    raw = os.environ.get("SMTCORE_BUDGET")
    return int(raw) if raw else None


def _load(path: str):
    return cnf_convert(parse_file(path))


def cmd_solve(args) -> int:
    formula = _load(args.file)
    if args.proof_out:
        from .smt import SmtSolver
        engine = SmtSolver(formula, conflict_budget=args.budget, log_proof=True,
                           seed=args.seed)
        verdict = engine.solve()
        if verdict.status == "unsat":
            Path(args.proof_out).write_text(engine.sat.proof.to_trace(),
                                            encoding="utf-8")
    else:
        verdict, _store = smt_solve(formula, conflict_budget=args.budget,
                                    seed=args.seed)
    print(verdict.status if verdict.status in ("sat", "unsat") else "unknown")
    if verdict.status == "sat":
        return EXIT_SAT
    if verdict.status == "unsat":
        return EXIT_UNSAT
    return EXIT_ERROR


def cmd_core(args) -> int:
    formula = _load(args.file)
    budget = args.budget
    if args.method == "lift-proof":
        report = lemma_lift_core(formula, ExtractorConfig(
            "internal-proof", fixpoint=args.fixpoint, minimize=args.minimize),
            verify=args.verify, conflict_budget=budget)
    elif args.method == "lift-selectors":
        report = lemma_lift_core(formula, ExtractorConfig(
            "internal-selectors", fixpoint=args.fixpoint, minimize=args.minimize),
            verify=args.verify, conflict_budget=budget)
    elif args.method == "lift-external":
        cmd = args.extractor_cmd or self_extractor_command()
        report = lemma_lift_core(formula, ExtractorConfig(
            "external", command=cmd, output_mode=args.extractor_mode,
            fixpoint=args.fixpoint, minimize=args.minimize),
            verify=args.verify, conflict_budget=budget)
    elif args.method == "smt-proof":
        report = smt_proof_core(formula, verify=args.verify, conflict_budget=budget)
        if args.minimize:
            from .cores import minimize_core
            core = minimize_core(formula, report.core)
            report = type(report)("unsat", tuple(core), report.method,
                                  report.input_size, len(core), report.verification,
                                  formula.assertion_ids(core))
    else:  # smt-selectors
        report = smt_assumption_core(formula, verify=args.verify, conflict_budget=budget)
        if args.minimize:
            from .cores import minimize_core
            core = minimize_core(formula, report.core)
            report = type(report)("unsat", tuple(core), report.method,
                                  report.input_size, len(core), report.verification,
                                  formula.assertion_ids(core))
    if report.verdict == "sat":
        print("sat")
        return EXIT_SAT
    print("unsat")
    print("core-clauses:", " ".join(str(i + 1) for i in report.core))
    print("core-assertions:", " ".join(str(a + 1) for a in report.assertions))
    if args.out:
        Path(args.out).write_text(render_instance(formula, report.core),
                                  encoding="utf-8")
    return EXIT_UNSAT


def cmd_allmus(args) -> int:
    formula = _load(args.file)
    mcs, mus = all_minimal_cores(formula, cap=args.cap)
    if mcs.satisfiable:
        print("sat")
        return EXIT_SAT
    print("unsat")
    for m in sorted(mcs.mcses, key=sorted):
        print("MCS:", " ".join(str(i + 1) for i in sorted(m)))
    for m in sorted(mus.muses, key=sorted):
        print("MUS:", " ".join(str(i + 1) for i in sorted(m)))
    if not (mcs.complete and mus.complete):
        print("INCOMPLETE: enumeration cap reached; the listing is partial")
        return EXIT_INCOMPLETE
    return EXIT_UNSAT


def cmd_verify(args) -> int:
    formula = _load(args.file)
    text = Path(args.core).read_text(encoding="utf-8")
    indices = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        idx = int(line)
        if not 1 <= idx <= len(formula.clauses):
            print(f"violation: line {ln}: index {idx} out of range")
            return EXIT_ERROR
        indices.add(idx - 1)
    problem = check_core(formula, indices)
    if problem is None:
        print("ok")
        return 0
    print(f"violation: {problem}")
    return EXIT_ERROR


def cmd_bench(args) -> int:
    paths = sorted(Path(args.dir).glob("*.smt2"))
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            print(f"error: unknown method {m!r}", file=sys.stderr)
            return EXIT_ERROR
    if args.baseline not in methods:
        print(f"error: baseline {args.baseline!r} is not among the methods",
              file=sys.stderr)
        return EXIT_ERROR
    records = bench_mod.run_bench(paths, methods, budget=args.budget,
                                  extractor_cmd=args.extractor_cmd)
    csv_text = bench_mod.records_to_csv(records)
    if args.csv:
        Path(args.csv).write_text(csv_text, encoding="utf-8")
    else:
        print(csv_text, end="")
    stats = {m: bench_mod.stats_for_pair(records, m, args.baseline)
             for m in methods if m != args.baseline}
    print(bench_mod.format_table(stats, args.baseline))
    return 0


def cmd_boolean_core(args) -> int:
    doc = dimacs.parse_dimacs(Path(args.infile).read_text(encoding="utf-8"))
    from .cores import boolean_core
    config = ExtractorConfig("internal-selectors" if args.method == "selectors"
                             else "internal-proof", fixpoint=args.fixpoint)
    core = boolean_core(doc.clauses, config, nvars=doc.nvars)
    if args.mode == "index-list":
        Path(args.out).write_text(dimacs.render_core_indices(core), encoding="utf-8")
    else:
        sub = dimacs.DimacsDocument(doc.nvars, [doc.clauses[i] for i in core])
        Path(args.out).write_text(dimacs.render(sub), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smtcore",
                                description="Small unsatisfiable cores for SMT")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="decide satisfiability")
    ps.add_argument("file")
    ps.add_argument("--budget", type=int, default=_default_budget())
    ps.add_argument("--seed", type=int, default=None,
                    help="randomize branching tie-breaks, reproducibly")
    ps.add_argument("--proof-out", default=None,
                    help="write the Boolean refutation trace here on unsat")
    ps.set_defaults(fn=cmd_solve)

    pc = sub.add_parser("core", help="extract an unsatisfiable core")
    pc.add_argument("file")
    pc.add_argument("--method", choices=METHODS, default="lift-proof")
    pc.add_argument("--fixpoint", action="store_true")
    pc.add_argument("--minimize", action="store_true")
    pc.add_argument("--verify", action="store_true")
    pc.add_argument("--extractor-cmd", default=None,
                    help="external extractor template with {in} and {out}")
    pc.add_argument("--extractor-mode", choices=("index-list", "dimacs-subset"),
                    default="index-list")
    pc.add_argument("--out", default=None, help="write the core as a new input file")
    pc.add_argument("--budget", type=int, default=_default_budget())
    pc.set_defaults(fn=cmd_core)

    pa = sub.add_parser("allmus", help="enumerate all MCSes and minimal cores")
    pa.add_argument("file")
    pa.add_argument("--cap", type=int, default=10_000)
    pa.set_defaults(fn=cmd_allmus)

    pv = sub.add_parser("verify", help="check a 1-based core index file")
    pv.add_argument("file")
    pv.add_argument("--core", required=True)
    pv.set_defaults(fn=cmd_verify)

    pb = sub.add_parser("bench", help="run methods over a directory of instances")
    pb.add_argument("dir")
    pb.add_argument("--methods", default="lift-proof,lift-selectors,smt-proof,smt-selectors")
    pb.add_argument("--baseline", default="lift-proof")
    pb.add_argument("--budget", type=int, default=_default_budget())
    pb.add_argument("--extractor-cmd", default=None)
    pb.add_argument("--csv", default=None)
    pb.set_defaults(fn=cmd_bench)

    pbc = sub.add_parser("boolean-core",
                         help="propositional core of a DIMACS file (extractor surface)")
    pbc.add_argument("infile")
    pbc.add_argument("out")
    pbc.add_argument("--method", choices=("proof", "selectors"), default="proof")
    pbc.add_argument("--fixpoint", action="store_true")
    pbc.add_argument("--mode", choices=("index-list", "dimacs-subset"),
                     default="index-list")
    pbc.set_defaults(fn=cmd_boolean_core)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError, ExtractionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
