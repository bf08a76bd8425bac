"""Every unsatisfiable-core extraction path.

The headline route feeds the Boolean abstraction of the input clauses plus
all stored theory lemmas to a propositional core extractor (internal
proof-based, internal selector-based, or an external command exchanging
DIMACS files), then discards lemma clauses from the returned core: what
survives is a theory-unsatisfiable subset of the inputs.  The two baseline
routes extract cores directly from the SMT run (proof leaves, or selector
variables).  Deletion-based minimization and an independent checker round
things out.
"""
from __future__ import annotations

import shlex
import shutil
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from . import dimacs
from .sat import proof_core, sat_solve, solve_with_selectors
from .smt import SmtSolver, smt_solve
from .terms import AtomTable, Clause, Formula, Literal, Original, PropAtom


class ExtractionError(RuntimeError):
    pass


class BridgeError(ExtractionError):
    """External-extractor failure; the message names the failing stage."""


@dataclass
class ExtractorConfig:
    kind: str = "internal-proof"  # internal-proof | internal-selectors | external
    command: Optional[str] = None
    output_mode: str = "index-list"  # index-list | dimacs-subset
    fixpoint: bool = False
    minimize: bool = False
    timeout: Optional[float] = 60.0

    def __post_init__(self):
        if self.kind not in ("internal-proof", "internal-selectors", "external"):
            raise ValueError(f"unknown extractor kind {self.kind!r}")
        if self.kind == "external":
            if not self.command:
                raise ValueError("external extractor needs a command template")
            if "{in}" not in self.command or "{out}" not in self.command:
                raise ValueError("command template must contain {in} and {out} placeholders")


@dataclass
class CoreReport:
    verdict: str                      # "sat" | "unsat"
    core: tuple[int, ...]             # 0-based clause indices, ascending
    method: str
    input_size: int
    core_size: int
    verification: str                 # "verified" | "unchecked"
    assertions: tuple[int, ...]       # assertion-level view


def _report(formula: Formula, core: Iterable[int], method: str,
            verify: bool) -> CoreReport:
    core = tuple(sorted(set(core)))
    if verify:
        problem = check_core(formula, core)
        if problem is not None:
            raise ExtractionError(f"{method}: core failed verification: {problem}")
    return CoreReport("unsat", core, method, len(formula.clauses), len(core),
                      "verified" if verify else "unchecked",
                      formula.assertion_ids(core))


def _sat_report(formula: Formula, method: str) -> CoreReport:
    return CoreReport("sat", (), method, len(formula.clauses), 0, "verified", ())


# ---------------------------------------------------------------------------
# Boolean-level extraction
# ---------------------------------------------------------------------------

def _extract_once(clauses: list[list[int]], config: ExtractorConfig,
                  nvars: Optional[int]) -> list[int]:
    if config.kind == "internal-proof":
        verdict = sat_solve(clauses, log_proof=True, nvars=nvars)
        if verdict.status == "sat":
            raise ExtractionError("input is satisfiable; there is no core to extract")
        ids = proof_core(verdict.proof)
        return sorted(_leaf_indices(clauses, ids))
    if config.kind == "internal-selectors":
        verdict, core = solve_with_selectors(clauses, nvars=nvars)
        if verdict.status == "sat":
            raise ExtractionError("input is satisfiable; there is no core to extract")
        return core
    return external_bridge(clauses, config.command, config.output_mode,
                           timeout=config.timeout, nvars=nvars)


def _leaf_indices(clauses: list[list[int]], leaf_ids: set[int]) -> set[int]:
    # clause ids equal input positions except that duplicated inputs collapse
    # onto the first copy; map every id onto the first position with the
    # same content
    first = {}
    for i, cl in enumerate(clauses):
        first.setdefault(frozenset(cl), i)
    return {first[frozenset(clauses[i])] for i in leaf_ids}


def boolean_core(clauses: list[list[int]], config: ExtractorConfig,
                 nvars: Optional[int] = None) -> list[int]:
    """Indices of an unsatisfiable subset.  With the fixpoint flag the
    extractor is re-run on its own output until the size stabilizes."""
    current = list(range(len(clauses)))
    while True:
        sub = [clauses[i] for i in current]
        rel = _extract_once(sub, config, nvars)
        new = sorted(current[j] for j in rel)
        if not config.fixpoint or len(new) == len(current):
            return new
        current = new


def external_bridge(clauses: list[list[int]], command_template: str,
                    mode: str = "index-list", timeout: Optional[float] = 60.0,
                    nvars: Optional[int] = None) -> list[int]:
    """Run an external propositional core extractor over DIMACS files.

    The returned set is validated: it must be a subset of the emitted
    clauses (by index or by multiset match) and unsatisfiable.  Temp files
    are kept on error for debugging and removed on success.
    """
    doc = dimacs.document_for(clauses, nvars)
    workdir = Path(tempfile.mkdtemp(prefix="smtcore-bridge-"))
    in_path = workdir / "problem.cnf"
    out_path = workdir / "core.out"
    in_path.write_text(dimacs.render(doc), encoding="utf-8")
    argv = [tok.replace("{in}", str(in_path)).replace("{out}", str(out_path))
            for tok in shlex.split(command_template)]
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        raise BridgeError(f"extractor timed out after {timeout}s (files kept in {workdir})")
    except OSError as exc:
        raise BridgeError(f"could not run extractor {argv[0]!r}: {exc} "
                          f"(files kept in {workdir})")
    if proc.returncode != 0:
        raise BridgeError(f"extractor exited with status {proc.returncode} "
                          f"(files kept in {workdir}): {proc.stderr.strip()[:500]}")
    if not out_path.exists():
        raise BridgeError(f"extractor produced no output file (files kept in {workdir})")
    try:
        indices = dimacs.read_core(out_path.read_text(encoding="utf-8"), doc, mode)
    except dimacs.DimacsError as exc:
        raise BridgeError(f"could not interpret extractor output "
                          f"(files kept in {workdir}): {exc}")
    core = sorted(indices)
    verdict = sat_solve([clauses[i] for i in core], nvars=nvars)
    if verdict.status != "unsat":
        raise BridgeError(f"extractor returned a satisfiable clause set "
                          f"(files kept in {workdir})")
    shutil.rmtree(workdir, ignore_errors=True)
    return core


def self_extractor_command(method: str = "proof") -> str:
    """Command template invoking this package's own Boolean extractor as a
    subprocess (the self-bridge)."""
    return f"{shlex.quote(sys.executable)} -m smtcore boolean-core {{in}} {{out}} --method {method}"


# ---------------------------------------------------------------------------
# SMT-level extraction
# ---------------------------------------------------------------------------

def lemma_lift_core(formula: Formula, config: ExtractorConfig,
                    *, verify: bool = False, early_pruning: bool = True,
                    theory_propagation: bool = True,
                    conflict_budget: Optional[int] = None) -> CoreReport:
    """Core via the lifted-lemma route: solve, abstract inputs plus stored
    lemmas, run the Boolean extractor, drop lemma clauses."""
    method = {"internal-proof": "lift-proof",
              "internal-selectors": "lift-selectors",
              "external": "lift-external"}[config.kind]
    verdict, store = smt_solve(formula, early_pruning=early_pruning,
                               theory_propagation=theory_propagation,
                               conflict_budget=conflict_budget)
    if verdict.status == "sat":
        return _sat_report(formula, method)
    if verdict.status == "unknown":
        raise ExtractionError("conflict budget exceeded before a verdict")
    lifted = [formula.atoms.t2p(c) for c in formula.clauses]
    lifted += [formula.atoms.t2p(lemma.clause) for lemma in store]
    n = len(formula.clauses)
    idxs = boolean_core(lifted, config, nvars=len(formula.atoms))
    surviving = [i for i in idxs if i < n]
    assert surviving, "a Boolean core cannot consist of theory-valid lemmas only"
    if config.minimize:
        surviving = minimize_core(formula, surviving)
    return _report(formula, surviving, method, verify)


def smt_proof_core(formula: Formula, *, verify: bool = False,
                   early_pruning: bool = True, theory_propagation: bool = True,
                   conflict_budget: Optional[int] = None) -> CoreReport:
    """Proof-based baseline: leaves of the refutation built during the SMT
    run itself; lemma leaves are theory-valid and excluded."""
    engine = SmtSolver(formula, early_pruning=early_pruning,
                       theory_propagation=theory_propagation,
                       conflict_budget=conflict_budget, log_proof=True)
    verdict = engine.solve()
    if verdict.status == "sat":
        return _sat_report(formula, "smt-proof")
    if verdict.status == "unknown":
        raise ExtractionError("conflict budget exceeded before a verdict")
    core = set()
    for cid in proof_core(engine.sat.proof):
        origin = engine.origin(cid)
        if origin[0] == "input":
            core.add(origin[1])
    return _report(formula, core, "smt-proof", verify)


def smt_assumption_core(formula: Formula, *, verify: bool = False,
                        early_pruning: bool = True, theory_propagation: bool = True,
                        conflict_budget: Optional[int] = None) -> CoreReport:
    """Selector-based baseline: guard every clause with a fresh selector at
    the SMT level; the core is read off the final conflict clause."""
    # fresh table (same ids for existing atoms) so the caller's table does
    # not grow selector atoms
    table = AtomTable()
    for _id, atom in formula.atoms.items():
        table.intern(atom)
    selectors = []
    guarded = []
    for i, clause in enumerate(formula.clauses):
        sel = table.intern(PropAtom(f"@sel!{i}"))
        selectors.append(sel)
        lits = (Literal(sel, False),) + clause.lits
        guarded.append(Clause(lits, Original(i, _assertion_id(clause))))
    sub = Formula(guarded, table, formula.declarations, formula.logic)
    engine = SmtSolver(sub, early_pruning=early_pruning,
                       theory_propagation=theory_propagation,
                       conflict_budget=conflict_budget)
    verdict = engine.solve(tuple(selectors))
    if verdict.status == "sat":
        return _sat_report(formula, "smt-selectors")
    if verdict.status == "unknown":
        raise ExtractionError("conflict budget exceeded before a verdict")
    assert verdict.status == "unsat-assumptions", \
        "guarded clauses cannot refute without their selectors"
    negated = set(verdict.conflict)
    core = [i for i, sel in enumerate(selectors) if -sel in negated]
    return _report(formula, core, "smt-selectors", verify)


def _assertion_id(clause: Clause) -> int:
    return clause.origin.assertion_id if isinstance(clause.origin, Original) else -1


# ---------------------------------------------------------------------------
# Minimization and checking
# ---------------------------------------------------------------------------

def _is_unsat(formula: Formula, indices: Iterable[int]) -> bool:
    verdict, _ = smt_solve(formula.restrict(indices))
    return verdict.status == "unsat"


def minimize_core(formula: Formula, core: Iterable[int]) -> list[int]:
    """Deletion-based minimization: drop clauses one at a time (descending
    index) while the rest stays theory-unsatisfiable.  The result is
    one-deletion minimal."""
    current = sorted(set(core))
    for i in current:
        if not 0 <= i < len(formula.clauses):
            raise ValueError(f"core index {i} out of range")
    if not _is_unsat(formula, current):
        raise ValueError("minimize_core requires a theory-unsatisfiable core")
    for candidate in sorted(current, reverse=True):
        trial = [i for i in current if i != candidate]
        if _is_unsat(formula, trial):
            current = trial
    return current


def check_core(formula: Formula, core: Iterable[int]) -> Optional[str]:
    """Independent verification: None when the indices are in range and the
    induced clause set is theory-unsatisfiable, else a description."""
    core = sorted(set(core))
    for i in core:
        if not 0 <= i < len(formula.clauses):
            return f"index {i} out of range 0..{len(formula.clauses) - 1}"
    verdict, _ = smt_solve(formula.restrict(core))
    if verdict.status != "unsat":
        return f"induced clause set is {verdict.status}, not unsat"
    return None
