"""Lazy online DPLL(T): the CDCL engine drives the search and a theory
solver prunes it.

Every theory literal is asserted incrementally as it gets assigned (early
pruning runs a full theory check at each propagation fixpoint), entailed
literals are unit-propagated through their deduction clauses (theory
propagation), and every theory-conflict and theory-deduction clause is
recorded in an append-only store before use.  The store is the raw
material for core extraction: the abstraction of the inputs plus the
stored lemmas is propositionally unsatisfiable whenever the run answers
unsat.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional

from .sat import SatSolver, sat_solve
from .terms import (
    AtomTable, Clause, Formula, Literal, TLemmaOrigin, atom_theory,
)
from .theory import TheorySolver, is_valid_lemma, solver_for_logic


@dataclass
class TLemma:
    clause: Clause
    kind: str  # "theory-conflict" | "theory-deduction"
    seq: int


class TLemmaStore:
    """Append-only, deduplicated store of every lemma produced in a run."""

    def __init__(self):
        self.lemmas: list[TLemma] = []
        self._index: dict[frozenset, int] = {}

    def __len__(self) -> int:
        return len(self.lemmas)

    def __iter__(self):
        return iter(self.lemmas)

    def add(self, lits: tuple[Literal, ...], kind: str) -> tuple[int, bool]:
        """Returns (lemma index, is_new)."""
        key = frozenset((l.atom, l.positive) for l in lits)
        hit = self._index.get(key)
        if hit is not None:
            return hit, False
        idx = len(self.lemmas)
        clause = Clause(lits, TLemmaOrigin(idx))
        self.lemmas.append(TLemma(clause, kind, idx))
        self._index[key] = idx
        return idx, True


@dataclass
class SmtVerdict:
    status: str  # "sat" | "unsat" | "unsat-assumptions" | "unknown"
    bool_model: Optional[dict[int, bool]] = None      # atom id -> value
    theory_model: object = None                       # LRA: {Var: Fraction}; EUF: {Term: class}
    conflict: Optional[tuple[int, ...]] = None        # assumption-core clause (signed atom ids)


class SmtSolver:
    """One solver instance per problem; single-owner while solving."""

    def __init__(self, formula: Formula, *, early_pruning: bool = True,
                 theory_propagation: bool = True,
                 conflict_budget: Optional[int] = None,
                 log_proof: bool = False, seed: Optional[int] = None):
        self.formula = formula
        self.table = formula.atoms
        self.theory: Optional[TheorySolver] = solver_for_logic(formula.logic, self.table)
        self.early_pruning = early_pruning
        self.theory_propagation = theory_propagation
        self.store = TLemmaStore()
        self.sat = SatSolver(log_proof=log_proof, conflict_budget=conflict_budget,
                             enable_restarts=False, seed=seed)
        self.sat.ensure_vars(len(self.table))
        self._input_cid: dict[int, int] = {}
        for i, clause in enumerate(formula.clauses):
            cid, _ = self.sat.add_clause(self.table.t2p(clause), ("input", i))
            self._input_cid[i] = cid
        self._lemma_cid: dict[int, int] = {}
        self._scan_pos = 0                      # sat trail position scanned so far
        self._synced_positions: list[int] = []  # trail position of each theory assert
        self._theory_model = None
        if self.theory is not None:
            self.sat.theory_hook = self

    # -- lemma plumbing ----------------------------------------------------------

    def _is_theory_var(self, var: int) -> bool:
        return atom_theory(self.table.atom(var)) is not None

    def _add_lemma(self, lits: tuple[Literal, ...], kind: str) -> tuple[int, str]:
        idx, is_new = self.store.add(lits, kind)
        cid = self._lemma_cid.get(idx)
        if cid is None:
            cid, status = self.sat.add_clause(
                [l.signed() for l in lits], ("tlemma", idx))
            self._lemma_cid[idx] = cid
        else:
            status = "known"
        return cid, status

    def _conflict_lemma(self, conflict: list[Literal]) -> int:
        lits = tuple(l.negated() for l in conflict)
        cid, _ = self._add_lemma(lits, "theory-conflict")
        return cid

    # -- theory hook (called by the SAT engine) -----------------------------------

    def _sync(self) -> Optional[int]:
        """Assert newly assigned theory literals in trail order; on a theory
        conflict, store the lemma and hand its clause id back as the
        conflicting clause."""
        trail = self.sat.trail
        while self._scan_pos < len(trail):
            pos = self._scan_pos
            lit = trail[pos]
            self._scan_pos += 1
            var = abs(lit)
            if var <= len(self.table) and self._is_theory_var(var):
                conflict = self.theory.assert_literal(Literal(var, lit > 0))
                self._synced_positions.append(pos)
                if conflict is not None:
                    return self._conflict_lemma(conflict)
        return None

    def hook_fixpoint(self, solver: SatSolver):
        if not self.early_pruning:
            return None
        confl = self._sync()
        if confl is not None:
            return confl
        verdict = self.theory.check_full()
        if verdict.status == "conflict":
            return self._conflict_lemma(verdict.conflict)
        if self.theory_propagation:
            added = False
            for ded in self.theory.deductions():
                if solver.value(ded.literal.signed()) is not None:
                    continue
                lits = tuple(l.negated() for l in ded.explanation) + (ded.literal,)
                cid, status = self._add_lemma(lits, "theory-deduction")
                if status in ("unit", "conflict", "ok"):
                    added = True
                if status == "conflict":
                    return cid
            if added:
                return "added"
        return None

    def hook_final(self, solver: SatSolver):
        confl = self._sync()
        if confl is not None:
            return confl
        verdict = self.theory.check_full()
        if verdict.status == "conflict":
            return self._conflict_lemma(verdict.conflict)
        self._theory_model = verdict.witness
        return None

    def hook_backjump(self, trail_len: int):
        self._scan_pos = min(self._scan_pos, trail_len)
        keep = bisect_left(self._synced_positions, trail_len)
        if keep < len(self._synced_positions):
            self.theory.backtrack(keep)
            del self._synced_positions[keep:]

    # -- solving ----------------------------------------------------------------

    def solve(self, assumptions: tuple[int, ...] = ()) -> SmtVerdict:
        verdict = self.sat.solve(assumptions)
        if verdict.status == "sat":
            model = {v: verdict.model[v] for v in range(1, len(self.table) + 1)
                     if v in verdict.model}
            return SmtVerdict("sat", bool_model=model, theory_model=self._theory_model)
        if verdict.status == "unsat":
            return SmtVerdict("unsat")
        if verdict.status == "unsat-assumptions":
            return SmtVerdict("unsat-assumptions", conflict=verdict.conflict)
        return SmtVerdict("unknown")

    def origin(self, clause_id: int) -> tuple:
        return self.sat.origins[clause_id]


def smt_solve(formula: Formula, *, early_pruning: bool = True,
              theory_propagation: bool = True,
              conflict_budget: Optional[int] = None,
              log_proof: bool = False,
              seed: Optional[int] = None) -> tuple[SmtVerdict, TLemmaStore]:
    """Solve a formula; returns the verdict together with every theory lemma
    stored during the run (in discovery order, deduplicated)."""
    engine = SmtSolver(formula, early_pruning=early_pruning,
                       theory_propagation=theory_propagation,
                       conflict_budget=conflict_budget, log_proof=log_proof,
                       seed=seed)
    verdict = engine.solve()
    return verdict, engine.store


def stored_lemmas(store: TLemmaStore) -> list[TLemma]:
    """The lemmas passed to the SAT engine during a run, in order."""
    return list(store.lemmas)


# ---------------------------------------------------------------------------
# Post-run verification helpers (the checked facts about lemma stores)
# ---------------------------------------------------------------------------

def lemma_store_violations(formula: Formula, store: TLemmaStore,
                           unsat: bool) -> list[str]:
    """Check the two lemma-store facts: every stored lemma is theory-valid,
    and (after an unsat run) the abstraction of the inputs plus the lemmas
    is propositionally unsatisfiable by an independent SAT run."""
    problems = []
    for lemma in store:
        ok, counter = is_valid_lemma(lemma.clause, formula.atoms)
        if not ok:
            problems.append(f"lemma {lemma.seq} is not theory-valid: {counter}")
    if unsat:
        clauses = [formula.atoms.t2p(c) for c in formula.clauses]
        clauses += [formula.atoms.t2p(lemma.clause) for lemma in store]
        check = sat_solve(clauses, nvars=len(formula.atoms))
        if check.status != "unsat":
            problems.append("abstraction plus stored lemmas is not propositionally unsat")
    return problems


def evaluate_literal(lit: Literal, table: AtomTable, verdict: SmtVerdict) -> bool:
    """Truth of a literal under a sat verdict's theory witness (falling back
    to the Boolean model for propositional atoms)."""
    from .terms import EufAtom, LinAtom, eval_lin_atom

    atom = table.atom(lit.atom)
    if isinstance(atom, LinAtom):
        value = eval_lin_atom(atom, verdict.theory_model or {})
    elif isinstance(atom, EufAtom):
        classes = verdict.theory_model or {}
        value = classes.get(atom.lhs) == classes.get(atom.rhs) and atom.lhs in classes
    else:
        value = bool(verdict.bool_model.get(lit.atom))
    return value if lit.positive else not value


def evaluate_clause(clause: Clause, table: AtomTable, verdict: SmtVerdict) -> bool:
    return any(evaluate_literal(l, table, verdict) for l in clause.lits)
