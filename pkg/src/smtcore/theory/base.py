"""Theory-solver interface shared by the congruence-closure and simplex
backends.

A solver owns the atoms of exactly one theory.  Asserting a literal either
extends the state or returns a conflict: a subset of the currently asserted
literals whose conjunction is theory-unsatisfiable.  Marks count asserted
literals; backtracking restores the state at a mark exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..terms import AtomTable, Literal


@dataclass
class Deduction:
    literal: Literal
    explanation: tuple[Literal, ...]  # asserted literals entailing `literal`


@dataclass
class TheoryVerdict:
    status: str  # "sat" | "conflict"
    conflict: Optional[list[Literal]] = None
    witness: object = None


class TheorySolver:
    """Base class; concrete solvers implement the underscored primitives."""

    theory: str = "?"

    def __init__(self, table: AtomTable):
        self.table = table
        self._asserted: list[Literal] = []
        self._asserted_atoms: dict[int, bool] = {}

    # -- mark/backtrack -----------------------------------------------------

    def mark(self) -> int:
        return len(self._asserted)

    def backtrack(self, mark: int):
        if not 0 <= mark <= len(self._asserted):
            raise ValueError(f"stale mark {mark}: only {len(self._asserted)} literals asserted")
        if mark == len(self._asserted):
            return
        dropped = self._asserted[mark:]
        del self._asserted[mark:]
        for lit in dropped:
            del self._asserted_atoms[lit.atom]
        self._undo_to(mark)

    def assert_literal(self, lit: Literal) -> Optional[list[Literal]]:
        atom = self.table.atom(lit.atom)
        if not self.owns_atom(atom):
            raise ValueError(f"literal over {type(atom).__name__} does not belong to {self.theory}")
        self._asserted.append(lit)
        self._asserted_atoms[lit.atom] = lit.positive
        conflict = self._assert(lit, atom)
        if conflict is not None:
            return conflict
        return None

    def asserted(self) -> list[Literal]:
        return list(self._asserted)

    # -- to implement ---------------------------------------------------------

    def owns_atom(self, atom) -> bool:
        raise NotImplementedError

    def _assert(self, lit: Literal, atom) -> Optional[list[Literal]]:
        raise NotImplementedError

    def _undo_to(self, mark: int):
        raise NotImplementedError

    def check_full(self) -> TheoryVerdict:
        raise NotImplementedError

    def deductions(self) -> list[Deduction]:
        raise NotImplementedError
