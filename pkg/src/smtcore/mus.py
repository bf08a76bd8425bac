"""Two-phase enumeration of minimal unsatisfiable cores.

Phase one enumerates every minimal correction subset (MCS): selector
variables guard the clauses, and for growing sizes k we enumerate
theory-consistent models whose false selectors form a correction set,
blocking each one found.  Phase two computes all minimal unsatisfiable
cores as the minimal hitting sets of the MCS set.  Both sets can be
exponentially large, so hard caps guard each phase and flag incomplete
results loudly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .smt import smt_solve
from .terms import AtomTable, Formula, Literal, PropAtom, formula_from_clauses

DEFAULT_CAP = 10_000


@dataclass
class McsSet:
    mcses: list[frozenset[int]]
    complete: bool
    satisfiable: bool = False


@dataclass
class MusSet:
    muses: list[frozenset[int]]
    complete: bool


def _sequential_counter_atmost(lits: list[Literal], k: int, table: AtomTable,
                               tag: str) -> list[tuple[Literal, ...]]:
    """Sinz sequential-counter encoding of at-most-k over `lits`; auxiliary
    registers are fresh propositional atoms."""
    n = len(lits)
    if k >= n:
        return []
    if k == 0:
        return [(l.negated(),) for l in lits]
    reg = {}

    def r(i: int, j: int) -> Literal:
        key = (i, j)
        if key not in reg:
            reg[key] = Literal(table.intern(PropAtom(f"@amk!{tag}!{i}!{j}")), True)
        return reg[key]

    out: list[tuple[Literal, ...]] = []
    out.append((lits[0].negated(), r(0, 0)))
    for j in range(1, k):
        out.append((r(0, j).negated(),))
    for i in range(1, n - 1):
        out.append((lits[i].negated(), r(i, 0)))
        out.append((r(i - 1, 0).negated(), r(i, 0)))
        for j in range(1, k):
            out.append((lits[i].negated(), r(i - 1, j - 1).negated(), r(i, j)))
            out.append((r(i - 1, j).negated(), r(i, j)))
        out.append((lits[i].negated(), r(i - 1, k - 1).negated()))
    out.append((lits[n - 1].negated(), r(n - 2, k - 1).negated()))
    return out


def enumerate_mcs(formula: Formula, cap: int = DEFAULT_CAP) -> McsSet:
    """All minimal correction subsets of a theory-unsatisfiable formula."""
    base, _ = smt_solve(formula)
    if base.status == "sat":
        return McsSet([], complete=True, satisfiable=True)
    n = len(formula.clauses)
    # fresh table so selector/register atoms do not leak into the input
    table = AtomTable()
    for _id, atom in formula.atoms.items():
        table.intern(atom)
    selectors = [table.intern(PropAtom(f"@mcs!{i}")) for i in range(n)]
    guarded = [(Literal(selectors[i], False),) + clause.lits
               for i, clause in enumerate(formula.clauses)]
    blocking: list[tuple[Literal, ...]] = []
    found: list[frozenset[int]] = []

    def solve_with(extra: list[tuple[Literal, ...]]):
        clauses = guarded + blocking + extra
        return smt_solve(formula_from_clauses(clauses, table,
                                              formula.declarations, formula.logic))

    for k in range(1, n + 1):
        neg_selectors = [Literal(s, True) for s in selectors]
        counter = _sequential_counter_atmost(
            [l.negated() for l in neg_selectors], k, table, f"k{k}")
        while True:
            verdict, _ = solve_with(counter)
            if verdict.status != "sat":
                break
            mcs = frozenset(i for i, s in enumerate(selectors)
                            if not verdict.bool_model[s])
            assert mcs and len(mcs) <= k
            found.append(mcs)
            blocking.append(tuple(Literal(selectors[i], True) for i in sorted(mcs)))
            if len(found) >= cap:
                return McsSet(found, complete=False)
        relaxed, _ = solve_with([])
        if relaxed.status != "sat":
            return McsSet(found, complete=True)
    return McsSet(found, complete=True)


def minimal_hitting_sets(mcses: Iterable[frozenset[int]],
                         cap: int = DEFAULT_CAP) -> MusSet:
    """All minimal hitting sets via branch and bound: branch on the elements
    of the smallest unhit set, prune supersets of found hitting sets, and
    filter to minimality at the end."""
    sets = [frozenset(m) for m in mcses]
    results: list[frozenset[int]] = []
    seen: set[frozenset[int]] = set()
    capped = False

    def rec(chosen: frozenset[int], remaining: list[frozenset[int]]):
        nonlocal capped
        if capped:
            return
        unhit = [s for s in remaining if not (s & chosen)]
        if not unhit:
            if chosen not in seen:
                seen.add(chosen)
                results.append(chosen)
                if len(results) >= cap:
                    capped = True
            return
        if any(h <= chosen for h in results):
            return
        pivot = min(unhit, key=lambda s: (len(s), sorted(s)))
        for e in sorted(pivot):
            rec(chosen | {e}, unhit)

    rec(frozenset(), sets)
    minimal = [r for r in results if not any(o < r for o in results)]
    minimal.sort(key=sorted)
    return MusSet(minimal, complete=not capped)


def single_mus(mcses: Iterable[frozenset[int]]) -> frozenset[int]:
    """One minimal hitting set: grow greedily (hit the most unhit sets, ties
    to the smallest element), then shrink to minimality."""
    sets = [frozenset(m) for m in mcses]
    if not sets:
        return frozenset()
    chosen: set[int] = set()
    unhit = [s for s in sets]
    while unhit:
        counts: dict[int, int] = {}
        for s in unhit:
            for e in s:
                counts[e] = counts.get(e, 0) + 1
        best = max(sorted(counts), key=lambda e: counts[e])
        chosen.add(best)
        unhit = [s for s in unhit if best not in s]
    for e in sorted(chosen):
        trial = chosen - {e}
        if all(s & trial for s in sets):
            chosen = trial
    return frozenset(chosen)


def all_minimal_cores(formula: Formula, cap: int = DEFAULT_CAP) -> tuple[McsSet, MusSet]:
    mcs = enumerate_mcs(formula, cap)
    mus = minimal_hitting_sets(mcs.mcses, cap)
    if not mcs.complete:
        mus.complete = False
    return mcs, mus
