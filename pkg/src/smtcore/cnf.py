"""CNF conversion of parsed assertion sets.

Assertions already in clause form pass through verbatim.  Everything else
is distributed when the result stays small (at most `max_distribute`
clauses per assertion), and otherwise converted definitionally with fresh
auxiliary propositional variables.  Every emitted clause carries the id of
the assertion it came from.
"""
from __future__ import annotations

from typing import Optional

from .parser import AssertionSet, BAnd, BAtom, BConst, BNot, BOr, BoolExpr
from .terms import (
    Atom, AtomTable, Clause, Formula, Literal, Original, PropAtom, infer_logic,
)


class CnfError(ValueError):
    pass


# Internal NNF representation: a "literal" is (atom, positive) and trees are
# and/or nodes over those after constant folding.
_Lit = tuple[Atom, bool]


def _nnf(node: BoolExpr, positive: bool):
    """Push negations to the atoms; returns ("lit", atom, pol) | ("and"|"or",
    children) | ("const", bool)."""
    if isinstance(node, BConst):
        return ("const", node.value == positive)
    if isinstance(node, BAtom):
        return ("lit", node.atom, positive)
    if isinstance(node, BNot):
        return _nnf(node.arg, not positive)
    if isinstance(node, BAnd):
        kind = "and" if positive else "or"
        return (kind, [_nnf(a, positive) for a in node.args])
    if isinstance(node, BOr):
        kind = "or" if positive else "and"
        return (kind, [_nnf(a, positive) for a in node.args])
    raise TypeError(f"unexpected node {node!r}")


def _simplify(node):
    """Flatten nested and/and and or/or, fold constants, drop duplicate
    children, and collapse complementary siblings."""
    if node[0] in ("lit", "const"):
        return node
    kind, children = node
    flat = []
    for c in children:
        c = _simplify(c)
        if c[0] == "const":
            if c[1] == (kind == "and"):
                continue  # neutral element
            return ("const", kind != "and")  # absorbing element
        if c[0] == kind:
            flat.extend(c[1])
        else:
            flat.append(c)
    seen = set()
    out = []
    pol = {}
    for c in flat:
        key = (c[0], c[1], c[2]) if c[0] == "lit" else ("node", id(c))
        if c[0] == "lit":
            if (c[1], not c[2]) in pol:
                # l and (not l) as siblings: or is valid, and is contradictory
                return ("const", kind == "or")
            pol[(c[1], c[2])] = True
        if key in seen:
            continue
        seen.add(key)
        out.append(c)
    if not out:
        return ("const", kind == "and")
    if len(out) == 1:
        return out[0]
    return (kind, out)


def _merge_lits(left: tuple[_Lit, ...], right: tuple[_Lit, ...]) -> Optional[tuple[_Lit, ...]]:
    """Ordered union of two literal tuples; None when tautological."""
    have = dict(left)
    out = list(left)
    for a, p in right:
        prev = have.get(a)
        if prev is None:
            have[a] = p
            out.append((a, p))
        elif prev != p:
            return None
    return tuple(out)


def _try_distribute(node, guard: int = 4096) -> Optional[list[tuple[_Lit, ...]]]:
    """Full distribution into an ordered clause list, or None past the safety
    guard.  Tautological and duplicate clauses are dropped; literal order
    follows the source tree so the result is deterministic."""
    if node[0] == "lit":
        return [((node[1], node[2]),)]
    kind, children = node
    parts = []
    for c in children:
        sub = _try_distribute(c, guard)
        if sub is None:
            return None
        parts.append(sub)
    if kind == "and":
        out = []
        seen = set()
        for sub in parts:
            for cl in sub:
                key = frozenset(cl)
                if key not in seen:
                    seen.add(key)
                    out.append(cl)
            if len(out) > guard:
                return None
        return out
    # or: pairwise products
    acc: list[tuple[_Lit, ...]] = [()]
    for sub in parts:
        nxt = []
        seen = set()
        for left in acc:
            for right in sub:
                merged = _merge_lits(left, right)
                if merged is None:
                    continue  # tautology: drop
                key = frozenset(merged)
                if key not in seen:
                    seen.add(key)
                    nxt.append(merged)
            if len(nxt) > guard:
                return None
        acc = nxt
    return acc


class _Definitions:
    """Definitional (auxiliary variable) translation for one conversion run."""

    def __init__(self):
        self.counter = 0
        self.clauses: list[list[_Lit]] = []

    def fresh(self) -> Atom:
        atom = PropAtom(f"@cnf!{self.counter}")
        self.counter += 1
        return atom

    def lit_of(self, node) -> _Lit:
        if node[0] == "lit":
            return (node[1], node[2])
        kind, children = node
        child_lits = [self.lit_of(c) for c in children]
        aux = self.fresh()
        pos, neg = (aux, True), (aux, False)
        if kind == "and":
            for cl in child_lits:
                self.clauses.append([neg, cl])
            self.clauses.append([pos] + [(a, not p) for a, p in child_lits])
        else:
            self.clauses.append([neg] + child_lits)
            for cl in child_lits:
                self.clauses.append([pos, (cl[0], not cl[1])])
        return pos

    def top(self, node) -> list[list[_Lit]]:
        if node[0] == "lit":
            return [[(node[1], node[2])]]
        kind, children = node
        if kind == "and":
            out = []
            for c in children:
                out.extend(self.top(c))
            return out
        # top-level disjunction: literal children stay, composite children
        # get a defined auxiliary, then one linking clause
        link = []
        for c in children:
            if c[0] == "lit":
                link.append((c[1], c[2]))
            else:
                link.append(self.lit_of(c))
        defs = self.clauses
        self.clauses = []
        return defs + [link]


def _is_clause_shaped(node) -> bool:
    if node[0] == "lit":
        return True
    return node[0] == "or" and all(c[0] == "lit" for c in node[1])


def cnf_convert(assertions: AssertionSet, max_distribute: int = 8) -> Formula:
    """Convert a parsed assertion set into an indexed CNF formula.

    Raises CnfError for assertions that are propositionally valid (they
    would contribute no clauses and corrupt core reporting) and for
    tautological input clauses.
    """
    table = AtomTable()
    clauses: list[Clause] = []
    defs = _Definitions()

    def emit(lits, aid: int):
        lit_objs = tuple(Literal(table.intern(a), p) for a, p in lits)
        clauses.append(Clause(lit_objs, Original(len(clauses), aid)))

    for aid, tree in assertions.assertions:
        node = _simplify(_nnf(tree, True))
        if node[0] == "const":
            if node[1]:
                raise CnfError(
                    f"assertion {aid} is propositionally valid (tautological); "
                    "it would contribute no clauses")
            emit([], aid)
            continue
        if _is_clause_shaped(node):
            lits = [(node[1], node[2])] if node[0] == "lit" else [
                (c[1], c[2]) for c in node[1]]
            emit(lits, aid)
            continue
        dist = _try_distribute(node)
        if dist is not None and not dist:
            raise CnfError(
                f"assertion {aid} is propositionally valid (tautological); "
                "it would contribute no clauses")
        if dist is not None and len(dist) <= max_distribute:
            for cl in dist:
                emit(cl, aid)
        else:
            for cl in defs.top(node):
                emit(cl, aid)

    logic = infer_logic(clauses, table)
    return Formula(clauses, table, assertions.declarations, logic)
