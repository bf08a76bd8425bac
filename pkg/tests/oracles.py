"""Independent oracles used to cross-check every engine.

These deliberately share no code with the solvers: satisfiability of
linear-arithmetic conjunctions is decided by Fourier-Motzkin elimination
(with case splits on disequalities), EUF conjunctions by a naive
congruence-closure fixpoint over the term universe, propositional formulas
by vectorized truth-table enumeration, and SMT formulas by enumerating all
total truth assignments and filtering through the theory oracle.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from smtcore.terms import EufAtom, Formula, FunApp, LinAtom, Term


# ---------------------------------------------------------------------------
# Fourier-Motzkin for conjunctions of linear literals
# ---------------------------------------------------------------------------

def _fm_feasible(rows: list[tuple[dict, Fraction, bool]]) -> bool:
    """rows: (coeffs by var key, offset, strict) meaning sum + offset <(=) 0."""
    rows = [r for r in rows if r[0] or not (r[1] < 0 or (r[1] == 0 and not r[2]))]
    for coeffs, off, strict in rows:
        if not coeffs and (off > 0 or (off == 0 and strict)):
            return False
    rows = [r for r in rows if r[0]]
    if not rows:
        return True
    var = next(iter(sorted({v for r in rows for v in r[0]})))
    uppers, lowers, rest = [], [], []
    for coeffs, off, strict in rows:
        c = coeffs.get(var)
        if c is None:
            rest.append((coeffs, off, strict))
        elif c > 0:
            uppers.append((coeffs, off, strict, c))
        else:
            lowers.append((coeffs, off, strict, c))
    for uc, uo, us, cu in uppers:
        for lc, lo, ls, cl in lowers:
            # cu*v + ur <= 0 and cl*v + lr <= 0 with cl < 0:
            # combine with weights -cl and cu (both positive)
            coeffs = {}
            for k, c in uc.items():
                if k != var:
                    coeffs[k] = coeffs.get(k, Fraction(0)) + (-cl) * c
            for k, c in lc.items():
                if k != var:
                    coeffs[k] = coeffs.get(k, Fraction(0)) + cu * c
            coeffs = {k: c for k, c in coeffs.items() if c != 0}
            off = (-cl) * uo + cu * lo
            rest.append((coeffs, off, us or ls))
    return _fm_feasible(rest)


def lra_literals_sat(literals: list[tuple[LinAtom, bool]]) -> bool:
    """Exact satisfiability over the rationals of a literal conjunction."""
    ineqs: list[tuple[dict, Fraction, bool]] = []
    diseqs: list[tuple[dict, Fraction]] = []
    for atom, positive in literals:
        coeffs = {v.index: c for v, c in atom.coeffs}
        off = atom.offset
        if atom.rel == "<=":
            if positive:
                ineqs.append((coeffs, off, False))
            else:  # sum + off > 0
                ineqs.append(({k: -c for k, c in coeffs.items()}, -off, True))
        elif atom.rel == "<":
            if positive:
                ineqs.append((coeffs, off, True))
            else:
                ineqs.append(({k: -c for k, c in coeffs.items()}, -off, False))
        else:  # "="
            if positive:
                ineqs.append((dict(coeffs), off, False))
                ineqs.append(({k: -c for k, c in coeffs.items()}, -off, False))
            else:
                diseqs.append((coeffs, off))

    def solve(ineqs, diseqs) -> bool:
        if not diseqs:
            return _fm_feasible(list(ineqs))
        coeffs, off = diseqs[0]
        rest = diseqs[1:]
        less = ineqs + [(dict(coeffs), off, True)]
        more = ineqs + [({k: -c for k, c in coeffs.items()}, -off, True)]
        return solve(less, rest) or solve(more, rest)

    return solve(ineqs, diseqs)


# ---------------------------------------------------------------------------
# Naive congruence closure for conjunctions of EUF literals
# ---------------------------------------------------------------------------

def _subterms(t: Term, out: set):
    out.add(t)
    if isinstance(t, FunApp):
        for a in t.args:
            _subterms(a, out)


def euf_literals_sat(literals: list[tuple[EufAtom, bool]]) -> bool:
    universe: set[Term] = set()
    for atom, _pos in literals:
        _subterms(atom.lhs, universe)
        _subterms(atom.rhs, universe)
    terms = sorted(universe, key=repr)
    index = {t: i for i, t in enumerate(terms)}
    parent = list(range(len(terms)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            return True
        return False

    for atom, pos in literals:
        if pos:
            union(index[atom.lhs], index[atom.rhs])
    changed = True
    while changed:
        changed = False
        apps = [t for t in terms if isinstance(t, FunApp)]
        for i, s in enumerate(apps):
            for t in apps[i + 1:]:
                if s.fn != t.fn:
                    continue
                if find(index[s]) == find(index[t]):
                    continue
                if all(find(index[a]) == find(index[b])
                       for a, b in zip(s.args, t.args)):
                    union(index[s], index[t])
                    changed = True
    for atom, pos in literals:
        if not pos and find(index[atom.lhs]) == find(index[atom.rhs]):
            return False
    return True


# ---------------------------------------------------------------------------
# Propositional truth tables (vectorized)
# ---------------------------------------------------------------------------

def cnf_truth_table_sat(clauses: list[list[int]], nvars: int) -> bool:
    """Exhaustive enumeration of all 2^nvars assignments."""
    if any(len(c) == 0 for c in clauses):
        return False
    if nvars == 0:
        return True
    assignments = np.arange(1 << nvars, dtype=np.uint32)
    ok = np.ones(assignments.shape, dtype=bool)
    for cl in clauses:
        sat_here = np.zeros(assignments.shape, dtype=bool)
        for lit in cl:
            bit = (assignments >> (abs(lit) - 1)) & 1
            sat_here |= (bit == 1) if lit > 0 else (bit == 0)
        ok &= sat_here
        if not ok.any():
            return False
    return bool(ok.any())


# ---------------------------------------------------------------------------
# Brute-force SMT: assignment enumeration + theory filtering
# ---------------------------------------------------------------------------

def theory_literals_sat(literals: list[tuple[object, bool]]) -> bool:
    lin = [(a, p) for a, p in literals if isinstance(a, LinAtom)]
    euf = [(a, p) for a, p in literals if isinstance(a, EufAtom)]
    assert not (lin and euf), "mixed-theory conjunction"
    if lin:
        return lra_literals_sat(lin)
    if euf:
        return euf_literals_sat(euf)
    return True


def brute_force_smt_sat(formula: Formula) -> bool:
    """Satisfiable iff some total assignment to the formula's atoms both
    propositionally satisfies every clause and refines to a theory-consistent
    literal set."""
    atom_ids = sorted({l.atom for c in formula.clauses for l in c.lits})
    clauses = [[l.signed() for l in c.lits] for c in formula.clauses]
    if any(len(c) == 0 for c in clauses):
        return False
    n = len(atom_ids)
    pos = {a: i for i, a in enumerate(atom_ids)}
    for mask in range(1 << n):
        assignment = {a: bool((mask >> pos[a]) & 1) for a in atom_ids}
        if not all(any(assignment[abs(l)] == (l > 0) for l in cl) for cl in clauses):
            continue
        literals = []
        theory = True
        for a in atom_ids:
            atom = formula.atoms.atom(a)
            if isinstance(atom, (LinAtom, EufAtom)):
                literals.append((atom, assignment[a]))
        if theory_literals_sat(literals):
            return True
    return False
