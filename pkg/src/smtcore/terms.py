"""Core symbolic objects: terms, atoms, literals, clauses and formulas.

Everything is immutable and hashable once constructed, and all arithmetic
is exact rational (`fractions.Fraction`); floats never appear in theory
reasoning.  Linear atoms are normalized to a canonical "lhs <rel> 0" form
so that syntactically different spellings of one constraint intern to the
same Boolean variable, which is what makes lifted lemma clauses share
variables with the input.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Optional, Union

REAL = "Real"
BOOL = "Bool"

LOGIC_EUF = "EUF"
LOGIC_LRA = "LRA"
LOGIC_PROP = "mixed-propositional"


class SortError(ValueError):
    """A term or atom was built with mismatched sorts or arities."""


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    """Theory variable.  `index` is the declaration ordinal and fixes the
    variable order used by linear-atom canonicalization."""
    name: str
    sort: str
    index: int


@dataclass(frozen=True)
class RatConst:
    value: Fraction


@dataclass(frozen=True)
class FunSymbol:
    name: str
    arg_sorts: tuple[str, ...]
    ret_sort: str


@dataclass(frozen=True)
class FunApp:
    fn: FunSymbol
    args: tuple["Term", ...]

    def __post_init__(self):
        if len(self.args) != len(self.fn.arg_sorts):
            raise SortError(
                f"{self.fn.name} expects {len(self.fn.arg_sorts)} arguments, got {len(self.args)}")
        for arg, want in zip(self.args, self.fn.arg_sorts):
            got = term_sort(arg)
            if got != want:
                raise SortError(f"argument of {self.fn.name} has sort {got}, expected {want}")


@dataclass(frozen=True)
class LinComb:
    """Linear rational combination sum(coeff * var) + offset.

    `terms` is sorted by variable declaration index and contains no zero
    coefficients.
    """
    terms: tuple[tuple[Var, Fraction], ...]
    offset: Fraction

    @staticmethod
    def build(coeffs: dict[Var, Fraction], offset: Fraction) -> "LinComb":
        items = tuple(sorted(((v, Fraction(c)) for v, c in coeffs.items() if c != 0),
                             key=lambda it: it[0].index))
        return LinComb(items, Fraction(offset))

    def add(self, other: "LinComb") -> "LinComb":
        coeffs: dict[Var, Fraction] = dict(self.terms)
        for v, c in other.terms:
            coeffs[v] = coeffs.get(v, Fraction(0)) + c
        return LinComb.build(coeffs, self.offset + other.offset)

    def scale(self, k: Fraction) -> "LinComb":
        return LinComb.build({v: c * k for v, c in self.terms}, self.offset * k)

    def negate(self) -> "LinComb":
        return self.scale(Fraction(-1))

    def evaluate(self, values: dict[Var, Fraction]) -> Fraction:
        total = self.offset
        for v, c in self.terms:
            total += c * values.get(v, Fraction(0))
        return total


Term = Union[Var, RatConst, FunApp, LinComb]


def term_sort(t: Term) -> str:
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, (RatConst, LinComb)):
        return REAL
    if isinstance(t, FunApp):
        return t.fn.ret_sort
    raise TypeError(f"not a term: {t!r}")


def term_key(t: Term):
    """Total order on terms, used to orient equality atoms."""
    if isinstance(t, Var):
        return (0, t.index, t.name)
    if isinstance(t, RatConst):
        return (1, t.value)
    if isinstance(t, FunApp):
        return (2, t.fn.name, tuple(term_key(a) for a in t.args))
    if isinstance(t, LinComb):
        return (3, tuple((v.index, c) for v, c in t.terms), t.offset)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropAtom:
    name: str


@dataclass(frozen=True)
class LinAtom:
    """Canonical linear constraint ``sum(coeffs) + offset <rel> 0``.

    Use :func:`canonical_lin_atom` to construct; the raw constructor does
    not normalize.
    """
    coeffs: tuple[tuple[Var, Fraction], ...]
    offset: Fraction
    rel: str  # "<=", "<" or "="

    def lincomb(self) -> LinComb:
        return LinComb(self.coeffs, self.offset)


@dataclass(frozen=True)
class EufAtom:
    """Equality between two uninterpreted terms, sides in term order."""
    lhs: Term
    rhs: Term


Atom = Union[PropAtom, LinAtom, EufAtom]

_REL_OK = ("<=", "<", "=")


def canonical_lin_atom(comb: LinComb, rel: str) -> LinAtom:
    """Normalize a linear constraint ``comb <rel> 0``.

    Steps: clear denominators to integers, divide through by the gcd of all
    integer values, and for equalities force the first nonzero coefficient
    (in declaration order) positive.  Inequalities keep their orientation:
    ``>=``/``>`` must already have been rewritten to ``<=``/``<`` by
    negating sides.  Constant constraints reduce their offset to its sign.
    """
    if rel not in _REL_OK:
        raise ValueError(f"unsupported relation {rel!r}")
    coeffs = comb.terms
    offset = comb.offset
    if not coeffs:
        sign = (offset > 0) - (offset < 0)
        return LinAtom((), Fraction(sign), rel)
    denom = 1
    for _, c in coeffs:
        denom = lcm(denom, c.denominator)
    denom = lcm(denom, offset.denominator)
    ints = [c * denom for _, c in coeffs]
    off = offset * denom
    g = 0
    for value in ints:
        g = gcd(g, abs(value.numerator))
    g = gcd(g, abs(off.numerator))
    scale = Fraction(denom, g)
    if rel == "=" and coeffs[0][1] * scale < 0:
        scale = -scale
    return LinAtom(tuple((v, c * scale) for v, c in coeffs), offset * scale, rel)


def euf_atom(lhs: Term, rhs: Term) -> EufAtom:
    ls, rs = term_sort(lhs), term_sort(rhs)
    if ls != rs:
        raise SortError(f"equality between sorts {ls} and {rs}")
    if ls in (REAL, BOOL):
        raise SortError(f"equality atoms over sort {ls} are not uninterpreted")
    if term_key(lhs) > term_key(rhs):
        lhs, rhs = rhs, lhs
    return EufAtom(lhs, rhs)


def eval_lin_atom(atom: LinAtom, values: dict[Var, Fraction]) -> bool:
    total = atom.lincomb().evaluate(values)
    if atom.rel == "<=":
        return total <= 0
    if atom.rel == "<":
        return total < 0
    return total == 0


def atom_theory(atom: Atom) -> Optional[str]:
    """Theory owning an atom, or None for propositional atoms."""
    if isinstance(atom, LinAtom):
        return LOGIC_LRA
    if isinstance(atom, EufAtom):
        return LOGIC_EUF
    return None


# ---------------------------------------------------------------------------
# Literals and clauses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    atom: int          # id in the owning AtomTable
    positive: bool

    def negated(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def signed(self) -> int:
        return self.atom if self.positive else -self.atom


@dataclass(frozen=True)
class Original:
    index: int
    assertion_id: int


@dataclass(frozen=True)
class TLemmaOrigin:
    index: int


@dataclass(frozen=True)
class LearnedOrigin:
    pass


Origin = Union[Original, TLemmaOrigin, LearnedOrigin]

LEARNED = LearnedOrigin()


@dataclass(frozen=True)
class Clause:
    lits: tuple[Literal, ...]
    origin: Origin = LEARNED

    def __post_init__(self):
        seen: dict[int, bool] = {}
        out = []
        for lit in self.lits:
            if lit.atom in seen:
                if seen[lit.atom] != lit.positive:
                    raise ValueError("tautological clause (contains a literal and its negation)")
                continue
            seen[lit.atom] = lit.positive
            out.append(lit)
        object.__setattr__(self, "lits", tuple(out))

    def key(self) -> frozenset[tuple[int, bool]]:
        return frozenset((l.atom, l.positive) for l in self.lits)

    def __len__(self) -> int:
        return len(self.lits)


# ---------------------------------------------------------------------------
# Atom table: the atom <-> Boolean-variable bijection
# ---------------------------------------------------------------------------

class AtomTable:
    """Append-only bijection between atoms and 1-based dense variable ids."""

    def __init__(self):
        self._atoms: list[Atom] = []
        self._ids: dict[Atom, int] = {}

    def __len__(self) -> int:
        return len(self._atoms)

    def intern(self, atom: Atom) -> int:
        idx = self._ids.get(atom)
        if idx is not None:
            return idx
        idx = len(self._atoms) + 1
        self._atoms.append(atom)
        self._ids[atom] = idx
        return idx

    def lookup(self, atom: Atom) -> Optional[int]:
        return self._ids.get(atom)

    def atom(self, idx: int) -> Atom:
        if not 1 <= idx <= len(self._atoms):
            raise LookupError(f"variable {idx} is not in the atom table (size {len(self._atoms)})")
        return self._atoms[idx - 1]

    def items(self) -> Iterable[tuple[int, Atom]]:
        return ((i + 1, a) for i, a in enumerate(self._atoms))

    def t2p(self, clause: Clause) -> list[int]:
        """Boolean image of a clause: signed 1-based variable indices."""
        out = []
        for lit in clause.lits:
            if not 1 <= lit.atom <= len(self._atoms):
                raise LookupError(f"literal references unknown atom id {lit.atom}")
            out.append(lit.signed())
        return out

    def p2t(self, lits: Iterable[int], origin: Origin = LEARNED) -> Clause:
        """Refine a Boolean clause back to an atom-level clause."""
        back = []
        for s in lits:
            if s == 0 or not 1 <= abs(s) <= len(self._atoms):
                raise LookupError(f"Boolean literal {s} does not refine to a known atom")
            back.append(Literal(abs(s), s > 0))
        return Clause(tuple(back), origin)


# ---------------------------------------------------------------------------
# Declarations and formulas
# ---------------------------------------------------------------------------

class Declarations:
    """Symbol table: sorts, theory variables, propositional names, functions."""

    def __init__(self):
        self.sorts: list[str] = []
        self.vars: dict[str, Var] = {}
        self.props: dict[str, PropAtom] = {}
        self.funs: dict[str, FunSymbol] = {}
        self._order: list[str] = []

    def _check_fresh(self, name: str):
        if name in self.vars or name in self.props or name in self.funs or name in self.sorts:
            raise ValueError(f"symbol {name!r} is already declared")

    def declare_sort(self, name: str):
        self._check_fresh(name)
        self.sorts.append(name)

    def declare_var(self, name: str, sort: str) -> Var:
        self._check_fresh(name)
        v = Var(name, sort, len(self.vars))
        self.vars[name] = v
        self._order.append(name)
        return v

    def declare_prop(self, name: str) -> PropAtom:
        self._check_fresh(name)
        p = PropAtom(name)
        self.props[name] = p
        self._order.append(name)
        return p

    def declare_fun(self, name: str, arg_sorts: tuple[str, ...], ret_sort: str) -> FunSymbol:
        self._check_fresh(name)
        f = FunSymbol(name, arg_sorts, ret_sort)
        self.funs[name] = f
        self._order.append(name)
        return f


@dataclass
class Formula:
    """A CNF problem: clauses with Original origins 0..n-1, plus the shared
    atom table.  Immutable by convention once built."""
    clauses: list[Clause]
    atoms: AtomTable
    declarations: Optional[Declarations]
    logic: str

    def __post_init__(self):
        for i, c in enumerate(self.clauses):
            if not isinstance(c.origin, Original) or c.origin.index != i:
                raise ValueError(f"clause {i} has origin {c.origin!r}; expected Original(index={i})")

    def __len__(self) -> int:
        return len(self.clauses)

    def restrict(self, indices: Iterable[int]) -> "Formula":
        """Sub-formula induced by a set of clause indices (re-indexed, same
        atom table; assertion ids preserved)."""
        picked = sorted(set(indices))
        sub = []
        for new_i, old_i in enumerate(picked):
            old = self.clauses[old_i]
            aid = old.origin.assertion_id if isinstance(old.origin, Original) else -1
            sub.append(Clause(old.lits, Original(new_i, aid)))
        return Formula(sub, self.atoms, self.declarations, self.logic)

    def assertion_ids(self, indices: Iterable[int]) -> tuple[int, ...]:
        ids = set()
        for i in indices:
            origin = self.clauses[i].origin
            if isinstance(origin, Original):
                ids.add(origin.assertion_id)
        return tuple(sorted(ids))


def formula_from_clauses(lit_clauses: list[tuple[Literal, ...]], atoms: AtomTable,
                         declarations: Optional[Declarations] = None,
                         logic: Optional[str] = None) -> Formula:
    """Build an internal Formula from bare literal tuples (assertion id ==
    clause index).  Used by enumeration and test harnesses."""
    clauses = [Clause(lits, Original(i, i)) for i, lits in enumerate(lit_clauses)]
    if logic is None:
        logic = infer_logic(clauses, atoms)
    return Formula(clauses, atoms, declarations, logic)


def infer_logic(clauses: Iterable[Clause], atoms: AtomTable) -> str:
    theories = set()
    for c in clauses:
        for lit in c.lits:
            t = atom_theory(atoms.atom(lit.atom))
            if t:
                theories.add(t)
    if len(theories) > 1:
        raise SortError("formula mixes EUF and LRA atoms; theory combination is unsupported")
    if LOGIC_EUF in theories:
        return LOGIC_EUF
    if LOGIC_LRA in theories:
        return LOGIC_LRA
    return LOGIC_PROP
