"""General simplex over the rationals for linear arithmetic.

Variables (original theory variables plus one slack per distinct
coefficient vector) carry optional lower/upper bounds valued in
delta-rationals, so strict inequalities are exact.  Pivoting uses Bland's
rule (first eligible by fixed variable order), which guarantees
termination.  Conflicts are the Farkas row of the failing bound: the
bound-introducing literals with nonzero coefficient in the infeasibility
certificate; they are sound but not necessarily minimal.

Negated equalities are held aside as disequalities and settled inside
check_full by probing both strict sides; when both sides fail the conflict
is the union of the two certificates plus the disequality literal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..terms import LinAtom, Literal, Var, eval_lin_atom
from .base import Deduction, TheorySolver, TheoryVerdict


@dataclass(frozen=True)
class DeltaRational:
    """Rational plus an infinitesimal coefficient, ordered lexicographically."""
    real: Fraction
    delta: Fraction = Fraction(0)

    def __add__(self, other: "DeltaRational") -> "DeltaRational":
        return DeltaRational(self.real + other.real, self.delta + other.delta)

    def __sub__(self, other: "DeltaRational") -> "DeltaRational":
        return DeltaRational(self.real - other.real, self.delta - other.delta)

    def scale(self, k: Fraction) -> "DeltaRational":
        return DeltaRational(self.real * k, self.delta * k)

    def _key(self):
        return (self.real, self.delta)

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def __gt__(self, other):
        return self._key() > other._key()

    def __ge__(self, other):
        return self._key() >= other._key()


class _Probe:
    """Sentinel bound reason used during disequality splits and deduction
    probes; never escapes into a reported conflict."""

    __slots__ = ("literal",)

    def __init__(self, literal: Optional[Literal]):
        self.literal = literal


@dataclass
class _Bound:
    value: DeltaRational
    reason: object  # Literal or _Probe


class LraSolver(TheorySolver):
    theory = "LRA"

    def __init__(self, table):
        super().__init__(table)
        self.columns: dict[Var, int] = {}
        self.slack_of: dict[tuple, int] = {}
        self.nvars = 0
        self.rows: dict[int, dict[int, Fraction]] = {}
        self.values: dict[int, DeltaRational] = {}
        self.lower: dict[int, _Bound] = {}
        self.upper: dict[int, _Bound] = {}
        self.ops: list[tuple] = []
        self._assert_marks: list[int] = []
        self.diseqs: list[tuple[int, Fraction, Literal]] = []

    def owns_atom(self, atom) -> bool:
        return isinstance(atom, LinAtom)

    # -- tableau ---------------------------------------------------------------

    def _new_id(self) -> int:
        vid = self.nvars
        self.nvars += 1
        self.values[vid] = DeltaRational(Fraction(0))
        return vid

    def _column(self, v: Var) -> int:
        vid = self.columns.get(v)
        if vid is None:
            vid = self._new_id()
            self.columns[v] = vid
        return vid

    def _slack(self, coeffs: tuple[tuple[Var, Fraction], ...]) -> int:
        key = tuple((v.index, c) for v, c in coeffs)
        sid = self.slack_of.get(key)
        if sid is not None:
            return sid
        row: dict[int, Fraction] = {}
        for v, c in coeffs:
            col = self._column(v)
            if col in self.rows:  # substitute an already-basic variable
                for k, ck in self.rows[col].items():
                    row[k] = row.get(k, Fraction(0)) + c * ck
            else:
                row[col] = row.get(col, Fraction(0)) + c
        row = {k: ck for k, ck in row.items() if ck != 0}
        assert row, "a nonzero linear form cannot reduce to the empty row"
        sid = self._new_id()
        self.slack_of[key] = sid
        self.rows[sid] = row
        val = DeltaRational(Fraction(0))
        for k, ck in row.items():
            val = val + self.values[k].scale(ck)
        self.values[sid] = val
        return sid

    def _update_nonbasic(self, xj: int, v: DeltaRational):
        delta = v - self.values[xj]
        for xi, row in self.rows.items():
            a = row.get(xj)
            if a:
                self.values[xi] = self.values[xi] + delta.scale(a)
        self.values[xj] = v

    def _pivot_and_update(self, xi: int, xj: int, v: DeltaRational):
        row = self.rows[xi]
        aij = row[xj]
        theta = (v - self.values[xi]).scale(Fraction(1) / aij)
        self.values[xi] = v
        self.values[xj] = self.values[xj] + theta
        for xk, rk in self.rows.items():
            if xk != xi:
                a = rk.get(xj)
                if a:
                    self.values[xk] = self.values[xk] + theta.scale(a)
        # pivot: xj leaves the nonbasic set, xi enters it
        del self.rows[xi]
        new_row = {xi: Fraction(1) / aij}
        for k, ck in row.items():
            if k != xj:
                new_row[k] = -ck / aij
        self.rows[xj] = new_row
        for xk, rk in list(self.rows.items()):
            if xk == xj:
                continue
            a = rk.pop(xj, None)
            if a:
                for k, ck in new_row.items():
                    nv = rk.get(k, Fraction(0)) + a * ck
                    if nv:
                        rk[k] = nv
                    else:
                        rk.pop(k, None)

    # -- bounds ------------------------------------------------------------------

    def _assert_bound(self, var: int, which: str, value: DeltaRational,
                      reason) -> Optional[list]:
        store = self.lower if which == "lower" else self.upper
        cur = store.get(var)
        better = cur is None or (value > cur.value if which == "lower" else value < cur.value)
        if not better:
            self.ops.append(("noop",))
            return None
        self.ops.append(("bound", var, which, cur))
        store[var] = _Bound(value, reason)
        opp = (self.upper if which == "lower" else self.lower).get(var)
        if opp is not None:
            crossed = value > opp.value if which == "lower" else value < opp.value
            if crossed:
                return [reason, opp.reason]
        if var not in self.rows:  # nonbasic: move inside the bound
            if which == "lower" and self.values[var] < value:
                self._update_nonbasic(var, value)
            elif which == "upper" and self.values[var] > value:
                self._update_nonbasic(var, value)
        return None

    def _undo_ops(self, target: int):
        while len(self.ops) > target:
            op = self.ops.pop()
            if op[0] == "bound":
                _, var, which, old = op
                store = self.lower if which == "lower" else self.upper
                if old is None:
                    del store[var]
                else:
                    store[var] = old
            elif op[0] == "diseq":
                self.diseqs.pop()

    # -- assert / undo ------------------------------------------------------------

    def _assert(self, lit: Literal, atom: LinAtom) -> Optional[list[Literal]]:
        self._assert_marks.append(len(self.ops))
        if not atom.coeffs:
            holds = eval_lin_atom(atom, {})
            if holds != lit.positive:
                return [lit]
            return None
        sid = self._slack(atom.coeffs)
        c = -atom.offset
        rel, pos = atom.rel, lit.positive
        if rel == "<=":
            if pos:
                conf = self._assert_bound(sid, "upper", DeltaRational(c), lit)
            else:
                conf = self._assert_bound(sid, "lower", DeltaRational(c, Fraction(1)), lit)
        elif rel == "<":
            if pos:
                conf = self._assert_bound(sid, "upper", DeltaRational(c, Fraction(-1)), lit)
            else:
                conf = self._assert_bound(sid, "lower", DeltaRational(c), lit)
        else:  # "="
            if pos:
                conf = self._assert_bound(sid, "lower", DeltaRational(c), lit)
                if conf is None:
                    conf = self._assert_bound(sid, "upper", DeltaRational(c), lit)
            else:
                self.ops.append(("diseq",))
                self.diseqs.append((sid, c, lit))
                conf = None
                low, up = self.lower.get(sid), self.upper.get(sid)
                if (low is not None and up is not None
                        and low.value == up.value == DeltaRational(c)):
                    conf = [low.reason, up.reason, lit]
        if conf is None:
            return None
        return self._sanitize(conf)

    def _sanitize(self, reasons) -> list[Literal]:
        out = []
        seen = set()
        for r in reasons:
            lit = r.literal if isinstance(r, _Probe) else r
            assert isinstance(lit, Literal), "probe sentinel leaked into a conflict"
            key = (lit.atom, lit.positive)
            if key not in seen:
                seen.add(key)
                out.append(lit)
        return out

    def _undo_to(self, mark: int):
        target = self._assert_marks[mark] if mark < len(self._assert_marks) else len(self.ops)
        self._undo_ops(target)
        del self._assert_marks[mark:]

    # -- feasibility --------------------------------------------------------------

    def _check(self) -> Optional[list]:
        """Restore feasibility or return the raw reason list of a conflict
        (may contain probe sentinels)."""
        for var in sorted(self.lower):
            up = self.upper.get(var)
            if up is not None and self.lower[var].value > up.value:
                return [self.lower[var].reason, up.reason]
        while True:
            victim = None
            for xi in sorted(self.rows):
                low = self.lower.get(xi)
                if low is not None and self.values[xi] < low.value:
                    victim = (xi, "low")
                    break
                up = self.upper.get(xi)
                if up is not None and self.values[xi] > up.value:
                    victim = (xi, "up")
                    break
            if victim is None:
                return None
            xi, kind = victim
            row = self.rows[xi]
            pivot = None
            for xj in sorted(row):
                a = row[xj]
                if kind == "low":
                    ok = (a > 0 and (xj not in self.upper
                                     or self.values[xj] < self.upper[xj].value)) or \
                         (a < 0 and (xj not in self.lower
                                     or self.values[xj] > self.lower[xj].value))
                else:
                    ok = (a < 0 and (xj not in self.upper
                                     or self.values[xj] < self.upper[xj].value)) or \
                         (a > 0 and (xj not in self.lower
                                     or self.values[xj] > self.lower[xj].value))
                if ok:
                    pivot = xj
                    break
            if pivot is None:
                if kind == "low":
                    reasons = [self.lower[xi].reason]
                    for xj in sorted(row):
                        reasons.append(self.upper[xj].reason if row[xj] > 0
                                       else self.lower[xj].reason)
                else:
                    reasons = [self.upper[xi].reason]
                    for xj in sorted(row):
                        reasons.append(self.lower[xj].reason if row[xj] > 0
                                       else self.upper[xj].reason)
                return reasons
            target = self.lower[xi].value if kind == "low" else self.upper[xi].value
            self._pivot_and_update(xi, pivot, target)

    # -- disequality splitting ------------------------------------------------------

    def _violated_diseq(self, pinned: frozenset) -> Optional[int]:
        for i, (sid, c, _lit) in enumerate(self.diseqs):
            if i in pinned:
                continue
            if self.values[sid] == DeltaRational(c):
                return i
        return None

    def _settle_diseqs(self, pinned: frozenset) -> Optional[list]:
        i = self._violated_diseq(pinned)
        if i is None:
            return None
        sid, c, dlit = self.diseqs[i]
        collected = []
        for which, value in (("upper", DeltaRational(c, Fraction(-1))),
                             ("lower", DeltaRational(c, Fraction(1)))):
            mark = len(self.ops)
            probe = _Probe(dlit)
            conf = self._assert_bound(sid, which, value, probe)
            if conf is None:
                conf = self._check()
            if conf is None:
                conf = self._settle_diseqs(pinned | {i})
            if conf is None:
                return None  # this side works; probes stay until check_full unwinds
            self._undo_ops(mark)
            if probe not in conf:
                return conf  # conflict independent of the split
            collected.append([r for r in conf if r is not probe])
        merged = collected[0] + collected[1] + [dlit]
        return merged

    # -- public checks -----------------------------------------------------------------

    def check_full(self) -> TheoryVerdict:
        start = len(self.ops)
        conf = self._check()
        if conf is None:
            conf = self._settle_diseqs(frozenset())
        if conf is not None:
            self._undo_ops(start)
            return TheoryVerdict("conflict", conflict=self._sanitize(conf))
        witness = self._concrete_witness()
        self._undo_ops(start)
        return TheoryVerdict("sat", witness=witness)

    def _concrete_witness(self) -> dict[Var, Fraction]:
        eps = Fraction(1)
        atoms = [(self.table.atom(l.atom), l.positive) for l in self._asserted]
        for _ in range(220):
            vals = {v: self.values[vid].real + self.values[vid].delta * eps
                    for v, vid in self.columns.items()}
            if all(eval_lin_atom(a, vals) == pos for a, pos in atoms):
                return vals
            eps /= 2
        raise RuntimeError("could not concretize the infinitesimal")

    # -- deductions ------------------------------------------------------------------

    def _probe_bounds(self, sid: int, bounds: list[tuple[str, DeltaRational]]):
        """Temporarily assert bounds; returns the certificate literals (probe
        excluded) when infeasible, else None."""
        mark = len(self.ops)
        probe = _Probe(None)
        conf = None
        for which, value in bounds:
            conf = self._assert_bound(sid, which, value, probe)
            if conf is not None:
                break
        if conf is None:
            conf = self._check()
        self._undo_ops(mark)
        if conf is None:
            return None
        return self._sanitize(r for r in conf if r is not probe)

    def deductions(self) -> list[Deduction]:
        if self._check() is not None:
            return []
        out = []
        for atom_id, atom in self.table.items():
            if not isinstance(atom, LinAtom) or atom_id in self._asserted_atoms:
                continue
            if not atom.coeffs:
                holds = eval_lin_atom(atom, {})
                out.append(Deduction(Literal(atom_id, holds), ()))
                continue
            sid = self._slack(atom.coeffs)
            c = -atom.offset
            if atom.rel == "<=":
                pos_probe = [("lower", DeltaRational(c, Fraction(1)))]   # s > c
                neg_probe = [("upper", DeltaRational(c))]                # s <= c
            elif atom.rel == "<":
                pos_probe = [("lower", DeltaRational(c))]                # s >= c
                neg_probe = [("upper", DeltaRational(c, Fraction(-1)))]  # s < c
            else:
                pos_probe = None
                neg_probe = [("lower", DeltaRational(c)), ("upper", DeltaRational(c))]
            if atom.rel == "=":
                low = self._probe_bounds(sid, [("upper", DeltaRational(c, Fraction(-1)))])
                if low is not None:
                    high = self._probe_bounds(sid, [("lower", DeltaRational(c, Fraction(1)))])
                    if high is not None:
                        expl = self._sanitize(low + high)
                        out.append(Deduction(Literal(atom_id, True), tuple(expl)))
                        continue
            else:
                conf = self._probe_bounds(sid, pos_probe)
                if conf is not None:
                    out.append(Deduction(Literal(atom_id, True), tuple(conf)))
                    continue
            conf = self._probe_bounds(sid, neg_probe)
            if conf is not None:
                out.append(Deduction(Literal(atom_id, False), tuple(conf)))
        return out
