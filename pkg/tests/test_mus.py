import itertools
import random

import pytest

from gen import labeled_corpus
from oracles import brute_force_smt_sat, cnf_truth_table_sat
from smtcore.cnf import cnf_convert
from smtcore.cores import check_core
from smtcore.mus import (
    _sequential_counter_atmost, all_minimal_cores, enumerate_mcs,
    minimal_hitting_sets, single_mus,
)
from smtcore.parser import parse
from smtcore.smt import smt_solve
from smtcore.terms import AtomTable, Literal, PropAtom

MCS_FAMILY = [{0}, {1}, {2}, {3}, {5}, {4, 7}]
CORE_A = frozenset({0, 1, 2, 3, 4, 5})
CORE_B = frozenset({0, 1, 2, 3, 5, 7})


def test_sequential_counter_matches_brute_force():
    rng = random.Random(3)
    for n in range(1, 6):
        for k in range(1, n + 1):
            table = AtomTable()
            xs = [table.intern(PropAtom(f"x{i}")) for i in range(n)]
            lits = [Literal(x, True) for x in xs]
            clauses = [[l.signed() for l in c]
                       for c in _sequential_counter_atmost(lits, k, table, "t")]
            nvars = len(table)
            # for every assignment of the xs, the encoding must be extendable
            # exactly when at most k are true
            for bits in itertools.product([False, True], repeat=n):
                fixed = [[x] if b else [-x] for x, b in zip(xs, bits)]
                ok = cnf_truth_table_sat(clauses + fixed, nvars)
                assert ok == (sum(bits) <= k)


class TestEnumerateMcs:
    def test_nine_clause_instance_has_exactly_six_mcses(self, nine_clauses):
        result = enumerate_mcs(nine_clauses)
        assert result.complete and not result.satisfiable
        assert sorted(sorted(m) for m in result.mcses) == \
            sorted(sorted(m) for m in MCS_FAMILY)

    def test_satisfiable_formula_gives_empty_set(self):
        f = cnf_convert(parse("(declare-fun y () Real)(assert (< y 0))"))
        result = enumerate_mcs(f)
        assert result.satisfiable and result.mcses == []

    def test_two_contradictory_units(self):
        f = cnf_convert(parse(
            "(declare-fun x () Real)(assert (= x 0))(assert (not (= x 0)))"))
        result = enumerate_mcs(f)
        assert sorted(sorted(m) for m in result.mcses) == [[0], [1]]

    def test_every_mcs_complement_is_satisfiable_and_minimal(self, nine_clauses):
        result = enumerate_mcs(nine_clauses)
        all_idx = set(range(len(nine_clauses.clauses)))
        for mcs in result.mcses:
            verdict, _ = smt_solve(nine_clauses.restrict(all_idx - mcs))
            assert verdict.status == "sat"
            for c in mcs:
                verdict, _ = smt_solve(nine_clauses.restrict(all_idx - (mcs - {c})))
                assert verdict.status == "unsat"

    def test_no_mcs_is_a_subset_of_another(self, nine_clauses):
        result = enumerate_mcs(nine_clauses)
        for m1 in result.mcses:
            for m2 in result.mcses:
                assert m1 is m2 or not (m1 < m2)

    def test_cap_flags_incomplete(self, nine_clauses):
        result = enumerate_mcs(nine_clauses, cap=2)
        assert not result.complete and len(result.mcses) == 2


class TestHittingSets:
    def test_expected_family_yields_both_minimal_cores(self):
        mus = minimal_hitting_sets([frozenset(m) for m in MCS_FAMILY])
        assert mus.complete
        assert set(mus.muses) == {CORE_A, CORE_B}

    def test_two_singletons(self):
        mus = minimal_hitting_sets([frozenset({0}), frozenset({1})])
        assert mus.muses == [frozenset({0, 1})]

    def test_one_pair(self):
        mus = minimal_hitting_sets([frozenset({0, 1})])
        assert set(mus.muses) == {frozenset({0}), frozenset({1})}

    def test_members_are_pairwise_incomparable(self):
        sets = [frozenset(s) for s in ({0, 1}, {1, 2}, {2, 3}, {0, 3})]
        mus = minimal_hitting_sets(sets)
        for m1 in mus.muses:
            for m2 in mus.muses:
                assert m1 is m2 or not (m1 < m2)

    def test_against_brute_force_on_random_families(self):
        rng = random.Random(17)
        for _ in range(60):
            universe = list(range(rng.randint(2, 6)))
            fam = []
            for _ in range(rng.randint(1, 5)):
                size = rng.randint(1, len(universe))
                fam.append(frozenset(rng.sample(universe, size)))
            got = set(minimal_hitting_sets(fam).muses)
            # brute force: all subsets that hit everything, filtered to minimal
            hitting = [frozenset(s)
                       for r in range(len(universe) + 1)
                       for s in itertools.combinations(universe, r)
                       if all(set(s) & f for f in fam)]
            minimal = {h for h in hitting
                       if not any(o < h for o in hitting)}
            assert got == minimal


class TestSingleMus:
    def test_expected_family_gives_one_minimal_core(self):
        got = single_mus([frozenset(m) for m in MCS_FAMILY])
        assert got in (CORE_A, CORE_B)

    def test_singleton(self):
        assert single_mus([frozenset({0})]) == frozenset({0})

    def test_one_deletion_hitting_test(self):
        rng = random.Random(23)
        for _ in range(80):
            universe = list(range(rng.randint(2, 6)))
            fam = [frozenset(rng.sample(universe, rng.randint(1, len(universe))))
                   for _ in range(rng.randint(1, 5))]
            got = single_mus(fam)
            assert all(f & got for f in fam)
            for e in got:
                assert any(not (f & (got - {e})) for f in fam)


class TestDuality:
    def test_mus_set_equals_brute_force_enumeration(self, nine_clauses):
        _, mus = all_minimal_cores(nine_clauses)
        assert set(mus.muses) == {CORE_A, CORE_B}
        for m in mus.muses:
            assert check_core(nine_clauses, m) is None
            for c in m:
                verdict, _ = smt_solve(nine_clauses.restrict(m - {c}))
                assert verdict.status == "sat"

    @pytest.mark.parametrize("theory", ["LRA", "EUF"])
    def test_duality_on_random_small_instances(self, theory):
        unsat, _ = labeled_corpus(theory, want_unsat=10, want_sat=0,
                                  oracle=brute_force_smt_sat, seed=5,
                                  max_atoms=4, max_clauses=6)
        for formula in unsat:
            n = len(formula.clauses)
            mcs, mus = all_minimal_cores(formula)
            assert mcs.complete and mus.complete
            # brute-force all one-deletion-minimal theory-unsat subsets
            expected = set()
            for r in range(1, n + 1):
                for subset in itertools.combinations(range(n), r):
                    sub = set(subset)
                    verdict, _ = smt_solve(formula.restrict(sub))
                    if verdict.status != "unsat":
                        continue
                    if all(smt_solve(formula.restrict(sub - {c}))[0].status == "sat"
                           for c in sub):
                        expected.add(frozenset(sub))
            assert set(mus.muses) == expected
