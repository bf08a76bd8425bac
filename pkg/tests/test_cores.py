import pytest

from gen import labeled_corpus
from oracles import brute_force_smt_sat
from smtcore.cnf import cnf_convert
from smtcore.cores import (
    BridgeError, ExtractorConfig, ExtractionError, boolean_core, check_core,
    external_bridge, lemma_lift_core, minimize_core, self_extractor_command,
    smt_assumption_core, smt_proof_core,
)
from smtcore.parser import parse
from smtcore.smt import smt_solve
from smtcore.terms import TLemmaOrigin

CORE_A = (0, 1, 2, 3, 4, 5)
CORE_B = (0, 1, 2, 3, 5, 7)


def lifted_clauses(formula):
    _, store = smt_solve(formula)
    rows = [formula.atoms.t2p(c) for c in formula.clauses]
    rows += [formula.atoms.t2p(l.clause) for l in store]
    return rows


class TestExtractorConfig:
    def test_external_requires_placeholders(self):
        with pytest.raises(ValueError, match="placeholders"):
            ExtractorConfig("external", command="mytool problem.cnf")
        with pytest.raises(ValueError, match="command"):
            ExtractorConfig("external")

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            ExtractorConfig("magic")


class TestBooleanCore:
    def test_minimal_unsat_pair(self):
        core = boolean_core([[1], [-1], [2]], ExtractorConfig("internal-proof"))
        assert core == [0, 1]

    def test_selectors_agree_on_shape(self):
        core = boolean_core([[1], [-1], [2]], ExtractorConfig("internal-selectors"))
        assert core == [0, 1]

    def test_satisfiable_input_is_an_error(self):
        with pytest.raises(ExtractionError, match="satisfiable"):
            boolean_core([[1, 2]], ExtractorConfig("internal-proof"))

    def test_fixpoint_stabilizes(self, nine_clauses):
        rows = lifted_clauses(nine_clauses)
        cfg = ExtractorConfig("internal-proof", fixpoint=True)
        core = boolean_core(rows, cfg, nvars=len(nine_clauses.atoms))
        again = boolean_core([rows[i] for i in core],
                             ExtractorConfig("internal-proof"),
                             nvars=len(nine_clauses.atoms))
        assert [core[j] for j in again] == core  # already a fixpoint

    def test_fixpoint_sizes_never_increase(self, nine_clauses):
        rows = lifted_clauses(nine_clauses)
        plain = boolean_core(rows, ExtractorConfig("internal-proof"),
                             nvars=len(nine_clauses.atoms))
        fixed = boolean_core(rows, ExtractorConfig("internal-proof", fixpoint=True),
                             nvars=len(nine_clauses.atoms))
        assert len(fixed) <= len(plain)


class TestLemmaLifting:
    def test_nine_clause_internal_proof(self, nine_clauses):
        report = lemma_lift_core(nine_clauses, ExtractorConfig("internal-proof"),
                                 verify=True)
        assert report.verdict == "unsat"
        assert set(report.core) <= set(range(9))
        assert report.verification == "verified"

    def test_nine_clause_minimize_reaches_a_minimal_core(self, nine_clauses):
        report = lemma_lift_core(
            nine_clauses, ExtractorConfig("internal-proof", minimize=True), verify=True)
        assert report.core in (CORE_A, CORE_B)

    def test_sat_input_short_circuits(self):
        f = cnf_convert(parse("(declare-fun y () Real)(assert (< y 0))"))
        report = lemma_lift_core(f, ExtractorConfig("internal-proof"))
        assert report.verdict == "sat" and report.core == ()

    def test_gap_instance_with_empty_store(self, abstraction_gap):
        report = lemma_lift_core(abstraction_gap, ExtractorConfig("internal-proof"),
                                 verify=True, early_pruning=False,
                                 theory_propagation=False)
        assert report.core == (0, 1, 2, 3)
        minimized = lemma_lift_core(
            abstraction_gap, ExtractorConfig("internal-proof", minimize=True),
            verify=True, early_pruning=False, theory_propagation=False)
        assert minimized.core == (0, 1, 2)

    def test_no_lemma_origin_in_any_report(self, nine_clauses):
        for kind in ("internal-proof", "internal-selectors"):
            report = lemma_lift_core(nine_clauses, ExtractorConfig(kind), verify=True)
            for i in report.core:
                assert not isinstance(nine_clauses.clauses[i].origin, TLemmaOrigin)
                assert i < len(nine_clauses.clauses)

    def test_assertion_level_view(self, nine_clauses):
        report = lemma_lift_core(nine_clauses, ExtractorConfig("internal-proof"))
        # one clause per assertion in this instance
        assert report.assertions == report.core


class TestBaselines:
    def test_smt_proof_core_verifies(self, nine_clauses):
        report = smt_proof_core(nine_clauses, verify=True)
        assert report.verdict == "unsat"
        assert check_core(nine_clauses, report.core) is None

    def test_smt_assumption_core_verifies(self, nine_clauses):
        report = smt_assumption_core(nine_clauses, verify=True)
        assert report.verdict == "unsat"
        assert check_core(nine_clauses, report.core) is None

    def test_assumption_core_does_not_grow_the_input_table(self, nine_clauses):
        before = len(nine_clauses.atoms)
        smt_assumption_core(nine_clauses)
        assert len(nine_clauses.atoms) == before

    def test_both_baselines_on_contradictory_units(self):
        f = cnf_convert(parse(
            "(declare-fun x () Real)(assert (= x 1))(assert (= x 0))"))
        assert smt_proof_core(f, verify=True).core == (0, 1)
        assert smt_assumption_core(f, verify=True).core == (0, 1)

    def test_baselines_sat_path(self):
        f = cnf_convert(parse("(declare-fun y () Real)(assert (< y 0))"))
        assert smt_proof_core(f).verdict == "sat"
        assert smt_assumption_core(f).verdict == "sat"


class TestMinimize:
    def test_seven_clause_core_drops_the_redundant_clause(self, nine_clauses):
        assert minimize_core(nine_clauses, [0, 1, 2, 3, 5, 6, 7]) == list(CORE_B)

    def test_minimal_core_is_a_fixed_point(self, nine_clauses):
        assert minimize_core(nine_clauses, list(CORE_B)) == list(CORE_B)

    def test_gap_instance_keeps_first_three(self, abstraction_gap):
        assert minimize_core(abstraction_gap, [0, 1, 2, 3]) == [0, 1, 2]

    def test_satisfiable_core_rejected(self, nine_clauses):
        with pytest.raises(ValueError, match="unsatisfiable"):
            minimize_core(nine_clauses, [0, 1])

    def test_one_deletion_minimality(self, nine_clauses):
        core = minimize_core(nine_clauses, list(range(9)))
        for i in core:
            rest = [j for j in core if j != i]
            verdict, _ = smt_solve(nine_clauses.restrict(rest))
            assert verdict.status == "sat"


class TestCheckCore:
    def test_known_core_passes(self, nine_clauses):
        assert check_core(nine_clauses, CORE_A) is None

    def test_dropping_the_unit_makes_it_satisfiable(self, nine_clauses):
        out = check_core(nine_clauses, [0, 1, 2, 3, 4, 6, 7, 8])
        assert out is not None and "sat" in out

    def test_out_of_range_index(self, nine_clauses):
        assert "out of range" in check_core(nine_clauses, [99])


class TestBridge:
    def test_self_bridge_round_trip(self, nine_clauses):
        rows = lifted_clauses(nine_clauses)
        direct = boolean_core(rows, ExtractorConfig("internal-proof"),
                              nvars=len(nine_clauses.atoms))
        via = external_bridge(rows, self_extractor_command(),
                              nvars=len(nine_clauses.atoms))
        assert via == direct

    def test_dimacs_subset_mode(self, nine_clauses):
        rows = lifted_clauses(nine_clauses)
        cmd = self_extractor_command() + " --mode dimacs-subset"
        via = external_bridge(rows, cmd, mode="dimacs-subset",
                              nvars=len(nine_clauses.atoms))
        direct = boolean_core(rows, ExtractorConfig("internal-proof"),
                              nvars=len(nine_clauses.atoms))
        assert via == direct

    def test_full_clause_list_is_accepted(self):
        cmd = f"{_python()} -c \"import sys,shutil; open(sys.argv[2],'w').write('1\\n2\\n')\" {{in}} {{out}}"
        core = external_bridge([[1], [-1]], cmd)
        assert core == [0, 1]

    def test_out_of_range_core_rejected(self):
        cmd = f"{_python()} -c \"import sys; open(sys.argv[2],'w').write('9\\n')\" {{in}} {{out}}"
        with pytest.raises(BridgeError, match="interpret"):
            external_bridge([[1], [-1]], cmd)

    def test_nonzero_exit_reported(self):
        cmd = f"{_python()} -c \"import sys; sys.exit(3)\" {{in}} {{out}}"
        with pytest.raises(BridgeError, match="status 3"):
            external_bridge([[1], [-1]], cmd)

    def test_satisfiable_core_rejected(self):
        cmd = f"{_python()} -c \"import sys; open(sys.argv[2],'w').write('3\\n')\" {{in}} {{out}}"
        with pytest.raises(BridgeError, match="satisfiable"):
            external_bridge([[1], [-1], [2]], cmd)

    def test_lift_external_end_to_end(self, nine_clauses):
        report = lemma_lift_core(
            nine_clauses,
            ExtractorConfig("external", command=self_extractor_command()),
            verify=True)
        direct = lemma_lift_core(nine_clauses, ExtractorConfig("internal-proof"))
        assert report.core == direct.core


def _python():
    import shlex
    import sys
    return shlex.quote(sys.executable)


class TestSoundnessOnRandomCorpus:
    @pytest.mark.parametrize("theory", ["LRA", "EUF"])
    def test_every_method_passes_check_core(self, theory):
        unsat, _ = labeled_corpus(theory, want_unsat=25, want_sat=0,
                                  oracle=brute_force_smt_sat, seed=77)
        for formula in unsat:
            reports = [
                lemma_lift_core(formula, ExtractorConfig("internal-proof"), verify=True),
                lemma_lift_core(formula, ExtractorConfig("internal-selectors"), verify=True),
                smt_proof_core(formula, verify=True),
                smt_assumption_core(formula, verify=True),
            ]
            for report in reports:
                assert report.verdict == "unsat"
                assert set(report.core) <= set(range(len(formula.clauses)))
                assert check_core(formula, report.core) is None
            minimized = minimize_core(formula, reports[0].core)
            for i in minimized:
                rest = [j for j in minimized if j != i]
                verdict, _ = smt_solve(formula.restrict(rest))
                assert verdict.status == "sat"
