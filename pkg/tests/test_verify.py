import dataclasses
import math

import pytest

from lcsim.statevector import Outcome, PauliBasis
from lcsim.verify import (
    Verdict,
    canonical_json,
    check_case,
    missed_verdicts,
    random_sequence_test,
    run_full,
    run_table_suite,
    single_qubit_cliffords,
    xbulk_deviation_report,
)

P, M = Outcome.PLUS, Outcome.MINUS
Z, X, Y = PauliBasis.Z, PauliBasis.X, PauliBasis.Y
INV_SQRT2 = 1 / math.sqrt(2)


class TestCheckCase:
    def test_z_bulk_severs_rank_one(self):
        rep = check_case(3, 2, Z, P)
        assert rep.rank_left_right == 1
        assert rep.verdict is Verdict.LITERAL_MATCH_TOO
        assert rep.probability == pytest.approx(0.5, abs=1e-12)

    def test_y_bulk_rank_two_literal_match(self):
        rep = check_case(3, 2, Y, P)
        assert rep.rank_left_right == 2
        assert rep.verdict is Verdict.LITERAL_MATCH_TOO

    def test_x_bulk_connectivity_only(self):
        rep = check_case(3, 2, X, P)
        assert rep.rank_left_right == 2
        assert rep.verdict is Verdict.CONNECTIVITY_ONLY
        assert rep.fidelity_exact >= 1 - 1e-10
        # both literal fidelities, frozen from the two explicit 2-qubit vectors:
        # plain overlap cancels; the best single-neighbour Z placement gives 1/sqrt(2)
        assert rep.fidelity_literal == pytest.approx(0.0, abs=1e-12)
        assert rep.fidelity_literal_mod_z == pytest.approx(INV_SQRT2, abs=1e-12)

    def test_end_case_positions(self):
        assert check_case(4, 1, Z, P).position == "end_left"
        assert check_case(4, 4, Z, P).position == "end_right"

    def test_invalid_case(self):
        with pytest.raises(ValueError):
            check_case(3, 4, Z, P)


class TestSuite:
    def test_small_suite_all_required_verdicts(self):
        summary = run_table_suite(3, 6)
        assert missed_verdicts(summary) == ()
        for rep in summary.reports:
            if not (rep.basis is X and rep.position == "bulk"):
                assert rep.verdict is Verdict.LITERAL_MATCH_TOO
            assert rep.probability == pytest.approx(0.5, abs=1e-12)

    def test_degenerate_two_qubit_chain(self):
        summary = run_table_suite(2, 2)
        assert missed_verdicts(summary) == ()
        assert len(summary.reports) == 2 * 3 * 2  # positions x bases x outcomes

    def test_deterministic_reports(self):
        a = run_table_suite(2, 4).to_json()
        b = run_table_suite(2, 4).to_json()
        assert canonical_json(a) == canonical_json(b)

    def test_missed_verdict_detection(self):
        summary = run_table_suite(2, 3)
        bad = dataclasses.replace(summary.reports[0], verdict=Verdict.EXACT_MATCH)
        doctored = dataclasses.replace(summary, reports=(bad,) + summary.reports[1:])
        assert missed_verdicts(doctored)

    def test_probability_deviation_detected(self):
        summary = run_table_suite(2, 2)
        bad = dataclasses.replace(summary.reports[0], probability=0.5 + 1e-9)
        doctored = dataclasses.replace(summary, reports=(bad,) + summary.reports[1:])
        assert any("probability" in m for m in missed_verdicts(doctored))


class TestSequences:
    def test_seeded_run_passes(self):
        rep = random_sequence_test(8, 8, seed=42)
        assert rep.ok and rep.min_fidelity >= 1 - 1e-9
        assert rep.steps_run > 0

    def test_single_step_trivial(self):
        rep = random_sequence_test(2, 1, seed=5)
        assert rep.ok

    def test_reproducible(self):
        a = random_sequence_test(8, 8, seed=7)
        b = random_sequence_test(8, 8, seed=7)
        assert a == b

    @pytest.mark.parametrize("seed", range(30))
    def test_seed_sweep(self, seed):
        assert random_sequence_test(8, 8, seed=seed).ok


class TestCliffords:
    def test_exactly_24(self):
        cliffs = single_qubit_cliffords()
        assert len(cliffs) == 24
        words = [w for w, _ in cliffs]
        assert "I" in words and "H" in words and "S" in words


class TestXBulkReport:
    def test_rows_and_corrections(self):
        rep = xbulk_deviation_report(5)
        assert all(row.rank == 2 for row in rep.rows)
        assert all(row.probability == pytest.approx(0.5, abs=1e-12) for row in rep.rows)
        assert all(row.fidelity_exact >= 1 - 1e-10 for row in rep.rows)
        n3 = [row for row in rep.rows if row.n == 3]
        assert all(row.fidelity_literal == pytest.approx(0.0, abs=1e-12) for row in n3)
        assert all(
            row.fidelity_literal_mod_z == pytest.approx(INV_SQRT2, abs=1e-12) for row in n3
        )
        for c in rep.corrections:
            assert c["fidelity"] >= 1 - 1e-10
            assert c["rotation"]  # a named one-qubit rotation on a neighbour

    def test_requires_three_qubits(self):
        with pytest.raises(ValueError):
            xbulk_deviation_report(2)


class TestRunFull:
    def test_green_end_to_end(self):
        report = run_full(n_min=2, n_max=4, sequence_count=3, sequence_n=6, seed=1)
        assert report.ok and report.missed == ()
        text = report.to_text()
        assert "PASS" in text
        js = canonical_json(report.to_json())
        assert "duration" not in js  # timing excluded from canonical reports
