import json

import pytest

from lcsim.errors import RingStateError, UnknownLabelError
from lcsim.ribbon import (
    EVENT_TWIST_CLASS,
    Component,
    RingStatus,
    SurgeryKind,
    TwistAngle,
    apply_surgery,
    compose_twists,
    connectivity_projection,
    correspondence_check,
    crossing_of,
    export_diagram,
    from_json,
    initial_chain,
    mirrored,
    phase_to_twist,
    to_json,
    twist_to_phase,
)
from lcsim.statevector import Outcome, PauliBasis
from lcsim.symbolic import new_chain, symbolic_measure

P, M = Outcome.PLUS, Outcome.MINUS
Z, X, Y = PauliBasis.Z, PauliBasis.X, PauliBasis.Y
FLAT, RIGHT, FLIP, LEFT = TwistAngle.FLAT, TwistAngle.RIGHT, TwistAngle.FLIP, TwistAngle.LEFT


class TestTwistDictionary:
    def test_phases(self):
        assert twist_to_phase(FLAT) == 1
        assert twist_to_phase(RIGHT) == 1j
        assert twist_to_phase(FLIP) == -1
        assert twist_to_phase(LEFT) == -1j

    def test_inverse_direction(self):
        assert phase_to_twist(-1j) is LEFT
        assert phase_to_twist(1) is FLAT

    def test_round_trip_on_all_four(self):
        for t in TwistAngle:
            assert phase_to_twist(twist_to_phase(t)) is t

    def test_rejects_other_phases(self):
        with pytest.raises(ValueError):
            phase_to_twist(0.5 + 0.5j)

    def test_compose_examples(self):
        assert compose_twists(RIGHT, RIGHT) is FLIP
        assert compose_twists(LEFT, RIGHT) is FLAT
        assert compose_twists(FLIP, FLIP) is FLAT

    def test_group_isomorphism_all_16_pairs(self):
        for a in TwistAngle:
            for b in TwistAngle:
                assert twist_to_phase(compose_twists(a, b)) == twist_to_phase(a) * twist_to_phase(b)

    def test_chirality_distinct_and_crossings_differ(self):
        assert RIGHT is not LEFT
        assert crossing_of(RIGHT) == "over"
        assert crossing_of(LEFT) == "under"
        assert crossing_of(FLAT) == crossing_of(FLIP) == "none"


class TestInitialChain:
    def test_four_rings_three_flat_ribbons(self):
        ch = initial_chain(4)
        assert [c.rings for c in ch.components] == [(1, 2, 3, 4)]
        assert all(t is FLAT for t in ch.components[0].twists)
        assert len(ch.components[0].twists) == 3

    def test_single_ring(self):
        ch = initial_chain(1)
        assert ch.components[0].rings == (1,) and ch.components[0].twists == ()

    def test_zero_total_writhe(self):
        ch = initial_chain(6)
        total = FLAT
        for t in ch.components[0].twists:
            total = compose_twists(total, t)
        assert total is FLAT


def comps(chain):
    return [c.rings for c in chain.components]


class TestSurgeries:
    def test_z_bulk_plus_severs(self):
        ch, ev = apply_surgery(initial_chain(5), 3, Z, P)
        assert ev.kind is SurgeryKind.SEVERANCE
        assert comps(ch) == [(1, 2), (4, 5)]
        assert ch.ring(3).status is RingStatus.REMOVED

    def test_z_bulk_minus_flips_ribbons_adjacent_to_cut(self):
        ch, ev = apply_surgery(initial_chain(5), 3, Z, M)
        assert ev.kind is SurgeryKind.SEVERANCE_WITH_FLIPS
        left, right = ch.components
        assert left.twists == (FLIP,)  # ribbon 1-2
        assert right.twists == (FLIP,)  # ribbon 4-5

    def test_z_end_minus_flips_subsequent_ribbon(self):
        ch, ev = apply_surgery(initial_chain(4), 1, Z, M)
        assert ev.kind is SurgeryKind.PRUNING_WITH_FLIP
        assert comps(ch) == [(2, 3, 4)]
        assert ch.components[0].twists == (FLIP, FLAT)

    def test_y_bulk_plus_right_twisted_fuse(self):
        ch, ev = apply_surgery(initial_chain(5), 3, Y, P)
        assert ev.kind is SurgeryKind.TWIST_SPLICE_RIGHT
        assert comps(ch) == [(1, 2, 4, 5)]
        assert ch.components[0].twists == (FLAT, RIGHT, FLAT)

    def test_x_bulk_outcomes(self):
        ch, ev = apply_surgery(initial_chain(5), 3, X, P)
        assert ev.kind is SurgeryKind.FLAT_SPLICE
        assert ch.components[0].twists == (FLAT, FLAT, FLAT)
        ch, ev = apply_surgery(initial_chain(5), 3, X, M)
        assert ev.kind is SurgeryKind.FLIPPED_SPLICE
        assert ch.components[0].twists == (FLAT, FLIP, FLAT)

    def test_x_end_decouples_and_skips(self):
        ch, ev = apply_surgery(initial_chain(4), 1, X, P)
        assert ev.kind is SurgeryKind.BOUNDARY_SKIP
        assert comps(ch) == [(3, 4)]
        assert ch.ring(2).status is RingStatus.DECOUPLED
        assert ch.components[0].twists == (FLAT,)  # new boundary ribbon stays flat

    def test_x_end_minus_flips_new_boundary_ribbon(self):
        ch, ev = apply_surgery(initial_chain(4), 1, X, M)
        assert ev.kind is SurgeryKind.BOUNDARY_SKIP_WITH_FLIP
        assert ch.components[0].twists == (FLIP,)

    def test_y_end_then_mirror_end_accumulates_flip_mark(self):
        ch, _ = apply_surgery(initial_chain(3), 1, Y, M)
        assert ch.components[0].twists == (LEFT,)
        ch, _ = apply_surgery(ch, 3, Y, M)
        # Left + Left composes to a 180 degree mark on the surviving ring
        assert comps(ch) == [(2,)]
        assert ch.ring(2).mark is FLIP
        assert any("boundary mark" in n for n in ch.notes)

    def test_removed_ring_rejected(self):
        ch, _ = apply_surgery(initial_chain(3), 1, Z, P)
        with pytest.raises(RingStateError):
            apply_surgery(ch, 1, Z, P)
        with pytest.raises(UnknownLabelError):
            apply_surgery(ch, 17, Z, P)

    def test_decoupled_ring_measures_as_pruning(self):
        ch, _ = apply_surgery(initial_chain(4), 1, X, P)
        ch, ev = apply_surgery(ch, 2, Z, P)
        assert ev.kind is SurgeryKind.PRUNING
        assert ch.ring(2).status is RingStatus.REMOVED

    def test_connectivity_soundness(self):
        # component count grows only on bulk severance
        ch = initial_chain(8)
        z_bulk_events = 0
        for q, basis, outcome in ((4, Z, P), (1, Y, M), (6, Y, P), (2, Z, M), (8, Z, P)):
            sizes = {c.rings for c in ch.components}
            is_bulk = any(q in c.rings[1:-1] for c in ch.components)
            ch, ev = apply_surgery(ch, q, basis, outcome)
            if basis is Z and is_bulk:
                z_bulk_events += 1
            assert len(ch.components) == 1 + z_bulk_events


class TestMirror:
    def test_mirror_swaps_chirality(self):
        ch, _ = apply_surgery(initial_chain(5), 3, Y, P)
        mirror = mirrored(ch)
        assert mirror.components[0].rings == (5, 4, 2, 1)
        assert RIGHT in ch.components[0].twists
        assert LEFT in mirror.components[0].twists
        assert RIGHT not in mirror.components[0].twists

    def test_mirror_fixes_achiral_twists(self):
        ch, _ = apply_surgery(initial_chain(5), 3, X, M)
        assert mirrored(ch).components[0].twists == tuple(reversed(ch.components[0].twists))


class TestExportDiagram:
    def test_initial_pair_document(self):
        doc = export_diagram(initial_chain(2))
        assert doc == {
            "components": [
                {
                    "rings": [
                        {"id": 1, "status": "active", "mark": None},
                        {"id": 2, "status": "active", "mark": None},
                    ],
                    "ribbons": [{"l": 1, "r": 2, "twist": 0, "crossing": "none"}],
                }
            ],
            "events": [],
        }

    def test_y_bulk_plus_shows_over_crossing(self):
        ch, _ = apply_surgery(initial_chain(3), 2, Y, P)
        doc = export_diagram(ch)
        ribbon = doc["components"][0]["ribbons"][0]
        assert ribbon == {"l": 1, "r": 3, "twist": 90, "crossing": "over"}

    def test_left_twist_encoded_as_270(self):
        ch, _ = apply_surgery(initial_chain(3), 2, Y, M)
        assert export_diagram(ch)["components"][0]["ribbons"][0]["twist"] == 270

    def test_z_bulk_plus_two_component_arrays(self):
        ch, _ = apply_surgery(initial_chain(5), 3, Z, P)
        doc = export_diagram(ch)
        assert [len(g["rings"]) for g in doc["components"]] == [2, 2]

    def test_decoupled_ring_is_singleton_group(self):
        ch, _ = apply_surgery(initial_chain(4), 1, X, P)
        doc = export_diagram(ch)
        assert [g["rings"][0]["id"] for g in doc["components"]] == [2, 3]
        assert doc["components"][0]["rings"][0]["status"] == "decoupled"

    def test_deterministic_serialization(self):
        ch, _ = apply_surgery(initial_chain(6), 3, Z, M)
        assert json.dumps(export_diagram(ch)) == json.dumps(export_diagram(ch))


class TestPhaseBlindness:
    def test_connectivity_projection_identifies_x_and_y_bulk(self):
        x_chain, _ = apply_surgery(initial_chain(5), 3, X, P)
        y_chain, _ = apply_surgery(initial_chain(5), 3, Y, P)
        x_doc, y_doc = export_diagram(x_chain), export_diagram(y_chain)
        assert x_doc != y_doc
        assert connectivity_projection(x_doc) == connectivity_projection(y_doc)


class TestCorrespondence:
    def run_pair(self, n, steps):
        sym = new_chain(n)
        chain = initial_chain(n)
        for q, basis, outcome in steps:
            sym, _ = symbolic_measure(sym, q, basis, outcome)
            rec = sym.history[-1]
            chain, _ = apply_surgery(chain, q, rec.effective_basis, rec.effective_outcome)
        return chain, sym

    def test_y_bulk_plus(self):
        chain, sym = self.run_pair(5, [(3, Y, P)])
        report = correspondence_check(chain, sym)
        assert report.ok and report.partition_ok and report.twist_ok

    def test_z_bulk_partitions(self):
        chain, sym = self.run_pair(5, [(3, Z, P)])
        assert correspondence_check(chain, sym).ok
        assert len(chain.components) == 2 and len(sym.segments) == 2

    def test_x_vs_y_same_partition_different_twists(self):
        xi, sx = self.run_pair(5, [(3, X, P)])
        yi, sy = self.run_pair(5, [(3, Y, P)])
        assert {c.rings for c in xi.components} == {c.rings for c in yi.components}
        assert xi.components[0].twists != yi.components[0].twists

    def test_x_end_decoupled_matching(self):
        chain, sym = self.run_pair(6, [(1, X, M)])
        report = correspondence_check(chain, sym)
        assert report.ok and report.decoupled_ok

    def test_longer_sequence(self):
        chain, sym = self.run_pair(7, [(4, Y, M), (1, Z, M), (7, Y, P), (2, Z, P)])
        assert correspondence_check(chain, sym).ok

    def test_history_mismatch_raises(self):
        chain, _ = self.run_pair(4, [(2, Y, P)])
        _, sym = self.run_pair(4, [(3, Y, P)])
        with pytest.raises(ValueError):
            correspondence_check(chain, sym)

    def test_event_classes_cover_rule_classes(self):
        # every X/Y event kind's twist maps onto a byproduct phase
        for kind, twist in EVENT_TWIST_CLASS.items():
            assert twist_to_phase(twist) in (1, 1j, -1, -1j)


class TestSerialization:
    def test_round_trip(self):
        ch, _ = apply_surgery(initial_chain(5), 1, X, M)
        ch, _ = apply_surgery(ch, 4, Y, M)
        again = from_json(json.loads(json.dumps(to_json(ch))))
        assert again == ch
