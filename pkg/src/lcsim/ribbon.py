"""Framed-ribbon model: rings joined by ribbons carrying discrete twists.

The twist dictionary maps geometry to phase: flat 0 deg to +1, right-handed
+90 deg to +i, full flip 180 deg to -1, left-handed -90 deg (stored as 270)
to -i. Twists compose by angle addition mod 360, the additive image of the
byproduct group S^t.

Surgery bookkeeping for sequences (the single-measurement cases of the case
tables never stack twists, so composition is this module's extension):

* a splice fuses the two ribbons at the target into one; the fused ribbon
  carries both old twists plus the rule's own twist;
* a removal orphans the removed ribbons' twists; each orphan, together with
  any twist the rule composes, lands on the nearest surviving ribbon on its
  side, or failing that on the surviving boundary ring as a ``boundary
  mark``. Mark usage is flagged in the state's notes, since open-end twists
  are a modelling choice rather than a case-table fact.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, IntEnum

from .errors import RingStateError, UnknownLabelError
from .symbolic import RULE_BYPRODUCT_PHASE, PauliBasis, Outcome, SymbolicState


class TwistAngle(IntEnum):
    FLAT = 0
    RIGHT = 90
    FLIP = 180
    LEFT = 270


_TWIST_PHASE: dict[TwistAngle, complex] = {
    TwistAngle.FLAT: 1,
    TwistAngle.RIGHT: 1j,
    TwistAngle.FLIP: -1,
    TwistAngle.LEFT: -1j,
}


def compose_twists(a: TwistAngle, b: TwistAngle) -> TwistAngle:
    """Addition mod 360; the dictionary sends it to phase multiplication."""
    return TwistAngle((int(a) + int(b)) % 360)


def twist_to_phase(t: TwistAngle) -> complex:
    return _TWIST_PHASE[TwistAngle(t)]


def phase_to_twist(p: complex) -> TwistAngle:
    for twist, phase in _TWIST_PHASE.items():
        if abs(complex(p) - phase) < 1e-12:
            return twist
    raise ValueError(f"{p!r} is not one of the four unit phases +1, +i, -1, -i")


def crossing_of(t: TwistAngle) -> str:
    """Over/under crossing of the right edge, tied strictly to the twist sign."""
    if t is TwistAngle.RIGHT:
        return "over"
    if t is TwistAngle.LEFT:
        return "under"
    return "none"


class RingStatus(str, Enum):
    ACTIVE = "active"
    REMOVED = "removed"
    DECOUPLED = "decoupled"


@dataclass(frozen=True)
class Ring:
    id: int
    status: RingStatus = RingStatus.ACTIVE
    mark: TwistAngle | None = None  # twist parked on a ring with no ribbon left


@dataclass(frozen=True)
class Ribbon:
    left_ring: int
    right_ring: int
    twist: TwistAngle

    @property
    def crossing_hint(self) -> str:
        return crossing_of(self.twist)


@dataclass(frozen=True)
class Component:
    """A chain of rings; twists[i] belongs to the ribbon rings[i]-rings[i+1]."""

    rings: tuple[int, ...]
    twists: tuple[TwistAngle, ...]

    def ribbons(self) -> tuple[Ribbon, ...]:
        return tuple(
            Ribbon(a, b, t) for (a, b), t in zip(zip(self.rings, self.rings[1:]), self.twists)
        )


class SurgeryKind(str, Enum):
    SEVERANCE = "Severance"
    SEVERANCE_WITH_FLIPS = "SeveranceWithFlips"
    PRUNING = "Pruning"
    PRUNING_WITH_FLIP = "PruningWithFlip"
    BOUNDARY_SKIP = "BoundarySkip"
    BOUNDARY_SKIP_WITH_FLIP = "BoundarySkipWithFlip"
    FLAT_SPLICE = "FlatSplice"
    FLIPPED_SPLICE = "FlippedSplice"
    TWIST_SPLICE_RIGHT = "TwistSpliceRight"
    TWIST_SPLICE_LEFT = "TwistSpliceLeft"
    BOUNDARY_TWIST_RIGHT = "BoundaryTwistRight"
    BOUNDARY_TWIST_LEFT = "BoundaryTwistLeft"


EVENT_TWIST_CLASS: dict[SurgeryKind, TwistAngle] = {
    SurgeryKind.SEVERANCE: TwistAngle.FLAT,
    SurgeryKind.SEVERANCE_WITH_FLIPS: TwistAngle.FLIP,
    SurgeryKind.PRUNING: TwistAngle.FLAT,
    SurgeryKind.PRUNING_WITH_FLIP: TwistAngle.FLIP,
    SurgeryKind.BOUNDARY_SKIP: TwistAngle.FLAT,
    SurgeryKind.BOUNDARY_SKIP_WITH_FLIP: TwistAngle.FLIP,
    SurgeryKind.FLAT_SPLICE: TwistAngle.FLAT,
    SurgeryKind.FLIPPED_SPLICE: TwistAngle.FLIP,
    SurgeryKind.TWIST_SPLICE_RIGHT: TwistAngle.RIGHT,
    SurgeryKind.TWIST_SPLICE_LEFT: TwistAngle.LEFT,
    SurgeryKind.BOUNDARY_TWIST_RIGHT: TwistAngle.RIGHT,
    SurgeryKind.BOUNDARY_TWIST_LEFT: TwistAngle.LEFT,
}


@dataclass(frozen=True)
class SurgeryEvent:
    kind: SurgeryKind
    qubit: int


@dataclass(frozen=True)
class RibbonChainState:
    rings: tuple[Ring, ...]
    components: tuple[Component, ...]
    events: tuple[SurgeryEvent, ...] = ()
    notes: tuple[str, ...] = ()

    def ring(self, q: int) -> Ring:
        for r in self.rings:
            if r.id == q:
                return r
        raise UnknownLabelError(q)

    def decoupled_ids(self) -> tuple[int, ...]:
        return tuple(r.id for r in self.rings if r.status is RingStatus.DECOUPLED)


def initial_chain(n: int) -> RibbonChainState:
    """One component of n rings joined by flat ribbons: zero writhe."""
    if n < 1:
        raise ValueError("chain size must be at least 1")
    rings = tuple(Ring(i) for i in range(1, n + 1))
    comp = Component(tuple(range(1, n + 1)), (TwistAngle.FLAT,) * (n - 1))
    return RibbonChainState(rings, (comp,))


class _Editor:
    """Mutable scratch copy of a chain during one surgery."""

    def __init__(self, chain: RibbonChainState):
        self.rings = {r.id: r for r in chain.rings}
        self.comps: list[tuple[list[int], list[TwistAngle]]] = [
            (list(c.rings), list(c.twists)) for c in chain.components
        ]
        self.notes = list(chain.notes)

    def set_status(self, q: int, status: RingStatus) -> None:
        self.rings[q] = replace(self.rings[q], status=status)

    def add_mark(self, q: int, twist: TwistAngle) -> None:
        ring = self.rings[q]
        mark = compose_twists(ring.mark or TwistAngle.FLAT, twist)
        self.rings[q] = replace(ring, mark=mark)
        self.notes.append(f"twist {int(twist)} parked as boundary mark on ring {q}")

    def compose_slot(self, comp: tuple[list[int], list[TwistAngle]], side: str,
                     twist: TwistAngle) -> None:
        """Compose onto the boundary ribbon of a side, else the boundary ring's mark."""
        if twist is TwistAngle.FLAT:
            return
        rings, twists = comp
        if twists:
            i = 0 if side == "left" else len(twists) - 1
            twists[i] = compose_twists(twists[i], twist)
        elif rings:
            self.add_mark(rings[0] if side == "left" else rings[-1], twist)
        else:
            self.notes.append(f"twist {int(twist)} dropped: no surviving ring")

    def freeze(self, event: SurgeryEvent, old: RibbonChainState) -> RibbonChainState:
        comps = tuple(Component(tuple(r), tuple(t)) for r, t in self.comps if r)
        rings = tuple(self.rings[r.id] for r in old.rings)
        return RibbonChainState(rings, comps, old.events + (event,), tuple(self.notes))


def apply_surgery(
    chain: RibbonChainState, q: int, basis: PauliBasis, outcome: Outcome
) -> tuple[RibbonChainState, SurgeryEvent]:
    """Topological surgery for one measurement; returns the new chain and event.

    ``basis``/``outcome`` should be the effective pair after byproduct
    absorption when the surgery is driven alongside the symbolic calculus.
    """
    ring = chain.ring(q)
    if ring.status is RingStatus.REMOVED:
        raise RingStateError(f"ring {q} was already removed")
    ed = _Editor(chain)
    minus = outcome is Outcome.MINUS

    if ring.status is RingStatus.DECOUPLED:
        ed.set_status(q, RingStatus.REMOVED)
        kind = SurgeryKind.PRUNING_WITH_FLIP if minus else SurgeryKind.PRUNING
        event = SurgeryEvent(kind, q)
        return ed.freeze(event, chain), event

    ci, pos = next(
        (ci, c[0].index(q)) for ci, c in enumerate(ed.comps) if q in c[0]
    )
    rings, twists = ed.comps[ci]
    size = len(rings)
    ed.set_status(q, RingStatus.REMOVED)

    if size == 1:
        ed.comps[ci] = ([], [])
        kind = _isolated_kind(basis, outcome)
        rule_twist = _rule_twist(basis, outcome)
        if rule_twist is not TwistAngle.FLAT:
            ed.notes.append(f"twist {int(rule_twist)} dropped: no surviving ring")
        event = SurgeryEvent(kind, q)
        return ed.freeze(event, chain), event

    at_left = pos == 0
    at_right = pos == size - 1

    if at_left or at_right:
        orient = (lambda s: s) if at_left else (lambda s: s[::-1])
        o_rings, o_twists = orient(rings), orient(twists)
        orphan = o_twists[0]
        if basis is PauliBasis.X:
            neighbour = o_rings[1]
            ed.set_status(neighbour, RingStatus.DECOUPLED)
            orphans = [orphan] + o_twists[1:2]
            new_rings, new_twists = o_rings[2:], o_twists[2:]
            kind = SurgeryKind.BOUNDARY_SKIP_WITH_FLIP if minus else SurgeryKind.BOUNDARY_SKIP
            composed = orphans + ([TwistAngle.FLIP] if minus else [])
            if new_rings:
                ed.comps[ci] = (orient(new_rings), orient(new_twists))
                for t in composed:
                    ed.compose_slot(ed.comps[ci], "left" if at_left else "right", t)
            else:
                ed.comps[ci] = ([], [])
                for t in composed:
                    if t is not TwistAngle.FLAT:
                        ed.add_mark(neighbour, t)
        else:
            new_rings, new_twists = o_rings[1:], o_twists[1:]
            ed.comps[ci] = (orient(new_rings), orient(new_twists))
            side = "left" if at_left else "right"
            ed.compose_slot(ed.comps[ci], side, orphan)
            if basis is PauliBasis.Z:
                kind = SurgeryKind.PRUNING_WITH_FLIP if minus else SurgeryKind.PRUNING
                if minus:
                    ed.compose_slot(ed.comps[ci], side, TwistAngle.FLIP)
            else:
                kind = (
                    SurgeryKind.BOUNDARY_TWIST_LEFT if minus else SurgeryKind.BOUNDARY_TWIST_RIGHT
                )
                ed.compose_slot(
                    ed.comps[ci], side, TwistAngle.LEFT if minus else TwistAngle.RIGHT
                )
        event = SurgeryEvent(kind, q)
        return ed.freeze(event, chain), event

    # bulk target
    lt, rt = twists[pos - 1], twists[pos]
    if basis is PauliBasis.Z:
        left_part = (rings[:pos], twists[: pos - 1])
        right_part = (rings[pos + 1 :], twists[pos + 1 :])
        ed.comps[ci : ci + 1] = [
            (list(left_part[0]), list(left_part[1])),
            (list(right_part[0]), list(right_part[1])),
        ]
        ed.compose_slot(ed.comps[ci], "right", lt)
        ed.compose_slot(ed.comps[ci + 1], "left", rt)
        if minus:
            ed.compose_slot(ed.comps[ci], "right", TwistAngle.FLIP)
            ed.compose_slot(ed.comps[ci + 1], "left", TwistAngle.FLIP)
        kind = SurgeryKind.SEVERANCE_WITH_FLIPS if minus else SurgeryKind.SEVERANCE
    else:
        rule_twist = _rule_twist(basis, outcome)
        fused = compose_twists(compose_twists(lt, rt), rule_twist)
        ed.comps[ci] = (
            rings[:pos] + rings[pos + 1 :],
            twists[: pos - 1] + [fused] + twists[pos + 1 :],
        )
        if basis is PauliBasis.X:
            kind = SurgeryKind.FLIPPED_SPLICE if minus else SurgeryKind.FLAT_SPLICE
        else:
            kind = SurgeryKind.TWIST_SPLICE_LEFT if minus else SurgeryKind.TWIST_SPLICE_RIGHT
    event = SurgeryEvent(kind, q)
    return ed.freeze(event, chain), event


def _rule_twist(basis: PauliBasis, outcome: Outcome) -> TwistAngle:
    if basis is PauliBasis.Z:
        return TwistAngle.FLIP if outcome is Outcome.MINUS else TwistAngle.FLAT
    if basis is PauliBasis.X:
        return TwistAngle.FLIP if outcome is Outcome.MINUS else TwistAngle.FLAT
    return TwistAngle.LEFT if outcome is Outcome.MINUS else TwistAngle.RIGHT


def _isolated_kind(basis: PauliBasis, outcome: Outcome) -> SurgeryKind:
    minus = outcome is Outcome.MINUS
    if basis is PauliBasis.Z:
        return SurgeryKind.PRUNING_WITH_FLIP if minus else SurgeryKind.PRUNING
    if basis is PauliBasis.X:
        return SurgeryKind.BOUNDARY_SKIP_WITH_FLIP if minus else SurgeryKind.BOUNDARY_SKIP
    return SurgeryKind.BOUNDARY_TWIST_LEFT if minus else SurgeryKind.BOUNDARY_TWIST_RIGHT


def mirrored(chain: RibbonChainState) -> RibbonChainState:
    """Left-right reflection: reverses every chain and swaps twist chirality."""

    def flip(t: TwistAngle) -> TwistAngle:
        return TwistAngle((360 - int(t)) % 360)

    rings = tuple(
        replace(r, mark=None if r.mark is None else flip(r.mark)) for r in chain.rings
    )
    comps = tuple(
        Component(c.rings[::-1], tuple(flip(t) for t in c.twists[::-1]))
        for c in chain.components[::-1]
    )
    return RibbonChainState(rings, comps, chain.events, chain.notes)


def export_diagram(chain: RibbonChainState) -> dict:
    """Diagram document; decoupled rings render as singleton groups."""
    groups: list[dict] = []
    for comp in chain.components:
        groups.append(
            {
                "rings": [
                    {
                        "id": rid,
                        "status": chain.ring(rid).status.value,
                        "mark": None if chain.ring(rid).mark is None else int(chain.ring(rid).mark),
                    }
                    for rid in comp.rings
                ],
                "ribbons": [
                    {
                        "l": rb.left_ring,
                        "r": rb.right_ring,
                        "twist": int(rb.twist),
                        "crossing": rb.crossing_hint,
                    }
                    for rb in comp.ribbons()
                ],
            }
        )
    for r in chain.rings:
        if r.status is RingStatus.DECOUPLED:
            groups.append(
                {
                    "rings": [
                        {
                            "id": r.id,
                            "status": r.status.value,
                            "mark": None if r.mark is None else int(r.mark),
                        }
                    ],
                    "ribbons": [],
                }
            )
    groups.sort(key=lambda g: g["rings"][0]["id"])
    return {
        "components": groups,
        "events": [{"kind": e.kind.value, "qubit": e.qubit} for e in chain.events],
    }


def connectivity_projection(diagram: dict) -> dict:
    """Unframed view of a diagram: ring ids and ribbon endpoints only."""
    return {
        "components": [
            {
                "rings": [r["id"] for r in g["rings"]],
                "ribbons": [[rb["l"], rb["r"]] for rb in g["ribbons"]],
            }
            for g in diagram["components"]
        ]
    }


@dataclass(frozen=True)
class CorrespondenceReport:
    ok: bool
    partition_ok: bool
    decoupled_ok: bool
    twist_ok: bool
    mismatches: tuple[str, ...]
    notes: tuple[str, ...]


def correspondence_check(chain: RibbonChainState, sym: SymbolicState) -> CorrespondenceReport:
    """Grade the topological model against the symbolic calculus.

    (a) active-ring components must partition exactly like live segments,
    with decoupled rings matching decoupled qubits; (b) each X or Y event's
    twist class must map, under the dictionary, to the byproduct class its
    symbolic rule composed.
    """
    if len(chain.events) != len(sym.history) or any(
        e.qubit != r.qubit for e, r in zip(chain.events, sym.history)
    ):
        raise ValueError("measurement histories of the two models differ")
    mismatches: list[str] = []
    comp_sets = {frozenset(c.rings) for c in chain.components}
    seg_sets = {frozenset(s.qubits) for s in sym.segments}
    partition_ok = comp_sets == seg_sets
    if not partition_ok:
        mismatches.append(f"components {sorted(map(sorted, comp_sets))} != segments {sorted(map(sorted, seg_sets))}")
    decoupled_ok = set(chain.decoupled_ids()) == {d.id for d in sym.decoupled}
    if not decoupled_ok:
        mismatches.append(
            f"decoupled rings {sorted(chain.decoupled_ids())} != decoupled qubits "
            f"{sorted(d.id for d in sym.decoupled)}"
        )
    twist_ok = True
    for event, record in zip(chain.events, sym.history):
        if record.effective_basis is PauliBasis.Z:
            continue
        expected = RULE_BYPRODUCT_PHASE[record.rule]
        got = twist_to_phase(EVENT_TWIST_CLASS[event.kind])
        if abs(expected - got) > 1e-12:
            twist_ok = False
            mismatches.append(
                f"event {event.kind.value} at qubit {event.qubit}: twist phase {got} "
                f"!= rule byproduct phase {expected}"
            )
    ok = partition_ok and decoupled_ok and twist_ok
    return CorrespondenceReport(
        ok, partition_ok, decoupled_ok, twist_ok, tuple(mismatches), chain.notes
    )


def to_json(chain: RibbonChainState) -> dict:
    return {
        "rings": [
            {
                "id": r.id,
                "status": r.status.value,
                "mark": None if r.mark is None else int(r.mark),
            }
            for r in chain.rings
        ],
        "components": [
            {"rings": list(c.rings), "twists": [int(t) for t in c.twists]}
            for c in chain.components
        ],
        "events": [{"kind": e.kind.value, "qubit": e.qubit} for e in chain.events],
        "notes": list(chain.notes),
    }


def from_json(data: dict) -> RibbonChainState:
    return RibbonChainState(
        rings=tuple(
            Ring(
                r["id"],
                RingStatus(r["status"]),
                None if r["mark"] is None else TwistAngle(r["mark"]),
            )
            for r in data["rings"]
        ),
        components=tuple(
            Component(tuple(c["rings"]), tuple(TwistAngle(t) for t in c["twists"]))
            for c in data["components"]
        ),
        events=tuple(SurgeryEvent(SurgeryKind(e["kind"]), e["qubit"]) for e in data["events"]),
        notes=tuple(data.get("notes", ())),
    )
