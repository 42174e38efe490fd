"""Segment-level measurement calculus for linear cluster chains.

A symbolic state is a set of disjoint linear cluster segments plus
per-qubit byproducts S^t (t = 0..3, so I, S, Z, S-dagger), decoupled
fixed qubits, and correlated-splice markers. The update rules, one per
measured basis x position class x outcome:

* ``Z`` end: drop the end qubit; the minus outcome leaves Z on the new end.
* ``Z`` bulk: sever the segment at the target; minus leaves Z on both
  former neighbours.
* ``X`` end: drop the end; the next qubit decouples to a fixed bit
  (0 for plus, 1 for minus); minus also leaves Z on the qubit after that.
  On a two-qubit segment the surviving qubit just decouples, no Z.
* ``X`` bulk: drop the target and join the neighbours with a correlated
  splice: their computational values are locked equal for plus and
  opposite for minus. The lock parity carries the outcome exactly, so no
  Pauli byproduct is stored.
* ``Y`` end: drop the end; S (plus) or S-dagger (minus) lands on the new end.
* ``Y`` bulk: drop the target, join the neighbours with a plain cluster
  edge, and put S / S-dagger on both of them.

Right-end targets use the mirror image of the end rules. A target that
already carries a byproduct first rewrites the requested measurement
through the absorption table, so sequences stay exact. Measuring inside a
segment that contains a splice bond is refused: the rule set is not closed
there and the dense statevector path must be used instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import (
    ImpossibleOutcomeError,
    SizeLimitError,
    UnknownLabelError,
    UnsupportedBasisError,
    UnsupportedCompositionError,
)
from .statevector import (
    DEFAULT_MAX_QUBITS,
    Outcome,
    PauliBasis,
    PureState,
    apply_local,
    empty_state,
    path_cluster,
    tensor,
)


class TargetClass(str, Enum):
    END_LEFT = "EndLeft"
    END_RIGHT = "EndRight"
    BULK = "Bulk"
    ISOLATED = "Isolated"
    DECOUPLED = "Decoupled"


class RuleTag(str, Enum):
    Z_END_PRUNE = "Z_End_Prune"
    Z_END_PRUNE_FLIP = "Z_End_PruneFlip"
    Z_BULK_SEVER = "Z_Bulk_Sever"
    Z_BULK_SEVER_FLIP = "Z_Bulk_SeverFlip"
    X_END_SKIP = "X_End_Skip"
    X_END_SKIP_FLIP = "X_End_SkipFlip"
    X_BULK_SPLICE = "X_Bulk_Splice"
    X_BULK_SPLICE_FLIP = "X_Bulk_SpliceFlip"
    Y_END_TWIST = "Y_End_Twist"
    Y_END_ANTI_TWIST = "Y_End_AntiTwist"
    Y_BULK_TWIST = "Y_Bulk_Twist"
    Y_BULK_ANTI_TWIST = "Y_Bulk_AntiTwist"


@dataclass(frozen=True)
class Segment:
    """A linear cluster factor on the qubits in this adjacency order."""

    qubits: tuple[int, ...]


@dataclass(frozen=True)
class DecoupledQubit:
    id: int
    value: int  # 0 or 1


@dataclass(frozen=True)
class SpliceBond:
    """Correlated splice between two now-adjacent qubits of one segment.

    ``anti`` False locks the pair's computational values equal, True locks
    them opposite; the parity is exactly the X-bulk outcome.
    """

    left: int
    right: int
    anti: bool = False

    kind = "CorrelatedSplice"


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: int
    basis: PauliBasis
    outcome: Outcome
    rule: RuleTag
    effective_basis: PauliBasis
    effective_outcome: Outcome


@dataclass(frozen=True)
class SymbolicState:
    segments: tuple[Segment, ...] = ()
    byproducts: tuple[tuple[int, int], ...] = ()  # (qubit, t) pairs, t in 1..3
    decoupled: tuple[DecoupledQubit, ...] = ()
    splice_bonds: tuple[SpliceBond, ...] = ()
    history: tuple[MeasurementRecord, ...] = ()

    def live_qubits(self) -> tuple[int, ...]:
        qs = [q for s in self.segments for q in s.qubits]
        qs.extend(d.id for d in self.decoupled)
        return tuple(sorted(qs))

    def byproduct_of(self, q: int) -> int:
        for qubit, t in self.byproducts:
            if qubit == q:
                return t
        return 0

    def segment_of(self, q: int) -> Segment | None:
        for s in self.segments:
            if q in s.qubits:
                return s
        return None

    def bonds_in(self, segment: Segment) -> tuple[SpliceBond, ...]:
        return tuple(b for b in self.splice_bonds if b.left in segment.qubits)


def new_chain(n: int) -> SymbolicState:
    """One pristine segment on qubits 1..n."""
    if n < 1:
        raise ValueError("chain size must be at least 1")
    return SymbolicState(segments=(Segment(tuple(range(1, n + 1))),))


def classify_target(state: SymbolicState, q: int) -> TargetClass:
    """Position class of a live qubit within its segment."""
    if any(d.id == q for d in state.decoupled):
        return TargetClass.DECOUPLED
    seg = state.segment_of(q)
    if seg is None:
        raise UnknownLabelError(q)
    if len(seg.qubits) == 1:
        return TargetClass.ISOLATED
    if q == seg.qubits[0]:
        return TargetClass.END_LEFT
    if q == seg.qubits[-1]:
        return TargetClass.END_RIGHT
    return TargetClass.BULK


def absorb_byproduct(
    basis: PauliBasis, outcome: Outcome, t: int
) -> tuple[PauliBasis, Outcome]:
    """Rewrite a measurement through a byproduct S^t on its target.

    Measuring (basis, outcome) on S^t |psi> equals measuring the returned
    pair on |psi>. Z is diagonal so it never changes; S^2 = Z flips X and Y
    outcomes; odd powers exchange X and Y.
    """
    t %= 4
    if t == 0 or basis is PauliBasis.Z:
        return basis, outcome
    if t == 2:
        return basis, outcome.flipped()
    if t == 1:
        if basis is PauliBasis.X:
            return PauliBasis.Y, outcome.flipped()
        return PauliBasis.X, outcome
    # t == 3
    if basis is PauliBasis.X:
        return PauliBasis.Y, outcome
    return PauliBasis.X, outcome.flipped()


def outcome_probability(state: SymbolicState, q: int, basis: PauliBasis, outcome: Outcome) -> float:
    """Probability of the outcome, from the calculus alone (no oracle).

    Pristine-segment targets are uniformly random; decoupled and isolated
    targets can be deterministic.
    """
    cls = classify_target(state, q)
    if cls is TargetClass.DECOUPLED:
        if basis is not PauliBasis.Z:
            raise UnsupportedBasisError(
                f"qubit {q} is decoupled; only Z measurements are in the rule set"
            )
        value = next(d.value for d in state.decoupled if d.id == q)
        expected = Outcome.PLUS if value == 0 else Outcome.MINUS
        return 1.0 if outcome == expected else 0.0
    seg = state.segment_of(q)
    if state.bonds_in(seg):
        raise UnsupportedCompositionError(
            f"segment {seg.qubits} carries a correlated splice; "
            "use the statevector path for further measurements"
        )
    eb, eo = absorb_byproduct(basis, outcome, state.byproduct_of(q))
    if cls is TargetClass.ISOLATED and eb is PauliBasis.X:
        return 1.0 if eo is Outcome.PLUS else 0.0
    return 0.5


def _bp_compose(byproducts: dict[int, int], q: int, dt: int) -> None:
    t = (byproducts.get(q, 0) + dt) % 4
    if t:
        byproducts[q] = t
    else:
        byproducts.pop(q, None)


def symbolic_measure(
    state: SymbolicState, q: int, basis: PauliBasis, outcome: Outcome
) -> tuple[SymbolicState, RuleTag]:
    """Apply the matching update rule; returns the new state and the rule."""
    cls = classify_target(state, q)
    byproducts = dict(state.byproducts)
    segments = list(state.segments)
    decoupled = list(state.decoupled)
    bonds = list(state.splice_bonds)

    if cls is TargetClass.DECOUPLED:
        if basis is not PauliBasis.Z:
            raise UnsupportedBasisError(
                f"qubit {q} is decoupled; only Z measurements are in the rule set"
            )
        value = next(d.value for d in state.decoupled if d.id == q)
        expected = Outcome.PLUS if value == 0 else Outcome.MINUS
        if outcome != expected:
            raise ImpossibleOutcomeError(
                f"decoupled qubit {q} holds |{value}>; outcome {outcome.value} has probability 0"
            )
        decoupled = [d for d in decoupled if d.id != q]
        byproducts.pop(q, None)
        rule = RuleTag.Z_END_PRUNE if outcome is Outcome.PLUS else RuleTag.Z_END_PRUNE_FLIP
        record = MeasurementRecord(q, basis, outcome, rule, basis, outcome)
        return (
            SymbolicState(
                tuple(segments), tuple(sorted(byproducts.items())), tuple(decoupled),
                tuple(bonds), state.history + (record,),
            ),
            rule,
        )

    seg = state.segment_of(q)
    if state.bonds_in(seg):
        raise UnsupportedCompositionError(
            f"segment {seg.qubits} carries a correlated splice; "
            "use the statevector path for further measurements"
        )
    eb, eo = absorb_byproduct(basis, outcome, state.byproduct_of(q))
    byproducts.pop(q, None)
    seg_idx = segments.index(seg)
    qubits = seg.qubits

    if cls is TargetClass.ISOLATED:
        # Nothing remains to correct; any byproduct leaves with the qubit.
        if eb is PauliBasis.X and eo is Outcome.MINUS:
            raise ImpossibleOutcomeError(
                f"isolated qubit {q} is a +1 eigenstate of the effective X measurement"
            )
        segments.pop(seg_idx)
        rule = _END_RULES[(eb, eo)]
    elif cls in (TargetClass.END_LEFT, TargetClass.END_RIGHT):
        order = qubits if cls is TargetClass.END_LEFT else qubits[::-1]
        rest = order[1:]
        rule = _END_RULES[(eb, eo)]
        if eb is PauliBasis.Z:
            if eo is Outcome.MINUS:
                _bp_compose(byproducts, rest[0], 2)
            new_qubits = rest
        elif eb is PauliBasis.Y:
            _bp_compose(byproducts, rest[0], 1 if eo is Outcome.PLUS else 3)
            new_qubits = rest
        else:  # X end: next qubit decouples, boundary skips one further
            neighbour = rest[0]
            byproducts.pop(neighbour, None)  # diagonal on a fixed bit: global phase
            decoupled.append(DecoupledQubit(neighbour, 0 if eo is Outcome.PLUS else 1))
            if len(rest) >= 2 and eo is Outcome.MINUS:
                _bp_compose(byproducts, rest[1], 2)
            new_qubits = rest[1:]
        if cls is TargetClass.END_RIGHT:
            new_qubits = new_qubits[::-1]
        if new_qubits:
            segments[seg_idx] = Segment(new_qubits)
        else:
            segments.pop(seg_idx)
    else:  # BULK
        i = qubits.index(q)
        u, v = qubits[i - 1], qubits[i + 1]
        if eb is PauliBasis.Z:
            rule = RuleTag.Z_BULK_SEVER if eo is Outcome.PLUS else RuleTag.Z_BULK_SEVER_FLIP
            if eo is Outcome.MINUS:
                _bp_compose(byproducts, u, 2)
                _bp_compose(byproducts, v, 2)
            segments[seg_idx : seg_idx + 1] = [Segment(qubits[:i]), Segment(qubits[i + 1 :])]
        elif eb is PauliBasis.X:
            rule = RuleTag.X_BULK_SPLICE if eo is Outcome.PLUS else RuleTag.X_BULK_SPLICE_FLIP
            bonds.append(SpliceBond(u, v, anti=eo is Outcome.MINUS))
            segments[seg_idx] = Segment(qubits[:i] + qubits[i + 1 :])
        else:  # Y bulk
            rule = RuleTag.Y_BULK_TWIST if eo is Outcome.PLUS else RuleTag.Y_BULK_ANTI_TWIST
            dt = 1 if eo is Outcome.PLUS else 3
            _bp_compose(byproducts, u, dt)
            _bp_compose(byproducts, v, dt)
            segments[seg_idx] = Segment(qubits[:i] + qubits[i + 1 :])

    record = MeasurementRecord(q, basis, outcome, rule, eb, eo)
    new_state = SymbolicState(
        tuple(segments),
        tuple(sorted(byproducts.items())),
        tuple(decoupled),
        tuple(bonds),
        state.history + (record,),
    )
    return new_state, rule


_END_RULES: dict[tuple[PauliBasis, Outcome], RuleTag] = {
    (PauliBasis.Z, Outcome.PLUS): RuleTag.Z_END_PRUNE,
    (PauliBasis.Z, Outcome.MINUS): RuleTag.Z_END_PRUNE_FLIP,
    (PauliBasis.X, Outcome.PLUS): RuleTag.X_END_SKIP,
    (PauliBasis.X, Outcome.MINUS): RuleTag.X_END_SKIP_FLIP,
    (PauliBasis.Y, Outcome.PLUS): RuleTag.Y_END_TWIST,
    (PauliBasis.Y, Outcome.MINUS): RuleTag.Y_END_ANTI_TWIST,
}

RULE_BYPRODUCT_PHASE: dict[RuleTag, complex] = {
    RuleTag.Z_END_PRUNE: 1,
    RuleTag.Z_END_PRUNE_FLIP: -1,
    RuleTag.Z_BULK_SEVER: 1,
    RuleTag.Z_BULK_SEVER_FLIP: -1,
    RuleTag.X_END_SKIP: 1,
    RuleTag.X_END_SKIP_FLIP: -1,
    RuleTag.X_BULK_SPLICE: 1,
    RuleTag.X_BULK_SPLICE_FLIP: -1,
    RuleTag.Y_END_TWIST: 1j,
    RuleTag.Y_END_ANTI_TWIST: -1j,
    RuleTag.Y_BULK_TWIST: 1j,
    RuleTag.Y_BULK_ANTI_TWIST: -1j,
}


def materialize(state: SymbolicState, max_qubits: int = DEFAULT_MAX_QUBITS) -> PureState:
    """Dense state of the whole symbolic register, labels ascending.

    Segments contribute cluster phases along their adjacency order; a
    splice bond restricts the bonded pair to equal (or opposite) values and
    suppresses the edge phase between them, which is exactly the projection
    arithmetic that created it. Decoupled qubits contribute fixed bits, and
    byproducts apply as diagonal phases i^(t*x).
    """
    labels = state.live_qubits()
    n = len(labels)
    if n == 0:
        return empty_state()
    if n > max_qubits:
        raise SizeLimitError(n, max_qubits)
    shift = {q: n - 1 - i for i, q in enumerate(labels)}
    idx = np.arange(2 ** n, dtype=np.int64)

    def bit(q: int) -> np.ndarray:
        return (idx >> shift[q]) & 1

    amp = np.ones(2 ** n, dtype=complex)
    bonded_pairs = {(b.left, b.right) for b in state.splice_bonds} | {
        (b.right, b.left) for b in state.splice_bonds
    }
    for seg in state.segments:
        for a, b in zip(seg.qubits, seg.qubits[1:]):
            if (a, b) in bonded_pairs:
                continue
            amp *= np.where((bit(a) & bit(b)) == 1, -1.0, 1.0)
    for bond in state.splice_bonds:
        parity = 1 if bond.anti else 0
        amp *= ((bit(bond.left) ^ bit(bond.right)) == parity).astype(complex)
    for d in state.decoupled:
        amp *= (bit(d.id) == d.value).astype(complex)
    for q, t in state.byproducts:
        amp *= np.where(bit(q) == 1, 1j ** t, 1.0)
    norm = np.linalg.norm(amp)
    return PureState(labels, amp / norm)


def table_formula_state(
    n: int,
    q: int,
    basis: PauliBasis,
    outcome: Outcome,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> PureState:
    """Literal residual formula for one measurement on a pristine chain.

    Builds the stated closed form (for X bulk, the plain spliced path
    cluster) rather than the exact projection result, so the two can be
    graded against each other.
    """
    if n < 2:
        raise ValueError("the measurement table needs a chain of at least 2")
    if not 1 <= q <= n:
        raise ValueError(f"position {q} invalid for a chain of {n}")
    is_end = q in (1, n)
    inward = 1 if q == 1 else -1  # direction from q into the chain
    if is_end:
        neighbour, after = q + inward, q + 2 * inward
        rest = [x for x in range(1, n + 1) if x != q]
        if basis is PauliBasis.Z:
            out = path_cluster(rest, max_qubits=max_qubits)
            if outcome is Outcome.MINUS:
                out = apply_local(out, neighbour, "Z")
        elif basis is PauliBasis.X:
            bit_value = 0 if outcome is Outcome.PLUS else 1
            fixed = (
                PureState((neighbour,), np.array([1, 0], complex))
                if bit_value == 0
                else PureState((neighbour,), np.array([0, 1], complex))
            )
            remaining = [x for x in rest if x != neighbour]
            if remaining:
                tail = path_cluster(remaining, max_qubits=max_qubits)
                if outcome is Outcome.MINUS:
                    tail = apply_local(tail, after, "Z")
                out = tensor(fixed, tail) if neighbour < remaining[0] else tensor(tail, fixed)
            else:
                out = fixed
        else:
            out = path_cluster(rest, max_qubits=max_qubits)
            out = apply_local(out, neighbour, "S" if outcome is Outcome.PLUS else "S_dagger")
    else:
        left, right = q - 1, q + 1
        if basis is PauliBasis.Z:
            l_part = path_cluster(range(1, q), max_qubits=max_qubits)
            r_part = path_cluster(range(q + 1, n + 1), max_qubits=max_qubits)
            out = tensor(l_part, r_part)
            if outcome is Outcome.MINUS:
                out = apply_local(apply_local(out, left, "Z"), right, "Z")
        else:
            spliced = [x for x in range(1, n + 1) if x != q]
            out = path_cluster(spliced, max_qubits=max_qubits)
            if basis is PauliBasis.X:
                if outcome is Outcome.MINUS:
                    out = apply_local(out, left, "Z")
            else:
                gate = "S" if outcome is Outcome.PLUS else "S_dagger"
                out = apply_local(apply_local(out, left, gate), right, gate)
    return reorder_ascending(out)


def reorder_ascending(state: PureState) -> PureState:
    from .statevector import reorder

    return reorder(state, tuple(sorted(state.labels)))


def to_json(state: SymbolicState) -> dict:
    """Canonical JSON form used by the service and golden tests."""
    return {
        "segments": [list(s.qubits) for s in state.segments],
        "byproducts": {str(q): t for q, t in state.byproducts},
        "decoupled": [{"id": d.id, "value": d.value} for d in state.decoupled],
        "splice_bonds": [
            {"left": b.left, "right": b.right, "anti": b.anti} for b in state.splice_bonds
        ],
        "history": [
            {
                "qubit": r.qubit,
                "basis": r.basis.value,
                "outcome": r.outcome.value,
                "rule": r.rule.value,
                "effective_basis": r.effective_basis.value,
                "effective_outcome": r.effective_outcome.value,
            }
            for r in state.history
        ],
    }


def from_json(data: dict) -> SymbolicState:
    return SymbolicState(
        segments=tuple(Segment(tuple(s)) for s in data["segments"]),
        byproducts=tuple(sorted((int(q), int(t)) for q, t in data["byproducts"].items())),
        decoupled=tuple(DecoupledQubit(d["id"], d["value"]) for d in data["decoupled"]),
        splice_bonds=tuple(
            SpliceBond(b["left"], b["right"], b.get("anti", False))
            for b in data["splice_bonds"]
        ),
        history=tuple(
            MeasurementRecord(
                r["qubit"],
                PauliBasis(r["basis"]),
                Outcome(r["outcome"]),
                RuleTag(r["rule"]),
                PauliBasis(r["effective_basis"]),
                Outcome(r["effective_outcome"]),
            )
            for r in data["history"]
        ),
    )
