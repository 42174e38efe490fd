"""Measurement sessions keeping symbolic, ribbon, and oracle views coherent.

A session drives each committed measurement through all three models and
records per-step fidelity and correspondence checks. When the symbolic rule
set refuses a target (splice-bond segment) and the session was created with
``hybrid=True``, the step runs oracle-only and the session is marked
degraded: the cheap views are frozen and stop being authoritative.

Undo is snapshot-based: the full serialized state, including the random
generator, is pushed before every commit and popped on undo, so a
measure-then-undo round trip is byte-identical.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from . import ribbon, symbolic
from .errors import ImpossibleOutcomeError, LcsimError, UnsupportedCompositionError
from .statevector import (
    DEFAULT_MAX_QUBITS,
    Outcome,
    PauliBasis,
    PureState,
    build_cluster,
    fidelity_mod_phase,
    outcome_probability,
    project_measure,
    schmidt_spectrum,
)

PROB_FLOOR = 1e-14


class Session:
    def __init__(
        self,
        n: int,
        seed: int | None = None,
        oracle_on: bool = True,
        hybrid: bool = False,
        max_qubits: int = DEFAULT_MAX_QUBITS,
    ):
        if n < 1:
            raise ValueError("chain size must be at least 1")
        self.n = n
        self.seed = seed
        self.hybrid = hybrid
        self.max_qubits = max_qubits
        self.oracle_on = bool(oracle_on and n <= max_qubits)
        self.sym = symbolic.new_chain(n)
        self.chain = ribbon.initial_chain(n)
        self.oracle: PureState | None = build_cluster(n, max_qubits) if self.oracle_on else None
        self.rng = np.random.default_rng(seed)
        self.history: list[dict] = []
        self.degraded_at: int | None = None
        self._snapshots: list[dict] = []

    # -- queries ---------------------------------------------------------

    @property
    def coherent(self) -> bool:
        return self.degraded_at is None

    def live_qubits(self) -> tuple[int, ...]:
        if self.oracle is not None:
            return tuple(self.oracle.labels)
        return self.sym.live_qubits()

    def probability(self, qubit: int, basis: PauliBasis, outcome: Outcome) -> float:
        if self.oracle is not None:
            return outcome_probability(self.oracle, qubit, basis, outcome)
        return symbolic.outcome_probability(self.sym, qubit, basis, outcome)

    # -- measurement -----------------------------------------------------

    def measure(
        self,
        qubit: int,
        basis: PauliBasis,
        outcome: Outcome | None = None,
        step_seed: int | None = None,
    ) -> dict:
        """Commit one measurement; ``outcome=None`` samples by the Born rule."""
        snapshot = self.serialize()
        rng = np.random.default_rng(step_seed) if step_seed is not None else self.rng
        p_plus = self.probability(qubit, basis, Outcome.PLUS)
        sampled = outcome is None
        if sampled:
            outcome = Outcome.PLUS if rng.random() < p_plus else Outcome.MINUS
        probability = p_plus if outcome is Outcome.PLUS else 1.0 - p_plus
        if probability < PROB_FLOOR:
            raise ImpossibleOutcomeError(
                f"outcome {outcome.value} at qubit {qubit} has probability 0"
            )

        was_bulk = False
        oracle_only = not self.coherent
        rule = event = None
        if self.coherent:
            try:
                cls = symbolic.classify_target(self.sym, qubit)
                was_bulk = cls is symbolic.TargetClass.BULK
                sym2, rule = symbolic.symbolic_measure(self.sym, qubit, basis, outcome)
            except UnsupportedCompositionError:
                if not (self.hybrid and self.oracle is not None):
                    raise
                oracle_only = True
                self.degraded_at = len(self.history)
            else:
                record = sym2.history[-1]
                self.chain, event = ribbon.apply_surgery(
                    self.chain, qubit, record.effective_basis, record.effective_outcome
                )
                self.sym = sym2

        if self.oracle is not None:
            _p, self.oracle = project_measure(self.oracle, qubit, basis, outcome)

        step: dict[str, Any] = {
            "index": len(self.history),
            "qubit": qubit,
            "basis": basis.value,
            "outcome": outcome.value,
            "sampled": sampled,
            "probability": probability,
            "oracle_only": oracle_only,
            "rule": rule.value if rule else None,
            "event": {"kind": event.kind.value, "qubit": event.qubit} if event else None,
        }
        if rule is not None:
            record = self.sym.history[-1]
            step["effective_basis"] = record.effective_basis.value
            step["effective_outcome"] = record.effective_outcome.value
        step["schmidt"] = self._schmidt_info(qubit, was_bulk, rule)
        if self.oracle is not None and self.coherent:
            step["fidelity"] = fidelity_mod_phase(symbolic.materialize(self.sym), self.oracle)
            step["correspondence_ok"] = ribbon.correspondence_check(self.chain, self.sym).ok
        else:
            step["fidelity"] = None
            step["correspondence_ok"] = None
        self._snapshots.append(snapshot)
        self.history.append(step)
        return step

    def _schmidt_info(self, qubit: int, was_bulk: bool, rule) -> dict | None:
        if not was_bulk:
            return None
        if self.oracle is not None:
            left = [l for l in self.oracle.labels if l < qubit]
            if not left or len(left) == len(self.oracle.labels):
                return None
            spec = schmidt_spectrum(self.oracle, left)
            return {
                "cut": left,
                "coefficients": [round(c, 15) for c in spec.coefficients],
                "rank": spec.rank,
                "source": "oracle",
            }
        if rule is None:
            return None
        rank = 1 if rule in (symbolic.RuleTag.Z_BULK_SEVER, symbolic.RuleTag.Z_BULK_SEVER_FLIP) else 2
        return {"cut": None, "coefficients": None, "rank": rank, "source": "rules"}

    # -- what-if preview ---------------------------------------------------

    def preview(self, qubit: int, basis: PauliBasis) -> dict:
        """Predicted summaries for both outcomes; never mutates the session."""
        out: dict[str, Any] = {}
        for outcome in (Outcome.PLUS, Outcome.MINUS):
            p = self.probability(qubit, basis, outcome)
            if p < PROB_FLOOR:
                out[outcome.value] = {"possible": False, "probability": 0.0}
                continue
            branch: dict[str, Any] = {"possible": True, "probability": p}
            if self.coherent:
                try:
                    sym2, rule = symbolic.symbolic_measure(self.sym, qubit, basis, outcome)
                except UnsupportedCompositionError:
                    if not (self.hybrid and self.oracle is not None):
                        raise
                    branch["oracle_only"] = True
                else:
                    record = sym2.history[-1]
                    chain2, event = ribbon.apply_surgery(
                        self.chain, qubit, record.effective_basis, record.effective_outcome
                    )
                    branch.update(
                        rule=rule.value,
                        event={"kind": event.kind.value, "qubit": event.qubit},
                        diagram=ribbon.export_diagram(chain2),
                        byproducts={str(q): t for q, t in sym2.byproducts},
                    )
            else:
                branch["oracle_only"] = True
            out[outcome.value] = branch
        return out

    # -- undo and serialization -------------------------------------------

    def undo(self) -> None:
        if not self._snapshots:
            raise LcsimError("nothing to undo")
        self._restore(self._snapshots.pop())
        self.history.pop()

    def serialize(self) -> dict:
        """Full state, canonical enough to compare byte-for-byte as JSON."""
        return {
            "n": self.n,
            "seed": self.seed,
            "oracle_on": self.oracle_on,
            "hybrid": self.hybrid,
            "max_qubits": self.max_qubits,
            "degraded_at": self.degraded_at,
            "symbolic": symbolic.to_json(self.sym),
            "ribbon": ribbon.to_json(self.chain),
            "oracle": None if self.oracle is None else self.oracle.to_debug_json(),
            "rng_state": json.loads(json.dumps(self.rng.bit_generator.state)),
            "history": self.history,
        }

    def _restore(self, data: dict) -> None:
        self.degraded_at = data["degraded_at"]
        self.sym = symbolic.from_json(data["symbolic"])
        self.chain = ribbon.from_json(data["ribbon"])
        if data["oracle"] is None:
            self.oracle = None
        else:
            amps = np.array([complex(re, im) for re, im in data["oracle"]["amplitudes"]])
            self.oracle = PureState(tuple(data["oracle"]["labels"]), amps)
        self.rng = np.random.default_rng()
        self.rng.bit_generator.state = data["rng_state"]
        self.history = [dict(s) for s in data["history"]]

    @classmethod
    def restore(cls, data: dict, snapshots: list[dict] | None = None) -> "Session":
        session = cls.__new__(cls)
        session.n = data["n"]
        session.seed = data["seed"]
        session.oracle_on = data["oracle_on"]
        session.hybrid = data["hybrid"]
        session.max_qubits = data["max_qubits"]
        session._snapshots = list(snapshots or [])
        session._restore(data)
        return session

    # -- views -------------------------------------------------------------

    def view(self, include_oracle: bool = False) -> dict:
        out = {
            "n": self.n,
            "seed": self.seed,
            "oracle_on": self.oracle_on,
            "hybrid": self.hybrid,
            "coherent": self.coherent,
            "degraded_at": self.degraded_at,
            "live_qubits": list(self.live_qubits()),
            "symbolic": symbolic.to_json(self.sym),
            "diagram": ribbon.export_diagram(self.chain),
            "byproducts": {str(q): t for q, t in self.sym.byproducts},
            "decoupled": [{"id": d.id, "value": d.value} for d in self.sym.decoupled],
            "history": list(self.history),
            "undo_depth": len(self._snapshots),
            "last_event": self.history[-1]["event"] if self.history else None,
        }
        if include_oracle and self.oracle is not None:
            out["oracle"] = self.oracle.to_debug_json()
        return out


def run_script(
    script,
    seed: int | None = None,
    oracle_on: bool = True,
    hybrid: bool = False,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> tuple[Session, dict]:
    """Execute a parsed measurement script through a fresh session.

    Returns the session and a run record with one entry per executed step.
    On a refused composition (and no hybrid fallback) or any other module
    error, the record carries the failing step index (0-based) and the
    session is left at the last committed step.
    """
    session = Session(
        script.chain_size, seed=seed, oracle_on=oracle_on, hybrid=hybrid,
        max_qubits=max_qubits,
    )
    steps: list[dict] = []
    record: dict = {"chain": script.chain_size, "steps": steps, "error": None}
    for index, step in enumerate(script.steps):
        try:
            steps.append(
                session.measure(step.qubit, step.basis, step.outcome, step_seed=step.seed)
            )
        except LcsimError as exc:
            record["error"] = {"code": exc.code, "message": str(exc), "step": index}
            break
    return session, record
