"""Oracle harness: grades the calculus and the ribbon model statevector-exactly.

Every case of the measurement table is run three ways: exact projection on
the dense oracle, symbolic rule plus materialization, and the literal
closed-form residual. Fidelities, Schmidt ranks, and probabilities are
recorded per case; nothing is assumed.

The literal X-bulk formula is known to differ from the exact residual by a
local rotation, so two literal fidelities are reported: the plain overlap
and the best overlap over the declared Pauli-Z byproduct placements (none,
Z on the left neighbour, Z on the right neighbour).
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import UnsupportedCompositionError
from .ribbon import apply_surgery, correspondence_check, initial_chain
from .statevector import (
    GATES,
    Outcome,
    PauliBasis,
    PureState,
    _apply_matrix,
    build_cluster,
    fidelity_mod_phase,
    outcome_probability,
    project_measure,
    schmidt_spectrum,
)
from .symbolic import (
    TargetClass,
    classify_target,
    materialize,
    new_chain,
    symbolic_measure,
    table_formula_state,
)

EXACT_BAR = 1.0 - 1e-10
SEQUENCE_BAR = 1.0 - 1e-9
PROB_TOL = 1e-12
RANK_TOL = 1e-9


class Verdict(str, Enum):
    EXACT_MATCH = "ExactMatch"
    LITERAL_MATCH_TOO = "LiteralMatchToo"
    CONNECTIVITY_ONLY = "ConnectivityOnly"
    FAIL = "Fail"


@dataclass(frozen=True)
class CaseReport:
    n: int
    q: int
    position: str
    basis: PauliBasis
    outcome: Outcome
    probability: float
    fidelity_exact: float
    fidelity_literal: float
    fidelity_literal_mod_z: float
    rank_left_right: int | None
    verdict: Verdict

    def key(self) -> tuple:
        return (self.n, self.q, self.basis.value, self.outcome.value)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "position": self.position,
            "basis": self.basis.value,
            "outcome": self.outcome.value,
            "probability": self.probability,
            "fidelity_exact": self.fidelity_exact,
            "fidelity_literal": self.fidelity_literal,
            "fidelity_literal_mod_z": self.fidelity_literal_mod_z,
            "rank_left_right": self.rank_left_right,
            "verdict": self.verdict.value,
        }


def _position_of(n: int, q: int) -> str:
    if q == 1:
        return "end_left"
    if q == n:
        return "end_right"
    return "bulk"


def check_case(n: int, q: int, basis: PauliBasis, outcome: Outcome) -> CaseReport:
    """Grade one measurement case of the table against the oracle."""
    if not 1 <= q <= n or n < 2:
        raise ValueError(f"invalid case n={n}, q={q}")
    position = _position_of(n, q)
    oracle = build_cluster(n)
    p, residual = project_measure(oracle, q, basis, outcome)

    sym, _rule = symbolic_measure(new_chain(n), q, basis, outcome)
    fid_exact = fidelity_mod_phase(residual, materialize(sym))

    literal = table_formula_state(n, q, basis, outcome)
    fid_literal = fidelity_mod_phase(residual, literal)
    variants = [literal]
    for nb in (q - 1, q + 1):
        if 1 <= nb <= n and nb in literal.labels:
            variants.append(_apply_matrix(literal, nb, GATES["Z"]))
    fid_literal_mod_z = max(fidelity_mod_phase(residual, v) for v in variants)

    rank: int | None = None
    if position == "bulk":
        left = [l for l in residual.labels if l < q]
        rank = schmidt_spectrum(residual, left, RANK_TOL).rank
    elif residual.n_qubits >= 2:
        neighbour = 2 if q == 1 else n - 1
        rank = schmidt_spectrum(residual, [neighbour], RANK_TOL).rank

    if fid_exact < EXACT_BAR:
        verdict = Verdict.FAIL
    elif fid_literal >= EXACT_BAR:
        verdict = Verdict.LITERAL_MATCH_TOO
    elif position == "bulk" and rank == _expected_rank(basis):
        verdict = Verdict.CONNECTIVITY_ONLY
    else:
        verdict = Verdict.EXACT_MATCH
    return CaseReport(
        n, q, position, basis, outcome, p, fid_exact, fid_literal,
        fid_literal_mod_z, rank, verdict,
    )


def _expected_rank(basis: PauliBasis) -> int:
    return 1 if basis is PauliBasis.Z else 2


@dataclass(frozen=True)
class SuiteSummary:
    n_min: int
    n_max: int
    reports: tuple[CaseReport, ...]
    counts: tuple[tuple[str, int], ...]
    duration_s: float

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "counts": dict(self.counts),
            "reports": [r.to_json() for r in self.reports],
        }
        if include_timing:
            out["duration_s"] = self.duration_s
        return out


def run_table_suite(n_min: int, n_max: int) -> SuiteSummary:
    """All bases, positions, and outcomes over the size range, in fixed order."""
    if not 2 <= n_min <= n_max:
        raise ValueError("need 2 <= n_min <= n_max")
    start = time.perf_counter()
    reports = []
    for n in range(n_min, n_max + 1):
        for q in range(1, n + 1):
            for basis in PauliBasis:
                for outcome in Outcome:
                    reports.append(check_case(n, q, basis, outcome))
    counts: dict[str, int] = {v.value: 0 for v in Verdict}
    for r in reports:
        counts[r.verdict.value] += 1
    return SuiteSummary(
        n_min, n_max, tuple(reports), tuple(sorted(counts.items())),
        time.perf_counter() - start,
    )


def missed_verdicts(summary: SuiteSummary) -> tuple[str, ...]:
    """Required-verdict violations; empty means the suite is fully green.

    Z, Y, and X-end cases must reproduce the literal formula exactly;
    X-bulk must be oracle-exact with rank 2 across the cut; every
    probability must be one half.
    """
    missed = []
    for r in summary.reports:
        case = f"n={r.n} q={r.q} {r.basis.value}{r.outcome.value}"
        x_bulk = r.basis is PauliBasis.X and r.position == "bulk"
        if x_bulk:
            if r.verdict is Verdict.FAIL:
                missed.append(f"{case}: exact-representation fidelity below bar")
            if r.rank_left_right != 2:
                missed.append(f"{case}: rank {r.rank_left_right} != 2")
        elif r.verdict is not Verdict.LITERAL_MATCH_TOO:
            missed.append(f"{case}: verdict {r.verdict.value}, literal match required")
        if abs(r.probability - 0.5) > PROB_TOL:
            missed.append(f"{case}: probability {r.probability!r} not 1/2")
    return tuple(missed)


@dataclass(frozen=True)
class SequenceReport:
    n: int
    seed: int
    steps_run: int
    skipped: int
    min_fidelity: float
    ok: bool
    failures: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "steps_run": self.steps_run,
            "skipped": self.skipped,
            "min_fidelity": self.min_fidelity,
            "ok": self.ok,
            "failures": list(self.failures),
        }


def random_sequence_test(n: int, steps: int, seed: int) -> SequenceReport:
    """Random adaptive sequence within the closed rule set, oracle-checked.

    Qubits are drawn uniformly from the live set; X is only requested at
    ends, decoupled qubits only in Z. Outcomes are Born-sampled from the
    oracle. After every step the materialized symbolic state must match the
    oracle residual and the ribbon correspondence must hold.
    """
    rng = np.random.default_rng(seed)
    sym = new_chain(n)
    chain = initial_chain(n)
    oracle = build_cluster(n)
    min_fid = 1.0
    failures: list[str] = []
    steps_run = 0
    skipped = 0
    for _ in range(steps):
        live = sym.live_qubits()
        if not live:
            break
        q = live[int(rng.integers(len(live)))]
        cls = classify_target(sym, q)
        if cls is TargetClass.DECOUPLED:
            bases = [PauliBasis.Z]
        elif cls is TargetClass.BULK:
            bases = [PauliBasis.Z, PauliBasis.Y]
        else:
            bases = [PauliBasis.Z, PauliBasis.X, PauliBasis.Y]
        basis = bases[int(rng.integers(len(bases)))]
        p_plus = outcome_probability(oracle, q, basis, Outcome.PLUS)
        outcome = Outcome.PLUS if rng.random() < p_plus else Outcome.MINUS
        try:
            sym2, _rule = symbolic_measure(sym, q, basis, outcome)
        except UnsupportedCompositionError:
            skipped += 1
            continue
        record = sym2.history[-1]
        chain, _event = apply_surgery(
            chain, q, record.effective_basis, record.effective_outcome
        )
        _p, oracle = project_measure(oracle, q, basis, outcome)
        sym = sym2
        steps_run += 1
        fid = fidelity_mod_phase(materialize(sym), oracle)
        min_fid = min(min_fid, fid)
        if fid < SEQUENCE_BAR:
            failures.append(f"step {steps_run}: fidelity {fid}")
        corr = correspondence_check(chain, sym)
        if not corr.ok:
            failures.append(f"step {steps_run}: correspondence {corr.mismatches}")
    return SequenceReport(
        n, seed, steps_run, skipped, min_fid, not failures, tuple(failures)
    )


def single_qubit_cliffords() -> tuple[tuple[str, np.ndarray], ...]:
    """The 24 single-qubit Clifford rotations as (word, matrix), phase-canonical."""

    def canon(m: np.ndarray) -> tuple:
        flat = m.reshape(-1)
        pivot = flat[np.argmax(np.abs(flat) > 1e-9)]
        normed = m / (pivot / abs(pivot))
        return tuple(np.round(normed.reshape(-1), 9).tolist())

    found: dict[tuple, tuple[str, np.ndarray]] = {}
    frontier = [("I", np.eye(2, dtype=complex))]
    found[canon(frontier[0][1])] = frontier[0]
    while frontier:
        word, mat = frontier.pop(0)
        for gname in ("H", "S"):
            nxt = GATES[gname] @ mat
            key = canon(nxt)
            if key not in found:
                label = gname if word == "I" else gname + word
                found[key] = (label, nxt)
                frontier.append((label, nxt))
    cliffords = tuple(sorted(found.values(), key=lambda kv: (len(kv[0]), kv[0])))
    assert len(cliffords) == 24, f"Clifford closure produced {len(cliffords)} elements"
    return cliffords


@dataclass(frozen=True)
class XBulkRow:
    n: int
    k: int
    outcome: Outcome
    probability: float
    fidelity_exact: float
    fidelity_literal: float
    fidelity_literal_mod_z: float
    rank: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "outcome": self.outcome.value,
            "probability": self.probability,
            "fidelity_exact": self.fidelity_exact,
            "fidelity_literal": self.fidelity_literal,
            "fidelity_literal_mod_z": self.fidelity_literal_mod_z,
            "rank": self.rank,
        }


@dataclass(frozen=True)
class XBulkReport:
    rows: tuple[XBulkRow, ...]
    corrections: tuple[dict, ...]  # one-qubit rotations restoring fidelity 1 at n=3

    def to_json(self) -> dict:
        return {
            "rows": [r.to_json() for r in self.rows],
            "corrections": list(self.corrections),
        }


def xbulk_deviation_report(n_max: int) -> XBulkReport:
    """Tabulate how far the literal X-bulk formula sits from the exact residual."""
    if n_max < 3:
        raise ValueError("X-bulk needs n >= 3")
    rows = []
    for n in range(3, n_max + 1):
        for k in range(2, n):
            for outcome in Outcome:
                rep = check_case(n, k, PauliBasis.X, outcome)
                rows.append(
                    XBulkRow(
                        n, k, outcome, rep.probability, rep.fidelity_exact,
                        rep.fidelity_literal, rep.fidelity_literal_mod_z,
                        rep.rank_left_right,
                    )
                )
    corrections = []
    cliffords = single_qubit_cliffords()
    for outcome in Outcome:
        _p, residual = project_measure(build_cluster(3), 2, PauliBasis.X, outcome)
        literal = table_formula_state(3, 2, PauliBasis.X, outcome)
        best = ("", 0, 0.0)
        for neighbour in (1, 3):
            for word, mat in cliffords:
                fid = fidelity_mod_phase(residual, _apply_matrix(literal, neighbour, mat))
                if fid > best[2]:
                    best = (word, neighbour, fid)
        corrections.append(
            {
                "n": 3,
                "k": 2,
                "outcome": outcome.value,
                "rotation": best[0],
                "neighbour": best[1],
                "fidelity": best[2],
            }
        )
    return XBulkReport(tuple(rows), tuple(corrections))


@dataclass(frozen=True)
class FullReport:
    suite: SuiteSummary
    sequences: tuple[SequenceReport, ...]
    xbulk: XBulkReport
    missed: tuple[str, ...]
    ok: bool

    def to_json(self, include_timing: bool = False) -> dict:
        return {
            "suite": self.suite.to_json(include_timing=include_timing),
            "sequences": [s.to_json() for s in self.sequences],
            "xbulk": self.xbulk.to_json(),
            "missed": list(self.missed),
            "ok": self.ok,
        }

    def to_text(self) -> str:
        lines = [
            f"table suite n={self.suite.n_min}..{self.suite.n_max}: "
            + ", ".join(f"{k}={v}" for k, v in self.suite.counts)
        ]
        for s in self.sequences:
            lines.append(
                f"sequence n={s.n} seed={s.seed}: steps={s.steps_run} "
                f"min_fidelity={s.min_fidelity:.12f} ok={s.ok}"
            )
        for c in self.xbulk.corrections:
            lines.append(
                f"x-bulk n=3 k=2 outcome={c['outcome']}: rotation {c['rotation']} "
                f"on qubit {c['neighbour']} restores fidelity {c['fidelity']:.12f}"
            )
        sample = next(r for r in self.xbulk.rows if r.n == 3 and r.outcome is Outcome.PLUS)
        lines.append(
            f"x-bulk n=3 k=2 literal fidelity: plain={sample.fidelity_literal:.12f} "
            f"mod-Z={sample.fidelity_literal_mod_z:.12f} rank={sample.rank}"
        )
        if self.missed:
            lines.append("MISSED VERDICTS:")
            lines.extend(f"  {m}" for m in self.missed)
        lines.append("overall: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines)


def run_full(
    n_min: int = 2,
    n_max: int = 6,
    sequence_count: int = 25,
    sequence_n: int = 8,
    seed: int = 0,
) -> FullReport:
    """Everything the ``verify`` subcommand runs; ok=False means exit nonzero."""
    suite = run_table_suite(n_min, n_max)
    missed = list(missed_verdicts(suite))
    sequences = tuple(
        random_sequence_test(sequence_n, steps=sequence_n, seed=seed + i)
        for i in range(sequence_count)
    )
    for s in sequences:
        if not s.ok:
            missed.extend(f"sequence seed={s.seed}: {f}" for f in s.failures)
    xbulk = xbulk_deviation_report(max(3, min(n_max, 6)))
    for c in xbulk.corrections:
        if c["fidelity"] < EXACT_BAR:
            missed.append(f"x-bulk correction search peaked at {c['fidelity']}")
    return FullReport(suite, sequences, xbulk, tuple(missed), not missed)


def canonical_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))
