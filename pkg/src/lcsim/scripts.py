"""Line-oriented measurement script parser.

Grammar (keywords case-insensitive, ``#`` starts a comment):

    CHAIN <n>
    M <qubit> <Z|X|Y> <+|-|?> [seed]

``?`` samples the outcome; an optional integer seed makes that draw
reproducible on its own. Errors carry 1-based line and column.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ScriptError
from .statevector import Outcome, PauliBasis

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class Step:
    qubit: int
    basis: PauliBasis
    outcome: Outcome | None  # None means sample
    seed: int | None = None


@dataclass(frozen=True)
class MeasurementScript:
    chain_size: int
    steps: tuple[Step, ...]


def parse_script(text: str) -> MeasurementScript:
    chain_size: int | None = None
    chain_line: int | None = None
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not tokens:
            continue
        keyword, col = tokens[0]
        if keyword.upper() == "CHAIN":
            if chain_size is not None:
                raise ScriptError(
                    f"duplicate CHAIN (already declared on line {chain_line})", lineno, col
                )
            if len(tokens) != 2:
                raise ScriptError("CHAIN takes exactly one argument", lineno, col)
            chain_size = _int_token(tokens[1], lineno, "chain size")
            if chain_size < 1:
                raise ScriptError("chain size must be at least 1", lineno, tokens[1][1])
            chain_line = lineno
        elif keyword.upper() == "M":
            if chain_size is None:
                raise ScriptError("measurement before CHAIN declaration", lineno, col)
            if len(tokens) not in (4, 5):
                raise ScriptError(
                    "expected: M <qubit> <Z|X|Y> <+|-|?> [seed]", lineno, col
                )
            qubit = _int_token(tokens[1], lineno, "qubit")
            if qubit < 1:
                raise ScriptError("qubit labels are positive", lineno, tokens[1][1])
            basis_tok, basis_col = tokens[2]
            try:
                basis = PauliBasis(basis_tok.upper())
            except ValueError:
                raise ScriptError(f"unknown basis {basis_tok!r}", lineno, basis_col) from None
            out_tok, out_col = tokens[3]
            if out_tok == "?":
                outcome = None
            else:
                try:
                    outcome = Outcome(out_tok)
                except ValueError:
                    raise ScriptError(
                        f"outcome must be +, - or ?, not {out_tok!r}", lineno, out_col
                    ) from None
            seed = _int_token(tokens[4], lineno, "seed") if len(tokens) == 5 else None
            steps.append(Step(qubit, basis, outcome, seed))
        else:
            raise ScriptError(f"unknown keyword {keyword!r}", lineno, col)
    if chain_size is None:
        raise ScriptError("script declares no CHAIN", 1, 1)
    return MeasurementScript(chain_size, tuple(steps))


def _int_token(token: tuple[str, int], lineno: int, what: str) -> int:
    text, col = token
    try:
        return int(text)
    except ValueError:
        raise ScriptError(f"{what} must be an integer, not {text!r}", lineno, col) from None


def print_script(script: MeasurementScript) -> str:
    """Canonical text form; reparses to an identical script."""
    lines = [f"CHAIN {script.chain_size}"]
    for s in script.steps:
        outcome = "?" if s.outcome is None else s.outcome.value
        line = f"M {s.qubit} {s.basis.value} {outcome}"
        if s.seed is not None:
            line += f" {s.seed}"
        lines.append(line)
    return "\n".join(lines) + "\n"
