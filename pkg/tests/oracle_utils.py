"""Independent brute-force reference implementations for expected values.

Everything here works on dicts {bitstring: amplitude} with explicit Python
loops, deliberately sharing no code with the package's vectorized paths.
"""
from __future__ import annotations

import cmath
import itertools
import math


def brute_cluster(n: int) -> dict[str, complex]:
    """Amplitudes 2^(-n/2) * (-1)^(sum of adjacent bit products)."""
    out = {}
    for bits in itertools.product("01", repeat=n):
        word = "".join(bits)
        exponent = sum(int(word[i]) * int(word[i + 1]) for i in range(n - 1))
        out[word] = ((-1) ** exponent) * 2 ** (-n / 2)
    return out


EIGENVECTORS = {
    ("Z", "+"): (1.0, 0.0),
    ("Z", "-"): (0.0, 1.0),
    ("X", "+"): (1 / math.sqrt(2), 1 / math.sqrt(2)),
    ("X", "-"): (1 / math.sqrt(2), -1 / math.sqrt(2)),
    ("Y", "+"): (1 / math.sqrt(2), 1j / math.sqrt(2)),
    ("Y", "-"): (1 / math.sqrt(2), -1j / math.sqrt(2)),
}


def brute_project(
    state: dict[str, complex], position: int, basis: str, outcome: str
) -> tuple[float, dict[str, complex]]:
    """Project the qubit at 0-based string position; drop it; renormalize."""
    e0, e1 = EIGENVECTORS[(basis, outcome)]
    residual: dict[str, complex] = {}
    for word, amp in state.items():
        rest = word[:position] + word[position + 1 :]
        coeff = e0.conjugate() if word[position] == "0" else e1.conjugate()
        residual[rest] = residual.get(rest, 0.0) + coeff * amp
    p = sum(abs(a) ** 2 for a in residual.values())
    if p > 0:
        residual = {w: a / math.sqrt(p) for w, a in residual.items()}
    return p, residual


def brute_overlap(a: dict[str, complex], b: dict[str, complex]) -> float:
    keys = set(a) | set(b)
    return abs(sum(a.get(k, 0.0).conjugate() * b.get(k, 0.0) for k in keys))


def dict_from_state(state) -> dict[str, complex]:
    """PureState -> {bitstring: amplitude} in the state's own label order."""
    n = state.n_qubits
    return {format(i, f"0{n}b"): complex(a) for i, a in enumerate(state.vector)} if n else {"": complex(state.vector[0])}
