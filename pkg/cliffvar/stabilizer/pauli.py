"""
Signed Pauli strings.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, Tuple

import numpy as np

from cliffvar.circuits.gates import CliffordGate, GateKind, SINGLE_QUBIT_MATRICES, gate_matrix
from cliffvar.errors import CircuitError

PAULI_LABELS = "IXYZ"

PAULI_MATRICES = {
    "I": SINGLE_QUBIT_MATRICES[GateKind.I],
    "X": SINGLE_QUBIT_MATRICES[GateKind.X],
    "Y": SINGLE_QUBIT_MATRICES[GateKind.Y],
    "Z": SINGLE_QUBIT_MATRICES[GateKind.Z],
}


@dataclass(frozen=True)
class PauliString:
    """A Pauli operator sign * P_0 (x) P_1 (x) ... on n qubits (Y is Hermitian)."""
    labels: str
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise CircuitError(f"Pauli sign must be +1 or -1, got {self.sign}")
        bad = set(self.labels) - set(PAULI_LABELS)
        if bad:
            raise CircuitError(f"Invalid Pauli labels {sorted(bad)} in {self.labels!r}")

    @classmethod
    def from_label(cls, text: str) -> "PauliString":
        """Parse '+XIZ', '-YY' or 'ZZ'."""
        text = text.strip()
        sign = 1
        if text[:1] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        return cls(text.upper(), sign)

    @classmethod
    def single(cls, n: int, qubit: int, label: str) -> "PauliString":
        chars = ["I"] * n
        chars[qubit] = label
        return cls("".join(chars))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def x(self) -> np.ndarray:
        return np.array([c in "XY" for c in self.labels], dtype=bool)

    @property
    def z(self) -> np.ndarray:
        return np.array([c in "ZY" for c in self.labels], dtype=bool)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.labels) if c != "I")

    def to_label(self) -> str:
        return ("-" if self.sign < 0 else "+") + self.labels

    def tensor(self, other: "PauliString") -> "PauliString":
        return PauliString(self.labels + other.labels, self.sign * other.sign)

    def commutes_with(self, other: "PauliString") -> bool:
        anti = np.count_nonzero((self.x & other.z) ^ (self.z & other.x))
        return anti % 2 == 0

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix, qubit 0 most significant."""
        out = np.array([[self.sign]], dtype=complex)
        for c in self.labels:
            out = np.kron(out, PAULI_MATRICES[c])
        return out

    def conjugated_by(self, gate: CliffordGate) -> "PauliString":
        """Heisenberg update G^dag P G."""
        qubits = gate.qubits
        if max(qubits) >= self.n:
            raise CircuitError(f"Gate {gate} outside {self.n}-qubit Pauli string")
        local = "".join(self.labels[q] for q in qubits)
        sign, image = _conjugation_table(gate.kind)[local]
        chars = list(self.labels)
        for q, c in zip(qubits, image):
            chars[q] = c
        return PauliString("".join(chars), self.sign * sign)


@lru_cache(maxsize=None)
def _conjugation_table(kind: GateKind) -> Dict[str, Tuple[int, str]]:
    width = 2 if kind.is_two_qubit else 1
    u = gate_matrix(kind)
    candidates = {}
    for labels in product(PAULI_LABELS, repeat=width):
        candidates["".join(labels)] = PauliString("".join(labels)).matrix()
    table = {}
    for label, mat in candidates.items():
        image = u.conj().T @ mat @ u
        for other, ref in candidates.items():
            for sign in (1, -1):
                if np.allclose(image, sign * ref):
                    table[label] = (sign, other)
    return table
