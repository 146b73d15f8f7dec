"""
Clifford gate set, rotation axes and their dense matrices.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from cliffvar.errors import CircuitError


class PauliAxis(Enum):
    """Rotation axis of a parameterized single-qubit gate."""
    X = "X"
    Y = "Y"
    Z = "Z"


class GateKind(Enum):
    """Supported Clifford gate kinds."""
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    S = "S"
    SDG = "Sdg"
    CZ = "CZ"
    CNOT = "CNOT"
    CNOT_X = "CNOT_X"

    @property
    def is_two_qubit(self) -> bool:
        return self in TWO_QUBIT_KINDS

    @property
    def inverse(self) -> "GateKind":
        return _INVERSES.get(self, self)


TWO_QUBIT_KINDS = frozenset({GateKind.CZ, GateKind.CNOT, GateKind.CNOT_X})

_INVERSES = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S}


@dataclass(frozen=True)
class CliffordGate:
    """A Clifford gate on a target qubit, with a control for two-qubit kinds."""
    kind: GateKind
    target: int
    control: Optional[int] = None

    def __post_init__(self):
        if self.kind.is_two_qubit != (self.control is not None):
            raise CircuitError(
                f"{self.kind.value} gate {'requires' if self.kind.is_two_qubit else 'takes no'} control qubit"
            )
        if self.target < 0 or (self.control is not None and self.control < 0):
            raise CircuitError(f"Negative qubit index in {self}")
        if self.control is not None and self.control == self.target:
            raise CircuitError(f"Control and target coincide in {self.kind.value} on qubit {self.target}")

    @property
    def qubits(self) -> Tuple[int, ...]:
        """Qubits in serialization order: (control, target) or (target,)."""
        if self.control is None:
            return (self.target,)
        return (self.control, self.target)

    def shifted(self, offset: int) -> "CliffordGate":
        """Same gate acting on qubits moved up by offset."""
        control = None if self.control is None else self.control + offset
        return CliffordGate(self.kind, self.target + offset, control)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "q": list(self.qubits)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CliffordGate":
        try:
            kind = GateKind(data["kind"])
            qubits = [int(q) for q in data["q"]]
        except (KeyError, ValueError, TypeError) as e:
            raise CircuitError(f"Invalid gate description {data!r}: {e}")
        if kind.is_two_qubit:
            if len(qubits) != 2:
                raise CircuitError(f"{kind.value} needs two qubits, got {qubits}")
            return cls(kind, qubits[1], qubits[0])
        if len(qubits) != 1:
            raise CircuitError(f"{kind.value} needs one qubit, got {qubits}")
        return cls(kind, qubits[0])


def gate(kind: GateKind, *qubits: int) -> CliffordGate:
    """Shorthand constructor: gate(GateKind.CNOT, control, target)."""
    if len(qubits) == 2:
        return CliffordGate(kind, qubits[1], qubits[0])
    return CliffordGate(kind, qubits[0])


_INV_SQRT2 = 1 / np.sqrt(2)

SINGLE_QUBIT_MATRICES: Dict[GateKind, np.ndarray] = {
    GateKind.I: np.eye(2, dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
}

_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_XX = np.kron(SINGLE_QUBIT_MATRICES[GateKind.X], SINGLE_QUBIT_MATRICES[GateKind.X])

# Two-qubit matrices in (control, target) basis order
TWO_QUBIT_MATRICES: Dict[GateKind, np.ndarray] = {
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.CNOT: _CNOT,
    GateKind.CNOT_X: _XX @ _CNOT @ _XX,
}


def gate_matrix(kind: GateKind) -> np.ndarray:
    if kind.is_two_qubit:
        return TWO_QUBIT_MATRICES[kind]
    return SINGLE_QUBIT_MATRICES[kind]


def rotation_matrix(axis: PauliAxis, theta: float) -> np.ndarray:
    """exp(-i theta P / 2) for P in {X, Y, Z}."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if axis is PauliAxis.X:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis is PauliAxis.Y:
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex)
