"""
Observables: weighted Pauli sums and |0><0| projectors on a qubit subset.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

from cliffvar.errors import CircuitError
from cliffvar.stabilizer.pauli import PauliString
from cliffvar.stabilizer.tableau import StabilizerTableau


class Observable(ABC):
    """Hermitian observable measured at the end of a circuit."""

    n: int

    @property
    @abstractmethod
    def norm_bound(self) -> float:
        """Upper bound on the spectral norm."""

    @abstractmethod
    def expectation(self, tableau: StabilizerTableau) -> float:
        """Expectation value on a stabilizer state."""

    @abstractmethod
    def tensor_square(self) -> "Observable":
        """O (x) O acting on 2n qubits, copy B on qubits n..2n-1."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    @staticmethod
    def from_dict(data: Dict[str, Any], n: int) -> "Observable":
        kind = data.get("kind")
        if kind == "zero_projector":
            support = data.get("support")
            return ZeroProjector(n, tuple(range(n)) if support is None else _qubit_indices(support))
        if kind == "pauli_sum":
            terms = []
            try:
                for coefficient, label in data.get("terms", []):
                    terms.append((float(coefficient), PauliString.from_label(str(label))))
            except (TypeError, ValueError) as e:
                raise CircuitError(f"Pauli sum terms must be (coefficient, label) pairs: {e}")
            for _, pauli in terms:
                if pauli.n != n:
                    raise CircuitError(f"Pauli label {pauli.labels!r} has {pauli.n} qubits, expected {n}")
            return PauliSum(tuple(terms))
        raise CircuitError(f"Unknown observable kind {kind!r}")


def _qubit_indices(support) -> Tuple[int, ...]:
    try:
        qubits = tuple(int(q) for q in support)
    except (TypeError, ValueError) as e:
        raise CircuitError(f"Projector support must be a list of qubit indices: {e}")
    if any(isinstance(q, bool) or q != p for q, p in zip(support, qubits)):
        raise CircuitError(f"Projector support {list(support)} holds non-integer entries")
    return qubits


@dataclass(frozen=True)
class PauliSum(Observable):
    """Sum of real-weighted Pauli strings."""
    terms: Tuple[Tuple[float, PauliString], ...]

    def __post_init__(self):
        if not self.terms:
            raise CircuitError("Pauli sum needs at least one term")
        lengths = {p.n for _, p in self.terms}
        if len(lengths) != 1:
            raise CircuitError(f"Pauli strings of mixed lengths {sorted(lengths)}")

    @classmethod
    def from_labels(cls, *items) -> "PauliSum":
        """PauliSum.from_labels((1.0, 'ZZ'), (0.5, 'XI'))"""
        return cls(tuple((float(c), PauliString.from_label(label)) for c, label in items))

    @property
    def n(self) -> int:
        return self.terms[0][1].n

    @property
    def norm_bound(self) -> float:
        return float(sum(abs(c) for c, _ in self.terms))

    def expectation(self, tableau: StabilizerTableau) -> float:
        return float(sum(c * tableau.pauli_expectation(p) for c, p in self.terms))

    def tensor_square(self) -> "PauliSum":
        return PauliSum(tuple(
            (ca * cb, pa.tensor(pb)) for ca, pa in self.terms for cb, pb in self.terms
        ))

    def conjugated_by(self, gates: Sequence) -> "PauliSum":
        """V^dag O V for V the gate sequence (time order)."""
        terms = []
        for c, p in self.terms:
            for g in reversed(list(gates)):
                p = p.conjugated_by(g)
            terms.append((c, p))
        return PauliSum(tuple(terms))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "pauli_sum", "terms": [[c, p.to_label()] for c, p in self.terms]}


@dataclass(frozen=True)
class ZeroProjector(Observable):
    """|0><0| on every qubit of support, identity elsewhere."""
    n: int
    support: Tuple[int, ...]

    def __post_init__(self):
        if not self.support:
            raise CircuitError("Projector support must be nonempty")
        if any(q < 0 or q >= self.n for q in self.support):
            raise CircuitError(f"Projector support {self.support} outside {self.n} qubits")
        if len(set(self.support)) != len(self.support):
            raise CircuitError(f"Duplicate qubits in projector support {self.support}")

    @classmethod
    def full(cls, n: int) -> "ZeroProjector":
        return cls(n, tuple(range(n)))

    @property
    def norm_bound(self) -> float:
        return 1.0

    def expectation(self, tableau: StabilizerTableau) -> float:
        return tableau.zero_projector_probability(self.support)

    def tensor_square(self) -> "ZeroProjector":
        return ZeroProjector(2 * self.n, self.support + tuple(q + self.n for q in self.support))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "zero_projector", "support": list(self.support)}
