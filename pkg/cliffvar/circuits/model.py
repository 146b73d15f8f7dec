"""
Layered parameterized circuits.

A circuit is a sequence of layers; within layer i the fixed Clifford
layer W_i acts first and the rotation U_i(theta_i) second, so the
whole unitary is tail * prod_i U_i W_i. Circuits act on |0...0>.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from cliffvar.channels.distributions import AngleDistribution, UniformDistribution
from cliffvar.circuits.gates import CliffordGate, GateKind, PauliAxis, gate
from cliffvar.errors import CircuitError

logger = logging.getLogger(__name__)

DEFAULT_DISTRIBUTION = "default"


@dataclass(frozen=True)
class RotationSite:
    """exp(-i theta_k P / 2) on one qubit."""
    qubit: int
    axis: PauliAxis
    parameter: int
    distribution: str = DEFAULT_DISTRIBUTION


@dataclass(frozen=True)
class FixedLayer:
    """Ordered, unparameterized Clifford gates."""
    gates: Tuple[CliffordGate, ...] = ()

    def appended(self, *gates: CliffordGate) -> "FixedLayer":
        return FixedLayer(self.gates + tuple(gates))

    def prepended(self, *gates: CliffordGate) -> "FixedLayer":
        return FixedLayer(tuple(gates) + self.gates)

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class CircuitLayer:
    fixed: FixedLayer
    rotation: RotationSite


@dataclass(frozen=True)
class ParamCircuit:
    """Layered ansatz over n qubits with M independent rotation parameters.

    ``copies`` is 1 for ordinary circuits and 2 for doubled circuits, where
    every parameter index tags one site per copy.
    """
    n: int
    layers: Tuple[CircuitLayer, ...] = ()
    distributions: Mapping[str, AngleDistribution] = field(default_factory=dict)
    tail: FixedLayer = FixedLayer()
    copies: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise CircuitError(f"Circuit needs at least one qubit, got n={self.n}")
        if self.copies not in (1, 2):
            raise CircuitError(f"copies must be 1 or 2, got {self.copies}")
        for g in self.all_fixed_gates():
            if max(g.qubits) >= self.n:
                raise CircuitError(f"Gate {g.kind.value} on {g.qubits} outside {self.n} qubits")
        counts: Dict[int, int] = {}
        for layer in self.layers:
            site = layer.rotation
            if not 0 <= site.qubit < self.n:
                raise CircuitError(f"Rotation qubit {site.qubit} outside {self.n} qubits")
            if site.distribution not in self.distributions:
                raise CircuitError(f"Unknown distribution id {site.distribution!r}")
            counts[site.parameter] = counts.get(site.parameter, 0) + 1
        if sorted(counts) != list(range(len(counts))):
            raise CircuitError(f"Parameter indices {sorted(counts)} do not form 0..M-1")
        if any(c != self.copies for c in counts.values()):
            raise CircuitError(f"Each parameter must tag exactly {self.copies} rotation site(s)")

    @property
    def num_parameters(self) -> int:
        return len(self.layers) // self.copies

    @property
    def is_canonical(self) -> bool:
        return all(layer.rotation.axis is PauliAxis.Z for layer in self.layers)

    @property
    def rotation_sites(self) -> List[RotationSite]:
        return [layer.rotation for layer in self.layers]

    def parameter_layers(self, k: int) -> List[int]:
        """Layer positions carrying parameter k, in circuit order."""
        return [i for i, layer in enumerate(self.layers) if layer.rotation.parameter == k]

    def distribution_for(self, k: int) -> AngleDistribution:
        site = self.layers[self.parameter_layers(k)[0]].rotation
        return self.distributions[site.distribution]

    def all_fixed_gates(self) -> Iterator[CliffordGate]:
        for layer in self.layers:
            yield from layer.fixed.gates
        yield from self.tail.gates

    def with_layers(self, layers, tail: Optional[FixedLayer] = None, distributions=None) -> "ParamCircuit":
        return replace(
            self,
            layers=tuple(layers),
            tail=self.tail if tail is None else tail,
            distributions=self.distributions if distributions is None else dict(distributions),
        )

    def describe(self) -> str:
        lines = [f"ParamCircuit(n={self.n}, M={self.num_parameters}, copies={self.copies})"]
        for i, layer in enumerate(self.layers):
            fixed = " ".join(f"{g.kind.value}{list(g.qubits)}" for g in layer.fixed.gates) or "-"
            site = layer.rotation
            lines.append(f"  [{i}] {fixed} | R{site.axis.value}(theta_{site.parameter}) q{site.qubit} ~ {site.distribution}")
        if self.tail.gates:
            lines.append("  tail " + " ".join(f"{g.kind.value}{list(g.qubits)}" for g in self.tail.gates))
        return "\n".join(lines)


class CircuitBuilder:
    """Assemble a ParamCircuit from a time-ordered stream of gates and rotations.

    Fixed gates accumulate until the next rotation, which closes a layer;
    gates left over at build time become the tail.
    """

    def __init__(self, n: int, distributions: Optional[Mapping[str, AngleDistribution]] = None):
        self.n = n
        self.distributions: Dict[str, AngleDistribution] = dict(
            distributions if distributions is not None else {DEFAULT_DISTRIBUTION: UniformDistribution()}
        )
        self._pending: List[CliffordGate] = []
        self._layers: List[CircuitLayer] = []

    def add_gate(self, kind: GateKind, *qubits: int) -> "CircuitBuilder":
        self._pending.append(gate(kind, *qubits))
        return self

    def add_gates(self, gates) -> "CircuitBuilder":
        self._pending.extend(gates)
        return self

    def add_rotation(self, qubit: int, axis: PauliAxis = PauliAxis.Z,
                     distribution: str = DEFAULT_DISTRIBUTION) -> "CircuitBuilder":
        site = RotationSite(qubit, axis, len(self._layers), distribution)
        self._layers.append(CircuitLayer(FixedLayer(tuple(self._pending)), site))
        self._pending = []
        return self

    def build(self) -> ParamCircuit:
        circuit = ParamCircuit(
            n=self.n,
            layers=tuple(self._layers),
            distributions=dict(self.distributions),
            tail=FixedLayer(tuple(self._pending)),
        )
        logger.debug(f"Built circuit with n={circuit.n}, M={circuit.num_parameters}")
        return circuit
