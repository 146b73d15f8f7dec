"""
Random circuit architectures and observables for experiments.
"""
import logging
from typing import Any, Dict, List

import numpy as np

from cliffvar.channels.distributions import AngleDistribution
from cliffvar.circuits.gates import CliffordGate, GateKind, PauliAxis, gate
from cliffvar.circuits.model import DEFAULT_DISTRIBUTION, CircuitBuilder, ParamCircuit
from cliffvar.circuits.observables import Observable, PauliSum
from cliffvar.errors import CircuitError, ConfigError
from cliffvar.experiments.config import TemplateSpec
from cliffvar.stabilizer.pauli import PauliString

logger = logging.getLogger(__name__)

_AXES = (PauliAxis.X, PauliAxis.Y, PauliAxis.Z)


def entangler_gates(n: int, pattern: str) -> List[CliffordGate]:
    """CZ layer: brick = pairs (0,1)(2,3).. then (1,2)(3,4)..; ladder = (i, i+1) in order."""
    if pattern == "none" or n < 2:
        return []
    if pattern == "brick":
        pairs = [(q, q + 1) for q in range(0, n - 1, 2)] + [(q, q + 1) for q in range(1, n - 1, 2)]
    elif pattern == "ladder":
        pairs = [(q, q + 1) for q in range(n - 1)]
    else:
        raise ConfigError(f"Unknown entangler pattern {pattern!r}")
    return [gate(GateKind.CZ, a, b) for a, b in pairs]


def random_architecture(n: int, template: TemplateSpec, distribution: AngleDistribution,
                        rng: np.random.Generator) -> ParamCircuit:
    """Layers of single-qubit rotations followed by a CZ entangling layer.

    With thinning, layer l rotates m_l ~ U{0..n} distinct random qubits.
    """
    builder = CircuitBuilder(n, {DEFAULT_DISTRIBUTION: distribution})
    for _ in range(template.layers):
        if template.thinning == "random":
            m = int(rng.integers(0, n + 1))
            qubits = sorted(int(q) for q in rng.choice(n, size=m, replace=False))
        else:
            qubits = list(range(n))
        for q in qubits:
            if template.axes == "random":
                axis = _AXES[int(rng.integers(0, 3))]
            else:
                axis = PauliAxis(template.fixed_axis)
            builder.add_rotation(q, axis)
        builder.add_gates(entangler_gates(n, template.entangler))
    return builder.build()


def random_pauli_string(n: int, rng: np.random.Generator) -> PauliString:
    """Uniform non-identity Pauli string."""
    while True:
        labels = "".join("IXYZ"[int(i)] for i in rng.integers(0, 4, size=n))
        if set(labels) != {"I"}:
            return PauliString(labels)


def build_observable(spec: Dict[str, Any], n: int, rng: np.random.Generator) -> Observable:
    """Observable on n qubits from a config spec; malformed specs raise ConfigError."""
    kind = spec.get("kind")
    if kind == "random_paulis":
        try:
            count = int(spec.get("count", 10))
            coefficient = float(spec.get("coefficient", 1.0))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid random_paulis observable: {e}")
        if count < 1:
            raise ConfigError(f"observable.count must be >= 1, got {count}")
        return PauliSum(tuple((coefficient, random_pauli_string(n, rng)) for _ in range(count)))
    if kind in ("zero_projector", "pauli_sum"):
        try:
            return Observable.from_dict(spec, n)
        except CircuitError as e:
            raise ConfigError(f"Invalid {kind} observable on {n} qubits: {e}")
    raise ConfigError(f"Unknown observable kind {kind!r}")
