"""
Drawing Clifford approximants from per-parameter mixtures.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping

import numpy as np

from cliffvar.channels.decomposition import CliffordMixture, one_fold, two_fold
from cliffvar.circuits.gates import CliffordGate, GateKind
from cliffvar.circuits.model import ParamCircuit
from cliffvar.errors import EstimationError

logger = logging.getLogger(__name__)


def site_mixtures(circuit: ParamCircuit, order: int) -> Dict[int, CliffordMixture]:
    """Mixture of the given order for every parameter, computed once per distribution id."""
    build = one_fold if order == 1 else two_fold
    by_distribution: Dict[str, CliffordMixture] = {}
    mixtures = {}
    for k in range(circuit.num_parameters):
        site = circuit.layers[circuit.parameter_layers(k)[0]].rotation
        if site.distribution not in by_distribution:
            by_distribution[site.distribution] = build(circuit.distributions[site.distribution])
        mixtures[k] = by_distribution[site.distribution]
    return mixtures


@dataclass(frozen=True)
class Approximant:
    """A sampled Clifford circuit with its quasiprobability sign."""
    gates: List[CliffordGate]
    sign: int
    n: int


@dataclass
class ApproximantSampler:
    """Samples replacement terms for every parameter of a canonical circuit.

    For order 2 the circuit must be doubled; the term's first gate goes to
    the copy-A site and the second to the copy-B site.
    """
    circuit: ParamCircuit
    order: int
    mixtures: Mapping[int, CliffordMixture]
    _cumulative: np.ndarray = field(init=False, repr=False)
    _signs: np.ndarray = field(init=False, repr=False)
    _weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.circuit.is_canonical:
            raise EstimationError("Approximants need a Z-canonical circuit")
        if self.circuit.copies != self.order:
            raise EstimationError(f"Order-{self.order} sampling needs a circuit with {self.order} cop(ies)")
        M = self.circuit.num_parameters
        for k in range(M):
            mixture = self.mixtures.get(k)
            if mixture is None:
                raise EstimationError(f"No mixture for parameter {k}")
            if mixture.order != self.order:
                raise EstimationError(f"Parameter {k} has an order-{mixture.order} mixture, expected {self.order}")
        width = max((len(self.mixtures[k].terms) for k in range(M)), default=1)
        self._cumulative = np.full((M, width), np.inf)
        self._signs = np.ones((M, width), dtype=np.int64)
        self._weights = np.zeros((M, width))
        for k in range(M):
            mixture = self.mixtures[k]
            m = len(mixture.terms)
            self._cumulative[k, :m] = np.cumsum(mixture.probabilities)
            self._cumulative[k, m - 1] = np.inf
            self._signs[k, :m] = mixture.signs
            self._weights[k, :m] = mixture.weights

    @property
    def num_parameters(self) -> int:
        return self.circuit.num_parameters

    @property
    def gamma(self) -> float:
        return float(np.prod([self.mixtures[k].gamma for k in range(self.num_parameters)]))

    @property
    def is_convex(self) -> bool:
        return all(self.mixtures[k].is_convex for k in range(self.num_parameters))

    @property
    def term_counts(self) -> List[int]:
        return [len(self.mixtures[k].terms) for k in range(self.num_parameters)]

    def draw_indices(self, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(self.num_parameters)
        return (u[:, None] >= self._cumulative).sum(axis=1)

    def sign(self, choices: np.ndarray) -> int:
        if len(choices) == 0:
            return 1
        return int(np.prod(self._signs[np.arange(len(choices)), choices]))

    def weight(self, choices) -> float:
        if len(choices) == 0:
            return 1.0
        return float(np.prod(self._weights[np.arange(len(choices)), np.asarray(choices)]))

    def assemble(self, circuit: ParamCircuit, choices) -> List[CliffordGate]:
        """Gate list of ``circuit`` with every rotation replaced by its chosen term."""
        half = circuit.n // 2
        gates: List[CliffordGate] = []
        for layer in circuit.layers:
            gates.extend(layer.fixed.gates)
            site = layer.rotation
            term = self.mixtures[site.parameter].terms[choices[site.parameter]]
            copy = 0 if circuit.copies == 1 or site.qubit < half else 1
            if term.gates[copy] is not GateKind.I:
                gates.append(CliffordGate(term.gates[copy], site.qubit))
        gates.extend(circuit.tail.gates)
        return gates


def draw_approximant(circuit: ParamCircuit, order: int, mixtures: Mapping[int, CliffordMixture],
                     rng: np.random.Generator) -> Approximant:
    """Replace every rotation (or rotation pair) by a Clifford drawn with probability |q|/gamma."""
    sampler = ApproximantSampler(circuit, order, mixtures)
    choices = sampler.draw_indices(rng)
    return Approximant(sampler.assemble(circuit, choices), sampler.sign(choices), circuit.n)
