"""
Dense statevector reference for small circuits.

Gates are applied by contracting a 2x2 (or 4x4) matrix against the
qubit axes of the (2,)*n amplitude tensor; qubit 0 is the leading axis.
"""
import logging
from itertools import product
from typing import Optional, Sequence, Tuple

import numpy as np

from cliffvar.circuits.gates import CliffordGate, PauliAxis, gate_matrix, rotation_matrix
from cliffvar.circuits.model import ParamCircuit
from cliffvar.circuits.observables import Observable, PauliSum, ZeroProjector
from cliffvar.config import ORACLE_CONFIG
from cliffvar.errors import OracleError
from cliffvar.estimation.quantities import Quantity
from cliffvar.stabilizer.pauli import PauliString, PAULI_MATRICES

logger = logging.getLogger(__name__)


def _check_size(n: int) -> None:
    cap = ORACLE_CONFIG["max_qubits"]
    if n > cap:
        raise OracleError(f"Dense oracle limited to {cap} qubits, got {n}")


class DenseState:
    """Pure state of n qubits stored as a complex amplitude tensor."""

    def __init__(self, n: int):
        _check_size(n)
        self.n = n
        self.tensor = np.zeros((2,) * n, dtype=complex)
        self.tensor[(0,) * n] = 1.0

    @property
    def amplitudes(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def apply_matrix(self, matrix: np.ndarray, qubits: Sequence[int]) -> "DenseState":
        k = len(qubits)
        op = matrix.reshape((2,) * (2 * k))
        moved = np.tensordot(op, self.tensor, axes=(list(range(k, 2 * k)), list(qubits)))
        self.tensor = np.moveaxis(moved, list(range(k)), list(qubits))
        return self

    def apply_gate(self, gate: CliffordGate) -> "DenseState":
        return self.apply_matrix(gate_matrix(gate.kind), gate.qubits)

    def apply_rotation(self, qubit: int, axis: PauliAxis, theta: float) -> "DenseState":
        return self.apply_matrix(rotation_matrix(axis, theta), (qubit,))

    def pauli_expectation(self, pauli: PauliString) -> float:
        image = self.tensor
        for q, label in enumerate(pauli.labels):
            if label != "I":
                image = np.moveaxis(np.tensordot(PAULI_MATRICES[label], image, axes=([1], [q])), 0, q)
        return float(pauli.sign * np.vdot(self.tensor, image).real)

    def zero_probability(self, support: Sequence[int]) -> float:
        index = [slice(None)] * self.n
        for q in support:
            index[q] = 0
        return float(np.sum(np.abs(self.tensor[tuple(index)]) ** 2))

    def expectation(self, observable: Observable) -> float:
        if isinstance(observable, ZeroProjector):
            return self.zero_probability(observable.support)
        if isinstance(observable, PauliSum):
            return float(sum(c * self.pauli_expectation(p) for c, p in observable.terms))
        raise OracleError(f"Unsupported observable type {type(observable).__name__}")


def run_dense(gates: Sequence[CliffordGate], n: int) -> DenseState:
    """Statevector after applying Clifford gates to |0...0>."""
    state = DenseState(n)
    for g in gates:
        state.apply_gate(g)
    return state


def evaluate_cost(circuit: ParamCircuit, observable: Observable, theta: Sequence[float]) -> float:
    """C(theta) = <0| U(theta)^dag O U(theta) |0>."""
    _check_size(circuit.n)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.num_parameters,):
        raise OracleError(f"Expected {circuit.num_parameters} angles, got shape {theta.shape}")
    state = DenseState(circuit.n)
    for layer in circuit.layers:
        for g in layer.fixed.gates:
            state.apply_gate(g)
        site = layer.rotation
        state.apply_rotation(site.qubit, site.axis, theta[site.parameter])
    for g in circuit.tail.gates:
        state.apply_gate(g)
    return state.expectation(observable)


def quantity_value(circuit: ParamCircuit, observable: Observable, quantity: Quantity,
                   theta: np.ndarray, k: int = 0) -> float:
    """C, d_k C (shift rule), C^2 or (d_k C)^2 at theta."""
    if quantity in (Quantity.COST, Quantity.COST_SQUARED):
        value = evaluate_cost(circuit, observable, theta)
        return value if quantity is Quantity.COST else value ** 2
    if quantity in (Quantity.GRADIENT, Quantity.SQUARED_GRADIENT):
        shift = np.zeros_like(theta)
        shift[k] = np.pi / 2
        value = (evaluate_cost(circuit, observable, theta + shift)
                 - evaluate_cost(circuit, observable, theta - shift)) / 2
        return value if quantity is Quantity.GRADIENT else value ** 2
    raise OracleError(f"Quantity {quantity.value} has no pointwise value")


def sample_thetas(circuit: ParamCircuit, rng: np.random.Generator) -> np.ndarray:
    """One parameter vector drawn from the site laws."""
    return np.array([float(circuit.distribution_for(k).sample(rng)) for k in range(circuit.num_parameters)])


def mc_average(circuit: ParamCircuit, observable: Observable, quantity: Quantity, draws: int,
               seed: int = 0, k: int = 0) -> Tuple[float, float]:
    """Monte Carlo (mean, standard error) of a quantity over theta drawn from the site laws."""
    if draws < 1:
        raise OracleError(f"Need at least one draw, got {draws}")
    _check_size(circuit.n)
    rng = np.random.default_rng(seed)
    thetas = [sample_thetas(circuit, rng) for _ in range(draws)]
    if quantity is Quantity.GRADIENT_VARIANCE:
        grads = np.array([quantity_value(circuit, observable, Quantity.GRADIENT, t, k) for t in thetas])
        mean = float(grads.var(ddof=1)) if draws > 1 else 0.0
        centered = (grads - grads.mean()) ** 2
        error = float(centered.std(ddof=1) / np.sqrt(draws)) if draws > 1 else 0.0
        return mean, error
    values = np.array([quantity_value(circuit, observable, quantity, t, k) for t in thetas])
    error = float(values.std(ddof=1) / np.sqrt(draws)) if draws > 1 else 0.0
    return float(values.mean()), error


def quadrature_average(circuit: ParamCircuit, observable: Observable, quantity: Quantity,
                       points: Optional[int] = None, k: int = 0) -> float:
    """Tensor-grid average over per-parameter quadrature rules."""
    points = points or ORACLE_CONFIG["quadrature_points"]
    rules = [circuit.distribution_for(j).quadrature_rule(points) for j in range(circuit.num_parameters)]
    size = int(np.prod([len(nodes) for nodes, _ in rules], dtype=object)) if rules else 1
    if size > ORACLE_CONFIG["max_grid_points"]:
        raise OracleError(f"Quadrature grid of {size} points exceeds cap {ORACLE_CONFIG['max_grid_points']}")
    if quantity is Quantity.GRADIENT_VARIANCE:
        squared = quadrature_average(circuit, observable, Quantity.SQUARED_GRADIENT, points, k)
        mean = quadrature_average(circuit, observable, Quantity.GRADIENT, points, k)
        return squared - mean ** 2
    total = 0.0
    for combo in product(*[range(len(nodes)) for nodes, _ in rules]):
        theta = np.array([rules[j][0][i] for j, i in enumerate(combo)])
        weight = float(np.prod([rules[j][1][i] for j, i in enumerate(combo)]))
        total += weight * quantity_value(circuit, observable, quantity, theta, k)
    logger.debug(f"Quadrature over {size} grid points for {quantity.value}")
    return total
