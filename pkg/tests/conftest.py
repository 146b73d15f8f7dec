"""
Pytest configuration and shared fixtures for the test suite.
"""
import math
import shutil
import tempfile

import numpy as np
import pytest

from cliffvar.channels.distributions import (
    DiracMixture,
    GaussianDistribution,
    UniformDistribution,
)
from cliffvar.circuits.gates import GateKind, PauliAxis, gate
from cliffvar.circuits.model import CircuitBuilder
from cliffvar.oracle.statevector import DenseState

SINGLE_KINDS = [GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.SDG]
TWO_KINDS = [GateKind.CZ, GateKind.CNOT, GateKind.CNOT_X]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance reproductions")


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test output."""
    temp_path = tempfile.mkdtemp()
    yield temp_path
    shutil.rmtree(temp_path, ignore_errors=True)


@pytest.fixture
def rng():
    """Seeded generator for reproducible randomized tests."""
    return np.random.default_rng(20240611)


@pytest.fixture
def bell_gates():
    """H on 0 then CNOT 0 -> 1."""
    return [gate(GateKind.H, 0), gate(GateKind.CNOT, 0, 1)]


@pytest.fixture
def ghz_gates():
    """Three-qubit GHZ preparation."""
    return [gate(GateKind.H, 0), gate(GateKind.CNOT, 0, 1), gate(GateKind.CNOT, 1, 2)]


@pytest.fixture
def random_clifford_gates():
    """Factory: random_clifford_gates(n, depth, rng) -> list of Clifford gates."""
    def factory(n, depth, generator):
        gates = []
        for _ in range(depth):
            if n > 1 and generator.random() < 0.4:
                kind = TWO_KINDS[int(generator.integers(len(TWO_KINDS)))]
                a, b = generator.choice(n, size=2, replace=False)
                gates.append(gate(kind, int(a), int(b)))
            else:
                kind = SINGLE_KINDS[int(generator.integers(len(SINGLE_KINDS)))]
                gates.append(gate(kind, int(generator.integers(n))))
        return gates
    return factory


@pytest.fixture
def three_qubit_circuit():
    """Two layers of RX / RY / RZ rotations each followed by CZ(0,1) CZ(1,2)."""
    builder = CircuitBuilder(3)
    for _ in range(2):
        builder.add_rotation(0, PauliAxis.X)
        builder.add_rotation(1, PauliAxis.Y)
        builder.add_rotation(2, PauliAxis.Z)
        builder.add_gate(GateKind.CZ, 0, 1)
        builder.add_gate(GateKind.CZ, 1, 2)
    return builder.build()


@pytest.fixture
def distribution_corpus():
    """Representative laws: uniform, Gaussians, symmetric and skewed atoms."""
    return [
        UniformDistribution(),
        GaussianDistribution(0.0, 0.25),
        GaussianDistribution(0.0, 1.0),
        GaussianDistribution(0.0, 4.0),
        GaussianDistribution(0.4, 0.5),
        DiracMixture.point(math.pi / 3),
        DiracMixture.symmetric([math.pi / 3]),
        DiracMixture(((0.3, 0.5), (1.1, 0.3), (-0.7, 0.2))),
    ]


@pytest.fixture
def random_dirac():
    """Factory: random_dirac(rng, atoms=3, even=False) -> DiracMixture."""
    def factory(generator, atoms=3, even=False):
        angles = generator.uniform(0, 2 * math.pi, atoms)
        weights = generator.dirichlet(np.ones(atoms))
        if even:
            return DiracMixture.symmetric(angles.tolist(), (weights / weights.sum()).tolist())
        return DiracMixture(tuple(zip(angles.tolist(), (weights / weights.sum()).tolist())))
    return factory


@pytest.fixture
def circuit_unitary():
    """Factory: circuit_unitary(circuit, theta) -> dense 2^n x 2^n unitary (qubit 0 most significant)."""
    def factory(circuit, theta):
        dim = 2 ** circuit.n
        columns = []
        for i in range(dim):
            state = DenseState(circuit.n)
            state.tensor = np.eye(dim, dtype=complex)[i].reshape((2,) * circuit.n)
            for layer in circuit.layers:
                for g in layer.fixed.gates:
                    state.apply_gate(g)
                site = layer.rotation
                state.apply_rotation(site.qubit, site.axis, theta[site.parameter])
            for g in circuit.tail.gates:
                state.apply_gate(g)
            columns.append(state.amplitudes.copy())
        return np.array(columns).T
    return factory

@pytest.fixture
def analytic_squared_gradient():
    """Factory: E[(d_0 C)^2] for one uniform rotation layer, a CZ tail and the full zero projector."""
    def factory(circuit):
        axes = [layer.rotation.axis for layer in circuit.layers]
        if axes[0] is PauliAxis.Z:
            return 0.0
        return 0.125 * math.prod(0.375 if axis is not PauliAxis.Z else 1.0 for axis in axes[1:])
    return factory
