"""
Channel-preserving circuit rewrites.

All rewrites drop global phases; correctness is at the channel level.
"""
import logging
from typing import List, Mapping, Optional, Tuple

from cliffvar.channels.distributions import AngleDistribution, clifford_angle_index
from cliffvar.circuits.gates import CliffordGate, GateKind, PauliAxis
from cliffvar.circuits.model import CircuitLayer, FixedLayer, ParamCircuit, RotationSite
from cliffvar.circuits.observables import Observable, PauliSum
from cliffvar.errors import CircuitError

logger = logging.getLogger(__name__)

Shift = Tuple[int, int]  # (parameter index, +1 or -1)

# R_Z(j * pi / 2) up to phase
_CENTER_GATES = {1: GateKind.S, 2: GateKind.Z, 3: GateKind.SDG}


def _conjugators(axis: PauliAxis, qubit: int) -> Tuple[List[CliffordGate], List[CliffordGate]]:
    """Gates before and after R_Z reproducing a rotation about axis."""
    if axis is PauliAxis.X:
        return [CliffordGate(GateKind.H, qubit)], [CliffordGate(GateKind.H, qubit)]
    if axis is PauliAxis.Y:
        return (
            [CliffordGate(GateKind.SDG, qubit), CliffordGate(GateKind.H, qubit)],
            [CliffordGate(GateKind.H, qubit), CliffordGate(GateKind.S, qubit)],
        )
    return [], []


def _canonical_layers(circuit: ParamCircuit) -> Tuple[List[CircuitLayer], List[CliffordGate]]:
    layers = []
    carry: List[CliffordGate] = []
    for layer in circuit.layers:
        site = layer.rotation
        before, after = _conjugators(site.axis, site.qubit)
        fixed = FixedLayer(tuple(carry) + layer.fixed.gates + tuple(before))
        layers.append(CircuitLayer(fixed, RotationSite(site.qubit, PauliAxis.Z, site.parameter, site.distribution)))
        carry = after
    return layers, carry


def canonicalize_to_z(circuit: ParamCircuit) -> ParamCircuit:
    """Rewrite every rotation about Z; trailing conjugators go to the tail."""
    if circuit.is_canonical:
        return circuit
    layers, trailing = _canonical_layers(circuit)
    return circuit.with_layers(layers, tail=circuit.tail.prepended(*trailing))


def canonicalize_with_observable(circuit: ParamCircuit, observable: Observable) -> Tuple[ParamCircuit, Observable]:
    """Like canonicalize_to_z, absorbing trailing conjugators into a Pauli-sum observable.

    Absorption needs an empty tail and a Pauli sum; otherwise the
    conjugators stay in the tail.
    """
    if circuit.is_canonical:
        return circuit, observable
    layers, trailing = _canonical_layers(circuit)
    if trailing and isinstance(observable, PauliSum) and not circuit.tail.gates:
        logger.debug(f"Absorbing {len(trailing)} conjugator(s) into the observable")
        return circuit.with_layers(layers), observable.conjugated_by(trailing)
    if trailing:
        logger.debug(f"Keeping {len(trailing)} conjugator(s) in the tail")
    return circuit.with_layers(layers, tail=circuit.tail.prepended(*trailing)), observable


def extract_symmetry_center(circuit: ParamCircuit,
                            distributions: Optional[Mapping[str, AngleDistribution]] = None) -> ParamCircuit:
    """Factor each law's Clifford symmetry center out as a fixed gate before the rotation."""
    distributions = dict(circuit.distributions if distributions is None else distributions)
    new_distributions = dict(distributions)
    layers = []
    changed = False
    for layer in circuit.layers:
        site = layer.rotation
        dist = distributions[site.distribution]
        center = dist.symmetry_center
        j = None if center is None else clifford_angle_index(center)
        if center is not None and j is None:
            raise CircuitError(f"Symmetry center {center} of {site.distribution!r} is not a Clifford angle")
        if not j:
            layers.append(layer)
            continue
        if site.axis is not PauliAxis.Z:
            raise CircuitError("Symmetry centers can only be extracted from Z rotations; canonicalize first")
        recentered_id = f"{site.distribution}@{j}"
        new_distributions[recentered_id] = dist.recenter(center)
        fixed = layer.fixed.appended(CliffordGate(_CENTER_GATES[j], site.qubit))
        layers.append(CircuitLayer(fixed, RotationSite(site.qubit, site.axis, site.parameter, recentered_id)))
        changed = True
    if not changed:
        return circuit.with_layers(circuit.layers, distributions=distributions)
    return circuit.with_layers(layers, distributions=new_distributions)


def _shift_gate(qubit: int, sign: int) -> CliffordGate:
    # R_Z(+pi/2) ~ S, R_Z(-pi/2) ~ Sdg
    return CliffordGate(GateKind.S if sign > 0 else GateKind.SDG, qubit)


def _check_shift(circuit: ParamCircuit, shift: Shift) -> None:
    k, sign = shift
    if not 0 <= k < circuit.num_parameters:
        raise CircuitError(f"Parameter index {k} out of range 0..{circuit.num_parameters - 1}")
    if sign not in (1, -1):
        raise CircuitError(f"Shift sign must be +1 or -1, got {sign}")


def apply_parameter_shift(circuit: ParamCircuit, k: int, sign: int) -> ParamCircuit:
    """Circuit whose channel at theta equals the original at theta +/- (pi/2) e_k."""
    if not circuit.is_canonical:
        raise CircuitError("Parameter shifts need a Z-canonical circuit")
    _check_shift(circuit, (k, sign))
    layers = []
    for layer in circuit.layers:
        if layer.rotation.parameter == k:
            layer = CircuitLayer(layer.fixed.appended(_shift_gate(layer.rotation.qubit, sign)), layer.rotation)
        layers.append(layer)
    return circuit.with_layers(layers)


def double_circuit(circuit: ParamCircuit, shift_a: Optional[Shift] = None,
                   shift_b: Optional[Shift] = None) -> ParamCircuit:
    """Two copies on 2n qubits sharing every parameter, each copy optionally shifted.

    Layer i of copy A is followed by layer i of copy B; copy B lives on
    qubits n..2n-1.
    """
    if not circuit.is_canonical:
        raise CircuitError("Doubling needs a Z-canonical circuit")
    if circuit.copies != 1:
        raise CircuitError("Circuit is already doubled")
    for shift in (shift_a, shift_b):
        if shift is not None:
            _check_shift(circuit, shift)
    n = circuit.n
    layers = []
    for layer in circuit.layers:
        site = layer.rotation
        fixed_a = layer.fixed.gates
        fixed_b = tuple(g.shifted(n) for g in layer.fixed.gates)
        if shift_a is not None and shift_a[0] == site.parameter:
            fixed_a += (_shift_gate(site.qubit, shift_a[1]),)
        if shift_b is not None and shift_b[0] == site.parameter:
            fixed_b += (_shift_gate(site.qubit + n, shift_b[1]),)
        layers.append(CircuitLayer(FixedLayer(fixed_a), site))
        layers.append(CircuitLayer(
            FixedLayer(fixed_b),
            RotationSite(site.qubit + n, site.axis, site.parameter, site.distribution),
        ))
    tail = FixedLayer(circuit.tail.gates + tuple(g.shifted(n) for g in circuit.tail.gates))
    return ParamCircuit(n=2 * n, layers=tuple(layers), distributions=dict(circuit.distributions),
                        tail=tail, copies=2)
