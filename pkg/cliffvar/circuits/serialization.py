"""
JSON description files for circuits and observables.

Schema:
    {"n": 3,
     "distributions": {"default": {"dist": "uniform"}},
     "layers": [{"fixed": [{"kind": "CZ", "q": [0, 1]}],
                 "rotation": {"qubit": 0, "axis": "X", "dist": "default"}}],
     "tail": [...],
     "observable": {"kind": "zero_projector"}}

A layer's ``dist`` may also be an inline distribution object.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from cliffvar.channels.distributions import AngleDistribution, UniformDistribution
from cliffvar.circuits.gates import CliffordGate, PauliAxis
from cliffvar.circuits.model import DEFAULT_DISTRIBUTION, CircuitLayer, FixedLayer, ParamCircuit, RotationSite
from cliffvar.circuits.observables import Observable
from cliffvar.errors import CircuitError, CliffvarError

logger = logging.getLogger(__name__)


def circuit_from_dict(data: Dict[str, Any]) -> Tuple[ParamCircuit, Optional[Observable]]:
    """Parse a circuit (and its observable, when present)."""
    try:
        n = int(data["n"])
        distributions: Dict[str, AngleDistribution] = {
            key: AngleDistribution.from_dict(spec) for key, spec in data.get("distributions", {}).items()
        }
        layers = []
        for k, entry in enumerate(data.get("layers", [])):
            rotation = entry["rotation"]
            dist = rotation.get("dist", DEFAULT_DISTRIBUTION)
            if isinstance(dist, dict):
                dist_id = f"layer{k}"
                distributions[dist_id] = AngleDistribution.from_dict(dist)
            else:
                dist_id = str(dist)
            if dist_id == DEFAULT_DISTRIBUTION and dist_id not in distributions:
                distributions[dist_id] = UniformDistribution()
            site = RotationSite(int(rotation["qubit"]), PauliAxis(rotation.get("axis", "Z")), k, dist_id)
            fixed = FixedLayer(tuple(CliffordGate.from_dict(g) for g in entry.get("fixed", [])))
            layers.append(CircuitLayer(fixed, site))
        tail = FixedLayer(tuple(CliffordGate.from_dict(g) for g in data.get("tail", [])))
        circuit = ParamCircuit(n=n, layers=tuple(layers), distributions=distributions, tail=tail)
        observable = Observable.from_dict(data["observable"], n) if "observable" in data else None
    except CliffvarError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise CircuitError(f"Invalid circuit description: {e}")
    return circuit, observable


def circuit_to_dict(circuit: ParamCircuit, observable: Optional[Observable] = None) -> Dict[str, Any]:
    if circuit.copies != 1:
        raise CircuitError("Doubled circuits are internal and not serialized")
    data: Dict[str, Any] = {
        "n": circuit.n,
        "distributions": {key: dist.to_dict() for key, dist in circuit.distributions.items()},
        "layers": [
            {
                "fixed": [g.to_dict() for g in layer.fixed.gates],
                "rotation": {
                    "qubit": layer.rotation.qubit,
                    "axis": layer.rotation.axis.value,
                    "dist": layer.rotation.distribution,
                },
            }
            for layer in circuit.layers
        ],
    }
    if circuit.tail.gates:
        data["tail"] = [g.to_dict() for g in circuit.tail.gates]
    if observable is not None:
        data["observable"] = observable.to_dict()
    return data


def load_circuit(path: Union[str, Path]) -> Tuple[ParamCircuit, Optional[Observable]]:
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise CircuitError(f"Cannot read circuit file {path}: {e}")
    circuit, observable = circuit_from_dict(data)
    logger.info(f"Loaded circuit from {path}: n={circuit.n}, M={circuit.num_parameters}")
    return circuit, observable


def save_circuit(path: Union[str, Path], circuit: ParamCircuit, observable: Optional[Observable] = None) -> None:
    with open(path, "w") as f:
        json.dump(circuit_to_dict(circuit, observable), f, indent=2)
