"""
Experiment configuration documents.
"""
import copy
import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from cliffvar.channels.distributions import AngleDistribution
from cliffvar.circuits.observables import Observable
from cliffvar.config import EXPERIMENT_DEFAULTS, ORACLE_CONFIG
from cliffvar.errors import CliffvarError, ConfigError
from cliffvar.estimation.quantities import Quantity

logger = logging.getLogger(__name__)


class ExperimentKind(Enum):
    """Supported experiment recipes."""
    VARIANCE_VS_N = "variance_vs_n"
    BIAS_VS_K = "bias_vs_K"
    VAR_VS_K = "var_vs_K"
    ARCHITECTURE_SCAN = "architecture_scan"
    SINGLE_ESTIMATE = "single_estimate"


ENTANGLERS = ("brick", "ladder", "none")
AXIS_POLICIES = ("random", "fixed")
THINNING_POLICIES = ("none", "random")
OBSERVABLE_KINDS = ("zero_projector", "random_paulis", "pauli_sum")


@dataclass
class TemplateSpec:
    """Random layered architecture: rotations then an entangling CZ layer, repeated."""
    layers: int = 1
    entangler: str = "brick"
    axes: str = "random"
    fixed_axis: str = "Y"
    thinning: str = "none"

    def validate(self) -> None:
        if self.layers < 0:
            raise ConfigError(f"template.layers must be >= 0, got {self.layers}")
        if self.entangler not in ENTANGLERS:
            raise ConfigError(f"template.entangler must be one of {ENTANGLERS}, got {self.entangler!r}")
        if self.axes not in AXIS_POLICIES:
            raise ConfigError(f"template.axes must be one of {AXIS_POLICIES}, got {self.axes!r}")
        if self.fixed_axis not in ("X", "Y", "Z"):
            raise ConfigError(f"template.fixed_axis must be X, Y or Z, got {self.fixed_axis!r}")
        if self.thinning not in THINNING_POLICIES:
            raise ConfigError(f"template.thinning must be one of {THINNING_POLICIES}, got {self.thinning!r}")


@dataclass
class ExperimentConfig:
    """Single JSON document describing one experiment."""
    kind: ExperimentKind
    seed: int
    name: str = "experiment"
    n_values: List[int] = field(default_factory=lambda: [4])
    template: TemplateSpec = field(default_factory=TemplateSpec)
    distribution: Dict[str, Any] = field(default_factory=lambda: {"dist": "uniform"})
    observable: Dict[str, Any] = field(default_factory=lambda: {"kind": "zero_projector"})
    quantity: Quantity = Quantity.SQUARED_GRADIENT
    parameter: int = 0
    samples: Optional[int] = None
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    architectures: int = EXPERIMENT_DEFAULTS["architectures"]
    dense_draws: int = EXPERIMENT_DEFAULTS["dense_draws"]
    k_values: List[int] = field(default_factory=lambda: [10, 20, 50, 100, 200, 500, 1000, 2000])
    pool_size: int = EXPERIMENT_DEFAULTS["pool_size"]
    truth_draws: int = EXPERIMENT_DEFAULTS["truth_draws"]
    bootstrap_estimators: int = EXPERIMENT_DEFAULTS["bootstrap_estimators"]
    circuit: Optional[Union[str, Dict[str, Any]]] = None
    workers: int = 1
    output: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        data = copy.deepcopy(data)
        if "seed" not in data:
            raise ConfigError("Configuration must set a master seed")
        try:
            kind = ExperimentKind(data.pop("kind"))
        except KeyError:
            raise ConfigError("Configuration must set an experiment kind")
        except ValueError as e:
            raise ConfigError(f"Unknown experiment kind: {e}")
        template = {**EXPERIMENT_DEFAULTS["template"], **data.pop("template", {})}
        try:
            quantity = Quantity(data.pop("quantity", Quantity.SQUARED_GRADIENT.value))
            config = cls(kind=kind, template=TemplateSpec(**template), quantity=quantity, **data)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid configuration: {e}")
        config.validate()
        return config

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read configuration {path}: {e}")
        config = cls.from_dict(data)
        logger.info(f"Loaded {config.kind.value} configuration '{config.name}' from {path}")
        return config

    def validate(self) -> None:
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed!r}")
        self.template.validate()
        if self.kind is not ExperimentKind.SINGLE_ESTIMATE:
            if not self.n_values or any(not isinstance(n, int) or n < 1 for n in self.n_values):
                raise ConfigError(f"n_values must be a nonempty list of positive integers, got {self.n_values}")
        self._validate_sample_count()
        for name in ("architectures", "pool_size", "truth_draws", "bootstrap_estimators", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.dense_draws < 0:
            raise ConfigError(f"dense_draws must be >= 0, got {self.dense_draws}")
        if self.parameter < 0:
            raise ConfigError(f"parameter must be >= 0, got {self.parameter}")
        try:
            AngleDistribution.from_dict(self.distribution)
        except CliffvarError as e:
            raise ConfigError(f"Invalid distribution: {e}")
        if self.observable.get("kind") not in OBSERVABLE_KINDS:
            raise ConfigError(f"observable.kind must be one of {OBSERVABLE_KINDS}")
        self._validate_observable()
        if self.kind in (ExperimentKind.BIAS_VS_K, ExperimentKind.VAR_VS_K):
            if not self.k_values or any(k < 1 for k in self.k_values):
                raise ConfigError(f"k_values must be positive, got {self.k_values}")
            if self.quantity is Quantity.GRADIENT_VARIANCE:
                raise ConfigError("Bootstrap studies need a per-sample quantity, not gradient_variance")
            cap = ORACLE_CONFIG["max_qubits"]
            if max(self.n_values) > cap:
                raise ConfigError(f"Bias studies need a dense truth; n must be <= {cap}")
        if self.kind is ExperimentKind.SINGLE_ESTIMATE and self.circuit is None:
            raise ConfigError("single_estimate needs a circuit (inline object or path)")

    def _validate_sample_count(self) -> None:
        """Fixed K or a planned K from (epsilon, delta), never both; K = 500 when neither is given."""
        if self.epsilon is None and self.delta is None:
            if self.samples is None:
                self.samples = EXPERIMENT_DEFAULTS["samples"]
            if self.samples < 1:
                raise ConfigError(f"samples must be >= 1, got {self.samples}")
            return
        if self.samples is not None:
            raise ConfigError("Set either samples or epsilon and delta, not both")
        if self.epsilon is None or self.delta is None:
            raise ConfigError("Planned sample counts need both epsilon and delta")
        if self.epsilon <= 0 or not 0 < self.delta < 1:
            raise ConfigError(f"Need epsilon > 0 and 0 < delta < 1, got {self.epsilon}, {self.delta}")

    def _validate_observable(self) -> None:
        kind = self.observable["kind"]
        if kind == "random_paulis":
            try:
                count = int(self.observable.get("count", 10))
                float(self.observable.get("coefficient", 1.0))
            except (TypeError, ValueError) as e:
                raise ConfigError(f"Invalid random_paulis observable: {e}")
            if count < 1:
                raise ConfigError(f"observable.count must be >= 1, got {count}")
            return
        if self.kind is ExperimentKind.SINGLE_ESTIMATE:
            return
        for n in self.n_values:
            try:
                Observable.from_dict(self.observable, n)
            except CliffvarError as e:
                raise ConfigError(f"Invalid observable for n={n}: {e}")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        data["quantity"] = self.quantity.value
        return data
