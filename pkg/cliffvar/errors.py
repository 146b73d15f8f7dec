"""
Exception hierarchy for cliffvar.
"""


class CliffvarError(Exception):
    """Base exception for all cliffvar errors."""
    pass


class CircuitError(CliffvarError):
    """Invalid circuit structure, qubit index, shift or symmetry center."""
    pass


class DistributionError(CliffvarError):
    """Invalid angle distribution or unsupported moment request."""
    pass


class QuadratureError(DistributionError):
    """Adaptive quadrature failed to reach the requested tolerance."""
    pass


class DecompositionError(CliffvarError):
    """Channel decomposition could not be built or reconstructed."""
    pass


class TableauError(CliffvarError):
    """Stabilizer tableau misuse (bad gate, bad qubit index)."""
    pass


class EstimationError(CliffvarError):
    """Sample planning or estimation failed."""
    pass


class OracleError(CliffvarError):
    """Dense oracle limits exceeded."""
    pass


class ConfigError(CliffvarError):
    """Experiment configuration is invalid."""
    pass
