"""
Configuration management for cliffvar.
"""
import os
from typing import Any, Dict

from dotenv import load_dotenv

load_dotenv()

# Storage paths
BASE_PATH = os.getenv("CLIFFVAR_HOME", os.getcwd())
OUTPUT_PATH = os.path.join(BASE_PATH, "results")
LOG_PATH = os.path.join(BASE_PATH, "logs")

# Estimator Configuration
ESTIMATOR_CONFIG: Dict[str, Any] = {
    "batches": 100,                     # batch-means standard error
    "negative_weight_clamp": 1e-14,     # weights in [-clamp, 0) become 0
    "convexity_tolerance": 1e-14,
    "enumeration_limit": 2 ** 20,       # max approximants for exact enumeration
    "workers": int(os.getenv("CLIFFVAR_WORKERS", "1")),
}

# Angle distribution Configuration
DISTRIBUTION_CONFIG: Dict[str, Any] = {
    "quadrature_tolerance": 1e-10,
    "quadrature_limit": 400,            # scipy.integrate.quad subdivisions
    "gaussian_half_width": 12.0,        # integration range in sigmas
    "moment_tolerance": 1e-12,
    "center_tolerance": 1e-12,
}

# Dense oracle Configuration
ORACLE_CONFIG: Dict[str, Any] = {
    "max_qubits": int(os.getenv("CLIFFVAR_DENSE_CAP", "14")),
    "quadrature_points": 8,
    "max_grid_points": 200_000,
}

# Experiment defaults
EXPERIMENT_DEFAULTS: Dict[str, Any] = {
    "samples": 500,
    "architectures": 1,
    "bootstrap_estimators": 100,
    "pool_size": 2000,
    "truth_draws": 4000,
    "dense_draws": 0,
    "percentiles": (20, 80),
    "template": {
        "layers": 1,
        "entangler": "brick",
        "axes": "random",
        "fixed_axis": "Y",
        "thinning": "none",
    },
}

# Logging Configuration
LOG_CONFIG: Dict[str, Any] = {
    "level": os.getenv("CLIFFVAR_LOG_LEVEL", "INFO"),
    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    "filename": "cliffvar.log",
}

# CLI exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3
