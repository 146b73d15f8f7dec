"""
Experiment runner: barren-plateau sweeps, bias/variance-vs-K studies,
random-architecture scans and single estimates.

Results accumulate as rows and are exported as CSV plus a JSON summary.
"""
import json
import logging
import os
import time
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from cliffvar.channels.distributions import AngleDistribution
from cliffvar.circuits.model import ParamCircuit
from cliffvar.circuits.observables import Observable
from cliffvar.circuits.serialization import circuit_from_dict, load_circuit
from cliffvar.config import EXPERIMENT_DEFAULTS, ORACLE_CONFIG, OUTPUT_PATH
from cliffvar.errors import CliffvarError, ConfigError, EstimationError
from cliffvar.estimation.estimator import (
    EstimateReport,
    estimate_gradient_variance,
    quantity_task,
    run_task,
    sample_values,
)
from cliffvar.estimation.planning import EstimationMode, plan_samples
from cliffvar.estimation.quantities import Quantity
from cliffvar.estimation.statistics import bootstrap_estimators, fit_log_linear, fit_log_log
from cliffvar.experiments.architectures import build_observable, random_architecture
from cliffvar.experiments.config import ExperimentConfig, ExperimentKind
from cliffvar.oracle.statevector import mc_average

logger = logging.getLogger(__name__)


def derive_seed(*keys: int) -> int:
    """Stable 32-bit seed from a tuple of integer keys."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


class ExperimentRunner:
    """Runs one configured experiment and exports its result tables."""

    def __init__(self, config: ExperimentConfig, output_dir: Optional[str] = None):
        """
        Initialize experiment runner.

        Args:
            config: Validated experiment configuration
            output_dir: Directory for CSV / JSON output (defaults to config.output or OUTPUT_PATH)
        """
        self.config = config
        self.output_dir = output_dir or config.output or OUTPUT_PATH
        self.distribution = AngleDistribution.from_dict(config.distribution)
        self.rows: List[Dict[str, Any]] = []
        self.detail_rows: List[Dict[str, Any]] = []
        self.summary: Dict[str, Any] = {}
        self.logger = logging.getLogger(__name__)

    def run(self) -> Dict[str, Any]:
        """
        Run the configured experiment.

        Returns:
            Dictionary with the result rows and the summary
        """
        kind = self.config.kind
        handlers = {
            ExperimentKind.VARIANCE_VS_N: self.run_variance_vs_n,
            ExperimentKind.BIAS_VS_K: self.run_bias_var_vs_K,
            ExperimentKind.VAR_VS_K: self.run_bias_var_vs_K,
            ExperimentKind.ARCHITECTURE_SCAN: self.run_architecture_scan,
            ExperimentKind.SINGLE_ESTIMATE: self.run_single_estimate,
        }
        self.logger.info(f"Starting {kind.value} experiment '{self.config.name}' (seed={self.config.seed})")
        start = time.perf_counter()
        try:
            handlers[kind]()
        except KeyboardInterrupt:
            self.logger.warning(f"Interrupted after {len(self.rows)} rows; flushing partial results")
            self.summary["partial"] = True
            self.export_results()
            raise
        self.summary.update({
            "kind": kind.value,
            "name": self.config.name,
            "seed": self.config.seed,
            "rows": len(self.rows),
            "wall_time": time.perf_counter() - start,
        })
        self.logger.info(f"Finished {kind.value} experiment: {len(self.rows)} rows in {self.summary['wall_time']:.1f}s")
        return {"rows": self.rows, "summary": self.summary}

    # ------------------------------------------------------------------
    # Building blocks
    # ------------------------------------------------------------------

    def _architecture(self, n: int, index: int) -> Tuple[int, ParamCircuit, Observable]:
        arch_seed = derive_seed(self.config.seed, n, index)
        rng = np.random.default_rng(arch_seed)
        circuit = random_architecture(n, self.config.template, self.distribution, rng)
        observable = build_observable(self.config.observable, n, rng)
        return arch_seed, circuit, observable

    def _sample_count(self, circuit: ParamCircuit, observable: Observable, quantity: Quantity, k: int) -> int:
        if self.config.samples is not None:
            return self.config.samples
        base = Quantity.SQUARED_GRADIENT if quantity is Quantity.GRADIENT_VARIANCE else quantity
        gamma = quantity_task(circuit, observable, base, k).sampler.gamma
        plan = plan_samples(self.config.epsilon, self.config.delta, max(circuit.num_parameters, 1),
                            observable.norm_bound ** quantity.order, gamma)
        return plan.K

    def _estimate(self, circuit: ParamCircuit, observable: Observable, quantity: Quantity,
                  k: int, seed: int) -> EstimateReport:
        K = self._sample_count(circuit, observable, quantity, k)
        workers = self.config.workers
        if quantity is Quantity.GRADIENT_VARIANCE:
            return estimate_gradient_variance(circuit, observable, k, samples=K, seed=seed, workers=workers)
        return run_task(quantity_task(circuit, observable, quantity, k, seed), K, workers)

    @staticmethod
    def _zero_report(quantity: Quantity, seed: int) -> EstimateReport:
        """Gradient statistics of a parameter-free circuit vanish identically."""
        return EstimateReport(quantity.value, 0.0, 0, 0.0, 1.0, seed, 0.0, EstimationMode.CONVEX.value, quantity.order)

    def _guarded(self, label: str, func, *args):
        try:
            return func(*args)
        except ConfigError:
            raise
        except CliffvarError as e:
            self.logger.error(f"Error in {label}: {e}")
            raise EstimationError(f"{label} failed: {e}") from e

    # ------------------------------------------------------------------
    # Experiments
    # ------------------------------------------------------------------

    def run_variance_vs_n(self) -> None:
        """One estimate per (n, architecture); dense Monte Carlo columns when requested and feasible."""
        quantity = self.config.quantity
        for n in self.config.n_values:
            self.logger.info(f"n={n}: {self.config.architectures} architectures, quantity={quantity.value}")
            for a in range(self.config.architectures):
                self.rows.append(self._guarded(f"n={n} architecture {a}", self._variance_row, n, a))
        self.summary.update(self._variance_summary())

    def _variance_row(self, n: int, index: int) -> Dict[str, Any]:
        arch_seed, circuit, observable = self._architecture(n, index)
        M = circuit.num_parameters
        k = min(self.config.parameter, max(M - 1, 0))
        if M == 0 and quantity_needs_parameter(self.config.quantity):
            report = self._zero_report(self.config.quantity, arch_seed)
        else:
            report = self._estimate(circuit, observable, self.config.quantity, k, arch_seed)
        row = {
            "n": n,
            "architecture": index,
            "arch_seed": arch_seed,
            "parameters": M,
            "parameter": k,
            "quantity": report.quantity,
            "estimate": report.estimate,
            "stderr": report.standard_error,
            "K": report.samples,
            "gamma_total": report.gamma_total,
            "mode": report.mode,
            "seed": report.seed,
            "wall_time": report.wall_time,
        }
        if self.config.dense_draws > 0 and n <= ORACLE_CONFIG["max_qubits"]:
            if M == 0 and quantity_needs_parameter(self.config.quantity):
                dense, dense_se = 0.0, 0.0
            else:
                dense, dense_se = mc_average(circuit, observable, self.config.quantity,
                                             self.config.dense_draws, seed=arch_seed, k=k)
            row["dense_estimate"] = dense
            row["dense_stderr"] = dense_se
        self.logger.debug(f"n={n} arch={index}: {report.estimate:.6g} +/- {report.standard_error:.2g}")
        return row

    def _variance_summary(self) -> Dict[str, Any]:
        frame = pd.DataFrame(self.rows)
        by_n = []
        for n, group in frame.groupby("n", sort=True):
            entry = {
                "n": int(n),
                "architectures": int(len(group)),
                "mean_estimate": float(group["estimate"].mean()),
                "stderr": float(np.sqrt((group["stderr"] ** 2).sum()) / len(group)),
            }
            if "dense_estimate" in group and group["dense_estimate"].notna().any():
                dense = group["dense_estimate"].dropna()
                entry["mean_dense_estimate"] = float(dense.mean())
                entry["dense_stderr"] = float(np.sqrt((group["dense_stderr"].dropna() ** 2).sum()) / len(dense))
            by_n.append(entry)
        fit = fit_log_linear([e["n"] for e in by_n], [e["mean_estimate"] for e in by_n])
        return {"by_n": by_n, "log_linear_fit": fit.to_dict()}

    def run_bias_var_vs_K(self) -> None:
        """Bootstrap protocol: resample K values from a fixed pool of approximant values per architecture."""
        quantity = self.config.quantity
        k_values = sorted(self.config.k_values)
        low, high = EXPERIMENT_DEFAULTS["percentiles"]
        biases = {K: [] for K in k_values}
        variances = {K: [] for K in k_values}
        for n in self.config.n_values:
            self.logger.info(f"n={n}: bootstrap over {self.config.architectures} architectures")
            for a in range(self.config.architectures):
                per_K = self._guarded(f"n={n} architecture {a}", self._bootstrap_architecture, n, a, k_values)
                for K, (bias, variance) in per_K.items():
                    biases[K].append(bias)
                    variances[K].append(variance)
        primary = biases if self.config.kind is ExperimentKind.BIAS_VS_K else variances
        for K in k_values:
            self.rows.append({
                "K": K,
                "squared_bias": float(np.mean(biases[K])),
                "estimator_variance": float(np.mean(variances[K])),
                f"percentile_{low}": float(np.percentile(primary[K], low)),
                f"percentile_{high}": float(np.percentile(primary[K], high)),
                f"bias_percentile_{low}": float(np.percentile(biases[K], low)),
                f"bias_percentile_{high}": float(np.percentile(biases[K], high)),
                f"variance_percentile_{low}": float(np.percentile(variances[K], low)),
                f"variance_percentile_{high}": float(np.percentile(variances[K], high)),
                "architectures": len(biases[K]),
                "quantity": quantity.value,
                "seed": self.config.seed,
            })
        self.summary.update({
            "squared_bias_fit": fit_log_log(k_values, [r["squared_bias"] for r in self.rows]).to_dict(),
            "estimator_variance_fit": fit_log_log(k_values, [r["estimator_variance"] for r in self.rows]).to_dict(),
        })

    def _bootstrap_architecture(self, n: int, index: int, k_values: List[int]) -> Dict[int, Tuple[float, float]]:
        arch_seed, circuit, observable = self._architecture(n, index)
        quantity = self.config.quantity
        M = circuit.num_parameters
        if M == 0 and quantity_needs_parameter(quantity):
            return {K: (0.0, 0.0) for K in k_values}
        k = min(self.config.parameter, max(M - 1, 0))
        pool = sample_values(circuit, observable, quantity, self.config.pool_size, k=k,
                             seed=arch_seed, workers=self.config.workers)
        truth, truth_se = mc_average(circuit, observable, quantity, self.config.truth_draws, seed=arch_seed, k=k)
        self.logger.debug(f"n={n} arch={index}: pool mean {pool.mean():.6g}, dense truth {truth:.6g} +/- {truth_se:.2g}")
        rng = np.random.default_rng(derive_seed(self.config.seed, n, index, 1))
        result = {}
        for K in k_values:
            estimators = bootstrap_estimators(pool, K, self.config.bootstrap_estimators, rng)
            variance = float(estimators.var(ddof=1)) if estimators.size > 1 else 0.0
            result[K] = (float((estimators.mean() - truth) ** 2), variance)
        return result

    def run_architecture_scan(self) -> None:
        """Per-architecture gradient variances of every parameter plus the mean cost."""
        for n in self.config.n_values:
            self.logger.info(f"n={n}: scanning {self.config.architectures} architectures")
            for a in range(self.config.architectures):
                self.rows.append(self._guarded(f"n={n} architecture {a}", self._scan_row, n, a))
        frame = pd.DataFrame(self.rows)
        self.summary.update({
            "mean_variance": float(frame["mean_variance"].mean()),
            "mean_cost": float(frame["mean_cost"].mean()),
            "architectures": int(len(frame)),
        })

    def _scan_row(self, n: int, index: int) -> Dict[str, Any]:
        arch_seed, circuit, observable = self._architecture(n, index)
        M = circuit.num_parameters
        start = time.perf_counter()
        variances = []
        for k in range(M):
            report = self._estimate(circuit, observable, Quantity.GRADIENT_VARIANCE, k,
                                    derive_seed(arch_seed, k))
            variances.append(report.estimate)
            self.detail_rows.append({
                "n": n,
                "architecture": index,
                "arch_seed": arch_seed,
                "parameter": k,
                "variance": report.estimate,
                "stderr": report.standard_error,
                "K": report.samples,
                "gamma_total": report.gamma_total,
                "seed": report.seed,
            })
        cost = self._estimate(circuit, observable, Quantity.COST, 0, arch_seed)
        ordered = sorted(variances, reverse=True)
        return {
            "n": n,
            "architecture": index,
            "arch_seed": arch_seed,
            "parameters": M,
            "mean_variance": float(np.mean(variances)) if variances else 0.0,
            "sorted_variances": ";".join(repr(float(v)) for v in ordered),
            "mean_cost": cost.estimate,
            "mean_cost_stderr": cost.standard_error,
            "K": cost.samples,
            "gamma_total": cost.gamma_total,
            "seed": arch_seed,
            "wall_time": time.perf_counter() - start,
        }

    def run_single_estimate(self) -> None:
        """Evaluate one quantity on a circuit given inline or by path."""
        source = self.config.circuit
        if isinstance(source, str):
            circuit, observable = load_circuit(source)
        else:
            circuit, observable = circuit_from_dict(source)
        if observable is None:
            observable = build_observable(self.config.observable, circuit.n,
                                          np.random.default_rng(self.config.seed))
        quantity = self.config.quantity
        k = self.config.parameter
        if quantity_needs_parameter(quantity) and k >= circuit.num_parameters:
            raise ConfigError(f"parameter {k} out of range for a circuit with {circuit.num_parameters} parameters")
        self.logger.info(f"Single estimate of {quantity.value} on {circuit.describe()}")
        report = self._guarded("single estimate", self._estimate, circuit, observable, quantity, k, self.config.seed)
        row = {"n": circuit.n, "parameters": circuit.num_parameters, "parameter": k, **report.to_dict()}
        if self.config.dense_draws > 0 and circuit.n <= ORACLE_CONFIG["max_qubits"]:
            row["dense_estimate"], row["dense_stderr"] = mc_average(
                circuit, observable, quantity, self.config.dense_draws, seed=self.config.seed, k=k)
        self.rows.append(row)
        self.summary["estimate"] = report.to_dict()

    # ------------------------------------------------------------------
    # Export
    # ------------------------------------------------------------------

    def results_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def export_results(self, format: str = "csv") -> Dict[str, str]:
        """
        Write result tables and summary to the output directory.

        Args:
            format: Table format ('csv', 'json')

        Returns:
            Mapping of artifact name to written path
        """
        os.makedirs(self.output_dir, exist_ok=True)
        kind = self.config.kind.value
        paths = {}
        if format == "csv":
            paths["table"] = os.path.join(self.output_dir, f"{kind}.csv")
            self.results_frame().to_csv(paths["table"], index=False)
            if self.detail_rows:
                paths["parameters"] = os.path.join(self.output_dir, f"{kind}_parameters.csv")
                pd.DataFrame(self.detail_rows).to_csv(paths["parameters"], index=False)
        elif format == "json":
            paths["table"] = os.path.join(self.output_dir, f"{kind}.json")
            with open(paths["table"], "w") as f:
                json.dump(self.rows, f, indent=2, default=str)
        else:
            raise ValueError(f"Unsupported format: {format}")
        paths["summary"] = os.path.join(self.output_dir, "summary.json")
        with open(paths["summary"], "w") as f:
            json.dump({"config": self.config.to_dict(), **self.summary}, f, indent=2, default=str)
        self.logger.info(f"Exported {len(self.rows)} rows to {self.output_dir}")
        return paths


def quantity_needs_parameter(quantity: Quantity) -> bool:
    return quantity in (Quantity.GRADIENT, Quantity.SQUARED_GRADIENT, Quantity.GRADIENT_VARIANCE)


def run_experiment(config: ExperimentConfig, output_dir: Optional[str] = None) -> Dict[str, str]:
    """Run an experiment and export its results; returns the written paths."""
    runner = ExperimentRunner(config, output_dir)
    runner.run()
    return runner.export_results()
