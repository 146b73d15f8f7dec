"""
Clifford-approximant estimators of first- and second-order circuit statistics.

Each sample draws one replacement term per parameter, evaluates every
shifted variant of the circuit on the same draw and contributes
gamma * sign * sum_v w_v <O>_v. Samples are seeded from
(seed, stream, index) so results do not depend on worker count.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from cliffvar.circuits.model import ParamCircuit
from cliffvar.circuits.observables import Observable
from cliffvar.circuits.rewrites import (
    Shift,
    apply_parameter_shift,
    canonicalize_with_observable,
    double_circuit,
    extract_symmetry_center,
)
from cliffvar.config import ESTIMATOR_CONFIG
from cliffvar.errors import EstimationError
from cliffvar.estimation.planning import EstimationMode, SamplePlan
from cliffvar.estimation.quantities import Quantity, first_order_terms, second_order_terms
from cliffvar.estimation.sampling import ApproximantSampler, site_mixtures
from cliffvar.estimation.statistics import batch_bounds, summarize_batches
from cliffvar.stabilizer.tableau import run_circuit

logger = logging.getLogger(__name__)

# RNG stream tags keep the draws of combined estimates independent
STREAM_FIRST_ORDER = 1
STREAM_SECOND_ORDER = 2


@dataclass
class EstimateReport:
    """Point estimate of one quantity with its sampling metadata."""
    quantity: str
    estimate: float
    samples: int
    standard_error: float
    gamma_total: float
    seed: int
    wall_time: float
    mode: str
    order: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def prepare_circuit(circuit: ParamCircuit, observable: Observable) -> Tuple[ParamCircuit, Observable]:
    """Canonicalize to Z rotations and factor out Clifford symmetry centers."""
    if observable.n != circuit.n:
        raise EstimationError(f"Observable on {observable.n} qubits, circuit has {circuit.n}")
    circuit, observable = canonicalize_with_observable(circuit, observable)
    return extract_symmetry_center(circuit), observable


@dataclass
class EstimationTask:
    """Everything a worker needs to evaluate samples of one quantity."""
    label: str
    sampler: ApproximantSampler
    variants: Tuple[Tuple[ParamCircuit, float], ...]
    observable: Observable
    seed: int
    stream: int

    @property
    def order(self) -> int:
        return self.sampler.order

    @property
    def mode(self) -> EstimationMode:
        return EstimationMode.CONVEX if self.sampler.is_convex else EstimationMode.QUASIPROBABILITY

    def combined_value(self, choices) -> float:
        """sum_v w_v <O> on the approximant fixed by choices."""
        total = 0.0
        for circuit, weight in self.variants:
            tableau = run_circuit(self.sampler.assemble(circuit, choices), circuit.n)
            total += weight * self.observable.expectation(tableau)
        return total

    def sample_value(self, index: int) -> float:
        rng = np.random.default_rng([self.seed, self.stream, index])
        choices = self.sampler.draw_indices(rng)
        return self.sampler.gamma * self.sampler.sign(choices) * self.combined_value(choices)

    def evaluate_range(self, start: int, stop: int) -> np.ndarray:
        return np.array([self.sample_value(i) for i in range(start, stop)])


def _evaluate_range(task: EstimationTask, start: int, stop: int) -> np.ndarray:
    return task.evaluate_range(start, stop)


def first_order_task(circuit: ParamCircuit, observable: Observable,
                     terms: Sequence[Tuple[Optional[Shift], float]], seed: int = 0,
                     label: str = "first_order") -> EstimationTask:
    circuit, observable = prepare_circuit(circuit, observable)
    variants = tuple(
        (circuit if shift is None else apply_parameter_shift(circuit, *shift), weight)
        for shift, weight in terms
    )
    sampler = ApproximantSampler(circuit, 1, site_mixtures(circuit, 1))
    return EstimationTask(label, sampler, variants, observable, seed, STREAM_FIRST_ORDER)


def second_order_task(circuit: ParamCircuit, observable: Observable,
                      terms: Sequence[Tuple[Optional[Shift], Optional[Shift], float]], seed: int = 0,
                      label: str = "second_order") -> EstimationTask:
    circuit, observable = prepare_circuit(circuit, observable)
    doubled = double_circuit(circuit)
    variants = tuple((double_circuit(circuit, a, b), weight) for a, b, weight in terms)
    sampler = ApproximantSampler(doubled, 2, site_mixtures(doubled, 2))
    return EstimationTask(label, sampler, variants, observable.tensor_square(), seed, STREAM_SECOND_ORDER)


def quantity_task(circuit: ParamCircuit, observable: Observable, quantity: Quantity,
                  k: int = 0, seed: int = 0) -> EstimationTask:
    if quantity is Quantity.GRADIENT_VARIANCE:
        raise EstimationError("Gradient variance combines two tasks; use estimate_gradient_variance")
    if quantity.order == 1:
        return first_order_task(circuit, observable, first_order_terms(quantity, k), seed, quantity.value)
    return second_order_task(circuit, observable, second_order_terms(quantity, k), seed, quantity.value)


def _resolve_samples(plan: Optional[SamplePlan], samples: Optional[int]) -> int:
    K = plan.K if plan is not None else samples
    if K is None:
        raise EstimationError("Provide either a sample plan or a sample count")
    if K < 1:
        raise EstimationError(f"Sample count must be at least 1, got {K}")
    return int(K)


def collect_batches(task: EstimationTask, samples: int, workers: Optional[int] = None) -> List[np.ndarray]:
    """Per-batch sample values in batch order."""
    bounds = batch_bounds(samples)
    workers = ESTIMATOR_CONFIG["workers"] if workers is None else workers
    if workers <= 1 or len(bounds) == 1:
        return [task.evaluate_range(a, b) for a, b in bounds]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(
            _evaluate_range, [task] * len(bounds), [a for a, _ in bounds], [b for _, b in bounds]
        ))


def run_task(task: EstimationTask, samples: int, workers: Optional[int] = None) -> EstimateReport:
    start = time.perf_counter()
    if task.mode is EstimationMode.QUASIPROBABILITY:
        logger.warning(f"{task.label}: nonconvex mixtures, sampling with gamma={task.sampler.gamma:.4f}")
    summary = summarize_batches(collect_batches(task, samples, workers))
    report = EstimateReport(
        quantity=task.label,
        estimate=summary.mean,
        samples=summary.count,
        standard_error=summary.standard_error,
        gamma_total=task.sampler.gamma,
        seed=task.seed,
        wall_time=time.perf_counter() - start,
        mode=task.mode.value,
        order=task.order,
    )
    logger.debug(f"{task.label}: {report.estimate:.6g} +/- {report.standard_error:.2g} (K={samples})")
    return report


def estimate_first_order(circuit: ParamCircuit, observable: Observable, shift: Optional[Shift] = None,
                         plan: Optional[SamplePlan] = None, samples: Optional[int] = None,
                         seed: int = 0, workers: Optional[int] = None) -> EstimateReport:
    """Estimate E[C(theta)], or E[C(theta +/- pi/2 e_k)] when shift = (k, +/-1)."""
    K = _resolve_samples(plan, samples)
    label = "cost" if shift is None else f"cost_shift_{shift[0]}_{'+' if shift[1] > 0 else '-'}"
    return run_task(first_order_task(circuit, observable, [(shift, 1.0)], seed, label), K, workers)


def estimate_second_order(circuit: ParamCircuit, observable: Observable,
                          shifts: Optional[Tuple[Optional[Shift], Optional[Shift]]] = None,
                          plan: Optional[SamplePlan] = None, samples: Optional[int] = None,
                          seed: int = 0, workers: Optional[int] = None) -> EstimateReport:
    """Estimate E[C(theta + a1 e_k) C(theta + a2 e_k)] (E[C^2] without shifts)."""
    K = _resolve_samples(plan, samples)
    shift_a, shift_b = shifts if shifts is not None else (None, None)
    label = "cost_squared" if shifts is None else "cost_product"
    return run_task(second_order_task(circuit, observable, [(shift_a, shift_b, 1.0)], seed, label), K, workers)


def estimate_gradient(circuit: ParamCircuit, observable: Observable, k: int,
                      plan: Optional[SamplePlan] = None, samples: Optional[int] = None,
                      seed: int = 0, workers: Optional[int] = None) -> EstimateReport:
    """Estimate E[d_k C] from shared draws of the +/- shifted circuits."""
    K = _resolve_samples(plan, samples)
    return run_task(quantity_task(circuit, observable, Quantity.GRADIENT, k, seed), K, workers)


def estimate_squared_gradient(circuit: ParamCircuit, observable: Observable, k: int,
                              plan: Optional[SamplePlan] = None, samples: Optional[int] = None,
                              seed: int = 0, workers: Optional[int] = None) -> EstimateReport:
    """Estimate E[(d_k C)^2] as (C++ - 2 C+- + C--) / 4 on shared doubled draws."""
    K = _resolve_samples(plan, samples)
    return run_task(quantity_task(circuit, observable, Quantity.SQUARED_GRADIENT, k, seed), K, workers)


def estimate_gradient_variance(circuit: ParamCircuit, observable: Observable, k: int,
                               plan: Optional[SamplePlan] = None, samples: Optional[int] = None,
                               seed: int = 0, workers: Optional[int] = None) -> EstimateReport:
    """Var[d_k C] = E[(d_k C)^2] - E[d_k C]^2, reported unclamped."""
    K = _resolve_samples(plan, samples)
    squared = estimate_squared_gradient(circuit, observable, k, samples=K, seed=seed, workers=workers)
    gradient = estimate_gradient(circuit, observable, k, samples=K, seed=seed, workers=workers)
    variance = squared.estimate - gradient.estimate ** 2
    error = float(np.hypot(squared.standard_error, 2 * gradient.estimate * gradient.standard_error))
    if variance < 0:
        logger.warning(f"Negative gradient variance estimate {variance:.3g} for parameter {k}")
    return EstimateReport(
        quantity=Quantity.GRADIENT_VARIANCE.value,
        estimate=variance,
        samples=K,
        standard_error=error,
        gamma_total=squared.gamma_total,
        seed=seed,
        wall_time=squared.wall_time + gradient.wall_time,
        mode=EstimationMode.CONVEX.value if squared.mode == gradient.mode == EstimationMode.CONVEX.value
        else EstimationMode.QUASIPROBABILITY.value,
        order=2,
    )


def sample_values(circuit: ParamCircuit, observable: Observable, quantity: Quantity, samples: int,
                  k: int = 0, seed: int = 0, workers: Optional[int] = None) -> np.ndarray:
    """Per-sample estimator values (their mean is the estimate)."""
    task = quantity_task(circuit, observable, quantity, k, seed)
    return np.concatenate(collect_batches(task, samples, workers))


def exact_task_value(task: EstimationTask) -> float:
    """Weighted sum over every approximant instead of sampling."""
    counts = task.sampler.term_counts
    total = int(np.prod(counts, dtype=object)) if counts else 1
    limit = ESTIMATOR_CONFIG["enumeration_limit"]
    if total > limit:
        raise EstimationError(f"Enumeration of {total} approximants exceeds limit {limit}")
    value = 0.0
    for choices in product(*[range(m) for m in counts]):
        value += task.sampler.weight(choices) * task.combined_value(choices)
    return value


def enumerate_exact(circuit: ParamCircuit, observable: Observable, order: int = 1,
                    shift: Optional[Shift] = None,
                    shifts: Optional[Tuple[Optional[Shift], Optional[Shift]]] = None) -> float:
    """Exact first-order (optionally shifted) or second-order value by full enumeration."""
    if order == 1:
        if shifts is not None:
            raise EstimationError("First-order enumeration takes a single shift")
        return exact_task_value(first_order_task(circuit, observable, [(shift, 1.0)]))
    if order == 2:
        if shift is not None:
            raise EstimationError("Second-order enumeration takes a pair of shifts")
        shift_a, shift_b = shifts if shifts is not None else (None, None)
        return exact_task_value(second_order_task(circuit, observable, [(shift_a, shift_b, 1.0)]))
    raise EstimationError(f"Order must be 1 or 2, got {order}")


def exact_quantity(circuit: ParamCircuit, observable: Observable, quantity: Quantity, k: int = 0) -> float:
    """Enumerated value of a named quantity (variance included)."""
    if quantity is Quantity.GRADIENT_VARIANCE:
        squared = exact_quantity(circuit, observable, Quantity.SQUARED_GRADIENT, k)
        gradient = exact_quantity(circuit, observable, Quantity.GRADIENT, k)
        return squared - gradient ** 2
    return exact_task_value(quantity_task(circuit, observable, quantity, k))
