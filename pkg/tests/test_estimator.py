"""
Tests for the Clifford-approximant estimators, sample planning and statistics.
"""
import math

import numpy as np
import pytest

from cliffvar.channels.decomposition import one_fold
from cliffvar.channels.distributions import DiracMixture, GaussianDistribution, UniformDistribution
from cliffvar.circuits.gates import CliffordGate, GateKind, PauliAxis
from cliffvar.circuits.model import CircuitBuilder
from cliffvar.circuits.observables import PauliSum, ZeroProjector
from cliffvar.circuits.rewrites import double_circuit
from cliffvar.config import ESTIMATOR_CONFIG
from cliffvar.errors import EstimationError
from cliffvar.estimation.estimator import (
    enumerate_exact,
    estimate_first_order,
    estimate_gradient,
    estimate_gradient_variance,
    estimate_second_order,
    estimate_squared_gradient,
    exact_quantity,
    prepare_circuit,
    quantity_task,
    run_task,
    sample_values,
)
from cliffvar.estimation.planning import EstimationMode, plan_samples
from cliffvar.estimation.quantities import Quantity, first_order_terms, second_order_terms
from cliffvar.estimation.sampling import ApproximantSampler, draw_approximant, site_mixtures
from cliffvar.estimation.statistics import (
    batch_bounds,
    bootstrap_estimators,
    fit_log_linear,
    fit_log_log,
    summarize_batches,
)
from cliffvar.oracle.statevector import evaluate_cost, quadrature_average

SKEWED = DiracMixture(((0.3, 0.5), (1.1, 0.3), (-0.7, 0.2)))
SYMMETRIC = DiracMixture.symmetric([math.pi / 3])


@pytest.fixture
def two_qubit_circuit():
    """RX on q0, RY on q1, then CZ under uniform angles."""
    builder = CircuitBuilder(2)
    builder.add_rotation(0, PauliAxis.X).add_rotation(1, PauliAxis.Y)
    builder.add_gate(GateKind.CZ, 0, 1)
    return builder.build()


@pytest.fixture
def mixed_circuit():
    """Three parameters under a skewed and a +/- pi/3 law, with entanglers between."""
    builder = CircuitBuilder(3, {"default": SKEWED, "even": SYMMETRIC})
    builder.add_rotation(0, PauliAxis.X)
    builder.add_rotation(1, PauliAxis.Y, "even")
    builder.add_gate(GateKind.CZ, 0, 1).add_gate(GateKind.H, 2)
    builder.add_rotation(2, PauliAxis.Z)
    builder.add_gate(GateKind.CNOT, 2, 0)
    return builder.build()


MIXED_OBSERVABLE = PauliSum.from_labels((1.0, "ZZI"), (0.5, "XIX"))


class TestQuantities:
    """Shift-rule term tables."""

    def test_first_order_terms(self):
        """Gradient is (C+ - C-) / 2."""
        assert first_order_terms(Quantity.COST) == [(None, 1.0)]
        assert first_order_terms(Quantity.GRADIENT, 3) == [((3, 1), 0.5), ((3, -1), -0.5)]

    def test_second_order_terms(self):
        """Squared gradient weights sum to zero."""
        terms = second_order_terms(Quantity.SQUARED_GRADIENT, 1)
        assert sum(w for _, _, w in terms) == pytest.approx(0.0)
        with pytest.raises(ValueError):
            second_order_terms(Quantity.GRADIENT)

    def test_orders(self):
        assert Quantity.GRADIENT.order == 1
        assert Quantity.GRADIENT_VARIANCE.order == 2


class TestExactEnumeration:
    """Enumerating every approximant reproduces the exact averages."""

    def test_uniform_closed_forms(self, two_qubit_circuit):
        """E[C] = 1/4, E[C^2] = 9/64, E[(d_0 C)^2] = Var[d_0 C] = 3/64."""
        obs = ZeroProjector.full(2)
        assert exact_quantity(two_qubit_circuit, obs, Quantity.COST) == pytest.approx(0.25)
        assert exact_quantity(two_qubit_circuit, obs, Quantity.COST_SQUARED) == pytest.approx(9 / 64)
        assert exact_quantity(two_qubit_circuit, obs, Quantity.SQUARED_GRADIENT, 0) == pytest.approx(3 / 64)
        assert exact_quantity(two_qubit_circuit, obs, Quantity.GRADIENT_VARIANCE, 0) == pytest.approx(3 / 64)

    @pytest.mark.parametrize("quantity,k", [
        (Quantity.COST, 0), (Quantity.GRADIENT, 1), (Quantity.COST_SQUARED, 0),
        (Quantity.SQUARED_GRADIENT, 0), (Quantity.SQUARED_GRADIENT, 2), (Quantity.GRADIENT_VARIANCE, 1),
    ])
    def test_matches_dense_on_atoms(self, mixed_circuit, quantity, k):
        """Skewed and nonconvex laws agree with the dense average over atoms."""
        expected = quadrature_average(mixed_circuit, MIXED_OBSERVABLE, quantity, k=k)
        assert exact_quantity(mixed_circuit, MIXED_OBSERVABLE, quantity, k) == pytest.approx(expected, abs=1e-10)

    def test_gaussian_with_clifford_center(self):
        """Gaussians centered at pi are handled through a Z center gate."""
        dist = GaussianDistribution(math.pi, 0.4)
        builder = CircuitBuilder(2, {"default": dist})
        builder.add_rotation(0, PauliAxis.X).add_gate(GateKind.CNOT, 0, 1).add_rotation(1, PauliAxis.Y)
        circuit = builder.build()
        obs = PauliSum.from_labels((1.0, "ZZ"), (0.3, "IX"))
        for quantity in (Quantity.COST, Quantity.SQUARED_GRADIENT):
            expected = quadrature_average(circuit, obs, quantity, 30, k=1)
            assert exact_quantity(circuit, obs, quantity, 1) == pytest.approx(expected, abs=1e-8)

    def test_shifted_point_mass(self):
        """A point mass at pi/3: C+ = -sin(pi/3) and C+ C- = -3/4."""
        circuit = CircuitBuilder(1, {"default": DiracMixture.point(math.pi / 3)}).add_rotation(0, PauliAxis.X).build()
        z = PauliSum.from_labels((1.0, "Z"))
        assert enumerate_exact(circuit, z, 1, shift=(0, 1)) == pytest.approx(-math.sqrt(3) / 2)
        assert enumerate_exact(circuit, z, 2, shifts=((0, 1), (0, -1))) == pytest.approx(-0.75)

    def test_argument_errors(self, two_qubit_circuit, monkeypatch):
        """Bad orders, shift shapes and oversized enumerations raise EstimationError."""
        obs = ZeroProjector.full(2)
        with pytest.raises(EstimationError):
            enumerate_exact(two_qubit_circuit, obs, 3)
        with pytest.raises(EstimationError):
            enumerate_exact(two_qubit_circuit, obs, 1, shifts=((0, 1), None))
        with pytest.raises(EstimationError):
            enumerate_exact(two_qubit_circuit, obs, 2, shift=(0, 1))
        monkeypatch.setitem(ESTIMATOR_CONFIG, "enumeration_limit", 2)
        with pytest.raises(EstimationError):
            enumerate_exact(two_qubit_circuit, obs, 1)


class TestSampledEstimates:
    """Monte Carlo estimates over sampled approximants."""

    def test_squared_gradient_within_error(self, two_qubit_circuit):
        """Sampled E[(d_0 C)^2] lies within four standard errors of 3/64."""
        report = estimate_squared_gradient(two_qubit_circuit, ZeroProjector.full(2), 0, samples=3000, seed=1)
        assert report.mode == EstimationMode.CONVEX.value
        assert report.gamma_total == pytest.approx(1.0)
        assert report.samples == 3000
        assert report.order == 2
        assert abs(report.estimate - 3 / 64) < 4 * report.standard_error

    def test_quasiprobability_estimate(self, mixed_circuit):
        """Nonconvex sites switch to signed sampling and stay unbiased."""
        expected = exact_quantity(mixed_circuit, MIXED_OBSERVABLE, Quantity.COST_SQUARED)
        report = estimate_second_order(mixed_circuit, MIXED_OBSERVABLE, samples=4000, seed=2)
        assert report.mode == EstimationMode.QUASIPROBABILITY.value
        assert report.gamma_total > 1
        assert abs(report.estimate - expected) < 4 * report.standard_error

    def test_first_order_with_shift(self, mixed_circuit):
        """Shifted cost estimate tracks the enumerated value."""
        expected = enumerate_exact(mixed_circuit, MIXED_OBSERVABLE, 1, shift=(2, -1))
        report = estimate_first_order(mixed_circuit, MIXED_OBSERVABLE, shift=(2, -1), samples=2000, seed=4)
        assert report.quantity == "cost_shift_2_-"
        assert abs(report.estimate - expected) < 4 * report.standard_error + 1e-12

    def test_gradient_variance_report(self, two_qubit_circuit):
        """Variance combines the squared gradient and gradient estimates."""
        report = estimate_gradient_variance(two_qubit_circuit, ZeroProjector.full(2), 0, samples=2000, seed=9)
        assert report.quantity == Quantity.GRADIENT_VARIANCE.value
        assert report.samples == 2000
        assert abs(report.estimate - 3 / 64) < 4 * report.standard_error + 1e-3

    def test_seed_reproducibility(self, two_qubit_circuit):
        """Equal seeds give identical estimates; different seeds do not."""
        obs = ZeroProjector.full(2)
        a = estimate_squared_gradient(two_qubit_circuit, obs, 0, samples=300, seed=8)
        b = estimate_squared_gradient(two_qubit_circuit, obs, 0, samples=300, seed=8)
        assert a.estimate == b.estimate
        first = sample_values(two_qubit_circuit, obs, Quantity.COST, 300, seed=8)
        second = sample_values(two_qubit_circuit, obs, Quantity.COST, 300, seed=9)
        assert not np.array_equal(first, second)

    def test_gradient_is_exactly_zero_under_uniform_law(self, two_qubit_circuit):
        """Uniform angles make C+ and C- equal on every approximant."""
        report = estimate_gradient(two_qubit_circuit, ZeroProjector.full(2), 0, samples=200, seed=8)
        assert report.estimate == 0.0
        assert report.standard_error == 0.0

    def test_worker_count_does_not_change_result(self, mixed_circuit):
        """Per-sample seeding makes the estimate independent of parallelism."""
        serial = estimate_squared_gradient(mixed_circuit, MIXED_OBSERVABLE, 0, samples=200, seed=3, workers=1)
        parallel = estimate_squared_gradient(mixed_circuit, MIXED_OBSERVABLE, 0, samples=200, seed=3, workers=2)
        assert serial.estimate == parallel.estimate
        assert serial.standard_error == parallel.standard_error

    def test_sample_values_average(self, two_qubit_circuit):
        """The estimate is the mean of the per-sample values."""
        obs = ZeroProjector.full(2)
        values = sample_values(two_qubit_circuit, obs, Quantity.COST, 150, seed=6)
        report = run_task(quantity_task(two_qubit_circuit, obs, Quantity.COST, seed=6), 150)
        assert values.shape == (150,)
        assert report.estimate == pytest.approx(values.mean())

    def test_parameter_free_circuit(self):
        """M = 0: every sample is the exact Clifford value."""
        circuit = CircuitBuilder(2).add_gate(GateKind.H, 0).build()
        report = estimate_first_order(circuit, ZeroProjector.full(2), samples=10)
        assert report.estimate == pytest.approx(0.5)
        assert report.standard_error == 0.0
        assert report.gamma_total == 1.0

    def test_errors(self, two_qubit_circuit):
        """Missing sample counts, mismatched observables and variance tasks are refused."""
        obs = ZeroProjector.full(2)
        with pytest.raises(EstimationError):
            estimate_gradient(two_qubit_circuit, obs, 0)
        with pytest.raises(EstimationError):
            estimate_gradient(two_qubit_circuit, obs, 0, samples=0)
        with pytest.raises(EstimationError):
            prepare_circuit(two_qubit_circuit, ZeroProjector.full(3))
        with pytest.raises(EstimationError):
            quantity_task(two_qubit_circuit, obs, Quantity.GRADIENT_VARIANCE)

    def test_point_mass_at_zero_is_deterministic(self):
        """A point mass at 0 on every site: no gradient variance and E[C^2] = C(0)^2."""
        builder = CircuitBuilder(2, {"default": DiracMixture.point(0.0)})
        builder.add_rotation(0, PauliAxis.X).add_rotation(1, PauliAxis.Y)
        builder.add_gate(GateKind.CZ, 0, 1).add_gate(GateKind.H, 0)
        circuit = builder.build()
        obs = PauliSum.from_labels((1.0, "ZZ"), (0.5, "XI"), (-0.25, "IY"))
        variance = estimate_gradient_variance(circuit, obs, 0, samples=50, seed=4)
        assert abs(variance.estimate) <= 1e-12
        assert variance.gamma_total == 1.0
        second = estimate_second_order(circuit, obs, samples=50, seed=4)
        assert second.estimate == pytest.approx(evaluate_cost(circuit, obs, np.zeros(2)) ** 2, abs=1e-12)
        assert second.standard_error <= 1e-12
        plus = evaluate_cost(circuit, obs, np.array([math.pi / 2, 0.0]))
        minus = evaluate_cost(circuit, obs, np.array([-math.pi / 2, 0.0]))
        gradient = estimate_gradient(circuit, obs, 0, samples=50, seed=4)
        assert gradient.estimate == pytest.approx((plus - minus) / 2, abs=1e-12)

    def test_plan_drives_sample_count(self, two_qubit_circuit):
        """A SamplePlan fixes K."""
        plan = plan_samples(0.5, 0.2, two_qubit_circuit.num_parameters, 1.0)
        report = estimate_first_order(two_qubit_circuit, ZeroProjector.full(2), plan=plan)
        assert report.samples == plan.K


class TestDrawApproximant:
    """Single draws of Clifford approximants."""

    def test_uniform_rotations_become_identity_or_z(self):
        """Uniform angles give I or Z with equal odds and a positive sign."""
        circuit = CircuitBuilder(2).add_gate(GateKind.H, 0).add_rotation(0).add_rotation(1).build()
        mixtures = site_mixtures(circuit, 1)
        rng = np.random.default_rng(11)
        z_on_first = 0
        for _ in range(400):
            approximant = draw_approximant(circuit, 1, mixtures, rng)
            assert approximant.sign == 1
            assert approximant.n == 2
            assert approximant.gates[0] == CliffordGate(GateKind.H, 0)
            assert all(g.kind is GateKind.Z for g in approximant.gates[1:])
            z_on_first += any(g.target == 0 for g in approximant.gates[1:])
        assert abs(z_on_first / 400 - 0.5) < 0.1

    def test_point_mass_at_zero_deletes_rotations(self):
        circuit = (CircuitBuilder(1, {"default": DiracMixture.point(0.0)})
                   .add_gate(GateKind.S, 0).add_rotation(0).build())
        approximant = draw_approximant(circuit, 1, site_mixtures(circuit, 1), np.random.default_rng(0))
        assert approximant.gates == [CliffordGate(GateKind.S, 0)]
        assert approximant.sign == 1

    def test_negative_branch_of_even_two_fold(self):
        """The Z(x)Z term is the only negative one and is drawn with probability 1/10."""
        circuit = CircuitBuilder(1, {"default": SYMMETRIC}).add_rotation(0).build()
        doubled = double_circuit(circuit)
        mixtures = site_mixtures(doubled, 2)
        assert mixtures[0].gamma == pytest.approx(1.25, abs=1e-12)
        rng = np.random.default_rng(5)
        negative = 0
        for _ in range(2000):
            approximant = draw_approximant(doubled, 2, mixtures, rng)
            has_z = any(g.kind is GateKind.Z for g in approximant.gates)
            assert (approximant.sign == -1) == has_z
            negative += has_z
        assert abs(negative / 2000 - 0.1) < 0.03

    def test_order_mismatch(self):
        circuit = CircuitBuilder(1).add_rotation(0).build()
        with pytest.raises(EstimationError):
            draw_approximant(circuit, 2, site_mixtures(circuit, 1), np.random.default_rng(0))
        doubled = double_circuit(circuit)
        with pytest.raises(EstimationError):
            draw_approximant(doubled, 2, site_mixtures(doubled, 1), np.random.default_rng(0))

    def test_rejects_non_canonical_circuit(self):
        circuit = CircuitBuilder(1).add_rotation(0, PauliAxis.X).build()
        with pytest.raises(EstimationError):
            ApproximantSampler(circuit, 1, {0: one_fold(UniformDistribution())})


class TestPlanning:
    """Concentration-bound sample counts."""

    def test_reference_value(self):
        """eps = 0.2, delta = 0.1, M = 6, ||O|| = 1 gives K = 899."""
        plan = plan_samples(0.2, 0.1, 6, 1.0)
        assert plan.K == 899
        assert plan.mode is EstimationMode.CONVEX

    def test_gamma_and_norm_scale_k(self):
        """K grows with gamma and the squared observable norm."""
        base = plan_samples(0.2, 0.1, 6, 1.0).K
        assert plan_samples(0.2, 0.1, 6, 1.0, gamma_total=1.25).mode is EstimationMode.QUASIPROBABILITY
        assert plan_samples(0.2, 0.1, 6, 1.0, gamma_total=1.25).K > base
        assert plan_samples(0.2, 0.1, 6, 2.0).K == math.ceil(50 * math.log(20) * 6 * 4)

    @pytest.mark.parametrize("args", [
        (0.0, 0.1, 6, 1.0), (0.2, 1.0, 6, 1.0), (0.2, 0.0, 6, 1.0), (0.2, 0.1, 0, 1.0), (0.2, 0.1, 6, 0.0),
    ])
    def test_invalid_inputs(self, args):
        with pytest.raises(EstimationError):
            plan_samples(*args)

    def test_gamma_below_one(self):
        with pytest.raises(EstimationError):
            plan_samples(0.2, 0.1, 6, 1.0, gamma_total=0.5)


class TestStatistics:
    """Batch means, bootstrap and scaling fits."""

    def test_batch_bounds_partition(self):
        """Batches cover every sample once, in order."""
        bounds = batch_bounds(250)
        assert len(bounds) == 100
        assert bounds[0][0] == 0 and bounds[-1][1] == 250
        assert all(a[1] == b[0] for a, b in zip(bounds, bounds[1:]))
        assert len(batch_bounds(7)) == 7
        with pytest.raises(EstimationError):
            batch_bounds(0)

    def test_summarize_batches(self):
        """Mean over all values; SE from batch means."""
        summary = summarize_batches([np.array([1.0, 3.0]), np.array([5.0, 7.0])])
        assert summary.count == 4
        assert summary.mean == 4.0
        assert summary.standard_error == pytest.approx(np.std([2.0, 6.0], ddof=1) / math.sqrt(2))
        assert summarize_batches([np.array([2.0])]).standard_error == 0.0

    def test_bootstrap(self, rng):
        """Resampled means have the right shape and concentrate on the pool mean."""
        pool = rng.normal(1.0, 1.0, 500)
        estimates = bootstrap_estimators(pool, 400, 50, rng)
        assert estimates.shape == (50,)
        assert abs(estimates.mean() - pool.mean()) < 0.1
        with pytest.raises(EstimationError):
            bootstrap_estimators(np.array([]), 10, 5, rng)

    def test_log_linear_fit(self):
        """Exponential decay gives the exact rate."""
        x = np.arange(2, 8)
        fit = fit_log_linear(x, 0.3 * np.exp(-0.7 * x))
        assert fit.slope == pytest.approx(-0.7)
        assert fit.r_squared == pytest.approx(1.0)

    def test_log_log_fit_skips_nonpositive(self):
        """Power laws are fitted over positive points only."""
        fit = fit_log_log([10, 20, 40, 80, 160], [0.3, 0.15, 0.075, -1.0, 0.01875])
        assert fit.slope == pytest.approx(-1.0)
        assert fit.points == 4

    def test_degenerate_fit(self):
        """Fewer than two usable points give NaN coefficients."""
        assert math.isnan(fit_log_log([1.0], [1.0]).slope)
