"""
Clifford-mixture decompositions of averaged Z-rotation channels.

The t-fold channel of R_Z(theta) = exp(-i theta Z / 2), averaged over the
angle law, is written as a signed combination of Clifford conjugations
sum_j q_j U_j (.) U_j^dag. Weights depend only on r_t, s_t.
"""
import logging
import math
from dataclasses import dataclass
from itertools import product
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from cliffvar.channels.distributions import AngleDistribution, lambda_expectations
from cliffvar.circuits.gates import GateKind, SINGLE_QUBIT_MATRICES
from cliffvar.config import ESTIMATOR_CONFIG
from cliffvar.errors import DecompositionError

logger = logging.getLogger(__name__)

# Multi-index positions of the N-fold table: (I, Z, Sdg, S)
N_FOLD_GATES: Tuple[GateKind, ...] = (GateKind.I, GateKind.Z, GateKind.SDG, GateKind.S)


@dataclass(frozen=True)
class MixtureTerm:
    """Weight and replacement gates; gates[c] acts on the site of copy c."""
    weight: float
    gates: Tuple[GateKind, ...]

    @property
    def label(self) -> str:
        return "(x)".join(g.value for g in self.gates)


@dataclass(frozen=True)
class CliffordMixture:
    """Signed Clifford mixture for the 1-fold or 2-fold channel of one rotation."""
    order: int
    terms: Tuple[MixtureTerm, ...]

    def __post_init__(self):
        if self.order not in (1, 2):
            raise DecompositionError(f"Mixture order must be 1 or 2, got {self.order}")
        if not self.terms:
            raise DecompositionError("Mixture has no terms")
        if any(len(t.gates) != self.order for t in self.terms):
            raise DecompositionError(f"Order-{self.order} mixture with mismatched replacement arity")

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms])

    @property
    def is_convex(self) -> bool:
        return bool((self.weights >= 0).all())

    @property
    def gamma(self) -> float:
        return float(np.abs(self.weights).sum())

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.weights) / self.gamma

    @property
    def signs(self) -> np.ndarray:
        return np.where(self.weights < 0, -1, 1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "gamma": self.gamma,
            "is_convex": self.is_convex,
            "terms": [{"gates": [g.value for g in t.gates], "weight": t.weight} for t in self.terms],
        }


def _build_mixture(order: int, raw: Sequence[Tuple[float, Tuple[GateKind, ...]]]) -> CliffordMixture:
    clamp = ESTIMATOR_CONFIG["negative_weight_clamp"]
    terms = []
    for weight, gates in raw:
        if -clamp <= weight < 0:
            weight = 0.0
        if weight != 0.0:
            terms.append(MixtureTerm(float(weight), tuple(gates)))
    mixture = CliffordMixture(order, tuple(terms))
    total = float(mixture.weights.sum())
    if abs(total - 1.0) > 1e-12:
        raise DecompositionError(f"Mixture weights sum to {total}, expected 1")
    return mixture


def one_fold(dist: AngleDistribution) -> CliffordMixture:
    """1-fold channel of a (recentered) rotation as a mixture of I, Z, S, Sdg."""
    r1, s1 = dist.moment(1)
    return _build_mixture(1, [
        ((1 + r1) / 2, (GateKind.I,)),
        ((1 - r1) / 2, (GateKind.Z,)),
        (s1 / 2, (GateKind.S,)),
        (-s1 / 2, (GateKind.SDG,)),
    ])


def two_fold(dist: AngleDistribution) -> CliffordMixture:
    """2-fold channel as a mixture of product Cliffords on the (copy A, copy B) site pair.

    Even laws (s1 = s2 = 0) give four terms; otherwise the twelve-term
    signed form is returned with zero weights pruned.
    """
    r1, s1 = dist.moment(1)
    r2, s2 = dist.moment(2)
    I, Z, S, SDG = GateKind.I, GateKind.Z, GateKind.S, GateKind.SDG
    tol = ESTIMATOR_CONFIG["negative_weight_clamp"]
    if abs(s1) <= tol and abs(s2) <= tol:
        return _build_mixture(2, [
            ((1 + r2 + 2 * r1) / 4, (I, I)),
            ((1 + r2 - 2 * r1) / 4, (Z, Z)),
            ((1 - r2) / 4, (S, S)),
            ((1 - r2) / 4, (SDG, SDG)),
        ])
    half = s2 / 8
    return _build_mixture(2, [
        ((1 + r2 + 2 * r1) / 4, (I, I)),
        ((1 + r2 - 2 * r1) / 4, (Z, Z)),
        ((1 - r2 + 2 * s1) / 4, (S, S)),
        ((1 - r2 - 2 * s1) / 4, (SDG, SDG)),
        (half, (S, I)),
        (half, (I, S)),
        (half, (Z, SDG)),
        (half, (SDG, Z)),
        (-half, (SDG, I)),
        (-half, (I, SDG)),
        (-half, (Z, S)),
        (-half, (S, Z)),
    ])


def check_convexity_condition(dist: AngleDistribution) -> bool:
    """E[cos^2 theta] >= |E[cos theta]| for a law even about 0."""
    r1, _ = dist.moment(1)
    r2, _ = dist.moment(2)
    slack = 2 * ESTIMATOR_CONFIG["negative_weight_clamp"]
    return (1 + r2) / 2 - abs(r1) >= -slack


def _gaussian_convexity_margin(sigma: float) -> float:
    return 1 + math.exp(-2 * sigma ** 2) - 2 * math.exp(-sigma ** 2 / 2)


def gaussian_convexity_threshold(lower: float = 0.1, upper: float = 5.0, xtol: float = 1e-10) -> float:
    """Standard deviation above which a centered Gaussian gives a convex 2-fold mixture."""
    return float(optimize.bisect(_gaussian_convexity_margin, lower, upper, xtol=xtol))


@dataclass(frozen=True)
class NFoldDecomposition:
    """All 4^N coefficients E[lambda_I] and the sufficient-convexity verdict."""
    order: int
    coefficients: Tuple[Tuple[Tuple[int, ...], float], ...]
    sufficient_convex: bool

    def gates_for(self, index: Tuple[int, ...]) -> Tuple[GateKind, ...]:
        return tuple(N_FOLD_GATES[i] for i in index)


def n_fold_coefficients(dist: AngleDistribution, n: int) -> NFoldDecomposition:
    """Expand the (m0..m3) count table to every ordered multi-index in {0..3}^N."""
    table = lambda_expectations(dist, n)
    coefficients = []
    for index in product(range(4), repeat=n):
        counts = tuple(index.count(i) for i in range(4))
        coefficients.append((index, table[counts]))
    tol = ESTIMATOR_CONFIG["convexity_tolerance"]
    verdict = all(value >= -tol for _, value in coefficients)
    return NFoldDecomposition(n, tuple(coefficients), verdict)


def _unitary_superoperator(u: np.ndarray) -> np.ndarray:
    # row-major vec: vec(U rho U^dag) = (U (x) conj(U)) vec(rho)
    return np.kron(u, u.conj())


def _product_matrix(gates: Sequence[GateKind]) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for g in gates:
        out = np.kron(out, SINGLE_QUBIT_MATRICES[g])
    return out


def reconstruct_dense_channel(
    decomposition: Union[CliffordMixture, NFoldDecomposition, Sequence[Tuple[Sequence[GateKind], float]]],
    order: int,
) -> np.ndarray:
    """Superoperator (4^order x 4^order, row-major vec) of a weighted gate decomposition."""
    if order not in (1, 2, 3):
        raise DecompositionError(f"Dense reconstruction supports order 1..3, got {order}")
    if isinstance(decomposition, CliffordMixture):
        items = [(t.gates, t.weight) for t in decomposition.terms]
    elif isinstance(decomposition, NFoldDecomposition):
        items = [(decomposition.gates_for(i), v) for i, v in decomposition.coefficients]
    else:
        items = list(decomposition)
    dim = 4 ** order
    channel = np.zeros((dim, dim), dtype=complex)
    for gates, weight in items:
        if len(gates) != order:
            raise DecompositionError(f"Replacement {gates} does not act on {order} sites")
        channel += weight * _unitary_superoperator(_product_matrix(gates))
    return channel


def rotation_channel(theta: float, order: int) -> np.ndarray:
    """Superoperator of R_Z(theta)^{(x) order}."""
    single = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    u = np.eye(1, dtype=complex)
    for _ in range(order):
        u = np.kron(u, single)
    return _unitary_superoperator(u)


def averaged_rotation_channel(dist: AngleDistribution, order: int) -> np.ndarray:
    """E[R_Z(theta)^{(x) order} (.) h.c.] entry by entry.

    The superoperator is diagonal with entries E[exp(i k theta)], k the
    difference of excitation counts; each distinct k is integrated once.
    """
    dim = 2 ** order
    popcount = np.array([bin(i).count("1") for i in range(dim)])
    # R_Z ~ diag(1, e^{i theta}) up to a global phase
    shifts = (popcount[:, None] - popcount[None, :]).reshape(-1)
    characteristic = {}
    for k in np.unique(shifts):
        k = int(k)
        if k == 0:
            characteristic[k] = 1.0 + 0.0j
            continue
        real = dist.expect(lambda t, k=k: math.cos(k * t))
        imag = dist.expect(lambda t, k=k: math.sin(k * t))
        characteristic[k] = complex(real, imag)
    return np.diag([characteristic[int(k)] for k in shifts])


def term_table(mixture: CliffordMixture) -> List[Dict[str, Any]]:
    """Rows (label, weight, probability, sign) for logging and debugging."""
    return [
        {"label": t.label, "weight": t.weight, "probability": float(p), "sign": int(s)}
        for t, p, s in zip(mixture.terms, mixture.probabilities, mixture.signs)
    ]
