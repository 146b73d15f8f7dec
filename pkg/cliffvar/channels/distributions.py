"""
Rotation-angle distributions and their trigonometric moments.

Every law exposes r_t = E[cos t theta] and s_t = E[sin t theta]; the
Clifford decompositions consume nothing else. Drawing angles is only
used by the dense oracle.
"""
import logging
import math
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import product
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from scipy import integrate

from cliffvar.config import DISTRIBUTION_CONFIG
from cliffvar.errors import DistributionError, QuadratureError

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
CLIFFORD_ANGLES = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)


def clifford_angle_index(angle: float, tol: float = DISTRIBUTION_CONFIG["center_tolerance"]) -> Optional[int]:
    """Index j with angle = j*pi/2 (mod 2pi), or None."""
    ratio = (angle % TWO_PI) / (math.pi / 2)
    j = int(round(ratio)) % 4
    if abs(math.remainder(angle - j * math.pi / 2, TWO_PI)) <= tol:
        return j
    return None


def _quad(func: Callable[[float], float], a: float, b: float) -> float:
    tol = DISTRIBUTION_CONFIG["quadrature_tolerance"]
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, error = integrate.quad(
                func, a, b, epsabs=tol, epsrel=tol, limit=DISTRIBUTION_CONFIG["quadrature_limit"]
            )
        except integrate.IntegrationWarning as e:
            raise QuadratureError(f"Quadrature did not converge on [{a}, {b}]: {e}")
    if error > 10 * tol:
        raise QuadratureError(f"Quadrature error estimate {error:.2e} above tolerance {tol:.0e}")
    return value


class AngleDistribution(ABC):
    """Law of a single rotation angle."""

    center: Optional[float]

    @abstractmethod
    def moment(self, t: int) -> Tuple[float, float]:
        """(E[cos t theta], E[sin t theta])."""

    @abstractmethod
    def recenter(self, c: float) -> "AngleDistribution":
        """Law of theta - c."""

    @abstractmethod
    def expect(self, func: Callable[[float], float]) -> float:
        """E[func(theta)], exact for atoms and adaptive quadrature otherwise."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        """Draw angles (dense oracle only)."""

    @abstractmethod
    def quadrature_rule(self, points: int) -> Tuple[np.ndarray, np.ndarray]:
        """(nodes, weights) approximating the law."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    @property
    def max_order(self) -> Optional[int]:
        """Highest available moment order (None = unlimited)."""
        return None

    def _inferred_center(self) -> Optional[float]:
        return None

    @property
    def symmetry_center(self) -> Optional[float]:
        """Declared center, else one inferred from the law's shape."""
        if self.center is not None:
            return self.center
        return self._inferred_center()

    def _check_order(self, t: int) -> None:
        if t < 1:
            raise DistributionError(f"Moment order must be a positive integer, got {t}")
        if self.max_order is not None and t > self.max_order:
            raise DistributionError(f"Moment order {t} beyond tabulated range {self.max_order}")

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "AngleDistribution":
        kind = str(data.get("dist", "")).lower()
        center = data.get("center")
        center = None if center is None else float(center)
        try:
            if kind == "uniform":
                return UniformDistribution(center=center)
            if kind == "gaussian":
                return GaussianDistribution(float(data.get("mean", 0.0)), float(data["var"]), center=center)
            if kind == "dirac":
                atoms = tuple((float(a), float(w)) for a, w in data["atoms"])
                return DiracMixture(atoms, center=center)
            if kind == "tabulated":
                return TabulatedMoments(tuple(map(float, data["r"])), tuple(map(float, data["s"])), center=center)
        except (KeyError, TypeError, ValueError) as e:
            raise DistributionError(f"Invalid distribution description {data!r}: {e}")
        raise DistributionError(f"Unknown distribution kind {kind!r}")


@dataclass(frozen=True)
class UniformDistribution(AngleDistribution):
    """theta ~ U[0, 2pi)."""
    center: Optional[float] = None

    def moment(self, t: int) -> Tuple[float, float]:
        self._check_order(t)
        return 0.0, 0.0

    def recenter(self, c: float) -> "UniformDistribution":
        return UniformDistribution(center=None if self.center is None else self.center - c)

    def _inferred_center(self) -> Optional[float]:
        return 0.0

    def expect(self, func: Callable[[float], float]) -> float:
        return _quad(func, 0.0, TWO_PI) / TWO_PI

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        return rng.uniform(0.0, TWO_PI, size)

    def quadrature_rule(self, points: int) -> Tuple[np.ndarray, np.ndarray]:
        # equispaced nodes integrate trigonometric polynomials of degree < points exactly
        nodes = TWO_PI * np.arange(points) / points
        return nodes, np.full(points, 1.0 / points)

    def to_dict(self) -> Dict[str, Any]:
        return _with_center({"dist": "uniform"}, self.center)


@dataclass(frozen=True)
class GaussianDistribution(AngleDistribution):
    """theta ~ N(mean, var)."""
    mean: float = 0.0
    var: float = 1.0
    center: Optional[float] = None

    def __post_init__(self):
        if self.var < 0:
            raise DistributionError(f"Gaussian variance must be nonnegative, got {self.var}")

    def moment(self, t: int) -> Tuple[float, float]:
        self._check_order(t)
        damping = math.exp(-t * t * self.var / 2)
        return damping * math.cos(t * self.mean), damping * math.sin(t * self.mean)

    def recenter(self, c: float) -> "GaussianDistribution":
        return GaussianDistribution(self.mean - c, self.var, None if self.center is None else self.center - c)

    def _inferred_center(self) -> Optional[float]:
        j = clifford_angle_index(self.mean)
        return None if j is None else CLIFFORD_ANGLES[j]

    def expect(self, func: Callable[[float], float]) -> float:
        if self.var == 0:
            return float(func(self.mean))
        sigma = math.sqrt(self.var)
        half_width = DISTRIBUTION_CONFIG["gaussian_half_width"] * sigma
        norm = 1.0 / math.sqrt(TWO_PI * self.var)

        def weighted(theta: float) -> float:
            return func(theta) * norm * math.exp(-((theta - self.mean) ** 2) / (2 * self.var))

        return _quad(weighted, self.mean - half_width, self.mean + half_width)

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        return rng.normal(self.mean, math.sqrt(self.var), size)

    def quadrature_rule(self, points: int) -> Tuple[np.ndarray, np.ndarray]:
        if self.var == 0:
            return np.array([self.mean]), np.array([1.0])
        x, w = np.polynomial.hermite_e.hermegauss(points)
        return self.mean + math.sqrt(self.var) * x, w / math.sqrt(TWO_PI)

    def to_dict(self) -> Dict[str, Any]:
        return _with_center({"dist": "gaussian", "mean": self.mean, "var": self.var}, self.center)


@dataclass(frozen=True)
class DiracMixture(AngleDistribution):
    """Finite mixture of point masses [(angle, weight), ...]."""
    atoms: Tuple[Tuple[float, float], ...]
    center: Optional[float] = None

    def __post_init__(self):
        if not self.atoms:
            raise DistributionError("Dirac mixture needs at least one atom")
        weights = np.array([w for _, w in self.atoms])
        if (weights < 0).any():
            raise DistributionError(f"Dirac weights must be nonnegative, got {weights.tolist()}")
        if abs(weights.sum() - 1.0) > DISTRIBUTION_CONFIG["moment_tolerance"]:
            raise DistributionError(f"Dirac weights sum to {weights.sum()}, expected 1")

    @classmethod
    def point(cls, angle: float) -> "DiracMixture":
        return cls(((angle, 1.0),))

    @classmethod
    def symmetric(cls, angles, weights=None) -> "DiracMixture":
        """Mixture of +/-angle pairs with the given pair weights (equal by default)."""
        angles = list(angles)
        weights = [1.0 / len(angles)] * len(angles) if weights is None else list(weights)
        atoms = []
        for a, w in zip(angles, weights):
            atoms.extend([(a, w / 2), (-a, w / 2)])
        return cls(tuple(atoms))

    @property
    def angles(self) -> np.ndarray:
        return np.array([a for a, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    def moment(self, t: int) -> Tuple[float, float]:
        self._check_order(t)
        return float(np.dot(self.weights, np.cos(t * self.angles))), float(np.dot(self.weights, np.sin(t * self.angles)))

    def recenter(self, c: float) -> "DiracMixture":
        atoms = tuple(((a - c) % TWO_PI, w) for a, w in self.atoms)
        return DiracMixture(atoms, None if self.center is None else self.center - c)

    def _inferred_center(self) -> Optional[float]:
        tol = DISTRIBUTION_CONFIG["moment_tolerance"]
        for c in CLIFFORD_ANGLES:
            shifted = self.angles - c
            if all(abs(np.dot(self.weights, np.sin(t * shifted))) <= tol for t in (1, 2)):
                return c
        return None

    def expect(self, func: Callable[[float], float]) -> float:
        return float(sum(w * func(a) for a, w in self.atoms))

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        return rng.choice(self.angles, size=size, p=self.weights / self.weights.sum())

    def quadrature_rule(self, points: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.angles, self.weights

    def to_dict(self) -> Dict[str, Any]:
        return _with_center({"dist": "dirac", "atoms": [[a, w] for a, w in self.atoms]}, self.center)


@dataclass(frozen=True)
class TabulatedMoments(AngleDistribution):
    """Law known only through r_1..r_T and s_1..s_T."""
    r: Tuple[float, ...]
    s: Tuple[float, ...]
    center: Optional[float] = None

    def __post_init__(self):
        if len(self.r) != len(self.s) or not self.r:
            raise DistributionError("Tabulated moments need equal, nonzero numbers of r and s values")
        slack = 1 + DISTRIBUTION_CONFIG["moment_tolerance"]
        if any(abs(v) > slack for v in self.r + self.s):
            raise DistributionError("Tabulated moments must lie in [-1, 1]")

    @property
    def max_order(self) -> Optional[int]:
        return len(self.r)

    def moment(self, t: int) -> Tuple[float, float]:
        self._check_order(t)
        return self.r[t - 1], self.s[t - 1]

    def recenter(self, c: float) -> "TabulatedMoments":
        r, s = [], []
        for t, (rt, st) in enumerate(zip(self.r, self.s), start=1):
            cos_tc, sin_tc = math.cos(t * c), math.sin(t * c)
            r.append(rt * cos_tc + st * sin_tc)
            s.append(st * cos_tc - rt * sin_tc)
        return TabulatedMoments(tuple(r), tuple(s), None if self.center is None else self.center - c)

    def _inferred_center(self) -> Optional[float]:
        if all(abs(v) <= DISTRIBUTION_CONFIG["moment_tolerance"] for v in self.s):
            return 0.0
        return None

    def expect(self, func: Callable[[float], float]) -> float:
        raise DistributionError("Tabulated moments do not determine arbitrary expectations")

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        raise DistributionError("Cannot sample angles from tabulated moments")

    def quadrature_rule(self, points: int) -> Tuple[np.ndarray, np.ndarray]:
        raise DistributionError("Tabulated moments have no quadrature rule")

    def to_dict(self) -> Dict[str, Any]:
        return _with_center({"dist": "tabulated", "r": list(self.r), "s": list(self.s)}, self.center)


def _with_center(data: Dict[str, Any], center: Optional[float]) -> Dict[str, Any]:
    if center is not None:
        data["center"] = center
    return data


def moment(dist: AngleDistribution, t: int) -> Tuple[float, float]:
    return dist.moment(t)


def recenter(dist: AngleDistribution, c: float) -> AngleDistribution:
    return dist.recenter(c)


def _lambda_value(theta: float, counts: Tuple[int, int, int, int]) -> float:
    m0, m1, m2, m3 = counts
    c, s = math.cos(theta), math.sin(theta)
    n = m0 + m1 + m2 + m3
    return (1 + c) ** m0 * (1 - c) ** m1 * (-s) ** m2 * s ** m3 / 2 ** n


def multi_index_counts(n: int):
    """All (m0, m1, m2, m3) with m0+m1+m2+m3 = n."""
    return [m for m in product(range(n + 1), repeat=4) if sum(m) == n]


def lambda_expectations(dist: AngleDistribution, n: int) -> Dict[Tuple[int, int, int, int], float]:
    """E[lambda_I(theta)] keyed by the counts of (I, Z, Sdg, S) in the multi-index."""
    if n < 1:
        raise DistributionError(f"N-fold order must be >= 1, got {n}")
    if isinstance(dist, TabulatedMoments):
        raise DistributionError("N-fold coefficients need a full law, not tabulated moments")
    table = {}
    for counts in multi_index_counts(n):
        table[counts] = dist.expect(lambda theta, m=counts: _lambda_value(theta, m))
    logger.debug(f"Computed {len(table)} lambda expectations for N={n}")
    return table
