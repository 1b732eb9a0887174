"""Radiated-power quadrature, normalized impedance matrix, and directivity.

The impedance matrix here is the dimensionless radiation coupling matrix

    z_mn = (1/4pi) * integral |k(theta, phi)|^2
           * exp(+j k r_hat . r_m) * exp(-j k r_hat . r_n) dOmega

so that a^T Z a* is the total radiated power of excitation ``a`` and the
isotropic diagonal is exactly 1. Integration uses Gauss-Legendre nodes in
cos(theta) crossed with a uniform phi grid, which integrates the smooth,
phi-periodic integrands here to machine precision at modest sizes.
"""

from __future__ import annotations

import functools
import hashlib
from dataclasses import dataclass

import numpy as np

from .arraymodel import WAVE_NUMBER, ArrayGeometry, ElementPattern, steering_vector
from .errors import (
    AccuracyError,
    ConditioningError,
    DegenerateInputError,
    DimensionError,
    DomainError,
)

_IMAG_RESIDUE_TOL = 1e-10
_REFINEMENT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    """Product quadrature over the unit sphere.

    Gauss-Legendre nodes/weights in cos(theta) crossed with ``phi_count``
    uniformly spaced azimuth nodes of equal weight. The combined solid-angle
    weights sum to 4*pi.
    """

    theta: np.ndarray
    theta_weights: np.ndarray
    phi_count: int
    scheme: str = "gauss-legendre-theta x uniform-phi"

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float).reshape(-1)
        w = np.asarray(self.theta_weights, dtype=float).reshape(-1)
        if th.size != w.size or th.size < 1:
            raise DimensionError("theta and theta_weights must have equal nonzero length")
        if np.any(w <= 0.0):
            raise DomainError("quadrature weights must be positive")
        if self.phi_count < 1:
            raise DomainError("phi_count must be >= 1")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "theta_weights", w)
        object.__setattr__(self, "phi_count", int(self.phi_count))
        # exactness on constants: (1/4pi) * sum of weights == 1
        if abs(w.sum() / 2.0 - 1.0) > 1e-14:
            raise AccuracyError("quadrature does not integrate a constant to 1")

    @classmethod
    def gauss_legendre(cls, theta_count: int = 64, phi_count: int = 128) -> "SphereQuadrature":
        """Standard quadrature with ``theta_count`` polar nodes."""
        if theta_count < 1:
            raise DomainError("theta_count must be >= 1")
        x, w = np.polynomial.legendre.leggauss(int(theta_count))
        theta = np.arccos(x[::-1])
        return cls(theta=theta, theta_weights=w[::-1], phi_count=phi_count)

    @property
    def phi(self) -> np.ndarray:
        """Azimuth nodes, uniformly spaced on [0, 2*pi)."""
        return 2.0 * np.pi * np.arange(self.phi_count) / self.phi_count

    def directions(self) -> np.ndarray:
        """All (theta, phi) node pairs as an (N_theta * N_phi, 2) array."""
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        return np.column_stack((th.ravel(), ph.ravel()))

    def weights(self) -> np.ndarray:
        """Solid-angle weight per direction node; sums to 4*pi."""
        per_phi = 2.0 * np.pi / self.phi_count
        return np.repeat(self.theta_weights * per_phi, self.phi_count)

    def double_density(self) -> "SphereQuadrature":
        """Same scheme at twice the node count on both axes."""
        return SphereQuadrature.gauss_legendre(2 * self.theta.size, 2 * self.phi_count)

    def describe(self) -> str:
        """Canonical one-line description used for content hashing."""
        return f"gl{self.theta.size}x{self.phi_count}"


@functools.lru_cache(maxsize=8)
def _cached_gauss_legendre(theta_count, phi_count):
    return SphereQuadrature.gauss_legendre(theta_count, phi_count)


def default_quadrature() -> SphereQuadrature:
    """The 64 x 128 Gauss-Legendre/uniform product rule."""
    return _cached_gauss_legendre(64, 128)


@dataclass(frozen=True, eq=False)
class ImpedanceMatrix:
    """Normalized radiation impedance matrix of an array.

    ``values`` is real symmetric positive semidefinite; ``geometry_hash``
    identifies the (geometry, pattern, quadrature) that produced it and
    ``condition_number`` is the 2-norm condition estimate of ``values``
    (after any diagonal loading).
    """

    values: np.ndarray
    geometry_hash: str
    condition_number: float
    loading: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise DimensionError("impedance matrix must be square")
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.values.shape[0]


def _geometry_hash(geometry, pattern, quadrature, loading):
    text = ";".join((geometry.describe(), pattern.describe(), quadrature.describe(), repr(float(loading))))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _integrate_impedance(geometry, pattern, quadrature):
    """Quadrature of the impedance integrand, exploiting the z-axis layout."""
    costh = np.cos(quadrature.theta)
    phi = quadrature.phi
    th_grid, ph_grid = np.meshgrid(quadrature.theta, phi, indexing="ij")
    k_abs2 = np.abs(pattern.evaluate(th_grid, ph_grid)) ** 2
    # phases depend on theta only for a z-axis array, so fold phi into weights
    g = (k_abs2.sum(axis=1) * (2.0 * np.pi / quadrature.phi_count)) * quadrature.theta_weights
    phases = np.exp(1j * WAVE_NUMBER * np.outer(costh, geometry.z_positions))
    raw = (phases.T * g) @ phases.conj() / (4.0 * np.pi)
    residue = float(np.max(np.abs(raw.imag))) if raw.size else 0.0
    if residue > _IMAG_RESIDUE_TOL:
        raise AccuracyError(
            f"impedance integrand left an imaginary residue of {residue:.3e}"
        )
    real = raw.real
    return 0.5 * (real + real.T)


def impedance_matrix(
    geometry: ArrayGeometry,
    pattern: ElementPattern,
    quadrature: SphereQuadrature | None = None,
    *,
    loading: float = 0.0,
    certified: bool = False,
) -> ImpedanceMatrix:
    """Normalized impedance matrix of the array.

    Parameters
    ----------
    geometry, pattern : ArrayGeometry, ElementPattern
        Array layout and common element pattern.
    quadrature : SphereQuadrature, optional
        Integration rule; defaults to the 64 x 128 Gauss-Legendre rule.
    loading : float, optional
        Diagonal loading delta >= 0 added as delta * I for near-singular
        small-spacing studies. Default 0 (no regularization).
    certified : bool, optional
        When true, recompute at double quadrature density and require the
        two results to agree within 1e-10, otherwise raise AccuracyError.

    Returns
    -------
    ImpedanceMatrix
        Real symmetric matrix with its condition number attached.
    """
    if loading < 0.0:
        raise DomainError("diagonal loading must be >= 0")
    quadrature = quadrature or default_quadrature()
    values = _integrate_impedance(geometry, pattern, quadrature)
    if certified:
        refined = _integrate_impedance(geometry, pattern, quadrature.double_density())
        drift = float(np.max(np.abs(values - refined)))
        if drift > _REFINEMENT_TOL:
            raise AccuracyError(
                f"quadrature too coarse: refinement moved entries by {drift:.3e}"
            )
    if loading > 0.0:
        values = values + loading * np.eye(geometry.element_count)
    condition = float(np.linalg.cond(values))
    return ImpedanceMatrix(
        values=values,
        geometry_hash=_geometry_hash(geometry, pattern, quadrature, loading),
        condition_number=condition,
        loading=float(loading),
    )


def directivity(
    geometry: ArrayGeometry,
    pattern: ElementPattern,
    impedance: ImpedanceMatrix,
    excitation,
    theta0: float,
    phi0: float,
) -> float:
    """Directivity of excitation ``a`` toward (theta0, phi0).

    Evaluates |a^T e|^2 / (a^T Z a*) with e the steering vector toward the
    requested direction.
    """
    a = np.asarray(excitation, dtype=complex).reshape(-1)
    if a.size != geometry.element_count or impedance.size != geometry.element_count:
        raise DimensionError("excitation/impedance size does not match the array")
    if not np.any(a):
        raise DegenerateInputError("excitation must not be the zero vector")
    e = steering_vector(geometry, pattern, theta0, phi0).values
    numerator = abs(np.dot(a, e)) ** 2
    denominator = float(np.real(a @ impedance.values @ a.conj()))
    if denominator <= 0.0:
        raise ConditioningError(
            f"radiated power {denominator:.3e} is not positive; result untrustworthy"
        )
    return float(numerator / denominator)
