"""Spherical wave expansion of far fields sampled on the sphere.

A tangential far field (E_theta, E_phi) is expanded on the far-field
spherical wave functions

    K_1mn = sqrt(2/(n(n+1))) (-m/|m|)^m e^{jm phi} (-j)^{n+1}
            [ j m Pbar/sin(theta), -dPbar/dtheta ]          (TE)
    K_2mn = sqrt(2/(n(n+1))) (-m/|m|)^m e^{jm phi} (-j)^n
            [ dPbar/dtheta, j m Pbar/sin(theta) ]           (TM)

with Pbar the associated Legendre function of degree n and order |m|,
normalized to unit L2 norm on [-1, 1] and carrying no Condon-Shortley phase
(the (-m/|m|)^m factor, defined as 1 for m = 0, supplies the sign). Under
this convention the K functions are orthonormal for the sphere-averaged
inner product (1/4pi) * integral K . K* dOmega, and the sum of |Q|^2 over
all modes equals the radiated power in the same normalization.

Angular factors are evaluated through stable three-term recurrences on the
pole-regular ratio Pbar/sin(theta), so the m = +-1 limits at theta in
{0, pi} come out exactly and every other order vanishes there, as required.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arraymodel import WAVE_NUMBER
from .errors import (
    ConditioningError,
    DimensionError,
    DomainError,
    InsufficientSamplingError,
)


def truncation_degree(enclosing_radius: float) -> int:
    """Expansion order for sources inside a sphere of the given radius.

    Uses N = ceil(k * r0) + 10 with the radius in wavelengths, which keeps
    the discarded modes evanescent with a safety margin of ten orders.
    """
    if enclosing_radius < 0.0:
        raise DomainError("enclosing radius must be >= 0")
    return int(np.ceil(WAVE_NUMBER * float(enclosing_radius))) + 10


def mode_count(truncation: int) -> int:
    """Number of spherical modes 2 N (N + 2) at truncation order N."""
    n = int(truncation)
    if n < 1:
        raise DomainError("truncation order must be >= 1")
    return 2 * n * (n + 2)


@dataclass(frozen=True)
class SweIndex:
    """Single spherical mode (s, m, n): s = 1 TE / 2 TM, degree n, order m."""

    s: int
    m: int
    n: int

    def __post_init__(self):
        if self.s not in (1, 2):
            raise DomainError("s must be 1 (TE) or 2 (TM)")
        if self.n < 1:
            raise DomainError("degree n must be >= 1")
        if abs(self.m) > self.n:
            raise DomainError("order m must satisfy |m| <= n")


def index_list(truncation: int) -> list:
    """All modes up to order N in flattened order (s fastest, then m, then n)."""
    count = mode_count(truncation)
    out = []
    for n in range(1, int(truncation) + 1):
        for m in range(-n, n + 1):
            out.append(SweIndex(s=1, m=m, n=n))
            out.append(SweIndex(s=2, m=m, n=n))
    assert len(out) == count
    return out


@dataclass(frozen=True, eq=False)
class FieldSampleSet:
    """Tangential far-field samples on a set of sphere directions.

    ``directions`` holds (theta, phi) pairs in radians, shape (P, 2), with
    no exact duplicates; ``values`` interleaves the components as
    [E_theta(1), E_phi(1), E_theta(2), ...], shape (2P,).
    """

    directions: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=float)
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if dirs.ndim != 2 or dirs.shape[1] != 2:
            raise DimensionError("directions must have shape (P, 2)")
        if np.any(dirs[:, 0] < 0.0) or np.any(dirs[:, 0] > np.pi):
            raise DomainError("theta must lie in [0, pi]")
        if vals.size != 2 * dirs.shape[0]:
            raise DimensionError("values must interleave 2 components per direction")
        if np.unique(dirs, axis=0).shape[0] != dirs.shape[0]:
            raise DomainError("directions contain duplicates")
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_components(cls, directions, etheta, ephi) -> "FieldSampleSet":
        """Assemble a sample set from separate component arrays."""
        etheta = np.asarray(etheta, dtype=complex).reshape(-1)
        ephi = np.asarray(ephi, dtype=complex).reshape(-1)
        if etheta.size != ephi.size:
            raise DimensionError("component arrays must have equal length")
        values = np.empty(2 * etheta.size, dtype=complex)
        values[0::2] = etheta
        values[1::2] = ephi
        return cls(directions=directions, values=values)

    @property
    def point_count(self) -> int:
        return self.directions.shape[0]

    @property
    def etheta(self) -> np.ndarray:
        return self.values[0::2]

    @property
    def ephi(self) -> np.ndarray:
        return self.values[1::2]


@dataclass(frozen=True, eq=False)
class WaveCoefficientSet:
    """Spherical mode coefficients in flattened index order."""

    coefficients: np.ndarray
    truncation: int
    residual: float

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if coeffs.size != mode_count(self.truncation):
            raise DimensionError(
                f"{coeffs.size} coefficients for truncation {self.truncation}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "residual", float(self.residual))


def total_power(coefficients: WaveCoefficientSet) -> float:
    """Radiated power sum |Q|^2 in the sphere-averaged normalization."""
    return float(np.sum(np.abs(coefficients.coefficients) ** 2))


def _angular_tables(truncation, theta):
    """Pole-regular angular factor tables for all degrees and orders.

    Returns (ratio, tau) with ratio[n, m] = Pbar_n^m(cos theta) / sin(theta)
    for m >= 1 and tau[n, m] = dPbar_n^m/dtheta, each of shape
    (N+1, N+1, len(theta)). The ratio satisfies the same three-term
    recurrence as Pbar itself, with the sin(theta) factor divided out of the
    seed, so pole values are the analytic limits with no special-casing.
    """
    theta = np.asarray(theta, dtype=float).reshape(-1)
    x = np.cos(theta)
    s = np.sin(theta)
    n_pts = theta.size
    trunc = int(truncation)
    ratio = np.zeros((trunc + 1, trunc + 1, n_pts))
    tau = np.zeros((trunc + 1, trunc + 1, n_pts))
    c_seed = np.sqrt(0.5)
    sin_pow = np.ones(n_pts)  # sin^(m-1) theta
    for m in range(1, trunc + 1):
        c_seed *= np.sqrt((2.0 * m + 1.0) / (2.0 * m))
        if m >= 2:
            sin_pow = sin_pow * s
        ratio[m, m] = c_seed * sin_pow
        if m + 1 <= trunc:
            ratio[m + 1, m] = np.sqrt(2.0 * m + 3.0) * x * ratio[m, m]
        for n in range(m + 2, trunc + 1):
            alpha = np.sqrt((4.0 * n * n - 1.0) / ((n - m) * (n + m)))
            beta = np.sqrt(
                ((2.0 * n + 1.0) * (n + m - 1.0) * (n - m - 1.0))
                / ((2.0 * n - 3.0) * (n - m) * (n + m))
            )
            ratio[n, m] = alpha * x * ratio[n - 1, m] - beta * ratio[n - 2, m]
        for n in range(m, trunc + 1):
            coeff = np.sqrt(((2.0 * n + 1.0) * (n * n - m * m)) / (2.0 * n - 1.0))
            prev = ratio[n - 1, m] if n - 1 >= m else 0.0
            tau[n, m] = n * x * ratio[n, m] - coeff * prev
    # m = 0: dPbar_n^0/dtheta = -sqrt(n(n+1)) * Pbar_n^1 (order-raising identity)
    for n in range(1, trunc + 1):
        tau[n, 0] = -np.sqrt(n * (n + 1.0)) * s * ratio[n, 1]
    return ratio, tau


def _check_directions(directions):
    dirs = np.asarray(directions, dtype=float)
    if dirs.ndim != 2 or dirs.shape[1] != 2:
        raise DimensionError("directions must have shape (P, 2)")
    if np.any(dirs[:, 0] < 0.0) or np.any(dirs[:, 0] > np.pi):
        raise DomainError("theta must lie in [0, pi]")
    return dirs


def basis_matrix(directions, truncation: int) -> np.ndarray:
    """Far-field basis sampled on the given directions.

    Row 2p holds the theta component and row 2p+1 the phi component of every
    mode at direction p; columns follow the flattened (s, m, n) order, so the
    shape is (2P, 2N(N+2)).
    """
    dirs = _check_directions(directions)
    theta = dirs[:, 0]
    phi = dirs[:, 1]
    trunc = int(truncation)
    cols = mode_count(trunc)
    ratio, tau = _angular_tables(trunc, theta)
    out = np.empty((2 * dirs.shape[0], cols), dtype=complex)
    col = 0
    for n in range(1, trunc + 1):
        scale = np.sqrt(2.0 / (n * (n + 1.0)))
        phase_te = (-1j) ** (n + 1)
        phase_tm = (-1j) ** n
        for m in range(-n, n + 1):
            sign = (-1.0) ** m if m > 0 else 1.0
            common = (scale * sign) * np.exp(1j * m * phi)
            pi_m = m * ratio[n, abs(m)]
            tau_m = tau[n, abs(m)]
            te = phase_te * common
            out[0::2, col] = te * (1j * pi_m)
            out[1::2, col] = te * (-tau_m)
            col += 1
            tm = phase_tm * common
            out[0::2, col] = tm * tau_m
            out[1::2, col] = tm * (1j * pi_m)
            col += 1
    return out


def eval_spherical_wave_function(index: SweIndex, theta, phi):
    """Components (K_theta, K_phi) of one mode, broadcasting over inputs.

    Pole directions evaluate to the analytic limits: finite for |m| = 1 and
    zero for every other order.
    """
    theta_arr = np.asarray(theta, dtype=float)
    phi_arr = np.asarray(phi, dtype=float)
    theta_b, phi_b = np.broadcast_arrays(theta_arr, phi_arr)
    if np.any(theta_b < 0.0) or np.any(theta_b > np.pi):
        raise DomainError("theta must lie in [0, pi]")
    flat_dirs = np.column_stack((theta_b.ravel(), phi_b.ravel()))
    n, m = index.n, index.m
    ratio, tau = _angular_tables(n, flat_dirs[:, 0])
    scale = np.sqrt(2.0 / (n * (n + 1.0)))
    sign = (-1.0) ** m if m > 0 else 1.0
    common = (scale * sign) * np.exp(1j * m * flat_dirs[:, 1])
    pi_m = m * ratio[n, abs(m)]
    tau_m = tau[n, abs(m)]
    if index.s == 1:
        k_th = (-1j) ** (n + 1) * common * (1j * pi_m)
        k_ph = (-1j) ** (n + 1) * common * (-tau_m)
    else:
        k_th = (-1j) ** n * common * tau_m
        k_ph = (-1j) ** n * common * (1j * pi_m)
    k_th = k_th.reshape(theta_b.shape)
    k_ph = k_ph.reshape(theta_b.shape)
    if k_th.ndim == 0:
        return complex(k_th), complex(k_ph)
    return k_th, k_ph


def default_fit_grid(truncation: int) -> np.ndarray:
    """Equiangular (2N+2) x (4N+4) direction grid, poles excluded.

    Theta rows sit at cell midpoints so the poles never appear; the grid
    oversamples the 2N(N+2) modes roughly eightfold.
    """
    trunc = int(truncation)
    if trunc < 1:
        raise DomainError("truncation order must be >= 1")
    rows = 2 * trunc + 2
    cols = 4 * trunc + 4
    theta = (np.arange(rows) + 0.5) * np.pi / rows
    phi = 2.0 * np.pi * np.arange(cols) / cols
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    return np.column_stack((th.ravel(), ph.ravel()))


def fit_wave_coefficients(samples: FieldSampleSet, truncation: int) -> WaveCoefficientSet:
    """Least-squares spherical mode coefficients of a sampled field.

    Solves min ||K q - values|| over the 2N(N+2) modes. Singular values
    below max(2P, 2N(N+2)) * eps * sigma_max are treated as zero; a fit whose
    effective rank falls below the mode count raises ConditioningError rather
    than silently truncating.

    Returns
    -------
    WaveCoefficientSet
        Coefficients with the relative fit residual attached.
    """
    modes = mode_count(truncation)
    n_rows = 2 * samples.point_count
    if n_rows < modes:
        raise InsufficientSamplingError(
            f"{samples.point_count} directions give {n_rows} equations for {modes} modes"
        )
    basis = basis_matrix(samples.directions, truncation)
    rcond = max(n_rows, modes) * np.finfo(float).eps
    coeffs, _, rank, _ = np.linalg.lstsq(basis, samples.values, rcond=rcond)
    if rank < modes:
        raise ConditioningError(
            f"sampling grid supports only rank {rank} of {modes} modes",
            effective_rank=int(rank),
        )
    norm = float(np.linalg.norm(samples.values))
    if norm > 0.0:
        residual = float(np.linalg.norm(basis @ coeffs - samples.values)) / norm
    else:
        residual = 0.0
    return WaveCoefficientSet(coefficients=coeffs, truncation=int(truncation), residual=residual)


def reconstruct_field(coefficients: WaveCoefficientSet, directions) -> FieldSampleSet:
    """Evaluate the modal sum on the given directions."""
    dirs = _check_directions(directions)
    basis = basis_matrix(dirs, coefficients.truncation)
    return FieldSampleSet(directions=dirs, values=basis @ coefficients.coefficients)
