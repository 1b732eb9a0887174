"""Maximum-directivity excitations, with and without coupling compensation.

Directivity is a generalized Rayleigh quotient |a^T e|^2 / (a^T Z a*), so the
optimum is a closed-form solve against Z (the numerator matrix has rank one);
no iterative eigensolver is involved. With a coupling matrix C the port
excitation b is driven so that the radiating excitation C b realizes the same
optimum: b = C^-1 Z^-1 e*.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .arraymodel import SteeringVector
from .coupling import CouplingMatrix
from .errors import (
    ConditioningError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    SingularMatrixError,
)
from .radiation import ImpedanceMatrix

_CONDITION_WARN = 1e12


@dataclass(frozen=True, eq=False)
class BeamformingSolution:
    """An excitation together with the directivity it realizes.

    ``excitation`` is normalized to unit radiated power: a^T Z a* = 1 in
    uncoupled mode and (C b)^T Z (C b)* = 1 in coupled mode. The global phase
    is fixed by a real positive scale on Z^-1 e*.
    """

    excitation: np.ndarray
    directivity: float
    direction: tuple
    mode: str
    condition_number: float
    loss_resistance: float = 0.0
    normalization: str = "unit-power"

    def __post_init__(self):
        object.__setattr__(self, "excitation", np.asarray(self.excitation, dtype=complex).reshape(-1))
        if self.mode not in ("uncoupled", "coupled"):
            raise DomainError(f"unknown beamforming mode {self.mode!r}")


def _check_sizes(impedance: ImpedanceMatrix, steering: SteeringVector, coupling: CouplingMatrix | None = None):
    m = impedance.size
    if len(steering) != m:
        raise DimensionError("steering vector length does not match the impedance matrix")
    if coupling is not None and coupling.size != m:
        raise DimensionError("coupling matrix size does not match the impedance matrix")


def _solve_impedance(impedance: ImpedanceMatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve Z x = rhs by Cholesky, falling back to a general factorization."""
    cond = impedance.condition_number
    if not np.isfinite(cond):
        raise SingularMatrixError(
            f"impedance matrix is singular (condition estimate {cond})",
            condition_number=cond,
        )
    if cond > _CONDITION_WARN:
        warnings.warn(
            f"impedance matrix condition number {cond:.3e} exceeds {_CONDITION_WARN:.0e}; "
            "results may lose precision",
            RuntimeWarning,
            stacklevel=3,
        )
    try:
        c, low = scipy.linalg.cho_factor(impedance.values)
        return scipy.linalg.cho_solve((c, low), rhs)
    except np.linalg.LinAlgError:
        pass
    try:
        return scipy.linalg.solve(impedance.values, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            f"impedance matrix is singular: {exc} (condition estimate {cond:.3e})",
            condition_number=cond,
        ) from exc


def _solve_coupling(coupling: CouplingMatrix, rhs: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(coupling.values, rhs)
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(coupling.values))
        raise SingularMatrixError(
            f"coupling matrix is singular: {exc}", condition_number=cond
        ) from exc


def loss_resistance(efficiency: float) -> float:
    """Normalized series loss resistance (1 - eta) / eta of one element."""
    if not 0.0 < efficiency <= 1.0:
        raise DomainError("antenna efficiency must lie in (0, 1]")
    return (1.0 - efficiency) / efficiency


def optimal_beamforming(impedance: ImpedanceMatrix, steering: SteeringVector) -> BeamformingSolution:
    """Maximum-directivity excitation a = mu Z^-1 e* toward the steering direction.

    Returns the unit-power excitation and the optimum D_max = e^H Z^-1 e,
    which upper-bounds the directivity of every other excitation.
    """
    _check_sizes(impedance, steering)
    e = steering.values
    if not np.any(e):
        raise DegenerateInputError("steering vector is zero; element pattern has a null there")
    x = _solve_impedance(impedance, e.conj())
    dmax = float(np.real(np.dot(e, x)))
    if dmax <= 0.0:
        raise ConditioningError(f"computed optimum {dmax:.3e} is not positive")
    return BeamformingSolution(
        excitation=x / np.sqrt(dmax),
        directivity=dmax,
        direction=steering.direction,
        mode="uncoupled",
        condition_number=impedance.condition_number,
    )


def coupled_directivity(
    impedance: ImpedanceMatrix,
    coupling: CouplingMatrix,
    steering: SteeringVector,
    excitation,
) -> float:
    """Directivity realized by port excitation b when the array couples as C.

    Evaluates |e^T C b|^2 / ((C b)^T Z (C b)*): the radiating excitation is
    C b, not b itself.
    """
    _check_sizes(impedance, steering, coupling)
    b = np.asarray(excitation, dtype=complex).reshape(-1)
    if b.size != impedance.size:
        raise DimensionError("excitation length does not match the array")
    if not np.any(b):
        raise DegenerateInputError("excitation must not be the zero vector")
    w = coupling.values @ b
    numerator = abs(np.dot(steering.values, w)) ** 2
    denominator = float(np.real(w @ impedance.values @ w.conj()))
    if denominator <= 0.0:
        raise ConditioningError(
            f"radiated power {denominator:.3e} is not positive; result untrustworthy"
        )
    return float(numerator / denominator)


def coupled_beamforming(
    impedance: ImpedanceMatrix,
    coupling: CouplingMatrix,
    steering: SteeringVector,
) -> BeamformingSolution:
    """Port excitation b = zeta C^-1 Z^-1 e* that restores the optimum under coupling.

    The reported directivity is evaluated through the coupled quotient, so it
    equals D_max only insofar as the solve is numerically exact.
    """
    _check_sizes(impedance, steering, coupling)
    e = steering.values
    if not np.any(e):
        raise DegenerateInputError("steering vector is zero; element pattern has a null there")
    x = _solve_impedance(impedance, e.conj())
    power = float(np.real(x @ impedance.values @ x.conj()))
    if power <= 0.0:
        raise ConditioningError(f"radiated power {power:.3e} is not positive")
    b = _solve_coupling(coupling, x) / np.sqrt(power)
    d_c = coupled_directivity(impedance, coupling, steering, b)
    return BeamformingSolution(
        excitation=b,
        directivity=d_c,
        direction=steering.direction,
        mode="coupled",
        condition_number=impedance.condition_number,
    )


def gain(
    impedance: ImpedanceMatrix,
    coupling: CouplingMatrix,
    steering: SteeringVector,
    excitation,
    efficiency: float,
) -> float:
    """Gain of port excitation b with per-element efficiency eta.

    Adds the normalized loss resistance r_loss = (1 - eta)/eta to the
    radiated-power form: |e^T C b|^2 / ((C b)^T (Z + r_loss I) (C b)*).
    Never exceeds the coupled directivity; equal only when eta = 1.
    """
    _check_sizes(impedance, steering, coupling)
    r_loss = loss_resistance(efficiency)
    b = np.asarray(excitation, dtype=complex).reshape(-1)
    if b.size != impedance.size:
        raise DimensionError("excitation length does not match the array")
    if not np.any(b):
        raise DegenerateInputError("excitation must not be the zero vector")
    w = coupling.values @ b
    numerator = abs(np.dot(steering.values, w)) ** 2
    denominator = float(np.real(w @ impedance.values @ w.conj()) + r_loss * np.real(w @ w.conj()))
    if denominator <= 0.0:
        raise ConditioningError(
            f"accepted power {denominator:.3e} is not positive; result untrustworthy"
        )
    return float(numerator / denominator)


def gain_optimal_beamforming(
    impedance: ImpedanceMatrix,
    coupling: CouplingMatrix,
    steering: SteeringVector,
    efficiency: float,
) -> BeamformingSolution:
    """Gain-optimal port excitation b = zeta C^-1 (Z + r_loss I)^-1 e*.

    Extension beyond the directivity-optimal solution: maximizes gain instead
    of directivity by loading the radiated-power matrix with the loss
    resistance. The ``directivity`` field still reports the coupled
    directivity that this excitation realizes.
    """
    _check_sizes(impedance, steering, coupling)
    r_loss = loss_resistance(efficiency)
    e = steering.values
    if not np.any(e):
        raise DegenerateInputError("steering vector is zero; element pattern has a null there")
    loaded = ImpedanceMatrix(
        values=impedance.values + r_loss * np.eye(impedance.size),
        geometry_hash=impedance.geometry_hash,
        condition_number=float(np.linalg.cond(impedance.values + r_loss * np.eye(impedance.size))),
        loading=impedance.loading + r_loss,
    )
    x = _solve_impedance(loaded, e.conj())
    power = float(np.real(x @ impedance.values @ x.conj()))
    if power <= 0.0:
        raise ConditioningError(f"radiated power {power:.3e} is not positive")
    b = _solve_coupling(coupling, x) / np.sqrt(power)
    d_c = coupled_directivity(impedance, coupling, steering, b)
    return BeamformingSolution(
        excitation=b,
        directivity=d_c,
        direction=steering.direction,
        mode="coupled",
        condition_number=impedance.condition_number,
        loss_resistance=r_loss,
    )
