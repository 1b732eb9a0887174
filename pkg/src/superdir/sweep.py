"""Spacing sweeps over the beamforming pipeline, with thread-pool fan-out.

Each sweep point is independent, so points are dispatched to a thread pool
and collected in spacing order; the emitted CSV is byte-identical for every
worker count. The SUPERDIR_THREADS environment variable caps parallelism.

Coupling sources: ``identity`` and ``file:<path>`` supply the matrix
directly; ``synthetic:gamma=<g>,beta=<b>`` synthesizes the parametric
fixture's testbed fields for each geometry and estimates the matrix back
through the spherical-wave pipeline, which is what a measurement-driven run
would do (the truncation override applies there).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arraymodel import PATTERN_KINDS, ArrayGeometry, ElementPattern, steering_vector
from .beamform import coupled_beamforming, coupled_directivity, gain, optimal_beamforming
from .coupling import CouplingMatrix, coupling_fixture, estimate_fixture_coupling
from .errors import (
    AccuracyError,
    ConditioningError,
    DataError,
    DegenerateGeometryError,
    DomainError,
    SingularMatrixError,
)
from .radiation import SphereQuadrature, impedance_matrix


@dataclass(frozen=True)
class SweepSpec:
    """Parameters of one spacing sweep.

    Angles are in degrees (the CLI boundary convention); spacings in
    wavelengths. ``truncation`` overrides the expansion order used when the
    coupling source requires spherical-wave estimation; 0 selects the
    automatic rule from the array extent.
    """

    antennas: int
    pattern_kind: str = "isotropic"
    spacing_start: float = 0.05
    spacing_stop: float = 0.5
    spacing_steps: int = 10
    theta0_deg: float = 0.0
    phi0_deg: float = 0.0
    efficiency: float = 1.0
    coupling_source: str = "identity"
    quadrature_theta: int = 64
    quadrature_phi: int = 128
    truncation: int = 0

    def __post_init__(self):
        if self.antennas < 1:
            raise DomainError("antennas must be >= 1")
        if self.pattern_kind not in PATTERN_KINDS or self.pattern_kind == "sampled":
            raise DomainError(
                f"sweep pattern must be one of the analytic kinds, not {self.pattern_kind!r}"
            )
        if not self.spacing_start > 0.0:
            raise DomainError("spacing_start must be positive")
        if self.spacing_stop < self.spacing_start:
            raise DomainError("spacing_stop must be >= spacing_start")
        if self.spacing_steps < 1:
            raise DomainError("spacing_steps must be >= 1")
        if not 0.0 <= self.theta0_deg <= 180.0:
            raise DomainError("theta0_deg must lie in [0, 180]")
        if not 0.0 < self.efficiency <= 1.0:
            raise DomainError("efficiency must lie in (0, 1]")
        if self.quadrature_theta < 1 or self.quadrature_phi < 1:
            raise DomainError("quadrature node counts must be >= 1")
        if self.truncation < 0:
            raise DomainError("truncation override must be >= 0 (0 = automatic)")

    @property
    def spacings(self) -> np.ndarray:
        if self.spacing_steps == 1:
            return np.asarray([self.spacing_start])
        return np.linspace(self.spacing_start, self.spacing_stop, self.spacing_steps)


@dataclass(frozen=True)
class SweepRow:
    """One sweep point; flagged rows carry NaNs and a note."""

    spacing: float
    dmax: float
    d_traditional: float
    d_coupled: float
    gain: float
    condition_number: float
    note: str = ""


def _parse_fixture_params(body: str) -> tuple:
    params = {}
    for item in body.split(","):
        if "=" not in item:
            raise DomainError(f"bad synthetic coupling parameter {item!r}")
        key, value = item.split("=", 1)
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise DomainError(f"bad synthetic coupling value {value!r}") from exc
    if set(params) != {"gamma", "beta"}:
        raise DomainError("synthetic coupling needs exactly gamma=<g>,beta=<b>")
    return params["gamma"], params["beta"]


def parse_coupling_source(
    text: str,
    element_count: int,
    geometry: ArrayGeometry | None = None,
    pattern: ElementPattern | None = None,
    truncation: int = 0,
    read_file=None,
) -> CouplingMatrix:
    """Resolve a coupling-source string to a matrix.

    ``synthetic:`` sources run the estimation pipeline when a geometry and
    pattern are supplied, and fall back to the fixture matrix itself
    otherwise. ``read_file`` is the loader used for ``file:`` sources
    (injected to keep this module independent of fileio).
    """
    if text == "identity":
        return CouplingMatrix.identity(element_count)
    if text.startswith("file:"):
        path = text[len("file:"):]
        if not path:
            raise DomainError("file: coupling source needs a path")
        if read_file is None:
            from .fileio import read_coupling
            read_file = read_coupling
        matrix = read_file(path)
        if matrix.size != element_count:
            raise DataError(
                f"coupling file is {matrix.size}x{matrix.size} "
                f"but the array has {element_count} elements"
            )
        return matrix
    if text.startswith("synthetic:"):
        gamma, beta = _parse_fixture_params(text[len("synthetic:"):])
        if geometry is None or pattern is None:
            return coupling_fixture(element_count, gamma, beta)
        return estimate_fixture_coupling(
            geometry, pattern, gamma, beta, truncation=truncation or None
        )
    raise DomainError(f"unknown coupling source {text!r}")


def _worker_count(requested: int | None) -> int:
    count = requested if requested is not None else (os.cpu_count() or 1)
    env = os.environ.get("SUPERDIR_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError as exc:
            raise DomainError(f"SUPERDIR_THREADS must be an integer, got {env!r}") from exc
        if cap < 1:
            raise DomainError("SUPERDIR_THREADS must be >= 1")
        count = min(count, cap)
    if count < 1:
        raise DomainError("thread count must be >= 1")
    return count


def run_sweep(spec: SweepSpec, threads: int | None = None) -> list:
    """Evaluate every sweep point, in spacing order.

    Per point: the optimum directivity, the directivity the uncoupled-optimal
    excitation actually achieves under the coupling model, the directivity of
    the coupling-compensated excitation, and its gain at the requested
    efficiency. Singular or untrustworthy points are flagged with NaNs and
    the sweep continues.
    """
    pattern = ElementPattern.from_kind(spec.pattern_kind)
    quadrature = SphereQuadrature.gauss_legendre(spec.quadrature_theta, spec.quadrature_phi)
    synthetic = spec.coupling_source.startswith("synthetic:")
    fixed_matrix = None
    if not synthetic:
        fixed_matrix = parse_coupling_source(spec.coupling_source, spec.antennas)
    theta0 = math.radians(spec.theta0_deg)
    phi0 = math.radians(spec.phi0_deg)

    def one_point(spacing: float) -> SweepRow:
        geometry = ArrayGeometry(spec.antennas, float(spacing))
        try:
            matrix = fixed_matrix
            if matrix is None:
                matrix = parse_coupling_source(
                    spec.coupling_source,
                    spec.antennas,
                    geometry=geometry,
                    pattern=pattern,
                    truncation=spec.truncation,
                )
            impedance = impedance_matrix(geometry, pattern, quadrature)
            steering = steering_vector(geometry, pattern, theta0, phi0)
            uncoupled = optimal_beamforming(impedance, steering)
            d_trad = coupled_directivity(impedance, matrix, steering, uncoupled.excitation)
            compensated = coupled_beamforming(impedance, matrix, steering)
            g = gain(impedance, matrix, steering, compensated.excitation, spec.efficiency)
            return SweepRow(
                spacing=float(spacing),
                dmax=uncoupled.directivity,
                d_traditional=d_trad,
                d_coupled=compensated.directivity,
                gain=g,
                condition_number=impedance.condition_number,
            )
        except (
            SingularMatrixError,
            ConditioningError,
            AccuracyError,
            DegenerateGeometryError,
        ) as exc:
            cond = getattr(exc, "condition_number", None)
            return SweepRow(
                spacing=float(spacing),
                dmax=float("nan"),
                d_traditional=float("nan"),
                d_coupled=float("nan"),
                gain=float("nan"),
                condition_number=float("nan") if cond is None else float(cond),
                note=str(exc),
            )

    spacings = [float(s) for s in spec.spacings]
    workers = _worker_count(threads)
    if workers == 1 or len(spacings) == 1:
        return [one_point(s) for s in spacings]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one_point, spacings))
