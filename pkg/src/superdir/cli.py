"""Command line interface.

Angles cross this boundary in degrees, spacings in wavelengths (or meters
via --spacing-m, converted at the stated frequency). Exit codes are stable:
0 success, 1 usage error, 2 malformed or inconsistent data, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import fileio
from .arraymodel import ArrayGeometry, ElementPattern, steering_vector
from .beamform import (
    coupled_beamforming,
    coupled_directivity,
    gain,
    loss_resistance,
    optimal_beamforming,
)
from .coupling import (
    ElementFieldLibrary,
    build_coefficient_set,
    coupling_fixture,
    estimate_coupling,
    isolated_fields_synthetic,
    synthesize_coupled_fields,
)
from .errors import (
    AccuracyError,
    ConditioningError,
    DataError,
    DegenerateGeometryError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    InsufficientSamplingError,
    SingularMatrixError,
    SuperdirError,
)
from .radiation import SphereQuadrature, impedance_matrix
from .swe import default_fit_grid, fit_wave_coefficients, truncation_degree
from .sweep import SweepSpec, parse_coupling_source, run_sweep

SPEED_OF_LIGHT = 299792458.0
DEFAULT_FREQUENCY = 845e6  # Hz; used only to convert meter-denominated inputs

_ANALYTIC_PATTERNS = ("isotropic", "hertzian-dipole", "half-wave-dipole")

_CONFIG_KEYS = (
    "antennas",
    "pattern",
    "spacing_start",
    "spacing_stop",
    "spacing_steps",
    "theta0_deg",
    "phi0_deg",
    "efficiency",
    "coupling",
    "quadrature_theta",
    "quadrature_phi",
    "truncation",
)


class UsageError(SuperdirError, ValueError):
    """Bad command line or configuration input."""


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code (1 instead of 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt4(value: float) -> str:
    return format(float(value), ".4g")


def _dbi(value: float) -> str:
    if value <= 0.0 or not math.isfinite(value):
        return "-inf"
    return _fmt4(10.0 * math.log10(value))


def _resolve_spacing(args) -> float:
    """Spacing in wavelengths from --spacing or --spacing-m/--frequency."""
    if getattr(args, "spacing_m", None) is not None:
        if args.frequency <= 0.0:
            raise UsageError("--frequency must be positive")
        return args.spacing_m * args.frequency / SPEED_OF_LIGHT
    if args.spacing is None:
        raise UsageError("one of --spacing or --spacing-m is required")
    return args.spacing


def _add_geometry_flags(parser, spacing_required=True):
    parser.add_argument("--antennas", type=int, required=True, help="number of array elements")
    group = parser.add_mutually_exclusive_group(required=spacing_required)
    group.add_argument("--spacing", type=float, help="element spacing in wavelengths")
    group.add_argument("--spacing-m", type=float, help="element spacing in meters (see --frequency)")
    parser.add_argument(
        "--frequency",
        type=float,
        default=DEFAULT_FREQUENCY,
        help="frequency in Hz used only to convert meter-denominated inputs (default 845 MHz)",
    )


def _add_pattern_flag(parser):
    parser.add_argument(
        "--pattern",
        choices=_ANALYTIC_PATTERNS,
        default="isotropic",
        help="common element pattern (default isotropic)",
    )


def _add_quadrature_flags(parser):
    parser.add_argument("--quadrature-theta", type=int, default=64, help="polar quadrature nodes")
    parser.add_argument("--quadrature-phi", type=int, default=128, help="azimuth quadrature nodes")


def _quadrature(args) -> SphereQuadrature:
    return SphereQuadrature.gauss_legendre(args.quadrature_theta, args.quadrature_phi)


def _output_or_stdout(args):
    return args.output if args.output else sys.stdout


# ---- impedance -------------------------------------------------------------


def _cmd_impedance(args) -> int:
    geometry = ArrayGeometry(args.antennas, _resolve_spacing(args))
    pattern = ElementPattern.from_kind(args.pattern)
    matrix = impedance_matrix(
        geometry, pattern, _quadrature(args), loading=args.loading, certified=args.certified
    )
    target = _output_or_stdout(args)
    close = not hasattr(target, "write")
    handle = open(target, "w", newline="") if close else target
    try:
        handle.write("row,col,value\n")
        for r in range(matrix.size):
            for c in range(matrix.size):
                handle.write(f"{r + 1},{c + 1},{format(matrix.values[r, c], '.17g')}\n")
    finally:
        if close:
            handle.close()
    print(f"cond(Z) = {_fmt4(matrix.condition_number)}", file=sys.stderr)
    return 0


# ---- beamform ---------------------------------------------------------------


def _cmd_beamform(args) -> int:
    geometry = ArrayGeometry(args.antennas, _resolve_spacing(args))
    pattern = ElementPattern.from_kind(args.pattern)
    coupling = parse_coupling_source(
        args.coupling,
        geometry.element_count,
        geometry=geometry,
        pattern=pattern,
        truncation=args.truncation or 0,
    )
    impedance = impedance_matrix(geometry, pattern, _quadrature(args), loading=args.loading)
    steering = steering_vector(geometry, pattern, math.radians(args.theta0), math.radians(args.phi0))

    uncoupled = optimal_beamforming(impedance, steering)
    d_trad = coupled_directivity(impedance, coupling, steering, uncoupled.excitation)
    compensated = coupled_beamforming(impedance, coupling, steering)
    g = gain(impedance, coupling, steering, compensated.excitation, args.efficiency)

    print(f"antennas        {geometry.element_count}")
    print(f"spacing         {_fmt4(geometry.spacing)} wavelengths")
    print(f"pattern         {args.pattern}")
    print(f"direction       theta0={_fmt4(args.theta0)} deg  phi0={_fmt4(args.phi0)} deg")
    print(f"cond(Z)         {_fmt4(impedance.condition_number)}")
    print(f"D_max           {_fmt4(uncoupled.directivity)}  ({_dbi(uncoupled.directivity)} dBi)")
    print(f"D_traditional   {_fmt4(d_trad)}  ({_dbi(d_trad)} dBi)")
    print(f"D_coupled       {_fmt4(compensated.directivity)}  ({_dbi(compensated.directivity)} dBi)")
    print(f"gain            {_fmt4(g)}  ({_dbi(g)} dBi)  at efficiency {_fmt4(args.efficiency)}")
    print(f"r_loss          {_fmt4(loss_resistance(args.efficiency))}")
    print("port excitation (unit radiated power):")
    for i, b in enumerate(compensated.excitation, start=1):
        mag = abs(b)
        ph = math.degrees(math.atan2(b.imag, b.real))
        print(f"  {i:2d}  {_fmt4(b.real):>12} {_fmt4(b.imag):>12}j   |b|={_fmt4(mag)}  arg={_fmt4(ph)} deg")
    if args.output:
        with open(args.output, "w", newline="") as handle:
            handle.write("element,re,im\n")
            for i, b in enumerate(compensated.excitation, start=1):
                handle.write(f"{i},{format(b.real, '.17g')},{format(b.imag, '.17g')}\n")
        print(f"excitation written to {args.output}", file=sys.stderr)
    return 0


# ---- sweep ------------------------------------------------------------------


def _parse_spacing_range(text: str):
    parts = text.split(":")
    if len(parts) == 1:
        try:
            start = float(parts[0])
        except ValueError as exc:
            raise UsageError(f"bad --spacing value {text!r}") from exc
        return start, start, 1
    if len(parts) != 3:
        raise UsageError(f"--spacing expects start:stop:steps, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--spacing expects start:stop:steps, got {text!r}") from exc
    return start, stop, steps


_CONFIG_CONVERTERS = {
    "antennas": int,
    "pattern": str,
    "spacing_start": float,
    "spacing_stop": float,
    "spacing_steps": int,
    "theta0_deg": float,
    "phi0_deg": float,
    "efficiency": float,
    "coupling": str,
    "quadrature_theta": int,
    "quadrature_phi": int,
    "truncation": int,
}

_CONFIG_TO_SPEC = {"pattern": "pattern_kind", "coupling": "coupling_source"}


def _spec_from_config_and_flags(args) -> SweepSpec:
    values = {}
    if args.config:
        raw = fileio.read_config(args.config)
        unknown = set(raw) - set(_CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for key, text in raw.items():
            try:
                values[_CONFIG_TO_SPEC.get(key, key)] = _CONFIG_CONVERTERS[key](text)
            except ValueError as exc:
                raise UsageError(f"config key {key!r}: bad value {text!r}") from exc
    if args.antennas is not None:
        values["antennas"] = args.antennas
    if args.pattern is not None:
        values["pattern_kind"] = args.pattern
    if args.spacing is not None:
        start, stop, steps = _parse_spacing_range(args.spacing)
        values["spacing_start"] = start
        values["spacing_stop"] = stop
        values["spacing_steps"] = steps
    if args.theta0 is not None:
        values["theta0_deg"] = args.theta0
    if args.phi0 is not None:
        values["phi0_deg"] = args.phi0
    if args.efficiency is not None:
        values["efficiency"] = args.efficiency
    if args.coupling is not None:
        values["coupling_source"] = args.coupling
    if args.quadrature_theta is not None:
        values["quadrature_theta"] = args.quadrature_theta
    if args.quadrature_phi is not None:
        values["quadrature_phi"] = args.quadrature_phi
    if args.truncation is not None:
        values["truncation"] = args.truncation
    if "antennas" not in values:
        raise UsageError("antennas must be given via --antennas or the config file")
    return SweepSpec(**values)


def _cmd_sweep(args) -> int:
    spec = _spec_from_config_and_flags(args)
    rows = run_sweep(spec)
    text = fileio.sweep_rows_to_csv(rows)
    if args.output:
        with open(args.output, "w", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    flagged = [row for row in rows if row.note]
    for row in flagged:
        print(f"flagged spacing {_fmt4(row.spacing)}: {row.note}", file=sys.stderr)
    return 0


# ---- swe fit ----------------------------------------------------------------


def _resolve_truncation(args, default_radius=None) -> int:
    if getattr(args, "truncation", None) is not None:
        if args.truncation < 1:
            raise UsageError("--truncation must be >= 1")
        return args.truncation
    if getattr(args, "radius", None) is not None:
        return truncation_degree(args.radius)
    if default_radius is not None:
        return truncation_degree(default_radius)
    raise UsageError("one of --truncation or --radius is required")


def _cmd_swe_fit(args) -> int:
    samples = fileio.read_field_samples(args.input)
    trunc = _resolve_truncation(args)
    coeffs = fit_wave_coefficients(samples, trunc)
    fileio.write_coefficients(_output_or_stdout(args), coeffs)
    print(
        f"truncation N = {trunc}, relative residual = {coeffs.residual:.3e}",
        file=sys.stderr,
    )
    return 0


# ---- coupling estimate / synth ----------------------------------------------


def _cmd_coupling_estimate(args) -> int:
    if len(args.isolated) != len(args.active):
        raise UsageError(
            f"{len(args.isolated)} isolated files vs {len(args.active)} active files"
        )
    isolated = [fileio.read_field_samples(path) for path in args.isolated]
    active = [fileio.read_field_samples(path) for path in args.active]
    library = ElementFieldLibrary(isolated=isolated, active=active)
    if args.truncation is None and args.radius is None:
        if args.spacing is None and args.spacing_m is None:
            raise UsageError(
                "one of --truncation, --radius, --spacing or --spacing-m is required"
            )
        spacing = _resolve_spacing(args)
        radius = (library.element_count - 1) * spacing / 2.0 + 0.25
        trunc = truncation_degree(radius)
    else:
        trunc = _resolve_truncation(args)
    qs = build_coefficient_set(library.isolated, trunc)
    qc = build_coefficient_set(library.active, trunc)
    estimate = estimate_coupling(qs, qc)
    fileio.write_coupling(_output_or_stdout(args), estimate)
    print(
        f"truncation N = {trunc}, estimation residual = {estimate.estimation_residual:.3e}",
        file=sys.stderr,
    )
    return 0


def _cmd_coupling_synth(args) -> int:
    import os

    geometry = ArrayGeometry(args.antennas, _resolve_spacing(args))
    pattern = ElementPattern.from_kind(args.pattern)
    fixture = coupling_fixture(geometry.element_count, args.gamma, args.beta)
    if args.truncation is not None:
        trunc = args.truncation
    else:
        radius = geometry.length / 2.0 + 0.25
        trunc = truncation_degree(radius)
    grid = default_fit_grid(trunc)
    isolated = isolated_fields_synthetic(geometry, pattern, grid)
    active = synthesize_coupled_fields(isolated, fixture)
    os.makedirs(args.output_dir, exist_ok=True)
    written = []
    for i, (iso, act) in enumerate(zip(isolated, active), start=1):
        iso_path = os.path.join(args.output_dir, f"isolated_{i}.csv")
        act_path = os.path.join(args.output_dir, f"active_{i}.csv")
        fileio.write_field_samples(iso_path, iso)
        fileio.write_field_samples(act_path, act)
        written.extend((iso_path, act_path))
    truth_path = os.path.join(args.output_dir, "coupling_true.csv")
    fileio.write_coupling(truth_path, fixture)
    written.append(truth_path)
    print(
        f"wrote {len(written)} files to {args.output_dir} (grid {2 * trunc + 2}x{4 * trunc + 4}, N = {trunc})",
        file=sys.stderr,
    )
    return 0


# ---- parser wiring -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="superdir", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_imp = sub.add_parser("impedance", help="emit the normalized impedance matrix")
    _add_geometry_flags(p_imp)
    _add_pattern_flag(p_imp)
    _add_quadrature_flags(p_imp)
    p_imp.add_argument("--loading", type=float, default=0.0, help="diagonal loading delta >= 0")
    p_imp.add_argument("--certified", action="store_true", help="refinement-check the quadrature")
    p_imp.add_argument("--output", help="CSV destination (default stdout)")
    p_imp.set_defaults(handler=_cmd_impedance)

    p_bf = sub.add_parser("beamform", help="optimal excitation for one configuration")
    _add_geometry_flags(p_bf)
    _add_pattern_flag(p_bf)
    _add_quadrature_flags(p_bf)
    p_bf.add_argument("--theta0", type=float, default=0.0, help="steering polar angle in degrees")
    p_bf.add_argument("--phi0", type=float, default=0.0, help="steering azimuth in degrees")
    p_bf.add_argument("--coupling", default="identity", help="identity | file:<path> | synthetic:gamma=<g>,beta=<b>")
    p_bf.add_argument(
        "--truncation",
        type=int,
        default=0,
        help="expansion order for synthetic coupling estimation (0 = automatic)",
    )
    p_bf.add_argument("--efficiency", type=float, default=1.0, help="per-element efficiency in (0, 1]")
    p_bf.add_argument("--loading", type=float, default=0.0, help="diagonal loading delta >= 0")
    p_bf.add_argument("--output", help="write the excitation as CSV")
    p_bf.set_defaults(handler=_cmd_beamform)

    p_sw = sub.add_parser("sweep", help="sweep spacing and emit CSV")
    p_sw.add_argument("--config", help="key = value configuration file")
    p_sw.add_argument("--antennas", type=int)
    p_sw.add_argument("--pattern", choices=_ANALYTIC_PATTERNS)
    p_sw.add_argument("--spacing", help="start:stop:steps in wavelengths")
    p_sw.add_argument("--theta0", type=float, help="steering polar angle in degrees")
    p_sw.add_argument("--phi0", type=float, help="steering azimuth in degrees")
    p_sw.add_argument("--efficiency", type=float)
    p_sw.add_argument("--coupling", help="identity | file:<path> | synthetic:gamma=<g>,beta=<b>")
    p_sw.add_argument("--quadrature-theta", type=int)
    p_sw.add_argument("--quadrature-phi", type=int)
    p_sw.add_argument(
        "--truncation",
        type=int,
        help="expansion order for synthetic coupling estimation (0 = automatic)",
    )
    p_sw.add_argument("--output", help="CSV destination (default stdout)")
    p_sw.set_defaults(handler=_cmd_sweep)

    p_swe = sub.add_parser("swe", help="spherical wave expansion tools")
    swe_sub = p_swe.add_subparsers(dest="swe_command", required=True, parser_class=_Parser)
    p_fit = swe_sub.add_parser("fit", help="fit mode coefficients to a field CSV")
    p_fit.add_argument("--input", required=True, help="field sample CSV")
    p_fit.add_argument("--truncation", type=int, help="expansion order N")
    p_fit.add_argument("--radius", type=float, help="enclosing radius in wavelengths (sets N)")
    p_fit.add_argument("--output", help="coefficient CSV destination (default stdout)")
    p_fit.set_defaults(handler=_cmd_swe_fit)

    p_cp = sub.add_parser("coupling", help="coupling matrix tools")
    cp_sub = p_cp.add_subparsers(dest="coupling_command", required=True, parser_class=_Parser)

    p_est = cp_sub.add_parser("estimate", help="estimate C from field CSVs")
    p_est.add_argument("--isolated", nargs="+", required=True, help="isolated element field CSVs")
    p_est.add_argument("--active", nargs="+", required=True, help="active element field CSVs")
    p_est.add_argument("--truncation", type=int, help="expansion order N")
    p_est.add_argument("--radius", type=float, help="enclosing radius in wavelengths (sets N)")
    group = p_est.add_mutually_exclusive_group()
    group.add_argument("--spacing", type=float, help="element spacing in wavelengths (sets N)")
    group.add_argument("--spacing-m", type=float, help="element spacing in meters (see --frequency)")
    p_est.add_argument(
        "--frequency",
        type=float,
        default=DEFAULT_FREQUENCY,
        help="frequency in Hz used only to convert meter-denominated inputs (default 845 MHz)",
    )
    p_est.add_argument("--output", help="coupling CSV destination (default stdout)")
    p_est.set_defaults(handler=_cmd_coupling_estimate)

    p_syn = cp_sub.add_parser("synth", help="synthesize a coupled-field testbed")
    _add_geometry_flags(p_syn)
    _add_pattern_flag(p_syn)
    p_syn.add_argument("--gamma", type=float, required=True, help="fixture decay in (0, 1)")
    p_syn.add_argument("--beta", type=float, required=True, help="fixture phase progression")
    p_syn.add_argument("--truncation", type=int, help="expansion order for the sample grid")
    p_syn.add_argument("--output-dir", required=True, help="directory for the generated CSVs")
    p_syn.set_defaults(handler=_cmd_coupling_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"superdir: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, InsufficientSamplingError, DimensionError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"superdir: data error: {exc}", file=sys.stderr)
        return 2
    except (
        SingularMatrixError,
        ConditioningError,
        AccuracyError,
        DegenerateGeometryError,
        DegenerateInputError,
    ) as exc:
        print(f"superdir: numerical error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"superdir: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
