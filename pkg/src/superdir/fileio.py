"""CSV wire formats and the key-value configuration format.

All numeric fields are written with 17 significant digits so that parsing an
emitted file reproduces the original doubles bit for bit. Angles cross the
file boundary in degrees and are converted to radians on read. Malformed
input raises DataError naming the offending 1-based line number.
"""

from __future__ import annotations

import csv
import io
from contextlib import contextmanager

import numpy as np

from .coupling import CouplingMatrix
from .errors import DataError
from .swe import FieldSampleSet, WaveCoefficientSet, index_list, mode_count

FIELD_HEADER = ["theta_deg", "phi_deg", "re_etheta", "im_etheta", "re_ephi", "im_ephi"]
COUPLING_HEADER = ["row", "col", "re", "im"]
COEFFICIENT_HEADER = ["s", "m", "n", "re", "im"]
SWEEP_HEADER = ["spacing", "dmax", "d_traditional", "d_coupled", "gain", "cond_z"]


def _fmt(value: float) -> str:
    """Round-trip-safe decimal rendering of a double."""
    return format(float(value), ".17g")


@contextmanager
def _open_for_write(target):
    if hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", newline="") as handle:
            yield handle


@contextmanager
def _open_for_read(source):
    if hasattr(source, "read"):
        yield source
    else:
        with open(source, "r", newline="") as handle:
            yield handle


def _parse_float(text, line_no, column):
    try:
        return float(text)
    except ValueError as exc:
        raise DataError(f"line {line_no}: column {column!r} is not a number: {text!r}") from exc


def _parse_int(text, line_no, column):
    try:
        return int(text)
    except ValueError as exc:
        raise DataError(f"line {line_no}: column {column!r} is not an integer: {text!r}") from exc


def _check_header(row, expected, what):
    if row is None:
        raise DataError(f"line 1: empty {what} file")
    if [c.strip() for c in row] != expected:
        raise DataError(
            f"line 1: bad {what} header {','.join(row)!r}; expected {','.join(expected)!r}"
        )


def _rows(reader, expected_width, what):
    line_no = 1
    for row in reader:
        line_no += 1
        if not row:
            continue
        if len(row) != expected_width:
            raise DataError(
                f"line {line_no}: {what} row has {len(row)} fields, expected {expected_width}"
            )
        yield line_no, row


# ---- far-field sample sets ---------------------------------------------


def write_field_samples(target, samples: FieldSampleSet) -> None:
    """Write a FieldSampleSet as CSV with angles in degrees."""
    with _open_for_write(target) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(FIELD_HEADER)
        degrees = np.degrees(samples.directions)
        for (th, ph), e_th, e_ph in zip(degrees, samples.etheta, samples.ephi):
            writer.writerow(
                [_fmt(th), _fmt(ph), _fmt(e_th.real), _fmt(e_th.imag), _fmt(e_ph.real), _fmt(e_ph.imag)]
            )


def read_field_samples(source) -> FieldSampleSet:
    """Read a far-field CSV back into a FieldSampleSet (radians internally)."""
    with _open_for_read(source) as handle:
        reader = csv.reader(handle)
        _check_header(next(reader, None), FIELD_HEADER, "field")
        dirs = []
        eth = []
        eph = []
        for line_no, row in _rows(reader, 6, "field"):
            th = _parse_float(row[0], line_no, "theta_deg")
            ph = _parse_float(row[1], line_no, "phi_deg")
            if not 0.0 <= th <= 180.0:
                raise DataError(f"line {line_no}: theta_deg {th!r} outside [0, 180]")
            dirs.append((np.radians(th), np.radians(ph)))
            eth.append(complex(_parse_float(row[2], line_no, "re_etheta"),
                               _parse_float(row[3], line_no, "im_etheta")))
            eph.append(complex(_parse_float(row[4], line_no, "re_ephi"),
                               _parse_float(row[5], line_no, "im_ephi")))
    if not dirs:
        raise DataError("line 2: field file has no sample rows")
    return FieldSampleSet.from_components(np.asarray(dirs, dtype=float), eth, eph)


# ---- coupling matrices ---------------------------------------------------


def write_coupling(target, matrix: CouplingMatrix) -> None:
    """Write a coupling matrix as row,col,re,im triplets (1-based indices)."""
    with _open_for_write(target) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COUPLING_HEADER)
        m = matrix.size
        for r in range(m):
            for c in range(m):
                v = matrix.values[r, c]
                writer.writerow([str(r + 1), str(c + 1), _fmt(v.real), _fmt(v.imag)])


def read_coupling(source) -> CouplingMatrix:
    """Read a coupling CSV; every (row, col) entry must appear exactly once."""
    with _open_for_read(source) as handle:
        reader = csv.reader(handle)
        _check_header(next(reader, None), COUPLING_HEADER, "coupling")
        entries = {}
        for line_no, row in _rows(reader, 4, "coupling"):
            r = _parse_int(row[0], line_no, "row")
            c = _parse_int(row[1], line_no, "col")
            if r < 1 or c < 1:
                raise DataError(f"line {line_no}: indices must be >= 1")
            if (r, c) in entries:
                raise DataError(f"line {line_no}: duplicate entry for ({r}, {c})")
            entries[(r, c)] = complex(
                _parse_float(row[2], line_no, "re"), _parse_float(row[3], line_no, "im")
            )
    if not entries:
        raise DataError("line 2: coupling file has no entries")
    size = max(max(r, c) for r, c in entries)
    if len(entries) != size * size:
        raise DataError(
            f"coupling file holds {len(entries)} entries; a {size}x{size} matrix needs {size * size}"
        )
    values = np.empty((size, size), dtype=complex)
    for (r, c), v in entries.items():
        values[r - 1, c - 1] = v
    return CouplingMatrix(values=values, source="prescribed")


# ---- spherical wave coefficients -----------------------------------------


def write_coefficients(target, coefficients: WaveCoefficientSet) -> None:
    """Write mode coefficients as s,m,n,re,im rows in flattened mode order."""
    with _open_for_write(target) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COEFFICIENT_HEADER)
        for idx, q in zip(index_list(coefficients.truncation), coefficients.coefficients):
            writer.writerow([str(idx.s), str(idx.m), str(idx.n), _fmt(q.real), _fmt(q.imag)])


def read_coefficients(source) -> WaveCoefficientSet:
    """Read a coefficient CSV; rows must follow the flattened mode order.

    The fit residual is not stored in the file, so the returned set carries
    residual 0.0.
    """
    with _open_for_read(source) as handle:
        reader = csv.reader(handle)
        _check_header(next(reader, None), COEFFICIENT_HEADER, "coefficient")
        rows = list(_rows(reader, 5, "coefficient"))
    if not rows:
        raise DataError("line 2: coefficient file has no entries")
    # infer the truncation order from the row count
    count = len(rows)
    trunc = 1
    while mode_count(trunc) < count:
        trunc += 1
    if mode_count(trunc) != count:
        raise DataError(f"{count} coefficient rows do not form a complete mode set")
    coeffs = np.empty(count, dtype=complex)
    for pos, (expected, (line_no, row)) in enumerate(zip(index_list(trunc), rows)):
        s = _parse_int(row[0], line_no, "s")
        m = _parse_int(row[1], line_no, "m")
        n = _parse_int(row[2], line_no, "n")
        if (s, m, n) != (expected.s, expected.m, expected.n):
            raise DataError(
                f"line {line_no}: mode ({s},{m},{n}) out of order; "
                f"expected ({expected.s},{expected.m},{expected.n})"
            )
        coeffs[pos] = complex(
            _parse_float(row[3], line_no, "re"), _parse_float(row[4], line_no, "im")
        )
    return WaveCoefficientSet(coefficients=coeffs, truncation=trunc, residual=0.0)


# ---- sweep results --------------------------------------------------------


def write_sweep_rows(target, rows) -> None:
    """Write sweep rows under the fixed sweep header."""
    with _open_for_write(target) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow(
                [
                    _fmt(row.spacing),
                    _fmt(row.dmax),
                    _fmt(row.d_traditional),
                    _fmt(row.d_coupled),
                    _fmt(row.gain),
                    _fmt(row.condition_number),
                ]
            )


def sweep_rows_to_csv(rows) -> str:
    """Render sweep rows as one CSV string (used for byte-stable output)."""
    buffer = io.StringIO()
    write_sweep_rows(buffer, rows)
    return buffer.getvalue()


# ---- configuration files ---------------------------------------------------


def read_config(source) -> dict:
    """Parse a flat key = value file with # comments.

    Returns the raw string mapping; callers validate keys and values. Blank
    lines are ignored, inline comments are stripped, duplicate keys are
    rejected.
    """
    out = {}
    with _open_for_read(source) as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"line {line_no}: expected 'key = value', got {raw.strip()!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            value = value.strip()
            if not key:
                raise DataError(f"line {line_no}: empty key")
            if key in out:
                raise DataError(f"line {line_no}: duplicate key {key!r}")
            out[key] = value
    return out
