"""Command line behavior: exit codes, output text, files, determinism."""

import re

import numpy as np
import pytest

from superdir import (
    WaveCoefficientSet,
    coupling_fixture,
    read_coefficients,
    read_coupling,
    reconstruct_field,
    write_coupling,
    write_field_samples,
)
from superdir.cli import main
from superdir.swe import default_fit_grid

ENDFIRE_PAIR = ["--antennas", "2", "--spacing", "0.1", "--theta0", "0"]


def _line_value(text, label):
    match = re.search(rf"^{label}\s+(\S+)", text, re.MULTILINE)
    assert match is not None, f"no {label!r} line in:\n{text}"
    return float(match.group(1))


# ---- exit codes ----------------------------------------------------------------


def test_missing_subcommand_exits_one(capsys):
    assert main([]) == 1


def test_unknown_subcommand_exits_one(capsys):
    assert main(["polish"]) == 1


def test_missing_required_flag_exits_one(capsys):
    assert main(["beamform", "--spacing", "0.1"]) == 1


def test_domain_error_exits_one(capsys):
    assert main(["beamform", "--antennas", "0", "--spacing", "0.1"]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_input_file_exits_two(capsys):
    code = main(["swe", "fit", "--input", "no/such/file.csv", "--truncation", "2"])
    assert code == 2
    assert "data error" in capsys.readouterr().err


def test_malformed_field_file_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi\n10,0,oops,0,0,0\n")
    assert main(["swe", "fit", "--input", str(bad), "--truncation", "2"]) == 2
    assert "line 2" in capsys.readouterr().err


def test_coupling_size_mismatch_exits_two(tmp_path, capsys):
    path = tmp_path / "c3.csv"
    write_coupling(path, coupling_fixture(3, 0.2, 0.5))
    code = main(
        ["beamform", "--antennas", "2", "--spacing", "0.1", "--coupling", f"file:{path}"]
    )
    assert code == 2


def test_singular_coupling_exits_three(tmp_path, capsys):
    path = tmp_path / "ones.csv"
    path.write_text("row,col,re,im\n1,1,1,0\n1,2,1,0\n2,1,1,0\n2,2,1,0\n")
    code = main(
        ["beamform", "--antennas", "2", "--spacing", "0.1", "--coupling", f"file:{path}"]
    )
    assert code == 3
    assert "numerical error" in capsys.readouterr().err


def test_fit_without_truncation_or_radius_exits_one(tmp_path, capsys):
    field = tmp_path / "f.csv"
    write_field_samples(
        field,
        reconstruct_field(
            WaveCoefficientSet(np.ones(6, dtype=complex), truncation=1, residual=0.0),
            default_fit_grid(1),
        ),
    )
    assert main(["swe", "fit", "--input", str(field)]) == 1
    assert "--truncation or --radius" in capsys.readouterr().err


def test_estimate_with_mismatched_file_counts_exits_one(tmp_path, capsys):
    field = tmp_path / "f.csv"
    write_field_samples(
        field,
        reconstruct_field(
            WaveCoefficientSet(np.ones(6, dtype=complex), truncation=1, residual=0.0),
            default_fit_grid(1),
        ),
    )
    code = main(
        [
            "coupling",
            "estimate",
            "--isolated", str(field), str(field),
            "--active", str(field),
            "--truncation", "1",
        ]
    )
    assert code == 1


# ---- impedance -----------------------------------------------------------------


def test_impedance_emits_the_closed_form_entries(capsys):
    assert main(["impedance", "--antennas", "2", "--spacing", "0.25"]) == 0
    out, err = capsys.readouterr()
    lines = out.splitlines()
    assert lines[0] == "row,col,value"
    assert len(lines) == 5
    entries = {tuple(line.split(",")[:2]): complex(line.split(",", 2)[2]) for line in lines[1:]}
    assert entries[("1", "1")] == pytest.approx(1.0, abs=1e-12)
    assert entries[("1", "2")] == pytest.approx(2.0 / np.pi, abs=1e-10)
    assert "cond(Z)" in err


# ---- beamform -------------------------------------------------------------------


def test_single_element_beamform_is_trivial(capsys):
    assert main(["beamform", "--antennas", "1", "--spacing", "0.25"]) == 0
    out = capsys.readouterr().out
    assert _line_value(out, "D_max") == pytest.approx(1.0, abs=1e-3)
    assert "|b|=1" in out


def test_beamform_reports_the_compact_endfire_pair(capsys):
    assert main(["beamform", *ENDFIRE_PAIR]) == 0
    out = capsys.readouterr().out
    # the 0.1-wavelength pair beats the half-wavelength pair's 2.0 by far
    kd = 2.0 * np.pi * 0.1
    s = np.sinc(kd / np.pi)
    expected = 2.0 * (1.0 - s * np.cos(kd)) / (1.0 - s * s)
    assert _line_value(out, "D_max") == pytest.approx(expected, abs=2e-3)
    # cond(Z) = (1 + s) / (1 - s) with s = sinc(kd): about 30 here, 1 at d = 0.5
    assert _line_value(out, "cond\\(Z\\)") == pytest.approx((1 + s) / (1 - s), rel=1e-3)


def test_beamform_with_synthetic_coupling_recovers_the_optimum(capsys):
    args = [
        "beamform", *ENDFIRE_PAIR,
        "--coupling", "synthetic:gamma=0.3,beta=1.1",
        "--truncation", "8",
    ]
    assert main(args) == 0
    out = capsys.readouterr().out
    d_max = _line_value(out, "D_max")
    d_trad = _line_value(out, "D_traditional")
    d_coup = _line_value(out, "D_coupled")
    assert d_coup == pytest.approx(d_max, rel=1e-3)
    assert d_trad < d_coup
    assert _line_value(out, "gain") == pytest.approx(d_coup, rel=1e-3)  # efficiency 1


def test_beamform_efficiency_shows_up_in_gain_and_loss(capsys):
    assert main(["beamform", *ENDFIRE_PAIR, "--efficiency", "0.5"]) == 0
    out = capsys.readouterr().out
    assert _line_value(out, "gain") < _line_value(out, "D_coupled")
    assert _line_value(out, "r_loss") == pytest.approx(1.0, abs=1e-9)


def test_beamform_writes_the_excitation_file(tmp_path, capsys):
    target = tmp_path / "b.csv"
    args = ["beamform", "--antennas", "2", "--spacing", "0.5", "--theta0", "90",
            "--output", str(target)]
    assert main(args) == 0
    lines = target.read_text().splitlines()
    assert lines[0] == "element,re,im"
    values = [complex(float(l.split(",")[1]), float(l.split(",")[2])) for l in lines[1:]]
    np.testing.assert_allclose(values, [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-10)


def test_spacing_in_meters_converts_at_the_default_frequency(capsys):
    assert main(["beamform", "--antennas", "2", "--spacing-m", "0.1"]) == 0
    out = capsys.readouterr().out
    match = re.search(r"spacing\s+(\S+) wavelengths", out)
    assert float(match.group(1)) == pytest.approx(0.1 * 845e6 / 299792458.0, rel=1e-3)


def test_spacing_flags_are_mutually_exclusive(capsys):
    code = main(["beamform", "--antennas", "2", "--spacing", "0.1", "--spacing-m", "0.1"])
    assert code == 1


# ---- sweep ----------------------------------------------------------------------


def test_sweep_single_point_to_stdout(capsys):
    args = ["sweep", "--antennas", "2", "--spacing", "0.5:0.5:1", "--theta0", "90"]
    assert main(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "spacing,dmax,d_traditional,d_coupled,gain,cond_z"
    assert len(lines) == 2
    cells = lines[1].split(",")
    assert float(cells[0]) == 0.5
    assert float(cells[1]) == pytest.approx(2.0, abs=1e-9)


def test_sweep_writes_the_output_file(tmp_path, capsys):
    target = tmp_path / "s.csv"
    args = ["sweep", "--antennas", "2", "--spacing", "0.2:0.4:3", "--output", str(target)]
    assert main(args) == 0
    assert capsys.readouterr().out == ""
    assert len(target.read_text().splitlines()) == 4


def test_sweep_flags_singular_points_on_stderr_but_exits_zero(tmp_path, capsys):
    path = tmp_path / "ones.csv"
    write_coupling(path, coupling_fixture(2, gamma=0.999999999, beta=0.0))
    path.write_text("row,col,re,im\n1,1,1,0\n1,2,1,0\n2,1,1,0\n2,2,1,0\n")
    args = ["sweep", "--antennas", "2", "--spacing", "0.2:0.3:2",
            "--coupling", f"file:{path}"]
    assert main(args) == 0
    out, err = capsys.readouterr()
    assert out.count("nan") >= 2
    assert "flagged spacing" in err


def test_sweep_config_file_drives_the_run(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# broadside pair\n"
        "antennas = 2\n"
        "pattern = isotropic\n"
        "spacing_start = 0.5\n"
        "spacing_stop = 0.5\n"
        "spacing_steps = 1\n"
        "theta0_deg = 90\n"
    )
    assert main(["sweep", "--config", str(cfg)]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert float(row[1]) == pytest.approx(2.0, abs=1e-9)


def test_sweep_flags_override_the_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "antennas = 2\nspacing_start = 0.5\nspacing_stop = 0.5\nspacing_steps = 1\n"
        "theta0_deg = 90\n"
    )
    assert main(["sweep", "--config", str(cfg), "--antennas", "3"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert float(row[1]) == pytest.approx(3.0, abs=1e-9)  # broadside optimum is M


def test_sweep_unknown_config_key_exits_one(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("antennas = 2\nwavelength = 0.3\n")
    assert main(["sweep", "--config", str(cfg)]) == 1
    assert "wavelength" in capsys.readouterr().err


def test_sweep_without_antennas_anywhere_exits_one(capsys):
    assert main(["sweep", "--spacing", "0.1:0.2:2"]) == 1


def test_sweep_output_is_stable_across_thread_caps(tmp_path, capsys, monkeypatch):
    args = ["sweep", "--antennas", "2", "--spacing", "0.1:0.4:4",
            "--coupling", "synthetic:gamma=0.2,beta=0.7", "--truncation", "8"]
    monkeypatch.setenv("SUPERDIR_THREADS", "1")
    assert main(args) == 0
    serial = capsys.readouterr().out
    monkeypatch.setenv("SUPERDIR_THREADS", "4")
    assert main(args) == 0
    assert capsys.readouterr().out == serial


# ---- swe fit --------------------------------------------------------------------


def test_fit_round_trips_a_band_limited_field(tmp_path, capsys):
    rng = np.random.default_rng(90)
    coeffs = rng.standard_normal(30) + 1j * rng.standard_normal(30)
    original = WaveCoefficientSet(coefficients=coeffs, truncation=3, residual=0.0)
    field_path = tmp_path / "field.csv"
    write_field_samples(field_path, reconstruct_field(original, default_fit_grid(3)))
    out_path = tmp_path / "coeffs.csv"
    args = ["swe", "fit", "--input", str(field_path), "--truncation", "3",
            "--output", str(out_path)]
    assert main(args) == 0
    assert "relative residual" in capsys.readouterr().err
    restored = read_coefficients(out_path)
    np.testing.assert_allclose(restored.coefficients, coeffs, atol=1e-9)


def test_fit_radius_flag_sets_the_truncation(tmp_path, capsys):
    original = WaveCoefficientSet(np.ones(6, dtype=complex), truncation=1, residual=0.0)
    field_path = tmp_path / "field.csv"
    write_field_samples(field_path, reconstruct_field(original, default_fit_grid(12)))
    assert main(["swe", "fit", "--input", str(field_path), "--radius", "0.25"]) == 0
    assert "N = 12" in capsys.readouterr().err  # ceil(2 pi 0.25) + 10


# ---- coupling synth + estimate ----------------------------------------------------


def test_synth_then_estimate_recovers_the_true_coupling(tmp_path, capsys):
    workdir = tmp_path / "testbed"
    synth = ["coupling", "synth", "--antennas", "2", "--spacing", "0.2",
             "--pattern", "hertzian-dipole", "--gamma", "0.3", "--beta", "1.1",
             "--truncation", "8", "--output-dir", str(workdir)]
    assert main(synth) == 0
    assert "wrote 5 files" in capsys.readouterr().err

    out_path = tmp_path / "estimate.csv"
    estimate = ["coupling", "estimate",
                "--isolated", str(workdir / "isolated_1.csv"), str(workdir / "isolated_2.csv"),
                "--active", str(workdir / "active_1.csv"), str(workdir / "active_2.csv"),
                "--truncation", "8", "--output", str(out_path)]
    assert main(estimate) == 0
    err = capsys.readouterr().err
    assert "estimation residual" in err
    residual = float(re.search(r"estimation residual = (\S+)", err).group(1))
    assert residual < 1e-9

    truth = read_coupling(workdir / "coupling_true.csv")
    found = read_coupling(out_path)
    np.testing.assert_allclose(found.values, truth.values, atol=1e-8)


def test_estimate_can_take_the_spacing_instead_of_a_truncation(tmp_path, capsys):
    workdir = tmp_path / "testbed"
    synth = ["coupling", "synth", "--antennas", "2", "--spacing", "0.2",
             "--gamma", "0.25", "--beta", "0.8", "--output-dir", str(workdir)]
    assert main(synth) == 0
    capsys.readouterr()
    estimate = ["coupling", "estimate",
                "--isolated", str(workdir / "isolated_1.csv"), str(workdir / "isolated_2.csv"),
                "--active", str(workdir / "active_1.csv"), str(workdir / "active_2.csv"),
                "--spacing", "0.2", "--output", str(tmp_path / "c.csv")]
    assert main(estimate) == 0
    assert "N = 13" in capsys.readouterr().err  # radius 0.35 -> ceil(2 pi 0.35) + 10
    found = read_coupling(tmp_path / "c.csv")
    np.testing.assert_allclose(found.values, coupling_fixture(2, 0.25, 0.8).values, atol=1e-8)
