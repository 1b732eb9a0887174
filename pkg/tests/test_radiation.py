"""Sphere quadrature, the normalized impedance matrix, and directivity."""

import numpy as np
import pytest

from oracles import brute_force_directivity
from superdir import (
    AccuracyError,
    ArrayGeometry,
    ConditioningError,
    DegenerateInputError,
    DomainError,
    ElementPattern,
    SphereQuadrature,
    default_quadrature,
    directivity,
    impedance_matrix,
)


def _sinc_matrix(geometry):
    """Closed-form isotropic impedance matrix z_mn = sinc(2 pi d_mn).

    Analytic evaluation of the radiated-power integral for unit patterns;
    completely independent of the library quadrature.
    """
    z = geometry.z_positions
    arg = 2.0 * np.pi * np.abs(z[:, None] - z[None, :])
    out = np.ones_like(arg)
    off = arg > 0
    out[off] = np.sin(arg[off]) / arg[off]
    return out


# ---- quadrature -------------------------------------------------------------


def test_quadrature_weights_positive_and_integrate_constants():
    quad = SphereQuadrature.gauss_legendre(32, 64)
    assert np.all(quad.theta_weights > 0)
    assert abs(quad.weights().sum() / (4.0 * np.pi) - 1.0) < 1e-14
    assert quad.directions().shape == (32 * 64, 2)


def test_quadrature_rejects_bad_inputs():
    with pytest.raises(DomainError):
        SphereQuadrature.gauss_legendre(0, 16)
    with pytest.raises(DomainError):
        SphereQuadrature.gauss_legendre(16, 0)
    with pytest.raises(DomainError):
        SphereQuadrature(theta=np.array([1.0]), theta_weights=np.array([-2.0]), phi_count=4)


def test_default_quadrature_is_cached_and_sized():
    quad = default_quadrature()
    assert quad is default_quadrature()
    assert quad.theta.size == 64 and quad.phi_count == 128


# ---- impedance matrix -------------------------------------------------------


def test_isotropic_diagonal_is_unity():
    for m, d in [(1, 0.3), (3, 0.11), (5, 0.48)]:
        z = impedance_matrix(ArrayGeometry(m, d), ElementPattern.isotropic())
        np.testing.assert_allclose(np.diag(z.values), 1.0, rtol=0, atol=1e-14)


def test_half_wavelength_pair_is_identity():
    z = impedance_matrix(ArrayGeometry(2, 0.5), ElementPattern.isotropic())
    np.testing.assert_allclose(z.values, np.eye(2), atol=1e-14)


def test_quarter_wavelength_off_diagonal_is_two_over_pi():
    z = impedance_matrix(ArrayGeometry(2, 0.25), ElementPattern.isotropic())
    assert z.values[0, 1] == pytest.approx(2.0 / np.pi, abs=1e-12)


@pytest.mark.parametrize("spacing", [0.05, 0.1, 0.25, 0.5])
def test_quadrature_matches_the_sinc_closed_form(spacing):
    geometry = ArrayGeometry(4, spacing)
    z = impedance_matrix(geometry, ElementPattern.isotropic())
    np.testing.assert_allclose(z.values, _sinc_matrix(geometry), rtol=0, atol=1e-10)


def test_impedance_is_symmetric_psd_for_dipole_patterns():
    for pattern in (ElementPattern.hertzian_dipole(), ElementPattern.half_wave_dipole()):
        z = impedance_matrix(ArrayGeometry(4, 0.15), pattern)
        np.testing.assert_array_equal(z.values, z.values.T)
        eigenvalues = np.linalg.eigvalsh(z.values)
        assert np.all(eigenvalues >= -1e-12)


def test_doubling_quadrature_density_changes_nothing_measurable():
    geometry = ArrayGeometry(4, 0.4)
    pattern = ElementPattern.half_wave_dipole()
    base = impedance_matrix(geometry, pattern)
    dense = impedance_matrix(geometry, pattern, default_quadrature().double_density())
    assert np.max(np.abs(base.values - dense.values)) < 1e-10


def test_certified_mode_accepts_the_default_rule():
    z = impedance_matrix(
        ArrayGeometry(3, 0.2), ElementPattern.isotropic(), certified=True
    )
    np.testing.assert_allclose(z.values, _sinc_matrix(ArrayGeometry(3, 0.2)), atol=1e-10)


def test_certified_mode_rejects_a_rule_too_coarse_for_the_array():
    coarse = SphereQuadrature.gauss_legendre(3, 4)
    with pytest.raises(AccuracyError):
        impedance_matrix(
            ArrayGeometry(4, 0.5), ElementPattern.isotropic(), coarse, certified=True
        )


def test_diagonal_loading_adds_delta_to_the_diagonal():
    geometry = ArrayGeometry(3, 0.1)
    plain = impedance_matrix(geometry, ElementPattern.isotropic())
    loaded = impedance_matrix(geometry, ElementPattern.isotropic(), loading=0.01)
    np.testing.assert_allclose(loaded.values, plain.values + 0.01 * np.eye(3), atol=1e-15)
    assert loaded.condition_number < plain.condition_number
    with pytest.raises(DomainError):
        impedance_matrix(geometry, ElementPattern.isotropic(), loading=-1e-3)


def test_condition_number_grows_as_spacing_shrinks():
    pattern = ElementPattern.isotropic()
    conds = [
        impedance_matrix(ArrayGeometry(3, d), pattern).condition_number
        for d in (0.5, 0.2, 0.05)
    ]
    assert conds[0] < conds[1] < conds[2]


def test_geometry_hash_distinguishes_configurations():
    a = impedance_matrix(ArrayGeometry(2, 0.1), ElementPattern.isotropic())
    b = impedance_matrix(ArrayGeometry(2, 0.2), ElementPattern.isotropic())
    c = impedance_matrix(ArrayGeometry(2, 0.1), ElementPattern.hertzian_dipole())
    assert len({a.geometry_hash, b.geometry_hash, c.geometry_hash}) == 3


# ---- directivity ------------------------------------------------------------


def test_single_isotropic_element_has_unit_directivity_everywhere():
    geometry = ArrayGeometry(1, 0.1)
    pattern = ElementPattern.isotropic()
    z = impedance_matrix(geometry, pattern)
    rng = np.random.default_rng(21)
    for theta, phi in zip(rng.uniform(0, np.pi, 5), rng.uniform(0, 2 * np.pi, 5)):
        assert directivity(geometry, pattern, z, [1.0], theta, phi) == pytest.approx(1.0, abs=1e-12)


def test_broadside_pair_at_half_wavelength_gives_two():
    geometry = ArrayGeometry(2, 0.5)
    pattern = ElementPattern.isotropic()
    z = impedance_matrix(geometry, pattern)
    value = directivity(geometry, pattern, z, [1.0, 1.0], np.pi / 2, 0.0)
    assert value == pytest.approx(2.0, abs=1e-12)


def test_close_pair_directivity_matches_direct_integration():
    geometry = ArrayGeometry(2, 0.05)
    pattern = ElementPattern.isotropic()
    z = impedance_matrix(geometry, pattern)
    quad_form = directivity(geometry, pattern, z, [1.0, 1.0], np.pi / 2, 0.0)
    brute = brute_force_directivity(geometry, pattern, [1.0, 1.0], np.pi / 2, 0.0)
    assert quad_form == pytest.approx(brute, rel=1e-8)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_quadratic_form_equals_brute_force_for_random_excitations(m):
    rng = np.random.default_rng(100 + m)
    geometry = ArrayGeometry(m, float(rng.uniform(0.08, 0.5)))
    for pattern in (ElementPattern.isotropic(), ElementPattern.hertzian_dipole()):
        z = impedance_matrix(geometry, pattern)
        a = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        theta0 = float(rng.uniform(0.2, np.pi - 0.2))
        phi0 = float(rng.uniform(0.3, 1.0))
        quad_form = directivity(geometry, pattern, z, a, theta0, phi0)
        brute = brute_force_directivity(geometry, pattern, a, theta0, phi0)
        assert quad_form == pytest.approx(brute, rel=1e-8)


def test_directivity_is_invariant_under_excitation_scaling():
    geometry = ArrayGeometry(3, 0.2)
    pattern = ElementPattern.isotropic()
    z = impedance_matrix(geometry, pattern)
    rng = np.random.default_rng(22)
    a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    base = directivity(geometry, pattern, z, a, 0.4, 1.2)
    for _ in range(5):
        scale = complex(rng.standard_normal(), rng.standard_normal())
        scaled = directivity(geometry, pattern, z, scale * a, 0.4, 1.2)
        assert scaled == pytest.approx(base, rel=1e-12)


def test_zero_excitation_is_rejected():
    geometry = ArrayGeometry(2, 0.3)
    pattern = ElementPattern.isotropic()
    z = impedance_matrix(geometry, pattern)
    with pytest.raises(DegenerateInputError):
        directivity(geometry, pattern, z, [0.0, 0.0], 0.5, 0.5)


def test_nonpositive_radiated_power_is_flagged():
    geometry = ArrayGeometry(2, 0.3)
    pattern = ElementPattern.isotropic()
    z = impedance_matrix(geometry, pattern)
    broken = type(z)(
        values=-z.values, geometry_hash=z.geometry_hash, condition_number=z.condition_number
    )
    with pytest.raises(ConditioningError):
        directivity(geometry, pattern, broken, [1.0, 0.5], 0.5, 0.5)
