import math

import numpy as np
import pytest
from scipy.linalg import expm

from ncqwalk.coins import CoinParams
from ncqwalk.errors import DegeneratePointError
from ncqwalk.momentum import (
    band_structure,
    bloch_unitary,
    bloch_vector,
    dispersion_cos,
    momentum_evolve_oracle,
    oracle_grid_size,
    quasi_energy,
)
from ncqwalk.walk import InitialState, evolve

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])


def test_bloch_unitary_identity_and_hadamard_phases():
    np.testing.assert_allclose(bloch_unitary(0.0, CoinParams(0, 0)), np.eye(2), atol=0)
    for k in np.linspace(-3, 3, 13):
        lam = np.linalg.eigvals(bloch_unitary(k, CoinParams(math.pi / 4, 0.0)))
        np.testing.assert_allclose(np.cos(np.angle(lam)), math.cos(k) * math.cos(math.pi / 4),
                                   atol=1e-12)


def test_valley_point_has_unit_eigenvalue():
    lam = np.linalg.eigvals(bloch_unitary(math.pi / 2, CoinParams(math.pi / 2, math.pi / 2)))
    assert np.min(np.abs(lam - 1.0)) < 1e-12


def test_quasi_energy_cases():
    assert quasi_energy(0.0, CoinParams(0, 0)) == (0.0, -0.0)
    assert quasi_energy(math.pi / 2, CoinParams(math.pi / 2, math.pi / 2))[0] < 1e-15
    e, _ = quasi_energy(0.7, CoinParams(0.5, 0.0))
    assert math.cos(e) == pytest.approx(math.cos(0.7) * math.cos(0.5), abs=1e-14)
    for t in np.linspace(-3, 3, 7):
        e, _ = quasi_energy(0.0, CoinParams(t, math.pi / 2))
        assert e == pytest.approx(math.pi / 2, abs=1e-14)


def test_bloch_vector_free_walk_is_sigma_z():
    n = bloch_vector(math.pi / 4, CoinParams(0, 0))
    assert abs(abs(n[2]) - 1.0) < 1e-12 and abs(n[0]) < 1e-12 and abs(n[1]) < 1e-12
    with pytest.raises(DegeneratePointError):
        bloch_vector(0.0, CoinParams(0, 0))


def test_bloch_vector_reconstructs_unitary():
    rng = np.random.default_rng(5)
    for k, t, p in rng.uniform(-math.pi, math.pi, (1000, 3)):
        params = CoinParams(t, p)
        try:
            n = bloch_vector(k, params)
        except DegeneratePointError:
            continue
        e, _ = quasi_energy(k, params)
        rebuilt = expm(-1j * e * np.einsum("i,ijk->jk", n, PAULI))
        np.testing.assert_allclose(rebuilt, bloch_unitary(k, params), atol=1e-9)


def test_band_structure_grid_and_hadamard_extrema():
    band = band_structure(CoinParams(0.3, 0.2), 3)
    np.testing.assert_array_equal(band.k, [-math.pi, 0.0, math.pi])
    band = band_structure(CoinParams(math.pi / 4, 0.0), 401)
    c = np.cos(band.energy_plus)
    assert c.max() == pytest.approx(math.cos(math.pi / 4), abs=1e-12)
    assert c.min() == pytest.approx(-math.cos(math.pi / 4), abs=1e-12)
    assert all(s.bloch_vector is not None for s in band.samples)
    np.testing.assert_allclose(dispersion_cos(band.k, band.params), c, atol=1e-12)


def test_band_structure_phi_half_pi():
    t = 0.9
    band = band_structure(CoinParams(t, math.pi / 2), 101)
    np.testing.assert_allclose(np.cos(band.energy_plus), np.sin(band.k) * math.sin(t), atol=1e-12)


@pytest.mark.parametrize("theta,phi", [(math.pi / 4, 0.0), (-math.pi / 4, math.pi / 4), (0.0, 0.0)])
def test_momentum_oracle_agrees_with_evolve(theta, phi):
    params = CoinParams(theta, phi)
    a = evolve(InitialState.plus(), params, 7)
    b = momentum_evolve_oracle(InitialState.plus(), params, 7)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-8)


def test_momentum_oracle_zero_steps():
    init = InitialState.custom(2, 1, 1j)
    out = momentum_evolve_oracle(init, CoinParams(0.3, 0.1), 0)
    np.testing.assert_array_equal(out.amplitudes, init.prepare().amplitudes)
    assert oracle_grid_size(7) == 32
