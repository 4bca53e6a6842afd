import numpy as np
import pytest

from frogkit import (
    FrogTrace,
    InvalidParametersError,
    Signal,
    Spectrum,
    dft,
    frog_freq_coeffs,
    frog_trace,
    idft,
    product_signal,
)
from conftest import random_band_spectrum, random_signal


def delta(n):
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    return Signal(v)


def test_dft_of_delta_is_constant():
    assert np.allclose(dft(delta(4)).values, np.ones(4))


def test_dft_of_constant_is_delta():
    out = dft(Signal(np.ones(4))).values
    assert np.allclose(out, [4, 0, 0, 0])


def test_dft_round_trip(rng):
    x = random_signal(rng, 16)
    back = idft(dft(x)).values
    assert np.max(np.abs(back - x.values)) <= 1e-12 * np.max(np.abs(x.values))


def test_product_signal_delta_cases():
    d = delta(4)
    assert np.allclose(product_signal(d, 0, 1).values, d.values)
    assert np.allclose(product_signal(d, 1, 1).values, 0.0)


def test_product_signal_constant():
    x = Signal(np.ones(4))
    assert np.allclose(product_signal(x, 1, 2).values, 1.0)


def test_product_signal_matches_definition(rng):
    x = random_signal(rng, 12)
    l, m = 3, 2
    out = product_signal(x, m, l).values
    expected = np.array([x.values[n] * x.values[(n + m * l) % 12] for n in range(12)])
    assert np.allclose(out, expected)


def test_product_signal_rejects_bad_step():
    with pytest.raises(InvalidParametersError):
        product_signal(delta(4), 0, 3)


def test_frog_trace_delta():
    tr = frog_trace(delta(4), 1)
    assert np.allclose(tr.data[:, 0], 1.0)
    assert np.allclose(tr.data[:, 1:], 0.0)


def test_frog_trace_constant():
    tr = frog_trace(Signal(np.ones(4)), 1)
    for m in range(4):
        assert np.allclose(tr.data[:, m], [16, 0, 0, 0])


def test_frog_trace_rejects_bad_step():
    with pytest.raises(InvalidParametersError):
        frog_trace(delta(6), 4)


def test_trace_type_rejects_negative_and_bad_shape():
    with pytest.raises(InvalidParametersError):
        FrogTrace(-np.ones((4, 4)), 1)
    with pytest.raises(InvalidParametersError):
        FrogTrace(np.ones((4, 3)), 1)


def test_trace_columns_m_and_r_minus_m_equal(rng):
    # reflected shifts carry the same magnitudes for any signal
    for n, l in [(12, 2), (15, 5), (16, 4)]:
        x = random_signal(rng, n)
        tr = frog_trace(x, l).data
        r = n // l
        for m in range(1, r):
            assert np.max(np.abs(tr[:, m] - tr[:, (r - m) % r])) <= 1e-10 * np.max(tr)


def test_freq_coeffs_single_coefficient():
    n = 8
    c = 3.0
    values = np.zeros(n, dtype=complex)
    values[0] = c
    out = frog_freq_coeffs(Spectrum(values), 2)
    assert np.allclose(out[0, :], c**2 / n)
    assert np.allclose(out[1:, :], 0.0)


def test_freq_coeffs_two_coefficients_hand_value():
    # spectrum (1, 1, 0, 0), N=4, L=1: row 1 equals (1 + w^m)/4
    out = frog_freq_coeffs(Spectrum([1, 1, 0, 0]), 1)
    omega = np.exp(2j * np.pi / 4)
    for m in range(4):
        assert abs(out[1, m] - (1 + omega**m) / 4) < 1e-12


def test_freq_coeffs_match_time_domain(rng):
    for _ in range(20):
        n = int(rng.integers(4, 33))
        l = int(rng.choice([d for d in range(1, n + 1) if n % d == 0]))
        x = random_signal(rng, n)
        tr = frog_trace(x, l).data
        co = np.abs(frog_freq_coeffs(dft(x), l)) ** 2
        assert np.max(np.abs(tr - co)) <= 1e-9 * np.max(tr)


def test_bandlimit_pyramid_rows_vanish(rng):
    n = 16
    xhat, _ = random_band_spectrum(rng, n, n // 2)
    out = frog_freq_coeffs(xhat, 4)
    rows_below = out[2 * (n // 2) - 1 :, :]
    assert np.max(np.abs(rows_below)) <= 1e-12 * np.max(np.abs(out))


def test_column_zero_energy_identity(rng):
    # sum_k trace[k, 0] = N * sum_n |x_n|^4
    x = random_signal(rng, 12)
    tr = frog_trace(x, 3)
    lhs = np.sum(tr.data[:, 0])
    rhs = 12 * np.sum(np.abs(x.values) ** 4)
    assert abs(lhs - rhs) <= 1e-9 * rhs


def test_bandlimit_conformance(rng):
    xhat, band = random_band_spectrum(rng, 16, 5, start=14)
    assert band.conforms(xhat)
    bad = xhat.values.copy()
    bad[8] = 1.0
    assert not band.conforms(Spectrum(bad))


def test_values_are_immutable(rng):
    x = random_signal(rng, 8)
    with pytest.raises(ValueError):
        x.values[0] = 0.0
