"""Core domain types: oscillators, envelopes, squeezing, effective parameters."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmfs.core import (
    CouplingEnvelope,
    EffectiveOscillator,
    NoiseSpectrum,
    Oscillator,
    SqueezeConfig,
    ValidityWarning,
    effective_params,
    lorentzian,
    stroboscopic_envelope,
    susceptibility,
    thermal_force_psd,
    two_tone_envelope,
)

TWO_PI = 2.0 * math.pi


class TestOscillator:
    def test_rejects_zero_frequency(self):
        with pytest.raises(ValueError, match="omega0"):
            Oscillator(omega0=0.0, gamma=1.0)

    def test_rejects_nonpositive_damping(self):
        with pytest.raises(ValueError, match="gamma"):
            Oscillator(omega0=1.0, gamma=0.0)

    def test_rejects_negative_readout_and_occupancy(self):
        with pytest.raises(ValueError):
            Oscillator(omega0=1.0, gamma=0.1, Gamma=-1.0)
        with pytest.raises(ValueError):
            Oscillator(omega0=1.0, gamma=0.1, n_T=-0.5)

    def test_sign_tracks_frequency(self):
        assert Oscillator(omega0=3.0, gamma=0.1).sign == 1
        assert Oscillator(omega0=-3.0, gamma=0.1).sign == -1

    def test_high_q_flag(self):
        assert Oscillator(omega0=1000.0, gamma=1.0).is_high_q
        assert not Oscillator(omega0=10.0, gamma=1.0).is_high_q


class TestSusceptibility:
    def test_static_limit(self):
        osc = Oscillator(omega0=2.0, gamma=0.01)
        assert susceptibility(osc, 0.0) == pytest.approx(1.0 / osc.omega0)

    def test_finite_on_resonance(self):
        osc = Oscillator(omega0=1.0, gamma=1e-3)
        chi = susceptibility(osc, osc.omega0)
        assert np.isfinite(chi)
        assert abs(chi) == pytest.approx(1.0 / (2.0 * osc.gamma), rel=1e-9)

    def test_conjugate_symmetry(self):
        osc = Oscillator(omega0=-1.3, gamma=0.02)
        w = np.linspace(0.1, 4.0, 7)
        assert np.allclose(susceptibility(osc, -w), np.conj(susceptibility(osc, w)))

    def test_lorentzian(self):
        osc = Oscillator(omega0=1.0, gamma=0.25)
        assert lorentzian(osc, 2.0) == 0.25 - 2.0j

    def test_lorentzian_product_identity(self):
        """l(W+L) * l(W-L) == l(W)^2 + L^2 for random (W, L, gamma)."""
        rng = np.random.default_rng(3)
        for _ in range(100):
            gamma, w, lam = rng.uniform(0.01, 2.0), rng.uniform(-3, 3), rng.uniform(-2, 2)
            osc = Oscillator(omega0=1.0, gamma=gamma)
            lhs = lorentzian(osc, w + lam) * lorentzian(osc, w - lam)
            rhs = lorentzian(osc, w) ** 2 + lam**2
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs)

    def test_narrowband_approximation_bound(self):
        """chi(W +- Wt) ~ (+-i s)/(2 l(W -+ Lambda)) with a linear error bound."""
        rng = np.random.default_rng(5)
        for _ in range(50):
            wt = 1.0
            lam = rng.uniform(-5e-3, 5e-3)
            gamma = rng.uniform(1e-4, 5e-3)
            s = rng.choice([-1, 1])
            osc = Oscillator(omega0=s * (wt + lam), gamma=gamma)
            for w in rng.uniform(-5e-3, 5e-3, size=3):
                for sgn in (1, -1):
                    exact = susceptibility(osc, w + sgn * wt)
                    approx = (sgn * 1j * s) / (2.0 * lorentzian(osc, w - sgn * lam))
                    bound = 5.0 * max(abs(w), abs(lam), gamma) / wt
                    assert abs(exact - approx) / abs(exact) <= bound

    def test_thermal_force_psd(self):
        osc = Oscillator(omega0=1.0, gamma=0.5, n_T=3.0)
        assert thermal_force_psd(osc) == pytest.approx(2.0 * 0.5 * 7.0)

    @given(
        gamma=st.floats(min_value=1e-4, max_value=10.0),
        n_T=st.floats(min_value=0.0, max_value=1e4),
    )
    def test_thermal_force_psd_monotone(self, gamma, n_T):
        base = thermal_force_psd(Oscillator(omega0=1.0, gamma=gamma, n_T=n_T))
        assert thermal_force_psd(Oscillator(omega0=1.0, gamma=gamma, n_T=n_T + 1.0)) > base
        assert thermal_force_psd(Oscillator(omega0=1.0, gamma=gamma * 2, n_T=n_T)) > base


class TestCouplingEnvelope:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="not normalized"):
            CouplingEnvelope(1.0, {1: 1.0, -1: 1.0})

    def test_rejects_broken_hermitian_symmetry(self):
        with pytest.raises(ValueError, match="Hermitian"):
            CouplingEnvelope(1.0, {1: 1j / math.sqrt(2), -1: 1j / math.sqrt(2)})

    def test_two_tone_coefficients(self):
        env = two_tone_envelope(5.0, 0.7)
        assert env.k(1) == pytest.approx(np.exp(0.7j) / math.sqrt(2))
        assert env.k(-1) == pytest.approx(np.exp(-0.7j) / math.sqrt(2))
        assert env.k(0) == 0
        assert env.is_two_tone and env.is_stroboscopic
        assert env.max_harmonic == 1

    def test_two_tone_time_domain(self):
        env = two_tone_envelope(3.0, 0.4)
        t = np.linspace(0.0, 2.0, 64)
        expected = math.sqrt(2.0) * np.cos(3.0 * t - 0.4)
        assert np.allclose(env.value(t), expected)

    def test_delay_phases_coefficients(self):
        env = two_tone_envelope(2.0, 0.0)
        tau = 0.3
        shifted = env.delayed(tau)
        assert shifted.k(1) == pytest.approx(env.k(1) * np.exp(2.0j * tau))
        t = np.linspace(0.0, 3.0, 50)
        assert np.allclose(shifted.value(t), env.value(t - tau))

    def test_unit_mean_square(self):
        env = two_tone_envelope(1.0)
        t = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        assert np.mean(env.value(t) ** 2) == pytest.approx(1.0, rel=1e-12)


def _square_pulse(half_width):
    return lambda t: np.where(np.abs(np.asarray(t)) <= half_width, 1.0, 0.0)


class TestStroboscopicEnvelope:
    def test_even_coefficients_vanish(self):
        wt = 1.0
        T = TWO_PI / wt
        env = stroboscopic_envelope(_square_pulse(T / 8.0), 0.0, wt, N_max=32)
        for n in range(-32, 33, 2):
            assert abs(env.k(n)) < 1e-10
        assert env.is_stroboscopic

    def test_normalization_exact(self):
        wt = 2.0
        T = TWO_PI / wt
        env = stroboscopic_envelope(_square_pulse(T / 10.0), 0.0, wt, N_max=48)
        assert sum(abs(c) ** 2 for c in env.coeffs.values()) == pytest.approx(1.0, abs=1e-12)

    def test_fft_oracle(self):
        """Independent FFT of the sampled pulse train reproduces the coefficients."""
        wt = 1.0
        T = TWO_PI / wt
        tau = 0.37

        def pulse(t):
            t = np.asarray(t)
            return np.where(np.abs(t) <= T / 6.0, np.cos(np.pi * t / (T / 3.0)) ** 2, 0.0)

        env = stroboscopic_envelope(pulse, tau, wt, N_max=24)
        n_s = 1 << 14
        t = np.arange(n_s) * (T / n_s)
        k_t = np.zeros(n_s)
        for m in (-1, 0, 1, 2):
            k_t += pulse(t - m * T - tau) - pulse(t - (m + 0.5) * T - tau)
        k_t /= math.sqrt(np.mean(k_t**2))
        # k_n = (1/T) int k(t) exp(+i n wt t) dt  ==  ifft of the samples
        k_fft = np.fft.ifft(k_t)
        for n in range(-24, 25):
            assert abs(env.k(n) - k_fft[n % n_s]) < 2e-4, f"n={n}"

    def test_square_pulse_matches_analytic_fourier_series(self):
        """Duty-d square train: k_n = 2 sinc(n d) * sin-parity factor, n odd."""
        wt = 1.0
        T = TWO_PI / wt
        half = T / 8.0  # duty 1/4
        env = stroboscopic_envelope(_square_pulse(half), 0.0, wt, N_max=48)
        # Analytic (infinite-series) coefficients are proportional to
        # sin(n*wt*half)/n for odd n.  The constructor renormalizes the
        # truncated series to exact unit power, which scales every
        # coefficient by a common factor, so compare harmonic ratios.
        for n in range(3, 20, 2):
            expected = (math.sin(n * wt * half) / n) / math.sin(wt * half)
            # quadrature of the discontinuous pulse limits the accuracy here
            assert env.k(n).real / env.k(1).real == pytest.approx(expected, rel=1e-2, abs=1e-4)
            assert abs(env.k(n).imag) < 1e-10

    def test_two_tone_saturates_first_harmonic(self):
        """|k_1|^2 <= 1/2 for every pulse train; equality only for the pure tone."""
        wt = 1.0
        T = TWO_PI / wt
        rng = np.random.default_rng(7)
        for _ in range(20):
            half = rng.uniform(0.05, 0.24) * T
            env = stroboscopic_envelope(_square_pulse(half), 0.0, wt, N_max=64)
            assert abs(env.k(1)) ** 2 < 0.5
        assert abs(two_tone_envelope(wt).k(1)) ** 2 == pytest.approx(0.5, abs=1e-14)

    def test_rejects_wide_pulse(self):
        wt = 1.0
        T = TWO_PI / wt
        with pytest.raises(ValueError, match="vanish outside"):
            stroboscopic_envelope(_square_pulse(0.3 * T), 0.0, wt, N_max=8)


class TestSqueezeConfig:
    def test_single_mode_psds(self):
        sq = SqueezeConfig(r=0.5, mode="single")
        assert sq.S_amplitude == pytest.approx(math.exp(1.0) / 2)
        assert sq.S_phase == pytest.approx(math.exp(-1.0) / 2)
        assert sq.S_cross == 0.0

    def test_two_mode_psds(self):
        sq = SqueezeConfig(r=0.8, mode="two_mode")
        assert sq.S_amplitude == pytest.approx(math.cosh(1.6) / 2)
        assert sq.S_phase == pytest.approx(math.cosh(1.6) / 2)
        assert sq.S_cross == pytest.approx(math.sinh(1.6) / 2)

    def test_vacuum_at_zero_r(self):
        sq = SqueezeConfig(r=0.0, mode="two_mode")
        assert sq.S_amplitude == 0.5
        assert sq.S_cross == 0.0

    def test_rejects_negative_r_and_bad_mode(self):
        with pytest.raises(ValueError):
            SqueezeConfig(r=-0.1)
        with pytest.raises(ValueError):
            SqueezeConfig(r=0.1, mode="triple")


class TestNoiseSpectrum:
    def test_validates_grid_and_values(self):
        with pytest.raises(ValueError, match="increasing"):
            NoiseSpectrum(np.array([1.0, 1.0]), np.array([0.1, 0.2]))
        with pytest.raises(ValueError, match="finite"):
            NoiseSpectrum(np.array([1.0, 2.0]), np.array([0.1, -0.2]))
        with pytest.raises(ValueError, match="unit"):
            NoiseSpectrum(np.array([1.0]), np.array([0.1]), unit="parsecs")


class TestEffectiveParams:
    def test_two_tone_values(self):
        osc = Oscillator(omega0=-100.0, gamma=0.01, Gamma=0.4, n_T=2.0)
        env = two_tone_envelope(99.0, 0.3)
        eff = effective_params(osc, env)
        assert eff.Gamma_eff == pytest.approx(0.2)
        assert eff.Lambda_ == pytest.approx(1.0)
        assert eff.Omega_eff == pytest.approx(-1.0)
        assert eff.Phi == pytest.approx(0.3)
        assert eff.s == -1
        assert eff.n_T == 2.0

    def test_parametric_compensation_sets_mu(self):
        osc = Oscillator(omega0=10.0, gamma=0.02, Gamma=0.1)
        env = two_tone_envelope(9.9)
        assert effective_params(osc, env, "parametric").mu == pytest.approx(-0.02)
        assert effective_params(osc, env, "raw").mu == 0.0
        assert effective_params(osc, env, "custom", mu=0.5).mu == 0.5

    def test_validity_warning(self):
        osc = Oscillator(omega0=2.0, gamma=0.01, Gamma=0.1)
        env = two_tone_envelope(1.0)  # Lambda = omega_tilde: far outside validity
        with pytest.warns(ValidityWarning):
            eff = effective_params(osc, env)
        assert eff.validity_ratio == pytest.approx(1.0)

    def test_effective_oscillator_consistency_checks(self):
        with pytest.raises(ValueError, match="Omega_eff"):
            EffectiveOscillator(Gamma_eff=0.1, Omega_eff=2.0, gamma=0.1, Lambda_=1.0, Phi=0.0, s=1)
