"""Serial/parallel force-sensing spectra, matching conditions, free-mass probe."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize

from qmfs.core import EffectiveOscillator, Oscillator, SqueezeConfig
from qmfs.sensing import (
    FreeMassProbe,
    SensingPair,
    aux_thermal_psd,
    freemass_probe,
    k_res,
    match_report,
    matched_brackets,
    matched_psds,
    parallel_bracket,
    parallel_force_psd,
    parallel_optimal_weight,
    partial_match_psds,
    pragmatic_band_criterion,
    serial_bracket,
    serial_force_psd,
    _parallel_channel_spectra,
)

TWO_PI = 2.0 * math.pi
RNG_SEED = 20240811


def _aux(Gamma_eff, Omega_eff, gamma, n_T=0.0):
    return EffectiveOscillator(
        Gamma_eff=Gamma_eff,
        Omega_eff=Omega_eff,
        gamma=gamma,
        Lambda_=abs(Omega_eff),
        Phi=0.0,
        s=1 if Omega_eff > 0 else -1,
        n_T=n_T,
    )


def _matched_pair(rng, topology, n_T=None):
    omega_P = rng.uniform(0.5, 2.0)
    gamma = omega_P * rng.uniform(1e-4, 1e-2)
    Gamma_P = omega_P * rng.uniform(1e-3, 0.1)
    probe = Oscillator(omega0=omega_P, gamma=gamma, Gamma=Gamma_P)
    aux = _aux(Gamma_P, -omega_P, gamma, n_T=rng.uniform(0, 10) if n_T is None else n_T)
    mode = "single" if topology == "serial" else "two_mode"
    return SensingPair(
        probe=probe,
        auxiliary=aux,
        squeeze=SqueezeConfig(r=rng.uniform(0.0, 1.2), mode=mode),
        topology=topology,
    )


def _mismatched_pair(rng, topology):
    omega_P = rng.uniform(0.5, 2.0)
    probe = Oscillator(
        omega0=omega_P, gamma=omega_P * rng.uniform(1e-4, 1e-2), Gamma=omega_P * 0.05
    )
    # keep 46a, break 46b/46c
    Omega_A = -omega_P * rng.uniform(0.2, 0.8)
    Gamma_A = probe.Gamma * probe.omega0 / abs(Omega_A)
    aux = _aux(Gamma_A, Omega_A, probe.gamma * rng.uniform(2.0, 5.0), n_T=1.0)
    mode = "single" if topology == "serial" else "two_mode"
    return SensingPair(
        probe=probe,
        auxiliary=aux,
        squeeze=SqueezeConfig(r=0.7, mode=mode),
        topology=topology,
    )


class TestValidation:
    def test_topology_and_squeeze_mode_coupled(self):
        probe = Oscillator(omega0=1.0, gamma=1e-3, Gamma=0.01)
        aux = _aux(0.01, -1.0, 1e-3)
        with pytest.raises(ValueError, match="single"):
            SensingPair(probe, aux, SqueezeConfig(r=0.1, mode="two_mode"), "serial")
        with pytest.raises(ValueError, match="two_mode"):
            SensingPair(probe, aux, SqueezeConfig(r=0.1, mode="single"), "parallel")
        with pytest.raises(ValueError, match="topology"):
            SensingPair(probe, aux, SqueezeConfig(r=0.1), "diagonal")

    def test_parallel_needs_coupled_auxiliary(self):
        probe = Oscillator(omega0=1.0, gamma=1e-3, Gamma=0.01)
        aux = _aux(0.0, -1.0, 1e-3)
        with pytest.raises(ValueError, match="parallel"):
            SensingPair(probe, aux, SqueezeConfig(r=0.1, mode="two_mode"), "parallel")

    def test_k_res_rejects_zero_rates_and_free_mass(self):
        probe = Oscillator(omega0=1.0, gamma=1e-3, Gamma=0.0)
        aux = _aux(0.01, -1.0, 1e-3)
        pair = SensingPair(probe, aux, SqueezeConfig(r=0.0), "serial")
        with pytest.raises(ValueError, match="readout"):
            k_res(pair, 0.5)
        fm = SensingPair(FreeMassProbe(g_P=1.0), aux, SqueezeConfig(r=0.0), "serial")
        with pytest.raises(ValueError, match="free mass"):
            k_res(fm, 0.5)


class TestKRes:
    def test_null_iff_matched(self):
        rng = np.random.default_rng(RNG_SEED)
        for _ in range(10):
            pair = _matched_pair(rng, "serial")
            report = match_report(pair)
            assert report.all_matched
            omega = pair.probe.omega0 * np.linspace(0.1, 3.0, 30)
            scale = np.abs(pair.D_P(omega) / pair.probe.omega0) * math.sqrt(
                pair.auxiliary.Gamma_eff / pair.probe.Gamma
            )
            assert np.all(np.abs(k_res(pair, omega)) < 1e-10 * scale)

    def test_nonzero_when_any_condition_broken(self):
        rng = np.random.default_rng(RNG_SEED + 1)
        pair = _mismatched_pair(rng, "serial")
        report = match_report(pair)
        assert not report.all_matched
        omega = pair.probe.omega0 * np.linspace(0.3, 2.0, 11)
        assert np.max(np.abs(k_res(pair, omega))) > 0

    def test_damping_only_mismatch_imaginary_floor(self):
        """With only gamma mismatched, (Im K_res)^2 = W^2 (1/Q_P - 1/Q_A)^2."""
        probe = Oscillator(omega0=1.0, gamma=1e-3, Gamma=0.02)
        aux = _aux(0.02, -1.0, 3e-3)
        pair = SensingPair(probe, aux, SqueezeConfig(r=0.0), "serial")
        report = match_report(pair)
        omega = np.linspace(0.2, 2.0, 9)
        got = np.imag(k_res(pair, omega)) ** 2
        assert np.allclose(got, report.im_kres_sq(omega), rtol=1e-10)

    def test_counter_rotating_twin(self):
        probe = Oscillator(omega0=2.0, gamma=1e-3, Gamma=0.05)
        aux = _aux(0.05, -2.0, 1e-3)
        pair = SensingPair(probe, aux, SqueezeConfig(r=0.0), "serial")
        assert abs(k_res(pair, 1.7)) < 1e-14


class TestSerialPsd:
    def test_real_positive_conjugate_symmetric(self):
        rng = np.random.default_rng(RNG_SEED + 2)
        pair = _mismatched_pair(rng, "serial")
        w = pair.probe.omega0 * np.linspace(0.1, 3.0, 17)
        sp = serial_force_psd(pair, w)
        sm = serial_force_psd(pair, -w)
        assert np.all(sp > 0)
        assert np.allclose(sp, sm, rtol=1e-12)

    def test_matched_reduction(self):
        rng = np.random.default_rng(RNG_SEED + 3)
        for _ in range(5):
            pair = _matched_pair(rng, "serial")
            w = pair.probe.omega0 * np.linspace(0.2, 2.5, 20)
            general = serial_force_psd(pair, w)
            ser, _par = matched_psds(pair, w)
            assert np.allclose(general, ser, rtol=1e-10)

    def test_matched_form_explicit(self):
        pair_rng = np.random.default_rng(RNG_SEED + 4)
        pair = _matched_pair(pair_rng, "serial", n_T=2.0)
        w = 1.3 * pair.probe.omega0
        r = pair.squeeze.r
        D_P = pair.D_P(w)
        expected = (
            abs(D_P) ** 2 / pair.g_P * math.exp(-2 * r) + 2.0 * aux_thermal_psd(pair.auxiliary, w)
        ) / (2.0 * pair.probe.omega0)
        assert serial_force_psd(pair, w) == pytest.approx(expected, rel=1e-12)

    def test_ideal_qmfs_limit(self):
        """S_T = 0, r -> large: the serial spectrum is shot-noise only and -> 0."""
        probe = Oscillator(omega0=1.0, gamma=1e-4, Gamma=0.05)
        aux = _aux(0.05, -1.0, 1e-4, n_T=0.0)
        vals = []
        for r in (0.0, 1.0, 2.0, 3.0):
            pair = SensingPair(probe, aux, SqueezeConfig(r=r), "serial")
            # suppress the thermal term by overriding gamma contribution:
            w = 0.7
            shot = abs(pair.D_P(w)) ** 2 / pair.g_P * math.exp(-2 * r)
            vals.append(shot)
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_no_auxiliary_limit(self):
        """Gamma_eff = 0 leaves the probe-only spectrum with full probe QBA."""
        probe = Oscillator(omega0=1.0, gamma=1e-3, Gamma=0.05)
        aux = _aux(0.0, -1.0, 1e-3)
        pair = SensingPair(probe, aux, SqueezeConfig(r=0.3), "serial")
        w = 0.9
        r = pair.squeeze.r
        expected = (
            abs(pair.D_P(w)) ** 2 / pair.g_P * math.exp(-2 * r) + pair.g_P * math.exp(2 * r)
        ) / (2.0 * probe.omega0)
        assert serial_force_psd(pair, w) == pytest.approx(expected, rel=1e-12)


class TestParallelPsd:
    def test_brute_force_alpha_oracle(self):
        """Closed-form optimized PSD equals a numeric optimization over complex alpha."""
        rng = np.random.default_rng(RNG_SEED + 5)
        checked = 0
        for _ in range(7):
            pair = _mismatched_pair(rng, "parallel")
            for w in pair.probe.omega0 * rng.uniform(0.3, 2.0, size=3):
                S_PP, S_AA, S_PA = _parallel_channel_spectra(pair, float(w))

                def cost(x):
                    a = x[0] + 1j * x[1]
                    return float(S_PP.real + abs(a) ** 2 * S_AA.real + 2 * (np.conj(a) * S_PA).real)

                a0 = parallel_optimal_weight(pair, float(w))
                res = minimize(
                    cost,
                    [a0.real * 1.2 + 0.05, a0.imag * 1.2 + 0.05],
                    method="Nelder-Mead",
                    options={"xatol": 1e-13, "fatol": 1e-15},
                )
                closed = float(parallel_force_psd(pair, float(w)))
                assert abs(res.fun - closed) <= 1e-6 * closed
                checked += 1
        assert checked >= 20

    def test_unsqueezed_channels_are_uncorrelated(self):
        """r = 0: no cross-correlation, the optimal weight is zero and the
        optimized spectrum is the probe channel alone (signal lives only in
        the probe channel, so mixing in the auxiliary can only add noise)."""
        probe = Oscillator(omega0=1.0, gamma=1e-3, Gamma=0.03)
        aux = _aux(0.05, -0.6, 2e-3, n_T=0.5)
        pair = SensingPair(probe, aux, SqueezeConfig(r=0.0, mode="two_mode"), "parallel")
        for w in (0.4, 0.9, 1.5):
            S_PP, _S_AA, S_PA = _parallel_channel_spectra(pair, w)
            assert abs(S_PA) < 1e-15
            assert abs(parallel_optimal_weight(pair, w)) < 1e-15
            assert float(parallel_force_psd(pair, w)) == pytest.approx(S_PP.real, rel=1e-12)

    def test_optimal_not_worse_than_single_channel(self):
        rng = np.random.default_rng(RNG_SEED + 6)
        for _ in range(5):
            pair = _mismatched_pair(rng, "parallel")
            for w in pair.probe.omega0 * np.linspace(0.2, 2.0, 7):
                S_PP, S_AA, _ = _parallel_channel_spectra(pair, float(w))
                opt = float(parallel_force_psd(pair, float(w)))
                assert opt <= S_PP.real * (1 + 1e-12)

    def test_matched_reduction(self):
        rng = np.random.default_rng(RNG_SEED + 7)
        for _ in range(5):
            pair = _matched_pair(rng, "parallel")
            w = pair.probe.omega0 * np.linspace(0.2, 2.5, 20)
            general = parallel_force_psd(pair, w)
            _ser, par = matched_psds(pair, w)
            assert np.allclose(general, par, rtol=1e-10)

    def test_matched_form_zero_thermal(self):
        """S~_T = 0: the matched parallel PSD reduces to K_P / (2 cosh2r) (bracket units)."""
        rng = np.random.default_rng(RNG_SEED + 8)
        pair = _matched_pair(rng, "parallel", n_T=0.0)
        # kill thermal: n_T = 0 still leaves vacuum gamma(2nT+1); scale it out
        w = 1.4 * pair.probe.omega0
        K_P = pair.K_P(w)
        S_t = pair.S_T_tilde(w)
        expected = K_P * (K_P + 2 * S_t * math.cosh(2 * pair.squeeze.r)) / (
            K_P * math.cosh(2 * pair.squeeze.r) + 2 * S_t
        )
        _ser, par = matched_brackets(pair, w)
        assert par == pytest.approx(expected, rel=1e-12)


class TestMatchedAndPartial:
    def test_matched_psds_rejects_mismatch(self):
        rng = np.random.default_rng(RNG_SEED + 9)
        pair = _mismatched_pair(rng, "serial")
        with pytest.raises(ValueError, match="not matched"):
            matched_psds(pair, 1.0)

    def test_partial_match_requires_qba_condition(self):
        probe = Oscillator(omega0=1.0, gamma=1e-3, Gamma=0.02)
        aux = _aux(0.01, -0.5, 1e-3)  # g_A = -0.005 != -g_P = -0.02
        pair = SensingPair(probe, aux, SqueezeConfig(r=0.0), "serial")
        with pytest.raises(ValueError, match="readout-product"):
            partial_match_psds(pair, 1.0)

    def test_partial_match_reduces_to_matched_when_responses_equal(self):
        rng = np.random.default_rng(RNG_SEED + 10)
        pair = _matched_pair(rng, "serial")
        w = pair.probe.omega0 * np.linspace(0.3, 2.0, 9)
        ser_partial, par_partial = partial_match_psds(pair, w)
        ser, par = matched_psds(pair, w)
        assert np.allclose(ser_partial, ser, rtol=1e-12)
        assert np.allclose(par_partial, par, rtol=1e-12)

    def test_serial_residual_decays_at_high_frequency(self):
        """QBA-matched but frequency/damping-mismatched serial residual shrinks as W grows."""
        probe = Oscillator(omega0=0.01, gamma=1e-5, Gamma=10.0)
        aux = _aux(1.0, -0.1, 3e-5)
        pair = SensingPair(probe, aux, SqueezeConfig(r=0.5), "serial")
        w = np.geomspace(1.0, 100.0, 12)
        r = pair.squeeze.r
        resid = pair.g_P * np.abs(1 + (pair.g_A / pair.g_P) * pair.D_P(w) / pair.D_A(w)) ** 2
        resid = resid * math.exp(2 * r)
        assert np.all(np.diff(resid) < 0)


class TestFreeMass:
    def test_product_from_interferometer_parameters(self):
        J = (TWO_PI * 100.0) ** 3
        kappa = TWO_PI * 500.0
        probe = freemass_probe(J, kappa)
        assert probe.g_P == pytest.approx(2.0 * J / kappa)
        with pytest.raises(ValueError):
            freemass_probe(-1.0, kappa)

    def test_response_is_even_and_purely_real(self):
        probe = FreeMassProbe(g_P=1.0)
        w = np.linspace(0.1, 5.0, 7)
        assert np.allclose(probe.D(w), probe.D(-w))
        assert np.allclose(probe.D(w).imag, 0.0)
        assert np.allclose(probe.D(w).real, -(w**2))

    def test_pragmatic_criterion(self):
        aux = _aux(0.1, -TWO_PI * 10.0, 1e-3)
        assert pragmatic_band_criterion(aux, omega_low=TWO_PI * 20.0)
        assert not pragmatic_band_criterion(aux, omega_low=TWO_PI * 5.0)

    def test_normalized_psd_refuses_free_mass(self):
        aux = _aux(1.0, -1.0, 1e-3)
        pair = SensingPair(FreeMassProbe(g_P=1.0), aux, SqueezeConfig(r=0.0), "serial")
        with pytest.raises(ValueError, match="bracket"):
            serial_force_psd(pair, 1.0)
        # bracket form works
        assert serial_bracket(pair, 1.0) > 0

    def test_brackets_scale_free_in_probe_frequency(self):
        """Oscillator probe with tiny Omega_P approaches the free-mass bracket."""
        g_P = 2.0
        aux = _aux(4.0, -0.5, 1e-4)
        fm = SensingPair(FreeMassProbe(g_P=g_P), aux, SqueezeConfig(r=0.4), "serial")
        w = np.linspace(2.0, 10.0, 5)
        target = serial_bracket(fm, w)
        for omega_P in (1e-2, 1e-3):
            probe = Oscillator(omega0=omega_P, gamma=omega_P * 1e-4, Gamma=g_P / omega_P)
            osc_pair = SensingPair(probe, aux, SqueezeConfig(r=0.4), "serial")
            got = serial_bracket(osc_pair, w)
            assert np.allclose(got, target, rtol=1e-3)


class TestTableIBehavior:
    def test_parallel_beats_serial_near_auxiliary_resonance(self):
        from qmfs.gwd import TABLE_PRESETS

        preset = TABLE_PRESETS["spin"]
        w = TWO_PI * np.linspace(8.0, 12.0, 21)
        ser = serial_bracket(preset.pair("serial"), w)
        par = parallel_bracket(preset.pair("parallel"), w)
        assert np.all(par <= ser)
