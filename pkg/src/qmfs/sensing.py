"""Stationary force-sensing spectral densities for the two probing topologies.

A probe oscillator (or an effectively free test mass) and a down-converted
auxiliary oscillator are jointly measured either in cascade by the same
light beam (serial topology, single-mode squeezed input) or separately by
two-mode-squeezed twin beams whose photocurrents are combined with an
optimized weight in post-processing (parallel topology).  Quantum back
action cancels when the residual transfer ``K_res`` vanishes, which splits
into three frequency-independent matching conditions on the readout-rate
products, squared frequencies and damping rates.

Normalization.  The signal-referred quantum-noise PSDs appear in three
related units:

  * ``*_force_psd`` and ``matched_psds`` return the normalized density
    ``S^f`` (the paper-independent, dimensionless-force convention);
  * ``*_bracket`` functions return ``2*Omega_P*S^f``, i.e. the dimensional
    density ``S^F`` in units of ``hbar*m/2``.  Only the bracket form
    survives the free-mass limit ``Omega_P -> 0``, because there the probe
    enters exclusively through the product ``Gamma_P*Omega_P`` and the
    response ``D_P = -Omega^2``.

The probe's own thermal force is additive and uncorrelated with the
quantum noise, so it is excluded throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .core import EffectiveOscillator, Oscillator, SqueezeConfig

__all__ = [
    "FreeMassProbe",
    "SensingPair",
    "MatchReport",
    "k_res",
    "match_report",
    "serial_force_psd",
    "parallel_force_psd",
    "parallel_optimal_weight",
    "matched_psds",
    "partial_match_psds",
    "serial_bracket",
    "parallel_bracket",
    "matched_brackets",
    "freemass_probe",
    "aux_thermal_psd",
]

MATCH_TOL = 1e-10


@dataclass(frozen=True)
class FreeMassProbe:
    """Probe in the free-mass limit: response ``D_P = -Omega^2``.

    The bare pendulum frequency and damping drop out; the probe enters only
    through the readout-rate product ``g_P = Gamma_P * Omega_P`` [rad^2/s^2],
    for a gravitational-wave interferometer ``g_P = 2 J / kappa``.
    """

    g_P: float

    def __post_init__(self):
        if self.g_P <= 0.0:
            raise ValueError("Gamma_P * Omega_P must be > 0")

    def D(self, omega):
        omega = np.asarray(omega, dtype=float) if np.ndim(omega) else omega
        return -(omega**2) + 0j

    @property
    def gamma(self) -> float:
        return 0.0


def freemass_probe(J: float, kappa: float) -> FreeMassProbe:
    """Free-mass probe of a GW interferometer.

    ``J`` is the normalized optical power [rad^3/s^3] and ``kappa`` the
    interferometer half-bandwidth; the readout-rate product is
    ``Gamma_P * Omega_P = 2 J / kappa``.
    """
    if J <= 0.0 or kappa <= 0.0:
        raise ValueError("J and kappa must be > 0")
    return FreeMassProbe(g_P=2.0 * J / kappa)


@dataclass(frozen=True)
class SensingPair:
    """Probe + down-converted auxiliary with a choice of probing topology.

    ``topology`` is ``"serial"`` (single-mode squeezing) or ``"parallel"``
    (two-mode squeezing); the squeeze mode must match the topology.
    """

    probe: Union[Oscillator, FreeMassProbe]
    auxiliary: EffectiveOscillator
    squeeze: SqueezeConfig
    topology: str = "serial"

    def __post_init__(self):
        if self.topology not in ("serial", "parallel"):
            raise ValueError(f"topology must be 'serial' or 'parallel', got {self.topology!r}")
        required = "single" if self.topology == "serial" else "two_mode"
        if self.squeeze.mode != required:
            raise ValueError(
                f"{self.topology} topology requires squeeze mode {required!r}, got {self.squeeze.mode!r}"
            )
        if self.auxiliary.Gamma_eff < 0.0:
            raise ValueError("auxiliary readout rate must be >= 0")
        if self.topology == "parallel" and self.auxiliary.Gamma_eff == 0.0:
            raise ValueError("parallel topology requires a coupled auxiliary (Gamma_eff > 0)")
        if self.auxiliary.Omega_eff == 0.0:
            raise ValueError("auxiliary effective frequency must be nonzero")

    # -- probe-side response ------------------------------------------------

    def D_P(self, omega):
        """Rescaled probe response ``Omega_P^2 - W^2 - 2i*gamma_P*W`` (or ``-W^2``)."""
        if isinstance(self.probe, FreeMassProbe):
            return self.probe.D(omega)
        p = self.probe
        omega = np.asarray(omega, dtype=float) if np.ndim(omega) else omega
        return p.omega0**2 - omega**2 - 2j * p.gamma * omega

    @property
    def g_P(self) -> float:
        """Signed readout-rate product ``Gamma_P * Omega_P`` of the probe."""
        if isinstance(self.probe, FreeMassProbe):
            return self.probe.g_P
        return self.probe.Gamma * self.probe.omega0

    # -- auxiliary-side response --------------------------------------------

    def D_A(self, omega):
        """Rescaled auxiliary response ``Omega_Aeff^2 - W^2 - 2i*gamma_A*W``."""
        a = self.auxiliary
        omega = np.asarray(omega, dtype=float) if np.ndim(omega) else omega
        return a.Omega_eff**2 - omega**2 - 2j * a.gamma * omega

    @property
    def g_A(self) -> float:
        """Signed readout-rate product ``Gamma_Aeff * Omega_Aeff`` of the auxiliary."""
        return self.auxiliary.Gamma_eff * self.auxiliary.Omega_eff

    def K_P(self, omega):
        """Probe single-channel sum-noise factor ``|D_P|^2/g_P + g_P``."""
        return np.abs(self.D_P(omega)) ** 2 / self.g_P + self.g_P

    def K_A(self, omega):
        """Auxiliary single-channel sum-noise factor ``|D_A|^2/|g_A| + |g_A|``."""
        ga = abs(self.g_A)
        return np.abs(self.D_A(omega)) ** 2 / ga + ga

    def S_T_tilde(self, omega):
        """Frequency-weighted auxiliary thermal PSD, see :func:`aux_thermal_psd`."""
        return aux_thermal_psd(self.auxiliary, omega)


def aux_thermal_psd(aux: EffectiveOscillator, omega):
    """``S~_T(W) = (Omega_Aeff^2 + W^2)/|Omega_Aeff| * gamma*(2 n_T + 1)``.

    This is ``|Omega_Aeff|`` times the parametrically compensated effective
    thermal-force PSD of the down-converted auxiliary.
    """
    omega = np.asarray(omega, dtype=float) if np.ndim(omega) else omega
    w0 = abs(aux.Omega_eff)
    return (aux.Omega_eff**2 + omega**2) / w0 * aux.gamma * (2.0 * aux.n_T + 1.0)


@dataclass(frozen=True)
class MatchReport:
    """Residuals of the three QBA-cancellation matching conditions.

    ``qba_match`` is the residual of ``Gamma_Aeff*Omega_Aeff + Gamma_P*Omega_P``
    relative to ``Gamma_P*Omega_P``; ``freq_match`` the relative residual of
    ``Omega_Aeff^2 - Omega_P^2``; ``damp_match`` the relative residual of
    ``gamma_Aeff - gamma_P``.  All three vanish iff ``K_res`` is identically
    zero.  ``im_kres_sq(omega)`` gives the damping-mismatch floor
    ``W^2 (1/Q_P - 1/Q_Aeff)^2``.
    """

    qba_match: float
    freq_match: float
    damp_match: float
    inv_Q_P: float
    inv_Q_A: float

    @property
    def all_matched(self) -> bool:
        return max(self.qba_match, self.freq_match, self.damp_match) < MATCH_TOL

    def im_kres_sq(self, omega):
        omega = np.asarray(omega, dtype=float) if np.ndim(omega) else omega
        return omega**2 * (self.inv_Q_P - self.inv_Q_A) ** 2


def match_report(pair: SensingPair) -> MatchReport:
    """Evaluate the matching residuals for a pair with an oscillator probe.

    The free-mass probe cannot satisfy the frequency matching strictly;
    its report treats the probe frequency and damping as zero (``1/Q_P = 0``).
    """
    aux = pair.auxiliary
    g_P = pair.g_P
    qba = abs(pair.g_A + g_P) / abs(g_P)
    if isinstance(pair.probe, FreeMassProbe):
        omega_P2, gamma_P, inv_Q_P = 0.0, 0.0, 0.0
        scale = aux.Omega_eff**2
    else:
        omega_P2 = pair.probe.omega0**2
        gamma_P = pair.probe.gamma
        inv_Q_P = 2.0 * gamma_P / abs(pair.probe.omega0)
        scale = max(omega_P2, aux.Omega_eff**2)
    freq = abs(aux.Omega_eff**2 - omega_P2) / scale
    damp = abs(aux.gamma - gamma_P) / max(aux.gamma, gamma_P, 1e-300)
    inv_Q_A = 2.0 * aux.gamma / abs(aux.Omega_eff)
    return MatchReport(qba_match=qba, freq_match=freq, damp_match=damp, inv_Q_P=inv_Q_P, inv_Q_A=inv_Q_A)


def k_res(pair: SensingPair, omega):
    """Residual QBA transfer ``sqrt(G_A/G_P) chi_P^-1 + sqrt(G_P/G_A) chi_Aeff^-1``.

    Vanishes identically iff all three matching conditions hold.  Requires
    an oscillator probe (inverse susceptibility undefined for a free mass).
    """
    if isinstance(pair.probe, FreeMassProbe):
        raise ValueError("k_res needs an oscillator probe; free mass has no finite chi_P^-1")
    G_P, G_A = pair.probe.Gamma, pair.auxiliary.Gamma_eff
    if G_P <= 0.0 or G_A <= 0.0:
        raise ValueError("both readout rates must be > 0")
    chi_P_inv = pair.D_P(omega) / pair.probe.omega0
    chi_A_inv = pair.D_A(omega) / pair.auxiliary.Omega_eff
    return math.sqrt(G_A / G_P) * chi_P_inv + math.sqrt(G_P / G_A) * chi_A_inv


# ---------------------------------------------------------------------------
# Bracket forms: S^F in units of hbar*m/2, valid for free-mass probes too.
# ---------------------------------------------------------------------------

def serial_bracket(pair: SensingPair, omega):
    """Serial-topology quantum noise, in ``hbar*m/2`` force units.

    ``|D_P|^2/g_P e^{-2r} + g_P |1 + (g_A/g_P)(D_P/D_A)|^2 e^{2r}
    + 2 |D_P/D_A|^2 (|g_A|/g_P) S~_T``.  The middle term is the residual
    back action; under the readout-product matching ``g_A = -g_P`` it
    reduces to ``g_P |D_P/D_A - 1|^2 e^{2r}`` and vanishes for matched
    responses.
    """
    r = pair.squeeze.r
    D_P = pair.D_P(omega)
    D_A = pair.D_A(omega)
    g_P, g_A = pair.g_P, pair.g_A
    ratio = D_P / D_A
    shot = np.abs(D_P) ** 2 / g_P * math.exp(-2.0 * r)
    qba = g_P * np.abs(1.0 + (g_A / g_P) * ratio) ** 2 * math.exp(2.0 * r)
    thermal = 2.0 * np.abs(ratio) ** 2 * (abs(g_A) / g_P) * pair.S_T_tilde(omega)
    return shot + qba + thermal


def parallel_bracket(pair: SensingPair, omega):
    """Parallel-topology quantum noise (optimal weight), in ``hbar*m/2`` units.

    ``(K_P [K_A + 2 S~_T cosh2r] + |u|^2 sinh^2 2r) / (K_A cosh2r + 2 S~_T)``
    with the residual term
    ``u = D_P sqrt(|g_A|/g_P) + sign(Omega_Aeff) D_A sqrt(g_P/|g_A|)``,
    which reduces to ``D_P - D_A`` under readout-product matching with a
    negative-frequency auxiliary.
    """
    r = pair.squeeze.r
    ch, sh = math.cosh(2.0 * r), math.sinh(2.0 * r)
    K_P = pair.K_P(omega)
    K_A = pair.K_A(omega)
    S_t = pair.S_T_tilde(omega)
    g_P, g_A = pair.g_P, pair.g_A
    sgn = 1.0 if pair.auxiliary.Omega_eff > 0 else -1.0
    u = pair.D_P(omega) * math.sqrt(abs(g_A) / g_P) + sgn * pair.D_A(omega) * math.sqrt(g_P / abs(g_A))
    num = K_P * (K_A + 2.0 * S_t * ch) + np.abs(u) ** 2 * sh**2
    return num / (K_A * ch + 2.0 * S_t)


def matched_brackets(pair: SensingPair, omega) -> Tuple[np.ndarray, np.ndarray]:
    """Fully matched serial and parallel noise, in ``hbar*m/2`` units.

    Serial: ``|D_P|^2/g_P e^{-2r} + 2 S~_T``.
    Parallel: ``K_P (K_P + 2 S~_T cosh2r) / (K_P cosh2r + 2 S~_T)``.
    """
    r = pair.squeeze.r
    D_P = pair.D_P(omega)
    S_t = pair.S_T_tilde(omega)
    K_P = pair.K_P(omega)
    ser = np.abs(D_P) ** 2 / pair.g_P * math.exp(-2.0 * r) + 2.0 * S_t
    ch = math.cosh(2.0 * r)
    par = K_P * (K_P + 2.0 * S_t * ch) / (K_P * ch + 2.0 * S_t)
    return ser, par


# ---------------------------------------------------------------------------
# Normalized S^f forms (oscillator probe with Omega_P != 0).
# ---------------------------------------------------------------------------

def _omega_P(pair: SensingPair) -> float:
    if isinstance(pair.probe, FreeMassProbe):
        raise ValueError(
            "normalized S^f is singular for the free-mass probe; "
            "use the *_bracket functions (hbar*m/2 force units)"
        )
    return pair.probe.omega0


def serial_force_psd(pair: SensingPair, omega):
    """Normalized serial-topology force noise ``S^f_ser``."""
    if pair.topology != "serial":
        raise ValueError("pair topology is not serial")
    return serial_bracket(pair, omega) / (2.0 * _omega_P(pair))


def parallel_force_psd(pair: SensingPair, omega):
    """Normalized parallel-topology force noise ``S^f_par`` (weight-optimized)."""
    if pair.topology != "parallel":
        raise ValueError("pair topology is not parallel")
    return parallel_bracket(pair, omega) / (2.0 * _omega_P(pair))


def parallel_optimal_weight(pair: SensingPair, omega):
    """Optimal post-processing weight ``alpha(omega)`` of the parallel combination.

    Minimizes the PSD of ``f_Psum + alpha * f_Asum`` over complex alpha:
    ``alpha = -S_PA / S_AA`` in terms of the channel (cross-)spectra.
    Exposed as a diagnostic for experiment design and for the brute-force
    optimization oracle.
    """
    S_PP, S_AA, S_PA = _parallel_channel_spectra(pair, omega)
    return -S_PA / S_AA


def _parallel_channel_spectra(pair: SensingPair, omega):
    """(S_PP, S_AA, S_PA) of the two signal-normalized channel sum noises."""
    if pair.squeeze.mode != "two_mode":
        raise ValueError("parallel channels require two-mode squeezing")
    aux = pair.auxiliary
    if isinstance(pair.probe, FreeMassProbe):
        raise ValueError("channel spectra need an oscillator probe")
    G_P, G_A = pair.probe.Gamma, aux.Gamma_eff
    chi_P_inv = pair.D_P(omega) / pair.probe.omega0
    chi_A_inv = pair.D_A(omega) / aux.Omega_eff
    S_q = pair.squeeze.S_amplitude  # cosh2r/2, same for all four quadratures
    S_x = pair.squeeze.S_cross
    S_Teff = pair.S_T_tilde(omega) / abs(aux.Omega_eff)
    S_PP = np.abs(chi_P_inv) ** 2 / G_P * S_q + G_P * S_q
    S_AA = np.abs(chi_A_inv) ** 2 / G_A * S_q + G_A * S_q + S_Teff
    S_PA = math.sqrt(G_P * G_A) * S_x - (chi_P_inv / math.sqrt(G_P)) * np.conj(chi_A_inv) / math.sqrt(G_A) * S_x
    return S_PP, S_AA, S_PA


def matched_psds(pair: SensingPair, omega) -> Tuple[np.ndarray, np.ndarray]:
    """Normalized (serial, parallel) noise under exact matching.

    Raises when any matching residual exceeds ``MATCH_TOL`` (callers with
    mismatched pairs should use the general forms instead).
    """
    report = match_report(pair)
    if not report.all_matched:
        raise ValueError(
            "pair is not matched (residuals "
            f"qba={report.qba_match:.2e}, freq={report.freq_match:.2e}, damp={report.damp_match:.2e}); "
            "use serial_force_psd / parallel_force_psd or partial_match_psds"
        )
    ser, par = matched_brackets(pair, omega)
    w = 2.0 * _omega_P(pair)
    return ser / w, par / w


def partial_match_psds(pair: SensingPair, omega) -> Tuple[np.ndarray, np.ndarray]:
    """Normalized (serial, parallel) noise with only the readout-product match enforced.

    Requires ``Gamma_Aeff*Omega_Aeff + Gamma_P*Omega_P = 0`` to relative
    precision ``MATCH_TOL``; frequency and damping may be arbitrary, their
    mismatch appearing as the residual-QBA terms of the general brackets.
    """
    report = match_report(pair)
    if report.qba_match > MATCH_TOL:
        raise ValueError(f"readout-product matching violated: relative residual {report.qba_match:.2e}")
    w = 2.0 * _omega_P(pair)
    return serial_bracket(pair, omega) / w, parallel_bracket(pair, omega) / w


def pragmatic_band_criterion(aux: EffectiveOscillator, omega_low: float) -> bool:
    """Whether ``|Omega_Aeff| < Omega_low`` (QBA reduction observable in band)."""
    return abs(aux.Omega_eff) < omega_low
