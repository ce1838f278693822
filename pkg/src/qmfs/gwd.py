"""Gravitational-wave-detector presets, baseline, and sensitivity curves.

Bundles the interferometer parameters (normalized optical power ``J``,
half-bandwidth ``kappa``) with a down-converted auxiliary (mechanical or
spin-like) into named presets, defines the reference curve of a detector
without auxiliary and without squeezing, and generates the displacement
sensitivity and gain curves for the serial and parallel topologies over a
log frequency grid.

Baseline definition: the probe-only sum-noise ``(1/2) K_P(Omega)`` with
``r = 0``, i.e. vacuum shot noise plus unsuppressed quantum back action of
the bare interferometer.  Gains are quoted as ``10*log10(baseline/scheme)``
in decibels, positive when the scheme improves on the baseline; they are
independent of the test mass and of hbar since both cancel in the ratio.
The absolute displacement curves use a nominal 40 kg test mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict

import numpy as np

from .core import EffectiveOscillator, SqueezeConfig
from .sensing import SensingPair, freemass_probe, parallel_bracket, serial_bracket

__all__ = [
    "GwdPreset",
    "TABLE_PRESETS",
    "baseline_bracket",
    "baseline_psd",
    "displacement_psd",
    "fig5_curves",
    "FIG5_COLUMNS",
]

HBAR = 1.054571817e-34  # J*s

_TWO_PI = 2.0 * math.pi

FIG5_COLUMNS = (
    "f_hz",
    "S_x_serial",
    "S_x_parallel",
    "S_x_baseline",
    "gain_serial_db",
    "gain_parallel_db",
)


@dataclass(frozen=True)
class GwdPreset:
    """Interferometer + auxiliary parameter set for the sensitivity curves.

    ``J`` [rad^3/s^3] is the normalized optical power and ``kappa`` [rad/s]
    the interferometer half-bandwidth, entering only through
    ``Gamma_P * Omega_P = 2 J / kappa``.  ``Omega_Aeff`` is the signed
    effective auxiliary frequency; ``auxiliary_kind`` selects the damping
    and occupancy (``mechanical``: gamma = 2*pi*1 mHz, n_T = 2100;
    ``spin``: gamma = 2*pi*3 Hz, n_T = 0).  The serial topology uses 6 dB
    of squeezing (e^2r = 4), the parallel one 9 dB (e^2r = 8).
    """

    J: float = (_TWO_PI * 100.0) ** 3
    kappa: float = _TWO_PI * 500.0
    r_serial: float = 0.5 * math.log(4.0)
    r_parallel: float = 0.5 * math.log(8.0)
    Omega_Aeff: float = -_TWO_PI * 10.0
    auxiliary_kind: str = "spin"
    mass_m: float = 40.0
    f_min_hz: float = 5.0
    f_max_hz: float = 2000.0
    points: int = 600

    def __post_init__(self):
        if self.auxiliary_kind not in ("mechanical", "spin"):
            raise ValueError(f"auxiliary_kind must be 'mechanical' or 'spin', got {self.auxiliary_kind!r}")
        if self.J <= 0.0 or self.kappa <= 0.0 or self.mass_m <= 0.0:
            raise ValueError("J, kappa and mass_m must be > 0")
        if self.Omega_Aeff == 0.0:
            raise ValueError("Omega_Aeff must be nonzero")
        if not (0.0 < self.f_min_hz < self.f_max_hz) or self.points < 2:
            raise ValueError("grid must satisfy 0 < f_min < f_max and points >= 2")

    @property
    def gamma_A(self) -> float:
        return _TWO_PI * (1e-3 if self.auxiliary_kind == "mechanical" else 3.0)

    @property
    def n_T(self) -> float:
        return 2100.0 if self.auxiliary_kind == "mechanical" else 0.0

    @property
    def g_P(self) -> float:
        """Readout-rate product ``Gamma_P * Omega_P = 2 J / kappa``."""
        return 2.0 * self.J / self.kappa

    def auxiliary(self) -> EffectiveOscillator:
        """Down-converted auxiliary matched in readout product to the probe."""
        Gamma_eff = self.g_P / abs(self.Omega_Aeff)
        return EffectiveOscillator(
            Gamma_eff=Gamma_eff,
            Omega_eff=self.Omega_Aeff,
            gamma=self.gamma_A,
            Lambda_=abs(self.Omega_Aeff),
            Phi=0.0,
            s=1 if self.Omega_Aeff > 0 else -1,
            n_T=self.n_T,
            compensation="parametric",
        )

    def pair(self, topology: str) -> SensingPair:
        r = self.r_serial if topology == "serial" else self.r_parallel
        mode = "single" if topology == "serial" else "two_mode"
        return SensingPair(
            probe=freemass_probe(self.J, self.kappa),
            auxiliary=self.auxiliary(),
            squeeze=SqueezeConfig(r=r, mode=mode),
            topology=topology,
        )

    def grid_hz(self) -> np.ndarray:
        return np.geomspace(self.f_min_hz, self.f_max_hz, self.points)


TABLE_PRESETS: Dict[str, GwdPreset] = {
    "spin": GwdPreset(auxiliary_kind="spin"),
    "mechanical": GwdPreset(auxiliary_kind="mechanical"),
}


def baseline_bracket(g_P: float, omega, r: float = 0.0):
    """Probe-only sum noise ``K_P`` with squeezing, in ``hbar*m/2`` units.

    ``K_P = |D_P|^2/g_P e^{-2r} + g_P e^{2r}`` with the free-mass response
    ``D_P = -Omega^2``; at ``r = 0`` this is the reference curve of a
    detector without auxiliary and without squeezing.  (In normalized-force
    units this is the familiar ``(1/2) K_P / Omega_P``.)  Minimized over
    ``g_P`` at fixed frequency it reaches the standard quantum limit
    ``2|D_P| = 2 Omega^2``.
    """
    if g_P <= 0.0:
        raise ValueError("Gamma_P * Omega_P must be > 0")
    omega = np.asarray(omega, dtype=float) if np.ndim(omega) else omega
    D_abs2 = omega**4
    return D_abs2 / g_P * math.exp(-2.0 * r) + g_P * math.exp(2.0 * r)


def baseline_psd(J: float, kappa: float, omega, r: float = 0.0):
    """Baseline force noise of the bare interferometer, in ``hbar*m/2`` units."""
    if J <= 0.0 or kappa <= 0.0:
        raise ValueError("J and kappa must be > 0")
    return baseline_bracket(2.0 * J / kappa, omega, r)


def displacement_psd(bracket, mass_m: float, omega):
    """Convert a force PSD in ``hbar*m/2`` units to displacement units m^2/(rad/s).

    ``S^x = S^F / (m^2 Omega^4)`` with ``S^F = (hbar*m/2) * bracket``, i.e.
    ``S^x = hbar * bracket / (2 m Omega^4)``.  Singular at ``Omega = 0``.
    """
    if mass_m <= 0.0:
        raise ValueError("mass must be > 0")
    omega = np.asarray(omega, dtype=float) if np.ndim(omega) else omega
    if np.any(omega == 0.0):
        raise ValueError("displacement normalization is singular at Omega = 0")
    return HBAR * np.asarray(bracket) / (2.0 * mass_m * omega**4)


def fig5_curves(preset: GwdPreset) -> Dict[str, np.ndarray]:
    """Sensitivity and gain curves of the serial and parallel schemes.

    Returns a column table (see ``FIG5_COLUMNS``): frequency in Hz, the
    absolute displacement PSDs [m^2/(rad/s)] of the serial scheme, the
    parallel scheme and the unsqueezed no-auxiliary baseline, and the two
    gains ``10*log10(baseline/scheme)`` in dB.
    """
    f_hz = preset.grid_hz()
    omega = _TWO_PI * f_hz
    ser = serial_bracket(preset.pair("serial"), omega)
    par = parallel_bracket(preset.pair("parallel"), omega)
    base = baseline_bracket(preset.g_P, omega)
    return {
        "f_hz": f_hz,
        "S_x_serial": displacement_psd(ser, preset.mass_m, omega),
        "S_x_parallel": displacement_psd(par, preset.mass_m, omega),
        "S_x_baseline": displacement_psd(base, preset.mass_m, omega),
        "gain_serial_db": 10.0 * np.log10(base / ser),
        "gain_parallel_db": 10.0 * np.log10(base / par),
    }
