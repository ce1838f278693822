"""Domain types and elementary frequency-domain building blocks.

Everything downstream (the exact sideband-ladder solver, the effective
down-converted oscillator model, the sensing topologies) is built from the
objects defined here: oscillators with signed evolution frequency, periodic
coupling envelopes given by their Fourier coefficients, squeezed-input
configurations, and sampled noise spectra.

Conventions:
  * all frequencies are angular (rad/s) internally; Hz enters only at the
    configuration boundary (see :mod:`qmfs.cli`),
  * a negative evolution frequency encodes a negative effective mass,
  * every coupling envelope is normalized so that the mean square of the
    modulation function equals one, i.e. ``sum |k_n|^2 == 1``.

All types are immutable after construction and all functions are pure, so
everything here is safe to call concurrently without synchronization.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping

import numpy as np
from scipy.integrate import simpson

__all__ = [
    "HIGH_Q_THRESHOLD",
    "ENVELOPE_NORM_TOL",
    "Oscillator",
    "CouplingEnvelope",
    "SqueezeConfig",
    "NoiseSpectrum",
    "EffectiveOscillator",
    "ValidityWarning",
    "lorentzian",
    "susceptibility",
    "thermal_force_psd",
    "two_tone_envelope",
    "stroboscopic_envelope",
    "effective_params",
]

# |omega0| / (2 gamma) above which narrowband approximations are trusted.
HIGH_Q_THRESHOLD = 10.0

# Tolerance on sum |k_n|^2 == 1 for coupling envelopes.
ENVELOPE_NORM_TOL = 1e-10

# Samples per modulation period for envelope quadrature.
ENVELOPE_SAMPLES = 8192


class ValidityWarning(UserWarning):
    """A model approximation is being used outside its comfortable regime."""


@dataclass(frozen=True)
class Oscillator:
    """A damped harmonic oscillator coupled to a traveling light field.

    Parameters
    ----------
    omega0:
        Signed evolution frequency [rad/s].  The sign encodes the sign of
        the effective mass; ``omega0`` must be nonzero.
    gamma:
        Damping half-width at half maximum [rad/s], strictly positive.
    Gamma:
        Mean (period-averaged) light-coupling readout rate [rad/s], >= 0.
    rho:
        Characteristic impedance m*|omega0| [kg rad/s], strictly positive.
    n_T:
        Mean thermal occupancy of the oscillator bath, >= 0.
    """

    omega0: float
    gamma: float
    Gamma: float = 0.0
    rho: float = 1.0
    n_T: float = 0.0

    def __post_init__(self):
        if self.omega0 == 0.0:
            raise ValueError("omega0 must be nonzero (use the free-mass probe for the zero-frequency limit)")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.Gamma < 0.0:
            raise ValueError(f"Gamma must be >= 0, got {self.Gamma}")
        if self.rho <= 0.0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if self.n_T < 0.0:
            raise ValueError(f"n_T must be >= 0, got {self.n_T}")

    @property
    def sign(self) -> int:
        """Sign of the evolution frequency (+1 positive mass, -1 negative)."""
        return 1 if self.omega0 > 0 else -1

    @property
    def is_high_q(self) -> bool:
        """Whether |omega0|/(2 gamma) exceeds the high-Q threshold."""
        return abs(self.omega0) / (2.0 * self.gamma) > HIGH_Q_THRESHOLD


def lorentzian(osc: Oscillator, omega):
    """Inverse complex Lorentzian ``ell(omega) = gamma - i*omega``."""
    return osc.gamma - 1j * (np.asarray(omega, dtype=float) if np.ndim(omega) else omega)


def susceptibility(osc: Oscillator, omega):
    """Normalized oscillator susceptibility.

    ``chi(omega) = omega0 / (omega0**2 - omega**2 - 2i*omega*gamma)``,
    valid for viscous damping.  ``gamma > 0`` keeps the poles off the real
    axis, so the expression is finite for every real ``omega``.
    """
    omega = np.asarray(omega, dtype=float) if np.ndim(omega) else omega
    return osc.omega0 / (osc.omega0**2 - omega**2 - 2j * omega * osc.gamma)


def thermal_force_psd(osc: Oscillator) -> float:
    """Flat thermal-force PSD ``S_T = 2*gamma*(2*n_T + 1)`` (normalized units).

    This is the symmetrized spectral density of the normalized thermal
    Langevin force in the vicinity of the oscillator resonance.
    """
    return 2.0 * osc.gamma * (2.0 * osc.n_T + 1.0)


@dataclass(frozen=True)
class CouplingEnvelope:
    """Periodic coupling modulation ``k(t)`` as complex Fourier coefficients.

    ``k(t) = sum_n k_n * exp(-i*n*omega_tilde*t)`` with period
    ``2*pi/omega_tilde``.  Reality of ``k(t)`` requires ``k_{-n} = conj(k_n)``
    and the unit-mean-square normalization requires ``sum |k_n|^2 == 1``;
    both are enforced at construction.
    """

    omega_tilde: float
    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.omega_tilde <= 0.0:
            raise ValueError(f"omega_tilde must be > 0, got {self.omega_tilde}")
        coeffs = {int(n): complex(c) for n, c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", coeffs)
        for n, c in coeffs.items():
            if abs(coeffs.get(-n, 0j) - c.conjugate()) > 1e-9 * max(1.0, abs(c)):
                raise ValueError(f"Hermitian symmetry violated at n={n}: k_-n != conj(k_n)")
        norm = sum(abs(c) ** 2 for c in coeffs.values())
        if abs(norm - 1.0) > ENVELOPE_NORM_TOL:
            raise ValueError(f"envelope not normalized: sum |k_n|^2 = {norm!r}")

    def k(self, n: int) -> complex:
        """Fourier coefficient ``k_n`` (zero outside the support)."""
        return self.coeffs.get(n, 0j)

    @property
    def support(self) -> frozenset:
        """Indices n with nonzero ``k_n``."""
        return frozenset(self.coeffs)

    @property
    def max_harmonic(self) -> int:
        """Largest |n| with nonzero ``k_n``."""
        return max(abs(n) for n in self.coeffs) if self.coeffs else 0

    @property
    def is_stroboscopic(self) -> bool:
        """True when every even coefficient vanishes (alternating pulse train)."""
        return all(abs(c) < ENVELOPE_NORM_TOL for n, c in self.coeffs.items() if n % 2 == 0)

    @property
    def is_two_tone(self) -> bool:
        """True when only ``k_{+-1}`` are nonzero."""
        return self.support <= {1, -1} and len(self.support) == 2

    def delayed(self, tau: float) -> "CouplingEnvelope":
        """Envelope shifted in time, ``k(t) -> k(t - tau)``.

        A delay multiplies each coefficient by ``exp(i*n*omega_tilde*tau)``.
        """
        return CouplingEnvelope(
            self.omega_tilde,
            {n: c * cmath.exp(1j * n * self.omega_tilde * tau) for n, c in self.coeffs.items()},
        )

    def value(self, t) -> np.ndarray:
        """Evaluate ``k(t)`` on (an array of) times."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for n, c in self.coeffs.items():
            out += c * np.exp(-1j * n * self.omega_tilde * t)
        return out.real


def two_tone_envelope(omega_tilde: float, Phi: float = 0.0) -> CouplingEnvelope:
    """Two-tone (harmonic) coupling envelope ``k(t) = sqrt(2) cos(omega_tilde*t - Phi)``.

    The only nonzero coefficients are ``k_{+-1} = exp(+-i*Phi)/sqrt(2)``.
    This is the optimal member of the stroboscopic class: all the drive
    power contributes to the effective readout rate.
    """
    c = cmath.exp(1j * Phi) / math.sqrt(2.0)
    return CouplingEnvelope(omega_tilde, {1: c, -1: c.conjugate()})


def stroboscopic_envelope(
    pulse: Callable[[np.ndarray], np.ndarray],
    tau: float,
    omega_tilde: float,
    N_max: int,
    samples: int = ENVELOPE_SAMPLES,
) -> CouplingEnvelope:
    """Build an alternating pulse-train envelope from a unit pulse.

    The envelope is ``k(t) = sum_n [K(t - n*T - tau) - K(t - (n + 1/2)*T - tau)]``
    with ``T = 2*pi/omega_tilde``; ``pulse`` is the unit pulse ``K`` and must
    vanish outside ``[-T/4, T/4]`` (duration at most half a period).  Fourier
    coefficients for ``|n| <= N_max`` are computed by composite Simpson
    quadrature over one period, after normalizing the pulse train to unit
    mean square in the time domain.  The coefficients are then rescaled so
    that ``sum |k_n|^2 == 1`` exactly; if that final correction exceeds 1%
    the sampling (or ``N_max``) is under-resolved and a ``ValueError`` is
    raised.  Even coefficients vanish identically for this envelope class.
    """
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    if samples < 4096:
        raise ValueError("need at least 4096 samples per period")
    T = 2.0 * math.pi / omega_tilde

    quarter = T / 4.0
    probe = np.linspace(-T / 2.0, T / 2.0, 4096)
    outside = np.abs(probe) > quarter * (1.0 + 1e-12)
    if np.any(np.abs(np.asarray(pulse(probe), dtype=float)[outside]) > 1e-12):
        raise ValueError("pulse must vanish outside [-T/4, T/4] (duration <= T/2)")

    # Sample the T-periodic pulse sum once and subtract its half-period
    # roll: the negated copies then sit on the exact same grid values, so
    # even-coefficient cancellation is exact to rounding even when a pulse
    # edge falls on a sample point.
    t = np.arange(samples) * (T / samples)
    p_t = np.zeros(samples)
    for m in (-1, 0, 1, 2):
        p_t += np.asarray(pulse(t - m * T - tau), dtype=float)
    k_t = p_t - np.roll(p_t, samples // 2)

    # Unit mean square of k(t) over one period (periodic: plain mean).
    msq = float(np.mean(k_t**2))
    if msq <= 0.0:
        raise ValueError("pulse train has zero power")
    k_t = k_t / math.sqrt(msq)

    tt = np.append(t, T)
    kk = np.append(k_t, k_t[0])
    coeffs: Dict[int, complex] = {}
    for n in range(-N_max, N_max + 1):
        integrand = kk * np.exp(1j * n * omega_tilde * tt)
        c = complex(simpson(integrand, x=tt)) / T
        if abs(c) > 1e-14:
            coeffs[n] = c
    # Exact Hermitian symmetrization (quadrature is symmetric already,
    # this removes rounding-level asymmetry).
    for n in list(coeffs):
        if n > 0:
            avg = 0.5 * (coeffs[n] + coeffs.get(-n, 0j).conjugate())
            coeffs[n] = avg
            coeffs[-n] = avg.conjugate()

    norm = math.sqrt(sum(abs(c) ** 2 for c in coeffs.values()))
    if abs(norm - 1.0) > 0.01:
        raise ValueError(
            f"normalization correction {abs(norm - 1.0):.3%} exceeds 1%: "
            "increase samples or N_max (under-resolved pulse)"
        )
    coeffs = {n: c / norm for n, c in coeffs.items()}
    return CouplingEnvelope(omega_tilde, coeffs)


@dataclass(frozen=True)
class SqueezeConfig:
    """Input-light squeezing configuration.

    ``mode="single"`` squeezes one beam with zero squeeze angle, giving
    quadrature PSDs ``S_c = exp(2r)/2`` (amplitude) and ``S_s = exp(-2r)/2``
    (phase).  ``mode="two_mode"`` describes twin beams from a non-degenerate
    parametric source: all four quadrature PSDs equal ``cosh(2r)/2`` with
    cross-correlations ``+sinh(2r)/2`` (amplitude-amplitude) and
    ``-sinh(2r)/2`` (phase-phase).
    """

    r: float = 0.0
    mode: str = "single"

    def __post_init__(self):
        if self.r < 0.0:
            raise ValueError(f"squeeze factor r must be >= 0, got {self.r}")
        if self.mode not in ("single", "two_mode"):
            raise ValueError(f"mode must be 'single' or 'two_mode', got {self.mode!r}")

    @property
    def S_amplitude(self) -> float:
        """Amplitude-quadrature PSD of one beam."""
        return math.exp(2.0 * self.r) / 2.0 if self.mode == "single" else math.cosh(2.0 * self.r) / 2.0

    @property
    def S_phase(self) -> float:
        """Phase-quadrature PSD of one beam."""
        return math.exp(-2.0 * self.r) / 2.0 if self.mode == "single" else math.cosh(2.0 * self.r) / 2.0

    @property
    def S_cross(self) -> float:
        """Two-mode amplitude-amplitude cross PSD (phase-phase is its negative)."""
        if self.mode != "two_mode":
            return 0.0
        return math.sinh(2.0 * self.r) / 2.0


VACUUM_PSD = 0.5


@dataclass(frozen=True)
class NoiseSpectrum:
    """A sampled one-sided spectral density with unit metadata.

    ``unit`` is one of ``"normalized_force"`` (S^f), ``"dimensional_force"``
    (N^2/Hz) or ``"displacement"`` (m^2/Hz).
    """

    grid: np.ndarray
    values: np.ndarray
    unit: str = "normalized_force"

    _UNITS = ("normalized_force", "dimensional_force", "displacement")

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("PSD values must be finite and >= 0")
        if self.unit not in self._UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")


@dataclass(frozen=True)
class EffectiveOscillator:
    """Down-converted oscillator as perceived through a periodic drive.

    ``Gamma_eff = |k_1|^2 * Gamma`` is the effective readout rate,
    ``Omega_eff = sign(omega0) * (|omega0| - omega_tilde)`` the signed
    effective evolution frequency, ``Lambda = |omega0| - omega_tilde`` the
    detuning, and ``Phi = arg k_1`` the drive phase.  ``compensation``
    selects the susceptibility variant: ``"raw"`` keeps the gamma^2
    resonance shift of the plain down-conversion, ``"parametric"`` removes
    it by parametric excitation at twice the drive frequency (modulation
    factor ``mu = -gamma``), and ``"custom"`` uses an arbitrary ``mu``.
    """

    Gamma_eff: float
    Omega_eff: float
    gamma: float
    Lambda_: float
    Phi: float
    s: int
    n_T: float = 0.0
    compensation: str = "parametric"
    mu: float = 0.0
    validity_ratio: float = 0.0

    def __post_init__(self):
        if self.Gamma_eff < 0.0:
            raise ValueError("Gamma_eff must be >= 0")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be > 0")
        if abs(abs(self.Omega_eff) - abs(self.Lambda_)) > 1e-9 * max(1.0, abs(self.Lambda_)):
            raise ValueError("|Omega_eff| must equal |Lambda|")
        if self.compensation not in ("raw", "parametric", "custom"):
            raise ValueError(f"unknown compensation mode {self.compensation!r}")
        if self.compensation == "parametric":
            object.__setattr__(self, "mu", -self.gamma)
        elif self.compensation == "raw":
            object.__setattr__(self, "mu", 0.0)

    def with_compensation(self, compensation: str, mu: float = 0.0) -> "EffectiveOscillator":
        """Copy of this oscillator with a different compensation mode."""
        return EffectiveOscillator(
            Gamma_eff=self.Gamma_eff,
            Omega_eff=self.Omega_eff,
            gamma=self.gamma,
            Lambda_=self.Lambda_,
            Phi=self.Phi,
            s=self.s,
            n_T=self.n_T,
            compensation=compensation,
            mu=mu,
            validity_ratio=self.validity_ratio,
        )


def effective_params(
    osc: Oscillator,
    env: CouplingEnvelope,
    compensation: str = "parametric",
    mu: float = 0.0,
) -> EffectiveOscillator:
    """Effective down-converted parameters of ``osc`` under the drive ``env``.

    Returns the effective readout rate ``Gamma_eff = |k_1|^2 * Gamma``, the
    detuning ``Lambda = |omega0| - omega_tilde``, the signed effective
    frequency ``Omega_eff = sign(omega0) * Lambda`` and the drive phase
    ``Phi = arg k_1``.  The validity of the narrowband treatment requires
    ``|Lambda|, gamma << omega_tilde``; the returned ``validity_ratio``
    is ``max(|Lambda|, gamma) / omega_tilde`` and a :class:`ValidityWarning`
    is issued when it exceeds 0.1.
    """
    k1 = env.k(1)
    Lambda_ = abs(osc.omega0) - env.omega_tilde
    ratio = max(abs(Lambda_), osc.gamma) / env.omega_tilde
    if ratio > 0.1:
        warnings.warn(
            f"down-conversion validity ratio {ratio:.3g} > 0.1: "
            "effective model may be inaccurate",
            ValidityWarning,
            stacklevel=2,
        )
    return EffectiveOscillator(
        Gamma_eff=abs(k1) ** 2 * osc.Gamma,
        Omega_eff=osc.sign * Lambda_,
        gamma=osc.gamma,
        Lambda_=Lambda_,
        Phi=cmath.phase(k1) if k1 != 0 else 0.0,
        s=osc.sign,
        n_T=osc.n_T,
        compensation=compensation,
        mu=mu,
        validity_ratio=ratio,
    )
