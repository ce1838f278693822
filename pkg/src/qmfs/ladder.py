"""Exact frequency-domain solver for the modulated-coupling input-output map.

A periodically modulated coupling scatters input amplitude-quadrature noise
and forces at sideband-shifted frequencies ("rungs" ``omega - n*omega_tilde``)
into the measured phase quadrature of the output light.  The system is
feed-forward in the bad-cavity model: the amplitude quadrature passes through
unchanged, so the full transfer map follows by direct substitution with no
linear solve.  This module is the brute-force oracle against which every
effective-model formula is checked.

Bad-cavity model::

    b^c(W) = a^c(W)
    b^s(W) = a^s(W) + sqrt(G) * sum_n k_n X(W - n*Wt)
    X(W')  = chi(W') * [sqrt(G) * sum_m k_m a^c(W' - m*Wt) + f(W')]

The finite-bandwidth cavity variant additionally filters each rung with the
cavity Lorentzian ``sqrt(2 kappa)/(kappa - i W)`` on both the input and the
output side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np

from .core import (
    VACUUM_PSD,
    CouplingEnvelope,
    Oscillator,
    SqueezeConfig,
    ValidityWarning,
    susceptibility,
)

__all__ = [
    "LadderTransfer",
    "CavityParams",
    "badcavity_transfer",
    "fullcavity_transfer",
    "output_psd",
]


@dataclass(frozen=True)
class LadderTransfer:
    """Per-rung complex gains into the measured output phase quadrature.

    ``T_bs_from_ac[n]`` is the gain from the input amplitude quadrature at
    ``omega - n*omega_tilde`` into ``b^s(omega)``; ``T_bs_from_f[n]`` the
    gain from the force at the same shifted frequency.  ``T_bs_from_as``
    and ``T_bc_from_ac`` are scalars (both exactly 1 in the bad-cavity
    model).  Keys of ``T_bs_from_f`` may be tuples ``(member, n)`` for
    cascades of several oscillators with independent baths.
    """

    omega: float
    n_max: int
    T_bs_from_ac: Mapping[int, complex] = field(default_factory=dict)
    T_bs_from_f: Mapping = field(default_factory=dict)
    T_bs_from_as: complex = 1.0 + 0j
    T_bc_from_ac: complex = 1.0 + 0j

    def __post_init__(self):
        for gains in (self.T_bs_from_ac, self.T_bs_from_f):
            for g in gains.values():
                if not np.isfinite(g):
                    raise ValueError("non-finite transfer gain")

    @property
    def rungs(self) -> range:
        return range(-self.n_max, self.n_max + 1)

    def ac_gain(self, n: int) -> complex:
        return self.T_bs_from_ac.get(n, 0j)


@dataclass(frozen=True)
class CavityParams:
    """Cavity embedding the oscillator: half-bandwidth and pump-enhanced coupling.

    The external readout rate is ``Gamma = 8 g^2 / kappa``.
    """

    kappa: float
    g: float

    def __post_init__(self):
        if self.kappa <= 0.0:
            raise ValueError("kappa must be > 0")

    @property
    def Gamma(self) -> float:
        return 8.0 * self.g**2 / self.kappa

    @property
    def is_weak_coupling(self) -> bool:
        """Whether kappa >> Gamma (factor 10)."""
        return self.kappa > 10.0 * self.Gamma


def _check_n_max(env: CouplingEnvelope, N_max: int):
    needed = env.max_harmonic + 1
    if N_max < needed:
        raise ValueError(f"N_max={N_max} too small: need at least envelope support + 1 = {needed}")


def badcavity_transfer(osc: Oscillator, env: CouplingEnvelope, omega: float, N_max: Optional[int] = None) -> LadderTransfer:
    """Exact transfer map for an oscillator with modulated coupling, broad cavity.

    ``N_max`` defaults to the envelope support plus 2; it must be at least
    the support plus 1.  The truncation is exact for finite envelopes:
    increasing ``N_max`` further changes no gain.
    """
    if N_max is None:
        N_max = env.max_harmonic + 2
    _check_n_max(env, N_max)
    wt = env.omega_tilde
    sqrtG = math.sqrt(osc.Gamma)

    ac: Dict[int, complex] = {}
    f: Dict[int, complex] = {}
    for n1, k1 in env.coeffs.items():
        chi1 = susceptibility(osc, omega - n1 * wt)
        f[n1] = f.get(n1, 0j) + sqrtG * k1 * chi1
        for m, km in env.coeffs.items():
            n = n1 + m
            if abs(n) <= N_max:
                ac[n] = ac.get(n, 0j) + osc.Gamma * k1 * chi1 * km
    return LadderTransfer(omega=omega, n_max=N_max, T_bs_from_ac=ac, T_bs_from_f=f)


def fullcavity_transfer(
    osc: Oscillator,
    env: CouplingEnvelope,
    cav: CavityParams,
    omega: float,
    N_max: Optional[int] = None,
) -> LadderTransfer:
    """Transfer map with a finite cavity half-bandwidth ``kappa``.

    Each rung is filtered by the cavity Lorentzian on the input side
    (evaluated at the rung's offset from the carrier) and the output is
    filtered at the evaluation frequency.  Output sign convention is
    ``-a + sqrt(2 kappa) q``; the bad-cavity limit of the scalar gains is
    the phase factor ``(kappa + i omega)/(kappa - i omega) -> 1``.
    Assumes weak coupling ``kappa >> Gamma`` (warns otherwise).
    """
    if N_max is None:
        N_max = env.max_harmonic + 2
    _check_n_max(env, N_max)
    if not cav.is_weak_coupling:
        warnings.warn(
            f"cavity not weakly coupled (kappa={cav.kappa:.3g}, Gamma={cav.Gamma:.3g}); "
            "the adiabatic intracavity treatment is unreliable",
            ValidityWarning,
            stacklevel=2,
        )
    wt = env.omega_tilde
    g = cav.g
    kappa = cav.kappa

    def lor_in(w):
        # intracavity amplitude buildup sqrt(2k)/(k - iw)
        return math.sqrt(2.0 * kappa) / (kappa - 1j * w)

    out_pref = math.sqrt(2.0 * kappa) * 2.0 * g / (kappa - 1j * omega)
    scalar = (kappa + 1j * omega) / (kappa - 1j * omega)

    ac: Dict[int, complex] = {}
    f: Dict[int, complex] = {}
    for n1, k1 in env.coeffs.items():
        chi1 = susceptibility(osc, omega - n1 * wt)
        f[n1] = f.get(n1, 0j) + out_pref * k1 * chi1
        for m, km in env.coeffs.items():
            n = n1 + m
            if abs(n) <= N_max:
                gain = out_pref * k1 * chi1 * 2.0 * g * km * lor_in(omega - n * wt)
                ac[n] = ac.get(n, 0j) + gain
    return LadderTransfer(
        omega=omega,
        n_max=N_max,
        T_bs_from_ac=ac,
        T_bs_from_f=f,
        T_bs_from_as=scalar,
        T_bc_from_ac=scalar,
    )


def output_psd(
    transfer: LadderTransfer,
    squeeze: Optional[SqueezeConfig] = None,
    force_psd: float = 0.0,
    rung_amplitude_psd: Optional[Mapping[int, float]] = None,
) -> float:
    """PSD of the measured output phase quadrature ``b^s``.

    Rung inputs are statistically independent across distinct rungs; every
    rung carries vacuum (PSD 1/2 per quadrature) unless overridden.
    Squeezing applies to the carrier rung ``n = 0`` only.  ``force_psd`` is
    a flat (thermal-force) PSD applied to every force rung; pass a mapping
    in ``rung_amplitude_psd`` to override individual amplitude-rung PSDs.
    """
    if force_psd < 0.0:
        raise ValueError("force PSD must be >= 0")
    S_ac0 = squeeze.S_amplitude if squeeze is not None else VACUUM_PSD
    S_as = squeeze.S_phase if squeeze is not None else VACUUM_PSD

    total = abs(transfer.T_bs_from_as) ** 2 * S_as
    for n, gain in transfer.T_bs_from_ac.items():
        if rung_amplitude_psd is not None and n in rung_amplitude_psd:
            S = rung_amplitude_psd[n]
            if S < 0.0:
                raise ValueError("amplitude-rung PSD must be >= 0")
        else:
            S = S_ac0 if n == 0 else VACUUM_PSD
        total += abs(gain) ** 2 * S
    for gain in transfer.T_bs_from_f.values():
        total += abs(gain) ** 2 * force_psd
    return float(total)
