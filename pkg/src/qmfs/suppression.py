"""Suppression of the extraneous quantum back action.

Two schemes are provided.  Scheme 1 measures the amplitude quadrature at
high sideband frequencies behind a narrowband filter cavity and subtracts
the reconstructed extraneous response in post-processing; with auxiliary
detection efficiency ``eta_aux`` the extraneous PSD is suppressed by the
factor ``1 - eta_aux``.  Scheme 2 cascades N identical oscillators driven
by the same unit pulse with staggered time delays so the extraneous rung
responses interfere destructively while the nominal responses add.

Scheme 1 is modeled at the PSD level; the filter cavity is validated
against its frequency-separation condition but is not a dynamical element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .core import CouplingEnvelope, Oscillator
from .ladder import LadderTransfer, badcavity_transfer

__all__ = [
    "FilterCavitySetup",
    "TwinCascade",
    "ParameterMismatchError",
    "measured_suppression",
    "twin_cancellation_transfer",
    "cascade_transfer",
    "n_fold_cancellation_report",
]


class ParameterMismatchError(ValueError):
    """Cascade members differ in a parameter that must be identical."""

    def __init__(self, fieldname: str, values):
        self.fieldname = fieldname
        super().__init__(f"cascade members differ in {fieldname!r}: {values}")


@dataclass(frozen=True)
class FilterCavitySetup:
    """Downstream filter cavity plus auxiliary detector for scheme 1.

    The separation condition ``|Omega| << kappa_filter << omega_tilde``
    must hold over the band of interest; :meth:`separation_ratios` reports
    both ratios (each should be <= 0.1).
    """

    kappa_filter: float
    eta_aux: float = 1.0

    def __post_init__(self):
        if self.kappa_filter <= 0.0:
            raise ValueError("kappa_filter must be > 0")
        if not 0.0 <= self.eta_aux <= 1.0:
            raise ValueError("eta_aux must be in [0, 1]")

    def separation_ratios(self, omega_max: float, omega_tilde: float) -> tuple:
        """(band / filter, filter / drive) ratios; both should be <= 0.1."""
        return (abs(omega_max) / self.kappa_filter, self.kappa_filter / omega_tilde)

    def separation_ok(self, omega_max: float, omega_tilde: float, threshold: float = 0.1) -> bool:
        low, high = self.separation_ratios(omega_max, omega_tilde)
        return low <= threshold and high <= threshold


def measured_suppression(extraneous_psd: float, setup: FilterCavitySetup) -> float:
    """Residual extraneous PSD after measurement-based subtraction.

    Optimizing the gain with which the auxiliary record is combined with
    the primary one leaves the factor ``1 - eta_aux``.
    """
    if extraneous_psd < 0.0:
        raise ValueError("extraneous PSD must be >= 0")
    return (1.0 - setup.eta_aux) * extraneous_psd


@dataclass(frozen=True)
class TwinCascade:
    """N identical oscillators two-tone / stroboscopically driven out of phase.

    Member ``l`` (1-based) is driven by the shared base envelope delayed by
    ``tau_l = pi*(l-1) / (N*omega_tilde)``.  Each member carries a bare
    readout rate ``Gamma/N`` so the net drive power matches a single
    oscillator with the full rate.  All other oscillator parameters must be
    identical across members.
    """

    oscillators: Sequence[Oscillator]
    base_envelope: CouplingEnvelope

    def __post_init__(self):
        if len(self.oscillators) < 2:
            raise ValueError("cascade needs at least 2 members")
        ref = self.oscillators[0]
        for name in ("omega0", "gamma", "rho", "n_T", "Gamma"):
            vals = [getattr(o, name) for o in self.oscillators]
            if any(abs(v - vals[0]) > 1e-12 * max(1.0, abs(vals[0])) for v in vals):
                raise ParameterMismatchError(name, vals)
        del ref

    @property
    def N(self) -> int:
        return len(self.oscillators)

    @property
    def omega_tilde(self) -> float:
        return self.base_envelope.omega_tilde

    def member_envelope(self, l: int) -> CouplingEnvelope:
        """Envelope of member ``l`` (1-based): base envelope delayed by tau_l."""
        tau = math.pi * (l - 1) / (self.N * self.omega_tilde)
        return self.base_envelope.delayed(tau)


def cascade_transfer(cascade: TwinCascade, omega: float, N_max=None) -> LadderTransfer:
    """Composed bad-cavity transfer of the cascade.

    The bad-cavity model is feed-forward in the amplitude quadrature
    (``b^c = a^c`` at every member), so amplitude-rung gains add and the
    shot-noise gain stays 1.  Per-member force gains are kept separate
    under keys ``(l, n)`` since the baths are independent.
    """
    members = [
        badcavity_transfer(osc, cascade.member_envelope(l + 1), omega, N_max)
        for l, osc in enumerate(cascade.oscillators)
    ]
    ac: Dict[int, complex] = {}
    f: Dict[tuple, complex] = {}
    for l, t in enumerate(members):
        for n, g in t.T_bs_from_ac.items():
            ac[n] = ac.get(n, 0j) + g
        for n, g in t.T_bs_from_f.items():
            f[(l + 1, n)] = g
    return LadderTransfer(omega=omega, n_max=members[0].n_max, T_bs_from_ac=ac, T_bs_from_f=f)


def twin_cancellation_transfer(cascade: TwinCascade, omega: float) -> LadderTransfer:
    """Composed transfer of the N=2 two-tone cascade, with cancellation asserted.

    The two members' extraneous rung gains (n = +-2) are exact negatives;
    the composed map therefore contains only the nominal rung, which adds
    constructively to the gain of a single effective oscillator carrying
    the summed readout rate.
    """
    if cascade.N != 2:
        raise ValueError("twin cancellation requires exactly 2 members")
    if not cascade.base_envelope.is_two_tone:
        raise ValueError("twin cancellation is defined for the two-tone envelope")
    composed = cascade_transfer(cascade, omega)
    singles = [
        badcavity_transfer(osc, cascade.member_envelope(l + 1), omega)
        for l, osc in enumerate(cascade.oscillators)
    ]
    scale = max(abs(g) for t in singles for g in t.T_bs_from_ac.values())
    for n in (-2, 2):
        residual = abs(composed.ac_gain(n))
        if scale > 0 and residual > 1e-10 * scale:
            raise AssertionError(f"extraneous rung n={n} did not cancel: residual {residual:.3e}")
    return composed


def n_fold_cancellation_report(cascade: TwinCascade, omega: float = 0.0, verify: bool = True) -> Dict[int, str]:
    """Which extraneous rungs the N-member cascade cancels.

    For a stroboscopic base envelope (all even coefficients zero) the
    extraneous response lives on even rungs only; rung ``n`` is cancelled
    iff ``(n/2) mod N != 0`` and constructive otherwise.  With ``verify``
    the rule is checked against the composed ladder transfer at ``omega``.
    """
    env = cascade.base_envelope
    if not env.is_stroboscopic:
        raise ValueError("cascade drive must be stroboscopic (all even envelope coefficients zero)")
    N = cascade.N
    # Extraneous rungs reachable from the envelope support: n = m +- 1 over
    # nonzero odd harmonics m, i.e. even n != 0 up to support + 1.
    rungs = sorted({m + d for m in env.support for d in (-1, 1)} - {0})
    for n in rungs:
        if n % 2 != 0:
            raise ValueError(f"odd extraneous rung n={n}: envelope violates the stroboscopic class")
    report = {n: ("cancelled" if (n // 2) % N != 0 else "constructive") for n in rungs}

    if verify:
        composed = cascade_transfer(cascade, omega)
        single = badcavity_transfer(
            cascade.oscillators[0], cascade.member_envelope(1), omega
        )
        scale = max(abs(g) for g in single.T_bs_from_ac.values())
        for n, verdict in report.items():
            combined = abs(composed.ac_gain(n))
            expected_constructive = N * abs(single.ac_gain(n))
            if verdict == "cancelled":
                ok = combined < 1e-9 * max(scale, 1e-300)
            else:
                ok = abs(combined - expected_constructive) < 1e-9 * max(expected_constructive, scale)
            if not ok:
                raise AssertionError(
                    f"rung n={n}: rule says {verdict} but composed gain is {combined:.3e} "
                    f"(single-member {abs(single.ac_gain(n)):.3e})"
                )
    return report
