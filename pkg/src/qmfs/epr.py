"""Entanglement figures of merit for the counter-rotating pair.

Conditional two-mode squeezing between a pair of continuously measured
oscillators with opposite evolution frequencies is quantified by the Duan
sum ``Sigma_EPR`` of the EPR-variable variances; values below 1 certify
inseparability.  Two independent limits are provided: the thermal-noise
estimate in terms of the quantum cooperativities ``C_q = (Gamma/2)/S_T`` of
the two subsystems, and the lower bound imposed by optical power loss
between them.  The two imperfections are reported side by side; no combined
figure is defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["EprLink", "duan_sum_thermal", "duan_bound_loss", "cooperativity"]


@dataclass(frozen=True)
class EprLink:
    """Parameters of a measurement-entangled oscillator pair.

    ``C_q1``, ``C_q2`` are the quantum cooperativities (nominal QBA over
    thermal force PSD), ``eta`` the detection efficiency and ``nu`` the
    power transmission between the two subsystems.
    """

    C_q1: float
    C_q2: float
    eta: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        if self.C_q1 <= 0.0 or self.C_q2 <= 0.0:
            raise ValueError("cooperativities must be > 0")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must be in (0, 1]")
        if not 0.0 <= self.nu <= 1.0:
            raise ValueError("nu must be in [0, 1]")


def cooperativity(Gamma: float, S_T: float) -> float:
    """Quantum cooperativity ``C_q = (Gamma/2) / S_T``."""
    if Gamma < 0.0 or S_T <= 0.0:
        raise ValueError("need Gamma >= 0 and S_T > 0")
    return 0.5 * Gamma / S_T


def duan_sum_thermal(link: EprLink) -> float:
    """Thermal-noise estimate ``Sigma_EPR = (1/(2 sqrt(eta))) sqrt(1/C_q1 + 1/C_q2)``.

    Valid for matched readout rates and near-unit intersystem transmission.
    Entanglement (``Sigma < 1``) requires ``C_q > 1/(2 eta)`` for a
    symmetric link, with equality exactly at the threshold.
    """
    return 0.5 / math.sqrt(link.eta) * math.sqrt(1.0 / link.C_q1 + 1.0 / link.C_q2)


def duan_bound_loss(link: EprLink) -> float:
    """Loss-imposed lower bound ``(1/sqrt(eta)) sqrt((1 - nu)/(1 + 3 nu))``.

    Stays below 1 for every nonzero transmission, so intersystem loss alone
    never forbids entanglement; it reaches 1 only at ``nu = 0``.
    """
    return math.sqrt((1.0 - link.nu) / (1.0 + 3.0 * link.nu)) / math.sqrt(link.eta)
