"""Quantum-noise spectral densities for down-converted back-action-evading systems.

The package models hybrid measurement setups in which a high-frequency
oscillator is made to behave as a low- (possibly negative-) frequency one
by periodically modulating its coupling to the probing light.  It provides

* an exact multi-sideband frequency-domain solver (:mod:`qmfs.ladder`),
* the effective down-converted oscillator model it validates
  (:mod:`qmfs.downconv`),
* suppression schemes for the drive-induced extraneous back action
  (:mod:`qmfs.suppression`),
* serial/parallel force-sensing topologies and their matching conditions
  (:mod:`qmfs.sensing`),
* gravitational-wave-detector presets and sensitivity curves
  (:mod:`qmfs.gwd`),
* entanglement figures of merit (:mod:`qmfs.epr`), and
* a CLI (``qmfs``) for sweeps, presets and self-verification.
"""

from .core import (
    CouplingEnvelope,
    EffectiveOscillator,
    NoiseSpectrum,
    Oscillator,
    SqueezeConfig,
    ValidityWarning,
    effective_params,
    stroboscopic_envelope,
    susceptibility,
    thermal_force_psd,
    two_tone_envelope,
)
from .downconv import (
    chi_eff,
    effective_force_psd,
    effective_io_psd,
    extraneous_qba_gains,
    quadrature_decay_rates,
)
from .epr import EprLink, duan_bound_loss, duan_sum_thermal
from .gwd import GwdPreset, TABLE_PRESETS, baseline_psd, displacement_psd, fig5_curves
from .ladder import CavityParams, LadderTransfer, badcavity_transfer, fullcavity_transfer, output_psd
from .sensing import (
    FreeMassProbe,
    MatchReport,
    SensingPair,
    freemass_probe,
    k_res,
    match_report,
    matched_psds,
    parallel_force_psd,
    partial_match_psds,
    serial_force_psd,
)
from .suppression import (
    FilterCavitySetup,
    ParameterMismatchError,
    TwinCascade,
    measured_suppression,
    n_fold_cancellation_report,
    twin_cancellation_transfer,
)

__version__ = "0.1.0"

__all__ = [
    "CouplingEnvelope",
    "EffectiveOscillator",
    "NoiseSpectrum",
    "Oscillator",
    "SqueezeConfig",
    "ValidityWarning",
    "effective_params",
    "stroboscopic_envelope",
    "susceptibility",
    "thermal_force_psd",
    "two_tone_envelope",
    "chi_eff",
    "effective_force_psd",
    "effective_io_psd",
    "extraneous_qba_gains",
    "quadrature_decay_rates",
    "EprLink",
    "duan_bound_loss",
    "duan_sum_thermal",
    "GwdPreset",
    "TABLE_PRESETS",
    "baseline_psd",
    "displacement_psd",
    "fig5_curves",
    "CavityParams",
    "LadderTransfer",
    "badcavity_transfer",
    "fullcavity_transfer",
    "output_psd",
    "FreeMassProbe",
    "MatchReport",
    "SensingPair",
    "freemass_probe",
    "k_res",
    "match_report",
    "matched_psds",
    "parallel_force_psd",
    "partial_match_psds",
    "serial_force_psd",
    "FilterCavitySetup",
    "ParameterMismatchError",
    "TwinCascade",
    "measured_suppression",
    "n_fold_cancellation_report",
    "twin_cancellation_transfer",
    "__version__",
]
