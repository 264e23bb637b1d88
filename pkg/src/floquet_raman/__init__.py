"""Simulator for a weakly, periodically driven two-level spin system:
Floquet quasienergy structure, synthetic-ladder Raman transitions, and
photon-assisted tunneling / dynamical localization analogs.
"""
from .params import DriveParams, mhz, to_mhz
from .dynamics import (
    HamiltonianSample,
    Propagator,
    hamiltonian_at,
    lab_frame_check,
    propagate_state,
    propagate_trace,
    propagate_unitary,
)
from .floquet import (
    EigenBasis,
    FloquetSpectrum,
    LadderModel,
    adiabaticity_parameter,
    eigenbasis,
    floquet_spectrum,
    fold_quasienergy,
    ladder_model,
    raman_rabi_frequency,
    resonance_frequency,
    resonance_locate,
)
from .sequences import (
    FloquetDrive,
    FreeEvolution,
    NoiseModel,
    PulseSequence,
    ResonantPulse,
    TimeTrace,
    run_sequence,
)
from .experiments import (
    ScanResult,
    closed_form_resonant_p0,
    extract_interband_population,
    scan_contrast_vs_frequency,
    scan_localization,
    scan_rabi_vs_amplitude,
    simulate_floquet_raman,
    simulate_photon_assisted,
    simulate_rabi,
    simulate_ramsey,
    simulate_third_order,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "DriveParams", "mhz", "to_mhz",
    "HamiltonianSample", "Propagator", "hamiltonian_at", "lab_frame_check",
    "propagate_state", "propagate_trace", "propagate_unitary",
    "EigenBasis", "FloquetSpectrum", "LadderModel", "adiabaticity_parameter",
    "eigenbasis", "floquet_spectrum", "fold_quasienergy", "ladder_model",
    "raman_rabi_frequency", "resonance_frequency", "resonance_locate",
    "FloquetDrive", "FreeEvolution", "NoiseModel", "PulseSequence",
    "ResonantPulse", "TimeTrace", "run_sequence",
    "ScanResult", "closed_form_resonant_p0", "extract_interband_population",
    "scan_contrast_vs_frequency", "scan_localization",
    "scan_rabi_vs_amplitude", "simulate_floquet_raman",
    "simulate_photon_assisted", "simulate_rabi", "simulate_ramsey",
    "simulate_third_order",
    "errors",
]
