"""Pulse sequences, the quasi-static dephasing model, and sampled traces.

A sequence is an ordered list of segments applied to the optically
polarized initial state |0>.  Resonant pulses are hard pulses: rotation by
angle 2*Omega*tau about the x or y axis, so a Y pulse of duration
tau = theta/(2*Omega) prepares cos(theta/2)|0> + sin(theta/2)|-1>.

Dephasing is modeled as a quasi-static Gaussian offset on the longitudinal
detuning, resampled once per realization and applied to every segment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import dynamics
from .dynamics import KET_0, static_unitary, SIGMA_X, SIGMA_Y, SIGMA_Z
from .params import DriveParams, mhz


@dataclass(frozen=True)
class ResonantPulse:
    """Hard resonant pulse: H = rabi_amp * sigma_axis for duration seconds."""

    rabi_amp: float
    duration: float
    axis: str = "y"

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ValueError("axis must be 'x' or 'y'")
        if self.duration < 0:
            raise ValueError("duration must be >= 0")

    @classmethod
    def rotation(cls, theta: float, rabi_amp: float = mhz(25.0),
                 axis: str = "y") -> "ResonantPulse":
        """Pulse of duration tau = theta / (2 * rabi_amp)."""
        return cls(rabi_amp=rabi_amp, duration=theta / (2.0 * rabi_amp),
                   axis=axis)


@dataclass(frozen=True)
class FloquetDrive:
    """Weak periodic drive segment; t_offset keeps the drive phase
    continuous when a segment is split in two."""

    params: DriveParams
    duration: float
    t_offset: float = 0.0

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("duration must be >= 0")


@dataclass(frozen=True)
class FreeEvolution:
    """Free precession under H = (detuning/2) sigma_z."""

    detuning: float
    duration: float

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("duration must be >= 0")


PulseSegment = Union[ResonantPulse, FloquetDrive, FreeEvolution]


@dataclass(frozen=True)
class PulseSequence:
    segments: tuple

    def __init__(self, segments):
        segments = tuple(segments)
        if not segments:
            raise ValueError("sequence must be non-empty")
        object.__setattr__(self, "segments", segments)

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)


@dataclass(frozen=True)
class NoiseModel:
    """Quasi-static Gaussian detuning noise plus optional readout shot noise.

    readout_shots = None means noiseless expectation values.
    """

    sigma_detuning: float = 0.0
    n_realizations: int = 1
    readout_shots: Optional[int] = None

    def __post_init__(self):
        if self.sigma_detuning < 0:
            raise ValueError("sigma_detuning must be >= 0")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be >= 1")
        if self.readout_shots is not None and self.readout_shots < 1:
            raise ValueError("readout_shots must be >= 1 or None")

    @classmethod
    def calibrated(cls, n_realizations: int = 200) -> "NoiseModel":
        """The measured line broadening of the experiment, ~40 kHz."""
        return cls(sigma_detuning=mhz(0.04), n_realizations=n_realizations)

    @property
    def deterministic(self) -> bool:
        return self.sigma_detuning == 0.0 and self.readout_shots is None


NOISELESS = NoiseModel()


@dataclass
class TimeTrace:
    """Sampled P|0>(t) with run metadata; states kept for deterministic
    single-realization runs so band populations can be projected exactly."""

    times: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)
    states: Optional[np.ndarray] = None


def _segment_states(segment: PulseSegment, state: np.ndarray, local_times,
                    detuning_offset: float, tol: float):
    """States at the requested local times plus the end-of-segment state."""
    local_times = np.asarray(local_times, dtype=float)
    if isinstance(segment, ResonantPulse):
        gen = SIGMA_X if segment.axis == "x" else SIGMA_Y
        h = segment.rabi_amp * gen
        sampled = np.array([static_unitary(h, t) @ state for t in local_times])
        end = static_unitary(h, segment.duration) @ state
        return sampled, end
    if isinstance(segment, FreeEvolution):
        h = 0.5 * (segment.detuning + detuning_offset) * SIGMA_Z
        sampled = np.array([static_unitary(h, t) @ state for t in local_times])
        end = static_unitary(h, segment.duration) @ state
        return sampled, end
    if isinstance(segment, FloquetDrive):
        p = segment.params.replace(
            delta_z=segment.params.delta_z + detuning_offset
        )
        grid = np.concatenate([[0.0], local_times, [segment.duration]])
        order = np.argsort(grid, kind="stable")
        states = dynamics.propagate_trace(
            p, state, grid[order], tol=tol, t_offset=segment.t_offset
        )
        unsorted = np.empty_like(states)
        unsorted[order] = states
        return unsorted[1:-1], unsorted[-1]
    raise TypeError(f"unknown segment type {type(segment)!r}")


def _single_realization(seq: PulseSequence, sample_times, offset: float,
                        tol: float):
    sample_times = np.asarray(sample_times, dtype=float)
    states = np.empty((len(sample_times), 2), dtype=complex)
    state = KET_0
    t_seg = 0.0
    remaining = np.ones(len(sample_times), dtype=bool)
    for i, segment in enumerate(seq.segments):
        t_end = t_seg + segment.duration
        last = i == len(seq.segments) - 1
        if last:
            mask = remaining & (sample_times <= t_end * (1 + 1e-12) + 1e-30)
        else:
            mask = remaining & (sample_times < t_end)
        if np.any(mask):
            local = np.clip(sample_times[mask] - t_seg, 0.0, segment.duration)
            sampled, state_end = _segment_states(
                segment, state, local, offset, tol
            )
            states[mask] = sampled
            remaining &= ~mask
            state = state_end
        else:
            _, state = _segment_states(segment, state, [], offset, tol)
        t_seg = t_end
    if np.any(remaining):
        raise ValueError("sample times extend beyond the sequence duration")
    return states


def run_sequence(seq: PulseSequence, noise: NoiseModel, sample_times,
                 seed: Optional[int] = None,
                 tol: float = dynamics.DEFAULT_TOL) -> TimeTrace:
    """Simulate the sequence from |0> and return the averaged P|0> trace.

    The Gaussian detuning offset of each realization is added to delta_z of
    every Floquet drive and to the detuning of every free evolution.  With
    finite readout_shots, binomial sampling noise is added to the averaged
    trace.  Fixed seed gives bit-exact reruns.
    """
    sample_times = np.asarray(sample_times, dtype=float)
    if np.any(np.diff(sample_times) <= 0):
        raise ValueError("sample times must be strictly increasing")
    rng = np.random.default_rng(seed)
    meta = {
        "noise": {
            "sigma_detuning": noise.sigma_detuning,
            "n_realizations": noise.n_realizations,
            "readout_shots": noise.readout_shots,
        },
        "seed": seed,
        "segments": [type(s).__name__ for s in seq.segments],
    }
    if noise.deterministic:
        states = _single_realization(seq, sample_times, 0.0, tol)
        values = np.clip(np.abs(states[:, 0]) ** 2, 0.0, 1.0)
        return TimeTrace(times=sample_times, values=values, metadata=meta,
                         states=states)
    n_real = noise.n_realizations if noise.sigma_detuning > 0 else 1
    offsets = rng.normal(0.0, noise.sigma_detuning, n_real) \
        if noise.sigma_detuning > 0 else np.zeros(1)
    acc = np.zeros(len(sample_times))
    for offset in offsets:
        states = _single_realization(seq, sample_times, float(offset), tol)
        acc += np.abs(states[:, 0]) ** 2
    values = acc / n_real
    if noise.readout_shots is not None:
        shots = noise.readout_shots
        values = rng.binomial(shots, np.clip(values, 0.0, 1.0)) / shots
    return TimeTrace(times=sample_times, values=np.clip(values, 0.0, 1.0),
                     metadata=meta)
