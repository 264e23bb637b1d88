"""System parameterization and unit helpers.

All frequencies are stored as angular frequencies in rad/s.  User-facing
values are quoted in MHz and converted with an explicit 2*pi factor.
"""
from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import WeakDriveWarning

TWO_PI = 2.0 * np.pi


def mhz(value):
    """Convert a plain frequency in MHz to an angular frequency in rad/s."""
    return TWO_PI * 1.0e6 * value


def to_mhz(value):
    """Convert an angular frequency in rad/s back to MHz."""
    return value / (TWO_PI * 1.0e6)


@dataclass(frozen=True)
class DriveParams:
    """Drive and system frequencies defining the rotating-frame Hamiltonian.

    delta_z      longitudinal detuning (rad/s)
    delta_x      transverse static component (rad/s), >= 0
    amp_a        weak periodic drive amplitude (rad/s), >= 0
    omega        weak drive frequency (rad/s), > 0
    phase_mod_a  phase-modulation depth (rad/s); 0 disables modulation
    phase_mod_nu phase-modulation frequency (rad/s)
    """

    delta_z: float
    delta_x: float
    amp_a: float
    omega: float
    phase_mod_a: float = 0.0
    phase_mod_nu: float = 0.0

    def __post_init__(self):
        if self.delta_x < 0:
            raise ValueError("delta_x must be >= 0")
        if self.amp_a < 0:
            raise ValueError("amp_a must be >= 0")
        if self.omega <= 0:
            raise ValueError("omega must be > 0")
        if self.phase_mod_a < 0:
            raise ValueError("phase_mod_a must be >= 0")
        if self.phase_mod_a > 0 and self.phase_mod_nu <= 0:
            raise ValueError("phase_mod_nu must be > 0 when phase_mod_a > 0")
        w0 = self.omega0
        if w0 > 0 and self.amp_a >= w0:
            warnings.warn(
                "amp_a >= omega0: outside the weak-drive regime",
                WeakDriveWarning,
                stacklevel=2,
            )

    @property
    def omega0(self) -> float:
        """Static gap (delta_z**2 + delta_x**2)**0.5 in rad/s."""
        return float(np.hypot(self.delta_z, self.delta_x))

    @property
    def modulated(self) -> bool:
        return self.phase_mod_a > 0

    @classmethod
    def from_mhz(cls, delta_z, delta_x, amp_a=0.0, omega=1.0,
                 phase_mod_a=0.0, phase_mod_nu=0.0) -> "DriveParams":
        """Build from plain MHz values (each multiplied by 2*pi*1e6)."""
        return cls(
            delta_z=mhz(delta_z),
            delta_x=mhz(delta_x),
            amp_a=mhz(amp_a),
            omega=mhz(omega),
            phase_mod_a=mhz(phase_mod_a),
            phase_mod_nu=mhz(phase_mod_nu),
        )

    def replace(self, **changes) -> "DriveParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)
