"""Nonlinear least-squares fits used by the analysis and scan routines."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit


@dataclass(frozen=True)
class SinusoidFit:
    """a + b cos(frequency * t + phase)."""

    frequency: float
    amplitude: float
    offset: float
    phase: float
    r_squared: float


@dataclass(frozen=True)
class LorentzianFit:
    """offset + height * gamma**2 / (gamma**2 + (x - center)**2)."""

    center: float
    gamma: float
    height: float
    offset: float
    r_squared: float


@dataclass(frozen=True)
class DecayingSinusoidFit:
    """a + b cos(frequency * t + phase) * exp(-(t / t_decay)**2)."""

    frequency: float
    amplitude: float
    offset: float
    phase: float
    t_decay: float
    r_squared: float


def _r_squared(y, y_fit):
    ss_res = float(np.sum((y - y_fit) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def _dominant_frequency(t, y):
    """Angular frequency of the strongest non-DC peak on a uniform grid."""
    y = y - np.mean(y)
    dt = t[1] - t[0]
    spec = np.abs(np.fft.rfft(y))
    freqs = np.fft.rfftfreq(len(y), dt)
    if len(spec) < 2:
        return 0.0
    k = 1 + int(np.argmax(spec[1:]))
    return 2.0 * np.pi * freqs[k]


def _frequency_seeds(t, y):
    """FFT peak frequency plus its half-bin neighbors, as seed candidates.

    The true frequency can sit between FFT bins; seeding only at the peak
    bin occasionally drops curve_fit into a neighboring local minimum."""
    w0 = _dominant_frequency(t, y)
    bin_w = 2.0 * np.pi / (t[-1] - t[0] + 1e-300)
    if w0 <= 0:
        return [bin_w]
    return [w0, w0 - 0.5 * bin_w, w0 + 0.5 * bin_w]


def fit_sinusoid(t, y) -> SinusoidFit:
    """Fit y(t) = a + b cos(w t + phi), seeded by the FFT peak."""
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    a0 = float(np.mean(y))
    b0 = float(0.5 * (np.max(y) - np.min(y))) or 1.0e-6

    def model(tt, a, b, w, phi):
        return a + b * np.cos(w * tt + phi)

    best, best_ssr = None, np.inf
    for w_seed in _frequency_seeds(t, y):
        p0 = [a0, b0, w_seed, 0.0]
        try:
            popt, _ = curve_fit(model, t, y, p0=p0, maxfev=20000)
        except RuntimeError:
            popt = p0
        ssr = float(np.sum((y - model(t, *popt)) ** 2))
        if ssr < best_ssr:
            best, best_ssr = popt, ssr
    a, b, w, phi = best
    if b < 0:
        b, phi = -b, phi + np.pi
    return SinusoidFit(
        frequency=abs(float(w)),
        amplitude=float(b),
        offset=float(a),
        phase=float(np.mod(phi + np.pi, 2 * np.pi) - np.pi),
        r_squared=_r_squared(y, model(t, *popt)),
    )


def fit_lorentzian(x, y) -> LorentzianFit:
    """Fit y(x) = offset + h * g**2 / (g**2 + (x - c)**2)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    c0 = float(x[np.argmax(y)])
    off0 = float(np.min(y))
    h0 = float(np.max(y) - off0) or 1.0e-6
    above = x[y > off0 + 0.5 * h0]
    g0 = 0.5 * (above.max() - above.min()) if len(above) > 1 else \
        0.1 * (x.max() - x.min())

    def model(xx, c, g, h, off):
        return off + h * g**2 / (g**2 + (xx - c) ** 2)

    popt, _ = curve_fit(model, x, y, p0=[c0, g0 or 1.0, h0, off0],
                        maxfev=20000)
    c, g, h, off = popt
    return LorentzianFit(
        center=float(c),
        gamma=abs(float(g)),
        height=float(h),
        offset=float(off),
        r_squared=_r_squared(y, model(x, *popt)),
    )


def fit_decaying_sinusoid(t, y) -> DecayingSinusoidFit:
    """Fit a Gaussian-decaying fringe; t_decay is the 1/e envelope time."""
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    w0 = _dominant_frequency(t, y)
    a0 = float(np.mean(y))
    b0 = float(0.5 * (np.max(y) - np.min(y))) or 1.0e-6
    span = float(t[-1] - t[0])

    def model(tt, a, b, w, phi, td):
        return a + b * np.cos(w * tt + phi) * np.exp(-((tt / td) ** 2))

    popt, _ = curve_fit(
        model, t, y, p0=[a0, b0, w0, 0.0, 0.5 * span], maxfev=40000
    )
    a, b, w, phi, td = popt
    if b < 0:
        b, phi = -b, phi + np.pi
    return DecayingSinusoidFit(
        frequency=abs(float(w)),
        amplitude=float(b),
        offset=float(a),
        phase=float(np.mod(phi + np.pi, 2 * np.pi) - np.pi),
        t_decay=abs(float(td)),
        r_squared=_r_squared(y, model(t, *popt)),
    )
