"""Panel definitions and rendering.

Each panel reads one experiment's CSV (plus its JSON sidecar for fit
overlays and labels) from the input directory and writes a single image.
Rendering is read-only on the inputs and deterministic: fixed styling,
fixed dpi, no timestamps embedded in the image.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import MissingColumnError, MissingInputError

DPI = 150
#: PNG text chunks stripped so re-rendering is byte-identical
_NO_STAMP = {"Software": None, "Creation Time": None}


@dataclass(frozen=True)
class PanelSpec:
    """One renderable panel: which CSV it needs and how to draw it."""

    panel_id: str
    csv_name: str
    columns: tuple
    title: str
    draw: object = field(repr=False)


def load_table(in_dir: str, csv_name: str, columns) -> dict:
    """Read the named CSV into float column arrays; validates the schema."""
    path = os.path.join(in_dir, csv_name)
    if not os.path.isfile(path):
        raise MissingInputError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows or len(rows) < 2:
        raise MissingInputError(f"empty CSV: {path}")
    header = rows[0]
    for col in columns:
        if col not in header:
            raise MissingColumnError(
                f"column '{col}' missing from {csv_name} "
                f"(found: {', '.join(header)})"
            )
    idx = {col: header.index(col) for col in columns}
    data = {col: np.array([float(r[idx[col]]) for r in rows[1:]])
            for col in columns}
    return data


def load_sidecar(in_dir: str, csv_name: str) -> dict:
    path = os.path.join(in_dir, csv_name.replace(".csv", ".meta.json"))
    if not os.path.isfile(path):
        return {}
    with open(path) as fh:
        return json.load(fh)


def _axes(title: str, xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(4.2, 3.0), constrained_layout=True)
    ax.set_title(title, fontsize=10)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return fig, ax


def _draw_ramsey(data, meta):
    fig, ax = _axes("Ramsey fringe", "free evolution time (µs)",
                    "P(|0⟩)")
    ax.plot(data["t_us"], data["p0"], "o-", ms=2.5, lw=0.8, color="C0")
    ax.set_ylim(-0.05, 1.05)
    return fig


def _draw_rabi(data, meta):
    fig, ax = _axes("Rabi oscillation", "pulse duration (µs)",
                    "P(|0⟩)")
    ax.plot(data["t_us"], data["p0"], "o-", ms=2.5, lw=0.8, color="C0")
    derived = meta.get("derived", {})
    if "fit_frequency_mhz" in derived:
        ax.annotate(f"fit: {derived['fit_frequency_mhz']:.3f} MHz",
                    xy=(0.97, 0.95), xycoords="axes fraction", ha="right",
                    fontsize=8)
    ax.set_ylim(-0.05, 1.05)
    return fig


def _closed_form_p0(theta, omega_f, omega0, t_s):
    return 0.5 * (1.0 + math.cos(theta) * np.cos(omega_f * t_s)
                  - math.sin(theta) * np.sin(omega_f * t_s)
                  * np.sin(omega0 * t_s))


def _draw_raman(data, meta):
    fig, ax = _axes("Floquet Raman transition", "drive duration (µs)",
                    "P(|0⟩)")
    ax.plot(data["t_us"], data["p0"], lw=0.5, color="C0", alpha=0.8,
            label="simulated")
    ax.plot(data["t_us"], data["p0_filtered"], lw=1.5, color="C3",
            label="inter-band population")
    derived = meta.get("derived", {})
    needed = ("theta", "omega0", "omega_f_ladder")
    if all(k in derived for k in needed):
        t_s = data["t_us"] * 1e-6
        model = _closed_form_p0(derived["theta"], derived["omega_f_ladder"],
                                derived["omega0"], t_s)
        ax.plot(data["t_us"], model, lw=0.5, color="0.4", ls="--",
                label="closed form")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=7, loc="lower right")
    return fig


def _draw_raman3(data, meta):
    fig = _draw_raman(data, meta)
    fig.axes[0].set_title("Third-order Floquet Raman transition",
                          fontsize=10)
    return fig


def _draw_omega_f_vs_amp(data, meta):
    fig, ax = _axes("Raman Rabi frequency vs drive amplitude",
                    "A (MHz)", "Ω$_F$ (MHz)")
    ax.plot(data["a_mhz"], data["omega_f_fit_mhz"], "o", ms=4, color="C0",
            label="time-domain fit")
    ax.plot(data["a_mhz"], data["omega_f_ladder_mhz"], "-", lw=1.2,
            color="C3", label="ladder model")
    ax.legend(fontsize=8)
    return fig


def _draw_contrast(data, meta):
    fig, ax = _axes("Transfer contrast vs drive frequency",
                    "ω (MHz)", "contrast")
    ax.plot(data["omega_mhz"], data["contrast"], "o", ms=3.5, color="C0",
            label="scan")
    fit = meta.get("derived", {}).get("lorentzian_fit")
    if fit:
        x = np.linspace(data["omega_mhz"].min(), data["omega_mhz"].max(),
                        400)
        c, g = fit["center_mhz"], fit["gamma_mhz"]
        y = fit["offset"] + fit["height"] * g**2 / (g**2 + (x - c) ** 2)
        ax.plot(x, y, "-", lw=1.2, color="C3", label="Lorentzian fit")
        ax.axvline(c, color="0.6", lw=0.7, ls=":")
        ax.annotate(f"center {c:.3f} MHz", xy=(c, ax.get_ylim()[1]),
                    xytext=(0.03, 0.92), textcoords="axes fraction",
                    fontsize=8)
    ax.legend(fontsize=8, loc="upper right")
    return fig


def _draw_photon_assisted(data, meta):
    fig, ax = _axes("Photon-assisted inter-band transfer",
                    "drive duration (µs)", "lower-band probability")
    ax.plot(data["t_us"], data["p_lower"], lw=1.0, color="C0")
    ax.set_ylim(-0.05, 1.05)
    return fig


def _draw_localization(data, meta):
    fig, ax = _axes("Dynamical localization", "a/ν",
                    "lower-band probability")
    times = meta.get("derived", {}).get("fixed_times_us")
    keys = [k for k in data if k.startswith("p_lower_t")]
    for i, key in enumerate(sorted(keys)):
        label = (f"T = {times[i]:.2f} µs" if times and i < len(times)
                 else key)
        ax.plot(data["a_over_nu"], data[key], "o-", ms=3, lw=1.0,
                color=f"C{i}", label=label)
    ax.legend(fontsize=8)
    return fig


def _spec(panel_id, csv_name, columns, title, draw):
    return PanelSpec(panel_id=panel_id, csv_name=csv_name,
                     columns=tuple(columns), title=title, draw=draw)


PANELS = {
    "1c": _spec("1c", "ramsey.csv", ("t_us", "p0"),
                "Ramsey fringe", _draw_ramsey),
    "1d": _spec("1d", "rabi.csv", ("t_us", "p0"),
                "Rabi oscillation", _draw_rabi),
    "2c": _spec("2c", "raman.csv", ("t_us", "p0", "p0_filtered"),
                "Floquet Raman transition", _draw_raman),
    "2d": _spec("2d", "scan-amp.csv",
                ("a_mhz", "omega_f_fit_mhz", "omega_f_ladder_mhz"),
                "Raman Rabi frequency vs amplitude", _draw_omega_f_vs_amp),
    "2e": _spec("2e", "scan-freq.csv", ("omega_mhz", "contrast"),
                "Transfer contrast vs frequency", _draw_contrast),
    "3b": _spec("3b", "raman3.csv", ("t_us", "p0", "p0_filtered"),
                "Third-order Raman transition", _draw_raman3),
    "4a": _spec("4a", "photon-assisted.csv", ("t_us", "p_lower"),
                "Photon-assisted transfer", _draw_photon_assisted),
    "4b": _spec("4b", "localization.csv", ("a_over_nu", "p_lower_t0"),
                "Dynamical localization", _draw_localization),
}


def render(panel_id: str, in_dir: str, out_file: str) -> str:
    """Render one panel from the CSVs in in_dir; returns the output path.

    Validates inputs before any file is written, so a failed render leaves
    no output behind.
    """
    if panel_id not in PANELS:
        raise MissingInputError(
            f"unknown panel '{panel_id}'; choose one of "
            f"{', '.join(sorted(PANELS))}"
        )
    spec = PANELS[panel_id]
    data = load_table(in_dir, spec.csv_name, spec.columns)
    if panel_id == "4b":
        # pick up any additional fixed-time columns beyond the required one
        path = os.path.join(in_dir, spec.csv_name)
        with open(path, newline="") as fh:
            header = next(csv.reader(fh))
        extra = [c for c in header if c.startswith("p_lower_t")
                 and c not in data]
        if extra:
            data.update(load_table(in_dir, spec.csv_name, extra))
    meta = load_sidecar(in_dir, spec.csv_name)
    fig = spec.draw(data, meta)
    try:
        fig.savefig(out_file, dpi=DPI, metadata=_NO_STAMP)
    finally:
        plt.close(fig)
    return out_file
