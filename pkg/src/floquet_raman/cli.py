"""Command-line front end.

    sim <config-path> [--out DIR] [--seed N] [--quiet]

The scenario configuration is TOML with sections [drive], [noise], [grid]
and [run]; all frequencies are given in MHz and converted to angular rad/s
at parse time.  Each run writes one CSV per trace or scan plus a JSON
metadata sidecar holding the full config, the resolved parameters in
rad/s, the seed, the library version and the wall-clock time.  Output is
deterministic for a fixed seed.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import tomli

from . import __version__, experiments, floquet
from .errors import ParseError, SimulationError, ValidationError
from .params import DriveParams, mhz, to_mhz, TWO_PI
from .sequences import NoiseModel

log = logging.getLogger("floquet_raman")

OUTPUT_DIR_ENV = "FLOQUET_SIM_OUT"

EXPERIMENTS = (
    "ramsey", "rabi", "raman", "raman3", "spectrum", "ladder",
    "scan-amp", "scan-freq", "photon-assisted", "localization",
)

_DRIVE_KEYS = {
    "delta_z_mhz", "delta_x_mhz", "amp_mhz", "omega_mhz",
    "phase_mod_a_mhz", "phase_mod_nu_mhz",
}
_NOISE_KEYS = {"sigma_mhz", "n_realizations", "readout_shots"}
_GRID_KEYS = {
    "t_start_us", "t_stop_us", "n_points",
    "scan_start_mhz", "scan_stop_mhz", "scan_points",
    "scan_start", "scan_stop",
    "n_min", "n_max", "times_us", "prep_theta_rad",
}
_RUN_KEYS = {"workers", "tol"}

#: required [drive] keys per experiment
_REQUIRED_DRIVE = {
    "ramsey": {"delta_z_mhz"},
    "rabi": {"delta_z_mhz", "delta_x_mhz"},
    "raman": {"delta_z_mhz", "delta_x_mhz", "amp_mhz", "omega_mhz"},
    "raman3": {"delta_z_mhz", "delta_x_mhz", "amp_mhz", "omega_mhz"},
    "spectrum": {"delta_z_mhz", "delta_x_mhz", "amp_mhz", "omega_mhz"},
    "ladder": {"delta_z_mhz", "delta_x_mhz", "amp_mhz", "omega_mhz"},
    "scan-amp": {"delta_z_mhz", "delta_x_mhz"},
    "scan-freq": {"delta_z_mhz", "delta_x_mhz", "amp_mhz"},
    "photon-assisted": {"delta_z_mhz", "delta_x_mhz", "amp_mhz",
                        "omega_mhz", "phase_mod_a_mhz", "phase_mod_nu_mhz"},
    "localization": {"delta_z_mhz", "delta_x_mhz", "amp_mhz", "omega_mhz",
                     "phase_mod_nu_mhz"},
}
_NEEDS_TIME_GRID = {"ramsey", "rabi", "raman", "raman3", "photon-assisted"}
_NEEDS_SCAN_MHZ = {"scan-amp", "scan-freq"}


@dataclass
class ScenarioConfig:
    experiment: str
    drive: DriveParams
    noise: NoiseModel
    seed: int = 0
    time_grid: Optional[np.ndarray] = None
    scan_grid: Optional[np.ndarray] = None
    n_min: int = -5
    n_max: int = 5
    fixed_times: tuple = (0.20e-6, 0.48e-6)
    prep_theta: Optional[float] = None
    workers: int = 0
    tol: float = 1.0e-5
    raw: dict = field(default_factory=dict)


def _require(section: dict, key: str, section_name: str, experiment: str):
    if key not in section:
        raise ValidationError(
            f"missing key '{key}' in [{section_name}] required for "
            f"experiment '{experiment}'"
        )
    return section[key]


def _check_number(value, key: str, minimum=None, strict=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"key '{key}': expected a number, got {value!r}")
    if minimum is not None:
        if strict and not value > minimum:
            raise ValidationError(f"key '{key}': must be > {minimum}")
        if not strict and not value >= minimum:
            raise ValidationError(f"key '{key}': must be >= {minimum}")
    return float(value)


def _reject_unknown(section: dict, allowed: set, name: str):
    for key in section:
        if key not in allowed:
            raise ValidationError(f"unknown key '{key}' in section [{name}]")


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate scenario TOML; raises ParseError / ValidationError
    naming the offending key."""
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ParseError(f"malformed config: {exc}") from exc

    allowed_top = {"experiment", "seed", "drive", "noise", "grid", "run"}
    _reject_unknown(data, allowed_top, "top level")
    if "experiment" not in data:
        raise ValidationError("missing key 'experiment'")
    experiment = data["experiment"]
    if experiment not in EXPERIMENTS:
        raise ValidationError(
            f"key 'experiment': unknown experiment {experiment!r}; "
            f"choose one of {', '.join(EXPERIMENTS)}"
        )
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValidationError("key 'seed': expected an integer")

    drive_sec = data.get("drive", {})
    noise_sec = data.get("noise", {})
    grid_sec = data.get("grid", {})
    run_sec = data.get("run", {})
    for sec, allowed, name in (
        (drive_sec, _DRIVE_KEYS, "drive"),
        (noise_sec, _NOISE_KEYS, "noise"),
        (grid_sec, _GRID_KEYS, "grid"),
        (run_sec, _RUN_KEYS, "run"),
    ):
        if not isinstance(sec, dict):
            raise ValidationError(f"section [{name}] must be a table")
        _reject_unknown(sec, allowed, name)

    for key in sorted(_REQUIRED_DRIVE[experiment]):
        _require(drive_sec, key, "drive", experiment)

    def drive_val(key, default=0.0):
        if key not in drive_sec:
            return default
        return _check_number(drive_sec[key], key)

    try:
        drive = DriveParams.from_mhz(
            delta_z=drive_val("delta_z_mhz"),
            delta_x=drive_val("delta_x_mhz"),
            amp_a=drive_val("amp_mhz"),
            omega=drive_val("omega_mhz", default=1.0),
            phase_mod_a=drive_val("phase_mod_a_mhz"),
            phase_mod_nu=drive_val("phase_mod_nu_mhz"),
        )
    except ValueError as exc:
        raise ValidationError(f"invalid drive parameters: {exc}") from exc

    sigma = _check_number(noise_sec.get("sigma_mhz", 0.0), "sigma_mhz",
                          minimum=0.0)
    n_real = noise_sec.get("n_realizations", 1)
    if isinstance(n_real, bool) or not isinstance(n_real, int) or n_real < 1:
        raise ValidationError("key 'n_realizations': expected an integer >= 1")
    shots = noise_sec.get("readout_shots")
    if shots is not None and (
        isinstance(shots, bool) or not isinstance(shots, int) or shots < 1
    ):
        raise ValidationError("key 'readout_shots': expected an integer >= 1")
    noise = NoiseModel(sigma_detuning=mhz(sigma), n_realizations=n_real,
                       readout_shots=shots)

    cfg = ScenarioConfig(experiment=experiment, drive=drive, noise=noise,
                         seed=seed, raw=data)

    if experiment in _NEEDS_TIME_GRID:
        t_start = _check_number(grid_sec.get("t_start_us", 0.0), "t_start_us",
                                minimum=0.0)
        t_stop = _check_number(
            _require(grid_sec, "t_stop_us", "grid", experiment), "t_stop_us"
        )
        if t_stop <= t_start:
            raise ValidationError("key 't_stop_us': must be > t_start_us")
        n_points = grid_sec.get("n_points", 201)
        if isinstance(n_points, bool) or not isinstance(n_points, int) \
                or n_points < 2:
            raise ValidationError("key 'n_points': expected an integer >= 2")
        cfg.time_grid = np.linspace(t_start * 1e-6, t_stop * 1e-6, n_points)

    if experiment in _NEEDS_SCAN_MHZ or (
        experiment == "spectrum" and "scan_points" in grid_sec
    ):
        lo = _check_number(
            _require(grid_sec, "scan_start_mhz", "grid", experiment),
            "scan_start_mhz", minimum=0.0)
        hi = _check_number(
            _require(grid_sec, "scan_stop_mhz", "grid", experiment),
            "scan_stop_mhz", minimum=0.0)
        npt = _require(grid_sec, "scan_points", "grid", experiment)
        if isinstance(npt, bool) or not isinstance(npt, int) or npt < 2:
            raise ValidationError("key 'scan_points': expected an integer >= 2")
        if hi <= lo:
            raise ValidationError("key 'scan_stop_mhz': must be > scan_start_mhz")
        cfg.scan_grid = mhz(np.linspace(lo, hi, npt))

    if experiment == "localization":
        lo = _check_number(grid_sec.get("scan_start", 0.0), "scan_start",
                           minimum=0.0)
        hi = _check_number(grid_sec.get("scan_stop", 8.0), "scan_stop")
        npt = grid_sec.get("scan_points", 41)
        if isinstance(npt, bool) or not isinstance(npt, int) or npt < 2:
            raise ValidationError("key 'scan_points': expected an integer >= 2")
        if hi <= lo:
            raise ValidationError("key 'scan_stop': must be > scan_start")
        cfg.scan_grid = np.linspace(lo, hi, npt)
        times = grid_sec.get("times_us", [0.20, 0.48])
        if not isinstance(times, list) or not times:
            raise ValidationError("key 'times_us': expected a non-empty list")
        cfg.fixed_times = tuple(
            _check_number(t, "times_us", minimum=0.0, strict=True) * 1e-6
            for t in times
        )

    if experiment == "ladder":
        n_min = grid_sec.get("n_min", -5)
        n_max = grid_sec.get("n_max", 5)
        for key, val in (("n_min", n_min), ("n_max", n_max)):
            if isinstance(val, bool) or not isinstance(val, int):
                raise ValidationError(f"key '{key}': expected an integer")
        if n_max - n_min < 2:
            raise ValidationError("key 'n_max': need n_max - n_min >= 2")
        cfg.n_min, cfg.n_max = n_min, n_max

    if "prep_theta_rad" in grid_sec:
        cfg.prep_theta = _check_number(grid_sec["prep_theta_rad"],
                                       "prep_theta_rad")

    workers = run_sec.get("workers", 0)
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 0:
        raise ValidationError("key 'workers': expected an integer >= 0")
    cfg.workers = workers or (os.cpu_count() or 1)
    cfg.tol = _check_number(run_sec.get("tol", 1.0e-5), "tol", minimum=0.0,
                            strict=True)
    return cfg


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path: str, header: list, columns: list):
    rows = zip(*columns)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if dataclasses.is_dataclass(obj):
        return dataclasses.asdict(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _run_experiment(cfg: ScenarioConfig):
    """Dispatch; returns (csv_header, csv_columns, derived_metadata)."""
    d = cfg.drive
    derived: dict = {}
    if d.omega0 > 0:
        eb = floquet.eigenbasis(d)
        derived["omega0"] = eb.omega0
        derived["theta"] = eb.theta

    if cfg.experiment == "ramsey":
        trace = experiments.simulate_ramsey(
            d.delta_z, cfg.time_grid, noise=cfg.noise, seed=cfg.seed)
        return ["t_us", "p0"], [trace.times * 1e6, trace.values], derived

    if cfg.experiment == "rabi":
        trace = experiments.simulate_rabi(
            d.delta_z, d.delta_x, cfg.time_grid, noise=cfg.noise,
            seed=cfg.seed)
        from .fitting import fit_sinusoid
        fit = fit_sinusoid(trace.times, trace.values)
        derived["fit_frequency"] = fit.frequency
        derived["fit_frequency_mhz"] = to_mhz(fit.frequency)
        return ["t_us", "p0"], [trace.times * 1e6, trace.values], derived

    if cfg.experiment in ("raman", "raman3"):
        m = 2 if cfg.experiment == "raman" else 3
        trace = experiments.simulate_floquet_raman(
            d, cfg.time_grid, prep_theta=cfg.prep_theta, noise=cfg.noise,
            seed=cfg.seed)
        filtered = experiments.extract_interband_population(trace, d, m=m)
        derived["omega_f_ladder"] = floquet.raman_rabi_frequency(
            d, m, method="ladder")
        derived["omega_f_ladder_mhz"] = to_mhz(derived["omega_f_ladder"])
        derived["m"] = m
        return (
            ["t_us", "p0", "p0_filtered"],
            [trace.times * 1e6, trace.values, filtered.values],
            derived,
        )

    if cfg.experiment == "spectrum":
        omegas = cfg.scan_grid if cfg.scan_grid is not None \
            else np.array([d.omega])
        eps_p, eps_m = [], []
        for w in omegas:
            sp = floquet.floquet_spectrum(d.replace(omega=float(w)),
                                          tol=min(cfg.tol, 1e-8))
            eps_p.append(sp.quasienergies[0])
            eps_m.append(sp.quasienergies[1])
        return (
            ["omega_mhz", "eps_plus_mhz", "eps_minus_mhz"],
            [to_mhz(omegas), to_mhz(np.array(eps_p)),
             to_mhz(np.array(eps_m))],
            derived,
        )

    if cfg.experiment == "ladder":
        lm = floquet.ladder_model(d, cfg.n_min, cfg.n_max)
        derived["coupling_intra_mhz"] = to_mhz(lm.coupling_intra)
        derived["coupling_inter_mhz"] = to_mhz(lm.coupling_inter)
        return (
            ["band", "n", "energy_mhz"],
            [lm.bands, lm.ns, to_mhz(lm.energies)],
            derived,
        )

    if cfg.experiment == "scan-amp":
        scan = experiments.scan_rabi_vs_amplitude(
            cfg.scan_grid, d, workers=cfg.workers, tol=cfg.tol)
        derived["m"] = 2
        return (
            ["a_mhz", "omega_res_mhz", "omega_f_fit_mhz",
             "omega_f_ladder_mhz"],
            [to_mhz(scan.values), to_mhz(scan.observables["omega_res"]),
             to_mhz(scan.observables["omega_f_fit"]),
             to_mhz(scan.observables["omega_f_ladder"])],
            derived,
        )

    if cfg.experiment == "scan-freq":
        scan = experiments.scan_contrast_vs_frequency(
            cfg.scan_grid, d, workers=cfg.workers, tol=cfg.tol)
        derived["lorentzian_fit"] = {
            "center_mhz": to_mhz(scan.metadata["fit_center"]),
            "gamma_mhz": to_mhz(scan.metadata["fit_gamma"]),
            "height": scan.metadata["fit_height"],
            "offset": scan.metadata["fit_offset"],
            "r_squared": scan.metadata["fit_r_squared"],
        }
        derived["window_s"] = scan.metadata["duration"]
        return (
            ["omega_mhz", "contrast"],
            [to_mhz(scan.values), scan.observables["contrast"]],
            derived,
        )

    if cfg.experiment == "photon-assisted":
        trace = experiments.simulate_photon_assisted(
            d, cfg.time_grid, tol=min(cfg.tol, 1e-7))
        return (
            ["t_us", "p_upper", "p_lower"],
            [trace.times * 1e6, trace.values, 1.0 - trace.values],
            derived,
        )

    if cfg.experiment == "localization":
        scan = experiments.scan_localization(
            d, cfg.scan_grid, cfg.fixed_times, workers=cfg.workers,
            tol=min(cfg.tol, 1e-7))
        derived["fixed_times_us"] = [t * 1e6 for t in cfg.fixed_times]
        header = ["a_over_nu"] + [
            f"p_lower_t{i}" for i in range(len(cfg.fixed_times))
        ]
        cols = [scan.values] + [
            scan.observables[f"p_lower_t{i}"]
            for i in range(len(cfg.fixed_times))
        ]
        return header, cols, derived

    raise ValidationError(f"unhandled experiment {cfg.experiment!r}")


def run_scenario(cfg: ScenarioConfig, out_dir: str) -> dict:
    """Run one scenario and write `<experiment>.csv` + `.meta.json`."""
    started = time.time()
    os.makedirs(out_dir, exist_ok=True)
    header, columns, derived = _run_experiment(cfg)
    stem = cfg.experiment
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    meta_path = os.path.join(out_dir, f"{stem}.meta.json")
    _write_csv(csv_path, header, columns)
    meta = {
        "experiment": cfg.experiment,
        "config": cfg.raw,
        "resolved": {
            "drive_rad_per_s": cfg.drive.as_dict(),
            "noise": {
                "sigma_detuning_rad_per_s": cfg.noise.sigma_detuning,
                "n_realizations": cfg.noise.n_realizations,
                "readout_shots": cfg.noise.readout_shots,
            },
            "seed": cfg.seed,
            "workers": cfg.workers,
            "tol": cfg.tol,
        },
        "derived": derived,
        "csv": os.path.basename(csv_path),
        "columns": header,
        "version": __version__,
        "wall_clock_s": time.time() - started,
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, default=_json_default, sort_keys=True)
        fh.write("\n")
    log.info("wrote %s and %s", csv_path, meta_path)
    return {"csv": csv_path, "meta": meta_path}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Run a driven two-level Floquet simulation scenario.",
    )
    parser.add_argument("config", help="path to a TOML scenario config")
    parser.add_argument("--out", default=None,
                        help=f"output directory (default: ${OUTPUT_DIR_ENV} "
                             "or the current directory)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress logging")
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
    )
    out_dir = args.out or os.environ.get(OUTPUT_DIR_ENV) or "."
    try:
        with open(args.config, "r") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.raw["seed"] = args.seed
        paths = run_scenario(cfg, out_dir)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(paths["csv"])
        print(paths["meta"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
