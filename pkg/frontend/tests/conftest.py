import json
import math

import numpy as np
import pytest


def _csv(path, header, columns):
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(format(v, ".17g") for v in row))
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture()
def sim_outputs(tmp_path):
    """Synthetic CSV + sidecar files following the simulator's contract."""
    out = tmp_path / "simout"
    out.mkdir()
    t = np.linspace(0, 4, 201)

    _csv(out / "ramsey.csv", ["t_us", "p0"],
         [t, 0.5 * (1 - np.cos(2 * np.pi * 2 * t) * np.exp(-(t / 4) ** 2))])
    (out / "ramsey.meta.json").write_text(json.dumps({"derived": {}}))

    _csv(out / "rabi.csv", ["t_us", "p0"],
         [t, 0.5 * (1 + np.cos(2 * np.pi * 4.06 * t))])
    (out / "rabi.meta.json").write_text(
        json.dumps({"derived": {"fit_frequency_mhz": 4.06}}))

    theta, omega_f, omega0 = 0.767, 2 * np.pi * 0.45e6, 2 * np.pi * 13.9e6
    t_s = t * 1e-6
    p0 = 0.5 * (1 + math.cos(theta) * np.cos(omega_f * t_s)
                - math.sin(theta) * np.sin(omega_f * t_s)
                * np.sin(omega0 * t_s))
    p_low = 0.5 * (1 - np.cos(omega_f * t_s)) * math.cos(theta)
    for name in ("raman", "raman3"):
        _csv(out / f"{name}.csv", ["t_us", "p0", "p0_filtered"],
             [t, p0, p_low])
        (out / f"{name}.meta.json").write_text(json.dumps({
            "derived": {"theta": theta, "omega0": omega0,
                        "omega_f_ladder": omega_f, "m": 2},
        }))

    a = np.linspace(0.4, 2.4, 6)
    _csv(out / "scan-amp.csv",
         ["a_mhz", "omega_res_mhz", "omega_f_fit_mhz", "omega_f_ladder_mhz"],
         [a, np.full_like(a, 7.0), 0.08 * a**2, 0.079 * a**2])
    (out / "scan-amp.meta.json").write_text(json.dumps({"derived": {}}))

    w = np.linspace(6.3, 7.7, 31)
    contrast = 0.05 + 0.8 * 0.1**2 / (0.1**2 + (w - 7.0) ** 2)
    _csv(out / "scan-freq.csv", ["omega_mhz", "contrast"], [w, contrast])
    (out / "scan-freq.meta.json").write_text(json.dumps({
        "derived": {"lorentzian_fit": {"center_mhz": 7.0, "gamma_mhz": 0.1,
                                       "height": 0.8, "offset": 0.05,
                                       "r_squared": 0.999}},
    }))

    _csv(out / "photon-assisted.csv", ["t_us", "p_upper", "p_lower"],
         [t, 0.5 * (1 + np.cos(3 * t)), 0.5 * (1 - np.cos(3 * t))])
    (out / "photon-assisted.meta.json").write_text(
        json.dumps({"derived": {}}))

    r = np.linspace(0, 8, 41)
    _csv(out / "localization.csv",
         ["a_over_nu", "p_lower_t0", "p_lower_t1"],
         [r, np.abs(np.cos(r)) * 0.5, np.abs(np.sin(r)) * 0.5])
    (out / "localization.meta.json").write_text(json.dumps({
        "derived": {"fixed_times_us": [0.2, 0.48]},
    }))
    return out
