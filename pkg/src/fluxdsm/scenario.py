"""Scenario configs and batch runners.

A scenario file is sectioned key=value text describing one run of one
pipeline kind. Runners write CSV artifacts plus a plain-text report
into an output directory. Identical config and seed produce byte
identical files: floats are serialized with repr (shortest roundtrip),
rows are ordered deterministically, and no timestamps or absolute
paths leak into any artifact.
"""

import math
import os
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
from scipy.signal import welch

from .comparator import make_comparator, quantize
from .constants import CODATA
from .electrodynamics import (PROFILE_CSV_HEADER, SlabConfig,
                              normal_slab_profile, solenoid_field,
                              super_slab_profile)
from .errors import ConfigError, DomainError
from .fluxtrap import (CylinderGeometry, EcoilStep, FieldStep,
                       default_amplification_schedule,
                       doubling_amplification_schedule, format_schedule,
                       iterate_sequence, load_schedule)
from .junctions import JunctionConfig, nis_current, sns_current
from .materials import BUILTIN_MATERIALS, get_material
from .modulator import (ModulatorConfig, dc_tracking_mean,
                        output_power_spectrum, run_modulator, sndr_db,
                        test_tone)
from .noise import NoiseModel, dof_variance_factor, flicker_psd, \
    lorentzian_psd, synth_flicker_series
from .sectext import Section, parse_sections

SCENARIO_KINDS = ("slab-profile", "device-sequence", "junction-iv",
                  "noise-psd", "modulator-run", "comparator-curve")

# section name each kind reads its parameters from
_KIND_SECTION = {
    "slab-profile": "slab",
    "device-sequence": "device",
    "junction-iv": "junction",
    "noise-psd": "noise",
    "modulator-run": "modulator",
    "comparator-curve": "comparator",
}


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    seed: int
    output_dir: str
    sections: Dict[str, Section]
    config_dir: str

    @property
    def params(self) -> Section:
        return self.sections[_KIND_SECTION[self.kind]]


def parse_scenario(text: str, path: Optional[str] = None) -> ScenarioConfig:
    """Parse and fully validate a scenario config. Unknown sections and
    keys are rejected with line-anchored messages."""
    sections = {sec.name: sec for sec in parse_sections(text, path=path)}
    if "scenario" not in sections:
        raise ConfigError("missing [scenario] section", path=path)
    top = sections["scenario"]
    top.reject_unknown({"kind", "seed", "output_dir"})
    kind = top.get_str("kind")
    if kind not in SCENARIO_KINDS:
        raise ConfigError(
            f"unknown scenario kind {kind!r}; expected one of "
            + ", ".join(SCENARIO_KINDS), path=path)
    seed = top.get_int("seed", 0)
    output_dir = top.get_str("output_dir", ".")
    needed = _KIND_SECTION[kind]
    if needed not in sections:
        raise ConfigError(f"scenario kind {kind!r} needs a [{needed}] "
                          f"section", path=path)
    allowed_sections = {"scenario", needed}
    if kind == "modulator-run":
        allowed_sections |= {"input-noise", "device"}
    for name, sec in sections.items():
        if name not in allowed_sections:
            raise ConfigError(
                f"section [{name}] does not belong to a {kind} scenario",
                path=path, line=sec.line)
    config_dir = os.path.dirname(os.path.abspath(path)) if path else "."
    cfg = ScenarioConfig(kind=kind, seed=seed, output_dir=output_dir,
                         sections=dict(sections), config_dir=config_dir)
    _VALIDATORS[kind](cfg)
    return cfg


def load_scenario(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read(), path=path)


def write_csv(path: str, header, rows) -> None:
    """CSV with '.' decimals, '\\n' endings, one header row. Floats are
    serialized with repr so equal values are equal bytes."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _lift_domain(sec: Section, fn, *args, **kwargs):
    """Run a constructor during config validation; a DomainError there
    is a config invariant violation, so re-raise it as one with the
    section's location attached."""
    try:
        return fn(*args, **kwargs)
    except DomainError as exc:
        raise ConfigError(str(exc), path=sec.path, line=sec.line) from exc


def _write_report(path: str, cfg: ScenarioConfig, metrics) -> None:
    """Config echo plus computed metrics, key = value per line."""
    lines = [f"kind = {cfg.kind}", f"seed = {cfg.seed}"]
    for name in sorted(cfg.sections):
        if name == "scenario":
            continue
        sec = cfg.sections[name]
        for key in sec.keys():
            lines.append(f"{name}.{key} = {sec.get_str(key)}")
    for key, value in metrics:
        lines.append(f"{key} = {_cell(value)}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------- slab

_SLAB_KEYS = {"material", "regime", "d", "b0", "omega", "t", "npoints"}


def _validate_slab(cfg: "ScenarioConfig") -> None:
    sec = cfg.sections["slab"]
    sec.reject_unknown(_SLAB_KEYS)
    regime = sec.get_str("regime")
    if regime not in ("normal", "super"):
        raise ConfigError("regime must be normal or super",
                          path=sec.path, line=sec.line)
    _lift_domain(sec, get_material, sec.get_str("material"))
    if sec.get_int("npoints", 201) < 3:
        raise ConfigError("npoints must be at least 3",
                          path=sec.path, line=sec.line)


def _run_slab(cfg: ScenarioConfig, out_dir: str) -> List[str]:
    sec = cfg.params
    material = get_material(sec.get_str("material"))
    slab = SlabConfig(d=sec.get_float("d"), material=material,
                      B0=sec.get_float("b0"),
                      omega=sec.get_float("omega", 0.0),
                      T=sec.get_float("t", 0.0))
    npoints = sec.get_int("npoints", 201)
    x = np.linspace(-slab.d, slab.d, npoints)
    if sec.get_str("regime") == "normal":
        profile = normal_slab_profile(slab, x)
    else:
        profile = super_slab_profile(slab, x)
    csv_path = os.path.join(out_dir, "profile.csv")
    write_csv(csv_path, PROFILE_CSV_HEADER, profile.rows())
    mid = npoints // 2
    report = os.path.join(out_dir, "report.txt")
    _write_report(report, cfg, [
        ("center_abs_b", abs(profile.B[mid])),
        ("center_screening", abs(profile.B[mid]) / abs(slab.B0)),
        ("max_abs_j", float(np.max(np.abs(profile.J)))),
    ])
    return [csv_path, report]


# -------------------------------------------------------------- device

_DEVICE_KEYS = {"radius", "n_segments", "n_eff", "b_in", "schedule",
                "material", "t"}


def _validate_device(cfg: "ScenarioConfig") -> None:
    sec = cfg.sections["device"]
    sec.reject_unknown(_DEVICE_KEYS)
    _lift_domain(sec, CylinderGeometry, radius=sec.get_float("radius"),
                 n_segments=sec.get_int("n_segments"),
                 n_eff=sec.get_float("n_eff", 1.0))
    if sec.has("material"):
        _lift_domain(sec, get_material, sec.get_str("material"))


def _resolve_schedule(name: str, n_segments: int, config_dir: str):
    if name == "doubling":
        return doubling_amplification_schedule()
    if name == "default":
        return default_amplification_schedule(n_segments)
    path = os.path.join(config_dir, name)
    try:
        return load_schedule(path)
    except OSError as exc:
        raise ConfigError(f"cannot read schedule file {name!r}: "
                          f"{exc.strerror}") from exc


def _step_fields(step):
    if isinstance(step, FieldStep):
        return "field", "*", step.on
    target = "*" if step.segment is None else str(step.segment)
    return "ecoil", target, step.on


def _run_device(cfg: ScenarioConfig, out_dir: str) -> List[str]:
    sec = cfg.params
    geom = CylinderGeometry(radius=sec.get_float("radius"),
                            n_segments=sec.get_int("n_segments"),
                            n_eff=sec.get_float("n_eff", 1.0))
    schedule = _resolve_schedule(sec.get_str("schedule", "default"),
                                 geom.n_segments, cfg.config_dir)
    material = get_material(sec.get_str("material")) \
        if sec.has("material") else None
    b_in = sec.get_float("b_in")
    rows = []
    final_state = None
    for index, step, state in iterate_sequence(
            geom, b_in, schedule, material=material,
            T=sec.get_float("t", 0.0)):
        action, target, on = _step_fields(step)
        rows.append((index, action, target, "on" if on else "off",
                     state.phases(), len(state.rings),
                     state.trapped_flux_total))
        final_state = state
    csv_path = os.path.join(out_dir, "sequence.csv")
    write_csv(csv_path, ("step", "action", "target", "switch", "phases",
                         "n_rings", "trapped_quanta"), rows)
    report = os.path.join(out_dir, "report.txt")
    gain = len(final_state.rings)
    _write_report(report, cfg, [
        ("gain", gain),
        ("trapped_quanta_total", final_state.trapped_flux_total),
        ("final_phases", final_state.phases()),
    ])
    return [csv_path, report]


# ------------------------------------------------------------ junction

_JUNCTION_KEYS = {"mode", "material", "delta", "t", "z", "d", "area",
                  "prefactor", "form", "r_sheet", "v_start", "v_stop",
                  "points", "phi_points"}


def _junction_config(sec: Section) -> JunctionConfig:
    if sec.has("material"):
        material = get_material(sec.get_str("material"))
        delta = sec.get_float("delta", material.delta)
    else:
        material = None
        delta = sec.get_float("delta")
    return JunctionConfig(
        delta=delta, T=sec.get_float("t"), d=sec.get_float("d", 0.0),
        Z=sec.get_float("z", 0.0), area=sec.get_float("area", 1e-12),
        prefactor=sec.get_float("prefactor", 1.0), material=material,
        r_sheet=sec.get_float("r_sheet") if sec.has("r_sheet") else None)


def _validate_junction(cfg: "ScenarioConfig") -> None:
    sec = cfg.sections["junction"]
    sec.reject_unknown(_JUNCTION_KEYS)
    mode = sec.get_str("mode")
    if mode not in ("nis", "sns"):
        raise ConfigError("mode must be nis or sns",
                          path=sec.path, line=sec.line)
    _lift_domain(sec, _junction_config, sec)
    if mode == "nis":
        if sec.get_float("v_start") >= sec.get_float("v_stop"):
            raise ConfigError("v_start must be below v_stop",
                              path=sec.path, line=sec.line)
        if sec.get_int("points", 101) < 2:
            raise ConfigError("points must be at least 2",
                              path=sec.path, line=sec.line)
    else:
        if sec.get_float("d", 0.0) <= 0:
            raise ConfigError("sns mode needs a barrier length d > 0",
                              path=sec.path, line=sec.line)


def _run_junction(cfg: ScenarioConfig, out_dir: str) -> List[str]:
    sec = cfg.params
    jc = _junction_config(sec)
    mode = sec.get_str("mode")
    csv_path = os.path.join(out_dir, "iv.csv")
    if mode == "nis":
        volts = np.linspace(sec.get_float("v_start"),
                            sec.get_float("v_stop"),
                            sec.get_int("points", 101))
        currents = [nis_current(jc, float(v)) for v in volts]
        write_csv(csv_path, ("v", "i"), zip(volts, currents))
        metrics = [("i_max", max(currents)), ("mode", "nis")]
    else:
        phis = np.linspace(0.0, 2.0 * math.pi,
                           sec.get_int("phi_points", 181))
        form = sec.get_int("form", 1)
        currents = [sns_current(jc, float(p), form=form) for p in phis]
        write_csv(csv_path, ("phi", "i"), zip(phis, currents))
        metrics = [("i_critical", max(currents)), ("mode", "sns")]
    report = os.path.join(out_dir, "report.txt")
    _write_report(report, cfg, metrics)
    return [csv_path, report]


# --------------------------------------------------------------- noise

_NOISE_KEYS = {"r0", "tau1", "tau2", "kprime", "n", "fs", "method",
               "dof_coupled"}


def _noise_model(sec: Section, seed: int) -> NoiseModel:
    return NoiseModel(R0=sec.get_float("r0", 1.0),
                      tau1=sec.get_float("tau1"),
                      tau2=sec.get_float("tau2"),
                      kprime=sec.get_float("kprime", 1.0),
                      seed=seed,
                      dof_coupled=sec.get_int("dof_coupled", 1))


def _validate_noise(cfg: "ScenarioConfig") -> None:
    sec = cfg.sections["noise"]
    sec.reject_unknown(_NOISE_KEYS)
    _lift_domain(sec, _noise_model, sec, 0)
    method = sec.get_str("method", "telegraph")
    if method not in ("telegraph", "spectral"):
        raise ConfigError("method must be telegraph or spectral",
                          path=sec.path, line=sec.line)


def _run_noise(cfg: ScenarioConfig, out_dir: str) -> List[str]:
    sec = cfg.params
    model = _noise_model(sec, cfg.seed)
    n = sec.get_int("n", 65536)
    fs = sec.get_float("fs", 1.0)
    series = synth_flicker_series(model, n, fs,
                                  method=sec.get_str("method", "telegraph"))
    series_path = os.path.join(out_dir, "series.csv")
    write_csv(series_path, ("k", "value"), enumerate(series.tolist()))
    freqs, measured = welch(series, fs=fs, nperseg=min(n // 8, 65536),
                            detrend="constant")
    omega = 2.0 * math.pi * freqs
    model_col = flicker_psd(model, omega)
    lorentz_col = lorentzian_psd(model, omega)
    psd_path = os.path.join(out_dir, "psd.csv")
    write_csv(psd_path, ("freq", "s_measured", "s_flicker", "s_lorentzian"),
              zip(freqs.tolist(), measured.tolist(),
                  model_col.tolist(), lorentz_col.tolist()))
    report = os.path.join(out_dir, "report.txt")
    _write_report(report, cfg, [
        ("series_variance", float(np.var(series))),
        ("dof_variance_factor", dof_variance_factor(model)),
    ])
    return [series_path, psd_path, report]


# ----------------------------------------------------------- modulator

_MOD_KEYS = {"order", "osr", "a", "c", "backend", "n", "tone_cycles",
             "amplitude_dbfs", "dc", "side", "i_bias", "full_scale",
             "input_coil_n", "input_coil_imax", "fs", "schedule",
             "stability_bound"}

_INPUT_NOISE_KEYS = {"r0", "tau1", "tau2", "kprime", "dof_coupled"}


def _float_list(sec: Section, key: str, default: str) -> tuple:
    raw = sec.get_str(key, default)
    try:
        return tuple(float(part) for part in raw.split(","))
    except ValueError:
        raise ConfigError(f"{key} must be a comma separated float list",
                          path=sec.path, line=sec.line) from None


def _modulator_config(cfg: ScenarioConfig) -> ModulatorConfig:
    sec = cfg.params
    comp = make_comparator(side=sec.get_float("side", 200e-6),
                           i_bias=sec.get_float("i_bias", 9.371e-3))
    full_scale = None
    if sec.has("full_scale"):
        full_scale = sec.get_float("full_scale")
    elif sec.has("input_coil_n"):
        # map u = +-1 to the field of the input solenoid at max drive
        full_scale = solenoid_field(sec.get_float("input_coil_n"),
                                    sec.get_float("input_coil_imax"))
    geometry = None
    schedule = None
    backend = sec.get_str("backend", "ideal")
    if backend == "flux-device":
        dev = cfg.sections.get("device")
        if dev is None:
            raise ConfigError("flux-device backend needs a [device] "
                              "section", path=sec.path, line=sec.line)
        dev.reject_unknown({"radius", "n_segments", "n_eff", "schedule"})
        geometry = CylinderGeometry(radius=dev.get_float("radius"),
                                    n_segments=dev.get_int("n_segments"),
                                    n_eff=dev.get_float("n_eff", 1.0))
        schedule = _resolve_schedule(dev.get_str("schedule", "default"),
                                     geometry.n_segments, cfg.config_dir)
    input_noise = None
    noise_sec = cfg.sections.get("input-noise")
    if noise_sec is not None:
        noise_sec.reject_unknown(_INPUT_NOISE_KEYS)
        input_noise = _noise_model(noise_sec, cfg.seed)
    order = sec.get_int("order", 2)
    if order != 2 and not (sec.has("a") and sec.has("c")):
        raise ConfigError("orders other than 2 need explicit a and c lists",
                          path=sec.path, line=sec.line)
    return ModulatorConfig(
        order=order, osr=sec.get_int("osr", 128),
        a=_float_list(sec, "a", "2,4"),
        c=_float_list(sec, "c", "0.5,0.5"),
        comparator=comp, backend=backend, geometry=geometry,
        schedule=schedule, fs=sec.get_float("fs", 1.0),
        full_scale=full_scale,
        stability_bound=sec.get_float("stability_bound", 8.0),
        seed=cfg.seed, input_noise=input_noise)


def _validate_modulator(cfg: "ScenarioConfig") -> None:
    sec = cfg.sections["modulator"]
    sec.reject_unknown(_MOD_KEYS)
    n = sec.get_int("n", 16384)
    if n < 16 or n & (n - 1):
        raise ConfigError("n must be a power of two, at least 16",
                          path=sec.path, line=sec.line)
    if sec.has("dc") and sec.has("tone_cycles"):
        raise ConfigError("dc and tone_cycles are mutually exclusive",
                          path=sec.path, line=sec.line)
    if sec.has("dc") and abs(sec.get_float("dc")) > 1.0:
        raise ConfigError("dc level must lie in [-1, 1]",
                          path=sec.path, line=sec.line)
    if sec.get_str("backend", "ideal") != "flux-device" \
            and "device" in cfg.sections:
        raise ConfigError("[device] section only applies to the "
                          "flux-device backend", path=sec.path,
                          line=cfg.sections["device"].line)
    _lift_domain(sec, _modulator_config, cfg)


def _run_modulator(cfg: ScenarioConfig, out_dir: str) -> List[str]:
    sec = cfg.params
    mc = _modulator_config(cfg)
    n = sec.get_int("n", 16384)
    if sec.has("dc"):
        u = np.full(n, sec.get_float("dc"))
        tone_cycles = None
    else:
        tone_cycles = sec.get_int("tone_cycles", 257)
        amp = 10.0 ** (sec.get_float("amplitude_dbfs", -1.0) / 20.0)
        u = test_tone(n, tone_cycles, amp)
    trace = run_modulator(mc, u)
    codes_path = os.path.join(out_dir, "codes.csv")
    write_csv(codes_path, ("k", "code"), enumerate(trace.codes.tolist()))
    freqs, power = output_power_spectrum(trace)
    spec_path = os.path.join(out_dir, "spectrum.csv")
    write_csv(spec_path, ("freq", "power"),
              zip(freqs.tolist(), power.tolist()))
    metrics = [("saturation_count", trace.saturation_count),
               ("stable", True)]
    if trace.device_gain is not None:
        metrics.append(("device_gain", trace.device_gain))
    if tone_cycles is not None:
        metrics.append(("sndr_db", sndr_db(trace, tone_cycles)))
    else:
        mean = dc_tracking_mean(trace)
        metrics.append(("dc_mean", mean))
        metrics.append(("tracking_error",
                        abs(mean - sec.get_float("dc"))))
    report = os.path.join(out_dir, "report.txt")
    _write_report(report, cfg, metrics)
    return [codes_path, spec_path, report]


# ---------------------------------------------------------- comparator

_COMP_KEYS = {"side", "i_bias", "b_start", "b_stop", "points"}


def _validate_comparator(cfg: "ScenarioConfig") -> None:
    sec = cfg.sections["comparator"]
    sec.reject_unknown(_COMP_KEYS)
    _lift_domain(sec, make_comparator,
                 side=sec.get_float("side", 200e-6),
                 i_bias=sec.get_float("i_bias", 9.371e-3))
    if sec.get_int("points", 513) < 2:
        raise ConfigError("points must be at least 2",
                          path=sec.path, line=sec.line)


def _run_comparator(cfg: ScenarioConfig, out_dir: str) -> List[str]:
    sec = cfg.params
    comp = make_comparator(side=sec.get_float("side", 200e-6),
                           i_bias=sec.get_float("i_bias", 9.371e-3))
    b_start = sec.get_float("b_start", -1.2 * comp.b_max)
    b_stop = sec.get_float("b_stop", 1.2 * comp.b_max)
    fields = np.linspace(b_start, b_stop, sec.get_int("points", 513))
    rows = []
    for b in fields:
        r = quantize(comp, float(b))
        rows.append((float(b), r.code, r.saturated, r.i_diff_half))
    csv_path = os.path.join(out_dir, "curve.csv")
    write_csv(csv_path, ("b", "code", "saturated", "i_diff_half"), rows)
    report = os.path.join(out_dir, "report.txt")
    _write_report(report, cfg, [
        ("n_levels", comp.n_levels),
        ("half_range", comp.half_range),
        ("b_lsb", comp.b_lsb),
        ("b_max", comp.b_max),
    ])
    return [csv_path, report]


_VALIDATORS = {
    "slab-profile": _validate_slab,
    "device-sequence": _validate_device,
    "junction-iv": _validate_junction,
    "noise-psd": _validate_noise,
    "modulator-run": _validate_modulator,
    "comparator-curve": _validate_comparator,
}

_RUNNERS = {
    "slab-profile": _run_slab,
    "device-sequence": _run_device,
    "junction-iv": _run_junction,
    "noise-psd": _run_noise,
    "modulator-run": _run_modulator,
    "comparator-curve": _run_comparator,
}


def run_scenario(cfg: ScenarioConfig,
                 out_dir: Optional[str] = None) -> List[str]:
    """Execute a parsed scenario; returns the artifact paths written."""
    target = out_dir if out_dir is not None else cfg.output_dir
    os.makedirs(target, exist_ok=True)
    return _RUNNERS[cfg.kind](cfg, target)
