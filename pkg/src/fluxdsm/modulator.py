"""Delta-sigma modulator loop around the flux comparator.

Feedforward (CIFF) topology with cascaded delayed integrators. The
first integrator accumulates the delayed loop error; later stages run
off the fresh upstream state:

    x1[k] = x1[k-1] + c1 (u[k-1] - v[k-1])
    xi[k] = xi[k-1] + ci x_{i-1}[k]        i >= 2
    y[k]  = sum_i a_i xi[k]
    v[k]  = Q(y[k])

All loop states are normalized to full scale, so u = +-1 spans the
comparator range. Defaults a = (2, 4), c = (0.5, 0.5) place both NTF
zeros at DC with denominator exactly 1, i.e. a pure (1 - 1/z)^2 shape.

The first integrator can optionally be realized by the flux-trapping
device: per sample the loop error is trapped as an integer number of
flux quanta over the cylinder area, multiplied by the schedule gain,
and summed in the pickup accumulator. Dividing the readout by the gain
recovers the ideal integrator up to single-quantum granularity.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .comparator import ComparatorConfig, make_comparator
from .constants import CODATA, PhysicalConstants
from .errors import ConfigError, DomainError, InstabilityError
from .fluxtrap import (CylinderGeometry, EcoilStep, FieldStep,
                       default_amplification_schedule,
                       round_half_even_quanta, run_amplification_sequence,
                       settle_time_device)
from .noise import NoiseModel, synth_flicker_series

BACKENDS = ("ideal", "flux-device")


def _default_comparator() -> ComparatorConfig:
    return make_comparator(side=200e-6, i_bias=9.371e-3)


@dataclass(frozen=True)
class ModulatorConfig:
    order: int = 2
    osr: int = 128
    a: tuple = (2.0, 4.0)
    c: tuple = (0.5, 0.5)
    comparator: ComparatorConfig = field(default_factory=_default_comparator)
    backend: str = "ideal"
    geometry: Optional[CylinderGeometry] = None
    schedule: Optional[tuple] = None
    fs: float = 1.0
    full_scale: Optional[float] = None
    stability_bound: float = 8.0
    seed: int = 0
    input_noise: Optional[NoiseModel] = None
    tau_cooper: float = 1e-10
    tau_ecoil: float = 3e-10

    def __post_init__(self):
        if not isinstance(self.order, int) or not 1 <= self.order <= 4:
            raise ConfigError("order must be an integer in 1..4")
        if not isinstance(self.osr, int) or self.osr < 8:
            raise ConfigError("osr must be an integer >= 8")
        if len(self.a) != self.order or len(self.c) != self.order:
            raise ConfigError("a and c must each have one entry per stage")
        if any(v <= 0 for v in self.a) or any(v <= 0 for v in self.c):
            raise ConfigError("feedforward and integrator gains must be > 0")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}")
        if self.backend == "flux-device" and self.geometry is None:
            raise ConfigError("flux-device backend needs a cylinder geometry")
        if self.fs <= 0:
            raise ConfigError("sample rate must be positive")
        if self.full_scale is not None and self.full_scale <= 0:
            raise ConfigError("full_scale must be positive")
        if self.stability_bound <= 0:
            raise ConfigError("stability bound must be positive")
        if self.tau_cooper <= 0 or self.tau_ecoil <= 0:
            raise ConfigError("settle time constants must be positive")
        if self.backend == "flux-device":
            # one clock period must leave room for the device to settle
            t_settle = settle_time_device(
                self.tau_cooper, self.geometry.n_segments, self.tau_ecoil)
            if self.fs * t_settle > 0.5:
                warnings.warn(
                    f"clock period {1.0 / self.fs:.3e} s leaves under half "
                    f"a cycle of margin over the device settle time "
                    f"{t_settle:.3e} s", stacklevel=2)

    @property
    def full_scale_field(self) -> float:
        """Field magnitude mapped to normalized unity (T)."""
        if self.full_scale is not None:
            return self.full_scale
        return self.comparator.half_range * self.comparator.b_lsb


@dataclass(frozen=True)
class TraceSet:
    """One modulator run: stimulus, codes, and internal state history."""

    config: ModulatorConfig
    u: np.ndarray
    codes: np.ndarray
    states: np.ndarray
    saturation_count: int
    device_gain: Optional[int] = None

    @property
    def v_field(self) -> np.ndarray:
        """Feedback DAC output per sample (T)."""
        return self.codes * self.config.comparator.b_lsb


def test_tone(n: int, cycles: int, amplitude: float) -> np.ndarray:
    """Coherent sine of an integer number of cycles over n samples, in
    normalized units (1.0 = full scale). Integer cycle counts keep the
    tone on a bin center so window leakage stays out of the noise
    estimate."""
    if n < 2:
        raise DomainError("need at least two samples")
    if not isinstance(cycles, (int, np.integer)) or cycles < 1:
        raise DomainError("cycles must be a positive integer")
    if cycles * 2 > n:
        raise DomainError("tone above the Nyquist bin")
    k = np.arange(n)
    return amplitude * np.sin(2.0 * math.pi * cycles * k / n)


def run_modulator(cfg: ModulatorConfig, u: Sequence,
                  constants: PhysicalConstants = CODATA) -> TraceSet:
    """Run the loop over a normalized input trace u, |u[k]| <= 1
    (u = 1 corresponds to the field cfg.full_scale_field). Deterministic
    for a fixed config: the only randomness is the seeded noise
    synthesis, and that is pinned by cfg.seed.

    Raises InstabilityError when any integrator state leaves the
    configured bound; the offending sample index rides on the error.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise DomainError("input trace must be a nonempty 1-d array")
    if np.max(np.abs(u)) > 1.0:
        raise DomainError("input must stay within [-1, 1] of full scale")
    n = u.size
    fsf = cfg.full_scale_field
    comp = cfg.comparator
    hr = comp.half_range
    lsb_n = comp.b_lsb / fsf

    u_n = u
    if cfg.input_noise is not None:
        # injected ahead of the quantizer, in normalized units; the
        # flicker amplitude calibration is the caller's k'
        u_n = u + synth_flicker_series(cfg.input_noise, n, cfg.fs)

    device_gain = None
    quanta_per_unit = 0.0
    if cfg.backend == "flux-device":
        geom = cfg.geometry
        schedule = cfg.schedule
        if schedule is None:
            schedule = default_amplification_schedule(geom.n_segments)
        # gain is set by the schedule topology alone; one reference run
        _, device_gain = run_amplification_sequence(
            geom, comp.b_lsb, schedule, constants=constants)
        quanta_per_unit = fsf * geom.area / constants.phi0

    order = cfg.order
    a = cfg.a
    c = cfg.c
    bound = cfg.stability_bound
    x = [0.0] * order
    acc = 0
    prev_err = 0.0
    codes = np.empty(n, dtype=np.int64)
    states = np.empty((n, order), dtype=float)
    saturations = 0

    for k in range(n):
        if cfg.backend == "flux-device":
            acc += device_gain * round_half_even_quanta(
                prev_err * quanta_per_unit)
            x[0] = acc * (c[0] / device_gain) / quanta_per_unit
        else:
            x[0] = x[0] + c[0] * prev_err
        for i in range(1, order):
            x[i] = x[i] + c[i] * x[i - 1]
        y = 0.0
        for i in range(order):
            xi = x[i]
            if not -bound <= xi <= bound:
                raise InstabilityError(
                    f"integrator {i + 1} left [-{bound}, {bound}] "
                    f"at sample {k}", sample=k)
            y += a[i] * xi
            states[k, i] = xi
        raw = round(y / lsb_n)
        if raw > hr:
            raw = hr
            saturations += 1
        elif raw < -hr:
            raw = -hr
            saturations += 1
        codes[k] = raw
        prev_err = u_n[k] - raw * lsb_n

    return TraceSet(config=cfg, u=u, codes=codes, states=states,
                    saturation_count=saturations, device_gain=device_gain)


def _hann_periodic(n: int) -> np.ndarray:
    k = np.arange(n)
    return 0.5 - 0.5 * np.cos(2.0 * math.pi * k / n)


def power_spectrum(x: np.ndarray, fs: float = 1.0):
    """Hann-windowed one-sided power spectrum of a real series.
    Returns (freqs, power) with exactly n//2 bins (DC in, Nyquist out)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    w = _hann_periodic(n)
    spec = np.fft.rfft(x * w)
    power = np.abs(spec[:n // 2]) ** 2
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)[:n // 2]
    return freqs, power


def output_power_spectrum(trace: TraceSet):
    """Spectrum of the code stream; power in code^2 units."""
    return power_spectrum(trace.codes.astype(float), trace.config.fs)


def sndr_from_series(x, osr: int, signal_cycles: int,
                     guard: int = 3) -> float:
    """In-band signal to noise-and-distortion ratio of a series, in dB.

    Signal power is the +-guard bins around the tone bin; noise is
    everything else inside the band edge n/(2 osr), skipping the first
    three bins where the window parks any DC content.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    _, power = power_spectrum(x)
    k0 = int(signal_cycles)
    band_edge = n // (2 * osr)
    if not 0 < k0 <= band_edge:
        raise ConfigError("signal bin outside the modulator band")
    lo = max(k0 - guard, 0)
    hi = min(k0 + guard, len(power) - 1)
    p_sig = float(np.sum(power[lo:hi + 1]))
    noise_bins = [k for k in range(3, band_edge + 1) if not lo <= k <= hi]
    p_noise = float(np.sum(power[noise_bins]))
    if p_sig <= 0.0:
        raise DomainError("degenerate spectrum: no signal power")
    if p_noise <= 0.0:
        # numerically silent band: report the double floor
        return 320.0
    return 10.0 * math.log10(p_sig / p_noise)


def sndr_db(trace: TraceSet, signal_cycles: int, guard: int = 3) -> float:
    """SNDR of a modulator run's code stream."""
    return sndr_from_series(trace.codes.astype(float), trace.config.osr,
                            signal_cycles, guard)


def in_band_noise_power(trace: TraceSet, osr: int, signal_cycles: int,
                        guard: int = 3) -> float:
    """Noise-plus-distortion power inside the band fs/(2 osr), with the
    tone window and DC bins excluded. Used for noise-shaping checks."""
    n = trace.codes.size
    _, power = output_power_spectrum(trace)
    band_edge = n // (2 * osr)
    k0 = int(signal_cycles)
    lo, hi = k0 - guard, k0 + guard
    bins = [k for k in range(3, band_edge + 1) if not lo <= k <= hi]
    return float(np.sum(power[bins]))


def theoretical_sqnr(order: int, osr: int, bits: float) -> float:
    """Peak SQNR of an ideal order-L loop at oversampling R with a
    B-bit quantizer:

        6.02 B + 1.76 - 10 log10(pi^(2L) / (2L + 1)) + (2L+1) 10 log10(R)
    """
    if not isinstance(order, int) or not 1 <= order <= 4:
        raise DomainError("order must be an integer in 1..4")
    if osr < 2:
        raise DomainError("osr must be >= 2")
    if bits <= 0:
        raise DomainError("bits must be positive")
    two_l = 2 * order
    return (6.02 * bits + 1.76
            - 10.0 * math.log10(math.pi ** two_l / (two_l + 1))
            + (two_l + 1) * 10.0 * math.log10(osr))


def dc_tracking_mean(trace: TraceSet, discard: Optional[int] = None) -> float:
    """Mean decoded output over the trace tail, in normalized units.
    Discards the first quarter by default to let the loop settle."""
    n = trace.codes.size
    if discard is None:
        discard = n // 4
    if not 0 <= discard < n:
        raise DomainError("discard must leave at least one sample")
    lsb_n = trace.config.comparator.b_lsb / trace.config.full_scale_field
    return float(np.mean(trace.codes[discard:])) * lsb_n
