"""Relaxation-process noise models: Lorentzian, 1/f, and synthesis.

PSDs are one-sided in ordinary frequency but written as functions of
angular frequency omega, so integrating S(2 pi f) over f from 0 to
infinity recovers the total power. A single relaxation process with
zero-lag power R0 and relaxation time tau1 gives the Lorentzian; a
1/tau-weighted continuum of them between tau1 and tau2 gives the
flicker band, whose closed form is

    S(omega) = (k'/omega) * (arctan(omega tau2) - arctan(omega tau1))

k' absorbs the 4*R0*k normalization of the underlying rate density.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class NoiseModel:
    """Parameters of the relaxation-noise band.

    R0 : zero-lag power of the single-process autocorrelation
    tau1, tau2 : shortest / longest relaxation times bounding the band (s)
    kprime : flicker magnitude k' (power per unit log-rate * rad/s)
    seed : RNG seed for synthesis, fixed for reproducibility
    dof_coupled : how many of the three momentum degrees of freedom
        the readout couples to (1 for the flux device)
    """

    R0: float
    tau1: float
    tau2: float
    kprime: float
    seed: int = 0
    dof_coupled: int = 1

    def __post_init__(self):
        if self.R0 < 0:
            raise DomainError("R0 must be non-negative")
        if self.tau1 <= 0 or self.tau2 <= 0:
            raise DomainError("relaxation times must be positive")
        if not self.tau1 < self.tau2:
            raise DomainError("need tau1 < tau2")
        if self.kprime < 0:
            raise DomainError("kprime must be non-negative")
        if self.dof_coupled not in (1, 2, 3):
            raise DomainError("dof_coupled must be 1, 2 or 3")


def lorentzian_psd(model: NoiseModel, omega):
    """Single relaxation process: S(omega) = 4 R0 tau1 / (1 + (tau1 omega)^2).

    The total one-sided power integrates back to R0. omega may be an
    array; omega >= 0.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be non-negative")
    tau = model.tau1
    return 4.0 * model.R0 * tau / (1.0 + (tau * omega) ** 2)


def flicker_psd(model: NoiseModel, omega):
    """Flicker band from the 1/tau relaxation continuum.

    S(omega) = (k'/omega)(arctan(omega tau2) - arctan(omega tau1)),
    which runs flat below 1/tau2, falls as 1/omega in the band, and as
    1/omega^2 above 1/tau1. The omega -> 0 limit k'(tau2 - tau1) is
    used at omega = 0.
    """
    scalar = np.isscalar(omega)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(omega < 0):
        raise DomainError("omega must be non-negative")
    out = np.empty_like(omega)
    zero = omega == 0
    out[zero] = model.kprime * (model.tau2 - model.tau1)
    w = omega[~zero]
    out[~zero] = (model.kprime / w) * (np.arctan(w * model.tau2)
                                       - np.arctan(w * model.tau1))
    if scalar:
        return float(out[0])
    return out


def _telegraph(rng, n, flip_prob, amplitude):
    flips = rng.random(n) < flip_prob
    start = rng.integers(0, 2)
    parity = (start + np.cumsum(flips)) & 1
    return amplitude * (1.0 - 2.0 * parity)


def synth_flicker_series(model: NoiseModel, n: int, fs: float,
                         method: str = "telegraph") -> np.ndarray:
    """Synthesize a time series whose PSD follows the flicker band.

    method='telegraph' (default) superposes two-state random-telegraph
    processes with relaxation times log-spaced over [tau1, tau2], at
    least 20 per decade, equal amplitudes (a log-uniform rate grid is
    the discrete form of the 1/tau weighting). The per-process flip
    probability per sample is matched exactly to the discrete-time
    autocorrelation, so processes faster than the sample rate
    degenerate gracefully to white noise. method='spectral' shapes
    white Gaussian noise by sqrt(S) in the frequency domain instead.

    The series is deterministic for a given (model.seed, n, fs, method).

    Requires n >= 4096 samples, fs*tau2 > 10 so the slowest process is
    resolved, and a band at least one decade wide.
    """
    if n < 4096:
        raise DomainError("need n >= 4096 samples")
    if fs <= 0:
        raise DomainError("sample rate must be positive")
    if fs * model.tau2 <= 10:
        raise DomainError("fs * tau2 must exceed 10")
    decades = math.log10(model.tau2 / model.tau1)
    if decades < 1.0:
        raise DomainError("flicker band must span at least one decade")
    rng = np.random.default_rng(model.seed)
    if method == "telegraph":
        m = math.ceil(20.0 * decades)
        taus = np.geomspace(model.tau1, model.tau2, m)
        amp = math.sqrt(model.kprime * math.log(model.tau2 / model.tau1)
                        / (4.0 * m))
        out = np.zeros(n)
        if amp == 0.0:
            return out
        dt = 1.0 / fs
        for tau in taus:
            q = -0.5 * math.expm1(-dt / tau)
            out += _telegraph(rng, n, q, amp)
        return out
    if method == "spectral":
        freqs = np.fft.rfftfreq(n, d=1.0 / fs)
        psd = flicker_psd(model, 2.0 * math.pi * freqs)
        scale = np.sqrt(psd * fs * n / 4.0)
        re = rng.standard_normal(freqs.size)
        im = rng.standard_normal(freqs.size)
        spec = scale * (re + 1j * im)
        spec[0] = 0.0
        if n % 2 == 0:
            spec[-1] = spec[-1].real * math.sqrt(2.0)
        return np.fft.irfft(spec, n)
    raise DomainError(f"unknown synthesis method '{method}'")


def dof_variance_factor(model: NoiseModel) -> float:
    """Fraction of isotropic perturbation variance the device sees.

    Velocity perturbations are isotropic in three dimensions; a readout
    coupled to dof_coupled of them picks up dof_coupled/3 of the
    variance. The flux device couples to the single azimuthal direction
    and is therefore three times more robust than a device exposed to
    all of them.
    """
    return model.dof_coupled / 3.0


def white_series(sigma: float, n: int, seed: int = 0) -> np.ndarray:
    """Flat-spectrum Gaussian series of rms sigma.

    Hook for the bridge-current noise contribution, whose spectral
    shape is not modeled beyond its magnitude; callers set sigma from
    their own calibration and add the series where the current enters.
    """
    if sigma < 0:
        raise DomainError("sigma must be non-negative")
    if n < 1:
        raise DomainError("need at least one sample")
    rng = np.random.default_rng(seed)
    return sigma * rng.standard_normal(n)
