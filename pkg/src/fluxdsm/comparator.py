"""Flux-quantized comparator / DAC pair.

The comparator senses the low-frequency field B_LF through a square
pickup loop of side L biased with current I. Resolution is set by one
flux quantum over the loop area (B_LSB = phi0 / L^2), range by the
bias current (B_max = sqrt(2) mu0 I / (pi L)), and the level count by
their ratio. Codes are mid-tread integers, rounded half-to-even, and
clamp with an explicit saturation flag rather than wrapping.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import CODATA, PhysicalConstants
from .electrodynamics import square_loop_current_for_field
from .errors import DomainError


@dataclass(frozen=True)
class ComparatorConfig:
    """Derived comparator parameters; build via make_comparator."""

    side: float
    i_bias: float
    b_lsb: float
    b_max: float
    n_levels: int

    @property
    def half_range(self) -> int:
        """Largest representable code magnitude."""
        return self.n_levels // 2


def make_comparator(side: float, i_bias: float,
                    constants: PhysicalConstants = CODATA) -> ComparatorConfig:
    """Size the comparator for a square loop of given side and bias.

        B_LSB = phi0 / L^2          (one quantum over the loop)
        B_max = sqrt(2) mu0 I / (pi L)
        N_lev = round(2 sqrt(2) mu0 e L I / (pi h))

    N_lev equals round(B_max / B_LSB) by construction. The canonical
    sizing L = 200 um, I = 9.371 mA lands at 513 levels (the raw ratio
    is 512.7, i.e. the quoted 512 within one count).
    """
    if side <= 0:
        raise DomainError("loop side must be positive")
    if i_bias <= 0:
        raise DomainError("bias current must be positive")
    b_lsb = constants.phi0 / side**2
    b_max = math.sqrt(2.0) * constants.mu0 * i_bias / (math.pi * side)
    n_levels = int(round(2.0 * math.sqrt(2.0) * constants.mu0 * constants.e
                         * side * i_bias / (math.pi * constants.h)))
    if n_levels < 1:
        raise DomainError(
            "bias current too small: comparator resolves no levels")
    return ComparatorConfig(side=side, i_bias=i_bias, b_lsb=b_lsb,
                            b_max=b_max, n_levels=n_levels)


@dataclass(frozen=True)
class QuantizeResult:
    code: int
    saturated: bool
    b_quantized: float
    i_diff_half: float


def quantize(cfg: ComparatorConfig, b_lf: float,
             constants: PhysicalConstants = CODATA) -> QuantizeResult:
    """Quantize a field sample to a mid-tread code.

    code = clamp(round_half_even(B_LF / B_LSB), -half_range, +half_range)

    Saturation is flagged, never wrapped. The result also reports the
    differential half-current |I1 - I2|/2 which the input field implies
    in the pickup loop, for current-domain diagnostics.
    """
    raw = int(round(b_lf / cfg.b_lsb))
    hr = cfg.half_range
    saturated = raw > hr or raw < -hr
    code = min(max(raw, -hr), hr)
    return QuantizeResult(
        code=code, saturated=saturated, b_quantized=code * cfg.b_lsb,
        i_diff_half=square_loop_current_for_field(cfg.side, b_lf, constants))


def quantize_codes(cfg: ComparatorConfig, b_lf) -> np.ndarray:
    """Vectorized code path of quantize (no saturation flags): half-even
    rounding then clamping, for transfer curves and batch work."""
    b = np.asarray(b_lf, dtype=float)
    raw = np.round(b / cfg.b_lsb)
    hr = cfg.half_range
    return np.clip(raw, -hr, hr).astype(int)


def dac_feedback(cfg: ComparatorConfig, code: int) -> float:
    """Field the feedback DAC reproduces for a code: code * B_LSB.
    Codes beyond the comparator range are a domain error."""
    if not isinstance(code, (int, np.integer)) or isinstance(code, bool):
        raise DomainError("code must be an integer")
    if abs(int(code)) > cfg.half_range:
        raise DomainError(
            f"code {code} outside comparator range +-{cfg.half_range}")
    return int(code) * cfg.b_lsb
