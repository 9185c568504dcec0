"""Analytic field and current profiles for conducting slabs and coils.

Geometry convention: the slab occupies -d <= x <= d, the applied AC
field B0*cos(omega*t) is parallel to the faces, and profiles are
returned as complex phasors B_hat(x) so that the physical field is
Re[B_hat(x) * exp(j*omega*t)]. Circulating current densities follow
the same convention.

A Crank-Nicolson time-domain solver for the underlying diffusion
equation is included purely as a verification oracle for the
closed-form normal-slab profile; nothing else in the package calls it.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky_banded, cho_solve_banded

from .constants import CODATA, PhysicalConstants
from .errors import DomainError, PhaseViolationError
from .materials import Material, critical_flux_density


@dataclass(frozen=True)
class SlabConfig:
    """Slab of half-thickness d (m) in an applied field phasor B0 (T)
    oscillating at omega (rad/s), held at temperature T (K)."""

    d: float
    material: Material
    B0: float
    omega: float
    T: float = 0.0

    def __post_init__(self):
        if self.d <= 0:
            raise DomainError("slab half-thickness d must be positive")
        if self.omega < 0:
            raise DomainError("omega must be non-negative")
        if self.T < 0:
            raise DomainError("temperature must be non-negative")


@dataclass(frozen=True)
class FieldProfile:
    """Phasor field/current profile sampled on a grid inside the slab."""

    x: np.ndarray
    B: np.ndarray
    J: np.ndarray

    def rows(self):
        for xi, bi, ji in zip(self.x, self.B, self.J):
            yield (xi, bi.real, bi.imag, ji.real, ji.imag)


PROFILE_CSV_HEADER = ("x", "re_b", "im_b", "re_j", "im_j")


def _check_grid(x, d):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("x must be a non-empty 1-D grid")
    if np.any(np.abs(x) > d * (1 + 1e-12)):
        raise DomainError("grid point outside the slab |x| <= d")
    return x


def skin_depth(omega: float, sigma: float, mu: float = CODATA.mu0) -> float:
    """Normal-metal skin depth sqrt(2/(omega*mu*sigma)) in metres."""
    if omega <= 0 or sigma <= 0 or mu <= 0:
        raise DomainError("skin depth needs omega, sigma, mu > 0")
    return math.sqrt(2.0 / (omega * mu * sigma))


def normal_slab_profile(cfg: SlabConfig, x,
                        constants: PhysicalConstants = CODATA) -> FieldProfile:
    """Field and circulating current in a normal slab under an AC field.

    Evaluates the flux-diffusion steady state

        B(x) = B0 * cosh(k x) / cosh(k d),   k = (1+j) sqrt(omega mu sigma / 2)
        J(x) = sqrt(omega sigma / (2 mu)) * B0 * (1+j) * sinh(k x) / sinh(k d)

    At omega = 0 the field penetrates uniformly and no circulating
    current flows.

    Parameters
    ----------
    cfg : SlabConfig
        Uses d, B0, omega and material.sigma_n.
    x : array_like
        Sample points, must satisfy |x| <= d.

    Returns
    -------
    FieldProfile
        Complex B (T) and J (A/m^2) phasors on the grid.
    """
    x = _check_grid(x, cfg.d)
    sigma = cfg.material.sigma_n
    mu = constants.mu0
    if cfg.omega == 0.0:
        return FieldProfile(x=x, B=np.full_like(x, cfg.B0, dtype=complex),
                            J=np.zeros_like(x, dtype=complex))
    k = (1 + 1j) * math.sqrt(cfg.omega * mu * sigma / 2.0)
    b = cfg.B0 * np.cosh(k * x) / np.cosh(k * cfg.d)
    j_amp = math.sqrt(cfg.omega * sigma / (2.0 * mu)) * cfg.B0 * (1 + 1j)
    j = j_amp * np.sinh(k * x) / np.sinh(k * cfg.d)
    return FieldProfile(x=x, B=b, J=j)


def super_slab_profile(cfg: SlabConfig, x,
                       constants: PhysicalConstants = CODATA) -> FieldProfile:
    """Meissner screening profile of a superconducting slab.

    Evaluates the London steady state with effective penetration depth
    lambda_eff = sqrt(Lambda / mu0) (Lambda the London material
    constant, so lambda_eff equals the material's London depth):

        B(x) = B0 * cosh(x / lambda_eff) / cosh(d / lambda_eff)
        J(x) = B0 / sqrt(mu0 * Lambda) * sinh(x / lambda_eff) / sinh(d / lambda_eff)

    The profile is frequency independent; omega plays no role here.

    Raises
    ------
    PhaseViolationError
        If |B0| is at or above the critical flux density mu0*Hc(T) for
        cfg.material at cfg.T (the slab would not be superconducting).
    """
    x = _check_grid(x, cfg.d)
    bc = critical_flux_density(cfg.material, cfg.T, constants=constants)
    if abs(cfg.B0) >= bc:
        raise PhaseViolationError(
            f"|B0| = {abs(cfg.B0):.4g} T is not below the critical flux "
            f"density {bc:.4g} T of {cfg.material.name} at T = {cfg.T} K")
    lam_big = cfg.material.london_coefficient
    lam_eff = math.sqrt(lam_big / constants.mu0)
    b = cfg.B0 * np.cosh(x / lam_eff) / np.cosh(cfg.d / lam_eff)
    j = (cfg.B0 / math.sqrt(constants.mu0 * lam_big)
         * np.sinh(x / lam_eff) / np.sinh(cfg.d / lam_eff))
    return FieldProfile(x=x, B=b, J=j)


def two_fluid_wavenumber(material: Material, omega: float,
                         constants: PhysicalConstants = CODATA) -> complex:
    """Complex spatial decay wavenumber of the two-fluid slab equation.

        kappa^2 = (1 + j omega (mu sigma lambda^2 + tau_s))
                  / (lambda^2 (1 + j omega tau_s))

    with lambda the London depth, sigma the normal-fluid conductivity
    and tau_s the superfluid relaxation time. The principal root with
    Re(kappa) >= 0 is returned. Limits: omega -> 0 gives 1/lambda
    (pure Meissner screening); lambda -> inf gives sqrt(j omega mu
    sigma) (normal-metal diffusion).
    """
    if omega < 0:
        raise DomainError("omega must be non-negative")
    lam = material.lambda_l
    sigma = material.sigma_n
    tau_s = material.tau_s
    mu = constants.mu0
    num = 1.0 + 1j * omega * (mu * sigma * lam**2 + tau_s)
    den = lam**2 * (1.0 + 1j * omega * tau_s)
    return complex(np.sqrt(num / den))


def solenoid_field(turns_per_length: float, current: float,
                   mu: float = CODATA.mu0) -> float:
    """Interior field of a long solenoid, B = mu * n * I (T)."""
    if turns_per_length < 0:
        raise DomainError("turns per length must be non-negative")
    if mu <= 0:
        raise DomainError("permeability must be positive")
    return mu * turns_per_length * current


def square_loop_center_field(side: float, i_diff_half: float,
                             constants: PhysicalConstants = CODATA) -> float:
    """Center field of a square loop of side L carrying the comparator
    half-difference current, B = 2*sqrt(2)*mu0*I / (pi*L)."""
    if side <= 0:
        raise DomainError("loop side must be positive")
    return 2.0 * math.sqrt(2.0) * constants.mu0 * i_diff_half / (math.pi * side)


def square_loop_current_for_field(side: float, b_center: float,
                                  constants: PhysicalConstants = CODATA) -> float:
    """Half-difference current that puts b_center at the middle of a
    square loop, I = pi*L*B / (2*sqrt(2)*mu0). Inverse of
    square_loop_center_field."""
    if side <= 0:
        raise DomainError("loop side must be positive")
    return math.pi * side * b_center / (2.0 * math.sqrt(2.0) * constants.mu0)


def circular_loop_center_field(radius: float, current: float,
                               constants: PhysicalConstants = CODATA) -> float:
    """Center field of a circular loop, B = mu0 * I / (2 R)."""
    if radius <= 0:
        raise DomainError("loop radius must be positive")
    return constants.mu0 * current / (2.0 * radius)


def circular_loop_current_for_field(radius: float, b_center: float,
                                    constants: PhysicalConstants = CODATA) -> float:
    """Loop current that produces b_center at the middle of a circular
    loop, I = 2 R B / mu0."""
    if radius <= 0:
        raise DomainError("loop radius must be positive")
    return 2.0 * radius * b_center / constants.mu0


def crank_nicolson_diffusion(d: float, sigma: float, omega: float,
                             b0: float = 1.0, npoints: int = 2001,
                             periods: int = 20, steps_per_period: int = 1024,
                             mu: float = CODATA.mu0):
    """Time-domain oracle for the normal-slab profile.

    Solves the flux diffusion equation

        mu * sigma * dB/dt = d^2B/dx^2

    on [-d, d] with Dirichlet boundaries B(+-d, t) = b0*cos(omega*t)
    and B(x, 0) = 0, using Crank-Nicolson stepping. After the
    transient has run for the given number of drive periods, the
    complex steady-state phasor is extracted by projecting the final
    period onto exp(j*omega*t).

    Returns
    -------
    x : ndarray
        The spatial grid (npoints values spanning [-d, d]).
    b_hat : ndarray of complex
        Extracted phasor amplitude at each grid point; the boundary
        entries are b0 by construction.

    Notes
    -----
    Verification use only. Accuracy is second order in both dx and dt;
    the defaults resolve a slab a few skin depths thick to better than
    1e-3 relative.
    """
    if d <= 0 or sigma <= 0 or omega <= 0 or npoints < 5:
        raise DomainError("need d, sigma, omega > 0 and npoints >= 5")
    x = np.linspace(-d, d, npoints)
    dx = x[1] - x[0]
    period = 2.0 * math.pi / omega
    dt = period / steps_per_period
    r = dt / (mu * sigma * dx * dx)

    n_in = npoints - 2
    # A = I - (r/2) T, symmetric positive definite; factor once.
    ab = np.zeros((2, n_in))
    ab[0, 1:] = -0.5 * r
    ab[1, :] = 1.0 + r
    cho = cholesky_banded(ab)

    u = np.zeros(n_in)
    nsteps = periods * steps_per_period
    proj = np.zeros(n_in, dtype=complex)
    t = 0.0
    for step in range(1, nsteps + 1):
        t_new = step * dt
        bc_old = b0 * math.cos(omega * t)
        bc_new = b0 * math.cos(omega * t_new)
        rhs = u.copy()
        rhs[1:-1] += 0.5 * r * (u[:-2] - 2.0 * u[1:-1] + u[2:])
        rhs[0] += 0.5 * r * (u[1] - 2.0 * u[0] + bc_old)
        rhs[-1] += 0.5 * r * (u[-2] - 2.0 * u[-1] + bc_old)
        rhs[0] += 0.5 * r * bc_new
        rhs[-1] += 0.5 * r * bc_new
        u = cho_solve_banded((cho, False), rhs)
        t = t_new
        if step > nsteps - steps_per_period:
            proj += u * np.exp(-1j * omega * t)
    b_hat = np.empty(npoints, dtype=complex)
    b_hat[1:-1] = 2.0 * proj / steps_per_period
    b_hat[0] = b_hat[-1] = b0
    return x, b_hat
