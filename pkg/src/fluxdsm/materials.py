"""Superconductor material records and the empirical critical-field law.

Critical fields are stored as H (A/m); the corresponding flux density
is exposed separately as mu0*H because the literature quotes both and
mixing them up is a classic unit bug. All temperatures are kelvin, all
lengths metres, the gap is in joules.
"""

import math
from dataclasses import dataclass

from .constants import CODATA, PhysicalConstants
from .errors import ConfigError, DomainError
from .sectext import load_sections

TYPE_I = "type-I"
TYPE_II = "type-II"


@dataclass(frozen=True)
class Material:
    """Parameter set for one superconductor.

    Hc0 is the zero-temperature thermodynamic critical field for
    type-I materials; type-II materials carry the lower/upper pair
    (Hc1_0, Hc2_0) instead and leave Hc0 at 0 (and vice versa).

    N0 is the single-spin density of states at the Fermi level per
    unit energy and volume (1/(J m^3)); sigma_n the normal-state
    conductivity (S/m); tau_s the superfluid momentum relaxation time
    (s) used by the two-fluid dispersion.
    """

    name: str
    kind: str
    Tc: float
    lambda_l: float
    delta: float
    vF: float
    kF: float
    N0: float
    sigma_n: float
    tau_s: float
    Hc0: float = 0.0
    Hc1_0: float = 0.0
    Hc2_0: float = 0.0

    def __post_init__(self):
        if self.kind not in (TYPE_I, TYPE_II):
            raise DomainError(f"unknown material kind '{self.kind}'")
        if self.Tc <= 0:
            raise DomainError("Tc must be positive")
        if self.lambda_l <= 0:
            raise DomainError("lambda_l must be positive")
        if self.delta < 0:
            raise DomainError("delta must be non-negative")
        if self.vF <= 0:
            raise DomainError("vF must be positive")
        if self.sigma_n <= 0:
            raise DomainError("sigma_n must be positive")
        if self.tau_s < 0:
            raise DomainError("tau_s must be non-negative")
        if self.kind == TYPE_I:
            if self.Hc0 <= 0:
                raise DomainError("type-I material needs Hc0 > 0")
        else:
            if self.Hc1_0 <= 0 or self.Hc2_0 <= 0:
                raise DomainError("type-II material needs Hc1_0 and Hc2_0 > 0")
            if not self.Hc1_0 < self.Hc2_0:
                raise DomainError("type-II material needs Hc1_0 < Hc2_0")

    @property
    def london_coefficient(self) -> float:
        """Lambda = mu0 * lambda_l^2 (H m), the London material constant."""
        return CODATA.mu0 * self.lambda_l**2


def critical_field(material: Material, T: float, which: str = "auto",
                   constants: PhysicalConstants = CODATA) -> float:
    """Critical field H_c(T) = H_c(0) * (1 - (T/Tc)^2) in A/m.

    which selects the zero-temperature anchor: 'thermodynamic' (type-I
    Hc0), 'lower' (Hc1), 'upper' (Hc2), or 'auto' which resolves to
    'thermodynamic' for type-I and 'lower' for type-II. Above Tc the
    material is normal and the critical field is 0 by convention.
    """
    if T < 0:
        raise DomainError("temperature must be non-negative")
    if which == "auto":
        which = "thermodynamic" if material.kind == TYPE_I else "lower"
    anchors = {
        "thermodynamic": material.Hc0,
        "lower": material.Hc1_0,
        "upper": material.Hc2_0,
    }
    if which not in anchors:
        raise DomainError(f"unknown critical-field selector '{which}'")
    h0 = anchors[which]
    if h0 <= 0:
        raise DomainError(
            f"material '{material.name}' ({material.kind}) has no "
            f"'{which}' critical field")
    if T >= material.Tc:
        return 0.0
    return h0 * (1.0 - (T / material.Tc) ** 2)


def critical_flux_density(material: Material, T: float, which: str = "auto",
                          constants: PhysicalConstants = CODATA) -> float:
    """mu0 * H_c(T) in tesla, for comparisons against applied B fields."""
    return constants.mu0 * critical_field(material, T, which, constants)


# Sourced placeholder parameters. Round literature numbers; the solver
# contracts only need them to be self-consistent, not metrologically
# current.
BUILTIN_MATERIALS = {
    "lead": Material(
        name="lead", kind=TYPE_I, Tc=7.19, Hc0=6.39e4,
        lambda_l=3.7e-8, delta=2.16e-22, vF=1.83e6, kF=1.58e10,
        N0=1.3e47, sigma_n=4.8e6, tau_s=1e-12),
    "aluminum": Material(
        name="aluminum", kind=TYPE_I, Tc=1.196, Hc0=8.36e3,
        lambda_l=1.6e-8, delta=2.88e-23, vF=2.03e6, kF=1.75e10,
        N0=1.45e47, sigma_n=3.77e7, tau_s=1e-12),
    "niobium": Material(
        name="niobium", kind=TYPE_II, Tc=9.25, Hc1_0=1.43e5, Hc2_0=3.18e5,
        lambda_l=3.9e-8, delta=2.48e-22, vF=1.37e6, kF=1.18e10,
        N0=9.8e46, sigma_n=6.9e6, tau_s=1e-12),
}

_COMMON_KEYS = {"kind", "tc", "lambda_l", "delta", "vf", "kf", "n0",
                "sigma_n", "tau_s"}
_TYPE_I_KEYS = _COMMON_KEYS | {"hc0"}
_TYPE_II_KEYS = _COMMON_KEYS | {"hc1_0", "hc2_0"}


def load_materials(path) -> dict:
    """Load a materials catalog from a sectioned key=value file.

    One section per material; the section name is the material name.
    Type-I sections need hc0, type-II sections need hc1_0 and hc2_0.
    Returns a dict name -> Material.
    """
    catalog = {}
    for sec in load_sections(path):
        kind = sec.get_str("kind")
        if kind not in (TYPE_I, TYPE_II):
            raise ConfigError(
                f"kind must be '{TYPE_I}' or '{TYPE_II}', got '{kind}'",
                line=sec.line, path=sec.path)
        allowed = _TYPE_I_KEYS if kind == TYPE_I else _TYPE_II_KEYS
        sec.reject_unknown(allowed)
        fields = dict(
            name=sec.name, kind=kind,
            Tc=sec.get_float("tc"),
            lambda_l=sec.get_float("lambda_l"),
            delta=sec.get_float("delta"),
            vF=sec.get_float("vf"),
            kF=sec.get_float("kf"),
            N0=sec.get_float("n0"),
            sigma_n=sec.get_float("sigma_n"),
            tau_s=sec.get_float("tau_s"),
        )
        if kind == TYPE_I:
            fields["Hc0"] = sec.get_float("hc0")
        else:
            fields["Hc1_0"] = sec.get_float("hc1_0")
            fields["Hc2_0"] = sec.get_float("hc2_0")
        try:
            catalog[sec.name] = Material(**fields)
        except DomainError as exc:
            raise ConfigError(str(exc), line=sec.line, path=sec.path) from exc
    if not catalog:
        raise ConfigError("materials file defines no materials", path=str(path))
    return catalog


def get_material(name: str, catalog: dict | None = None) -> Material:
    """Look up a material by name in catalog (default: built-ins)."""
    table = BUILTIN_MATERIALS if catalog is None else catalog
    try:
        return table[name]
    except KeyError:
        known = ", ".join(sorted(table))
        raise DomainError(
            f"unknown material '{name}' (known: {known})") from None
