"""Discrete state machine for flux trapping, ring walking and readout.

The device is a segmented superconducting cylinder. Each segment has a
heater coil (an "E-coil"); an energized coil drives its segment normal.
Trapped flux is book-kept as exact integer multiples of the flux
quantum, with rounding to integers happening exactly once, at trap
time, using round-half-even. Circulating supercurrents are carried by
"rings": bands of contiguous superconducting segments. A ring's
current never changes while its span widens into newly superconducting
neighbours or contracts away from newly normal segments; any step that
would destroy that bookkeeping (emptying, splitting or merging a ring)
raises FluxLossError instead of guessing the physics.

Segments are labelled 1..n_segments throughout, matching the usual
schematic numbering.
"""

import math
from dataclasses import dataclass, field, replace

from .constants import CODATA, PhysicalConstants
from .errors import DomainError, FluxLossError, PhaseViolationError
from .materials import Material, critical_flux_density
from .sectext import ConfigSyntaxError

LN2 = math.log(2.0)


@dataclass(frozen=True)
class CylinderGeometry:
    """Cylinder bore of given radius (m), sliced into n_segments bands,
    with n_eff effective turns per unit length for the B = mu*n*I
    solenoid bookkeeping."""

    radius: float
    n_segments: int
    n_eff: float

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("radius must be positive")
        if self.n_segments < 1:
            raise DomainError("need at least one segment")
        if self.n_eff <= 0:
            raise DomainError("n_eff must be positive")

    @property
    def area(self) -> float:
        """Bore cross-section pi * r^2 (m^2)."""
        return math.pi * self.radius**2

    @property
    def segments(self):
        return range(1, self.n_segments + 1)


@dataclass(frozen=True)
class Ring:
    """One circulating supercurrent band.

    span is the set of contiguous segment labels the current occupies,
    current the total circulating current (A, sign follows the quanta),
    quanta the signed number of flux quanta the ring supports.
    """

    span: frozenset
    current: float
    quanta: int

    def __post_init__(self):
        if not self.span:
            raise DomainError("ring span must be non-empty")
        if not _contiguous(self.span):
            raise DomainError("ring span must be contiguous")

    @property
    def width(self) -> int:
        return len(self.span)

    def current_density(self, segment_height: float) -> float:
        """Sheet current per unit height (A/m); halves when the span
        doubles, since the total current is conserved."""
        return self.current / (self.width * segment_height)


def _contiguous(span) -> bool:
    return max(span) - min(span) + 1 == len(span)


@dataclass(frozen=True)
class FluxTrapState:
    """Snapshot of the device: which coils are energized (their
    segments are normal) and what rings are circulating."""

    geometry: CylinderGeometry
    energized: frozenset = field(default_factory=frozenset)
    rings: tuple = ()

    def __post_init__(self):
        for seg in self.energized:
            self._check_segment(seg)
        for ring in self.rings:
            if ring.span & self.energized:
                raise DomainError(
                    "ring span overlaps normal (energized) segments")

    def _check_segment(self, segment):
        if segment not in self.geometry.segments:
            raise DomainError(
                f"segment {segment} outside 1..{self.geometry.n_segments}")

    def is_superconducting(self, segment) -> bool:
        self._check_segment(segment)
        return segment not in self.energized

    @property
    def trapped_flux_total(self) -> int:
        """Total trapped flux in exact quanta."""
        return sum(r.quanta for r in self.rings)

    def phases(self) -> str:
        """Segment phases as a string, 'S' superconducting, 'N' normal."""
        return "".join(
            "N" if s in self.energized else "S" for s in self.geometry.segments)


def all_normal_state(geometry: CylinderGeometry) -> FluxTrapState:
    """Device with every coil energized and no trapped flux."""
    return FluxTrapState(geometry=geometry,
                         energized=frozenset(geometry.segments))


def round_half_even_quanta(flux_ratio: float) -> int:
    """Round a flux ratio B*A/phi0 to integer quanta, ties to even."""
    return int(round(flux_ratio))


def ring_current(quanta: int, geometry: CylinderGeometry,
                 constants: PhysicalConstants = CODATA) -> float:
    """Supercurrent supporting `quanta` flux quanta through the bore:
    I = B_trapped / (mu0 * n_eff) with B_trapped = quanta*phi0/area."""
    b_trapped = quanta * constants.phi0 / geometry.area
    return b_trapped / (constants.mu0 * geometry.n_eff)


def trap_flux(geometry: CylinderGeometry, b_ext: float,
              constants: PhysicalConstants = CODATA,
              material: Material | None = None,
              T: float = 0.0) -> FluxTrapState:
    """Cool the whole cylinder through Tc in a field, then remove it.

    All segments end superconducting and a single ring spanning the
    full stack carries the current that supports the quantized flux:
    quanta = round_half_even(b_ext * area / phi0).

    When a material is given, b_ext must stay below its critical flux
    density at temperature T or PhaseViolationError is raised.
    """
    if material is not None:
        bc = critical_flux_density(material, T, constants=constants)
        if abs(b_ext) >= bc:
            raise PhaseViolationError(
                f"|B_ext| = {abs(b_ext):.4g} T is not below the critical "
                f"flux density {bc:.4g} T of {material.name} at T = {T} K")
    quanta = round_half_even_quanta(b_ext * geometry.area / constants.phi0)
    ring = Ring(span=frozenset(geometry.segments),
                current=ring_current(quanta, geometry, constants),
                quanta=quanta)
    return FluxTrapState(geometry=geometry, energized=frozenset(),
                         rings=(ring,))


def _contract_rings(rings, segment, step=None):
    """Remove a newly normal segment from every ring that spans it."""
    out = []
    for ring in rings:
        if segment not in ring.span:
            out.append(ring)
            continue
        new_span = ring.span - {segment}
        if not new_span:
            raise FluxLossError(
                f"energizing coil {segment} leaves ring with no "
                "superconducting segment to carry its current", step=step)
        if not _contiguous(new_span):
            raise FluxLossError(
                f"energizing coil {segment} would split a ring spanning "
                f"{sorted(ring.span)}", step=step)
        out.append(replace(ring, span=frozenset(new_span)))
    return tuple(out)


def _spread_rings(rings, segment, step=None):
    """Widen rings adjacent to a newly superconducting segment into it."""
    adjacent = [i for i, r in enumerate(rings)
                if (segment - 1) in r.span or (segment + 1) in r.span]
    if len(adjacent) > 1:
        raise FluxLossError(
            f"de-energizing coil {segment} would merge rings "
            f"{sorted(rings[adjacent[0]].span)} and "
            f"{sorted(rings[adjacent[1]].span)}", step=step)
    if not adjacent:
        return tuple(rings)
    out = list(rings)
    ring = out[adjacent[0]]
    out[adjacent[0]] = replace(ring, span=frozenset(ring.span | {segment}))
    return tuple(out)


def set_ecoil(state: FluxTrapState, segment: int,
              energized: bool) -> FluxTrapState:
    """Energize or de-energize one E-coil, maintaining ring spans.

    Energizing drives the segment normal: any ring spanning it
    contracts to the remainder of its span with its current unchanged.
    De-energizing makes the segment superconducting: a ring sitting
    right next to it spreads into it, again with unchanged current (the
    current density drops as the span widens). Steps that would empty,
    split or merge rings raise FluxLossError. Re-applying the current
    coil state is a no-op.
    """
    state._check_segment(segment)
    if energized:
        if segment in state.energized:
            return state
        rings = _contract_rings(state.rings, segment)
        return replace(state, energized=frozenset(state.energized | {segment}),
                       rings=rings)
    if segment not in state.energized:
        return state
    rings = _spread_rings(state.rings, segment)
    return replace(state, energized=frozenset(state.energized - {segment}),
                   rings=rings)


# --- coil schedules -------------------------------------------------

@dataclass(frozen=True)
class EcoilStep:
    """Turn one E-coil (or all of them, segment None) on or off."""
    segment: int | None
    on: bool


@dataclass(frozen=True)
class FieldStep:
    """Turn the input solenoid field on or off."""
    on: bool


def doubling_amplification_schedule():
    """The textbook 7-step gain-2 sequence for a 4-segment device:
    energize everything in the input field, let segments 1 and 4 trap,
    remove the field, then walk the lower ring from segment 1 to 2."""
    return (
        EcoilStep(None, True),
        FieldStep(True),
        EcoilStep(1, False),
        EcoilStep(4, False),
        FieldStep(False),
        EcoilStep(2, False),
        EcoilStep(1, True),
    )


def default_amplification_schedule(n_segments: int):
    """Pairwise generalization of the gain-2 sequence.

    Traps one ring per even-labelled segment (floor(N/2) rings; a
    single-segment device traps in segment 1 instead), then walks every
    ring one segment down so each sits in an odd-labelled segment. The
    resulting gain is floor(N/2) for N >= 2 and 1 for N = 1.
    """
    if n_segments < 1:
        raise DomainError("need at least one segment")
    traps = list(range(2, n_segments + 1, 2)) or [1]
    steps = [EcoilStep(None, True), FieldStep(True)]
    steps += [EcoilStep(s, False) for s in traps]
    steps.append(FieldStep(False))
    for s in traps:
        if s > 1:
            steps.append(EcoilStep(s - 1, False))
            steps.append(EcoilStep(s, True))
    return tuple(steps)


def iterate_sequence(geometry: CylinderGeometry, b_in: float, schedule,
                     constants: PhysicalConstants = CODATA,
                     material: Material | None = None, T: float = 0.0):
    """Execute an amplification schedule step by step.

    Starts from the virgin cooldown state (all segments
    superconducting, input field off, no trapped flux) and yields
    (step_index, step, state) after each step.

    Trapping semantics: a segment pins flux only if it went
    superconducting while the input field was on; when the field is
    switched off, every contiguous run of such segments becomes one
    ring holding round_half_even(b_in * area / phi0) quanta. Segments
    that were already superconducting before the field came up screen
    the field instead and trap nothing.
    """
    if material is not None:
        bc = critical_flux_density(material, T, constants=constants)
        if abs(b_in) >= bc:
            raise PhaseViolationError(
                f"|B_in| = {abs(b_in):.4g} T is not below the critical "
                f"flux density {bc:.4g} T of {material.name} at T = {T} K")
    state = FluxTrapState(geometry=geometry)
    field_on = False
    armed = set()
    quanta_each = round_half_even_quanta(
        b_in * geometry.area / constants.phi0)
    for index, step in enumerate(schedule):
        if isinstance(step, FieldStep):
            if step.on and not field_on:
                field_on = True
                armed.clear()
            elif not step.on and field_on:
                field_on = False
                state = _trap_armed(state, armed, quanta_each,
                                    geometry, constants, step=index)
                armed.clear()
        elif isinstance(step, EcoilStep):
            targets = ([step.segment] if step.segment is not None
                       else list(geometry.segments))
            for seg in targets:
                went_sc = not step.on and seg in state.energized
                try:
                    state = set_ecoil(state, seg, step.on)
                except FluxLossError as exc:
                    raise FluxLossError(str(exc), step=index) from None
                if went_sc and field_on:
                    armed.add(seg)
                elif step.on:
                    armed.discard(seg)
        else:
            raise DomainError(f"unknown schedule step {step!r}")
        yield index, step, state


def _trap_armed(state, armed, quanta_each, geometry, constants, step):
    """Turn contiguous runs of armed superconducting segments into rings."""
    live = sorted(s for s in armed if s not in state.energized)
    if not live:
        return state
    covered = set().union(*(r.span for r in state.rings)) if state.rings else set()
    runs = []
    run = [live[0]]
    for seg in live[1:]:
        if seg == run[-1] + 1:
            run.append(seg)
        else:
            runs.append(run)
            run = [seg]
    runs.append(run)
    rings = list(state.rings)
    for run in runs:
        span = frozenset(run)
        if span & covered:
            raise FluxLossError(
                "trap would overlap an existing ring", step=step)
        rings.append(Ring(span=span,
                          current=ring_current(quanta_each, geometry,
                                               constants),
                          quanta=quanta_each))
    return replace(state, rings=tuple(rings))


def run_amplification_sequence(geometry: CylinderGeometry, b_in: float,
                               schedule,
                               constants: PhysicalConstants = CODATA,
                               material: Material | None = None,
                               T: float = 0.0):
    """Run a schedule to completion.

    Returns (final_state, gain) where gain is the number of independent
    rings left circulating. The amplified flux available to the readout
    is gain * round_half_even(b_in * area / phi0) quanta; with every
    ring trapping the same input field those two bookkeepings agree.
    """
    state = FluxTrapState(geometry=geometry)
    for _, _, state in iterate_sequence(geometry, b_in, schedule,
                                        constants, material, T):
        pass
    return state, len(state.rings)


def amplified_quanta(geometry: CylinderGeometry, b_in: float, gain: int,
                     constants: PhysicalConstants = CODATA) -> int:
    """Flux quanta delivered per cycle: gain * round_half_even(B*A/phi0)."""
    return gain * round_half_even_quanta(
        b_in * geometry.area / constants.phi0)


# --- schedule text format -------------------------------------------

def parse_schedule(text, path=None):
    """Parse the schedule text format: one step per line,
    'ecoil <label|*> on|off' or 'field on|off'; '#' comments allowed."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "field" and len(parts) == 2 and parts[1] in ("on", "off"):
            steps.append(FieldStep(parts[1] == "on"))
            continue
        if parts[0] == "ecoil" and len(parts) == 3 and parts[2] in ("on", "off"):
            if parts[1] == "*":
                seg = None
            else:
                try:
                    seg = int(parts[1])
                except ValueError:
                    raise ConfigSyntaxError(
                        f"bad segment label '{parts[1]}'",
                        line=lineno, path=path) from None
                if seg < 1:
                    raise ConfigSyntaxError(
                        "segment labels start at 1", line=lineno, path=path)
            steps.append(EcoilStep(seg, parts[2] == "on"))
            continue
        raise ConfigSyntaxError(
            f"expected 'ecoil <label|*> on|off' or 'field on|off', "
            f"got '{line}'", line=lineno, path=path)
    return tuple(steps)


def load_schedule(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_schedule(fh.read(), path=str(path))


def format_schedule(schedule) -> str:
    lines = []
    for step in schedule:
        if isinstance(step, FieldStep):
            lines.append(f"field {'on' if step.on else 'off'}")
        else:
            label = "*" if step.segment is None else str(step.segment)
            lines.append(f"ecoil {label} {'on' if step.on else 'off'}")
    return "\n".join(lines) + "\n"


# --- SQUID accumulator ----------------------------------------------

@dataclass(frozen=True)
class SquidAccumulator:
    """Integer flux integrator: a storage loop the amplifier dumps its
    amplified quanta into, one modulator cycle at a time."""

    accumulated_flux: int = 0
    gain_applied_log: tuple = ()


def integrate_cycle(squid: SquidAccumulator,
                    amplified: int) -> SquidAccumulator:
    """Add one cycle's amplified quanta to the accumulator. Exact
    integer arithmetic; the per-cycle contribution is appended to the
    log so the cycle history stays auditable."""
    if not isinstance(amplified, (int,)) or isinstance(amplified, bool):
        raise DomainError("amplified quanta must be an integer")
    return SquidAccumulator(
        accumulated_flux=squid.accumulated_flux + amplified,
        gain_applied_log=squid.gain_applied_log + (amplified,))


# --- coupled coils and settling -------------------------------------

@dataclass(frozen=True)
class CoupledCoilResult:
    """Flux swing of the pickup coil across one amplification cycle,
    split into the input-signal part and the bias part that a
    calibration cycle can remove."""

    total: float
    signal: float
    calibratable: float


def coupled_coil_delta_lambda(n_loops: int, lambda0: float, L: float,
                              i: float, epsilon: float) -> CoupledCoilResult:
    """Pickup flux change when N coupled loops hand their flux to the
    amplifier coil:

        delta_lambda = N (1 - eps) lambda0 + (N - 1)(1 - eps) L i

    The first term scales the per-loop input flux lambda0 (the signal),
    the second is the bias-current contribution, removable by running a
    reference cycle. eps is the residual flux fraction left behind.
    """
    if not isinstance(n_loops, int) or n_loops < 1:
        raise DomainError("n_loops must be a positive integer")
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError("epsilon must lie in [0, 1]")
    signal = n_loops * (1.0 - epsilon) * lambda0
    calibratable = (n_loops - 1) * (1.0 - epsilon) * L * i
    return CoupledCoilResult(total=signal + calibratable,
                             signal=signal, calibratable=calibratable)


def settle_time_classical(n_bits: int, tau: float) -> float:
    """RC settling to half-LSB accuracy of an N-bit converter:
    t = tau * (N + 1) * ln 2."""
    if not isinstance(n_bits, int) or n_bits < 1:
        raise DomainError("n_bits must be a positive integer")
    if tau <= 0:
        raise DomainError("tau must be positive")
    return tau * (n_bits + 1) * LN2


def settle_time_device(tau_cooper: float, n_amp: int,
                       tau_ecoil: float) -> float:
    """Settling budget of the flux amplifier itself:
    t = 16 * tau_cooper * ln 2 + (2 * n_amp + 1) * tau_ecoil.

    tau_cooper is the Cooper-pair formation time constant, tau_ecoil
    the per-step E-coil switching time; a gain sequence over n_amp
    segments needs 2*n_amp + 1 coil steps.
    """
    if tau_cooper <= 0 or tau_ecoil <= 0:
        raise DomainError("time constants must be positive")
    if not isinstance(n_amp, int) or n_amp < 0:
        raise DomainError("n_amp must be a non-negative integer")
    return 16.0 * tau_cooper * LN2 + (2 * n_amp + 1) * tau_ecoil
