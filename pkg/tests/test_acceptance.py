"""Operating-envelope acceptance suite.

Twelve end-to-end checks, one test each, covering the headline numbers
the simulator is built to reproduce: comparator sizing, flux quantum,
settling budgets, loop SNDR and DC tracking, the electrodynamics
oracle, junction physics identities, flux conservation, noise spectra,
and byte-exact reproducibility of the shipped scenarios. Stated
runtime budgets are asserted inside the tests.
"""

import filecmp
import glob
import math
import os
import random
import time

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.signal import welch

from fluxdsm.comparator import make_comparator
from fluxdsm.constants import CODATA, flux_quantum
from fluxdsm.electrodynamics import (
    SlabConfig,
    circular_loop_current_for_field,
    crank_nicolson_diffusion,
    normal_slab_profile,
    skin_depth,
    super_slab_profile,
    two_fluid_wavenumber,
)
from fluxdsm.fluxtrap import (
    CylinderGeometry,
    default_amplification_schedule,
    doubling_amplification_schedule,
    run_amplification_sequence,
    set_ecoil,
    settle_time_classical,
    settle_time_device,
)
from fluxdsm.junctions import (
    JunctionConfig,
    coherence_factors,
    n_coherence_length,
    nis_current,
    nis_current_lowT,
    sns_current,
)
from fluxdsm.materials import Material, get_material
from fluxdsm.modulator import (
    ModulatorConfig,
    dc_tracking_mean,
    run_modulator,
    sndr_db,
    theoretical_sqnr,
)
from fluxdsm.modulator import test_tone as make_tone
from fluxdsm.noise import (
    NoiseModel,
    dof_variance_factor,
    lorentzian_psd,
    synth_flicker_series,
)
from fluxdsm.scenario import load_scenario, run_scenario

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), os.pardir,
                            "scenarios")


def test_c01_quantizer_level_count():
    make_comparator(200e-6, 9.371e-3)  # warm path
    t0 = time.perf_counter()
    comp = make_comparator(200e-6, 9.371e-3)
    elapsed = time.perf_counter() - t0
    assert comp.n_levels == 513
    assert abs(comp.n_levels - 512) <= 1
    raw = comp.b_max / comp.b_lsb
    assert raw == pytest.approx(512.7, abs=0.05)
    assert elapsed < 1e-3


def test_c02_flux_quantum():
    phi0 = flux_quantum()
    assert phi0 == pytest.approx(2.0678338484619295e-15, rel=1e-12)
    assert phi0 == CODATA.h / (2.0 * CODATA.e)
    # quoted historical rounding sits within 0.2%
    assert abs(phi0 - 2.0706e-15) / 2.0706e-15 < 0.002
    comp = make_comparator(200e-6, 9.371e-3)
    assert abs(comp.b_lsb - phi0 / (200e-6) ** 2) / comp.b_lsb < 1e-12


def test_c03_settling_constants():
    ratio = settle_time_classical(22, 1.0)
    assert ratio == pytest.approx(15.942385152878742, rel=1e-12)
    assert ratio == pytest.approx(15.94, abs=0.01)
    t_dev = settle_time_device(0.1e-9, 32, 0.3e-9)
    assert t_dev == pytest.approx(2.0609035488895913e-08, rel=1e-12)
    # "order of 20 ns" within +-50%
    assert 0.5 * 20.6e-9 <= t_dev <= 1.5 * 20.6e-9


def test_c04_comparator_lsb_current():
    i = circular_loop_current_for_field(100e-6, 2.07e-15)
    assert i == pytest.approx(3.294507320208784e-13, rel=1e-12)
    assert i == pytest.approx(0.33e-12, rel=0.01)
    assert i < 5e-12


def test_c05_modulator_sndr():
    t0 = time.perf_counter()
    u = make_tone(2**18, 257, 10.0 ** (-1.0 / 20.0))
    trace = run_modulator(ModulatorConfig(), u)
    measured = sndr_db(trace, 257)
    elapsed = time.perf_counter() - t0
    theory = theoretical_sqnr(2, 128, 9)
    assert measured >= 135.0
    assert theory - 6.0 <= measured <= theory + 1.0
    assert measured == pytest.approx(147.45, abs=0.05)
    assert elapsed < 30.0


def test_c06_dc_tracking():
    t0 = time.perf_counter()
    trace = run_modulator(ModulatorConfig(), np.full(2**16, 0.31415))
    mean = dc_tracking_mean(trace)
    elapsed = time.perf_counter() - t0
    assert abs(mean - 0.31415) < 1e-3
    assert elapsed < 5.0


def test_c07_electrodynamics_oracle():
    t0 = time.perf_counter()
    sigma = 5.8e7
    omega = 2.0 * math.pi * 50.0
    probe = Material(name="probe", kind="type-I", Tc=1.0, Hc0=1.0,
                     lambda_l=1e-8, delta=1e-22, vF=1e6, kF=1e10, N0=1e47,
                     sigma_n=sigma, tau_s=0.0)
    for thickness_over_skin in (1.0, 2.5, 5.0):
        d = thickness_over_skin * skin_depth(omega, sigma)
        x, b_hat = crank_nicolson_diffusion(d, sigma, omega)
        cfg = SlabConfig(d=d, material=probe, B0=1.0, omega=omega)
        closed = normal_slab_profile(cfg, x).B
        dev = np.abs(b_hat[1:-1] - closed[1:-1]) / np.abs(closed[1:-1])
        assert float(np.max(dev)) < 1e-3
    assert time.perf_counter() - t0 < 10.0


def test_c08_screening_properties():
    lead = get_material("lead")
    for d in (5e-8, 2e-7, 1e-6):
        cfg = SlabConfig(d=d, material=lead, B0=1e-3, omega=0.0, T=4.2)
        center = super_slab_profile(cfg, np.array([0.0])).B[0]
        expected = 1.0 / math.cosh(d / lead.lambda_l)
        assert abs(abs(center) / 1e-3 - expected) < 1e-12
    # two-fluid limits
    k_dc = two_fluid_wavenumber(lead, 1e3)
    assert abs(k_dc - 1.0 / lead.lambda_l) * lead.lambda_l < 1e-6
    open_bridge = Material(name="open", kind="type-I", Tc=1.0, Hc0=1.0,
                           lambda_l=1e3, delta=1e-22, vF=1e6, kF=1e10,
                           N0=1e47, sigma_n=1e7, tau_s=0.0)
    omega = 1e5
    k_n = two_fluid_wavenumber(open_bridge, omega)
    ref = np.sqrt(1j * omega * CODATA.mu0 * 1e7)
    assert abs(k_n - ref) / abs(ref) < 1e-6


def test_c09_junction_properties():
    lead = get_material("lead")
    # complex unity both regimes
    eps = np.concatenate([np.linspace(0.05, 0.95, 19),
                          np.linspace(1.05, 4.0, 19)])
    u, v = coherence_factors(eps, 1.0)
    assert float(np.max(np.abs(u * u + v * v - 1.0))) < 1e-12
    # sub-gap probability weight
    sub = eps[eps < 1.0]
    us, vs = coherence_factors(sub, 1.0)
    assert float(np.max(np.abs(np.abs(us) ** 2 + np.abs(vs) ** 2
                               - 1.0 / sub))) < 1e-12
    # proximity current: zero at phi=0, exponential decay at -1/xi_N
    xi = n_coherence_length(lead.vF, 4.2)
    cfg0 = JunctionConfig(delta=lead.delta, T=4.2, d=xi, material=lead)
    assert sns_current(cfg0, 0.0) == 0.0
    ds = np.linspace(0.5, 3.0, 7) * xi
    lic = [math.log(d * sns_current(
        JunctionConfig(delta=lead.delta, T=4.2, d=d, material=lead),
        math.pi / 2)) for d in ds]
    slope = np.polyfit(ds, lic, 1)[0]
    assert abs(slope * xi + 1.0) < 1e-6
    # tunneling current vanishes below the gap at low T
    t_low = lead.delta / (50.0 * CODATA.kB)
    nis = JunctionConfig(delta=lead.delta, T=t_low, d=0.0, Z=10.0)
    assert nis_current_lowT(nis, 0.9 * lead.delta / CODATA.e) == 0.0
    ref = nis_current(nis, 2.0 * lead.delta / CODATA.e)
    assert abs(nis_current(nis, 0.5 * lead.delta / CODATA.e)) < 1e-2 * ref
    # quadrature against the closed tunneling form over [1.1, 3.0] gap
    s = np.linspace(1.1, 3.0, 39)
    volts = s * lead.delta / CODATA.e
    dev = np.abs(nis_current(nis, volts) - nis_current_lowT(nis, volts))
    assert float(np.max(dev / nis_current_lowT(nis, volts))) < 0.01


def _legal_moves(state):
    moves = []
    for seg in state.geometry.segments:
        if seg in state.energized:
            adjacent = [r for r in state.rings
                        if (seg - 1) in r.span or (seg + 1) in r.span]
            if len(adjacent) <= 1:
                moves.append((seg, False))
        else:
            ok = True
            for r in state.rings:
                if seg in r.span:
                    ok = len(r.span) >= 2 and seg in (min(r.span),
                                                      max(r.span))
                    break
            if ok:
                moves.append((seg, True))
    return moves


def test_c10_flux_conservation():
    geom = CylinderGeometry(radius=0.02, n_segments=8, n_eff=4)
    start, gain = run_amplification_sequence(
        geom, 1e-10, default_amplification_schedule(8))
    total = start.trapped_flux_total
    assert total == gain * 61
    for seed in range(1000):
        rng = random.Random(seed)
        state = start
        for _ in range(20):
            seg, on = rng.choice(_legal_moves(state))
            state = set_ecoil(state, seg, on)
            assert state.trapped_flux_total == total
    # the canonical 7-step walk doubles the single-shot flux
    _, walk_gain = run_amplification_sequence(
        CylinderGeometry(radius=0.02, n_segments=4, n_eff=4), 1e-10,
        doubling_amplification_schedule())
    assert walk_gain == 2


def test_c11_noise_suite():
    model = NoiseModel(R0=1.0, tau1=2.0, tau2=2e4, kprime=1.0, seed=42)
    series = synth_flicker_series(model, 2**20, 1.0)
    f, p = welch(series, fs=1.0, nperseg=2**16, detrend="constant")
    edges = np.geomspace(8e-5, 8e-3, 17)
    centers, means = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (f >= lo) & (f < hi)
        if np.any(sel):
            centers.append(math.sqrt(lo * hi))
            means.append(float(np.mean(p[sel])))
    slope = np.polyfit(np.log10(centers), np.log10(means), 1)[0]
    assert abs(slope + 1.0) <= 0.05
    # single-process total power closes back to R0
    val, _ = quad(lambda fr: lorentzian_psd(model, 2 * math.pi * fr),
                  0.0, np.inf)
    assert abs(val - model.R0) < 0.01 * model.R0
    # isotropic perturbations project 1/3 of their variance on one axis
    rng = np.random.default_rng(0)
    velocities = rng.standard_normal((10**6, 3))
    ratio = velocities[:, 0].var() / velocities.var(axis=0).sum()
    assert abs(ratio - 1.0 / 3.0) <= 0.02 / 3.0
    assert dof_variance_factor(model) == pytest.approx(1.0 / 3.0,
                                                       rel=1e-15)


def test_c12_scenario_reproducibility(tmp_path):
    t0 = time.perf_counter()
    configs = sorted(glob.glob(os.path.join(SCENARIO_DIR, "*.cfg")))
    assert len(configs) >= 8
    mismatches = []
    for cfg_path in configs:
        stem = os.path.splitext(os.path.basename(cfg_path))[0]
        cfg = load_scenario(cfg_path)
        first = run_scenario(cfg, str(tmp_path / "a" / stem))
        second = run_scenario(cfg, str(tmp_path / "b" / stem))
        assert [os.path.basename(p) for p in first] == \
            [os.path.basename(p) for p in second]
        for pa, pb in zip(first, second):
            if not filecmp.cmp(pa, pb, shallow=False):
                mismatches.append(pa)
    assert mismatches == []
    assert time.perf_counter() - t0 < 60.0
