import math

import numpy as np
import pytest

from ionwire import analysis, dynamics
from ionwire.core import TWO_PI, calcium_40, mhz_to_rad_s
from ionwire.dynamics import (NO_COOLING, NO_NOISE, CoolingClamp, NoiseModel,
                              PairParams, integrate_envelope, integrate_full,
                              noise_psd, rate_equation_fixed_point,
                              rate_equation_model)

CARRIER = mhz_to_rad_s(1.368)


# ---------------------------------------------------------------------------
# coherent exchange, envelope route

def test_envelope_cosine_exchange():
    kappa = TWO_PI * 11.1
    tr = integrate_envelope(kappa, CARRIER, duration=math.pi / kappa,
                            initial_occupations=(1000.0, 0.0),
                            init_phase=("fixed", "fixed"), record_points=201)
    expected1 = 1000.0 * np.cos(kappa * tr.times) ** 2
    expected2 = 1000.0 * np.sin(kappa * tr.times) ** 2
    assert np.max(np.abs(tr.n_bar_1 - expected1)) < 1e-6
    assert np.max(np.abs(tr.n_bar_2 - expected2)) < 1e-6


@pytest.mark.parametrize("kappa_hz", [5.0, 11.1, 50.0])
def test_full_transfer_at_quarter_beat(kappa_hz):
    kappa = TWO_PI * kappa_hz
    t_swap = math.pi / (2.0 * kappa)
    tr = integrate_envelope(kappa, CARRIER, duration=t_swap,
                            initial_occupations=(1000.0, 0.0),
                            init_phase=("fixed", "fixed"), record_points=2)
    assert tr.n_bar_2[-1] / 1000.0 > 0.999
    assert tr.n_bar_1[-1] / 1000.0 < 1e-3


@pytest.mark.parametrize("ratio,expected", [(5.0, 1.0 / 7.25), (20.0, 1.0 / 101.0)])
def test_detuning_suppression_closed_form(ratio, expected):
    # two-mode peak transfer kappa^2/(kappa^2 + (delta/2)^2)
    kappa = TWO_PI * 11.1
    delta = ratio * kappa
    gen = math.hypot(kappa, delta / 2.0)
    tr = integrate_envelope(kappa, CARRIER, detuning=(0.0, delta),
                            duration=math.pi / gen,
                            initial_occupations=(1000.0, 0.0),
                            init_phase=("fixed", "fixed"), record_points=801)
    peak = float(np.max(tr.n_bar_2)) / 1000.0
    assert abs(peak - expected) / expected < 0.05


def test_in_phase_equal_amplitudes_do_not_exchange():
    # (1, 1) is a normal mode of the exchange generator
    tr = integrate_envelope(TWO_PI * 50.0, CARRIER, duration=20e-3,
                            initial_occupations=(500.0, 500.0),
                            init_phase=("fixed", "fixed"), record_points=101)
    assert np.max(np.abs(tr.n_bar_1 - 500.0)) < 1e-6
    assert np.max(np.abs(tr.n_bar_2 - 500.0)) < 1e-6


# ---------------------------------------------------------------------------
# dissipation and drive

def test_cooling_clamp_relaxation():
    clamp = CoolingClamp(1e3, 182.0)
    tr = integrate_envelope(0.0, CARRIER, cooling=(NO_COOLING, clamp),
                            duration=10e-3, seed=11, n_realizations=800,
                            initial_occupations=(0.0, 1000.0),
                            init_phase=("thermal", "thermal"),
                            record_points=51)
    settled = float(np.mean(tr.n_bar_2[-5:]))
    sem = float(np.mean(tr.n_bar_sem_2[-5:]))
    assert abs(settled - 182.0) / 182.0 < 0.10
    assert abs(settled - 182.0) < 4.0 * max(sem, 1e-9)


@pytest.mark.parametrize("rate", [1e4, 1e6])
def test_heating_rate_calibration(rate):
    noise = NoiseModel(rate, CARRIER, 0.0, 0.0)
    tr = integrate_envelope(0.0, CARRIER, noise=(noise, NO_NOISE),
                            duration=5e-3, seed=3, n_realizations=4000,
                            initial_occupations=(50.0, 0.0),
                            init_phase=("thermal", "thermal"),
                            record_points=26)
    fit = analysis.fit_linear_heating(
        tr.times, tr.n_bar_1, np.maximum(tr.n_bar_sem_1, 1e-6 * rate))
    assert abs(fit.parameters["rate"] - rate) / rate < 0.05


def test_equipartition_under_symmetric_heating(symmetric_heating_run):
    tr = symmetric_heating_run
    n1 = float(np.mean(tr.n_bar_1[-5:]))
    n2 = float(np.mean(tr.n_bar_2[-5:]))
    asym = abs(n1 - n2) / (0.5 * (n1 + n2))
    assert asym < 0.05


def test_envelope_matches_full_integrator(integrator_pair):
    full = integrator_pair["full"]
    env = integrator_pair["envelope"]
    scale = float(np.max(full.n_bar_1))
    rms = 0.0
    for a, b in ((full.n_bar_1, env.n_bar_1), (full.n_bar_2, env.n_bar_2)):
        rms = max(rms, float(np.sqrt(np.mean((a - b) ** 2))) / scale)
    assert rms < 0.03


# ---------------------------------------------------------------------------
# long-run integrator properties

def test_energy_drift_below_1e6(long_noiseless_run):
    tr = long_noiseless_run["traj"]
    e = np.asarray(tr.energies, float)
    assert e.shape == (40001,)
    # the symplectic step has a bounded oscillating energy error; only the
    # secular component matters, so regress instead of differencing ends
    slope = np.polyfit(tr.times, e, 1)[0]
    drift = abs(slope) * tr.times[-1] / float(np.mean(e))
    assert drift < 1e-6


def test_normal_mode_spectrum(long_noiseless_run):
    run = long_noiseless_run
    tr = run["traj"]
    w, k = run["omega"], run["kappa"]
    x = np.asarray(tr.positions)[:, 0]
    dt_rec = tr.times[1] - tr.times[0]
    spectrum = np.abs(np.fft.rfft(x - x.mean()))
    freqs = np.fft.rfftfreq(x.size, dt_rec)
    df = freqs[1] - freqs[0]
    # stiffness eigenvalues w^2 +- 2 k w, i.e. a splitting of ~2k
    expected = np.sqrt(np.linalg.eigvalsh(
        [[w * w, 2 * k * w], [2 * k * w, w * w]])) / TWO_PI
    for f_mode in expected:
        band = (freqs > f_mode - 200.0) & (freqs < f_mode + 200.0)
        f_peak = freqs[band][np.argmax(spectrum[band])]
        assert abs(f_peak - f_mode) <= df + 1e-9


# ---------------------------------------------------------------------------
# determinism

def small_full(seed, n_workers=1):
    params = PairParams.resonant(calcium_40().mass, TWO_PI * 100e3, TWO_PI * 50.0)
    noise = NoiseModel(5e4, TWO_PI * 100e3, 1.0, 0.0)
    return integrate_full(params, (100.0, 0.0), noise=(noise, NO_NOISE),
                          duration=1e-3, seed=seed, n_realizations=8,
                          record_points=11, n_workers=n_workers)


def small_envelope(seed, n_workers=1):
    noise = NoiseModel(5e4, CARRIER, 1.0, 300.0)
    return integrate_envelope(TWO_PI * 50.0, CARRIER, noise=(noise, NO_NOISE),
                              duration=2e-3, seed=seed, n_realizations=16,
                              record_points=11, n_workers=n_workers)


def test_seed_determinism_bitwise():
    a, b = small_full(5), small_full(5)
    assert np.array_equal(a.n_bar_1, b.n_bar_1)
    assert np.array_equal(a.n_bar_2, b.n_bar_2)
    assert np.array_equal(a.n_bar_sem_1, b.n_bar_sem_1)
    c, d = small_envelope(5), small_envelope(5)
    assert np.array_equal(c.n_bar_1, d.n_bar_1)
    assert np.array_equal(c.n_bar_2, d.n_bar_2)
    assert not np.array_equal(a.n_bar_1, small_full(6).n_bar_1)
    assert not np.array_equal(c.n_bar_1, small_envelope(6).n_bar_1)


@pytest.mark.parametrize("workers", [2, 3])
def test_worker_count_does_not_change_results(workers):
    base_f, base_e = small_full(5), small_envelope(5)
    alt_f, alt_e = small_full(5, workers), small_envelope(5, workers)
    assert np.array_equal(base_f.n_bar_1, alt_f.n_bar_1)
    assert np.array_equal(base_f.n_bar_sem_2, alt_f.n_bar_sem_2)
    assert np.array_equal(base_e.n_bar_1, alt_e.n_bar_1)
    assert np.array_equal(base_e.n_bar_sem_2, alt_e.n_bar_sem_2)


# ---------------------------------------------------------------------------
# frequency jitter

def test_jitter_suppresses_exchange_monotonically():
    gains = []
    for sigma in (0.0, 300.0, 600.0):
        noise = (NoiseModel(0.0, 0.0, 1.0, sigma),
                 NoiseModel(250e3, CARRIER, 1.0, sigma))
        tr = integrate_envelope(TWO_PI * 59.0, CARRIER, noise=noise,
                                duration=2e-3, seed=77, n_realizations=400,
                                initial_occupations=(1e4, 200.0),
                                init_phase=("coherent", "coherent"),
                                record_points=2)
        gains.append(float(tr.n_bar_2[-1]) - 200.0)
    assert gains[0] > 1.2 * gains[1] > 1.2 * 1.2 * gains[2] > 0.0


def test_ou_jitter_deterministic_and_distinct():
    def run(kind, tau):
        noise = (NoiseModel(0.0, 0.0, 1.0, 300.0, kind, tau), NO_NOISE)
        return integrate_envelope(TWO_PI * 59.0, CARRIER, noise=noise,
                                  duration=2e-3, seed=13, n_realizations=32,
                                  initial_occupations=(1e3, 0.0),
                                  init_phase=("fixed", "fixed"),
                                  record_points=11)
    a = run(dynamics.JITTER_OU, 0.5e-3)
    b = run(dynamics.JITTER_OU, 0.5e-3)
    c = run(dynamics.JITTER_PER_SHOT, 0.0)
    assert np.array_equal(a.n_bar_1, b.n_bar_1)
    assert not np.array_equal(a.n_bar_1, c.n_bar_1)


# ---------------------------------------------------------------------------
# incoherent rate-equation route

def test_rate_equation_free_heating_is_linear():
    tr = rate_equation_model(1000.0, 182.0, 206e3, 0.0, 0.0,
                             CoolingClamp(0.0, 0.0), 10e-3, 11)
    line = 1000.0 + 206e3 * tr.times
    assert np.max(np.abs(tr.n_bar_1 - line)) / line[-1] < 1e-8
    assert np.max(np.abs(tr.n_bar_2 - 182.0)) < 1e-6


def test_rate_equation_initial_slope():
    # heat - kex (n1 - n2) = 206000 - 132 (1000 - 182) = 98024
    assert 206000.0 - 132.0 * (1000.0 - 182.0) == 98024.0
    clamp = CoolingClamp(math.inf, 182.0)
    tr = rate_equation_model(1000.0, 182.0, 206e3, 0.0, 132.0, clamp, 1e-7, 2)
    slope0 = (tr.n_bar_1[1] - tr.n_bar_1[0]) / (tr.times[1] - tr.times[0])
    assert slope0 == pytest.approx(98024.0, rel=1e-4)


def test_rate_equation_fitted_window_slope():
    clamp = CoolingClamp(math.inf, 182.0)
    tr = rate_equation_model(1000.0, 182.0, 206e3, 0.0, 132.0, clamp, 10e-3, 11)
    fit = analysis.fit_linear_heating(tr.times, tr.n_bar_1)
    oracle = np.polyfit(tr.times, tr.n_bar_1, 1)[0]
    assert fit.parameters["rate"] == pytest.approx(oracle, rel=1e-9)
    assert fit.parameters["rate"] == pytest.approx(53330.97, abs=0.5)


def test_rate_equation_fixed_point():
    clamp = CoolingClamp(1e3, 10.0)
    n1, n2 = rate_equation_fixed_point(206e3, 0.0, 132.0, clamp)
    # stationarity: n2 = n_ss + heat/gamma, then n1 = n2 + heat/kex
    assert n2 == pytest.approx(10.0 + 206e3 / 1e3, rel=1e-12)
    assert n1 == pytest.approx(n2 + 206e3 / 132.0, rel=1e-12)
    tr = rate_equation_model(1000.0, 182.0, 206e3, 0.0, 132.0, clamp, 0.1, 51)
    assert tr.n_bar_1[-1] == pytest.approx(n1, rel=1e-4)
    assert tr.n_bar_2[-1] == pytest.approx(n2, rel=1e-4)


def test_exchange_rate_round_trip():
    clamp = CoolingClamp(math.inf, 182.0)
    free = rate_equation_model(1000.0, 182.0, 206e3, 0.0, 0.0, clamp, 10e-3, 11)
    coupled = rate_equation_model(1000.0, 182.0, 206e3, 0.0, 132.0, clamp,
                                  10e-3, 11)
    rate_u = analysis.fit_linear_heating(free.times, free.n_bar_1).parameters["rate"]
    rate_c = analysis.fit_linear_heating(coupled.times,
                                         coupled.n_bar_1).parameters["rate"]
    n1_avg = float(np.trapezoid(coupled.n_bar_1, coupled.times) / coupled.times[-1])
    kex = analysis.extract_kappa(rate_u, rate_c, n1_avg, 182.0)
    assert abs(kex - 132.0) / 132.0 < 0.05


def test_noise_psd_scalings():
    pink = NoiseModel(250e3, CARRIER, 1.0, 0.0)
    assert noise_psd(pink, CARRIER) == pytest.approx(250e3, rel=1e-12)
    w2 = mhz_to_rad_s(1.380)
    assert noise_psd(pink, w2) == pytest.approx(
        250e3 * (1.368 / 1.380) ** 2, rel=1e-12)
    assert noise_psd(pink, 2 * CARRIER) == pytest.approx(250e3 / 4.0, rel=1e-12)
    flat_field = NoiseModel(250e3, CARRIER, 0.0, 0.0)
    assert noise_psd(flat_field, 2 * CARRIER) == pytest.approx(
        250e3 / 2.0, rel=1e-12)


# ---------------------------------------------------------------------------
# guard rails

def test_full_integrator_rejects_coarse_step():
    params = PairParams.resonant(calcium_40().mass, TWO_PI * 1e6, TWO_PI * 10.0)
    with pytest.raises(ValueError, match="too coarse"):
        integrate_full(params, (10.0, 0.0), duration=1e-4, dt=1e-6)


def test_envelope_rejects_scale_separation_violation():
    with pytest.raises(ValueError, match="scale separation"):
        integrate_envelope(0.2 * CARRIER, CARRIER, duration=1e-4,
                           initial_occupations=(10.0, 0.0))


def test_envelope_rejects_infinite_damping():
    with pytest.raises(ValueError, match="finite damping"):
        integrate_envelope(TWO_PI * 10.0, CARRIER,
                           cooling=(NO_COOLING, CoolingClamp(math.inf, 10.0)),
                           duration=1e-3)


def test_record_points_minimum():
    with pytest.raises(ValueError):
        integrate_envelope(TWO_PI * 10.0, CARRIER, duration=1e-3,
                           record_points=1)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(-1.0, CARRIER, 1.0, 0.0)
    with pytest.raises(ValueError):
        NoiseModel(1e3, 0.0, 1.0, 0.0)  # heating needs a reference
    with pytest.raises(ValueError):
        NoiseModel(1e3, CARRIER, 2.5, 0.0)
    with pytest.raises(ValueError):
        NoiseModel(0.0, 0.0, 1.0, -5.0)
    with pytest.raises(ValueError):
        NoiseModel(0.0, 0.0, 1.0, 10.0, "sinusoidal")
    with pytest.raises(ValueError):
        NoiseModel(0.0, 0.0, 1.0, 10.0, dynamics.JITTER_OU, 0.0)


def test_cooling_and_params_validation():
    with pytest.raises(ValueError):
        CoolingClamp(-1.0, 0.0)
    with pytest.raises(ValueError):
        CoolingClamp(10.0, -1.0)
    with pytest.raises(ValueError):
        PairParams(0.0, 1e-25, TWO_PI * 1e6, TWO_PI * 1e6, TWO_PI * 10.0)
    with pytest.raises(ValueError):
        PairParams.resonant(calcium_40().mass, -1.0, TWO_PI * 10.0)


def test_fixed_point_needs_coupling_and_damping():
    with pytest.raises(ValueError):
        rate_equation_fixed_point(1e3, 0.0, 0.0, CoolingClamp(1e3, 10.0))
    with pytest.raises(ValueError):
        rate_equation_fixed_point(1e3, 0.0, 132.0, CoolingClamp(0.0, 10.0))


def test_unknown_init_policy_rejected():
    with pytest.raises(ValueError, match="init"):
        integrate_envelope(TWO_PI * 10.0, CARRIER, duration=1e-3,
                           initial_occupations=(10.0, 0.0),
                           init_phase=("squeezed", "thermal"))
