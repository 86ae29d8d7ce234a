import numpy as np
import pytest

from hybridosc import (
    NumericalOverflow,
    SimConfig,
    SystemParams,
    assemble_drift_noise,
    energy_drift,
    sample_trajectory,
    simulate_ensemble,
    solve_lyapunov,
    total_energy,
)

from conftest import make_params


def test_noise_stream_partition_invariance():
    # block-wise noise generation must reproduce row-wise generation; the
    # integrator's reproducibility contract rests on this property
    r1 = np.random.Generator(np.random.Philox(key=42).jumped(3))
    a = r1.standard_normal((10, 4))
    r2 = np.random.Generator(np.random.Philox(key=42).jumped(3))
    b = np.vstack([r2.standard_normal((4, 4)), r2.standard_normal((6, 4))])
    assert np.array_equal(a, b)


def test_same_seed_same_statistics():
    params = SystemParams.natural_units(0.3)
    dn = assemble_drift_noise(params)
    cfg = SimConfig(dt=1e-2, t_final=2.0, n_trajectories=64, seed=5)
    s1 = simulate_ensemble(dn, cfg)
    s2 = simulate_ensemble(dn, cfg)
    assert np.array_equal(s1.mean, s2.mean)
    assert np.array_equal(s1.cov, s2.cov)


def test_thread_count_does_not_change_results():
    params = SystemParams.natural_units(0.3)
    dn = assemble_drift_noise(params)
    cfg = SimConfig(dt=1e-2, t_final=1.0, n_trajectories=2100, seed=5)
    serial = simulate_ensemble(dn, cfg, threads=1)
    threaded = simulate_ensemble(dn, cfg, threads=4)
    assert np.array_equal(serial.mean, threaded.mean)
    assert np.array_equal(serial.cov, threaded.cov)
    assert np.array_equal(serial.energy_mean, threaded.energy_mean)


def test_sample_trajectory_deterministic_and_matches_ensemble_member():
    params = SystemParams.natural_units(0.3)
    dn = assemble_drift_noise(params)
    cfg = SimConfig(dt=1e-2, t_final=2.0, n_trajectories=1, seed=11, output_stride=10)
    t1, path1 = sample_trajectory(dn, cfg, 0)
    t2, path2 = sample_trajectory(dn, cfg, 0)
    assert np.array_equal(path1, path2)
    stats = simulate_ensemble(dn, cfg)
    np.testing.assert_array_equal(stats.mean, path1)
    np.testing.assert_array_equal(stats.times, t1)


def test_zero_noise_zero_drift_constant_series():
    from hybridosc.model import DriftNoise

    dn = DriftNoise(theta=np.zeros((4, 4)), sigma=np.zeros((4, 4)), params=None)
    cfg = SimConfig(
        dt=1e-2, t_final=1.0, n_trajectories=1, seed=0,
        initial_state=np.array([0.3, -0.2, 0.1, 0.4]),
    )
    _, path = sample_trajectory(dn, cfg, 0)
    assert np.all(path == path[0])


def test_deterministic_conservative_energy_constant():
    # no noise, no damping, no coupling: the initial displacement oscillates
    # and the energy drifts only at O(dt) per step
    params = make_params(1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0)
    dn = assemble_drift_noise(params)
    dt = 1e-3
    n_steps = 2000
    cfg = SimConfig(
        dt=dt, t_final=n_steps * dt, n_trajectories=1, seed=0,
        initial_state=np.array([1.0, 0.0, 0.0, 0.0]), output_stride=1,
    )
    _, path = sample_trajectory(dn, cfg, 0)
    energies = total_energy(params, path)
    # growth factor per step is 1 + (w dt)^2
    bound = energies[0] * ((1 + dt**2) ** n_steps - 1) * 1.1 + 1e-12
    assert abs(energies[-1] - energies[0]) <= bound


def test_stationary_ensemble_matches_lyapunov():
    params = SystemParams.natural_units(1.0)
    dn = assemble_drift_noise(params)
    cov = solve_lyapunov(dn)
    cfg = SimConfig(
        dt=5e-3, t_final=40.0, n_trajectories=4000, seed=3,
        initial_mean=np.zeros(4), initial_cov=cov,
    )
    stats = simulate_ensemble(dn, cfg)
    dev = np.abs(stats.cov[-1] - cov)
    assert np.max(dev / (3.0 * stats.cov_stderr[-1])) < 1.0


def test_cold_start_relaxes_to_lyapunov():
    # strong coupling so the slowest mode relaxes quickly
    params = SystemParams.natural_units(1.0)
    dn = assemble_drift_noise(params)
    cov = solve_lyapunov(dn)
    min_rate = float(np.min(np.linalg.eigvals(dn.theta).real))
    cfg = SimConfig(dt=5e-3, t_final=15.0 / min_rate, n_trajectories=6000, seed=9)
    stats = simulate_ensemble(dn, cfg)
    dev = np.abs(stats.cov[-1] - cov)
    assert np.max(dev / (3.0 * stats.cov_stderr[-1])) < 1.0
    drift = energy_drift(params, stats.cov[-1])
    band = 3.0 * (params.osc1.damping / params.osc1.mass**2) * stats.cov_stderr[-1][1, 1]
    assert abs(drift) <= band


def test_energy_drift_formula():
    params = make_params(1.3, 1.0, 0.9, 1.2, 0.7, 1.1, 0.8, 0.4)
    o1, o2 = params.osc1, params.osc2
    # at the stationary momentum variance the drift vanishes identically
    var_p1 = (o1.diffusion + o1.mass / o2.mass * o2.diffusion) / (2 * o1.damping_rate)
    cov = np.diag([0.0, var_p1, 0.0, 0.0])
    assert energy_drift(params, cov) == pytest.approx(0.0, abs=1e-14)
    # without damping the drift is the bare heating rate, always positive
    undamped = make_params(1.3, 1.0, 0.0, 1.2, 0.7, 1.1, 0.8, 0.4)
    assert energy_drift(undamped, cov) == pytest.approx(
        1.2 / (2 * 1.3) + 0.8 / (2 * 0.7)
    )
    # pure dissipation: no noise, momentum spread decays
    quiet = make_params(1.3, 1.0, 0.9, 0.0, 0.7, 1.1, 0.0, 0.4)
    assert energy_drift(quiet, np.diag([0.0, 1.0, 0.0, 0.0])) < 0


def test_step_size_hard_error_and_warning():
    params = SystemParams.natural_units(0.3)
    dn = assemble_drift_noise(params)
    with pytest.raises(ValueError, match="unstable"):
        simulate_ensemble(dn, SimConfig(dt=2.0, t_final=4.0, n_trajectories=2, seed=0))
    with pytest.warns(UserWarning, match="discretisation bias"):
        simulate_ensemble(dn, SimConfig(dt=0.2, t_final=2.0, n_trajectories=2, seed=0))


def test_overflow_detected():
    # flip the sign of the drift: exponential blow-up must be reported
    params = SystemParams.natural_units(0.3)
    base = assemble_drift_noise(params)
    from hybridosc.model import DriftNoise

    runaway = DriftNoise(theta=-base.theta, sigma=base.sigma, params=None)
    cfg = SimConfig(
        dt=5e-2, t_final=2000.0, n_trajectories=1, seed=0,
        initial_state=np.array([1.0, 0.0, 0.0, 0.0]),
    )
    with pytest.raises(NumericalOverflow):
        sample_trajectory(runaway, cfg, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(dt=-1.0, t_final=1.0, n_trajectories=1)
    with pytest.raises(ValueError):
        SimConfig(dt=1e-2, t_final=1.0, n_trajectories=0)
    with pytest.raises(ValueError):
        SimConfig(
            dt=1e-2, t_final=1.0, n_trajectories=1,
            initial_state=np.zeros(4), initial_mean=np.zeros(4), initial_cov=np.eye(4),
        )
    with pytest.raises(ValueError):
        SimConfig(dt=1e-2, t_final=1.0, n_trajectories=1, initial_mean=np.zeros(4))


def test_trajectory_amplitude_consistent_with_spectral_band():
    # late-time rms of the undamped oscillator's displacement should sit in a
    # broad band around the stationary spread sqrt(Var q2)
    from hybridosc import correlators_small_lambda

    params = SystemParams.natural_units(0.05)
    dn = assemble_drift_noise(params)
    cov = solve_lyapunov(dn)
    cfg = SimConfig(
        dt=5e-4, t_final=50.0, n_trajectories=4, seed=12,
        initial_mean=np.zeros(4), initial_cov=cov, output_stride=20,
    )
    _, path = sample_trajectory(dn, cfg, 2)
    predicted = np.sqrt(correlators_small_lambda(params, np.array([0.0])).g22[0])
    rms = np.sqrt(np.mean(path[len(path) // 2 :, 2] ** 2))
    assert 0.05 * predicted < rms < 5.0 * predicted


def test_csv_output_shape(tmp_path):
    import io

    params = SystemParams.natural_units(0.3)
    dn = assemble_drift_noise(params)
    stats = simulate_ensemble(dn, SimConfig(dt=1e-2, t_final=0.5, n_trajectories=16, seed=1))
    buf = io.StringIO()
    stats.write_csv(buf)
    lines = buf.getvalue().strip().split("\n")
    header = lines[0].split(",")
    assert header[0] == "t"
    assert "var_q1" in header and "cov_q1q2" in header and "energy" in header
    assert "var_q1_stderr" in header and "energy_stderr" in header
    assert all(len(line.split(",")) == len(header) for line in lines[1:])
