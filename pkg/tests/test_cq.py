import numpy as np
import pytest

from hybridosc import (
    CQParams,
    CouplingZero,
    TradeoffViolation,
    assemble_drift_noise,
    correlators_exact,
    gibbs_covariances,
    hybrid_correlators,
    hybrid_equal_time,
    map_to_classical,
    occupation_from_keldysh,
    occupation_number,
    routh_hurwitz,
    solve_lyapunov,
    thermal_limit,
)

from conftest import gibbs_covariance_oracle


def natural_cq(coupling=0.05, diffusion=1.0, damping=1.0):
    return CQParams(
        classical_mass=1.0,
        classical_spring=1.0,
        damping=damping,
        diffusion=diffusion,
        quantum_mass=1.0,
        quantum_spring=1.0,
        coupling=coupling,
    )


# ---------------------------------------------------------------------------
# trade-off and mapping


def test_tradeoff_saturated_by_default():
    cq = natural_cq(diffusion=0.7)
    assert 4.0 * cq.diffusion * cq.decoherence_rate == pytest.approx(1.0, abs=1e-15)


def test_explicit_decoherence_below_bound_rejected():
    with pytest.raises(TradeoffViolation):
        CQParams(
            classical_mass=1, classical_spring=1, damping=1, diffusion=1,
            quantum_mass=1, quantum_spring=1, coupling=0.1, decoherence=0.2,
        )
    # above the bound is allowed (non-minimal decoherence)
    cq = CQParams(
        classical_mass=1, classical_spring=1, damping=1, diffusion=1,
        quantum_mass=1, quantum_spring=1, coupling=0.1, decoherence=0.5,
    )
    assert cq.decoherence_rate == 0.5


def test_coupling_without_diffusion_rejected():
    with pytest.raises(TradeoffViolation):
        CQParams(
            classical_mass=1, classical_spring=1, damping=1, diffusion=0.0,
            quantum_mass=1, quantum_spring=1, coupling=0.1,
        )


def test_mapping_reference_values():
    mapped = map_to_classical(natural_cq(coupling=0.1, diffusion=1.0))
    assert mapped.osc2.diffusion == pytest.approx(0.0025)
    assert mapped.osc1.diffusion == 1.0
    assert mapped.osc2.damping == 0.0
    assert mapped.coupling == 0.1


def test_mapping_zero_coupling_zero_decoherence():
    mapped = map_to_classical(natural_cq(coupling=0.0))
    assert mapped.osc2.diffusion == 0.0


def test_mapping_hbar_scale():
    cq = CQParams(
        classical_mass=1, classical_spring=1, damping=1, diffusion=1,
        quantum_mass=1, quantum_spring=1, coupling=0.1, hbar=2.0,
    )
    assert map_to_classical(cq).osc2.diffusion == pytest.approx(0.01)


def test_mapped_system_is_stable():
    mapped = map_to_classical(natural_cq(coupling=0.3))
    assert routh_hurwitz(mapped).routh_hurwitz_pass


# ---------------------------------------------------------------------------
# occupation number


def test_occupation_minimum_at_critical_temperature():
    # T_C = D/(2 alpha) = omega/2 at D = 1, alpha = 1, omega = 1
    occ = occupation_number(natural_cq(diffusion=1.0))
    assert occ.temperature == pytest.approx(0.5)
    assert occ.n == pytest.approx(0.5, abs=1e-15)


def test_occupation_floor_over_temperature_sweep():
    values = [
        occupation_number(natural_cq(diffusion=2.0 * t_c)).n
        for t_c in np.geomspace(0.01, 100.0, 200)
    ]
    assert min(values) >= 0.5 - 1e-12


def test_occupation_thermalises_at_high_temperature():
    t_c = 200.0
    occ = occupation_number(natural_cq(diffusion=2.0 * t_c))
    assert abs(occ.n - t_c) / t_c <= 1.0 / (2 * t_c) + 1e-12


def test_occupation_diverges_at_low_temperature():
    t_c = 1e-4
    occ = occupation_number(natural_cq(diffusion=2.0 * t_c))
    assert occ.n == pytest.approx(1.0 / (4 * t_c), rel=1e-3)


def test_keldysh_route_documented_discrepancy():
    # the equal-time propagator of the mapped dynamics carries 1/4 of the
    # closed formula's decoherence term; at the reference point the two
    # routes give 0.125 vs 0.5, and the mapped route can reach zero
    assert occupation_from_keldysh(natural_cq(diffusion=1.0)) == pytest.approx(0.125)
    sweep = [
        occupation_from_keldysh(natural_cq(diffusion=2.0 * t_c))
        for t_c in np.geomspace(0.01, 10.0, 300)
    ]
    assert min(sweep) == pytest.approx(0.0, abs=1e-4)


# ---------------------------------------------------------------------------
# correlators


def test_hybrid_correlator_reference_equal_time():
    table = hybrid_correlators(natural_cq(), np.array([0.0]))
    assert table.keldysh[0] == pytest.approx(0.625)
    assert table.occupation_equal_time == pytest.approx(0.125)


def test_hybrid_correlators_finite_at_vanishing_coupling():
    table = hybrid_correlators(natural_cq(coupling=1e-8), np.linspace(-4, 4, 9))
    for field in (table.classical, table.keldysh, table.classical_response):
        assert np.all(np.isfinite(field))
    assert np.all(np.isfinite(table.retarded.real)) and np.all(np.isfinite(table.retarded.imag))


def test_hybrid_correlators_coupling_independent_at_leading_order():
    t = np.linspace(-3, 3, 7)
    a = hybrid_correlators(natural_cq(coupling=1e-6), t)
    b = hybrid_correlators(natural_cq(coupling=0.05), t)
    np.testing.assert_allclose(a.keldysh, b.keldysh, rtol=1e-12)


def test_retarded_entry_imaginary_with_negative_time_support():
    t = np.linspace(-5, 5, 21)
    table = hybrid_correlators(natural_cq(), t)
    assert np.all(table.retarded[t >= 0] == 0)
    assert np.max(np.abs(table.retarded.real)) == 0.0
    expected = -np.sin(t[t < 0])  # -(i/(m w)) sin(w t) at m = w = 1
    np.testing.assert_allclose(table.retarded[t < 0].imag, expected, rtol=1e-12)


def test_hybrid_correlators_match_mapped_exact_route():
    cq = natural_cq(coupling=0.01)
    mapped = map_to_classical(cq)
    t = np.linspace(-4, 4, 17)
    printed = hybrid_correlators(cq, t)
    exact = correlators_exact(mapped, t)
    assert np.max(np.abs(printed.keldysh - exact.g22)) <= 0.05 * np.max(np.abs(exact.g22))
    assert np.max(np.abs(printed.classical - exact.g11)) <= 0.05 * np.max(np.abs(exact.g11))


def test_hybrid_correlators_require_identical_oscillators():
    lopsided = CQParams(
        classical_mass=1.0, classical_spring=1.0, damping=1.0, diffusion=1.0,
        quantum_mass=2.0, quantum_spring=1.0, coupling=0.05,
    )
    with pytest.raises(ValueError):
        hybrid_correlators(lopsided, np.array([0.0]))


# ---------------------------------------------------------------------------
# equal-time moments and the thermal limit


def test_equal_time_reference_cross_moments():
    moments = hybrid_equal_time(natural_cq(coupling=0.1, diffusion=1.0))
    assert moments["Pq"] == pytest.approx(-0.0125)
    assert moments["pQ"] == pytest.approx(+0.0125)


def test_equal_time_mass_ratio():
    cq = CQParams(
        classical_mass=2.0, classical_spring=2.0, damping=1.0, diffusion=1.0,
        quantum_mass=0.5, quantum_spring=0.5, coupling=0.1,
    )
    moments = hybrid_equal_time(cq)
    assert moments["pQ"] == pytest.approx(-moments["Pq"] * 4.0)


def test_equal_time_matches_lyapunov_route():
    rng = np.random.default_rng(3)
    slots = {"qq": (0, 0), "pp": (1, 1), "QQ": (2, 2), "PP": (3, 3),
             "qQ": (0, 2), "Pq": (0, 3), "pQ": (2, 1), "pP": (1, 3)}
    for _ in range(40):
        cq = CQParams(
            classical_mass=rng.uniform(0.5, 2), classical_spring=rng.uniform(0.5, 2),
            damping=rng.uniform(0.3, 2), diffusion=rng.uniform(0.3, 2),
            quantum_mass=rng.uniform(0.5, 2), quantum_spring=rng.uniform(0.5, 2),
            coupling=rng.uniform(0.05, 1.0),
        )
        moments = hybrid_equal_time(cq)
        cov = solve_lyapunov(assemble_drift_noise(map_to_classical(cq)))
        scale = np.max(np.abs(cov))
        for name, idx in slots.items():
            assert abs(moments[name] - cov[idx]) <= 1e-9 * scale


def test_equal_time_zero_coupling_raises():
    with pytest.raises(CouplingZero):
        hybrid_equal_time(natural_cq(coupling=0.0))


def test_gibbs_covariances_match_block_oracle():
    cq = natural_cq(coupling=0.3, diffusion=4.0)
    mapped = map_to_classical(cq)
    ours = gibbs_covariances(mapped, cq.effective_temperature)
    oracle = gibbs_covariance_oracle(mapped, cq.effective_temperature)
    np.testing.assert_allclose(ours, oracle, rtol=1e-12)


def test_high_temperature_forms_equal_gibbs():
    cq = CQParams(
        classical_mass=1.3, classical_spring=0.8, damping=0.9, diffusion=5.0,
        quantum_mass=0.7, quantum_spring=1.4, coupling=0.25,
    )
    report = thermal_limit(cq)
    gibbs = report.gibbs
    for key in ("pp", "PP", "qq", "QQ", "qQ"):
        assert report.high_temperature[key] == pytest.approx(gibbs[key], rel=1e-9), key


def test_effective_temperature_definition():
    cq = natural_cq(diffusion=2.0, damping=1.0)
    assert cq.effective_temperature == pytest.approx(1.0)


def test_thermal_deviation_decreases_with_diffusion():
    devs = [
        thermal_limit(natural_cq(coupling=0.1, diffusion=d)).max_deviation_gibbs
        for d in (10.0, 100.0, 1000.0, 10000.0)
    ]
    assert all(np.diff(devs) < 0)
    assert devs[-1] < 1e-2
    # normalised deviations shrink like 1/D^2
    slope = np.polyfit(np.log([10.0, 100.0, 1000.0, 10000.0]), np.log(devs), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.3)


def test_equipartition_at_high_diffusion():
    cq = natural_cq(coupling=0.1, diffusion=1e4)
    moments = hybrid_equal_time(cq)
    assert moments["PP"] / cq.quantum_mass == pytest.approx(
        moments["pp"] / cq.classical_mass, rel=1e-4
    )
