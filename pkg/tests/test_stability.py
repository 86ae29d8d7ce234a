import numpy as np
import pytest
from hypothesis import given, settings

from hybridosc import routh_hurwitz

from conftest import draw_stable, make_params, stable_params


def test_coupled_damped_always_passes():
    report = routh_hurwitz(make_params(1.7, 0.4, 0.9, 1.0, 0.6, 2.2, 1.0, 0.8))
    assert report.routh_hurwitz_pass
    assert report.min_real_part > 0
    assert report.reason is None


def test_zero_coupling_is_marginal():
    # the undamped block keeps purely imaginary eigenvalues +-i w2
    params = make_params(1.0, 1.0, 1.0, 1.0, 1.0, 2.25, 1.0, 0.0)
    report = routh_hurwitz(params)
    assert not report.routh_hurwitz_pass
    assert report.reason == "marginal"
    w2 = 1.5
    on_axis = [z for z in report.eigenvalues if abs(z.real) < 1e-12]
    assert sorted(z.imag for z in on_axis) == pytest.approx([-w2, w2])


def test_zero_damping_is_marginal():
    report = routh_hurwitz(make_params(1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.5))
    assert not report.routh_hurwitz_pass
    assert report.reason == "marginal"
    assert report.criteria_detail["coeff_theta3"] == 0.0


def test_zero_coupling_damped_block_eigenvalues():
    g1, w1 = 1.0, 0.4  # overdamped: gamma^2 > 4 w1^2
    params = make_params(1.0, w1**2, g1, 1.0, 1.0, 1.0, 1.0, 0.0)
    report = routh_hurwitz(params)
    assert not report.routh_hurwitz_pass
    expected = {
        g1 / 2 + 0.5 * np.sqrt(g1**2 - 4 * w1**2),
        g1 / 2 - 0.5 * np.sqrt(g1**2 - 4 * w1**2),
    }
    real_eigs = sorted(z.real for z in report.eigenvalues if abs(z.imag) < 1e-12)
    assert real_eigs == pytest.approx(sorted(expected))


def test_springless_pair_is_marginal():
    # kappa = 0 is legal at the type level; the certificate (not the types)
    # rules it out: the centre of mass is free, giving a zero eigenvalue
    report = routh_hurwitz(make_params(1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.5))
    assert not report.routh_hurwitz_pass
    assert report.criteria_detail["coeff_theta0"] == 0.0
    # frequencies strictly positive restores the guarantee
    assert routh_hurwitz(make_params(1.0, 1e-4, 1.0, 1.0, 1.0, 1e-4, 1.0, 0.5)).routh_hurwitz_pass


def test_critically_damped_double_root_tolerated():
    # gamma^2 = 4 w1^2 exactly: the quartic has a double root, where both
    # root-finding routes are only sqrt(eps)-accurate; the certificate must
    # still evaluate rather than reject its own cross-check
    report = routh_hurwitz(make_params(1.0, 0.25, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0))
    assert not report.routh_hurwitz_pass
    assert report.reason == "marginal"


@settings(max_examples=200, deadline=None)
@given(params=stable_params)
def test_certificate_matches_spectrum(params):
    report = routh_hurwitz(params)
    spectral_stable = report.min_real_part > 1e-12
    if report.routh_hurwitz_pass != spectral_stable:
        # disagreements are only allowed inside the marginal band
        assert abs(report.min_real_part) < 1e-9


def test_certificate_agrees_over_log_uniform_draws():
    rng = np.random.default_rng(7)
    for _ in range(500):
        report = routh_hurwitz(draw_stable(rng, log_uniform=True))
        assert report.routh_hurwitz_pass == (report.min_real_part > 1e-12) or (
            abs(report.min_real_part) < 1e-9
        )


def test_report_serialises():
    payload = routh_hurwitz(make_params(1, 1, 1, 1, 1, 1, 1, 0.05)).to_dict()
    assert payload["routh_hurwitz_pass"] is True
    assert len(payload["eigenvalues"]) == 4
    assert set(payload["criteria_detail"]) == {
        "coeff_theta3",
        "coeff_theta2",
        "coeff_theta1",
        "coeff_theta0",
        "reduced_1",
        "reduced_2",
    }
