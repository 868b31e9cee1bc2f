import math

import pytest

from nanoevo import unitmap as um


def test_step_duration_matches_worked_example():
    assert um.step_duration(1e-10, 1e-3) == 5000.0


def test_step_duration_inverse_in_diffusion():
    base = um.step_duration(1e-10, 1e-3)
    assert um.step_duration(2e-10, 1e-3) == pytest.approx(base / 2)


def test_step_duration_rejects_zero_diameter():
    with pytest.raises(ValueError):
        um.step_duration(1e-10, 0.0)


def test_na_molar_concentration_worked_example():
    conc = um.na_molar_concentration(1e5, 1e-12)
    assert conc == pytest.approx(1.66e-7, rel=5e-3)


def test_na_molar_concentration_zero_particles():
    assert um.na_molar_concentration(0, 1e-12) == 0.0


def test_na_molar_concentration_linear():
    assert um.na_molar_concentration(2e5, 1e-12) == pytest.approx(
        2 * um.na_molar_concentration(1e5, 1e-12))


def test_pa_to_ka_worked_example():
    conc = um.na_molar_concentration(1e5, um.cell_volume_liters(1e-3))
    ka = um.pa_to_ka(0.3, conc, 5000.0)
    assert ka == pytest.approx(3.61e2, rel=5e-3)


def test_pa_to_ka_zero():
    assert um.pa_to_ka(0.0, 1.66e-7, 5000.0) == 0.0


def test_pa_ka_roundtrip():
    conc, dt = 1.66e-7, 5000.0
    for p in (0.01, 0.3, 0.77, 1.0):
        assert um.ka_to_pa(um.pa_to_ka(p, conc, dt), conc, dt) == pytest.approx(
            p, rel=1e-12)


def test_pa_to_ka_linear():
    conc, dt = 1.66e-7, 5000.0
    assert um.pa_to_ka(0.5, conc, dt) == pytest.approx(
        0.5 / 0.25 * um.pa_to_ka(0.25, conc, dt), rel=1e-12)


def test_ka_to_particles_per_step_range():
    conc, dt = um.na_molar_concentration(1e5, 1e-12), 5000.0
    assert um.ka_to_particles_per_step(1e4, conc, dt) == pytest.approx(8.3, rel=5e-3)
    assert um.ka_to_particles_per_step(1e6, conc, dt) == pytest.approx(8.3e2, rel=5e-3)
    assert um.ka_to_particles_per_step(0.0, conc, dt) == 0.0


def test_prob_to_rate_normalization_factor():
    assert um.prob_to_rate(1.0, 5000.0) == 2e-4
    assert um.prob_to_rate(0.0, 5000.0) == 0.0
    assert um.prob_to_rate(0.5, 5000.0) == pytest.approx(1e-4)


def test_prob_rate_roundtrip():
    assert um.rate_to_prob(um.prob_to_rate(0.37, 5000.0), 5000.0) == pytest.approx(
        0.37, rel=1e-12)


def test_consistency_chain():
    # mapping p_a to ka and back to particles/step recovers p_a exactly
    conc = um.na_molar_concentration(1e5, um.cell_volume_liters(1e-3))
    dt = um.step_duration(1e-10, 1e-3)
    for p in (0.1, 0.3, 0.9):
        ka = um.pa_to_ka(p, conc, dt)
        assert um.ka_to_particles_per_step(ka, conc, dt) == pytest.approx(p, rel=1e-12)


def test_kinetic_constants_bundle():
    kc = um.KineticConstants.from_probabilities(
        0.3, 1.0, 0.5, diffusion_cm2_s=1e-10, cell_diameter_cm=1e-3,
        particles_per_na=1e5)
    assert kc.step_duration_s == 5000.0
    assert kc.ka == pytest.approx(3.61e2, rel=5e-3)
    assert kc.kd == pytest.approx(2e-4)
    assert kc.ki == pytest.approx(1e-4)
    assert kc.na_molar == pytest.approx(1.66e-7, rel=5e-3)
    assert math.isclose(kc.ka_particles_per_step, 0.3, rel_tol=1e-12)


def test_domain_errors():
    with pytest.raises(ValueError):
        um.na_molar_concentration(1e5, 0.0)
    with pytest.raises(ValueError):
        um.pa_to_ka(1.5, 1.66e-7, 5000.0)
    with pytest.raises(ValueError):
        um.prob_to_rate(-0.1, 5000.0)
