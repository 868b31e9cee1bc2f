"""Conversions between per-step interaction probabilities and physical rate constants.

All conversions are exact algebraic expressions, so forward/backward pairs
invert each other to machine precision. Concentrations are molar, times in
seconds, lengths in cm.
"""
from __future__ import annotations

from dataclasses import dataclass

AVOGADRO = 6.02214076e23  # 1/mol


def step_duration(diffusion_cm2_s: float, cell_diameter_cm: float,
                  msd_dimension_factor: float = 2.0) -> float:
    """Seconds needed to diffuse one cell diameter: d^2 / (factor * D)."""
    if diffusion_cm2_s <= 0:
        raise ValueError("diffusion coefficient must be > 0")
    if cell_diameter_cm <= 0:
        raise ValueError("cell diameter must be > 0")
    if msd_dimension_factor <= 0:
        raise ValueError("msd_dimension_factor must be > 0")
    return cell_diameter_cm ** 2 / (msd_dimension_factor * diffusion_cm2_s)


def cell_volume_liters(cell_diameter_cm: float) -> float:
    """Volume of a cubic cell in liters (1 cm^3 = 1e-3 L)."""
    if cell_diameter_cm <= 0:
        raise ValueError("cell diameter must be > 0")
    return cell_diameter_cm ** 3 * 1e-3


def na_molar_concentration(particles: float, volume_liters: float) -> float:
    """Molar concentration of `particles` particles in `volume_liters`."""
    if volume_liters <= 0:
        raise ValueError("volume must be > 0")
    if particles < 0:
        raise ValueError("particle count must be >= 0")
    return particles / (AVOGADRO * volume_liters)


def pa_to_ka(p_a: float, na_molar: float, step_duration_s: float) -> float:
    """Association probability per step -> association rate constant [1/(M s)]."""
    _require_positive(na_molar, step_duration_s)
    if not 0.0 <= p_a <= 1.0:
        raise ValueError("p_a must be in [0, 1]")
    return p_a / (na_molar * step_duration_s)


def ka_to_pa(ka: float, na_molar: float, step_duration_s: float) -> float:
    """Inverse of pa_to_ka."""
    _require_positive(na_molar, step_duration_s)
    if ka < 0:
        raise ValueError("ka must be >= 0")
    return ka * na_molar * step_duration_s


def ka_to_particles_per_step(ka: float, na_molar: float, step_duration_s: float) -> float:
    """Association rate constant -> expected association events [particles/step]."""
    _require_positive(na_molar, step_duration_s)
    if ka < 0:
        raise ValueError("ka must be >= 0")
    return ka * na_molar * step_duration_s


def prob_to_rate(p: float, step_duration_s: float) -> float:
    """Per-step probability -> first-order rate constant [1/s]; used for kd and ki."""
    if step_duration_s <= 0:
        raise ValueError("step duration must be > 0")
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability must be in [0, 1]")
    return p / step_duration_s


def rate_to_prob(rate_per_s: float, step_duration_s: float) -> float:
    """Inverse of prob_to_rate."""
    if step_duration_s <= 0:
        raise ValueError("step duration must be > 0")
    if rate_per_s < 0:
        raise ValueError("rate must be >= 0")
    return rate_per_s * step_duration_s


def _require_positive(na_molar: float, step_duration_s: float) -> None:
    if na_molar <= 0:
        raise ValueError("NA molar concentration must be > 0")
    if step_duration_s <= 0:
        raise ValueError("step duration must be > 0")


@dataclass(frozen=True)
class KineticConstants:
    """Physical-unit counterparts of one dimensionless parameter set."""
    ka: float                 # 1/(M s)
    kd: float                 # 1/s
    ki: float                 # 1/s
    diffusion_cm2_s: float
    cell_diameter_cm: float
    particles_per_na: float
    na_molar: float           # M
    step_duration_s: float
    ka_particles_per_step: float

    @classmethod
    def from_probabilities(cls, p_a: float, p_d: float, p_i: float, *,
                           diffusion_cm2_s: float, cell_diameter_cm: float,
                           particles_per_na: float,
                           msd_dimension_factor: float = 2.0) -> "KineticConstants":
        dt = step_duration(diffusion_cm2_s, cell_diameter_cm, msd_dimension_factor)
        volume = cell_volume_liters(cell_diameter_cm)
        conc = na_molar_concentration(particles_per_na, volume)
        ka = pa_to_ka(p_a, conc, dt)
        return cls(
            ka=ka,
            kd=prob_to_rate(p_d, dt),
            ki=prob_to_rate(p_i, dt),
            diffusion_cm2_s=diffusion_cm2_s,
            cell_diameter_cm=cell_diameter_cm,
            particles_per_na=particles_per_na,
            na_molar=conc,
            step_duration_s=dt,
            ka_particles_per_step=ka_to_particles_per_step(ka, conc, dt),
        )
