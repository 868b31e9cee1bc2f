"""1D compartment-chain stochastic reaction-diffusion simulator.

A chain of well-mixed cubic subvolumes, one cell wide, counted from the
vasculature face where nanoparticles extravasate. Each compartment carries
binding (NP + R -> C), unbinding (C -> NP + R), internalization
(C -> NP_internal + R) and nearest-neighbor hops of free particles. The exact
direct-method sampler is cross-checked against a deterministic mean-field
integrator built from the same rate constants but none of the same code.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .config import SimConfig
from .unitmap import (AVOGADRO, cell_volume_liters, na_molar_concentration,
                      pa_to_ka, prob_to_rate, step_duration)

BOUNDARY_BOLUS = 0
BOUNDARY_SOURCE = 1


@dataclass
class CompartmentChain:
    """State and rate constants of the subvolume chain."""
    np_free: np.ndarray        # int64 per compartment
    receptors_free: np.ndarray
    complexes: np.ndarray
    np_internal: np.ndarray
    ka_stoch: float            # 1/s per (particle, receptor) pair
    kd: float                  # 1/s
    ki: float                  # 1/s
    k_hop: float               # 1/s per particle per direction
    r0: int
    kill_threshold: int = 1
    boundary: int = BOUNDARY_BOLUS
    source_level: int = 0

    @property
    def n(self) -> int:
        return self.np_free.shape[0]

    def cell_alive(self) -> np.ndarray:
        return self.np_internal < self.kill_threshold

    @classmethod
    def create(cls, n: int, r0: int, ka_stoch: float, kd: float, ki: float,
               k_hop: float, bolus: int = 0, kill_threshold: int = 1,
               boundary: int = BOUNDARY_BOLUS, source_level: int = 0) -> "CompartmentChain":
        if n < 1:
            raise ValueError("chain needs at least one compartment")
        if r0 < 0 or bolus < 0:
            raise ValueError("counts must be >= 0")
        chain = cls(
            np_free=np.zeros(n, dtype=np.int64),
            receptors_free=np.full(n, r0, dtype=np.int64),
            complexes=np.zeros(n, dtype=np.int64),
            np_internal=np.zeros(n, dtype=np.int64),
            ka_stoch=ka_stoch, kd=kd, ki=ki, k_hop=k_hop, r0=r0,
            kill_threshold=kill_threshold, boundary=boundary,
            source_level=source_level,
        )
        if boundary == BOUNDARY_SOURCE:
            chain.np_free[0] = source_level
        else:
            chain.np_free[0] = bolus
        return chain


@dataclass
class Trajectory:
    """Sampled species counts; first sample at t=0, times strictly increasing."""
    times: np.ndarray          # [S] seconds
    np_free: np.ndarray        # [S, n]
    receptors_free: np.ndarray
    complexes: np.ndarray
    np_internal: np.ndarray
    kill_threshold: int = 1

    @property
    def n_compartments(self) -> int:
        return self.np_free.shape[1]

    def cell_alive(self) -> np.ndarray:
        return self.np_internal < self.kill_threshold


def build_chain(cfg: SimConfig) -> CompartmentChain:
    """Chain with rates derived from the configured probabilities and units."""
    cfg.validate()
    units, scfg = cfg.units, cfg.ssa
    dt = step_duration(units.diffusion_cm2_s, units.cell_diameter_cm,
                       units.msd_dimension_factor)
    volume = cell_volume_liters(units.cell_diameter_cm)
    conc = na_molar_concentration(units.particles_per_na, volume)
    ka = pa_to_ka(scfg.pa, conc, dt)
    if scfg.k_hop_override_per_s is not None:
        k_hop = float(scfg.k_hop_override_per_s)
    else:
        k_hop = units.diffusion_cm2_s / units.cell_diameter_cm ** 2
    return CompartmentChain.create(
        n=scfg.n_compartments,
        r0=scfg.receptors_per_cell,
        ka_stoch=ka / (volume * AVOGADRO),
        kd=prob_to_rate(scfg.pd, dt),
        ki=prob_to_rate(scfg.pi, dt),
        k_hop=k_hop,
        bolus=scfg.bolus_particles,
        kill_threshold=scfg.kill_threshold,
        boundary=BOUNDARY_SOURCE if scfg.boundary == "source" else BOUNDARY_BOLUS,
        source_level=scfg.source_level,
    )


@njit(cache=True)
def _direct_method(np_free, rec_free, cplx, np_int, ka, kd, ki, kh,
                   t_end, sample_times, out, boundary, source_level, rng,
                   event_times):
    """Exact direct-method sampling; records state at each sample time.

    Event times are logged into event_times while slots remain (diagnostics).
    Returns the number of events applied.
    """
    n = np_free.shape[0]
    n_samples = sample_times.shape[0]
    n_events = 0
    t = 0.0
    si = 0
    while True:
        a0 = 0.0
        for i in range(n):
            a0 += ka * np_free[i] * rec_free[i] + (kd + ki) * cplx[i]
            if i > 0:
                a0 += kh * np_free[i]
            if i < n - 1:
                a0 += kh * np_free[i]
        if a0 <= 0.0:
            break
        t_next = t + rng.exponential(1.0 / a0)
        while si < n_samples and sample_times[si] < t_next:
            for i in range(n):
                out[si, i, 0] = np_free[i]
                out[si, i, 1] = rec_free[i]
                out[si, i, 2] = cplx[i]
                out[si, i, 3] = np_int[i]
            si += 1
        if t_next > t_end:
            break
        t = t_next
        target = rng.random() * a0
        acc = 0.0
        applied = False
        for i in range(n):
            a = ka * np_free[i] * rec_free[i]
            acc += a
            if target < acc:
                np_free[i] -= 1
                rec_free[i] -= 1
                cplx[i] += 1
                applied = True
                break
            acc += kd * cplx[i]
            if target < acc:
                cplx[i] -= 1
                np_free[i] += 1
                rec_free[i] += 1
                applied = True
                break
            acc += ki * cplx[i]
            if target < acc:
                cplx[i] -= 1
                np_int[i] += 1
                rec_free[i] += 1
                applied = True
                break
            if i > 0:
                acc += kh * np_free[i]
                if target < acc:
                    np_free[i] -= 1
                    np_free[i - 1] += 1
                    applied = True
                    break
            if i < n - 1:
                acc += kh * np_free[i]
                if target < acc:
                    np_free[i] -= 1
                    np_free[i + 1] += 1
                    applied = True
                    break
        if not applied:
            # float round-off put target at/above a0; skip this draw
            continue
        if n_events < event_times.shape[0]:
            event_times[n_events] = t
        n_events += 1
        if boundary == 1:
            np_free[0] = source_level
    while si < n_samples:
        for i in range(n):
            out[si, i, 0] = np_free[i]
            out[si, i, 1] = rec_free[i]
            out[si, i, 2] = cplx[i]
            out[si, i, 3] = np_int[i]
        si += 1
    return n_events


def run_ssa(chain: CompartmentChain, t_end_s: float, sample_dt_s: float,
            rng: np.random.Generator,
            event_log: np.ndarray | None = None) -> Trajectory:
    """Run the direct method to t_end, sampling every sample_dt. Mutates chain.

    Pass a float64 event_log array to capture event times (filled until full).
    """
    if t_end_s <= 0:
        raise ValueError("t_end must be > 0")
    if sample_dt_s <= 0:
        raise ValueError("sample_dt must be > 0")
    n_samples = int(np.floor(t_end_s / sample_dt_s)) + 1
    sample_times = np.arange(n_samples) * sample_dt_s
    out = np.zeros((n_samples, chain.n, 4), dtype=np.int64)
    if event_log is None:
        event_log = np.empty(0, dtype=np.float64)
    _direct_method(chain.np_free, chain.receptors_free, chain.complexes,
                   chain.np_internal, chain.ka_stoch, chain.kd, chain.ki,
                   chain.k_hop, float(t_end_s), sample_times, out,
                   chain.boundary, chain.source_level, rng, event_log)
    return Trajectory(
        times=sample_times,
        np_free=out[:, :, 0].copy(),
        receptors_free=out[:, :, 1].copy(),
        complexes=out[:, :, 2].copy(),
        np_internal=out[:, :, 3].copy(),
        kill_threshold=chain.kill_threshold,
    )


def _derivatives(state: np.ndarray, ka: float, kd: float, ki: float, kh: float,
                 clamp_source: bool) -> np.ndarray:
    np_free, rec, cplx = state[0], state[1], state[2]
    bind = ka * np_free * rec
    unbind = kd * cplx
    intern = ki * cplx
    d = np.empty_like(state)
    d[0] = -bind + unbind
    d[1] = -bind + unbind + intern
    d[2] = bind - unbind - intern
    d[3] = intern
    # 1D discrete Laplacian with reflecting ends
    lap = np.zeros_like(np_free)
    lap[:-1] += np_free[1:] - np_free[:-1]
    lap[1:] += np_free[:-1] - np_free[1:]
    d[0] += kh * lap
    if clamp_source:
        d[0][0] = 0.0
    return d


def meanfield_ode(chain: CompartmentChain, t_end_s: float, dt_s: float,
                  sample_dt_s: float | None = None) -> Trajectory:
    """Fixed-step classical Runge-Kutta integration of the rate equations.

    Serves as the deterministic oracle for SSA replicate means; it shares the
    rate constants with the chain but not the sampling code.
    """
    if dt_s <= 0:
        raise ValueError("dt must be > 0")
    if sample_dt_s is None:
        sample_dt_s = t_end_s
    state = np.stack([
        chain.np_free.astype(np.float64),
        chain.receptors_free.astype(np.float64),
        chain.complexes.astype(np.float64),
        chain.np_internal.astype(np.float64),
    ])
    clamp = chain.boundary == BOUNDARY_SOURCE
    args = (chain.ka_stoch, chain.kd, chain.ki, chain.k_hop, clamp)
    sample_times = [0.0]
    samples = [state.copy()]
    t = 0.0
    next_sample = sample_dt_s
    while t < t_end_s - 1e-12:
        h = min(dt_s, t_end_s - t)
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = _derivatives(state, *args)
            k2 = _derivatives(state + 0.5 * h * k1, *args)
            k3 = _derivatives(state + 0.5 * h * k2, *args)
            k4 = _derivatives(state + h * k3, *args)
            state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise FloatingPointError("mean-field integration diverged; reduce dt")
        t += h
        while next_sample <= t + 1e-9 and next_sample <= t_end_s + 1e-9:
            sample_times.append(next_sample)
            samples.append(state.copy())
            next_sample += sample_dt_s
    stacked = np.stack(samples)
    return Trajectory(
        times=np.array(sample_times),
        np_free=stacked[:, 0, :],
        receptors_free=stacked[:, 1, :],
        complexes=stacked[:, 2, :],
        np_internal=stacked[:, 3, :],
        kill_threshold=chain.kill_threshold,
    )


def penetration_depth(traj: Trajectory, threshold_fraction: float) -> int:
    """Deepest compartment (1-based cell count) retaining bound-plus-internal
    signal at least threshold_fraction of compartment 0's, at the final sample."""
    if not 0.0 < threshold_fraction < 1.0:
        raise ValueError("threshold_fraction must be in (0, 1)")
    signal = traj.complexes[-1].astype(np.float64) + traj.np_internal[-1]
    if signal[0] <= 0:
        raise ValueError("no bound or internalized signal in compartment 0; "
                         "penetration depth undefined")
    deep = np.nonzero(signal >= threshold_fraction * signal[0])[0]
    return int(deep[-1]) + 1


def kill_report(chain: CompartmentChain) -> list[bool]:
    """True per compartment whose internalized count reached the kill threshold."""
    return [bool(v >= chain.kill_threshold) for v in chain.np_internal]
