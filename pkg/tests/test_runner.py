from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanoevo.config import Schedule, resolve_config
from nanoevo.kinetics import NanoAgentGenome
from nanoevo.runner import (clearance_cap, injection_count, run_learning,
                            run_simulation, top_performers)
from nanoevo.world import NanoAgent
from conftest import tiny_world_doc


def agent(aid, cc=0, hc=0):
    return NanoAgent(id=aid,
                     genome=NanoAgentGenome(speed=1, p_a=0.5, p_d=0.5, p_i=0.5, p_k=0.5),
                     position=(0, 0), memory=deque(maxlen=4),
                     cc_killed=cc, hc_killed=hc)


# -- injection schedule -------------------------------------------------------

def test_injection_even_split():
    sched = Schedule(total_dose=1400, ramp_steps=14)
    assert injection_count(3, sched) == 100


def test_injection_remainder_earliest_first():
    sched = Schedule(total_dose=15, ramp_steps=14)
    counts = [injection_count(s, sched) for s in range(14)]
    assert counts[0] == 2
    assert all(c == 1 for c in counts[1:])
    assert sum(counts) == 15


def test_injection_zero_after_ramp():
    sched = Schedule(total_dose=1400, ramp_steps=14)
    assert injection_count(20, sched) == 0


@given(total=st.integers(0, 100_000), ramp=st.integers(1, 60))
@settings(max_examples=200, deadline=None)
def test_injection_conserves_dose(total, ramp):
    sched = Schedule(total_dose=total, ramp_steps=ramp)
    assert sum(injection_count(s, sched) for s in range(ramp + 5)) == total


# -- clearance ----------------------------------------------------------------

def test_clearance_cap_endpoints():
    sched = Schedule(ramp_steps=14, decline_steps=72)
    assert clearance_cap(14, 720, sched) == 720
    assert clearance_cap(14 + 36, 720, sched) == 360
    assert clearance_cap(14 + 72, 720, sched) == 0
    assert clearance_cap(200, 720, sched) == 0


@given(step=st.integers(14, 300), peak=st.integers(0, 10_000))
@settings(max_examples=100, deadline=None)
def test_clearance_cap_bounds(step, peak):
    sched = Schedule(ramp_steps=14, decline_steps=72)
    cap = clearance_cap(step, peak, sched)
    assert 0 <= cap <= peak


def test_clearance_before_ramp_rejected():
    with pytest.raises(ValueError):
        clearance_cap(3, 100, Schedule())


# -- top performers -------------------------------------------------------------

def test_top_performers_whole_population_sorted():
    pop = [agent(0, cc=1), agent(1, cc=9), agent(2, cc=4)]
    genomes = top_performers(pop, 3)
    assert len(genomes) == 3


def test_top_performers_tie_break_by_id():
    pop = [agent(0, cc=5), agent(1, cc=2), agent(2, cc=5)]
    pop[0].genome = NanoAgentGenome(speed=3, p_a=0.9, p_d=0.1, p_i=0.9, p_k=0.9)
    assert top_performers(pop, 1)[0] == pop[0].genome


def test_top_performers_k_zero_and_oversized():
    pop = [agent(0)]
    assert top_performers(pop, 0) == []
    with pytest.raises(ValueError):
        top_performers(pop, 2)


# -- learning mode ---------------------------------------------------------------

def test_zero_steps_returns_initial_population():
    cfg = resolve_config(tiny_world_doc(run={"steps": 0, "master_seed": 1}))
    stats, pop = run_learning(cfg, 1)
    assert stats == []
    assert len(pop) == cfg.world.n_agents
    assert all(a.cc_killed == 0 and a.hc_killed == 0 for a in pop)


def test_learning_deterministic():
    doc = tiny_world_doc()
    s1, _ = run_learning(resolve_config(doc), 77)
    s2, _ = run_learning(resolve_config(doc), 77)
    assert s1 == s2


def test_zero_kinetics_never_kills():
    cfg = resolve_config(tiny_world_doc(kinetics={"init_prob_max": 0.0}))
    world_cc, world_hc = cfg.world.n_cc, cfg.world.n_hc
    stats, _ = run_learning(cfg, 13)
    assert all(s.kills_step == 0 for s in stats)
    assert stats[-1].hc_alive == world_hc
    assert stats[-1].cc_alive >= world_cc  # growth may add cells


def test_population_size_constant_through_learning():
    cfg = resolve_config(tiny_world_doc())
    stats, pop = run_learning(cfg, 5)
    assert len(pop) == cfg.world.n_agents


# -- simulation mode ---------------------------------------------------------------

def inert_genomes():
    return [NanoAgentGenome(speed=2, p_a=0.0, p_d=0.0, p_i=0.0, p_k=0.0)]


def killer_genomes():
    return [NanoAgentGenome(speed=3, p_a=0.9, p_d=0.05, p_i=0.9, p_k=0.9)]


def test_zero_dose_zero_kill_fraction():
    cfg = resolve_config(tiny_world_doc(schedule={"total_dose": 0}))
    out = run_simulation(cfg, killer_genomes(), 3)
    assert out.kill_fraction_cc == 0.0
    assert out.cc_final == out.cc_initial


def test_empty_genome_pool_rejected():
    cfg = resolve_config(tiny_world_doc())
    with pytest.raises(ValueError):
        run_simulation(cfg, [], 3)


def test_pure_clearance_peak_and_zero():
    # no binding: circulating count peaks at the end of the ramp and hits the
    # linear cap all the way to zero at ramp + decline
    cfg = resolve_config(tiny_world_doc(schedule={"total_dose": 720}))
    out = run_simulation(cfg, inert_genomes(), 9)
    free = out.na_free
    peak_steps = {i for i, v in enumerate(free) if v == max(free)}
    assert peak_steps & {13, 14}
    assert out.clearance_peak == 720
    assert free[86] == 0
    sched = cfg.schedule
    for s in range(sched.ramp_steps, sched.steps):
        assert free[s] <= clearance_cap(s, out.clearance_peak, sched)


def test_free_never_exceeds_cap_with_binding():
    cfg = resolve_config(tiny_world_doc(schedule={"total_dose": 300}))
    out = run_simulation(cfg, killer_genomes(), 4)
    sched = cfg.schedule
    assert out.clearance_peak is not None
    for s in range(sched.ramp_steps, sched.steps):
        assert out.na_free[s] <= clearance_cap(s, out.clearance_peak, sched)


def test_no_recycling_in_simulation_mode():
    # internalizations are terminal: the cumulative count never decreases and
    # agents never return to circulation from it
    cfg = resolve_config(tiny_world_doc(schedule={"total_dose": 300}))
    out = run_simulation(cfg, killer_genomes(), 4)
    totals = out.na_internalized_total
    assert all(b >= a for a, b in zip(totals, totals[1:]))
    assert totals[-1] > 0  # the killer genomes did internalize


def test_simulation_deterministic():
    cfg = resolve_config(tiny_world_doc(schedule={"total_dose": 100}))
    o1 = run_simulation(cfg, killer_genomes(), 12)
    o2 = run_simulation(cfg, killer_genomes(), 12)
    assert o1 == o2


def test_kill_fraction_formula():
    cfg = resolve_config(tiny_world_doc(schedule={"total_dose": 400}))
    out = run_simulation(cfg, killer_genomes(), 2)
    assert out.kill_fraction_cc == pytest.approx(
        (out.cc_initial - out.cc_final) / out.cc_initial)
    assert out.cc_final <= out.cc_initial  # growth disabled in simulation mode
