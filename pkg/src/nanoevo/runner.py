"""Learning-mode and simulation-mode orchestration.

Learning mode evolves the nano-agent population open-endedly: agents recycle
after every interaction and a selection/mutation round runs every
round_period steps. Simulation mode freezes the genomes, maps steps to
physical time (5000 s each), injects the dose over a 14-step ramp, clears
circulating free agents along a linear 72-step decline, and consumes agents
on internalization.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np

from .config import Schedule, SimConfig
from .evolution import (local_fitness, rank_agents, selection_mutation_round,
                        spawn_daughter)
from .kinetics import (CellKind, Mode, NAState, NanoAgentGenome, attempt_kill,
                       effective_rates, kinetic_step)
from .world import (GridWorld, NanoAgent, init_world, is_familiar, memorize,
                    move_agent, perceive)

__all__ = [
    "Schedule", "RunStats", "TreatmentOutcome", "replicate_seed", "run_learning",
    "run_simulation", "top_performers", "injection_count", "clearance_cap",
]


def replicate_seed(master_seed: int, replicate_index: int) -> int:
    """Derive a replicate's seed by hashing (master_seed, replicate_index)."""
    return int(np.random.SeedSequence((master_seed, replicate_index)).generate_state(1)[0])


@dataclass
class RunStats:
    """Per-step record of a learning run."""
    step: int
    cc_alive: int
    hc_alive: int
    na_free: int
    na_bound: int
    na_internalized: int
    kills_step: int
    kills_cc_step: int
    kills_hc_step: int
    mean_speed: float
    std_speed: float
    mean_p_a: float
    std_p_a: float
    mean_p_d: float
    std_p_d: float
    mean_p_i: float
    std_p_i: float
    mean_p_k: float
    std_p_k: float
    best_fitness: int
    median_fitness: float


@dataclass
class TreatmentOutcome:
    cc_initial: int
    cc_final: int
    hc_initial: int
    hc_final: int
    kill_fraction_cc: float
    clearance_peak: int | None = None
    steps: list[int] = field(default_factory=list)
    cc_alive: list[int] = field(default_factory=list)
    hc_alive: list[int] = field(default_factory=list)
    na_free: list[int] = field(default_factory=list)
    na_bound: list[int] = field(default_factory=list)
    na_internalized_total: list[int] = field(default_factory=list)


def _rates_for(world: GridWorld, agent: NanoAgent, cell, familiar: bool):
    return effective_rates(agent.genome, familiar, world.cfg.kinetics.curiosity,
                           cell.resistance, world.cfg.kinetics.resistance_directions)


def _release_if_target_dead(world: GridWorld, agent: NanoAgent, mode: Mode) -> None:
    if agent.state not in (NAState.BOUND, NAState.INTERNALIZED):
        return
    target = world.cells_by_id.get(agent.target_id)
    if target is not None and target.alive:
        return
    # cell died under the agent: an internalized payload is spent in
    # simulation mode, everything else returns to circulation
    if agent.state is NAState.INTERNALIZED and mode is Mode.SIMULATION:
        agent.state = NAState.SPENT
    else:
        agent.state = NAState.FREE
    agent.target_id = None


def _agent_phase(world: GridWorld, mode: Mode) -> tuple[int, int]:
    """Move/perceive/memorize/kinetics/kill for every agent. Returns (cc, hc) kills."""
    kills_cc = kills_hc = 0
    rng = world.rng
    for agent in world.agents:
        if agent.state is NAState.SPENT:
            continue
        _release_if_target_dead(world, agent, mode)
        if agent.state is NAState.INTERNALIZED:
            cell = world.cells_by_id[agent.target_id]
            familiar = is_familiar(agent, cell.signature)
            rates = _rates_for(world, agent, cell, familiar)
            if attempt_kill(agent, cell, rates.pk_eff, mode, rng):
                world.remove_cell(cell)
                if cell.kind is CellKind.CC:
                    kills_cc += 1
                else:
                    kills_hc += 1
            continue
        if agent.state is NAState.FREE:
            move_agent(world, agent)
            cell = perceive(world, agent)
            if cell is None:
                continue
            familiar = is_familiar(agent, cell.signature)
            if not familiar:
                memorize(agent, cell.signature)
            rates = _rates_for(world, agent, cell, familiar)
            new_state, _ = kinetic_step(NAState.FREE, rates, rng)
            if new_state is NAState.BOUND:
                agent.state = NAState.BOUND
                agent.target_id = cell.id
        elif agent.state is NAState.BOUND:
            cell = world.cells_by_id[agent.target_id]
            familiar = is_familiar(agent, cell.signature)
            rates = _rates_for(world, agent, cell, familiar)
            new_state, _ = kinetic_step(NAState.BOUND, rates, rng)
            agent.state = new_state
            if new_state is NAState.FREE:
                agent.target_id = None
    return kills_cc, kills_hc


def _growth_phase(world: GridWorld) -> None:
    """Vectorized Bernoulli screen over living CCs, then per-cell division."""
    ccs = world.living_cells(CellKind.CC)
    if not ccs:
        return
    p = world.cfg.evolution.division_prob
    if p <= 0:
        return
    draws = world.rng.random(len(ccs))
    for cell, u in zip(ccs, draws):
        if u < p:
            spawn_daughter(world, cell, world.rng)


def _drift_phase(world: GridWorld) -> None:
    from .evolution import mutate_cc_signature
    flip = world.cfg.evolution.signature_flip_prob
    for cell in world.living_cells(CellKind.CC):
        mutate_cc_signature(cell, flip, world.rng)


def _state_counts(world: GridWorld) -> tuple[int, int, int, int]:
    free = bound = internal = spent = 0
    for agent in world.agents:
        if agent.state is NAState.FREE:
            free += 1
        elif agent.state is NAState.BOUND:
            bound += 1
        elif agent.state is NAState.INTERNALIZED:
            internal += 1
        else:
            spent += 1
    return free, bound, internal, spent


def _collect_stats(world: GridWorld, kills_cc: int, kills_hc: int) -> RunStats:
    free, bound, internal, _ = _state_counts(world)
    if world.agents:
        params = np.array([[a.genome.speed, a.genome.p_a, a.genome.p_d,
                            a.genome.p_i, a.genome.p_k] for a in world.agents])
        fitness = [local_fitness(a) for a in world.agents]
        means = params.mean(axis=0)
        stds = params.std(axis=0)
    else:
        fitness = [0]
        means = np.zeros(5)
        stds = np.zeros(5)
    return RunStats(
        step=world.step_index,
        cc_alive=world.count_alive(CellKind.CC),
        hc_alive=world.count_alive(CellKind.HC),
        na_free=free, na_bound=bound, na_internalized=internal,
        kills_step=kills_cc + kills_hc, kills_cc_step=kills_cc, kills_hc_step=kills_hc,
        mean_speed=float(means[0]), std_speed=float(stds[0]),
        mean_p_a=float(means[1]), std_p_a=float(stds[1]),
        mean_p_d=float(means[2]), std_p_d=float(stds[2]),
        mean_p_i=float(means[3]), std_p_i=float(stds[3]),
        mean_p_k=float(means[4]), std_p_k=float(stds[4]),
        best_fitness=max(fitness), median_fitness=float(statistics.median(fitness)),
    )


def run_learning(cfg: SimConfig, seed: int) -> tuple[list[RunStats], list[NanoAgent]]:
    """Open-ended evolution for cfg.run.steps steps. Deterministic in (cfg, seed)."""
    world = init_world(cfg, seed, populate_agents=True)
    evo = cfg.evolution
    stats: list[RunStats] = []
    for _ in range(cfg.run.steps):
        kills_cc, kills_hc = _agent_phase(world, Mode.LEARNING)
        if evo.growth_during_learning:
            _growth_phase(world)
        if evo.signature_drift_per_step:
            _drift_phase(world)
        world.step_index += 1
        if world.step_index % evo.round_period == 0:
            selection_mutation_round(world.agents, evo, world.rng,
                                     next_id=world.next_agent_id,
                                     speed_max=cfg.kinetics.speed_max,
                                     memory_capacity=cfg.world.memory_capacity)
            if evo.fitness_window == "round":
                for agent in world.agents:
                    agent.cc_killed = 0
                    agent.hc_killed = 0
        stats.append(_collect_stats(world, kills_cc, kills_hc))
    return stats, world.agents


def top_performers(population: list[NanoAgent], k: int) -> list[NanoAgentGenome]:
    """Genomes of the k fittest agents, ties broken by lower agent id."""
    if k > len(population):
        raise ValueError(f"k={k} exceeds population size {len(population)}")
    return [a.genome for a in rank_agents(population)[:k]]


def injection_count(step: int, sched: Schedule) -> int:
    """NAs injected at `step`: total dose split over the ramp, remainder first."""
    if step < 0:
        raise ValueError("step must be >= 0")
    if step >= sched.ramp_steps:
        return 0
    base, remainder = divmod(sched.total_dose, sched.ramp_steps)
    return base + (1 if step < remainder else 0)


def clearance_cap(step: int, peak: int, sched: Schedule) -> int:
    """Linear-to-zero bound on circulating free NAs during the decline."""
    if step < sched.ramp_steps:
        raise ValueError("clearance applies from ramp_steps onward")
    if sched.decline_steps == 0:
        return 0
    cap = round(peak * (sched.ramp_steps + sched.decline_steps - step)
                / sched.decline_steps)
    return max(0, int(cap))


def _entry_sites(world: GridWorld) -> list:
    h, w = world.height, world.width
    if world.cfg.schedule.entry == "west_edge":
        border = [(r, 0) for r in range(h)]
    else:
        border = ([(0, c) for c in range(w)] + [(h - 1, c) for c in range(w)]
                  + [(r, 0) for r in range(1, h - 1)] + [(r, w - 1) for r in range(1, h - 1)])
    empty = [p for p in border if world.cell_at(p) is None]
    return empty or border


def _inject(world: GridWorld, count: int, pool: list[NanoAgentGenome]) -> None:
    sites = _entry_sites(world)
    for _ in range(count):
        pos = sites[int(world.rng.integers(len(sites)))]
        genome = pool[int(world.rng.integers(len(pool)))]
        world.spawn_agent(genome, pos)


def _enforce_clearance(world: GridWorld, cap: int) -> None:
    free_idx = [i for i, a in enumerate(world.agents) if a.state is NAState.FREE]
    excess = len(free_idx) - cap
    if excess <= 0:
        return
    drop = world.rng.choice(len(free_idx), size=excess, replace=False)
    doomed = {free_idx[int(i)] for i in drop}
    world.agents = [a for i, a in enumerate(world.agents) if i not in doomed]


def run_simulation(cfg: SimConfig, genomes: list[NanoAgentGenome],
                   seed: int) -> TreatmentOutcome:
    """Physically timed single-dose treatment with fixed genomes."""
    if not genomes:
        raise ValueError("simulation mode needs a non-empty genome pool")
    world = init_world(cfg, seed, populate_agents=False)
    sched = cfg.schedule
    outcome = TreatmentOutcome(
        cc_initial=world.count_alive(CellKind.CC), cc_final=0,
        hc_initial=world.count_alive(CellKind.HC), hc_final=0,
        kill_fraction_cc=0.0,
    )
    peak: int | None = None
    for step in range(sched.steps):
        _inject(world, injection_count(step, sched), genomes)
        _agent_phase(world, Mode.SIMULATION)
        if cfg.evolution.growth_during_simulation:
            _growth_phase(world)
        if step >= sched.ramp_steps:
            if peak is None:
                peak = sum(1 for a in world.agents if a.state is NAState.FREE)
                outcome.clearance_peak = peak
            _enforce_clearance(world, clearance_cap(step, peak, sched))
        world.step_index += 1
        free, bound, internal, spent = _state_counts(world)
        outcome.steps.append(step)
        outcome.cc_alive.append(world.count_alive(CellKind.CC))
        outcome.hc_alive.append(world.count_alive(CellKind.HC))
        outcome.na_free.append(free)
        outcome.na_bound.append(bound)
        outcome.na_internalized_total.append(spent + internal)
    outcome.cc_final = world.count_alive(CellKind.CC)
    outcome.hc_final = world.count_alive(CellKind.HC)
    if outcome.cc_initial > 0:
        outcome.kill_fraction_cc = ((outcome.cc_initial - outcome.cc_final)
                                    / outcome.cc_initial)
    return outcome
