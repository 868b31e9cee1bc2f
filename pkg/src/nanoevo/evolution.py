"""Fitness accounting, selection/mutation of nano-agents, tumour counter-adaptation."""
from __future__ import annotations

from collections import deque
from typing import Callable

import numpy as np

from .config import EvolutionConfig
from .kinetics import PARAM_NAMES, CellKind, NanoAgentGenome, ResistanceModifier
from .world import CellAgent, GridWorld, NanoAgent

__all__ = [
    "EvolutionConfig", "local_fitness", "rank_agents", "selection_mutation_round",
    "mutate_genome", "mutate_cc_signature", "divide_cell", "assign_resistance",
]


def local_fitness(agent: NanoAgent) -> int:
    """Killed cancer cells minus killed healthy cells."""
    return agent.cc_killed - agent.hc_killed


def rank_agents(population: list[NanoAgent]) -> list[NanoAgent]:
    """Best first; ties broken by lower agent id."""
    return sorted(population, key=lambda a: (-local_fitness(a), a.id))


def mutate_genome(genome: NanoAgentGenome, sigma: float, rng: np.random.Generator,
                  speed_max: int = 3) -> NanoAgentGenome:
    """Gaussian perturbation of the probabilities, +/-1 speed step with prob sigma each."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    values = {name: float(np.clip(getattr(genome, name) + rng.normal(0.0, sigma), 0.0, 1.0))
              for name in PARAM_NAMES}
    speed = genome.speed
    u = rng.random()
    if u < sigma:
        speed += 1
    elif u < 2 * sigma:
        speed -= 1
    speed = int(np.clip(speed, 1, speed_max))
    return NanoAgentGenome(speed=speed, **values)


def selection_mutation_round(population: list[NanoAgent], cfg: EvolutionConfig,
                             rng: np.random.Generator,
                             next_id: Callable[[], int] | None = None,
                             speed_max: int = 3,
                             memory_capacity: int = 4) -> list[NanoAgent]:
    """Replace the bottom replace_fraction of agents with mutated top genomes.

    Replacement preserves the replaced agent's position; a bottom agent is only
    replaced when its sampled parent is strictly fitter, so an all-equal
    population passes through unchanged. Population size never changes.
    """
    n = len(population)
    if n < 2:
        return population
    k = int(cfg.replace_fraction * n)
    if k == 0:
        return population
    ranked = rank_agents(population)
    top = ranked[:k]
    bottom = ranked[-k:]
    counter = [max(a.id for a in population) + 1]

    def fresh_id() -> int:
        if next_id is not None:
            return next_id()
        counter[0] += 1
        return counter[0] - 1

    index_of = {id(a): i for i, a in enumerate(population)}
    for loser in bottom:
        parent = top[int(rng.integers(k))]
        if local_fitness(parent) <= local_fitness(loser):
            continue
        replacement = NanoAgent(
            id=fresh_id(),
            genome=mutate_genome(parent.genome, cfg.mutation_sigma, rng, speed_max),
            position=loser.position,
            memory=deque(maxlen=memory_capacity),
        )
        population[index_of[id(loser)]] = replacement
    return population


def mutate_cc_signature(cell: CellAgent, flip_prob: float,
                        rng: np.random.Generator) -> CellAgent:
    """Flip each signature bit independently with flip_prob. Cancer cells only."""
    if cell.kind is not CellKind.CC:
        raise ValueError("signature mutation applies to cancer cells only")
    cell.signature = cell.signature.flipped(flip_prob, rng)
    return cell


def divide_cell(world: GridWorld, cell: CellAgent,
                rng: np.random.Generator) -> CellAgent | None:
    """Bernoulli division of a living cancer cell into a free Moore neighbor."""
    if not cell.alive or cell.kind is not CellKind.CC:
        raise ValueError("only living cancer cells divide")
    if rng.random() >= world.cfg.evolution.division_prob:
        return None
    return spawn_daughter(world, cell, rng)


def spawn_daughter(world: GridWorld, cell: CellAgent,
                   rng: np.random.Generator) -> CellAgent | None:
    """Place a daughter on a uniformly chosen empty neighbor; inherit resistance verbatim."""
    free = world.empty_neighbors(cell.position)
    if not free:
        return None
    pos = free[int(rng.integers(len(free)))]
    daughter = CellAgent(
        id=world.next_cell_id(),
        kind=CellKind.CC,
        signature=cell.signature,
        position=pos,
        resistance=cell.resistance,
    )
    mutate_cc_signature(daughter, world.cfg.evolution.signature_flip_prob, rng)
    world.place_cell(daughter)
    return daughter


def assign_resistance(ccs: list[CellAgent], cfg: EvolutionConfig,
                      rng: np.random.Generator) -> None:
    """Give round(resistance_fraction * |CC|) distinct cells one random modifier each."""
    n = len(ccs)
    count = int(round(cfg.resistance_fraction * n))
    if count == 0:
        return
    chosen = rng.choice(n, size=count, replace=False)
    for idx in chosen:
        target = PARAM_NAMES[int(rng.integers(len(PARAM_NAMES)))]
        strength = float(rng.uniform(cfg.resistance_strength_min,
                                     cfg.resistance_strength_max))
        ccs[int(idx)].resistance = ResistanceModifier(target=target, strength=strength)
