"""Receptor interaction state machine for nano-agents.

Free + receptor <-> complex -> internalized + receptor, driven by per-step
probabilities p_a (association), p_d (dissociation), p_i (internalization),
plus a one-shot kill probability p_k after internalization. Association is
damped by a curiosity factor for unfamiliar cells and all four parameters can
be perturbed by a cell's resistance modifier.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

PARAM_NAMES = ("p_a", "p_d", "p_i", "p_k")

# Detrimental-to-the-NA default: resistance lowers association, internalization
# and killing, and raises dissociation.
DEFAULT_RESISTANCE_DIRECTIONS = {"p_a": "down", "p_d": "up", "p_i": "down", "p_k": "down"}


class CellKind(Enum):
    CC = "CC"
    HC = "HC"


class NAState(Enum):
    FREE = "free"
    BOUND = "bound"
    INTERNALIZED = "internalized"
    SPENT = "spent"


class Mode(Enum):
    LEARNING = "learning"
    SIMULATION = "simulation"


@dataclass(frozen=True)
class NanoAgentGenome:
    """Evolvable parameter vector of one nano-agent lineage."""
    speed: int
    p_a: float
    p_d: float
    p_i: float
    p_k: float

    def __post_init__(self) -> None:
        if self.speed < 1:
            raise ValueError(f"genome speed must be >= 1, got {self.speed}")
        for name in PARAM_NAMES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"genome {name} must be in [0, 1], got {value}")

    @classmethod
    def random(cls, rng: np.random.Generator, speed_max: int = 3,
               prob_max: float = 1.0) -> "NanoAgentGenome":
        """Naive founder genome: probabilities uniform on [0, prob_max]."""
        return cls(
            speed=int(rng.integers(1, speed_max + 1)),
            p_a=float(rng.random() * prob_max),
            p_d=float(rng.random() * prob_max),
            p_i=float(rng.random() * prob_max),
            p_k=float(rng.random() * prob_max),
        )


@dataclass(frozen=True)
class ResistanceModifier:
    """Per-cell perturbation of one NA interaction parameter, inherited at division."""
    target: str
    strength: float

    def __post_init__(self) -> None:
        if self.target not in PARAM_NAMES:
            raise ValueError(f"modifier target must be one of {PARAM_NAMES}")
        if not 0.0 < self.strength < 1.0:
            raise ValueError(f"modifier strength must be in (0, 1), got {self.strength}")


@dataclass(frozen=True)
class EffectiveRates:
    pa_eff: float
    pd_eff: float
    pi_eff: float
    pk_eff: float


def effective_rates(genome: NanoAgentGenome, familiar: bool, curiosity: float,
                    modifier: ResistanceModifier | None = None,
                    directions: dict[str, str] | None = None) -> EffectiveRates:
    """Apply the curiosity damping and the cell's resistance modifier.

    Unfamiliar cells scale p_a by `curiosity`; the modifier then multiplies its
    target by (1 - strength) when pushed down or (1 + strength), clipped to 1,
    when pushed up.
    """
    if not 0.0 < curiosity <= 1.0:
        raise ValueError("curiosity must be in (0, 1]")
    rates = {
        "p_a": genome.p_a * (1.0 if familiar else curiosity),
        "p_d": genome.p_d,
        "p_i": genome.p_i,
        "p_k": genome.p_k,
    }
    if modifier is not None:
        direction = (directions or DEFAULT_RESISTANCE_DIRECTIONS)[modifier.target]
        if direction == "down":
            rates[modifier.target] *= 1.0 - modifier.strength
        else:
            rates[modifier.target] = min(1.0, rates[modifier.target] * (1.0 + modifier.strength))
    return EffectiveRates(rates["p_a"], rates["p_d"], rates["p_i"], rates["p_k"])


def kinetic_step(state: NAState, rates: EffectiveRates,
                 rng: np.random.Generator) -> tuple[NAState, str | None]:
    """One per-step transition of the interaction chain.

    Free agents on a living cell associate with probability pa_eff. Bound
    agents resolve internalization vs dissociation vs staying bound with a
    single categorical draw; if pi_eff + pd_eff exceed 1 the two exit weights
    are rescaled proportionally to sum to 1.
    """
    if state is NAState.FREE:
        if rng.random() < rates.pa_eff:
            return NAState.BOUND, "associate"
        return NAState.FREE, None
    if state is NAState.BOUND:
        pi, pd = rates.pi_eff, rates.pd_eff
        total = pi + pd
        if total > 1.0:
            pi, pd = pi / total, pd / total
        u = rng.random()
        if u < pi:
            return NAState.INTERNALIZED, "internalize"
        if u < pi + pd:
            return NAState.FREE, "dissociate"
        return NAState.BOUND, None
    raise ValueError(f"kinetic_step does not apply to state {state}")


def attempt_kill(agent, cell, pk_eff: float, mode: Mode,
                 rng: np.random.Generator) -> bool:
    """One-shot Bernoulli kill attempt by an internalized agent.

    The agent leaves the internalized state afterwards regardless of outcome:
    recycled to Free in learning mode, consumed (Spent) in simulation mode.
    """
    if agent.state is not NAState.INTERNALIZED or agent.target_id != cell.id:
        raise ValueError("attempt_kill requires an agent internalized in this cell")
    if not cell.alive:
        raise ValueError("attempt_kill requires a living cell")
    killed = rng.random() < pk_eff
    if killed:
        cell.alive = False
        if cell.kind is CellKind.CC:
            agent.cc_killed += 1
        else:
            agent.hc_killed += 1
    agent.state = NAState.FREE if mode is Mode.LEARNING else NAState.SPENT
    agent.target_id = None
    return killed
