"""Evolvable nano-agent drug-carrier simulator with stochastic transport validation."""

__version__ = "0.1.0"

from .config import ConfigError, SimConfig, load_config, resolve_config
from .kinetics import (CellKind, EffectiveRates, Mode, NanoAgentGenome, NAState,
                       ResistanceModifier, attempt_kill, effective_rates,
                       kinetic_step)
from .world import (CellAgent, GridWorld, NanoAgent, VisibleSignature, init_world,
                    is_familiar, memorize, move_agent, perceive)
from .evolution import (EvolutionConfig, assign_resistance, divide_cell,
                        local_fitness, mutate_cc_signature, mutate_genome,
                        selection_mutation_round)
from .runner import (RunStats, Schedule, TreatmentOutcome, clearance_cap,
                     injection_count, replicate_seed, run_learning,
                     run_simulation, top_performers)
from .ssa import (CompartmentChain, Trajectory, build_chain, kill_report,
                  meanfield_ode, penetration_depth, run_ssa)
from . import unitmap

__all__ = [
    "__version__",
    "ConfigError", "SimConfig", "load_config", "resolve_config",
    "CellKind", "EffectiveRates", "Mode", "NanoAgentGenome", "NAState",
    "ResistanceModifier", "attempt_kill", "effective_rates", "kinetic_step",
    "CellAgent", "GridWorld", "NanoAgent", "VisibleSignature", "init_world",
    "is_familiar", "memorize", "move_agent", "perceive",
    "EvolutionConfig", "assign_resistance", "divide_cell", "local_fitness",
    "mutate_cc_signature", "mutate_genome", "selection_mutation_round",
    "RunStats", "Schedule", "TreatmentOutcome", "clearance_cap",
    "injection_count", "replicate_seed", "run_learning", "run_simulation",
    "top_performers",
    "CompartmentChain", "Trajectory", "build_chain", "kill_report",
    "meanfield_ode", "penetration_depth", "run_ssa",
    "unitmap",
]
