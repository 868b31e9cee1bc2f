"""Shared fixtures. The expensive multi-seed runs are session-scoped so the
module tests and the acceptance suite reuse the same results."""
from __future__ import annotations

import time

import pytest

from nanoevo.config import resolve_config
from nanoevo.runner import replicate_seed, run_learning, top_performers

MASTER_SEED = 1234
N_SEEDS = 10


def tiny_world_doc(**extra):
    """Small fast config document for unit and CLI tests."""
    doc = {
        "world": {"width": 16, "height": 16, "n_cc": 40, "n_hc": 20, "n_agents": 20},
        "run": {"steps": 60, "master_seed": 99},
    }
    doc.update(extra)
    return doc


@pytest.fixture(scope="session")
def desk_comparison():
    """10 paired desk-scale learning runs: evolving vs mutation-frozen."""
    runs = []
    for i in range(N_SEEDS):
        seed = replicate_seed(MASTER_SEED, i)
        t0 = time.perf_counter()
        stats, pop = run_learning(resolve_config(None), seed)
        runtime = time.perf_counter() - t0
        frozen_stats, _ = run_learning(
            resolve_config({"evolution": {"mutation_sigma": 0.0}}), seed)
        runs.append({
            "seed": seed,
            "runtime_s": runtime,
            "initial_best": stats[0].best_fitness,
            "final_best": stats[-1].best_fitness,
            "evolving_cc_kills": sum(s.kills_cc_step for s in stats),
            "frozen_cc_kills": sum(s.kills_cc_step for s in frozen_stats),
            "population": pop if i == 0 else None,
        })
    return runs


@pytest.fixture(scope="session")
def evolved_genomes(desk_comparison):
    """Top genomes from the first desk run; the simulate-mode input pool."""
    return top_performers(desk_comparison[0]["population"], 10)


@pytest.fixture(scope="session")
def validation_runs():
    """20 seeded SSA replicates of the shipped default validation config."""
    import numpy as np
    from nanoevo.ssa import build_chain, kill_report, penetration_depth, run_ssa

    cfg = resolve_config(None)
    t0 = time.perf_counter()
    reps = []
    for i in range(20):
        chain = build_chain(cfg)
        rng = np.random.default_rng(replicate_seed(cfg.run.master_seed, i))
        traj = run_ssa(chain, cfg.ssa.t_end_s, cfg.ssa.sample_dt_s, rng)
        reps.append({
            "depth": penetration_depth(traj, cfg.ssa.threshold_fraction),
            "killed": kill_report(chain),
            "np_internal": chain.np_internal.copy(),
        })
    return {"replicates": reps, "runtime_s": time.perf_counter() - t0, "cfg": cfg}
