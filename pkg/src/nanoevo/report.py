"""CSV/JSON persistence and SVG plots for run results.

All numeric CSV output goes through str() (repr of floats), which is
locale-independent and round-trips exactly, so reruns from a manifest are
byte-identical.
"""
from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path

import numpy as np

from .evolution import local_fitness
from .kinetics import NanoAgentGenome
from .runner import RunStats, TreatmentOutcome
from .ssa import Trajectory
from .world import NanoAgent

GENOME_FIELDS = ("speed", "p_a", "p_d", "p_i", "p_k")


def write_stats_csv(stats: list[RunStats], path: str | Path) -> None:
    fields = [f.name for f in dataclasses.fields(RunStats)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for record in stats:
            writer.writerow([getattr(record, name) for name in fields])


def write_population_json(population: list[NanoAgent], path: str | Path) -> None:
    entries = []
    for agent in population:
        entry = {name: getattr(agent.genome, name) for name in GENOME_FIELDS}
        entry.update(id=agent.id, cc_killed=agent.cc_killed,
                     hc_killed=agent.hc_killed, fitness=local_fitness(agent))
        entries.append(entry)
    Path(path).write_text(json.dumps({"genomes": entries}, indent=2) + "\n")


def load_genomes(path: str | Path) -> list[NanoAgentGenome]:
    """Read genomes from final_population.json or a bare list of genome dicts."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"genome file not found: {path}")
    doc = json.loads(path.read_text())
    raw = doc["genomes"] if isinstance(doc, dict) else doc
    genomes = []
    for entry in raw:
        genomes.append(NanoAgentGenome(**{name: entry[name] for name in GENOME_FIELDS}))
    return genomes


def write_outcome_json(outcome: TreatmentOutcome, path: str | Path) -> None:
    payload = {
        "cc_initial": outcome.cc_initial, "cc_final": outcome.cc_final,
        "hc_initial": outcome.hc_initial, "hc_final": outcome.hc_final,
        "kill_fraction_cc": outcome.kill_fraction_cc,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def write_timeseries_csv(outcome: TreatmentOutcome, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "cc_alive", "hc_alive", "na_free", "na_bound",
                         "na_internalized_total"])
        for i, step in enumerate(outcome.steps):
            writer.writerow([step, outcome.cc_alive[i], outcome.hc_alive[i],
                             outcome.na_free[i], outcome.na_bound[i],
                             outcome.na_internalized_total[i]])


def write_dose_response_csv(rows: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["total_dose", "cc_initial", "cc_final", "kill_fraction_cc"])
        for row in rows:
            writer.writerow([row["total_dose"], row["cc_initial"], row["cc_final"],
                             row["kill_fraction_cc"]])


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    alive = traj.cell_alive()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s", "compartment", "np_free", "receptors_free",
                         "complexes", "np_internal", "cell_alive"])
        for s, t in enumerate(traj.times):
            for i in range(traj.n_compartments):
                writer.writerow([t, i, traj.np_free[s, i], traj.receptors_free[s, i],
                                 traj.complexes[s, i], traj.np_internal[s, i],
                                 int(alive[s, i])])


def write_depth_json(depths: list[int], kill_reports: list[list[bool]],
                     threshold_fraction: float, path: str | Path) -> None:
    payload = {
        "replicates": len(depths),
        "depths": depths,
        "median_depth": float(np.median(depths)),
        "threshold_fraction": threshold_fraction,
        "killed": [[bool(k) for k in rep] for rep in kill_reports],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def write_units_json(payload: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# -- plots ----------------------------------------------------------------

def _savefig(fig, path: str | Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def plot_fitness(stats: list[RunStats], path: str | Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    steps = [s.step for s in stats]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(steps, [s.best_fitness for s in stats], label="best")
    ax.plot(steps, [s.median_fitness for s in stats], label="median")
    ax.set_xlabel("step")
    ax.set_ylabel("local fitness")
    ax.legend()
    fig.tight_layout()
    _savefig(fig, path)
    plt.close(fig)


def plot_param_hist(population: list[NanoAgent], path: str | Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, axes = plt.subplots(2, 3, figsize=(10, 6))
    names = ["speed", "p_a", "p_d", "p_i", "p_k"]
    for ax, name in zip(axes.flat, names):
        values = [getattr(a.genome, name) for a in population]
        if name == "speed":
            bins = np.arange(0.5, max(values) + 1.5)
        else:
            bins = np.linspace(0, 1, 21)
        ax.hist(values, bins=bins)
        ax.set_title(name)
    axes.flat[-1].axis("off")
    fig.tight_layout()
    _savefig(fig, path)
    plt.close(fig)


def plot_penetration(traj: Trajectory, path: str | Path) -> None:
    """Heatmap of bound-plus-internal signal over time and depth."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    signal = traj.complexes.astype(float) + traj.np_internal
    fig, ax = plt.subplots(figsize=(7, 4))
    im = ax.imshow(signal.T, aspect="auto", origin="lower",
                   extent=(0, float(traj.times[-1]) / 3600.0, -0.5,
                           traj.n_compartments - 0.5))
    ax.set_xlabel("time (h)")
    ax.set_ylabel("compartment (cell widths)")
    fig.colorbar(im, ax=ax, label="bound + internalized")
    fig.tight_layout()
    _savefig(fig, path)
    plt.close(fig)
