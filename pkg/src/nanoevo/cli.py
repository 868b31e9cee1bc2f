"""Command-line interface: learn, simulate, validate, map-units.

Every run writes run_manifest.json (resolved config + seed + version); passing
a manifest back through --config reproduces the run byte-identically.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, SimConfig, load_config, resolve_config, write_manifest
from .runner import replicate_seed, run_learning, run_simulation
from .ssa import build_chain, kill_report, penetration_depth, run_ssa
from .unitmap import (cell_volume_liters, ka_to_particles_per_step,
                      na_molar_concentration, pa_to_ka, prob_to_rate,
                      step_duration)
from . import report

import numpy as np


def _load(args) -> tuple[SimConfig, int]:
    if args.config is not None:
        cfg, manifest_seed = load_config(args.config)
    else:
        cfg, manifest_seed = resolve_config(None), None
    seed = args.seed if args.seed is not None else (
        manifest_seed if manifest_seed is not None else cfg.run.master_seed)
    return cfg, int(seed)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_learn(args) -> int:
    cfg, seed = _load(args)
    out = _outdir(args)
    stats, population = run_learning(cfg, seed)
    report.write_stats_csv(stats, out / "stats.csv")
    report.write_population_json(population, out / "final_population.json")
    write_manifest(out / "run_manifest.json", "learn", cfg, seed, __version__)
    report.plot_fitness(stats, out / "fitness.svg")
    report.plot_param_hist(population, out / "param_hist.svg")
    print(f"learn: {cfg.run.steps} steps, seed {seed}, outputs in {out}")
    return 0


def cmd_simulate(args) -> int:
    cfg, seed = _load(args)
    out = _outdir(args)
    genomes = report.load_genomes(args.genomes)
    if not genomes:
        print("error: genome list is empty", file=sys.stderr)
        return 2
    outcome = run_simulation(cfg, genomes, seed)
    report.write_outcome_json(outcome, out / "outcome.json")
    report.write_timeseries_csv(outcome, out / "timeseries.csv")
    if cfg.schedule.dose_sweep:
        rows = []
        for dose in cfg.schedule.dose_sweep:
            sweep_cfg = resolve_config(cfg.to_dict())
            sweep_cfg.schedule.total_dose = int(dose)
            sweep_cfg.schedule.dose_sweep = []
            sweep = run_simulation(sweep_cfg, genomes, seed)
            rows.append({"total_dose": int(dose), "cc_initial": sweep.cc_initial,
                         "cc_final": sweep.cc_final,
                         "kill_fraction_cc": sweep.kill_fraction_cc})
        report.write_dose_response_csv(rows, out / "dose_response.csv")
    write_manifest(out / "run_manifest.json", "simulate", cfg, seed, __version__)
    print(f"simulate: kill_fraction_cc={outcome.kill_fraction_cc:.4f}, "
          f"outputs in {out}")
    return 0


def _validate_replicate(cfg: SimConfig, seed: int):
    chain = build_chain(cfg)
    rng = np.random.default_rng(seed)
    traj = run_ssa(chain, cfg.ssa.t_end_s, cfg.ssa.sample_dt_s, rng)
    depth = penetration_depth(traj, cfg.ssa.threshold_fraction)
    return traj, depth, kill_report(chain)


def cmd_validate(args) -> int:
    cfg, seed = _load(args)
    out = _outdir(args)
    replicates = args.replicates if args.replicates is not None else cfg.run.replicates
    seeds = [replicate_seed(seed, i) for i in range(replicates)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_validate_replicate, [cfg] * replicates, seeds))
    else:
        results = [_validate_replicate(cfg, s) for s in seeds]
    trajectories = [r[0] for r in results]
    depths = [r[1] for r in results]
    kill_reports = [r[2] for r in results]
    report.write_trajectory_csv(trajectories[0], out / "trajectory.csv")
    if replicates > 1:
        for i, traj in enumerate(trajectories):
            report.write_trajectory_csv(traj, out / f"trajectory_r{i:03d}.csv")
    report.write_depth_json(depths, kill_reports, cfg.ssa.threshold_fraction,
                            out / "depth.json")
    report.plot_penetration(trajectories[0], out / "penetration.svg")
    write_manifest(out / "run_manifest.json", "validate", cfg, seed, __version__)
    print(f"validate: median depth {np.median(depths):.1f} over "
          f"{replicates} replicate(s), outputs in {out}")
    return 0


def cmd_map_units(args) -> int:
    if args.config is not None:
        cfg, _ = load_config(args.config)
    else:
        cfg = resolve_config(None)
    units = cfg.units
    diffusion = args.diffusion if args.diffusion is not None else units.diffusion_cm2_s
    diameter = args.cell_diameter if args.cell_diameter is not None else units.cell_diameter_cm
    particles = args.particles_per_na if args.particles_per_na is not None else units.particles_per_na
    dt = step_duration(diffusion, diameter, units.msd_dimension_factor)
    conc = na_molar_concentration(particles, cell_volume_liters(diameter))
    payload: dict = {
        "step_duration_s": dt,
        "na_molar": conc,
        "particles_per_na": particles,
        "diffusion_cm2_s": diffusion,
        "cell_diameter_cm": diameter,
        "ka_range_per_M_s": [units.ka_range_min, units.ka_range_max],
    }
    lines = [f"step duration: {dt:.6g} s", f"NA concentration: {conc:.6g} M"]
    if args.pa is not None:
        ka = pa_to_ka(args.pa, conc, dt)
        in_range = units.ka_range_min <= ka <= units.ka_range_max
        payload.update(p_a=args.pa, ka_per_M_s=ka, ka_in_range=in_range,
                       ka_particles_per_step=ka_to_particles_per_step(ka, conc, dt))
        flag = "" if in_range else (" [below ka range]" if ka < units.ka_range_min
                                    else " [above ka range]")
        lines.append(f"p_a={args.pa:g} -> ka = {ka:.6g} 1/(M s){flag} "
                     f"({payload['ka_particles_per_step']:.6g} particles/step)")
    if args.pd is not None:
        kd = prob_to_rate(args.pd, dt)
        payload.update(p_d=args.pd, kd_per_s=kd)
        lines.append(f"p_d={args.pd:g} -> kd = {kd:.6g} 1/s")
    if args.pi is not None:
        ki = prob_to_rate(args.pi, dt)
        payload.update(p_i=args.pi, ki_per_s=ki)
        lines.append(f"p_i={args.pi:g} -> ki = {ki:.6g} 1/s")
    print("\n".join(lines))
    out = _outdir(args)
    report.write_units_json(payload, out / "units.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nanoevo",
                                     description="Evolvable nano-agent simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, default=None,
                       help="YAML config or run_manifest.json")
        p.add_argument("--out", type=str, default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the master seed")
        p.add_argument("--replicates", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1)

    p_learn = sub.add_parser("learn", help="run the open-ended learning mode")
    common(p_learn)
    p_learn.set_defaults(func=cmd_learn)

    p_sim = sub.add_parser("simulate", help="run the physically timed treatment")
    common(p_sim)
    p_sim.add_argument("--genomes", type=str, required=True,
                       help="final_population.json or a JSON genome list")
    p_sim.set_defaults(func=cmd_simulate)

    p_val = sub.add_parser("validate", help="run the compartment-chain SSA")
    common(p_val)
    p_val.set_defaults(func=cmd_validate)

    p_map = sub.add_parser("map-units", help="map probabilities to rate constants")
    common(p_map)
    p_map.add_argument("--pa", type=float, default=None)
    p_map.add_argument("--pd", type=float, default=None)
    p_map.add_argument("--pi", type=float, default=None)
    p_map.add_argument("--diffusion", type=float, default=None,
                       help="diffusion coefficient [cm^2/s]")
    p_map.add_argument("--cell-diameter", type=float, default=None, help="[cm]")
    p_map.add_argument("--particles-per-na", type=float, default=None)
    p_map.set_defaults(func=cmd_map_units)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
