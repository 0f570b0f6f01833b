"""Scenario × policy × replication sweeps with incremental persistence.

Cells run sequentially in config order, which makes the output order canonical.
A scenario that fails to build, or a policy that fails on it, is recorded in
``errors.json`` and the sweep moves on.
"""

from __future__ import annotations

import json
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..policies import make_policy
from ..simulator import ReplicationResult, SimulationConfig, replication_seed, run_simulation
from .config import ConfigError, ExperimentConfig, parse_config
from .results import ResultRecord, ResultWriter
from .scenarios import expand_scenarios, generate_scenario, explicit_scenario


@dataclass
class SweepResult:
    records: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    echo: dict = field(default_factory=dict)
    output: Path | None = None


def simulation_config(cfg: ExperimentConfig, seed: int | None = None) -> SimulationConfig:
    sim = dict(cfg.simulation)
    if seed is not None:
        sim["seed"] = seed
    sim.setdefault("horizon", 100_000)
    sim.setdefault("replications", 10)
    return SimulationConfig(**sim)


def _policy_params(entry: dict, prior: dict) -> dict:
    params = dict(entry.get("params", {}))
    scale = float(params.pop("alpha_scale", 1.0))
    alpha = None
    if "alpha_from" in entry:
        alpha = prior[entry["alpha_from"]].pair_costs
    elif "targets_file" in entry:
        alpha = np.asarray(json.loads(Path(entry["targets_file"]).read_text())["alpha"], dtype=float)
    if alpha is not None:
        params["alpha"] = (np.asarray(alpha, dtype=float) * scale).tolist()
        params.setdefault("mode", "fixed")
    return params


def _records(scenario_id, label, rep, res, instance, pair_ci):
    out = []
    debts = res.diagnostics.get("final_debts")
    s = res.summary
    for d, (k, j) in enumerate(instance.dest_keys):
        lo, hi = pair_ci[d] if pair_ci is not None else (None, None)
        out.append(ResultRecord(
            scenario_id=scenario_id, policy=label, replication=rep, pair_k=k, pair_j=j,
            avg_age=float(s.avg_age[d]), avg_cost=float(s.avg_cost[d]),
            weighted_total=float(s.total_cost), ci95_low=lo, ci95_high=hi,
            weighted_age=float(s.weighted_age),
            final_debt=None if debts is None else float(debts[d]),
        ))
    return out


def _pair_cis(results):
    from ..simulator import confidence_interval

    if len(results) < 2:
        return None
    costs = np.array([r.summary.avg_cost for r in results])
    return [confidence_interval(costs[:, d]) for d in range(costs.shape[1])]


def _echo(cfg: ExperimentConfig, scenarios, sim: SimulationConfig, out: Path) -> dict:
    echo = {k: v for k, v in cfg.raw.items() if k not in ("scenario", "scenarios", "policy", "policies")}
    echo["scenarios"] = [s.resolved for s in scenarios]
    echo["policies"] = cfg.policies
    echo["simulation"] = {
        "horizon": sim.horizon, "burn_in": sim.burn_in, "replications": sim.replications,
        "seed": sim.seed, "observable_channels": sim.observable_channels,
        "record_trajectory": sim.record_trajectory,
    }
    echo["output"] = str(out)
    echo["replication_seeds"] = [replication_seed(sim.seed, r) for r in range(sim.replications)]
    return echo


def _build_scenarios(cfg: ExperimentConfig, failures: list):
    built = []
    for n, entry in enumerate(cfg.scenarios):
        try:
            built.extend(expand_scenarios([entry]))
        except Exception as exc:  # isolate bad scenarios
            failures.append({"scenario_index": n, "scenario_id": entry.get("id"), "stage": "build",
                             "error": type(exc).__name__, "message": str(exc)})
    return built


def run_sweep(config, out_dir=None, seed: int | None = None, progress=None) -> SweepResult:
    """Run every policy on every scenario; write results under ``out_dir``.

    ``config`` is anything :func:`parse_config` accepts. ``progress``, if given,
    is called with a short status string after each cell.
    """
    cfg = config if isinstance(config, ExperimentConfig) else parse_config(config)
    sim = simulation_config(cfg, seed)
    out = Path(out_dir or cfg.output)
    result = SweepResult(output=out)
    scenarios = _build_scenarios(cfg, result.failures)
    writer = ResultWriter(out, trajectories=sim.record_trajectory)
    result.echo = _echo(cfg, scenarios, sim, out)
    writer.json("config.echo.json", result.echo)

    totals = {}
    for scen in scenarios:
        try:
            instance = scen.instance()
        except Exception as exc:
            result.failures.append({"scenario_id": scen.id, "stage": "build", "error": type(exc).__name__,
                                    "message": str(exc)})
            continue
        prior: dict = {}
        for entry in cfg.policies:
            label = entry.get("label", entry["name"])
            try:
                params = _policy_params(entry, prior)
                runs = []
                for rep in range(sim.replications):
                    policy = make_policy(entry["name"], params)
                    runs.append(run_simulation(instance, policy, sim, replication_seed(sim.seed, rep)))
                rr = ReplicationResult(runs)
            except Exception as exc:
                result.failures.append({"scenario_id": scen.id, "policy": label, "stage": "run",
                                        "error": type(exc).__name__, "message": str(exc),
                                        "traceback": traceback.format_exc(limit=3)})
                continue
            prior[label] = rr
            cis = _pair_cis(runs)
            for rep, res in enumerate(runs):
                recs = _records(scen.id, label, rep, res, instance, cis)
                writer.records(recs)
                writer.timing(scen.id, label, rep, res.wall_clock)
                if res.trajectory is not None:
                    writer.trajectory(scen.id, label, rep, res.trajectory)
                result.records.extend(recs)
            ci = rr.cost_ci
            totals[(scen.id, label)] = {
                "scenario_id": scen.id, "policy": label, "replications": len(runs),
                "mean_weighted_total": rr.mean_cost,
                "ci95_low": None if ci is None else ci[0], "ci95_high": None if ci is None else ci[1],
                "mean_weighted_age": rr.mean_weighted_age,
            }
            if progress:
                progress(f"{scen.id} {label}: {rr.mean_cost:.4f}")

    result.summary = sweep_summary(totals, [s.id for s in scenarios], [p.get("label", p["name"]) for p in cfg.policies],
                                   cfg.baseline)
    writer.sweep_summary(result.summary)
    writer.json("errors.json", result.failures)
    writer.close()
    return result


def sweep_summary(totals: dict, scenario_ids, labels, baseline: str | None) -> list[dict]:
    """Rows grouped by scenario, scenarios ranked by the baseline policy's cost."""
    baseline = baseline or (labels[0] if labels else None)

    def key(sid):
        row = totals.get((sid, baseline))
        return (0, row["mean_weighted_total"], sid) if row else (1, 0.0, sid)

    ordered = sorted(dict.fromkeys(scenario_ids), key=key)
    rows = []
    for rank, sid in enumerate(ordered, start=1):
        base = totals.get((sid, baseline))
        for label in labels:
            row = totals.get((sid, label))
            if row is None:
                continue
            rows.append({**row, "rank": rank,
                         "baseline_total": None if base is None else base["mean_weighted_total"]})
    return rows


def load_instance(entry: dict):
    """Build one instance from a single scenario config entry."""
    if "generator" in entry:
        params = dict(entry.get("params", {}))
        if "id" in entry:
            params["id"] = entry["id"]
        return generate_scenario(entry["generator"], params).instance()
    return explicit_scenario(entry).instance()


__all__ = ["ConfigError", "SweepResult", "load_instance", "run_sweep", "simulation_config", "sweep_summary"]
