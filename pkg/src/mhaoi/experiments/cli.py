"""Command-line entry point: ``run``, ``sweep``, ``enumerate-graphs`` and ``oracle-dp``.

Failures exit with status 1 (2 for usage errors) after printing one JSON error
record on stderr: ``{"error": <type>, "message": ..., "path": ...}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .graphs import enumerate_connected_graphs
from .sweep import load_instance, run_sweep


def _print_summary(result, stream):
    for row in result.summary:
        ci = ""
        if row["ci95_low"] is not None:
            ci = f"  [{row['ci95_low']:.4f}, {row['ci95_high']:.4f}]"
        print(f"{row['scenario_id']:<28} {row['policy']:<24} {row['mean_weighted_total']:12.4f}{ci}", file=stream)
    for f in result.failures:
        print(f"FAILED {f.get('scenario_id')} {f.get('policy', '')}: {f['message']}", file=stream)
    print(f"results written to {result.output}", file=stream)


def cmd_run(args) -> int:
    cfg = parse_config(args.config)
    if len(cfg.scenarios) != 1:
        raise ConfigError("run takes a single scenario; use sweep for several", "$.scenarios")
    result = run_sweep(cfg, out_dir=args.out, seed=args.seed)
    _print_summary(result, sys.stdout)
    return 1 if result.failures else 0


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    progress = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    result = run_sweep(cfg, out_dir=args.out, seed=args.seed, progress=progress)
    _print_summary(result, sys.stdout)
    return 0


def cmd_enumerate(args) -> int:
    graphs = enumerate_connected_graphs(args.n)
    payload = {"n": args.n, "count": len(graphs),
               "graphs": [{"index": i, "edges": [list(e) for e in g]} for i, g in enumerate(graphs)]}
    text = json.dumps(payload, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"{len(graphs)} connected graphs on {args.n} nodes written to {args.out}")
    else:
        print(text)
    return 0


def cmd_oracle(args) -> int:
    from ..oracles import value_iteration_oracle

    cfg = parse_config(args.config)
    if len(cfg.scenarios) != 1:
        raise ConfigError("oracle-dp takes a single scenario", "$.scenarios")
    instance = load_instance(cfg.scenarios[0])
    opts = cfg.oracle
    res = value_iteration_oracle(
        instance,
        a_max=opts.get("a_max", 30),
        tol=opts.get("tolerance", 1e-6),
        budget=opts.get("budget", 10**7),
        simulate_slots=opts.get("simulate_slots", 10**6),
        seed=cfg.simulation.get("seed", 0),
    )
    targets = res.targets(instance)
    targets.update(scenario_id=instance.name, iterations=res.iterations, converged=res.converged)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(targets, indent=2) + "\n")
    print(f"optimal average cost {res.optimal_cost:.4f} (simulated {res.simulated_cost:.4f}); "
          f"targets written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mhaoi", description="Multi-hop age-of-information scheduling experiments")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate the policies of a single-scenario config")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run every scenario x policy x replication of a config")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_sweep)

    e = sub.add_parser("enumerate-graphs", help="list connected graphs up to isomorphism")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_enumerate)

    o = sub.add_parser("oracle-dp", help="optimal single-hop policy by value iteration; writes targets")
    o.add_argument("--config", required=True)
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_oracle)
    return p


def error_record(exc: BaseException) -> dict:
    rec = {"error": type(exc).__name__, "message": getattr(exc, "message", str(exc))}
    if isinstance(exc, ConfigError):
        rec["path"] = exc.path
    if isinstance(exc, OSError) and getattr(exc, "filename", None):
        rec["path"] = exc.filename
    return rec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(json.dumps(error_record(exc)), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
