"""Command-line front end.

Global flags pick the domain, seed, output directory, and worker count;
subcommands cover the pipeline stages: solve a level-0 model, extract
features from a tree set, build a diverse candidate set, solve the
flattened planning problem, simulate interactions, and run batch
experiment grids.  Every subcommand writes a manifest.json naming its
outputs; `experiment --from-manifest` replays a recorded run.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .domains import BUILTIN_DOMAINS, builtin_domain, load_domain, project_level0, with_horizon
from .features import build_matrix, matrix_to_csv, pivot_decompose
from .flattening import flatten, solve_idid
from .generation import generate_known_models
from .runs import (
    RunManifest,
    file_sha256,
    run_experiment_grid,
    run_from_manifest,
    write_manifest,
)
from .selection import (
    SelectionConfig,
    load_candidate_set,
    save_candidate_set,
    select_topk,
)
from .simulate import TRUE_MODES, episodes_to_csv, run_experiment
from .solver import solve_exact
from .trees import canonical_encode
from .diversity import report_to_csv

__all__ = [
    "main",
    "cmd_solve",
    "cmd_features",
    "cmd_topk",
    "cmd_solve_idid",
    "cmd_simulate",
    "cmd_experiment",
]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ididiv",
        description="Diverse peer-model planning toolkit",
    )
    parser.add_argument("--seed", type=int, default=0, help="base random seed")
    parser.add_argument("--out-dir", default="out", help="output directory")
    parser.add_argument("--workers", type=int, default=1, help="parallel grid workers")
    parser.add_argument(
        "--domain",
        default="tiger",
        help="builtin domain name (%s) or path to a domain JSON file"
        % ", ".join(sorted(BUILTIN_DOMAINS)),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a level-0 model exactly")
    p.add_argument("--agent", choices=["i", "j"], default="j")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("features", help="behavior matrix and pivot features")
    p.add_argument("--trees", required=True, help="candidate set JSON file")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("topk", help="build a diverse candidate model set")
    p.add_argument("--measure", choices=["MDP", "MDF"], default="MDF")
    p.add_argument("--known", type=int, default=3, help="known model count M")
    p.add_argument("--k-max", type=int, default=6, help="candidate set size cap")
    p.add_argument("--patience", type=int, default=20)
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_topk)

    p = sub.add_parser("solve-idid", help="solve the flattened planning problem")
    p.add_argument("--candidates", required=True, help="candidate set JSON file")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_solve_idid)

    p = sub.add_parser("simulate", help="play repeated interaction rounds")
    p.add_argument("--candidates", required=True, help="candidate set JSON file")
    p.add_argument("--rounds", type=int, default=50)
    p.add_argument("--true-mode", choices=list(TRUE_MODES), default="from-set")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run a batch experiment grid")
    p.add_argument("--config", default=None, help="grid config JSON file")
    p.add_argument("--from-manifest", default=None, help="rerun a recorded manifest")
    p.set_defaults(func=cmd_experiment)

    return parser


def _cli_domain(args, horizon: int | None):
    name = args.domain
    if name in BUILTIN_DOMAINS:
        domain = builtin_domain(name, horizon)
        return domain, None
    domain = load_domain(name)
    if horizon is not None:
        domain = with_horizon(domain, horizon)
    return domain, file_sha256(name)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def cmd_solve(args) -> int:
    out = _out_dir(args)
    t0 = time.perf_counter()
    domain, dom_hash = _cli_domain(args, args.horizon)
    model = project_level0(domain, args.agent)
    pol = solve_exact(model)
    elapsed = time.perf_counter() - t0

    path = out / ("policy_%s.json" % args.agent)
    _write_json(
        path,
        {
            "agent": args.agent,
            "model": model.name,
            "horizon": model.horizon,
            "value": pol.value,
            "tree": canonical_encode(pol.tree),
        },
    )
    manifest = RunManifest(
        command="solve",
        config={"domain": args.domain, "agent": args.agent, "horizon": model.horizon},
        seed=args.seed,
        input_hashes={} if dom_hash is None else {"domain": dom_hash},
        outputs={"policy": path.name},
        timings={"solve_seconds": elapsed},
    )
    write_manifest(manifest, out)
    print("solved %s (T=%d): value %.6f -> %s" % (model.name, model.horizon, pol.value, path))
    return 0


def cmd_features(args) -> int:
    out = _out_dir(args)
    cs = load_candidate_set(args.trees)
    matrix = build_matrix(cs.trees)
    piv = pivot_decompose(matrix)

    matrix_path = out / "behavior_matrix.csv"
    matrix_path.write_text(matrix_to_csv(matrix))
    feat_path = out / "features.json"
    _write_json(
        feat_path,
        {
            "trees": len(cs.trees),
            "sequences": len(matrix.columns),
            "rank": piv.rank,
            "pivot_indices": list(piv.pivot_indices),
            "pivot_sequences": [s.compact() for s in piv.pivot_sequences],
        },
    )
    manifest = RunManifest(
        command="features",
        config={"trees": str(args.trees)},
        seed=args.seed,
        input_hashes={"trees": file_sha256(args.trees)},
        outputs={"matrix": matrix_path.name, "features": feat_path.name},
    )
    write_manifest(manifest, out)
    print(
        "%d trees, %d sequences, rank %d -> %s"
        % (len(cs.trees), len(matrix.columns), piv.rank, feat_path)
    )
    return 0


def cmd_topk(args) -> int:
    out = _out_dir(args)
    domain, dom_hash = _cli_domain(args, args.horizon)
    level0 = project_level0(domain, "j")
    known_ss, select_ss = np.random.SeedSequence(args.seed).spawn(2)

    t0 = time.perf_counter()
    known = generate_known_models(level0, args.known, seed=known_ss)
    t_known = time.perf_counter() - t0

    t0 = time.perf_counter()
    result = select_topk(
        known,
        level0,
        SelectionConfig(
            measure=args.measure,
            k_max=args.k_max,
            patience=args.patience,
            seed=select_ss,
        ),
    )
    t_select = time.perf_counter() - t0

    cand_path = out / "candidates.json"
    save_candidate_set(result, cand_path)
    div_path = out / "diversity.csv"
    div_path.write_text(report_to_csv(result.report))
    manifest = RunManifest(
        command="topk",
        config={
            "domain": args.domain,
            "measure": args.measure,
            "known": args.known,
            "k_max": args.k_max,
            "patience": args.patience,
            "horizon": level0.horizon,
        },
        seed=args.seed,
        input_hashes={} if dom_hash is None else {"domain": dom_hash},
        outputs={"candidates": cand_path.name, "diversity": div_path.name},
        timings={
            "m": args.known,
            "measure": args.measure,
            "generate_seconds": t_known,
            "select_seconds": t_select,
        },
    )
    write_manifest(manifest, out)
    added = len(result.trees) - args.known
    print(
        "%s: %d known + %d added (%.2fs) -> %s"
        % (args.measure, args.known, added, t_select, cand_path)
    )
    return 0


def cmd_solve_idid(args) -> int:
    out = _out_dir(args)
    domain, dom_hash = _cli_domain(args, args.horizon)
    cs = load_candidate_set(args.candidates)

    t0 = time.perf_counter()
    flat = flatten(domain, cs)
    pol = solve_idid(flat)
    elapsed = time.perf_counter() - t0

    path = out / "policy_idid.json"
    _write_json(
        path,
        {
            "model": flat.model.name,
            "horizon": domain.horizon,
            "candidates": len(cs.trees),
            "augmented_states": len(flat.model.states),
            "value": pol.value,
            "tree": canonical_encode(pol.tree),
        },
    )
    hashes = {"candidates": file_sha256(args.candidates)}
    if dom_hash is not None:
        hashes["domain"] = dom_hash
    manifest = RunManifest(
        command="solve-idid",
        config={
            "domain": args.domain,
            "candidates": str(args.candidates),
            "horizon": domain.horizon,
        },
        seed=args.seed,
        input_hashes=hashes,
        outputs={"policy": path.name},
        timings={"solve_seconds": elapsed},
    )
    write_manifest(manifest, out)
    print(
        "flattened %d states, value %.6f -> %s"
        % (len(flat.model.states), pol.value, path)
    )
    return 0


def cmd_simulate(args) -> int:
    out = _out_dir(args)
    domain, dom_hash = _cli_domain(args, args.horizon)
    cs = load_candidate_set(args.candidates)

    t0 = time.perf_counter()
    stats = run_experiment(
        domain,
        cs,
        true_mode=args.true_mode,
        rounds=args.rounds,
        seed=args.seed,
        keep_traces=True,
    )
    elapsed = time.perf_counter() - t0

    ep_path = out / "episodes.csv"
    ep_path.write_text(episodes_to_csv(stats.traces))
    stats_path = out / "stats.json"
    _write_json(
        stats_path,
        {
            "rounds": stats.rounds,
            "true_mode": args.true_mode,
            "mean_reward_i": stats.mean_reward_i,
            "reward_variance_i": stats.reward_variance_i,
            "mean_reward_j": stats.mean_reward_j,
            "policy_value": stats.policy_value,
        },
    )
    hashes = {"candidates": file_sha256(args.candidates)}
    if dom_hash is not None:
        hashes["domain"] = dom_hash
    manifest = RunManifest(
        command="simulate",
        config={
            "domain": args.domain,
            "candidates": str(args.candidates),
            "rounds": args.rounds,
            "true_mode": args.true_mode,
            "horizon": domain.horizon,
        },
        seed=args.seed,
        input_hashes=hashes,
        outputs={"episodes": ep_path.name, "stats": stats_path.name},
        timings={"simulate_seconds": elapsed},
    )
    write_manifest(manifest, out)
    print(
        "%d rounds: mean reward %.3f (planned %.3f) -> %s"
        % (stats.rounds, stats.mean_reward_i, stats.policy_value, stats_path)
    )
    return 0


def cmd_experiment(args) -> int:
    out = _out_dir(args)
    if args.from_manifest:
        manifest = run_from_manifest(args.from_manifest, out, workers=args.workers)
    else:
        hashes = {}
        if args.config:
            config = json.loads(Path(args.config).read_text())
            hashes["config"] = file_sha256(args.config)
        else:
            config = {"domain": args.domain, "seeds": [args.seed]}
        manifest = run_experiment_grid(
            config, out, workers=args.workers, input_hashes=hashes
        )
    n_cells = len(manifest.timings.get("cells", {}))
    print(
        "%d cells ok, %d failed -> %s"
        % (n_cells, len(manifest.errors), Path(out) / "results.csv")
    )
    for err in manifest.errors:
        print("  failed %s: %s" % (err["cell"], err["error"]), file=sys.stderr)
    return 1 if manifest.errors else 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
