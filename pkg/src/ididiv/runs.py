"""Batch experiment grids with reproducible run manifests.

A grid config is a JSON-friendly mapping of axis lists; its product defines
the cells.  Every cell runs the full pipeline: generate known peer models,
optionally expand them by diversity-guided selection, then plan and play
repeated interaction rounds.  Seeds are derived per cell and per stage so
that algorithms sharing a seed also share the known models and the true-peer
stream, which is what makes per-seed comparisons across algorithms paired.

Result CSVs contain no timestamps or timings; rerunning a recorded manifest
with the same tool version reproduces them byte for byte.  Wall-clock
timings and per-cell failures live only in the manifest.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .domains import BUILTIN_DOMAINS, builtin_domain, load_domain, project_level0, with_horizon
from .generation import generate_known_models
from .selection import SelectionConfig, make_candidate_set, select_topk
from .simulate import TRUE_MODES, run_experiment
from .trees import canonical_encode

__all__ = [
    "TOOL_VERSION",
    "ALGORITHMS",
    "RunManifest",
    "write_manifest",
    "load_manifest",
    "file_sha256",
    "normalize_grid_config",
    "grid_cells",
    "run_cell",
    "run_experiment_grid",
    "run_from_manifest",
]

TOOL_VERSION = "0.1.0"
ALGORITHMS = ("IDID", "IDID-MDP", "IDID-MDF")

_GRID_DEFAULTS = {
    "domain": "tiger",
    "horizons": [3],
    "model_counts": [3],
    "expansions": [2],
    "algorithms": list(ALGORITHMS),
    "true_modes": ["from-set"],
    "rounds": 50,
    "seeds": [0],
    "patience": 20,
}

RESULTS_HEADER = (
    "domain,algorithm,horizon,m,k,true_mode,seed,rounds,"
    "candidates,mean_reward,reward_variance,policy_value"
)
DIVERSITY_HEADER = (
    "domain,algorithm,horizon,m,k,true_mode,seed,candidates,mdp,mdf,mean_reward"
)


@dataclass
class RunManifest:
    """Everything needed to rerun a command and audit what it produced."""

    command: str
    config: dict
    seed: int | None
    tool_version: str = TOOL_VERSION
    input_hashes: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)


def manifest_to_obj(m: RunManifest) -> dict:
    return {
        "command": m.command,
        "config": m.config,
        "seed": m.seed,
        "tool_version": m.tool_version,
        "input_hashes": m.input_hashes,
        "outputs": m.outputs,
        "timings": m.timings,
        "errors": m.errors,
    }


def write_manifest(m: RunManifest, out_dir, name: str = "manifest.json") -> Path:
    path = Path(out_dir) / name
    path.write_text(json.dumps(manifest_to_obj(m), sort_keys=True, indent=2) + "\n")
    return path


def load_manifest(path) -> RunManifest:
    obj = json.loads(Path(path).read_text())
    return RunManifest(
        command=obj["command"],
        config=obj["config"],
        seed=obj.get("seed"),
        tool_version=obj.get("tool_version", "unknown"),
        input_hashes=obj.get("input_hashes", {}),
        outputs=obj.get("outputs", {}),
        timings=obj.get("timings", {}),
        errors=obj.get("errors", []),
    )


def file_sha256(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def normalize_grid_config(obj: dict) -> dict:
    """Fill defaults and validate; unknown keys are rejected."""
    unknown = set(obj) - set(_GRID_DEFAULTS)
    if unknown:
        raise ValueError("unknown grid config keys: %s" % ", ".join(sorted(unknown)))
    cfg = dict(_GRID_DEFAULTS)
    cfg.update(obj)
    for key in ("horizons", "model_counts", "expansions", "seeds"):
        cfg[key] = [int(x) for x in cfg[key]]
        if not cfg[key]:
            raise ValueError("%s must be non-empty" % key)
    for alg in cfg["algorithms"]:
        if alg not in ALGORITHMS:
            raise ValueError("unknown algorithm %r" % alg)
    for mode in cfg["true_modes"]:
        if mode not in TRUE_MODES:
            raise ValueError("unknown true mode %r" % mode)
    cfg["rounds"] = int(cfg["rounds"])
    cfg["patience"] = int(cfg["patience"])
    if cfg["rounds"] < 1:
        raise ValueError("rounds must be >= 1")
    return cfg


def grid_cells(config: dict) -> list[dict]:
    """Product of the grid axes, in deterministic report order."""
    cells = []
    for horizon in config["horizons"]:
        for m in config["model_counts"]:
            for k in config["expansions"]:
                for mode in config["true_modes"]:
                    for alg in config["algorithms"]:
                        for seed in config["seeds"]:
                            cells.append(
                                {
                                    "domain": config["domain"],
                                    "horizon": horizon,
                                    "m": m,
                                    "k": k,
                                    "true_mode": mode,
                                    "algorithm": alg,
                                    "seed": seed,
                                    "rounds": config["rounds"],
                                    "patience": config["patience"],
                                }
                            )
    return cells


def cell_id(cell: dict) -> str:
    return "alg=%s,T=%d,M=%d,K=%d,mode=%s,seed=%d" % (
        cell["algorithm"],
        cell["horizon"],
        cell["m"],
        cell["k"],
        cell["true_mode"],
        cell["seed"],
    )


def _stage_seed(cell: dict, stage: str) -> np.random.SeedSequence:
    # Known models and the episode stream must be shared by all algorithms
    # at the same seed (that is what makes comparisons paired), so their
    # entropy excludes the algorithm and the expansion size.
    code = {"known": 1, "select": 2, "episodes": 3}[stage]
    if stage == "select":
        extra = [cell["k"], ALGORITHMS.index(cell["algorithm"])]
    else:
        extra = [0, 0]
    return np.random.SeedSequence(
        [int(cell["seed"]), int(cell["horizon"]), int(cell["m"]), *extra, code]
    )


def _domain_for(cell: dict):
    name = cell["domain"]
    if isinstance(name, dict):
        name = name["path"]
    if name in BUILTIN_DOMAINS:
        return builtin_domain(name, cell["horizon"])
    return with_horizon(load_domain(name), cell["horizon"])


def _candidates_for(cell: dict, alg: str, known, level0):
    if alg == "IDID":
        return make_candidate_set(known, len(level0.observations))
    measure = alg.split("-", 1)[1]
    return select_topk(
        known,
        level0,
        SelectionConfig(
            measure=measure,
            k_max=cell["m"] + cell["k"],
            patience=cell["patience"],
            seed=_stage_seed({**cell, "algorithm": alg}, "select"),
        ),
    )


def run_cell(cell: dict) -> dict:
    """One grid cell, returning a flat result row plus its elapsed time."""
    t0 = time.perf_counter()
    domain = _domain_for(cell)
    level0 = project_level0(domain, "j")
    known = generate_known_models(level0, cell["m"], seed=_stage_seed(cell, "known"))
    alg = cell["algorithm"]
    candidates = _candidates_for(cell, alg, known, level0)
    excluded = None
    if cell["true_mode"] == "random-generated":
        # The true peer model must avoid every algorithm's expanded set, not
        # just this cell's: with the union excluded, the drawn stream depends
        # only on the seed, so algorithms face identical true models.
        union = set()
        for other in ALGORITHMS:
            cset = candidates if other == alg else _candidates_for(cell, other, known, level0)
            union.update(canonical_encode(t) for t in cset.trees)
        excluded = frozenset(union)
    stats = run_experiment(
        domain,
        candidates,
        true_mode=cell["true_mode"],
        rounds=cell["rounds"],
        seed=_stage_seed(cell, "episodes"),
        excluded_encodings=excluded,
    )
    return {
        "domain": domain.name,
        "algorithm": alg,
        "horizon": cell["horizon"],
        "m": cell["m"],
        "k": cell["k"],
        "true_mode": cell["true_mode"],
        "seed": cell["seed"],
        "rounds": cell["rounds"],
        "candidates": len(candidates.trees),
        "mean_reward": stats.mean_reward_i,
        "reward_variance": stats.reward_variance_i,
        "policy_value": stats.policy_value,
        "mdp": candidates.report.mdp_value,
        "mdf": candidates.report.mdf_value,
        "_elapsed": time.perf_counter() - t0,
    }


def _safe_run_cell(cell: dict) -> tuple[dict | None, str | None]:
    try:
        return run_cell(cell), None
    except Exception as exc:  # per-cell isolation: one bad cell cannot sink the grid
        return None, "%s: %s" % (type(exc).__name__, exc)


def _results_line(row: dict) -> str:
    return "%s,%s,%d,%d,%d,%s,%d,%d,%d,%r,%r,%r" % (
        row["domain"], row["algorithm"], row["horizon"], row["m"], row["k"],
        row["true_mode"], row["seed"], row["rounds"], row["candidates"],
        row["mean_reward"], row["reward_variance"], row["policy_value"],
    )


def _diversity_line(row: dict) -> str:
    return "%s,%s,%d,%d,%d,%s,%d,%d,%r,%r,%r" % (
        row["domain"], row["algorithm"], row["horizon"], row["m"], row["k"],
        row["true_mode"], row["seed"], row["candidates"],
        row["mdp"], row["mdf"], row["mean_reward"],
    )


def run_experiment_grid(
    config: dict,
    out_dir,
    workers: int = 1,
    input_hashes: dict | None = None,
) -> RunManifest:
    """Run every grid cell and write results.csv, diversity.csv, manifest.json."""
    config = normalize_grid_config(config)
    cells = grid_cells(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    if workers <= 1:
        outcomes = [_safe_run_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            outcomes = list(ex.map(_safe_run_cell, cells))
    total = time.perf_counter() - t0

    rows: list[dict] = []
    errors: list[dict] = []
    timings: dict = {"total_seconds": total, "cells": {}}
    for cell, (row, err) in zip(cells, outcomes):
        cid = cell_id(cell)
        if err is not None:
            errors.append({"cell": cid, "error": err})
            continue
        timings["cells"][cid] = row.pop("_elapsed")
        rows.append(row)

    results_path = out / "results.csv"
    results_path.write_text(
        "\n".join([RESULTS_HEADER] + [_results_line(r) for r in rows]) + "\n"
    )
    diversity_path = out / "diversity.csv"
    diversity_path.write_text(
        "\n".join([DIVERSITY_HEADER] + [_diversity_line(r) for r in rows]) + "\n"
    )

    manifest = RunManifest(
        command="experiment",
        config=config,
        seed=None,
        input_hashes=input_hashes or {},
        outputs={"results": "results.csv", "diversity": "diversity.csv"},
        timings=timings,
        errors=errors,
    )
    write_manifest(manifest, out)
    return manifest


def run_from_manifest(manifest_path, out_dir, workers: int = 1) -> RunManifest:
    """Rerun a recorded experiment grid; CSV outputs reproduce byte for byte."""
    m = load_manifest(manifest_path)
    if m.command != "experiment":
        raise ValueError("manifest records command %r, not an experiment" % m.command)
    return run_experiment_grid(m.config, out_dir, workers=workers)
