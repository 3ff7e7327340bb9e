"""Greedy accumulation of a diverse candidate model set.

Starting from the known trees, feature behavior sequences are extracted and
used as anchors to sample new trees; a sample joins the set only when it
strictly increases the chosen diversity measure.  The loop stops at the set
size cap or after ``patience`` consecutive non-improving samples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .diversity import DiversityReport, diversity_report, mdf, mdp
from .domains import SingleAgentModel
from .features import extract_features
from .generation import convert_to_dbn, sample_tree
from .trees import PolicyTree, canonical_encode, canonical_parse, validate_tree

__all__ = [
    "MEASURES",
    "SelectionConfig",
    "CandidateModelSet",
    "make_candidate_set",
    "select_topk",
    "diversity_trace",
    "save_candidate_set",
    "load_candidate_set",
]

MEASURES = {"MDP": mdp, "MDF": mdf}


@dataclass(frozen=True)
class SelectionConfig:
    measure: str = "MDF"
    k_max: int = 10
    patience: int = 20
    seed: int = 0
    epsilon: float = 1e-6
    anchor_policy: str = "round-robin"

    def __post_init__(self) -> None:
        if self.measure not in MEASURES:
            raise ValueError(
                "measure must be one of %s, got %r"
                % (", ".join(sorted(MEASURES)), self.measure)
            )
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.anchor_policy not in ("round-robin", "uniform"):
            raise ValueError("unknown anchor policy %r" % self.anchor_policy)


@dataclass(frozen=True, eq=False)
class CandidateModelSet:
    """Distinct complete trees with a prior and per-tree provenance.

    ``provenance`` entries are "known" or "generated".  ``trace`` records
    (set size, diversity value) after the initial set and after each
    accepted addition, for the measure that drove selection (empty when no
    selection ran).
    """

    trees: tuple[PolicyTree, ...]
    prior: np.ndarray
    provenance: tuple[str, ...]
    report: DiversityReport
    measure: str | None = None
    trace: tuple[tuple[int, float], ...] = ()

    def __post_init__(self) -> None:
        if not self.trees:
            raise ValueError("candidate set cannot be empty")
        if len(self.provenance) != len(self.trees):
            raise ValueError("provenance length does not match trees")
        for p in self.provenance:
            if p not in ("known", "generated"):
                raise ValueError("provenance entries must be known/generated")
        encs = [canonical_encode(t) for t in self.trees]
        if len(set(encs)) != len(encs):
            raise ValueError("duplicate trees in candidate set")
        prior = np.asarray(self.prior, dtype=float)
        if prior.shape != (len(self.trees),):
            raise ValueError("prior shape %r for %d trees" % (prior.shape, len(self.trees)))
        if prior.min() < 0.0 or abs(float(prior.sum()) - 1.0) > 1e-12:
            raise ValueError("prior must be a distribution over the trees")
        prior.setflags(write=False)
        object.__setattr__(self, "prior", prior)


def make_candidate_set(
    trees: Sequence[PolicyTree],
    n_observations,
    provenance: Sequence[str] | None = None,
    prior: np.ndarray | None = None,
    measure: str | None = None,
    trace: Sequence[tuple[int, float]] = (),
) -> CandidateModelSet:
    """Assemble a set with a uniform prior and a diversity report by default."""
    trees = tuple(trees)
    if provenance is None:
        provenance = ("known",) * len(trees)
    if prior is None:
        prior = np.full(len(trees), 1.0 / len(trees)) if trees else np.zeros(0)
    return CandidateModelSet(
        trees=trees,
        prior=np.asarray(prior, dtype=float),
        provenance=tuple(provenance),
        report=diversity_report(trees, n_observations),
        measure=measure,
        trace=tuple(trace),
    )


def _dedup(trees: Sequence[PolicyTree]) -> list[PolicyTree]:
    out, seen = [], set()
    for t in trees:
        enc = canonical_encode(t)
        if enc not in seen:
            seen.add(enc)
            out.append(t)
    return out


def select_topk(
    known: Sequence[PolicyTree],
    model: SingleAgentModel,
    config: SelectionConfig = SelectionConfig(),
) -> CandidateModelSet:
    """Expand the known trees with diversity-increasing sampled trees.

    The known trees are always retained (duplicates among them collapse).
    Anchors are the feature sequences of the known set, cycled or drawn per
    ``config.anchor_policy``.  A sampled tree is accepted only when the
    configured measure strictly increases; the loop ends at ``k_max`` trees
    or after ``patience`` consecutive rejections.  Deterministic for a
    fixed config.
    """
    measure_fn = MEASURES[config.measure]
    n_obs = len(model.observations)
    base = _dedup(known)
    if not base:
        raise ValueError("need at least one known tree")
    for t in base:
        validate_tree(t, model.observations, depth=model.horizon, actions=model.actions)

    anchors = extract_features(base)
    dbn = convert_to_dbn(model, config.epsilon)
    rng = np.random.default_rng(config.seed)

    trees = list(base)
    seen = {canonical_encode(t) for t in trees}
    current = measure_fn(trees, n_obs)
    trace: list[tuple[int, float]] = [(len(trees), current)]
    misses = 0
    draw = 0
    while len(trees) < config.k_max and misses < config.patience:
        if config.anchor_policy == "round-robin":
            pick = [anchors[draw % len(anchors)]]
        else:
            pick = [anchors[int(rng.integers(len(anchors)))]]
        draw += 1
        cand = sample_tree(dbn, pick, rng)
        enc = canonical_encode(cand)
        if enc in seen:
            misses += 1
            continue
        value = measure_fn(trees + [cand], n_obs)
        if value > current:
            trees.append(cand)
            seen.add(enc)
            current = value
            trace.append((len(trees), value))
            misses = 0
        else:
            misses += 1

    provenance = ("known",) * len(base) + ("generated",) * (len(trees) - len(base))
    return make_candidate_set(
        trees,
        n_obs,
        provenance=provenance,
        measure=config.measure,
        trace=trace,
    )


def diversity_trace(result: CandidateModelSet) -> list[tuple[int, float]]:
    """(set size, diversity value) points recorded during selection."""
    return list(result.trace)


def save_candidate_set(cs: CandidateModelSet, path) -> Path:
    obj = {
        "trees": [canonical_encode(t) for t in cs.trees],
        "prior": [float(p) for p in cs.prior],
        "provenance": list(cs.provenance),
        "n_observations": cs.report.n_observations,
        "measure": cs.measure,
        "trace": [[int(k), float(v)] for k, v in cs.trace],
    }
    p = Path(path)
    p.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")
    return p


def load_candidate_set(path) -> CandidateModelSet:
    obj = json.loads(Path(path).read_text())
    trees = [canonical_parse(t) for t in obj["trees"]]
    return make_candidate_set(
        trees,
        int(obj["n_observations"]),
        provenance=obj.get("provenance"),
        prior=np.asarray(obj["prior"], dtype=float) if "prior" in obj else None,
        measure=obj.get("measure"),
        trace=[(int(k), float(v)) for k, v in obj.get("trace", [])],
    )
