"""Interaction simulation between the subject policy and a true peer model.

One experiment: flatten the domain against the candidate set, solve for the
subject's policy once, then play repeated rounds.  Each round draws the true
peer tree (from the candidate prior, or freshly generated outside the set),
then steps the domain forward for the full horizon, sampling transitions and
both observation channels.  Round randomness comes from per-round spawns of
one seed sequence, so runs are reproducible and insensitive to how many
draws an individual round consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import PosgDomain, project_level0
from .features import extract_features
from .flattening import flatten
from .generation import convert_to_dbn, sample_tree
from .selection import CandidateModelSet
from .solver import solve_exact
from .trees import BehaviorSequence, PolicyTree, canonical_encode, validate_tree

__all__ = [
    "StepRecord",
    "EpisodeTrace",
    "ExperimentStats",
    "run_episode",
    "run_experiment",
    "episodes_to_csv",
]

TRUE_MODES = ("from-set", "random-generated")


@dataclass(frozen=True)
class StepRecord:
    t: int
    state: str
    action_i: str
    action_j: str
    reward_i: float
    reward_j: float
    next_state: str
    obs_i: str
    obs_j: str


@dataclass(frozen=True)
class EpisodeTrace:
    steps: tuple[StepRecord, ...]
    total_reward_i: float
    total_reward_j: float


@dataclass(frozen=True, eq=False)
class ExperimentStats:
    """Per-round subject rewards with summary moments.

    ``reward_variance_i`` is the sample variance (ddof=1), 0.0 for a single
    round.  ``policy_value`` is the subject's planned value against the
    candidate prior, for comparison with realized means.
    """

    rounds: int
    rewards_i: tuple[float, ...]
    rewards_j: tuple[float, ...]
    mean_reward_i: float
    reward_variance_i: float
    mean_reward_j: float
    policy_value: float
    traces: tuple[EpisodeTrace, ...] | None = None


def run_episode(
    domain: PosgDomain,
    tree_i: PolicyTree,
    tree_j: PolicyTree,
    rng: np.random.Generator,
    start: np.ndarray | None = None,
) -> EpisodeTrace:
    """Play one horizon-length episode with both agents following trees."""
    T = domain.horizon
    validate_tree(tree_i, domain.observations_i, actions=domain.actions_i)
    validate_tree(tree_j, domain.observations_j, actions=domain.actions_j)
    if tree_i.depth < T or tree_j.depth < T:
        raise ValueError(
            "trees of depth (%d, %d) cannot cover horizon %d"
            % (tree_i.depth, tree_j.depth, T)
        )
    dist = domain.start_distribution() if start is None else np.asarray(start, float)
    s = int(rng.choice(len(domain.states), p=dist))

    node_i, node_j = tree_i, tree_j
    steps: list[StepRecord] = []
    tot_i = tot_j = 0.0
    for t in range(T):
        ai = domain.actions_i.index(node_i.action)
        aj = domain.actions_j.index(node_j.action)
        ri = float(domain.reward_i[s, ai, aj])
        rj = float(domain.reward_j[s, aj, ai])
        s2 = int(rng.choice(len(domain.states), p=domain.transition[s, ai, aj]))
        oi = int(rng.choice(len(domain.observations_i), p=domain.obs_fn_i[s2, ai, aj]))
        oj = int(rng.choice(len(domain.observations_j), p=domain.obs_fn_j[s2, aj]))
        steps.append(
            StepRecord(
                t=t,
                state=domain.states[s],
                action_i=node_i.action,
                action_j=node_j.action,
                reward_i=ri,
                reward_j=rj,
                next_state=domain.states[s2],
                obs_i=domain.observations_i[oi],
                obs_j=domain.observations_j[oj],
            )
        )
        tot_i += ri
        tot_j += rj
        if t + 1 < T:
            node_i = node_i.children[oi][1]
            node_j = node_j.children[oj][1]
            s = s2
    return EpisodeTrace(steps=tuple(steps), total_reward_i=tot_i, total_reward_j=tot_j)


def _random_anchor(model, rng) -> BehaviorSequence:
    T = model.horizon
    acts = tuple(
        model.actions[int(rng.integers(len(model.actions)))] for _ in range(T)
    )
    obs = tuple(
        model.observations[int(rng.integers(len(model.observations)))]
        for _ in range(T - 1)
    )
    return BehaviorSequence(acts, obs)


def _draw_novel_tree(dbn, anchors, excluded, rng, cap: int) -> PolicyTree:
    for _ in range(cap):
        pick = [anchors[int(rng.integers(len(anchors)))]]
        cand = sample_tree(dbn, pick, rng)
        if canonical_encode(cand) not in excluded:
            return cand
    # The feature-anchored sampler has a finite image that a well-expanded
    # candidate set can cover completely.  Widen to uniformly random anchor
    # sequences, which can plant any action path and so reach trees no
    # feature anchor produces.
    for _ in range(cap):
        cand = sample_tree(dbn, [_random_anchor(dbn.base, rng)], rng)
        if canonical_encode(cand) not in excluded:
            return cand
    raise RuntimeError(
        "failed to draw a true model outside the candidate set in %d attempts" % (2 * cap)
    )


def run_experiment(
    domain: PosgDomain,
    candidates: CandidateModelSet,
    true_mode: str = "from-set",
    rounds: int = 50,
    seed=0,
    resample_each_round: bool = True,
    rejection_cap: int = 200,
    keep_traces: bool = False,
    excluded_encodings=None,
) -> ExperimentStats:
    """Plan once against the candidate set, then play repeated rounds.

    true_mode "from-set" draws the peer's true tree from the candidate
    prior each round; "random-generated" draws a tree outside the set,
    anchored on the known candidates' features, falling back to random
    anchors when those features cannot escape the set (held fixed across
    rounds when ``resample_each_round`` is false).  ``excluded_encodings``
    widens the set the true tree must avoid (canonical encodings), so
    algorithms under comparison can face an identical true-model stream by
    excluding the union of their candidate sets.
    """
    if true_mode not in TRUE_MODES:
        raise ValueError("true_mode must be one of %r" % (TRUE_MODES,))
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if excluded_encodings is not None and true_mode != "random-generated":
        raise ValueError("excluded_encodings only applies to random-generated mode")

    flat = flatten(domain, candidates)
    policy = solve_exact(flat.model)

    if true_mode == "random-generated":
        known = [
            t for t, p in zip(candidates.trees, candidates.provenance) if p == "known"
        ] or list(candidates.trees)
        anchors = extract_features(known)
        dbn = convert_to_dbn(project_level0(domain, "j"))
        excluded = frozenset(canonical_encode(t) for t in candidates.trees)
        if excluded_encodings is not None:
            excluded |= frozenset(excluded_encodings)

    if isinstance(seed, np.random.SeedSequence):
        spawns = seed.spawn(rounds)
    else:
        spawns = np.random.SeedSequence(seed).spawn(rounds)
    rewards_i: list[float] = []
    rewards_j: list[float] = []
    traces: list[EpisodeTrace] = []
    true_tree: PolicyTree | None = None
    for k in range(rounds):
        rng = np.random.default_rng(spawns[k])
        if true_mode == "from-set":
            idx = int(rng.choice(len(candidates.trees), p=candidates.prior))
            tt = candidates.trees[idx]
        else:
            if true_tree is None or resample_each_round:
                true_tree = _draw_novel_tree(
                    dbn, anchors, excluded, rng, rejection_cap
                )
            tt = true_tree
        ep = run_episode(domain, policy.tree, tt, rng)
        rewards_i.append(ep.total_reward_i)
        rewards_j.append(ep.total_reward_j)
        if keep_traces:
            traces.append(ep)

    arr = np.asarray(rewards_i)
    return ExperimentStats(
        rounds=rounds,
        rewards_i=tuple(rewards_i),
        rewards_j=tuple(rewards_j),
        mean_reward_i=float(arr.mean()),
        reward_variance_i=float(arr.var(ddof=1)) if rounds > 1 else 0.0,
        mean_reward_j=float(np.mean(rewards_j)),
        policy_value=policy.value,
        traces=tuple(traces) if keep_traces else None,
    )


def episodes_to_csv(traces) -> str:
    """Step-level CSV across rounds; no timestamps, reproducible byte for byte."""
    lines = [
        "round,t,state,action_i,action_j,reward_i,reward_j,next_state,obs_i,obs_j"
    ]
    for rnd, tr in enumerate(traces):
        for st in tr.steps:
            lines.append(
                "%d,%d,%s,%s,%s,%r,%r,%s,%s,%s"
                % (
                    rnd,
                    st.t,
                    st.state,
                    st.action_i,
                    st.action_j,
                    st.reward_i,
                    st.reward_j,
                    st.next_state,
                    st.obs_i,
                    st.obs_j,
                )
            )
    return "\n".join(lines) + "\n"
