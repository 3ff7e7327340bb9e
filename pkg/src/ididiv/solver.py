"""Exact finite-horizon solving over reachable beliefs.

solve_exact does backward induction on the reachable belief tree and returns
a complete policy tree.  brute_force_solve enumerates every complete tree and
keeps the best; it exists as an oracle for the recursive solver and refuses
to run past an explicit cap.  Both break ties toward the earlier action in
the declared order, and both skip observation branches whose probability is
exactly zero, so they agree on the returned tree, not just its value.

evaluate_policy mirrors solve_exact's accumulation order operation for
operation; the value reported for a solved tree is bit-identical either way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import SingleAgentModel
from .trees import (
    PolicyTree,
    all_trees,
    constant_tree,
    count_trees,
    validate_tree,
)

__all__ = [
    "ImpossibleObservationError",
    "EnumerationCapError",
    "SolvedPolicy",
    "belief_update",
    "observation_probability",
    "solve_exact",
    "brute_force_solve",
    "evaluate_policy",
]


class ImpossibleObservationError(ValueError):
    """Conditioning on an observation whose predicted probability is zero."""


class EnumerationCapError(RuntimeError):
    """Brute-force enumeration would exceed the requested tree cap."""


@dataclass(frozen=True)
class SolvedPolicy:
    tree: PolicyTree
    value: float
    model_name: str
    horizon: int


def _predict(model: SingleAgentModel, b: np.ndarray, a: int) -> np.ndarray:
    pred = b @ model.transition_matrix(a)
    return np.asarray(pred).ravel()


def observation_probability(
    model: SingleAgentModel, belief: np.ndarray, action: str, observation: str
) -> float:
    """Pr(observation | belief, action) one step ahead."""
    a = model.actions.index(action)
    o = model.observations.index(observation)
    pred = _predict(model, np.asarray(belief, dtype=float), a)
    return float(pred @ model.obs_fn[:, a, o])


def belief_update(
    model: SingleAgentModel, belief: np.ndarray, action: str, observation: str
) -> np.ndarray:
    """Bayes posterior over states after acting and observing.

    Raises ImpossibleObservationError when the observation has probability
    zero under the predicted state distribution.
    """
    a = model.actions.index(action)
    o = model.observations.index(observation)
    b = np.asarray(belief, dtype=float)
    pred = _predict(model, b, a)
    like = model.obs_fn[:, a, o]
    p = float(pred @ like)
    if p <= 0.0:
        raise ImpossibleObservationError(
            "observation %r has probability 0 after action %r" % (observation, action)
        )
    return (pred * like) / p


def _solve_node(
    model: SingleAgentModel, b: np.ndarray, remaining: int
) -> tuple[float, PolicyTree]:
    # Mirror _eval_node's arithmetic exactly: same expressions, same order.
    n_act = len(model.actions)
    n_obs = len(model.observations)
    best_v = -np.inf
    best_tree: PolicyTree | None = None
    for a in range(n_act):
        q = float(b @ model.reward[:, a])
        kids: list[PolicyTree | None] = []
        if remaining > 1:
            pred = _predict(model, b, a)
            for o in range(n_obs):
                like = model.obs_fn[:, a, o]
                p = float(pred @ like)
                if p > 0.0:
                    post = (pred * like) / p
                    v, sub = _solve_node(model, post, remaining - 1)
                    q += p * v
                    kids.append(sub)
                else:
                    kids.append(None)
        if best_tree is None or q > best_v:
            best_v = q
            if remaining > 1:
                filler = constant_tree(
                    model.actions[0], model.observations, remaining - 1
                )
                children = tuple(
                    (model.observations[o], kids[o] if kids[o] is not None else filler)
                    for o in range(n_obs)
                )
                best_tree = PolicyTree(model.actions[a], children)
            else:
                best_tree = PolicyTree(model.actions[a])
    assert best_tree is not None
    return best_v, best_tree


def solve_exact(model: SingleAgentModel) -> SolvedPolicy:
    """Optimal complete policy tree for the model's horizon.

    Backward induction over the beliefs reachable from the initial belief.
    Ties prefer the earlier declared action; observation branches that
    cannot occur are filled with subtrees repeating the first action.
    """
    v, tree = _solve_node(model, model.initial_belief, model.horizon)
    return SolvedPolicy(tree=tree, value=v, model_name=model.name, horizon=model.horizon)


def _eval_node(
    model: SingleAgentModel, node: PolicyTree, b: np.ndarray, remaining: int
) -> float:
    # Keep in lockstep with _solve_node: the optimal tree must evaluate to
    # the exact float the solver reported.
    a = model.actions.index(node.action)
    q = float(b @ model.reward[:, a])
    if remaining > 1:
        pred = _predict(model, b, a)
        for o in range(len(model.observations)):
            like = model.obs_fn[:, a, o]
            p = float(pred @ like)
            if p > 0.0:
                post = (pred * like) / p
                v = _eval_node(model, node.children[o][1], post, remaining - 1)
                q += p * v
    return q


def evaluate_policy(
    model: SingleAgentModel,
    tree: PolicyTree,
    belief: np.ndarray | None = None,
) -> float:
    """Expected cumulative reward of a complete tree from a belief.

    The tree must have the model's horizon as depth and branch on the
    model's observation alphabet.
    """
    validate_tree(tree, model.observations, depth=model.horizon, actions=model.actions)
    b = model.initial_belief if belief is None else np.asarray(belief, dtype=float)
    return _eval_node(model, tree, b, model.horizon)


def brute_force_solve(
    model: SingleAgentModel, max_trees: int = 200_000
) -> SolvedPolicy:
    """Enumerate every complete tree and keep the best.

    Ties keep the lexicographically earlier tree (preorder, declared action
    order), which is the same tree solve_exact constructs.  Raises
    EnumerationCapError when the tree count exceeds ``max_trees``.
    """
    n = count_trees(len(model.actions), len(model.observations), model.horizon)
    if n > max_trees:
        raise EnumerationCapError(
            "%d complete trees exceed the enumeration cap of %d" % (n, max_trees)
        )
    best_v = -np.inf
    best_tree: PolicyTree | None = None
    for tree in all_trees(model.actions, model.observations, model.horizon):
        v = _eval_node(model, tree, model.initial_belief, model.horizon)
        if best_tree is None or v > best_v:
            best_v = v
            best_tree = tree
    assert best_tree is not None
    return SolvedPolicy(
        tree=best_tree, value=best_v, model_name=model.name, horizon=model.horizon
    )
