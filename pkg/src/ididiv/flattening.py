"""Flattening a two-agent domain with candidate peer models.

The subject agent's planning problem becomes a single-agent POMDP over
augmented states (candidate m, tree position pos, physical state s), indexed
m-major, pos-minor (preorder), s-innermost.  The peer's action is read off
the tree position; its observation channel advances the position.  Leaf
positions keep themselves (the physical state still moves), and the
subject's observation at a successor position conditions on the action of
that position's unique parent.  Root positions never occur as successors,
so their observation rows are uniform filler.

Small augmented spaces get dense tables, large ones per-action sparse
matrices; the solver accepts both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .domains import PosgDomain, SingleAgentModel, validate_model
from .selection import CandidateModelSet
from .solver import SolvedPolicy, solve_exact
from .trees import PolicyTree, validate_tree

__all__ = ["FlatIdid", "flatten", "solve_idid"]


@dataclass(frozen=True, eq=False)
class FlatIdid:
    """The augmented model plus the indexing needed to interpret it."""

    model: SingleAgentModel
    domain: PosgDomain
    candidates: CandidateModelSet
    offsets: tuple[int, ...]
    node_counts: tuple[int, ...]

    def augmented_index(self, m: int, pos: int, s: int) -> int:
        return self.offsets[m] + pos * len(self.domain.states) + s


def _tree_tables(
    tree: PolicyTree, act_index: dict[str, int], n_obs: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Preorder node tables: action index, parent index, child index per obs.

    Children entries are -1 at leaves; parents are -1 at the root.
    """
    actions: list[int] = []
    parents: list[int] = []
    children: list[list[int]] = []

    def walk(node: PolicyTree, parent: int) -> int:
        idx = len(actions)
        actions.append(act_index[node.action])
        parents.append(parent)
        children.append([-1] * n_obs)
        for k, (_, sub) in enumerate(node.children):
            children[idx][k] = walk(sub, idx)
        return idx

    walk(tree, -1)
    return (
        np.asarray(actions, dtype=np.int64),
        np.asarray(parents, dtype=np.int64),
        np.asarray(children, dtype=np.int64),
    )


def flatten(
    domain: PosgDomain,
    candidates: CandidateModelSet,
    b0_phys: np.ndarray | None = None,
    sparse_threshold: int = 2048,
) -> FlatIdid:
    """Build the augmented single-agent model for the subject agent.

    Candidate trees must be complete over the domain's peer observation
    alphabet with depth at least the domain horizon.  The initial belief is
    the product of the physical start distribution, the candidate prior,
    and point mass on each tree's root position.
    """
    S = len(domain.states)
    act_i = domain.actions_i
    obs_i = domain.observations_i
    n_ai, n_oi, n_oj = len(act_i), len(obs_i), len(domain.observations_j)
    aj_index = {a: k for k, a in enumerate(domain.actions_j)}

    for k, tree in enumerate(candidates.trees):
        if tree.depth < domain.horizon:
            raise ValueError(
                "candidate %d has depth %d, below the domain horizon %d"
                % (k, tree.depth, domain.horizon)
            )
        validate_tree(tree, domain.observations_j, actions=domain.actions_j)

    tables = [
        _tree_tables(t, aj_index, n_oj) for t in candidates.trees
    ]
    node_counts = tuple(len(tab[0]) for tab in tables)
    offsets = tuple(np.concatenate(([0], np.cumsum([n * S for n in node_counts])))[:-1])
    s_aug = offsets[-1] + node_counts[-1] * S

    if b0_phys is None:
        b0 = domain.start_distribution()
    else:
        b0 = np.asarray(b0_phys, dtype=float)
        if b0.shape != (S,) or abs(float(b0.sum()) - 1.0) > 1e-12 or b0.min() < 0.0:
            raise ValueError("b0_phys must be a distribution over physical states")

    # Physical transition nonzeros per action pair, shared across positions.
    nz_cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def phys_nz(ai: int, aj: int):
        key = (ai, aj)
        if key not in nz_cache:
            blk = domain.transition[:, ai, aj, :]
            r, c = np.nonzero(blk)
            nz_cache[key] = (r, c, blk[r, c])
        return nz_cache[key]

    dense = s_aug <= sparse_threshold
    per_action = []
    for ai in range(n_ai):
        rows_parts: list[np.ndarray] = []
        cols_parts: list[np.ndarray] = []
        vals_parts: list[np.ndarray] = []
        for m, (acts, parents, children) in enumerate(tables):
            for pos in range(node_counts[m]):
                aj = int(acts[pos])
                r, c, v = phys_nz(ai, aj)
                base = offsets[m] + pos * S
                if children[pos, 0] < 0:
                    # Leaf: the position self-loops, observation mass sums out.
                    rows_parts.append(base + r)
                    cols_parts.append(base + c)
                    vals_parts.append(v)
                    continue
                for o in range(n_oj):
                    pos2 = int(children[pos, o])
                    w = domain.obs_fn_j[:, aj, o]
                    rows_parts.append(base + r)
                    cols_parts.append(offsets[m] + pos2 * S + c)
                    vals_parts.append(v * w[c])
        rows = np.concatenate(rows_parts)
        cols = np.concatenate(cols_parts)
        vals = np.concatenate(vals_parts)
        mat = sparse.coo_array((vals, (rows, cols)), shape=(s_aug, s_aug)).tocsr()
        per_action.append(mat)

    if dense:
        T_aug = np.zeros((s_aug, n_ai, s_aug))
        for ai, mat in enumerate(per_action):
            T_aug[:, ai, :] = mat.toarray()
        transition = T_aug
    else:
        transition = tuple(per_action)

    O_aug = np.empty((s_aug, n_ai, n_oi))
    R_aug = np.empty((s_aug, n_ai))
    for m, (acts, parents, _children) in enumerate(tables):
        for pos in range(node_counts[m]):
            base = offsets[m] + pos * S
            par = int(parents[pos])
            if par < 0:
                O_aug[base : base + S] = 1.0 / n_oi
            else:
                O_aug[base : base + S] = domain.obs_fn_i[:, :, int(acts[par]), :]
            R_aug[base : base + S] = domain.reward_i[:, :, int(acts[pos])]

    b0_aug = np.zeros(s_aug)
    for m in range(len(tables)):
        b0_aug[offsets[m] : offsets[m] + S] = candidates.prior[m] * b0

    names = tuple(
        "m%d:p%d:%s" % (m, pos, st)
        for m in range(len(tables))
        for pos in range(node_counts[m])
        for st in domain.states
    )
    model = SingleAgentModel(
        name="idid:%s" % domain.name,
        states=names,
        actions=act_i,
        observations=obs_i,
        transition=transition,
        obs_fn=O_aug,
        reward=R_aug,
        initial_belief=b0_aug,
        horizon=domain.horizon,
    )
    validate_model(model)
    return FlatIdid(
        model=model,
        domain=domain,
        candidates=candidates,
        offsets=offsets,
        node_counts=node_counts,
    )


def solve_idid(flat: FlatIdid) -> SolvedPolicy:
    """Exact subject-agent policy for the flattened model."""
    return solve_exact(flat.model)
