"""Diversity measures over sets of complete policy trees.

Two set functions, both normalized per depth by the branching factor:

* behavior-prefix diversity sums, over depths t, the number of distinct
  length-t behavior prefixes across the set, divided by n_obs**(t-1);
* the frame-augmented variant additionally counts distinct depth-t
  truncations (frames), thereby rewarding structural spread even when
  realized prefixes coincide.

Both are monotone under adding trees; the frame-augmented value is never
below the prefix-only value (it adds a nonnegative term per depth).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

from .trees import PolicyTree, canonical_encode, frame, prefixes

__all__ = [
    "diff_sequences",
    "diff_frames",
    "mdp",
    "mdf",
    "DiversityReport",
    "diversity_report",
    "report_to_csv",
]


def _common_depth(trees: Sequence[PolicyTree]) -> int:
    depths = {t.depth for t in trees}
    if len(depths) > 1:
        raise ValueError("trees have mixed depths %r" % sorted(depths))
    return depths.pop()


def _obs_count(n_observations) -> int:
    if isinstance(n_observations, int):
        n = n_observations
    else:
        n = len(tuple(n_observations))
    if n < 1:
        raise ValueError("need at least one observation symbol")
    return n


def diff_sequences(trees: Sequence[PolicyTree], t: int) -> int:
    """Distinct length-t behavior prefixes realized across the set."""
    if not trees:
        return 0
    out = set()
    for tree in trees:
        out |= prefixes(tree, t)
    return len(out)


def diff_frames(trees: Sequence[PolicyTree], t: int) -> int:
    """Distinct depth-t truncations across the set."""
    if not trees:
        return 0
    return len({canonical_encode(frame(tree, t)) for tree in trees})


def mdp(trees: Sequence[PolicyTree], n_observations) -> float:
    """Prefix diversity summed over depths, depth t scaled by n**-(t-1)."""
    if not trees:
        return 0.0
    n = _obs_count(n_observations)
    depth = _common_depth(trees)
    return sum(diff_sequences(trees, t) / n ** (t - 1) for t in range(1, depth + 1))


def mdf(trees: Sequence[PolicyTree], n_observations) -> float:
    """Prefix plus frame diversity, same per-depth scaling as mdp."""
    if not trees:
        return 0.0
    n = _obs_count(n_observations)
    depth = _common_depth(trees)
    return sum(
        (diff_sequences(trees, t) + diff_frames(trees, t)) / n ** (t - 1)
        for t in range(1, depth + 1)
    )


@dataclass(frozen=True)
class DiversityReport:
    """Per-depth distinct counts plus both aggregate measures."""

    n_trees: int
    n_observations: int
    sequence_counts: tuple[int, ...]
    frame_counts: tuple[int, ...]
    mdp_value: float
    mdf_value: float


def diversity_report(trees: Sequence[PolicyTree], n_observations) -> DiversityReport:
    n = _obs_count(n_observations)
    if not trees:
        return DiversityReport(0, n, (), (), 0.0, 0.0)
    depth = _common_depth(trees)
    seq = tuple(diff_sequences(trees, t) for t in range(1, depth + 1))
    frm = tuple(diff_frames(trees, t) for t in range(1, depth + 1))
    return DiversityReport(
        n_trees=len(trees),
        n_observations=n,
        sequence_counts=seq,
        frame_counts=frm,
        mdp_value=sum(s / n ** (t - 1) for t, s in enumerate(seq, start=1)),
        mdf_value=sum(
            (s + f) / n ** (t - 1)
            for t, (s, f) in enumerate(zip(seq, frm), start=1)
        ),
    )


def report_to_csv(report: DiversityReport) -> str:
    buf = io.StringIO()
    buf.write("depth,distinct_prefixes,distinct_frames\n")
    for t, (s, f) in enumerate(zip(report.sequence_counts, report.frame_counts), 1):
        buf.write("%d,%d,%d\n" % (t, s, f))
    buf.write("mdp,%r,\n" % report.mdp_value)
    buf.write("mdf,%r,\n" % report.mdf_value)
    return buf.getvalue()
