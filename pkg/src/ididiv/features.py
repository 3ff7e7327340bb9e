"""Behavior matrices and pivot features.

A set of complete policy trees induces a 0/1 matrix P: one row per tree, one
column per distinct full-length behavior sequence, in first-appearance order
(trees scanned in the given order, each tree's sequences depth-first).
Exact Gauss-Jordan elimination over the rationals yields P = F x U where U
holds the top ``rank`` rows of the reduced row echelon form and F is P
restricted to the pivot columns.  The pivot columns' sequences are the
feature behaviors: a minimal spanning subset of the observed behavior.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .trees import BehaviorSequence, PolicyTree, sequence_list

__all__ = [
    "BehaviorMatrix",
    "PivotResult",
    "build_matrix",
    "pivot_decompose",
    "extract_features",
    "matrix_to_csv",
]


@dataclass(frozen=True, eq=False)
class BehaviorMatrix:
    """0/1 incidence of trees (rows) against behavior sequences (columns)."""

    row_ids: tuple[str, ...]
    columns: tuple[BehaviorSequence, ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        ent = np.asarray(self.entries, dtype=np.uint8)
        if ent.ndim != 2 or ent.shape != (len(self.row_ids), len(self.columns)):
            raise ValueError(
                "entries shape %r does not match %d rows x %d columns"
                % (ent.shape, len(self.row_ids), len(self.columns))
            )
        if len(set(self.row_ids)) != len(self.row_ids):
            raise ValueError("duplicate row identifiers")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate sequence columns")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)


@dataclass(frozen=True, eq=False)
class PivotResult:
    """Exact decomposition P = F x U with pivot bookkeeping.

    ``u_matrix`` rows are rational (Fraction) tuples; ``f_matrix`` is the
    integer pivot-column restriction of the behavior matrix.
    """

    rank: int
    pivot_indices: tuple[int, ...]
    pivot_sequences: tuple[BehaviorSequence, ...]
    f_matrix: np.ndarray
    u_matrix: tuple[tuple[Fraction, ...], ...]


def build_matrix(
    trees: Sequence[PolicyTree], row_ids: Sequence[str] | None = None
) -> BehaviorMatrix:
    """Incidence matrix of the trees over their distinct full sequences.

    Column order is first appearance: trees in the given order, sequences
    within a tree in depth-first order over the declared observations.
    """
    trees = list(trees)
    if not trees:
        raise ValueError("need at least one tree")
    depth = trees[0].depth
    for k, t in enumerate(trees):
        if t.depth != depth:
            raise ValueError(
                "tree %d has depth %d, expected %d" % (k, t.depth, depth)
            )
    if row_ids is None:
        ids = tuple("tree%d" % (k + 1) for k in range(len(trees)))
    else:
        ids = tuple(row_ids)
        if len(ids) != len(trees):
            raise ValueError("%d row ids for %d trees" % (len(ids), len(trees)))

    index: dict[BehaviorSequence, int] = {}
    per_tree: list[tuple[BehaviorSequence, ...]] = []
    for t in trees:
        seqs = sequence_list(t)
        per_tree.append(seqs)
        for s in seqs:
            if s not in index:
                index[s] = len(index)

    entries = np.zeros((len(trees), len(index)), dtype=np.uint8)
    for r, seqs in enumerate(per_tree):
        for s in seqs:
            entries[r, index[s]] = 1

    columns = tuple(sorted(index, key=index.__getitem__))
    return BehaviorMatrix(row_ids=ids, columns=columns, entries=entries)


def pivot_decompose(matrix: BehaviorMatrix) -> PivotResult:
    """Exact rational Gauss-Jordan elimination with leftmost-pivot order.

    Returns the rank, the pivot column positions, F = P[:, pivots], and the
    first ``rank`` rows of rref(P) as U.  The reconstruction F x U equals P
    exactly; this identity is re-checked in rational arithmetic before
    returning.
    """
    ent = matrix.entries
    nrows, ncols = ent.shape
    rows: list[list[Fraction]] = [
        [Fraction(int(x)) for x in ent[r]] for r in range(nrows)
    ]

    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pr = next((k for k in range(r, nrows) if rows[k][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c]
        if inv != 1:
            rows[r] = [v / inv for v in rows[r]]
        for k in range(nrows):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1

    rank = len(pivots)
    u_matrix = tuple(tuple(rows[k]) for k in range(rank))
    f_matrix = ent[:, pivots].astype(np.int64)

    # P = F x U must hold exactly; the pivot submatrix of U is the identity.
    for i in range(nrows):
        for c in range(ncols):
            total = sum(
                Fraction(int(f_matrix[i, k])) * u_matrix[k][c] for k in range(rank)
            )
            if total != Fraction(int(ent[i, c])):
                raise RuntimeError(
                    "decomposition mismatch at entry (%d, %d)" % (i, c)
                )

    return PivotResult(
        rank=rank,
        pivot_indices=tuple(pivots),
        pivot_sequences=tuple(matrix.columns[c] for c in pivots),
        f_matrix=f_matrix,
        u_matrix=u_matrix,
    )


def extract_features(trees: Sequence[PolicyTree]) -> tuple[BehaviorSequence, ...]:
    """The pivot-column behavior sequences of the trees' behavior matrix."""
    return pivot_decompose(build_matrix(trees)).pivot_sequences


def matrix_to_csv(matrix: BehaviorMatrix) -> str:
    """CSV dump: header of compact sequence encodings, one row per tree."""
    buf = io.StringIO()
    buf.write("tree," + ",".join(c.compact() for c in matrix.columns) + "\n")
    for rid, row in zip(matrix.row_ids, matrix.entries):
        buf.write(rid + "," + ",".join(str(int(x)) for x in row) + "\n")
    return buf.getvalue()
