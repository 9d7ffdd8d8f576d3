"""Complete-linkage agglomerative clustering, dendrogram cut, and Newick export."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AsymmetricInput, NaNInput

__all__ = [
    "Merge",
    "Dendrogram",
    "complete_linkage",
    "cut",
    "export_newick",
    "merges_to_json",
    "clusters_to_csv",
]


class Merge(NamedTuple):
    left: int
    right: int
    height: float


@dataclass(frozen=True)
class Dendrogram:
    """Merge tree over ``n_leaves`` players.

    Leaves are numbered 0..k-1; the t-th merge creates internal node k+t.
    Complete linkage guarantees non-decreasing merge heights.
    """

    n_leaves: int
    merges: tuple[Merge, ...]

    def __post_init__(self):
        if len(self.merges) != max(self.n_leaves - 1, 0):
            raise ValueError(
                f"{self.n_leaves} leaves need {self.n_leaves - 1} merges, "
                f"got {len(self.merges)}"
            )
        seen = set()
        heights = [m.height for m in self.merges]
        if any(b < a for a, b in zip(heights, heights[1:])):
            raise ValueError("merge heights must be non-decreasing")
        for t, m in enumerate(self.merges):
            limit = self.n_leaves + t
            for child in (m.left, m.right):
                if not (0 <= child < limit):
                    raise ValueError(f"merge {t} references invalid node {child}")
                if child in seen:
                    raise ValueError(f"node {child} appears as a child twice")
                seen.add(child)

    @property
    def root_height(self) -> float:
        return self.merges[-1].height if self.merges else 0.0


def complete_linkage(d) -> Dendrogram:
    """Agglomerate by repeatedly merging the closest pair of clusters.

    The distance between two clusters is the largest pairwise distance
    between their members. The diagonal of ``d`` is ignored. When several
    pairs tie at the minimal distance, the pair whose (smallest leaf id,
    smallest leaf id) key is lexicographically least is merged, which makes
    the result deterministic even when the distances saturate at a few
    values.

    Raises
    ------
    AsymmetricInput
        If ``d`` is not symmetric.
    NaNInput
        If ``d`` contains NaN.
    """
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    if np.isnan(d).any():
        raise NaNInput("distance matrix contains NaN")
    if not np.array_equal(d, d.T):
        raise AsymmetricInput("distance matrix is not symmetric")
    k = d.shape[0]
    off_diag = d[~np.eye(k, dtype=bool)]
    if off_diag.size and off_diag.min() < 0:
        raise ValueError("off-diagonal distances must be nonnegative")
    if k == 1:
        return Dendrogram(n_leaves=1, merges=())

    work = d.copy()
    np.fill_diagonal(work, np.inf)
    active = list(range(k))          # positions still in play
    node_id = list(range(k))         # dendrogram node id per position
    min_leaf = list(range(k))        # smallest leaf id per position

    merges: list[Merge] = []
    for step in range(k - 1):
        best = None
        for ai in range(len(active)):
            a = active[ai]
            for bi in range(ai + 1, len(active)):
                b = active[bi]
                lo, hi = sorted((min_leaf[a], min_leaf[b]))
                key = (work[a, b], lo, hi)
                if best is None or key < best[0]:
                    best = (key, a, b)
        (height, _, _), a, b = best
        if min_leaf[b] < min_leaf[a]:
            a, b = b, a
        merges.append(Merge(left=node_id[a], right=node_id[b], height=float(height)))
        # complete-linkage update: slot a becomes the merged cluster
        for c in active:
            if c != a and c != b:
                merged = max(work[a, c], work[b, c])
                work[a, c] = work[c, a] = merged
        node_id[a] = k + step
        min_leaf[a] = min(min_leaf[a], min_leaf[b])
        active.remove(b)
    return Dendrogram(n_leaves=k, merges=tuple(merges))


def cut(dend: Dendrogram, height: float) -> list[int]:
    """Flat clusters from merges with height <= the cut height.

    Returns one label per leaf. Clusters are numbered 1..m in order of
    their smallest member leaf id.
    """
    if height < 0:
        raise ValueError(f"cut height must be >= 0, got {height}")
    k = dend.n_leaves
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    # heights are non-decreasing, so merges below the cut form a prefix
    node_root = list(range(k))
    for m in dend.merges:
        if m.height > height:
            break
        ra, rb = find(node_root[m.left]), find(node_root[m.right])
        parent[rb] = ra
        node_root.append(ra)

    groups: dict[int, list[int]] = {}
    for leaf in range(k):
        groups.setdefault(find(leaf), []).append(leaf)
    ordered = sorted(groups.values(), key=min)
    labels = [0] * k
    for label, group in enumerate(ordered, start=1):
        for leaf in group:
            labels[leaf] = label
    return labels


def _newick_name(name: str) -> str:
    unsafe = set(" \t\n()[]{}:;,='\"")
    if any(ch in unsafe for ch in name) or not name:
        return "'" + name.replace("'", "''") + "'"
    return name


def export_newick(dend: Dendrogram, ids: list[str]) -> str:
    """Newick text with ultrametric branch lengths.

    Node elevations are half the merge heights, so the tree distance
    between two leaves equals the height of their first common merge.
    """
    k = dend.n_leaves
    if len(ids) != k:
        raise ValueError(f"expected {k} ids, got {len(ids)}")
    if k == 1:
        return f"{_newick_name(ids[0])};"

    elevation = [0.0] * k + [m.height / 2.0 for m in dend.merges]

    def render(node: int, parent_elev: float) -> str:
        length = parent_elev - elevation[node]
        if node < k:
            return f"{_newick_name(ids[node])}:{length!r}"
        m = dend.merges[node - k]
        inner = f"({render(m.left, elevation[node])},{render(m.right, elevation[node])})"
        return f"{inner}:{length!r}"

    root = k + len(dend.merges) - 1
    m = dend.merges[root - k]
    return f"({render(m.left, elevation[root])},{render(m.right, elevation[root])});"


def merges_to_json(dend: Dendrogram, ids: list[str]) -> dict:
    return {
        "ids": list(ids),
        "merges": [
            {"left": m.left, "right": m.right, "height": float(m.height)}
            for m in dend.merges
        ],
    }


def clusters_to_csv(ids: list[str], labels: list[int]) -> str:
    lines = ["player_id,cluster"]
    for pid, label in zip(ids, labels):
        lines.append(f"{pid},{label}")
    return "\n".join(lines) + "\n"
