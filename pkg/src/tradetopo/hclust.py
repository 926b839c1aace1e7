"""Average-linkage agglomerative clustering and dendrogram utilities.

Node ids: leaves are 0..n-1, the k-th merge creates node n+k. Merge
heights are nondecreasing (average linkage admits no inversions).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadK, BadLabel, SizeMismatch, TooFewCountries, TooFewItems

NEWICK_METACHARS = set("(),:;")


@dataclass(frozen=True)
class CondensedDistances:
    """Upper triangle of a symmetric distance matrix, row-major over
    pairs (i, j) with i < j."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        expected = self.n * (self.n - 1) // 2
        if values.shape != (expected,):
            raise SizeMismatch(
                f"expected {expected} condensed entries for n={self.n}, "
                f"got {values.shape}"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("distances must be finite and nonnegative")

    def index(self, i, j):
        if i > j:
            i, j = j, i
        return i * self.n - i * (i + 1) // 2 + (j - i - 1)

    def __getitem__(self, pair):
        return self.values[self.index(*pair)]

    def as_square(self) -> np.ndarray:
        sq = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, k=1)
        sq[iu] = self.values
        return sq + sq.T


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    n_leaves: int
    merges: tuple[Merge, ...]

    def __post_init__(self):
        object.__setattr__(self, "merges", tuple(self.merges))
        n = self.n_leaves
        if len(self.merges) != n - 1:
            raise ValueError(f"expected {n - 1} merges, got {len(self.merges)}")
        used = set()
        for k, m in enumerate(self.merges):
            for child in (m.left, m.right):
                if not 0 <= child < n + k or child in used:
                    raise ValueError(f"bad child id {child} in merge {k}")
                used.add(child)
        if self.merges and self.merges[-1].size != n:
            raise ValueError("final merge must contain all leaves")

    @property
    def root(self) -> int:
        return 2 * self.n_leaves - 2

    def node_height(self, node) -> float:
        if node < self.n_leaves:
            return 0.0
        return self.merges[node - self.n_leaves].height

    def children(self, node):
        m = self.merges[node - self.n_leaves]
        return m.left, m.right


def distances_from_network(net) -> CondensedDistances:
    """d_ij = M* - M_ij with M* the maximum off-diagonal entry of this
    year's trade matrix; the closest pair sits at distance exactly 0."""
    n = net.n
    if n < 2:
        raise TooFewCountries(f"need at least 2 countries, got {n}")
    iu = np.triu_indices(n, k=1)
    upper = net.m[iu]
    return CondensedDistances(n=n, values=upper.max() - upper)


def average_linkage(d: CondensedDistances) -> Dendrogram:
    """UPGMA-style agglomeration with the unweighted Lance-Williams
    update; ties broken on the lexicographically smallest id pair."""
    n = d.n
    if n < 2:
        raise TooFewItems(f"need at least 2 items, got {n}")
    # dist is indexed by active slot; ids map slots to node ids
    dist = d.as_square()
    np.fill_diagonal(dist, np.inf)
    ids = list(range(n))
    sizes = [1] * n
    merges = []
    for k in range(n - 1):
        height = dist.min()
        best = None
        for a, b in zip(*np.where(dist == height)):
            if a >= b:
                continue
            i, j = ids[a], ids[b]
            if i > j:
                i, j = j, i
            if best is None or (i, j) < best[0]:
                best = ((i, j), a, b)
        (left, right), a, b = best
        height = float(height)
        new_size = sizes[a] + sizes[b]
        # unweighted average update into slot a, then drop slot b
        row = (sizes[a] * dist[a] + sizes[b] * dist[b]) / new_size
        dist[a], dist[:, a] = row, row
        dist[a, a] = np.inf
        dist = np.delete(np.delete(dist, b, axis=0), b, axis=1)
        ids[a] = n + k
        sizes[a] = new_size
        del ids[b], sizes[b]
        merges.append(Merge(left=left, right=right, height=height, size=new_size))
    return Dendrogram(n_leaves=n, merges=tuple(merges))


def cophenetic(dend: Dendrogram) -> CondensedDistances:
    """c_ij = height of the lowest merge whose cluster contains both
    leaves; one pass over the merges."""
    n = dend.n_leaves
    members: list[list[int]] = [[i] for i in range(n)]
    values = np.zeros(n * (n - 1) // 2)
    out = CondensedDistances(n=n, values=values)
    for m in dend.merges:
        left, right = members[m.left], members[m.right]
        for i in left:
            for j in right:
                values[out.index(i, j)] = m.height
        members.append(left + right)
    return CondensedDistances(n=n, values=values)


def _min_leaf(dend: Dendrogram) -> list[int]:
    mins = list(range(dend.n_leaves))
    for m in dend.merges:
        mins.append(min(mins[m.left], mins[m.right]))
    return mins


def _ordered_children(dend, node, mins):
    left, right = dend.children(node)
    if mins[left] <= mins[right]:
        return left, right
    return right, left


def leaf_order(dend: Dendrogram) -> list[int]:
    """Left-to-right leaf sequence from a depth-first traversal; the
    child whose subtree holds the smallest leaf id is visited first."""
    if dend.n_leaves == 1:
        return [0]
    mins = _min_leaf(dend)
    order = []
    stack = [dend.root]
    while stack:
        node = stack.pop()
        if node < dend.n_leaves:
            order.append(node)
        else:
            first, second = _ordered_children(dend, node, mins)
            stack.append(second)
            stack.append(first)
    return order


def to_newick(dend: Dendrogram, labels) -> str:
    """Rooted Newick string whose leaf-to-leaf path lengths reproduce
    cophenetic distances: every node sits at depth
    (root_height - node_height) / 2."""
    labels = list(labels)
    if len(labels) != dend.n_leaves:
        raise SizeMismatch(
            f"{len(labels)} labels for {dend.n_leaves} leaves"
        )
    for lab in labels:
        if NEWICK_METACHARS & set(lab):
            raise BadLabel(f"label {lab!r} contains Newick metacharacters")
    mins = _min_leaf(dend)

    def render(node, parent_height):
        height = dend.node_height(node)
        if node < dend.n_leaves:
            body = labels[node]
        else:
            first, second = _ordered_children(dend, node, mins)
            body = f"({render(first, height)},{render(second, height)})"
        if parent_height is None:
            return body
        branch = (parent_height - height) / 2.0
        return f"{body}:{branch:.12g}"

    return render(dend.root, None) + ";"


def cut_at_count(dend: Dendrogram, k: int) -> list[int]:
    """Cluster assignment (1..k) from undoing the last k-1 merges;
    labels follow leaf_order of first appearance."""
    n = dend.n_leaves
    if not 1 <= k <= n:
        raise BadK(f"k must be in 1..{n}, got {k}")
    parent = list(range(2 * n - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for idx, m in enumerate(dend.merges[: n - k]):
        new = n + idx
        parent[find(m.left)] = new
        parent[find(m.right)] = new
    labels = {}
    assignment = [0] * n
    for leaf in leaf_order(dend):
        root = find(leaf)
        if root not in labels:
            labels[root] = len(labels) + 1
        assignment[leaf] = labels[root]
    return assignment
