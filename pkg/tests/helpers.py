"""Independent oracles used by the test suite.

Everything here is deliberately written against the definitions, not
against the library code paths it checks.
"""

import itertools
import math

import numpy as np


def pearson_direct(x, y):
    """Direct evaluation of the product-moment formula."""
    x = list(map(float, x))
    y = list(map(float, y))
    mx = sum(x) / len(x)
    my = sum(y) / len(y)
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    den = math.sqrt(
        sum((a - mx) ** 2 for a in x) * sum((b - my) ** 2 for b in y)
    )
    return num / den


def condensed_to_square(n, values):
    sq = np.zeros((n, n))
    it = iter(values)
    for i in range(n):
        for j in range(i + 1, n):
            sq[i, j] = sq[j, i] = next(it)
    return sq


def brute_average_linkage_heights(n, condensed):
    """Hand-rolled agglomeration keeping explicit member lists; the
    inter-cluster distance is recomputed from scratch as the mean over
    all cross pairs rather than via the incremental update."""
    sq = condensed_to_square(n, condensed)
    clusters = [[i] for i in range(n)]
    heights = []
    while len(clusters) > 1:
        best = None
        for a, b in itertools.combinations(range(len(clusters)), 2):
            d = np.mean([sq[i, j] for i in clusters[a] for j in clusters[b]])
            if best is None or d < best[0]:
                best = (d, a, b)
        d, a, b = best
        heights.append(d)
        merged = clusters[a] + clusters[b]
        clusters = [c for k, c in enumerate(clusters) if k not in (a, b)]
        clusters.append(merged)
    return heights


def random_ultrametric(rng, n):
    """Condensed ultrametric distances from a random binary tree with
    strictly increasing merge heights."""
    members = [[i] for i in range(n)]
    sq = np.zeros((n, n))
    height = 0.0
    while len(members) > 1:
        height += rng.uniform(0.5, 2.0)
        a, b = sorted(rng.choice(len(members), size=2, replace=False))
        for i in members[a]:
            for j in members[b]:
                sq[i, j] = sq[j, i] = height
        merged = members[a] + members[b]
        members = [m for k, m in enumerate(members) if k not in (a, b)]
        members.append(merged)
    return sq[np.triu_indices(n, k=1)]


def parse_newick(text):
    """Tiny Newick reader; returns (children, branch_length, label)
    nested tuples for path-length checks."""
    pos = 0

    def node():
        nonlocal pos
        children = []
        if text[pos] == "(":
            pos += 1
            children.append(node())
            while text[pos] == ",":
                pos += 1
                children.append(node())
            assert text[pos] == ")"
            pos += 1
        start = pos
        while text[pos] not in "(),:;":
            pos += 1
        label = text[start:pos]
        branch = 0.0
        if text[pos] == ":":
            pos += 1
            start = pos
            while text[pos] not in "(),:;":
                pos += 1
            branch = float(text[start:pos])
        return (children, branch, label)

    tree = node()
    assert text[pos] == ";"
    return tree


def newick_leaf_depths(tree):
    """Map leaf label -> total branch length from the root."""
    depths = {}

    def walk(node, acc):
        children, branch, label = node
        acc = acc + branch
        if not children:
            depths[label] = acc
        for ch in children:
            walk(ch, acc)

    walk(tree, 0.0)
    return depths


def newick_path_lengths(text, labels):
    """Leaf-to-leaf path lengths implied by a Newick string."""
    tree = parse_newick(text)
    depths = newick_leaf_depths(tree)

    def leaves(node):
        children, _, label = node
        if not children:
            return {label}
        return set().union(*(leaves(c) for c in children))

    def lca_depth(node, acc, a, b):
        children, branch, _ = node
        acc = acc + branch
        for ch in children:
            under = leaves(ch)
            if a in under and b in under:
                return lca_depth(ch, acc, a, b)
        return acc

    paths = {}
    for a, b in itertools.combinations(labels, 2):
        d = lca_depth(tree, 0.0, a, b)
        paths[(a, b)] = depths[a] + depths[b] - 2 * d
    return paths


def ks_d_direct(a, b):
    """sup over thresholds of |ECDF_a - ECDF_b|, via explicit ECDFs."""
    a, b = sorted(a), sorted(b)
    best = 0.0
    for t in a + b:
        fa = sum(v <= t for v in a) / len(a)
        fb = sum(v <= t for v in b) / len(b)
        best = max(best, abs(fa - fb))
    return best


def ks_d_plus_direct(a, b):
    a, b = sorted(a), sorted(b)
    best = 0.0
    for t in a + b:
        fa = sum(v <= t for v in a) / len(a)
        fb = sum(v <= t for v in b) / len(b)
        best = max(best, fa - fb)
    return best


def ks_exact_p_enumeration(a, b, one_sided=False):
    """Permutation p-value by explicit enumeration of every assignment
    of pooled values to the first sample."""
    pooled = list(a) + list(b)
    n = len(a)
    stat = ks_d_plus_direct(a, b) if one_sided else ks_d_direct(a, b)
    count = 0
    total = 0
    for picks in itertools.combinations(range(len(pooled)), n):
        sa = [pooled[i] for i in picks]
        sb = [pooled[i] for i in range(len(pooled)) if i not in picks]
        s = ks_d_plus_direct(sa, sb) if one_sided else ks_d_direct(sa, sb)
        count += s >= stat - 1e-12
        total += 1
    return count / total


def two_country_shock_oracle(y_u, y_w, x, p, s, tol=1e-10):
    """Scalar recurrence for the symmetric two-country system: each
    country's growth factor responds to the other's previous growth
    factor. Returns (epicenter series, partner series)."""
    del x  # exports telescope to GDP ratios for this symmetric system
    us = [y_u, y_u * (1 - s)]
    ws = [y_w, y_w]
    while True:
        ru = us[-1] / us[-2]
        rw = ws[-1] / ws[-2]
        us.append(us[-1] * (1 + p * (rw - 1)))
        ws.append(ws[-1] * (1 + p * (ru - 1)))
        if (abs(us[-1] - us[-2]) / us[-2] < tol
                and abs(ws[-1] - ws[-2]) / ws[-2] < tol):
            return us, ws
