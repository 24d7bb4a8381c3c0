"""Independent oracles used to freeze expected values.

These deliberately avoid the production code paths: full-matrix DP for
edit distance, exhaustive valid-mapping search for tree edit distance,
and an unaccelerated quadruple loop for threshold selection.
"""

from fractions import Fraction
from itertools import combinations

from semdiff.surface import TreeNode


def levenshtein_dp(a: str, b: str) -> int:
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return table[n][m]


def _flatten(root: TreeNode):
    """Postorder labels plus transitive ancestor sets per postorder index."""
    labels: list[str] = []
    parent: list[int | None] = []

    def visit(node: TreeNode) -> int:
        child_indices = [visit(child) for child in node.children]
        index = len(labels)
        labels.append(node.kind)
        parent.append(None)
        for child_index in child_indices:
            parent[child_index] = index
        return index

    visit(root)
    ancestors = []
    for i in range(len(labels)):
        chain = set()
        p = parent[i]
        while p is not None:
            chain.add(p)
            p = parent[p]
        ancestors.append(chain)
    return labels, ancestors


def ted_mapping_oracle(t1: TreeNode, t2: TreeNode) -> int:
    """Minimum edit cost over all valid tree mappings (Tai conditions).

    Valid mappings preserve postorder order, so only sorted-to-sorted
    pairings need checking. Exponential; keep trees small.
    """
    labels1, anc1 = _flatten(t1)
    labels2, anc2 = _flatten(t2)
    n1, n2 = len(labels1), len(labels2)
    best = n1 + n2  # empty mapping: delete all, insert all
    for k in range(1, min(n1, n2) + 1):
        for s1 in combinations(range(n1), k):
            for s2 in combinations(range(n2), k):
                valid = True
                for a in range(k):
                    for b in range(a + 1, k):
                        i1, i2 = s1[a], s1[b]
                        j1, j2 = s2[a], s2[b]
                        if (i2 in anc1[i1]) != (j2 in anc2[j1]):
                            valid = False
                            break
                        # postorder already increasing; with ancestor
                        # agreement this pins the left-of relation too
                    if not valid:
                        break
                if not valid:
                    continue
                cost = (n1 - k) + (n2 - k)
                cost += sum(1 for a in range(k) if labels1[s1[a]] != labels2[s2[a]])
                best = min(best, cost)
    return best


def naive_select_thresholds(points, grid, metrics, flavor="absolute"):
    """Quadruple loop over grid values with per-record comparisons.

    ``points`` is a list of (x, y, {metric: score}). Returns
    ((ix1, ix2, iy1, iy2), Fraction objective) or None.
    """
    n = len(points)
    errors = {}
    for metric in metrics:
        per = []
        for x, y, scores in points:
            residual = Fraction(y) - Fraction(scores[metric])
            per.append(abs(residual) if flavor == "absolute" else residual ** 2)
        errors[metric] = per
    best = None
    best_obj = None
    g = len(grid)
    for a1 in range(g):
        for a2 in range(a1 + 1, g):
            for b1 in range(g):
                for b2 in range(b1 + 1, g):
                    x1, x2, y1, y2 = grid[a1], grid[a2], grid[b1], grid[b2]
                    dfs, sfd, ctrl = [], [], []
                    for idx, (x, y, _) in enumerate(points):
                        if x <= x1 and y >= y2:
                            dfs.append(idx)
                        elif x >= x2 and y <= y1:
                            sfd.append(idx)
                        else:
                            ctrl.append(idx)
                    if not dfs or not sfd or not ctrl:
                        continue
                    acc = Fraction(0)
                    for metric in metrics:
                        per = errors[metric]
                        ed = sum((per[i] for i in dfs), Fraction(0)) / len(dfs)
                        es = sum((per[i] for i in sfd), Fraction(0)) / len(sfd)
                        ec = sum((per[i] for i in ctrl), Fraction(0)) / len(ctrl)
                        acc += (ed - ec + es - ec) / 2
                    obj = acc / len(metrics)
                    if best_obj is None or obj > best_obj:
                        best_obj = obj
                        best = (a1, a2, b1, b2)
    if best is None:
        return None
    return best, best_obj
