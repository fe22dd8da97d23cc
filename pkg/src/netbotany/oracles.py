"""Exhaustive lattice oracles for the test and acceptance suites.

Everything here enumerates paths recursively and must stay independent of
the dynamic programs it is used to check.  Weights accumulate in row-major
order (which is path order for a single path), the package-wide
convention.
"""

import itertools


def all_paths(u, v):
    """Every monotone site sequence from u to v."""
    (x0, y0), (x1, y1) = u, v
    if x0 > x1 or y0 > y1:
        return []
    out = []

    def rec(x, y, acc):
        if (x, y) == (x1, y1):
            out.append(tuple(acc))
            return
        if x < x1:
            acc.append((x + 1, y))
            rec(x + 1, y, acc)
            acc.pop()
        if y < y1:
            acc.append((x, y + 1))
            rec(x, y + 1, acc)
            acc.pop()

    rec(x0, y0, [(x0, y0)])
    return out


def path_sum(weights, sites):
    total = 0.0
    for x, y in sites:
        total += weights[y, x]
    return total


def brute_passage(weights, u, v):
    return max(path_sum(weights, p) for p in all_paths(u, v))


def brute_geodesics(weights, u, v, slack=0.0):
    """(best value, set of argmax paths within slack)."""
    paths = all_paths(u, v)
    vals = [path_sum(weights, p) for p in paths]
    best = max(vals)
    return best, {p for p, val in zip(paths, vals) if val >= best - slack}


def _tuple_allowed(paths, x_vec, y_vec):
    """Cell-disjointness, sharing allowed only at coinciding endpoints."""
    k = len(paths)
    for i, j in itertools.combinations(range(k), 2):
        shared = set(paths[i]) & set(paths[j])
        allowed = set()
        if x_vec[i] == x_vec[j]:
            allowed.add(paths[i][0])
        if y_vec[i] == y_vec[j]:
            allowed.add(paths[i][-1])
        if shared - allowed:
            return False
    return True


def brute_disjoint(weights, x_vec, y_vec):
    """Best total over cell-disjoint path tuples.

    Environment weights are dyadic rationals (or integers), so per-path
    sums never round and totals may be added path by path.  Cell sets are
    packed into bit masks to keep pair scans cheap.
    """
    h, w = weights.shape
    k = len(x_vec)
    if k > 2:
        return _brute_disjoint_slow(weights, x_vec, y_vec)
    per_path = []
    for x, y in zip(x_vec, y_vec):
        entries = []
        for p in all_paths((x, 0), (y, h - 1)):
            mask = 0
            for cx, cy in p:
                mask |= 1 << (cy * w + cx)
            entries.append((mask, path_sum(weights, p)))
        per_path.append(entries)
    if k == 1:
        return max((s for _, s in per_path[0]), default=float("-inf"))
    allowed = 0
    if x_vec[0] == x_vec[1]:
        allowed |= 1 << (0 * w + x_vec[0])
    if y_vec[0] == y_vec[1]:
        allowed |= 1 << ((h - 1) * w + y_vec[0])
    best = float("-inf")
    for m1, s1 in per_path[0]:
        for m2, s2 in per_path[1]:
            if (m1 & m2) & ~allowed:
                continue
            total = s1 + s2
            if total > best:
                best = total
    return best


def _brute_disjoint_slow(weights, x_vec, y_vec):
    h = weights.shape[0]
    per_path = [
        all_paths((x, 0), (y, h - 1)) for x, y in zip(x_vec, y_vec)
    ]
    best = float("-inf")
    for combo in itertools.product(*per_path):
        if not _tuple_allowed(combo, x_vec, y_vec):
            continue
        total = sum(path_sum(weights, p) for p in combo)
        best = max(best, total)
    return best


def brute_line_value(ens, start, end):
    """Max telescoping weight over nonincreasing grid jump sequences."""
    x, n = start
    y, m = end
    ix, iy = ens.grid_index(x), ens.grid_index(y)
    lines = ens.lines
    best = float("-inf")
    # jump-off grid indices for lines n down to m+1, nondecreasing in time
    for taus in itertools.combinations_with_replacement(
        range(ix, iy + 1), n - m
    ):
        pi = {n + 1: ix, m: iy}
        for offset, i in enumerate(range(n, m, -1)):
            pi[i] = taus[offset]
        total = 0.0
        for i in range(m, n + 1):
            total += lines[i - 1, pi[i]] - lines[i - 1, pi[i + 1]]
        best = max(best, total)
    return best
