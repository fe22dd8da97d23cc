"""Discrete last-passage environments, geodesics, and network extraction.

Conventions, fixed so that oracle comparisons are exact:

* Lattice sites are (x, y) = (column, row); row plays the role of time.
  Paths step +1 in one coordinate (up-right) and include both endpoints'
  weights.
* All dynamic programs accumulate weights in row-major (row, then column)
  order, which coincides with path order for a single path.  Exhaustive
  oracles that follow the same order therefore agree bit for bit, even
  for float weights.
* A horizontal run has zero time extent.  Network extraction treats
  branch sites joined by a purely horizontal chain as a single network
  vertex; without this, endpoint degrees would be capped at 2 by the two
  step directions of the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .layout import LatticeLayout, plan_layout
from .netgraph import NetworkGraph

__all__ = [
    "LppEnvironment",
    "LineEnsemble",
    "LatticePath",
    "GeodesicSet",
    "BudgetExceededError",
    "build_environment",
    "passage_value",
    "forward_table",
    "backward_table",
    "extremal_geodesic",
    "all_geodesics",
    "extract_network",
    "overlap_distance",
    "line_ensemble_value",
    "disjoint_passage_value",
    "difference_profile",
    "quadrangle_check",
    "d123_distance",
    "path_weight",
    "plant_fixture",
]


class BudgetExceededError(RuntimeError):
    """Geodesic enumeration exceeded the configured path budget."""


@dataclass(frozen=True)
class LppEnvironment:
    """Finite lattice of weights; weights[y, x] with row y as time."""

    weights: np.ndarray
    model: str
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2:
            raise ValueError("weights must be a 2d array")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "weights", w)
        w.setflags(write=False)

    @property
    def height(self) -> int:
        return self.weights.shape[0]

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    def replay_spec(self) -> dict:
        return {
            "model": self.model,
            "width": self.width,
            "height": self.height,
            "params": dict(self.params),
            "seed": self.seed,
        }


@dataclass(frozen=True)
class LineEnsemble:
    """k functions sampled on a shared grid; line index 1 is the top line."""

    grid: np.ndarray
    lines: np.ndarray  # shape (k, len(grid)); lines[i-1] is line i
    seed: int | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        lines = np.asarray(self.lines, dtype=np.float64)
        if lines.ndim != 2 or lines.shape[1] != grid.shape[0]:
            raise ValueError("lines must be shaped (k, len(grid))")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "lines", lines)

    @property
    def num_lines(self) -> int:
        return self.lines.shape[0]

    def grid_index(self, x: float) -> int:
        i = int(np.searchsorted(self.grid, x))
        if i >= len(self.grid) or self.grid[i] != x:
            raise ValueError(f"{x} is not a grid point")
        return i


# Continuous weights are rounded to this dyadic grid.  Every weight is then
# exactly representable and sums of up to ~2^26 of them never round, so
# path-weight comparisons, slack-0 geodesic sets, and the deterministic
# inequalities are exact in double precision.
WEIGHT_QUANTUM = 2.0 ** -26


def _dyadic(w: np.ndarray) -> np.ndarray:
    return np.round(w / WEIGHT_QUANTUM) * WEIGHT_QUANTUM


def build_environment(model: str, width: int, height: int, seed: int = 0,
                      **params):
    """Sample an environment; deterministic given (model, sizes, params, seed)."""
    if width < 1 or height < 1:
        raise ValueError("extents must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed, width, height]))
    if model == "exponential":
        w = _dyadic(rng.exponential(1.0, size=(height, width)))
    elif model == "geometric":
        q = params.setdefault("q", 0.5)
        if not 0 < q < 1:
            raise ValueError("geometric parameter q must be in (0, 1)")
        # P(w = j) = (1 - q) q^j on {0, 1, ...}
        w = rng.geometric(1.0 - q, size=(height, width)) - 1.0
    elif model == "deterministic":
        value = params.setdefault("value", 1.0)
        w = np.full((height, width), float(value))
    elif model == "line_ensemble":
        k = params.setdefault("lines", 2)
        step = params.setdefault("step", 1.0)
        grid = np.arange(width, dtype=np.float64) * step
        incr = _dyadic(rng.normal(0.0, np.sqrt(2.0 * step), size=(k, width - 1)))
        lines = np.concatenate(
            [np.zeros((k, 1)), np.cumsum(incr, axis=1)], axis=1
        )
        return LineEnsemble(grid, lines, seed=seed)
    else:
        raise ValueError(f"unknown environment model: {model!r}")
    return LppEnvironment(w, model, params, seed)


def _check_ordered(u, v):
    (x0, y0), (x1, y1) = u, v
    if x0 > x1 or y0 > y1:
        raise ValueError(f"endpoints must be ordered componentwise: {u} !<= {v}")


def forward_table(w: np.ndarray) -> np.ndarray:
    """F[y, x] = best weight of an up-right path from (0, 0) to (x, y).

    Computed along anti-diagonals so every entry accumulates exactly as a
    left-to-right path-order sum (no reassociation of float adds).
    """
    h, wd = w.shape
    F = np.empty_like(w)
    F[0, 0] = w[0, 0]
    for d in range(1, h + wd - 1):
        y0, y1 = max(0, d - wd + 1), min(h - 1, d)
        ys = np.arange(y0, y1 + 1)
        xs = d - ys
        up = np.where(ys >= 1, F[np.maximum(ys - 1, 0), xs], -np.inf)
        left = np.where(xs >= 1, F[ys, np.maximum(xs - 1, 0)], -np.inf)
        F[ys, xs] = np.maximum(up, left) + w[ys, xs]
    return F


def backward_table(w: np.ndarray) -> np.ndarray:
    """B[y, x] = best weight of a path from (x, y) to the top-right corner."""
    return forward_table(w[::-1, ::-1])[::-1, ::-1]


def passage_value(env: LppEnvironment, u, v) -> float:
    """Maximum path weight from u to v, both endpoints included."""
    _check_ordered(u, v)
    (x0, y0), (x1, y1) = u, v
    sub = env.weights[y0:y1 + 1, x0:x1 + 1]
    return float(forward_table(sub)[-1, -1])


@dataclass(frozen=True)
class LatticePath:
    """Monotone up-right site sequence, endpoints included."""

    sites: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for (x0, y0), (x1, y1) in zip(self.sites, self.sites[1:]):
            if (x1 - x0, y1 - y0) not in ((1, 0), (0, 1)):
                raise ValueError("path steps must be +1 in one coordinate")

    @property
    def start(self) -> tuple[int, int]:
        return self.sites[0]

    @property
    def end(self) -> tuple[int, int]:
        return self.sites[-1]

    def columns_by_row(self) -> dict[int, tuple[int, int]]:
        """Row -> (leftmost, rightmost) column of the path on that row."""
        cols: dict[int, tuple[int, int]] = {}
        for x, y in self.sites:
            lo, hi = cols.get(y, (x, x))
            cols[y] = (min(lo, x), max(hi, x))
        return cols

    def max_column_by_row(self) -> dict[int, int]:
        return {r: hi for r, (_, hi) in self.columns_by_row().items()}


def path_weight(env: LppEnvironment, path: LatticePath) -> float:
    """Weight accumulated in path order (matches the DP convention)."""
    total = 0.0
    for x, y in path.sites:
        total += env.weights[y, x]
    return float(total)


@dataclass(frozen=True)
class GeodesicSet:
    endpoints: tuple[tuple[int, int], tuple[int, int]]
    max_weight: float
    paths: tuple[LatticePath, ...]
    slack: float


def extremal_geodesic(env: LppEnvironment, u, v, side: str) -> LatticePath:
    """Leftmost or rightmost optimal path via tie-broken backtracking.

    Leftmost prefers the horizontal predecessor while backtracking,
    rightmost the vertical one.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    _check_ordered(u, v)
    (x0, y0), (x1, y1) = u, v
    w = env.weights[y0:y1 + 1, x0:x1 + 1]
    F = forward_table(w)
    x, y = x1 - x0, y1 - y0
    rev = [(x, y)]
    while (x, y) != (0, 0):
        horiz = x >= 1 and F[y, x - 1] + w[y, x] == F[y, x]
        vert = y >= 1 and F[y - 1, x] + w[y, x] == F[y, x]
        if side == "left":
            x, y = (x - 1, y) if horiz else (x, y - 1)
        else:
            x, y = (x, y - 1) if vert else (x - 1, y)
        rev.append((x, y))
    return LatticePath(tuple((x + x0, y + y0) for x, y in reversed(rev)))


def all_geodesics(env: LppEnvironment, u, v, slack: float = 0.0,
                  budget: int = 100_000) -> GeodesicSet:
    """Every path with weight >= optimum - slack, by deficit backtracking.

    An edge into a cell carries deficit F[cell] - (F[pred] + w[cell]) >= 0;
    a path is within slack exactly when its deficits sum to at most slack.
    With slack 0 only exact argmax edges are walked, which matches
    exhaustive enumeration bit for bit.
    """
    _check_ordered(u, v)
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    (x0, y0), (x1, y1) = u, v
    w = env.weights[y0:y1 + 1, x0:x1 + 1]
    F = forward_table(w)
    goal_x, goal_y = x1 - x0, y1 - y0
    found: list[LatticePath] = []
    stack: list[tuple[int, int]] = [(goal_x, goal_y)]

    def walk(x, y, remaining):
        if (x, y) == (0, 0):
            if len(found) >= budget:
                raise BudgetExceededError(
                    f"more than {budget} paths within slack {slack}"
                )
            found.append(
                LatticePath(tuple((a + x0, b + y0) for a, b in reversed(stack)))
            )
            return
        if x >= 1:
            deficit = F[y, x] - (F[y, x - 1] + w[y, x])
            if deficit <= remaining:
                stack.append((x - 1, y))
                walk(x - 1, y, remaining - deficit)
                stack.pop()
        if y >= 1:
            deficit = F[y, x] - (F[y - 1, x] + w[y, x])
            if deficit <= remaining:
                stack.append((x, y - 1))
                walk(x, y - 1, remaining - deficit)
                stack.pop()

    walk(goal_x, goal_y, float(slack))
    return GeodesicSet((tuple(u), tuple(v)), float(F[goal_y, goal_x]),
                       tuple(found), float(slack))


def extract_network(gs: GeodesicSet) -> NetworkGraph:
    """Contract the union of the stored paths to its network graph.

    Vertices are the endpoints plus sites where the union branches or
    merges; branch-free chains contract to edges; chains with no vertical
    step have zero time extent, so their endpoints collapse into a single
    network vertex.
    """
    if not gs.paths:
        raise ValueError("empty geodesic set")
    u = gs.paths[0].start
    v = gs.paths[0].end
    if u[1] == v[1]:
        raise ValueError("degenerate geodesic set: endpoints at equal time")
    out_adj: dict[tuple[int, int], set] = {}
    in_adj: dict[tuple[int, int], set] = {}
    for p in gs.paths:
        if p.start != u or p.end != v:
            raise ValueError("paths must share both endpoints")
        for a, b in zip(p.sites, p.sites[1:]):
            out_adj.setdefault(a, set()).add(b)
            in_adj.setdefault(b, set()).add(a)
    branch = {
        s
        for s in set(out_adj) | set(in_adj)
        if len(out_adj.get(s, ())) > 1 or len(in_adj.get(s, ())) > 1
    }
    branch |= {u, v}

    # contract branch-free chains
    chains = []  # (tail site, head site, has_vertical)
    for a in sorted(branch):
        for s in sorted(out_adj.get(a, ())):
            cur, prev = s, a
            vertical = cur[1] != prev[1]
            while cur not in branch:
                nxt = next(iter(out_adj[cur]))
                vertical = vertical or nxt[1] != cur[1]
                prev, cur = cur, nxt
            chains.append((a, cur, vertical))

    # zero-duration chains join their endpoints into one vertex
    parent = {s: s for s in branch}

    def find(s):
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    for a, b, vertical in chains:
        if not vertical:
            parent[find(a)] = find(b)

    classes = sorted({find(s) for s in branch})
    ids = {c: i for i, c in enumerate(classes)}
    edges = tuple(
        (ids[find(a)], ids[find(b)]) for a, b, vertical in chains if vertical
    )
    return NetworkGraph(
        tuple(range(len(classes))), ids[find(u)], ids[find(v)], edges
    )


def overlap_distance(a: LatticePath, b: LatticePath) -> float:
    """Domain lengths minus twice the overlap measure (row = unit time).

    Two paths agree at a row when they occupy the same column interval
    there; the overlap measure counts unit time intervals where both rows
    agree.
    """
    ca, cb = a.columns_by_row(), b.columns_by_row()
    la = a.end[1] - a.start[1]
    lb = b.end[1] - b.start[1]
    agree = {r for r in ca.keys() & cb.keys() if ca[r] == cb[r]}
    measure = sum(1 for r in agree if r + 1 in agree)
    return float(la + lb - 2 * measure)


def line_ensemble_value(ens: LineEnsemble, start, end) -> float:
    """Best telescoping weight over nonincreasing jump paths on the grid.

    start = (x, n) on line n, end = (y, m) on line m with x <= y, m <= n;
    a path jumps downward through lines m..n at grid times.
    """
    x, n = start
    y, m = end
    if not (1 <= m <= n <= ens.num_lines):
        raise ValueError("line indices out of range")
    ix, iy = ens.grid_index(x), ens.grid_index(y)
    if ix > iy:
        raise ValueError("start time must not exceed end time")
    lines = ens.lines  # lines[i-1] = line i
    V = {j: 0.0 for j in range(m, n + 1)}
    for t in range(ix + 1, iy + 1):
        stay = {
            j: V[j] + (lines[j - 1, t] - lines[j - 1, t - 1])
            for j in range(m, n + 1)
        }
        for j in range(n, m - 1, -1):
            best = stay[j]
            if j + 1 <= n and V[j + 1] > best:
                best = V[j + 1]
            V[j] = best
        # jumps at time t happen after the increment is collected
        for j in range(n - 1, m - 1, -1):
            if V[j + 1] > V[j]:
                V[j] = V[j + 1]
    return float(V[m])


def _intervals_ok(starts, ends, shared_left=None, shared_right=None):
    """Row intervals [starts[i], ends[i]] must be pairwise disjoint; a
    shared cell is allowed only at designated equal endpoints."""
    k = len(starts)
    for i in range(k - 1):
        if ends[i] < starts[i + 1]:
            continue
        if (
            shared_left is not None
            and shared_left[i] == shared_left[i + 1]
            and ends[i] == starts[i] == starts[i + 1]
        ):
            continue
        if (
            shared_right is not None
            and shared_right[i] == shared_right[i + 1]
            and starts[i + 1] == ends[i + 1] == ends[i]
        ):
            continue
        return False
    return True


def disjoint_passage_value(env, x_vec, y_vec) -> float:
    """Best total weight of k cell-disjoint up-right paths.

    Path i runs from (x_vec[i], 0) to (y_vec[i], top row); paths may share
    a cell only where their prescribed endpoints coincide.  Weight totals
    accumulate in row-major order, matching the single-path convention.
    For a line ensemble with equal start points this is the staggered
    top-k value from (x, line i) to (y_vec[i], line 1).
    """
    if isinstance(env, LineEnsemble):
        return _line_disjoint_value(env, x_vec, y_vec)
    x_vec = list(x_vec)
    y_vec = list(y_vec)
    if len(x_vec) != len(y_vec):
        raise ValueError("start and end vectors must have equal length")
    if sorted(x_vec) != x_vec or sorted(y_vec) != y_vec:
        raise ValueError("endpoint vectors must be weakly ordered")
    k = len(x_vec)
    if k == 1:
        if x_vec[0] > y_vec[0]:
            return float("-inf")  # no monotone path: empty supremum
        return passage_value(env, (x_vec[0], 0), (y_vec[0], env.height - 1))
    w = env.weights
    h = env.height

    def row_sum(base, row, starts, ends):
        total = base
        for s, e in zip(starts, ends):
            for c in range(s, e + 1):
                total += w[row, c]
        return total

    def states_after(row, starts, shared_left, shared_right):
        """All strictly increasing step-up column tuples c with c_i >= starts_i."""
        res = []

        def rec(i, prev, acc):
            if i == len(starts):
                if _intervals_ok(starts, acc, shared_left, shared_right):
                    res.append(tuple(acc))
                return
            lo = max(starts[i], prev + 1)
            for c in range(lo, env.width):
                acc.append(c)
                rec(i + 1, c, acc)
                acc.pop()

        rec(0, -1, [])
        return res

    # row 0
    frontier: dict[tuple, float] = {}
    if h == 1:
        if all(x <= y for x, y in zip(x_vec, y_vec)) and _intervals_ok(
            x_vec, y_vec, shared_left=x_vec, shared_right=y_vec
        ):
            return row_sum(0.0, 0, x_vec, y_vec)
        return float("-inf")
    for c in states_after(0, x_vec, x_vec, None):
        val = row_sum(0.0, 0, x_vec, c)
        if val > frontier.get(c, float("-inf")):
            frontier[c] = val
    # interior rows
    for row in range(1, h - 1):
        nxt: dict[tuple, float] = {}
        for c, base in frontier.items():
            for c2 in states_after(row, list(c), None, None):
                val = row_sum(base, row, c, c2)
                if val > nxt.get(c2, float("-inf")):
                    nxt[c2] = val
        frontier = nxt
    # top row: intervals [c_i, y_i]
    best = float("-inf")
    for c, base in frontier.items():
        if all(ci <= yi for ci, yi in zip(c, y_vec)) and _intervals_ok(
            list(c), y_vec, None, y_vec
        ):
            val = row_sum(base, h - 1, c, y_vec)
            best = max(best, val)
    return float(best)


def _line_disjoint_value(ens: LineEnsemble, x_vec, y_vec) -> float:
    """Disjoint k-tuple value across a line ensemble from a common start.

    Paths start stacked on lines 1..k at the shared time x and end at
    (y_vec[i], line 1); path i stays strictly between its neighbours, so
    the tuple only ever uses the top k lines.
    """
    x_vec = list(x_vec)
    y_vec = list(y_vec)
    k = len(x_vec)
    if len(set(x_vec)) != 1:
        raise ValueError("line-ensemble disjoint value needs equal starts")
    if sorted(y_vec) != y_vec:
        raise ValueError("end vector must be weakly ordered")
    if k > ens.num_lines:
        raise ValueError("more paths than lines")
    x = x_vec[0]
    ix = ens.grid_index(x)
    iy = [ens.grid_index(y) for y in y_vec]
    if any(i < ix for i in iy):
        raise ValueError("ends must not precede the start")
    lines = ens.lines

    # state: lines currently occupied by the still-active paths (strictly
    # increasing tuple; path j sits on state[j]); finished paths drop out.
    start_state = tuple(range(1, k + 1))
    frontier = {start_state: 0.0}
    done = 0
    value = 0.0
    for t in range(ix, max(iy) + 1):
        # collect increments for time step (t-1, t]
        if t > ix:
            nxt: dict[tuple, float] = {}
            for state, val in frontier.items():
                gain = sum(
                    lines[j - 1, t] - lines[j - 1, t - 1] for j in state
                )
                nxt[state] = max(nxt.get(state, float("-inf")), val + gain)
            frontier = nxt
        # downward jumps at time t (any path, any number of lines, keeping
        # the strict ordering)
        frontier = _jump_closure(frontier)
        # paths finish in order; path index done finishes at time iy[done]
        while done < k and iy[done] == t:
            nxt = {}
            for state, val in frontier.items():
                if state and state[0] == 1:
                    rest = state[1:]
                    nxt[rest] = max(nxt.get(rest, float("-inf")), val)
            frontier = nxt
            done += 1
            if not frontier:
                return float("-inf")
    (empty_val,) = frontier.values()
    return float(empty_val)


def _jump_closure(frontier):
    """Close a state-value map under single downward line jumps."""
    best = dict(frontier)
    stack = list(frontier.items())
    while stack:
        state, val = stack.pop()
        for idx, j in enumerate(state):
            lower = j - 1
            if lower >= 1 and (idx == 0 or state[idx - 1] < lower):
                ns = state[:idx] + (lower,) + state[idx + 1:]
                if val > best.get(ns, float("-inf")):
                    best[ns] = val
                    stack.append((ns, val))
    return best


def difference_profile(env: LppEnvironment, x1: int, x2: int, t_row: int,
                       s_row: int):
    """F(y) = L((y,s) -> (x1,t)) - L((y,s) -> (x2,t)) for every column y.

    Nonincreasing in y by the quadrangle inequality, which is a
    deterministic fact of planar last passage.
    """
    if not (0 <= s_row < t_row < env.height):
        raise ValueError("rows must satisfy 0 <= s_row < t_row < height")
    if not (0 <= x1 < x2 < env.width):
        raise ValueError("columns must satisfy 0 <= x1 < x2 < width")
    sub1 = env.weights[s_row:t_row + 1, : x1 + 1]
    sub2 = env.weights[s_row:t_row + 1, : x2 + 1]
    b1 = backward_table(sub1)[0, : x1 + 1]
    b2 = backward_table(sub2)[0, : x1 + 1]
    ys = np.arange(x1 + 1)
    return ys, b1 - b2


def quadrangle_check(env: LppEnvironment, x1, x2, y1, y2, s_row, t_row) -> bool:
    """L(x1;y2) + L(x2;y1) <= L(x1;y1) + L(x2;y2) for ordered arguments."""
    if not (x1 <= x2 and y1 <= y2 and s_row < t_row):
        raise ValueError("arguments must be ordered")
    f1 = forward_table(env.weights[s_row:t_row + 1, x1:])
    f2 = forward_table(env.weights[s_row:t_row + 1, x2:])
    top = t_row - s_row
    l11, l12 = f1[top, y1 - x1], f1[top, y2 - x1]
    l21, l22 = f2[top, y1 - x2], f2[top, y2 - x2]
    return bool(l12 + l21 <= l11 + l22)


def d123_distance(u, v) -> float:
    """KPZ-scaled distance: cube-root time gaps, square-root space gaps.

    Accepts planar points (x, s) or space-time pairs (x, s, y, t).
    """
    u, v = tuple(u), tuple(v)
    if len(u) != len(v):
        raise ValueError("points must have equal dimension")
    if len(u) == 2:
        (x, s), (xp, sp) = u, v
        return abs(s - sp) ** (1 / 3) + abs(x - xp) ** (1 / 2)
    if len(u) == 4:
        (x, s, y, t), (xp, sp, yp, tp) = u, v
        return (
            abs(t - tp) ** (1 / 3)
            + abs(s - sp) ** (1 / 3)
            + abs(x - xp) ** (1 / 2)
            + abs(y - yp) ** (1 / 2)
        )
    raise ValueError("points must be planar pairs or space-time quadruples")


def plant_fixture(g: NetworkGraph, layout: LatticeLayout | None = None):
    """Deterministic environment whose geodesic set realizes g.

    The lattice drawing of g is scaled by two so parallel structure is
    separated, union cells get weight 0 and all other cells weight -1:
    the optimal paths are then exactly the drawing's routes.  Returns
    (environment, u, v).
    """
    if layout is None:
        layout = plan_layout(g)
    scaled = LatticeLayout(
        layout.graph,
        {v: 2 * r for v, r in layout.row.items()},
        {e: 2 * lane for e, lane in layout.lane.items()},
    )
    routes = scaled.edge_paths()
    paths = [scaled.route_sites(r) for r in routes]
    width = 1 + max(x for p in paths for x, _ in p)
    height = 1 + max(y for p in paths for _, y in p)
    w = np.full((height, width), -1.0)
    for p in paths:
        for x, y in p:
            w[y, x] = 0.0
    env = LppEnvironment(w, "deterministic", {"fixture": True}, None)
    return env, paths[0][0], paths[0][-1]
