"""Nonintersecting Brownian bridges and near-maximizer statistics.

All Brownian motions and bridges carry diffusion parameter 2, the KPZ
convention, so the transition kernel over time t is a Gaussian with
variance 2t.  The determinant formula gives the exact nonintersection
probability of a bridge tuple; the Monte Carlo estimator samples bridges
on a grid and applies the between-grid crossing correction for each
adjacent pair (the difference of two bridges diffuses at rate 4, so a
step from gaps g0 to g1 over time h crosses zero with probability
exp(-g0*g1/(2h))).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BridgeEnsemble",
    "sample_bridges",
    "km_nonintersection_prob",
    "mc_nonintersection_prob",
    "near_max_multiplicity",
    "sample_brownian_paths",
    "near_max_tail_probability",
    "near_max_exponent_experiment",
]

DIFFUSION = 2.0


@dataclass(frozen=True)
class BridgeEnsemble:
    """k bridges sampled on a common grid; paths[i] runs from x[i] to y[i]."""

    interval: tuple[float, float]
    times: np.ndarray
    paths: np.ndarray  # shape (k, len(times))
    seed: int | None = None
    diffusion: float = DIFFUSION

    @property
    def k(self) -> int:
        return self.paths.shape[0]

    def is_ordered_at_grid_times(self) -> bool:
        return bool(np.all(np.diff(self.paths, axis=0) < 0))


def _bridge_batch(rng, x, y, a, b, n_steps, n_batch):
    """Exact sequential sampling of independent diffusion-2 bridges.

    Returns an array (n_batch, k, n_steps + 1); column j holds the value at
    time a + j*h.  x, y are length-k endpoint vectors.
    """
    k = len(x)
    h = (b - a) / n_steps
    out = np.empty((n_batch, k, n_steps + 1))
    out[:, :, 0] = x
    cur = np.broadcast_to(np.asarray(x, dtype=float), (n_batch, k)).copy()
    for j in range(1, n_steps + 1):
        remaining = (b - a) - (j - 1) * h
        mean = cur + (np.asarray(y) - cur) * (h / remaining)
        var = DIFFUSION * h * (remaining - h) / remaining
        if var > 0:
            cur = mean + rng.normal(0.0, np.sqrt(var), size=(n_batch, k))
        else:
            cur = mean
        out[:, :, j] = cur
    out[:, :, -1] = y
    return out


def sample_bridges(k, interval, x, y, step, seed=0) -> BridgeEnsemble:
    """Sample k independent bridges from (a, x) to (b, y) on a step grid."""
    a, b = interval
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != k or len(y) != k:
        raise ValueError("endpoint vectors must have length k")
    if b <= a:
        raise ValueError("interval must have positive length")
    n_steps = round((b - a) / step)
    if n_steps < 1 or abs(n_steps * step - (b - a)) > 1e-9 * (b - a):
        raise ValueError("step must divide the interval length")
    rng = np.random.default_rng(np.random.SeedSequence([seed, k, n_steps]))
    paths = _bridge_batch(rng, x, y, a, b, n_steps, 1)[0]
    times = a + np.arange(n_steps + 1) * step
    return BridgeEnsemble((a, b), times, paths, seed=seed)


def _transition_matrix(x, y, duration):
    """Row-scaled kernel matrix whose determinant is the KM probability."""
    x = np.asarray(x, dtype=float)[:, None]
    y = np.asarray(y, dtype=float)[None, :]
    # p_t(x_i, y_j) / p_t(x_i, y_i): the Gaussian prefactors cancel
    kernel = np.exp(-((y - x) ** 2) / (4.0 * duration))
    return kernel / np.diagonal(kernel)[:, None]


def km_nonintersection_prob(x, y, duration, return_details=False):
    """det(p_t(x_i, y_j)) / prod p_t(x_i, y_i): the probability that the
    bridge tuple from x to y over the given duration never intersects.

    Inputs must be strictly decreasing.  The result is clipped to [0, 1];
    the condition number of the scaled kernel matrix is available through
    return_details for the nearly-degenerate regime.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1d vectors of equal length")
    if np.any(np.diff(x) >= 0) or np.any(np.diff(y) >= 0):
        raise ValueError("endpoint vectors must be strictly decreasing")
    if duration <= 0:
        raise ValueError("duration must be positive")
    if len(x) == 1:
        prob, cond = 1.0, 1.0
    else:
        m = _transition_matrix(x, y, duration)
        prob = float(np.clip(np.linalg.det(m), 0.0, 1.0))
        cond = float(np.linalg.cond(m))
    if return_details:
        return prob, {"condition_number": cond}
    return prob


def mc_nonintersection_prob(x, y, duration, step=1.0 / 64, trials=10_000,
                            seed=0, crossing_correction=True):
    """Monte Carlo nonintersection probability with standard error.

    Checks strict ordering at every grid time; with crossing_correction the
    trial contributes the product over steps and adjacent pairs of the
    survival probability 1 - exp(-g0*g1/(2h)), removing the O(sqrt(step))
    bias of the grid-only check.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if np.any(np.diff(x) >= 0) or np.any(np.diff(y) >= 0):
        raise ValueError("endpoint vectors must be strictly decreasing")
    k = len(x)
    if k == 1:
        return 1.0, 0.0
    n_steps = max(1, round(duration / step))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 2718, k]))
    total = 0.0
    total_sq = 0.0
    remaining = trials
    while remaining:
        n_batch = min(remaining, 20_000)
        paths = _bridge_batch(rng, x, y, 0.0, duration, n_steps, n_batch)
        gaps = -np.diff(paths, axis=1)  # (batch, k-1, n_steps+1), want > 0
        ordered = np.all(gaps > 0, axis=(1, 2))
        if crossing_correction:
            g0 = gaps[:, :, :-1]
            g1 = gaps[:, :, 1:]
            h = duration / n_steps
            survive = 1.0 - np.exp(-(g0 * g1) / (2.0 * h))
            contrib = np.where(
                ordered, np.prod(survive, axis=(1, 2)), 0.0
            )
        else:
            contrib = ordered.astype(float)
        total += float(contrib.sum())
        total_sq += float((contrib ** 2).sum())
        remaining -= n_batch
    mean = total / trials
    var = max(total_sq / trials - mean ** 2, 0.0)
    return mean, float(np.sqrt(var / trials))


def near_max_multiplicity(xs, values, m, eps) -> int:
    """E_{m,eps}(f): most points pairwise more than m apart, each within
    eps of the maximum.  Left-to-right greedy selection, exact on grids."""
    if m <= 0 or eps <= 0:
        raise ValueError("m and eps must be positive")
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    threshold = values.max() - eps
    count = 0
    last = -np.inf
    for x, v in zip(xs, values):
        if v >= threshold and x - last > m:
            count += 1
            last = x
    return count


def sample_brownian_paths(n_paths, n_steps=512, interval=(-1.0, 1.0), seed=0,
                          rng=None):
    """Brownian motion batch on the interval, diffusion 2, B(left end) = 0."""
    a, b = interval
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence([seed, n_steps]))
    dt = (b - a) / n_steps
    incr = rng.normal(0.0, np.sqrt(DIFFUSION * dt), size=(n_paths, n_steps))
    paths = np.concatenate(
        [np.zeros((n_paths, 1)), np.cumsum(incr, axis=1)], axis=1
    )
    xs = a + np.arange(n_steps + 1) * dt
    return xs, paths


def _greedy_counts(xs, values, m, eps_list):
    """Vectorized greedy E_{m,eps} over a path batch, one count per eps."""
    maxima = values.max(axis=1, keepdims=True)
    counts = np.zeros((len(eps_list), values.shape[0]), dtype=np.int64)
    for e_idx, eps in enumerate(eps_list):
        eligible = values >= maxima - eps
        last = np.full(values.shape[0], -np.inf)
        alive = np.ones(values.shape[0], dtype=bool)
        while np.any(alive):
            ok = eligible & (xs[None, :] > (last[:, None] + m))
            has = ok.any(axis=1)
            alive &= has
            if not np.any(alive):
                break
            first = ok.argmax(axis=1)
            counts[e_idx, alive] += 1
            last[alive] = xs[first[alive]]
    return counts


def near_max_tail_probability(m, eps, k, trials, seed=0, n_steps=512,
                              interval=(-1.0, 1.0)):
    """P(E_{m,eps}(B) >= k) for Brownian motion on the interval."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 101]))
    hits = 0
    remaining = trials
    while remaining:
        n_batch = min(remaining, 10_000)
        xs, paths = sample_brownian_paths(
            n_batch, n_steps=n_steps, interval=interval, rng=rng
        )
        counts = _greedy_counts(xs, paths, m, [eps])[0]
        hits += int(np.sum(counts >= k))
        remaining -= n_batch
    p = hits / trials
    se = np.sqrt(max(p * (1 - p), 1e-300) / trials)
    return p, float(se)


def near_max_exponent_experiment(k_values=(2, 3), m=0.25,
                                 eps_ladder=tuple(2.0 ** -e for e in range(4, 10)),
                                 trials=100_000, seed=0, n_steps=512,
                                 interval=(-1.0, 1.0)):
    """Estimate P(E_{m,eps} >= k) over an eps ladder and fit the log-log
    slope per k (count-weighted least squares over the nonempty rungs).

    Returns {"rows": [(k, eps, p, se), ...], "slopes": {k: slope}}.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 404]))
    eps_list = list(eps_ladder)
    hit_table = {k: np.zeros(len(eps_list), dtype=np.int64) for k in k_values}
    for eps_idx, eps in enumerate(eps_list):
        remaining = trials
        while remaining:
            n_batch = min(remaining, 10_000)
            xs, paths = sample_brownian_paths(
                n_batch, n_steps=n_steps, interval=interval, rng=rng
            )
            counts = _greedy_counts(xs, paths, m, [eps])[0]
            for k in k_values:
                hit_table[k][eps_idx] += int(np.sum(counts >= k))
            remaining -= n_batch
    rows = []
    slopes = {}
    for k in k_values:
        hits = hit_table[k]
        ps = hits / trials
        for eps, p, h in zip(eps_list, ps, hits):
            se = np.sqrt(max(p * (1 - p), 1e-300) / trials)
            rows.append((k, eps, float(p), float(se)))
        mask = hits > 0
        lx = np.log(np.asarray(eps_list))[mask]
        ly = np.log(ps[mask])
        wts = hits[mask].astype(float)  # ~inverse variance of log counts
        xbar = np.average(lx, weights=wts)
        ybar = np.average(ly, weights=wts)
        slopes[k] = float(
            np.sum(wts * (lx - xbar) * (ly - ybar))
            / np.sum(wts * (lx - xbar) ** 2)
        )
    return {"rows": rows, "slopes": slopes}
