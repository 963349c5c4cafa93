"""Trajectory and ensemble statistics: ergodic averages, goodness of fit,
total-variation estimates, and censored exponential rate fits.

Observables are array functions ``f(x, u) -> values`` evaluated on whole
sample arrays at once.  Ensemble reductions use numpy's pairwise summation, so
results do not depend on how trajectories were scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as spstats

from .model import TWO_PI, ProductMeasure
from .sde import Trajectory

KS_COEFF_1PCT = 1.63  # asymptotic 1% Kolmogorov-Smirnov critical coefficient


def ks_critical(n: int, coeff: float = KS_COEFF_1PCT) -> float:
    return coeff / math.sqrt(n)


def time_average(traj: Trajectory, f) -> tuple[np.ndarray, np.ndarray]:
    """Running trapezoid time averages (1/t) int_0^t f of an observable.

    ``f(x, u)`` maps sample arrays to a value array.  The first entry (t = 0)
    is the raw observable value.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    values = np.asarray(f(traj.x, traj.u), dtype=float)
    t = traj.times
    integral = np.concatenate([[0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(t))])
    avg = np.empty_like(values)
    avg[0] = values[0]
    avg[1:] = integral[1:] / t[1:]
    return t, avg


def x_over_t(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Series of unwrapped angle over elapsed time (t = 0 dropped)."""
    t = traj.times
    keep = t > 0
    return t[keep], traj.unwrapped_x[keep] / t[keep]


def terminal_x_over_t(trajs: list[Trajectory]) -> np.ndarray:
    return np.array([tr.unwrapped_x[-1] / tr.times[-1] for tr in trajs])


def bootstrap_median_abs(values: np.ndarray, n_boot: int = 2000,
                         seed: int = 0) -> tuple[float, float]:
    """Median of |values| with a bootstrap standard error."""
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, 2**32], dtype=np.uint64)))
    absv = np.abs(np.asarray(values))
    med = float(np.median(absv))
    boots = np.median(absv[gen.integers(0, len(absv), size=(n_boot, len(absv)))], axis=1)
    return med, float(np.std(boots))


def block_bootstrap_se(values: np.ndarray, n_blocks: int = 100,
                       n_boot: int = 1000, seed: int = 0) -> float:
    """Standard error of the mean of a correlated series via block resampling."""
    values = np.asarray(values, dtype=float)
    usable = (len(values) // n_blocks) * n_blocks
    blocks = values[:usable].reshape(n_blocks, -1)
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, 2**33], dtype=np.uint64)))
    picks = gen.integers(0, n_blocks, size=(n_boot, n_blocks))
    means = blocks[picks].mean(axis=(1, 2))
    return float(np.std(means))


def recurrence_count(traj: Trajectory, eps: float, j: int) -> int:
    """Disjoint entries of the angle into the window family around j*pi.

    Windows are the arcs of half-width ``eps`` around (2k + j) pi; an initial
    position inside counts as one entry.
    """
    if not (0.0 < eps < math.pi / 2.0):
        raise ValueError("eps must lie in (0, pi/2)")
    if j not in (0, 1):
        raise ValueError("j selects the even (0) or odd (1) multiples of pi")
    target = j * math.pi
    d = np.abs(np.mod(traj.x - target, TWO_PI))
    d = np.minimum(d, TWO_PI - d)
    inside = d < eps
    entries = int(inside[0]) + int(np.sum(inside[1:] & ~inside[:-1]))
    return entries


def marginal_gof(x: np.ndarray, u: np.ndarray, measure: ProductMeasure) -> dict:
    """Kolmogorov-Smirnov statistics of one ensemble snapshot against the
    product measure: the angle versus uniform and every u-coordinate versus
    its centered Gaussian."""
    n = len(x)
    if n < 1000:
        raise ValueError("need at least 10^3 ensemble members for the asymptotic test")
    out = {"n": n, "critical_1pct": ks_critical(n)}
    out["ks_x"] = float(spstats.kstest(x, spstats.uniform(loc=0.0, scale=TWO_PI).cdf).statistic)
    sds = measure.std
    out["ks_u"] = [float(spstats.kstest(u[:, k], spstats.norm(scale=sds[k]).cdf).statistic)
                   for k in range(u.shape[1])]
    out["pass"] = bool(out["ks_x"] < out["critical_1pct"]
                       and all(s < out["critical_1pct"] for s in out["ks_u"]))
    return out


@dataclass(frozen=True)
class TvGrid:
    """Histogram grid for the total-variation estimate (one-mode model only).

    The box must reach at least five standard deviations so the uncovered
    mass stays negligible against any measurable distance.
    """

    angle_bins: int = 64
    u_bins: int = 64
    halfwidth_sd: float = 5.0

    def __post_init__(self):
        if self.angle_bins < 1 or self.u_bins < 1:
            raise ValueError("bin counts must be positive")
        if self.halfwidth_sd < 5.0:
            raise ValueError("the u-box must cover at least 5 standard deviations")


def empirical_tv(x: np.ndarray, u: np.ndarray, measure: ProductMeasure,
                 grid: TvGrid = TvGrid()) -> float:
    """Binned total-variation distance between a snapshot and the product law.

    Half the L1 distance of bin masses over angle x u1 x u2, plus the mass
    differences outside the covered u-box.  Finite samples put a positive
    noise floor under this estimate; compare against a same-size sample drawn
    from the measure itself.
    """
    if u.shape[1] != 2:
        raise ValueError("total-variation binning is implemented for the one-mode model")
    sds = measure.std
    edges_x = np.linspace(0.0, TWO_PI, grid.angle_bins + 1)
    edges = [np.linspace(-grid.halfwidth_sd * sd, grid.halfwidth_sd * sd, grid.u_bins + 1)
             for sd in sds]
    sample = np.column_stack([np.mod(x, TWO_PI), u])
    hist, _ = np.histogramdd(sample, bins=[edges_x, edges[0], edges[1]])
    p_emp = hist / len(x)
    mass_u = [np.diff(spstats.norm(scale=sd).cdf(e)) for sd, e in zip(sds, edges)]
    p_mu = (np.full(grid.angle_bins, 1.0 / grid.angle_bins)[:, None, None]
            * mass_u[0][None, :, None] * mass_u[1][None, None, :])
    # everything outside the covered box is one catch-all cell
    out_emp = 1.0 - float(p_emp.sum())
    out_mu = 1.0 - float(p_mu.sum())
    return 0.5 * (float(np.abs(p_emp - p_mu).sum()) + abs(out_emp - out_mu))


@dataclass(frozen=True)
class RateFit:
    """Censored least-squares exponential fit of a decay series."""

    rate: float
    stderr: float
    n_points: int
    window: tuple
    censored: bool  # True when too few points exceeded the noise floor

    @property
    def ok(self) -> bool:
        return not self.censored


def fit_decay_rate(times, values, noise_floor, min_points: int = 4) -> RateFit:
    """Fit value ~ C exp(-rate t) on the samples above 3x their noise floor.

    ``noise_floor`` is scalar or per-sample; points at or below 3x the floor
    are censored.  Returns a censored result when fewer than ``min_points``
    survive.
    """
    t = np.asarray(times, dtype=float)
    y = np.abs(np.asarray(values, dtype=float))
    floor = np.broadcast_to(np.asarray(noise_floor, dtype=float), y.shape)
    keep = y > 3.0 * floor
    if int(keep.sum()) < min_points:
        return RateFit(rate=math.nan, stderr=math.nan, n_points=int(keep.sum()),
                       window=(math.nan, math.nan), censored=True)
    tk, yk = t[keep], np.log(y[keep])
    coef, cov = np.polyfit(tk, yk, 1, cov=True)
    return RateFit(rate=float(-coef[0]), stderr=float(np.sqrt(cov[0, 0])),
                   n_points=int(keep.sum()), window=(float(tk[0]), float(tk[-1])),
                   censored=False)


def ensemble_observable_gap(trajs: list[Trajectory], f, mu_f: float):
    """|ensemble mean of f - mu_f| and its standard error at every recorded time."""
    times = trajs[0].times
    samples = np.array([f(tr.x, tr.u) for tr in trajs])  # (n_traj, n_times)
    gap = np.abs(samples.mean(axis=0) - mu_f)
    se = samples.std(axis=0) / math.sqrt(len(trajs))
    return times, gap, se


def observable_decay(trajs: list[Trajectory], f, mu_f: float,
                     min_points: int = 4) -> tuple[np.ndarray, np.ndarray, np.ndarray, RateFit]:
    """Decay series of an observable gap plus its censored rate fit."""
    times, gap, se = ensemble_observable_gap(trajs, f, mu_f)
    keep = times > 0
    fit = fit_decay_rate(times[keep], gap[keep], np.maximum(se[keep], 1e-300),
                         min_points=min_points)
    return times, gap, se, fit


def isotonic_decreasing_residual(values) -> float:
    """RMS residual of the best nonincreasing fit (pool-adjacent-violators)."""
    y = list(np.asarray(values, dtype=float))
    blocks = [[v, 1] for v in y]  # (mean, weight)
    merged = []
    for b in blocks:
        merged.append(b)
        while len(merged) > 1 and merged[-2][0] < merged[-1][0]:
            m2, w2 = merged.pop()
            m1, w1 = merged.pop()
            merged.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2])
    fit = np.concatenate([[m] * w for m, w in merged])
    return float(np.sqrt(np.mean((np.asarray(y) - fit) ** 2)))
