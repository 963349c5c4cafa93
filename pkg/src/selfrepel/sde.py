"""Euler-Maruyama integration of the lifted system, single paths and ensembles.

The angle chart has a constant diffusion direction, so the Stratonovich
correction vanishes and the explicit Euler-Maruyama step is consistent:

    x'   = wrap(x - sum_k a_k e_k'(x) u_k dt + sigma sqrt(dt) xi)
    u_k' = u_k + e_k(x) dt        (same pre-step angle as the drift)

Trajectories carry a continuous unwrapped angle lift next to the wrapped one.
Ensembles assign counter-based stream i to trajectory i and advance a fixed
4096-trajectory chunk at a time, so results are bit-identical for any worker
count and any execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import (
    SQRT_PI,
    TWO_PI,
    CircleModel,
    ProductMeasure,
    State,
    eigen_table,
)
from .rng import RngStream

CHUNK = 4096        # trajectories advanced together; fixed so results never depend on workers
NOISE_BLOCK = 2048  # steps of noise drawn per generator call; the normal
                    # stream is granularity-invariant, so this is purely a
                    # call-overhead knob


class SimulationError(RuntimeError):
    """Raised when a non-finite state is produced; carries the step index."""

    def __init__(self, step: int, detail: str = ""):
        self.step = step
        super().__init__(f"non-finite state at step {step}{': ' + detail if detail else ''}")


@dataclass(frozen=True)
class SimConfig:
    """Step size, horizon, recording stride and base seed for one run."""

    dt: float
    t_final: float
    record_every: int = 1
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.dt <= self.t_final):
            raise ValueError("need 0 < dt <= t_final")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_final / self.dt - 1e-12))

    def record_steps(self) -> np.ndarray:
        steps = list(range(0, self.n_steps + 1, self.record_every))
        if steps[-1] != self.n_steps:
            steps.append(self.n_steps)
        return np.asarray(steps, dtype=np.int64)


@dataclass
class Trajectory:
    """Recorded samples of one path: times, wrapped and lifted angle, u block."""

    times: np.ndarray
    x: np.ndarray
    unwrapped_x: np.ndarray
    u: np.ndarray  # shape (n_samples, 2m)

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> State:
        return State(x=float(self.x[i]), u=self.u[i])

    @property
    def states(self) -> list[State]:
        return [self.state(i) for i in range(len(self))]

    def to_csv(self, path) -> None:
        write_trajectory_csv(self, path)


def em_step(model: CircleModel, s: State, dt: float, noise: float) -> State:
    """One Euler-Maruyama step from state ``s`` with a standard normal draw."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if not math.isfinite(s.x) or not np.all(np.isfinite(s.u)):
        raise SimulationError(0, "input state is not finite")
    values, derivs = eigen_table(model, s.x)
    dx = -float(np.dot(model.coeff_per_eigenfunction * derivs, s.u))
    x_new = s.x + dx * dt + model.sigma * math.sqrt(dt) * noise
    u_new = s.u + values * dt
    return State(x=x_new, u=u_new)


def _step_block(model, x, wind, u, noise_block, dt, step0):
    """Advance a batch in place over ``noise_block.shape[1]`` steps.

    x, wind: (N,); u: (N, 2m); noise_block: (N, nsteps).  Returns nothing;
    raises SimulationError if a non-finite value appears.
    """
    m = model.n_modes
    inv_sqpi = 1.0 / SQRT_PI
    sig_sqdt = model.sigma * math.sqrt(dt)
    coeffs = model.coeffs
    nsteps = noise_block.shape[1]
    # overflow surfaces as the non-finite check below, not as a warning
    with np.errstate(over="ignore", invalid="ignore"):
        for s in range(nsteps):
            drift = np.zeros_like(x)
            cos_list = []
            sin_list = []
            for jj in range(m):
                j = float(jj + 1)
                arg = x * j
                cj = np.cos(arg)
                sj = np.sin(arg)
                cos_list.append(cj)
                sin_list.append(sj)
                drift += (coeffs[jj] * j * inv_sqpi) * (sj * u[:, 2 * jj] - cj * u[:, 2 * jj + 1])
            x_raw = x + drift * dt + sig_sqdt * noise_block[:, s]
            k = np.floor(x_raw / TWO_PI)
            np.subtract(x_raw, TWO_PI * k, out=x)
            wind += k
            for jj in range(m):
                u[:, 2 * jj] += cos_list[jj] * (inv_sqpi * dt)
                u[:, 2 * jj + 1] += sin_list[jj] * (inv_sqpi * dt)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
        raise SimulationError(step0 + nsteps)


def _run_chunk(model, cfg, init, seed, idx_lo, idx_hi):
    """Simulate trajectories idx_lo..idx_hi-1; returns stacked record arrays."""
    count = idx_hi - idx_lo
    gens = [RngStream(seed, i).generator() for i in range(idx_lo, idx_hi)]
    if isinstance(init, ProductMeasure):
        draws = [m.sample_batch(g, 1) for m, g in zip([init] * count, gens)]
        x = np.array([d[0][0] for d in draws])
        u = np.vstack([d[1] for d in draws])
    else:
        x = np.full(count, float(init.x))
        u = np.tile(np.asarray(init.u, dtype=float), (count, 1))
    wind = np.zeros(count)

    rec = cfg.record_steps()
    n_rec = len(rec)
    rec_x = np.empty((n_rec, count))
    rec_unw = np.empty((n_rec, count))
    rec_u = np.empty((n_rec, count, model.dim_u))
    rec_pos = 0

    def record():
        nonlocal rec_pos
        rec_x[rec_pos] = x
        rec_unw[rec_pos] = x + TWO_PI * wind
        rec_u[rec_pos] = u
        rec_pos += 1

    record()  # step 0
    n_steps = cfg.n_steps
    noise = np.empty((count, NOISE_BLOCK))
    filled = 0   # valid columns in the noise buffer
    used = 0     # columns already consumed
    drawn = 0    # total noise drawn per trajectory so far
    current = 0  # current step index
    for target in rec[1:]:
        while current < target:
            if used == filled:
                filled = min(NOISE_BLOCK, n_steps - drawn)
                for i, g in enumerate(gens):
                    noise[i, :filled] = g.standard_normal(filled)
                drawn += filled
                used = 0
            span = min(int(target) - current, filled - used)
            _step_block(model, x, wind, u, noise[:, used:used + span], cfg.dt, current)
            used += span
            current += span
        record()
    return rec, rec_x, rec_unw, rec_u


def simulate(model: CircleModel, s0: State, cfg: SimConfig,
             stream: RngStream | None = None) -> Trajectory:
    """Integrate one path; identical inputs give identical output."""
    stream = stream if stream is not None else RngStream(cfg.seed, 0)
    trajs = _ensemble_from_specs(model, s0, cfg, [stream])
    return trajs[0]


def _ensemble_from_specs(model, init, cfg, streams):
    rec = cfg.record_steps()
    out = []
    for st in streams:
        r, rx, runw, ru = _run_chunk(model, cfg, init, st.seed, st.stream_id, st.stream_id + 1)
        out.append(Trajectory(times=r * cfg.dt, x=rx[:, 0],
                              unwrapped_x=runw[:, 0], u=ru[:, 0, :]))
    return out


def simulate_ensemble(model: CircleModel, init, count: int, cfg: SimConfig,
                      seed: int | None = None, workers: int = 1) -> list[Trajectory]:
    """Simulate ``count`` trajectories; trajectory i uses stream_id = i.

    ``init`` is either a fixed State (point mass) or a ProductMeasure, in which
    case each trajectory draws its own initial condition from its stream before
    consuming noise.  Output does not depend on ``workers``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    seed = cfg.seed if seed is None else seed
    bounds = [(lo, min(lo + CHUNK, count)) for lo in range(0, count, CHUNK)]

    def work(b):
        lo, hi = b
        try:
            return _run_chunk(model, cfg, init, seed, lo, hi)
        except SimulationError as exc:
            raise SimulationError(exc.step, f"in trajectory chunk [{lo}, {hi})") from exc

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, bounds))
    else:
        results = [work(b) for b in bounds]

    trajs = []
    for (lo, hi), (rec, rx, runw, ru) in zip(bounds, results):
        times = rec * cfg.dt
        for i in range(hi - lo):
            trajs.append(Trajectory(times=times.copy(), x=rx[:, i].copy(),
                                    unwrapped_x=runw[:, i].copy(), u=ru[:, i, :].copy()))
    return trajs


def snapshot(trajs: list[Trajectory], t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack ensemble states at recorded time ``t`` -> (x, u, unwrapped_x)."""
    times = trajs[0].times
    idx = int(np.argmin(np.abs(times - t)))
    if abs(times[idx] - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"time {t} was not recorded (nearest {times[idx]})")
    x = np.array([tr.x[idx] for tr in trajs])
    u = np.array([tr.u[idx] for tr in trajs])
    unw = np.array([tr.unwrapped_x[idx] for tr in trajs])
    return x, u, unw


def write_trajectory_csv(traj: Trajectory, path) -> None:
    dim = traj.u.shape[1]
    header = "t,x,unwrapped_x," + ",".join(f"u_{k + 1}" for k in range(dim))
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i in range(len(traj)):
            row = [traj.times[i], traj.x[i], traj.unwrapped_x[i], *traj.u[i]]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_snapshot_csv(x: np.ndarray, u: np.ndarray, path) -> None:
    dim = u.shape[1]
    header = "x," + ",".join(f"u_{k + 1}" for k in range(dim))
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i in range(len(x)):
            fh.write(",".join(f"{v:.17g}" for v in (x[i], *u[i])) + "\n")
