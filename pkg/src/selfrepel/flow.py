"""Zero-noise dynamics: raw and rotated charts, first integral, leaf structure.

Three systems are integrated with fixed-step RK4:

    full     (X, U, V):  X' = sin(X)U - cos(X)V,  U' = cos(X),  V' = sin(X)
    rotated  (x, u, v):  x' = -v,  u' = 1 - v^2,  v' = u v
    rescaled (u2, v2):   u2' = v2 - 1/v2,          v2' = -u2

The rotated chart is the image of the full one under the angle-dependent
rotation of (U, V) by -X; it makes H(u, v) = (u^2 + v^2 - log v^2)/2 a
conserved quantity and represents the invariant strip {v = 0} exactly in
floating point (v' = u v keeps v == 0 bitwise).  The rescaled planar system is
the rotated one with the angle used as clock; its vector field is singular on
v2 = 0, which no orbit of a finite level set reaches, so a sign change there
signals a step-size failure and aborts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

SYSTEMS = ("full", "rotated", "rescaled")


class FlowSingularError(RuntimeError):
    """Rescaled integration stepped across the singular line v2 = 0."""

    def __init__(self, step: int):
        self.step = step
        super().__init__(f"rescaled flow crossed v2 = 0 at step {step}; reduce dt")


@dataclass(frozen=True)
class RotatedState:
    """Coordinates after rotating (U, V) by minus the angle."""

    x: float
    u: float
    v: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.u, self.v)):
            raise ValueError("components must be finite")


@dataclass(frozen=True)
class LeafDescriptor:
    """Invariant leaf containing a point: strip, torus, or the minimum curve."""

    kind: str                 # "minimum_curve" | "torus" | "twisted_strip"
    c: float                  # level of H; inf on the twisted strip
    alpha: str | None = None  # sign leaf "+"/"-"; None on the twisted strip


def first_integral_H(u: float, v: float) -> float:
    """Conserved quantity of the rotated flow; +inf on the line v = 0."""
    if v == 0.0:
        return math.inf
    # log|v| rather than log(v^2): immune to underflow of v^2 for tiny v
    return 0.5 * (u * u + v * v) - math.log(abs(v))


def xi_forward(X: float, U: float, V: float) -> RotatedState:
    """Rotate (U, V) by -X."""
    c, s = math.cos(X), math.sin(X)
    return RotatedState(x=X, u=c * U + s * V, v=-s * U + c * V)


def xi_inverse(r: RotatedState) -> tuple[float, float, float]:
    """Rotate (u, v) by +X; exact inverse of xi_forward up to rounding."""
    c, s = math.cos(r.x), math.sin(r.x)
    return r.x, c * r.u - s * r.v, s * r.u + c * r.v


def classify_leaf(r: RotatedState, tol: float = 1e-9) -> LeafDescriptor:
    """Identify the invariant leaf through ``r``.

    |v| <= tol is the twisted strip; otherwise the leaf is the H-level set,
    reported as the minimum curve when the level is within tol of 1/2.
    """
    if abs(r.v) <= tol:
        return LeafDescriptor(kind="twisted_strip", c=math.inf, alpha=None)
    c = first_integral_H(r.u, r.v)
    alpha = "+" if r.v > 0 else "-"
    if abs(c - 0.5) <= tol:
        return LeafDescriptor(kind="minimum_curve", c=c, alpha=alpha)
    return LeafDescriptor(kind="torus", c=c, alpha=alpha)


@dataclass
class FlowPath:
    """RK4 samples of one system; ``states`` has one row per sample."""

    system: str
    times: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def h_values(self) -> np.ndarray:
        """H along the path (rotated/rescaled read (u, v) directly; full rotates first)."""
        if self.system == "rescaled":
            u, v = self.states[:, 0], self.states[:, 1]
        elif self.system == "rotated":
            u, v = self.states[:, 1], self.states[:, 2]
        else:
            X, U, V = self.states.T
            u = np.cos(X) * U + np.sin(X) * V
            v = -np.sin(X) * U + np.cos(X) * V
        out = np.full(len(u), math.inf)
        nz = v != 0.0
        out[nz] = 0.5 * (u[nz] ** 2 + v[nz] ** 2) - np.log(np.abs(v[nz]))
        return out


def _rk4_full(x, u, v, dt, n, rec, out):
    half, sixth = 0.5 * dt, dt / 6.0
    pos = 1
    for i in range(n):
        s1, c1 = math.sin(x), math.cos(x)
        k1x = s1 * u - c1 * v
        x2 = x + half * k1x
        u2 = u + half * c1
        v2 = v + half * s1
        s2, c2 = math.sin(x2), math.cos(x2)
        k2x = s2 * u2 - c2 * v2
        x3 = x + half * k2x
        u3 = u + half * c2
        v3 = v + half * s2
        s3, c3 = math.sin(x3), math.cos(x3)
        k3x = s3 * u3 - c3 * v3
        x4 = x + dt * k3x
        u4 = u + dt * c3
        v4 = v + dt * s3
        s4, c4 = math.sin(x4), math.cos(x4)
        k4x = s4 * u4 - c4 * v4
        x += sixth * (k1x + 2 * k2x + 2 * k3x + k4x)
        u += sixth * (c1 + 2 * c2 + 2 * c3 + c4)
        v += sixth * (s1 + 2 * s2 + 2 * s3 + s4)
        if (i + 1) == rec[pos]:
            out[pos, 0], out[pos, 1], out[pos, 2] = x, u, v
            pos += 1
    return pos


def _rk4_rotated(x, u, v, dt, n, rec, out):
    half, sixth = 0.5 * dt, dt / 6.0
    pos = 1
    for i in range(n):
        k1x, k1u, k1v = -v, 1 - v * v, u * v
        u2, v2 = u + half * k1u, v + half * k1v
        k2u, k2v = 1 - v2 * v2, u2 * v2
        u3, v3 = u + half * k2u, v + half * k2v
        k3u, k3v = 1 - v3 * v3, u3 * v3
        u4, v4 = u + dt * k3u, v + dt * k3v
        k4u, k4v = 1 - v4 * v4, u4 * v4
        x += sixth * (k1x + 2 * (-v2) + 2 * (-v3) + (-v4))
        u += sixth * (k1u + 2 * k2u + 2 * k3u + k4u)
        v += sixth * (k1v + 2 * k2v + 2 * k3v + k4v)
        if (i + 1) == rec[pos]:
            out[pos, 0], out[pos, 1], out[pos, 2] = x, u, v
            pos += 1
    return pos


def _rk4_rescaled(u, v, dt, n, rec, out):
    half, sixth = 0.5 * dt, dt / 6.0
    sign0 = 1.0 if v > 0 else -1.0
    pos = 1
    for i in range(n):
        k1u, k1v = v - 1.0 / v, -u
        u2, v2 = u + half * k1u, v + half * k1v
        k2u, k2v = v2 - 1.0 / v2, -u2
        u3, v3 = u + half * k2u, v + half * k2v
        k3u, k3v = v3 - 1.0 / v3, -u3
        u4, v4 = u + dt * k3u, v + dt * k3v
        k4u, k4v = v4 - 1.0 / v4, -u4
        u += sixth * (k1u + 2 * k2u + 2 * k3u + k4u)
        v += sixth * (k1v + 2 * k2v + 2 * k3v + k4v)
        if v == 0.0 or (v > 0) != (sign0 > 0):
            raise FlowSingularError(i + 1)
        if (i + 1) == rec[pos]:
            out[pos, 0], out[pos, 1] = u, v
            pos += 1
    return pos


def rk4_flow(system: str, s0, dt: float, t_final: float,
             record_every: int = 1) -> FlowPath:
    """Fixed-step RK4 path of one of the three systems.

    ``s0`` is (X, U, V) for "full", (x, u, v) or RotatedState for "rotated",
    and (u2, v2) with v2 != 0 for "rescaled".  Samples are taken every
    ``record_every`` steps plus the final step.
    """
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}; expected one of {SYSTEMS}")
    if dt <= 0 or t_final <= 0:
        raise ValueError("dt and t_final must be positive")
    if isinstance(s0, RotatedState):
        s0 = (s0.x, s0.u, s0.v)
    s0 = tuple(float(c) for c in s0)
    n = int(math.ceil(t_final / dt - 1e-12))
    rec = list(range(0, n + 1, record_every))
    if rec[-1] != n:
        rec.append(n)
    rec_arr = np.asarray(rec, dtype=np.int64)

    if system == "rescaled":
        if len(s0) != 2:
            raise ValueError("rescaled state is (u2, v2)")
        if s0[1] == 0.0:
            raise FlowSingularError(0)
        out = np.empty((len(rec), 2))
        out[0] = s0
        _rk4_rescaled(s0[0], s0[1], dt, n, rec_arr, out)
    else:
        if len(s0) != 3:
            raise ValueError(f"{system} state has three components")
        out = np.empty((len(rec), 3))
        out[0] = s0
        stepper = _rk4_full if system == "full" else _rk4_rotated
        stepper(s0[0], s0[1], s0[2], dt, n, rec_arr, out)

    return FlowPath(system=system, times=rec_arr * dt, states=out)


def write_flow_csv(path_obj: FlowPath, path, coords: str = "rotated") -> None:
    """CSV with columns t, x, u, v, H.

    ``coords`` applies to full-system paths: "rotated" writes the rotated
    pair (where H lives), "raw" writes (X, U, V) as-is with H still computed
    through the rotation.  Rescaled paths use the clock as the angle column.
    """
    if coords not in ("rotated", "raw"):
        raise ValueError("coords must be 'rotated' or 'raw'")
    h = path_obj.h_values()
    if path_obj.system == "rescaled":
        cols = np.column_stack([path_obj.times, path_obj.times,
                                path_obj.states[:, 0], path_obj.states[:, 1], h])
    elif path_obj.system == "rotated" or coords == "raw":
        cols = np.column_stack([path_obj.times, path_obj.states, h])
    else:
        X, U, V = path_obj.states.T
        u = np.cos(X) * U + np.sin(X) * V
        v = -np.sin(X) * U + np.cos(X) * V
        cols = np.column_stack([path_obj.times, X, u, v, h])
    with open(path, "w") as fh:
        fh.write("t,x,u,v,H\n")
        for row in cols:
            fh.write(",".join(f"{val:.17g}" for val in row) + "\n")
