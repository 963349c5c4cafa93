"""Return time of the rescaled planar orbit as a function of the level c.

Two independent routes compute the same quantity:

* ``period_quadrature``  evaluates sqrt(2) * int_{c1}^{c2} dv / sqrt(c - phi(v))
  with phi(v) = v^2/2 - log v and c1 < 1 < c2 the roots of phi = c.  The
  integrand has inverse-square-root endpoint singularities, handled by a
  tanh-sinh rule on each half of the split at v = 1.  Near the endpoints the
  radicand is evaluated in the cancellation-free forms

      c - phi(c1 + s) = log1p(s/c1) - c1 s - s^2/2
      c - phi(c2 - s) = c2 s - s^2/2 + log1p(-s/c2)

* ``period_ode_oracle``  integrates the planar system (u2' = v2 - 1/v2,
  v2' = -u2) from the inner turning point (0, c1) and event-detects the next
  u2 = 0 crossing at (0, c2); the period is twice the elapsed time.  The raw
  vector field blows up like exp(c) near the inner turning point, so the
  integration runs in the rescaled clock dtau = dt/v2, which turns the field
  polynomial ((v^2 - 1, -u v)) and carries physical time as a third state.

The inner turning point collapses like c1 ~ exp(-c), so double precision
supports the quadrature for c up to about 700; the lower-bound evaluation
(which only needs c1 >= 0) works beyond that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)
SQRT2_PI = math.sqrt(2.0) * math.pi
TWO_PI = 2.0 * math.pi

C_MIN_GAP = 1e-10  # period operations require c > 1/2 + this


class QuadratureError(RuntimeError):
    """Tanh-sinh refinement did not converge; carries the last two levels."""

    def __init__(self, last: float, previous: float, level: int):
        self.last = last
        self.previous = previous
        self.level = level
        super().__init__(
            f"quadrature not converged at level {level}: {previous!r} -> {last!r}")


class EventError(RuntimeError):
    """No return crossing found within the integration budget."""


def phi(v: float) -> float:
    """Potential v^2/2 - log v; strictly convex on (0, inf), minimum 1/2 at v = 1."""
    if v <= 0.0:
        raise ValueError("phi is defined for v > 0")
    return 0.5 * v * v - math.log(v)


def phi_roots(c: float) -> tuple[float, float]:
    """Roots 0 < c1 < 1 < c2 of phi(v) = c, for c > 1/2.

    The left root is bisected in w = log v (it collapses like exp(-c)), the
    right root in v over the bracket (1, 2 + sqrt(2c)); both get a Newton
    polish.  Residuals |phi(c_i) - c| stay near rounding level.
    """
    if not (c > 0.5):
        raise ValueError("phi(v) = c has two roots only for c > 1/2")

    def g(w):  # phi(e^w) - c
        return 0.5 * math.exp(2.0 * w) - w - c

    a, b = -(c + 1.0), 0.0  # g(a) > 0 > g(b)
    fa = g(a)
    for _ in range(120):
        mid = 0.5 * (a + b)
        fm = g(mid)
        if (fa > 0.0) == (fm > 0.0):
            a, fa = mid, fm
        else:
            b = mid
    w = 0.5 * (a + b)
    for _ in range(4):
        d = math.exp(2.0 * w) - 1.0
        if d == 0.0:
            break
        w -= g(w) / d
    c1 = math.exp(w)

    a, b = 1.0, 2.0 + math.sqrt(2.0 * c)
    fa = 0.5 - c
    for _ in range(120):
        mid = 0.5 * (a + b)
        fm = phi(mid) - c
        if (fa > 0.0) == (fm > 0.0):
            a, fa = mid, fm
        else:
            b = mid
    c2 = 0.5 * (a + b)
    for _ in range(4):
        d = c2 - 1.0 / c2
        if d == 0.0:
            break
        c2 -= (phi(c2) - c) / d
    return c1, c2


@dataclass(frozen=True)
class PeriodResult:
    c: float
    c1: float
    c2: float
    period: float
    method: str  # "quadrature" | "ode_event"
    err_estimate: float


# ---------------------------------------------------------------------------
# tanh-sinh quadrature with stable endpoint distances

_T_MAX = 6.11  # node offsets underflow past this abscissa


def tanh_sinh(f, a: float, b: float, tol: float = 1e-13,
              max_level: int = 14, min_level: int = 5) -> tuple[float, float]:
    """Integrate ``f`` over (a, b) with endpoint-singularity-robust nodes.

    ``f(v, s_a, s_b)`` receives the node and its distances to both endpoints,
    computed without cancellation, so integrands singular at an endpoint can
    work with the small distance directly.  Returns (value, error estimate);
    the estimate is the last refinement difference.
    """
    half = 0.5 * (b - a)

    def node(t):
        w = 0.5 * math.pi * math.sinh(t)
        e2w = math.exp(-2.0 * abs(w))
        sech2 = 4.0 * e2w / (1.0 + e2w) ** 2
        near = half * 2.0 * e2w / (1.0 + e2w)  # distance to the nearer endpoint
        if t >= 0:
            sb, sa, v = near, (b - a) - near, b - near
        else:
            sa, sb, v = near, (b - a) - near, a + near
        weight = half * 0.5 * math.pi * math.cosh(t) * sech2
        return v, sa, sb, weight

    def row(h, odd_only):
        acc = 0.0
        k = 1 if odd_only else 0
        step = 2 if odd_only else 1
        while k * h <= _T_MAX:
            t = k * h
            for tt in ((t,) if t == 0.0 else (t, -t)):
                v, sa, sb, w = node(tt)
                if sa > 0.0 and sb > 0.0 and w > 0.0:
                    acc += w * f(v, sa, sb)
            k += step
        return acc

    h = 1.0
    total = row(h, odd_only=False)
    values = [h * total]
    for level in range(1, max_level + 1):
        h *= 0.5
        total += row(h, odd_only=True)
        values.append(h * total)
        if level >= max(min_level, 2):
            e1 = abs(values[-1] - values[-2])
            e2 = abs(values[-2] - values[-3])
            scale = max(1.0, abs(values[-1]))
            if e1 <= tol * scale and e2 <= 10.0 * tol * scale:
                return values[-1], e1
    raise QuadratureError(values[-1], values[-2], max_level)


def _require_valid_c(c: float) -> None:
    if not (c > 0.5 + C_MIN_GAP):
        raise ValueError(f"period operations need c > 1/2 + {C_MIN_GAP}")


def period_quadrature(c: float) -> PeriodResult:
    """Singular quadrature value of the period at level ``c``."""
    _require_valid_c(c)
    c1, c2 = phi_roots(c)
    if c1 <= 0.0:
        raise ValueError("inner turning point underflowed; c too large for doubles")

    def left(v, sa, sb):
        s = sa
        return 1.0 / math.sqrt(math.log1p(s / c1) - c1 * s - 0.5 * s * s)

    def right(v, sa, sb):
        s = sb
        return 1.0 / math.sqrt(c2 * s - 0.5 * s * s + math.log1p(-s / c2))

    il, el = tanh_sinh(left, c1, 1.0)
    ir, er = tanh_sinh(right, 1.0, c2)
    return PeriodResult(c=c, c1=c1, c2=c2, period=SQRT2 * (il + ir),
                        method="quadrature", err_estimate=SQRT2 * (el + er))


# ---------------------------------------------------------------------------
# ODE event oracle in the regularized clock


def _hermite(s, y0, y1, d0, d1, h):
    """Cubic Hermite value at fraction s of a step of size h."""
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1


def regularized_half_period(c: float, dtau: float) -> tuple[float, float]:
    """Integrate (u2, v2, t) in the rescaled clock from (0, c1) to the next
    u2 = 0 crossing; returns (elapsed physical time, v2 at the event)."""
    c1, _ = phi_roots(c)
    u, v, t = 0.0, c1, 0.0
    half, sixth = 0.5 * dtau, dtau / 6.0
    budget = int(math.ceil(200.0 / dtau))
    for i in range(budget):
        k1u, k1v, k1t = v * v - 1.0, -u * v, v
        u2_, v2_ = u + half * k1u, v + half * k1v
        k2u, k2v, k2t = v2_ * v2_ - 1.0, -u2_ * v2_, v2_
        u3_, v3_ = u + half * k2u, v + half * k2v
        k3u, k3v, k3t = v3_ * v3_ - 1.0, -u3_ * v3_, v3_
        u4_, v4_ = u + dtau * k3u, v + dtau * k3v
        k4u, k4v, k4t = v4_ * v4_ - 1.0, -u4_ * v4_, v4_
        un = u + sixth * (k1u + 2 * k2u + 2 * k3u + k4u)
        vn = v + sixth * (k1v + 2 * k2v + 2 * k3v + k4v)
        tn = t + sixth * (k1t + 2 * k2t + 2 * k3t + k4t)
        if i > 0 and u < 0.0 <= un:
            d0 = v * v - 1.0
            d1 = vn * vn - 1.0
            lo, hi = 0.0, 1.0
            for _ in range(60):  # bisection on the dense output, ~1e-18 in s
                mid = 0.5 * (lo + hi)
                fm = _hermite(mid, u, un, d0, d1, dtau)
                if (fm > 0.0) == (un > 0.0):
                    hi = mid
                else:
                    lo = mid
            s = 0.5 * (lo + hi)
            v_evt = _hermite(s, v, vn, -u * v, -un * vn, dtau)
            t_evt = _hermite(s, t, tn, v, vn, dtau)
            return t_evt, v_evt
        u, v, t = un, vn, tn
    raise EventError(f"no u2 = 0 return crossing within the budget for c = {c}")


def period_ode_oracle(c: float, dtau: float = 1e-4) -> PeriodResult:
    """Event-detected period; error estimate from one step halving."""
    _require_valid_c(c)
    c1, c2 = phi_roots(c)
    t_half, _ = regularized_half_period(c, dtau)
    t_half_fine, v_evt = regularized_half_period(c, 0.5 * dtau)
    return PeriodResult(c=c, c1=c1, c2=c2, period=2.0 * t_half_fine,
                        method="ode_event",
                        err_estimate=2.0 * abs(t_half_fine - t_half))


def oracle_path(c: float, dtau: float = 1e-4, record_every: int = 100):
    """Sampled (u2, v2) states of the oracle run, for conservation checks.

    Returns (tau_times, states) with one (u2, v2) row per sample, covering one
    half period from (0, c1).
    """
    _require_valid_c(c)
    c1, _ = phi_roots(c)
    u, v = 0.0, c1
    half, sixth = 0.5 * dtau, dtau / 6.0
    taus = [0.0]
    rows = [(u, v)]
    budget = int(math.ceil(200.0 / dtau))
    for i in range(budget):
        k1u, k1v = v * v - 1.0, -u * v
        u2_, v2_ = u + half * k1u, v + half * k1v
        k2u, k2v = v2_ * v2_ - 1.0, -u2_ * v2_
        u3_, v3_ = u + half * k2u, v + half * k2v
        k3u, k3v = v3_ * v3_ - 1.0, -u3_ * v3_
        u4_, v4_ = u + dtau * k3u, v + dtau * k3v
        k4u, k4v = v4_ * v4_ - 1.0, -u4_ * v4_
        un = u + sixth * (k1u + 2 * k2u + 2 * k3u + k4u)
        vn = v + sixth * (k1v + 2 * k2v + 2 * k3v + k4v)
        crossed = i > 0 and u < 0.0 <= un
        u, v = un, vn
        if (i + 1) % record_every == 0 or crossed:
            taus.append((i + 1) * dtau)
            rows.append((u, v))
        if crossed:
            return np.asarray(taus), np.asarray(rows)
    raise EventError(f"no u2 = 0 return crossing within the budget for c = {c}")


# ---------------------------------------------------------------------------
# Angle displacement over one planar revolution (rotated triple)


@dataclass(frozen=True)
class DisplacementResult:
    c: float
    periods: int
    x_displacement: float  # |x| after the requested number of (u, v) revolutions
    period_reference: float
    rel_error: float


def x_displacement_check(c: float, dt: float = 1e-4, periods: int = 1) -> DisplacementResult:
    """Angle advance of the rotated triple over full (u, v) revolutions.

    Starting at (x, u, v) = (0, 0, c2), follows the rotated flow and detects
    downward u = 0 crossings (v back near c2); after ``periods`` of them the
    absolute angle displacement equals ``periods`` times the planar period.
    """
    _require_valid_c(c)
    if periods < 1:
        raise ValueError("periods must be >= 1")
    _, c2 = phi_roots(c)
    x, u, v = 0.0, 0.0, c2
    half, sixth = 0.5 * dt, dt / 6.0
    crossings = 0
    budget = int(math.ceil(periods * 40.0 / dt))
    for i in range(budget):
        k1x, k1u, k1v = -v, 1 - v * v, u * v
        u2_, v2_ = u + half * k1u, v + half * k1v
        k2x, k2u, k2v = -v2_, 1 - v2_ * v2_, u2_ * v2_
        u3_, v3_ = u + half * k2u, v + half * k2v
        k3x, k3u, k3v = -v3_, 1 - v3_ * v3_, u3_ * v3_
        u4_, v4_ = u + dt * k3u, v + dt * k3v
        k4x, k4u, k4v = -v4_, 1 - v4_ * v4_, u4_ * v4_
        xn = x + sixth * (k1x + 2 * k2x + 2 * k3x + k4x)
        un = u + sixth * (k1u + 2 * k2u + 2 * k3u + k4u)
        vn = v + sixth * (k1v + 2 * k2v + 2 * k3v + k4v)
        if i > 0 and u > 0.0 >= un and v > 1.0:
            crossings += 1
            if crossings == periods:
                d0 = 1 - v * v
                d1 = 1 - vn * vn
                lo, hi = 0.0, 1.0
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    fm = _hermite(mid, u, un, d0, d1, dt)
                    if (fm > 0.0) == (un > 0.0):
                        hi = mid
                    else:
                        lo = mid
                s = 0.5 * (lo + hi)
                x_evt = _hermite(s, x, xn, -v, -vn, dt)
                ref = periods * period_quadrature(c).period
                rel = abs(abs(x_evt) - ref) / ref
                return DisplacementResult(c=c, periods=periods,
                                          x_displacement=abs(x_evt),
                                          period_reference=ref, rel_error=rel)
        x, u, v = xn, un, vn
    raise EventError(f"planar revolution not completed within the budget for c = {c}")


# ---------------------------------------------------------------------------
# Bounds and rationality diagnostics


def period_lower_bound(c: float) -> float:
    """Turning-point bound 2 sqrt(2) [sqrt(c1/(1+c1)) + sqrt(c2/(1+c2))]."""
    if not (c > 0.5):
        raise ValueError("bound needs c > 1/2")
    c1, c2 = phi_roots(c)
    return 2.0 * SQRT2 * (math.sqrt(c1 / (1.0 + c1)) + math.sqrt(c2 / (1.0 + c2)))


@dataclass(frozen=True)
class RationalityReport:
    """Continued-fraction view of period/(2 pi); floating point cannot decide
    rationality, so this only reports approximants."""

    c: float
    period: float
    ratio: float  # period / (2 pi)
    convergents: tuple  # ((p, q, |ratio - p/q|), ...) with q <= max_denominator
    best_error: float
    note: str = "numerically undecidable classification"


def rationality_report(c: float, max_denominator: int = 10**6) -> RationalityReport:
    _require_valid_c(c)
    if max_denominator < 1:
        raise ValueError("max_denominator must be >= 1")
    res = period_quadrature(c)
    ratio = res.period / TWO_PI
    convergents = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = int(math.floor(ratio)), 1
    frac = ratio - math.floor(ratio)
    convergents.append((p_cur, q_cur, abs(ratio - p_cur / q_cur)))
    while frac > 1e-15:
        frac = 1.0 / frac
        a = int(math.floor(frac))
        frac -= a
        p_next = a * p_cur + p_prev
        q_next = a * q_cur + q_prev
        if q_next > max_denominator:
            break
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
        convergents.append((p_cur, q_cur, abs(ratio - p_cur / q_cur)))
    best = min(err for _, _, err in convergents)
    return RationalityReport(c=c, period=res.period, ratio=ratio,
                             convergents=tuple(convergents), best_error=best)
