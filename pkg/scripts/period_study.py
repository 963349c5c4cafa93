#!/usr/bin/env python3
"""Study of the planar orbit period: limit behaviour near the minimum level,
both computation routes side by side, and continued-fraction diagnostics."""

import math

from selfrepel import (
    period_lower_bound,
    period_ode_oracle,
    period_quadrature,
    rationality_report,
)

SQRT2PI = math.sqrt(2) * math.pi


def main() -> int:
    print("approach to the limiting value sqrt(2) pi at the minimum level:")
    for k in range(1, 7):
        c = 0.5 + 10.0 ** (-k)
        gap = SQRT2PI - period_quadrature(c).period
        print(f"  c - 1/2 = 1e-{k}:  sqrt(2) pi - T = {gap:.6e}")

    print("\nquadrature vs event-detection oracle vs turning-point bound:")
    for c in (0.6, 1.0, 2.0, 5.0, 20.0, 100.0):
        q = period_quadrature(c)
        o = period_ode_oracle(c)
        lb = period_lower_bound(c)
        print(f"  c = {c:6g}:  T_quad = {q.period:.12f}  T_ode = {o.period:.12f}  "
              f"rel gap = {abs(q.period - o.period) / q.period:.1e}  bound = {lb:.6f}")

    print("\ncontinued-fraction diagnostics of T/(2 pi) (undecidable in floats):")
    for c in (1.0, 2.0, 5.0):
        rep = rationality_report(c, max_denominator=10**4)
        best = min(rep.convergents, key=lambda pq: pq[2])
        print(f"  c = {c:g}: ratio = {rep.ratio:.12f}; best p/q = {best[0]}/{best[1]} "
              f"(err {best[2]:.2e})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
