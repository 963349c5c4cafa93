#!/usr/bin/env python3
"""Decay-rate landscape of the one-mode preset: constants, the rate as a
function of the noise level, and the location of its interior maximum."""

import numpy as np

from selfrepel import compute_constants, decay_rate, motivating_model, sigma_argmax


def main() -> int:
    model = motivating_model()
    c = compute_constants(model)
    print("constants:")
    for key, val in c.as_dict().items():
        print(f"  {key:13s} = {val:.12g}")
    s_star = sigma_argmax(c)
    print(f"\nrate-maximizing noise level sigma* = {s_star:.6f} "
          f"(K3 sigma*^4 = {c.k3 * s_star**4:.3f})")
    print("\n  sigma        rate(eta=1)")
    for s in np.geomspace(0.05, 20.0, 15):
        lam, _ = decay_rate(c, 1.0, float(s))
        print(f"  {s:9.4f}  {lam:.6e}")
    lam_small = decay_rate(c, 1.0, 1e-3)[0]
    print(f"\nsmall-noise slope   rate/sigma^2 -> {lam_small / 1e-6:.6e} "
          f"(K1/2 = {c.k1 / 2:.6e})")
    lam_big = decay_rate(c, 1.0, 1e3)[0]
    print(f"large-noise slope   rate*sigma^2 -> {lam_big * 1e6:.6e} "
          f"(K1/(2 K3) = {c.k1 / (2 * c.k3):.6e})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
