"""Numerical certificate that angle derivatives of the mode table span R^(2m).

Row k of the derivative matrix is the k-th derivative of the eigenfunction
vector at one angle (closed form: the pair of frequency j turns into
j^k (cos, sin)(j x + k pi/2) / sqrt(pi)).  Full numerical row rank of orders
1..2m at every sampled angle certifies the spanning condition behind the
smoothing property of the noisy dynamics.  Raw rows grow like j^k, so each row
is normalized to unit length before taking singular values.

The normalized smallest singular value shrinks roughly geometrically with the
mode count (about 1.3e-1 at m = 2 down to 4e-7 at m = 8), so the default
1e-8 threshold is meaningful for m up to about 9; past that the certificate
needs higher precision, not a different algorithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SQRT_PI, TWO_PI, CircleModel

RANK_THRESHOLD = 1e-8  # on singular values of the row-normalized matrix


def derivative_matrix(model: CircleModel, x: float, max_order: int | None = None) -> np.ndarray:
    """Rows = derivative orders 1..max_order of the eigenfunction vector at x."""
    if max_order is None:
        max_order = model.dim_u
    if max_order < model.dim_u:
        raise ValueError("need at least as many derivative orders as eigenfunctions")
    rows = np.empty((max_order, model.dim_u))
    j = model.frequencies.astype(float)
    for k in range(1, max_order + 1):
        phase = j * x + k * (math.pi / 2.0)
        jk = j**k
        rows[k - 1, 0::2] = jk * np.cos(phase) / SQRT_PI
        rows[k - 1, 1::2] = jk * np.sin(phase) / SQRT_PI
    return rows


def min_normalized_singular_value(matrix: np.ndarray) -> float:
    """Smallest singular value after scaling every row to unit norm."""
    mat = np.asarray(matrix, dtype=float)
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        return 0.0
    sv = np.linalg.svd(mat / norms, compute_uv=False)
    return float(sv[min(mat.shape) - 1])


@dataclass(frozen=True)
class SpanReport:
    passed: bool
    min_singular_value: float
    worst_x: float
    samples: int
    max_order: int
    threshold: float

    def as_dict(self) -> dict:
        return {"pass": self.passed, "min_singular_value": self.min_singular_value,
                "worst_x": self.worst_x, "samples": self.samples,
                "max_order": self.max_order, "threshold": self.threshold}


def check_derivative_span(model: CircleModel, samples: int = 100,
                          max_order: int | None = None,
                          threshold: float = RANK_THRESHOLD) -> SpanReport:
    """Evaluate the rank certificate on a deterministic angle sample set."""
    if samples < 1:
        raise ValueError("need at least one sample angle")
    if max_order is None:
        max_order = model.dim_u
    # fixed irrational-ish offset; the rank is angle-independent for this family
    angles = (np.arange(samples) + 0.1234567890123) * (TWO_PI / samples)
    worst_sv = math.inf
    worst_x = float(angles[0])
    for x in angles:
        sv = min_normalized_singular_value(derivative_matrix(model, float(x), max_order))
        if sv < worst_sv:
            worst_sv = sv
            worst_x = float(x)
    rank_full = worst_sv > threshold
    return SpanReport(passed=rank_full, min_singular_value=worst_sv, worst_x=worst_x,
                      samples=samples, max_order=max_order, threshold=threshold)
