"""Circle model with a finite Fourier interaction kernel.

The state space is the circle (circumference 2*pi) times R^(2m).  For m
frequencies j = 1..m the eigenfunction table is

    e_{2j-1}(x) = cos(j x)/sqrt(pi),   e_{2j}(x) = sin(j x)/sqrt(pi),

orthonormal in L^2(dx) on [0, 2*pi), with eigenvalue -j^2 attached to both
members of a pair.  The interaction kernel is V(x, y) = sum_k a_k e_k(x) e_k(y)
with one positive weight per frequency.  The companion coordinates u_k integrate
e_k along the angle path, and the angle drift is -sum_k a_k e_k'(x) u_k.

With m = 1 and a_1 = pi the kernel reduces to cos(y - x) and the unnormalized
coordinates (X, U, V) = (x, sqrt(pi) u_1, sqrt(pi) u_2) recover the classic
one-mode system; this preset is exposed as ``motivating_model``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

TWO_PI = 2.0 * math.pi
SQRT_PI = math.sqrt(math.pi)

GRID_POINTS = 10_000  # angle grid used for sup-norm style scans


def wrap_angle(x):
    """Map an angle (scalar or array) to [0, 2*pi)."""
    return np.mod(x, TWO_PI)


@dataclass(frozen=True)
class CircleModel:
    """n-mode circle model: frequencies 1..n_modes, kernel weights, noise level.

    Parameters
    ----------
    n_modes : int
        Number of Fourier frequencies m; the model carries 2m eigenfunctions.
    coeffs : tuple of float
        Positive kernel weight a_j for each frequency j = 1..m.
    sigma : float
        Noise amplitude; sigma = 0 selects the deterministic flow.
    """

    n_modes: int
    coeffs: tuple = ()
    sigma: float = 1.0

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")
        coeffs = tuple(float(a) for a in self.coeffs)
        if len(coeffs) != self.n_modes:
            raise ValueError("need exactly one coefficient per frequency")
        if any(not math.isfinite(a) or a <= 0.0 for a in coeffs):
            raise ValueError("all kernel weights must be positive and finite")
        if not math.isfinite(self.sigma) or self.sigma < 0.0:
            raise ValueError("sigma must be finite and nonnegative")
        object.__setattr__(self, "coeffs", coeffs)

    # -- derived tables, one entry per eigenfunction index k = 0..2m-1 --

    @property
    def dim_u(self) -> int:
        return 2 * self.n_modes

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(1, self.n_modes + 1)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalue -j^2 for each eigenfunction (two per frequency)."""
        return -np.repeat(self.frequencies.astype(float) ** 2, 2)

    @property
    def coeff_per_eigenfunction(self) -> np.ndarray:
        return np.repeat(np.asarray(self.coeffs, dtype=float), 2)


def motivating_model(sigma: float = 1.0) -> CircleModel:
    """One-mode model with a_1 = pi, i.e. kernel cos(y - x)."""
    return CircleModel(n_modes=1, coeffs=(math.pi,), sigma=sigma)


@dataclass
class State:
    """Point (x, u) of the lifted process; x is stored wrapped to [0, 2*pi)."""

    x: float
    u: np.ndarray

    def __post_init__(self):
        if not math.isfinite(self.x):
            raise ValueError("angle must be finite")
        self.x = float(wrap_angle(self.x))
        self.u = np.array(self.u, dtype=float, copy=True)
        if self.u.ndim != 1:
            raise ValueError("u must be a flat coordinate vector")
        if not np.all(np.isfinite(self.u)):
            raise ValueError("u must be finite")


def eigen_table(model: CircleModel, x) -> tuple[np.ndarray, np.ndarray]:
    """Eigenfunction values and first derivatives at angles ``x``.

    ``x`` may be scalar or shape (N,); the result arrays have shape
    (..., 2m) with the cos entry of frequency j at column 2(j-1) and the sin
    entry at column 2(j-1)+1.
    """
    x = np.asarray(x, dtype=float)
    jx = np.multiply.outer(x, model.frequencies.astype(float))
    cos_jx = np.cos(jx) / SQRT_PI
    sin_jx = np.sin(jx) / SQRT_PI
    values = np.empty(x.shape + (model.dim_u,))
    derivs = np.empty_like(values)
    values[..., 0::2] = cos_jx
    values[..., 1::2] = sin_jx
    j = model.frequencies.astype(float)
    derivs[..., 0::2] = -j * sin_jx
    derivs[..., 1::2] = j * cos_jx
    return values, derivs


def eigen_eval(model: CircleModel, x: float) -> tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of the 2m eigenfunctions at one angle."""
    if not math.isfinite(x):
        raise ValueError("angle must be finite")
    values, derivs = eigen_table(model, float(x))
    return values, derivs


def kernel_eval(model: CircleModel, x: float, y: float) -> float:
    """Interaction kernel sum_k a_k e_k(x) e_k(y); symmetric in (x, y)."""
    ex, _ = eigen_table(model, float(x))
    ey, _ = eigen_table(model, float(y))
    return float(np.sum(model.coeff_per_eigenfunction * ex * ey))


def drift(model: CircleModel, s: State) -> tuple[float, np.ndarray]:
    """Drift of the lifted system at state ``s``.

    Returns (dx, du) with dx = -sum_k a_k e_k'(x) u_k and du_k = e_k(x).
    """
    values, derivs = eigen_table(model, s.x)
    dx = -float(np.dot(model.coeff_per_eigenfunction * derivs, s.u))
    return dx, values


def growth_bound_K(model: CircleModel, grid_points: int = GRID_POINTS) -> float:
    """Pathwise growth constant: max over a fine angle grid of ||e(y)||.

    For the Fourier table sum_k e_k(y)^2 = m/pi identically, so the grid max
    coincides with the exact supremum.
    """
    grid = np.linspace(0.0, TWO_PI, grid_points, endpoint=False)
    values, _ = eigen_table(model, grid)
    return float(np.sqrt(np.max(np.sum(values**2, axis=1))))


@dataclass(frozen=True)
class ProductMeasure:
    """Invariant product measure: uniform angle x independent centered Gaussians.

    Coordinate k has variance 1/(a_k |lambda_k|).  The measure does not depend
    on the noise level.
    """

    variances: tuple = ()

    def __post_init__(self):
        variances = tuple(float(v) for v in self.variances)
        if not variances or any(v <= 0 or not math.isfinite(v) for v in variances):
            raise ValueError("variances must be positive and finite")
        object.__setattr__(self, "variances", variances)

    @property
    def dim_u(self) -> int:
        return len(self.variances)

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.variances))

    def sample_batch(self, gen: np.random.Generator, count: int) -> tuple[np.ndarray, np.ndarray]:
        """Draw ``count`` states; angle first, then the Gaussian block."""
        x = gen.uniform(0.0, TWO_PI, size=count)
        u = gen.normal(0.0, 1.0, size=(count, self.dim_u)) * self.std
        return x, u


def invariant_measure(model: CircleModel) -> ProductMeasure:
    variances = 1.0 / (model.coeff_per_eigenfunction * np.abs(model.eigenvalues))
    return ProductMeasure(tuple(variances))


def measure_sample(measure: ProductMeasure, rng: RngStream) -> State:
    """One exact draw from the product measure, reproducible per stream."""
    gen = rng.generator()
    x, u = measure.sample_batch(gen, 1)
    return State(x=float(x[0]), u=u[0])


def measure_log_density(measure: ProductMeasure, s: State) -> float:
    """Log density of the product measure w.r.t. dx du at state ``s``."""
    var = np.asarray(measure.variances)
    u = np.asarray(s.u, dtype=float)
    if u.shape != var.shape:
        raise ValueError("state dimension does not match the measure")
    gauss = -0.5 * np.sum(np.log(TWO_PI * var) + u**2 / var)
    return float(-math.log(TWO_PI) + gauss)
