"""Explicit decay-rate constants for the lifted circle dynamics.

All quantities are elementary functions of the mode table: the spectral gap of
the circle (1), the minimal weighted eigenvalue, eigenfunction sup-norms, and
the resulting packaged constants

    K1 = (L/(1+L))^2 / (4 (2 + (1+N2)^2)),
    K2 = (1+N2) S / (2 + (1+N2)^2),
    K3 = S^2 / (4 (2 + (1+N2)^2)),      S = sum_k |lambda_k|,

which enter the exponential rate

    rate(eta, sigma) = eta/(1+eta) * K1 sigma^2 / (1 + K2 sigma^2 + K3 sigma^4).

A second route goes through eps0 = 2 L2 L1 / ((1+L2)(2 + (1+N1+N2)^2)) with the
sigma-dependent N1; on the circle (spectral gap 1, eps0 < 1) the two routes are
algebraically identical, and both are reported so the identity stays visible.

Sup-norms of the derivative table and of sum_k e_k^2 are constants of the
Fourier family (j_max^2/pi and m/pi); they are taken in closed form and
cross-checked against a 10^4-point grid scan.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .model import GRID_POINTS, TWO_PI, CircleModel, eigen_table

SPECTRAL_GAP_CIRCLE = 1.0  # smallest nonzero eigenvalue of minus the Laplacian


@dataclass(frozen=True)
class HypoConstants:
    """Constant pack for one model; sigma-dependent entries use model.sigma."""

    sigma: float
    spectral_gap: float
    lambda1: float  # microscopic coercivity, spectral_gap * sigma^2 / 2
    lambda2: float  # macroscopic coercivity, min_k a_k |lambda_k|
    n1: float       # sigma^2/2 * sum_k |lambda_k|
    n2: float
    k1: float
    k2: float
    k3: float
    eps0: float

    def as_dict(self) -> dict:
        return asdict(self)


def _sup_norms(model: CircleModel, grid_points: int = GRID_POINTS) -> tuple[float, float]:
    """(sup_k ||e_k'||_inf^2, ||sum_k e_k^2||_inf), closed form with a grid check."""
    m = model.n_modes
    grad2 = float(m) ** 2 / math.pi
    sum_e2 = float(m) / math.pi
    grid = np.linspace(0.0, TWO_PI, grid_points, endpoint=False)
    values, derivs = eigen_table(model, grid)
    grad2_grid = float(np.max(derivs**2))
    sum_e2_grid = float(np.max(np.sum(values**2, axis=1)))
    if grad2_grid > grad2 * (1 + 1e-9) or grad2_grid < grad2 * (1 - 1e-3):
        raise AssertionError("grid scan disagrees with the closed-form gradient sup")
    if abs(sum_e2_grid - sum_e2) > 1e-9 * sum_e2:
        raise AssertionError("grid scan disagrees with the closed-form e^2 sum")
    return grad2, sum_e2


def compute_constants(model: CircleModel) -> HypoConstants:
    """Evaluate every displayed constant for ``model``."""
    if model.n_modes < 1:
        raise ValueError("model carries no modes")
    lam_abs = np.abs(model.eigenvalues)
    a_eig = model.coeff_per_eigenfunction
    n = model.dim_u
    sigma = model.sigma

    lambda2 = float(np.min(lam_abs * a_eig))
    sum_lam = float(np.sum(lam_abs))
    min_lam = float(np.min(lam_abs))
    grad2, sum_e2 = _sup_norms(model)
    n2 = 2.0 * (n / min_lam) * grad2 * math.sqrt(4.0 + float(np.sum(lam_abs * a_eig))) \
        + 4.0 * sum_e2

    den = 2.0 + (1.0 + n2) ** 2
    k1 = (lambda2 / (1.0 + lambda2)) ** 2 / (4.0 * den)
    k2 = (1.0 + n2) * sum_lam / den
    k3 = sum_lam**2 / (4.0 * den)

    lambda1 = SPECTRAL_GAP_CIRCLE * sigma**2 / 2.0
    n1 = sigma**2 / 2.0 * sum_lam
    eps0 = 2.0 * lambda2 * lambda1 / ((1.0 + lambda2) * (2.0 + (1.0 + n1 + n2) ** 2))

    return HypoConstants(sigma=sigma, spectral_gap=SPECTRAL_GAP_CIRCLE,
                         lambda1=lambda1, lambda2=lambda2, n1=n1, n2=n2,
                         k1=k1, k2=k2, k3=k3, eps0=eps0)


def decay_rate(constants: HypoConstants, eta: float, sigma: float) -> tuple[float, float]:
    """(rate, prefactor) at trade-off parameter eta and noise level sigma.

    The rate is increasing in eta, as is the prefactor sqrt(1 + 2 eta).
    """
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    s2 = sigma * sigma
    lam = eta / (1.0 + eta) * constants.k1 * s2 / (1.0 + constants.k2 * s2 + constants.k3 * s2 * s2)
    return lam, math.sqrt(1.0 + 2.0 * eta)


def decay_rate_from_eps0(constants: HypoConstants, eta: float) -> float:
    """Alternative rate through eps0 at the sigma baked into ``constants``.

    Equals ``decay_rate(constants, eta, constants.sigma)`` on the circle while
    eps0 < 1; kept separate so the identity is checkable.
    """
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    eps_eta = eta / (1.0 + eta) * constants.eps0 / max(1.0, constants.eps0)
    return eps_eta * constants.lambda2 / (4.0 * (1.0 + constants.lambda2))


def sigma_argmax(constants: HypoConstants) -> float:
    """Noise level maximizing the rate: stationarity gives K3 sigma^4 = 1."""
    return constants.k3 ** (-0.25)


def rate_vs_sigma_table(model: CircleModel, eta: float, sigmas) -> list[tuple[float, float]]:
    """Rows (sigma, rate) for a sigma grid; constants do not depend on sigma."""
    constants = compute_constants(model)
    return [(float(s), decay_rate(constants, eta, float(s))[0]) for s in sigmas]
