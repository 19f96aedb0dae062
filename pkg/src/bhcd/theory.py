"""Closed-form predictions for two-class DC-SBM spectral clustering at r = zeta."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import erf

from .graph import LabelVector


@dataclass(frozen=True)
class TheoryParams:
    c_in: float
    c_out: float
    phi: float = 1.0

    @property
    def c(self) -> float:
        return (self.c_in + self.c_out) / 2

    @property
    def alpha(self) -> float:
        return (self.c_in - self.c_out) / np.sqrt(self.c)

    @property
    def alpha_c(self) -> float:
        return 2 / np.sqrt(self.phi)

    @property
    def detectable(self) -> bool:
        return abs(self.alpha) > self.alpha_c

    def zeta_at(self, alpha: float) -> float:
        """zeta as a function of alpha at fixed c: 2 sqrt(c) / alpha."""
        return 2 * np.sqrt(self.c) / alpha

    @property
    def zeta(self) -> float:
        return self.zeta_at(self.alpha)

    @property
    def f(self) -> float:
        """f_alpha = sqrt(c - alpha^2/4) / alpha, evaluated as sqrt(c_in c_out)/(c_in - c_out).

        The second form avoids the cancellation in c - alpha^2/4 near c_out = 0.
        """
        return float(np.sqrt(self.c_in * self.c_out) / (self.c_in - self.c_out))

    @property
    def one_minus_mu(self) -> float:
        """Predicted mean of sigma_i x_i for the eigenvector scaled to norm sqrt(n)."""
        cphi = self.c * self.phi
        num = cphi - self.zeta**2
        return float(np.sqrt(num / (cphi - 1))) if num > 0 else 0.0

    @property
    def mu(self) -> float:
        return 1 - self.one_minus_mu

    @property
    def lam(self) -> float:
        """Informative eigenvalue of D - zeta A: -(zeta^2 - 1)."""
        return -(self.zeta**2 - 1)

    def beta(self, degrees) -> np.ndarray:
        return 2 / np.sqrt(np.asarray(degrees, dtype=float))

    def band(self) -> tuple[float, float]:
        """1 - mu +/- 2 f / sqrt(c)."""
        half = 2 * abs(self.f) / np.sqrt(self.c)
        return self.one_minus_mu - half, self.one_minus_mu + half


def predicted_overlap_per_node(degrees, params: TheoryParams) -> np.ndarray:
    d = np.asarray(degrees, dtype=float)
    if not params.detectable:
        return np.zeros_like(d)
    cphi = params.c * params.phi
    if cphi <= 1:
        raise ValueError("c * phi must exceed 1")
    a2 = params.alpha**2
    denom = 8 * params.c - 2 * a2
    ratio = (cphi - params.zeta**2) / (cphi - 1)
    if denom <= 0:  # c_out = 0: noiseless limit
        return (d > 0).astype(float)
    return erf(np.sqrt(a2 * d / denom * ratio))


def predicted_overlap(degrees, params: TheoryParams) -> float:
    """Mean over nodes of erf(sqrt(alpha^2 d_i/(8c - 2 alpha^2) (c phi - zeta^2)/(c phi - 1))).

    Returns 0 below the detectability threshold (``params.detectable`` False).
    """
    return float(np.mean(predicted_overlap_per_node(degrees, params)))


class EigvecStats(NamedTuple):
    class_means: np.ndarray
    residuals: np.ndarray
    scaled: np.ndarray


def eigvec_stats(x, truth: LabelVector, degrees, params: TheoryParams) -> EigvecStats:
    """Compare an informative eigenvector with the Gaussian perturbation model.

    ``x`` is rescaled to squared norm n and oriented to agree with the truth.
    Class means are of sigma_i x_i (model: 1 - mu); residuals
    (x_i - sigma_i (1 - mu)) sqrt(d_i) / (2 f) should be standard normal.
    """
    if truth.k != 2:
        raise ValueError("eigenvector statistics are defined for two classes")
    x = np.asarray(x, dtype=float)
    sigma = truth.to_sigma()
    d = np.asarray(degrees, dtype=float)
    x = x * np.sqrt(len(x)) / np.linalg.norm(x)
    if sigma @ x < 0:
        x = -x
    sx = sigma * x
    means = np.array([sx[truth.labels == c].mean() for c in range(2)])
    resid = (x - sigma * params.one_minus_mu) * np.sqrt(d) / (2 * abs(params.f))
    return EigvecStats(means, resid, x)


def tau_spectrum(C, pi) -> np.ndarray:
    """Eigenvalues of C Pi, decreasing (via the symmetric Pi^1/2 C Pi^1/2)."""
    C = np.asarray(C, dtype=float)
    s = np.sqrt(np.asarray(pi, dtype=float))
    return np.linalg.eigvalsh(s[:, None] * C * s[None, :])[::-1]


def detectable_count(C, pi, phi: float) -> int:
    """Number of eigenvalues tau_p of C Pi above sqrt(c / phi), trivial tau_1 = c included."""
    C = np.asarray(C, dtype=float)
    pi = np.asarray(pi, dtype=float)
    rows = C @ pi
    if np.abs(rows - rows[0]).max() > 1e-8 * max(1.0, abs(rows[0])):
        raise ValueError("C Pi 1 is not a constant vector")
    c = rows[0]
    return int((tau_spectrum(C, pi) > np.sqrt(c / phi)).sum())


def recovery_metric(k_hat: int, k_d: int) -> float:
    if k_hat < 1 or k_d < 1:
        raise ValueError("class counts must be positive")
    return 2 * (k_hat - k_d) / (k_hat + k_d)
