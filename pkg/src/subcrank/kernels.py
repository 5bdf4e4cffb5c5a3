"""Scalar kernels of the time discretization.

Grunwald-Letnikov weights, the second-order BDF difference, the generating
symbols of the fractional Crank-Nicolson schemes, a Lanczos Gamma function and
the coefficient multiplying the initial datum in the integrated equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "GLWeights",
    "SymbolConfig",
    "gl_weights",
    "bdf2_diff",
    "initial_coeff",
    "omega1",
    "omega2",
    "omega_cn",
    "gamma_fn",
]


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"fractional order must lie in (0, 1), got {alpha!r}")
    return alpha


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not tau > 0.0:
        raise ParameterError(f"step size must be positive, got {tau!r}")
    return tau


@dataclass(frozen=True)
class GLWeights:
    """Coefficients sigma_0..sigma_n of the power series of (1 - z)**alpha."""

    alpha: float
    sigma: np.ndarray

    def __post_init__(self):
        self.sigma.setflags(write=False)

    def __len__(self) -> int:
        return len(self.sigma)

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.sigma)

    def series(self, z: complex) -> complex:
        """Evaluate sum_j sigma_j z**j by Horner's rule."""
        acc = 0.0 * z
        for s in self.sigma[::-1]:
            acc = acc * z + s
        return acc


@dataclass(frozen=True)
class SymbolConfig:
    alpha: float
    tau: float

    def __post_init__(self):
        _check_alpha(self.alpha)
        _check_tau(self.tau)

    def omega1(self, z):
        return omega1(z, self.tau)

    def omega2(self, z):
        return omega2(z, self.tau)

    def omega(self, z):
        return omega_cn(z, self.tau, self.alpha)


def gl_weights(alpha: float, n: int) -> GLWeights:
    """Grunwald-Letnikov weights via sigma_j = (1 - (alpha + 1)/j) sigma_{j-1}."""
    alpha = _check_alpha(alpha)
    n = int(n)
    if n < 0:
        raise ParameterError(f"weight count must be nonnegative, got {n}")
    factors = np.ones(n + 1)
    j = np.arange(1, n + 1, dtype=float)
    factors[1:] = 1.0 - (alpha + 1.0) / j
    # cumprod is the forward recursion; every factor lies in (-alpha, 1)
    return GLWeights(alpha, np.cumprod(factors))


def bdf2_diff(values, tau: float) -> float:
    """BDF2 difference (3/2 g_n - 2 g_{n-1} + 1/2 g_{n-2}) / tau.

    ``values`` holds ``(g_n, g_{n-1}, g_{n-2})``; pass 0 for indices below 0.
    Entries may be scalars or arrays of equal shape.
    """
    g0, g1, g2 = values
    return (1.5 * g0 - 2.0 * g1 + 0.5 * g2) / tau


def initial_coeff(n: int, alpha: float, tau: float) -> float:
    """BDF2 difference of t**(2-alpha)/Gamma(3-alpha) at t_n, zero-extended for t <= 0."""
    if n <= 0:
        raise ParameterError(f"step index must be >= 1, got {n}")
    alpha = _check_alpha(alpha)
    tau = _check_tau(tau)
    p = 2.0 - alpha
    vals = [(k * tau) ** p if k > 0 else 0.0 for k in (n, n - 1, n - 2)]
    return bdf2_diff(vals, tau) / gamma_fn(3.0 - alpha)


def omega1(z, tau: float):
    """Symbol of the backward Euler difference, (1 - z)/tau."""
    return (1.0 - z) / tau


def omega2(z, tau: float):
    """Symbol of the BDF2 difference, (3/2 - 2z + z**2/2)/tau."""
    return (1.5 - 2.0 * z + 0.5 * z * z) / tau


def omega_cn(z, tau: float, alpha: float):
    """Fractional Crank-Nicolson symbol (1 - z) / (tau * (1 - a/2 + a/2 z)**(1/a)).

    Principal branch; raises DomainError when the base 1 - a/2 + a/2 z has
    nonpositive real part.
    """
    alpha = _check_alpha(alpha)
    z = np.asarray(z, dtype=complex)
    base = 1.0 - 0.5 * alpha + 0.5 * alpha * z
    if np.any(base.real <= 0.0):
        raise DomainError("1 - alpha/2 + alpha/2*z must have positive real part")
    out = (1.0 - z) / (tau * base ** (1.0 / alpha))
    return out[()] if out.ndim == 0 else out


# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    x = float(x)
    if not x > 0.0:
        raise ParameterError(f"gamma_fn needs a positive argument, got {x!r}")
    if x < 0.5:
        # reflection keeps the series in its accurate range
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc
