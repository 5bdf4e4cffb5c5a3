"""Fractional Crank-Nicolson time stepping, CN-I and CN-II.

Both schemes advance the time integral U of the solution. At step m they solve

    K U^m = r_m - tau^-alpha M sum_{j=1}^{m} sigma_j U^{m-j} - (alpha/2) S U^{m-1}

with K = tau^-alpha M + (1 - alpha/2) S, then recover the solution itself by
the BDF2 difference of U. CN-I feeds the running integral P of the source
into r_m; CN-II feeds the BDF2 difference of the double integral Ptilde, which
stays bounded when the source is singular at t = 0. With a zero source the two
coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels, linsolve
from .errors import ParameterError
from .mesh_fem import FemSystem
from .sources import InitialDatum, SourceTerm, make_initial

__all__ = ["SchemeConfig", "SchemeState", "RunResult", "init_state", "step", "recover_u", "run"]

_VARIANTS = {"cn1": "cn1", "cn-i": "cn1", "cn2": "cn2", "cn-ii": "cn2"}


def _normalize_variant(variant: str) -> str:
    try:
        return _VARIANTS[variant.lower()]
    except (KeyError, AttributeError):
        raise ParameterError(f"unknown scheme {variant!r}; use cn1 or cn2") from None


@dataclass(frozen=True, eq=False)
class SchemeConfig:
    """Everything needed for one run up to the final time ``T``."""

    variant: str
    alpha: float
    nsteps: int
    system: FemSystem
    sources: Sequence[SourceTerm] = ()
    initial: InitialDatum | None = None
    T: float = 1.0
    solver: str = "cholesky"

    def __post_init__(self):
        object.__setattr__(self, "variant", _normalize_variant(self.variant))
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.nsteps) < 1:
            raise ParameterError(f"nsteps must be >= 1, got {self.nsteps}")
        if not self.T > 0.0:
            raise ParameterError(f"final time must be positive, got {self.T}")
        object.__setattr__(self, "nsteps", int(self.nsteps))
        object.__setattr__(self, "sources", tuple(self.sources))
        if self.initial is None:
            object.__setattr__(self, "initial", make_initial(self.system))
        n = self.system.mass.shape[0]
        for src in self.sources:
            if src.load.shape != (n,):
                raise ParameterError("source load vector does not match the system size")
        if self.initial.coeffs.shape != (n,):
            raise ParameterError("initial datum does not match the system size")

    @property
    def tau(self) -> float:
        return self.T / self.nsteps


@dataclass(eq=False)
class SchemeState:
    """Time-stepping state: U^0..U^n (rows of ``history``) and the factored K."""

    history: np.ndarray
    factored: linsolve.SpdFactorization
    weights: kernels.GLWeights
    tau: float
    n: int = 0
    # right-hand side ingredients, precomputed once
    rhs_time: np.ndarray = field(default=None, repr=False)
    loads: np.ndarray = field(default=None, repr=False)
    init_time: np.ndarray = field(default=None, repr=False)
    mass_u0: np.ndarray = field(default=None, repr=False)


def _source_factors(config: SchemeConfig) -> np.ndarray:
    """Scalar time factor of each source at t_0..t_N, shape (n_sources, N+1)."""
    N, tau = config.nsteps, config.tau
    t = tau * np.arange(N + 1)
    out = np.zeros((len(config.sources), N + 1))
    for i, src in enumerate(config.sources):
        if config.variant == "cn1":
            out[i] = src.time.P(t)
        else:
            pt = np.concatenate([[0.0, 0.0], src.time.Ptilde(t)])
            out[i, 1:] = kernels.bdf2_diff((pt[3:], pt[2:-1], pt[1:-2]), tau)
    return out


def _initial_factors(config: SchemeConfig) -> np.ndarray:
    c = np.zeros(config.nsteps + 1)
    for k in range(1, config.nsteps + 1):
        c[k] = kernels.initial_coeff(k, config.alpha, config.tau)
    return c


def init_state(config: SchemeConfig) -> SchemeState:
    """Factor K and precompute the right-hand side factors; U^0 = 0."""
    a, tau = config.alpha, config.tau
    M, S = config.system.mass, config.system.stiffness
    K = tau**-a * M + (1.0 - 0.5 * a) * S
    fact = linsolve.factor(K, method=config.solver)
    ndof = M.shape[0]
    state = SchemeState(
        history=np.zeros((config.nsteps + 1, ndof)),
        factored=fact,
        weights=kernels.gl_weights(a, config.nsteps),
        tau=tau,
    )
    state.rhs_time = _source_factors(config)
    state.loads = (
        np.array([src.load for src in config.sources])
        if config.sources
        else np.zeros((0, ndof))
    )
    state.init_time = _initial_factors(config)
    state.mass_u0 = M @ config.initial.coeffs
    return state


def _rhs(state: SchemeState, config: SchemeConfig, m: int) -> np.ndarray:
    w_new, w_old = 1.0 - 0.5 * config.alpha, 0.5 * config.alpha
    src = w_new * state.rhs_time[:, m] + w_old * state.rhs_time[:, m - 1]
    ini = w_new * state.init_time[m] + w_old * state.init_time[m - 1]
    return src @ state.loads + ini * state.mass_u0


def step(state: SchemeState, config: SchemeConfig) -> SchemeState:
    """Advance from U^n to U^{n+1} in place and return the state."""
    m = state.n + 1
    if m > config.nsteps:
        raise ParameterError(f"already at the final step {config.nsteps}")
    a, tau = config.alpha, state.tau
    sigma = state.weights.sigma
    M, S = config.system.mass, config.system.stiffness
    # sum_{j=1}^{m} sigma_j U^{m-j}; M applied once after summing
    memory = sigma[m:0:-1] @ state.history[:m]
    b = _rhs(state, config, m) - tau**-a * (M @ memory) - 0.5 * a * (S @ state.history[m - 1])
    state.history[m] = state.factored.solve(b)
    state.n = m
    return state


def recover_u(state: SchemeState, n: int, tau: float | None = None) -> np.ndarray:
    """BDF2 difference of U at step n, with U^k = 0 for k < 0."""
    if not 1 <= n <= state.n:
        raise ParameterError(f"step index {n} outside 1..{state.n}")
    tau = state.tau if tau is None else tau
    H = state.history
    prev2 = H[n - 2] if n >= 2 else np.zeros_like(H[0])
    return kernels.bdf2_diff((H[n], H[n - 1], prev2), tau)


@dataclass(eq=False)
class RunResult:
    u_final: np.ndarray
    U_history: np.ndarray | None = None
    config: SchemeConfig | None = field(default=None, repr=False)

    def u_all(self) -> np.ndarray:
        """Solution at t_1..t_N, shape (N, ndof); needs the retained history."""
        if self.U_history is None:
            raise ParameterError("history was not retained for this run")
        H = np.concatenate([np.zeros((1, self.U_history.shape[1])), self.U_history])
        return kernels.bdf2_diff((H[2:], H[1:-1], H[:-2]), self.config.tau)


def run(config: SchemeConfig, keep_history: bool = True) -> RunResult:
    """Step to t_N and return the final solution (and U^0..U^N if kept)."""
    state = init_state(config)
    for _ in range(config.nsteps):
        step(state, config)
    u = recover_u(state, config.nsteps)
    return RunResult(u, state.history if keep_history else None, config)
