"""Separable source terms f(x, t) = p(t) g(x) and initial data.

Each time profile carries closed-form running integrals P = 1*p and
Ptilde = 1*1*p. The schemes only ever need P (CN-I) or Ptilde (CN-II), so
profiles that are singular at t = 0 never need to be evaluated pointwise.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SingularityError
from .mesh_fem import (
    BoxIndicator,
    FemSystem,
    Mesh,
    PowerLaw,
    Profile,
    ZeroProfile,
    l2_project,
    load_vector,
)

__all__ = [
    "TIME_KINDS",
    "SPATIAL_KEYS",
    "TimeProfile",
    "SourceTerm",
    "InitialDatum",
    "eval_p",
    "eval_P",
    "eval_Ptilde",
    "make_source",
    "make_initial",
    "spatial_profile",
]

TIME_KINDS = ("power", "one_plus_power", "cut_power", "zero")
SPATIAL_KEYS = ("xpow14", "box1d", "box2d", "zero")

# instrumentation: pointwise evaluations of p, split by singular/regular profile
stats: Counter = Counter()


@dataclass(frozen=True)
class TimeProfile:
    """Time factor p(t) of a separable source.

    kind
        ``power``: t**mu; ``one_plus_power``: 1 + t**mu;
        ``cut_power``: t**mu on [0, cut], zero afterwards; ``zero``.
    """

    kind: str = "power"
    mu: float = 0.0
    cut: float = 0.5

    def __post_init__(self):
        if self.kind not in TIME_KINDS:
            raise ParameterError(f"unknown time profile {self.kind!r}; choose from {TIME_KINDS}")
        if not self.mu > -1.0:
            raise ParameterError(f"exponent mu must exceed -1, got {self.mu}")
        if self.kind == "cut_power" and not self.cut > 0.0:
            raise ParameterError(f"cutoff must be positive, got {self.cut}")

    @property
    def singular(self) -> bool:
        return self.kind != "zero" and self.mu < 0.0

    def p(self, t):
        return eval_p(self, t)

    def P(self, t):
        return eval_P(self, t)

    def Ptilde(self, t):
        return eval_Ptilde(self, t)


def _as_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ParameterError("time must be nonnegative")
    return t


def _out(arr):
    return float(arr) if arr.ndim == 0 else arr


def eval_p(profile: TimeProfile, t):
    t = _as_time(t)
    stats["p_singular" if profile.singular else "p_regular"] += 1
    if profile.kind == "zero":
        return _out(np.zeros_like(t))
    if profile.mu < 0.0 and np.any(t == 0.0):
        raise SingularityError(f"t**{profile.mu} is singular at t = 0")
    tm = t**profile.mu
    if profile.kind == "power":
        val = tm
    elif profile.kind == "one_plus_power":
        val = 1.0 + tm
    else:
        val = np.where(t <= profile.cut, tm, 0.0)
    return _out(np.asarray(val, dtype=float))


def eval_P(profile: TimeProfile, t):
    """Running integral of p from 0 to t."""
    t = _as_time(t)
    if profile.kind == "zero":
        return _out(np.zeros_like(t))
    mu1 = profile.mu + 1.0
    if profile.kind == "power":
        val = t**mu1 / mu1
    elif profile.kind == "one_plus_power":
        val = t + t**mu1 / mu1
    else:
        val = np.minimum(t, profile.cut) ** mu1 / mu1
    return _out(np.asarray(val, dtype=float))


def eval_Ptilde(profile: TimeProfile, t):
    """Running integral of P from 0 to t."""
    t = _as_time(t)
    if profile.kind == "zero":
        return _out(np.zeros_like(t))
    mu1, mu2 = profile.mu + 1.0, profile.mu + 2.0
    if profile.kind == "power":
        val = t**mu2 / (mu1 * mu2)
    elif profile.kind == "one_plus_power":
        val = 0.5 * t * t + t**mu2 / (mu1 * mu2)
    else:
        c = profile.cut
        tc = np.minimum(t, c)
        val = tc**mu2 / (mu1 * mu2) + np.maximum(t - c, 0.0) * c**mu1 / mu1
    return _out(np.asarray(val, dtype=float))


def spatial_profile(key: str) -> Profile:
    """Map a configuration key onto a spatial profile."""
    if key == "xpow14":
        return PowerLaw(-0.25)
    if key in ("box1d", "box2d"):
        return BoxIndicator(0.25, 0.75)
    if key == "zero":
        return ZeroProfile()
    raise ParameterError(f"unknown spatial profile {key!r}; choose from {SPATIAL_KEYS}")


@dataclass(frozen=True, eq=False)
class SourceTerm:
    """p(t) g(x) with the load vector of g precomputed on a mesh."""

    time: TimeProfile
    spatial: Profile
    load: np.ndarray = field(repr=False)


def make_source(time: TimeProfile, spatial: Profile, mesh: Mesh) -> SourceTerm:
    load = load_vector(mesh, spatial)
    load.setflags(write=False)
    return SourceTerm(time, spatial, load)


@dataclass(frozen=True, eq=False)
class InitialDatum:
    spatial: Profile
    coeffs: np.ndarray = field(repr=False)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)


def make_initial(system: FemSystem, spatial: Profile | None = None) -> InitialDatum:
    """L2-project the initial datum; ``None`` or a zero profile gives exact zeros."""
    if spatial is None or isinstance(spatial, ZeroProfile):
        coeffs = np.zeros(system.num_dofs)
        spatial = ZeroProfile()
    else:
        coeffs = l2_project(system, spatial)
    coeffs.setflags(write=False)
    return InitialDatum(spatial, coeffs)
