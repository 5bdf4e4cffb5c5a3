import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from subcrank import sources
from subcrank.errors import ParameterError, SingularityError
from subcrank.mesh_fem import BoxIndicator, PowerLaw, assemble, build_mesh, load_vector
from subcrank.sources import TimeProfile, eval_p, eval_P, eval_Ptilde


def test_eval_p_examples():
    assert eval_p(TimeProfile("power", 0.5), 4.0) == 2.0
    assert eval_p(TimeProfile("cut_power", -0.5, 0.5), 0.7) == 0.0
    assert eval_p(TimeProfile("one_plus_power", 0.1), 1.0) == 2.0
    assert eval_p(TimeProfile("zero"), 0.0) == 0.0


def test_eval_p_singular_at_zero():
    with pytest.raises(SingularityError):
        eval_p(TimeProfile("power", -0.5), 0.0)


def test_eval_P_examples():
    assert eval_P(TimeProfile("power", 0.5), 1.0) == pytest.approx(2 / 3)
    assert eval_P(TimeProfile("cut_power", -0.5, 0.5), 1.0) == pytest.approx(np.sqrt(2))
    for kind in sources.TIME_KINDS:
        assert eval_P(TimeProfile(kind, -0.3), 0.0) == 0.0
        assert eval_Ptilde(TimeProfile(kind, -0.3), 0.0) == 0.0


def test_eval_Ptilde_examples():
    assert eval_Ptilde(TimeProfile("power", 0.0), 1.0) == pytest.approx(0.5)
    assert eval_Ptilde(TimeProfile("power", -0.5), 1.0) == pytest.approx(4 / 3)


def test_cut_power_Ptilde_symbolic():
    t, s = sympy.symbols("t s", positive=True)
    mu, c = sympy.Rational(-1, 2), sympy.Rational(1, 2)
    P = sympy.Piecewise((s ** (mu + 1) / (mu + 1), s <= c), (c ** (mu + 1) / (mu + 1), True))
    exact = sympy.integrate(P, (s, 0, 1))
    val = eval_Ptilde(TimeProfile("cut_power", -0.5, 0.5), 1.0)
    assert val == pytest.approx(float(exact), rel=1e-14)
    assert val == pytest.approx(1.178511, abs=1e-6)


@pytest.mark.parametrize("bad", [dict(kind="cubic"), dict(mu=-1.0), dict(kind="cut_power", cut=0.0)])
def test_profile_validation(bad):
    with pytest.raises(ParameterError):
        TimeProfile(**{"kind": "power", **bad})


def test_negative_time():
    with pytest.raises(ParameterError):
        eval_P(TimeProfile(), -1.0)


profiles = st.builds(
    TimeProfile,
    kind=st.sampled_from(["power", "one_plus_power", "cut_power"]),
    mu=st.floats(min_value=-0.9, max_value=2.0),
    cut=st.floats(min_value=0.2, max_value=0.8),
)


def _smooth_points(prof):
    pts = np.array([0.1, 0.37, 0.93])
    if prof.kind == "cut_power":
        pts = pts[np.abs(pts - prof.cut) > 0.05]
    return pts


@given(profiles)
def test_antiderivative_consistency(prof):
    pts = _smooth_points(prof)
    errs = []
    for d in (1e-2, 5e-3):
        dP = (eval_P(prof, pts + d) - eval_P(prof, pts - d)) / (2 * d)
        dPt = (eval_Ptilde(prof, pts + d) - eval_Ptilde(prof, pts - d)) / (2 * d)
        errs.append(np.abs(dP - eval_p(prof, pts)).max() + np.abs(dPt - eval_P(prof, pts)).max())
    # central differences converge at order two (or are already exact)
    assert errs[1] <= 0.3 * errs[0] + 1e-11


@given(profiles)
def test_monotone_and_convex(prof):
    t = np.linspace(0.0, 1.0, 401)
    P, Pt = eval_P(prof, t), eval_Ptilde(prof, t)
    assert np.all(np.diff(P) >= -1e-15)
    assert np.all(np.diff(Pt) >= -1e-15)
    assert np.all(np.diff(Pt, 2) >= -1e-12)


@given(st.floats(-0.9, 1.0), st.floats(0.1, 0.9))
def test_cut_continuity(mu, c):
    prof = TimeProfile("cut_power", mu, c)
    eps = 1e-15
    for f in (eval_P, eval_Ptilde):
        assert abs(f(prof, c + eps) - f(prof, c)) <= 1e-14
        assert abs(f(prof, c) - f(prof, c * (1 - 1e-16))) <= 1e-14


def test_vectorized():
    prof = TimeProfile("one_plus_power", 0.5)
    t = np.array([0.0, 0.25, 1.0])
    np.testing.assert_allclose(eval_P(prof, t), t + t**1.5 / 1.5)


def test_make_source_load():
    mesh = build_mesh(1, 16)
    src = sources.make_source(TimeProfile("power", -0.5), PowerLaw(), mesh)
    np.testing.assert_array_equal(src.load, load_vector(mesh, PowerLaw()))
    with pytest.raises(ValueError):
        src.load[0] = 1.0


def test_initial_datum():
    system = assemble(build_mesh(1, 8))
    zero = sources.make_initial(system)
    assert zero.is_zero and np.all(zero.coeffs == 0.0)
    box = sources.make_initial(system, BoxIndicator())
    assert not box.is_zero


def test_spatial_keys():
    assert isinstance(sources.spatial_profile("xpow14"), PowerLaw)
    assert sources.spatial_profile("box2d") == BoxIndicator(0.25, 0.75)
    with pytest.raises(ParameterError):
        sources.spatial_profile("gauss")
