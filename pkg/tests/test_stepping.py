import math

import numpy as np
import pytest
import scipy.sparse as sp

from subcrank import linsolve
from subcrank.errors import ParameterError
from subcrank.mesh_fem import BoxIndicator, FemSystem, PowerLaw, assemble, build_mesh, l2_norm
from subcrank.sources import SourceTerm, TimeProfile, make_initial, make_source
from subcrank.stepping import SchemeConfig, init_state, recover_u, run, step


@pytest.fixture(scope="module")
def scalar_system():
    # one unknown with M = 1, S = 0
    return FemSystem(build_mesh(1, 2), sp.csr_matrix([[1.0]]), sp.csr_matrix([[0.0]]))


@pytest.fixture(scope="module")
def system_1d():
    return assemble(build_mesh(1, 32))


def _const_source(g=1.0):
    return SourceTerm(TimeProfile("power", 0.0), None, np.array([g]))


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_scalar_first_step_cn1(scalar_system, alpha):
    tau, g = 0.01, 2.0
    cfg = SchemeConfig("cn1", alpha, 10, scalar_system, [_const_source(g)], T=10 * tau)
    state = step(init_state(cfg), cfg)
    assert state.history[1, 0] == pytest.approx((1 - alpha / 2) * tau ** (1 + alpha) * g, rel=1e-13)
    u1 = recover_u(state, 1)[0]
    assert u1 == pytest.approx(1.5 * (1 - alpha / 2) * tau**alpha * g, rel=1e-13)


def test_scalar_first_step_approximates_exact(scalar_system):
    # exact solution of D^a u = 1 is t^a / Gamma(1 + a)
    tau = 1e-3
    cfg = SchemeConfig("cn1", 0.5, 1, scalar_system, [_const_source()], T=tau)
    u1 = run(cfg).u_final[0] / tau**0.5
    assert u1 == pytest.approx(1.125)
    assert abs(u1 - 1 / math.gamma(1.5)) < 0.01


def test_scalar_first_step_cn2(scalar_system):
    tau, a = 0.01, 0.5
    cfg = SchemeConfig("cn2", a, 4, scalar_system, [_const_source()], T=4 * tau)
    state = step(init_state(cfg), cfg)
    # D_tau Ptilde(t_1) = 1.5 * (tau^2 / 2) / tau
    assert state.history[1, 0] == pytest.approx((1 - a / 2) * 0.75 * tau * tau**a, rel=1e-13)


def test_zero_data_stays_zero(system_1d):
    res = run(SchemeConfig("cn2", 0.4, 20, system_1d))
    assert np.all(res.U_history == 0.0)
    assert np.all(res.u_final == 0.0)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
def test_homogeneous_schemes_coincide(system_1d, alpha):
    init = make_initial(system_1d, BoxIndicator())
    a = run(SchemeConfig("cn1", alpha, 40, system_1d, [], init))
    b = run(SchemeConfig("cn2", alpha, 40, system_1d, [], init))
    assert np.max(np.abs(a.U_history - b.U_history)) <= 1e-14
    assert np.max(np.abs(a.u_all() - b.u_all())) <= 1e-14


class _FakeState:
    def __init__(self, history, tau):
        self.history = history
        self.tau = tau
        self.n = len(history) - 1


def test_recover_u_examples():
    tau = 0.1
    v = np.array([1.0, -2.0, 3.0])
    lin = _FakeState(np.array([k * tau * v for k in range(6)]), tau)
    quad = _FakeState(np.array([(k * tau) ** 2 * v for k in range(6)]), tau)
    np.testing.assert_allclose(recover_u(lin, 1), 1.5 * lin.history[1] / tau)
    for n in range(2, 6):
        np.testing.assert_allclose(recover_u(lin, n), v, rtol=1e-12)
        np.testing.assert_allclose(recover_u(quad, n), 2 * n * tau * v, rtol=1e-12)
    with pytest.raises(ParameterError):
        recover_u(lin, 0)


def test_u_all_matches_recover(system_1d):
    src = [make_source(TimeProfile("power", 0.3), PowerLaw(), system_1d.mesh)]
    cfg = SchemeConfig("cn1", 0.6, 12, system_1d, src)
    res = run(cfg)
    state = init_state(cfg)
    for _ in range(12):
        step(state, cfg)
    for n in (1, 2, 7, 12):
        np.testing.assert_array_equal(res.u_all()[n - 1], recover_u(state, n))
    with pytest.raises(ParameterError):
        step(state, cfg)


def test_single_factorization_per_run(system_1d):
    init = make_initial(system_1d, BoxIndicator())
    before = linsolve.stats["factor"]
    solves = linsolve.stats["solve"]
    run(SchemeConfig("cn1", 0.5, 25, system_1d, [], init))
    assert linsolve.stats["factor"] - before == 1
    assert linsolve.stats["solve"] - solves == 25


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_homogeneous_bounded(system_1d, alpha):
    init = make_initial(system_1d, BoxIndicator())
    res = run(SchemeConfig("cn2", alpha, 80, system_1d, [], init))
    norms = [l2_norm(system_1d, u) for u in res.u_all()]
    assert max(norms) <= 2.0 * l2_norm(system_1d, init.coeffs)


def test_cg_matches_cholesky(system_1d):
    src = [make_source(TimeProfile("power", -0.5), PowerLaw(), system_1d.mesh)]
    a = run(SchemeConfig("cn2", 0.5, 30, system_1d, src)).u_final
    b = run(SchemeConfig("cn2", 0.5, 30, system_1d, src, solver="cg")).u_final
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_deterministic(system_1d):
    src = [make_source(TimeProfile("cut_power", -0.5, 0.5), PowerLaw(), system_1d.mesh)]
    cfg = SchemeConfig("cn2", 0.7, 50, system_1d, src)
    assert run(cfg).u_final.tobytes() == run(cfg).u_final.tobytes()


def test_cn2_restores_order_quick(system_1d):
    src = [make_source(TimeProfile("power", -0.7), PowerLaw(), system_1d.mesh)]
    us = {N: run(SchemeConfig("cn2", 0.5, N, system_1d, src), keep_history=False).u_final for N in (40, 80, 160, 320)}
    e = [l2_norm(system_1d, us[N] - us[N // 2]) for N in (80, 160, 320)]
    assert abs(np.log2(e[-2] / e[-1]) - 2.0) <= 0.1


@pytest.mark.parametrize(
    "kwargs",
    [dict(variant="cn3"), dict(alpha=1.0), dict(nsteps=0), dict(T=0.0)],
)
def test_config_validation(system_1d, kwargs):
    base = dict(variant="cn1", alpha=0.5, nsteps=4, system=system_1d)
    with pytest.raises(ParameterError):
        SchemeConfig(**{**base, **kwargs})


def test_variant_aliases(system_1d):
    assert SchemeConfig("CN-II", 0.5, 4, system_1d).variant == "cn2"
    assert SchemeConfig("cn-i", 0.5, 4, system_1d).variant == "cn1"
    cfg = SchemeConfig("cn1", 0.5, 8, system_1d, T=2.0)
    assert cfg.tau * cfg.nsteps == pytest.approx(2.0, abs=1e-12)
