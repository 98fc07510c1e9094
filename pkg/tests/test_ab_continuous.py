from __future__ import annotations

import numpy as np
import pytest

from abfrac import ab_continuous as ac
from abfrac.ab_continuous import AccuracyWarning, Composition, MeshFn, Side, UniformMesh
from abfrac.ab_discrete import ABParams
from abfrac.quadrature import convergence_order
from abfrac.special import DomainError, ml_two

P = ABParams(0.5, 1.2)


def _fn(mesh, f, df=None):
    return MeshFn.from_function(mesh, f, df)


def _pair(mesh):
    f = _fn(mesh, lambda t: np.cos(2 * t) + t, lambda t: -2 * np.sin(2 * t) + 1)
    g = _fn(mesh, lambda t: np.exp(t) * np.sin(3 * t + 1), lambda t: np.exp(t) * (np.sin(3 * t + 1) + 3 * np.cos(3 * t + 1)))
    return f, g


def test_mesh():
    m = UniformMesh.parse("0:2:5")
    assert m.h == 0.5 and m.refined().n_points == 9
    with pytest.raises(ValueError):
        UniformMesh(1.0, 1.0, 5)
    with pytest.raises(ValueError, match="a:b:n"):
        UniformMesh.parse("0:1")


def test_constant_derivatives():
    mesh = UniformMesh(0.0, 1.0, 41)
    c = _fn(mesh, lambda t: 3.0 + 0 * t, lambda t: 0 * t)
    k = ac.kernel_on_mesh(mesh, P)
    np.testing.assert_allclose(ac.abr_deriv_left(c, P).values, 3.0 * P.scale * k, rtol=1e-13)
    np.testing.assert_allclose(ac.abc_deriv_left(c, P).values, 0.0, atol=0.0)


def test_caputo_of_linear_is_exact():
    mesh = UniformMesh(0.0, 1.0, 41)
    f = _fn(mesh, lambda t: 2 * t, lambda t: 2 + 0 * t)
    t = mesh.t
    want = P.scale * 2 * np.array([x * ml_two(0.5, 2.0, P.lam * x**0.5) for x in t])
    np.testing.assert_allclose(ac.abc_deriv_left(f, P).values, want, rtol=1e-12, atol=1e-15)


def test_slope_fallback_warns():
    mesh = UniformMesh(0.0, 1.0, 41)
    f = _fn(mesh, lambda t: 2 * t)
    with pytest.warns(AccuracyWarning):
        got = ac.abc_deriv_left(f, P)
    exact = ac.abc_deriv_left(_fn(mesh, lambda t: 2 * t, lambda t: 2 + 0 * t), P)
    np.testing.assert_allclose(got.values, exact.values, rtol=1e-12, atol=1e-15)


def test_fd4_agrees_with_exact_derivative():
    mesh = UniformMesh(0.0, 1.0, 401)
    f, _ = _pair(mesh)
    ex = ac.abr_deriv_left(f, P)
    fd = ac.abr_deriv_left(f, P, "fd4")
    # the kernel derivative is singular at t = a, so compare away from it
    np.testing.assert_allclose(fd.values[20:], ex.values[20:], rtol=1e-3)


def test_rl_integral_of_constant():
    mesh = UniformMesh(0.0, 2.0, 21)
    one = _fn(mesh, lambda t: 1 + 0 * t)
    from scipy.special import gamma

    np.testing.assert_allclose(ac.rl_integral_left(one, 0.3).values, mesh.t**0.3 / gamma(1.3), rtol=1e-13)
    np.testing.assert_allclose(ac.rl_integral_right(one, 0.3).values, (2 - mesh.t) ** 0.3 / gamma(1.3), rtol=1e-13, atol=1e-15)


def test_reflection_duality():
    mesh = UniformMesh(0.0, 1.0, 201)
    f, _ = _pair(mesh)
    qf = ac.q_reflect_mesh(f)
    np.testing.assert_allclose(ac.abc_deriv_left(qf, P).values, ac.abc_deriv_right(f, P).values[::-1], rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(ac.abr_deriv_left(qf, P).values, ac.abr_deriv_right(f, P).values[::-1], rtol=1e-12, atol=1e-12)


def test_domain():
    mesh = UniformMesh(0.0, 1.0, 11)
    f = _fn(mesh, lambda t: t)
    with pytest.raises(DomainError):
        ac.abr_deriv_left(f, ABParams(1.2))
    with pytest.raises(ValueError):
        ac.swap_identity_check(f, _fn(UniformMesh(0.0, 1.0, 21), lambda t: t), P)


def _orders(check, n0=201):
    meshes = [UniformMesh(0.0, 1.0, n0)]
    meshes += [meshes[-1].refined(), meshes[-1].refined().refined()]
    res = [check(*_pair(m)) for m in meshes]
    assert res[0] > res[1] > res[2]
    return convergence_order([m.h for m in meshes], res)


@pytest.mark.parametrize(
    "check",
    [
        lambda f, g: ac.ibp_abr_continuous_check(f, g, P),
        lambda f, g: ac.ibp_abc_continuous_check(f, g, P, Side.LEFT),
        lambda f, g: ac.ibp_abc_continuous_check(f, g, P, Side.RIGHT),
        lambda f, g: ac.swap_identity_check(f, g, P),
        lambda f, g: ac.relation_residual(f, P, Side.LEFT),
        lambda f, g: ac.relation_residual(f, P, Side.RIGHT),
    ],
    ids=["abr-ibp", "abc-ibp-left", "abc-ibp-right", "swap", "relation-left", "relation-right"],
)
def test_second_order_identities(check):
    assert _orders(check) > 1.8


def test_uncorrected_ibp_is_slower():
    plain = _orders(lambda f, g: ac.ibp_abr_continuous_check(f, g, P, corrected=False))
    assert 1.3 < plain < 1.7


@pytest.mark.parametrize("side", list(Side))
@pytest.mark.parametrize("comp", list(Composition))
def test_inverse_laws_converge(side, comp):
    order = _orders(lambda f, g: ac.inverse_law_residual(f, P, side, comp))
    assert order > 1.3


def test_csv_round_trip(tmp_path):
    mesh = UniformMesh(-1.0, 1.0, 9)
    f = _fn(mesh, np.sin, np.cos)
    path = tmp_path / "f.csv"
    ac.write_meshfn(path, f)
    g = ac.read_meshfn(path)
    assert g.mesh == mesh
    np.testing.assert_array_equal(g.values, f.values)
    np.testing.assert_array_equal(g.derivative_values, f.derivative_values)


@pytest.mark.parametrize(
    ("text", "msg"),
    [
        ("t,v\n", "line 1"),
        ("t,value\n0,1\n0.5,1\n1.5,1\n", "line 4"),
        ("t,value\n0,1\n0.5,x\n1,2\n", "line 3"),
        ("t,value\n0,1\n", "3 rows"),
    ],
)
def test_csv_diagnostics(text, msg):
    with pytest.raises(ValueError, match=msg):
        ac.meshfn_from_csv(text)
