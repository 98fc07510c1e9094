from __future__ import annotations

import json

import numpy as np
import pytest
import scipy.linalg as sla

from abfrac import sturm_liouville as sl
from abfrac.ab_continuous import MeshFn, UniformMesh
from abfrac.ab_discrete import ABParams, abr_diff_left, abr_diff_right
from abfrac.discrete import Grid, GridFn
from abfrac.quadrature import convergence_order
from abfrac.special import DomainError


def _problem(grid, alpha=0.3, flavor=sl.Flavor.ABR_ABR, p=None, q=None, r=None, rng=None):
    n = grid.size
    rng = rng or np.random.default_rng(5)
    p = rng.uniform(0.5, 2.0, n) if p is None else p
    q = rng.standard_normal(n) if q is None else q
    r = rng.uniform(0.5, 2.0, n) if r is None else r
    return sl.SLProblem(grid, GridFn(grid, p), GridFn(grid, q), GridFn(grid, r), ABParams(alpha), flavor)


# {{{ matrices


@pytest.mark.parametrize("alpha", [0.1, 0.45])
def test_matrices_are_transposes(alpha):
    grid = Grid(0, 30)
    p = ABParams(alpha, 1.5)
    kl, kr = sl.matrix_abr_left(grid, p), sl.matrix_abr_right(grid, p)
    assert kl.shape == (29, 29)
    np.testing.assert_allclose(kl.T, kr, rtol=0, atol=1e-13 * np.abs(kl).max())
    # lower triangular, as the left operator only looks back
    assert np.all(np.triu(kl, 1) == 0)


def test_matrix_columns_are_operator_values():
    grid = Grid(0, 8)
    p = ABParams(0.2)
    x = np.random.default_rng(1).standard_normal(7)
    xf = GridFn(grid, np.r_[0.0, x, 0.0])
    np.testing.assert_allclose(sl.matrix_abr_left(grid, p) @ x, abr_diff_left(xf, p).values[:-1], rtol=1e-13)
    np.testing.assert_allclose(sl.matrix_abr_right(grid, p) @ x, abr_diff_right(xf, p).values[1:], rtol=1e-13)


def test_assembled_operator_is_symmetric():
    prob = _problem(Grid(0, 40))
    assert sl.symmetry_defect(sl.assemble_abr_slp(prob)) <= 1e-12


# }}}


# {{{ ABR-ABR


@pytest.mark.parametrize("b", [21, 201])
def test_symmetric_solve(b):
    prob = _problem(Grid(0, b))
    res = sl.solve_abr_slp(prob)
    n = b - 1
    assert res.eigenvalues.shape == (n,) and res.eigenvectors.shape == (n, n)
    assert res.max_imag == 0.0
    assert np.max(res.residual_norms) <= 1e-10
    assert res.diagnostics["gram_defect"] <= 1e-10
    assert list(res.t) == list(range(1, b))
    # independent generalized solver
    l2 = sl.assemble_abr_slp(prob)
    w = sla.eigh(l2, np.diag(prob.r.values[1:-1]), eigvals_only=True)
    np.testing.assert_allclose(res.eigenvalues.real, w, rtol=1e-9, atol=1e-9 * np.abs(w).max())


def test_positive_spectrum_without_potential():
    grid = Grid(0, 25)
    prob = _problem(grid, q=np.zeros(grid.size))
    assert np.all(sl.solve_abr_slp(prob).eigenvalues.real > 0)


def test_asymmetric_matrix_rejected():
    m = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(sl.AsymmetricMatrixError):
        sl.solve_symmetric_slp(m, np.ones(2))


def test_problem_validation():
    grid = Grid(0, 10)
    with pytest.raises(DomainError):
        _problem(grid, p=-np.ones(11))
    with pytest.raises(DomainError):
        _problem(grid, r=np.zeros(11))
    with pytest.raises(ValueError):
        _problem(Grid(0, 2))
    with pytest.raises(DomainError):
        _problem(grid, alpha=0.7)
    with pytest.raises(ValueError):
        sl.assemble_abc_slp(_problem(grid), sl.BCSpec(1, 0, 0, 1))


# }}}


# {{{ ABC-ABR pencil


def test_pencil_shapes_and_rows():
    grid = Grid(0, 12)
    prob = _problem(grid, flavor=sl.Flavor.ABC_ABR)
    a, b = sl.assemble_abc_slp(prob, sl.BCSpec(1.0, 0.5, 0.0, 1.0))
    assert a.shape == b.shape == (12, 12)
    assert np.all(b[[0, -1]] == 0)
    np.testing.assert_array_equal(np.diag(b)[1:-1], prob.r.values[1:-2])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_pencil_solution(seed):
    rng = np.random.default_rng(seed)
    grid = Grid(0, 22)
    n = grid.size
    p = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
    prob = _problem(grid, flavor=sl.Flavor.ABC_ABR, p=p, rng=rng)
    bc = sl.BCSpec(*rng.uniform(-2, 2, 4))
    res = sl.solve_abc_slp(prob, bc)
    assert np.max(res.diagnostics["scaled_residuals"]) <= 1e-10
    assert np.max(res.diagnostics["bc_residuals"]) <= 1e-10
    assert res.orthogonality_defect <= 1e-6
    assert np.isfinite(res.max_imag)
    assert len(res.diagnostics["dropped_row_residuals"]) == res.eigenvalues.size
    assert "bc_b_minus_1_coefficient" in res.diagnostics


def test_pencil_spectrum_real_for_constant_coefficients():
    grid = Grid(0, 22)
    n = grid.size
    prob = _problem(grid, flavor=sl.Flavor.ABC_ABR, p=np.ones(n), q=np.zeros(n), r=np.ones(n))
    res = sl.solve_abc_slp(prob, sl.BCSpec(1.0, 0.0, 0.0, 1.0))
    assert res.max_imag <= 1e-10 * np.abs(res.eigenvalues).max()
    assert res.diagnostics["reduced_symmetry_defect"] <= 1e-10


def test_degenerate_condition_at_right_end():
    # at b-1 the condition reduces to [d1 (1-alpha) + d2 B] x(b-1); make that vanish
    grid = Grid(0, 10)
    alpha = 0.3
    prob = _problem(grid, alpha=alpha, flavor=sl.Flavor.ABC_ABR)
    with pytest.raises(sl.SingularPivotError, match="BC2"):
        sl.solve_abc_slp(prob, sl.BCSpec(1.0, 0.0, 1.0, -(1 - alpha)))


def test_void_conditions_rejected():
    with pytest.raises(ValueError):
        sl.BCSpec(0, 0, 1, 1)
    with pytest.raises(ValueError):
        sl.BCSpec(1, 1, 0, 0)


def test_pencil_rejects_nonzero_constraint_rows():
    with pytest.raises(ValueError):
        sl.solve_pencil(np.eye(4), np.eye(4))


# }}}


def test_result_serialization():
    prob = _problem(Grid(0, 6))
    res = sl.solve_abr_slp(prob)
    doc = json.loads(json.dumps(res.to_dict()))
    assert len(doc["eigenvalues"]["real"]) == 5
    lines = res.eigenvector_csv().splitlines()
    assert lines[0] == "t,v1,v2,v3,v4,v5"
    assert len(lines) == 6


# {{{ continuous forms


_CASES = [
    (lambda t: t**2 + 1, lambda t: np.cos(t), lambda t: 1 + t, lambda t: 2 + 0 * t),
    (lambda t: np.exp(t), lambda t: 1 - t + t**3, lambda t: 2 + np.sin(t), lambda t: t),
]


def _cont(mesh, case, alpha=0.5):
    u, v, p, q = (MeshFn.from_function(mesh, c) for c in case)
    one = MeshFn.from_function(mesh, lambda t: 1 + 0 * t)
    return u, v, sl.ContinuousSLProblem(mesh, p, q, one, ABParams(alpha))


def _meshes(n0=201):
    m = UniformMesh(0.0, 1.0, n0)
    return [m, m.refined(), m.refined().refined()]


@pytest.mark.parametrize("case", _CASES)
def test_form_symmetry_order(case):
    meshes = _meshes()
    res = [sl.continuous_form_symmetry(*_cont(m, case)) for m in meshes]
    assert convergence_order([m.h for m in meshes], res) >= 1.5


@pytest.mark.parametrize("case", _CASES)
def test_caputo_form_identity_order(case):
    meshes = _meshes()
    res = [sl.continuous_abc_form_check(*_cont(m, case)) for m in meshes]
    assert res[0] > res[1] > res[2]
    assert convergence_order([m.h for m in meshes], res) >= 1.6


def test_forms_reduce_without_leading_coefficient():
    mesh = UniformMesh(0.0, 1.0, 101)
    case = (_CASES[0][0], _CASES[0][1], lambda t: 0 * t, _CASES[0][3])
    u, v, prob = _cont(mesh, case)
    assert sl.continuous_form_symmetry(u, v, prob) <= 1e-14
    assert sl.continuous_abc_form_check(u, v, prob) <= 1e-14


def test_continuous_problem_validation():
    mesh = UniformMesh(0.0, 1.0, 11)
    one = MeshFn.from_function(mesh, lambda t: 1 + 0 * t)
    with pytest.raises(DomainError):
        sl.ContinuousSLProblem(mesh, one, one, one * 0.0, ABParams(0.5))
    with pytest.raises(DomainError):
        sl.ContinuousSLProblem(mesh, one, one, one, ABParams(1.5))


# }}}
