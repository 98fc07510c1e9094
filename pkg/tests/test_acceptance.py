"""Acceptance criteria 1-11, one test each.

Every test records a ``criterion N: PASS|FAIL ...`` line that is printed in
the pytest terminal summary, then asserts.
"""

from __future__ import annotations

import math
import time

import numpy as np

from abfrac import ab_continuous as ac
from abfrac import ab_discrete as abd
from abfrac import discrete as dc
from abfrac import special as sf
from abfrac import sturm_liouville as sl
from abfrac.ab_continuous import Composition, MeshFn, Side, UniformMesh
from abfrac.ab_discrete import ABParams, HigherOrderForm
from abfrac.discrete import DiscreteMLArgs, Grid, GridFn
from abfrac.quadrature import calibrate_mesh_tolerance, convergence_order

from .conftest import ACCEPTANCE_LINES

SEED = 1729


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _rand(rng, grid):
    return GridFn(grid, rng.standard_normal(grid.size))


def _rel(x: GridFn, y: GridFn) -> float:
    assert x.grid == y.grid
    return (x - y).norm_inf() / y.norm_inf()


# {{{ discrete


def test_criterion_1_matrix_transpose():
    t0 = time.perf_counter()
    worst = 0.0
    for alpha in (0.1, 0.25, 0.45):
        p = ABParams(alpha)
        for grid in (Grid(0, 21), Grid(0, 101)):
            kl = sl.matrix_abr_left(grid, p)
            kr = sl.matrix_abr_right(grid, p)
            worst = max(worst, float(np.max(np.abs(kl.T - kr)) / np.max(np.abs(kl))))
    dt = time.perf_counter() - t0
    record(1, worst <= 1e-11 and dt <= 5.0, f"max rel defect {worst:.2e} (<= 1e-11), {dt:.2f} s (<= 5 s)")


def _ibp_worst(seed: int) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    grid = Grid(0, 21)
    p = ABParams(0.3)
    worst = {"sums": 0.0, "abr": 0.0, "abc-left": 0.0}
    for _ in range(100):
        f, g = _rand(rng, grid), _rand(rng, grid)
        s = abd.ibp_scale(f, g)
        worst["sums"] = max(worst["sums"], abd.ibp_abr_sums_check(f, g, p) / s)
        worst["abr"] = max(worst["abr"], abd.ibp_abr_diff_check(f, g, p) / s)
        worst["abc-left"] = max(worst["abc-left"], abd.ibp_abc_left_check(f, g, p) / s)
    return worst


def test_criterion_2_discrete_ibp():
    first = _ibp_worst(SEED)
    again = _ibp_worst(SEED)
    ok = max(first.values()) <= 1e-11 and first == again
    detail = ", ".join(f"{k} {v:.2e}" for k, v in first.items())
    record(2, ok, f"100 pairs each, residual/scale: {detail} (<= 1e-11); reproducible={first == again}")


def test_criterion_3_inverse_laws():
    rng = np.random.default_rng(SEED)
    grid = Grid(0, 21)
    a, b = grid.a, grid.b
    p = ABParams(0.3, 1.3)
    worst = 0.0
    for _ in range(50):
        f = _rand(rng, grid)
        fl, fr = f.restrict(a + 1, b), f.restrict(a, b - 1)
        errs = [
            _rel(abd.abr_diff_left(dc.pad_left(abd.ab_sum_left(f, p)), p), fl),
            _rel(abd.ab_sum_left(dc.pad_left(abd.abr_diff_left(f, p)), p), fl),
            _rel(abd.abr_diff_right(dc.pad_right(abd.ab_sum_right(f, p)), p), fr),
            _rel(abd.ab_sum_right(dc.pad_right(abd.abr_diff_right(f, p)), p), fr),
            _rel(abd.abc_diff_left(f, p), abd.abc_from_abr_left(f, p)),
            _rel(abd.abc_diff_right(f, p), abd.abc_from_abr_right(f, p)),
        ]
        worst = max(worst, *errs)
    record(3, worst <= 1e-11, f"50 functions, max rel error {worst:.2e} (<= 1e-11)")


def test_criterion_4_right_boundary_value():
    rng = np.random.default_rng(SEED)
    grid = Grid(0, 21)
    worst = 0.0
    for alpha in (0.1, 0.2, 0.3, 0.4):
        p = ABParams(alpha)
        for _ in range(10):
            f = _rand(rng, grid)
            want = (1 - alpha) * f(grid.b - 1)
            worst = max(worst, abs(abd.gen_e_right(f, p)(grid.b - 1) - want) / abs(want))
    record(4, worst <= 1e-13, f"max rel error {worst:.2e} (<= 1e-13)")


def _sl_problem(rng, grid, flavor, signed_p=False):
    n = grid.size
    p = rng.uniform(0.5, 2.0, n)
    if signed_p:
        p *= rng.choice([-1.0, 1.0], n)
    return sl.SLProblem(
        grid,
        GridFn(grid, p),
        GridFn(grid, rng.standard_normal(n)),
        GridFn(grid, rng.uniform(0.5, 2.0, n)),
        ABParams(0.3),
        flavor,
    )


def test_criterion_5_symmetric_problem():
    rng = np.random.default_rng(SEED)
    parts, ok = [], True
    for n in (20, 200):
        prob = _sl_problem(rng, Grid(0, n + 1), sl.Flavor.ABR_ABR)
        t0 = time.perf_counter()
        l2 = sl.assemble_abr_slp(prob)
        res = sl.solve_symmetric_slp(l2, prob.r)
        dt = time.perf_counter() - t0
        sym = sl.symmetry_defect(l2)
        resid = float(np.max(res.residual_norms))
        gram = res.diagnostics["gram_defect"]
        ok &= sym <= 1e-12 and resid <= 1e-10 and gram <= 1e-10 and res.max_imag == 0.0
        ok &= res.eigenvalues.size == n
        if n == 200:
            ok &= dt <= 10.0
        parts.append(f"n={n}: sym {sym:.1e}, resid {resid:.1e}, gram {gram:.1e}, {dt:.2f} s")
    record(5, ok, "; ".join(parts))


def test_criterion_6_caputo_pencil():
    rng = np.random.default_rng(SEED)
    ok, parts = True, []
    for trial in range(3):
        prob = _sl_problem(rng, Grid(0, 22), sl.Flavor.ABC_ABR, signed_p=trial > 0)
        bc = sl.BCSpec(1.0, 0.0, 0.0, 1.0) if trial == 0 else sl.BCSpec(*rng.uniform(-2, 2, 4))
        res = sl.solve_abc_slp(prob, bc)
        rows = float(np.max(res.diagnostics["scaled_residuals"]))
        bcs = float(np.max(res.diagnostics["bc_residuals"]))
        ok &= rows <= 1e-8 and bcs <= 1e-8 and res.orthogonality_defect <= 1e-6
        ok &= math.isfinite(res.max_imag)
        parts.append(
            f"rows {rows:.1e}, bcs {bcs:.1e}, ortho {res.orthogonality_defect:.1e}, max_imag {res.max_imag:.1e}"
        )
    record(6, ok, "; ".join(parts))


def test_criterion_7_higher_order():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for alpha in (1.05, 1.25, 1.449):
        f = _rand(rng, Grid(0, 15))
        for which in HigherOrderForm:
            x, y = abd.higher_order_forms(f, ABParams(alpha), which)
            worst = max(worst, _rel(x, y))
    record(7, worst <= 1e-11, f"12 equalities, max rel disagreement {worst:.2e} (<= 1e-11)")


# }}}


# {{{ continuous

_PAIRS = [
    (
        lambda t: np.cos(2 * t) + t,
        lambda t: -2 * np.sin(2 * t) + 1,
        lambda t: np.exp(t) * np.sin(3 * t + 1),
        lambda t: np.exp(t) * (np.sin(3 * t + 1) + 3 * np.cos(3 * t + 1)),
    ),
    (lambda t: np.exp(-t), lambda t: -np.exp(-t), lambda t: 1 + t**3, lambda t: 3 * t**2),
]

MESHES = [UniformMesh(0.0, 1.0, n) for n in (501, 1001, 2001)]
HS = [m.h for m in MESHES]


def _mesh_pair(mesh, pair):
    f, df, g, dg = pair
    return MeshFn.from_function(mesh, f, df), MeshFn.from_function(mesh, g, dg)


def test_criterion_8_continuous_ibp():
    p = ABParams(0.5)
    t0 = time.perf_counter()
    ok, parts = True, []
    checks = {
        "abr-ibp": lambda f, g: ac.ibp_abr_continuous_check(f, g, p),
        "abc-ibp-left": lambda f, g: ac.ibp_abc_continuous_check(f, g, p, Side.LEFT),
        "abc-ibp-right": lambda f, g: ac.ibp_abc_continuous_check(f, g, p, Side.RIGHT),
        "swap": lambda f, g: ac.swap_identity_check(f, g, p),
    }
    for k, pair in enumerate(_PAIRS):
        for name, check in checks.items():
            res = [check(*_mesh_pair(m, pair)) for m in MESHES]
            order = convergence_order(HS, res)
            ok &= res[0] > res[1] > res[2] and order >= 1.8
            parts.append(f"{name}/{k} {order:.2f}")
    dt = time.perf_counter() - t0
    ok &= dt <= 60.0
    record(8, ok, f"orders (>= 1.8): {', '.join(parts)}; {dt:.1f} s")


def test_criterion_9_relations_and_inverse_laws():
    p = ABParams(0.5)
    ok, worst_ratio = True, 0.0
    for pair in _PAIRS:
        fns = [_mesh_pair(m, pair)[0] for m in MESHES]
        residuals = {
            "relation-left": [ac.relation_residual(f, p, Side.LEFT) for f in fns],
            "relation-right": [ac.relation_residual(f, p, Side.RIGHT) for f in fns],
        }
        for side in Side:
            for comp in Composition:
                residuals[f"inverse-{side.value}-{comp.value}"] = [
                    ac.inverse_law_residual(f, p, side, comp) for f in fns
                ]
        for r in residuals.values():
            c = calibrate_mesh_tolerance(HS[:2], r[:2], 1.8)
            ratio = r[2] / (c * HS[2] ** 1.8)
            worst_ratio = max(worst_ratio, ratio)
            ok &= ratio <= 10.0
    record(9, ok, f"worst residual / calibrated tolerance at n=2001: {worst_ratio:.2f} (<= 10)")


def test_criterion_10_special_functions():
    rng = np.random.default_rng(SEED)
    e_err = abs(sf.ml_one(1.0, 1.0) - math.e)
    deleg, three, disc = 0.0, 0.0, 0.0
    for _ in range(200):
        alpha, beta, z = rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), rng.uniform(-2.0, 2.0)
        deleg = max(deleg, abs(sf.ml_two(alpha, 1.0, z) - sf.ml_one(alpha, z)))
        e2 = sf.ml_two(alpha, beta, z)
        three = max(three, abs(sf.ml_three(sf.MLArgs(alpha, beta, 1.0, z)) - e2) / abs(e2))
        da, lam, n = rng.uniform(0.1, 0.9), rng.uniform(-0.9, 0.9), int(rng.integers(0, 40))
        d1 = dc.discrete_ml(DiscreteMLArgs(da, beta, lam, n))
        d3 = dc.discrete_ml3(da, beta, 1.0, lam, n)
        disc = max(disc, abs(d3 - d1) / max(abs(d1), 1e-300))
    ok = e_err <= 1e-12 and deleg == 0.0 and three <= 1e-14 and disc <= 1e-14
    record(
        10,
        ok,
        f"|E_1(1)-e| {e_err:.1e}, delegation {deleg:.1e} (exact), "
        f"three-parameter {three:.1e}, discrete {disc:.1e} (<= 1e-14)",
    )


_SL_CASES = [
    (lambda t: t**2 + 1, lambda t: np.cos(t), lambda t: 1 + t, lambda t: 2 + 0 * t),
    (lambda t: np.exp(t), lambda t: 1 - t + t**3, lambda t: 2 + np.sin(t), lambda t: t),
    (lambda t: np.sin(t) + 0.5, lambda t: (1 - t) ** 2 + t, lambda t: 1 + 0 * t, lambda t: 0 * t),
]


def test_criterion_11_form_symmetry():
    p = ABParams(0.5)
    ok, orders = True, []
    for case in _SL_CASES:
        res = []
        for m in MESHES:
            u, v, pc, qc = (MeshFn.from_function(m, c) for c in case)
            one = MeshFn.from_function(m, lambda t: 1 + 0 * t)
            res.append(sl.continuous_form_symmetry(u, v, sl.ContinuousSLProblem(m, pc, qc, one, p)))
        order = convergence_order(HS, res)
        orders.append(order)
        ok &= res[0] > res[1] > res[2] and order >= 1.5
    record(11, ok, f"three pairs, orders {', '.join(f'{o:.2f}' for o in orders)} (>= 1.5)")


# }}}
