"""Named verification suites: each one checks a family of identities on random data.

A suite returns a :class:`SuiteReport`; ``passed`` is true when every
residual meets its contract. Random inputs come from
``numpy.random.default_rng(seed)`` so reports are reproducible.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from abfrac import ab_continuous as abc_
from abfrac import ab_discrete as abd
from abfrac import discrete as dc
from abfrac import special as sf
from abfrac import sturm_liouville as sl
from abfrac.ab_continuous import MeshFn, Side, UniformMesh
from abfrac.ab_discrete import ABParams
from abfrac.discrete import Grid, GridFn
from abfrac.quadrature import calibrate_mesh_tolerance, convergence_order


@dataclass(frozen=True)
class SuiteConfig:
    alpha: float | None = None
    b_of_alpha: float = 1.0
    grid: Grid | None = None
    mesh: UniformMesh | None = None
    seed: int = 0
    tol_scale: float = 1.0


@dataclass
class SuiteReport:
    suite: str
    passed: bool = True
    checks: list[dict[str, Any]] = field(default_factory=list)

    def add(self, name: str, residual: float, tolerance: float, **extra: Any) -> None:
        ok = bool(residual <= tolerance)
        self.passed &= ok
        self.checks.append(
            {"check": name, "residual": float(residual), "tolerance": float(tolerance), "passed": ok, **extra}
        )

    def add_min(
        self, name: str, value: float, minimum: float, *, require: bool = True, **extra: Any
    ) -> None:
        ok = bool(require and value >= minimum)
        self.passed &= ok
        self.checks.append(
            {"check": name, "value": float(value), "minimum": float(minimum), "passed": ok, **extra}
        )

    @property
    def max_residual(self) -> float:
        vals = [c["residual"] for c in self.checks if "residual" in c]
        return max(vals) if vals else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "checks": self.checks,
        }


def random_gridfn(rng: np.random.Generator, grid: Grid) -> GridFn:
    return GridFn(grid, rng.standard_normal(grid.size))


def _rel(x: GridFn, y: GridFn) -> float:
    return (x - y).norm_inf() / max(y.norm_inf(), 1e-300)


# {{{ discrete suites


def suite_discrete_ibp(cfg: SuiteConfig, n_pairs: int = 100) -> SuiteReport:
    p = ABParams(cfg.alpha if cfg.alpha is not None else 0.3, cfg.b_of_alpha)
    grid = cfg.grid or Grid(0, 21)
    rng = np.random.default_rng(cfg.seed)
    rep = SuiteReport("discrete-ibp")
    worst = {"sums": 0.0, "abr": 0.0, "abc_left": 0.0}
    for _ in range(n_pairs):
        f, g = random_gridfn(rng, grid), random_gridfn(rng, grid)
        scale = abd.ibp_scale(f, g)
        worst["sums"] = max(worst["sums"], abd.ibp_abr_sums_check(f, g, p) / scale)
        worst["abr"] = max(worst["abr"], abd.ibp_abr_diff_check(f, g, p) / scale)
        worst["abc_left"] = max(worst["abc_left"], abd.ibp_abc_left_check(f, g, p) / scale)
    for k, v in worst.items():
        rep.add(f"ibp_{k}", v, 1e-11 * cfg.tol_scale, pairs=n_pairs, alpha=p.alpha)
    return rep


def suite_matrix_transpose(cfg: SuiteConfig) -> SuiteReport:
    rep = SuiteReport("matrix-transpose")
    alphas = [cfg.alpha] if cfg.alpha is not None else [0.1, 0.25, 0.45]
    grids = [cfg.grid] if cfg.grid is not None else [Grid(0, 21), Grid(0, 101)]
    for alpha in alphas:
        p = ABParams(alpha, cfg.b_of_alpha)
        for grid in grids:
            kl = sl.matrix_abr_left(grid, p)
            kr = sl.matrix_abr_right(grid, p)
            defect = float(np.max(np.abs(kl.T - kr)) / np.max(np.abs(kl)))
            rep.add(f"KL^T=KR alpha={alpha} grid={grid.a}:{grid.b}", defect, 1e-11 * cfg.tol_scale)
    return rep


def suite_inverse_laws(cfg: SuiteConfig, n_fns: int = 50) -> SuiteReport:
    rep = SuiteReport("inverse-laws")
    alphas = [cfg.alpha] if cfg.alpha is not None else [0.1, 0.25, 0.45]
    grid = cfg.grid or Grid(0, 21)
    a, b = grid.a, grid.b
    rng = np.random.default_rng(cfg.seed)
    tol = 1e-11 * cfg.tol_scale
    for alpha in alphas:
        p = ABParams(alpha, cfg.b_of_alpha)
        worst = dict.fromkeys(
            ["abr_left(ab_sum_left)", "ab_sum_left(abr_left)", "abr_right(ab_sum_right)",
             "ab_sum_right(abr_right)", "Tt", "Ttt"], 0.0)
        for _ in range(n_fns):
            f = random_gridfn(rng, grid)
            fl, fr = f.restrict(a + 1, b), f.restrict(a, b - 1)
            got = {
                "abr_left(ab_sum_left)": (abd.abr_diff_left(dc.pad_left(abd.ab_sum_left(f, p)), p), fl),
                "ab_sum_left(abr_left)": (abd.ab_sum_left(dc.pad_left(abd.abr_diff_left(f, p)), p), fl),
                "abr_right(ab_sum_right)": (abd.abr_diff_right(dc.pad_right(abd.ab_sum_right(f, p)), p), fr),
                "ab_sum_right(abr_right)": (abd.ab_sum_right(dc.pad_right(abd.abr_diff_right(f, p)), p), fr),
                "Tt": (abd.abc_diff_left(f, p), abd.abc_from_abr_left(f, p)),
                "Ttt": (abd.abc_diff_right(f, p), abd.abc_from_abr_right(f, p)),
            }
            for k, (x, y) in got.items():
                worst[k] = max(worst[k], _rel(x, y))
        for k, v in worst.items():
            rep.add(f"{k} alpha={alpha}", v, tol, functions=n_fns)
    return rep


def suite_gen_e_boundary(cfg: SuiteConfig, n_fns: int = 20) -> SuiteReport:
    rep = SuiteReport("gen-e-boundary")
    alphas = [cfg.alpha] if cfg.alpha is not None else [0.1, 0.2, 0.3, 0.4]
    grid = cfg.grid or Grid(0, 21)
    rng = np.random.default_rng(cfg.seed)
    for alpha in alphas:
        p = ABParams(alpha, cfg.b_of_alpha)
        worst = 0.0
        for _ in range(n_fns):
            f = random_gridfn(rng, grid)
            expect = (1 - alpha) * f(grid.b - 1)
            got = abd.gen_e_right(f, p)(grid.b - 1)
            worst = max(worst, abs(got - expect) / abs(expect))
        rep.add(f"E_right(b-1)=(1-alpha)f(b-1) alpha={alpha}", worst, 1e-13 * cfg.tol_scale)
    return rep


def suite_q_duality(cfg: SuiteConfig, n_fns: int = 50) -> SuiteReport:
    rep = SuiteReport("q-duality")
    grid = cfg.grid or Grid(0, 21)
    rng = np.random.default_rng(cfg.seed)
    worst: dict[str, float] = {}
    for _ in range(n_fns):
        f = random_gridfn(rng, grid)
        qf = dc.q_reflect(f)
        for alpha in (0.2, 0.4, 0.7):
            k = f"nabla_sum alpha={alpha}"
            x = dc.nabla_sum_left(qf, alpha)
            y = dc.q_reflect(dc.nabla_sum_right(f, alpha), about=grid)
            worst[k] = max(worst.get(k, 0.0), _rel(x, y))
        p = ABParams(cfg.alpha if cfg.alpha is not None else 0.3, cfg.b_of_alpha)
        for name, left, right in (
            ("abc", abd.abc_diff_left, abd.abc_diff_right),
            ("abr", abd.abr_diff_left, abd.abr_diff_right),
        ):
            x = left(qf, p)
            y = dc.q_reflect(right(f, p), about=grid)
            worst[name] = max(worst.get(name, 0.0), _rel(x, y))
    for k, v in worst.items():
        rep.add(k, v, 1e-12 * cfg.tol_scale)
    return rep


def suite_higher_order(cfg: SuiteConfig) -> SuiteReport:
    rep = SuiteReport("higher-order")
    alphas = [cfg.alpha] if cfg.alpha is not None else [1.05, 1.25, 1.449]
    grid = cfg.grid or Grid(0, 15)
    rng = np.random.default_rng(cfg.seed)
    for alpha in alphas:
        p = ABParams(alpha, cfg.b_of_alpha)
        f = random_gridfn(rng, grid)
        for which in abd.HigherOrderForm:
            x, y = abd.higher_order_forms(f, p, which)
            rep.add(f"{which.value} alpha={alpha}", _rel(x, y), 1e-11 * cfg.tol_scale)
    return rep


def random_sl_problem(
    rng: np.random.Generator, grid: Grid, p: ABParams, flavor: sl.Flavor
) -> sl.SLProblem:
    n = grid.size
    if flavor is sl.Flavor.ABR_ABR:
        pv = rng.uniform(0.5, 2.0, n)
    else:
        pv = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
    q = rng.standard_normal(n)
    r = rng.uniform(0.5, 2.0, n)
    return sl.SLProblem(grid, GridFn(grid, pv), GridFn(grid, q), GridFn(grid, r), p, flavor)


def suite_dslp(cfg: SuiteConfig) -> SuiteReport:
    rep = SuiteReport("dslp")
    p = ABParams(cfg.alpha if cfg.alpha is not None else 0.3, cfg.b_of_alpha)
    grids = [cfg.grid] if cfg.grid is not None else [Grid(0, 21), Grid(0, 201)]
    rng = np.random.default_rng(cfg.seed)
    for grid in grids:
        prob = random_sl_problem(rng, grid, p, sl.Flavor.ABR_ABR)
        l2 = sl.assemble_abr_slp(prob)
        res = sl.solve_symmetric_slp(l2, prob.r)
        n = grid.size - 2
        rep.add(f"symmetry n={n}", sl.symmetry_defect(l2), 1e-12 * cfg.tol_scale)
        rep.add(f"residual n={n}", float(np.max(res.residual_norms)), 1e-10 * cfg.tol_scale)
        rep.add(f"gram n={n}", res.diagnostics["gram_defect"], 1e-10 * cfg.tol_scale)
        rep.add(f"max_imag n={n}", res.max_imag, 0.0)
    return rep


def suite_dlc_pencil(cfg: SuiteConfig) -> SuiteReport:
    rep = SuiteReport("dlc-pencil")
    p = ABParams(cfg.alpha if cfg.alpha is not None else 0.3, cfg.b_of_alpha)
    grid = cfg.grid or Grid(0, 22)
    rng = np.random.default_rng(cfg.seed)
    prob = random_sl_problem(rng, grid, p, sl.Flavor.ABC_ABR)
    bc = sl.BCSpec(*rng.uniform(-2, 2, 4))
    res = sl.solve_abc_slp(prob, bc)
    rep.add("pencil residual", float(np.max(res.residual_norms)), 1e-8 * cfg.tol_scale)
    rep.add("boundary rows", float(np.max(res.diagnostics["bc_residuals"])), 1e-8 * cfg.tol_scale)
    rep.add("orthogonality", res.orthogonality_defect, 1e-6 * cfg.tol_scale)
    rep.checks.append({"check": "max_imag (reported)", "value": res.max_imag})
    return rep


def suite_special_functions(cfg: SuiteConfig, n_samples: int = 100) -> SuiteReport:
    rep = SuiteReport("special-functions")
    rng = np.random.default_rng(cfg.seed)
    rep.add("E_1(1)=e", abs(sf.ml_one(1.0, 1.0) - math.e), 1e-12 * cfg.tol_scale)
    worst_deleg = 0.0
    worst3 = 0.0
    worst_d = 0.0
    for _ in range(n_samples):
        alpha = rng.uniform(0.1, 2.0)
        beta = rng.uniform(0.1, 2.0)
        z = rng.uniform(-1.0, 1.0)
        worst_deleg = max(worst_deleg, abs(sf.ml_two(alpha, 1.0, z) - sf.ml_one(alpha, z)))
        e2 = sf.ml_two(alpha, beta, z)
        e3 = sf.ml_three(sf.MLArgs(alpha, beta, 1.0, z))
        worst3 = max(worst3, abs(e3 - e2) / abs(e2))
        da = rng.uniform(0.1, 0.9)
        lam = rng.uniform(-0.9, 0.9)
        zz = int(rng.integers(0, 30))
        d1 = dc.discrete_ml(dc.DiscreteMLArgs(da, beta, lam, zz))
        d3 = dc.discrete_ml3(da, beta, 1.0, lam, zz)
        worst_d = max(worst_d, abs(d3 - d1) / max(abs(d1), 1e-300))
    rep.add("E_{a,1}=E_a (exact)", worst_deleg, 0.0)
    rep.add("E^1_{a,b}=E_{a,b}", worst3, 1e-14 * cfg.tol_scale)
    rep.add("discrete E^1=E", worst_d, 1e-14 * cfg.tol_scale)
    return rep


# }}}


# {{{ continuous suites

_SMOOTH_PAIRS: list[tuple[Callable, Callable, Callable, Callable]] = [
    (
        lambda t: np.cos(2 * t) + t,
        lambda t: -2 * np.sin(2 * t) + 1,
        lambda t: np.exp(t) * np.sin(3 * t + 1),
        lambda t: np.exp(t) * (np.sin(3 * t + 1) + 3 * np.cos(3 * t + 1)),
    ),
    (
        lambda t: np.exp(-t),
        lambda t: -np.exp(-t),
        lambda t: 1 + t**3,
        lambda t: 3 * t**2,
    ),
]


def _meshes(cfg: SuiteConfig) -> list[UniformMesh]:
    m0 = cfg.mesh or UniformMesh(0.0, 1.0, 501)
    return [m0, m0.refined(), m0.refined().refined()]


def _shift(fn: Callable, a: float, b: float) -> Callable:
    # pairs are written on [0, 1]; map them onto [a, b]
    return lambda t: fn((t - a) / (b - a))


def _pair_on(mesh: UniformMesh, pair) -> tuple[MeshFn, MeshFn]:
    f, df, g, dg = pair
    a, b = mesh.a, mesh.b
    L = b - a
    F = MeshFn.from_function(mesh, _shift(f, a, b), lambda t: _shift(df, a, b)(t) / L)
    G = MeshFn.from_function(mesh, _shift(g, a, b), lambda t: _shift(dg, a, b)(t) / L)
    return F, G


def _finite(x: float) -> float | None:
    # JSON has no infinity; an exact zero residual fits an infinite order
    return float(x) if math.isfinite(x) else None


def _order_report(rep: SuiteReport, name: str, meshes, residuals, alpha, minimum) -> None:
    hs = [m.h for m in meshes]
    order = convergence_order(hs, residuals)
    monotone = all(residuals[i + 1] < residuals[i] for i in range(len(residuals) - 1))
    rep.add_min(
        name,
        order if math.isfinite(order) else 1e300,
        minimum,
        require=monotone,
        monotone=monotone,
        identity=name,
        alpha=alpha,
        n_points=meshes[-1].n_points,
        residual=float(residuals[-1]),
        order_estimate=_finite(order),
    )


def suite_continuous_ibp(cfg: SuiteConfig) -> SuiteReport:
    rep = SuiteReport("continuous-ibp")
    p = ABParams(cfg.alpha if cfg.alpha is not None else 0.5, cfg.b_of_alpha)
    meshes = _meshes(cfg)
    for k, pair in enumerate(_SMOOTH_PAIRS):
        res: dict[str, list[float]] = {}
        for mesh in meshes:
            F, G = _pair_on(mesh, pair)
            res.setdefault("abr-ibp", []).append(abc_.ibp_abr_continuous_check(F, G, p))
            res.setdefault("abc-ibp-left", []).append(abc_.ibp_abc_continuous_check(F, G, p, Side.LEFT))
            res.setdefault("abc-ibp-right", []).append(abc_.ibp_abc_continuous_check(F, G, p, Side.RIGHT))
            res.setdefault("swap", []).append(abc_.swap_identity_check(F, G, p))
        for name, r in res.items():
            _order_report(rep, f"{name} pair={k}", meshes, r, p.alpha, 1.8)
    return rep


def suite_continuous_relations(cfg: SuiteConfig) -> SuiteReport:
    """Relations and inverse laws; tolerance is 10x a mesh tolerance calibrated on the two coarse meshes."""
    rep = SuiteReport("continuous-relations")
    p = ABParams(cfg.alpha if cfg.alpha is not None else 0.5, cfg.b_of_alpha)
    meshes = _meshes(cfg)
    hs = [m.h for m in meshes]
    for k, pair in enumerate(_SMOOTH_PAIRS):
        res: dict[str, list[float]] = {}
        for mesh in meshes:
            F, _ = _pair_on(mesh, pair)
            res.setdefault("relation-left", []).append(abc_.relation_residual(F, p, Side.LEFT))
            res.setdefault("relation-right", []).append(abc_.relation_residual(F, p, Side.RIGHT))
            for side in Side:
                for comp in abc_.Composition:
                    res.setdefault(f"inverse-{side.value}-{comp.value}", []).append(
                        abc_.inverse_law_residual(F, p, side, comp)
                    )
        for name, r in res.items():
            c = calibrate_mesh_tolerance(hs[:2], r[:2], 1.8)
            tol = 10 * c * hs[2] ** 1.8 * cfg.tol_scale
            rep.add(
                f"{name} pair={k}", r[2], tol,
                identity=f"{name} pair={k}", alpha=p.alpha, n_points=meshes[2].n_points, order_estimate=_finite(convergence_order(hs, r)),
            )
    return rep


_SL_CASES = [
    (lambda t: t**2 + 1, lambda t: np.cos(t), lambda t: 1 + t, lambda t: 2 + 0 * t),
    (lambda t: np.exp(t), lambda t: 1 - t + t**3, lambda t: 2 + np.sin(t), lambda t: t),
    (lambda t: np.sin(t) + 0.5, lambda t: (1 - t) ** 2 + t, lambda t: 1 + 0 * t, lambda t: 0 * t),
]


def suite_cslp_symmetry(cfg: SuiteConfig) -> SuiteReport:
    rep = SuiteReport("cslp-symmetry")
    p = ABParams(cfg.alpha if cfg.alpha is not None else 0.5, cfg.b_of_alpha)
    meshes = _meshes(cfg)
    for k, (u, v, pc, qc) in enumerate(_SL_CASES):
        r = []
        for mesh in meshes:
            a, b = mesh.a, mesh.b
            fn = lambda c: MeshFn.from_function(mesh, _shift(c, a, b))  # noqa: E731
            prob = sl.ContinuousSLProblem(mesh, fn(pc), fn(qc), fn(lambda t: 1 + 0 * t), p)
            r.append(sl.continuous_form_symmetry(fn(u), fn(v), prob))
        _order_report(rep, f"form-symmetry pair={k}", meshes, r, p.alpha, 1.5)
    return rep


# }}}


SUITES: dict[str, tuple[str, Callable[[SuiteConfig], SuiteReport]]] = {
    "discrete-ibp": ("summation by parts for AB sums, ABR and left ABC differences", suite_discrete_ibp),
    "matrix-transpose": ("matrix form of ABR summation by parts: K_L^T = K_R", suite_matrix_transpose),
    "inverse-laws": ("discrete inverse laws and ABC/ABR relations", suite_inverse_laws),
    "gen-e-boundary": ("right generalized sum at b-1 equals (1-alpha) f(b-1)", suite_gen_e_boundary),
    "q-duality": ("reflection duality of left and right operators", suite_q_duality),
    "higher-order": ("the four higher-order dual forms, 1 < alpha < 3/2", suite_higher_order),
    "dslp": ("ABR-type discrete SLP: symmetry, residuals, weighted orthogonality", suite_dslp),
    "dlc-pencil": ("ABC-type discrete SLP pencil: residuals, BCs, orthogonality", suite_dlc_pencil),
    "special-functions": ("Mittag-Leffler delegation and reductions", suite_special_functions),
    "continuous-ibp": ("continuous integration by parts, fitted order >= 1.8", suite_continuous_ibp),
    "continuous-relations": ("continuous ABC/ABR relations and inverse laws", suite_continuous_relations),
    "cslp-symmetry": ("continuous SL bilinear-form symmetry, fitted order >= 1.5", suite_cslp_symmetry),
}

CONTINUOUS_SUITES = ("continuous-ibp", "continuous-relations", "cslp-symmetry")


def run_suite(name: str, cfg: SuiteConfig) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    return SUITES[name][1](cfg)


__all__ = [
    "CONTINUOUS_SUITES",
    "SUITES",
    "SuiteConfig",
    "SuiteReport",
    "random_gridfn",
    "random_sl_problem",
    "run_suite",
]
