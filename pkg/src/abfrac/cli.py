"""Command-line front end: ``abfrac {ml,apply,verify,slp}``.

Exit codes: 0 on success, 1 on input or usage errors, 2 when a
verification residual misses its contract (the report is still written).
JSON output uses sorted keys so a fixed seed gives byte-identical files.
"""

from __future__ import annotations

import argparse
import enum
import json
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from abfrac import ab_continuous as abc_
from abfrac import ab_discrete as abd
from abfrac import discrete as dc
from abfrac import special as sf
from abfrac import sturm_liouville as sl
from abfrac.ab_continuous import UniformMesh
from abfrac.ab_discrete import ABParams
from abfrac.discrete import Grid, GridFn
from abfrac.suites import CONTINUOUS_SUITES, SUITES, SuiteConfig, run_suite

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CONTRACT = 2

#: residual contracts for ``slp`` before ``--tol-scale``
SLP_RESIDUAL_TOL = {sl.Flavor.ABR_ABR: 1e-10, sl.Flavor.ABC_ABR: 1e-8}
SLP_ORTHO_TOL = {sl.Flavor.ABR_ABR: 1e-10, sl.Flavor.ABC_ABR: 1e-6}


class InputError(ValueError):
    """Bad command-line input; reported with exit code 1."""


class Command(enum.Enum):
    ML = "ml"
    APPLY = "apply"
    VERIFY = "verify"
    SLP = "slp"


@dataclass(frozen=True)
class RunConfig:
    command: Command
    input: Path | None = None
    out: Path | None = None
    csv: Path | None = None
    alpha: float | None = None
    b_of_alpha: float = 1.0
    beta: float = 1.0
    rho: float | None = None
    lam: float | None = None
    z: float | None = None
    operator: str | None = None
    continuous: bool = False
    grid: Grid | None = None
    mesh: UniformMesh | None = None
    suite: str | None = None
    list_suites: bool = False
    seed: int = 0
    tol_scale: float = 1.0


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _params(cfg: RunConfig) -> ABParams:
    if cfg.alpha is None:
        raise InputError("--alpha is required")
    return ABParams(cfg.alpha, cfg.b_of_alpha)


# {{{ ml


def _run_ml(cfg: RunConfig) -> int:
    if cfg.alpha is None or cfg.z is None:
        raise InputError("ml needs --alpha and --z")
    if cfg.lam is not None:
        z = cfg.z
        if z != int(z):
            raise InputError(f"discrete Mittag-Leffler needs an integer --z, got {z}")
        rho = 1.0 if cfg.rho is None else cfg.rho
        value = dc.discrete_ml3(cfg.alpha, cfg.beta, rho, cfg.lam, int(z))
    elif cfg.rho is not None:
        value = sf.ml_three(sf.MLArgs(cfg.alpha, cfg.beta, cfg.rho, cfg.z))
    else:
        value = sf.ml_two(cfg.alpha, cfg.beta, cfg.z)
    if cfg.out is None:
        print(repr(float(value)))
    else:
        report = {"alpha": cfg.alpha, "beta": cfg.beta, "rho": cfg.rho, "lam": cfg.lam,
                  "z": cfg.z, "value": float(value)}
        _emit(_dump(report), cfg.out)
    return EXIT_OK


# }}}


# {{{ apply

_DISCRETE_OPS: dict[str, Callable[[GridFn, RunConfig], GridFn]] = {
    "nabla": lambda f, c: dc.nabla(f),
    "delta": lambda f, c: dc.delta(f),
    "q_reflect": lambda f, c: dc.q_reflect(f),
    "nabla_sum_left": lambda f, c: dc.nabla_sum_left(f, _alpha(c)),
    "nabla_sum_right": lambda f, c: dc.nabla_sum_right(f, _alpha(c)),
    "rl_diff_left": lambda f, c: dc.rl_diff_left(f, _alpha(c)),
    "rl_diff_right": lambda f, c: dc.rl_diff_right(f, _alpha(c)),
    "caputo_diff_left": lambda f, c: dc.caputo_diff_left(f, _alpha(c)),
    "caputo_diff_right": lambda f, c: dc.caputo_diff_right(f, _alpha(c)),
    "gen_e_left": lambda f, c: abd.gen_e_left(f, _params(c)),
    "gen_e_right": lambda f, c: abd.gen_e_right(f, _params(c)),
    "abr_left": lambda f, c: abd.abr_diff_left(f, _params(c)),
    "abr_right": lambda f, c: abd.abr_diff_right(f, _params(c)),
    "abc_left": lambda f, c: abd.abc_diff_left(f, _params(c)),
    "abc_right": lambda f, c: abd.abc_diff_right(f, _params(c)),
    "ab_sum_left": lambda f, c: abd.ab_sum_left(f, _params(c)),
    "ab_sum_right": lambda f, c: abd.ab_sum_right(f, _params(c)),
}

_CONTINUOUS_OPS: dict[str, Callable[[abc_.MeshFn, RunConfig], abc_.MeshFn]] = {
    "q_reflect": lambda f, c: abc_.q_reflect_mesh(f),
    "rl_integral_left": lambda f, c: abc_.rl_integral_left(f, _alpha(c)),
    "rl_integral_right": lambda f, c: abc_.rl_integral_right(f, _alpha(c)),
    "gen_e_left": lambda f, c: abc_.gen_e_left_c(f, _alpha(c), _params(c).lam),
    "gen_e_right": lambda f, c: abc_.gen_e_right_c(f, _alpha(c), _params(c).lam),
    "ab_integral_left": lambda f, c: abc_.ab_integral_left(f, _params(c)),
    "ab_integral_right": lambda f, c: abc_.ab_integral_right(f, _params(c)),
    "abr_left": lambda f, c: abc_.abr_deriv_left(f, _params(c)),
    "abr_right": lambda f, c: abc_.abr_deriv_right(f, _params(c)),
    "abc_left": lambda f, c: abc_.abc_deriv_left(f, _params(c)),
    "abc_right": lambda f, c: abc_.abc_deriv_right(f, _params(c)),
}


def _alpha(cfg: RunConfig) -> float:
    if cfg.alpha is None:
        raise InputError("--alpha is required")
    return cfg.alpha


def _run_apply(cfg: RunConfig) -> int:
    if cfg.input is None or cfg.operator is None:
        raise InputError("apply needs an operator and --input")
    table = _CONTINUOUS_OPS if cfg.continuous else _DISCRETE_OPS
    if cfg.operator not in table:
        kind = "continuous" if cfg.continuous else "discrete"
        raise InputError(
            f"unknown {kind} operator {cfg.operator!r}; choose from {', '.join(sorted(table))}"
        )
    text = cfg.input.read_text()
    if cfg.continuous:
        f = abc_.meshfn_from_csv(text)
        if cfg.mesh is not None and cfg.mesh != f.mesh:
            raise InputError(f"input mesh {f.mesh} differs from --mesh {cfg.mesh}")
        _emit(abc_.meshfn_to_csv(table[cfg.operator](f, cfg)), cfg.out)
    else:
        f = dc.gridfn_from_csv(text)
        if cfg.grid is not None and cfg.grid != f.grid:
            raise InputError(f"input grid {f.grid} differs from --grid {cfg.grid}")
        _emit(dc.gridfn_to_csv(table[cfg.operator](f, cfg)), cfg.out)
    return EXIT_OK


# }}}


# {{{ verify


def _run_verify(cfg: RunConfig) -> int:
    if cfg.list_suites:
        names = CONTINUOUS_SUITES if cfg.continuous else sorted(SUITES)
        for name in names:
            print(f"{name}\t{SUITES[name][0]}")
        return EXIT_OK
    if cfg.suite is None:
        if not cfg.continuous:
            raise InputError("verify needs --suite NAME, --continuous or --list")
        names: Sequence[str] = CONTINUOUS_SUITES
    elif cfg.suite == "all":
        names = sorted(SUITES)
    else:
        if cfg.suite not in SUITES:
            raise InputError(f"unknown suite {cfg.suite!r}; try --list")
        names = [cfg.suite]
    scfg = SuiteConfig(
        alpha=cfg.alpha,
        b_of_alpha=cfg.b_of_alpha,
        grid=cfg.grid,
        mesh=cfg.mesh,
        seed=cfg.seed,
        tol_scale=cfg.tol_scale,
    )
    reports = [run_suite(n, scfg).to_dict() for n in names]
    passed = all(r["passed"] for r in reports)
    doc: dict[str, Any] = {"passed": passed, "seed": cfg.seed, "suites": reports}
    if any(n in CONTINUOUS_SUITES for n in names):
        doc["identities"] = [
            {k: c[k] for k in ("identity", "alpha", "n_points", "residual", "order_estimate")}
            for r in reports
            for c in r["checks"]
            if "order_estimate" in c and "identity" in c
        ]
    _emit(_dump(doc), cfg.out)
    return EXIT_OK if passed else EXIT_CONTRACT


# }}}


# {{{ slp


def _field(doc: dict[str, Any], key: str, kind: type | tuple[type, ...]) -> Any:
    if key not in doc:
        raise InputError(f"problem file: missing field {key!r}")
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, kind):
        raise InputError(f"problem file: field {key!r} has type {type(val).__name__}")
    return val


def _coeff(doc: dict[str, Any], key: str, grid: Grid) -> GridFn:
    vals = _field(doc, key, list)
    if len(vals) != grid.size:
        raise InputError(f"problem file: field {key!r} needs {grid.size} values, got {len(vals)}")
    for i, v in enumerate(vals):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InputError(f"problem file: {key}[{i}] is not a number")
    return GridFn(grid, np.asarray(vals, dtype=np.float64))


def load_problem(text: str) -> tuple[sl.SLProblem, sl.BCSpec | None]:
    """Parse a JSON problem file into a problem and its boundary conditions."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"problem file: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError("problem file: top level must be an object")
    a = _field(doc, "a", int)
    b = _field(doc, "b", int)
    grid = Grid(a, b)
    params = ABParams(float(_field(doc, "alpha", (int, float))), float(doc.get("B", 1.0)))
    try:
        flavor = sl.Flavor(doc.get("flavor", "ABR_ABR"))
    except ValueError as exc:
        raise InputError(f"problem file: field 'flavor': {exc}") from exc
    prob = sl.SLProblem(
        grid, _coeff(doc, "p", grid), _coeff(doc, "q", grid), _coeff(doc, "r", grid), params, flavor
    )
    bc = None
    if flavor is sl.Flavor.ABC_ABR:
        raw = _field(doc, "bc", dict)
        bc = sl.BCSpec(*(float(_field(raw, k, (int, float))) for k in ("c1", "c2", "d1", "d2")))
    return prob, bc


def _run_slp(cfg: RunConfig) -> int:
    if cfg.input is None:
        raise InputError("slp needs --input")
    prob, bc = load_problem(cfg.input.read_text())
    if prob.flavor is sl.Flavor.ABR_ABR:
        res = sl.solve_abr_slp(prob)
        ortho = res.diagnostics["gram_defect"]
    else:
        res = sl.solve_abc_slp(prob, bc)
        ortho = res.orthogonality_defect
    rtol = SLP_RESIDUAL_TOL[prob.flavor] * cfg.tol_scale
    otol = SLP_ORTHO_TOL[prob.flavor] * cfg.tol_scale
    worst = float(np.max(res.residual_norms)) if res.residual_norms.size else 0.0
    passed = worst <= rtol and ortho <= otol
    doc = res.to_dict()
    doc["flavor"] = prob.flavor.value
    doc["contract"] = {
        "passed": passed,
        "max_residual": worst,
        "residual_tolerance": rtol,
        "orthogonality": float(ortho),
        "orthogonality_tolerance": otol,
    }
    _emit(_dump(doc), cfg.out)
    csv_path = cfg.csv
    if csv_path is None and cfg.out is not None:
        csv_path = cfg.out.with_suffix(".csv")
    if csv_path is not None:
        csv_path.write_text(res.eigenvector_csv())
    return EXIT_OK if passed else EXIT_CONTRACT


# }}}


_RUNNERS = {
    Command.ML: _run_ml,
    Command.APPLY: _run_apply,
    Command.VERIFY: _run_verify,
    Command.SLP: _run_slp,
}


def run(config: RunConfig) -> int:
    """Execute *config*; returns the process exit code."""
    try:
        return _RUNNERS[config.command](config)
    except (ValueError, KeyError, OSError, np.linalg.LinAlgError, sf.ConvergenceError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"abfrac: error: {msg}", file=sys.stderr)
        return EXIT_INPUT


# {{{ argument parsing


def _grid_arg(s: str) -> Grid:
    try:
        return Grid.parse(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _mesh_arg(s: str) -> UniformMesh:
    try:
        return UniformMesh.parse(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for contract failures
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="abfrac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--alpha", type=float)
    common.add_argument("--B", dest="b_of_alpha", type=float, default=1.0,
                        help="normalization B(alpha), default 1")
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--tol-scale", type=float, default=1.0,
                        help="multiply every residual tolerance")

    p = sub.add_parser("ml", parents=[common], help="evaluate a Mittag-Leffler function")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--rho", type=float)
    p.add_argument("--lam", type=float, help="evaluate the discrete function with this lambda")
    p.add_argument("--z", type=float, required=True)

    p = sub.add_parser("apply", parents=[common], help="apply an operator to a CSV function")
    p.add_argument("operator")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--continuous", action="store_true", help="input is a mesh function")
    p.add_argument("--grid", type=_grid_arg)
    p.add_argument("--mesh", type=_mesh_arg)

    p = sub.add_parser("verify", parents=[common], help="run identity verification suites")
    p.add_argument("--suite", help="suite name, or 'all'")
    p.add_argument("--list", dest="list_suites", action="store_true")
    p.add_argument("--continuous", action="store_true",
                   help="run (or list) the continuous suites")
    p.add_argument("--grid", type=_grid_arg)
    p.add_argument("--mesh", type=_mesh_arg, help="coarsest mesh a:b:n; refined twice")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("slp", parents=[common], help="solve a discrete Sturm-Liouville problem")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--csv", type=Path, help="eigenvector table (default: --out with .csv)")
    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    ns["command"] = Command(ns["command"])
    return RunConfig(**ns)


def main(argv: Sequence[str] | None = None) -> int:
    return run(parse_args(argv))


# }}}


if __name__ == "__main__":
    sys.exit(main())
