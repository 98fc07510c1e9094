"""Fractional Sturm-Liouville problems built from AB operators.

Discrete problems are assembled as dense matrices over the grid and solved
exactly (up to floating point): the ABR-ABR operator through a symmetric
eigensolver, the ABC-ABR operator with its two boundary conditions through
a reduced matrix pencil. Continuous problems are only checked at the level
of their bilinear forms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, TypeAlias

import numpy as np
import scipy.linalg as la

from abfrac.ab_continuous import (
    MeshFn,
    UniformMesh,
    abr_deriv_left,
    abr_deriv_right,
)
from abfrac.ab_discrete import (
    ABParams,
    abc_diff_left,
    abr_diff_left,
    abr_diff_right,
    gen_e_right,
)
from abfrac.discrete import Grid, GridFn
from abfrac.quadrature import endpoint_power_correction, ml_product_rule, trapezoid
from abfrac.special import DomainError

#: Dense real matrix, row-major, finite entries.
DenseMatrix: TypeAlias = np.ndarray

SYMMETRY_THRESHOLD = 1e-10
PIVOT_THRESHOLD = 1e-10


class AsymmetricMatrixError(ValueError):
    """A matrix expected to be symmetric is not, beyond the allowed defect."""


class SingularPivotError(np.linalg.LinAlgError):
    """The boundary-condition rows cannot be used to eliminate two unknowns."""


class SingularPencilError(np.linalg.LinAlgError):
    """The reduced right-hand matrix of the pencil is singular."""


class Flavor(enum.Enum):
    ABR_ABR = "ABR_ABR"
    ABC_ABR = "ABC_ABR"


@dataclass(frozen=True)
class BCSpec:
    r"""Coefficients of :math:`c_1 \mathbf{E}_{b^-}x + c_2\,{}^{ABR}\nabla_b^\alpha x = 0` at :math:`a`
    and the same with :math:`d_1, d_2` at :math:`b-1`."""

    c1: float
    c2: float
    d1: float
    d2: float

    def __post_init__(self) -> None:
        if self.c1 == 0 and self.c2 == 0:
            raise ValueError("boundary condition at a is void: c1 = c2 = 0")
        if self.d1 == 0 and self.d2 == 0:
            raise ValueError("boundary condition at b-1 is void: d1 = d2 = 0")


@dataclass(frozen=True)
class SLProblem:
    """A discrete fractional Sturm-Liouville problem on ``grid``.

    ``p``, ``q`` and ``r`` are given on the full grid; only the points the
    operator actually reads are validated.
    """

    grid: Grid
    p: GridFn
    q: GridFn
    r: GridFn
    params: ABParams
    flavor: Flavor = Flavor.ABR_ABR

    def __post_init__(self) -> None:
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        if self.grid.b - self.grid.a < 3:
            raise ValueError(f"need b - a >= 3: got grid {self.grid}")
        for name in ("p", "q", "r"):
            if getattr(self, name).grid != self.grid:
                raise ValueError(f"{name} must be given on {self.grid}")
        self.params.require_first_order()

        a, b = self.grid.a, self.grid.b
        if self.flavor is Flavor.ABR_ABR:
            if np.any(self.r.restrict(a + 1, b - 1).values <= 0):
                raise DomainError("r must be positive on the interior")
            if np.any(self.p.restrict(a + 1, b - 1).values <= 0):
                raise DomainError("p must be positive on the interior")
        else:
            if np.any(self.r.restrict(a, b - 1).values <= 0):
                raise DomainError("r must be positive on {a, ..., b-1}")
            if np.any(self.p.restrict(a, b - 1).values == 0):
                raise DomainError("p must be nonzero on {a, ..., b-1}")


@dataclass(frozen=True)
class EigenResult:
    """Eigenpairs with the diagnostics used to judge them.

    ``eigenvectors[:, i]`` holds the values at the grid points ``t``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norms: np.ndarray
    max_imag: float
    orthogonality_defect: float
    t: np.ndarray
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        ev = np.asarray(self.eigenvalues, dtype=np.complex128)
        return {
            "eigenvalues": {"real": ev.real.tolist(), "imag": ev.imag.tolist()},
            "residual_norms": np.asarray(self.residual_norms).tolist(),
            "max_imag": float(self.max_imag),
            "orthogonality_defect": float(self.orthogonality_defect),
            "t": [int(x) for x in self.t],
            "diagnostics": _jsonable(self.diagnostics),
        }

    def eigenvector_csv(self) -> str:
        """Table ``t,v1,v2,...`` of the real parts of the eigenvectors."""
        k = self.eigenvectors.shape[1]
        lines = [",".join(["t"] + [f"v{i + 1}" for i in range(k)])]
        vecs = np.real(self.eigenvectors)
        for t, row in zip(self.t, vecs):
            lines.append(",".join([str(int(t))] + [repr(float(x)) for x in row]))
        return "\n".join(lines) + "\n"


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, complex):
        return {"real": obj.real, "imag": obj.imag}
    return obj


# {{{ matrices


def _impulse_columns(grid: Grid, cols: range, apply) -> np.ndarray:
    out = []
    for t in cols:
        out.append(apply(GridFn.impulse(grid, t)))
    return np.column_stack(out)


def matrix_abr_left(grid: Grid, p: ABParams) -> DenseMatrix:
    """Left ABR difference on zero-extended interior functions, restricted to the interior."""
    a, b = grid.a, grid.b
    return _impulse_columns(
        grid, range(a + 1, b), lambda x: abr_diff_left(x, p).restrict(a + 1, b - 1).values
    )


def matrix_abr_right(grid: Grid, p: ABParams) -> DenseMatrix:
    """Right ABR difference on zero-extended interior functions, restricted to the interior."""
    a, b = grid.a, grid.b
    return _impulse_columns(
        grid, range(a + 1, b), lambda x: abr_diff_right(x, p).restrict(a + 1, b - 1).values
    )


def symmetry_defect(m: DenseMatrix) -> float:
    norm = np.max(np.abs(m))
    return float(np.max(np.abs(m - m.T)) / norm) if norm > 0 else 0.0


def assemble_abr_slp(prob: SLProblem) -> DenseMatrix:
    r""":math:`K_L\,\mathrm{diag}(p)\,K_R + \mathrm{diag}(q)` over the interior."""
    if prob.flavor is not Flavor.ABR_ABR:
        raise ValueError("assemble_abr_slp needs flavor ABR_ABR")
    kl = matrix_abr_left(prob.grid, prob.params)
    kr = matrix_abr_right(prob.grid, prob.params)
    inner = prob.grid.interior
    p = prob.p.restrict_to(inner).values
    q = prob.q.restrict_to(inner).values
    return kl @ (p[:, None] * kr) + np.diag(q)


def assemble_abc_slp(prob: SLProblem, bc: BCSpec) -> tuple[DenseMatrix, DenseMatrix]:
    r"""Square pencil :math:`(A, B)` for the ABC-ABR problem with two boundary conditions.

    Unknowns are :math:`x(a), \dots, x(b-1)`. Row 0 is the condition at
    :math:`a`, rows for :math:`t = a+1, \dots, b-2` hold the equation, and
    the last row is the condition at :math:`b-1`. The equation at
    :math:`t = b-1` is left out to keep the pencil square; see
    :func:`dropped_row`.
    """
    if prob.flavor is not Flavor.ABC_ABR:
        raise ValueError("assemble_abc_slp needs flavor ABC_ABR")
    grid, p = prob.grid, prob.params
    a, b = grid.a, grid.b
    m = b - a

    def column(x: GridFn) -> np.ndarray:
        rx = abr_diff_right(x, p)  # on {a, ..., b-1}
        w = prob.p.restrict(a, b - 1) * rx
        lw = abc_diff_left(w, p)  # on {a+1, ..., b-1}
        ex = gen_e_right(x, p)
        col = np.empty(m)
        col[0] = bc.c1 * ex(a) + bc.c2 * rx(a)
        col[1 : m - 1] = lw.restrict(a + 1, b - 2).values + (
            prob.q * x
        ).restrict(a + 1, b - 2).values
        col[m - 1] = bc.d1 * ex(b - 1) + bc.d2 * rx(b - 1)
        return col

    amat = _impulse_columns(grid, range(a, b), column)
    bmat = np.zeros((m, m))
    idx = np.arange(1, m - 1)
    bmat[idx, idx] = prob.r.restrict(a + 1, b - 2).values
    return amat, bmat


def dropped_row(prob: SLProblem) -> tuple[np.ndarray, float]:
    """Equation row at :math:`t = b-1` over the unknowns, and its weight :math:`r(b-1)`."""
    grid, p = prob.grid, prob.params
    a, b = grid.a, grid.b

    def value(x: GridFn) -> float:
        w = prob.p.restrict(a, b - 1) * abr_diff_right(x, p)
        return abc_diff_left(w, p)(b - 1) + prob.q(b - 1) * x(b - 1)

    row = np.array([value(GridFn.impulse(grid, t)) for t in range(a, b)])
    return row, prob.r(b - 1)


# }}}


# {{{ solvers


def _normalize_sign(x: np.ndarray) -> np.ndarray:
    i = np.argmax(np.abs(x))
    return x / x[i] * np.abs(x[i])


def solve_symmetric_slp(l2: DenseMatrix, r: GridFn | np.ndarray) -> EigenResult:
    r"""Solve :math:`L_2 x = \lambda\,\mathrm{diag}(r)\,x` for symmetric :math:`L_2`.

    The congruence :math:`S = R^{-1/2} L_2 R^{-1/2}` turns the problem into a
    standard symmetric one, so eigenvalues are real and the eigenvectors
    :math:`x = R^{-1/2} v` are orthonormal in the :math:`r`-weighted inner
    product. *r* may be given on the interior or on the full grid.
    """
    l2 = np.asarray(l2, dtype=np.float64)
    n = l2.shape[0]
    if l2.shape != (n, n):
        raise ValueError(f"matrix must be square: {l2.shape}")
    if isinstance(r, GridFn):
        t = r.t
        rv = r.values
        if rv.size == n + 2:
            t, rv = t[1:-1], rv[1:-1]
    else:
        rv = np.asarray(r, dtype=np.float64)
        t = np.arange(1, n + 1)
    if rv.size != n:
        raise ValueError(f"r has {rv.size} interior values, matrix has order {n}")
    if np.any(rv <= 0):
        raise DomainError("r must be positive")
    defect = symmetry_defect(l2)
    if defect > SYMMETRY_THRESHOLD:
        raise AsymmetricMatrixError(f"symmetry defect {defect:.3e} exceeds {SYMMETRY_THRESHOLD}")

    d = 1.0 / np.sqrt(rv)
    s = d[:, None] * l2 * d[None, :]
    s = 0.5 * (s + s.T)
    w, v = la.eigh(s)
    x = d[:, None] * v
    x = np.column_stack([_normalize_sign(x[:, i]) for i in range(n)])
    x = x / np.sqrt(np.sum(rv[:, None] * x * x, axis=0))[None, :]

    res = np.abs(l2 @ x - (rv[:, None] * x) * w[None, :]).max(axis=0)
    res /= np.abs(x).max(axis=0)
    gram = x.T @ (rv[:, None] * x)
    off = gram - np.diag(np.diag(gram))
    return EigenResult(
        eigenvalues=w.astype(np.complex128),
        eigenvectors=x,
        residual_norms=res,
        max_imag=0.0,
        orthogonality_defect=float(np.max(np.abs(off))) if n > 1 else 0.0,
        t=np.asarray(t),
        diagnostics={
            "symmetry_defect": defect,
            "gram_defect": float(np.max(np.abs(gram - np.eye(n)))),
        },
    )


def _pivot_columns(c: np.ndarray, preferred: tuple[int, int]) -> list[int]:
    """Columns of the 2-row block *c* used to eliminate two unknowns."""
    scale = np.max(np.abs(c))
    for i in range(2):
        if np.max(np.abs(c[i])) <= PIVOT_THRESHOLD * max(scale, 1.0):
            raise SingularPivotError(
                f"boundary condition {'at a' if i == 0 else 'at b-1'} (BC{i + 1}) "
                f"has a zero row and cannot fix an unknown"
            )
    block = c[:, list(preferred)]
    sv = np.linalg.svd(block, compute_uv=False)
    if sv[-1] > PIVOT_THRESHOLD * sv[0]:
        return list(preferred)
    _, rr, piv = la.qr(c, pivoting=True)
    if abs(rr[1, 1]) <= PIVOT_THRESHOLD * abs(rr[0, 0]):
        raise SingularPivotError("the two boundary conditions are linearly dependent")
    return sorted(int(j) for j in piv[:2])


def solve_pencil(
    amat: DenseMatrix,
    bmat: DenseMatrix,
    bc_rows: tuple[int, int] | None = None,
    weights: np.ndarray | None = None,
    t: np.ndarray | None = None,
) -> EigenResult:
    r"""Solve :math:`A x = \lambda B x` where the rows ``bc_rows`` of :math:`B` vanish.

    The two constraint rows eliminate two unknowns (columns 0 and
    :math:`m-1` unless that block is near-singular, then the columns picked by
    pivoted QR). The reduced pencil :math:`(A', B')` is solved by a dense
    nonsymmetric eigensolver on :math:`B'^{-1}A'`, and each eigenpair is
    checked against every row of the original :math:`(A, B)`.

    ``weights`` (default: the diagonal of :math:`B`) define the inner product
    used for the orthogonality report, over all unknowns except the first.
    """
    amat = np.asarray(amat, dtype=np.float64)
    bmat = np.asarray(bmat, dtype=np.float64)
    m = amat.shape[0]
    if amat.shape != (m, m) or bmat.shape != (m, m):
        raise ValueError("A and B must be square of the same order")
    bc = list(bc_rows) if bc_rows is not None else [0, m - 1]
    if np.any(bmat[bc] != 0):
        raise ValueError("constraint rows of B must vanish")
    ops = [i for i in range(m) if i not in bc]

    c = amat[bc]
    piv = _pivot_columns(c, (0, m - 1))
    free = [j for j in range(m) if j not in piv]
    # x_piv = elim @ x_free
    elim = -np.linalg.solve(c[:, piv], c[:, free])
    ar = amat[np.ix_(ops, free)] + amat[np.ix_(ops, piv)] @ elim
    br = bmat[np.ix_(ops, free)] + bmat[np.ix_(ops, piv)] @ elim
    if np.linalg.cond(br) > 1e12:
        raise SingularPencilError("reduced right-hand matrix of the pencil is singular")

    lam, vr = la.eig(np.linalg.solve(br, ar))
    order = np.lexsort((lam.imag, np.round(lam.real, 12)))
    lam, vr = lam[order], vr[:, order]

    x = np.zeros((m, lam.size), dtype=np.complex128)
    x[free] = vr
    x[piv] = elim @ vr
    for i in range(lam.size):
        k = np.argmax(np.abs(x[:, i]))
        x[:, i] /= x[k, i]

    res = np.abs(amat @ x - (bmat @ x) * lam[None, :]).max(axis=0) / np.abs(x).max(axis=0)
    scale = np.max(np.abs(amat).sum(axis=1)) + np.abs(lam) * np.max(np.abs(bmat).sum(axis=1))
    bc_res = np.abs(amat[bc] @ x).max(axis=0) / np.abs(x).max(axis=0)

    w = np.diag(bmat).copy() if weights is None else np.asarray(weights, dtype=np.float64)
    real_idx = [
        i for i in range(lam.size) if abs(lam[i].imag) <= 1e-8 * max(abs(lam[i]), 1e-300)
    ]
    ortho = 0.0
    sel = np.arange(1, m)
    xr = np.real(x[sel])
    norms = np.sqrt(np.sum(w[sel, None] * xr * xr, axis=0))
    gap = 1e-8 * max(1.0, float(np.max(np.abs(lam)))) if lam.size else 0.0
    for ii, i in enumerate(real_idx):
        for j in real_idx[ii + 1 :]:
            if abs(lam[i].real - lam[j].real) <= gap:
                continue
            ip = np.sum(w[sel] * xr[:, i] * xr[:, j]) / (norms[i] * norms[j])
            ortho = max(ortho, abs(float(ip)))

    ar_sym = symmetry_defect(np.real(ar)) if ar.size else 0.0
    return EigenResult(
        eigenvalues=lam,
        eigenvectors=x,
        residual_norms=res,
        max_imag=float(np.max(np.abs(lam.imag))) if lam.size else 0.0,
        orthogonality_defect=ortho,
        t=np.arange(m) if t is None else np.asarray(t),
        diagnostics={
            "pivot_columns": piv,
            "scaled_residuals": (res / scale).tolist(),
            "bc_residuals": bc_res.tolist(),
            "reduced_symmetry_defect": ar_sym,
            "eigenvector_max_imag": float(np.max(np.abs(x.imag))) if x.size else 0.0,
        },
    )


def solve_abc_slp(prob: SLProblem, bc: BCSpec) -> EigenResult:
    """Assemble and solve the ABC-ABR pencil, with problem-level diagnostics."""
    amat, bmat = assemble_abc_slp(prob, bc)
    a, b = prob.grid.a, prob.grid.b
    r = prob.r.restrict(a, b - 1).values
    res = solve_pencil(amat, bmat, weights=r, t=np.arange(a, b))
    row, rb = dropped_row(prob)
    x = res.eigenvectors
    drop = np.abs(row @ x - res.eigenvalues * rb * x[-1]) / np.abs(x).max(axis=0)
    p = prob.params
    diag = dict(res.diagnostics)
    diag["dropped_row_residuals"] = drop.tolist()
    diag["bc_b_minus_1_coefficient"] = bc.d1 * (1 - p.alpha) + bc.d2 * p.b_of_alpha
    return EigenResult(
        res.eigenvalues,
        res.eigenvectors,
        res.residual_norms,
        res.max_imag,
        res.orthogonality_defect,
        res.t,
        diag,
    )


def solve_abr_slp(prob: SLProblem) -> EigenResult:
    """Assemble and solve the ABR-ABR problem."""
    return solve_symmetric_slp(assemble_abr_slp(prob), prob.r)


# }}}


# {{{ continuous bilinear forms


@dataclass(frozen=True)
class ContinuousSLProblem:
    """Coefficients of a continuous fractional Sturm-Liouville operator on a mesh."""

    mesh: UniformMesh
    p: MeshFn
    q: MeshFn
    r: MeshFn
    params: ABParams

    def __post_init__(self) -> None:
        for name in ("p", "q", "r"):
            if getattr(self, name).mesh != self.mesh:
                raise ValueError(f"{name} must be given on the problem mesh")
        if np.any(self.r.values <= 0):
            raise DomainError("r must be positive")
        if not 0 < self.params.alpha < 1:
            raise DomainError(f"need 0 < alpha < 1: got {self.params.alpha}")


def _form_abr(u: MeshFn, v: MeshFn, prob: ContinuousSLProblem, corrected: bool) -> float:
    r""":math:`\int v\,L_1 u` with :math:`L_1 u = {}^{ABR}_aD^\alpha(p\,{}^{ABR}D_b^\alpha u) + qu`."""
    p, mesh = prob.params, prob.mesh
    w = MeshFn(mesh, prob.p.values * abr_deriv_right(u, p).values)
    lw = abr_deriv_left(w, p).values
    base = trapezoid(v.values * prob.q.values * u.values, mesh.h)
    if not corrected:
        return base + trapezoid(v.values * lw, mesh.h)
    rule = ml_product_rule(float(p.alpha), float(p.lam), float(mesh.h), mesh.n_points)
    c = p.scale * w.values[0]
    smooth = trapezoid(v.values * (lw - c * rule.node_kernel), mesh.h)
    return base + smooth + c * rule.transform_right(v.values)[0]


def continuous_form_symmetry(
    u: MeshFn, v: MeshFn, prob: ContinuousSLProblem, corrected: bool = True
) -> float:
    r"""Residual :math:`\left|\int v\,L_1 u - \int u\,L_1 v\right|`."""
    return abs(_form_abr(u, v, prob, corrected) - _form_abr(v, u, prob, corrected))


class FormKind(enum.Enum):
    LEFT_BILINEAR = "left_bilinear"


def continuous_abc_form_check(
    u: MeshFn,
    v: MeshFn,
    prob: ContinuousSLProblem,
    which: FormKind | str = FormKind.LEFT_BILINEAR,
    corrected: bool = True,
) -> float:
    r"""Residual of the bilinear identity for :math:`{}^CL_1 v = {}^{ABC}_aD^\alpha(p\,{}^{ABR}D_b^\alpha v) + qv`

    .. math::

        \int u\,{}^CL_1 v = \int q u v + \int p\,{}^{ABR}D_b^\alpha v\,{}^{ABR}D_b^\alpha u
            + \frac{B}{1-\alpha}\, p\,\mathbf{E}_{b^-}u\,{}^{ABR}D_b^\alpha v \Big|_a^b.

    The ABC derivative of :math:`p\,{}^{ABR}D_b^\alpha v` uses the slopes of its
    interpolant. Near :math:`b` both integrands carry a
    :math:`(b-t)^\alpha` term inherited from :math:`E_\alpha(\lambda (b-t)^\alpha)`;
    with ``corrected=True`` its leading trapezoid error is removed, using
    the coefficient :math:`\kappa = \lambda/\Gamma(1+\alpha)` of that kernel term.
    """
    FormKind(which)
    p, mesh = prob.params, prob.mesh
    rule = ml_product_rule(float(p.alpha), float(p.lam), float(mesh.h), mesh.n_points)
    s = p.scale
    ru = abr_deriv_right(u, p).values
    rv = abr_deriv_right(v, p).values
    w = prob.p.values * rv
    cl1v = s * rule.slope_transform_left(w) + prob.q.values * v.values

    lhs = trapezoid(u.values * cl1v, mesh.h)
    body = trapezoid(prob.p.values * rv * ru, mesh.h)
    eu = rule.transform_right(u.values)
    pv = prob.p.values
    boundary = s * (pv[-1] * eu[-1] * rv[-1] - pv[0] * eu[0] * rv[0])
    rhs = trapezoid(prob.q.values * u.values * v.values, mesh.h) + body + boundary
    if corrected:
        kappa = p.lam / math.gamma(1 + p.alpha)
        ub, vb, pb = u.values[-1], v.values[-1], pv[-1]
        lhs -= endpoint_power_correction(ub * s * pb * s * vb * kappa, p.alpha, mesh.h)
        rhs -= endpoint_power_correction(2 * pb * s * s * ub * vb * kappa, p.alpha, mesh.h)
    return abs(lhs - rhs)


# }}}
