"""Fractional operators with Mittag-Leffler kernels.

Continuous and nabla-discrete Atangana-Baleanu derivatives, sums and
integrals, the identities relating them, and fractional Sturm-Liouville
eigenproblems built on top.
"""

from __future__ import annotations

from abfrac.ab_continuous import (
    AccuracyWarning,
    DerivativeMethod,
    MeshFn,
    Side,
    UniformMesh,
    ab_integral_left,
    ab_integral_right,
    abc_deriv_left,
    abc_deriv_right,
    abr_deriv_left,
    abr_deriv_right,
    gen_e_left_c,
    gen_e_right_c,
    rl_integral_left,
    rl_integral_right,
)
from abfrac.ab_discrete import (
    ABParams,
    HigherOrderForm,
    ab_sum_left,
    ab_sum_right,
    abc_diff_left,
    abc_diff_right,
    abr_diff_left,
    abr_diff_right,
    gen_e_left,
    gen_e_right,
    higher_order_forms,
)
from abfrac.discrete import (
    DiscreteMLArgs,
    Grid,
    GridFn,
    GridMismatchError,
    caputo_diff_left,
    caputo_diff_right,
    delta,
    discrete_ml,
    discrete_ml3,
    nabla,
    nabla_sum_left,
    nabla_sum_right,
    q_reflect,
    rising,
    rl_diff_left,
    rl_diff_right,
)
from abfrac.special import (
    ConvergenceError,
    DomainError,
    MLArgs,
    MLTruncation,
    log_gamma,
    mittag_leffler,
    ml_one,
    ml_three,
    ml_two,
)
from abfrac.sturm_liouville import (
    BCSpec,
    ContinuousSLProblem,
    EigenResult,
    Flavor,
    SLProblem,
    solve_abc_slp,
    solve_abr_slp,
)

__version__ = "0.1.0"

__all__ = [
    "ABParams",
    "AccuracyWarning",
    "BCSpec",
    "ContinuousSLProblem",
    "ConvergenceError",
    "DerivativeMethod",
    "DiscreteMLArgs",
    "DomainError",
    "EigenResult",
    "Flavor",
    "Grid",
    "GridFn",
    "GridMismatchError",
    "HigherOrderForm",
    "MLArgs",
    "MLTruncation",
    "MeshFn",
    "SLProblem",
    "Side",
    "UniformMesh",
    "ab_integral_left",
    "ab_integral_right",
    "ab_sum_left",
    "ab_sum_right",
    "abc_deriv_left",
    "abc_deriv_right",
    "abc_diff_left",
    "abc_diff_right",
    "abr_deriv_left",
    "abr_deriv_right",
    "abr_diff_left",
    "abr_diff_right",
    "caputo_diff_left",
    "caputo_diff_right",
    "delta",
    "discrete_ml",
    "discrete_ml3",
    "gen_e_left",
    "gen_e_left_c",
    "gen_e_right",
    "gen_e_right_c",
    "higher_order_forms",
    "log_gamma",
    "mittag_leffler",
    "ml_one",
    "ml_three",
    "ml_two",
    "nabla",
    "nabla_sum_left",
    "nabla_sum_right",
    "q_reflect",
    "rising",
    "rl_diff_left",
    "rl_diff_right",
    "rl_integral_left",
    "rl_integral_right",
    "solve_abc_slp",
    "solve_abr_slp",
]
