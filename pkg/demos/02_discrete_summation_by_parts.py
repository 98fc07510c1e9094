"""
Summation by parts for discrete AB differences
==============================================

"""

# %%
# Random data on the grid {0, ..., 21}
import numpy as np

from abfrac import ABParams, Grid, GridFn, abr_diff_left, abr_diff_right, gen_e_right
from abfrac.ab_discrete import ibp_abr_diff_check, ibp_scale
from abfrac.sturm_liouville import matrix_abr_left, matrix_abr_right

rng = np.random.default_rng(0)
grid = Grid(0, 21)
f = GridFn(grid, rng.standard_normal(grid.size))
g = GridFn(grid, rng.standard_normal(grid.size))
p = ABParams(0.3)

# %%
# Moving the left Riemann-type difference from g onto f turns it into the
# right one.  The residual is at round-off level.
print("residual / scale:", ibp_abr_diff_check(f, g, p) / ibp_scale(f, g))

# %%
# Written with matrices over interior points: K_L^T = K_R.
kl = matrix_abr_left(grid, p)
kr = matrix_abr_right(grid, p)
print("max |K_L^T - K_R|:", np.abs(kl.T - kr).max())
print(kl[:4, :4].round(4))

# %%
# The right generalized sum at b-1 only sees f(b-1) with weight 1-alpha,
# so the right difference there is B f(b-1).
print(gen_e_right(f, p)(20), (1 - p.alpha) * f(20))
print(abr_diff_right(f, p)(20), f(20))

# %%
# Left differences live on {1, ..., 21}, right ones on {0, ..., 20}.
print(abr_diff_left(f, p).grid, abr_diff_right(f, p).grid)
