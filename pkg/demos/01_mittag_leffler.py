"""
Mittag-Leffler functions, continuous and discrete
=================================================

"""

# %%
# The one-parameter function interpolates between the exponential (alpha = 1)
# and slower, heavy-tailed decay for alpha < 1.
import numpy as np

from abfrac import mittag_leffler, ml_one, ml_two
from abfrac.discrete import DiscreteMLArgs, discrete_ml, ml_kernel_values

t = np.linspace(0, 5, 11)
for alpha in (1.0, 0.8, 0.5, 0.3):
    print(f"alpha={alpha}:", np.round(mittag_leffler(alpha, 1.0, -t), 4))

# %%
# Sanity: E_1(z) = exp(z), E_2(-z^2) = cos(z)
print(ml_one(1.0, 1.0), np.e)
print(ml_two(2.0, 1.0, -(0.7**2)), np.cos(0.7))

# %%
# Large negative arguments make the power series cancel badly.  The library
# notices and re-sums in extended precision, so E_{1/2}(-30) comes out right:
# the exact value is exp(900) erfc(30), about 0.0188.
print(ml_one(0.5, -30.0))

# %%
# The nabla-discrete function replaces powers by rising factorials.  The
# kernel of the discrete AB operators is E(lam, n) with lam = -alpha/(1-alpha).
alpha = 0.3
lam = -alpha / (1 - alpha)
print([round(discrete_ml(DiscreteMLArgs(alpha, 1.0, lam, n)), 6) for n in range(8)])

# %%
# For long grids the series is hopeless in double precision; a recurrence
# gives every kernel value up to n at once.
y = ml_kernel_values(0.45, -0.45 / 0.55, 2000)
print(y[[10, 100, 1000, 2000]])
