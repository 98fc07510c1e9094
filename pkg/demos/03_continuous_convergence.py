"""
Continuous operators: watching the identities converge
======================================================

"""

# %%
import numpy as np

from abfrac import ABParams, MeshFn, Side, UniformMesh
from abfrac.ab_continuous import ibp_abr_continuous_check, ibp_abc_continuous_check, inverse_law_residual
from abfrac.quadrature import convergence_order

p = ABParams(0.5)


def pair(mesh):
    f = MeshFn.from_function(mesh, lambda t: np.exp(-t), lambda t: -np.exp(-t))
    g = MeshFn.from_function(mesh, lambda t: np.cos(2 * t) + t, lambda t: 1 - 2 * np.sin(2 * t))
    return f, g


meshes = [UniformMesh(0.0, 1.0, n) for n in (251, 501, 1001, 2001)]
hs = [m.h for m in meshes]

# %%
# Integration by parts for the Riemann-type derivatives.  The plain trapezoid
# rule meets a (t-a)^alpha kink at the end and converges like h^1.5; splitting
# off the kernel term and integrating it exactly restores h^2.
plain = [ibp_abr_continuous_check(*pair(m), p, corrected=False) for m in meshes]
split = [ibp_abr_continuous_check(*pair(m), p) for m in meshes]
print("plain  ", np.array(plain), convergence_order(hs, plain))
print("split  ", np.array(split), convergence_order(hs, split))

# %%
# The Caputo-type version carries a boundary term.
left = [ibp_abc_continuous_check(*pair(m), p, Side.LEFT) for m in meshes]
print("caputo ", np.array(left), convergence_order(hs, left))

# %%
# Inverse laws go through the singular Riemann-Liouville integral and
# converge more slowly.
inv = [inverse_law_residual(pair(m)[0], p) for m in meshes]
print("inverse", np.array(inv), convergence_order(hs, inv))
