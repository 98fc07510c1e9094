"""
Discrete fractional Sturm-Liouville spectra
===========================================

"""

# %%
import numpy as np

from abfrac import ABParams, BCSpec, Flavor, Grid, GridFn, SLProblem, solve_abc_slp, solve_abr_slp

grid = Grid(0, 41)
n = grid.size
t = grid.t.astype(float)

# %%
# Riemann-Riemann type: the operator matrix is symmetric, so the spectrum is
# real and eigenvectors are orthogonal with respect to the weight r.
prob = SLProblem(
    grid,
    p=GridFn(grid, 1 + 0.5 * np.sin(t / 5)),
    q=GridFn(grid, np.zeros(n)),
    r=GridFn(grid, 1 + t / n),
    params=ABParams(0.3),
    flavor=Flavor.ABR_ABR,
)
res = solve_abr_slp(prob)
print("lowest eigenvalues:", res.eigenvalues.real[:5].round(5))
print("max residual:", res.residual_norms.max(), " gram defect:", res.diagnostics["gram_defect"])

# %%
# Caputo-Riemann type with two boundary conditions.  Realness is not
# guaranteed for the finite pencil, so max_imag is measured.
prob = SLProblem(grid, GridFn(grid, np.ones(n)), GridFn(grid, np.zeros(n)), GridFn(grid, np.ones(n)),
                 ABParams(0.3), Flavor.ABC_ABR)
res = solve_abc_slp(prob, BCSpec(c1=1.0, c2=0.0, d1=0.0, d2=1.0))
print("lowest eigenvalues:", res.eigenvalues[:5].real.round(5))
print("max_imag:", res.max_imag, " orthogonality defect:", res.orthogonality_defect)

# %%
# The eigenvector table is what `abfrac slp` writes next to its JSON report.
print(res.eigenvector_csv().splitlines()[0][:40], "...")
