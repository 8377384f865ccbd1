"""
One column LP along a penalty path
==================================

Each column of the direct estimate solves

    minimize |v|_1  subject to  |S v - r|_inf <= lambda

with ``S`` the lag-0 sample covariance and ``r`` a column of the lag-1
covariance.  Walking ``lambda`` downward, the dual simplex reuses the
previous basis, so most steps need only a few pivots.  The solution becomes
denser as the constraint tightens.
"""

import numpy as np

from dirvar.bench import build_model
from dirvar.covest import sample_covariances
from dirvar.estimators import solve_direct_path
from dirvar.lp import build_column_lp, recover_beta, solve_simplex
from dirvar.varproc import simulate

model = build_model("random", 15, 1, 0.7, seed=2)
cov = sample_covariances(simulate(model, 300, seed=2).values, 1)
col = 4
r = cov.s1[:, col]
truth = model.transitions[0][:, col]
print(f"true column {col}: nonzero rows {np.flatnonzero(truth).tolist()}")

lambdas = np.geomspace(1.0, 0.01, 12) * np.max(np.abs(cov.s1))
betas, statuses, pivots = solve_direct_path(cov.s, r[:, None], lambdas)
print(" lambda   |v|_1  nnz  pivots")
for lam, beta, piv in zip(lambdas, betas, pivots):
    v = beta[:, 0]
    print(f"{lam:7.4f}  {np.sum(np.abs(v)):6.3f}  {np.count_nonzero(v):3d}  {int(piv[0]):6d}")

# the cold two-phase primal solver lands on the same objective
lam = lambdas[6]
cold = solve_simplex(build_column_lp(cov.s, r, lam))
print(f"lambda {lam:.4f}: warm |v|_1 {np.sum(np.abs(betas[6][:, 0])):.6f}, "
      f"cold {cold.objective:.6f}, residual {np.max(np.abs(cov.s @ recover_beta(cold, 15) - r)):.4f}")
