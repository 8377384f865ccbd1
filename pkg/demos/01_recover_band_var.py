"""
Recovering a sparse VAR(1) transition matrix
============================================

A banded transition matrix is rescaled to spectral norm 0.8, a series of
length 400 is simulated from it, and three estimators are tuned by rolling
one-step prediction error: the column-wise L1 linear programs, the lasso and
ridge regression.  Their errors against the truth are printed side by side.
"""

import numpy as np

from dirvar.bench import build_model
from dirvar.covest import sample_covariances
from dirvar.estimators import estimate_direct, estimate_lasso, estimate_ridge, native_penalty, truncate
from dirvar.evaluation import cross_validate, default_grid, error_norms, sign_metrics
from dirvar.varproc import simulate

d, t_len, kappa = 20, 400, 0.8
model = build_model("band", d, 1, kappa, seed=11)
truth = model.transitions[0]
x = simulate(model, t_len, seed=11).values
print(f"truth: {np.count_nonzero(truth)} nonzeros out of {d * d}")

# all three methods share one penalty grid on the covariance scale
grid = default_grid(x)
fits = {}
for method, fit in (("direct", estimate_direct), ("lasso", estimate_lasso), ("ridge", estimate_ridge)):
    cv = cross_validate(x, grid, t_len // 2, t_len // 2, method=method, normalized=method != "direct")
    p, lam = cv.best
    lam = native_penalty(method, lam, t_len - p)
    est = fit(x, p, lam)
    fits[method] = est.lags if method == "direct" else est
    err = error_norms(fits[method], [truth])
    print(f"{method:>6}: lambda {lam:10.4g}  L1 {err.induced_l1:.3f}  "
          f"spectral {err.spectral:.3f}  max {err.element_max:.3f}")

# hard thresholding the direct estimate at a plug-in level
s_inv = np.linalg.inv(sample_covariances(x, 1).s)
lam = native_penalty("direct", cross_validate(x, grid, t_len // 2, t_len // 2).best[1], t_len - 1)
gamma = 2.0 * np.max(np.sum(np.abs(s_inv), axis=0)) * lam
signs = sign_metrics(truncate(fits["direct"][0], gamma), truth)
print(f"truncated at {gamma:.3f}: precision {signs['support_precision']:.2f}, "
      f"recall {signs['support_recall']:.2f}, exact sign match {signs['exact_match']}")
