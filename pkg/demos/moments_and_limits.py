"""
Exact moments and the 1/e limit
===============================

Closed-form moments of the determinant, and the d-th root converging to 1/e.
"""

import math

from randcorr.config import ExperimentConfig
from randcorr.moments import (
    approx_var_det,
    exact_log_mean_det,
    exact_log_var_det,
    exact_mean_root,
    logdet_mean,
    logdet_var,
    var_root,
)
from randcorr.sampler import sample_batch
from randcorr.stats import summarize

# E(D_5) = 5!/6^4; compare with 100,000 sampled determinants
y = sample_batch(ExperimentConfig(d=5, n=100_000, seed=1))
s = summarize([math.exp(v) for v in y])
print(f"E(D_5) exact {math.exp(exact_log_mean_det(5)):.6f}, Monte Carlo {s.mean:.6f} +/- {s.sem:.6f}")

# moments decay like exp(-d) so everything is kept on the log scale
for d in (10, 100, 1000):
    approx = approx_var_det(d)
    print(f"d={d:5d}  ln E(D) = {exact_log_mean_det(d):10.3f}  ln var(D) = {exact_log_var_det(d):10.3f}"
          f"  large-d approx = {approx.corrected:10.3f}")

# the d-th root concentrates at 1/e
print("1/e =", math.exp(-1))
for d in (10, 100, 1000, 10_000, 100_000):
    print(f"d={d:6d}  E(D^(1/d)) = {exact_mean_root(d):.8f}  var = {var_root(d):.3e}")

# the log-determinant: mean close to -d, variance growing like log d
for d in (100, 1000, 10_000):
    print(f"d={d:6d}  E(ln D) + d = {logdet_mean(d) + d:.4f}  var(ln D) = {logdet_var(d):.4f}")
