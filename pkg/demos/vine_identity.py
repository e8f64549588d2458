"""
Partial correlations and the determinant
========================================

The determinant of a correlation matrix is the product of (1 - rho^2) over
the partial correlations on any regular vine.  Check it on the D-vine.
"""

import math

import numpy as np

from randcorr.linalg import cholesky_log_det
from randcorr.sampler import ModelParams, RngStream, sample_correlation_matrix
from randcorr.vine import (
    PartialCorrSet,
    build_dvine,
    log_det_from_partials,
    matrix_to_partials,
    partials_to_matrix,
)

# three variables, two adjacent correlations of 0.5, conditionally independent ends
spec = build_dvine(3)
for edge in spec:
    print("edge", edge)
p = PartialCorrSet.from_mapping(spec, {(0, 1): 0.5, (1, 2): 0.5, (0, 2, (1,)): 0.0})
R = partials_to_matrix(spec, p)
print(R)
print("ln det via partials:", log_det_from_partials(p), " via Cholesky:", cholesky_log_det(R),
      " ln 0.5625:", math.log(0.5625))

# a larger batch: recover the partials and compare both log-determinants
d = 12
R = sample_correlation_matrix(ModelParams(d), RngStream(7), size=500)
P = matrix_to_partials(build_dvine(d), R)
gap = np.abs(log_det_from_partials(P) - cholesky_log_det(R))
err = np.abs(partials_to_matrix(build_dvine(d), P) - R)
print(f"d={d}: max log-det gap {gap.max():.1e}, max round-trip error {err.max():.1e}")
