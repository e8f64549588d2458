"""Exact and asymptotic moments of the determinant of a random correlation matrix.

For a matrix with density proportional to ``det(R)**(eta - 1)`` the
determinant is a product of independent Beta variables

    D_d = prod_{j=1}^{d-1} Beta(alpha_j, beta_j),
    alpha_j = eta + (j - 1)/2,   beta_j = (d - j)/2,

whose parameter sum ``S = eta + (d - 1)/2`` does not depend on ``j``.  All
moments below follow from that product.  Quantities that decay like
``exp(-d)`` are returned on the log scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .specfun import CONSTANTS, digamma, log_gamma, log_gamma_ratio, trigamma

__all__ = [
    "BetaParams",
    "VarianceApprox",
    "MomentReport",
    "factor_params",
    "exact_log_mean_det",
    "exact_log_second_moment_det",
    "exact_log_var_det",
    "exact_var_det",
    "approx_var_det",
    "log_mean_root",
    "exact_mean_root",
    "var_root",
    "logdet_mean",
    "logdet_var",
    "asymptotic_logdet_mean",
    "mgf_logdet",
    "mgf_approx",
    "stirling_log_factorial",
    "moment_report",
]


def _check_d(d):
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    return int(d)


def _check_eta(eta):
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    return float(eta)


class BetaParams(NamedTuple):
    alpha: np.ndarray
    beta_: np.ndarray
    sum: float


def factor_params(d, eta=1.0) -> BetaParams:
    """Parameters of the ``d - 1`` independent Beta factors of ``D_d``."""
    d = _check_d(d)
    eta = _check_eta(eta)
    j = np.arange(1, d, dtype=float)
    alpha = eta + (j - 1.0) / 2.0
    beta_ = (d - j) / 2.0
    return BetaParams(alpha, beta_, eta + (d - 1.0) / 2.0)


def exact_log_mean_det(d, eta=1.0) -> float:
    """``ln E(D_d)``; for ``eta = 1`` this is ``ln d! - (d - 1) ln(d + 1)``."""
    d = _check_d(d)
    if eta == 1.0:
        return log_gamma(d + 1.0) - (d - 1) * math.log(d + 1.0)
    a, _, s = factor_params(d, eta)
    return float(np.sum(np.log(a / s)))


def exact_log_second_moment_det(d, eta=1.0) -> float:
    """``ln E(D_d^2)``; for ``eta = 1``: ``ln[d! (d+2)! / (6 (d+1)^(d-1) (d+3)^(d-1))]``."""
    d = _check_d(d)
    if eta == 1.0:
        return (log_gamma(d + 1.0) + log_gamma(d + 3.0) - math.log(6.0)
                - (d - 1) * (math.log(d + 1.0) + math.log(d + 3.0)))
    a, _, s = factor_params(d, eta)
    return float(np.sum(np.log(a * (a + 1.0) / (s * (s + 1.0)))))


def exact_log_var_det(d, eta=1.0) -> float:
    """``ln var(D_d)`` from the first two moments, via log-sub-exp."""
    m2 = exact_log_second_moment_det(d, eta)
    m1 = exact_log_mean_det(d, eta)
    gap = 2.0 * m1 - m2
    if gap >= 0.0:
        # only reachable through roundoff; the variance is positive
        return -math.inf
    return m2 + math.log(-math.expm1(gap))


def exact_var_det(d, eta=1.0) -> float:
    """``var(D_d)``; underflows to 0.0 for very large ``d``, use :func:`exact_log_var_det`."""
    return math.exp(exact_log_var_det(d, eta))


class VarianceApprox(NamedTuple):
    """Log of three large-``d`` variance approximations.

    ``leading`` uses ``c d^3 / e^2`` with ``c = sqrt((d+1)/(d+3))/6``.
    ``corrected`` uses ``(c' (d+3)^3 - e^2 (d+1)) / e^2`` with
    ``c' = sqrt((d+3)/(d+1))/6``, which is the constant the Stirling
    expansion actually produces.  ``corrected_alt_c`` is the same
    expression with ``c`` in place of ``c'``; it is negative (NaN here) for
    small ``d``.
    """

    leading: float
    corrected: float
    corrected_alt_c: float


def approx_var_det(d) -> VarianceApprox:
    d = _check_d(d)
    e2 = math.exp(2.0)
    prefix = math.log(2.0 * math.pi) + 2.0 * math.log(d + 1.0) - 2.0 * (d + 1.0) - 2.0
    c = math.sqrt((d + 1.0) / (d + 3.0)) / 6.0
    c_prime = math.sqrt((d + 3.0) / (d + 1.0)) / 6.0

    def log_pos(v):
        return math.log(v) if v > 0 else math.nan

    return VarianceApprox(
        leading=prefix + math.log(c) + 3.0 * math.log(d),
        corrected=prefix + log_pos(c_prime * (d + 3.0) ** 3 - e2 * (d + 1.0)),
        corrected_alt_c=prefix + log_pos(c * (d + 3.0) ** 3 - e2 * (d + 1.0)),
    )


def _log_root_terms(d, p, eta):
    a, _, s = factor_params(d, eta)
    h = p / d
    return log_gamma_ratio(a, h) - log_gamma_ratio(s, h)


def log_mean_root(d, p=1, eta=1.0) -> float:
    """``ln E(D_d^(p/d))`` as a sum of log Beta-function ratios."""
    d = _check_d(d)
    return float(np.sum(_log_root_terms(d, p, eta)))


def exact_mean_root(d, p=1, eta=1.0) -> float:
    """``E(D_d^(p/d))``, exact.  Tends to ``exp(-p)`` as ``d`` grows.

    Each factor contributes ``B(alpha + p/d, beta) / B(alpha, beta)``; the
    Gamma-function ratios are taken without cancellation so the result is
    reliable for ``d`` well beyond 1e5.
    """
    if p not in (1, 2):
        raise ValueError(f"p must be 1 or 2, got {p}")
    return math.exp(log_mean_root(d, p, eta))


def var_root(d, eta=1.0) -> float:
    """``var(D_d^(1/d)) = E(D_d^(2/d)) - E(D_d^(1/d))^2``."""
    d = _check_d(d)
    t1 = _log_root_terms(d, 1, eta)
    t2 = _log_root_terms(d, 2, eta)
    l1 = float(np.sum(t1))
    # sum the difference term by term; the two sums nearly cancel
    gap = float(np.sum(t2 - 2.0 * t1))
    return max(0.0, math.exp(2.0 * l1) * math.expm1(gap))


def logdet_mean(d, eta=1.0) -> float:
    """``E(ln D_d) = sum_j [psi(alpha_j) - psi(S)]``."""
    a, _, s = factor_params(d, eta)
    return float(np.sum(digamma(a)) - (len(a)) * digamma(s))


def logdet_var(d, eta=1.0) -> float:
    """``var(ln D_d) = sum_j [psi_1(alpha_j) - psi_1(S)]``."""
    a, _, s = factor_params(d, eta)
    return float(np.sum(trigamma(a)) - len(a) * trigamma(s))


def asymptotic_logdet_mean(d) -> float:
    """``-d (1 + ln 2) + gamma + 2 + 2 ln 2``, as published.

    Diagnostic only: the exact mean grows like ``-d``, not ``-d (1 + ln 2)``.
    """
    d = _check_d(d)
    ln2 = math.log(2.0)
    return -d * (1.0 + ln2) + CONSTANTS.euler_gamma + 2.0 + 2.0 * ln2


def mgf_logdet(d, t, eta=1.0) -> float:
    """``ln M(t) = ln E(D_d^t)`` for ``t > -eta`` (``t > -1`` in the uniform case)."""
    a, _, s = factor_params(d, eta)
    if not t > -a[0]:
        raise ValueError(f"the moment generating function needs t > {-a[0]}, got {t}")
    if t == 0:
        return 0.0
    return float(np.sum(log_gamma_ratio(a, t) - log_gamma_ratio(s, t)))


def mgf_approx(d, t) -> float:
    """``t ln E(D_d)``: the large-``d`` approximation ``M(t) ~ E(D_d)^t``."""
    return t * exact_log_mean_det(d)


def stirling_log_factorial(d) -> float:
    """``d ln d - d + ln(2 pi d)/2``."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return d * math.log(d) - d + 0.5 * math.log(2.0 * math.pi * d)


@dataclass
class MomentReport:
    d: int
    eta: float
    exact_log_mean: float
    exact_log_second_moment: float
    exact_variance_log_scale: float
    approx_variance_log_scale: VarianceApprox
    mean_root: float
    mean_root_sq: float
    var_root: float
    logdet_mean: float
    logdet_var: float
    mgf_values: list = field(default_factory=list)

    def as_flat_dict(self) -> dict:
        """Flat ``{column: value}`` in the fixed field order."""
        out = {
            "d": self.d,
            "eta": self.eta,
            "exact_log_mean": self.exact_log_mean,
            "exact_log_second_moment": self.exact_log_second_moment,
            "exact_variance_log_scale": self.exact_variance_log_scale,
        }
        for name, v in self.approx_variance_log_scale._asdict().items():
            out[f"approx_variance_log_scale_{name}"] = v
        out.update(
            mean_root=self.mean_root,
            mean_root_sq=self.mean_root_sq,
            var_root=self.var_root,
            logdet_mean=self.logdet_mean,
            logdet_var=self.logdet_var,
        )
        for t, exact, approx in self.mgf_values:
            out[f"mgf_log_exact_t{t:g}"] = exact
            out[f"mgf_log_approx_t{t:g}"] = approx
        return out


def moment_report(d, eta=1.0, ts=(0.5, 1.0, 2.0)) -> MomentReport:
    """Every closed-form quantity for one ``(d, eta)``.

    The variance approximations and the MGF approximation are only defined
    for the uniform case and are reported as NaN otherwise.
    """
    d = _check_d(d)
    eta = _check_eta(eta)
    uniform = eta == 1.0
    nan3 = VarianceApprox(math.nan, math.nan, math.nan)
    return MomentReport(
        d=d,
        eta=eta,
        exact_log_mean=exact_log_mean_det(d, eta),
        exact_log_second_moment=exact_log_second_moment_det(d, eta),
        exact_variance_log_scale=exact_log_var_det(d, eta),
        approx_variance_log_scale=approx_var_det(d) if uniform else nan3,
        mean_root=exact_mean_root(d, 1, eta),
        mean_root_sq=exact_mean_root(d, 2, eta),
        var_root=var_root(d, eta),
        logdet_mean=logdet_mean(d, eta),
        logdet_var=logdet_var(d, eta),
        mgf_values=[(t, mgf_logdet(d, t, eta), mgf_approx(d, t) if uniform else math.nan) for t in ts],
    )
