"""Real special functions: log-gamma, digamma, trigamma, Beta and friends.

Every function accepts a scalar or an array and returns the same kind.
The routines are written for positive real arguments only; anything else
raises :class:`DomainError`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "MathConstants",
    "CONSTANTS",
    "log_gamma",
    "log_gamma_ratio",
    "digamma",
    "trigamma",
    "log_beta",
    "reg_inc_beta",
    "harmonic",
]


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


@dataclass(frozen=True)
class MathConstants:
    euler_gamma: float = 0.57721566490153286061
    ln_2pi: float = 1.83787706640934548356
    pi_sq_over_6: float = 1.64493406684822643647


CONSTANTS = MathConstants()

_HALF_LN_2PI = 0.5 * CONSTANTS.ln_2pi

# Below this the asymptotic series are not used; arguments are shifted up.
_ASYMPTOTIC_FROM = 10.0
# below this, 1/x^2 in the trigamma recurrence is summed in double-double
_TRIGAMMA_SPLIT = 0.05

# B_{2k} / (2k (2k-1)) for the Stirling series of ln Gamma.
_STIRLING = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
])

# B_{2k} / (2k) for digamma.
_DIGAMMA = np.array([
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
])

# B_{2k} for trigamma.
_TRIGAMMA = np.array([
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
])


def _zeta_coefficients(kmax=64):
    # (-1)^k zeta(k) / k for k >= 2: Taylor coefficients of ln Gamma(1 + z).
    n = np.arange(1, 200001, dtype=float)
    out = []
    for k in range(2, kmax + 1):
        if k < 12:
            # direct sum plus Euler-Maclaurin tail
            N = 200000.0
            z = math.fsum(n ** -k) + N ** (1 - k) / (k - 1) - 0.5 * N ** -k
        else:
            z = math.fsum(n[:60] ** -k)
        out.append((-1) ** k * z / k)
    return np.array(out)


_LNGAMMA_TAYLOR = _zeta_coefficients()


def _as_array(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError(f"{name} contains NaN")
    return arr


def _result(arr, scalar):
    return float(arr) if scalar else arr


def _poly_inv(x, coeffs, start_power, step):
    """sum_k coeffs[k] * x**-(start_power + step*k), Horner in 1/x**step."""
    w = 1.0 / x**step
    acc = np.zeros_like(x)
    for c in coeffs[::-1]:
        acc = acc * w + c
    return acc / x**start_power


def _stirling_tail(x):
    return _poly_inv(x, _STIRLING, 1, 2)


def _lgamma_large(x):
    return (x - 0.5) * np.log(x) - x + _HALF_LN_2PI + _stirling_tail(x)


def _lgamma_near_one(z):
    # ln Gamma(1+z) = -gamma z + sum_{k>=2} (-1)^k zeta(k) z^k / k, |z| <= 1/2
    acc = np.zeros_like(z)
    for c in _LNGAMMA_TAYLOR[::-1]:
        acc = acc * z + c
    return z * (acc * z - CONSTANTS.euler_gamma)


def log_gamma(x):
    """Natural log of the Gamma function for ``x > 0``.

    Near the zeros at 1 and 2 a Taylor series around 1 keeps the relative
    error small; elsewhere the argument is shifted to ``x >= 10`` and the
    Stirling series is used.
    """
    scalar = np.ndim(x) == 0
    x = _as_array(x)
    if np.any(x <= 0):
        raise DomainError("log_gamma requires x > 0")
    out = np.empty_like(x)

    tiny = x < 0.5
    near1 = (x >= 0.5) & (x < 1.5)
    near2 = (x >= 1.5) & (x < 2.5)
    mid = (x >= 2.5) & (x < _ASYMPTOTIC_FROM)
    big = x >= _ASYMPTOTIC_FROM

    if tiny.any():
        t = x[tiny]
        out[tiny] = _lgamma_near_one(t) - np.log(t)
    if near1.any():
        out[near1] = _lgamma_near_one(x[near1] - 1.0)
    if near2.any():
        z = x[near2] - 2.0
        out[near2] = np.log1p(z) + _lgamma_near_one(z)
    if mid.any():
        t = x[mid].copy()
        prod = np.ones_like(t)
        while True:
            m = t < _ASYMPTOTIC_FROM
            if not m.any():
                break
            prod[m] *= t[m]
            t[m] += 1.0
        out[mid] = _lgamma_large(t) - np.log(prod)
    if big.any():
        out[big] = _lgamma_large(x[big])
    return _result(out, scalar)


def log_gamma_ratio(x, h):
    """``ln Gamma(x + h) - ln Gamma(x)`` without cancellation.

    Needed wherever ``h`` is tiny compared with ``x`` (e.g. ``h = 1/d`` with
    ``x ~ d/2``), where differencing two :func:`log_gamma` values would
    lose most of the significant digits.
    """
    scalar = np.ndim(x) == 0 and np.ndim(h) == 0
    x, h = np.broadcast_arrays(_as_array(x), _as_array(h, "h"))
    x = x.astype(float)
    h = h.astype(float)
    if np.any(x <= 0) or np.any(x + h <= 0):
        raise DomainError("log_gamma_ratio requires x > 0 and x + h > 0")

    t = x.copy()
    acc = np.zeros_like(t)
    while True:
        m = np.minimum(t, t + h) < _ASYMPTOTIC_FROM
        if not m.any():
            break
        acc[m] -= np.log1p(h[m] / t[m])
        t[m] += 1.0

    y = t + h
    big = (t - 0.5) * np.log1p(h / t) + h * np.log(y) - h
    out = acc + big + (_stirling_tail(y) - _stirling_tail(t))
    return _result(out, scalar)


def _shift_up(x):
    # number of unit steps that bring x into the asymptotic range
    steps = np.maximum(np.ceil(_ASYMPTOTIC_FROM - x), 0.0)
    return x + steps, steps


def digamma(x):
    """psi(x) = d/dx ln Gamma(x), for x > 0."""
    scalar = np.ndim(x) == 0
    x = _as_array(x)
    if np.any(x <= 0):
        raise DomainError("digamma requires x > 0")
    t, steps = _shift_up(x)
    out = np.log(t) - 0.5 / t - _poly_inv(t, _DIGAMMA, 2, 2)
    for k in range(int(steps.max(initial=0)) - 1, -1, -1):
        out = np.where(k < steps, out - 1.0 / (x + k), out)
    return _result(out, scalar)


def trigamma(x):
    """psi_1(x), the derivative of the digamma function, for x > 0."""
    scalar = np.ndim(x) == 0
    x = _as_array(x)
    if np.any(x <= 0):
        raise DomainError("trigamma requires x > 0")
    t, steps = _shift_up(x)
    out = 1.0 / t + 0.5 / t**2 + _poly_inv(t, _TRIGAMMA, 3, 2)
    for k in range(int(steps.max(initial=0)) - 1, 0, -1):
        out = np.where(k < steps, out + 1.0 / (x + k) ** 2, out)
    head = steps > 0
    small = head & (x < _TRIGAMMA_SPLIT)
    out = np.where(head & ~small, out + 1.0 / np.where(head, x, 1.0) ** 2, out)
    out = np.array(out)
    for i in np.flatnonzero(small):
        # 1/x^2 dominates; carry it as hi + lo so the sum is rounded once
        exact = 1 / Fraction(float(x.flat[i])) ** 2
        hi = float(exact)
        out.flat[i] = hi + (float(exact - Fraction(hi)) + out.flat[i])
    return _result(out, scalar)


def log_beta(a, b):
    """ln B(a, b) for a, b > 0."""
    scalar = np.ndim(a) == 0 and np.ndim(b) == 0
    a, b = np.broadcast_arrays(_as_array(a, "a"), _as_array(b, "b"))
    if np.any(a <= 0) or np.any(b <= 0):
        raise DomainError("log_beta requires a > 0 and b > 0")
    out = log_gamma(a) + log_gamma(b) - log_gamma(a + b)
    return _result(out, scalar)


_CF_MAX_ITER = 300
_CF_EPS = 1e-14
_CF_TINY = 1e-300


def _betacf(x, a, b):
    # Modified Lentz evaluation of the incomplete-beta continued fraction.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        h = np.where(done, h, h * d * c)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < _CF_EPS
        if done.all():
            break
    return h


def reg_inc_beta(x, a, b):
    """Regularized incomplete beta function I_x(a, b).

    Parameters
    ----------
    x : float or array, in [0, 1]
    a, b : float or array, > 0

    Returns
    -------
    float or ndarray in [0, 1]
    """
    scalar = np.ndim(x) == 0 and np.ndim(a) == 0 and np.ndim(b) == 0
    x, a, b = np.broadcast_arrays(_as_array(x), _as_array(a, "a"), _as_array(b, "b"))
    x = x.astype(float)
    a = a.astype(float)
    b = b.astype(float)
    if np.any((x < 0) | (x > 1)):
        raise DomainError("reg_inc_beta requires 0 <= x <= 1")
    if np.any(a <= 0) or np.any(b <= 0):
        raise DomainError("reg_inc_beta requires a > 0 and b > 0")

    out = np.where(x <= 0.0, 0.0, 1.0)
    inner = (x > 0) & (x < 1)
    if inner.any():
        xi, ai, bi = x[inner], a[inner], b[inner]
        # Continued fraction converges fast for x < (a+1)/(a+b+2); else use symmetry.
        flip = xi > (ai + 1.0) / (ai + bi + 2.0)
        xs = np.where(flip, 1.0 - xi, xi)
        as_ = np.where(flip, bi, ai)
        bs = np.where(flip, ai, bi)
        log_front = (as_ * np.log(xs) + bs * np.log1p(-xs)
                     - np.asarray(log_beta(as_, bs)))
        val = np.exp(log_front) * _betacf(xs, as_, bs) / as_
        val = np.where(flip, 1.0 - val, val)
        out[inner] = np.clip(val, 0.0, 1.0)
    return _result(out, scalar)


def harmonic(n):
    """n-th harmonic number H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0."""
    n = int(n)
    if n < 0:
        raise DomainError("harmonic requires n >= 0")
    if n <= 100000:
        return math.fsum(1.0 / i for i in range(1, n + 1))
    return digamma(float(n + 1)) + CONSTANTS.euler_gamma
