"""Seeded sampling of random correlation matrices and their log-determinants.

Three routes produce draws of ``Y_d = ln D_d``:

``matrix``
    sample the matrix through the vine, then take its Cholesky log-det;
``double``
    sum of ``d(d-1)/2`` independent ``ln Beta(eta + i/2, 1/2)`` terms, where
    ``i = 0 .. d-2`` occurs ``i + 1`` times;
``direct``
    sum of ``d-1`` independent ``ln Beta(eta + (j-1)/2, (d-j)/2)`` terms.

All three have the same law.  Determinants are only ever handled as logs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .linalg import cholesky_log_det
from .vine import build_dvine, partials_to_matrix

__all__ = [
    "RngStream",
    "ModelParams",
    "BLOCK_SIZE",
    "standard_gamma",
    "sample_beta",
    "sample_log_beta",
    "sample_symmetric_beta_pm1",
    "partial_shapes",
    "sample_partials",
    "sample_correlation_matrix",
    "sample_log_det_direct",
    "sample_log_det_double",
    "sample_log_det_matrix",
    "sample_batch",
    "sample_matrix_batch",
]

# Samples are generated in fixed blocks; block b always uses stream b, so
# output content does not depend on how blocks are spread over workers.
BLOCK_SIZE = 1024

_ONE_BELOW = np.nextafter(1.0, 0.0)
_TINY = 1e-300


@dataclass
class RngStream:
    """Independent random stream ``stream_index`` of a master seed.

    Streams are spawned from ``numpy.random.SeedSequence``; a stream must not
    be shared between threads.
    """

    master_seed: int
    stream_index: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        ss = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_index),))
        self.generator = np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class ModelParams:
    """Dimension and LKJ-type weight ``eta`` (``eta = 1`` is uniform).

    ``0 < eta < 1`` is accepted only with ``extrapolated=True``.
    """

    d: int
    eta: float = 1.0
    extrapolated: bool = False

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.eta < 1 and not self.extrapolated:
            raise ValueError(f"eta < 1 requires extrapolated=True, got eta={self.eta}")


def _gen(rng) -> np.random.Generator:
    return rng.generator if isinstance(rng, RngStream) else rng


def standard_gamma(shape, rng, size=None) -> np.ndarray:
    """Gamma(shape, 1) variates by Marsaglia-Tsang squeeze/rejection.

    Shapes below one are boosted: ``G(a) = G(a + 1) * U**(1/a)``.
    ``shape`` may be an array; it is broadcast against ``size``.
    """
    gen = _gen(rng)
    shape = np.asarray(shape, dtype=float)
    if size is not None:
        shape = np.broadcast_to(shape, size)
    if np.any(~(shape > 0)):
        raise ValueError("gamma shape must be > 0")
    flat = shape.ravel()
    boost = flat < 1.0
    a = np.where(boost, flat + 1.0, flat)
    dd = a - 1.0 / 3.0
    cc = 1.0 / np.sqrt(9.0 * dd)

    out = np.empty(flat.size)
    pending = np.arange(flat.size)
    while pending.size:
        x = gen.standard_normal(pending.size)
        u = gen.random(pending.size)
        v = 1.0 + cc[pending] * x
        positive = v > 0
        v3 = np.where(positive, v, 1.0) ** 3
        dp = dd[pending]
        with np.errstate(divide="ignore"):
            accept = positive & (
                (u < 1.0 - 0.0331 * x**4)
                | (np.log(u) < 0.5 * x * x + dp * (1.0 - v3 + np.log(v3)))
            )
        out[pending[accept]] = dp[accept] * v3[accept]
        pending = pending[~accept]

    if boost.any():
        u = 1.0 - gen.random(int(boost.sum()))  # in (0, 1]
        out[boost] *= u ** (1.0 / flat[boost])
    return out.reshape(shape.shape)


def _check_ab(a, b):
    if np.any(~(np.asarray(a) > 0)) or np.any(~(np.asarray(b) > 0)):
        raise ValueError("Beta parameters must be > 0")


def sample_beta(a, b, rng, size=None) -> np.ndarray | float:
    """Beta(a, b) variates as ``G_a / (G_a + G_b)``, kept inside (0, 1)."""
    _check_ab(a, b)
    if size is None:
        size = np.broadcast(np.asarray(a), np.asarray(b)).shape
    ga = standard_gamma(a, rng, size)
    gb = standard_gamma(b, rng, size)
    x = np.clip(ga / (ga + gb), _TINY, _ONE_BELOW)
    return float(x) if x.ndim == 0 else x


def sample_log_beta(a, b, rng, size=None) -> np.ndarray | float:
    """``ln X`` for ``X ~ Beta(a, b)``, computed as ``-log1p(G_b / G_a)``.

    Stays accurate when ``X`` is close to one, where ``log(X)`` would not.
    """
    _check_ab(a, b)
    if size is None:
        size = np.broadcast(np.asarray(a), np.asarray(b)).shape
    ga = standard_gamma(a, rng, size)
    gb = standard_gamma(b, rng, size)
    with np.errstate(divide="ignore"):
        y = -np.log1p(gb / np.maximum(ga, _TINY))
    y = np.minimum(y, -np.finfo(float).tiny)
    return float(y) if y.ndim == 0 else y


def sample_symmetric_beta_pm1(shape, rng, size=None) -> np.ndarray | float:
    """``2X - 1`` with ``X ~ Beta(shape, shape)``: symmetric on (-1, 1)."""
    if np.any(~(np.asarray(shape) > 0)):
        raise ValueError("shape must be > 0")
    if size is None:
        size = np.shape(shape)
    ga = standard_gamma(shape, rng, size)
    gb = standard_gamma(shape, rng, size)
    r = np.clip((ga - gb) / (ga + gb), -_ONE_BELOW, _ONE_BELOW)
    return float(r) if r.ndim == 0 else r


def partial_shapes(params: ModelParams) -> np.ndarray:
    """``(d, d)`` array of Beta shapes for each D-vine edge (upper triangle).

    The edge ``(i, j)`` is conditioned on ``k = j - i - 1`` variables and gets
    shape ``eta - 1 + (d - k) / 2``.
    """
    d = params.d
    i, j = np.triu_indices(d, 1)
    shapes = np.zeros((d, d))
    shapes[i, j] = params.eta - 1.0 + (d - (j - i - 1)) / 2.0
    return shapes


def sample_partials(params: ModelParams, rng, size=None) -> np.ndarray:
    """Independent D-vine partial correlations, shape ``(*size, d, d)``."""
    d = params.d
    batch = () if size is None else tuple(np.atleast_1d(size))
    i, j = np.triu_indices(d, 1)
    shapes = partial_shapes(params)[i, j]
    P = np.zeros(batch + (d, d))
    P[..., i, j] = sample_symmetric_beta_pm1(shapes, rng, batch + shapes.shape)
    return P


def sample_correlation_matrix(params: ModelParams, rng, size=None) -> np.ndarray:
    """Random correlation matrix with density proportional to ``det(R)**(eta-1)``.

    With ``size`` a batch of shape ``(*size, d, d)`` is returned.
    """
    P = sample_partials(params, rng, size)
    return partials_to_matrix(build_dvine(params.d, validate=False), P)


def _direct_params(d, eta):
    j = np.arange(1, d)
    return eta + (j - 1) / 2.0, (d - j) / 2.0


def sample_log_det_direct(params: ModelParams, rng, size=None) -> np.ndarray | float:
    """``ln D_d`` as a sum of ``d - 1`` independent log-Beta terms; O(d) per draw."""
    a, b = _direct_params(params.d, params.eta)
    batch = () if size is None else tuple(np.atleast_1d(size))
    y = sample_log_beta(a, b, rng, batch + a.shape).sum(axis=-1)
    return float(y) if np.ndim(y) == 0 else y


def sample_log_det_double(d: int, rng, size=None, eta: float = 1.0) -> np.ndarray | float:
    """``ln D_d`` from the factorization into ``d(d-1)/2`` terms ``Beta(eta + i/2, 1/2)``."""
    params = ModelParams(d, eta, extrapolated=eta < 1)
    i = np.concatenate([np.full(k + 1, k) for k in range(params.d - 1)])
    a = params.eta + i / 2.0
    batch = () if size is None else tuple(np.atleast_1d(size))
    y = sample_log_beta(a, 0.5, rng, batch + a.shape).sum(axis=-1)
    return float(y) if np.ndim(y) == 0 else y


def sample_log_det_matrix(params: ModelParams, rng, size=None) -> np.ndarray | float:
    """``ln D_d`` of sampled matrices, via Cholesky."""
    return cholesky_log_det(sample_correlation_matrix(params, rng, size))


def _block_ranges(n):
    return [(start, min(start + BLOCK_SIZE, n)) for start in range(0, n, BLOCK_SIZE)]


def _run_blocks(config: ExperimentConfig, fn):
    if config.n < 1:
        raise ValueError("n must be >= 1")
    blocks = _block_ranges(config.n)

    def work(chunk):
        return [fn(RngStream(config.seed, b), hi - lo) for b, (lo, hi) in chunk]

    indexed = list(enumerate(blocks))
    per_worker = math.ceil(len(indexed) / config.workers)
    chunks = [indexed[k:k + per_worker] for k in range(0, len(indexed), per_worker)]
    if len(chunks) == 1:
        parts = work(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = [p for res in pool.map(work, chunks) for p in res]
    return np.concatenate(parts, axis=0)


def sample_batch(config: ExperimentConfig) -> np.ndarray:
    """``config.n`` log-determinant draws along ``config.pathway``.

    Sample ``i`` lives in block ``i // BLOCK_SIZE`` and is drawn from the
    stream with that index, so the result is identical for any worker count.
    Blocks are handed to workers in contiguous runs and results are merged
    in global index order.
    """
    params = ModelParams(config.d, config.eta, config.extrapolated)
    if config.pathway == "direct":
        fn = lambda rng, m: sample_log_det_direct(params, rng, m)  # noqa: E731
    elif config.pathway == "double":
        fn = lambda rng, m: sample_log_det_double(params.d, rng, m, params.eta)  # noqa: E731
    else:
        fn = lambda rng, m: sample_log_det_matrix(params, rng, m)  # noqa: E731
    return _run_blocks(config, fn)


def sample_matrix_batch(config: ExperimentConfig) -> np.ndarray:
    """``config.n`` correlation matrices, shape ``(n, d, d)``; same block scheme."""
    params = ModelParams(config.d, config.eta, config.extrapolated)
    return _run_blocks(config, lambda rng, m: sample_correlation_matrix(params, rng, m))
