"""Regular vines and the partial-correlation parameterization of correlation matrices.

Variables are indexed ``0 .. d-1``.  The only vine that is constructed is
the D-vine: tree 1 is the path ``0-1-...-(d-1)`` and the edge at gap ``k``
joins ``(i, i+k)`` given ``{i+1, ..., i+k-1}``.

Partial correlations are stored by conditioned pair in an upper-triangular
array ``P`` with ``P[..., i, j]`` holding the value on the edge whose
conditioned set is ``{i, j}`` (every pair is conditioned exactly once in a
regular vine).  Leading axes of ``P`` and of correlation matrices are batch
axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping

import numpy as np

from .linalg import NotPositiveDefinite, check_correlation_matrix, is_positive_definite

__all__ = [
    "InvalidVine",
    "VineEdge",
    "VineSpec",
    "PartialCorrSet",
    "build_dvine",
    "validate_vine",
    "partials_to_matrix",
    "matrix_to_partials",
    "log_det_from_partials",
]


class InvalidVine(ValueError):
    """A vine specification violates the regular-vine conditions."""


@dataclass(frozen=True, order=True)
class VineEdge:
    """Vine edge with conditioned pair ``(e1, e2)`` and conditioning set.

    The pair is stored sorted and the conditioning set as a sorted tuple, so
    equal edges compare and hash equal regardless of input order.
    """

    e1: int
    e2: int
    conditioning: tuple = ()

    def __post_init__(self):
        a, b = int(self.e1), int(self.e2)
        if a == b:
            raise InvalidVine(f"conditioned pair must be two distinct variables, got ({a}, {b})")
        cond = tuple(sorted(int(v) for v in self.conditioning))
        if len(set(cond)) != len(cond):
            raise InvalidVine(f"repeated variable in conditioning set {cond}")
        if a in cond or b in cond:
            raise InvalidVine(f"conditioned variable appears in conditioning set: ({a},{b}|{cond})")
        object.__setattr__(self, "e1", min(a, b))
        object.__setattr__(self, "e2", max(a, b))
        object.__setattr__(self, "conditioning", cond)

    @property
    def tree_level(self) -> int:
        return len(self.conditioning) + 1

    @property
    def conditioned(self) -> tuple:
        return (self.e1, self.e2)

    @property
    def constraint(self) -> frozenset:
        return frozenset((self.e1, self.e2, *self.conditioning))

    @property
    def key(self) -> tuple:
        return (self.e1, self.e2, self.conditioning)

    def __str__(self):
        cond = ",".join(map(str, self.conditioning)) or "∅"
        return f"({self.e1},{self.e2}|{cond})"


@dataclass(frozen=True)
class VineSpec:
    d: int
    trees: tuple

    @property
    def edges(self) -> tuple:
        return tuple(e for tree in self.trees for e in tree)

    def __len__(self):
        return sum(len(t) for t in self.trees)

    def __iter__(self) -> Iterator[VineEdge]:
        return iter(self.edges)

    @property
    def is_dvine(self) -> bool:
        return self.d >= 2 and self == _dvine(self.d)


@lru_cache(maxsize=64)
def _dvine(d: int) -> VineSpec:
    trees = tuple(
        tuple(VineEdge(i, i + t, tuple(range(i + 1, i + t))) for i in range(d - t))
        for t in range(1, d)
    )
    return VineSpec(d, trees)


def build_dvine(d: int, validate: bool = True) -> VineSpec:
    """The D-vine on ``d`` variables."""
    d = int(d)
    if d < 2:
        raise InvalidVine(f"a vine needs d >= 2, got {d}")
    spec = _dvine(d)
    if validate:
        validate_vine(spec)
    return spec


def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def _check_spanning_tree(n_nodes, links, level):
    if len(links) != n_nodes - 1:
        raise InvalidVine(f"tree {level} has {len(links)} edges on {n_nodes} nodes")
    parent = list(range(n_nodes))
    for a, b in links:
        ra, rb = _find(parent, a), _find(parent, b)
        if ra == rb:
            raise InvalidVine(f"tree {level} contains a cycle")
        parent[ra] = rb


def validate_vine(spec: VineSpec) -> None:
    """Raise :class:`InvalidVine` unless ``spec`` is a regular vine.

    Checks tree sizes, that every tree is a spanning tree on the edges of the
    previous one, the proximity condition (joined edges have constraint sets
    whose symmetric difference has two elements), and that conditioned and
    conditioning sets are the symmetric difference and intersection of the
    joined constraint sets.
    """
    d = spec.d
    if d < 2:
        raise InvalidVine("d must be >= 2")
    if len(spec.trees) != d - 1:
        raise InvalidVine(f"expected {d - 1} trees, got {len(spec.trees)}")

    pairs = [e.conditioned for e in spec.edges]
    if len(set(pairs)) != len(pairs):
        raise InvalidVine("a conditioned pair appears on more than one edge")

    for level, tree in enumerate(spec.trees, start=1):
        if len(tree) != d - level:
            raise InvalidVine(f"tree {level} must have {d - level} edges, got {len(tree)}")
        for e in tree:
            if e.tree_level != level:
                raise InvalidVine(f"edge {e} sits in tree {level} but has level {e.tree_level}")
            if not e.constraint <= set(range(d)):
                raise InvalidVine(f"edge {e} refers to a variable outside 0..{d - 1}")
        constraints = [e.constraint for e in tree]
        if len(set(constraints)) != len(constraints):
            raise InvalidVine(f"tree {level} has duplicated constraint sets")

        if level == 1:
            _check_spanning_tree(d, [e.conditioned for e in tree], level)
            continue

        prev = spec.trees[level - 2]
        index = {c: n for n, c in enumerate(e.constraint for e in prev)}
        links = []
        for e in tree:
            # the joined nodes must be C - {e2} and C - {e1}: then their
            # symmetric difference is {e1, e2} and their intersection is D_e
            a = index.get(e.constraint - {e.e2})
            b = index.get(e.constraint - {e.e1})
            if a is None or b is None:
                raise InvalidVine(f"edge {e} does not join two proximate edges of tree {level - 1}")
            links.append((a, b))
        _check_spanning_tree(len(prev), links, level)


@dataclass(frozen=True, eq=False)
class PartialCorrSet(Mapping):
    """One partial correlation per vine edge.

    Behaves as a read-only mapping from :class:`VineEdge` to value.  With
    batch axes, lookups return arrays.
    """

    spec: VineSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        P = np.array(self.values, dtype=float)
        d = self.spec.d
        if P.shape[-2:] != (d, d):
            raise ValueError(f"expected partials of shape (..., {d}, {d}), got {P.shape}")
        iu = np.triu_indices(d, 1)
        upper = P[..., iu[0], iu[1]]
        if np.any(np.isnan(upper)):
            raise ValueError("missing partial correlation (NaN) on a vine edge")
        if np.any(np.abs(upper) >= 1.0):
            raise ValueError("partial correlations must lie strictly inside (-1, 1)")
        clean = np.zeros_like(P)
        clean[..., iu[0], iu[1]] = upper
        clean.setflags(write=False)
        object.__setattr__(self, "values", clean)

    @classmethod
    def from_mapping(cls, spec: VineSpec, mapping) -> "PartialCorrSet":
        """Build from ``{edge_or_key: value}``; every edge of ``spec`` is required."""
        d = spec.d
        P = np.zeros((d, d))
        lookup = {}
        for k, v in mapping.items():
            edge = k if isinstance(k, VineEdge) else VineEdge(k[0], k[1], tuple(k[2]) if len(k) > 2 else ())
            lookup[edge] = v
        edges = set(spec.edges)
        extra = set(lookup) - edges
        if extra:
            raise ValueError(f"values given for edges not in the vine: {sorted(map(str, extra))}")
        for e in spec.edges:
            if e not in lookup:
                raise ValueError(f"missing partial correlation for edge {e}")
            P[e.e1, e.e2] = lookup[e]
        return cls(spec, P)

    def _edge(self, key) -> VineEdge:
        if isinstance(key, VineEdge):
            edge = key
        else:
            edge = VineEdge(key[0], key[1], tuple(key[2]) if len(key) > 2 else ())
        if edge not in set(self.spec.edges):
            raise KeyError(edge)
        return edge

    def __getitem__(self, key):
        e = self._edge(key)
        v = self.values[..., e.e1, e.e2]
        return float(v) if np.ndim(v) == 0 else v

    def __iter__(self):
        return iter(self.spec.edges)

    def __len__(self):
        return len(self.spec)


def _partials_array(spec: VineSpec, p) -> np.ndarray:
    if isinstance(p, PartialCorrSet):
        if p.spec != spec:
            raise ValueError("partial correlations belong to a different vine")
        return p.values
    return PartialCorrSet(spec, p).values


def _sweep(A, h):
    """Condition every pair in ``A`` on one more variable, local index ``h``.

    ``A[..., a, b]`` holds partial correlations sharing one conditioning set;
    the result holds them given that set plus ``h``.  Row and column ``h`` of
    the output are meaningless.
    """
    a_h = A[..., :, h]
    s = np.sqrt(np.clip(1.0 - a_h**2, 0.0, None))
    s[..., h] = 1.0
    return (A - a_h[..., :, None] * a_h[..., None, :]) / (s[..., :, None] * s[..., None, :])


def partials_to_matrix(spec: VineSpec, p) -> np.ndarray:
    """Correlation matrix whose partial correlations on the D-vine are ``p``.

    Rows are filled from the bottom up.  For row ``i`` the lower-right block
    is already known; sweeping it gives the partials ``rho_{h,j; i+1..h-1}``,
    and each ``rho_{i,j; i+1..j-1}`` is then unconditioned one variable at a
    time, largest conditioning index first:

        rho_{ij;S-h} = rho_{ij;S} sqrt((1-rho_{ih;S-h}^2)(1-rho_{jh;S-h}^2))
                       + rho_{ih;S-h} rho_{jh;S-h}
    """
    if not spec.is_dvine:
        raise InvalidVine("partials_to_matrix is implemented for the D-vine only")
    P = _partials_array(spec, p)
    d = spec.d
    batch = P.shape[:-2]
    R = np.broadcast_to(np.eye(d), batch + (d, d)).copy()

    for i in range(d - 2, -1, -1):
        m = d - 1 - i
        # rows[h] = rho_{h, . ; i+1 .. h-1} in local coordinates of block i+1..d-1
        A = R[..., i + 1:, i + 1:]
        rows = []
        for h in range(m - 1):
            rows.append(A[..., h, :])
            A = _sweep(A, h)

        row = P[..., i, i + 1:].copy()
        for h in range(m - 2, -1, -1):
            r_ih = P[..., i, i + 1 + h][..., None]
            r_jh = rows[h][..., h + 1:]
            row[..., h + 1:] = (row[..., h + 1:] * np.sqrt((1.0 - r_ih**2) * (1.0 - r_jh**2))
                                + r_ih * r_jh)
        R[..., i, i + 1:] = row
        R[..., i + 1:, i] = row
    return R


def matrix_to_partials(spec: VineSpec, R) -> PartialCorrSet:
    """Partial correlations of ``R`` on the D-vine; inverse of :func:`partials_to_matrix`.

    Raises
    ------
    NotPositiveDefinite
        If ``R`` (or any matrix in a batch) is not positive definite.
    """
    if not spec.is_dvine:
        raise InvalidVine("matrix_to_partials is implemented for the D-vine only")
    R = check_correlation_matrix(R)
    d = spec.d
    if R.shape[-1] != d:
        raise ValueError(f"matrix dimension {R.shape[-1]} does not match vine dimension {d}")
    if not np.all(is_positive_definite(R)):
        raise NotPositiveDefinite("matrix is not positive definite")

    P = np.zeros(R.shape)
    for i in range(d - 1):
        A = R[..., i:, i:]
        P[..., i, i + 1] = A[..., 0, 1]
        for h in range(1, d - 1 - i):
            A = _sweep(A, h)
            P[..., i, i + h + 1] = A[..., 0, h + 1]
    return PartialCorrSet(spec, P)


def log_det_from_partials(p) -> float | np.ndarray:
    """``ln det R = sum_e ln(1 - rho_e^2)`` over all vine edges."""
    if isinstance(p, PartialCorrSet):
        P = p.values
    else:
        P = np.asarray(p, dtype=float)
    d = P.shape[-1]
    iu = np.triu_indices(d, 1)
    rho = P[..., iu[0], iu[1]]
    if np.any(np.abs(rho) >= 1.0):
        raise ValueError("partial correlations must lie strictly inside (-1, 1)")
    terms = np.where(np.abs(rho) < 0.5, np.log1p(-rho * rho), np.log1p(-rho) + np.log1p(rho))
    out = np.sum(terms, axis=-1)
    return float(out) if np.ndim(out) == 0 else out
