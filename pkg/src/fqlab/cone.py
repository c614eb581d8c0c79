"""Simplicial integer cones, dual-interior membership, truncated enumeration.

A cone is stored through an invertible integer matrix ``base``; membership is
the exact componentwise test base^T x >= 0, so integer points are classified
without any floating point.  A direction lies in the interior of the dual cone
iff base^{-1} * direction is componentwise positive.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .intmat import IntMatrix, adjugate, determinant

# Hard cap on the bounding-box scan so a bad radius fails fast instead of
# grinding; every desk-scale enumeration is far below this.
MAX_BOX_POINTS = 20_000_000


class ConeError(ValueError):
    """Degenerate cone or an enumeration that would not terminate."""


@dataclass(frozen=True)
class Direction:
    """A real direction whose rational independence is asserted, not proven."""

    entries: tuple[float, ...]
    independence_asserted: bool = True

    def __post_init__(self) -> None:
        if not self.entries or all(v == 0 for v in self.entries):
            raise ConeError("direction must be a nonzero vector")

    @staticmethod
    def from_json_dict(obj: dict) -> "Direction":
        if not isinstance(obj, dict) or "entries" not in obj:
            raise ConeError("direction JSON must be an object with field 'entries'")
        return Direction(entries=tuple(float(v) for v in obj["entries"]))

    def to_json_dict(self) -> dict:
        return {"entries": list(self.entries)}


def as_direction_vector(ell) -> np.ndarray:
    entries = ell.entries if isinstance(ell, Direction) else ell
    v = np.asarray([float(x) for x in entries], dtype=float)
    if v.size == 0 or not np.any(v):
        raise ConeError("direction must be a nonzero vector")
    return v


def lint_q_independence(ell, max_coeff: int = 50, rel_tol: float = 1e-9) -> list[tuple[int, ...]]:
    """Brute-force search for small integer relations <m, ell> = 0.

    Finding one disproves rational independence; finding none proves nothing.
    Relations are reported through ``warnings`` and returned, never raised.
    """
    v = as_direction_vector(ell)
    n = v.size
    if (2 * max_coeff + 1) ** n > MAX_BOX_POINTS:
        warnings.warn("direction too long for the independence lint; skipped")
        return []
    rng = np.arange(-max_coeff, max_coeff + 1)
    grid = np.stack(np.meshgrid(*([rng] * n), indexing="ij"), axis=-1).reshape(-1, n)
    grid = grid[np.any(grid, axis=1)]
    dots = grid @ v
    tol = rel_tol * np.abs(grid).sum(axis=1) * max(abs(x) for x in v)
    hits = grid[np.abs(dots) <= tol]
    found = [tuple(int(x) for x in h) for h in hits]
    if found:
        warnings.warn(
            f"direction {tuple(v)} admits integer relations, e.g. {found[0]}; "
            "frequencies will collide"
        )
    return found


@dataclass(frozen=True)
class ProperCone:
    """Closed simplicial cone {x : base^T x >= 0} for invertible integer base."""

    base: IntMatrix
    _det: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self) -> None:
        if not self.base.is_square:
            raise ConeError("cone base matrix must be square")
        det = determinant(self.base)
        if det == 0:
            raise ConeError("cone base matrix must be invertible")
        object.__setattr__(self, "_det", det)

    @property
    def dim(self) -> int:
        return self.base.rows

    @property
    def det(self) -> int:
        return self._det

    @staticmethod
    def first_orthant(n: int) -> "ProperCone":
        return ProperCone(IntMatrix.identity(n))

    def contains(self, x: Sequence[int]) -> bool:
        """Exact integer membership test base^T x >= 0 componentwise."""
        xs = [int(v) for v in x]
        if len(xs) != self.dim:
            raise ConeError("point length does not match the cone dimension")
        return all(v >= 0 for v in self.base.transpose().apply(xs))

    def dual_solve(self, ell) -> np.ndarray:
        """base^{-1} * ell computed through the exact adjugate."""
        v = as_direction_vector(ell)
        if v.size != self.dim:
            raise ConeError("direction length does not match the cone dimension")
        adj = np.asarray(adjugate(self.base).data, dtype=float)
        return (adj @ v) / float(self._det)

    def dual_interior_contains(self, ell) -> bool:
        """True iff <ell, v> > 0 for every nonzero v in the cone."""
        w = self.dual_solve(ell)
        margin = 1e-12 * float(np.max(np.abs(w)))
        return bool(np.all(w > margin))

    def to_json_dict(self) -> dict:
        return self.base.to_json_dict()


def enumerate_truncated(cone: ProperCone, ell, radius: float) -> list[tuple[int, ...]]:
    """All integer k in (C u -C) with |<ell, k>| <= radius.

    The direction must lie in the dual-cone interior, otherwise the set is
    infinite.  Points come back sorted by <ell, k>, then lexicographically,
    are symmetric under negation, and always include the origin.
    """
    v = as_direction_vector(ell)
    if radius < 0:
        raise ConeError("truncation radius must be nonnegative")
    if not cone.dual_interior_contains(v):
        raise ConeError(
            "direction is not interior to the dual cone; the truncated set is infinite"
        )
    n = cone.dim
    w = cone.dual_solve(v)  # positive; <ell, k> = <w, base^T k>
    inv_t = np.asarray(adjugate(cone.base).data, dtype=float).T / float(cone.det)
    u_bound = radius / w
    box = np.floor(np.abs(inv_t) @ u_bound).astype(int) + 1

    total = 1
    for b in box:
        total *= 2 * int(b) + 1
    if total > MAX_BOX_POINTS:
        raise ConeError(f"bounding box of {total} points exceeds the enumeration cap")

    base_np = np.asarray(cone.base.data, dtype=np.int64)
    # int64 is exact here; guard the worst-case inner product anyway.
    if (np.abs(base_np).max() + 1) * (int(box.max()) + 1) * n >= 2**62:
        grids = np.asarray(
            list(itertools.product(*[range(-int(b), int(b) + 1) for b in box])),
            dtype=object,
        )
    else:
        axes = [np.arange(-int(b), int(b) + 1, dtype=np.int64) for b in box]
        grids = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    u = grids @ base_np
    member = np.all(u >= 0, axis=1) | np.all(u <= 0, axis=1)
    dots = grids @ v
    keep = member & (np.abs(dots) <= radius)
    pts = grids[keep]
    dots = dots[keep]
    order = np.lexsort(tuple(pts[:, i] for i in reversed(range(n))) + (dots,))
    return [tuple(int(x) for x in row) for row in pts[order]]
