"""Randomized falsification of polydisc stability.

A stable (two-regime zero-free) Laurent polynomial has no zero with every
coordinate strictly inside the unit polydisc, and none with every coordinate
strictly outside.  Sampling fibers - all coordinates but one frozen at random
points of one regime - and solving the free coordinate exactly either turns up
a certified counterexample or accumulates evidence of stability.  A pass is
evidence, not proof; a reported violation is re-verified by direct evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .intmat import IntMatrix, determinant
from .laurent import LaurentPoly, monomial_substitute
from .surface import SurfaceError, default_sweep_axis, slice_solve

# Roots this close to the unit circle are classified as boundary and never
# count as violations (the stability regimes are open).
BOUNDARY_TOL = 1e-9
# Residual bound, relative to the coefficient scale, for certifying a witness.
WITNESS_RESIDUAL_REL = 1e-8


class LYCheckError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    point: tuple[complex, ...]
    root: complex
    regime: str  # "inside" or "outside"
    fiber_index: int
    residual: float


@dataclass(frozen=True)
class LYReport:
    fibers_tested: int
    violation: Violation | None
    min_margin: float
    degenerate_fibers: int = 0

    @property
    def passed(self) -> bool:
        return self.violation is None


def _fiber_roots(p: LaurentPoly, free: int, fixed: Sequence[complex]) -> np.ndarray:
    """Exact roots of the univariate Laurent slice in the free coordinate."""
    coeff: dict[int, complex] = {}
    for e, c in p.terms:
        w = c
        pos = 0
        for i in range(p.arity):
            if i == free:
                continue
            w *= fixed[pos] ** e[i]
            pos += 1
        coeff[e[free]] = coeff.get(e[free], 0.0 + 0.0j) + w
    lo, hi = min(coeff), max(coeff)
    arr = np.zeros(hi - lo + 1, dtype=complex)
    for k, v in coeff.items():
        arr[k - lo] = v
    top = float(np.max(np.abs(arr)))
    if top <= 1e-14 * p.scale:
        raise LYCheckError("degenerate fiber")
    mask = np.abs(arr) > 1e-14 * top
    first = int(np.argmax(mask))
    last = len(arr) - int(np.argmax(mask[::-1]))
    arr = arr[first:last]
    if len(arr) == 1:
        return np.zeros(0, dtype=complex)
    roots = np.roots(arr[::-1])
    # Two Newton polish passes tighten the companion-matrix output.
    powers = np.arange(len(arr))
    darr = arr[1:] * powers[1:]
    with np.errstate(all="ignore"):
        for _ in range(2):
            vals = np.polyval(arr[::-1], roots)
            dvals = np.polyval(darr[::-1], roots)
            roots = roots - np.where(dvals != 0, vals / np.where(dvals == 0, 1, dvals), 0)
    return roots


def ly_falsify(p: LaurentPoly, fibers: int, seed: int) -> LYReport:
    """Search ``fibers`` random one-dimensional fibers for a stability violation.

    Even fibers freeze the other coordinates strictly inside the unit polydisc
    (moduli uniform on [0.05, 0.95]), odd fibers strictly outside (moduli on
    [1.05, 2]); the free coordinate index advances round-robin.  Deterministic
    for a given (p, fibers, seed); stops at the first certified violation.
    """
    if p.is_zero():
        raise LYCheckError("cannot test the zero polynomial")
    rng = np.random.default_rng(seed)
    scale = p.scale
    min_margin = math.inf
    degenerate = 0

    for idx in range(int(fibers)):
        inside = idx % 2 == 0
        free = (idx // 2) % p.arity
        for _attempt in range(100):
            moduli = rng.uniform(0.05, 0.95, p.arity - 1) if inside else rng.uniform(
                1.05, 2.0, p.arity - 1
            )
            phases = rng.uniform(0.0, 2 * math.pi, p.arity - 1)
            fixed = tuple(m * complex(math.cos(t), math.sin(t)) for m, t in zip(moduli, phases))
            try:
                roots = _fiber_roots(p, free, fixed)
            except LYCheckError:
                degenerate += 1
                continue
            break
        else:
            raise LYCheckError("fiber sampling kept hitting degenerate slices")

        for r in roots:
            mod = abs(r)
            if not np.isfinite(mod) or mod < 1e-12:
                continue
            margin = abs(mod - 1.0)
            min_margin = min(min_margin, margin)
            if margin <= BOUNDARY_TOL:
                continue
            bad = (inside and mod < 1.0) or (not inside and mod > 1.0)
            if not bad:
                continue
            point = list(fixed)
            point.insert(free, complex(r))
            residual = abs(p.eval(point))
            if residual <= WITNESS_RESIDUAL_REL * scale:
                return LYReport(
                    fibers_tested=idx + 1,
                    violation=Violation(
                        point=tuple(point),
                        root=complex(r),
                        regime="inside" if inside else "outside",
                        fiber_index=idx,
                        residual=residual,
                    ),
                    min_margin=float(min_margin),
                    degenerate_fibers=degenerate,
                )

    return LYReport(
        fibers_tested=int(fibers),
        violation=None,
        min_margin=float(min_margin),
        degenerate_fibers=degenerate,
    )


@dataclass(frozen=True)
class RegularityReport:
    min_gradient_norm: float
    samples: int
    passed: bool
    empty: bool = False


def regularity_check(p: LaurentPoly, resolution: int = 256) -> RegularityReport:
    """Minimum of |(z1 dp/dz1, z2 dp/dz2)| over sampled curve points.

    The scaled gradient is the torus gradient up to 2*pi, so a minimum above
    1e-6 * scale certifies no sampled point is near a singularity.  An empty
    zero set passes vacuously.  Slice roots are collected with a loosened
    circle tolerance so that multiple roots (the singular case this check
    exists to catch) are not filtered away before the gradient is measured.
    """
    if p.arity != 2:
        raise LYCheckError("regularity sampling is implemented for two variables")
    pts: list[tuple[float, float]] = []
    axis = default_sweep_axis(p)
    for j in range(int(resolution)):
        fixed = j / resolution
        try:
            vals = slice_solve(p, axis, fixed, modulus_tol=1e-6)
        except SurfaceError:
            continue
        for v in vals:
            x = [0.0, 0.0]
            x[axis] = fixed
            x[1 - axis] = v
            pts.append((x[0], x[1]))
    if not pts:
        return RegularityReport(math.inf, 0, True, empty=True)
    arr = np.asarray(pts)
    grads = np.zeros((len(pts), 2), dtype=complex)
    for e, c in p.terms:
        mono = c * np.exp(2j * np.pi * (arr @ np.asarray(e, dtype=float)))
        grads[:, 0] += e[0] * mono
        grads[:, 1] += e[1] * mono
    norms = np.linalg.norm(grads, axis=1)
    min_norm = float(np.min(norms))
    return RegularityReport(
        min_gradient_norm=min_norm,
        samples=len(pts),
        passed=min_norm > 1e-6 * p.scale,
    )


def essentially_ly_verify(
    p: LaurentPoly, witness: IntMatrix, fibers: int = 10_000, seed: int = 42
) -> LYReport:
    """Test the witness pair: substitute the monomial map and falsify the result.

    A pass means the witness is consistent with stability of the substituted
    polynomial; the report is identical to running ly_falsify on it directly.
    """
    if not witness.is_square or witness.rows != p.arity:
        raise LYCheckError("witness matrix must be square of the polynomial arity")
    if determinant(witness) == 0:
        raise LYCheckError("witness matrix must have nonzero determinant")
    g = monomial_substitute(p, witness.data)
    return ly_falsify(g, fibers=fibers, seed=seed)
