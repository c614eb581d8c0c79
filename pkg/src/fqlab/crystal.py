"""Almost-periodic root sets of trigonometric exponential sums.

The central object is f(t) = sum_j a_j exp(2*pi*i*lambda_j*t) with real,
strictly ascending frequencies lambda_j.  Restricting a Laurent polynomial to
the line t -> t*ell produces such an f; its real zero set is the point set
under study.  Real roots are located by a grid scan plus complex Newton
refinement, and audited independently by a contour winding count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cone import as_direction_vector
from .laurent import LaurentPoly

TWO_PI = 2.0 * math.pi

# Frequencies closer than this merge into one term (and draw a warning,
# since collisions contradict the rational-independence assumption).
FREQ_MERGE_TOL = 1e-12


class CrystalError(ValueError):
    """Degenerate restriction or ill-posed root query."""


class ZeroNearContourError(CrystalError):
    """The function nearly vanishes on the counting contour."""


@dataclass(frozen=True)
class ExponentialPolynomial:
    """f(t) = sum_j coeffs[j] * exp(2*pi*i*freqs[j]*t), freqs strictly ascending."""

    freqs: tuple[float, ...]
    coeffs: tuple[complex, ...]

    def __post_init__(self) -> None:
        if not self.freqs or len(self.freqs) != len(self.coeffs):
            raise CrystalError("frequencies and coefficients must align and be nonempty")
        for a, b in zip(self.freqs, self.freqs[1:]):
            if not (b - a > FREQ_MERGE_TOL):
                raise CrystalError("frequencies must be strictly ascending")
        if any(c == 0 for c in self.coeffs):
            raise CrystalError("zero coefficients are not stored")

    @property
    def scale(self) -> float:
        return float(sum(abs(c) for c in self.coeffs))

    @property
    def span(self) -> float:
        """Frequency bandwidth lambda_max - lambda_min."""
        return self.freqs[-1] - self.freqs[0]

    def derivative_scale(self, order: int) -> float:
        return float(
            sum(abs(c) * (TWO_PI * abs(f)) ** order for f, c in zip(self.freqs, self.coeffs))
        )

    def eval(self, t, order: int = 0):
        """Value of the order-th derivative at real or complex t (vectorized)."""
        tv = np.asarray(t, dtype=complex)
        lam = np.asarray(self.freqs)
        a = np.asarray(self.coeffs, dtype=complex)
        if order:
            a = a * (2j * np.pi * lam) ** order
        phases = np.exp(2j * np.pi * np.multiply.outer(tv, lam))
        out = phases @ a
        return out if tv.shape else complex(out)


def restrict_to_line(p: LaurentPoly, ell) -> ExponentialPolynomial:
    """Pull p back along t -> exp(2*pi*i*t*ell): one frequency <a, ell> per term.

    Exponent vectors whose frequencies collide within FREQ_MERGE_TOL are merged
    with summed coefficients; a warning is issued because exact collisions mean
    the direction entries are rationally dependent.
    """
    if p.is_zero():
        raise CrystalError("cannot restrict the zero polynomial")
    v = as_direction_vector(ell)
    if v.size != p.arity:
        raise CrystalError("direction length does not match the polynomial arity")
    pairs = sorted(
        ((float(np.dot(np.asarray(e, dtype=float), v)), c) for e, c in p.terms),
        key=lambda fc: fc[0],
    )
    freqs: list[float] = []
    coeffs: list[complex] = []
    merged = False
    for f, c in pairs:
        if freqs and f - freqs[-1] <= FREQ_MERGE_TOL:
            coeffs[-1] += c
            merged = True
        else:
            freqs.append(f)
            coeffs.append(c)
    if merged:
        warnings.warn(
            "restriction merged colliding frequencies; direction entries are "
            "rationally dependent"
        )
    keep = [(f, c) for f, c in zip(freqs, coeffs) if abs(c) > 1e-13 * p.scale]
    if not keep:
        raise CrystalError("all coefficients cancelled in the restriction")
    return ExponentialPolynomial(
        freqs=tuple(f for f, _ in keep), coeffs=tuple(c for _, c in keep)
    )


@dataclass(frozen=True)
class RootList:
    """Real zeros in a window, ascending, with multiplicities."""

    window: tuple[float, float]
    roots: tuple[float, ...]
    multiplicities: tuple[int, ...]
    min_gap: float
    newton_failures: int = 0

    @property
    def total_count(self) -> int:
        """Zero count with multiplicity."""
        return int(sum(self.multiplicities))

    def density(self) -> float:
        lo, hi = self.window
        return self.total_count / (hi - lo)


def _newton_polish(f: ExponentialPolynomial, seeds: np.ndarray, max_iter: int = 100):
    """Vectorized complex Newton from many seeds; returns (points, converged)."""
    t = seeds.astype(complex)
    step_tol = 1e-15
    last_step = np.full(t.shape, np.inf)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            ft = f.eval(t)
            dft = f.eval(t, order=1)
            # a vanishing derivative only blocks seeds that are not roots yet
            step = np.where(
                ft == 0, 0.0, np.where(dft != 0, ft / np.where(dft == 0, 1, dft), np.nan)
            )
            t = t - step
            last_step = np.abs(step)
            if np.all(~np.isfinite(last_step) | (last_step < step_tol * (1 + np.abs(t)))):
                break
    # Multiple roots stall at a step of order sqrt(machine eps); the residual
    # filter downstream is the arbiter, this gate only drops divergent seeds.
    ok = np.isfinite(last_step) & (last_step < 1e-6 * (1 + np.abs(t)))
    return t, ok


def find_real_roots(
    f: ExponentialPolynomial,
    window: tuple[float, float],
    tol: float = 1e-10,
) -> RootList:
    """Real zeros of f in a closed window, with multiplicities.

    |f| is scanned on a grid of step at most 1/(8 * bandwidth); every local
    minimum seeds a complex Newton iteration, converged points with
    |Im t| <= 1e-9 count as real, and duplicates closer than 1e-9 collapse.
    The multiplicity of r is the first derivative order whose value at r rises
    above tol times its own natural scale.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise CrystalError("window must have positive length")
    if len(f.freqs) == 1 or f.span <= 0:
        return RootList(window=(lo, hi), roots=(), multiplicities=(), min_gap=math.inf)

    step = min(1.0 / (8.0 * f.span), (hi - lo) / 8.0)
    grid = np.arange(lo - 2 * step, hi + 2 * step + step / 2, step)
    vals = np.abs(f.eval(grid))
    interior = np.ones(len(grid), dtype=bool)
    interior[1:] &= vals[1:] <= vals[:-1]
    interior[:-1] &= vals[:-1] <= vals[1:]
    seeds = grid[interior]

    points, ok = _newton_polish(f, seeds)
    failures = int(np.sum(~ok))
    points = points[ok]
    residual_ok = np.abs(f.eval(points)) <= tol * f.scale
    real_ok = np.abs(points.imag) <= 1e-9
    in_window = (points.real >= lo - 1e-9) & (points.real <= hi + 1e-9)
    cand = np.sort(points.real[residual_ok & real_ok & in_window])

    roots: list[float] = []
    for r in cand:
        if not roots or r - roots[-1] > 1e-9:
            roots.append(float(r))

    # An m-fold root is only locatable to (eps)^(1/m), so the derivative test
    # uses a floor of 1e-7 on the relative threshold.
    mult_tol = max(tol, 1e-7)
    mults: list[int] = []
    for r in roots:
        order = 1
        while order <= 5:
            if abs(f.eval(r, order=order)) > mult_tol * f.derivative_scale(order):
                break
            order += 1
        if order > 5:
            raise CrystalError(f"zero of order above 5 near t = {r}")
        mults.append(order)
    if any(m >= 2 for m in mults):
        warnings.warn("zeros with multiplicity >= 2 found; the input is not regular")

    gaps = [b - a for a, b in zip(roots, roots[1:])]
    return RootList(
        window=(lo, hi),
        roots=tuple(roots),
        multiplicities=tuple(mults),
        min_gap=min(gaps) if gaps else math.inf,
        newton_failures=failures,
    )


def _walk_edge(
    f: ExponentialPolynomial,
    a: complex,
    b: complex,
    n_init: int,
    floor: float,
) -> float:
    """Total argument increment of f along the segment a -> b.

    The edge starts from n_init samples and bisects any piece whose endpoint
    phase ratio turns by pi/2 or more, so each accepted piece contributes an
    unambiguous principal-branch increment.
    """
    ts = np.linspace(a, b, max(2, n_init))
    vals = f.eval(ts)
    if np.min(np.abs(vals)) < floor:
        raise ZeroNearContourError("contour passes too close to a zero")

    total = 0.0
    max_depth = 48

    def piece(ta, fa, tb, fb, depth):
        nonlocal total
        turn = np.angle(fb / fa)
        if abs(turn) < math.pi / 2 and depth >= 1:
            total += turn
            return
        if depth > max_depth:
            raise ZeroNearContourError("argument refinement failed to settle")
        tm = (ta + tb) / 2
        fm = complex(f.eval(tm))
        if abs(fm) < floor:
            raise ZeroNearContourError("contour passes too close to a zero")
        piece(ta, fa, tm, fm, depth + 1)
        piece(tm, fm, tb, fb, depth + 1)

    for i in range(len(ts) - 1):
        piece(ts[i], complex(vals[i]), ts[i + 1], complex(vals[i + 1]), 1)
    return total


def argument_principle_count(
    f: ExponentialPolynomial,
    t_min: float,
    t_max: float,
    half_height: float = 1.0,
) -> int:
    """Number of zeros of f inside [t_min, t_max] x [-H, H], by winding number.

    Requires |f| >= 1e-8 * scale on the rectangle boundary; the winding total
    must quantize to an integer with residue <= 0.01.
    """
    if not t_max > t_min:
        raise CrystalError("empty counting rectangle")
    floor = 1e-8 * f.scale
    h = float(half_height)
    corners = [
        complex(t_min, -h),
        complex(t_max, -h),
        complex(t_max, h),
        complex(t_min, h),
        complex(t_min, -h),
    ]
    span = max(f.span, 1e-9)

    def one_pass(density: float) -> float:
        total = 0.0
        for a, b in zip(corners, corners[1:]):
            n_init = max(33, int(math.ceil(density * span * abs(b - a))) + 1)
            total += _walk_edge(f, a, b, n_init, floor)
        return total

    total = one_pass(8.0)
    count = round(total / TWO_PI)
    if abs(total / TWO_PI - count) > 0.01:
        total = one_pass(32.0)
        count = round(total / TWO_PI)
        if abs(total / TWO_PI - count) > 0.01:
            raise CrystalError("winding total failed to quantize to an integer")
    return int(count)


@dataclass(frozen=True)
class RootednessReport:
    real_count: int
    complex_count: int
    passed: bool


def _edge_candidates(edge: float, roots: Sequence[float], spacing: float) -> list[float]:
    """Cut positions near ``edge`` that keep clear of the real roots."""
    clear = 0.05 * spacing
    nearest = min(roots, key=lambda r: abs(r - edge)) if roots else None
    cands = []
    if nearest is None or abs(nearest - edge) >= clear:
        cands.append(edge)
    for delta in (0.5, -0.5, 0.25, -0.25):
        shift = edge + delta * spacing
        if roots and min(abs(r - shift) for r in roots) < clear:
            continue
        cands.append(shift)
    return cands or [edge]


def real_rootedness_audit(
    f: ExponentialPolynomial,
    window: tuple[float, float],
    half_height: float = 1.0,
    tol: float = 1e-10,
) -> RootednessReport:
    """Compare the window's real-root count (with multiplicity) to the winding count.

    Agreement certifies that every zero in the strip is real; a surplus in the
    contour count exposes genuinely complex zeros.  The contour cuts are nudged
    into root-free gaps (real count and winding always use the same rectangle),
    and the strip height is doubled once if a zero still crowds the contour.
    """
    lo, hi = float(window[0]), float(window[1])
    probe = find_real_roots(f, (lo - 1.0, hi + 1.0), tol=tol)
    spacing = probe.min_gap
    if not math.isfinite(spacing):
        spacing = max(1.0 / (4.0 * f.span), 1e-3) if f.span > 0 else 1e-3
    last: ZeroNearContourError | None = None
    for height in (half_height, 2 * half_height):
        for cut_lo in _edge_candidates(lo, probe.roots, spacing):
            for cut_hi in _edge_candidates(hi, probe.roots, spacing):
                try:
                    inside = argument_principle_count(f, cut_lo, cut_hi, height)
                except ZeroNearContourError as exc:
                    last = exc
                    continue
                real = sum(
                    m
                    for r, m in zip(probe.roots, probe.multiplicities)
                    if cut_lo <= r <= cut_hi
                )
                return RootednessReport(
                    real_count=int(real),
                    complex_count=inside,
                    passed=inside == real,
                )
    raise last if last is not None else CrystalError("audit could not place a contour")


def recover_coefficient(roots: RootList, xi: float) -> complex:
    """Time-average (1/2T) * sum over roots of exp(-2*pi*i*xi*t).

    Over a symmetric window [-T, T] this converges, as T grows, to the weight
    attached to frequency xi in the point set's summation formula (and to 0
    for xi outside the spectrum), with error of order 1/T.
    """
    lo, hi = roots.window
    if abs(lo + hi) > 1e-9 * max(1.0, hi):
        raise CrystalError("coefficient recovery needs a symmetric window [-T, T]")
    if not roots.roots:
        warnings.warn("empty root list; returning 0")
        return 0.0 + 0.0j
    t = np.asarray(roots.roots)
    m = np.asarray(roots.multiplicities)
    return complex(np.sum(m * np.exp(-2j * np.pi * xi * t)) / (hi - lo))
