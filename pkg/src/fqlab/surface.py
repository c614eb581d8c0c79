"""Torus zero curves of two-variable Laurent polynomials.

The curve {x in [0,1)^2 : p(e^{2 pi i x1}, e^{2 pi i x2}) = 0} is sampled by
fixing one coordinate per slice and solving the resulting univariate Laurent
polynomial on the unit circle (companion-matrix roots after clearing the
denominator).  Matched slices give continuous branches with analytic slopes,
from which the directional-density Fourier table, cone-support scans, and the
independent slab-volume Monte Carlo estimate are computed.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cone import ProperCone, as_direction_vector
from .crystal import find_real_roots, restrict_to_line
from .laurent import LaurentPoly

# Residual bound for accepted curve points, relative to the coefficient scale.
RESIDUAL_REL = 1e-9
# Companion-matrix roots farther than this from the unit circle are off-curve.
MODULUS_TOL = 1e-8


class SurfaceError(ValueError):
    """Slice or tracing failure."""


class NearSingularError(SurfaceError):
    """Curve data degenerate to within tolerance (gradient or branch collision)."""


class ConvergenceError(SurfaceError):
    """Quadrature refused to meet the requested accuracy."""


def _univariate_slice(
    p: LaurentPoly, axis: int, fixed: float
) -> tuple[int, np.ndarray]:
    """Coefficients of p with coordinate ``axis`` frozen at e^{2 pi i fixed}.

    Returns (min_exponent, ascending coefficient array) in the free variable.
    """
    free = 1 - axis
    coeff: dict[int, complex] = {}
    for e, c in p.terms:
        w = c * complex(
            math.cos(2 * math.pi * e[axis] * fixed),
            math.sin(2 * math.pi * e[axis] * fixed),
        )
        coeff[e[free]] = coeff.get(e[free], 0.0 + 0.0j) + w
    lo = min(coeff)
    hi = max(coeff)
    arr = np.zeros(hi - lo + 1, dtype=complex)
    for k, v in coeff.items():
        arr[k - lo] = v
    top = float(np.max(np.abs(arr)))
    if top == 0.0 or top <= 1e-14 * p.scale:
        raise SurfaceError("slice polynomial is identically zero")
    # Trim roundoff ghosts at the ends only; interior zeros are genuine.
    mask = np.abs(arr) > 1e-14 * top
    first = int(np.argmax(mask))
    last = len(arr) - int(np.argmax(mask[::-1]))
    return lo + first, arr[first:last]


def _polish_circle_roots(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """A few Newton steps on the raw companion-matrix roots."""
    powers = np.arange(len(coeffs))
    dcoeffs = coeffs[1:] * powers[1:]
    with np.errstate(all="ignore"):
        for _ in range(3):
            vals = np.polyval(coeffs[::-1], roots)
            dvals = np.polyval(dcoeffs[::-1], roots) if len(dcoeffs) else np.zeros_like(roots)
            step = np.where(dvals != 0, vals / np.where(dvals == 0, 1, dvals), 0)
            roots = roots - step
    return roots


def slice_solve(
    p: LaurentPoly,
    axis: int,
    fixed: float,
    modulus_tol: float = MODULUS_TOL,
) -> list[float]:
    """Unit-circle roots of the slice, as free-coordinate values in [0, 1).

    Roots with | |z| - 1 | > modulus_tol are discarded (for a stable input
    every slice root is unimodular, so discards signal an off-curve factor).
    Kept roots must reproduce |p| <= 1e-9 * scale at the assembled point.
    """
    if p.arity != 2:
        raise SurfaceError("slice solving is implemented for two variables")
    if axis not in (0, 1):
        raise SurfaceError("axis must be 0 or 1")
    on, _ = _slice_roots_detailed(p, axis, fixed, modulus_tol)
    return on


def _slice_roots_detailed(
    p: LaurentPoly, axis: int, fixed: float, modulus_tol: float
) -> tuple[list[float], int]:
    _, coeffs = _univariate_slice(p, axis, fixed)
    if len(coeffs) == 1:
        return [], 0
    raw = np.roots(coeffs[::-1])
    raw = _polish_circle_roots(coeffs, raw)
    on_circle: list[float] = []
    off = 0
    for r in raw:
        if abs(abs(r) - 1.0) <= modulus_tol:
            on_circle.append(float(np.angle(r) / (2 * math.pi)) % 1.0)
        else:
            off += 1
    on_circle.sort()
    for val in on_circle:
        x = [0.0, 0.0]
        x[axis] = fixed
        x[1 - axis] = val
        if abs(p.eval_exp(x)) > RESIDUAL_REL * p.scale * 10:
            raise SurfaceError(
                f"slice root at {tuple(x)} fails the residual bound; "
                "ill-conditioned slice"
            )
    return on_circle, off


def default_sweep_axis(p: LaurentPoly) -> int:
    """Sweep (fix) x2 unless the polynomial has no z1 dependence."""
    return 1 if p.degree_span(0) > 0 else 0


@dataclass(frozen=True)
class CurveBranches:
    """Traced curve: ``strands[i][j]`` is the lifted solved coordinate at slice j.

    ``closure[i]`` names the strand continuing strand i across the sweep period
    and ``wraps[i]`` the integer the lift drops by; geometric branches are the
    cycles of that permutation.  ``slopes`` holds d(solved)/d(swept).
    """

    resolution: int
    sweep_axis: int
    sweep: np.ndarray
    strands: np.ndarray
    slopes: np.ndarray
    closure: tuple[int, ...]
    wraps: tuple[int, ...]
    off_circle: int

    @property
    def n_strands(self) -> int:
        return self.strands.shape[0]

    @property
    def n_branches(self) -> int:
        seen = set()
        cycles = 0
        for start in range(self.n_strands):
            if start in seen:
                continue
            cycles += 1
            i = start
            while i not in seen:
                seen.add(i)
                i = self.closure[i]
        return cycles

    def points(self) -> np.ndarray:
        """All samples as an (n, 2) array of torus coordinates in [0, 1)."""
        if self.n_strands == 0:
            return np.zeros((0, 2))
        solved = np.mod(self.strands.ravel(), 1.0)
        swept = np.tile(self.sweep, self.n_strands)
        pts = np.empty((solved.size, 2))
        pts[:, 1 - self.sweep_axis] = solved
        pts[:, self.sweep_axis] = swept
        return pts

    def is_empty(self) -> bool:
        return self.n_strands == 0


def _circ_delta(a: float, b: float) -> float:
    """Signed displacement from a to b on R/Z, in (-1/2, 1/2]."""
    d = (b - a) % 1.0
    return d if d <= 0.5 else d - 1.0


def _min_circular_gap(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 1.0
    vs = sorted(values)
    gaps = [vs[i + 1] - vs[i] for i in range(len(vs) - 1)]
    gaps.append(1.0 - (vs[-1] - vs[0]))
    return min(gaps)


def _slopes_at(
    p: LaurentPoly, axis: int, solved: np.ndarray, swept: np.ndarray
) -> np.ndarray:
    """Analytic branch slope d(solved)/d(swept) from the implicit derivative.

    With z = e^{2 pi i x} the ratio (z_s dp/dz_s) / (z_f dp/dz_f) is real on
    the curve; its residual imaginary part is asserted below 1e-6.
    """
    free = 1 - axis
    x = np.empty((solved.size, 2))
    x[:, free] = solved
    x[:, axis] = swept
    scaled = np.zeros((solved.size, 2), dtype=complex)
    for e, c in p.terms:
        mono = c * np.exp(2j * np.pi * (x @ np.asarray(e, dtype=float)))
        scaled[:, 0] += e[0] * mono  # z1 * dp/dz1
        scaled[:, 1] += e[1] * mono
    num = scaled[:, axis]
    den = scaled[:, free]
    if np.any(np.abs(den) < 1e-9 * p.scale):
        raise NearSingularError("free-coordinate derivative vanishes on the curve")
    ratio = num / den
    if np.any(np.abs(ratio.imag) > 1e-6 * (1.0 + np.abs(ratio))):
        raise NearSingularError("implicit slope came out non-real; singular point nearby")
    return -ratio.real


@functools.lru_cache(maxsize=64)
def _trace_cached(p: LaurentPoly, resolution: int, axis: int) -> CurveBranches:
    last_err: SurfaceError | None = None
    for res in (resolution, 4 * resolution):
        try:
            return _trace_once(p, res, axis)
        except _RetraceNeeded as exc:
            last_err = SurfaceError(str(exc))
    raise last_err


class _RetraceNeeded(Exception):
    pass


def _trace_once(p: LaurentPoly, res: int, axis: int) -> CurveBranches:
    sweep = np.arange(res) / res
    per_slice: list[list[float]] = []
    off_total = 0
    for xf in sweep:
        on, off = _slice_roots_detailed(p, axis, float(xf), MODULUS_TOL)
        per_slice.append(on)
        off_total += off

    counts = {len(r) for r in per_slice}
    if counts == {0}:
        return CurveBranches(
            resolution=res,
            sweep_axis=axis,
            sweep=sweep,
            strands=np.zeros((0, res)),
            slopes=np.zeros((0, res)),
            closure=(),
            wraps=(),
            off_circle=off_total,
        )
    if len(counts) != 1:
        raise _RetraceNeeded("slice root counts vary across the sweep")
    d = counts.pop()

    for roots in per_slice:
        if _min_circular_gap(roots) < 1e-6:
            raise NearSingularError("branch collision below 1e-6; near-singular curve")

    lifts = np.empty((d, res))
    lifts[:, 0] = per_slice[0]
    positions = list(per_slice[0])
    for j in range(1, res):
        nxt, perm = _match_slice(positions, per_slice[j])
        if perm is None:
            raise _RetraceNeeded("branch matching exceeded the continuity threshold")
        for i in range(d):
            lifts[i, j] = lifts[i, j - 1] + _circ_delta(positions[i], nxt[i])
        positions = nxt

    closure_vals, closure_perm = _match_slice(positions, per_slice[0])
    if closure_perm is None:
        raise _RetraceNeeded("branch closure exceeded the continuity threshold")
    wraps = []
    for i in range(d):
        cont = lifts[i, res - 1] + _circ_delta(positions[i], closure_vals[i])
        w = cont - per_slice[0][closure_perm[i]]
        if abs(w - round(w)) > 1e-6:
            raise _RetraceNeeded("branch closure is not integral")
        wraps.append(int(round(w)))

    solved_flat = np.mod(lifts.ravel(), 1.0)
    swept_flat = np.tile(sweep, d)
    slopes = _slopes_at(p, axis, solved_flat, swept_flat).reshape(d, res)

    return CurveBranches(
        resolution=res,
        sweep_axis=axis,
        sweep=sweep,
        strands=lifts,
        slopes=slopes,
        closure=tuple(closure_perm),
        wraps=tuple(wraps),
        off_circle=off_total,
    )


def _match_slice(current: list[float], nxt_sorted: list[float]):
    """Assign each strand position the nearest next-slice root, bijectively.

    Returns (values_in_strand_order, permutation) or (None, None) when the
    nearest-root assignment collides or moves farther than half the minimal
    inter-root gap (strands of a smooth curve never do).
    """
    d = len(current)
    threshold = 0.5 if d == 1 else max(1e-6, 0.5 * _min_circular_gap(current))
    chosen: dict[int, int] = {}
    for i, v in enumerate(current):
        dists = [abs(_circ_delta(v, w)) for w in nxt_sorted]
        k = int(np.argmin(dists))
        if dists[k] > threshold or k in chosen.values():
            return None, None
        chosen[i] = k
    values = [nxt_sorted[chosen[i]] for i in range(d)]
    return values, [chosen[i] for i in range(d)]


def trace_curve(p: LaurentPoly, resolution: int, axis: int | None = None) -> CurveBranches:
    """Trace the torus curve with ``resolution`` slices of the swept coordinate.

    Root-count mismatches trigger one retrace at four times the resolution
    before failing.  Results are cached per (p, resolution, axis).
    """
    if p.arity != 2:
        raise SurfaceError("curve tracing is implemented for two variables")
    if resolution < 8:
        raise SurfaceError("resolution below 8 cannot support the continuity checks")
    if axis is None:
        axis = default_sweep_axis(p)
    return _trace_cached(p, int(resolution), int(axis))


def normal_at(
    p: LaurentPoly,
    point: Sequence[float],
    cone: ProperCone | None = None,
) -> np.ndarray:
    """Unit normal of the curve at a point satisfying the residual bound.

    Without a cone the sign makes the first nonzero component positive; with
    one, the representative lying in it is chosen.
    """
    x = np.asarray([float(v) for v in point])
    if abs(p.eval_exp(x)) > RESIDUAL_REL * p.scale * 10:
        raise SurfaceError("point does not lie on the curve to within tolerance")
    axis = default_sweep_axis(p)
    slope = float(_slopes_at(p, axis, np.array([x[1 - axis]]), np.array([x[axis]]))[0])
    n = np.zeros(2)
    n[1 - axis] = 1.0
    n[axis] = -slope
    n /= np.linalg.norm(n)
    if cone is not None:
        base_t = np.asarray(cone.base.transpose().data, dtype=float)
        if np.all(base_t @ n >= -1e-9):
            return n
        if np.all(base_t @ (-n) >= -1e-9):
            return -n
        raise SurfaceError("normal lies outside the requested cone pair")
    lead = np.nonzero(np.abs(n) > 1e-12)[0][0]
    return n if n[lead] > 0 else -n


@dataclass(frozen=True)
class SpectrumTable:
    """Fourier data of the directional measure: k -> (coefficient, <ell, k>)."""

    entries: dict[tuple[int, int], complex]
    frequencies: dict[tuple[int, int], float]
    resolution_used: int

    def coefficient(self, k: Sequence[int]) -> complex:
        return self.entries[tuple(int(v) for v in k)]

    def frequency(self, k: Sequence[int]) -> float:
        return self.frequencies[tuple(int(v) for v in k)]

    @property
    def m0(self) -> float:
        return self.entries[(0, 0)].real if (0, 0) in self.entries else 0.0

    def check_invariants(self, tol: float = 1e-9) -> None:
        """Conjugate symmetry under k -> -k and |m(k)| <= m(0) where testable."""
        m0 = self.m0
        for k, v in self.entries.items():
            neg = (-k[0], -k[1])
            if neg in self.entries:
                if abs(np.conjugate(self.entries[neg]) - v) > tol * max(1.0, abs(v)):
                    raise ConvergenceError(f"conjugate symmetry fails at k = {k}")
            if (0, 0) in self.entries and abs(v) > m0 * (1 + 1e-9) + tol:
                raise ConvergenceError(f"|m({k})| exceeds the mass m(0)")


def _spectrum_values(
    curve: CurveBranches, ell: np.ndarray, ks: np.ndarray
) -> np.ndarray:
    """Periodic-trapezoid Fourier sums over the traced samples."""
    if curve.is_empty():
        return np.zeros(len(ks), dtype=complex)
    axis = curve.sweep_axis
    free = 1 - axis
    solved = np.mod(curve.strands.ravel(), 1.0)
    swept = np.tile(curve.sweep, curve.n_strands)
    density = np.abs(ell[free] - ell[axis] * curve.slopes.ravel()) / curve.resolution
    phase = np.exp(
        2j * np.pi * (np.outer(ks[:, free], solved) + np.outer(ks[:, axis], swept))
    )
    return phase @ density


def compute_spectrum(
    p: LaurentPoly,
    ell,
    ks: Sequence[Sequence[int]],
    resolution: int = 256,
    tol: float = 1e-8,
    axis: int | None = None,
) -> SpectrumTable:
    """Directional-measure Fourier coefficients at the given integer vectors.

    Values are accepted once doubling the slice resolution moves every entry
    by at most ``tol``; the finer values are returned.
    """
    v = as_direction_vector(ell)
    if v.size != 2 or p.arity != 2:
        raise SurfaceError("spectrum computation is implemented for two variables")
    karr = np.asarray([[int(a) for a in k] for k in ks], dtype=float).reshape(-1, 2)
    res = int(resolution)
    coarse = _spectrum_values(trace_curve(p, res, axis), v, karr)
    for _ in range(4):
        fine = _spectrum_values(trace_curve(p, 2 * res, axis), v, karr)
        if np.max(np.abs(fine - coarse)) <= tol:
            entries = {
                tuple(int(a) for a in k): complex(val) for k, val in zip(karr, fine)
            }
            freqs = {kk: float(np.dot(kk, v)) for kk in entries}
            table = SpectrumTable(
                entries=entries, frequencies=freqs, resolution_used=2 * res
            )
            table.check_invariants()
            return table
        res *= 2
        coarse = fine
    raise ConvergenceError(
        "resolution doubling did not stabilize the Fourier table; "
        "the curve may be near-singular"
    )


def fourier_coefficient(
    p: LaurentPoly, ell, k: Sequence[int], resolution: int = 256
) -> complex:
    kk = tuple(int(v) for v in k)
    table = compute_spectrum(p, ell, [kk, (-kk[0], -kk[1]), (0, 0)], resolution)
    return table.coefficient(kk)


@dataclass(frozen=True)
class SlabReport:
    volume: float
    std_error: float
    samples: int
    hits: int
    half_width: float


def slab_volume_oracle(
    p: LaurentPoly,
    ell,
    half_width: float,
    samples: int,
    seed: int,
) -> SlabReport:
    """Monte Carlo mass of the curve's directional thickening, per unit width.

    Uniform torus samples are tested for a curve crossing within +-half_width
    along the direction, via a Newton-refined root solve of the restricted
    exponential sum on that short interval.  For half_width below half the
    minimal crossing gap the expected value is exactly the measure's mass.
    """
    v = as_direction_vector(ell)
    if v.size != p.arity:
        raise SurfaceError("direction length does not match the polynomial arity")
    eps = float(half_width)
    if eps <= 0:
        raise SurfaceError("half-width must be positive")
    f = restrict_to_line(p, v)
    probe = find_real_roots(f, (0.0, max(20.0, 10 * eps)), tol=1e-9)
    if probe.min_gap < 2 * eps:
        raise SurfaceError(
            f"half-width {eps} exceeds half the minimal crossing gap "
            f"{probe.min_gap / 2:.6g}"
        )

    rng = np.random.default_rng(seed)
    x = rng.random((int(samples), p.arity))
    alpha = np.asarray([e for e, _ in p.terms], dtype=float)
    amps = np.asarray([c for _, c in p.terms])
    mu = -(alpha @ v)  # per-term frequency along -ell
    coeff = amps * np.exp(2j * np.pi * (x @ alpha.T))  # (samples, terms)

    # Coarse grid: a crossing inside the window forces a small |h| nearby.
    h = eps / 2
    grid = np.arange(-3, 4) * h
    deriv_max = 2 * math.pi * float(np.sum(np.abs(amps) * np.abs(mu)))
    tau = 1.1 * deriv_max * h / 2
    vals = np.abs(coeff @ np.exp(2j * np.pi * np.outer(mu, grid)))
    seed_mask = vals <= tau
    lane_sample, lane_grid = np.nonzero(seed_mask)
    if lane_sample.size == 0:
        return SlabReport(0.0, 0.0, int(samples), 0, eps)

    t = grid[lane_grid].astype(complex)
    c_lane = coeff[lane_sample]
    with np.errstate(all="ignore"):
        for _ in range(30):
            ph = np.exp(2j * np.pi * np.outer(t, mu))
            ft = np.sum(c_lane * ph, axis=1)
            dft = np.sum(c_lane * ph * (2j * np.pi * mu), axis=1)
            step = np.where(
                ft == 0, 0.0, np.where(dft != 0, ft / np.where(dft == 0, 1, dft), np.nan)
            )
            t = t - step
            moving = np.abs(step) >= 1e-14
            if not np.any(moving[np.isfinite(step)]):
                break
        ph = np.exp(2j * np.pi * np.outer(t, mu))
        resid = np.abs(np.sum(c_lane * ph, axis=1))
    good = (
        np.isfinite(t)
        & (resid <= 1e-9 * p.scale)
        & (np.abs(t.imag) <= 1e-9)
        & (np.abs(t.real) <= eps)
    )
    hit = np.zeros(int(samples), dtype=bool)
    hit[lane_sample[good]] = True
    hits = int(np.count_nonzero(hit))
    phat = hits / samples
    volume = phat / (2 * eps)
    std_error = math.sqrt(max(phat * (1 - phat), 0.0) / samples) / (2 * eps)
    return SlabReport(volume, std_error, int(samples), hits, eps)


@dataclass(frozen=True)
class ConeSupportReport:
    max_outside: float
    max_inside: float
    m0: float
    k_radius: int
    passed: bool


def cone_support_scan(
    p: LaurentPoly,
    ell,
    cone: ProperCone,
    k_radius: int,
    resolution: int = 256,
    rel_tol: float = 1e-6,
) -> ConeSupportReport:
    """Check that the Fourier table vanishes off the cone pair C u -C."""
    r = int(k_radius)
    ks = [(i, j) for i in range(-r, r + 1) for j in range(-r, r + 1)]
    table = compute_spectrum(p, ell, ks, resolution)
    max_out = 0.0
    max_in = 0.0
    for k in ks:
        mag = abs(table.coefficient(k))
        if cone.contains(k) or cone.contains((-k[0], -k[1])):
            max_in = max(max_in, mag)
        else:
            max_out = max(max_out, mag)
    m0 = table.m0
    return ConeSupportReport(
        max_outside=max_out,
        max_inside=max_in,
        m0=m0,
        k_radius=r,
        passed=max_out <= rel_tol * m0 + 1e-300,
    )


@dataclass(frozen=True)
class NormalConeReport:
    violations: int
    samples: int
    passed: bool


def normal_cone_check(
    p: LaurentPoly, cone: ProperCone, samples: int = 256
) -> NormalConeReport:
    """Test that every sampled curve normal lies in C u -C (sign-adjusted)."""
    curve = trace_curve(p, int(samples))
    if curve.is_empty():
        return NormalConeReport(0, 0, True)
    axis = curve.sweep_axis
    normals = np.zeros((curve.strands.size, 2))
    normals[:, 1 - axis] = 1.0
    normals[:, axis] = -curve.slopes.ravel()
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    base_t = np.asarray(cone.base.transpose().data, dtype=float)
    u = normals @ base_t.T
    ok = np.all(u >= -1e-9, axis=1) | np.all(-u >= -1e-9, axis=1)
    bad = int(np.count_nonzero(~ok))
    return NormalConeReport(violations=bad, samples=int(normals.shape[0]), passed=bad == 0)
