"""End-to-end validators tying the algebraic and analytic halves together.

verify_summation checks the distributional identity

    sum over real roots t of fhat(t)  =  sum over cone lattice k of m(k) * f(<ell, k>)

against a Gaussian test function whose transform is closed-form, with both
sides truncated only after certified tail estimates.  The other validators
cover the cone-support (lighthouse) predicate, the monomial change of
variables, two Gaussian concentration inequalities, and the density of the
line orbit inside the curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .cone import ProperCone, as_direction_vector, enumerate_truncated
from .crystal import find_real_roots, restrict_to_line
from .intmat import IntMatrix, adjugate, determinant
from .laurent import LaurentPoly, monomial_substitute
from .surface import compute_spectrum, cone_support_scan, trace_curve

TWO_PI = 2.0 * math.pi

_SPHERE_AREA = {1: 2.0, 2: TWO_PI, 3: 4.0 * math.pi}


class TruncationError(ValueError):
    """Requested windows leave estimated tails above the certification bound."""

    def __init__(self, message: str, suggested_t: float, suggested_r: float):
        super().__init__(message)
        self.suggested_t = suggested_t
        self.suggested_r = suggested_r


@dataclass(frozen=True)
class GaussianTest:
    """f(xi) = amplitude * exp(-(xi-center)^2 / (2 width^2)), with closed-form
    transform fhat(t) = amplitude * width * sqrt(2 pi) * exp(-2 pi^2 width^2 t^2)
    * exp(-2 pi i center t)."""

    center: float
    width: float
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError("test width must be positive")

    def f(self, xi):
        x = np.asarray(xi, dtype=float)
        out = self.amplitude * np.exp(-((x - self.center) ** 2) / (2 * self.width**2))
        return out if x.shape else float(out)

    def fhat(self, t):
        tv = np.asarray(t, dtype=float)
        mag = (
            self.amplitude
            * self.width
            * math.sqrt(TWO_PI)
            * np.exp(-2 * math.pi**2 * self.width**2 * tv**2)
        )
        out = mag * np.exp(-2j * np.pi * self.center * tv)
        return out if tv.shape else complex(out)


@dataclass(frozen=True)
class SummationReport:
    lhs: complex
    rhs: complex
    residual: float
    tail_lhs: float
    tail_rhs: float
    n_roots: int
    n_lattice: int
    m0: float


def _lhs_tail(test: GaussianTest, t_max: float, gap: float) -> float:
    """Bound on the root-side sum beyond [-T, T] from the transform's decay."""
    per_unit = 2 * (math.ceil(1.0 / gap) + 1 if math.isfinite(gap) else 1)
    s = test.width
    total = 0.0
    for j in range(100_000):
        u = t_max + j
        term = abs(test.amplitude) * s * math.sqrt(TWO_PI) * math.exp(
            -2 * math.pi**2 * s**2 * u**2
        )
        total += per_unit * term
        if term < 1e-300:
            break
    return total


def _rhs_tail(
    test: GaussianTest, r_max: float, m0: float, shell_coeff: float, shell_pad: float, n: int
) -> float:
    """Bound on the lattice-side sum beyond radius R from the test's decay."""
    c = abs(test.center)
    s = test.width
    total = 0.0
    for j in range(100_000):
        u = r_max + j
        count = shell_coeff * ((u + 1 + shell_pad) ** n - max(u - shell_pad, 0.0) ** n) + 2
        fmax = abs(test.amplitude) * math.exp(-(max(u - c, 0.0) ** 2) / (2 * s**2))
        total += m0 * count * fmax
        if count * fmax < 1e-300 and u > c + 1:
            break
    return total


def verify_summation(
    p: LaurentPoly,
    ell,
    test: GaussianTest,
    t_max: float,
    r_max: float,
    cone: ProperCone | None = None,
    resolution: int = 256,
    root_tol: float = 1e-11,
    tail_bound: float = 1e-8,
) -> SummationReport:
    """Evaluate both sides of the summation formula with certified truncations.

    Roots are summed over [-T, T] against the Gaussian transform; the lattice
    side runs over the cone points with |<ell, k>| <= R weighted by the Fourier
    table.  Raises TruncationError (with suggested larger windows) if either
    estimated tail exceeds ``tail_bound``.
    """
    v = as_direction_vector(ell)
    if cone is None:
        cone = ProperCone.first_orthant(p.arity)
    f_line = restrict_to_line(p, v)
    roots = find_real_roots(f_line, (-float(t_max), float(t_max)), tol=root_tol)
    ks = enumerate_truncated(cone, v, float(r_max))
    table = compute_spectrum(p, v, ks, resolution)
    m0 = table.m0

    w = cone.dual_solve(v)
    shell_coeff = 2.0 / (
        math.factorial(p.arity) * float(np.prod(w)) * abs(cone.det)
    )
    shell_pad = 1.0 + float(np.sum(np.abs(np.asarray(cone.base.data, dtype=float))))
    tail_lhs = _lhs_tail(test, float(t_max), roots.min_gap)
    tail_rhs = _rhs_tail(test, float(r_max), max(m0, 1e-300), shell_coeff, shell_pad, p.arity)
    if tail_lhs > tail_bound or tail_rhs > tail_bound:
        t_sug, r_sug = float(t_max), float(r_max)
        for _ in range(12):
            if _lhs_tail(test, t_sug, roots.min_gap) <= tail_bound and _rhs_tail(
                test, r_sug, max(m0, 1e-300), shell_coeff, shell_pad, p.arity
            ) <= tail_bound:
                break
            t_sug *= 2
            r_sug *= 2
        raise TruncationError(
            f"estimated tails ({tail_lhs:.3g}, {tail_rhs:.3g}) exceed {tail_bound:.3g}; "
            f"try T = {t_sug}, R = {r_sug}",
            suggested_t=t_sug,
            suggested_r=r_sug,
        )

    lhs = complex(
        np.sum(
            np.asarray(roots.multiplicities) * test.fhat(np.asarray(roots.roots))
        )
        if roots.roots
        else 0.0
    )
    rhs = 0.0 + 0.0j
    for k in ks:
        rhs += table.coefficient(k) * test.f(table.frequency(k))
    return SummationReport(
        lhs=lhs,
        rhs=rhs,
        residual=abs(lhs - rhs),
        tail_lhs=tail_lhs,
        tail_rhs=tail_rhs,
        n_roots=len(roots.roots),
        n_lattice=len(ks),
        m0=m0,
    )


def lighthouse_check(
    p: LaurentPoly,
    ell,
    cone: ProperCone,
    k_radius: int,
    tol: float = 1e-6,
    resolution: int = 256,
) -> bool:
    """True iff the Fourier table vanishes (to tolerance) off the cone pair.

    The support condition is the substantive half of the lighthouse predicate;
    the singular-support half holds by construction for an algebraic curve.
    """
    return cone_support_scan(
        p, ell, cone, k_radius, resolution=resolution, rel_tol=tol
    ).passed


@dataclass(frozen=True)
class ChangeOfVariablesReport:
    kappa: float
    det_abs: int
    max_deviation: float
    max_ratio_deviation: float
    n_supported: int
    passed: bool


def change_of_variables_check(
    q: LaurentPoly,
    a: IntMatrix,
    ell_tilde,
    k_radius: int,
    p: LaurentPoly | None = None,
    resolution: int = 256,
    rel_tol: float = 1e-6,
) -> ChangeOfVariablesReport:
    """Verify m_p(k) = kappa * m_q(A^T k) for a single constant kappa.

    Here p is the polynomial with q(z) = p(z^A) and the directions are related
    by ell = A ell_tilde.  For unimodular A the pullback p is formed by the
    exact inverse substitution; otherwise the caller must supply p.  kappa is
    fitted at k = 0 and reported next to |det A| for comparison.
    """
    det = determinant(a)
    if det == 0:
        raise ValueError("substitution matrix must have nonzero determinant")
    if a.rows != 2 or q.arity != 2:
        raise ValueError("the check is implemented for two variables")
    if p is None:
        if abs(det) != 1:
            raise ValueError(
                "non-unimodular substitution requires an explicitly supplied p"
            )
        inv = adjugate(a) if det == 1 else -adjugate(a)
        p = monomial_substitute(q, inv.data)
    lt = as_direction_vector(ell_tilde)
    ell = np.asarray(a.data, dtype=float) @ lt

    r = int(k_radius)
    ks = [(i, j) for i in range(-r, r + 1) for j in range(-r, r + 1)]
    at = a.transpose()
    ks_mapped = [at.apply(k) for k in ks]
    table_p = compute_spectrum(p, ell, ks, resolution)
    table_q = compute_spectrum(q, lt, ks_mapped + [(0, 0)], resolution)

    m0p = table_p.m0
    m0q = table_q.m0
    if m0p <= 0 or m0q <= 0:
        raise ValueError("empty curve; the ratio is undefined")
    kappa = m0p / m0q

    max_dev = 0.0
    max_ratio_dev = 0.0
    supported = 0
    for k, km in zip(ks, ks_mapped):
        vp = table_p.coefficient(k)
        vq = table_q.coefficient(km)
        max_dev = max(max_dev, abs(vp - kappa * vq))
        if abs(vq) > 1e-8 * m0q:
            supported += 1
            max_ratio_dev = max(max_ratio_dev, abs(vp / vq - kappa))
    return ChangeOfVariablesReport(
        kappa=kappa,
        det_abs=abs(det),
        max_deviation=max_dev,
        max_ratio_deviation=max_ratio_dev,
        n_supported=supported,
        passed=max_dev <= rel_tol * m0p,
    )


@dataclass(frozen=True)
class GaussianTailReport:
    n: int
    big_n: float
    radius: float
    eps_exp: float
    shift: tuple[float, ...]
    lhs_sum: float
    rhs_bound: float
    passed: bool


def _lattice_exterior_sum(n: int, big_n: float, rho: float, shift: np.ndarray) -> float:
    """Sum of exp(-|k - v|^2 / (2 N^2)) over integer k with |k - v| > rho.

    Terms are summed directly out to a cutoff where they drop below 1e-300;
    the discarded region is covered by an explicit box-count bound added on.
    """
    cutoff = max(rho, big_n * math.sqrt(2 * 300 * math.log(10.0))) + n + 2
    lo = [math.floor(shift[i] - cutoff) for i in range(n)]
    hi = [math.ceil(shift[i] + cutoff) for i in range(n)]
    total = 0.0
    inv = 1.0 / (2.0 * big_n**2)
    if n == 1:
        k = np.arange(lo[0], hi[0] + 1)
        r2 = (k - shift[0]) ** 2
        total = float(np.sum(np.exp(-r2[r2 > rho**2] * inv)))
    elif n == 2:
        k2 = np.arange(lo[1], hi[1] + 1)
        d2 = (k2 - shift[1]) ** 2
        for k1 in range(lo[0], hi[0] + 1):
            r2 = (k1 - shift[0]) ** 2 + d2
            sel = r2 > rho**2
            if np.any(sel):
                total += float(np.sum(np.exp(-r2[sel] * inv)))
    elif n == 3:
        k2 = np.arange(lo[1], hi[1] + 1)
        k3 = np.arange(lo[2], hi[2] + 1)
        d23 = (k2[:, None] - shift[1]) ** 2 + (k3[None, :] - shift[2]) ** 2
        for k1 in range(lo[0], hi[0] + 1):
            r2 = (k1 - shift[0]) ** 2 + d23
            sel = r2 > rho**2
            if np.any(sel):
                total += float(np.sum(np.exp(-r2[sel] * inv)))
    else:
        raise ValueError("lattice summation supports n in {1, 2, 3}")
    # Everything beyond the cutoff, bounded shell by shell.
    slack = 0.0
    for j in range(400):
        u = cutoff + j
        term = (2 * (u + 2)) ** n * math.exp(-(u**2) * inv)
        slack += term
        if term < 1e-320:
            break
    return total + slack


def gaussian_tail_bound(
    n: int, big_n: float, radius: float, eps_exp: float, shift: Sequence[float]
) -> GaussianTailReport:
    """Check the lattice Gaussian concentration inequality.

    The mass of a width-N discrete Gaussian outside the ball of radius
    R * N^(1+eps) around any center is at most

        c2 * (R N^(1+eps))^n * exp(-R^2 N^(2 eps) / 2),
        c2 = 2 * (2 pi e / n)^(n/2) * sum over Z^n of exp(-pi |k|^2).

    The left side is summed directly; the inequality only sharpens as N grows,
    so failures at small N are informative rather than fatal.
    """
    if n not in (1, 2, 3):
        raise ValueError("supported dimensions are 1, 2, 3")
    v = np.asarray([float(x) for x in shift], dtype=float)
    if v.size != n:
        raise ValueError("shift vector length must equal n")
    rho = radius * big_n ** (1 + eps_exp)
    theta1 = float(sum(math.exp(-math.pi * m * m) for m in range(-20, 21)))
    c2 = 2.0 * (TWO_PI * math.e / n) ** (n / 2) * theta1**n
    exponent = -(radius**2) * big_n ** (2 * eps_exp) / 2.0
    rhs = c2 * rho**n * math.exp(exponent) if exponent > -745 else 0.0
    lhs = _lattice_exterior_sum(n, float(big_n), float(rho), v)
    return GaussianTailReport(
        n=n,
        big_n=float(big_n),
        radius=float(radius),
        eps_exp=float(eps_exp),
        shift=tuple(v),
        lhs_sum=lhs,
        rhs_bound=rhs,
        passed=lhs <= rhs,
    )


@dataclass(frozen=True)
class GaussianIntegralReport:
    n: int
    big_n: float
    radius: float
    lhs: float
    rhs: float
    passed: bool


def gaussian_integral_value(n: int, big_n: float) -> float:
    """Closed form of the full Gaussian integral, (2 pi)^(n/2) / N^n."""
    return (TWO_PI) ** (n / 2) / big_n**n


def gaussian_tail_integral_check(n: int, big_n: float, radius: float) -> GaussianIntegralReport:
    """Check the continuous Gaussian tail inequality by radial quadrature.

    For R > 0 the tail mass of exp(-N^2 |x|^2 / 2) outside the R-ball is at
    most c_n / (R N^(n+1)) * exp(-N^2 R^2 / (2n)); the constant

        c_n = 2 * (2 pi)^((n-1)/2) * n^(3/2)

    comes from the coordinate union bound with the two-sided single-variable
    tail estimate.  At R = 0 the quadrature reproduces the full integral and
    the (divergent) bound is vacuous.
    """
    if n not in (1, 2, 3):
        raise ValueError("supported dimensions are 1, 2, 3")
    area = _SPHERE_AREA[n]
    if radius <= 0:
        val, _err = integrate.quad(
            lambda u: u ** (n - 1) * math.exp(-(u**2) / 2.0), 0.0, 45.0
        )
        lhs = area * val / big_n**n
        return GaussianIntegralReport(n, float(big_n), float(radius), lhs, math.inf, True)
    a2 = (big_n * radius) ** 2

    def integrand(u: float) -> float:
        # exp(-N^2 R^2 / 2) is factored out for conditioning.
        return (1.0 + u) ** (n - 1) * math.exp(-a2 * (u + u * u / 2.0))

    val, _err = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    log_lhs = math.log(area) + n * math.log(radius) - a2 / 2.0 + math.log(val)
    lhs = math.exp(log_lhs) if log_lhs > -745 else 0.0
    c_n = 2.0 * TWO_PI ** ((n - 1) / 2.0) * n**1.5
    log_rhs = math.log(c_n) - math.log(radius) - (n + 1) * math.log(big_n) - a2 / (2.0 * n)
    rhs = math.exp(log_rhs) if log_rhs > -745 else 0.0
    return GaussianIntegralReport(
        n=n, big_n=float(big_n), radius=float(radius), lhs=lhs, rhs=rhs, passed=lhs <= rhs
    )


@dataclass(frozen=True)
class OrbitClosureReport:
    max_min_distance: float
    n_curve_points: int
    n_orbit_points: int
    passed: bool


def orbit_closure_check(
    p: LaurentPoly,
    ell,
    delta: float,
    t_max: float,
    resolution: int = 256,
    root_tol: float = 1e-10,
) -> OrbitClosureReport:
    """Every traced curve point sits within delta of the line orbit's hits.

    The orbit points are t * ell mod 1 for root times t in [0, T]; density of
    the orbit in the curve means the maximal torus distance from curve samples
    to the orbit tends to zero as T grows.
    """
    v = as_direction_vector(ell)
    curve = trace_curve(p, int(resolution))
    pts = curve.points()
    if pts.shape[0] == 0:
        return OrbitClosureReport(0.0, 0, 0, True)
    f_line = restrict_to_line(p, v)
    roots = find_real_roots(f_line, (0.0, float(t_max)), tol=root_tol)
    t = np.asarray(roots.roots)
    if t.size == 0:
        return OrbitClosureReport(math.inf, int(pts.shape[0]), 0, False)
    orbit = np.mod(np.outer(t, v), 1.0)
    diff = np.abs(pts[:, None, :] - orbit[None, :, :])
    diff = np.minimum(diff, 1.0 - diff)
    dist = np.sqrt(np.sum(diff**2, axis=2))
    worst = float(np.max(np.min(dist, axis=1)))
    return OrbitClosureReport(
        max_min_distance=worst,
        n_curve_points=int(pts.shape[0]),
        n_orbit_points=int(t.size),
        passed=worst <= delta,
    )
