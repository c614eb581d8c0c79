"""Laurent polynomials in n complex variables with exact integer exponents.

A polynomial is a finite sum  p(z) = sum_a c_a * z^a  over exponent vectors
a in Z^n.  Exponent arithmetic is done in exact Python integers; coefficients
are double-precision complex.  Evaluation uses compensated (Kahan) summation
so that cancellation-heavy inputs such as z1*z2 - 1 at a root come out clean.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Relative size below which a coefficient produced by term merging is treated
# as a roundoff ghost and dropped.
MERGE_DROP_REL = 1e-14

ExponentVector = tuple[int, ...]


class LaurentError(ValueError):
    """Malformed polynomial input or an operation outside its domain."""


def _check_exponent(exp: Iterable[int], arity: int) -> ExponentVector:
    t = tuple(exp)
    if len(t) != arity:
        raise LaurentError(f"exponent vector {t} does not match arity {arity}")
    out = []
    for v in t:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise LaurentError(f"exponent entries must be integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


def _kahan(values: Iterable[complex]) -> complex:
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


@dataclass(frozen=True)
class LaurentPoly:
    """Immutable Laurent polynomial; terms are lex-sorted by exponent vector."""

    arity: int
    terms: tuple[tuple[ExponentVector, complex], ...]

    @staticmethod
    def from_terms(
        arity: int,
        terms: Mapping[Iterable[int], complex] | Iterable[tuple[Iterable[int], complex]],
    ) -> "LaurentPoly":
        """Build a polynomial, merging duplicate exponents and dropping zeros."""
        if arity < 1:
            raise LaurentError("arity must be a positive integer")
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[ExponentVector, complex] = {}
        for exp, coeff in items:
            key = _check_exponent(exp, arity)
            merged[key] = merged.get(key, 0.0 + 0.0j) + complex(coeff)
        cleaned = tuple(
            (e, merged[e]) for e in sorted(merged) if merged[e] != 0.0 + 0.0j
        )
        return LaurentPoly(arity=arity, terms=cleaned)

    def coefficients(self) -> dict[ExponentVector, complex]:
        return dict(self.terms)

    @property
    def scale(self) -> float:
        """Sum of coefficient magnitudes; the natural size unit for residuals."""
        return float(sum(abs(c) for _, c in self.terms))

    def support(self) -> tuple[ExponentVector, ...]:
        return tuple(e for e, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree_span(self, axis: int) -> int:
        """Spread max - min of the exponent in one variable (0 if no terms)."""
        if not self.terms:
            return 0
        exps = [e[axis] for e, _ in self.terms]
        return max(exps) - min(exps)

    def eval(self, z: Sequence[complex]) -> complex:
        """Value sum_a c_a z^a; every z_i must be nonzero (negative exponents)."""
        zv = [complex(v) for v in z]
        if len(zv) != self.arity:
            raise LaurentError(f"point has length {len(zv)}, expected {self.arity}")
        if any(v == 0 for v in zv):
            raise LaurentError("evaluation point has a zero component")
        return _kahan(
            c * math.prod(zv[i] ** e[i] for i in range(self.arity))
            for e, c in self.terms
        )

    def eval_exp(self, x: Sequence[float]) -> complex:
        """Value at z = exp(2*pi*i*x); periodic in each x_i with period 1."""
        xv = [float(v) for v in x]
        if len(xv) != self.arity:
            raise LaurentError(f"point has length {len(xv)}, expected {self.arity}")
        return _kahan(
            c * complex(math.cos(TWO_PI * ph), math.sin(TWO_PI * ph))
            for e, c in self.terms
            for ph in (math.fsum(e[i] * xv[i] for i in range(self.arity)),)
        )

    def eval_exp_many(self, x: np.ndarray) -> np.ndarray:
        """Vectorized eval_exp over an (m, arity) array of torus points."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        if pts.shape[1] != self.arity:
            raise LaurentError("point array has wrong arity")
        out = np.zeros(pts.shape[0], dtype=complex)
        for e, c in self.terms:
            out += c * np.exp(2j * np.pi * (pts @ np.asarray(e, dtype=float)))
        return out

    def gradient(self, z: Sequence[complex]) -> np.ndarray:
        """Vector of partial derivatives dp/dz_i at z (z_i nonzero)."""
        zv = [complex(v) for v in z]
        if len(zv) != self.arity:
            raise LaurentError(f"point has length {len(zv)}, expected {self.arity}")
        if any(v == 0 for v in zv):
            raise LaurentError("evaluation point has a zero component")
        grad = np.empty(self.arity, dtype=complex)
        for i in range(self.arity):
            grad[i] = _kahan(
                c
                * e[i]
                * math.prod(
                    zv[j] ** (e[j] - (1 if j == i else 0)) for j in range(self.arity)
                )
                for e, c in self.terms
                if e[i] != 0
            )
        return grad

    # -- JSON interchange ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "arity": self.arity,
            "terms": [
                {"exp": list(e), "re": c.real, "im": c.imag} for e, c in self.terms
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json_dict(obj: dict) -> "LaurentPoly":
        if not isinstance(obj, dict):
            raise LaurentError("polynomial JSON must be an object")
        try:
            arity = obj["arity"]
            raw_terms = obj["terms"]
        except KeyError as exc:
            raise LaurentError(f"polynomial JSON missing field {exc}") from exc
        if not isinstance(arity, int) or isinstance(arity, bool) or arity < 1:
            raise LaurentError("field 'arity' must be a positive integer")
        if not isinstance(raw_terms, list):
            raise LaurentError("field 'terms' must be a list")
        seen: set[ExponentVector] = set()
        terms: list[tuple[ExponentVector, complex]] = []
        for idx, t in enumerate(raw_terms):
            if not isinstance(t, dict) or not {"exp", "re", "im"} <= set(t):
                raise LaurentError(f"terms[{idx}] must have fields exp, re, im")
            exp = _check_exponent(t["exp"], arity)
            if exp in seen:
                raise LaurentError(f"terms[{idx}] duplicates exponent {exp}")
            seen.add(exp)
            coeff = complex(float(t["re"]), float(t["im"]))
            if coeff == 0:
                raise LaurentError(f"terms[{idx}] has zero coefficient")
            terms.append((exp, coeff))
        return LaurentPoly(arity=arity, terms=tuple(sorted(terms)))

    @staticmethod
    def from_json(text: str) -> "LaurentPoly":
        return LaurentPoly.from_json_dict(json.loads(text))


def monomial_substitute(p: LaurentPoly, matrix: Sequence[Sequence[int]]) -> LaurentPoly:
    """Monomial change of coordinates: q with q(z) = p(w) at w_j = prod_i z_i^{M_ji}.

    ``matrix`` has one row per variable of p (m rows) and one column per
    variable of the result (n columns).  Exponents map exactly as a -> M^T a;
    merged coefficients smaller than MERGE_DROP_REL times the largest are
    discarded as roundoff ghosts.
    """
    rows = [list(r) for r in matrix]
    if len(rows) != p.arity:
        raise LaurentError(
            f"substitution matrix has {len(rows)} rows, expected {p.arity}"
        )
    width = len(rows[0]) if rows else 0
    if width < 1 or any(len(r) != width for r in rows):
        raise LaurentError("substitution matrix rows have inconsistent length")
    for r in rows:
        for v in r:
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise LaurentError("substitution matrix entries must be integers")

    merged: dict[ExponentVector, complex] = {}
    for exp, coeff in p.terms:
        new_exp = tuple(
            sum(int(rows[j][i]) * exp[j] for j in range(p.arity)) for i in range(width)
        )
        merged[new_exp] = merged.get(new_exp, 0.0 + 0.0j) + coeff
    if merged:
        top = max(abs(c) for c in merged.values())
        cutoff = MERGE_DROP_REL * top
        merged = {e: c for e, c in merged.items() if abs(c) > cutoff}
    return LaurentPoly(arity=width, terms=tuple((e, merged[e]) for e in sorted(merged)))


def shift_to_polynomial(p: LaurentPoly) -> tuple[LaurentPoly, ExponentVector]:
    """Divide out the componentwise-minimal monomial.

    Returns (q, shift) with q = z^{-shift} * p, so q has nonnegative exponents
    with minimum 0 in every variable.  The shared monomial factor is unimodular
    on the torus, so the zero set of q there equals that of p.
    """
    if p.is_zero():
        raise LaurentError("cannot shift the zero polynomial")
    shift = tuple(
        min(e[i] for e, _ in p.terms) for i in range(p.arity)
    )
    terms = tuple(
        (tuple(e[i] - shift[i] for i in range(p.arity)), c) for e, c in p.terms
    )
    return LaurentPoly(arity=p.arity, terms=tuple(sorted(terms))), shift
