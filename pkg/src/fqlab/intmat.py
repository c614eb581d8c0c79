"""Exact integer matrix algebra.

Everything here is computed in Python's arbitrary-precision integers; no
floating point enters this module.  Determinants use Bareiss fraction-free
elimination, and the diagonalization A = S * D * T keeps S, T unimodular with
the divisibility chain d_1 | d_2 | ... on the nonnegative diagonal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Desk-scale guard rails for user-supplied matrices.
MAX_DIM = 16
MAX_INPUT_ENTRY = 10**6


class IntMatrixError(ValueError):
    """Malformed matrix input or an operation outside its domain."""


def _check_int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
        raise IntMatrixError(f"matrix entries must be integers, got {v!r}")
    return int(v)


@dataclass(frozen=True)
class IntMatrix:
    data: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_rows(rows: Iterable[Iterable[int]]) -> "IntMatrix":
        rr = tuple(tuple(_check_int(v) for v in row) for row in rows)
        if not rr or not rr[0]:
            raise IntMatrixError("matrix must have at least one row and column")
        width = len(rr[0])
        if any(len(r) != width for r in rr):
            raise IntMatrixError("matrix rows have inconsistent length")
        return IntMatrix(data=rr)

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return len(self.data[0])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.data)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise IntMatrixError("matrix product dimension mismatch")
        ot = list(zip(*other.data))
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
                for row in self.data
            )
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(tuple(-v for v in row) for row in self.data))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise IntMatrixError("vector length does not match matrix columns")
        return tuple(sum(a * int(b) for a, b in zip(row, vec)) for row in self.data)

    # -- JSON interchange ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "data": [list(r) for r in self.data]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json_dict(obj: dict) -> "IntMatrix":
        if not isinstance(obj, dict):
            raise IntMatrixError("matrix JSON must be an object")
        for field in ("rows", "cols", "data"):
            if field not in obj:
                raise IntMatrixError(f"matrix JSON missing field '{field}'")
        m = IntMatrix.from_rows(obj["data"])
        if m.rows != obj["rows"] or m.cols != obj["cols"]:
            raise IntMatrixError("fields rows/cols disagree with the data shape")
        if m.rows > MAX_DIM or m.cols > MAX_DIM:
            raise IntMatrixError(f"matrix dimension exceeds the supported {MAX_DIM}")
        if any(abs(v) > MAX_INPUT_ENTRY for row in m.data for v in row):
            raise IntMatrixError(f"matrix entries exceed the supported |a_ij| <= {MAX_INPUT_ENTRY}")
        return m

    @staticmethod
    def from_json(text: str) -> "IntMatrix":
        return IntMatrix.from_json_dict(json.loads(text))


def _require_desk_scale(a: IntMatrix) -> None:
    if a.rows > MAX_DIM or a.cols > MAX_DIM:
        raise IntMatrixError(f"matrix dimension exceeds the supported {MAX_DIM}")


def determinant(a: IntMatrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    if not a.is_square:
        raise IntMatrixError("determinant requires a square matrix")
    _require_desk_scale(a)
    n = a.rows
    m = [list(row) for row in a.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot_row = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot_row is None:
                return 0
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _minor(a: IntMatrix, drop_row: int, drop_col: int) -> IntMatrix:
    return IntMatrix(
        tuple(
            tuple(v for j, v in enumerate(row) if j != drop_col)
            for i, row in enumerate(a.data)
            if i != drop_row
        )
    )


def adjugate(a: IntMatrix) -> IntMatrix:
    """Integral adjugate with a * adj(a) = det(a) * I exactly."""
    if not a.is_square:
        raise IntMatrixError("adjugate requires a square matrix")
    _require_desk_scale(a)
    n = a.rows
    if n == 1:
        return IntMatrix(((1,),))
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            # adj = transpose of the cofactor matrix
            out[j][i] = (-1) ** (i + j) * determinant(_minor(a, i, j))
    return IntMatrix(tuple(tuple(r) for r in out))


@dataclass(frozen=True)
class SmithDecomposition:
    """Factorization a = s * d * t with unimodular s, t; d diagonal m x n."""

    s: IntMatrix
    d: IntMatrix
    t: IntMatrix

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.d.data[i][i] for i in range(min(self.d.rows, self.d.cols)))

    def verify(self, a: IntMatrix) -> None:
        if (self.s @ self.d @ self.t).data != a.data:
            raise IntMatrixError("decomposition identity s*d*t = a fails")
        if abs(determinant(self.s)) != 1 or abs(determinant(self.t)) != 1:
            raise IntMatrixError("transform matrices are not unimodular")
        diag = self.diagonal()
        if any(v < 0 for v in diag):
            raise IntMatrixError("diagonal has negative entries")
        for i, j in zip(diag, diag[1:]):
            if i == 0 and j != 0:
                raise IntMatrixError("zero diagonal entry precedes a nonzero one")
            if i != 0 and j % i != 0:
                raise IntMatrixError("divisibility chain fails")
        for r in range(self.d.rows):
            for c in range(self.d.cols):
                if r != c and self.d.data[r][c] != 0:
                    raise IntMatrixError("d is not diagonal")


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Diagonalize a over the integers: a = s * d * t.

    Pivot selection takes the smallest nonzero absolute value, ties broken in
    row-major order, which makes the reduction deterministic.
    """
    _require_desk_scale(a)
    nrow, ncol = a.rows, a.cols
    m = [list(row) for row in a.data]
    s = [[1 if i == j else 0 for j in range(nrow)] for i in range(nrow)]
    t = [[1 if i == j else 0 for j in range(ncol)] for i in range(ncol)]

    # Row op m_i += c * m_j  <=>  s column j -= c * s column i.
    def row_add(i: int, j: int, c: int) -> None:
        m[i] = [x + c * y for x, y in zip(m[i], m[j])]
        for r in range(nrow):
            s[r][j] -= c * s[r][i]

    def row_swap(i: int, j: int) -> None:
        m[i], m[j] = m[j], m[i]
        for r in range(nrow):
            s[r][i], s[r][j] = s[r][j], s[r][i]

    def row_negate(i: int) -> None:
        m[i] = [-x for x in m[i]]
        for r in range(nrow):
            s[r][i] = -s[r][i]

    # Column op m[:,j] += c * m[:,i]  <=>  t row i -= c * t row j.
    def col_add(i: int, j: int, c: int) -> None:
        for r in range(nrow):
            m[r][j] += c * m[r][i]
        t[i] = [x - c * y for x, y in zip(t[i], t[j])]

    def col_swap(i: int, j: int) -> None:
        for r in range(nrow):
            m[r][i], m[r][j] = m[r][j], m[r][i]
        t[i], t[j] = t[j], t[i]

    def pick_pivot(start: int) -> tuple[int, int] | None:
        best = None
        for i in range(start, nrow):
            for j in range(start, ncol):
                v = abs(m[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        return None if best is None else (best[1], best[2])

    for step in range(min(nrow, ncol)):
        while True:
            piv = pick_pivot(step)
            if piv is None:
                break
            pi, pj = piv
            if pi != step:
                row_swap(step, pi)
            if pj != step:
                col_swap(step, pj)
            if m[step][step] < 0:
                row_negate(step)
            pivot = m[step][step]
            dirty = False
            for i in range(step + 1, nrow):
                q = m[i][step] // pivot
                if q:
                    row_add(i, step, -q)
                if m[i][step]:
                    dirty = True  # remainder smaller than pivot; re-pick
            for j in range(step + 1, ncol):
                q = m[step][j] // pivot
                if q:
                    col_add(step, j, -q)
                if m[step][j]:
                    dirty = True
            if dirty:
                continue
            offender = next(
                (
                    (i, j)
                    for i in range(step + 1, nrow)
                    for j in range(step + 1, ncol)
                    if m[i][j] % pivot
                ),
                None,
            )
            if offender is None:
                break
            row_add(step, offender[0], 1)  # pull the bad row in, redo the step
        if pick_pivot(step) is None:
            break

    decomp = SmithDecomposition(
        s=IntMatrix(tuple(tuple(r) for r in s)),
        d=IntMatrix(tuple(tuple(r) for r in m)),
        t=IntMatrix(tuple(tuple(r) for r in t)),
    )
    decomp.verify(a)
    return decomp


def rank(a: IntMatrix) -> int:
    """Exact rank via the diagonal of the integer diagonalization."""
    return sum(1 for v in smith_normal_form(a).diagonal() if v != 0)


@dataclass(frozen=True)
class PullbackCertificate:
    """Full-rank integral b with a * b = (d * I_m | 0) exactly, d > 0."""

    b: IntMatrix
    d: int

    def verify(self, a: IntMatrix) -> None:
        prod = a @ self.b
        m, n = a.rows, a.cols
        expected = tuple(
            tuple(self.d if (i == j and j < m) else 0 for j in range(n))
            for i in range(m)
        )
        if prod.data != expected:
            raise IntMatrixError("certificate identity a*b = (d*I | 0) fails")
        if self.d == 0 or determinant(self.b) == 0:
            raise IntMatrixError("certificate is degenerate")


def pullback_certificate(a: IntMatrix) -> PullbackCertificate:
    """Right factor clearing a wide full-rank matrix to (d*I | 0).

    Writing a = s * d * t, the unimodular t is inverted exactly and the square
    part is cleared with its adjugate, leaving a * b = (det * I | 0).
    """
    m, n = a.rows, a.cols
    if m > n:
        raise IntMatrixError("expected a wide matrix (rows <= cols)")
    snf = smith_normal_form(a)
    diag = snf.diagonal()
    if sum(1 for v in diag if v != 0) != m:
        raise IntMatrixError("matrix is rank-deficient")
    # t is unimodular, so its inverse is adj(t) * det(t) with det(t) = +-1.
    t_inv = adjugate(snf.t)
    det_t = determinant(snf.t)
    if det_t == -1:
        t_inv = -t_inv
    square = snf.s @ IntMatrix(
        tuple(tuple(diag[i] if i == j else 0 for j in range(m)) for i in range(m))
    )
    adj_square = adjugate(square)
    block = tuple(
        tuple(
            (adj_square.data[i][j] if i < m and j < m else (1 if i == j else 0))
            for j in range(n)
        )
        for i in range(n)
    )
    b = t_inv @ IntMatrix(block)
    d = determinant(square)
    if d < 0:
        d, b = -d, -b
    cert = PullbackCertificate(b=b, d=d)
    cert.verify(a)
    return cert
