import numpy as np
import pytest

from fqlab import (
    IntMatrix,
    adjugate,
    determinant,
    monomial_substitute,
    pullback_certificate,
    smith_normal_form,
)
from fqlab.intmat import IntMatrixError


def _cofactor_det(rows):
    """Independent determinant oracle: first-row cofactor expansion."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * _cofactor_det(minor)
    return total


def _random_matrix(rng, m, n, lo=-9, hi=9):
    return IntMatrix.from_rows(
        [[int(v) for v in rng.integers(lo, hi + 1, n)] for _ in range(m)]
    )


def test_determinant_hand_values():
    assert determinant(IntMatrix.identity(3)) == 1
    assert determinant(IntMatrix.from_rows([[2, 1], [0, 3]])) == 6
    assert determinant(IntMatrix.from_rows([[0, 1], [1, 0]])) == -1


def test_determinant_matches_cofactor_oracle():
    rng = np.random.default_rng(2)
    for _ in range(40):
        a = _random_matrix(rng, 5, 5)
        assert determinant(a) == _cofactor_det([list(r) for r in a.data])


def test_determinant_requires_square():
    with pytest.raises(IntMatrixError):
        determinant(IntMatrix.from_rows([[1, 2]]))


def test_adjugate_two_by_two():
    a = IntMatrix.from_rows([[3, 7], [-2, 5]])
    assert adjugate(a).data == ((5, -7), (2, 3))
    assert adjugate(IntMatrix.identity(4)) == IntMatrix.identity(4)


def test_adjugate_identity_property():
    rng = np.random.default_rng(13)
    for _ in range(25):
        a = _random_matrix(rng, 4, 4)
        d = determinant(a)
        prod = a @ adjugate(a)
        expected = tuple(
            tuple(d if i == j else 0 for j in range(4)) for i in range(4)
        )
        assert prod.data == expected


def test_snf_hand_values():
    ident = smith_normal_form(IntMatrix.identity(3))
    assert ident.diagonal() == (1, 1, 1)
    assert smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 3]])).diagonal() == (1, 6)
    assert smith_normal_form(IntMatrix.from_rows([[2, 1], [0, 3]])).diagonal() == (1, 6)


def test_snf_random_suite():
    rng = np.random.default_rng(42)
    for _ in range(200):
        m = int(rng.integers(1, 6))
        n = int(rng.integers(1, 6))
        a = _random_matrix(rng, m, n)
        dec = smith_normal_form(a)
        dec.verify(a)  # exact identity, unimodularity, chain, nonnegativity
        assert (dec.s @ dec.d @ dec.t).data == a.data


def test_snf_determinant_preserved():
    rng = np.random.default_rng(17)
    for _ in range(30):
        a = _random_matrix(rng, 4, 4)
        dec = smith_normal_form(a)
        assert abs(determinant(dec.d)) == abs(determinant(a))


def test_pullback_row_vector():
    cert = pullback_certificate(IntMatrix.from_rows([[1, 2]]))
    assert cert.d == 1
    prod = IntMatrix.from_rows([[1, 2]]) @ cert.b
    assert prod.data == ((1, 0),)


def test_pullback_identity():
    cert = pullback_certificate(IntMatrix.identity(3))
    assert cert.d == 1
    assert cert.b == IntMatrix.identity(3)


def test_pullback_diagonal():
    a = IntMatrix.from_rows([[2, 0], [0, 3]])
    cert = pullback_certificate(a)
    assert cert.d == 6
    assert (a @ cert.b).data == ((6, 0), (0, 6))


def test_pullback_random_full_rank():
    rng = np.random.default_rng(5)
    done = 0
    while done < 50:
        m = int(rng.integers(1, 4))
        n = int(rng.integers(m, 5))
        a = _random_matrix(rng, m, n, -6, 6)
        dec = smith_normal_form(a)
        if sum(1 for v in dec.diagonal() if v) != m:
            continue
        cert = pullback_certificate(a)
        cert.verify(a)
        assert cert.d > 0
        assert determinant(cert.b) != 0
        done += 1


def test_pullback_rank_deficient_rejected():
    with pytest.raises(IntMatrixError):
        pullback_certificate(IntMatrix.from_rows([[1, 2], [2, 4]]))


def test_pullback_substitution_collapses_to_powers(p2):
    # q(z^A) then (..)(z^B) must equal q(z1^d, z2^d).
    a = IntMatrix.from_rows([[2, 0], [0, 3]])
    cert = pullback_certificate(a)
    inner = monomial_substitute(p2, a.data)
    outer = monomial_substitute(inner, cert.b.data)
    expected = {
        tuple(cert.d * v for v in e): c for e, c in p2.terms
    }
    assert outer.coefficients() == pytest.approx(expected)


def test_json_schema_validation():
    with pytest.raises(IntMatrixError):
        IntMatrix.from_json_dict({"rows": 2, "cols": 2, "data": [[1, 2]]})
    with pytest.raises(IntMatrixError):
        IntMatrix.from_json_dict({"rows": 1, "cols": 2, "data": [[1, 10**7]]})
    with pytest.raises(IntMatrixError):
        IntMatrix.from_json_dict({"rows": 1, "cols": 1})
    m = IntMatrix.from_json_dict({"rows": 2, "cols": 2, "data": [[2, 1], [0, 3]]})
    assert m.data == ((2, 1), (0, 3))


def test_non_integer_entries_rejected():
    with pytest.raises(IntMatrixError):
        IntMatrix.from_rows([[1.5, 2], [0, 1]])
    with pytest.raises(IntMatrixError):
        IntMatrix.from_rows([[True, 0], [0, 1]])
