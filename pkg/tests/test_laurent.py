import json

import numpy as np
import pytest

from fqlab import LaurentPoly, monomial_substitute, shift_to_polynomial
from fqlab.laurent import LaurentError


def _random_poly(rng, arity=2, n_terms=4, exp_range=3):
    terms = {}
    while len(terms) < n_terms:
        exp = tuple(int(v) for v in rng.integers(-exp_range, exp_range + 1, arity))
        terms[exp] = complex(rng.normal(), rng.normal())
    return LaurentPoly.from_terms(arity, terms)


def test_eval_hand_values(p1, p2):
    assert p1.eval([1, 1]) == 0
    assert p2.eval([1, 1]) == pytest.approx(3.0)
    assert p1.eval([2, 0.5]) == pytest.approx(0.0, abs=1e-15)


def test_eval_rejects_zero_component(p1):
    with pytest.raises(LaurentError):
        p1.eval([0.0, 1.0])
    with pytest.raises(LaurentError):
        p1.gradient([1.0, 0.0])


def test_eval_exp_hand_values(p1, p2):
    assert abs(p1.eval_exp([0.25, 0.75])) < 1e-14
    assert abs(p2.eval_exp([0.5, 0.0])) < 1e-14


def test_eval_exp_periodicity_random():
    rng = np.random.default_rng(7)
    for _ in range(25):
        p = _random_poly(rng)
        x = rng.uniform(-2, 2, 2)
        shift = rng.integers(-3, 4, 2)
        a = p.eval_exp(x)
        b = p.eval_exp(x + shift)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_eval_exp_many_matches_scalar(p2):
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 1, (17, 2))
    vec = p2.eval_exp_many(pts)
    for row, v in zip(pts, vec):
        assert abs(v - p2.eval_exp(row)) < 1e-13


def test_gradient_hand_values(p1, p2):
    g = p1.gradient([3 + 1j, 2 - 5j])
    assert g[0] == pytest.approx(2 - 5j)
    assert g[1] == pytest.approx(3 + 1j)
    g2 = p2.gradient([-1, 1])
    assert g2[0] == pytest.approx(1.5)
    assert g2[1] == pytest.approx(-0.5)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(11)
    h = 1e-5
    for _ in range(20):
        p = _random_poly(rng, n_terms=5)
        z = rng.uniform(0.5, 1.5, 2) * np.exp(2j * np.pi * rng.uniform(0, 1, 2))
        grad = p.gradient(z)
        for i in range(2):
            zp, zm = z.copy(), z.copy()
            zp[i] += h
            zm[i] -= h
            fd = (p.eval(zp) - p.eval(zm)) / (2 * h)
            assert abs(fd - grad[i]) <= 1e-6 * max(1.0, abs(grad[i]))


def test_substitute_identity(p2):
    q = monomial_substitute(p2, [[1, 0], [0, 1]])
    assert q == p2


def test_substitute_hand_example(p1):
    q = monomial_substitute(p1, [[1, 1], [0, 1]])
    assert q.coefficients() == {(1, 2): 1 + 0j, (0, 0): -1 + 0j}


def test_substitute_shear_recovers_quadric(shear_p, p2, shear_a):
    q = monomial_substitute(shear_p, shear_a.data)
    assert q.support() == p2.support()
    for e, c in q.terms:
        assert c == pytest.approx(p2.coefficients()[e])


def test_substitute_composition_law():
    rng = np.random.default_rng(23)
    for _ in range(20):
        p = _random_poly(rng, n_terms=3, exp_range=2)
        a = [[int(v) for v in row] for row in rng.integers(-2, 3, (2, 2))]
        b = [[int(v) for v in row] for row in rng.integers(-2, 3, (2, 2))]
        ab = [
            [sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)]
            for i in range(2)
        ]
        lhs = monomial_substitute(monomial_substitute(p, a), b)
        rhs = monomial_substitute(p, ab)
        assert lhs.support() == rhs.support()
        for e, c in lhs.terms:
            assert abs(c - rhs.coefficients()[e]) <= 1e-12 * max(1.0, abs(c))


def test_substitute_dimension_mismatch(p1):
    with pytest.raises(LaurentError):
        monomial_substitute(p1, [[1, 0]])


def test_shift_laurent_monomial():
    p = LaurentPoly.from_terms(1, {(-1,): 1.0, (0,): 1.0})
    q, shift = shift_to_polynomial(p)
    assert shift == (-1,)
    assert q.coefficients() == {(0,): 1 + 0j, (1,): 1 + 0j}


def test_shift_polynomial_unchanged(p2):
    q, shift = shift_to_polynomial(p2)
    assert shift == (0, 0)
    assert q == p2


def test_shift_hand_example(shear_p):
    q, shift = shift_to_polynomial(shear_p)
    assert shift == (0, -1)
    assert q.coefficients() == {
        (1, 1): 1 + 0j,
        (1, 0): 0.5 + 0j,
        (0, 2): 0.5 + 0j,
        (0, 1): 1 + 0j,
    }


def test_shift_preserves_torus_values():
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = _random_poly(rng, n_terms=4)
        q, _ = shift_to_polynomial(p)
        for _ in range(5):
            x = rng.uniform(0, 1, 2)
            assert abs(abs(p.eval_exp(x)) - abs(q.eval_exp(x))) <= 1e-12 * p.scale


def test_shift_zero_polynomial_rejected():
    z = LaurentPoly.from_terms(2, {})
    with pytest.raises(LaurentError):
        shift_to_polynomial(z)


def test_json_round_trip(shear_p):
    text = shear_p.to_json()
    back = LaurentPoly.from_json(text)
    assert back == shear_p


def test_json_rejects_duplicates_and_zeros():
    with pytest.raises(LaurentError):
        LaurentPoly.from_json_dict(
            {
                "arity": 1,
                "terms": [
                    {"exp": [0], "re": 1.0, "im": 0.0},
                    {"exp": [0], "re": 2.0, "im": 0.0},
                ],
            }
        )
    with pytest.raises(LaurentError):
        LaurentPoly.from_json_dict(
            {"arity": 1, "terms": [{"exp": [0], "re": 0.0, "im": 0.0}]}
        )
    with pytest.raises(LaurentError):
        LaurentPoly.from_json_dict(
            {"arity": 2, "terms": [{"exp": [0], "re": 1.0, "im": 0.0}]}
        )
    with pytest.raises(LaurentError):
        LaurentPoly.from_json_dict({"arity": 2})


def test_terms_are_canonically_sorted():
    p = LaurentPoly.from_terms(2, {(1, 0): 1.0, (-1, 2): 2.0, (0, 0): 3.0})
    assert [e for e, _ in p.terms] == sorted(e for e, _ in p.terms)
    assert json.loads(p.to_json())["terms"][0]["exp"] == [-1, 2]


def test_merging_drops_cancelled_terms():
    p = LaurentPoly.from_terms(2, [((0, 0), 1.0), ((0, 0), -1.0), ((1, 1), 2.0)])
    assert p.coefficients() == {(1, 1): 2 + 0j}
