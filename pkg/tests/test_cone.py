import itertools
import math

import numpy as np
import pytest

from fqlab import Direction, IntMatrix, ProperCone, enumerate_truncated, lint_q_independence
from fqlab.cone import ConeError

SQRT2 = math.sqrt(2.0)


def box_scan_oracle(cone, ell, radius):
    """Independent enumeration: generous float-inverse box, exact integer filters."""
    v = np.asarray(ell, dtype=float)
    base = np.asarray(cone.base.data, dtype=float)
    w = np.linalg.inv(base) @ v
    bound = int(np.ceil(2 * np.max(np.abs(np.linalg.inv(base).T)) * radius / np.min(w))) + 2
    kept = []
    for k in itertools.product(range(-bound, bound + 1), repeat=cone.dim):
        if not (cone.contains(k) or cone.contains(tuple(-x for x in k))):
            continue
        if abs(float(np.dot(k, v))) <= radius:
            kept.append(k)
    # the outer shell must be empty, otherwise the box was too small
    assert all(max(abs(x) for x in k) < bound for k in kept)
    kept.sort(key=lambda k: (float(np.dot(k, v)),) + k)
    return kept


def test_contains_hand_values():
    orthant = ProperCone.first_orthant(2)
    assert not orthant.contains((3, -1))
    assert orthant.contains((2, 0))  # boundary included, the cone is closed
    shear = ProperCone(IntMatrix.from_rows([[1, 1], [0, 1]]))
    assert shear.contains((1, 0))


def test_dual_interior_hand_values():
    orthant = ProperCone.first_orthant(2)
    assert orthant.dual_interior_contains((1.0, SQRT2))
    assert not orthant.dual_interior_contains((1.0, -0.1))
    shear = ProperCone(IntMatrix.from_rows([[1, 1], [0, 1]]))
    # solve of (sqrt2, sqrt2-1) against the shear base is (1, sqrt2-1) > 0
    assert shear.dual_solve((SQRT2, SQRT2 - 1.0)) == pytest.approx([1.0, SQRT2 - 1.0])
    assert shear.dual_interior_contains((SQRT2, SQRT2 - 1.0))
    # (1, sqrt2) has solve (1 - sqrt2, sqrt2), outside the dual interior
    assert not shear.dual_interior_contains((1.0, SQRT2))


def test_dual_interior_base_times_ones():
    rng = np.random.default_rng(3)
    found = 0
    while found < 20:
        rows = [[int(v) for v in rng.integers(-3, 4, 2)] for _ in range(2)]
        try:
            cone = ProperCone(IntMatrix.from_rows(rows))
        except ConeError:
            continue
        ones = cone.base.apply((1, 1))
        assert cone.dual_interior_contains(tuple(float(v) for v in ones))
        found += 1


def test_singular_base_rejected():
    with pytest.raises(ConeError):
        ProperCone(IntMatrix.from_rows([[1, 2], [2, 4]]))


def test_enumerate_radius_zero():
    pts = enumerate_truncated(ProperCone.first_orthant(2), (1.0, SQRT2), 0.0)
    assert pts == [(0, 0)]


def test_enumerate_27_points():
    orthant = ProperCone.first_orthant(2)
    pts = enumerate_truncated(orthant, (1.0, SQRT2), 5.0)
    assert len(pts) == 27
    assert sum(1 for k in pts if orthant.contains(k)) == 14
    assert (0, 0) in pts


def test_enumerate_requires_dual_interior():
    with pytest.raises(ConeError):
        enumerate_truncated(ProperCone.first_orthant(2), (1.0, -1.0), 3.0)


def test_enumerate_symmetry_and_order():
    pts = enumerate_truncated(ProperCone.first_orthant(2), (1.0, SQRT2), 7.0)
    as_set = set(pts)
    for k in pts:
        assert (-k[0], -k[1]) in as_set
    dots = [k[0] + SQRT2 * k[1] for k in pts]
    assert dots == sorted(dots)


def test_enumerate_matches_box_scan_oracle():
    rng = np.random.default_rng(20)
    done = 0
    while done < 20:
        rows = [[int(v) for v in rng.integers(-3, 4, 2)] for _ in range(2)]
        try:
            cone = ProperCone(IntMatrix.from_rows(rows))
        except ConeError:
            continue
        u = rng.uniform(0.2, 1.5, 2)
        ell = tuple(float(x) for x in np.asarray(cone.base.data) @ u)
        radius = float(rng.uniform(1.0, 6.0))
        got = enumerate_truncated(cone, ell, radius)
        assert got == box_scan_oracle(cone, ell, radius)
        done += 1


def test_enumerate_growth_rate():
    counts = {
        r: len(enumerate_truncated(ProperCone.first_orthant(2), (1.0, SQRT2), r))
        for r in (10, 20, 40, 80)
    }
    assert counts[20] / counts[10] <= 5.0
    assert counts[40] / counts[20] <= 4.6
    assert counts[80] / counts[40] <= 4.3


def test_direction_validation_and_lint():
    with pytest.raises(ConeError):
        Direction(entries=(0.0, 0.0))
    assert lint_q_independence((1.0, SQRT2)) == []
    with pytest.warns(UserWarning):
        rels = lint_q_independence((1.0, 0.5))
    assert (1, -2) in rels or (-1, 2) in rels


def test_direction_json_round_trip():
    d = Direction(entries=(1.0, SQRT2))
    assert Direction.from_json_dict(d.to_json_dict()) == d
