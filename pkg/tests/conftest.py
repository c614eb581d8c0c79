import math

import pytest

from fqlab import IntMatrix, LaurentPoly

SQRT2 = math.sqrt(2.0)
DIAG_DENSITY = 1.0 + SQRT2  # zero density of the diagonal example along (1, sqrt2)


@pytest.fixture
def p1():
    """Diagonal line: z1*z2 - 1."""
    return LaurentPoly.from_terms(2, {(1, 1): 1.0, (0, 0): -1.0})


@pytest.fixture
def p2():
    """Stable quadric z1*z2 + (1/2)(z1 + z2) + 1."""
    return LaurentPoly.from_terms(2, {(1, 1): 1.0, (1, 0): 0.5, (0, 1): 0.5, (0, 0): 1.0})


@pytest.fixture
def shear_p():
    """Laurent pullback of the quadric under the unimodular shear."""
    return LaurentPoly.from_terms(2, {(1, 0): 1.0, (1, -1): 0.5, (0, 1): 0.5, (0, 0): 1.0})


@pytest.fixture
def non_ly():
    """2 - z1 - z2: vanishes in both polydisc regimes."""
    return LaurentPoly.from_terms(2, {(0, 0): 2.0, (1, 0): -1.0, (0, 1): -1.0})


@pytest.fixture
def singular_sq():
    """(z1*z2 - 1)^2: gradient vanishes on the whole zero set."""
    return LaurentPoly.from_terms(2, {(2, 2): 1.0, (1, 1): -2.0, (0, 0): 1.0})


@pytest.fixture
def shear_a():
    return IntMatrix.from_rows([[1, 1], [0, 1]])


@pytest.fixture
def ell():
    return (1.0, SQRT2)
