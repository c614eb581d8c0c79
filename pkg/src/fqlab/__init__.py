"""fqlab: a verification lab for quasicrystal point sets cut from torus curves.

The library builds one-dimensional almost-periodic point sets as line sections
of the zero curves of stable Laurent polynomials, computes the directional
measure's Fourier table, and cross-checks every quantity along independent
routes: argument-principle root counts, Monte Carlo slab volumes, lattice
enumeration, exact integer algebra, and closed-form Gaussian test functions.
"""

from .cone import Direction, ProperCone, enumerate_truncated, lint_q_independence
from .crystal import (
    ExponentialPolynomial,
    RootList,
    argument_principle_count,
    find_real_roots,
    real_rootedness_audit,
    recover_coefficient,
    restrict_to_line,
)
from .harness import (
    GaussianTest,
    change_of_variables_check,
    gaussian_tail_bound,
    gaussian_tail_integral_check,
    lighthouse_check,
    orbit_closure_check,
    verify_summation,
)
from .intmat import (
    IntMatrix,
    PullbackCertificate,
    SmithDecomposition,
    adjugate,
    determinant,
    pullback_certificate,
    smith_normal_form,
)
from .laurent import LaurentPoly, monomial_substitute, shift_to_polynomial
from .lycheck import LYReport, essentially_ly_verify, ly_falsify, regularity_check
from .surface import (
    CurveBranches,
    SpectrumTable,
    compute_spectrum,
    cone_support_scan,
    fourier_coefficient,
    normal_at,
    normal_cone_check,
    slab_volume_oracle,
    slice_solve,
    trace_curve,
)

__version__ = "0.1.0"

__all__ = [
    "Direction",
    "ProperCone",
    "enumerate_truncated",
    "lint_q_independence",
    "ExponentialPolynomial",
    "RootList",
    "argument_principle_count",
    "find_real_roots",
    "real_rootedness_audit",
    "recover_coefficient",
    "restrict_to_line",
    "GaussianTest",
    "change_of_variables_check",
    "gaussian_tail_bound",
    "gaussian_tail_integral_check",
    "lighthouse_check",
    "orbit_closure_check",
    "verify_summation",
    "IntMatrix",
    "PullbackCertificate",
    "SmithDecomposition",
    "adjugate",
    "determinant",
    "pullback_certificate",
    "smith_normal_form",
    "LaurentPoly",
    "monomial_substitute",
    "shift_to_polynomial",
    "LYReport",
    "essentially_ly_verify",
    "ly_falsify",
    "regularity_check",
    "CurveBranches",
    "SpectrumTable",
    "compute_spectrum",
    "cone_support_scan",
    "fourier_coefficient",
    "normal_at",
    "normal_cone_check",
    "slab_volume_oracle",
    "slice_solve",
    "trace_curve",
    "__version__",
]
