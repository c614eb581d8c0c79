"""Command-line interface.

JSON in, CSV/JSON out, optional figures next to the delimited output.  Every
report embeds a hash of the invocation so reruns are diffable; identical
configuration and seed produce byte-identical files.  Exit codes: 0 pass,
1 violation or failed check, 2 malformed input or inadequate parameters.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .cone import Direction, ProperCone, enumerate_truncated, lint_q_independence
from .crystal import find_real_roots, real_rootedness_audit, restrict_to_line
from .harness import (
    GaussianTest,
    TruncationError,
    change_of_variables_check,
    gaussian_tail_bound,
    gaussian_tail_integral_check,
    lighthouse_check,
    orbit_closure_check,
    verify_summation,
)
from .intmat import IntMatrix, pullback_certificate, smith_normal_form
from .laurent import LaurentPoly
from .lycheck import essentially_ly_verify, ly_falsify, regularity_check
from .surface import compute_spectrum, cone_support_scan, trace_curve

BUILTIN_PREFIX = "builtin:"


def _fmt(x: float) -> str:
    """17 significant digits; enough to round-trip a double."""
    return format(float(x), ".17g")


def _load_json_file(path: str) -> object:
    if path.startswith(BUILTIN_PREFIX):
        name = path[len(BUILTIN_PREFIX):]
        ref = resources.files("fqlab.data").joinpath(f"{name}.json")
        if not ref.is_file():
            raise ValueError(f"unknown builtin input '{name}'")
        text = ref.read_text()
    else:
        text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _load_poly(path: str) -> LaurentPoly:
    return LaurentPoly.from_json_dict(_load_json_file(path))


def _load_matrix(path: str) -> IntMatrix:
    return IntMatrix.from_json_dict(_load_json_file(path))


def _parse_ell(text: str) -> Direction:
    try:
        entries = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ValueError(f"--ell must be comma-separated floats, got {text!r}") from exc
    d = Direction(entries=entries)
    lint_q_independence(d)
    return d


def _parse_window(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"--window must be 'lo,hi', got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if not hi > lo:
        raise ValueError("--window must have positive length")
    return lo, hi


def _config_hash(args: argparse.Namespace) -> str:
    # Destinations do not influence report content, so they stay out of the hash.
    skip = {"func", "out", "out_dir", "figure"}
    payload = {
        k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None
    }
    blob = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _emit_json(report: dict, args: argparse.Namespace) -> None:
    report = dict(report)
    report["config_hash"] = _config_hash(args)
    print(json.dumps(report, sort_keys=True))


def _write_csv(path: str | None, header: list[str], rows: list[list], args) -> None:
    lines = [f"# config={_config_hash(args)}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _check_resolution(value: int) -> int:
    v = int(value)
    if v < 64 or v & (v - 1):
        raise ValueError("--resolution must be a power of two, at least 64")
    return v


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_check_ly(args) -> int:
    p = _load_poly(args.poly)
    if args.witness:
        report = essentially_ly_verify(
            p, _load_matrix(args.witness), fibers=args.fibers, seed=args.seed
        )
    else:
        report = ly_falsify(p, fibers=args.fibers, seed=args.seed)
    out = {
        "fibers_tested": report.fibers_tested,
        "min_margin": report.min_margin,
        "degenerate_fibers": report.degenerate_fibers,
        "passed": report.passed,
        "tolerances": {"boundary": 1e-9, "witness_residual_rel": 1e-8},
    }
    if report.violation is not None:
        v = report.violation
        out["violation"] = {
            "regime": v.regime,
            "fiber_index": v.fiber_index,
            "root": {"re": v.root.real, "im": v.root.imag},
            "point": [{"re": z.real, "im": z.imag} for z in v.point],
            "residual": v.residual,
        }
    _emit_json(out, args)
    return 0 if report.passed else 1


def _cmd_regularity(args) -> int:
    report = regularity_check(_load_poly(args.poly), resolution=args.resolution)
    _emit_json(
        {
            "min_gradient_norm": report.min_gradient_norm,
            "samples": report.samples,
            "empty": report.empty,
            "passed": report.passed,
            "tolerances": {"gradient_rel": 1e-6},
        },
        args,
    )
    return 0 if report.passed else 1


def _cmd_snf(args) -> int:
    a = _load_matrix(args.matrix)
    dec = smith_normal_form(a)
    dec.verify(a)  # refuse to emit an unverified factorization
    _emit_json(
        {
            "s": dec.s.to_json_dict(),
            "d": dec.d.to_json_dict(),
            "t": dec.t.to_json_dict(),
            "diagonal": list(dec.diagonal()),
            "verified": True,
        },
        args,
    )
    return 0


def _cmd_pullback(args) -> int:
    a = _load_matrix(args.matrix)
    cert = pullback_certificate(a)
    cert.verify(a)
    _emit_json(
        {"b": cert.b.to_json_dict(), "d": cert.d, "verified": True},
        args,
    )
    return 0


def _cmd_cone_enum(args) -> int:
    cone = ProperCone(_load_matrix(args.matrix))
    ell = _parse_ell(args.ell)
    pts = enumerate_truncated(cone, ell, args.radius)
    v = np.asarray(ell.entries)
    header = [f"k_{i + 1}" for i in range(cone.dim)] + ["dot_l"]
    rows = [list(k) + [float(np.dot(k, v))] for k in pts]
    _write_csv(args.out, header, rows, args)
    return 0


def _cmd_roots(args) -> int:
    p = _load_poly(args.poly)
    ell = _parse_ell(args.ell)
    f = restrict_to_line(p, ell)
    lo, hi = _parse_window(args.window)
    roots = find_real_roots(f, (lo, hi), tol=args.tol)
    rows = [[float(t), int(m)] for t, m in zip(roots.roots, roots.multiplicities)]
    _write_csv(args.out, ["t", "multiplicity"], rows, args)
    return 0


def _cmd_audit(args) -> int:
    p = _load_poly(args.poly)
    ell = _parse_ell(args.ell)
    f = restrict_to_line(p, ell)
    lo, hi = _parse_window(args.window)
    report = real_rootedness_audit(f, (lo, hi), half_height=args.height, tol=args.tol)
    _emit_json(
        {
            "real_count": report.real_count,
            "complex_count": report.complex_count,
            "passed": report.passed,
            "tolerances": {"root": args.tol},
        },
        args,
    )
    return 0 if report.passed else 1


def _cmd_trace(args) -> int:
    p = _load_poly(args.poly)
    curve = trace_curve(p, args.resolution)
    axis = curve.sweep_axis
    rows = []
    for i in range(curve.n_strands):
        for j in range(curve.resolution):
            solved = curve.strands[i, j] % 1.0
            swept = curve.sweep[j]
            x1, x2 = (solved, swept) if axis == 1 else (swept, solved)
            rows.append([float(x1), float(x2), i, float(curve.slopes[i, j])])
    _write_csv(args.out, ["x1", "x2", "branch", "slope"], rows, args)
    if args.figure:
        from . import plots

        plots.render_curve(curve, args.figure)
    return 0


def _cmd_fourier(args) -> int:
    p = _load_poly(args.poly)
    ell = _parse_ell(args.ell)
    r = args.k_radius
    ks = [(i, j) for i in range(-r, r + 1) for j in range(-r, r + 1)]
    table = compute_spectrum(p, ell, ks, resolution=args.resolution)
    rows = []
    for k in ks:
        val = table.coefficient(k)
        rows.append([k[0], k[1], float(val.real), float(val.imag), table.frequency(k)])
    _write_csv(args.out, ["k1", "k2", "re", "im", "freq"], rows, args)
    return 0


def _cmd_scan_cone(args) -> int:
    p = _load_poly(args.poly)
    report = cone_support_scan(
        p,
        _parse_ell(args.ell),
        ProperCone(_load_matrix(args.cone)),
        args.k_radius,
        resolution=args.resolution,
        rel_tol=args.tol,
    )
    _emit_json(
        {
            "max_outside": report.max_outside,
            "max_inside": report.max_inside,
            "m0": report.m0,
            "k_radius": report.k_radius,
            "passed": report.passed,
            "tolerances": {"support_rel": args.tol},
        },
        args,
    )
    return 0 if report.passed else 1


def _cmd_verify_summation(args) -> int:
    p = _load_poly(args.poly)
    ell = _parse_ell(args.ell)
    cone = ProperCone(_load_matrix(args.cone)) if args.cone else None
    test = GaussianTest(center=args.center, width=args.width)
    report = verify_summation(
        p, ell, test, args.t_max, args.r_max, cone=cone, resolution=args.resolution
    )
    threshold = args.tol * max(abs(report.lhs), 1.0)
    passed = report.residual <= threshold
    _emit_json(
        {
            "lhs": {"re": report.lhs.real, "im": report.lhs.imag},
            "rhs": {"re": report.rhs.real, "im": report.rhs.imag},
            "residual": report.residual,
            "tail_lhs": report.tail_lhs,
            "tail_rhs": report.tail_rhs,
            "n_roots": report.n_roots,
            "n_lattice": report.n_lattice,
            "passed": passed,
            "tolerances": {"residual_rel": args.tol, "tail": 1e-8},
        },
        args,
    )
    return 0 if passed else 1


def _cmd_verify_lighthouse(args) -> int:
    ok = lighthouse_check(
        _load_poly(args.poly),
        _parse_ell(args.ell),
        ProperCone(_load_matrix(args.cone)),
        args.k_radius,
        tol=args.tol,
        resolution=args.resolution,
    )
    _emit_json({"passed": ok, "tolerances": {"support_rel": args.tol}}, args)
    return 0 if ok else 1


def _cmd_verify_cov(args) -> int:
    q = _load_poly(args.poly)
    a = _load_matrix(args.matrix)
    p = _load_poly(args.pullback_poly) if args.pullback_poly else None
    report = change_of_variables_check(
        q,
        a,
        _parse_ell(args.ell_tilde),
        args.k_radius,
        p=p,
        resolution=args.resolution,
        rel_tol=args.tol,
    )
    _emit_json(
        {
            "kappa": report.kappa,
            "det_abs": report.det_abs,
            "max_deviation": report.max_deviation,
            "max_ratio_deviation": report.max_ratio_deviation,
            "n_supported": report.n_supported,
            "passed": report.passed,
            "tolerances": {"deviation_rel": args.tol},
        },
        args,
    )
    return 0 if report.passed else 1


def _cmd_verify_gauss(args) -> int:
    if args.mode == "tail":
        shift = tuple(float(v) for v in args.shift.split(",")) if args.shift else (0.0,) * args.dim
        report = gaussian_tail_bound(args.dim, args.big_n, args.radius, args.eps_exp, shift)
        _emit_json(
            {
                "n": report.n,
                "big_n": report.big_n,
                "radius": report.radius,
                "eps_exp": report.eps_exp,
                "shift": list(report.shift),
                "lhs_sum": report.lhs_sum,
                "rhs_bound": report.rhs_bound,
                "passed": report.passed,
            },
            args,
        )
        return 0 if report.passed else 1
    report = gaussian_tail_integral_check(args.dim, args.big_n, args.radius)
    _emit_json(
        {
            "n": report.n,
            "big_n": report.big_n,
            "radius": report.radius,
            "lhs": report.lhs,
            "rhs": report.rhs,
            "passed": report.passed,
        },
        args,
    )
    return 0 if report.passed else 1


def _cmd_verify_orbit(args) -> int:
    report = orbit_closure_check(
        _load_poly(args.poly),
        _parse_ell(args.ell),
        args.delta,
        args.t_max,
        resolution=args.resolution,
    )
    _emit_json(
        {
            "max_min_distance": report.max_min_distance,
            "n_curve_points": report.n_curve_points,
            "n_orbit_points": report.n_orbit_points,
            "passed": report.passed,
            "tolerances": {"delta": args.delta},
        },
        args,
    )
    return 0 if report.passed else 1


def _cmd_plot(args) -> int:
    from . import plots

    p = _load_poly(args.poly)
    ell = _parse_ell(args.ell)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    curve = trace_curve(p, args.resolution)
    axis = curve.sweep_axis
    rows = []
    for i in range(curve.n_strands):
        for j in range(curve.resolution):
            solved = curve.strands[i, j] % 1.0
            swept = curve.sweep[j]
            x1, x2 = (solved, swept) if axis == 1 else (swept, solved)
            rows.append([float(x1), float(x2), i, float(curve.slopes[i, j])])
    _write_csv(str(out / "curve.csv"), ["x1", "x2", "branch", "slope"], rows, args)
    plots.render_curve(curve, str(out / "curve.svg"))

    f = restrict_to_line(p, ell)
    lo, hi = _parse_window(args.window)
    roots = find_real_roots(f, (lo, hi), tol=args.tol)
    _write_csv(
        str(out / "roots.csv"),
        ["t", "multiplicity"],
        [[float(t), int(m)] for t, m in zip(roots.roots, roots.multiplicities)],
        args,
    )
    plots.render_roots(roots, str(out / "roots.png"))

    r = args.k_radius
    ks = [(i, j) for i in range(-r, r + 1) for j in range(-r, r + 1)]
    table = compute_spectrum(p, ell, ks, resolution=args.resolution)
    _write_csv(
        str(out / "spectrum.csv"),
        ["k1", "k2", "re", "im", "freq"],
        [
            [k[0], k[1], float(table.coefficient(k).real), float(table.coefficient(k).imag), table.frequency(k)]
            for k in ks
        ],
        args,
    )
    plots.render_spectrum(table, str(out / "spectrum.png"))
    print(f"wrote curve/roots/spectrum CSVs and figures to {out}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fqlab",
        description=(
            "Quasicrystal verification lab: stability tests, exact integer "
            "algebra, curve tracing, Fourier tables, and summation checks. "
            "Polynomial/matrix inputs are JSON files or builtin:<name> "
            "(p1, p2, shear_p, shear_a, non_ly, singular_sq, a23)."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(func=handler)
        return sp

    sp = add("check-ly", _cmd_check_ly, help="randomized polydisc stability test")
    sp.add_argument("poly")
    sp.add_argument("--fibers", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--witness", help="integer matrix JSON for the substituted test")

    sp = add("regularity", _cmd_regularity, help="minimal scaled gradient on the curve")
    sp.add_argument("poly")
    sp.add_argument("--resolution", type=_check_resolution, default=256)

    sp = add("snf", _cmd_snf, help="exact integer diagonalization a = s*d*t")
    sp.add_argument("matrix")

    sp = add("pullback", _cmd_pullback, help="certificate a*b = (d*I | 0)")
    sp.add_argument("matrix")

    sp = add("cone-enum", _cmd_cone_enum, help="lattice points of the truncated cone")
    sp.add_argument("matrix")
    sp.add_argument("--ell", required=True)
    sp.add_argument("--radius", type=float, default=5.0)
    sp.add_argument("--out")

    sp = add("roots", _cmd_roots, help="real roots of the line restriction")
    sp.add_argument("poly")
    sp.add_argument("--ell", required=True)
    sp.add_argument("--window", required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--out")

    sp = add("audit", _cmd_audit, help="real-root count vs contour winding count")
    sp.add_argument("poly")
    sp.add_argument("--ell", required=True)
    sp.add_argument("--window", required=True)
    sp.add_argument("--height", type=float, default=1.0)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = add("trace", _cmd_trace, help="trace the torus curve to CSV")
    sp.add_argument("poly")
    sp.add_argument("--resolution", type=_check_resolution, default=256)
    sp.add_argument("--out")
    sp.add_argument("--figure", help="also render the curve (svg/png by extension)")

    sp = add("fourier", _cmd_fourier, help="directional Fourier table to CSV")
    sp.add_argument("poly")
    sp.add_argument("--ell", required=True)
    sp.add_argument("--k-radius", type=int, default=8)
    sp.add_argument("--resolution", type=_check_resolution, default=256)
    sp.add_argument("--out")

    sp = add("scan-cone", _cmd_scan_cone, help="check Fourier support against a cone")
    sp.add_argument("poly")
    sp.add_argument("--ell", required=True)
    sp.add_argument("--cone", required=True)
    sp.add_argument("--k-radius", type=int, default=8)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--resolution", type=_check_resolution, default=256)

    sp = add("verify-summation", _cmd_verify_summation, help="two-sided summation identity")
    sp.add_argument("poly")
    sp.add_argument("--ell", required=True)
    sp.add_argument("--center", type=float, default=0.0)
    sp.add_argument("--width", type=float, default=1.0)
    sp.add_argument("--t-max", type=float, default=6.0)
    sp.add_argument("--r-max", type=float, default=10.0)
    sp.add_argument("--cone")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--resolution", type=_check_resolution, default=256)

    sp = add("verify-lighthouse", _cmd_verify_lighthouse, help="cone-support predicate")
    sp.add_argument("poly")
    sp.add_argument("--ell", required=True)
    sp.add_argument("--cone", required=True)
    sp.add_argument("--k-radius", type=int, default=8)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--resolution", type=_check_resolution, default=256)

    sp = add("verify-cov", _cmd_verify_cov, help="monomial change-of-variables ratio")
    sp.add_argument("poly", help="the stable polynomial q")
    sp.add_argument("--matrix", required=True, help="integer substitution matrix A")
    sp.add_argument("--ell-tilde", required=True)
    sp.add_argument("--k-radius", type=int, default=6)
    sp.add_argument("--pullback-poly", help="explicit p when A is not unimodular")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--resolution", type=_check_resolution, default=256)

    sp = add("verify-gauss", _cmd_verify_gauss, help="Gaussian concentration bounds")
    sp.add_argument("mode", choices=["tail", "integral"])
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--big-n", type=float, required=True)
    sp.add_argument("--radius", type=float, required=True)
    sp.add_argument("--eps-exp", type=float, default=0.1)
    sp.add_argument("--shift")

    sp = add("verify-orbit", _cmd_verify_orbit, help="orbit density inside the curve")
    sp.add_argument("poly")
    sp.add_argument("--ell", required=True)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--t-max", type=float, default=200.0)
    sp.add_argument("--resolution", type=_check_resolution, default=256)

    sp = add("plot", _cmd_plot, help="curve, roots, and spectrum report with figures")
    sp.add_argument("poly")
    sp.add_argument("--ell", required=True)
    sp.add_argument("--window", default="0,20")
    sp.add_argument("--k-radius", type=int, default=8)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--resolution", type=_check_resolution, default=256)
    sp.add_argument("--out-dir", required=True)

    return ap


def _validate_args(args: argparse.Namespace) -> None:
    # radius 0 stays legal: truncated enumeration at 0 and the R -> 0 anchor
    for name in ("tol", "width", "delta", "t_max", "r_max", "height"):
        value = getattr(args, name, None)
        if value is not None and value <= 0:
            raise ValueError(f"--{name.replace('_', '-')} must be positive")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage already; normalize other codes
        return int(exc.code) if exc.code else 0
    try:
        _validate_args(args)
        return args.func(args)
    except TruncationError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
