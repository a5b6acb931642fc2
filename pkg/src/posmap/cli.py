"""Command-line front end.

Every verb writes one JSON document to stdout. ``--verbose`` adds a
human-readable table on stderr. Exit status: 0 success, 1 domain error
(JSON error object on stdout), 2 usage or input-format error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

import numpy as np

from . import analysis, jsonio, maprep, stateclasses
from .errors import PosmapError
from .jsonio import SchemaError
from .matspace import ATOL, basis_by_name, check_density, purity

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_json(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _load_map(path: str) -> maprep.MapRep:
    return jsonio.map_from_json(_read_json(path))


def _load_matrix(path: str) -> np.ndarray:
    return jsonio.matrix_from_json(_read_json(path))


def _load_state(path: str, atol: float) -> np.ndarray:
    m = _load_matrix(path)
    if m.shape[0] != m.shape[1]:
        raise SchemaError("/", f"state must be square, got {m.shape[0]}x{m.shape[1]}")
    return check_density(m, atol)


def _fmt(z: complex) -> str:
    return f"{z.real:+.10f}{z.imag:+.10f}j"


def _table(rows: Sequence[Sequence[str]], header: Sequence[str]) -> str:
    cols = list(zip(header, *rows))
    widths = [max(len(c) for c in col) for col in cols]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in rows]
    return "\n".join(lines)


# --------------------------------------------------------------------------
# verbs


def cmd_convert(args, atol):
    phi = _load_map(args.map)
    if args.to == "transfer":
        out = maprep.to_transfer(phi)
        if args.basis != "matrix_units":
            out = maprep.transfer_in_basis(out, basis_by_name(args.basis, phi.d))
    elif args.to == "choi":
        out = maprep.to_choi(phi)
    elif args.to == "aform":
        out = maprep.to_aform(phi, basis_by_name(args.basis, phi.d))
    else:
        out = analysis.kraus_from_choi(phi, atol)
    return jsonio.map_to_json(out), None


def cmd_check(args, atol):
    phi = _load_map(args.map)
    report = {}
    rows = []
    everything = not (args.cp or args.ccp or args.unital or args.tp or args.selfadjoint
                      or args.positive_sample)
    if args.cp or everything:
        cp = analysis.is_completely_positive(phi, atol)
        report["cp"] = cp.cp
        report["min_choi_eig"] = jsonio.real_to_json(cp.min_eigenvalue)
        rows.append(("completely positive", str(cp.cp)))
    if args.ccp or everything:
        report["ccp"] = analysis.is_completely_copositive(phi, atol)
        rows.append(("completely copositive", str(report["ccp"])))
    if args.unital or everything:
        report["unital"] = maprep.is_unital(phi, atol)
        rows.append(("unital", str(report["unital"])))
    if args.tp or everything:
        report["tp"] = maprep.is_trace_preserving(phi, atol)
        rows.append(("trace preserving", str(report["tp"])))
    if args.selfadjoint or everything:
        report["selfadjoint"] = maprep.is_selfadjoint(phi, atol)
        rows.append(("self-adjoint", str(report["selfadjoint"])))
    if args.positive_sample:
        res = analysis.positivity_falsify(phi, args.positive_sample, args.seed, atol)
        report["positive_sample"] = {
            "counterexample_found": res.found,
            "counterexample": None if res.counterexample is None
            else [jsonio.complex_to_json(z) for z in res.counterexample],
            "min_output_eig": jsonio.real_to_json(res.min_eigenvalue),
            "trials": res.trials,
            "seed": args.seed,
        }
        rows.append(("positivity counterexample", str(res.found)))
    return report, _table(rows, ("property", "value"))


def cmd_spectrum(args, atol):
    rep = analysis.spectrum(_load_map(args.map), atol)
    rows = [(str(k), _fmt(z), f"{abs(z):.10f}") for k, z in enumerate(rep.eigenvalues)]
    table = _table(rows, ("k", "eigenvalue", "|eigenvalue|"))
    table += f"\nspectral radius {rep.spectral_radius:.12g} <= pf bound {rep.pf_bound:.12g}: {rep.bound_satisfied}"
    return jsonio.spectrum_to_json(rep), table


def cmd_decompose(args, atol):
    dec = analysis.biorthonormal_decomposition(_load_map(args.map), cond_max=args.cond_max)
    rows = [(str(k), _fmt(z)) for k, z in enumerate(dec.lambdas)]
    return jsonio.biorth_to_json(dec), _table(rows, ("k", "lambda"))


def cmd_gen(args, atol):
    kind = args.kind
    if kind == "werner":
        phi = stateclasses.werner_map(args.n)
    elif kind == "isotropic":
        phi = stateclasses.isotropic_map(args.n)
    elif kind == "ball":
        phi = stateclasses.ball_map(args.d)
    elif kind == "pinching":
        doc = _read_json(args.projectors)
        if isinstance(doc, dict) and "projectors" in doc:
            doc, prefix = doc["projectors"], "/projectors"
        else:
            prefix = ""
        if not isinstance(doc, list) or not doc:
            raise SchemaError(prefix, "expected a non-empty list of matrices")
        p = [jsonio.matrix_from_json(m, f"{prefix}/{k}") for k, m in enumerate(doc)]
        phi = stateclasses.pinching(p, atol)
    else:
        try:
            alpha = [float(x) for x in args.alpha.split(",")]
        except ValueError:
            raise UsageError(f"--alpha must be comma-separated numbers, got {args.alpha!r}") from None
        beta = _load_matrix(args.beta)
        phi = analysis.example_map(analysis.ExampleMapSpec(alpha, beta, atol))
    return jsonio.map_to_json(phi), None


def cmd_member(args, atol):
    rho = _load_state(args.state, atol)
    if args.ball is not None:
        d = args.ball
        if rho.shape != (d, d):
            raise SchemaError("/", f"state must be {d}x{d}")
        member = stateclasses.ball_membership(rho, d, atol)
        report = {"member": member, "purity": purity(rho), "bound": stateclasses.ball_radius_sq(d)}
        return report, _table([("purity", f"{report['purity']:.12g}"),
                               ("bound", f"{report['bound']:.12g}"),
                               ("member", str(member))], ("quantity", "value"))
    pi = _load_map(args.projection)
    res = stateclasses.projection_membership(rho, pi, atol)
    report = {"member": res.member, "residual": jsonio.real_to_json(res.residual)}
    if not res.member:
        report["witness"] = jsonio.matrix_to_json(res.witness)
        report["witness_value"] = jsonio.complex_to_json(res.witness_value)
    return report, _table([("member", str(res.member)), ("residual", f"{res.residual:.3g}")],
                          ("quantity", "value"))


def cmd_witness(args, atol):
    rho = _load_state(args.state, atol)
    if rho.shape != (args.ball, args.ball):
        raise SchemaError("/", f"state must be {args.ball}x{args.ball}")
    w = stateclasses.ball_witness(rho, args.ball, n_samples=args.samples, seed=args.seed, atol=atol)
    rows = [("value", f"{w.value:.12g}"), ("sampled min", f"{w.sampled_min}")]
    rows += [(k, str(v)) for k, v in w.cone.items()]
    return jsonio.witness_to_json(w), _table(rows, ("quantity", "value"))


def cmd_demo(args, atol):
    spec = analysis.random_example_spec(args.d, args.seed)
    predicted = analysis.predicted_eigenvalues(spec)
    computed, err = analysis.match_multisets(predicted, analysis.eigenvalues(analysis.example_map(spec)))
    order = np.argsort([-abs(z) for z in predicted], kind="stable")
    pairs = [
        {"predicted": jsonio.complex_to_json(predicted[k]), "computed": jsonio.complex_to_json(computed[k])}
        for k in order
    ]
    report = {
        "d": args.d,
        "seed": args.seed,
        "alpha": [jsonio.real_to_json(a) for a in spec.alpha],
        "beta": jsonio.matrix_to_json(spec.beta),
        "eigenvalues": pairs,
        "max_deviation": err,
    }
    rows = [(_fmt(predicted[k]), _fmt(computed[k]), f"{abs(predicted[k] - computed[k]):.2e}") for k in order]
    return report, _table(rows, ("predicted", "computed", "|diff|"))


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posmap", description="Analyze linear maps on M_d.")
    parser.add_argument("-v", "--verbose", action="store_true", help="human-readable table on stderr")
    parser.add_argument("-o", "--output", help="write JSON here instead of stdout")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("convert", help="change map representation")
    p.add_argument("--to", required=True, choices=["transfer", "choi", "aform", "kraus"])
    p.add_argument("--basis", default="matrix_units",
                   choices=["matrix_units", "fourier_diagonal_plus_offdiag", "gell_mann_with_identity"])
    p.add_argument("map")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("check", help="positivity and structural predicates")
    p.add_argument("--cp", action="store_true")
    p.add_argument("--ccp", action="store_true")
    p.add_argument("--unital", action="store_true")
    p.add_argument("--tp", action="store_true")
    p.add_argument("--selfadjoint", action="store_true")
    p.add_argument("--positive-sample", type=int, metavar="N", default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("map")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("spectrum", help="eigenvalues and the Perron-Frobenius bound")
    p.add_argument("map")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("decompose", help="bi-orthonormal spectral decomposition")
    p.add_argument("--biorth", action="store_true", required=True)
    p.add_argument("--cond-max", type=float, default=1e8)
    p.add_argument("map")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("gen", help="build a named map")
    gen = p.add_subparsers(dest="kind", required=True)
    g = gen.add_parser("werner")
    g.add_argument("n", type=int)
    g = gen.add_parser("isotropic")
    g.add_argument("n", type=int)
    g = gen.add_parser("pinching")
    g.add_argument("projectors")
    g = gen.add_parser("ball")
    g.add_argument("d", type=int)
    g = gen.add_parser("example")
    g.add_argument("--alpha", required=True)
    g.add_argument("--beta", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("member", help="membership of a state in a generated set")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--ball", type=int, metavar="D")
    which.add_argument("--projection", metavar="MAP")
    p.add_argument("state")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("witness", help="witness that a state is outside the purity ball")
    p.add_argument("--ball", type=int, metavar="D", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("state")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("demo", help="worked examples")
    demo = p.add_subparsers(dest="name", required=True)
    g = demo.add_parser("example-map")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo)
    return parser


def _atol_from_env() -> float:
    raw = os.environ.get("POSMAP_ATOL")
    if raw is None:
        return ATOL
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"POSMAP_ATOL must be a decimal number, got {raw!r}") from None
    if not value > 0:
        raise UsageError("POSMAP_ATOL must be positive")
    return value


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    def emit(obj):
        text = jsonio.dumps(obj)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)

    try:
        atol = _atol_from_env()
        report, table = args.func(args, atol)
    except UsageError as exc:
        stderr.write(f"posmap: error: {exc}\n")
        return EXIT_USAGE
    except SchemaError as exc:
        emit({"error": exc.code, "detail": str(exc), "path": exc.path})
        return EXIT_USAGE
    except PosmapError as exc:
        emit({"error": exc.code, "detail": str(exc)})
        return EXIT_DOMAIN
    emit(report)
    if args.verbose and table:
        stderr.write(table + "\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
