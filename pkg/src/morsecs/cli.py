"""Command-line interface.

Output discipline: the report requested by the user goes to stdout (or the
--out file) and nothing else does; convergence notes and other diagnostics
go to stderr. All floats are rendered with repr, so a rerun with the same
arguments produces byte-identical output.

Exit codes: 0 success, 1 argument or domain validation error, 2 numerical
failure (plateau not reached, non-finite result, failed self-check).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys

import numpy as np

from . import __version__, coherent, morse_core, operators, verify
from .errors import CapabilityError, ConsistencyError, DomainError


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad arguments; this interface
    # reserves 2 for numerical failures, so remap to 1.
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # Let values like "-2:8:5" (grids with negative minima) pass as
        # option arguments; no option name here starts with a digit.
        self._negative_number_matcher = re.compile(r"^-\d")


def _parse_complex(text: str) -> complex:
    """Accept 'a+bi' as well as Python's 'a+bj' notation."""
    cleaned = text.strip().replace("i", "j").replace("I", "j")
    try:
        value = complex(cleaned)
    except ValueError:
        raise DomainError(f"cannot parse complex number from {text!r}")
    return value


def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError("--grid expects min:max:count")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise DomainError(f"cannot parse grid from {text!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo or count < 2:
        raise DomainError("--grid needs finite min < max and count >= 2")
    return lo, hi, count


def _resolve_label(args, s: float) -> coherent.CoherentLabel:
    has_ps = args.x is not None or args.p is not None
    if args.beta is not None and has_ps:
        raise DomainError("--beta and --x/--p are mutually exclusive")
    if args.beta is not None:
        return coherent.CoherentLabel(_parse_complex(args.beta))
    ps = coherent.PhaseSpaceLabel(args.x if args.x is not None else 0.0,
                                  args.p if args.p is not None else 0.0)
    return coherent.from_phase_space(ps, s)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def _csv_table(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_document(config: dict, data) -> str:
    return json.dumps({"config": config, "data": data},
                      indent=2, allow_nan=False) + "\n"


def _json_rows(header, rows) -> list:
    out = []
    for row in rows:
        item = {}
        for key, value in zip(header, row):
            if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
                item[key] = int(value)
            elif isinstance(value, (bool, str)):
                item[key] = value
            else:
                item[key] = float(value)
        out.append(item)
    return out


def _table_output(args, config, header, rows) -> str:
    if args.format == "json":
        return _json_document(config, _json_rows(header, rows))
    return _csv_table(header, rows)


def _cmd_basis(args):
    s = args.s
    lo, hi, count = _parse_grid(args.grid)
    n_max = int(args.n_max)
    if n_max < 0:
        raise DomainError("--n-max must be >= 0")
    x = np.linspace(lo, hi, count)
    y = morse_core.y_from_x(x)
    cols = [morse_core.pseudo_wavefunction(n, s, y) for n in range(n_max + 1)]
    header = ["y"] + [f"phi{n}" for n in range(n_max + 1)]
    rows = [[y[i]] + [c[i] for c in cols] for i in range(count)]
    config = {"command": "basis", "s": s, "n_max": n_max,
              "grid": [lo, hi, count]}
    return _table_output(args, config, header, rows), 0


def _cmd_ham(args):
    s = args.s
    n = int(args.n)
    h = operators.matrix_H(s, n)
    diag = [float(v) for v in h.matrix.diag]
    off = [float(v) for v in h.matrix.offdiag]
    config = {"command": "ham", "s": s, "n": n}
    if args.format == "json":
        return _json_document(config, {"diagonal": diag,
                                       "super_diagonal": off}), 0
    header = ["index", "diagonal", "super_diagonal"]
    rows = [[i, diag[i], off[i] if i < n - 1 else ""] for i in range(n)]
    return _csv_table(header, rows), 0


def _cmd_spectrum(args):
    s = args.s
    count = morse_core.bound_state_count(s)
    threshold = morse_core.ShapeParams(s).continuum_threshold
    formulas = [morse_core.bound_energy(k, s) for k in range(count)]
    # Levels close to the continuum converge only algebraically with the
    # truncation order, so the plateau requirement applies to the deeply
    # bound ones; the rest are listed at the final order reached.
    deep = [k for k in range(count) if threshold - formulas[k] > 1.0]
    n_eigen = max(deep) + 1 if deep else 1
    vals, order = operators.converged_spectrum(
        s, n_eigen, tol=args.tol, n_start=args.n, n_max=args.n_max)
    ritz = operators.spectrum(s, order, count)
    print(f"plateau reached at truncation order {order} "
          f"for the lowest {n_eigen} level(s)", file=sys.stderr)
    header = ["index", "ritz_value", "formula_value", "abs_diff", "threshold"]
    rows = [[k, float(ritz[k]), formulas[k],
             abs(float(ritz[k]) - formulas[k]), threshold]
            for k in range(count)]
    config = {"command": "spectrum", "s": s, "order": order,
              "tol": args.tol, "n_levels": count}
    return _table_output(args, config, header, rows), 0


def _cmd_coherent(args):
    s = args.s
    n = int(args.n)
    label = _resolve_label(args, s)
    state = coherent.coefficients(label, s, n)
    header = ["n", "real", "imag", "abs"]
    rows = [[k, state.coeffs[k].real, state.coeffs[k].imag,
             abs(state.coeffs[k])] for k in range(n)]
    config = {"command": "coherent", "s": s, "n": n,
              "beta_re": label.beta.real, "beta_im": label.beta.imag}
    return _table_output(args, config, header, rows), 0


def _cmd_wavefunction(args):
    s = args.s
    n = int(args.n)
    label = _resolve_label(args, s)
    lo, hi, count = _parse_grid(args.grid)
    x = np.linspace(lo, hi, count)
    y = morse_core.y_from_x(x)
    ser = coherent.wavefunction_series(label, s, y, n)
    clo = coherent.wavefunction_closed(label, s, y)
    dev = float(np.abs(ser - clo).max())
    print(f"max |series - closed| = {dev!r}", file=sys.stderr)
    header = ["y", "series_re", "series_im", "closed_re", "closed_im"]
    rows = [[y[i], ser[i].real, ser[i].imag, clo[i].real, clo[i].imag]
            for i in range(count)]
    config = {"command": "wavefunction", "s": s, "n_terms": n,
              "beta_re": label.beta.real, "beta_im": label.beta.imag,
              "grid": [lo, hi, count]}
    return _table_output(args, config, header, rows), 0


def _cmd_resolution(args):
    s = args.s
    m = int(args.n)
    out = coherent.resolution_of_unity(s, m, n_radial=args.quad_points,
                                       n_angular=args.angular)
    dev = float(np.abs(out - math.pi * np.eye(m)).max())
    header = ["m_basis", "n_radial", "n_angular", "max_deviation_from_pi_identity"]
    rows = [[m, int(args.quad_points), int(args.angular), dev]]
    config = {"command": "resolution", "s": s, "m_basis": m,
              "n_radial": int(args.quad_points), "n_angular": int(args.angular)}
    return _table_output(args, config, header, rows), 0


def _cmd_displace(args):
    s = args.s
    n = int(args.n)
    label = _resolve_label(args, s)
    ps = coherent.to_phase_space(label, s)
    d_xp = coherent.displacement_matrix(ps, s, n, ordering="xp")
    unit = float(np.abs(d_xp.conj().T @ d_xp - np.eye(n)).max())
    target = coherent.coefficients(label, s, n).coeffs
    fidelity = float(abs(np.vdot(target, d_xp[:, 0])))
    d_px = coherent.displacement_matrix(ps, s, n, ordering="px")
    k = n // 3
    ordering_dev = float(np.abs((d_xp - d_px)[:k, :k]).max())
    header = ["n", "unitarity_deviation", "fidelity", "ordering_deviation"]
    rows = [[n, unit, fidelity, ordering_dev]]
    config = {"command": "displace", "s": s, "n": n,
              "x_tilde": ps.x_tilde, "p_tilde": ps.p_tilde}
    return _table_output(args, config, header, rows), 0


def _cmd_verify(args):
    results = verify.run_checks(quick=args.quick)
    code = 0 if all(r.passed for r in results) else 2
    config = {"command": "verify", "quick": bool(args.quick)}
    if args.format == "json":
        return _json_document(config, verify.result_rows(results)), code
    if args.format == "csv":
        header = ["property", "residual", "tolerance", "pass"]
        rows = [[r.name, r.residual, r.tolerance, r.passed] for r in results]
        return _csv_table(header, rows), code
    return verify.format_text(results), code


def _add_format(p, choices=("csv", "json"), default="csv"):
    p.add_argument("--format", choices=list(choices), default=default,
                   help=f"output format (default {default})")
    p.add_argument("--out", metavar="FILE",
                   help="write the report to FILE instead of stdout")


def _add_label(p):
    p.add_argument("--beta", metavar="A+BI",
                   help="disk label, e.g. 0.3+0.4i (also accepts 0.3+0.4j)")
    p.add_argument("--x", type=float, help="phase-space position label")
    p.add_argument("--p", type=float, help="phase-space momentum label")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="morsecs",
                     description="Pseudo-number basis, coherent states and "
                                 "displacement operators for the Morse well.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="tabulate basis functions on a grid")
    p.add_argument("--s", type=float, required=True, help="shape parameter")
    p.add_argument("--n-max", type=int, default=4,
                   help="highest basis index to tabulate (default 4)")
    p.add_argument("--grid", required=True, metavar="MIN:MAX:COUNT",
                   help="uniform grid in the physical coordinate x; the "
                        "first output column is y = 2 exp(-x)")
    _add_format(p)

    p = sub.add_parser("ham", help="dump the tridiagonal Hamiltonian block")
    p.add_argument("--s", type=float, required=True, help="shape parameter")
    p.add_argument("--n", type=int, default=10, help="block order (default 10)")
    _add_format(p)

    p = sub.add_parser("spectrum",
                       help="Ritz bound energies with plateau detection")
    p.add_argument("--s", type=float, required=True, help="shape parameter")
    p.add_argument("--n", type=int, default=200,
                   help="starting truncation order (default 200)")
    p.add_argument("--n-max", type=int, default=12800,
                   help="order cap for the doubling search (default 12800)")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="plateau tolerance between doublings (default 1e-6)")
    _add_format(p)

    p = sub.add_parser("coherent", help="coefficient table of one state")
    p.add_argument("--s", type=float, required=True, help="shape parameter")
    p.add_argument("--n", type=int, default=32,
                   help="number of coefficients (default 32)")
    _add_label(p)
    _add_format(p)

    p = sub.add_parser("wavefunction",
                       help="series and closed wavefunction side by side")
    p.add_argument("--s", type=float, required=True, help="shape parameter")
    p.add_argument("--n", type=int, default=400,
                   help="series terms (default 400)")
    p.add_argument("--grid", required=True, metavar="MIN:MAX:COUNT",
                   help="uniform grid in the physical coordinate x")
    _add_label(p)
    _add_format(p)

    p = sub.add_parser("resolution",
                       help="disk resolution of unity deviation report")
    p.add_argument("--s", type=float, required=True, help="shape parameter")
    p.add_argument("--n", type=int, default=12,
                   help="basis block size (default 12)")
    p.add_argument("--quad-points", type=int, default=200,
                   help="radial quadrature points (default 200)")
    p.add_argument("--angular", type=int, default=64,
                   help="angular quadrature points (default 64)")
    _add_format(p)

    p = sub.add_parser("displace",
                       help="unitarity and fidelity of the displacement")
    p.add_argument("--s", type=float, required=True, help="shape parameter")
    p.add_argument("--n", type=int, default=300,
                   help="truncation order (default 300)")
    _add_label(p)
    _add_format(p)

    p = sub.add_parser("verify", help="run the deterministic self-checks")
    p.add_argument("--quick", action="store_true",
                   help="smaller sizes, same properties")
    _add_format(p, choices=("text", "csv", "json"), default="text")

    return parser


_COMMANDS = {
    "basis": _cmd_basis,
    "ham": _cmd_ham,
    "spectrum": _cmd_spectrum,
    "coherent": _cmd_coherent,
    "wavefunction": _cmd_wavefunction,
    "resolution": _cmd_resolution,
    "displace": _cmd_displace,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse help/usage paths
        return exc.code if isinstance(exc.code, int) else 1
    try:
        body, code = _COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"morsecs: {exc}", file=sys.stderr)
        return 1
    except (ConsistencyError, CapabilityError) as exc:
        print(f"morsecs: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return code


if __name__ == "__main__":
    sys.exit(main())
