"""Command-line front end.

Subcommands write deterministic CSV/JSON artifacts::

    delaytau discretize SYSTEM.json --basis legendre --method tau --N 4
    delaytau converge   SYSTEM.json --basis cheb2 --method tau,colloc --N 5..40 --out two_state.csv
    delaytau roots      SYSTEM.json --basis cheb1 --N 5..15 --count 2
    delaytau tfscan     SYSTEM.json --basis cheb2 --N 1 --omega 0:10:201
    delaytau pade-check --basis legendre --tau 1 --N 3

Exit codes: 0 success, 2 configuration error, 3 numerical failure.  Errors
are reported on stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .discretize import (DelaySystem, build_collocation, build_tau, build_tau_mixed,
                         chebyshev_extremal_mesh, zeros_plus_origin_mesh)
from .errors import ConfigError, DelayTauError, NumericalError, ParameterError
from .h2 import h2_closed_form, h2_norm
from .orthopoly import BasisSpec
from .rational import pade_moment_defect, tf_exact, tf_state_space
from .spectrum import track_roots

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
METHODS = ("tau", "mixed", "colloc", "colloc-zeros")
RELERR_FLOOR = 1e-16
REFERENCE_N = 40


def fmt(x):
    """Fixed 17-significant-digit formatting used for every CSV float."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def parse_n_range(text):
    """``"a..b"`` or ``"a"`` -> ascending list of degrees."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise ConfigError(f"--N: cannot parse {text!r}; expected 'a..b' or an integer") from None
    if lo < 1 or hi < lo:
        raise ConfigError(f"--N: range {text!r} must be ascending and start at >= 1")
    return list(range(lo, hi + 1))


def parse_omega(text):
    """``"a:b:count"`` -> ``count`` equispaced frequencies including both ends."""
    parts = text.split(":")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise ConfigError(f"--omega: cannot parse {text!r}; expected 'a:b:count'") from None
    if len(parts) != 3 or count < 1 or (count > 1 and hi <= lo):
        raise ConfigError(f"--omega: invalid grid {text!r}")
    grid = np.linspace(lo, hi, count)
    grid[0], grid[-1] = lo, hi
    return grid


def load_system(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read system file {path!r}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return DelaySystem.from_dict(data)
    except ParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def basis_for(args, system):
    spec = BasisSpec.parse(args.basis, system.tau if system is not None else args.tau)
    basis_tau = getattr(args, "basis_tau", None)
    if basis_tau is not None and system is not None and not math.isclose(basis_tau, system.tau, rel_tol=1e-12):
        raise ConfigError(f"basis tau {basis_tau!r} does not match system tau {system.tau!r}")
    return spec


def build(system, spec, method, N):
    if method == "tau":
        return build_tau(system, spec, N)
    if method == "mixed":
        return build_tau_mixed(system, N)
    if method == "colloc":
        return build_collocation(system, chebyshev_extremal_mesh(system.tau, N))
    if method == "colloc-zeros":
        return build_collocation(system, zeros_plus_origin_mesh(spec, N))
    raise ConfigError(f"--method: unknown method {method!r}; choose from {', '.join(METHODS)}")


def basis_label(spec, method):
    if method == "colloc":
        return "extremal"
    if method == "mixed":
        return "cheb1/cheb2"
    return spec.descriptor


def write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    write_text(path, buf.getvalue())


def write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def write_json(path, obj):
    write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_discretize(args):
    system = load_system(args.system)
    spec = basis_for(args, system)
    Ns = parse_n_range(args.N)
    if len(Ns) != 1:
        raise ConfigError("discretize takes a single degree --N")
    N = Ns[0]
    real = build(system, spec, args.method, N)
    out = {
        "metadata": {"basis": basis_label(spec, args.method), "N": N, "method": args.method,
                     "tau": system.tau, "n": system.n},
        "E": real.E.tolist(), "A": real.A.tolist(), "B": real.B.tolist(), "C": real.C.tolist(),
    }
    if args.method.startswith("colloc"):
        out["metadata"]["mesh"] = real.mesh.points.tolist()
    write_json(args.out, out)


def _h2_row(system, spec, method, N, reference):
    try:
        value = h2_norm(build(system, spec, method, N))
    except NumericalError:
        value = float("nan")
    if reference is None or math.isnan(value):
        relerr = float("nan")
    else:
        relerr = max(abs(value - reference) / abs(reference), RELERR_FLOOR)
    return [str(N), method, basis_label(spec, method), fmt(value), fmt(relerr)]


def cmd_converge(args):
    system = load_system(args.system)
    spec = basis_for(args, system)
    Ns = parse_n_range(args.N)
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"--method: unknown method {m!r}; choose from {', '.join(METHODS)}")

    meta = {"system": args.system, "N": [Ns[0], Ns[-1]], "methods": methods,
            "basis": spec.descriptor, "relerr_floor": RELERR_FLOOR}
    reference = h2_closed_form(system)
    if reference is not None:
        meta["reference"] = {"source": "closed-form (scalar a0 = a1 < 0)", "value": reference}
    else:
        ref_N = args.ref_N
        try:
            reference = h2_norm(build_tau(system, BasisSpec.chebyshev2(system.tau), ref_N))
            meta["reference"] = {"source": f"tau cheb2 N={ref_N}", "value": reference}
        except NumericalError as exc:
            reference = None
            meta["reference"] = {"source": None, "flag": f"reference unavailable: {exc}"}

    tasks = [(m, N) for m in methods for N in Ns]
    work = lambda t: _h2_row(system, spec, t[0], t[1], reference)  # noqa: E731
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(work, tasks))
    else:
        rows = [work(t) for t in tasks]
    write_csv(args.out, ["N", "method", "basis", "h2", "relerr_vs_reference"], rows)
    meta_path = args.meta or (None if args.out in (None, "-") else args.out + ".meta.json")
    if meta_path:
        write_json(meta_path, meta)


def cmd_roots(args):
    system = load_system(args.system)
    spec = basis_for(args, system)
    rows = []
    for N in parse_n_range(args.N):
        real = build(system, spec, args.method, N)
        rep = track_roots(system, real, args.count)
        for z, res, zr in zip(rep.approx_roots, rep.pencil_residuals, rep.refined_roots):
            rows.append([str(N), fmt(z.real), fmt(z.imag), fmt(res), fmt(zr.real), fmt(zr.imag)])
    write_csv(args.out, ["N", "re", "im", "residual", "refined_re", "refined_im"], rows)


def cmd_tfscan(args):
    system = load_system(args.system)
    spec = basis_for(args, system)
    Ns = parse_n_range(args.N)
    if len(Ns) != 1:
        raise ConfigError("tfscan takes a single degree --N")
    real = build(system, spec, args.method, Ns[0])
    rows = []
    for w in parse_omega(args.omega):
        G = tf_exact(system, 1j * w)
        GN = tf_state_space(real.E, real.A, real.B, real.C, 1j * w)
        rows.append([fmt(w), fmt(np.linalg.norm(G)), fmt(np.linalg.norm(GN))])
    write_csv(args.out, ["omega", "abs_G", "abs_GN"], rows)


def cmd_pade_check(args):
    spec = BasisSpec.parse(args.basis, args.tau)
    report = {"basis": spec.descriptor, "tau": spec.tau, "degrees": []}
    for N in parse_n_range(args.N):
        n_max = 2 * N + 1 if args.n_max is None else args.n_max
        table = []
        for n in range(n_max + 1):
            defect = pade_moment_defect(spec, N, n)
            bound = args.tol * math.factorial(n) * spec.tau ** n
            table.append({"n": n, "defect": defect, "bound": bound,
                          "within_bound": abs(defect) <= bound})
        report["degrees"].append({"N": N, "pade_order": 2 * N, "defects": table})
    write_json(args.out, report)


def build_parser():
    parser = argparse.ArgumentParser(prog="delaytau", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, system=True, method=True):
        if system:
            p.add_argument("system", help="system JSON file {A0, A1, B, C, tau}")
        p.add_argument("--basis", default="cheb2", help="cheb1 | cheb2 | legendre | jacobi:alpha:beta")
        if system:
            p.add_argument("--basis-tau", type=float, default=None,
                           help="delay assumed by the basis; must match the system")
        if method:
            p.add_argument("--method", default="tau", help=f"one of {', '.join(METHODS)}")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--tol", type=float, default=1e-7, help="tolerance override")

    p = sub.add_parser("discretize", help="emit the realization matrices as JSON")
    common(p)
    p.add_argument("--N", required=True)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("converge", help="H2-norm convergence table (CSV)")
    common(p)
    p.add_argument("--N", required=True)
    p.add_argument("--ref-N", type=int, default=REFERENCE_N, help="degree of the reference tau solve")
    p.add_argument("--meta", default=None, help="metadata JSON path (default: OUT.meta.json)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("roots", help="rightmost characteristic roots per degree (CSV)")
    common(p)
    p.add_argument("--N", required=True)
    p.add_argument("--count", type=int, default=2)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("tfscan", help="|G(i w)| and |G_N(i w)| on a frequency grid (CSV)")
    common(p)
    p.add_argument("--N", required=True)
    p.add_argument("--omega", default="0:10:101")
    p.set_defaults(func=cmd_tfscan)

    p = sub.add_parser("pade-check", help="moment defects of r_N(s, -tau) (JSON)")
    common(p, system=False, method=False)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--N", required=True)
    p.add_argument("--n-max", type=int, default=None)
    p.set_defaults(func=cmd_pade_check)
    return parser


def _fail(code, exc):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except NumericalError as exc:
        return _fail(EXIT_NUMERIC, exc)
    except DelayTauError as exc:
        return _fail(EXIT_CONFIG, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
