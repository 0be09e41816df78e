"""Command-line front end.

Every command prints to stdout unless ``--output`` names a file.  When the
``TSIP_OUTPUT_DIR`` environment variable is set and no ``--output`` is
given, results are written there under a default file name instead.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import gcd

import numpy as np

from . import numerov
from .backlund import rs_function
from .errors import InvalidInputError, TSIPError
from .families import FAMILY_NAMES, SAMPLE_PARAMS, energy, get_family, instantiate, list_families, parse_rational
from .groundstate import raw_coefficients, solve_raw
from .verify import DEFAULT_POINTS, classify, full_report
from .wavefun import assemble, eval_psi, normalize

OUTPUT_ENV = "TSIP_OUTPUT_DIR"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def number_json(x):
    """Exact values as ``"p/q"`` strings, floating values as floats."""
    if isinstance(x, (Fraction, int)):
        return frac_str(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    if x is None:
        return None
    return float(x)


def parse_params(items) -> dict:
    out = {}
    for pos, item in enumerate(items or [], start=1):
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise InvalidInputError(f"--param #{pos} {item!r}: expected name=value")
        try:
            out[name.strip()] = parse_rational(value)
        except InvalidInputError as exc:
            raise InvalidInputError(f"--param #{pos} {item!r}: {exc}") from None
    return out


def integer_lists(rf):
    """Numerator and denominator of a real rational function as primitive integer lists."""
    coeffs = [c for c in rf.num.coeffs + rf.den.coeffs]
    if not all(c.is_real for c in coeffs):
        return None
    den_lcm = 1
    for c in coeffs:
        d = c.re.denominator
        den_lcm = den_lcm * d // gcd(den_lcm, d)
    num = [int(c.re * den_lcm) for c in rf.num.coeffs]
    den = [int(c.re * den_lcm) for c in rf.den.coeffs]
    g = 0
    for v in num + den:
        g = gcd(g, v)
    g = g or 1
    return [v // g for v in num], [v // g for v in den]


# ---------------------------------------------------------------------------
# commands


def cmd_list(args):
    return {"families": list_families()}, "families.json"


def _instance(args):
    return instantiate(args.family, parse_params(args.param))


def cmd_spectrum(args):
    inst = _instance(args)
    inst.check_index(args.n)
    rows = [{"n": k, "energy": energy(inst, k).to_json(), "energy_float": float(energy(inst, k))}
            for k in range(args.n + 1)]
    name = f"spectrum-{inst.name}.{args.format}"
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "energy", "energy_float"])
        for r in rows:
            w.writerow([r["n"], r["energy"], repr(r["energy_float"])])
        return buf.getvalue(), name
    return {"family": inst.name, "params": inst.to_json()["params"], "levels": rows}, name


def cmd_rs(args):
    inst = _instance(args)
    lev = rs_function(inst, args.n)
    out = lev.to_json()
    ints = integer_lists(lev.w)
    if ints is not None:
        out["numerator"], out["denominator"] = ints
    return out, f"rs-{inst.name}-n{args.n}.json"


def _sample_range(cf, args):
    bps, _ = cf.window
    a = bps[0] if args.x_min is None else args.x_min
    b = bps[-1] if args.x_max is None else args.x_max
    if not b > a:
        raise InvalidInputError(f"empty sampling range [{a}, {b}]")
    k = np.arange(args.points)
    # cell midpoints keep the samples inside open domains
    return a + (k + 0.5) * (b - a) / args.points


def cmd_wavefunction(args):
    inst = _instance(args)
    cf = normalize(assemble(rs_function(inst, args.n), inst))
    desc = cf.to_json()
    stem = f"psi-{inst.name}-n{args.n}"
    if args.format == "json":
        return desc, stem + ".json"
    xs = _sample_range(cf, args)
    psi = eval_psi(cf, xs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "psi"])
    for x, p in zip(xs, psi):
        w.writerow([repr(float(x)), repr(float(p))])
    return buf.getvalue(), stem + ".csv", desc


RAW_FIELDS = ("lam2", "lam1", "lam0", "mu2", "alpha")


def cmd_ground(args):
    if args.raw:
        spec = {"solver": args.solver}
        for f in RAW_FIELDS:
            v = getattr(args, f)
            if v is not None:
                spec[f] = parse_rational(v)
        if args.solver in ("first", "second"):
            spec["branch"] = args.branch
        label = f"raw-{args.solver}"
    else:
        if args.family is None:
            raise InvalidInputError("ground needs --family or --raw")
        spec = raw_coefficients(_instance(args))
        label = args.family
    try:
        sol = solve_raw(spec)
    except TypeError as exc:
        raise InvalidInputError(f"coefficients do not match solver {spec['solver']!r}: {exc}") from None
    out = {
        "input": {k: (v if isinstance(v, str) or v is None else number_json(v)) for k, v in spec.items()},
        "b1": number_json(sol.b1),
        "b0": number_json(sol.b0),
        "b_minus1": number_json(sol.bm1),
        "E0": number_json(sol.E0),
        "exactness": sol.exactness,
        "residual_max": sol.residual_max(),
    }
    if sol.exact:
        out["w0"] = sol.w().to_json()
    return out, f"ground-{label}.json"


def _report(name, params, n, points, oracle):
    inst = instantiate(name, params)
    mb = inst.max_bound_index
    n_eff = n if mb is None else min(n, mb)
    return full_report(inst, n_eff, points=points, oracle=oracle)


def cmd_verify(args):
    if args.all:
        jobs = [(name, p) for name in FAMILY_NAMES for p in SAMPLE_PARAMS[name]]
    else:
        if args.family is None:
            raise InvalidInputError("verify needs --family or --all")
        get_family(args.family)
        jobs = [(args.family, parse_params(args.param))]
        inst = instantiate(*jobs[0])
        inst.check_index(args.n)

    def run(job):
        return _report(job[0], job[1], args.n, args.points, not args.no_oracle)

    workers = max(1, args.workers)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, jobs))
    else:
        reports = [run(j) for j in jobs]
    payload = {
        "passed": all(r.passed for r in reports),
        "backend": numerov.BACKEND,
        "reports": [r.to_json() for r in reports],
    }
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.family} {r.params}", file=sys.stderr)
        for f in r.failures:
            print(f"    {f}", file=sys.stderr)
    return payload, "report.json"


def cmd_classify(args):
    inst = _instance(args)
    return {"family": inst.name, "params": inst.to_json()["params"], **classify(inst).to_json()}, \
        f"classify-{inst.name}.json"


COMMANDS = {
    "list": cmd_list,
    "spectrum": cmd_spectrum,
    "rs": cmd_rs,
    "wavefunction": cmd_wavefunction,
    "ground": cmd_ground,
    "verify": cmd_verify,
    "classify": cmd_classify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tsip", description="Exact spectra and RS functions of shape-invariant potentials.")
    p.add_argument("--output", "-o", help="write the result to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def with_family(sp, required=True):
        sp.add_argument("--family", required=required, choices=FAMILY_NAMES)
        sp.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                        help="exact parameter, e.g. A=3/2 (repeatable)")

    sub.add_parser("list", help="describe the twelve families")

    sp = sub.add_parser("spectrum", help="energies E_0..E_n")
    with_family(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("rs", help="exact RS function w_n")
    with_family(sp)
    sp.add_argument("--n", type=int, required=True)

    sp = sub.add_parser("wavefunction", help="closed-form psi_n as samples or descriptor")
    with_family(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--points", type=int, default=401)
    sp.add_argument("--x-min", type=float, default=None)
    sp.add_argument("--x-max", type=float, default=None)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("ground", help="ground state from a family or from raw coefficients")
    with_family(sp, required=False)
    sp.add_argument("--raw", action="store_true", help="solve from raw potential coefficients")
    sp.add_argument("--solver", choices=("first", "second", "identity", "expneg", "reciprocal"), default="first")
    for f in RAW_FIELDS:
        sp.add_argument(f"--{f}", default=None)
    sp.add_argument("--branch", choices=("plus", "minus"), default="plus")

    sp = sub.add_parser("verify", help="run every check and emit reports")
    with_family(sp, required=False)
    sp.add_argument("--all", action="store_true", help="all families at their sample parameters")
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--points", type=int, default=DEFAULT_POINTS)
    sp.add_argument("--no-oracle", action="store_true")
    sp.add_argument("--workers", type=int, default=min(4, os.cpu_count() or 1))

    sp = sub.add_parser("classify", help="shape-invariance class of a family instance")
    with_family(sp)
    return p


def _render(obj) -> str:
    if isinstance(obj, str):
        return obj
    return json.dumps(obj, indent=2) + "\n"


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except TSIPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    obj, default_name = result[0], result[1]
    extra = result[2] if len(result) > 2 else None
    text = _render(obj)
    target = args.output
    if target is None and os.environ.get(OUTPUT_ENV):
        target = os.path.join(os.environ[OUTPUT_ENV], default_name)
    if target is None:
        sys.stdout.write(text)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(target)), exist_ok=True)
        _write(target, text)
        if extra is not None:
            _write(os.path.splitext(target)[0] + ".json", _render(extra))
    if args.command == "verify" and not obj["passed"]:
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
