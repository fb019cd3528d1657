"""Command line front end: JSON documents in, JSON documents out.

Operator documents carry exact rational entries as strings ("3", "-1/2",
"0.25"), so nothing is forced through binary floating point on the way in.
Every command prints a single deterministic JSON document to stdout; human
diagnostics go to stderr. Exit codes: 0 ok, 2 invalid input, 3 internal
consistency failure, 4 inconsistent spectral data, 5 verification failure.
"""

import argparse
import hashlib
import json
import sys
from fractions import Fraction

from . import __version__
from .fixtures import (
    example1_diag,
    example2_const,
    example3,
    example4,
    free_operator,
)
from .inverse import (
    InconsistentDataError,
    SpectralData,
    _max_root_distance,
    recover_determinant,
    snap_to_rational,
)
from .operators import PeriodicOperator, validate
from .spectral import (
    InternalConsistencyError,
    band_structure,
    band_structure_from_char,
    char_determinant,
    classify_gaps,
    lyapunov_at,
    multipliers_at,
    resonances,
    surface_poly,
    verify_identities,
)

SCHEMA = "blochjac/1"
UNIT_CIRCLE_TOL = 1e-9

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_INTERNAL = 3
EXIT_INCONSISTENT_DATA = 4
EXIT_VERIFY_FAILED = 5


class InputError(Exception):
    """Anything wrong with a document or flag value; maps to exit code 2."""


def _read_bytes(path):
    if path in (None, "-"):
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _parse_json(data: bytes):
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from exc


def _rational(value, where):
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"{where}: exact entries must be strings, not {type(value).__name__}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{where}: cannot parse {value!r} as a rational") from exc
    raise InputError(f"{where}: expected a string, got {type(value).__name__}")


def operator_from_document(doc) -> PeriodicOperator:
    if not isinstance(doc, dict):
        raise InputError("operator document must be a JSON object")
    if doc.get("schema") not in (None, SCHEMA):
        raise InputError(f"unsupported schema {doc.get('schema')!r}")
    try:
        p = int(doc["p"])
        m = int(doc["m"])
        a_raw = doc["a"]
        b_raw = doc["b"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"operator document needs integer p, m and lists a, b ({exc})") from exc
    for name, mats in (("a", a_raw), ("b", b_raw)):
        if not isinstance(mats, list) or len(mats) != p:
            raise InputError(f"{name} must be a list of {p} matrices")
        for n, mat in enumerate(mats):
            if not isinstance(mat, list) or len(mat) != m or any(
                not isinstance(row, list) or len(row) != m for row in mat
            ):
                raise InputError(f"{name}[{n}] is not an {m}x{m} matrix")
    a = [[[_rational(x, f"a[{n}][{i}][{j}]") for j, x in enumerate(row)]
          for i, row in enumerate(mat)] for n, mat in enumerate(a_raw)]
    b = [[[_rational(x, f"b[{n}][{i}][{j}]") for j, x in enumerate(row)]
          for i, row in enumerate(mat)] for n, mat in enumerate(b_raw)]
    op = PeriodicOperator(a, b)
    problems = validate(op)
    if problems:
        raise InputError("invalid operator: " + "; ".join(problems))
    return op


def operator_to_document(op: PeriodicOperator) -> dict:
    return {
        "schema": SCHEMA,
        "p": op.p,
        "m": op.m,
        "a": [[[str(x) for x in row] for row in mat] for mat in op.a],
        "b": [[[str(x) for x in row] for row in mat] for mat in op.b],
    }


def _cnum(v) -> list:
    z = complex(v)
    # adding 0.0 turns -0.0 into +0.0, keeping documents canonical
    return [z.real + 0.0, z.imag + 0.0]


def _result(command: str, digest: str, payload) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "input": digest,
        "version": __version__,
        "payload": payload,
    }


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")


def _load_operator(args):
    data = _read_bytes(args.input)
    return operator_from_document(_parse_json(data)), _digest(data)


def cmd_example(args) -> int:
    if args.name == "free":
        op = free_operator(args.p, args.m)
    elif args.name == "example1-diag":
        op = example1_diag()
    elif args.name == "example2-const":
        op = example2_const(_rational(args.beta, "--beta"))
    elif args.name == "example3":
        op = example3(_rational(args.t, "--t"))
    else:
        op = example4(_rational(args.t, "--t"))
    _emit(operator_to_document(op))
    return EXIT_OK


def _band_payload(bs, gaps) -> dict:
    return {
        "segments": [[s.lo, s.hi, s.multiplicity] for s in bs.segments],
        "edges": [[e.value, e.kind, list(e.branches)] for e in bs.edges],
        "branch_bands": [[[lo, hi] for lo, hi in bands] for bands in bs.branch_bands],
        "gaps": [
            {
                "lo": g.lo,
                "hi": g.hi,
                "multiplicity": g.multiplicity,
                "kind": g.kind,
                "lo_kinds": sorted(g.lo_kinds),
                "hi_kinds": sorted(g.hi_kinds),
            }
            for g in gaps
        ],
    }


def cmd_bands(args) -> int:
    op, digest = _load_operator(args)
    bs = band_structure(op, grid=args.grid, tol=args.tol)
    cd = char_determinant(op)
    sp = surface_poly(cd)
    gaps = classify_gaps(bs, cd, sp)
    _emit(_result("bands", digest, _band_payload(bs, gaps)))
    return EXIT_OK


def cmd_resonances(args) -> int:
    op, digest = _load_operator(args)
    sp = surface_poly(char_determinant(op))
    rs = resonances(sp)
    payload = {
        "rho": [str(c) for c in rs.rho.coeffs],
        "zeros": [_cnum(v) for v in rs.values],
        "real": list(rs.real),
        "clusters": [[_cnum(v), k] for v, k in rs.clusters],
        "degenerate": rs.degenerate,
    }
    _emit(_result("resonances", digest, payload))
    return EXIT_OK


def _parse_z(text: str) -> complex:
    parts = text.split(",")
    if len(parts) > 2:
        raise InputError(f"--z wants re or re,im, got {text!r}")
    try:
        re = float(parts[0])
        im = float(parts[1]) if len(parts) == 2 else 0.0
    except ValueError as exc:
        raise InputError(f"--z: {exc}") from exc
    return complex(re, im)


def _parse_grid(text: str) -> list:
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"--z-grid wants lo:hi:N, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InputError(f"--z-grid: {exc}") from exc
    if n < 2 or hi <= lo:
        raise InputError("--z-grid needs hi > lo and N >= 2")
    step = (hi - lo) / (n - 1)
    return [complex(lo + k * step, 0.0) for k in range(n)]


def cmd_lyapunov(args) -> int:
    op, digest = _load_operator(args)
    points = [_parse_z(args.z)] if args.z is not None else _parse_grid(args.z_grid)
    cd = char_determinant(op)
    sp = surface_poly(cd)
    out = []
    for z in points:
        branches = lyapunov_at(sp, z)
        pairs = multipliers_at(cd, z)
        out.append(
            {
                "z": _cnum(z),
                "branches": [{"value": _cnum(b.value), "real": b.real} for b in branches],
                "multipliers": [
                    {
                        "pair": [_cnum(t) for t in pair],
                        "abs": [abs(t) for t in pair],
                        "on_circle": [abs(abs(t) - 1) <= UNIT_CIRCLE_TOL for t in pair],
                    }
                    for pair in pairs
                ],
            }
        )
    _emit(_result("lyapunov", digest, {"points": out}))
    return EXIT_OK


def _complex_from_doc(value, where) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        return complex(value[0], value[1])
    raise InputError(f"{where}: eigenvalues are numbers or [re, im] pairs")


def spectral_data_from_document(doc) -> SpectralData:
    if not isinstance(doc, dict):
        raise InputError("spectral data document must be a JSON object")
    if doc.get("schema") not in (None, SCHEMA):
        raise InputError(f"unsupported schema {doc.get('schema')!r}")
    try:
        p = int(doc["p"])
        m = int(doc["m"])
        kappas = tuple(float(k) for k in doc["kappas"])
        raw_sets = doc["lambda_sets"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"spectral data needs p, m, kappas, lambda_sets ({exc})") from exc
    if not isinstance(raw_sets, list):
        raise InputError("lambda_sets must be a list of lists")
    sets = []
    for j, lam in enumerate(raw_sets):
        if not isinstance(lam, list):
            raise InputError(f"lambda_sets[{j}] must be a list")
        sets.append(tuple(_complex_from_doc(v, f"lambda_sets[{j}][{i}]") for i, v in enumerate(lam)))
    return SpectralData(p=p, m=m, kappas=kappas, lambda_sets=tuple(sets))


def cmd_recover(args) -> int:
    data = _read_bytes(args.input)
    sd = spectral_data_from_document(_parse_json(data))
    rec = recover_determinant(sd)
    payload = {
        "c": _cnum(rec.c),
        "q": [[_cnum(v) for v in rec.q[j]] for j in range(sd.m + 1)],
        "D": [[_cnum(v) for v in rec.D[i]] for i in range(2 * sd.m + 1)],
        "residuals": [
            _max_root_distance(rec.eta, kappa, lam)
            for kappa, lam in zip(sd.kappas, sd.lambda_sets)
        ],
    }
    try:
        snapped = snap_to_rational(rec)
    except InconsistentDataError as exc:
        payload["exact"] = None
        payload["bands"] = None
        payload["snap_error"] = str(exc)
    else:
        payload["exact"] = {
            "c": str(snapped.c),
            "q": [[str(snapped.q.coeff(j).coeff(n)) for n in range(sd.p * sd.m + 1)]
                  for j in range(sd.m + 1)],
        }
        bs = band_structure_from_char(snapped)
        gaps = classify_gaps(bs, snapped, surface_poly(snapped))
        payload["bands"] = _band_payload(bs, gaps)
    _emit(_result("recover", _digest(data), payload))
    return EXIT_OK


def cmd_verify(args) -> int:
    op, digest = _load_operator(args)
    checks = verify_identities(op)
    failed = [c.name for c in checks if c.status == "fail"]
    payload = {
        "checks": [
            {"name": c.name, "status": c.status, "residual": c.residual, "detail": c.detail}
            for c in checks
        ],
        "all_pass": not failed,
    }
    _emit(_result("verify", digest, payload))
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blochjac",
        description="Spectral toolkit for periodic block Jacobi operators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(sp):
        sp.add_argument("input", nargs="?", default="-",
                        help="operator document path, or - for stdin (default)")

    sp = sub.add_parser("bands", help="spectral bands, edges, and gap classification")
    add_input(sp)
    sp.add_argument("--grid", type=int, default=257,
                    help="Floquet cross-validation grid size (default 257)")
    sp.add_argument("--tol", type=float, default=1e-9,
                    help="edge refinement tolerance (default 1e-9)")
    sp.set_defaults(func=cmd_bands)

    sp = sub.add_parser("resonances", help="resonance polynomial and its zeros")
    add_input(sp)
    sp.set_defaults(func=cmd_resonances)

    sp = sub.add_parser("lyapunov", help="Lyapunov branch values and multipliers")
    add_input(sp)
    where = sp.add_mutually_exclusive_group(required=True)
    where.add_argument("--z", help="evaluation point, re or re,im")
    where.add_argument("--z-grid", help="real evaluation grid lo:hi:N")
    sp.set_defaults(func=cmd_lyapunov)

    sp = sub.add_parser("recover", help="recover the determinant from spectral data")
    add_input(sp)
    sp.set_defaults(func=cmd_recover)

    sp = sub.add_parser("verify", help="run the identity battery on an operator")
    add_input(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("example", help="emit a built-in operator document")
    sp.add_argument("name", choices=["example1-diag", "example2-const", "example3", "example4", "free"])
    sp.add_argument("--t", default="0", help="parameter t for example3/example4 (rational, default 0)")
    sp.add_argument("--beta", default="1", help="parameter beta for example2-const (rational, default 1)")
    sp.add_argument("--p", type=int, default=2, help="period for free (default 2)")
    sp.add_argument("--m", type=int, default=1, help="block size for free (default 1)")
    sp.set_defaults(func=cmd_example)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except InconsistentDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT_DATA
    except InternalConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
