"""Command-line front end: batch computation and report emission.

One binary, nine subcommands; inputs are JSON (a file path or an inline
``{...}`` string passed to --input), outputs are deterministic reports on
stdout in JSON (default) or plain text.  Exit codes: 0 success, 2 input or
validation failure (the report names the violated invariant; malformed
JSON reports line and column), 1 internal error.

Arbitrary-precision integers are serialized as decimal strings so reports
survive any JSON parser; exact rationals as "numerator/denominator".
Identical inputs (and seed, where used) produce byte-identical JSON.
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import criteria as _criteria
from .diagonal import diagonal_halving_check
from .svp import SVPError, buser_sarnak, relative_buser_sarnak
from .theta import ThetaError, rho2_rank
from .torus import (PolarizationType, TorusError, subtorus_from_dict,
                    torus_from_dict, validate)
from .tube import (CurveError, TubeError, TubeSpec, curve_from_dict,
                   exceptional_intersection, volume_bound_check, federer_check)

SCHEMA_VERSION = "1"


class InputError(ValueError):
    """Bad user input: schema violations, malformed JSON, missing flags."""


def _load_input(value: str | None, required: bool = True):
    if value is None:
        if required:
            raise InputError("this command requires --input (file path or inline JSON)")
        return None
    text = value if value.lstrip().startswith("{") else None
    source = "<inline>" if text is not None else value
    if text is None:
        p = Path(value)
        if not p.exists():
            raise InputError(f"input file not found: {value}")
        text = p.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(
            f"malformed JSON in {source}: line {e.lineno} column {e.colno}: {e.msg}")


def _int_str(x) -> str:
    return str(int(x))


def _fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _report(module: str, quantity: str, payload: dict) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "module": module, "quantity": quantity}
    doc.update(payload)
    return doc


def _emit(doc: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(doc, sort_keys=True, indent=2))
        return
    for key, value in doc.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"{key}:")
            for row in value:
                print("  " + "  ".join(f"{k}={v}" for k, v in row.items()))
        else:
            print(f"{key}: {value}")


# --- subcommand handlers (each returns (payload, exit_code)) -----------------

def _cmd_validate(args):
    data = _load_input(args.input)
    for key in ("type", "tau"):
        if key not in data:
            raise InputError(f"validate input needs a {key!r} field")
    from .torus import tau_from_json
    report = validate(list(data["type"]), tau_from_json(data["tau"]))
    payload = _report("torus", "lattice and polarization invariants", {
        "ok": report.ok,
        "recovered_type": list(report.recovered_type) if report.recovered_type else None,
        "checks": [{"invariant": c.name, "ok": c.ok,
                    "residual": c.residual, "detail": c.detail}
                   for c in report.checks],
    })
    return payload, (0 if report.ok else 2)


def _cmd_bs(args):
    torus = torus_from_dict(_load_input(args.input))
    res = buser_sarnak(torus, exact=args.exact)
    return _report("svp", "minimal squared lattice length", {
        "m": res.length_sq,
        "m_exact": _fraction_str(res.length_sq_exact) if res.length_sq_exact is not None else None,
        "witness": [int(x) for x in res.witness],
        "mode": res.method.get("mode"),
    }), 0


def _cmd_rel_bs(args):
    data = _load_input(args.input)
    if "torus" not in data or "sublattice" not in data:
        raise InputError("rel-bs input needs 'torus' and 'sublattice' fields")
    torus = torus_from_dict(data["torus"])
    sub = subtorus_from_dict(torus, data)
    res = relative_buser_sarnak(sub, exact=args.exact)
    return _report("svp", "minimal squared projected length", {
        "m_rel": res.length_sq,
        "witness": [int(x) for x in res.witness],
        "mode": res.method.get("mode"),
    }), 0


def _cmd_diagonal(args):
    torus = torus_from_dict(_load_input(args.input))
    check = diagonal_halving_check(torus, exact=args.exact)
    return _report("diagonal", "projected-minimum halving identity", {
        "lhs": check.lhs,
        "rhs": check.rhs,
        "rel_err": check.rel_err,
        "ok": check.rel_err <= 1e-9,
    }), 0


def _cmd_tube(args):
    data = _load_input(args.input)
    for key in ("torus", "sublattice", "r"):
        if key not in data:
            raise InputError(f"tube input needs a {key!r} field")
    torus = torus_from_dict(data["torus"])
    sub = subtorus_from_dict(torus, data)
    tube = TubeSpec(sub=sub, r=float(data["r"]))
    raw_curves = data.get("curves")
    if raw_curves is None:
        if "curve" not in data:
            raise InputError("tube input needs a 'curve' or 'curves' field")
        raw_curves = [data["curve"]]
    curves = [curve_from_dict(c) for c in raw_curves]
    rep = volume_bound_check(tube, curves, tol=args.tol)
    return _report("tube", "curve area in tube vs multiplicity bound", {
        "r": tube.r,
        "m_rel": tube.m_rel,
        "intersections": sum(exceptional_intersection(c) for c in curves),
        "volume": rep.volume,
        "bound": rep.bound,
        "slack": rep.slack,
        "quadrature_error_estimate": rep.quadrature_error_estimate,
    }), 0


def _cmd_federer(args):
    data = _load_input(args.input)
    for key in ("coeffs", "r"):
        if key not in data:
            raise InputError(f"federer input needs a {key!r} field")
    from .torus import complex_from_json
    coeffs = [[complex_from_json(z) for z in vec] for vec in data["coeffs"]]
    rep = federer_check(coeffs, r=float(data["r"]),
                        mult=data.get("mult"),
                        domain_radius=data.get("domain_radius"),
                        tol=args.tol)
    return _report("tube", "curve area in ball vs density bound", {
        "r": rep.r,
        "mult": rep.mult,
        "area": rep.area,
        "bound": rep.bound,
        "quadrature_error_estimate": rep.quadrature_error_estimate,
    }), 0


def _parse_type(text: str) -> PolarizationType:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise InputError(f"--type must be comma-separated integers, got {text!r}")
    return PolarizationType(parts)


def _cmd_criteria(args):
    torus = None
    if args.m_source == "computed":
        if args.input is None:
            raise InputError("--m-source computed requires --input with a torus")
        torus = torus_from_dict(_load_input(args.input))
        ptype = torus.ptype
        if args.type is not None and tuple(_parse_type(args.type).d) != tuple(ptype.d):
            raise InputError("--type disagrees with the torus in --input")
    else:
        if args.type is None:
            raise InputError("--m-source bauer requires --type")
        ptype = _parse_type(args.type)
    if args.n is not None and args.n != ptype.n:
        raise InputError(f"--n {args.n} does not match type of length {ptype.n}")
    rep = _criteria.evaluate(ptype, m_source=args.m_source, torus=torus)
    return _report("criteria", "projective-normality criterion", {
        "n": rep.n,
        "type": list(rep.type.d),
        "h0": _int_str(rep.h0),
        "Ln": _int_str(rep.Ln),
        "m_value": rep.m_value,
        "m_source": args.m_source,
        "seshadri_lb": rep.seshadri_lb,
        "nef_ok": rep.nef_ok,
        "big_ok": rep.big_ok,
        "intersection_number": _int_str(rep.intersection_number),
        "normality_bound_ok": rep.normality_bound_ok,
        "iyer_bound_ok": rep.iyer_bound_ok,
        "verdict": rep.verdict,
    }), 0


def _cmd_table(args):
    table = _criteria.bounds_table(args.n_max)
    rows = [{
        "n": row.n,
        "normality_bound": _fraction_str(row.normality_bound),
        "iyer_bound": _int_str(row.iyer_bound),
        "ratio": row.ratio,
        "normality_smaller": row.normality_smaller,
        "crossover": table.crossover == row.n,
    } for row in table.rows]
    return _report("criteria", "sufficient-bound comparison", {
        "n_max": args.n_max,
        "crossover": table.crossover,
        "rows": rows,
    }), 0


def _cmd_rho2(args):
    torus = torus_from_dict(_load_input(args.input))
    rep = rho2_rank(torus, samples=args.samples, seed=args.seed,
                    truncation=args.truncation)
    return _report("theta", "multiplication-map surjectivity", {
        "dim_sym2": rep.dim_sym2,
        "dim_target": rep.dim_target,
        "numerical_rank": rep.numerical_rank,
        "surjective": rep.surjective,
        "verdict": rep.label,
        "sample_count": rep.sample_count,
        "seed": args.seed,
        "singular_values": list(rep.singular_values),
    }), 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abelkit",
        description="Lattice, tube-volume, criterion, and theta computations "
                    "for polarized complex tori.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, needs_input=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if needs_input:
            p.add_argument("--input", help="JSON file path or inline JSON object")
        p.add_argument("--format", choices=("json", "text"), default="json")
        return p

    add("validate", _cmd_validate, "check torus invariants from JSON")
    p = add("bs", _cmd_bs, "minimal squared length of the polarization metric")
    p.add_argument("--exact", action="store_true")
    p = add("rel-bs", _cmd_rel_bs, "minimal squared projected length for a subtorus")
    p.add_argument("--exact", action="store_true")
    p = add("diagonal", _cmd_diagonal, "halving identity for the diagonal in a product")
    p.add_argument("--exact", action="store_true")
    p = add("tube", _cmd_tube, "curve area in a tube vs the multiplicity bound")
    p.add_argument("--tol", type=float, default=1e-7)
    p = add("federer", _cmd_federer, "Euclidean density bound for a curve in a ball")
    p.add_argument("--tol", type=float, default=1e-7)
    p = add("criteria", _cmd_criteria, "projective-normality criterion pipeline",
            needs_input=True)
    p.add_argument("--type", help="polarization type, e.g. 4 or 1,64")
    p.add_argument("--n", type=int, help="expected dimension (cross-check)")
    p.add_argument("--m-source", choices=("bauer", "computed"), default="bauer")
    p = add("table", _cmd_table, "bound comparison table", needs_input=False)
    p.add_argument("--n-max", type=int, required=True)
    p = add("rho2", _cmd_rho2, "numerical surjectivity of the multiplication map")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--truncation", type=int, default=None)
    return parser


_USER_ERRORS = (InputError, TorusError, SVPError, TubeError, CurveError,
                ThetaError, ValueError)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, code = args.func(args)
    except _USER_ERRORS as e:
        _emit(_report("cli", "error", {"ok": False, "error": str(e)}), args.format)
        return 2
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e}", file=sys.stderr)
        return 1
    _emit(payload, args.format)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
