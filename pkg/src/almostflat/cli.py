"""Batch command line: experiment configs in, CSV/JSON tables out.

Exit codes: 0 success, 1 validation error (bad input, unknown flag or key),
2 resource refusal (a coset space above the BFS cap).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import tempfile
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .classify import classify_zn_by_zm, lower_central_series
from .constructions import FamilySpec, heisenberg_space
from .diameter import DEFAULT_BFS_CAP, BfsCapExceeded, sandwich_check
from .exact import IntMatrix, IntPoly, hnf
from .modp import primes_up_to, splitting_primes
from .profiler import fit_exponent, records_to_csv, sweep, violation_search
from .quotients import CosetSpace, LatticeSemidirectQuotient

POLY_GRAMMAR = """\
polynomials: either a JSON array of integer coefficients, constant term first
(e.g. [1,-3,1]), or an expression in x with integer coefficients and ^ powers,
e.g. "x^2-3x+1", "2*x^3 - x + 7". Either form may be stored in a file.
"""

DEFAULT_ALPHA = {"heis_quotients": 1 / 3, "heis_cosets": 1 / 4, "zn_by_z": 0.9, "zn_by_zm": 0.9}


class ValidationError(ValueError):
    pass


class ResourceRefusal(RuntimeError):
    pass


# -- input parsing ------------------------------------------------------------

_TERM = re.compile(r"([+-])?(\d+)?\*?(x(?:\^(\d+))?)?")


def parse_poly(text: str) -> IntPoly:
    s = text.strip()
    if s.startswith("["):
        coeffs = json.loads(s)
        if not isinstance(coeffs, list) or not all(isinstance(c, int) for c in coeffs):
            raise ValidationError(f"bad coefficient array: {text!r}")
        return IntPoly(tuple(coeffs))
    s = s.replace(" ", "")
    if not s:
        raise ValidationError("empty polynomial")
    coeffs: dict[int, int] = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, num, var, power = m.groups()
        if m.end() == pos or (num is None and var is None):
            raise ValidationError(f"cannot parse polynomial {text!r} at position {pos}")
        if pos > 0 and sign is None:
            raise ValidationError(f"missing operator in {text!r} at position {pos}")
        c = int(num) if num is not None else 1
        if sign == "-":
            c = -c
        k = (int(power) if power is not None else 1) if var else 0
        coeffs[k] = coeffs.get(k, 0) + c
        pos = m.end()
    top = max(coeffs)
    return IntPoly(tuple(coeffs.get(k, 0) for k in range(top + 1)))


def _read_arg(value: str) -> str:
    """Contents of ``value`` if it names a file, otherwise ``value`` itself."""
    path = Path(value)
    try:
        if path.is_file():
            return path.read_text(encoding="utf-8")
    except OSError:
        pass
    return value


def _load_json(value: str) -> Any:
    try:
        return json.loads(_read_arg(value))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from exc


def _matrix(data: Any) -> IntMatrix:
    if not (isinstance(data, list) and data and all(isinstance(r, list) for r in data)):
        raise ValidationError("a matrix must be a non-empty list of rows")
    try:
        return IntMatrix.from_json(data)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad matrix: {exc}") from exc


def _matrices(data: Any) -> list[IntMatrix]:
    if isinstance(data, dict):
        data = data.get("matrices", data.get("matrix"))
    if isinstance(data, list) and data and isinstance(data[0], list) and data[0] \
            and not isinstance(data[0][0], list):
        return [_matrix(data)]
    if not isinstance(data, list) or not data:
        raise ValidationError("expected a matrix or a non-empty list of matrices")
    return [_matrix(m) for m in data]


# -- output -------------------------------------------------------------------

def _dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    """Write atomically so a failure never leaves a partial file behind."""
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


# -- commands -----------------------------------------------------------------

def _sweep_output(spec: FamilySpec, args: argparse.Namespace) -> tuple[str, bool]:
    records = sweep(spec, args.bfs_cap, args.threads, timed=args.timing)
    refused = any(r.refused for r in records)
    if args.format == "csv":
        return records_to_csv(records), refused
    alpha = args.alpha if args.alpha is not None else DEFAULT_ALPHA[spec.kind]
    try:
        fit = fit_exponent(records, args.tail_fraction).to_json()
    except ValueError:
        fit = None
    if fit is not None and args.band is not None:
        lo, hi = args.band
        fit["band"] = [lo, hi]
        fit["in_band"] = lo <= fit["slope"] <= hi
    summary = {
        "config": {"spec": spec.to_json(), "bfs_cap": args.bfs_cap,
                   "tail_fraction": args.tail_fraction, "alpha": alpha, "c": args.c},
        "fit": fit,
        "violation": violation_search(records, alpha, args.c).to_json(),
        "records": [dict(zip(("kind", "param", "variant", "index", "diameter", "normal",
                              "runtime_ms"),
                             (r.kind, r.param, r.variant, r.index, r.diameter, r.normal,
                              r.runtime_ms)))
                    for r in records],
    }
    return _dump_json(summary), refused


def cmd_heis_quotients(args):
    return _sweep_output(FamilySpec("heis_quotients", args.p_max), args)


def cmd_heis_cosets(args):
    return _sweep_output(FamilySpec("heis_cosets", args.n_max), args)


def cmd_zsemidirect(args):
    data = _load_json(args.spec)
    if not isinstance(data, dict):
        raise ValidationError("family spec must be a JSON object")
    if data.get("kind") not in ("zn_by_z", "zn_by_zm"):
        raise ValidationError("zsemidirect needs kind zn_by_z or zn_by_zm")
    try:
        spec = FamilySpec.from_json(data)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad family spec: {exc}") from exc
    return _sweep_output(spec, args)


def cmd_classify(args):
    mats = _matrices(_load_json(args.matrix))
    result = classify_zn_by_zm(mats)
    if args.format == "csv":
        row = [result.virtually_nilpotent, result.nilpotent,
               result.witness_matrix_index or "", result.lcs.nilpotency_class or ""]
        return _table(("virtually_nilpotent", "nilpotent", "witness_matrix_index", "class"),
                      [[str(x).lower() if isinstance(x, bool) else x for x in row]]), False
    return _dump_json({"matrices": [m.to_json() for m in mats], **result.to_json()}), False


def cmd_lcs(args):
    mats = _matrices(_load_json(args.matrices))
    report = lower_central_series(mats)
    if args.format == "csv":
        rows = [[i + 2, t.rank, json.dumps([list(b) for b in t.basis])]
                for i, t in enumerate(report.terms)]
        return _table(("term", "rank", "basis"), rows), False
    return _dump_json({"matrices": [m.to_json() for m in mats], **report.to_json()}), False


def _polys(values: Sequence[str]) -> list[IntPoly]:
    polys = [parse_poly(_read_arg(v)) for v in values]
    for f in polys:
        if f.degree < 1 or not f.is_monic():
            raise ValidationError(f"{f.to_string()} must be monic of positive degree")
    return polys


def cmd_primes(args):
    polys = _polys(args.poly)
    primes = splitting_primes(polys, args.p_max)
    if args.format == "csv":
        return _table(("p",), [[p] for p in primes]), False
    return _dump_json({"polys": [f.to_string() for f in polys], "p_max": args.p_max,
                       "primes": primes}), False


def cmd_density(args):
    (f,) = _polys(args.poly)
    total = len(primes_up_to(args.p_max))
    hits = len(splitting_primes([f], args.p_max))
    density = hits / total if total else 0.0
    if args.format == "csv":
        return _table(("poly", "p_max", "hits", "primes", "density"),
                      [[f.to_string(), args.p_max, hits, total, repr(density)]]), False
    return _dump_json({"poly": f.to_string(), "p_max": args.p_max, "hits": hits,
                       "primes": total, "density": density}), False


def _tower(data: dict):
    """(space G/K, membership test for H) for a sandwich spec."""
    kind = data.get("tower")
    if kind == "heisenberg":
        p = int(data["p"])
        if p < 2:
            raise ValidationError("p must be at least 2")
        q = p * p
        space = heisenberg_space((q, q, q))
        return space, lambda g: all(x % p == 0 for x in g)
    if kind == "cyclic":
        order, sub = int(data["order"]), int(data["subgroup_index"])
        if order < 1 or sub < 1 or order % sub:
            raise ValidationError("subgroup_index must divide order")
        shape = LatticeSemidirectQuotient((), hnf([[order]], 1), ())
        return CosetSpace.natural(shape), lambda g: g[0] % sub == 0
    raise ValidationError(f"unknown tower {kind!r}; expected heisenberg or cyclic")


def cmd_sandwich(args):
    data = _load_json(args.spec)
    towers = data if isinstance(data, list) else [data]
    rows = []
    for t in towers:
        if not isinstance(t, dict):
            raise ValidationError("each tower must be a JSON object")
        try:
            space, in_h = _tower(t)
        except KeyError as exc:
            raise ValidationError(f"missing tower field {exc}") from exc
        res = sandwich_check(space, in_h, args.bfs_cap)
        rows.append({"tower": t, "diam_t_hk": res.diam_t_hk, "diam_s_gk": res.diam_s_gk,
                     "diam_s_gh": res.diam_s_gh, "holds": res.holds})
    if args.format == "csv":
        return _table(("tower", "diam_t_hk", "diam_s_gk", "diam_s_gh", "holds"),
                      [[json.dumps(r["tower"], sort_keys=True), r["diam_t_hk"], r["diam_s_gk"],
                        r["diam_s_gh"], str(r["holds"]).lower()] for r in rows]), False
    return _dump_json({"towers": rows}), False


COMMANDS = {
    "heis-quotients": cmd_heis_quotients,
    "heis-cosets": cmd_heis_cosets,
    "zsemidirect": cmd_zsemidirect,
    "classify": cmd_classify,
    "lcs": cmd_lcs,
    "primes": cmd_primes,
    "density": cmd_density,
    "sandwich": cmd_sandwich,
}


# -- parser -------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--bfs-cap", type=_positive_int, default=DEFAULT_BFS_CAP)
    common.add_argument("--threads", type=_positive_int, default=1)

    sweeping = _Parser(add_help=False)
    sweeping.add_argument("--tail-fraction", type=float, default=0.5)
    sweeping.add_argument("--alpha", type=float, help="violation exponent (family default)")
    sweeping.add_argument("--c", type=float, default=1.0, help="violation constant")
    sweeping.add_argument("--band", type=float, nargs=2, metavar=("LO", "HI"),
                          help="report whether the fitted slope lies in [LO, HI]")
    sweeping.add_argument("--timing", action="store_true",
                          help="record runtime_ms (makes output run-dependent)")

    parser = _Parser(prog="almostflat", description=__doc__.splitlines()[0],
                     epilog=POLY_GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("heis-quotients", parents=[common, sweeping],
                       help="sweep H/K_p over primes p <= P_MAX")
    p.add_argument("--p-max", type=_positive_int, required=True)
    p = sub.add_parser("heis-cosets", parents=[common, sweeping],
                       help="sweep H/H_n over n <= N_MAX")
    p.add_argument("--n-max", type=_positive_int, required=True)
    p = sub.add_parser("zsemidirect", parents=[common, sweeping],
                       help="sweep a Z^n x| Z^m family given as JSON")
    p.add_argument("--spec", required=True, help="family spec file or inline JSON")
    p = sub.add_parser("classify", parents=[common], help="virtual nilpotency verdicts")
    p.add_argument("--matrix", required=True, help="matrix (or list) file or inline JSON")
    p = sub.add_parser("lcs", parents=[common], help="lower central series inside Z^n")
    p.add_argument("--matrices", required=True, help="list of matrices, file or inline JSON")
    for name, text in (("primes", "primes p <= P_MAX in Pr(f)"),
                       ("density", "fraction of primes p <= P_MAX in Pr(f)")):
        p = sub.add_parser(name, parents=[common], help=text, epilog=POLY_GRAMMAR)
        p.add_argument("--poly", required=True, action="append",
                       help="polynomial, file or inline (repeatable for primes)")
        p.add_argument("--p-max", type=_positive_int, required=True)
    p = sub.add_parser("sandwich", parents=[common], help="check the diameter sandwich")
    p.add_argument("--spec", required=True,
                   help='tower JSON, e.g. {"tower":"heisenberg","p":2} or '
                        '{"tower":"cyclic","order":12,"subgroup_index":3}')
    p = sub.add_parser("run", help="run an experiment config file")
    p.add_argument("--config", required=True)
    return parser


# -- experiment configs -------------------------------------------------------

_COMMON_KEYS = {"command", "out", "format", "bfs_cap", "threads"}
_SWEEP_KEYS = {"tail_fraction", "alpha", "c", "band", "timing"}
CONFIG_KEYS = {
    "heis-quotients": _COMMON_KEYS | _SWEEP_KEYS | {"p_max"},
    "heis-cosets": _COMMON_KEYS | _SWEEP_KEYS | {"n_max"},
    "zsemidirect": _COMMON_KEYS | _SWEEP_KEYS | {"spec"},
    "classify": _COMMON_KEYS | {"matrix"},
    "lcs": _COMMON_KEYS | {"matrices"},
    "primes": _COMMON_KEYS | {"poly", "p_max"},
    "density": _COMMON_KEYS | {"poly", "p_max"},
    "sandwich": _COMMON_KEYS | {"spec"},
}


def config_to_argv(config: Any) -> list[str]:
    """Validate an ExperimentConfig object and translate it to CLI arguments."""
    if not isinstance(config, dict):
        raise ValidationError("config must be a JSON object")
    command = config.get("command")
    if command not in CONFIG_KEYS:
        raise ValidationError(f"unknown command {command!r}")
    unknown = sorted(set(config) - CONFIG_KEYS[command])
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    argv = [command]
    for key, value in config.items():
        if key == "command":
            continue
        flag = "--" + key.replace("_", "-")
        if key == "timing":
            if not isinstance(value, bool):
                raise ValidationError("timing must be a boolean")
            if value:
                argv.append(flag)
        elif key == "band":
            if not (isinstance(value, list) and len(value) == 2):
                raise ValidationError("band must be [lo, hi]")
            argv += [flag, str(value[0]), str(value[1])]
        elif key == "poly":
            for f in value if isinstance(value, list) and value and not isinstance(
                    value[0], int) else [value]:
                argv += [flag, f if isinstance(f, str) else json.dumps(f)]
        elif isinstance(value, (dict, list)):
            argv += [flag, json.dumps(value)]
        elif isinstance(value, bool) or value is None:
            raise ValidationError(f"{key} has an invalid value")
        else:
            argv += [flag, str(value)]
    return argv


def _dispatch(argv: Sequence[str]) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        config = _load_json(args.config)
        return _dispatch(config_to_argv(config))
    try:
        text, refused = COMMANDS[args.command](args)
    except BfsCapExceeded as exc:
        raise ResourceRefusal(str(exc)) from exc
    _emit(text, args.out)
    if refused:
        print("some family members exceeded the BFS cap; their diameter is blank",
              file=sys.stderr)
        return 2
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    try:
        return _dispatch(sys.argv[1:] if argv is None else argv)
    except ResourceRefusal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError, KeyError, TypeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
