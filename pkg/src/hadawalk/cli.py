"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 resource cap, 64 usage.
Output is deterministic for fixed flags; timings are only emitted with
``--timing``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import bounds, exact, integral, unitset, verify, walksim
from .core import Parameters, pair_count
from .errors import CapExceeded, HadawalkError

EXIT_OK, EXIT_FAIL, EXIT_CAP, EXIT_USAGE = 0, 1, 2, 64

DEFAULTS = {
    "format": "json",
    "method": "auto",
    "samples": 10 ** 6,
    "chains": 10 ** 6,
    "seed": 0,
    "radius": math.pi,
    "region": "residual",
    "alpha": 0.1,
    "beta": 0.1,
    "kind": "existence",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- helpers ---------------------------------------------------------------------

def parse_range(text: str) -> list[int]:
    """``a``, ``a:b`` or ``a:b:s`` (inclusive of b)."""
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise UsageError(f"bad range {text!r}") from None
    if len(parts) == 1:
        return parts
    if len(parts) > 3 or (len(parts) == 3 and parts[2] <= 0):
        raise UsageError(f"bad range {text!r}")
    a, b = parts[0], parts[1]
    step = parts[2] if len(parts) == 3 else 1
    if b < a:
        raise UsageError(f"empty range {text!r}")
    return list(range(a, b + 1, step))


def load_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(_jsonable(v))
    return str(v)


def render(records: list[dict], fmt: str, single: bool = False) -> str:
    if fmt == "json":
        payload = records[0] if single and len(records) == 1 else records
        return json.dumps(_jsonable(payload), indent=2) + "\n"
    cols: list[str] = []
    for r in records:
        cols.extend(k for k in r if k not in cols)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in records:
            w.writerow([_cell(r.get(c)) for c in cols])
        return buf.getvalue()
    rows = [cols] + [[_cell(r.get(c)) for c in cols] for r in records]
    widths = [max(len(row[i]) for row in rows) for i in range(len(cols))]
    return "".join("  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() + "\n" for row in rows)


def write_output(text: str, out_path: str | None) -> None:
    if not out_path:
        sys.stdout.write(text)
        return
    target = os.path.abspath(out_path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".hw-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _strip_timing(rec: dict, timing: bool) -> dict:
    if not timing:
        for key in ("wall_time_ms", "elapsed_ms"):
            rec.pop(key, None)
    return rec


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command}: missing {', '.join(missing)}")


# -- commands ---------------------------------------------------------------------

def cmd_count(args) -> tuple[list[dict], int]:
    _need(args, "n", "t")
    params = Parameters(int(args.n), int(args.t))
    if args.method == "closed" and args.literal_n2:
        res = exact.count_closed_form(params, literal_n2=True)
    else:
        res = exact.count(params, args.method)
    return [_strip_timing(res.to_record(), args.timing)], EXIT_OK


def _suite_checks(args) -> list:
    suite = args.suite
    seed = int(args.seed)
    if suite == "lambda":
        _need(args, "n")
        return verify.lambda_suite(int(args.n))
    if suite == "charfn":
        _need(args, "n")
        delta = float(args.delta) if args.delta is not None else None
        return verify.charfn_suite(int(args.n), delta, min(int(args.samples), 10 ** 5), seed)
    if suite == "sandwich":
        _need(args, "n", "t")
        return verify.sandwich_suite(int(args.n), int(args.t))
    if suite == "residual":
        _need(args, "n", "t", "delta")
        return verify.residual_suite(int(args.n), int(args.t), float(args.delta), int(args.samples), seed)
    if suite == "inversion":
        _need(args, "n", "t")
        return verify.inversion_suite(int(args.n), int(args.t))
    if suite == "branching":
        _need(args, "n", "t")
        return verify.branching_suite(int(args.n), int(args.t))
    if suite == "appendix":
        return verify.appendix_suite(int(args.samples), seed)
    if suite == "simulate":
        _need(args, "n", "t")
        return verify.simulate_suite(int(args.n), int(args.t), int(args.chains), seed)
    raise UsageError(f"unknown suite {suite!r}")


def cmd_verify(args) -> tuple[list[dict], int]:
    checks = _suite_checks(args)
    records = [c.to_record() for c in checks]
    return records, EXIT_OK if all(c.ok for c in checks) else EXIT_FAIL


def table_row(n: int, t: int) -> dict:
    row = dict.fromkeys(bounds.CSV_COLUMNS)
    row.update(n=n, t=t, count=None, brute_check="n/a", note="")
    row["branching_log2"] = pair_count(n + 1)
    try:
        res = exact.count(Parameters(n, t))
    except CapExceeded as exc:
        row["note"] = f"cap: {exc}"
        return row
    row["count"] = str(res.matrix_count)
    row["exact_log2"] = bounds._log2_int(res.matrix_count) if res.matrix_count else -math.inf
    if t > 0:
        row["exactR"] = float(res.return_prob) / math.exp(bounds.log_a(n, t))
    if t > 0 and t % 4 == 0:
        row["asym_log2"] = bounds.asymptotic_log2(n, t)
        if n >= 3:
            rep = bounds.sandwich(n, t, res.return_prob)
            row.update(delta=rep.delta, L=rep.L, U=rep.U, exactR=rep.ratio_R)
            if not rep.holds:
                row["note"] = "sandwich violated"
    if n * t <= exact.BRUTE_FORCE_MAX_CELLS:
        ok = exact.brute_force_count(Parameters(n, t)).matrix_count == res.matrix_count
        row["brute_check"] = "ok" if ok else "MISMATCH"
        if not ok:
            row["note"] = "brute-force mismatch"
    return row


def cmd_table(args) -> tuple[list[dict], int]:
    _need(args, "n", "t")
    cells = [(n, t) for n in parse_range(str(args.n)) for t in parse_range(str(args.t))]
    for n, t in cells:
        Parameters(n, t)
    workers = walksim.thread_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(lambda c: table_row(*c), cells))
    else:
        rows = [table_row(*c) for c in cells]
    for r in rows:
        if r["note"]:
            print(f"warning: n={r['n']} t={r['t']}: {r['note']}", file=sys.stderr)
    return rows, EXIT_OK


def cmd_bounds(args) -> tuple[list[dict], int]:
    _need(args, "n", "t")
    n, t = int(args.n), int(args.t)
    rep = bounds.sandwich(n, t, exact.cached_prob(n, t))
    rec = rep.to_record()
    rec.pop("rows")
    return [rec], EXIT_OK


def cmd_threshold(args) -> tuple[list[dict], int]:
    _need(args, "n")
    n = int(args.n)
    if args.kind == "abundance":
        rep = bounds.abundance_threshold(n, float(args.t) if args.t is not None else None)
        rec = asdict(rep)
        rec["u1_ok"] = rep.u1_ok
        return [rec], EXIT_OK
    if args.kind == "existence":
        rep = bounds.existence_threshold(n, float(args.alpha), float(args.beta))
        return [rep.to_record()], EXIT_OK
    raise UsageError(f"unknown threshold kind {args.kind!r}")


def cmd_integrate(args) -> tuple[list[dict], int]:
    _need(args, "n", "t")
    params = Parameters(int(args.n), int(args.t))
    if args.method in ("auto", "grid"):
        rec = integral.inversion_exact_grid(params).to_record()
    elif args.region == "residual":
        _need(args, "delta")
        delta = float(args.delta)
        rec = integral.residual_integral_mc(params, None, delta, int(args.samples), int(args.seed)).to_record()
        rec["bound"] = math.exp(-11.0 / 24.0 * params.t * delta ** 2)
        rec["holds"] = abs(rec["value"] + 1j * rec["imag"]) - 3 * rec["std_error"] <= rec["bound"]
    else:
        rec = integral.integrate_box_mc(params, None, None, float(args.radius),
                                        int(args.samples), int(args.seed)).to_record()
    return [_strip_timing(rec, args.timing)], EXIT_OK


def cmd_simulate(args) -> tuple[list[dict], int]:
    _need(args, "n", "t")
    cfg = walksim.SimConfig(int(args.n), int(args.t), int(args.chains), int(args.seed))
    return [_strip_timing(walksim.simulate_return_prob(cfg).to_record(), args.timing)], EXIT_OK


def cmd_lambda(args) -> tuple[list[dict], int]:
    _need(args, "n")
    records = []
    for line in unitset.dump_lambda(int(args.n)):
        code, tag, bucket = line.split()
        records.append({"digits": code, "class": tag, "psi": bucket})
    return records, EXIT_OK


COMMANDS = {
    "count": cmd_count,
    "verify": cmd_verify,
    "table": cmd_table,
    "bounds": cmd_bounds,
    "threshold": cmd_threshold,
    "integrate": cmd_integrate,
    "simulate": cmd_simulate,
    "lambda": cmd_lambda,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"))
    common.add_argument("--out", help="write output here (atomically) instead of stdout")
    common.add_argument("--config", help="key=value file; explicit flags take precedence")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings")

    p = _Parser(prog="hadawalk", description="Partial Hadamard matrix counts via the lattice walk.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("count", parents=[common], help="exact count N(n, t)")
    c.add_argument("--n")
    c.add_argument("--t")
    c.add_argument("--method", choices=("auto", "dp", "closed", "brute"))
    c.add_argument("--literal-n2", action="store_true", help="use the C(t,2) two-row form")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", required=True, choices=verify.SUITES)
    for flag in ("--n", "--t", "--delta", "--samples", "--chains", "--seed"):
        v.add_argument(flag)

    tb = sub.add_parser("table", parents=[common], help="sweep (n, t); ranges as a:b:s")
    tb.add_argument("--n")
    tb.add_argument("--t")

    b = sub.add_parser("bounds", parents=[common], help="sandwich envelopes for one (n, t)")
    b.add_argument("--n")
    b.add_argument("--t")

    th = sub.add_parser("threshold", parents=[common], help="abundance / existence thresholds")
    th.add_argument("--kind", choices=("abundance", "existence"))
    for flag in ("--n", "--t", "--alpha", "--beta"):
        th.add_argument(flag)

    it = sub.add_parser("integrate", parents=[common], help="inversion integral of psi^t")
    it.add_argument("--method", choices=("auto", "grid", "mc"))
    it.add_argument("--region", choices=("residual", "box"))
    for flag in ("--n", "--t", "--delta", "--radius", "--samples", "--seed"):
        it.add_argument(flag)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo return probability")
    for flag in ("--n", "--t", "--chains", "--seed"):
        s.add_argument(flag)

    lm = sub.add_parser("lambda", parents=[common], help="dump the unit-modulus set")
    lm.add_argument("--n")
    return p


def _resolve(args) -> None:
    cfg = load_config(args.config) if args.config else {}
    for key, value in cfg.items():
        if getattr(args, key, "absent") is None:
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, "absent") is None:
            setattr(args, key, value)
    if args.format not in ("json", "csv", "table"):
        raise UsageError(f"bad format {args.format!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_usage().strip())
        _resolve(args)
        records, code = COMMANDS[args.command](args)
        single = args.command not in ("table", "verify", "lambda")
        write_output(render(records, args.format, single), args.out)
        return code
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (HadawalkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
