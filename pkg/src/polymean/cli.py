"""``polymean`` command line: exact, asympt, verify, check."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from fractions import Fraction

from . import report
from .algebra import DEFAULT_PRECISION_BITS, ApproxField
from .asymptotics import check_conda, check_propA, check_propB, gorodetsky_expand, thm2_expand
from .errors import (
    BudgetExceeded,
    D1OutOfRange,
    FloatProfileNotSupported,
    NonPrimeModulus,
    PolymeanError,
    UnknownPreset,
)
from .exact import T_exact_euler, T_poly_thm1, euler_product_series
from .oracle import DEFAULT_WORK_BUDGET, brute_T, irreducible_sieve, is_prime, signature_histogram
from .profiles import make_profile

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_UNSUPPORTED = 3
EXIT_BUDGET = 4

PRECISION_ENV = "POLYMEAN_PRECISION_BITS"

# flag name -> preset keyword
_PRESET_FLAGS = {
    "m": "m",
    "k": "k",
    "r": "r",
    "alpha": "alpha",
    "c": "c",
    "m_list": "m_list",
    "gamma_list": "gamma_list",
    "values": "values",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_int_list(text: str) -> list[int]:
    """``"3"``, ``"3,5,8"``, ``"3..8"`` or a mix such as ``"1..3,10"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("..")
        try:
            if sep:
                a, b = int(lo), int(hi)
                if b < a:
                    raise UsageError(f"empty range {part!r}")
                out.extend(range(a, b + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"not an integer list: {text!r}") from None
    if not out:
        raise UsageError(f"not an integer list: {text!r}")
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--precision-bits", type=int, default=None, help=f"float precision (env {PRECISION_ENV}, default {DEFAULT_PRECISION_BITS})")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_preset(p: argparse.ArgumentParser, *, required: bool = True) -> None:
    p.add_argument("--preset", required=required)
    g = p.add_argument_group("preset parameters")
    g.add_argument("--m")
    g.add_argument("--k")
    g.add_argument("--r")
    g.add_argument("--alpha")
    g.add_argument("--c")
    g.add_argument("--m-list", dest="m_list")
    g.add_argument("--gamma-list", dest="gamma_list")
    g.add_argument("--values", help="comma-separated d_1,d_2,... for the explicit preset")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polymean", description="Mean values of multiplicative functions over F_q[T].")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", help="exact T(N) as a polynomial in q or a rational at fixed q")
    _add_preset(p)
    p.add_argument("--N", required=True, help="degree, list or range, e.g. 3 or 3..8")
    p.add_argument("--q", help="comma-separated q values (exact-value mode)")
    p.add_argument("--mode", choices=("exact-poly", "exact-value"))
    p.add_argument("--method", choices=("euler", "poly"), default="euler", help="route used in exact-value mode")
    _add_common(p)

    p = sub.add_parser("asympt", help="truncated expansions with error bounds")
    _add_preset(p)
    p.add_argument("--mode", choices=("thm2", "gorodetsky"), required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--q", required=True, type=int)
    p.add_argument("--h", type=int, help="number of kept terms (thm2)")
    p.add_argument("--n", type=int, help="number of correction terms (gorodetsky)")
    p.add_argument("--conda-depth", type=int, default=100)
    p.add_argument("--compare-exact", action="store_true", help="also compute the exact value and the deviation")
    p.add_argument("--strict", action="store_true", help="exit 2 when a precondition fails")
    _add_common(p)

    p = sub.add_parser("verify", help="three-way check: polynomial, Euler product, brute force")
    p.add_argument("--presets", required=True, help="comma-separated preset names")
    p.add_argument("--max-N", type=int, required=True)
    p.add_argument("--q", required=True, help="comma-separated primes")
    p.add_argument("--max-N-for", action="append", default=[], metavar="Q=N", help="override --max-N for one prime")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--work-budget", type=int, default=DEFAULT_WORK_BUDGET)
    _add_common(p)

    p = sub.add_parser("check", help="audit the sufficient conditions on d_k")
    _add_preset(p)
    p.add_argument("--K", type=int, required=True)
    _add_common(p)
    return parser


def _preset_params(args) -> dict:
    return {kw: getattr(args, flag) for flag, kw in _PRESET_FLAGS.items() if getattr(args, flag, None) is not None}


def _precision(args) -> int:
    if args.precision_bits is not None:
        bits = args.precision_bits
    else:
        env = os.environ.get(PRECISION_ENV)
        try:
            bits = int(env) if env else DEFAULT_PRECISION_BITS
        except ValueError:
            raise UsageError(f"{PRECISION_ENV}={env!r} is not an integer") from None
    if bits < 16:
        raise UsageError("precision must be at least 16 bits")
    return bits


def _profile(name: str, params: dict, bits: int):
    if name in ("inv_tau_alpha", "c_omega", "g7", "explicit"):
        params = {**params, "precision_bits": bits}
    return make_profile(name, **params)


def cmd_exact(args, bits: int, warn: list):
    params = _preset_params(args)
    prof = _profile(args.preset, params, bits)
    Ns = parse_int_list(args.N)
    mode = args.mode or ("exact-value" if args.q else "exact-poly")
    inputs = {"preset": args.preset, "params": params, "N": Ns, "mode": mode}
    results = []
    if mode == "exact-poly":
        if args.q:
            raise UsageError("--q is only used with --mode exact-value")
        for N in Ns:
            poly = T_poly_thm1(prof, N)
            results.append({"preset": prof.label, "N": N, "polynomial": str(poly), "coefficients": list(poly.coeffs)})
        return inputs, results, [r["polynomial"] for r in results]
    if not args.q:
        raise UsageError("--mode exact-value needs --q")
    qs = parse_int_list(args.q)
    if any(q < 2 for q in qs):
        raise UsageError("q must be at least 2")
    inputs.update(q=qs, method=args.method)
    for q in qs:
        if args.method == "euler":
            # one product serves every N at this q
            series = euler_product_series(prof, max(Ns), q)
            values = {N: series[N] for N in Ns}
        else:
            values = {N: T_poly_thm1(prof, N)(q) for N in Ns}
        for N in Ns:
            results.append({"preset": prof.label, "N": N, "q": q, "value": values[N]})
    return inputs, results, [_fmt(r["value"]) for r in results]


def cmd_asympt(args, bits: int, warn: list):
    if args.mode == "thm2":
        if args.n is not None:
            raise UsageError("--n belongs to --mode gorodetsky; use --h with thm2")
        order = 1 if args.h is None else args.h
    else:
        if args.h is not None:
            raise UsageError("--h belongs to --mode thm2; use --n with gorodetsky")
        order = 0 if args.n is None else args.n
    params = _preset_params(args)
    prof = _profile(args.preset, params, bits)
    Ns = parse_int_list(args.N)
    inputs = {"preset": args.preset, "params": params, "mode": args.mode, "N": Ns, "q": args.q}
    inputs["h" if args.mode == "thm2" else "n"] = order
    fld = ApproxField(bits)
    results = []
    lines = []
    failing = False
    for N in Ns:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.mode == "thm2":
                rep = thm2_expand(prof, N, args.q, order, conda_depth=args.conda_depth, precision_bits=bits)
            else:
                rep = gorodetsky_expand(prof, N, args.q, order, precision_bits=bits, conda_depth=args.conda_depth)
        for w in caught:
            warn.append(str(w.message))
        for pc in rep.unsatisfied:
            warn.append(f"N={N}: precondition {pc.name} not met (required {_fmt(pc.required)}, actual {_fmt(pc.actual)})")
        failing = failing or bool(rep.unsatisfied)
        rec = {
            "preset": prof.label,
            "mode": rep.mode,
            "N": N,
            "q": args.q,
            "order": order,
            "main_value": rep.main_value,
            "error_bound": rep.error_bound,
            "bound_kind": rep.bound_kind,
            "rigorous": rep.rigorous,
            "preconditions": [
                {"name": pc.name, "required": pc.required, "actual": pc.actual, "satisfied": pc.satisfied} for pc in rep.preconditions
            ],
        }
        if args.compare_exact:
            exact = T_exact_euler(prof, N, args.q)
            dev = fld.promote(exact) - fld.promote(rep.main_value)
            rec["exact_value"] = exact
            rec["deviation"] = dev
            rec["relative_deviation"] = abs(dev) / abs(fld.promote(exact)) if exact else None
            rec["within_bound"] = bool(abs(dev) <= rep.error_bound)
        results.append(rec)
        lines.extend(_render_expansion(rec))
    if args.strict and failing:
        return inputs, results, lines, EXIT_USAGE
    return inputs, results, lines, EXIT_OK


def _render_expansion(rec: dict) -> list[str]:
    lines = [
        f"{rec['mode']} {rec['preset']} N={rec['N']} q={rec['q']} order={rec['order']}",
        f"  main value   {_fmt(rec['main_value'])}",
        f"  error bound  {_fmt(rec['error_bound'])} ({rec['bound_kind']})",
    ]
    if "exact_value" in rec:
        lines.append(f"  exact value  {_fmt(rec['exact_value'])}")
        lines.append(f"  rel. dev.    {_fmt(rec['relative_deviation'])}  within bound: {rec['within_bound']}")
    for pc in rec["preconditions"]:
        mark = "ok  " if pc["satisfied"] else "FAIL"
        lines.append(f"  [{mark}] {pc['name']}: required {_fmt(pc['required'])}, actual {_fmt(pc['actual'])}")
    lines.append(f"  rigorous: {'yes' if rec['rigorous'] else 'no'}")
    return lines


def cmd_verify(args, bits: int, warn: list):
    names = [s.strip() for s in args.presets.split(",") if s.strip()]
    qs = parse_int_list(args.q)
    for q in qs:
        if not is_prime(q):
            raise NonPrimeModulus(f"the brute-force oracle needs a prime modulus, got q={q}")
    limits = {q: args.max_N for q in qs}
    for item in args.max_N_for:
        q_txt, sep, n_txt = item.partition("=")
        if not sep:
            raise UsageError(f"--max-N-for expects Q=N, got {item!r}")
        try:
            limits[int(q_txt)] = int(n_txt)
        except ValueError:
            raise UsageError(f"--max-N-for expects Q=N, got {item!r}") from None
    profiles = [_profile(n, {}, bits) for n in names]
    inputs = {"presets": names, "q": qs, "max_N": {q: limits[q] for q in qs}}
    results, lines = [], []
    first_bad = None
    for q in qs:
        top = limits[q]
        table = irreducible_sieve(q, max(1, top // 2))
        euler = {prof.name: euler_product_series(prof, top, q) for prof in profiles}
        for N in range(1, top + 1):
            # a signature count is profile independent and shared by all presets
            hist = signature_histogram(q, N, workers=args.workers, work_budget=args.work_budget, table=table)
            for prof in profiles:
                poly = T_poly_thm1(prof, N)(q) if prof.exact else None
                ev = euler[prof.name][N]
                bf = brute_T(prof, q, N, histogram=hist)
                ok = ev == bf and (poly is None or poly == ev)
                rec = {"preset": prof.label, "N": N, "q": q, "poly": poly, "euler": ev, "brute": bf, "status": "PASS" if ok else "FAIL"}
                results.append(rec)
                lines.append(f"{rec['status']}  {prof.label:<16} q={q} N={N:<3} {_fmt(ev)}")
                if not ok and first_bad is None:
                    first_bad = rec
    code = EXIT_OK
    if first_bad is not None:
        code = EXIT_MISMATCH
        msg = (
            f"first mismatch: preset={first_bad['preset']} q={first_bad['q']} N={first_bad['N']} "
            f"poly={_fmt(first_bad['poly'])} euler={_fmt(first_bad['euler'])} brute={_fmt(first_bad['brute'])}"
        )
        warn.append(msg)
        lines.append(msg)
    else:
        lines.append(f"all {len(results)} checks PASS")
    return inputs, results, lines, code


def cmd_check(args, bits: int, warn: list):
    params = _preset_params(args)
    prof = _profile(args.preset, params, bits)
    if args.K < 2:
        raise UsageError("--K must be at least 2")
    reps = [check_propA(prof, args.K), check_propB(prof, args.K), check_conda(prof, args.K)]
    inputs = {"preset": args.preset, "params": params, "K": args.K}
    results = [
        {"preset": prof.label, "condition": r.condition, "checked_up_to": r.checked_up_to, "holds": r.holds, "first_violation": r.first_violation}
        for r in reps
    ]
    lines = [
        f"{r['condition']:<6} {'holds' if r['holds'] else 'fails at ' + str(r['first_violation'])} (checked to {r['checked_up_to']})"
        for r in results
    ]
    return inputs, results, lines


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, Fraction):
        return str(v)
    if hasattr(v, "_mpf_"):
        from .algebra import field_of

        return field_of(v).ctx.nstr(v, 17)
    return str(v)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(args, inputs, results, lines, warn) -> str:
    if args.format == "json":
        return report.to_json(report.envelope(args.subcommand, inputs, results, warn))
    if args.format == "csv":
        return report.to_csv(results)
    return "".join(line + "\n" for line in lines)


_COMMANDS = {"exact": cmd_exact, "asympt": cmd_asympt, "verify": cmd_verify, "check": cmd_check}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    warn: list[str] = []
    try:
        bits = _precision(args)
        out = _COMMANDS[args.subcommand](args, bits, warn)
    except (UsageError, UnknownPreset, NonPrimeModulus, D1OutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FloatProfileNotSupported as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PolymeanError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    inputs, results, lines, *rest = out
    code = rest[0] if rest else EXIT_OK
    _emit(_render(args, inputs, results, lines, warn), args.output)
    if args.format != "json":
        for w in warn:
            print(f"warning: {w}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
