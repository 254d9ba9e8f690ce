"""Deterministic command-line reports over the series library.

Two subcommands: `series` prints coefficient tables in a line-oriented
golden format, `verify` runs the exact-equality check suites and reports
pass/fail.  Identical invocations produce identical bytes; wall times never
enter the payload.  Exit codes: 0 all checks passed, 1 at least one failed
(or an evaluation hit a pole), 2 usage or cap errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from math import factorial
from typing import Sequence

from . import flaggw, projgw, toda3
from .exactalg import PoleError, RatFunc, VarRegistry, substitute
from .report import VerificationReport, timed

SERIES_TARGETS = ("proj", "flag-a1", "flag-a2", "toda", "toda-eq")
VERIFY_CHECKS = (
    "proj-recursion",
    "euler-prefactor",
    "a1-cross",
    "a2-recursion",
    "lemma34",
    "toda-plain",
    "toda-eq",
    "toda-operators",
    "batyrev",
    "corollary35",
)

# quick keeps CI latency low; full is the documented deep matrix (the
# equivariant lattice checks cap at 8 because their cross-multiplied
# numerators grow fast in four variables)
LEVELS = ("quick", "full")


class UsageError(Exception):
    pass


def _bound(value: int | None, quick_default: int, full_default: int,
           cap: int, quick: bool, what: str) -> int:
    if value is None:
        value = quick_default if quick else full_default
    if value < 0:
        raise UsageError(f"{what} must be >= 0")
    if value > cap:
        raise UsageError(f"{what} exceeds the cap {cap}")
    return value


# -- series formatting -----------------------------------------------------------------


def q_series_text(texts: Sequence[str]) -> str:
    """Render per-degree coefficient texts as a single truncated q-series."""
    parts = [texts[0]]
    for d, t in enumerate(texts[1:], start=1):
        sign = "+"
        if t.startswith("-"):
            sign, t = "-", t[1:]
        qp = "q" if d == 1 else f"q^{d}"
        if t == "1":
            body = qp
        elif t.startswith("1/"):
            body = qp + t[1:]
        elif "/" in t:
            num, den = t.split("/", 1)
            body = f"{num}*{qp}/{den}"
        else:
            body = f"{t}*{qp}"
        parts.append(f"{sign} {body}")
    return " ".join(parts)


def _proj_chart(n: int, part: str):
    """Bindings from the fixed-point weight variables to root variables."""
    names = ["alpha"] if n == 1 else [f"alpha_{i}" for i in range(1, n + 1)]
    target = VarRegistry(names + ["h"])
    alphas = [target.var(nm) for nm in names]
    bindings = {"lambda_0": target.zero()}
    acc = target.zero()
    for i in range(1, n + 1):
        acc = acc - alphas[i - 1] if part == "part1" else acc + alphas[i - 1]
        bindings[f"lambda_{i}"] = acc
    return target, bindings


def _series_proj(args, quick: bool) -> list[str]:
    n = 1 if args.n is None else args.n
    if n < 0 or n > 3:
        raise UsageError("series proj supports n in 0..3")
    cap = 3 if n == 3 else 6
    d_max = _bound(args.max_d, 3, 3, cap, quick, "--max-d")
    if args.chart is not None and n == 0:
        raise UsageError("no root chart in dimension 0")
    lines = ["target proj"]
    if args.chart is not None:
        lines.append(f"param chart={args.chart}")
    lines += [f"param max_d={d_max}", f"param n={n}"]
    tables = projgw.solve_recursion(projgw.ProjSetup(n), d_max)
    chart = None
    if args.chart is not None:
        chart = _proj_chart(n, args.chart)
    rows, sums = [], []
    for table in sorted(tables, key=lambda t: t.i):
        texts = []
        for d in range(d_max + 1):
            f = table.coefficient(d)
            if chart is not None:
                f = substitute(f, chart[1], chart[0])
            texts.append(f.text())
            rows.append(f"row i={table.i} d={d} {texts[-1]}")
        sums.append(f"series i={table.i} {q_series_text(texts)}")
    return lines + rows + sums


def _series_flag(args, quick: bool, rank: int) -> list[str]:
    convention = args.convention or "lemma37"
    if rank == 1:
        d_max = _bound(args.max_d, 3, 3, 8, quick, "--max-d")
        setup = flaggw._a1_setup()
        tables = flaggw.solve_flag_recursion(setup, (d_max,), convention)
        lines = ["target flag-a1", f"param convention={convention}",
                 f"param max_d={d_max}"]
    else:
        n_max = _bound(args.max, 3, 3, 5, quick, "--max")
        setup = flaggw._a2_setup()
        tables = flaggw.solve_flag_recursion(
            setup, (n_max, n_max), convention, total_max=n_max
        )
        lines = ["target flag-a2", f"param convention={convention}",
                 f"param max={n_max}"]
    for table in tables:
        word = table.w.word_text()
        for beta in sorted(table.coeffs, key=lambda b: (sum(b), b)):
            coord = ",".join(str(b) for b in beta)
            lines.append(f"row w={word} beta={coord} {table.coeffs[beta].text()}")
    return lines


def _series_toda(args, quick: bool, equivariant: bool) -> list[str]:
    cap = 8 if equivariant else 16
    n_max = _bound(args.max, 3, 3, cap, quick, "--max")
    target = "toda-eq" if equivariant else "toda"
    lines = [f"target {target}"]
    if args.chart is not None:
        if not equivariant or args.chart != "part3":
            raise UsageError("only the equivariant table admits the part3 chart")
        lines.append(f"param chart={args.chart}")
    lines.append(f"param max={n_max}")
    for i in range(n_max + 1):
        for j in range(n_max + 1 - i):
            if equivariant:
                f = toda3.closed_a_equivariant(i, j)
                if args.chart is not None:
                    f = substitute(f, toda3.ALPHA_TO_LAMBDA, toda3.LAMBDA_REGISTRY)
                text = f.text()
            else:
                text = str(toda3.closed_a(i, j))
            lines.append(f"row i={i} j={j} {text}")
    return lines


def cmd_series(args, quick: bool) -> tuple[list[str], int]:
    if args.target == "proj":
        lines = _series_proj(args, quick)
    elif args.target == "flag-a1":
        lines = _series_flag(args, quick, rank=1)
    elif args.target == "flag-a2":
        lines = _series_flag(args, quick, rank=2)
    elif args.target == "toda":
        lines = _series_toda(args, quick, equivariant=False)
    else:
        lines = _series_toda(args, quick, equivariant=True)
    return ["qcseries series v1"] + lines, 0


# -- verify runners --------------------------------------------------------------------


def _combine(name: str, params: dict,
             subs: list[tuple[str, VerificationReport]]) -> VerificationReport:
    out = VerificationReport(name, params)
    for prefix, sub in subs:
        if sub.status == "fail":
            out.status = "fail"
        for loc, left, right in sub.failures:
            out.failures.append((f"{prefix} {loc}", left, right))
        if sub.status == "skipped":
            out.notes.append(f"{prefix} skipped")
    return out


def _check_proj_recursion(args, quick: bool) -> list[VerificationReport]:
    if args.n is not None:
        if args.n < 0 or args.n > 3:
            raise UsageError("--n must be in 0..3")
        ns = [args.n]
    else:
        ns = [0, 1, 2] if quick else [0, 1, 2, 3]
    reports = []
    for n in ns:
        cap = 3 if n == 3 else 6
        d_max = min(_bound(args.max_d, 4, 5, 6, quick, "--max-d"), cap)
        setup = projgw.ProjSetup(n)
        reports.append(projgw.verify_theorem_3_3(setup, d_max, "direct"))
        reports.append(projgw.verify_theorem_3_3(setup, d_max, "residue"))
        reports.append(projgw.verify_first_order_split(setup))
        if n >= 1:
            solver = VerificationReport(
                "proj-solver", {"n": n, "max_d": d_max}
            )
            with timed(solver):
                tables = projgw.solve_recursion(setup, d_max)
                for table in tables:
                    for d in range(d_max + 1):
                        solver.check_equal(
                            f"i={table.i} d={d}",
                            table.coefficient(d),
                            projgw.closed_b(setup, table.i, d),
                        )
            reports.append(solver)
    return reports


def _check_euler_prefactor(args, quick: bool) -> list[VerificationReport]:
    if args.n is not None:
        if args.n not in (1, 2):
            raise UsageError("--n must be 1 or 2 for this check")
        ns = [args.n]
    else:
        ns = [1] if quick else [1, 2]
    d_max = _bound(args.max_d, 2, 3, 4, quick, "--max-d")
    reports = []
    for n in ns:
        setup = projgw.ProjSetup(n)
        subs = []
        for d in range(1, d_max + 1):
            for k in range(1, d + 1):
                for i in setup.points():
                    for j in setup.points():
                        if i == j:
                            continue
                        sub = projgw.euler_prefactor_identity(setup, i, j, k, d)
                        subs.append((f"i={i} j={j} k={k} d={d}", sub))
        reports.append(
            _combine("euler-prefactor", {"n": n, "max_d": d_max}, subs)
        )
    return reports


def _check_lemma34(args, quick: bool) -> list[VerificationReport]:
    n_max = _bound(args.max, 3, 4, 5, quick, "--max")
    reports = []
    for total in range(1, n_max + 1):
        for i in range(total // 2 + 1):
            reports.append(flaggw.verify_lemma_3_4(i, total - i))
    return reports


def _check_toda_operators(args, quick: bool) -> list[VerificationReport]:
    if args.max is not None:
        n_plain = n_eq = _bound(args.max, 0, 0, 10, quick, "--max")
    else:
        n_plain, n_eq = (6, 6) if quick else (12, 8)
    return [
        toda3.verify_operator_annihilation(n_plain, equivariant=False),
        toda3.verify_operator_annihilation(n_eq, equivariant=True),
    ]


def _runners():
    return {
        "proj-recursion": _check_proj_recursion,
        "euler-prefactor": _check_euler_prefactor,
        "a1-cross": lambda a, q: [
            flaggw.verify_a1_crosscheck(_bound(a.max_d, 4, 5, 8, q, "--max-d"))
        ],
        "a2-recursion": lambda a, q: [
            flaggw.verify_a2_theorem_3_2(_bound(a.max, 3, 4, 5, q, "--max"))
        ],
        "lemma34": _check_lemma34,
        "toda-plain": lambda a, q: [
            toda3.verify_recursions_plain(_bound(a.max, 6, 12, 16, q, "--max"))
        ],
        "toda-eq": lambda a, q: [
            toda3.verify_recursions_equivariant(_bound(a.max, 6, 8, 10, q, "--max"))
        ],
        "toda-operators": _check_toda_operators,
        "batyrev": lambda a, q: [
            toda3.verify_batyrev(_bound(a.max, 6, 12, 20, q, "--max"))
        ],
        "corollary35": lambda a, q: [
            toda3.verify_corollary_3_5(_bound(a.max, 3, 6, 6, q, "--max"))
        ],
    }


def cmd_verify(args, quick: bool) -> tuple[list[str], int]:
    runners = _runners()
    names = list(VERIFY_CHECKS) if args.check == "all" else [args.check]
    reports: list[VerificationReport] = []
    for name in names:
        try:
            reports.extend(runners[name](args, quick))
        except PoleError as exc:
            broken = VerificationReport(name, {})
            broken.fail("evaluation", f"pole: {exc}", "finite value")
            reports.append(broken)
    if args.falsify:
        control = VerificationReport("falsified-control", {})
        control.check_equal(
            "deliberately wrong spot value", toda3.closed_a(1, 1), Fraction(3)
        )
        reports.append(control)
    if args.json:
        records = []
        for r in reports:
            record = json.loads(r.to_json())
            # wall time stays out of the payload so reruns byte-match
            record.pop("wall_ms", None)
            records.append(record)
        payload = {"format": "qcseries.verify.v1", "reports": records}
        lines = [json.dumps(payload, sort_keys=True)]
    else:
        lines = ["qcseries verify v1"]
        for r in reports:
            lines.append("")
            lines.extend(r.payload_lines())
    code = 0 if all(r.ok for r in reports) else 1
    return lines, code


# -- entry point -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcseries",
        description="Exact hypergeometric series tables and verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, default=None,
                       help="dimension / rank selector")
        p.add_argument("--max-d", dest="max_d", type=int, default=None,
                       help="degree bound in q")
        p.add_argument("--max", type=int, default=None,
                       help="total-degree or order bound")
        p.add_argument("--level", choices=LEVELS, default="quick",
                       help="preset bounds when flags are omitted")
        p.add_argument("--chart", choices=("part1", "part3"), default=None,
                       help="rewrite weights in root variables")
        p.add_argument("--out", default=None, help="write the report to a file")

    p_series = sub.add_parser("series", help="print a coefficient table")
    p_series.add_argument("target", choices=SERIES_TARGETS)
    common(p_series)
    p_series.add_argument("--convention", choices=flaggw.CONVENTIONS,
                          default=None, help="flag-recursion denominator switch")

    p_verify = sub.add_parser("verify", help="run exact-equality checks")
    p_verify.add_argument("check", choices=VERIFY_CHECKS + ("all",))
    common(p_verify)
    p_verify.add_argument("--json", action="store_true",
                          help="emit the JSON mirror instead of text")
    p_verify.add_argument("--falsify", action="store_true",
                          help=argparse.SUPPRESS)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    quick = args.level == "quick"
    try:
        if args.command == "series":
            try:
                lines, code = cmd_series(args, quick)
            except PoleError as exc:
                print(f"error: pole during evaluation: {exc}", file=sys.stderr)
                return 1
        else:
            lines, code = cmd_verify(args, quick)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
