"""Command-line front end.  Output is JSON by default, CSV with ``--csv``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import algebra, brackets, dendrology, graphs, hurwitz
from .guards import GUARD_ENV, GuardError
from .series import PowerSeries, SeriesError, fraction_str, generators


class UsageError(Exception):
    pass


class CommandError(Exception):
    def __init__(self, code: str, message: str, **details):
        super().__init__(message)
        self.code = code
        self.details = details


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rows_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fraction_str(x) if isinstance(x, Fraction) else x for x in row])
    return buf.getvalue()


def _dump(payload) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n"


def _read_coeffs(path: str) -> PowerSeries:
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        return PowerSeries.from_json(text)
    first = text.splitlines()[0] if text else ""
    if first.strip() == "n,value":
        rows = list(csv.DictReader(io.StringIO(text)))
        order = max(int(r["n"]) for r in rows)
        cs = [Fraction(0)] * (order + 1)
        for r in rows:
            cs[int(r["n"])] = Fraction(r["value"])
        return PowerSeries(cs)
    return PowerSeries.from_csv(text)


# subcommands ---------------------------------------------------------------------


def cmd_series(args):
    s = generators(args.gen, args.order)
    payload = {"gen": args.gen, "order": args.order, "coefficients": [fraction_str(c) for c in s]}
    rows = [[n, c] for n, c in enumerate(s) if c]
    return payload, _rows_csv(["n", "value"], rows)


def _fit_payload(elem, window, holdout):
    out = {"window": window, "holdout": holdout, "element": elem.to_dict()}
    try:
        out["asymptotic"] = algebra.leading_asymptotic(elem).to_dict()
    except ValueError:
        out["asymptotic"] = None
    return out


def cmd_fit(args):
    coeffs = _read_coeffs(args.coeffs)
    if args.escalate:
        elem, window = algebra.fit_escalating(coeffs, args.window, args.holdout)
    else:
        try:
            elem, window = algebra.fit(coeffs, args.window, args.holdout), args.window
        except ValueError as exc:
            raise CommandError("insufficient_coefficients", str(exc)) from exc
    if isinstance(elem, algebra.FitFailure):
        raise CommandError("fit_failed", "sequence does not fit the window", **elem.to_dict())
    payload = _fit_payload(elem, window, args.holdout)
    rows = [[k, c] for k, c in sorted(elem.terms.items())]
    return payload, _rows_csv(["k", "coefficient"], rows)


def _load_table(args) -> brackets.BracketTable:
    if args.closed:
        return brackets.BracketTable.closed_form(args.closed)
    if args.table:
        return brackets.BracketTable.load(args.table)
    return brackets.load_genus2()


def cmd_bracket(args):
    table = _load_table(args)
    if args.monomial is not None:
        m = brackets.parse_monomial(args.monomial)
        value = brackets.eval_bracket(table, m)
        payload = {"genus": table.genus, "monomial": brackets.format_monomial(m), "value": fraction_str(value)}
        return payload, _rows_csv(["monomial", "value"], [[brackets.format_monomial(m), value]])
    if args.decompose:
        dec = brackets.decompose_to_graphs(table)
        items = [{"graph": h.to_dict(), "coefficient": fraction_str(c),
                  "automorphisms": graphs.automorphism_count(h)} for h, c in dec]
        payload = {"genus": table.genus, "decomposition": items,
                   "element": brackets.decomposition_element(dec).to_dict()}
        rows = [[i, item["automorphisms"], item["coefficient"]] for i, item in enumerate(items)]
        return payload, _rows_csv(["index", "automorphisms", "coefficient"], rows)
    if args.fseries is not None:
        if args.weights:
            weights = [int(b) for b in args.weights.split(",")]
            s = brackets.weighted_f_series(table, weights, args.fseries)
        else:
            weights = []
            s = brackets.f_series(table, args.fseries, g0_convention=args.g0_convention)
        payload = {"genus": table.genus, "weights": weights, "order": args.fseries,
                   "coefficients": [fraction_str(c) for c in s]}
        return payload, _rows_csv(["n", "value"], [[n, c] for n, c in enumerate(s) if c])
    raise UsageError("bracket needs --monomial, --fseries or --decompose")


def cmd_graphs(args):
    catalog = graphs.load_catalog(args.catalog)
    out = []
    rows = []
    for name, h in catalog.items():
        entry = {
            "name": name,
            "automorphisms": graphs.automorphism_count(h),
            "euler_characteristic": h.euler_characteristic(),
            "f_h": graphs.f_h_closed_form(h).to_dict(),
        }
        if args.extensions is not None:
            ext = [graphs.extension_series_coefficient(h, n) for n in range(args.extensions + 1)]
            closed = algebra.to_series(graphs.f_h_closed_form(h), args.extensions)
            entry["extension_coefficients"] = [fraction_str(c) for c in ext]
            entry["matches_closed_form"] = list(closed) == ext
        out.append(entry)
        rows.append([name, entry["automorphisms"], entry["euler_characteristic"],
                     entry.get("matches_closed_form", "")])
    return {"graphs": out}, _rows_csv(["name", "automorphisms", "euler_characteristic", "matches_closed_form"], rows)


def cmd_hurwitz(args):
    mus = hurwitz.parse_mus(args.mu)
    mu_text = [str(mu) for mu in mus]
    if args.n is not None:
        q = hurwitz.HurwitzQuery(args.genus, tuple(mus), args.n)
        if args.brute_force:
            h = hurwitz.brute_force_oracle(q)
        else:
            h = hurwitz.connected_counts(args.genus, mus, args.n)[args.n]
        payload = {"n": args.n, "h": fraction_str(h)}
        return payload, _rows_csv(["n", "h"], [[args.n, h]])
    if args.series is not None:
        h = hurwitz.connected_counts(args.genus, mus, args.series)
        s = hurwitz.h_series(args.genus, mus, args.series)
        rows = [{"n": n, "h": fraction_str(h[n]), "coefficient": fraction_str(s[n])}
                for n in range(args.series + 1)]
        payload = {"genus": args.genus, "mus": mu_text, "rows": rows}
        if args.window is not None:
            elem, window = algebra.fit_escalating(s, args.window, args.holdout)
            if window is None:
                raise CommandError("fit_failed", "Hurwitz series does not fit", **elem.to_dict())
            payload["fit"] = _fit_payload(elem, window, args.holdout)
        return payload, _rows_csv(["n", "h", "coefficient"],
                                  [[r["n"], r["h"], r["coefficient"]] for r in rows])
    raise UsageError("hurwitz needs --n or --series")


def cmd_gravity(args):
    if args.genus >= 3 and not args.stretch:
        raise CommandError("stretch_required", "genus >= 3 runs only with --stretch")
    if args.genus == 1:
        raise CommandError("not_in_algebra", "the genus-1 unramified series is not in the algebra; "
                           "use `hurwitz --genus 1 --mu 1 --series N --window M`")
    try:
        elem, window, term = hurwitz.fit_and_b(args.genus, [], args.order, args.window, args.holdout)
    except hurwitz.FitError as exc:
        raise CommandError("fit_failed", str(exc), **exc.failure.to_dict()) from exc
    payload = {
        "genus": args.genus,
        "order": args.order,
        "window": window,
        "element": elem.to_dict(),
        "alpha": fraction_str(term.alpha),
        "c_gauss": fraction_str(term.c_gauss),
        "c_plain": fraction_str(term.c_plain),
        "expected_alpha": fraction_str(hurwitz.expected_alpha(args.genus)),
        "b_numeric": term.numeric_constant(30),
    }
    rows = [[k, payload[k]] for k in ("alpha", "c_gauss", "c_plain", "window", "b_numeric")]
    return payload, _rows_csv(["key", "value"], rows)


def cmd_trees(args):
    value = dendrology.path_moments(args.n, args.k, args.kind)
    payload = {"n": args.n, "k": args.k, "kind": args.kind, "value": value}
    return payload, _rows_csv(["n", "k", "kind", "value"], [[args.n, args.k, args.kind, value]])


# parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hurwitz-atlas",
        description="Exact tree series, brackets, graph extensions and Hurwitz numbers.",
        epilog=f"Set {GUARD_ENV}=1 to lift enumeration guards (may run for a very long time).",
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_text, func):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")
        p.set_defaults(func=func)
        return p

    p = add("series", "coefficients of Y, Z or A_n/n!", cmd_series)
    p.add_argument("--gen", required=True, choices=["Y", "Z", "A"])
    p.add_argument("--order", required=True, type=int)

    p = add("fit", "express a coefficient sequence in the algebra", cmd_fit)
    p.add_argument("--coeffs", required=True, help="JSON array of rationals or CSV file")
    p.add_argument("--window", required=True, type=int)
    p.add_argument("--holdout", type=int, default=8)
    p.add_argument("--escalate", action="store_true", help="try windows 0..M")

    p = add("bracket", "evaluate brackets and F-series", cmd_bracket)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--table", help="initial-value table JSON (default: genus 2)")
    g.add_argument("--closed", choices=["g0", "g1", "g1beta"])
    g2 = p.add_mutually_exclusive_group()
    g2.add_argument("--monomial")
    g2.add_argument("--fseries", type=int, metavar="N")
    g2.add_argument("--decompose", action="store_true")
    p.add_argument("--weights", help="b1,b2,... for the weighted F-series")
    p.add_argument("--g0-convention", action="store_true", help="add q + q^2/4 in genus 0")

    p = add("graphs", "simple-graph catalog and extension sums", cmd_graphs)
    p.add_argument("--catalog", default=None)
    p.add_argument("--extensions", type=int, metavar="n")

    p = add("hurwitz", "connected Hurwitz numbers", cmd_hurwitz)
    p.add_argument("--genus", required=True, type=int)
    p.add_argument("--mu", default="", help='ramification types "p1;p2;..." e.g. "2;3,1"')
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--series", type=int, metavar="N")
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--window", type=int)
    p.add_argument("--holdout", type=int, default=8)

    p = add("gravity", "leading asymptotics of the unramified Hurwitz series", cmd_gravity)
    p.add_argument("--genus", required=True, type=int)
    p.add_argument("--order", type=int, default=28)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--holdout", type=int, default=8)
    p.add_argument("--stretch", action="store_true", help="allow genus >= 3")

    p = add("trees", "distance moments over marked Cayley trees", cmd_trees)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--kind", required=True, choices=["m", "p"])
    return parser


def _error(code: str, message: str, out, **details) -> None:
    err = {"code": code, "message": message}
    err.update(details)
    out.write(_dump({"error": err}))


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _error("usage_error", str(exc), out)
        return 2
    try:
        payload, csv_text = args.func(args)
    except UsageError as exc:
        _error("usage_error", str(exc), out)
        return 2
    except CommandError as exc:
        _error(exc.code, str(exc), out, **exc.details)
        return 1
    except GuardError as exc:
        _error("guard_exceeded", str(exc), out)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        _error("bad_input", str(exc), out)
        return 1
    except (SeriesError, ValueError, ArithmeticError) as exc:
        _error("computation_error", str(exc), out)
        return 1
    out.write(csv_text if args.csv else _dump(payload))
    return 0


def main() -> None:
    sys.exit(run())
