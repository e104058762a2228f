"""Command-line front end: ``quantum-gloves <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from .angular import EulerAngles
from .catalog import ENTRY_BUILDERS, INFO, PASS, all_entries, get_entry, verify_all, verify_entry
from .errors import GloveError
from .irreps import blocks_to_json, decompose
from .protocol import GLOVE_BASIS, HELSTROM, ChannelConfig, SimReport, resource_report, simulate_exchange
from .spaces import parse_space
from .twirl import optimize_approx_gloves, transmitted_states, twirl_discrepancy_report, twirl_pair

SIG_DIGITS = 12


def _round(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return _round(obj.item())
    return obj


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)


def _table(header: Sequence[str], rows: list[Sequence], color: bool) -> str:
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in cells:
        parts = []
        for text, w in zip(r, widths):
            padded = text.ljust(w)
            if color and text in ("PASS", "FAIL"):
                code = "32" if text == "PASS" else "31"
                padded = f"\033[{code}m{text}\033[0m" + " " * (w - len(text))
            parts.append(padded)
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines) + "\n"


def _csv(header: Sequence[str], rows: list[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


class Output:
    """One rendered document: JSON payload plus a tabular view."""

    def __init__(self, doc, header: Sequence[str], rows: list[Sequence], footer: str = ""):
        self.doc, self.header, self.rows, self.footer = doc, header, rows, footer

    def render(self, fmt: str, color: bool) -> str:
        if fmt == "json":
            return json.dumps(_round(self.doc), indent=2) + "\n"
        if fmt == "csv":
            return _csv(self.header, self.rows)
        text = _table(self.header, self.rows, color)
        return text + (self.footer + "\n" if self.footer else "")


# --- subcommands ----------------------------------------------------------------

def _entries(args) -> list:
    return [get_entry(args.entry)] if args.entry else all_entries()


def cmd_catalog(args) -> tuple[Output, int]:
    entries = _entries(args)
    doc = {"entries": [e.to_json() for e in entries]}
    rows = [(e.id, e.pair.kind, e.perfect, e.particles, e.space.describe(), e.notes) for e in entries]
    return Output(doc, ("entry", "kind", "perfect", "particles", "space", "notes"), rows), 0


def cmd_verify(args) -> tuple[Output, int]:
    if args.entry:
        checks = verify_entry(get_entry(args.entry), tolerance=args.tolerance, seed=args.seed)
    else:
        checks = verify_all(tolerance=args.tolerance, seed=args.seed)
    doc = {
        "checks": [
            {"entry": c.entry, "check": c.name, "value": c.value, "tolerance": c.tolerance, "status": c.status}
            for c in checks
        ],
        "all_passed": all(c.passed for c in checks),
    }
    rows = [(c.entry, c.name, c.value, "-" if c.tolerance is None else c.tolerance, c.status) for c in checks]
    failed = sum(c.status not in (PASS, INFO) for c in checks)
    footer = f"{len(checks) - failed}/{len(checks)} checks passed"
    return Output(doc, ("entry", "check", "value", "tolerance", "status"), rows, footer), 0 if failed == 0 else 1


def cmd_decompose(args) -> tuple[Output, int]:
    space = parse_space(args.space)
    blocks = decompose(space)
    doc = blocks_to_json(blocks, space)
    rows = [(b.two_L, str(b.L), b.parity, b.copy_index, b.dim) for b in blocks]
    flags = doc["flags"]
    footer = "flags: " + ", ".join(f"{k}={_fmt(v)}" for k, v in flags.items())
    return Output(doc, ("L_times_2", "L", "parity", "copy", "dim"), rows, footer), 0


def cmd_twirl(args) -> tuple[Output, int]:
    entry = get_entry(args.entry)
    rho_p, rho_m = transmitted_states(entry.pair, entry.representative())
    report = twirl_pair(rho_p, rho_m, samples=args.samples, seed=args.seed)
    doc = {"entry": entry.id} | report.to_json()
    rows = [(entry.id, report.method, report.trace_distance, report.helstrom)]
    footer = ""
    if entry.id == "two_particle_approx":
        disc = twirl_discrepancy_report(samples=args.samples or 100_000, seed=args.seed)
        doc["printed_comparison"] = disc
        if report.method != "exact":
            rows.append((entry.id, "exact", disc["exact_trace_distance"],
                         0.5 + 0.5 * disc["exact_trace_distance"]))
        rows.append((entry.id, "printed", disc["printed_trace_distance"],
                     0.5 + 0.5 * disc["printed_trace_distance"]))
        footer = "discrepancy: " + disc["summary"]
    return Output(doc, ("entry", "method", "trace_distance", "helstrom"), rows, footer), 0


def _parse_angles(text: str) -> EulerAngles:
    try:
        a, b, g = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A,B,C radians, got {text!r}") from None
    return EulerAngles(a, b, g)


def cmd_simulate(args) -> tuple[Output, int]:
    entry = get_entry(args.entry)
    config = ChannelConfig(
        random_rotation=args.random_rotation,
        fixed_rotation=args.fixed_rotation,
        bob_opposite_chirality=args.bob_opposite,
        measurement=args.measurement,
    )
    rep: SimReport = simulate_exchange(entry, config, args.trials, args.seed)
    return Output(rep.to_json(), SimReport.CSV_HEADER, [rep.csv_row()]), 0


def cmd_search(args) -> tuple[Output, int]:
    space = parse_space(args.space)
    res = optimize_approx_gloves(space, restarts=args.restarts, max_iters=args.max_iters, seed=args.seed)
    rows = [(space.describe(), res.score, res.bound, res.iterations, res.converged, res.seed)]
    return Output(res.to_json(), ("space", "score", "bound", "iterations", "converged", "seed"), rows), 0


def cmd_report(args) -> tuple[Output, int]:
    reports = [resource_report(e) for e in _entries(args)]
    doc = {"reports": [r.to_json() for r in reports]}
    rows = [(r.entry, r.particle_count, "+".join(r.factor_kinds), r.qubits, list(r.lmax), r.perfect) for r in reports]
    return Output(doc, ("entry", "particles", "factors", "qubits", "lmax", "perfect"), rows), 0


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), help="default: table on a terminal, json otherwise")
    common.add_argument("--out", metavar="PATH", help="write the document to PATH instead of stdout")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="quantum-gloves", description="Quantum gloves: build, verify, twirl, simulate.")
    sub = parser.add_subparsers(dest="command", required=True)
    entry_choices = sorted(ENTRY_BUILDERS)

    p = sub.add_parser("catalog", parents=[common], help="export catalog states")
    p.add_argument("--entry", choices=entry_choices)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify", parents=[common], help="run glove invariant checks")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--entry", choices=entry_choices)
    g.add_argument("--all", action="store_true", help="every catalog entry (default)")
    p.add_argument("--tolerance", type=float, help="override every check tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", parents=[common], help="irreducible (L, parity) blocks of a space")
    p.add_argument("--space", required=True, help='e.g. "orb1,orb1", "spin,orb1", "orb1*3"')
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("twirl", parents=[common], help="twirled glove states and their distinguishability")
    p.add_argument("--entry", required=True, choices=entry_choices)
    p.add_argument("--samples", type=int, help="Monte-Carlo samples (exact twirl if omitted)")
    p.set_defaults(func=cmd_twirl)

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo chirality exchange")
    p.add_argument("--entry", required=True, choices=entry_choices)
    p.add_argument("--trials", type=int, default=10_000)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--random-rotation", action="store_true")
    g.add_argument("--fixed-rotation", type=_parse_angles, metavar="A,B,C")
    p.add_argument("--bob-opposite", action="store_true", help="Bob has the opposite chirality")
    p.add_argument("--measurement", choices=(GLOVE_BASIS, HELSTROM), default=HELSTROM)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("search", parents=[common], help="numerical search for the best glove state")
    p.add_argument("--space", required=True)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--max-iters", type=int, default=4000)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("report", parents=[common], help="resource accounting per entry")
    p.add_argument("--entry", choices=entry_choices)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out, code = args.func(args)
    except GloveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    to_terminal = args.out is None and sys.stdout.isatty()
    fmt = args.format or ("table" if to_terminal else "json")
    color = to_terminal and "NO_COLOR" not in os.environ
    text = out.render(fmt, color)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
