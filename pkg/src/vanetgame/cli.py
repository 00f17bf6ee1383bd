"""Command-line front end: enumeration, payoffs, stability, and simulations.

Every file-producing subcommand writes RFC-4180-style CSV with a frozen
column order plus an adjacent <out>.manifest.json recording the invocation,
so runs are reproducible from their outputs. Exit codes: 0 success, 2 usage
error, 3 config problem, 4 internal invariant breach or failed check.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .analysis import run_identity_checks, stability_verdict, structure_reports
from .analytic import player_payoffs
from .configio import (ConfigError, LoadedConfig, default_game_config,
                       default_geometry, load_config, resolve_encounter)
from .geometry import analytic_pair_encounter, estimate_encounter_matrix
from .model import (enumerate_partitions, format_structure, normalize_structure,
                    parse_structure)
from .slotsim import simulate_slots

DEFAULT_SWEEP = (0.1, 0.2, 0.3, 0.4, 0.5)


def _sweep(text: str) -> tuple:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}: expected comma-separated numbers")
    if not values:
        raise argparse.ArgumentTypeError("empty sweep")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vanetgame",
        description="Cooperative vehicle-to-roadside relaying: exact coalition payoffs, "
                    "core stability, and Monte Carlo validation.")
    parser.add_argument("--version", action="version", version=f"vanetgame {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=False):
        p.add_argument("--config", help="JSON config file (built-in defaults when omitted)")
        p.add_argument("--seed", type=int, default=None, help="RNG seed override")
        p.add_argument("--out", required=out_required, help="output CSV path")

    p = sub.add_parser("enumerate", help="list every coalition structure with ids")
    common(p)

    p = sub.add_parser("encounter", help="estimate encounter probabilities over a range sweep")
    common(p)
    p.add_argument("--d-sweep", type=_sweep, default=DEFAULT_SWEEP,
                   help="comma-separated transmission ranges in km")
    p.add_argument("--slots", type=int, default=None, help="placement slots per range")
    p.add_argument("--placement", choices=("continuous", "grid"), default=None)

    p = sub.add_parser("payoffs", help="closed-form per-player quantities for a structure")
    common(p)
    p.add_argument("--structure", default=None,
                   help="canonical id or explicit blocks like '1,2|3|4' (default: grand coalition)")
    p.add_argument("--d-sweep", type=_sweep, default=None,
                   help="derive symmetric encounter matrices from these ranges; "
                        "omitted: use the config's matrix")

    p = sub.add_parser("core", help="sufficient conditions and core membership of the grand vector")
    common(p)

    p = sub.add_parser("simulate", help="slot simulation vs closed forms for a structure")
    common(p)
    p.add_argument("--structure", default=None)
    p.add_argument("--slots", type=int, default=1_000_000)

    p = sub.add_parser("check", help="run the exact-identity suite on the config")
    common(p)
    return parser


def _load(args) -> LoadedConfig:
    if args.config:
        return load_config(args.config)
    return LoadedConfig(game=default_game_config(),
                        geometry=default_geometry(),
                        encounter_from_geometry=False)


def _resolve_structure(arg, cfg):
    n = cfg.n_players
    if arg is None:
        return (frozenset(range(1, n + 1)),)
    if arg.strip().isdigit():
        if n > 12:
            raise ValueError("structure ids require at most 12 players; pass explicit blocks")
        partitions = enumerate_partitions(n)
        idx = int(arg)
        if not 1 <= idx <= len(partitions):
            raise ValueError(f"structure id {idx} out of range 1..{len(partitions)}")
        return partitions[idx - 1]
    return parse_structure(arg, n)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(out_path, args, extra=None) -> None:
    manifest = {
        "tool": "vanetgame",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "command": args.command,
        "config": args.config,
        "seed": getattr(args, "seed", None),
        "out": args.out,
    }
    for key in ("structure", "slots", "placement"):
        if hasattr(args, key):
            manifest[key] = getattr(args, key)
    if getattr(args, "d_sweep", None) is not None:
        manifest["d_sweep"] = list(args.d_sweep)
    if extra:
        manifest.update(extra)
    with open(str(out_path) + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(args, header, rows, extra=None) -> None:
    if args.out:
        _write_csv(args.out, header, rows)
        _write_manifest(args.out, args, extra)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_enumerate(args, loaded) -> int:
    cfg = loaded.game
    if cfg.n_players > 12:
        print(f"refusing to enumerate partitions of {cfg.n_players} players", file=sys.stderr)
        return 3
    rows = []
    for idx, cs in enumerate(enumerate_partitions(cfg.n_players), start=1):
        rows.append((idx, format_structure(cs),
                     format_structure(normalize_structure(cs, cfg.K)), len(cs)))
    _emit(args, ("id", "structure", "normalized", "n_coalitions"), rows)
    return 0


def cmd_encounter(args, loaded) -> int:
    cfg = loaded.game
    geo = loaded.geometry or default_geometry(cfg.K)
    if args.placement:
        geo = dataclasses.replace(geo, placement=args.placement)
    if args.slots:
        geo = dataclasses.replace(geo, n_slots=args.slots)
    if args.seed is not None:
        geo = dataclasses.replace(geo, seed=args.seed)
    rows = []
    for d in args.d_sweep:
        est = estimate_encounter_matrix(
            dataclasses.replace(geo, range_km=(d,) * cfg.K), cfg.K, cfg.M)
        reference = analytic_pair_encounter(d, geo.side_km)
        for j in range(cfg.M):
            for i in range(cfg.K):
                rows.append((d, i + 1, cfg.K + j + 1,
                             float(est.matrix[j, i]), float(est.stderr[j, i]), reference))
    _emit(args, ("d_km", "vehicle", "rsu", "estimate", "stderr", "analytic"),
          rows, extra={"n_slots": geo.n_slots, "placement": geo.placement,
                       "geometry_seed": geo.seed})
    return 0


def _payoff_rows(cs, cfg, d_label):
    rows = []
    for rep in structure_reports(cs, cfg):
        for i in sorted(rep.vehicle_payoff):
            rows.append((d_label, i, "share", rep.share[i]))
            rows.append((d_label, i, "rate_gain", rep.rate_gain[i]))
            rows.append((d_label, i, "fee", rep.fee[i]))
            rows.append((d_label, i, "throughput", rep.throughput[i]))
            rows.append((d_label, i, "payment", rep.payment[i]))
            rows.append((d_label, i, "payoff", rep.vehicle_payoff[i]))
        for j in sorted(rep.rsu_payoff):
            for i in sorted(rep.relay_prob[j]):
                rows.append((d_label, j, f"relay_prob_v{i}", rep.relay_prob[j][i]))
            rows.append((d_label, j, "revenue", rep.revenue[j]))
            rows.append((d_label, j, "cost", rep.cost[j]))
            rows.append((d_label, j, "payoff", rep.rsu_payoff[j]))
    rows.sort(key=lambda r: (float(r[0]) if r[0] != "" else -1.0, r[1], r[2]))
    return rows


def cmd_payoffs(args, loaded) -> int:
    cfg = loaded.game
    cs = _resolve_structure(args.structure, cfg)
    rows = []
    if args.d_sweep is None:
        cfg_resolved, _ = resolve_encounter(loaded)
        rows.extend(_payoff_rows(cs, cfg_resolved, ""))
    else:
        side = (loaded.geometry or default_geometry(cfg.K)).side_km
        for d in args.d_sweep:
            q = analytic_pair_encounter(d, side)
            cfg_d = dataclasses.replace(cfg, enc=np.full((cfg.M, cfg.K), q))
            rows.extend(_payoff_rows(cs, cfg_d, d))
    _emit(args, ("d_km", "player", "quantity", "value"), rows,
          extra={"structure_blocks": format_structure(cs)})
    return 0


def cmd_core(args, loaded) -> int:
    cfg, _ = resolve_encounter(loaded)
    verdict = stability_verdict(cfg)
    cond = verdict.conditions

    def yesno(flag):
        return "yes" if flag else "no"

    print(f"weights strictly positive: {yesno(cond.weights_positive)}"
          + ("" if cond.weights_positive else f"  (witness: player {cond.weight_witness})"))
    msg = ""
    if not cond.gains_strict:
        player, S = cond.gain_witness
        msg = f"  (witness: player {player} in coalition {sorted(S)})"
    print(f"strict gains inside every vehicle-containing proper coalition: "
          f"{yesno(cond.gains_strict)}{msg}")
    msg = ""
    if not cond.grand_preferred:
        player, S = cond.preference_witness
        msg = f"  (witness: player {player} prefers coalition {sorted(S)})"
    print(f"grand coalition strictly preferred by every member of every proper coalition: "
          f"{yesno(cond.grand_preferred)}{msg}")
    print(f"sufficient conditions hold: {yesno(cond.all_hold)}")
    vec = ", ".join(f"u{i + 1}={float(v)!r}" for i, v in enumerate(verdict.payoff_vector))
    print(f"grand-coalition payoffs: {vec}")
    if verdict.membership.in_core:
        n_proper = 2 ** cfg.n_players - 2
        print(f"grand vector in core: yes (unblocked by all {n_proper} proper coalitions)")
    else:
        print(f"grand vector in core: no (blocked by {sorted(verdict.membership.blocking)})")
    return 0


def cmd_simulate(args, loaded) -> int:
    cfg, _ = resolve_encounter(loaded)
    cs = _resolve_structure(args.structure, cfg)
    seed = 0 if args.seed is None else args.seed
    report = simulate_slots(cs, cfg, args.slots, seed)
    analytic = {}
    for rep in structure_reports(cs, cfg):
        for i in rep.vehicle_payoff:
            analytic[(i, "throughput")] = rep.throughput[i]
            analytic[(i, "payment")] = rep.payment[i]
            analytic[(i, "payoff")] = rep.vehicle_payoff[i]
        for j in rep.rsu_payoff:
            analytic[(j, "revenue")] = rep.revenue[j]
            analytic[(j, "cost")] = rep.cost[j]
            analytic[(j, "payoff")] = rep.rsu_payoff[j]
    rows = [(player, qty, est, se, analytic[(player, qty)], n, sd)
            for (player, qty, est, se, n, sd) in report.rows()]
    _emit(args, ("player", "quantity", "estimate", "stderr", "analytic", "n_slots", "seed"),
          rows, extra={"structure_blocks": format_structure(cs), "backend": report.backend})
    return 0


def cmd_check(args, loaded) -> int:
    cfg, _ = resolve_encounter(loaded)
    results = run_identity_checks(cfg)
    failed = False
    for res in results:
        if res.passed is None:
            status = "SKIP"
        elif res.passed:
            status = "PASS"
        else:
            status = "FAIL"
            failed = True
        print(f"[{status}] {res.name}: {res.detail}")
    return 4 if failed else 0


_COMMANDS = {
    "enumerate": cmd_enumerate,
    "encounter": cmd_encounter,
    "payoffs": cmd_payoffs,
    "core": cmd_core,
    "simulate": cmd_simulate,
    "check": cmd_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        loaded = _load(args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 3
    try:
        return _COMMANDS[args.command](args, loaded)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RuntimeError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
