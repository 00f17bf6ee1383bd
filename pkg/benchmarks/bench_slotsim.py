#!/usr/bin/env python3
"""Benchmark the slot-simulation kernels: numba @njit vs the numpy fallback.

Both paths consume identical randomness and must produce identical event
counters; the benchmark asserts that before timing. Typical output shows the
compiled loop an order of magnitude ahead once compilation is amortized.

    python benchmarks/bench_slotsim.py --slots 2000000
"""

import argparse
import json
import time

from vanetgame import parse_structure, simulate_slots
from vanetgame._kernels import HAS_NUMBA
from vanetgame.configio import default_game_config

RUNS = 5


def time_backend(cs, cfg, slots, seed, use_numba):
    times = []
    report = None
    for _ in range(RUNS):
        start = time.perf_counter()
        report = simulate_slots(cs, cfg, slots, seed, use_numba=use_numba)
        times.append(time.perf_counter() - start)
    return report, {"min": min(times), "mean": sum(times) / len(times), "runs": times}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--slots", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--structure", default="1,2,3,4")
    parser.add_argument("--json", action="store_true", help="emit JSON instead of text")
    args = parser.parse_args()

    cfg = default_game_config()
    cs = parse_structure(args.structure, cfg.n_players)

    results = {"slots": args.slots, "seed": args.seed, "structure": args.structure,
               "runs_per_backend": RUNS, "backends": {}}

    rep_np, stats_np = time_backend(cs, cfg, args.slots, args.seed, use_numba=False)
    results["backends"]["numpy"] = stats_np

    if HAS_NUMBA:
        start = time.perf_counter()
        rep_warm = simulate_slots(cs, cfg, 1_000, args.seed, use_numba=True)
        results["compile_s"] = time.perf_counter() - start
        rep_nb, stats_nb = time_backend(cs, cfg, args.slots, args.seed, use_numba=True)
        results["backends"]["numba"] = stats_nb
        for field in ("scheduled", "encounters", "relays_success", "relays_fail"):
            a = getattr(rep_np, field)
            b = getattr(rep_nb, field)
            assert (a == b).all(), f"backend mismatch in {field}"
        results["identical_counters"] = True
        results["speedup_min"] = stats_np["min"] / stats_nb["min"]
    else:
        results["backends"]["numba"] = "unavailable"

    if args.json:
        print(json.dumps(results, indent=2))
        return

    print(f"slot simulation, {args.slots} slots, structure {args.structure}, "
          f"{RUNS} runs per backend")
    print(f"  numpy : min {stats_np['min'] * 1e3:8.1f} ms   mean {stats_np['mean'] * 1e3:8.1f} ms")
    if HAS_NUMBA:
        print(f"  numba : min {stats_nb['min'] * 1e3:8.1f} ms   mean {stats_nb['mean'] * 1e3:8.1f} ms"
              f"   (compile {results['compile_s']:.2f}s, amortized once per process)")
        print(f"  identical counters: yes   speedup (min over min): {results['speedup_min']:.1f}x")
    else:
        print("  numba : not installed; set up numba to compare")


if __name__ == "__main__":
    main()
