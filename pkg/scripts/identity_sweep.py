#!/usr/bin/env python3
"""Sweep every named identity over a seed range and report timings.

Run:  python scripts/identity_sweep.py [--seeds N]
"""

import argparse
import time

from jetform.verify import CHECKS, run_identity


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    failures = 0
    for name in sorted(CHECKS):
        t0 = time.time()
        bad = []
        for seed in range(args.seeds):
            ok, detail = run_identity(name, seed)
            if not ok:
                bad.append((seed, detail))
        status = "PASS" if not bad else "FAIL"
        print(f"{status} {name:12s} seeds 0..{args.seeds - 1} ({time.time() - t0:5.2f}s)")
        for seed, detail in bad:
            print(f"     seed {seed}: {detail}")
        failures += len(bad)
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
