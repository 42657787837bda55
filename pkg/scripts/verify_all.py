"""Run every registered identity plus the two-level action check.

    python3 scripts/verify_all.py --trials 200 --seed 0 --workers 4

Prints one line per identity and exits nonzero if anything failed.
"""
import argparse
import sys
import time

from cmtrace.cremona import consistency_check
from cmtrace.registry import identity_ids, run_suite


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", default="0")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args(argv)

    t0 = time.perf_counter()
    reports = run_suite(identity_ids(), args.trials, args.seed, args.workers)
    reports += [consistency_check(None, fam, args.trials, args.seed) for fam in ("cm", "commuting")]
    width = max(len(r.id) for r in reports)
    for r in reports:
        status = "ok  " if r.passed else "FAIL"
        extra = f"  first failure: {r.detail or r.witness}" if not r.passed else ""
        print(f"{status} {r.id:<{width}} {r.failures}/{r.trials}{extra}")
    failed = [r.id for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} passed in {time.perf_counter() - t0:.1f}s")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
