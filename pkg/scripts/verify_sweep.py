"""Run the homomorphism check over a grid of groups and parabolics.

    python3 scripts/verify_sweep.py --max-length 3 --out sweep.json

Prints one summary line per configuration and writes the full reports as a
JSON list.  Exits 1 if any configuration fails.
"""

import argparse
import itertools
import json
import sys
import time

from petersonmap.peterson import verify_homomorphism
from petersonmap.rootdata import ParabolicType, parse_type

DEFAULT_TYPES = ["A1", "A2", "B2", "C2", "G2"]


def parabolics(rank, proper=True):
    top = rank if proper else rank + 1
    return [P for k in range(top) for P in itertools.combinations(range(1, rank + 1), k)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--types", nargs="+", default=DEFAULT_TYPES)
    ap.add_argument("--max-length", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    reports, ok = [], True
    for label in args.types:
        rs = parse_type(label)
        for P in parabolics(rs.rank):
            t0 = time.perf_counter()
            rep = verify_homomorphism(rs, ParabolicType.of(P), args.max_length, threads=args.threads)
            ok &= rep.passed
            par = ",".join(map(str, P)) or "Borel"
            print(f"{label:3} P={par:6} pairs={rep.pairs_checked:5} failures={len(rep.failures):3} "
                  f"{'PASS' if rep.passed else 'FAIL'} {time.perf_counter() - t0:.1f}s")
            reports.append(rep.to_dict())
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(reports, fh, indent=2, sort_keys=True)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
