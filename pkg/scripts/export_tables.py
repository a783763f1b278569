"""Write Gr and QH structure-constant tables for a few groups to a directory.

    python3 scripts/export_tables.py --out tables --max-length 3
"""

import argparse
import itertools
import sys
from pathlib import Path

from petersonmap.cli import RunConfig, compute_gr_table, gr_pairs, gr_table_file, qh_table_file
from petersonmap.qhring import qh_ring
from petersonmap.rootdata import ParabolicType, parse_type


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--types", nargs="+", default=["A1", "A2", "C2", "G2"])
    ap.add_argument("--max-length", type=int, default=3)
    ap.add_argument("--out", default="tables")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for label in args.types:
        rs = parse_type(label)
        cfg = RunConfig(rs.type_label, rs.rank, (), args.max_length)
        tf = gr_table_file(cfg, compute_gr_table(cfg, gr_pairs(cfg)))
        path = out / f"gr_{label}_L{args.max_length}.{args.format}"
        path.write_text(tf.to_json() if args.format == "json" else tf.to_csv())
        print(f"{path}: {len(tf.rows)} rows")
        for k in range(rs.rank):
            for P in itertools.combinations(range(1, rs.rank + 1), k):
                pcfg = RunConfig(rs.type_label, rs.rank, P)
                tf = qh_table_file(pcfg, qh_ring(rs, ParabolicType.of(P)).product_table())
                tag = "".join(map(str, P)) or "B"
                path = out / f"qh_{label}_P{tag}.{args.format}"
                path.write_text(tf.to_json() if args.format == "json" else tf.to_csv())
                print(f"{path}: {len(tf.rows)} rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())
