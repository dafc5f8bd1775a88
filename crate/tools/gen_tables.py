#!/usr/bin/env python3
"""Regenerate the bundled knot tables and the Khovanov regression data.

Input: the pipe-delimited `knotinfo_data_complete.csv` shipped in the
`database_knotinfo` wheel.  Output (relative to the repository root):

  crates/core/data/knots.tsv            prime knots <= 10 crossings + fixtures
  crates/core/tests/data/knots11.tsv    prime knots with 11 crossings
  crates/core/tests/data/khovanov.tsv   integral Khovanov data for regression
"""
import csv
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def pd_text(code):
    return " ".join("X[%s]" % ",".join(str(a) for a in x) for x in code)


def main(src):
    rows = list(csv.reader(open(src), delimiter="|"))
    head = rows[0]
    col = {k: i for i, k in enumerate(head)}
    knots = []
    for r in rows[2:]:
        try:
            c = int(r[col["crossing_number"]])
        except ValueError:
            continue
        if c > 11 or c == 0:
            continue
        pd = json.loads(r[col["pd_notation"]])
        knots.append((c, r[col["name"]], pd, r))

    def key(k):
        c, name, _, _ = k
        tail = name.split("_")[1]
        return (c, name.split("_")[0], int(tail))

    knots.sort(key=key)
    small = [k for k in knots if k[0] <= 10]
    eleven = [k for k in knots if k[0] == 11]

    with open(ROOT / "crates/core/data/knots.tsv", "w") as f:
        f.write("# name\tpd-code (prime knots up to 10 crossings, then fixtures)\n")
        for _, name, pd, _ in small:
            f.write("%s\t%s\n" % (name, pd_text(pd)))
        f.write("unknot\tU\n")
        f.write("unknot_kink+\tX[1,1,2,2]\n")
        f.write("unknot_kink-\tX[1,2,2,1]\n")
        tref = [[1, 5, 2, 4], [3, 1, 4, 6], [5, 3, 6, 2]]
        f.write("T2_3\t%s\n" % pd_text(tref))
        two = tref + [[a + 6 for a in x] for x in tref]
        f.write("T2_3+T2_3\t%s\n" % pd_text(two))

    with open(ROOT / "crates/core/tests/data/knots11.tsv", "w") as f:
        f.write("# name\tpd-code (prime knots with 11 crossings)\n")
        for _, name, pd, _ in eleven:
            f.write("%s\t%s\n" % (name, pd_text(pd)))

    with open(ROOT / "crates/core/tests/data/khovanov.tsv", "w") as f:
        f.write("# name\ts\todd reduced integral\tunreduced integral\n")
        for _, name, _, r in small:
            f.write("%s\t%s\t%s\t%s\n" % (
                name,
                r[col["rasmussen_invariant"]],
                r[col["khovanov_odd_integral_polynomial"]].replace(" ", ""),
                r[col["khovanov_unreduced_integral_polynomial"]].replace(" ", ""),
            ))
    print(len(small), "knots <= 10,", len(eleven), "with 11 crossings")


if __name__ == "__main__":
    main(sys.argv[1])
