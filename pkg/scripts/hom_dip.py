#!/usr/bin/env python3
"""Emit the two-photon interference dip as CSV: station-a coincidence
probability against the analyzer angle, variant B.

Usage: hom_dip.py [POINTS] [OUT.csv]
"""

import csv
import math
import sys

from swapbell import hom_scan


def main() -> None:
    points = int(sys.argv[1]) if len(sys.argv) > 1 else 101
    grid = [i * (math.pi / 2) / (points - 1) for i in range(points)]
    rows = hom_scan(grid)
    out = open(sys.argv[2], "w", newline="") if len(sys.argv) > 2 else sys.stdout
    writer = csv.writer(out)
    writer.writerow(["theta1", "coincidence_probability"])
    for theta, p in rows:
        writer.writerow([f"{theta:.9g}", f"{p:.9g}"])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
