#!/usr/bin/env python3
"""Emit best CHSH value against detector distinguishability as CSV.

Usage: alpha_sweep.py [VARIANT] [POINTS] [OUT.csv]
"""

import csv
import sys

from swapbell import maximize_chsh


def main() -> None:
    variant = sys.argv[1] if len(sys.argv) > 1 else "B"
    points = int(sys.argv[2]) if len(sys.argv) > 2 else 21
    out = open(sys.argv[3], "w", newline="") if len(sys.argv) > 3 else sys.stdout
    writer = csv.writer(out)
    writer.writerow(["alpha", "s_max", "violated"])
    for i in range(points):
        alpha = i / (points - 1)
        best = maximize_chsh(variant, alpha)
        writer.writerow([f"{alpha:.9g}", f"{best.s:.9g}", int(best.violated)])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
