"""Regenerates data/rough_template_v1.csv (40 x 40 labels in 0..3).

Label 0 is open water west of a wavy coastline and covers the grid centre.
Label 1 is land; labels 2 and 3 are two irregular highland patches on it.
"""
import math
import sys

N = 40


def label(row, col):
    x = (col + 0.5) / N
    y = (row + 0.5) / N
    if x + 0.15 * math.sin(3 * math.pi * y) + 0.04 * math.sin(11 * y) < 0.55:
        return 0
    a = math.atan2(y - 0.27, x - 0.80)
    r2 = 0.17 + 0.03 * math.sin(3 * a)
    if math.hypot((x - 0.80) / 0.9, y - 0.27) < r2:
        return 2
    b = math.atan2(y - 0.76, x - 0.82)
    r3 = 0.12 + 0.025 * math.cos(2 * b + 1.0)
    if math.hypot(x - 0.82, (y - 0.76) / 1.2) < r3:
        return 3
    return 1


def main(path):
    with open(path, "w", newline="\n") as f:
        f.write("# rough template v1: plateau labels 0..3\n")
        f.write("row,col,value\n")
        for row in range(N):
            for col in range(N):
                f.write(f"{row},{col},{label(row, col)}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/rough_template_v1.csv")
