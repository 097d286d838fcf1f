"""Tent-window transform bounds and the covering inequality.

    python demos/window_bounds.py
"""

from wgl import run_all


def main():
    for r in run_all():
        state = "refused" if r.refused else ("pass" if r.passed else "FAIL")
        print(f"{r.name:24s} {state:8s} worst margin {r.worst_margin:.4g}")


if __name__ == "__main__":
    main()
