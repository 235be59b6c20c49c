"""Spatial and temporal convergence of the compact scheme on the decaying
Taylor vortex, printed as tables.

Run with ``python demos/taylor_convergence.py``.
"""
from cc4oc.harness import convergence, temporal


def show(rows):
    print(f"{'nx':>4} {'dt':>9} {'L1':>11} {'L2':>11} {'Linf':>11} {'order':>6}")
    for r in rows:
        order = "" if r[9] is None else f"{r[9]:.2f}"
        print(f"{r[1]:4d} {r[3]:9.2e} {r[6]:11.4e} {r[7]:11.4e} {r[8]:11.4e} {order:>6}")


if __name__ == "__main__":
    print("space, dt = h^2, t = 0.25 (cell-normalised L1/L2)")
    show(convergence("taylor", [11, 21, 41], norms="cells"))
    print()
    print("time, h = 0.05")
    show(temporal("taylor", 21, [0.01, 0.005, 0.0025]))
