"""Lid-driven cavity at Re = 1000 on a 65x65 grid, marched to steady state.

Takes roughly ten minutes on one core.  Prints the vortex table.
"""
import logging

from cc4oc.harness import RunConfig, simulate

if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    res = simulate(RunConfig("cavity", 65, dt=0.01, re=1000.0, linear_rtol=0.1),
                   steady_tol=1e-10)
    print(f"steady after {res.steps} steps ({res.seconds:.0f} s)")
    for v in res.vortices:
        print(f"{v.kind:>10} {v.region}  psi={v.value: .5e}  node=({v.node_x:.4f}, "
              f"{v.node_y:.4f})  fit=({v.x:.4f}, {v.y:.4f})")
