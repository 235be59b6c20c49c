"""Scaled modified wavenumbers of the six schemes at low and high cell
Reynolds number.

At Pe = 0.1 every compact scheme tracks the exact curves at small kh.  At
Pe = 100 the HOC real part grows far beyond the exact one, while the
scaled CC4OC symbol does not depend on Pe at all.
"""
import numpy as np

from cc4oc.analysis import ALL_SCHEMES, characteristic_curve, nondimensional

if __name__ == "__main__":
    kh = np.array([0.25, 0.5, 1.0, 2.0, np.pi])
    for pe in (0.1, 100.0):
        print(f"Pe = {pe}")
        print(f"{'scheme':>7} " + " ".join(f"{k:>17.3f}" for k in kh))
        for s in ALL_SCHEMES:
            re, im = nondimensional(characteristic_curve(s, kh, 1.0, pe), 1.0, pe)
            cells = " ".join(f"{a:8.3f},{b:8.3f}" for a, b in zip(re, im))
            print(f"{s.value:>7} {cells}")
        print()
