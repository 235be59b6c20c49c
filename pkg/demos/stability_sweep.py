"""Von Neumann check of the weighted time scheme over random parameters.

For iota >= 1/2 the worst |G| never exceeds one; forward Euler does.
"""
from cc4oc.analysis import amplification_factor, explicit_blowup_example
from cc4oc.harness import stability_table

if __name__ == "__main__":
    for iota in (0.0, 0.5, 0.75, 1.0):
        rows = stability_table(iota, 20, n_theta=64, seed=1)
        worst = max(rows, key=lambda r: r[7])
        print(f"iota={iota:4.2f}  max|G|={worst[7]:.6g}  (c={worst[2]:.1f}, d={worst[3]:.1f}, "
              f"dt={worst[4]:.2e}, h={worst[5]:.2e}, k={worst[6]:.2e})")
    q = explicit_blowup_example()
    print(f"explicit mode at theta=(pi, pi), dt={q.dt:.4g}: |G|={abs(amplification_factor(q)):.3f}")
