"""
Hidden-variable versus quantum correlation curves
=================================================

The sign model ``A = sign(a.lam)``, ``B = -sign(b.lam)`` gives the straight
line ``-1 + 2 theta/pi``; the singlet gives ``-cos(theta)``. Both agree at
0, 90 and 180 degrees and nowhere else.
"""

import math

import numpy as np

from bellexp import Direction, IntegrationConfig, get_model, lhv_correlation, qm_correlation, singlet

model = get_model("sign")
mc = IntegrationConfig(sample_count=200_000, seed=1)
quad = IntegrationConfig(method="sphere-quadrature", sample_count=256)
a = Direction.from_angle(0)

print(f"{'deg':>5} {'singlet':>10} {'sign (MC)':>12} {'+/-':>8} {'sign (quad)':>12} {'closed':>9}")
for deg in np.arange(0, 181, 15):
    b = Direction.from_angle(deg)
    est = lhv_correlation(model, a, b, mc)
    q = lhv_correlation(model, a, b, quad)
    closed = -1 + 2 * math.radians(deg) / math.pi
    print(f"{deg:5.0f} {qm_correlation(singlet(), a, b):10.5f} {est.mean:12.5f} {est.std_error:8.5f} "
          f"{q.mean:12.5f} {closed:9.5f}")

# %%
# The same table can be written from the command line:
#
#   bellexp curve --source singlet --source sign --step 15 --output curve.txt
#
# Matplotlib, when available, draws the two curves.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    theta = np.linspace(0, 180, 181)
    plt.plot(theta, -np.cos(np.radians(theta)), label="singlet")
    plt.plot(theta, -1 + 2 * theta / 180, label="sign model")
    plt.xlabel("angle between settings (deg)")
    plt.ylabel("correlation")
    plt.legend()
    plt.savefig("correlation_curves.png", dpi=100)
