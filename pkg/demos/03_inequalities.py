"""
Original and generalized three-setting inequalities
===================================================

``|P(a,b) - P(a,c)| <= 1 + P(b,c)`` holds for local hidden-variable models
and fails for the singlet at the 60/60 triple. The weaker
``|P(a,b) - P(a,c)| <= 3 - |P(b,c)|`` holds for any correlations in [-1, 1].
"""

import numpy as np

from bellexp import IntegrationConfig, coplanar_triple, evaluate_all, get_model, singlet
from bellexp.spin import Direction

triple = coplanar_triple(60, 60)
for source, cfg in [(singlet(), None), (get_model("sign"), IntegrationConfig(sample_count=500_000, seed=3))]:
    reports, bound, est = evaluate_all(source, *triple, cfg=cfg)
    print(reports[0].source, [round(e.mean, 4) for e in est])
    for r in reports:
        print(f"  {r.name:17s} lhs={r.lhs:.4f} rhs={r.rhs:.4f} margin={r.margin:+.4f} satisfied={r.satisfied}")
    print(f"  composite |P(a,b)-P(a,c)| + |P(b,c)| = {bound.composite:.4f} <= 3")

# %%
# Margins of the generalized inequality over random states and settings.
# They stay non-negative but are not bounded below by 1.
from bellexp import generalized_bell, qm_correlation
from bellexp.spin import TwoQubitState

rng = np.random.default_rng(0)
margins = []
for _ in range(2000):
    psi = TwoQubitState.normalized(rng.normal(size=4) + 1j * rng.normal(size=4))
    a, b, c = (Direction.normalized(*rng.normal(size=3)) for _ in range(3))
    margins.append(generalized_bell(qm_correlation(psi, a, b), qm_correlation(psi, a, c),
                                    qm_correlation(psi, b, c)).margin)
margins = np.array(margins)
print(f"min margin {margins.min():.3f}; fraction below 1: {np.mean(margins < 1):.3%}")
