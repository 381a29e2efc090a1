"""
The 60/60 rearrangement counterexample
======================================

For products of local outcomes the difference ``E(a,b) - E(a,b')`` can be
rearranged into ``E(a,b)[1 +/- E(a',b')] - E(a,b')[1 +/- E(a',b)]``.
Operator expectations on the singlet do not admit that rearrangement.
"""

from bellexp import coplanar_triple, qm_correlation, rearrangement_check, singlet

# a, b, c in the xz-plane: a at 0 degrees, b at 60, c at 120; a' = b' = c
a, b, c = coplanar_triple(60, 60)
psi = singlet()

for name, (u, v) in {"E(a,b)": (a, b), "E(a,c)": (a, c), "E(b,c)": (b, c)}.items():
    print(f"{name} = {qm_correlation(psi, u, v):+.6f}")

# %%
# Both sign choices fail by 3/4.
rep = rearrangement_check(psi, a, b, c, c)
print(f"lhs      = {rep.lhs:+.6f}")
print(f"rhs(+)   = {rep.rhs_plus:+.6f}   equal: {rep.equal_plus}")
print(f"rhs(-)   = {rep.rhs_minus:+.6f}   equal: {rep.equal_minus}")

# %%
# A product state has no such problem: its correlations factor.
from bellexp import product_state, qm_marginal
from bellexp.spin import DOWN, UP

up_down = product_state(UP, DOWN)
print(qm_correlation(up_down, a, b), qm_marginal(up_down, a, "A") * qm_marginal(up_down, b, "B"))
