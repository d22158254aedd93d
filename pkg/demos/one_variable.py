"""One-variable completions: the Hankel test and the two-atom measures."""
from fractions import Fraction as F

from scpkit.scp1d import WeightSeq1, scc_check, scc_complete
from scpkit.shifts import abc_measure, recursive_moments

for weights in [(F(3, 2),), (1, 3), (2, 1), (1, 1, 2), (1, 3, 3), (F(3, 2), F(5, 3), F(9, 5))]:
    w = WeightSeq1(weights)
    v = scc_check(w)
    print([str(a) for a in weights], "->", v.admits_completion, end="  ")
    if v.admits_completion:
        print(scc_complete(w))
    else:
        print()

# the abc shift: a recursion t^2 = phi1 t + phi0 and its roots
rec, mu = abc_measure(1, 2, 3)
print("phi1 =", rec.phi1, " phi0 =", rec.phi0)
print(mu)  # atoms 2 -+ sqrt(2)
print([str(g) for g in recursive_moments(rec, 8)])
print([str(g) for g in mu.moments(8)])
