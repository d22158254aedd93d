"""Completing five quadratic weights to a subnormal pair, step by step."""
from fractions import Fraction

from scpkit.exactla import det, is_psd, rank
from scpkit.moments2d import column_relations
from scpkit.scp2d import QuadraticData, build_flat_m2, quadratic_scp
from scpkit.shifts import marginals

# a, b, c, d, e are squared weights; f is forced by commutativity
d = QuadraticData(1, 1, 2, 2, 1)
print("f =", d.f)

m1 = d.m1()
print("M(1) =", m1)
print("PSD:", is_psd(m1), " det:", det(m1), " rank:", rank(m1))

# four new squared weights and the flat quartic moment matrix
p, q, r, s, m2 = build_flat_m2(d)
print("p, q, r, s =", p, q, r, s)
print("rank M(2) =", rank(m2.mat))  # same as rank M(1): flat

# column relations cut out the support
for rel in column_relations(m2):
    print("  ", rel, "= 0")

res = quadratic_scp(d)
print(res.case_tag)
print("μ =", res.measure)

# from n = 1 on, the y-marginal obeys a two-step recursion with roots f and z
_, my = marginals(res.measure)
g = my.moments(7)
f, z = d.f, res.z
print([g[n + 2] - (f + z) * g[n + 1] + f * z * g[n] for n in range(1, 6)])

# rank-two data: the atoms sit on a line
res2 = quadratic_scp(QuadraticData(1, 2, 2, Fraction(5, 2), Fraction(3, 2)))
print(res2.case_tag, res2.measure, "y0 =", res2.y0)

# a = c pins every atom to x = a
print(quadratic_scp(QuadraticData(2, 1, 2, 3, 2)).measure)

# the completion continues to any depth
w = res.completion
print({k: str(v) for k, v in sorted(w.alpha_sq.items())[:6]})
