"""A rank-five M(2) whose recursive extension cannot be flat."""
from scpkit.exactla import rank
from scpkit.moments2d import MomentSeq2, column_relations, moment_matrix, translate
from scpkit.scp2d import flat_obstruction_check

# rows by degree: gamma[0,d], gamma[1,d-1], ..., gamma[d,0]
base = MomentSeq2.from_rows([[1], [1, 1], [2, 0, 3], [4, 0, 0, 9], [9, 0, 0, 0, 28]])
seq = translate(base, 3, 4)
for row in seq.rows():
    print(row)

m2 = moment_matrix(seq, 2)
print("rank M(2):", rank(m2.mat))
print("relation:", column_relations(m2)[0])

rep = flat_obstruction_check(seq)
print(rep.status)

# recursiveness pins most degree 5 and 6 moments; g05, g50 stay free
for mono, form in sorted(rep.propagated.items(), key=lambda kv: (kv[0].degree, kv[0].ydeg)):
    if mono.degree >= 5:
        print(f"  {mono.label():>6}: {form}")

for label, form in rep.coefficients.items():
    print(f"A_{label} = {form}")

# the failing row: the free parameter cancels and the numbers disagree
print("row", rep.witness_row.label(), "->", *map(str, rep.witness))

# moving the data back to the origin changes nothing
print(flat_obstruction_check(base).status, column_relations(moment_matrix(base, 2))[0])
