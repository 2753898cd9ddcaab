"""
Subgroups of GL2(F_ell)^g and their conjugacy sets
==================================================

"""

# Every subgroup is held as an (n, g, 4) integer array, one row of
# (a, b, c, d) entries per component matrix.
import numpy as np

from frobtrace.group_lab.conjsets import ConjSetKind, conj_set
from frobtrace.group_lab.groups import Kind, element_array, group_order
from frobtrace.group_lab.verify import verify_lemma

ell, g = 5, 2

# Orders come in closed form, and the enumerated arrays agree with them.
for kind in (Kind.G, Kind.B, Kind.U, Kind.UPRIME, Kind.T):
    arr = element_array(kind, ell, g)
    print(f"{kind.value:7s} closed form {group_order(kind, ell, g):7d}  enumerated {len(arr):7d}")

# The Borel subgroup is upper triangular with a common determinant.
b = element_array(Kind.B, ell, g)
print("first Borel element:\n", b[0].reshape(g, 2, 2))

# C_Torus(t) collects diagonal tuples whose traces add up to -t.  At t = 0
# the set is nonempty because 2g is invertible mod ell.
torus = conj_set(ConjSetKind("CTorus", 0), ell, g)
print("|C_Torus(5, 0)| =", len(torus))

# Each verifier enumerates the sets it talks about and checks the statement
# directly.  The report carries cardinalities and the checks that ran.
report = verify_lemma("L5.4", ell, g, t=0, z=2)
print("passed:", report.passed)
for name, value in sorted(report.cardinalities.items()):
    print(f"  {name:22s} {value}")

# A failed check would name a counterexample.  Normality of U in B passes:
print("L4.1 checks:", verify_lemma("L4.1", ell, g).checks)
