"""
Bound shapes, the window schedule and a combined report
=======================================================

"""

import json
import os
import tempfile

from frobtrace import bounds as bnd
from frobtrace import cli

# x^(1 - 1/k) / (log x)^(1 - 2/k) with k = 3g + 1 at t = 0 and 3g + 2 otherwise.
for g in (1, 2):
    print(f"g={g}  exponents t=0 {bnd.theorem1_exponents(g, True)}  t!=0 {bnd.theorem1_exponents(g, False)}")
print("bound at 1e5, g=2, t=0: %.1f" % bnd.theorem1_bound(1e5, 2, True))

# The schedule needs y > 3 and u <= y, which only holds far out.
y, u = bnd.schedule_values(1e8, 1, True)
print("x=1e8: y=%.2f u=%.2f" % (y, u))
print("feasible from x = %.3g (g=1, t=0)" % bnd.min_feasible_x(1, True))

# Chebotarev-style main and error terms with the discriminant product as N.
print("terms at x=1e6, ell=13: main %.2f error %.3g" % bnd.chebotarev_terms(1e6, 13, 1, 11 * 37))

# The command line ties everything together.  Pinning SOURCE_DATE_EPOCH
# makes reruns byte-identical.
os.environ["SOURCE_DATE_EPOCH"] = "1700000000"
work = tempfile.mkdtemp()
os.chdir(work)
with open("pair.txt", "w") as fh:
    fh.write("E1: 0,0,0,1,1\nE2: 0,0,0,2,3\n")
cli.main(["survey", "--curves", "pair.txt", "--x-grid", "1000,10000,4", "--out", "survey.json"])
cli.main(["bounds", "--x-grid", "1000,10000,10", "--g", "2", "--t0", "--out", "bounds.csv"])
cli.main(["report", "--inputs", "survey.json,bounds.csv", "--out", "report.csv"])
print(json.load(open("survey.json"))["manifest"]["command"])
print(open("report.csv").read())
