"""
Surveying a_{1,p} for a product of two curves
=============================================

"""

import numpy as np

from frobtrace import bounds as bnd
from frobtrace import survey as sv
from frobtrace.curves import Curve

pair = [Curve.short(1, 1, "E1"), Curve.short(2, 3, "E2")]

# Primes dividing a discriminant are dropped; everything else gets traces.
table = sv.compute_table(pair, 20_000)
print("pi(x) =", table.n_primes, " good primes =", len(table.primes), " bad =", table.bad)

# a_{1,p} = -(a_p(E1) + a_p(E2)); its histogram partitions the good primes.
hist = sv.histogram(table)
print("sum of histogram:", sum(hist.values()))
print("pi_A(x, 0) =", sv.pi_t(table, 0))

# Traces vanish rarely, so most primes land away from t = 0.
print("non-lacunarity at t = 0: %.4f" % sv.nonlacunarity(table, 0))
print("share with |a_1p| > p^(1/7 - 0.05): %.4f" % sv.large_trace(table, 0.05))

# The prime-window maximum: ell ranges over [y, y + u] from the schedule.
# At desk scale the schedule is infeasible, so it is clamped.
sched = bnd.choose_parameters(table.x, g=2, t_is_zero=True, clamp=True)
res = sv.max_survey(table, sched.y, sched.u, t=0)
print("window [%.2f, %.2f]" % sched.window, " per ell:", res.per_ell, " ratio:", res.ratio)

# Growth of pi_A(x, 0) along a grid, from one table.
for x in np.linspace(2_000, 20_000, 4).astype(int):
    print(x, sv.pi_t(table.upto(int(x)), 0))
