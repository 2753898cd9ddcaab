"""
Frobenius traces by exhaustive counting and baby-step giant-step
================================================================

"""

from frobtrace.curves import Curve, product_weil_poly, trace, trace_detail
from frobtrace.sieve import primes_between

# y^2 = x^3 + x + 1 and y^2 = x^3 + 2x + 3
e1 = Curve.short(1, 1, "E1")
e2 = Curve.short(2, 3, "E2")
print("discriminants:", e1.discriminant, e2.discriminant)

# Small primes: count points directly.  a_p = p + 1 - #E(F_p).
print("a_p(E1) for p = 3, 5, 7:", [trace(e1, p) for p in (3, 5, 7)])

# Above 2^14 the default switches to baby-step giant-step inside the Hasse
# interval.  When one random point leaves several candidate orders the
# quadratic twist settles it; the method field says which path ran.
for p in primes_between(16384, 16450):
    fast = trace_detail(e1, p, method="bsgs")
    slow = trace(e1, p, method="exhaustive")
    print(f"p={p}  bsgs {fast.a_p:5d} ({fast.method})  exhaustive {slow:5d}")

# For the product E1 x E2 the Weil polynomial is the product of the
# factors X^2 - a_p X + p.  Its X^3 coefficient is -(a_p(E1) + a_p(E2)).
p = 101
recs = [(trace(e1, p), p), (trace(e2, p), p)]
print("traces at 101:", [a for a, _ in recs])
print("product Weil polynomial:", product_weil_poly(recs))
print("reduced mod 7:", product_weil_poly(recs, 7))
