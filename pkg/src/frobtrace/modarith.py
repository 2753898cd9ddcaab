"""Small modular-arithmetic helpers shared by the group and curve code."""

from __future__ import annotations

import math


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24, trial division below 1000."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    if n < 1681:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a | p) for an odd prime p, in {-1, 0, 1}."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a mod the odd prime p (Tonelli-Shanks), or None."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def least_nonresidue(p: int) -> int:
    """Smallest quadratic non-residue mod the odd prime p."""
    z = 2
    while legendre(z, p) != -1:
        z += 1
    return z


def primitive_root(p: int) -> int:
    """Smallest generator of (Z/pZ)^x for a prime p."""
    if p == 2:
        return 1
    factors = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise ValueError(f"no primitive root mod {p}")


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of |n| in ascending order (trial division + rho)."""
    n = abs(n)
    out: set[int] = set()
    for q in (2, 3, 5):
        if n % q == 0:
            out.add(q)
            while n % q == 0:
                n //= q
    _factor_into(n, out)
    return sorted(out)


def _factor_into(n: int, out: set[int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out.add(n)
        return
    f = 7
    while f * f <= n and f < 10_000:
        if n % f == 0:
            out.add(f)
            while n % f == 0:
                n //= f
            _factor_into(n, out)
            return
        f += 2
    d = _pollard_rho(n)
    _factor_into(d, out)
    _factor_into(n // d, out)


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1
