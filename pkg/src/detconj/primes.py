"""Word-size primes for modular determinant runs."""

from __future__ import annotations

import random

PRIME_LO = 1 << 60
PRIME_HI = 1 << 62

# Deterministic Miller-Rabin witnesses, valid for n < 3.3 * 10**24.
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prev_prime(n: int) -> int:
    """Largest prime strictly below ``n``."""
    n -= 1
    if n < 2:
        raise ValueError("no prime below 2")
    if n > 2 and n % 2 == 0:
        n -= 1
    while not is_prime(n):
        n -= 2 if n > 3 else 1
    return n


def descending_primes(hi: int = PRIME_HI):
    """Primes below ``hi`` in decreasing order."""
    p = hi
    while True:
        p = prev_prime(p)
        yield p


def sample_primes(k: int, seed: int, lo: int = PRIME_LO, hi: int = PRIME_HI) -> list[int]:
    """``k`` distinct primes drawn from [lo, hi), reproducible from ``seed``."""
    rng = random.Random(seed)
    out: list[int] = []
    seen = set()
    while len(out) < k:
        p = rng.randrange(lo, hi) | 1
        while not is_prime(p):
            p += 2
        if p < hi and p not in seen:
            seen.add(p)
            out.append(p)
    return out
