"""Brute-force references kept independent of the library code paths."""

from fractions import Fraction
from itertools import combinations
from math import comb


def harmonic_direct(n):
    return sum((Fraction(1, m) for m in range(1, n + 1)), Fraction(0))


def pmf_inclusion_exclusion(n):
    """Exact law of U_n by inclusion-exclusion over subsets of types.

    Label types by the order the collector first sees them. Between her
    g-th and (g+1)-th new type she draws a geometric number of doubles, each
    uniform on her g types, so for a set S of labels

        P(brother misses all of S) = prod_{g=1}^{n-1} (n-g) / (n-g+|S & {1..g}|).

    U counts missed types, so P(U = u) follows from inclusion-exclusion.
    Cost is 2**n; keep n small.
    """
    miss = {}
    for size in range(n + 1):
        for subset in combinations(range(1, n + 1), size):
            p = Fraction(1)
            for g in range(1, n):
                hit = sum(1 for j in subset if j <= g)
                p *= Fraction(n - g, n - g + hit)
            miss[subset] = p
    # S_k = sum over |S| = k of P(misses all of S)
    s = [Fraction(0)] * (n + 1)
    for subset, p in miss.items():
        s[len(subset)] += p
    probs = []
    for u in range(n + 1):
        probs.append(sum(((-1) ** (k - u) * comb(k, u) * s[k] for k in range(u, n + 1)), Fraction(0)))
    return probs
