"""Numba kernels for exact integer arithmetic on the subset lattice.

Value tables arrive as int64 numerators over a common denominator (built in
valuations.int_table), with magnitudes capped at 2**61 so pairwise sums
cannot overflow.  All comparisons on numerators are therefore exact.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def mms_levels(tab, ground, n):
    """DP tables for max-min n-partitions of every submask of `ground`.

    levels[k, S] = best achievable minimum bundle value when S is split into
    k+1 bundles (empty bundles allowed).  Runs in O(n * 3^|ground|).
    """
    size = tab.shape[0]
    levels = np.empty((n, size), dtype=np.int64)
    for i in range(size):
        levels[0, i] = tab[i]
    for k in range(1, n):
        s = ground
        while True:
            best = np.int64(-1)
            b = s
            while True:
                w = tab[b]
                r = levels[k - 1, s ^ b]
                cand = w if w < r else r
                if cand > best:
                    best = cand
                if b == 0:
                    break
                b = (b - 1) & s
            levels[k, s] = best
            if s == 0:
                break
            s = (s - 1) & ground
    return levels


@njit(cache=True)
def subadditive_disjoint(tab):
    """v(S) + v(U\\S) >= v(U) for every split of every U (3^m/2 checks).

    Sufficient for subadditivity when v is monotone.
    """
    size = tab.shape[0]
    for u in range(size):
        s = u
        while True:
            r = u ^ s
            if s <= r:  # visit each unordered split once
                if tab[s] + tab[r] < tab[u]:
                    return False
            if s == 0:
                break
            s = (s - 1) & u
    return True


@njit(cache=True)
def subadditive_pairs(tab):
    """v(S) + v(T) >= v(S|T) for all pairs, disjoint or not (4^m/2 checks)."""
    size = tab.shape[0]
    for s in range(size):
        vs = tab[s]
        for t in range(s, size):
            if vs + tab[t] < tab[s | t]:
                return False
    return True
