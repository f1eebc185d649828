"""Exact maximin shares by dynamic programming over the subset lattice.

The maximin share of an agent splitting a set of items n ways is the best
minimum-bundle value she can guarantee: max over n-partitions of min bundle
value.  The DP runs over submasks,

    f_k(S) = max over B subset of S of min(v(B), f_{k-1}(S \\ B)),

which costs O(n * 3^|items|) table operations.  Tables are int64 numerators
over a common denominator (exact); valuations whose numerators cannot be
scaled into int64 fall back to a pure-Python Fraction DP with identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import _kernels
from .items import ItemSet
from .valuations import Valuation, scale

MMS_ITEM_LIMIT = 20


@dataclass(frozen=True)
class MmsResult:
    """Maximin-share value together with one witnessing partition.

    The partition is the lexicographically smallest optimal one: bundle
    masks are minimized slot by slot, first slot first.
    """

    value: Fraction
    partition: tuple[ItemSet, ...]


def _submasks(mask: int) -> list[int]:
    out = []
    s = mask
    while True:
        out.append(s)
        if s == 0:
            break
        s = (s - 1) & mask
    return out


def _mms_levels_py(table, ground: int, n: int) -> list[dict]:
    subs = _submasks(ground)
    levels = [{s: table[s] for s in subs}]
    for _ in range(1, n):
        prev = levels[-1]
        cur = {}
        for s in subs:
            best = None
            b = s
            while True:
                cand = min(table[b], prev[s ^ b])
                if best is None or cand > best:
                    best = cand
                if b == 0:
                    break
                b = (b - 1) & s
            cur[s] = best
        levels.append(cur)
    return levels


def _reconstruct(level, raw, ground: int, n: int) -> list[int]:
    """Greedy slot-by-slot reconstruction; yields the lex-smallest optimum."""
    bundles: list[int] = []
    s = ground
    for k in range(n, 1, -1):
        target = level(k - 1, s)
        best_mask: Optional[int] = None
        b = s
        while True:
            if min(raw(b), level(k - 2, s ^ b)) == target:
                if best_mask is None or b < best_mask:
                    best_mask = b
            if b == 0:
                break
            b = (b - 1) & s
        assert best_mask is not None
        bundles.append(best_mask)
        s ^= best_mask
    bundles.append(s)
    return bundles


def exact_mms(v: Valuation, m: int, n: int, items: Optional[ItemSet] = None) -> MmsResult:
    """Exact maximin share of one agent splitting `items` n ways.

    `items` defaults to the full universe.  Empty bundles are legal, so n may
    exceed the number of items (the value is then v(empty) = 0).
    """
    if n < 1:
        raise ValueError("number of bundles must be at least 1")
    if m != v.m:
        raise ValueError(f"arity mismatch: m={m} but valuation has {v.m} items")
    if m > MMS_ITEM_LIMIT:
        raise ValueError(f"m={m} exceeds the exact-MMS limit of {MMS_ITEM_LIMIT}")
    if items is None:
        ground = (1 << m) - 1
    else:
        if items.universe_size != m:
            raise ValueError("items universe does not match the valuation arity")
        ground = items.bits

    try:
        nums, den = v.int_table()
        levels = _kernels.mms_levels(nums, ground, n)

        def level(k, s):
            return int(levels[k, s])

        def raw(b):
            return int(nums[b])

        bundles = _reconstruct(level, raw, ground, n)
        value = Fraction(level(n - 1, ground), den)
    except OverflowError:
        table = v.value_table()
        levels_py = _mms_levels_py(table, ground, n)

        def level(k, s):
            return levels_py[k][s]

        def raw(b):
            return table[b]

        bundles = _reconstruct(level, raw, ground, n)
        value = level(n - 1, ground)

    partition = tuple(ItemSet(b, m) for b in bundles)
    return MmsResult(value=value, partition=partition)


def normalize_to_unit_mms(v: Valuation, m: int, n: int) -> Valuation:
    """Rescale v so the agent's exact maximin share equals one.

    Raises ValueError on a zero maximin share (nothing to normalize against;
    such an agent is satisfied by any bundle and must be handled by the
    caller).  A valuation already at unit MMS is returned unchanged.
    """
    res = exact_mms(v, m, n)
    if res.value == 0:
        raise ValueError("maximin share is zero; normalization is undefined")
    return scale(v, Fraction(1, 1) / res.value)
