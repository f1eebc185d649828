"""Set-function oracles over a fixed item universe, with exact rational values.

Every valuation maps subsets of items 0..m-1 to non-negative rationals with
v(empty) = 0, and is immutable after construction.  Shipped classes:

  additive   -- weighted sum of the chosen items
  xos        -- max over finitely many additive clauses (fractionally subadditive)
  coverage   -- total weight of ground elements covered by the chosen items
  table      -- explicit value for every subset (small universes)
  staircase  -- depends on |S| only: climbs to a plateau, pauses, climbs again
  near_two   -- 1 on every proper nonempty subset, 2 on the full set
  scaled     -- another valuation times a positive rational factor

Values are fractions.Fraction end to end; floats only appear in Monte Carlo
layers.  For exhaustive work each valuation also exposes an int64 table of
numerators over one common denominator (int_table), which is what the
dynamic programs and class checkers consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .items import ItemSet

# int64 sums of two table entries must not overflow
_INT64_CAP = 1 << 61

MONOTONE_LIMIT = 16
SUBMODULAR_LIMIT = 16
SUBADDITIVE_LIMIT = 12
TABLE_LIMIT = 20

_PC16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.int64)


def popcounts(masks: np.ndarray) -> np.ndarray:
    """Elementwise popcount for masks below 2**32."""
    return _PC16[masks & 0xFFFF] + _PC16[(masks >> 16) & 0xFFFF]


def as_fraction(x) -> Fraction:
    """Exact rational from int, str, or Fraction; floats are rejected.

    Strings may be decimals ("0.25") or ratios ("1/3"); both parse exactly.
    """
    if isinstance(x, bool):
        raise TypeError("weights must be rationals, not booleans")
    if isinstance(x, float):
        raise TypeError(
            f"got float {x!r}: pass weights as int, str, or Fraction so values stay exact"
        )
    return Fraction(x)


def _common_denominator(fracs: Sequence[Fraction]) -> int:
    den = 1
    for f in fracs:
        den = den * f.denominator // math.gcd(den, f.denominator)
    return den


def _int64_array(nums: Sequence[int]) -> np.ndarray:
    arr = np.array(nums, dtype=np.int64)
    arr.flags.writeable = False
    return arr


class Valuation:
    """Base oracle: a set function over items 0..m-1 with v(empty) = 0."""

    kind = "abstract"

    def __init__(self, m: int):
        if m < 0:
            raise ValueError("arity must be non-negative")
        self.m = int(m)
        self._cache: dict = {}

    # -- semantic definition -------------------------------------------------

    def value_of_mask(self, mask: int) -> Fraction:
        """Exact value of the subset encoded by `mask`."""
        raise NotImplementedError

    # -- derived helpers -----------------------------------------------------

    def singleton_values(self) -> list[Fraction]:
        return [self.value_of_mask(1 << e) for e in range(self.m)]

    def max_singleton(self) -> Fraction:
        vals = self.singleton_values()
        return max(vals) if vals else Fraction(0)

    def size_profile(self) -> Optional[list[Fraction]]:
        """Values by subset size when v depends on |S| alone, else None."""
        return None

    def int_table(self) -> tuple[np.ndarray, int]:
        """(numerators, denominator): all 2^m values as num/den over int64.

        Raises OverflowError if the table cannot be represented safely;
        callers then fall back to the Fraction path (value_table).
        """
        cached = self._cache.get("int_table")
        if cached is None:
            if self.m > TABLE_LIMIT:
                raise ValueError(
                    f"m={self.m} exceeds the exhaustive-table limit of {TABLE_LIMIT}"
                )
            cached = self._build_int_table()
            nums, den = cached
            if den > _INT64_CAP:
                raise OverflowError("common denominator exceeds the int64-safe cap")
            self._cache["int_table"] = cached
        return cached

    def _build_int_table(self) -> tuple[np.ndarray, int]:
        table = [self.value_of_mask(mask) for mask in range(1 << self.m)]
        den = _common_denominator(table)
        if den > _INT64_CAP:
            raise OverflowError("common denominator exceeds the int64-safe cap")
        nums = [f.numerator * (den // f.denominator) for f in table]
        if nums and max(nums) > _INT64_CAP:
            raise OverflowError("scaled values exceed the int64-safe cap")
        return _int64_array(nums), den

    def value_table(self) -> list[Fraction]:
        """All 2^m values in mask order, as Fractions."""
        cached = self._cache.get("value_table")
        if cached is None:
            try:
                nums, den = self.int_table()
                cached = [Fraction(int(v), den) for v in nums]
            except OverflowError:
                cached = [self.value_of_mask(mask) for mask in range(1 << self.m)]
            self._cache["value_table"] = cached
        return cached

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} m={self.m}>"


class Additive(Valuation):
    """v(S) = sum of per-item weights over S."""

    kind = "additive"

    def __init__(self, weights: Sequence):
        weights = tuple(as_fraction(w) for w in weights)
        if any(w < 0 for w in weights):
            raise ValueError("additive weights must be non-negative")
        super().__init__(len(weights))
        self.weights = weights

    def value_of_mask(self, mask: int) -> Fraction:
        total = Fraction(0)
        while mask:
            low = mask & -mask
            total += self.weights[low.bit_length() - 1]
            mask ^= low
        return total

    def size_profile(self) -> Optional[list[Fraction]]:
        if self.m and len(set(self.weights)) == 1:
            w = self.weights[0]
            return [k * w for k in range(self.m + 1)]
        if self.m == 0:
            return [Fraction(0)]
        return None

    def _build_int_table(self) -> tuple[np.ndarray, int]:
        den = _common_denominator(self.weights)
        w_nums = [w.numerator * (den // w.denominator) for w in self.weights]
        if den > _INT64_CAP or sum(w_nums) > _INT64_CAP:
            raise OverflowError("additive weights exceed the int64-safe cap")
        tab = np.zeros(1 << self.m, dtype=np.int64)
        idx = np.arange(1 << self.m)
        for i, wn in enumerate(w_nums):
            tab[(idx & (1 << i)) != 0] += wn
        tab.flags.writeable = False
        return tab, den

    def to_json(self) -> dict:
        return {"type": "additive", "weights": [str(w) for w in self.weights]}


class Xos(Valuation):
    """v(S) = max over additive clauses of the clause's sum on S."""

    kind = "xos"

    def __init__(self, clauses: Sequence[Sequence]):
        parsed = tuple(tuple(as_fraction(w) for w in clause) for clause in clauses)
        if not parsed:
            raise ValueError("xos needs at least one clause")
        m = len(parsed[0])
        if any(len(c) != m for c in parsed):
            raise ValueError("all xos clauses must have the same arity")
        if any(w < 0 for c in parsed for w in c):
            raise ValueError("xos clause weights must be non-negative")
        super().__init__(m)
        self.clauses = parsed

    def value_of_mask(self, mask: int) -> Fraction:
        best = Fraction(0)
        for clause in self.clauses:
            total = Fraction(0)
            rest = mask
            while rest:
                low = rest & -rest
                total += clause[low.bit_length() - 1]
                rest ^= low
            if total > best:
                best = total
        return best

    def _build_int_table(self) -> tuple[np.ndarray, int]:
        den = _common_denominator([w for c in self.clauses for w in c])
        if den > _INT64_CAP:
            raise OverflowError("xos weights exceed the int64-safe cap")
        idx = np.arange(1 << self.m)
        best = np.zeros(1 << self.m, dtype=np.int64)
        for clause in self.clauses:
            w_nums = [w.numerator * (den // w.denominator) for w in clause]
            if sum(w_nums) > _INT64_CAP:
                raise OverflowError("xos weights exceed the int64-safe cap")
            tab = np.zeros(1 << self.m, dtype=np.int64)
            for i, wn in enumerate(w_nums):
                tab[(idx & (1 << i)) != 0] += wn
            np.maximum(best, tab, out=best)
        best.flags.writeable = False
        return best, den

    def to_json(self) -> dict:
        return {
            "type": "xos",
            "clauses": [[str(w) for w in clause] for clause in self.clauses],
        }


class Coverage(Valuation):
    """v(S) = total weight of ground elements covered by the items of S.

    Item i covers the ground elements listed in covers[i]; weights are
    per-ground-element.  Monotone and submodular by construction.
    """

    kind = "coverage"

    def __init__(self, element_weights: Sequence, covers: Sequence[Sequence[int]]):
        weights = tuple(as_fraction(w) for w in element_weights)
        if any(w < 0 for w in weights):
            raise ValueError("coverage element weights must be non-negative")
        g = len(weights)
        if g > TABLE_LIMIT:
            raise ValueError(f"ground set of size {g} exceeds the limit of {TABLE_LIMIT}")
        cover_masks = []
        for cov in covers:
            mask = 0
            for e in cov:
                if not 0 <= e < g:
                    raise ValueError(f"covered element {e} outside ground set of size {g}")
                mask |= 1 << e
            cover_masks.append(mask)
        super().__init__(len(cover_masks))
        self.element_weights = weights
        self.cover_masks = tuple(cover_masks)

    def _ground_weight(self, ground_mask: int) -> Fraction:
        total = Fraction(0)
        while ground_mask:
            low = ground_mask & -ground_mask
            total += self.element_weights[low.bit_length() - 1]
            ground_mask ^= low
        return total

    def value_of_mask(self, mask: int) -> Fraction:
        union = 0
        rest = mask
        while rest:
            low = rest & -rest
            union |= self.cover_masks[low.bit_length() - 1]
            rest ^= low
        return self._ground_weight(union)

    def _build_int_table(self) -> tuple[np.ndarray, int]:
        den = _common_denominator(self.element_weights)
        w_nums = [w.numerator * (den // w.denominator) for w in self.element_weights]
        if den > _INT64_CAP or sum(w_nums) > _INT64_CAP:
            raise OverflowError("coverage weights exceed the int64-safe cap")
        g = len(self.element_weights)
        gw = np.zeros(1 << g, dtype=np.int64)
        gidx = np.arange(1 << g)
        for i, wn in enumerate(w_nums):
            gw[(gidx & (1 << i)) != 0] += wn
        unions = np.zeros(1 << self.m, dtype=np.int64)
        idx = np.arange(1 << self.m)
        for i, cover in enumerate(self.cover_masks):
            unions[(idx & (1 << i)) != 0] |= cover
        tab = gw[unions]
        tab.flags.writeable = False
        return tab, den

    def to_json(self) -> dict:
        return {
            "type": "coverage",
            "element_weights": [str(w) for w in self.element_weights],
            "covers": [sorted(ItemSet(mask, len(self.element_weights)))
                       for mask in self.cover_masks],
        }


class Table(Valuation):
    """Explicit value for every subset, in mask order.

    Validated as monotone (and subadditive, within checker limits) on
    construction unless validate=False.
    """

    kind = "table"

    def __init__(self, values: Sequence, m: Optional[int] = None, validate: bool = True):
        values = tuple(as_fraction(x) for x in values)
        if m is None:
            if len(values) == 0 or len(values) & (len(values) - 1):
                raise ValueError("table length must be a power of two")
            m = len(values).bit_length() - 1
        if len(values) != 1 << m:
            raise ValueError(f"table for m={m} needs {1 << m} entries, got {len(values)}")
        if m > TABLE_LIMIT:
            raise ValueError(f"m={m} exceeds the table limit of {TABLE_LIMIT}")
        if values and values[0] != 0:
            raise ValueError("v(empty) must be 0")
        if any(x < 0 for x in values):
            raise ValueError("table values must be non-negative")
        super().__init__(m)
        self.values = values
        if validate:
            include = ["monotone"] if m <= MONOTONE_LIMIT else []
            if m <= SUBADDITIVE_LIMIT:
                include.append("subadditive")
            if include:
                flags = check_class(self, include=tuple(include))
                if flags.monotone is False:
                    raise ValueError("table is not monotone")
                if flags.subadditive is False:
                    raise ValueError("table is not subadditive")

    def value_of_mask(self, mask: int) -> Fraction:
        return self.values[mask]

    def _build_int_table(self) -> tuple[np.ndarray, int]:
        den = _common_denominator(self.values)
        if den > _INT64_CAP:
            raise OverflowError("table denominators exceed the int64-safe cap")
        nums = [x.numerator * (den // x.denominator) for x in self.values]
        if nums and max(nums) > _INT64_CAP:
            raise OverflowError("table values exceed the int64-safe cap")
        return _int64_array(nums), den

    def to_json(self) -> dict:
        return {"type": "table", "m": self.m, "values": [str(x) for x in self.values]}


class Staircase(Valuation):
    """Size-only valuation that climbs, plateaus, climbs again, then caps.

    With plateau height M and ground size s (even, s > 2M):
      v(S) = |S|              for |S| <= M
           = M                for M <= |S| <= s/2
           = M + |S| - s/2    for s/2 <= |S| <= s/2 + M
           = 2M               beyond.
    Monotone and subadditive but not submodular (the marginal jumps back up
    past s/2).
    """

    kind = "staircase"

    def __init__(self, plateau: int, ground_size: int):
        plateau = int(plateau)
        ground_size = int(ground_size)
        if plateau < 1:
            raise ValueError("plateau height must be a positive integer")
        if ground_size % 2 != 0:
            raise ValueError("ground size must be even")
        if ground_size <= 2 * plateau:
            raise ValueError("ground size must exceed twice the plateau height")
        super().__init__(ground_size)
        self.plateau = plateau
        self.ground_size = ground_size

    def _profile_value(self, k: int) -> int:
        half = self.ground_size // 2
        return min(k, self.plateau) + max(0, min(k - half, self.plateau))

    def value_of_mask(self, mask: int) -> Fraction:
        return Fraction(self._profile_value(mask.bit_count()))

    def size_profile(self) -> list[Fraction]:
        return [Fraction(self._profile_value(k)) for k in range(self.m + 1)]

    def _build_int_table(self) -> tuple[np.ndarray, int]:
        profile = np.array(
            [self._profile_value(k) for k in range(self.m + 1)], dtype=np.int64
        )
        idx = np.arange(1 << self.m)
        tab = profile[popcounts(idx)]
        tab.flags.writeable = False
        return tab, 1

    def to_json(self) -> dict:
        return {
            "type": "staircase",
            "plateau": self.plateau,
            "ground_size": self.ground_size,
        }


class NearTwo(Valuation):
    """1 on every proper nonempty subset, 2 on the full set.

    Monotone and subadditive; the last item's marginal (back up to 1) breaks
    submodularity.
    """

    kind = "near_two"

    def __init__(self, size: int):
        size = int(size)
        if size < 2:
            raise ValueError("near_two needs at least 2 items")
        super().__init__(size)

    def value_of_mask(self, mask: int) -> Fraction:
        k = mask.bit_count()
        if k == 0:
            return Fraction(0)
        return Fraction(2 if k == self.m else 1)

    def size_profile(self) -> list[Fraction]:
        return [Fraction(0)] + [Fraction(1)] * (self.m - 1) + [Fraction(2)]

    def _build_int_table(self) -> tuple[np.ndarray, int]:
        idx = np.arange(1 << self.m)
        pc = popcounts(idx)
        tab = np.where(pc == 0, 0, np.where(pc == self.m, 2, 1)).astype(np.int64)
        tab.flags.writeable = False
        return tab, 1

    def to_json(self) -> dict:
        return {"type": "near_two", "size": self.m}


class Scaled(Valuation):
    """inner valuation times a positive rational factor (nested scales flatten)."""

    kind = "scaled"

    def __init__(self, inner: Valuation, factor):
        factor = as_fraction(factor)
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        if isinstance(inner, Scaled):
            factor *= inner.factor
            inner = inner.inner
        super().__init__(inner.m)
        self.inner = inner
        self.factor = factor

    def value_of_mask(self, mask: int) -> Fraction:
        return self.factor * self.inner.value_of_mask(mask)

    def size_profile(self) -> Optional[list[Fraction]]:
        profile = self.inner.size_profile()
        if profile is None:
            return None
        return [self.factor * x for x in profile]

    def _build_int_table(self) -> tuple[np.ndarray, int]:
        nums, den = self.inner.int_table()
        fn, fd = self.factor.numerator, self.factor.denominator
        g = math.gcd(fn, den * fd)
        fn //= g
        new_den = den * fd // g
        max_abs = int(nums.max(initial=0))
        if new_den > _INT64_CAP or max_abs * fn > _INT64_CAP:
            raise OverflowError("scaled values exceed the int64-safe cap")
        tab = nums * np.int64(fn)
        tab.flags.writeable = False
        return tab, new_den

    def to_json(self) -> dict:
        return {"type": "scaled", "factor": str(self.factor), "inner": self.inner.to_json()}


# -- public operations --------------------------------------------------------


def evaluate(v: Valuation, items: ItemSet) -> Fraction:
    """Value of `items` under `v`; the set's universe must match v's arity."""
    if items.universe_size != v.m:
        raise ValueError(
            f"arity mismatch: set lives in a universe of size {items.universe_size} "
            f"but the valuation has {v.m} items"
        )
    return v.value_of_mask(items.bits)


def make_staircase(plateau: int, ground_size: int) -> Staircase:
    """Staircase valuation with the given plateau height and (even) ground size."""
    return Staircase(plateau, ground_size)


def make_near_two(size: int) -> NearTwo:
    """near_two valuation on `size` items."""
    return NearTwo(size)


def scale(v: Valuation, factor) -> Valuation:
    """v times a positive rational factor; factor 1 returns v unchanged."""
    factor = as_fraction(factor)
    if factor == 1:
        return v
    return Scaled(v, factor)


@dataclass(frozen=True)
class ClassFlags:
    """Which structural classes a valuation belongs to; None = not checked."""

    monotone: Optional[bool]
    subadditive: Optional[bool]
    submodular: Optional[bool]


def _monotone_int(nums: np.ndarray, m: int) -> bool:
    idx = np.arange(1 << m)
    for i in range(m):
        bit = 1 << i
        lo = idx[(idx & bit) == 0]
        if np.any(nums[lo | bit] < nums[lo]):
            return False
    return True


def _submodular_int(nums: np.ndarray, m: int) -> bool:
    idx = np.arange(1 << m)
    for i in range(m):
        bi = 1 << i
        for j in range(i + 1, m):
            bj = 1 << j
            base = idx[(idx & (bi | bj)) == 0]
            lhs = nums[base | bi | bj] + nums[base]
            rhs = nums[base | bi] + nums[base | bj]
            if np.any(lhs > rhs):
                return False
    return True


def _monotone_frac(table: list[Fraction], m: int) -> bool:
    for i in range(m):
        bit = 1 << i
        for mask in range(1 << m):
            if mask & bit:
                continue
            if table[mask | bit] < table[mask]:
                return False
    return True


def _submodular_frac(table: list[Fraction], m: int) -> bool:
    for i in range(m):
        bi = 1 << i
        for j in range(i + 1, m):
            bj = 1 << j
            for mask in range(1 << m):
                if mask & (bi | bj):
                    continue
                if table[mask | bi | bj] + table[mask] > table[mask | bi] + table[mask | bj]:
                    return False
    return True


def _subadditive_frac(table: list[Fraction], m: int, disjoint_only: bool) -> bool:
    size = 1 << m
    if disjoint_only:
        for u in range(size):
            s = u
            while True:
                r = u ^ s
                if s <= r and table[s] + table[r] < table[u]:
                    return False
                if s == 0:
                    break
                s = (s - 1) & u
        return True
    for s in range(size):
        vs = table[s]
        for t in range(s, size):
            if vs + table[t] < table[s | t]:
                return False
    return True


def check_class(
    v: Valuation,
    m: Optional[int] = None,
    include: tuple = ("monotone", "subadditive", "submodular"),
) -> ClassFlags:
    """Exhaustively test membership in {monotone, subadditive, submodular}.

    Limits: m <= 16 for monotone/submodular, m <= 12 for subadditive.  For
    monotone v, subadditivity over disjoint pairs is sufficient, so that
    check runs over the 3^m splits; non-monotone tables fall back to all
    4^m pairs.
    """
    if m is None:
        m = v.m
    elif m != v.m:
        raise ValueError(f"arity mismatch: m={m} but valuation has {v.m} items")
    unknown = set(include) - {"monotone", "subadditive", "submodular"}
    if unknown:
        raise ValueError(f"unknown class names: {sorted(unknown)}")
    if ("monotone" in include or "submodular" in include) and m > MONOTONE_LIMIT:
        raise ValueError(
            f"m={m} exceeds the monotone/submodular checker limit of {MONOTONE_LIMIT}"
        )
    if "subadditive" in include and m > SUBADDITIVE_LIMIT:
        raise ValueError(
            f"m={m} exceeds the subadditive checker limit of {SUBADDITIVE_LIMIT}"
        )

    try:
        nums, _den = v.int_table()
        int_mode = True
    except OverflowError:
        table = v.value_table()
        int_mode = False

    monotone = subadditive = submodular = None
    if "monotone" in include:
        monotone = _monotone_int(nums, m) if int_mode else _monotone_frac(table, m)
    if "submodular" in include:
        submodular = _submodular_int(nums, m) if int_mode else _submodular_frac(table, m)
    if "subadditive" in include:
        is_mono = monotone
        if is_mono is None:
            is_mono = _monotone_int(nums, m) if int_mode else _monotone_frac(table, m)
        if int_mode:
            if is_mono:
                subadditive = bool(_kernels.subadditive_disjoint(nums))
            else:
                subadditive = bool(_kernels.subadditive_pairs(nums))
        else:
            subadditive = _subadditive_frac(table, m, disjoint_only=bool(is_mono))
    return ClassFlags(monotone=monotone, subadditive=subadditive, submodular=submodular)


_JSON_PARSERS = {}


def valuation_from_json(obj: dict) -> Valuation:
    """Parse the JSON valuation schema (weights as exact rational strings)."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("valuation JSON must be an object with a 'type' key")
    kind = obj["type"]
    if kind == "additive":
        return Additive(obj["weights"])
    if kind == "xos":
        return Xos(obj["clauses"])
    if kind == "coverage":
        return Coverage(obj["element_weights"], obj["covers"])
    if kind == "table":
        return Table(obj["values"], m=obj.get("m"))
    if kind == "staircase":
        return Staircase(obj["plateau"], obj["ground_size"])
    if kind == "near_two":
        return NearTwo(obj["size"])
    if kind == "scaled":
        return Scaled(valuation_from_json(obj["inner"]), obj["factor"])
    raise ValueError(f"unknown valuation type {kind!r}")
