"""Bitmask-backed sets of indivisible items.

Items are labelled 0..universe_size-1 and a set is stored as the integer
whose bit i is set iff item i is a member.  Everything downstream (bundles,
partitions, sampled subsets) shares this representation, which keeps subset
enumeration and disjointness checks cheap enough for the exact
subset-lattice algorithms in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True, slots=True)
class ItemSet:
    """Subset of a fixed item universe, stored as a bitmask."""

    bits: int
    universe_size: int

    def __post_init__(self) -> None:
        if self.universe_size < 0:
            raise ValueError("universe_size must be non-negative")
        if self.bits < 0:
            raise ValueError("bits must be non-negative")
        if self.bits >> self.universe_size:
            raise ValueError(
                f"bits 0b{self.bits:b} has members outside a universe of size "
                f"{self.universe_size}"
            )

    @classmethod
    def empty(cls, universe_size: int) -> "ItemSet":
        return cls(0, universe_size)

    @classmethod
    def full(cls, universe_size: int) -> "ItemSet":
        return cls((1 << universe_size) - 1, universe_size)

    @classmethod
    def from_indices(cls, indices: Iterable[int], universe_size: int) -> "ItemSet":
        bits = 0
        for i in indices:
            if not 0 <= i < universe_size:
                raise ValueError(f"item {i} outside universe of size {universe_size}")
            bits |= 1 << i
        return cls(bits, universe_size)

    def members(self) -> tuple[int, ...]:
        return tuple(self)

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, item: object) -> bool:
        if not isinstance(item, int):
            return False
        return 0 <= item < self.universe_size and (self.bits >> item) & 1 == 1

    def __bool__(self) -> bool:
        return self.bits != 0

    def _same_universe(self, other: "ItemSet") -> None:
        if self.universe_size != other.universe_size:
            raise ValueError("item sets live in different universes")

    def union(self, other: "ItemSet") -> "ItemSet":
        self._same_universe(other)
        return ItemSet(self.bits | other.bits, self.universe_size)

    def intersection(self, other: "ItemSet") -> "ItemSet":
        self._same_universe(other)
        return ItemSet(self.bits & other.bits, self.universe_size)

    def difference(self, other: "ItemSet") -> "ItemSet":
        self._same_universe(other)
        return ItemSet(self.bits & ~other.bits, self.universe_size)

    def complement(self) -> "ItemSet":
        full = (1 << self.universe_size) - 1
        return ItemSet(self.bits ^ full, self.universe_size)

    def is_subset_of(self, other: "ItemSet") -> bool:
        self._same_universe(other)
        return self.bits & ~other.bits == 0

    def is_disjoint_from(self, other: "ItemSet") -> bool:
        self._same_universe(other)
        return self.bits & other.bits == 0

    def with_item(self, item: int) -> "ItemSet":
        if not 0 <= item < self.universe_size:
            raise ValueError(f"item {item} outside universe of size {self.universe_size}")
        return ItemSet(self.bits | (1 << item), self.universe_size)

    def without_item(self, item: int) -> "ItemSet":
        if not 0 <= item < self.universe_size:
            raise ValueError(f"item {item} outside universe of size {self.universe_size}")
        return ItemSet(self.bits & ~(1 << item), self.universe_size)

    def __repr__(self) -> str:
        return f"ItemSet({{{', '.join(map(str, self))}}}, m={self.universe_size})"
