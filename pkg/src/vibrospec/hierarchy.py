"""Enumeration and indexing of the truncated hierarchy multi-index set.

Auxiliary amplitudes are labelled by vectors k of M non-negative integers
(one slot per bath term) kept under the triangular truncation
``sum(k) <= e_max``.  Ordering is graded lexicographic: by depth, then
lexicographic on k.  Lookups are exact (dict-based), never positional
arithmetic, so the ordering could change without touching the assembler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BasisSizeError",
    "MultiIndex",
    "HierarchyBasis",
    "enumerate_basis",
    "neighbor",
    "DEFAULT_UNKNOWN_CAP",
]

DEFAULT_UNKNOWN_CAP = 5_000_000


class BasisSizeError(ValueError):
    """Requested basis would exceed the configured unknown-count cap."""


@dataclass(frozen=True)
class MultiIndex:
    """A hierarchy label: M non-negative integers and their sum (the depth)."""

    k: tuple[int, ...]
    depth: int = field(init=False)

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if any(v < 0 for v in k):
            raise ValueError("multi-index entries must be non-negative")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "depth", sum(k))


def _compositions(total: int, parts: int):
    """All vectors of `parts` non-negative ints summing to `total`, lex ascending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class HierarchyBasis:
    """Ordered truncated multi-index set with exact ordinal lookup."""

    indices: tuple[MultiIndex, ...]
    e_max: int
    m: int
    index_array: np.ndarray
    depths: np.ndarray
    up_ordinals: np.ndarray
    down_ordinals: np.ndarray
    _ordinal: dict = field(repr=False)

    def __len__(self) -> int:
        return len(self.indices)

    def ordinal_of(self, index) -> int:
        """Exact ordinal of a MultiIndex (or raw tuple); KeyError if absent."""
        k = index.k if isinstance(index, MultiIndex) else tuple(int(v) for v in index)
        return self._ordinal[k]

    def contains(self, k: tuple[int, ...]) -> bool:
        return tuple(k) in self._ordinal


def enumerate_basis(
    m: int,
    e_max: int,
    *,
    block_size: int = 1,
    max_unknowns: int = DEFAULT_UNKNOWN_CAP,
) -> HierarchyBasis:
    """Enumerate all multi-indices with sum(k) <= e_max in graded lex order.

    `block_size` is the number of scalar unknowns carried per index (the
    number of monomers, for the full hierarchy); the product
    ``C(e_max + m, m) * block_size`` is rejected above `max_unknowns`.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if e_max < 0:
        raise ValueError("e_max must be >= 0")
    count = math.comb(e_max + m, m)
    if count * max(block_size, 1) > max_unknowns:
        raise BasisSizeError(
            f"basis of {count} indices x block {block_size} exceeds the cap of "
            f"{max_unknowns} unknowns"
        )

    tuples = []
    for depth in range(e_max + 1):
        tuples.extend(_compositions(depth, m))
    ordinal = {k: i for i, k in enumerate(tuples)}

    index_array = np.array(tuples, dtype=np.int64).reshape(len(tuples), m)
    depths = index_array.sum(axis=1)

    up = np.full((len(tuples), m), -1, dtype=np.int64)
    down = np.full((len(tuples), m), -1, dtype=np.int64)
    for r, k in enumerate(tuples):
        for j in range(m):
            if depths[r] < e_max:
                ku = k[:j] + (k[j] + 1,) + k[j + 1 :]
                up[r, j] = ordinal[ku]
            if k[j] > 0:
                kd = k[:j] + (k[j] - 1,) + k[j + 1 :]
                down[r, j] = ordinal[kd]

    return HierarchyBasis(
        indices=tuple(MultiIndex(k) for k in tuples),
        e_max=int(e_max),
        m=int(m),
        index_array=index_array,
        depths=depths,
        up_ordinals=up,
        down_ordinals=down,
        _ordinal=ordinal,
    )


def neighbor(basis: HierarchyBasis, ordinal: int, slot: int, direction: int):
    """Ordinal of k +/- e_slot, or None where the move leaves the basis.

    Moving up from depth e_max returns None: that dropped coupling is the
    truncation.  Moving down from k[slot] = 0 returns None.
    """
    if not 0 <= ordinal < len(basis):
        raise IndexError(f"ordinal {ordinal} out of range")
    if not 0 <= slot < basis.m:
        raise IndexError(f"slot {slot} out of range")
    if direction == 1:
        target = basis.up_ordinals[ordinal, slot]
    elif direction == -1:
        target = basis.down_ordinals[ordinal, slot]
    else:
        raise ValueError("direction must be +1 or -1")
    return None if target < 0 else int(target)
