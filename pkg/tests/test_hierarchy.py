import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vibrospec.hierarchy import (
    BasisSizeError,
    MultiIndex,
    enumerate_basis,
    neighbor,
)


def test_single_slot_count():
    assert len(enumerate_basis(1, 12)) == 13


def test_two_slot_depth_one_listing():
    basis = enumerate_basis(2, 1)
    assert [idx.k for idx in basis.indices] == [(0, 0), (0, 1), (1, 0)]


def test_four_slot_count_matches_stars_and_bars():
    assert len(enumerate_basis(4, 12)) == math.comb(16, 4) == 1820


@settings(max_examples=30, deadline=None)
@given(m=st.integers(1, 4), e_max=st.integers(0, 9))
def test_counts_and_set_match_brute_force(m, e_max):
    basis = enumerate_basis(m, e_max)
    brute = {
        k
        for k in itertools.product(range(e_max + 1), repeat=m)
        if sum(k) <= e_max
    }
    assert len(basis) == math.comb(e_max + m, m)
    assert {idx.k for idx in basis.indices} == brute


def test_ordering_is_graded_then_lexicographic():
    basis = enumerate_basis(3, 5)
    keys = [(idx.depth, idx.k) for idx in basis.indices]
    assert keys == sorted(keys)
    assert basis.indices[0].k == (0, 0, 0)


def test_ordinal_round_trip():
    basis = enumerate_basis(3, 6)
    for i, idx in enumerate(basis.indices):
        assert basis.ordinal_of(idx) == i
        assert basis.ordinal_of(idx.k) == i


def test_depth_histogram():
    for m in (1, 2, 3, 4):
        basis = enumerate_basis(m, 12)
        counts = np.bincount(basis.depths, minlength=13)
        expected = [math.comb(d + m - 1, m - 1) for d in range(13)]
        assert counts.tolist() == expected


def test_neighbor_examples():
    basis = enumerate_basis(2, 1)
    k00 = basis.ordinal_of((0, 0))
    assert neighbor(basis, k00, 0, +1) == basis.ordinal_of((1, 0))
    assert neighbor(basis, k00, 0, -1) is None
    top = basis.ordinal_of((1, 0))
    assert neighbor(basis, top, 0, +1) is None  # truncation drops the coupling
    assert neighbor(basis, top, 1, +1) is None


@settings(max_examples=25, deadline=None)
@given(m=st.integers(1, 4), e_max=st.integers(0, 8), data=st.data())
def test_down_of_up_is_identity_where_up_exists(m, e_max, data):
    basis = enumerate_basis(m, e_max)
    ordinal = data.draw(st.integers(0, len(basis) - 1))
    slot = data.draw(st.integers(0, m - 1))
    up = neighbor(basis, ordinal, slot, +1)
    if up is not None:
        assert neighbor(basis, up, slot, -1) == ordinal


def test_resource_guard():
    with pytest.raises(BasisSizeError):
        enumerate_basis(6, 40)
    with pytest.raises(BasisSizeError):
        enumerate_basis(4, 12, block_size=4, max_unknowns=5000)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        enumerate_basis(0, 3)
    with pytest.raises(ValueError):
        enumerate_basis(2, -1)
    basis = enumerate_basis(2, 2)
    with pytest.raises(IndexError):
        neighbor(basis, len(basis), 0, +1)
    with pytest.raises(IndexError):
        neighbor(basis, 0, 2, +1)
    with pytest.raises(ValueError):
        neighbor(basis, 0, 0, 2)


def test_multi_index_validation():
    idx = MultiIndex((0, 2, 1))
    assert idx.depth == 3
    with pytest.raises(ValueError):
        MultiIndex((-1, 0))
