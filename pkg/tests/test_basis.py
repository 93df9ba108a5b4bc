import numpy as np
import pytest

from qanneal.basis import (
    FullBasis,
    build_sector_basis,
    format_state,
    occupation_matrix,
    parse_state,
)


def test_four_site_half_filling_listing():
    b = build_sector_basis(4, 2)
    assert [int(s) for s in b.states] == [0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]
    assert b.dim == 6


def test_two_site_single_particle():
    b = build_sector_basis(2, 1)
    assert [int(s) for s in b.states] == [0b01, 0b10]
    assert b.dim == 2


def test_sector_dimension_16_8():
    assert build_sector_basis(16, 8).dim == 12870


def test_rank_endpoints():
    b = build_sector_basis(4, 2)
    assert b.rank(0b0011) == 0
    assert b.unrank(5) == 0b1100


def test_rank_unrank_roundtrip_16_8():
    b = build_sector_basis(16, 8)
    for r in range(b.dim):
        assert b.rank(b.unrank(r)) == r


def test_combinadic_agrees_with_binary_search():
    rng = np.random.default_rng(11)
    for n in (6, 9, 12, 16):
        for k in (1, n // 3, n // 2):
            b = build_sector_basis(n, k)
            sample = rng.choice(b.dim, size=min(b.dim, 200), replace=False)
            for r in sample:
                state = int(b.states[r])
                assert b.rank(state) == int(np.searchsorted(b.states, state))


def test_rank_rejects_wrong_popcount():
    b = build_sector_basis(4, 2)
    with pytest.raises(ValueError):
        b.rank(0b0111)
    with pytest.raises(ValueError):
        b.rank(0b10011)  # out of site range


def test_unrank_rejects_out_of_range():
    b = build_sector_basis(4, 2)
    with pytest.raises(ValueError):
        b.unrank(6)


def test_build_rejects_bad_arguments():
    with pytest.raises(ValueError):
        build_sector_basis(4, 5)
    with pytest.raises(ValueError):
        build_sector_basis(64, 2)


def test_full_basis():
    fb = FullBasis(3)
    assert fb.dim == 8
    assert fb.rank(5) == 5
    assert fb.unrank(5) == 5
    with pytest.raises(ValueError):
        fb.rank(8)


def test_state_labels_site_one_leftmost():
    # sites 2 and 4 occupied -> integer 0b1010 = 10 -> printed |0101>
    assert format_state(10, 4) == "|0101⟩"
    assert parse_state("0101") == 10
    assert parse_state("|0101⟩") == 10
    with pytest.raises(ValueError):
        parse_state("01x1")


def test_occupation_matrix_columns_are_sites():
    b = build_sector_basis(4, 2)
    occ = b.occupations()
    # row for state 0b0101 (sites 1 and 3): columns 0 and 2 set
    r = b.rank(0b0101)
    assert occ[r].tolist() == [1, 0, 1, 0]
    assert occ.sum(axis=1).tolist() == [2] * b.dim


def test_enumeration_matches_occupation_popcount():
    occ = occupation_matrix(np.arange(8, dtype=np.uint64), 3)
    assert occ.shape == (8, 3)
    assert occ[5].tolist() == [1, 0, 1]
