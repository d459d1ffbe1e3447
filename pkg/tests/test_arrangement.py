import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from rankopt.arrangement import (
    build_hyperplanes,
    candidate_tight_pairs,
    cell_of,
    count_neighbors,
    enumerate_cells,
    find_interior_point,
    segments_2d,
    tightness_test,
    zeta,
)
from rankopt.errors import DuplicateRow
from rankopt.model import Dataset
from rankopt.reference import brute_cells

from conftest import COLLINEAR, datasets, random_instance

CONCURRENT = Dataset([[0, 0], [1, 0], [0, 1], [1, 3]], [0, 0, 0, 0])  # all lines pass through 0


def collect(ds, **kw):
    cells = []
    stats = enumerate_cells(ds, lambda pi, b: cells.append((pi, b)), **kw)
    return cells, stats


def test_collinear_hyperplanes():
    arr = build_hyperplanes(COLLINEAR)
    assert [h.pair for h in arr.hyperplanes] == [(0, 1), (0, 2), (1, 2)]
    assert arr.redundant == {(0, 2), (1, 2)}
    assert len(arr.classes()) == 1


def test_single_pair_and_empty_pairs():
    arr = build_hyperplanes(Dataset([[1], [2]], [0, 0]))
    assert len(arr.hyperplanes) == 1 and not arr.redundant
    arr = build_hyperplanes(Dataset([[1], [1], [2]], [0, 1, 0]))
    assert arr.empty_pairs == {(0, 1)}
    assert all(h.pair != (0, 1) for h in arr.hyperplanes)


def test_duplicate_rows_rejected():
    with pytest.raises(DuplicateRow):
        build_hyperplanes(Dataset([[1], [1]], [2, 2]))


def test_cell_of():
    arr = build_hyperplanes(COLLINEAR)
    assert cell_of(arr, [0]) == (0, 1, 2)
    assert cell_of(arr, [2]) == (2, 1, 0)
    assert cell_of(arr, [1]) is None


def test_interior_point():
    arr = build_hyperplanes(COLLINEAR)
    assert find_interior_point(arr) == [0]
    arr = build_hyperplanes(CONCURRENT)
    b = find_interior_point(arr)
    assert b != [0, 0] and cell_of(arr, b) is not None
    assert find_interior_point(arr, seed=4) != b


def test_candidate_pairs_filter_redundancy():
    arr = build_hyperplanes(COLLINEAR)
    assert candidate_tight_pairs(arr, (0, 1, 2)) == [(0, 1)]
    assert candidate_tight_pairs(arr, (2, 1, 0)) == [(0, 1)]
    two = build_hyperplanes(Dataset([[1], [2]], [0, 0]))
    assert candidate_tight_pairs(two, (1, 0)) == [(0, 1)]


def test_tightness_collinear():
    arr = build_hyperplanes(COLLINEAR)
    res = tightness_test(arr, (0, 1, 2), (0, 1), witness=[0])
    assert res.tight and res.beta_star == [1] and res.beta0 == [2]
    assert cell_of(arr, res.beta0) == (2, 1, 0)


def test_tightness_zero_epsilon_is_not_tight():
    # the hyperplane of pair (2, 3) meets the wedge of (0, 1, 2, 3) only at the origin
    arr = build_hyperplanes(CONCURRENT)
    res = tightness_test(arr, (0, 1, 2, 3), (2, 3))
    assert not res.tight and res.epsilon == 0


def test_tightness_missing_hyperplane():
    # parallel lines: beta=1 and beta=2; in the cell beta<1 the pair of beta=2 is adjacent
    ds = Dataset([[0], [1], [2]], [0, 1, 4])
    arr = build_hyperplanes(ds)
    pi = cell_of(arr, [-10])
    assert count_neighbors(arr, pi) == 1


def test_enumerate_collinear():
    cells, stats = collect(COLLINEAR)
    assert sorted(pi for pi, _ in cells) == [(0, 1, 2), (2, 1, 0)]
    assert stats.lps == 1


def test_enumerate_two_points():
    cells, _ = collect(Dataset([[1], [2]], [0, 0]))
    assert len(cells) == 2


def test_empty_arrangement_has_one_cell():
    cells, stats = collect(Dataset([[1], [1], [1]], [3, 1, 2]))
    assert [pi for pi, _ in cells] == [(1, 2, 0)]
    assert stats.lps == 0


def test_random_plane_instance_against_brute_force():
    ds = random_instance(random.Random(5), 5, 2)
    cells, _ = collect(ds)
    found = [pi for pi, _ in cells]
    assert set(found) == brute_cells(ds)
    assert len(found) <= zeta(10, 2) == 56


def test_zeta():
    assert zeta(10, 2) == 56
    assert zeta(7, 0) == 1
    assert zeta(1, 3) == 2


def test_segments_2d():
    arr = build_hyperplanes(CONCURRENT)
    segs = segments_2d(arr)
    assert len(segs) == len(arr.classes())
    for pair, (a, b) in segs:
        h = arr.by_pair[pair]
        assert h.value(a) == 0 and h.value(b) == 0 and a != b


@settings(max_examples=60, deadline=None)
@given(datasets(n_min=2, n_max=5, p_max=3))
def test_enumeration_properties(ds):
    try:
        arr = build_hyperplanes(ds)
    except DuplicateRow:
        return
    cells, stats = collect(arr)
    pis = [pi for pi, _ in cells]
    assert len(pis) == len(set(pis))
    assert set(pis) == brute_cells(ds)
    assert len(pis) <= zeta(len(arr.classes()), ds.p)
    assert stats.lps <= (ds.n - 1) * len(pis)
    assert stats.max_depth <= math.comb(ds.n, 2)
    assert stats.max_tight_per_cell <= ds.n - 1
    for pi, witness in cells:
        assert cell_of(arr, witness) == pi


def test_enumeration_is_deterministic():
    ds = random_instance(random.Random(8), 5, 2)
    a, _ = collect(ds, seed=1)
    b, _ = collect(ds, seed=1)
    assert a == b
    assert all(isinstance(v, Fraction) for _, w in a for v in w)
