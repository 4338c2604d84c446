from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sullivan_dgm.exact import (
    CochainComplexWindow, DegreeWindow, DifferentialError, SparseMatrix, WindowError,
    as_window, cohomology_window, rank, row_reduce, shift_complex,
)


def test_row_reduce_identity():
    red, r, ker = row_reduce(SparseMatrix.from_rows([[1, 0], [0, 1]]))
    assert r == 2
    assert ker == []
    assert red == SparseMatrix.from_rows([[1, 0], [0, 1]])


def test_row_reduce_zero():
    _, r, ker = row_reduce(SparseMatrix.zero(3, 2))
    assert r == 0
    assert sorted(sorted(v.items()) for v in ker) == [[(0, 1)], [(1, 1)]]


def test_row_reduce_rank_one():
    _, r, ker = row_reduce(SparseMatrix.from_rows([[1, 2], [2, 4]]))
    assert r == 1
    assert ker == [{1: 1, 0: -2}]


def test_matrix_rejects_out_of_range():
    with pytest.raises(IndexError):
        SparseMatrix(2, 2, [(2, 0, 1)])


def test_window_parse_and_order():
    w = DegreeWindow.parse("-4:6")
    assert (w.lo, w.hi) == (-4, 6)
    assert list(as_window((1, 3))) == [1, 2, 3]
    with pytest.raises(ValueError):
        DegreeWindow(3, 1)


def test_sphere_and_disk():
    h = cohomology_window(CochainComplexWindow.sphere(3, (0, 5)))
    assert {k: h.dim(k) for k in range(1, 5)} == {1: 0, 2: 0, 3: 1, 4: 0}
    assert h.dim(0) is None and h.dim(5) is None
    h = cohomology_window(CochainComplexWindow.disk(3, (0, 5)))
    assert all(h.dim(k) == 0 for k in range(1, 5))


def test_zero_differential_pair():
    spaces = {-1: (), 0: ("a",), 1: ("b",), 2: ()}
    diffs = {-1: SparseMatrix.zero(1, 0), 0: SparseMatrix.zero(1, 1), 1: SparseMatrix.zero(0, 1)}
    h = cohomology_window(CochainComplexWindow(spaces, diffs, DegreeWindow(-1, 2)))
    assert (h.dim(0), h.dim(1)) == (1, 1)
    assert h[0].representatives == [{"a": 1}]


def test_rejects_nonzero_square():
    spaces = {0: ("a",), 1: ("b",), 2: ("c",)}
    one = SparseMatrix(1, 1, [(0, 0, 1)])
    c = CochainComplexWindow(spaces, {0: one, 1: one}, DegreeWindow(0, 2))
    with pytest.raises(DifferentialError):
        cohomology_window(c)


def test_shift_examples():
    d3 = CochainComplexWindow.disk(3, (0, 5))
    assert shift_complex(d3, 0) is d3
    s = shift_complex(CochainComplexWindow.sphere(3, (0, 5)), 1)
    assert s.spaces[2] == (("s", 3),)
    t = shift_complex(d3, 1)
    assert t.spaces[1] == ("a",) and t.spaces[2] == ("b",)
    assert t.differentials[1] == SparseMatrix(1, 1, [(0, 0, -1)])
    assert (t.window.lo, t.window.hi) == (-1, 4)


def test_window_error_is_value_error():
    assert issubclass(WindowError, ValueError)


matrices = st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
@settings(max_examples=150, deadline=None)
def test_rank_nullity(rows):
    m = SparseMatrix.from_rows(rows)
    red, r, ker = row_reduce(m)
    assert r + len(ker) == m.ncols
    for v in ker:
        for row in rows:
            assert sum(row[j] * c for j, c in v.items()) == 0


@given(matrices)
@settings(max_examples=150, deadline=None)
def test_row_reduce_idempotent(rows):
    red, r, _ = row_reduce(SparseMatrix.from_rows(rows))
    red2, r2, _ = row_reduce(red)
    assert (red2, r2) == (red, r)


def _random_complex(data, lo, hi):
    # d = b∘a with random a, b would not square to zero; build from a random
    # change of basis of a direct sum of disks and spheres instead
    spaces = {k: [] for k in range(lo, hi + 1)}
    pairs = []
    for k in range(lo, hi + 1):
        for _ in range(data.draw(st.integers(0, 2))):
            spaces[k].append(("s", k, len(spaces[k])))
        if k < hi:
            for _ in range(data.draw(st.integers(0, 2))):
                a = ("a", k, len(spaces[k]))
                b = ("b", k + 1, len(spaces[k + 1]))
                spaces[k].append(a)
                spaces[k + 1].append(b)
                pairs.append((a, b))
    return spaces, pairs


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_dims_invariant_under_permutation(data):
    lo, hi = 0, 4
    spaces, pairs = _random_complex(data, lo, hi)
    expected = {k: sum(1 for x in spaces[k] if x[0] == "s") for k in range(lo + 1, hi)}
    perm = {k: data.draw(st.permutations(spaces[k])) for k in spaces}
    index = {k: {lab: i for i, lab in enumerate(perm[k])} for k in perm}
    diffs = {}
    for k in range(lo, hi):
        ent = [(index[k + 1][b], index[k][a], 1) for a, b in pairs if a[1] == k]
        diffs[k] = SparseMatrix(len(perm[k + 1]), len(perm[k]), ent)
    c = CochainComplexWindow({k: tuple(v) for k, v in perm.items()}, diffs, DegreeWindow(lo, hi))
    h = cohomology_window(c)
    assert {k: h.dim(k) for k in range(lo + 1, hi)} == expected


@given(st.data(), st.integers(-5, 5))
@settings(max_examples=60, deadline=None)
def test_shift_round_trip(data, n):
    spaces, pairs = _random_complex(data, 0, 3)
    index = {k: {lab: i for i, lab in enumerate(v)} for k, v in spaces.items()}
    diffs = {k: SparseMatrix(len(spaces[k + 1]), len(spaces[k]),
                             [(index[k + 1][b], index[k][a], Fraction(1)) for a, b in pairs if a[1] == k])
             for k in range(0, 3)}
    c = CochainComplexWindow({k: tuple(v) for k, v in spaces.items()}, diffs, DegreeWindow(0, 3))
    back = shift_complex(shift_complex(c, n), -n)
    assert back == c
    assert rank(diffs[0]) == rank(shift_complex(c, n).differentials[-n])
