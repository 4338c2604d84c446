import random

import pytest

from sullivan_dgm import (
    SemifreeModule, augmentation_module, minimal_resolution, minimize, module_cohomology,
    split_postnikov, standard_model, truncate_above, validate_module,
)

from helpers import insert_contractible_pair


def gens(M):
    return [(n, d, M.differential_string(i)) for i, (n, d) in enumerate(zip(M.names, M.degrees))]


def test_minimize_hopf_unchanged(hopf):
    res = minimize(hopf)
    assert res.module.generators == hopf.generators
    assert res.module.diffs == hopf.diffs
    assert res.eliminated == []


def test_minimize_cancels_pair(s2):
    M = SemifreeModule.parse(s2, [("e0", 0, "0"), ("h", 2, "0"), ("k", 1, "h")])
    res = minimize(M)
    assert gens(res.module) == [("e0", 0, "0")]
    assert res.projection.check() == [] and res.section.check() == []


def test_minimize_with_residual_differential(s2):
    M = SemifreeModule.parse(s2, [("e0", 0, "0"), ("h", 3, "-x2^2*e0"), ("k", 2, "h + x3*e0")])
    assert validate_module(M).valid and not validate_module(M).minimal
    res = minimize(M)
    N = res.module
    assert validate_module(N).minimal
    assert N.names == ("e0",)
    assert module_cohomology(M, (0, 6)).dims() == module_cohomology(N, (0, 6)).dims()


def test_minimize_maps_are_inverse_in_cohomology(s2):
    M = SemifreeModule.parse(s2, [("e0", 0, "0"), ("h", 3, "-x2^2*e0"), ("k", 2, "h + x3*e0")])
    res = minimize(M)
    p, s = res.projection, res.section
    ps = p.compose(s)
    for k, mat in ps.induced_map((0, 6)).items():
        h = module_cohomology(res.module, (0, 6))[k]
        assert mat == [{i: 1} for i in range(h.dim)]


def test_minimize_random_contractible_pairs(hopf):
    rng = random.Random(1234)
    w = (-2, 6)
    base = module_cohomology(hopf, w).dims()
    for case in range(100):
        M = hopf
        for _ in range(rng.randint(1, 3)):
            M = insert_contractible_pair(M, rng)
        assert validate_module(M).valid, case
        assert module_cohomology(M, w).dims() == base
        res = minimize(M)
        N = res.module
        assert validate_module(N).minimal
        assert module_cohomology(N, w).dims() == base
        assert res.projection.check() == [] and res.section.check() == []


@pytest.mark.parametrize("n", range(1, 9))
def test_circle_resolution_is_capped(circle, n):
    res = minimal_resolution(circle, augmentation_module(circle), (0, 0), max_rounds=n)
    R = res.module
    assert not res.complete
    assert R.degrees == (0,) * (n + 1)
    assert R.diffs[0] == {}
    for j in range(n):
        assert R.diffs[j + 1] == {(((0, 1),), j): 1}


def test_loop_space_resolution(w3):
    res = minimal_resolution(w3, augmentation_module(w3), (0, 8))
    R = res.module
    assert res.complete
    assert R.degrees == (0, 2, 4, 6, 8)
    for j in range(4):
        assert R.diffs[j + 1] == {(((0, 1),), j): 1}
    assert validate_module(R).minimal
    assert res.comparison.check() == []


def test_resolution_of_free_table(w3):
    T = truncate_above(SemifreeModule.unit(w3), 3)
    res = minimal_resolution(w3, T, (0, 6))
    assert res.complete
    assert len(res.module) == 1


def test_resolution_matches_table_cohomology(s2):
    T = augmentation_module(s2)
    res = minimal_resolution(s2, T, (0, 6))
    assert res.complete
    a = module_cohomology(res.module, (0, 5)).dims()
    b = module_cohomology(T, (0, 5)).dims()
    assert a == b


def test_postnikov_hopf(hopf):
    sp = split_postnikov(hopf, 0)
    assert gens(sp.sub) == [("e0", 0, "0")]
    assert gens(sp.quot) == [("e1", 1, "0")]
    assert gens(sp.slice) == [("e0", 0, "0")]
    assert sp.inclusion.check() == [] and sp.projection.check() == []
    assert sp.check_exactness((-1, 5)) == []


def test_postnikov_single_degree(s2):
    M = SemifreeModule.parse(s2, [("a", 2, "0"), ("b", 2, "0")])
    sp = split_postnikov(M, 2)
    assert sp.sub.names == ("a", "b")
    assert len(sp.quot) == 0


def test_postnikov_slice_differential_over_circle(circle):
    R = minimal_resolution(circle, augmentation_module(circle), (0, 0), max_rounds=4).module
    sp = split_postnikov(R, 0)
    assert sp.sub.names == R.names
    assert sp.slice.names == R.names
    assert any(sp.slice.diffs)
    assert sp.slice.diffs[2] == {(((0, 1),), 1): 1}


def test_postnikov_requires_minimal(s2):
    M = SemifreeModule.parse(s2, [("p", 1, "0"), ("q", 0, "p")])
    with pytest.raises(ValueError):
        split_postnikov(M, 0)


def test_postnikov_low_degrees_agree(w3):
    R = minimal_resolution(w3, augmentation_module(w3), (0, 8)).module
    for k in (0, 2, 4):
        sp = split_postnikov(R, k)
        hs = module_cohomology(sp.sub, (0, 10)).dims()
        hm = module_cohomology(R, (0, 10)).dims()
        assert all(hs[j] == hm[j] for j in range(0, k + 1))
        assert sp.check_exactness((0, 9)) == []
