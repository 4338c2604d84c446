import pytest

from sullivan_dgm import (
    FilteredComplexWindow, SemifreeModule, augmentation_module, complex_cohomology, compute_pages,
    ext_via_bar, ext_via_hom, hyper_ext_ss, minimal_resolution, minimal_ss,
)
from sullivan_dgm.exact import GeneratedComplex
from sullivan_dgm.specseq import bracket_e1


class Explicit(GeneratedComplex):
    def __init__(self, spaces, diffs):
        self.spaces = spaces
        self.diffs = diffs

    def basis(self, k):
        return list(self.spaces.get(k, []))

    def d(self, lab):
        return dict(self.diffs.get(lab, {}))


def _pages(cx, levels, window, r_max=4):
    return compute_pages(FilteredComplexWindow(cx, levels, window), r_max)


def test_contractible_two_step():
    # a -> b with a at level 0 and b at level 1
    cx = Explicit({0: ["a"], 1: ["b"]}, {"a": {"b": 1}})
    ss = _pages(cx, {"a": 0, "b": 1}, (0, 1))
    assert ss.page(1).nonzero() == {(0, 0): 1, (1, 1): 1}
    assert ss.page(2).nonzero() == {}
    assert all(v == 0 for v in ss.einf.values())


def test_trivial_filtration_is_cohomology():
    # sphere-like complex with a cancelling pair
    cx = Explicit({0: ["u"], 1: ["a"], 2: ["b", "c"]}, {"a": {"b": 1}})
    lv = {"u": 0, "a": 0, "b": 0, "c": 0}
    ss = _pages(cx, lv, (0, 2))
    direct = complex_cohomology(cx, (0, 2)).dims()
    for r in (1, 2, 3):
        assert {n: ss.page(r).total(n) for n in ss.degrees} == {n: direct[n] for n in ss.degrees}
    assert ss.stabilization == 1


def test_shift_by_one_filtration():
    # d raises the level by exactly one, so E_1 carries all of d
    cx = Explicit({0: ["x", "y"], 1: ["z", "w"], 2: ["s"]},
                  {"x": {"z": 1, "w": 1}, "y": {"z": 2, "w": 2}, "z": {"s": 1}, "w": {"s": -1}})
    lv = {"x": 0, "y": 0, "z": 1, "w": 1, "s": 2}
    ss = _pages(cx, lv, (0, 2))
    e1 = ss.page(1)
    assert e1.dim(0, 0) == 2 and e1.dim(1, 1) == 2 and e1.dim(2, 2) == 1
    direct = complex_cohomology(cx, (0, 2)).dims()
    for n in ss.degrees:
        assert ss.page(2).total(n) == direct[n]


def test_filtration_violation():
    cx = Explicit({0: ["a"], 1: ["b"]}, {"a": {"b": 1}})
    with pytest.raises(ValueError):
        FilteredComplexWindow(cx, {"a": 1, "b": 0}, (0, 1))


def test_bracket_formula():
    # A = Λ(x2) style: H(Ā) in degree 2, H(N) = Q in 0, H(M) = Q in 0
    assert bracket_e1({2: 1}, {0: 1}, {0: 1}, 0, 0) == 1
    assert bracket_e1({2: 1}, {0: 1}, {0: 1}, 1, -1) == 1
    assert bracket_e1({2: 1}, {0: 1}, {0: 1}, 1, 0) == 0
    assert bracket_e1({2: 1}, {0: 1}, {0: 1}, 2, -2) == 1


def test_hyper_ext_hopf_into_A(s2, hopf):
    ss, rep = hyper_ext_ss(s2, hopf, s2, 6, (-2, 6), target_top=2)
    assert rep.agrees
    assert rep.e1_mismatches == []
    assert rep.e2_mismatches == []
    direct = ext_via_hom(hopf, SemifreeModule.unit(s2, 0, "1"), (-2, 6)).dims()
    assert rep.einf_totals == {n: direct[n] for n in ss.degrees}


def test_hyper_ext_free_collapses(s2):
    A1 = SemifreeModule.unit(s2, 0, "e")
    ss, rep = hyper_ext_ss(s2, A1, s2, 4, (-2, 4), target_top=2)
    # d_1 kills every positive word length, so E_2 = E_∞ = H(M) in filtration 0
    assert rep.agrees
    assert ss.stabilization == 2
    assert {k for k, v in ss.page(2).entries.items() if v and k[1] in ss.degrees} == {(0, 0), (0, 2)}
    assert {k for k, v in ss.einf.items() if v} <= {(0, n) for n in ss.degrees}
    assert {n: v for n, v in rep.einf_totals.items() if v} == {0: 1, 2: 1}


def test_hyper_ext_loop_space(w3):
    Q = augmentation_module(w3)
    ss, rep = hyper_ext_ss(w3, Q, Q, 5, (-8, 0))
    assert rep.agrees and rep.e1_mismatches == [] and rep.e2_mismatches == []
    bar = ext_via_bar(Q, Q, 5, (-8, 0)).dims()
    for n in ss.degrees:
        assert rep.einf_totals[n] == bar[n] == (1 if n % 2 == 0 else 0)


def test_minimal_ss_hopf_into_Q(s2, hopf):
    Q = augmentation_module(s2)
    ss, rep = minimal_ss(s2, hopf, Q, (-4, 6))
    assert rep.agrees and rep.e1_mismatches == []
    # one dual per generator, no differentials
    assert ss.page(1).nonzero() == {(0, 0): 1, (1, -1): 1}
    assert ss.stabilization == 1
    direct = ext_via_hom(hopf, Q, (-4, 6)).dims()
    assert rep.einf_totals == {n: direct[n] for n in ss.degrees}


def test_minimal_ss_hopf_into_A(s2, hopf):
    ss, rep = minimal_ss(s2, hopf, s2, (-2, 6))
    assert rep.agrees and rep.e1_mismatches == []
    assert rep.flags


def test_minimal_ss_single_slice(s2):
    A1 = SemifreeModule.unit(s2, 0, "e")
    ss, rep = minimal_ss(s2, A1, augmentation_module(s2), (-2, 4))
    assert rep.agrees and ss.stabilization == 1


def test_minimal_ss_loop_resolution(w3):
    R = minimal_resolution(w3, augmentation_module(w3), (0, 6)).module
    ss, rep = minimal_ss(w3, R, w3, (-8, 6))
    assert rep.agrees and rep.e1_mismatches == []


def test_minimal_ss_rejects_non_minimal(s2):
    M = SemifreeModule.parse(s2, [("a", 0, "0"), ("b", 1, "a")])
    with pytest.raises(ValueError):
        minimal_ss(s2, M, s2, (0, 2))


def test_totals_non_increasing(s2, hopf):
    ss, _ = hyper_ext_ss(s2, hopf, s2, 6, (-2, 6), target_top=2)
    for r in range(1, len(ss.pages)):
        for n in ss.degrees:
            assert ss.page(r + 1).total(n) <= ss.page(r).total(n)
        assert all(ss.page(r + 1).total(n) >= ss.einf_totals()[n] for n in ss.degrees)
