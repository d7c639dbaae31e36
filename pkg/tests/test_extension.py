from fractions import Fraction

import pytest

from src.config import Budgets
from src.exceptions import *
from src.extension import *
from src.monotiling import box_tiling, check_tiling_window, decide_center, folner_ratio


@pytest.fixture
def seq():
    return heisenberg_sequence()


@pytest.fixture
def tiling(seq):
    return ExtensionMonotiling(seq, box_tiling(1), box_tiling(2))


def test_sequence_is_exact(seq):
    seq.validate()
    assert seq.project(seq.embed((7,))) == (0, 0)
    assert seq.kernel_preimage((0, 0, -3)) == (-3,)


def test_unknown_sequence():
    with pytest.raises(ValidationError):
        sequence_by_name("sl2")


def test_section_of_the_kernel_is_the_identity(seq):
    section = coset_section(lambda f: seq.project(f) == (0, 0), seq)
    assert section.contains((0, 0, 0))
    for c in range(1, 10):
        assert not section.contains((0, 0, c))
        assert not section.contains((0, 0, -c))


def test_section_picks_the_index_minimal_coset_member(seq):
    section = coset_section(lambda f: seq.project(f) == (1, 0), seq)
    chosen = min(((1, 0, c) for c in range(-32, 32)), key=seq.F.index)
    assert section.representative((1, 0)) == chosen == (1, 0, 0)
    assert section.contains(chosen)
    assert not section.contains((1, 0, 1))
    assert not section.contains((2, 0, 0))


def test_section_is_contained_in_its_base(seq):
    base = lambda f: 0 <= f[0] < 3 and 0 <= f[1] < 3
    section = coset_section(base, seq)
    for f in seq.F.first_k_elements(500):
        if section.contains(f):
            assert base(f)


def test_first_stage(tiling):
    stage = tiling.stage(1)
    assert stage.m_star == 2
    assert stage.k_star == 2
    assert stage.tile_size == 8
    assert set(tiling.tile(1)) == {(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)}
    assert all(rho[0] == 0 and rho[1] == 0 for rho in stage.P)
    assert tiling.center_enumerate(1, 1) == (0, 0, 0)
    assert tiling.center_contains(1, (2, -4, 6))
    assert not tiling.center_contains(1, (1, 0, 0))


def test_stage_sizes(tiling):
    second = tiling.stage(2)
    assert (second.m_star, second.k_star, second.tile_size) == (9, 513, 41553)
    assert second.J == 16


@pytest.mark.slow
def test_third_stage_sizes(tiling):
    third = tiling.stage(3)
    assert (third.m_star, third.k_star, third.tile_size) == (13, 1153, 194857)


@pytest.mark.parametrize("l", [1, 2])
def test_extension_tiles_are_invariant_enough(tiling, l):
    stage = tiling.stage(l)
    for g in stage.K:
        assert folner_ratio(tiling, l, g) <= Fraction(1, l)
    mass = stage.interior_mass()
    assert mass["G"] >= mass["target"]
    assert mass["E"] >= mass["target"]


@pytest.mark.slow
def test_third_stage_is_invariant_enough(tiling):
    stage = tiling.stage(3)
    for g in stage.K:
        assert folner_ratio(tiling, 3, g) <= Fraction(1, 3)
    mass = stage.interior_mass()
    assert mass["G"] >= mass["target"] and mass["E"] >= mass["target"]


def test_factorisation_on_the_interior(tiling, seq):
    stage = tiling.stage(2)
    T = set(stage.T)
    for x in stage.K:
        for t in stage.T_interior:
            xt = seq.F.multiply(x, t)
            lam = stage.section.representative(seq.project(xt))
            rho = seq.F.multiply(seq.F.inverse(lam), xt)
            assert lam in T
            assert seq.in_kernel(rho)
            assert seq.F.multiply(lam, rho) == xt


def test_twist_set_is_in_the_kernel(tiling, seq):
    for l in (1, 2):
        assert all(seq.in_kernel(rho) for rho in tiling.stage(l).P)


def test_empty_interior_gives_no_twists(seq):
    section = coset_section(lambda f: True, seq)
    assert twist_set(seq, section, (), seq.F.first_k_elements(3), frozenset()) == ()


def test_twist_outside_the_tile_is_a_factorisation_error(seq):
    section = coset_section(lambda f: seq.project(f) == (0, 0), seq)
    with pytest.raises(FactorizationError):
        twist_set(seq, section, [(0, 0, 0)], [(1, 0, 0)], frozenset({(0, 0)}))


@pytest.mark.parametrize("l", [1, 2])
def test_extension_tiling_passes_the_window_check(tiling, l):
    report = check_tiling_window(tiling, l, 1000)
    assert report.tile_size == tiling.stage(l).tile_size
    assert report.disjoint and report.covers_window_interior


@pytest.mark.slow
def test_third_extension_tiling_passes_the_window_check(tiling):
    report = check_tiling_window(tiling, 3, 1000)
    assert report.disjoint and report.covers_window_interior


def test_extension_tiles_are_normal(tiling, seq):
    for l in (1, 2):
        assert tiling.tile_contains(l, seq.F.identity)
        assert tiling.center_contains(l, seq.F.identity)


def test_center_enumeration_and_decision_agree(tiling, seq):
    for i in range(1, 200):
        assert tiling.center_contains(1, tiling.center_enumerate(1, i))
    for g in seq.F.first_k_elements(200):
        assert decide_center(tiling, 1, g) == tiling.center_contains(1, g)


def test_tile_membership_matches_the_listed_tile(tiling, seq):
    tile = set(tiling.tile(1))
    for g in seq.F.first_k_elements(500):
        assert tiling.tile_contains(1, g) == (g in tile)


def test_build_extension_tiling_returns_tile_and_centers(seq):
    tile, centers = build_extension_tiling(seq, box_tiling(1), box_tiling(2), 1)
    assert len(tile) == 8
    assert centers(1) == (0, 0, 0)


def test_non_normal_input_is_refused(seq):
    shifted = ExtensionMonotiling(seq, box_tiling(1, origin=(3,)), box_tiling(2))
    with pytest.raises(TilingError):
        shifted.stage(1)


def test_inner_search_budget(seq):
    tight = ExtensionMonotiling(seq, box_tiling(1), box_tiling(2), Budgets(search_cap=5))
    with pytest.raises(SearchBudgetExceededError):
        tight.stage(2)
