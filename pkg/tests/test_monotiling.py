from fractions import Fraction
import math
import random

import pytest

from src.compgroup import group_by_name
from src.config import Budgets
from src.exceptions import *
from src.monotiling import *


def test_k_boundary_of_an_interval():
    Z = group_by_name("Z")
    report = k_boundary([(0,), (1,)], [(x,) for x in range(5)], Z)
    assert set(report.boundary) == {(-1,), (4,)}
    assert report.interior == ((0,), (1,), (2,), (3,))
    assert report.ratio == Fraction(2, 5)


def test_k_boundary_of_a_long_interval():
    Z = group_by_name("Z")
    report = k_boundary([(0,), (1,)], [(x,) for x in range(100)], Z)
    assert set(report.interior) == {(x,) for x in range(99)}
    assert report.ratio == Fraction(2, 100)


def test_identity_has_empty_boundary():
    Z2 = group_by_name("Z2")
    F = [(x, y) for x in range(3) for y in range(2)]
    report = k_boundary([(0, 0)], F, Z2)
    assert report.boundary == ()
    assert set(report.interior) == set(F)


@pytest.mark.parametrize("name", ["Z", "Z2"])
def test_interior_characterisation(name):
    G = group_by_name(name)
    rng = random.Random(11)
    pool = G.first_k_elements(60)
    for _ in range(100):
        K = rng.sample(pool, rng.randint(1, 4))
        F = set(rng.sample(pool, rng.randint(1, 30)))
        report = k_boundary(K, F, G)
        expected = {g for g in G.first_k_elements(2000) if all(G.multiply(k, g) in F for k in K)}
        assert set(report.interior) == expected
        if G.identity in K:
            assert set(report.interior) == F - set(report.boundary)


def test_zd_monotiling():
    line = zd_monotiling(1, 3)
    assert line.center_contains((6,))
    assert not line.center_contains((7,))
    assert set(zd_monotiling(2, 2).tile) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    cover = [(z + x,) for z in (0, 3) for x in range(3)]
    assert sorted(cover) == [(x,) for x in range(6)]


def test_h3_monotiling():
    square = h3_monotiling(2)
    assert square.center_contains((2, 0, 0))
    assert not square.center_contains((1, 0, 0))
    assert square.locate((3, 3, 7)) == ((1, 1, 1), (2, 2, 4))
    assert len(square.tile) == 16


def test_decide_center(z_tiling):
    assert decide_center(z_tiling, 3, (6,))
    assert not decide_center(z_tiling, 3, (7,))
    assert decide_center(z_tiling, 3, (0,))


def test_decide_center_agrees_with_the_direct_test(h3_tiling):
    H = h3_tiling.group
    for g in H.first_k_elements(300):
        assert decide_center(h3_tiling, 2, g) == h3_tiling.center_contains(2, g)


def test_decide_center_needs_the_identity_in_the_tile():
    shifted = box_tiling(1, origin=(5,))
    with pytest.raises(TilingError):
        decide_center(shifted, 3, (5,))


def test_decide_center_budget(z_tiling):
    with pytest.raises(SearchBudgetExceededError):
        decide_center(z_tiling, 3, (10**6,), Budgets(center_search_cap=10))


def test_invariance_index(z_tiling, z2_tiling):
    assert invariance_index(z_tiling, 3) == 13
    assert invariance_index(z_tiling, 1) == 1
    assert invariance_index(z2_tiling, 1) == 1
    assert invariance_index(z2_tiling, 2) == 9
    assert invariance_index(z2_tiling, 3) == 13
    assert invariance_index(z_tiling, 16) == 513
    assert invariance_index(z_tiling, 24) == 1153


def test_invariance_index_budget(z_tiling):
    with pytest.raises(SearchBudgetExceededError):
        invariance_index(z_tiling, 3, Budgets(search_cap=12))


def test_closed_form_symmetric_difference_matches_enumeration(z2_tiling):
    for n in (1, 3, 6):
        for g in z2_tiling.group.first_k_elements(20):
            generic = Monotiling.symmetric_difference_size(z2_tiling, n, g)
            assert z2_tiling.symmetric_difference_size(n, g) == generic


def test_folner_ratios_decay(z2_tiling, h3_tiling):
    for T in (z2_tiling, h3_tiling):
        for g in T.group.first_k_elements(5):
            ratios = [folner_ratio(T, 2 ** j, g) for j in range(1, 5)]
            assert all(b <= a for a, b in zip(ratios, ratios[1:]))
        K = T.group.first_k_elements(5)
        weak = [weak_folner_ratio(T, 2 ** j, K) for j in range(1, 5)]
        assert all(b <= a for a, b in zip(weak, weak[1:]))


def test_density_report_on_z(z_tiling):
    report = density_report(z_tiling, 2, 100)
    assert report.interior_center_ratio == Fraction(50, 100)
    assert report.target == Fraction(1, 2)
    assert abs(report.interior_center_ratio - report.target) <= Fraction(2, 100)
    assert density_report(z_tiling, 2, 10).interior_center_ratio == Fraction(5, 10)
    assert density_report(z_tiling, 1, 10).interior_center_ratio == 1


def test_density_report_on_z2(z2_tiling):
    report = density_report(z2_tiling, 2, 32)
    assert report.interior_center_ratio == Fraction(256, 1024)
    errors = [abs(density_report(z2_tiling, 2, n).interior_center_ratio - Fraction(1, 4)) for n in (3, 5, 9, 17)]
    assert all(b <= a for a, b in zip(errors, errors[1:]))


def test_normalize_shifted_boxes():
    shifted = box_tiling(1, origin=(5,))
    assert not shifted.normal
    normal = normalize(shifted)
    assert normal.normal
    assert normal.subsequence(1) == 1
    assert normal.subsequence(2) == 6
    assert normal.shift(2) == (5,)
    assert normal.tile(2) == tuple((x,) for x in range(6))
    for i in range(1, 6):
        assert normal.tile_contains(i, (0,))
        n = normal.subsequence(i)
        if i >= 2:
            assert normal.tile_size(i) / math.log2(n) >= i


def test_normalize_keeps_the_tiling_property():
    normal = normalize(box_tiling(2, origin=(3, -2)))
    for i in (1, 2, 3):
        report = check_tiling_window(normal, i, 300)
        assert report.disjoint and report.covers_window_interior
        for g in normal.group.first_k_elements(60):
            assert decide_center(normal, i, g) == normal.center_contains(i, g)


def test_normalize_on_a_normal_tiling_only_reindexes(z_tiling):
    normal = normalize(z_tiling)
    for i in range(1, 5):
        assert normal.shift(i) == (0,)
        assert normal.tile(i) == z_tiling.tile(normal.subsequence(i))


@pytest.mark.parametrize("d,n", [(1, 1), (1, 7), (1, 64), (2, 3), (2, 16), (3, 2)])
def test_box_window_check(d, n):
    report = check_tiling_window(box_tiling(d), n, 1000)
    assert report.tile_size == n ** d
    assert report.disjoint and report.covers_window_interior


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_heisenberg_window_check(h3_tiling, n):
    report = check_tiling_window(h3_tiling, n, 1000)
    assert report.tile_size == n ** 4
    assert report.disjoint and report.covers_window_interior


def test_window_check_report_shape(h3_tiling):
    assert check_tiling_window(h3_tiling, 2, 200).as_dict() == {
        "tile_size": 16,
        "disjoint": True,
        "covers_window_interior": True,
    }


class _Overlapping(BoxMonotiling):
    """Boxes of side n with centers every n - 1: neighbouring tiles overlap."""

    def center_contains(self, n, g):
        step = max(n - 1, 1)
        return all(x % step == 0 for x in g)

    def center_enumerate(self, n, i):
        step = max(n - 1, 1)
        return tuple(step * x for x in self.group.element_at(i))

    def locate(self, n, g):
        return Monotiling.locate(self, n, g)


def test_window_check_catches_overlaps():
    report = check_tiling_window(_Overlapping(1), 4, 50)
    assert not report.disjoint


def test_generic_locate_agrees_with_closed_form(h3_tiling):
    for g in h3_tiling.group.first_k_elements(200):
        assert Monotiling.locate(h3_tiling, 2, g) == h3_tiling.locate(2, g)
