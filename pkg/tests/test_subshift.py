import itertools
import json
import math

import pytest

from src.compgroup import group_by_name
from src.config import Budgets
from src.exceptions import *
from src.subshift import *


def interval(n):
    return [(x,) for x in range(n)]


def test_spec_files_load(full_shift, golden_mean, hard_squares):
    assert full_shift.name == "full_shift"
    assert full_shift.is_full_shift
    assert golden_mean.is_nearest_neighbor()
    assert not hard_squares.is_nearest_neighbor()
    assert hard_squares.group_name == "Z2"
    assert len(hard_squares.forbidden) == 2


def test_spec_round_trips_through_its_dict(golden_mean):
    assert parse_shift_spec(golden_mean.as_dict(), name="golden_mean") == golden_mean


@pytest.mark.parametrize("raw,field", [
    ({"alphabet": 2}, "group"),
    ({"group": "Z"}, "alphabet"),
    ({"group": "Q", "alphabet": 2}, "Q"),
    ({"group": "Z", "alphabet": 0}, "alphabet"),
    ({"group": "Z", "alphabet": 2, "colour": True}, "colour"),
    ({"group": "Z", "alphabet": 2, "forbidden": [{"support": [[0]], "letters": [3]}]}, "forbidden[0].letters"),
    ({"group": "Z", "alphabet": 2, "forbidden": [{"support": [[0, 1]], "letters": [1]}]}, "forbidden[0].support"),
    ({"group": "Z", "alphabet": 2, "forbidden": [{"support": [[0], [0]], "letters": [1, 1]}]}, "forbidden[0].support"),
    ({"group": "Z", "alphabet": 2, "forbidden": [{"support": [], "letters": []}]}, "forbidden[0].support"),
    ({"group": "Z", "alphabet": 2, "forbidden": [{"support": [[0]], "letters": [1, 1]}]}, "forbidden[0].letters"),
    ({"group": "Z", "alphabet": 2, "zero_fill_safe": "yes"}, "zero_fill_safe"),
])
def test_invalid_specs(raw, field):
    with pytest.raises(SpecValidationError, match=field.replace("[", r"\[").replace("]", r"\]")):
        parse_shift_spec(raw)


def test_unreadable_spec_file(tmp_path):
    with pytest.raises(SpecValidationError):
        load_shift_spec(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(SpecValidationError):
        load_shift_spec(broken)


def test_spec_name_comes_from_the_file(tmp_path):
    path = tmp_path / "even_shift.json"
    path.write_text(json.dumps({"group": "Z", "alphabet": 3}), encoding="utf-8")
    assert load_shift_spec(path).name == "even_shift"


def test_pattern_basics():
    Z2 = group_by_name("Z2")
    P = Pattern.from_mapping(Z2, {(1, 0): 2, (0, 0): 1})
    assert P.cells == ((0, 0), (1, 0))
    assert P[(1, 0)] == 2
    assert P.word() == "12"
    assert P.restrict([(1, 0)]) == Pattern(((1, 0),), (2,))
    with pytest.raises(ValueError):
        P.restrict([(5, 5)])
    with pytest.raises(ValueError):
        Pattern(((0, 0),), (1, 2))


def test_language_counts(full_shift, golden_mean, hard_squares, budgets):
    assert len(language(full_shift, interval(4), budgets)) == 16
    assert len(language(golden_mean, interval(4), budgets)) == 8
    square = [(x, y) for x in range(2) for y in range(2)]
    assert len(language(hard_squares, square, budgets)) == 7
    assert count_language(hard_squares, square, budgets) == 7


def test_language_is_lexicographic(golden_mean):
    words = [p.word() for p in language(golden_mean, interval(3))]
    assert words == ["111", "112", "121", "211", "212"]


def test_language_on_the_empty_set(golden_mean):
    assert language(golden_mean, []) == [Pattern((), ())]
    assert count_language(golden_mean, []) == 1


def test_language_accepts_index_sets(golden_mean):
    Z = golden_mean.group
    assert len(language(golden_mean, Z.index_set(interval(4)))) == 8


def test_enumeration_budget(hard_squares):
    square = [(x, y) for x in range(5) for y in range(5)]
    with pytest.raises(EnumerationBudgetExceededError):
        count_language(hard_squares, square, Budgets(enumeration_nodes=100))


@pytest.mark.parametrize("n,expected", [(0, 1), (1, 2), (4, 8), (20, 17711)])
def test_transfer_matrix_counts(golden_mean, n, expected):
    assert count_language_1d(golden_mean, n) == expected


def test_transfer_matrix_counts_are_exact_for_long_words(full_shift, golden_mean):
    assert count_language_1d(full_shift, 10) == 1024
    assert count_language_1d(full_shift, 200) == 2 ** 200
    assert count_language_1d(golden_mean, 60) == count_language_1d(golden_mean, 59) + count_language_1d(golden_mean, 58)


def test_transfer_matrix_agrees_with_backtracking(golden_mean):
    for n in range(1, 12):
        assert count_language_1d(golden_mean, n) == len(language(golden_mean, interval(n)))


def test_spectral_entropy(golden_mean, full_shift):
    assert spectral_entropy(golden_mean) == pytest.approx(math.log2((1 + math.sqrt(5)) / 2), abs=1e-9)
    assert spectral_entropy(full_shift) == pytest.approx(1.0)


def test_transfer_matrix_needs_a_nearest_neighbour_shift(hard_squares):
    with pytest.raises(SpecNotNearestNeighborError):
        transfer_matrix(hard_squares)
    gapped = parse_shift_spec({
        "group": "Z", "alphabet": 2,
        "forbidden": [{"support": [[0], [2]], "letters": [2, 2]}]
    })
    assert not gapped.is_nearest_neighbor()
    with pytest.raises(SpecNotNearestNeighborError):
        count_language_1d(gapped, 4)
    assert count_language(gapped, interval(4)) == 9


def _admissible_by_definition(spec, cells, word):
    G = spec.group
    letter = dict(zip(cells, word))
    for P in spec.forbidden:
        for s in P.cells:
            for f in cells:
                g = G.multiply(G.inverse(s), f)
                placed = [G.multiply(t, g) for t in P.cells]
                if all(c in letter for c in placed) and all(letter[c] == a for c, a in zip(placed, P.letters)):
                    return False
    return True


def test_heisenberg_language_matches_the_definition():
    spec = parse_shift_spec({
        "group": "H3", "alphabet": 2,
        "forbidden": [
            {"support": [[0, 0, 0], [0, 1, 0]], "letters": [2, 2]},
            {"support": [[0, 0, 0], [1, 0, 0]], "letters": [1, 1]},
        ]
    })
    G = spec.group
    cells = G.first_k_elements(9)
    expected = [w for w in itertools.product((1, 2), repeat=len(cells)) if _admissible_by_definition(spec, cells, w)]
    found = [p.letters for p in language(spec, cells)]
    assert sorted(found) == sorted(expected)


def test_right_translates_keep_counts(hard_squares):
    G = hard_squares.group
    F = [(x, y) for x in range(3) for y in range(2)] + [(0, 2)]
    base = count_language(hard_squares, F)
    for g in [(5, -3), (-1, 7), (2, 2)]:
        assert count_language(hard_squares, [G.multiply(f, g) for f in F]) == base


def test_counts_are_submultiplicative(hard_squares, golden_mean):
    left = [(x, y) for x in range(2) for y in range(2)]
    right = [(x, y) for x in range(2, 4) for y in range(2)]
    assert count_language(hard_squares, left + right) <= count_language(hard_squares, left) * count_language(hard_squares, right)
    for a in range(1, 8):
        for b in range(1, 8):
            assert count_language_1d(golden_mean, a + b) <= count_language_1d(golden_mean, a) * count_language_1d(golden_mean, b)


def test_restrictions_stay_in_the_language(hard_squares):
    F = [(x, y) for x in range(3) for y in range(3)]
    smaller = [(x, y) for x in range(2) for y in range(3)]
    allowed = set(language(hard_squares, smaller))
    for p in language(hard_squares, F):
        assert p.restrict(smaller) in allowed
        assert is_locally_admissible(hard_squares, p)


def test_action_axioms():
    H = group_by_name("H3")
    omega = Configuration(H, lambda x: 1 + (x[0] * 3 + x[1] * 5 + x[2]) % 4, "test")
    elements = H.first_k_elements(40)
    e = H.identity
    for x in elements:
        assert act(e, omega)(x) == omega(x)
    for g, h in [((1, 0, 0), (0, 1, 0)), ((2, -1, 3), (-1, 4, 0))]:
        composed = act(g, act(h, omega))
        direct = act(H.multiply(g, h), omega)
        for x in elements:
            assert composed(x) == direct(x)


def test_periodic_configuration():
    Z2 = group_by_name("Z2")
    omega = Configuration.periodic(Z2, 3, 2)
    assert [omega((x, 0)) for x in range(6)] == [1, 2, 1, 1, 2, 1]
    assert omega((1, 1)) == omega((2, 0))
    with pytest.raises(ValueError):
        Configuration.periodic(Z2, 0, 2)


def test_constant_sampler(golden_mean):
    assert sample_configuration(golden_mean, "constant")((123,)) == 1
    with pytest.raises(ConstraintViolationError):
        sample_configuration(golden_mean, "constant", letter=2)
    with pytest.raises(ConstraintViolationError):
        sample_configuration(golden_mean, "constant", letter=3)


def test_unknown_sampler(golden_mean):
    with pytest.raises(ValidationError):
        sample_configuration(golden_mean, "gibbs")


def test_greedy_sampler_avoids_the_forbidden_pair(golden_mean):
    window = interval(10_000)
    omega = sample_configuration(golden_mean, "greedy-admissible", window=window, seed=3)
    letters = [omega((x,)) for x in range(-1, 10_001)]
    assert all(not (a == 2 and b == 2) for a, b in zip(letters, letters[1:]))
    assert 2 in letters
    assert is_locally_admissible(golden_mean, omega.restrict(window))


def test_greedy_sampler_on_hard_squares(hard_squares):
    window = [(x, y) for x in range(20) for y in range(20)]
    omega = greedy_admissible(hard_squares, window, seed=1)
    assert is_locally_admissible(hard_squares, omega.restrict([(x, y) for x in range(-1, 21) for y in range(-1, 21)]))


def test_greedy_sampler_needs_a_fill_safe_spec():
    spec = ShiftSpec("Z", 2, parse_shift_spec({
        "group": "Z", "alphabet": 2, "forbidden": [{"support": [[0], [1]], "letters": [2, 2]}]
    }).forbidden, zero_fill_safe=False)
    with pytest.raises(ConstraintViolationError):
        greedy_admissible(spec, interval(5))


def test_uniform_sampler_is_seeded(full_shift):
    window = interval(64)
    a = uniform_random(full_shift, window, seed=5).restrict(window)
    b = uniform_random(full_shift, window, seed=5).restrict(window)
    c = uniform_random(full_shift, window, seed=6).restrict(window)
    assert a == b
    assert a != c
    assert set(a.letters) <= {1, 2}
    assert uniform_random(full_shift, window, seed=5)((100,)) == FILL_LETTER


def test_uniform_sampler_still_serves_the_full_shift(full_shift):
    window = interval(64)
    omega = sample_configuration(full_shift, "uniform-random", window=window, seed=7)
    assert omega.restrict(window) == uniform_random(full_shift, window, seed=7).restrict(window)


def test_uniform_sample_of_a_constrained_shift_is_refused(golden_mean):
    with pytest.raises(ConstraintViolationError, match="golden_mean"):
        sample_configuration(golden_mean, "uniform-random", window=interval(64), seed=7)


def test_periodic_sample_breaking_a_pattern_is_refused():
    spec = parse_shift_spec({
        "group": "Z", "alphabet": 2,
        "forbidden": [{"support": [[0], [1]], "letters": [2, 1]}]
    }, name="no_descent")
    with pytest.raises(ConstraintViolationError, match="no_descent"):
        sample_configuration(spec, "periodic", period=2)
    with pytest.raises(ConstraintViolationError):
        sample_configuration(spec, "periodic", window=interval(8), period=2)


def test_admissible_periodic_sample_is_kept(golden_mean):
    omega = sample_configuration(golden_mean, "periodic", window=interval(20), period=2)
    assert [omega((x,)) for x in range(4)] == [1, 2, 1, 2]
