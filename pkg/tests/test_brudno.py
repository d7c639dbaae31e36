import dataclasses
import gc
import math
import weakref
from pathlib import Path

import pytest
from bitarray import bitarray
from hypothesis import given, settings
import hypothesis.strategies as st

from src.brudno import *
from src.codec import encode_hat, hat_length
from src.config import Budgets, SamplerConfig
from src.exceptions import *
from src.monotiling import box_tiling, heisenberg_tiling
from src.subshift import Configuration, Pattern, ShiftSpec, count_language, greedy_admissible, language, load_shift_spec, uniform_random

DATA = Path(__file__).resolve().parent.parent / "data"

LINE = box_tiling(1)
PLANE = box_tiling(2)
HEISENBERG = heisenberg_tiling()
GOLDEN_MEAN = load_shift_spec(DATA / "specs" / "golden_mean.json")


@pytest.mark.parametrize("n,expected", [
    (0, 5), (1, 5), (2, 8), (3, 8), (4, 9), (6, 9), (7, 9), (8, 12), (9, 12), (10, 12),
    (15, 12), (16, 13), (20, 13), (32, 14), (64, 15), (128, 18), (256, 19), (1024, 21), (4096, 23),
])
def test_hat_lengths_used_by_programs(n, expected):
    assert hat_length(n) == expected


def test_geometry_on_z():
    geometry = tiling_geometry(LINE, 3, 9)
    assert geometry.centers == ((0,), (3,), (6,))
    assert geometry.remainder == ()
    assert len(geometry.covered) == 9


def test_geometry_is_cached_while_the_tiling_lives():
    assert tiling_geometry(LINE, 3, 9) is tiling_geometry(LINE, 3, 9)
    T = box_tiling(1)
    ref = weakref.ref(T)
    tiling_geometry(T, 3, 9)
    del T
    gc.collect()
    assert ref() is None


def test_geometry_with_a_remainder():
    geometry = tiling_geometry(LINE, 3, 10)
    assert geometry.centers == ((0,), (3,), (6,))
    assert geometry.remainder == ((9,),)


def test_constant_program(full_shift):
    omega = Configuration.constant(LINE.group)
    program = compress(omega, full_shift, LINE, 3, 9)
    assert (program.N, program.L, program.l) == (1, 6, 0)
    assert program.indices == (1, 1, 1)
    assert program.header_length == 39
    assert len(program) == 60
    assert len(program.to_bits()) == 60


def test_decompress_a_written_program():
    bits = bitarray()
    for value in (1, 4, 1, 2, 0):
        bits.extend(encode_hat(value))
    bits.extend(bitarray("01"))
    for _ in range(4):
        bits.extend(encode_hat(1))
    pattern = decompress(bits, LINE, 2)
    assert pattern.cells == ((0,), (1,), (2,), (3,))
    assert pattern.letters == (2, 2, 2, 2)


def test_tile_larger_than_the_window(full_shift):
    omega = Configuration.periodic(LINE.group, 2, 2)
    program = compress(omega, full_shift, LINE, 16, 10)
    assert program.N == 0
    assert program.indices == ()
    assert len(program) == 77
    assert decompress(program.to_bits(), LINE, 2) == omega.restrict(LINE.tile(10))


@pytest.fixture
def constant_program(full_shift):
    return compress(Configuration.constant(LINE.group), full_shift, LINE, 3, 9)


@pytest.mark.parametrize("change", [
    {"L": 7},
    {"l": 2},
    {"k": 4},
    {"indices": (0, 1, 1)},
    {"indices": (2, 1, 1)},
])
def test_inconsistent_programs_are_rejected(constant_program, change):
    bad = dataclasses.replace(constant_program, **change)
    with pytest.raises(ProgramRejectedError):
        decompress(bad.to_bits(), LINE, 2)


def test_trailing_bits_are_rejected(constant_program):
    bits = constant_program.to_bits()
    bits.append(0)
    with pytest.raises(ProgramRejectedError):
        decompress(bits, LINE, 2)


def test_truncated_programs_are_rejected(constant_program):
    bits = constant_program.to_bits()
    for cut in (1, 10, 45):
        with pytest.raises(ProgramRejectedError):
            decompress(bits[:cut], LINE, 2)


def test_oversized_tiles_are_rejected(constant_program):
    with pytest.raises(ProgramRejectedError):
        decompress(constant_program.to_bits(), LINE, 2, Budgets(max_tile_cells=5))


def test_zero_tile_index_is_rejected():
    bits = bitarray()
    for value in (0, 4, 0, 0, 0):
        bits.extend(encode_hat(value))
    with pytest.raises(ProgramRejectedError):
        decompress(bits, LINE, 2)


def test_letter_outside_the_alphabet_is_rejected():
    bits = bitarray()
    for value in (1, 1, 1, 2, 0):
        bits.extend(encode_hat(value))
    bits.extend(bitarray("11"))
    bits.extend(encode_hat(1))
    with pytest.raises(ProgramRejectedError):
        decompress(bits, LINE, 2)


THREE_LETTERS = {name: ShiftSpec(name, 3, name=f"full3_{name}") for name in ("Z", "Z2", "H3")}


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from([(LINE, "Z", 2, 11), (LINE, "Z", 4, 30), (PLANE, "Z2", 2, 5), (HEISENBERG, "H3", 1, 2)]),
    st.integers(min_value=0, max_value=10**6),
    st.sampled_from(DICTIONARY_MODES),
)
def test_decompress_inverts_compress(case, seed, mode):
    T, group, k, n = case
    spec = THREE_LETTERS[group]
    omega = uniform_random(spec, T.tile(n), seed=seed)
    program = compress(omega, spec, T, k, n, mode)
    bits = program.to_bits()
    assert len(bits) == len(program)
    assert decompress(bits, T, 3) == omega.restrict(T.tile(n))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=1, max_value=4))
def test_round_trip_on_golden_mean_samples(seed, k):
    omega = greedy_admissible(GOLDEN_MEAN, LINE.tile(12), seed)
    for mode in DICTIONARY_MODES:
        program = compress(omega, GOLDEN_MEAN, LINE, k, 12, mode)
        assert decompress(program.to_bits(), LINE, 2) == omega.restrict(LINE.tile(12))


def test_full_language_programs_meet_the_bound(golden_mean):
    for seed in range(5):
        omega = greedy_admissible(golden_mean, LINE.tile(12), seed)
        for k in (2, 3):
            N = count_language(golden_mean, LINE.tile(k))
            full = compress(omega, golden_mean, LINE, k, 12, "full-language")
            occurring = compress(omega, golden_mean, LINE, k, 12, "occurring")
            assert full.N == N
            assert len(full) <= program_length_bound(LINE, 2, k, 12, N)
            assert len(occurring) <= len(full)


def test_dictionary_miss(golden_mean):
    omega = Configuration.constant(LINE.group, 2)
    with pytest.raises(DictionaryMissError):
        compress(omega, golden_mean, LINE, 2, 8, "full-language")
    assert compress(omega, golden_mean, LINE, 2, 8, "occurring").N == 1


def test_unknown_mode(full_shift):
    with pytest.raises(ValidationError):
        compress(Configuration.constant(LINE.group), full_shift, LINE, 2, 8, "every-word")


def test_entropy_estimates(full_shift, golden_mean, hard_squares):
    assert entropy_estimate(full_shift, LINE, 10) == 1.0
    assert entropy_estimate(golden_mean, LINE, 4) == 0.75
    assert entropy_estimate(golden_mean, LINE, 20) == pytest.approx(math.log2(17711) / 20)
    assert entropy_estimate(hard_squares, PLANE, 2) == pytest.approx(math.log2(7) / 4)


def test_asymptotic_bound_shrinks_with_k(golden_mean):
    bounds = [asymptotic_bound(golden_mean, LINE, k, 0.0) for k in (4, 16, 64)]
    assert all(b < a for a, b in zip(bounds, bounds[1:]))
    assert asymptotic_bound(golden_mean, LINE, 4, 0.1) == pytest.approx(bounds[0] + 0.2)


def test_counting_lower_bound():
    assert counting_lower_bound(1024) == 9.0
    assert counting_lower_bound(1) == -1.0


@pytest.mark.parametrize("n", range(1, 11))
def test_some_word_needs_the_counting_bound(golden_mean, n):
    worst = 0
    for p in language(golden_mean, LINE.tile(n)):
        omega = Configuration.from_pattern(LINE.group, p)
        report = mean_complexity(omega, golden_mean, LINE, n, range(1, n + 1))
        worst = max(worst, report.program_length)
    assert worst >= counting_lower_bound(count_language(golden_mean, LINE.tile(n)))


def test_mean_complexity_prefers_the_smaller_k_on_ties(full_shift):
    omega = Configuration.constant(LINE.group)
    report = mean_complexity(omega, full_shift, LINE, 10, [16, 17, 18], with_entropy=True)
    assert report.lengths[16] == 77
    assert report.best_k == 16
    assert report.entropy == 1.0
    with pytest.raises(ValidationError):
        mean_complexity(omega, full_shift, LINE, 10, [])


def test_constant_configuration_compresses_well(full_shift):
    omega = Configuration.constant(LINE.group)
    report = mean_complexity(omega, full_shift, LINE, 4096, [4, 8, 16, 32, 64])
    assert report.best_k == 64
    assert report.program_length == 514
    assert report.mean_complexity <= 0.2


def test_exhaustive_sweep_of_the_full_shift(full_shift):
    frame = brudno_sweep(full_shift, LINE, [8, 10, 12], [2, 3, 4])
    rows = frame.records()
    assert [r["n"] for r in rows] == [8, 10, 12]
    assert [r["count"] for r in rows] == [256, 1024, 4096]
    assert all(r["entropy_bits"] == 1.0 for r in rows)
    assert all(r["statistic"] == "exhaustive" and r["entropy_kind"] == "exact" for r in rows)
    assert all(r["seed"] is None for r in rows)
    for r in rows:
        assert r["max_mean_complexity_bits"] * r["cells"] >= counting_lower_bound(r["count"])
        assert r["max_mean_complexity_bits"] * r["cells"] >= r["n"]
        assert r["gap"] == pytest.approx(r["max_mean_complexity_bits"] - r["entropy_bits"])


def test_sampled_sweep_is_labelled(golden_mean):
    sampler = SamplerConfig(kind="greedy-admissible", seed=3, samples=2)
    frame = brudno_sweep(golden_mean, LINE, [40], [4, 8], sampler, budgets=Budgets(exhaustive_words=100))
    row = frame.records()[0]
    assert row["statistic"] == "sampled"
    assert (row["seed"], row["samples"]) == (3, 2)
    assert row["count"] == count_language(golden_mean, LINE.tile(40))


@pytest.mark.slow
def test_gap_closes_along_the_sweep(full_shift):
    sampler = SamplerConfig(kind="uniform-random", seed=7, samples=4)
    frame = brudno_sweep(full_shift, LINE, [64, 256, 1024], [4, 8, 16], sampler)
    assert frame.is_gap_decreasing()
    gaps = frame.gaps()
    assert gaps[0] == pytest.approx(2.34, abs=0.05)
    assert gaps[-1] <= 1.871


def test_sweep_of_a_constrained_shift_refuses_uniform_samples(golden_mean):
    with pytest.raises(ConstraintViolationError, match="golden_mean"):
        brudno_sweep(golden_mean, LINE, [8], [2], SamplerConfig(kind="uniform-random"))


def test_sweep_of_a_constrained_shift_defaults_to_greedy_samples(golden_mean):
    frame = brudno_sweep(golden_mean, LINE, [40], [4], budgets=Budgets(exhaustive_words=100))
    row = frame.records()[0]
    assert row["statistic"] == "sampled"
    assert row["entropy_kind"] == "exact"


def test_entropy_of_an_empty_language_is_refused():
    dead_end = ShiftSpec("Z", 1, (Pattern(((0,),), (1,)),), name="dead_end")
    assert entropy_kind(dead_end) == "upper"
    with pytest.raises(ConstraintViolationError, match="dead_end"):
        entropy_estimate(dead_end, LINE, 3)
    with pytest.raises(ConstraintViolationError):
        entropy_from_count(dead_end, 0, 3, 3)
    assert entropy_from_count(dead_end, 8, 3, 3) == 1.0
