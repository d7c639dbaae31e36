"""Entropy estimates and tiling-dictionary programs.

Two quantities are compared along a Følner monotiling (F_n):

  entropy   log2 |language(F_n)| / |F_n|
  complexity  the length of a program for ω|F_n divided by |F_n|

Programs are read by a fixed decompressor. A program is the bit string

    hat(k) hat(n) hat(N) hat(L) hat(l) w_1 ... w_N v hat(i_1) ... hat(i_s)

where w_1..w_N are dictionary words on the small tile F_k (L bits each), v
holds the letters of the cells of F_n not covered by whole small tiles
(l bits), and i_j names the dictionary word placed on F_k g_j for the j-th
interior center g_j. The cell x·g_j receives the letter at the position of x
in the index-sorted F_k; compress reads (g_j·ω)|F_k the same way, so the two
are exact inverses. s is never written: it is recomputed from (k, n).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence
from weakref import WeakKeyDictionary

from bitarray import bitarray
from rich.console import Console
from rich.progress import track

from src.codec import BitReader, as_bits, decode_letter_block, encode_hat, encode_letter_block, hat_length, hat_length_bound, letter_width
from src.compgroup import GroupElement
from src.config import Budgets, SamplerConfig
from src.exceptions import *
from src.monotiling import Monotiling, interior_centers
from src.report_frame import ReportFrame
from src.subshift import Configuration, Pattern, ShiftSpec, count_language, language, sample_configuration

logger = logging.getLogger(__name__)

DICTIONARY_MODES = ("occurring", "full-language")


@dataclass(frozen=True)
class TilingGeometry:
    """The placement of small tiles inside a large one.

    Attributes:
        k (int): Index of the small tile.
        n (int): Index of the large tile.
        tile_k (tuple[GroupElement, ...]): F_k, sorted by index.
        tile_n (tuple[GroupElement, ...]): F_n, sorted by index.
        centers (tuple[GroupElement, ...]): Int_{F_k}(F_n) ∩ Z_k, sorted by index.
        covered (frozenset[GroupElement]): Δ = F_k · centers.
        remainder (tuple[GroupElement, ...]): F_n minus Δ, sorted by index.
    """

    k: int
    n: int
    tile_k: tuple[GroupElement, ...]
    tile_n: tuple[GroupElement, ...]
    centers: tuple[GroupElement, ...]
    covered: frozenset[GroupElement]
    remainder: tuple[GroupElement, ...]


_GEOMETRIES: WeakKeyDictionary[Monotiling, dict[tuple[int, int], TilingGeometry]] = WeakKeyDictionary()


def tiling_geometry(
        T: Monotiling,
        k: int,
        n: int
        ) -> TilingGeometry:
    """Computes the geometry of (F_k, F_n), cached for as long as T lives."""

    cache = _GEOMETRIES.setdefault(T, {})
    if (k, n) not in cache:
        cache[(k, n)] = _compute_geometry(T, k, n)
    return cache[(k, n)]


def _compute_geometry(
        T: Monotiling,
        k: int,
        n: int
        ) -> TilingGeometry:
    G = T.group
    tile_k, tile_n = T.tile(k), T.tile(n)
    centers = interior_centers(T, k, n)
    covered = frozenset(G.multiply(x, g) for g in centers for x in tile_k)
    remainder = tuple(x for x in tile_n if x not in covered)
    logger.debug("geometry k=%d n=%d: %d centers, %d remainder cells", k, n, len(centers), len(remainder))
    return TilingGeometry(k, n, tile_k, tile_n, centers, covered, remainder)


@dataclass(frozen=True)
class Program:
    """A parsed program.

    Attributes:
        k (int): Small tile index.
        n (int): Large tile index.
        N (int): Number of dictionary words.
        L (int): Bits per dictionary word, |F_k| times the letter width.
        l (int): Bits of the remainder block.
        dictionary (tuple[bitarray, ...]): The N words.
        remainder (bitarray): The remainder block.
        indices (tuple[int, ...]): Dictionary positions, 1-based, one per
            interior center.
    """

    k: int
    n: int
    N: int
    L: int
    l: int
    dictionary: tuple[bitarray, ...]
    remainder: bitarray
    indices: tuple[int, ...]

    @property
    def header_length(self) -> int:
        return sum(hat_length(v) for v in (self.k, self.n, self.N, self.L, self.l))

    def __len__(self) -> int:
        """Closed-form bit length of `to_bits()`."""

        return self.header_length + self.N * self.L + self.l + sum(hat_length(i) for i in self.indices)

    def to_bits(self) -> bitarray:
        out = bitarray()
        for value in (self.k, self.n, self.N, self.L, self.l):
            out.extend(encode_hat(value))
        for word in self.dictionary:
            out.extend(word)
        out.extend(self.remainder)
        for i in self.indices:
            out.extend(encode_hat(i))
        return out

    @classmethod
    def parse(
            cls,
            bits: str | bitarray,
            T: Monotiling,
            alphabet: int,
            budgets: Budgets | None = None
            ) -> "Program":
        """Parses and checks a program against the tiling geometry.

        Raises:
            ProgramRejectedError: If the bits do not parse, a header field is
                inconsistent with the geometry, an index is out of range, or
                bits are left over.
        """

        if budgets is None:
            budgets = T.budgets
        width = letter_width(alphabet)
        try:
            reader = BitReader(as_bits(bits))
            k, n, N, L, l = (reader.read_hat() for _ in range(5))
        except CodecError as e:
            raise ProgramRejectedError(f"header: {e}") from None

        if k < 1 or n < 1:
            raise ProgramRejectedError(f"header: tile indices must be positive, got k={k}, n={n}")
        for index in (k, n):
            if T.tile_size(index) > budgets.max_tile_cells:
                raise ProgramRejectedError(f"header: tile F_{index} exceeds max_tile_cells={budgets.max_tile_cells}")
        geometry = tiling_geometry(T, k, n)
        if L != len(geometry.tile_k) * width:
            raise ProgramRejectedError(f"header: L={L} but |F_k|·width = {len(geometry.tile_k) * width}")
        if l != len(geometry.remainder) * width:
            raise ProgramRejectedError(f"header: l={l} but the remainder needs {len(geometry.remainder) * width} bits")

        try:
            dictionary = tuple(reader.read(L) for _ in range(N))
            remainder = reader.read(l)
            indices = tuple(reader.read_hat() for _ in geometry.centers)
        except CodecError as e:
            raise ProgramRejectedError(f"body: {e}") from None
        if not reader.at_end():
            raise ProgramRejectedError(f"body: {reader.remaining()} trailing bits")
        for j, i in enumerate(indices):
            if not 1 <= i <= N:
                raise ProgramRejectedError(f"indices[{j}]: {i} outside 1..{N}")
        return cls(k, n, N, L, l, dictionary, remainder, indices)


def decompress(
        bits: str | bitarray,
        T: Monotiling,
        alphabet: int,
        budgets: Budgets | None = None
        ) -> Pattern:
    """Runs a program and returns the pattern it describes on F_n.

    Args:
        bits (str | bitarray): The program.
        T (Monotiling): The tiling both sides agree on.
        alphabet (int): The alphabet size k.
        budgets (Budgets | None, optional): Supplies `max_tile_cells`.

    Returns:
        Pattern: The pattern on F_n.

    Raises:
        ProgramRejectedError: If the program is malformed or inconsistent;
            no partial output is produced.
    """

    program = Program.parse(bits, T, alphabet, budgets)
    geometry = tiling_geometry(T, program.k, program.n)
    G = T.group
    size_k = len(geometry.tile_k)
    try:
        words = [decode_letter_block(w, alphabet, size_k) for w in program.dictionary]
        rest = decode_letter_block(program.remainder, alphabet, len(geometry.remainder))
    except CodecError as e:
        raise ProgramRejectedError(f"letters: {e}") from None

    letters: dict[GroupElement, int] = dict(zip(geometry.remainder, rest))
    for g, i in zip(geometry.centers, program.indices):
        for x, a in zip(geometry.tile_k, words[i - 1]):
            letters[G.multiply(x, g)] = a
    return Pattern(geometry.tile_n, tuple(letters[x] for x in geometry.tile_n))


def compress(
        omega: Configuration,
        spec: ShiftSpec,
        T: Monotiling,
        k: int,
        n: int,
        mode: str = "occurring",
        budgets: Budgets | None = None
        ) -> Program:
    """Builds the tiling-dictionary program for ω|F_n with small tile F_k.

    Args:
        omega (Configuration): The configuration.
        spec (ShiftSpec): The shift; supplies the alphabet and, in
            full-language mode, the dictionary.
        T (Monotiling): The tiling.
        k (int): Small tile index.
        n (int): Large tile index.
        mode (str, optional): "occurring" lists the distinct words seen at
            interior centers; "full-language" lists all of language(F_k).
            Both are sorted lexicographically. Defaults to "occurring".
        budgets (Budgets | None, optional): Enumeration budget for
            full-language mode.

    Returns:
        Program: A program that `decompress` maps back to ω|F_n.

    Raises:
        DictionaryMissError: In full-language mode, if a word seen in ω is
            not in the language.
        LetterOutOfRangeError: If ω uses a letter outside the alphabet.
    """

    if mode not in DICTIONARY_MODES:
        raise ValidationError(f"mode: must be one of {', '.join(DICTIONARY_MODES)}")
    if budgets is None:
        budgets = T.budgets
    G = T.group
    alphabet = spec.alphabet
    geometry = tiling_geometry(T, k, n)

    words = [tuple(omega(G.multiply(x, g)) for x in geometry.tile_k) for g in geometry.centers]
    if mode == "occurring":
        dictionary = sorted(set(words))
    else:
        dictionary = [p.letters for p in language(spec, geometry.tile_k, budgets)]
    position = {w: i for i, w in enumerate(dictionary, start=1)}

    indices = []
    for g, w in zip(geometry.centers, words):
        if w not in position:
            raise DictionaryMissError(f"the word {w} at center {g} is not in language(F_{k})")
        indices.append(position[w])

    width = letter_width(alphabet)
    return Program(
        k=k,
        n=n,
        N=len(dictionary),
        L=len(geometry.tile_k) * width,
        l=len(geometry.remainder) * width,
        dictionary=tuple(encode_letter_block(w, alphabet) for w in dictionary),
        remainder=encode_letter_block([omega(x) for x in geometry.remainder], alphabet),
        indices=tuple(indices)
    )


def program_length_bound(
        T: Monotiling,
        alphabet: int,
        k: int,
        n: int,
        N: int
        ) -> int:
    """The estimate hat(k)+hat(n)+hat(N)+hat(L)+hat(l) + N·L + l + s·hat(N).

    Every index is at most N, so a full-language program never exceeds it.
    """

    geometry = tiling_geometry(T, k, n)
    width = letter_width(alphabet)
    L = len(geometry.tile_k) * width
    l = len(geometry.remainder) * width
    header = sum(hat_length(v) for v in (k, n, N, L, l))
    return header + N * L + l + len(geometry.centers) * hat_length(N)


def asymptotic_bound(
        spec: ShiftSpec,
        T: Monotiling,
        k: int,
        eps: float,
        budgets: Budgets | None = None
        ) -> float:
    """ε·width + hat_bound(N_k) / |F_k|, the limit of the per-cell estimate.

    N_k is |language(F_k)| and ε bounds the share of F_n outside whole tiles.
    """

    N_k = count_language(spec, T.tile(k), budgets)
    return eps * letter_width(spec.alphabet) + hat_length_bound(max(N_k, 1)) / T.tile_size(k)


def counting_lower_bound(count: int) -> float:
    """Fewer than 2^m programs are shorter than m bits, so some word of a
    language of size `count` needs at least log2(count) - 1 bits."""

    return math.log2(count) - 1


def entropy_kind(spec: ShiftSpec) -> str:
    """"exact" when locally admissible patterns all extend, "upper" otherwise."""

    return "exact" if spec.zero_fill_safe else "upper"


def entropy_from_count(
        spec: ShiftSpec,
        count: int,
        cells: int,
        n: int
        ) -> float:
    """log2(count) / cells, refusing an empty language on F_n.

    Raises:
        ConstraintViolationError: If count is zero.
    """

    if count == 0:
        raise ConstraintViolationError(f"{spec.name} has no admissible pattern on F_{n}")
    return math.log2(count) / cells


def entropy_estimate(
        spec: ShiftSpec,
        T: Monotiling,
        n: int,
        budgets: Budgets | None = None
        ) -> float:
    """log2 |language(F_n)| / |F_n| in bits per cell.

    Raises:
        EnumerationBudgetExceededError: If the language cannot be counted.
        ConstraintViolationError: If the language on F_n is empty.
    """

    return entropy_from_count(spec, count_language(spec, T.tile(n), budgets), T.tile_size(n), n)


@dataclass(frozen=True)
class ComplexityReport:
    """The best program found for one configuration on F_n.

    Attributes:
        spec (str): Name of the shift.
        configuration (str): Description of ω.
        n (int): Large tile index.
        cells (int): |F_n|.
        best_k (int): The small tile index of the shortest program.
        program_length (int): Its length in bits.
        mean_complexity (float): program_length / cells.
        entropy (float | None): The entropy estimate at n, when computed.
        lengths (dict[int, int]): Program length for every k tried.
    """

    spec: str
    configuration: str
    n: int
    cells: int
    best_k: int
    program_length: int
    mean_complexity: float
    entropy: float | None = None
    lengths: dict[int, int] = field(default_factory=dict)


def mean_complexity(
        omega: Configuration,
        spec: ShiftSpec,
        T: Monotiling,
        n: int,
        k_sweep: Iterable[int],
        mode: str = "occurring",
        budgets: Budgets | None = None,
        with_entropy: bool = False
        ) -> ComplexityReport:
    """The shortest program over the k-sweep, per cell of F_n.

    Ties go to the smallest k.
    """

    k_sweep = sorted(set(k_sweep))
    if not k_sweep:
        raise ValidationError("k_sweep: must be nonempty")
    lengths = {k: len(compress(omega, spec, T, k, n, mode, budgets)) for k in k_sweep}
    best_k = min(k_sweep, key=lambda k: (lengths[k], k))
    cells = T.tile_size(n)
    return ComplexityReport(
        spec=spec.name,
        configuration=omega.description,
        n=n,
        cells=cells,
        best_k=best_k,
        program_length=lengths[best_k],
        mean_complexity=lengths[best_k] / cells,
        entropy=entropy_estimate(spec, T, n, budgets) if with_entropy else None,
        lengths=lengths
    )


def _sample_configurations(
        spec: ShiftSpec,
        window: Sequence[GroupElement],
        sampler: SamplerConfig
        ) -> list[Configuration]:
    draws = 1 if sampler.kind in ("constant", "periodic") else sampler.samples
    return [
        sample_configuration(
            spec,
            sampler.kind,
            window=window,
            seed=sampler.seed + j,
            period=sampler.period,
            letter=sampler.letter
        )
        for j in range(draws)
    ]


def brudno_sweep(
        spec: ShiftSpec,
        T: Monotiling,
        n_list: Iterable[int],
        k_sweep: Iterable[int],
        sampler: SamplerConfig | None = None,
        mode: str = "occurring",
        budgets: Budgets | None = None,
        progress: bool = False
        ) -> ReportFrame:
    """Tabulates entropy against the worst mean complexity for each n.

    For each n the language on F_n is counted. When it holds at most
    `exhaustive_words` patterns the complexity column is the exact maximum
    over all of them; otherwise it is the maximum over sampled
    configurations, a lower estimate of that maximum.

    Args:
        spec (ShiftSpec): The shift.
        T (Monotiling): The tiling.
        n_list (Iterable[int]): Large tile indices, one row each, in order.
        k_sweep (Iterable[int]): Candidate small tile indices.
        sampler (SamplerConfig | None, optional): Used when the language is
            too large to list. Defaults to uniform sampling on full shifts and
            greedy sampling otherwise.
        mode (str, optional): Dictionary mode. Defaults to "occurring".
        budgets (Budgets | None, optional): Search caps.
        progress (bool, optional): Show a progress bar on stderr.

    Returns:
        ReportFrame: Columns n, cells, count, entropy_bits, best_k,
            max_mean_complexity_bits and gap, plus the labels statistic,
            entropy_kind, seed and samples.

    Raises:
        ConstraintViolationError: If uniform sampling is asked of a shift with
            forbidden patterns, or a language is empty.
    """

    if sampler is None:
        sampler = SamplerConfig(kind="uniform-random" if spec.is_full_shift else "greedy-admissible")
    if sampler.kind == "uniform-random" and not spec.is_full_shift:
        raise ConstraintViolationError(f"{spec.name}: uniform-random samples ignore the forbidden patterns; use greedy-admissible")
    if budgets is None:
        budgets = T.budgets
    k_sweep = tuple(k_sweep)
    kind = entropy_kind(spec)

    rows = []
    console = Console(stderr=True)
    for n in track(list(n_list), description="Sweeping tiles...", console=console, disable=not progress):
        window = T.tile(n)
        cells = len(window)
        count = count_language(spec, window, budgets)
        entropy = entropy_from_count(spec, count, cells, n)

        if count <= budgets.exhaustive_words:
            statistic = "exhaustive"
            configurations = (
                Configuration.from_pattern(T.group, p) for p in language(spec, window, budgets)
            )
        else:
            statistic = "sampled"
            configurations = _sample_configurations(spec, window, sampler)

        worst = None
        for omega in configurations:
            report = mean_complexity(omega, spec, T, n, k_sweep, mode, budgets)
            if worst is None or report.program_length > worst.program_length:
                worst = report

        logger.info(
            "n=%d cells=%d count=%d %s entropy=%.6f %s complexity=%.6f (k=%d)",
            n, cells, count, kind, entropy, statistic, worst.mean_complexity, worst.best_k
        )
        rows.append({
            "n": n,
            "cells": cells,
            "count": count,
            "entropy_bits": entropy,
            "best_k": worst.best_k,
            "max_mean_complexity_bits": worst.mean_complexity,
            "gap": worst.mean_complexity - entropy,
            "statistic": statistic,
            "entropy_kind": kind,
            "seed": sampler.seed if statistic == "sampled" else None,
            "samples": sampler.samples if statistic == "sampled" else None,
        })

    return ReportFrame.from_rows(rows)
