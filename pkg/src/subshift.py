"""Subshifts of finite type over computable groups.

A shift is given by an alphabet {1, ..., k} and finitely many forbidden
patterns. A configuration ω avoids a forbidden pattern P with support S when
no right translate S·g carries it, i.e. there is no g with ω(s·g) = P(s) for
all s in S. This matches the action (g·ω)(x) = ω(x·g): ω avoids P exactly
when no translate g·ω restricts to P on S.

Languages are computed by local admissibility: a pattern on F is kept when no
forbidden instance lying entirely inside F is matched. For specs flagged
`zero_fill_safe` every such pattern extends to a configuration of the shift
by filling with letter 1, so the counts are exact; for other specs they are
upper estimates.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import total_ordering
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from src.compgroup import ComputableGroup, GroupElement, group_by_name
from src.compspace import FiniteIndexedSet
from src.config import Budgets
from src.exceptions import *

logger = logging.getLogger(__name__)

FILL_LETTER = 1
# a periodic sample with no window is checked on the first 64·p cells
PERIODIC_CHECK_CELLS = 64


@total_ordering
@dataclass(frozen=True, eq=True)
class Pattern:
    """A finite partial configuration.

    Attributes:
        cells (tuple[GroupElement, ...]): The support, sorted by index.
        letters (tuple[int, ...]): letters[i] is the letter on cells[i].
    """

    cells: tuple[GroupElement, ...]
    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.cells) != len(self.letters):
            raise ValueError(f"{len(self.cells)} cells but {len(self.letters)} letters")

    def __lt__(self, other: "Pattern") -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return (self.letters, self.cells) < (other.letters, other.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __getitem__(self, cell: GroupElement) -> int:
        return self.as_dict()[cell]

    @classmethod
    def from_mapping(
            cls,
            G: ComputableGroup,
            mapping: Mapping[GroupElement, int]
            ) -> "Pattern":
        cells = G.sort(mapping)
        return cls(cells, tuple(mapping[c] for c in cells))

    def as_dict(self) -> dict[GroupElement, int]:
        return dict(zip(self.cells, self.letters))

    def support(self, G: ComputableGroup) -> FiniteIndexedSet:
        return G.index_set(self.cells)

    def restrict(self, cells: Iterable[GroupElement]) -> "Pattern":
        """The restriction to a subset of the support, kept in index order.

        Raises:
            ValueError: If a cell is outside the support.
        """

        wanted = set(cells)
        missing = wanted.difference(self.cells)
        if missing:
            raise ValueError(f"cells {sorted(missing)} are outside the support")
        kept = [(c, a) for c, a in zip(self.cells, self.letters) if c in wanted]
        return Pattern(tuple(c for c, _ in kept), tuple(a for _, a in kept))

    def word(self) -> str:
        """The letters as a compact string, e.g. "1212"."""

        return "".join(str(a) if a < 10 else f"[{a}]" for a in self.letters)


@dataclass(frozen=True)
class ShiftSpec:
    """A subshift of finite type.

    Attributes:
        group_name (str): Name of the group ("Z", "Z2", "Z3" or "H3").
        alphabet (int): Alphabet size k; letters are 1..k.
        forbidden (tuple[Pattern, ...]): The forbidden patterns.
        zero_fill_safe (bool): Declares that every locally admissible pattern
            extends to a configuration by filling with letter 1.
        name (str): A label for reports.
    """

    group_name: str
    alphabet: int
    forbidden: tuple[Pattern, ...] = ()
    zero_fill_safe: bool = False
    name: str = "shift"

    def __post_init__(self) -> None:
        validate_shift_spec(self)

    @property
    def group(self) -> ComputableGroup:
        return group_by_name(self.group_name)

    @property
    def is_full_shift(self) -> bool:
        return len(self.forbidden) == 0

    def is_nearest_neighbor(self) -> bool:
        """Whether the shift lives on Z and forbids only pairs of adjacent cells."""

        if self.group_name != "Z":
            return False
        for P in self.forbidden:
            if len(P.cells) != 2 or _adjacent_gap(P) != 1:
                return False
        return True

    def as_dict(self) -> dict[str, Any]:
        return {
            "group": self.group_name,
            "alphabet": self.alphabet,
            "zero_fill_safe": self.zero_fill_safe,
            "forbidden": [
                {"support": [list(c) for c in P.cells], "letters": list(P.letters)}
                for P in self.forbidden
            ],
        }


def _adjacent_gap(P: Pattern) -> int:
    (a,), (b,) = sorted(P.cells)
    return b - a


def validate_shift_spec(spec: ShiftSpec) -> None:
    """Checks alphabet, supports and letters of a spec.

    Raises:
        SpecValidationError: Naming the first offending field.
    """

    try:
        G = group_by_name(spec.group_name)
    except ValidationError as e:
        raise SpecValidationError(str(e)) from None
    if not isinstance(spec.alphabet, int) or isinstance(spec.alphabet, bool) or spec.alphabet < 1:
        raise SpecValidationError(f"alphabet: must be a positive integer, got {spec.alphabet!r}")
    for i, P in enumerate(spec.forbidden):
        where = f"forbidden[{i}]"
        if len(P.cells) == 0:
            raise SpecValidationError(f"{where}.support: must be nonempty")
        if len(set(P.cells)) != len(P.cells):
            raise SpecValidationError(f"{where}.support: repeated cell")
        for cell in P.cells:
            if not G.is_element(cell):
                raise SpecValidationError(f"{where}.support: {list(cell)} is not an element of {G.name}")
        for a in P.letters:
            if not isinstance(a, int) or not 1 <= a <= spec.alphabet:
                raise SpecValidationError(f"{where}.letters: {a!r} outside 1..{spec.alphabet}")


def parse_shift_spec(
        raw: dict[str, Any],
        name: str = "shift"
        ) -> ShiftSpec:
    """Builds a `ShiftSpec` from its decoded JSON form.

    Example:
        {"group": "Z", "alphabet": 2, "zero_fill_safe": true,
         "forbidden": [{"support": [[0], [1]], "letters": [2, 2]}]}

    Raises:
        SpecValidationError: On missing, unknown or invalid fields.
    """

    if not isinstance(raw, dict):
        raise SpecValidationError("spec: top level must be a JSON object")
    for key in raw:
        if key not in ("group", "alphabet", "zero_fill_safe", "forbidden", "name"):
            raise SpecValidationError(f"{key}: unknown spec field")
    for key in ("group", "alphabet"):
        if key not in raw:
            raise SpecValidationError(f"{key}: required")
    if not isinstance(raw["group"], str):
        raise SpecValidationError("group: must be a string")

    try:
        G = group_by_name(raw["group"])
    except ValidationError as e:
        raise SpecValidationError(str(e)) from None

    forbidden_raw = raw.get("forbidden", [])
    if not isinstance(forbidden_raw, list):
        raise SpecValidationError("forbidden: must be a list")
    forbidden = []
    for i, item in enumerate(forbidden_raw):
        where = f"forbidden[{i}]"
        if not isinstance(item, dict) or set(item) != {"support", "letters"}:
            raise SpecValidationError(f"{where}: must be an object with 'support' and 'letters'")
        support, letters = item["support"], item["letters"]
        if not isinstance(support, list) or not isinstance(letters, list):
            raise SpecValidationError(f"{where}: 'support' and 'letters' must be lists")
        if len(support) != len(letters):
            raise SpecValidationError(f"{where}.letters: expected {len(support)} letters, got {len(letters)}")
        cells = []
        for cell in support:
            if not isinstance(cell, list) or len(cell) != G.arity or not all(isinstance(c, int) for c in cell):
                raise SpecValidationError(f"{where}.support: {cell!r} is not a {G.arity}-coordinate cell")
            cells.append(tuple(cell))
        if len(set(cells)) != len(cells):
            raise SpecValidationError(f"{where}.support: repeated cell")
        forbidden.append(Pattern.from_mapping(G, dict(zip(cells, letters))))

    zero_fill_safe = raw.get("zero_fill_safe", False)
    if not isinstance(zero_fill_safe, bool):
        raise SpecValidationError("zero_fill_safe: must be true or false")

    return ShiftSpec(
        group_name=raw["group"],
        alphabet=raw["alphabet"],
        forbidden=tuple(forbidden),
        zero_fill_safe=zero_fill_safe,
        name=raw.get("name", name)
    )


def load_shift_spec(path: str | Path) -> ShiftSpec:
    """Reads a shift spec file.

    Raises:
        SpecValidationError: If the file is unreadable, not JSON, or invalid.
    """

    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SpecValidationError(f"spec: cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise SpecValidationError(f"spec: {path} is not valid JSON ({e.msg} at line {e.lineno})") from None
    return parse_shift_spec(raw, name=path.stem)


class Configuration:
    """A total map from the group to letters, described finitely.

    Attributes:
        group (ComputableGroup): The group.
        rule (Callable[[GroupElement], int]): The letter at each element.
        description (str): How the configuration was built, for reports.
    """

    def __init__(
            self,
            group: ComputableGroup,
            rule: Callable[[GroupElement], int],
            description: str = "explicit"
            ) -> None:
        self.group: ComputableGroup = group
        self.rule: Callable[[GroupElement], int] = rule
        self.description: str = description

    def __call__(self, x: GroupElement) -> int:
        return self.rule(x)

    def __repr__(self) -> str:
        return f"Configuration({self.group.name}, {self.description})"

    def restrict(self, cells: Iterable[GroupElement]) -> Pattern:
        """ω restricted to a finite set, as a pattern in index order."""

        cells = self.group.sort(cells)
        return Pattern(cells, tuple(self.rule(c) for c in cells))

    @classmethod
    def constant(cls, group: ComputableGroup, letter: int = FILL_LETTER) -> "Configuration":
        return cls(group, lambda x: letter, f"constant({letter})")

    @classmethod
    def periodic(
            cls,
            group: ComputableGroup,
            period: int,
            alphabet: int
            ) -> "Configuration":
        """ω(x) = 1 + ((x_1 + ... + x_d) mod p) mod k."""

        if period < 1:
            raise ValueError(f"period must be positive, got {period}")
        return cls(group, lambda x: 1 + (sum(x) % period) % alphabet, f"periodic({period})")

    @classmethod
    def explicit(
            cls,
            group: ComputableGroup,
            mapping: Mapping[GroupElement, int],
            default: int = FILL_LETTER,
            description: str = "explicit"
            ) -> "Configuration":
        """Letters given on a finite window, `default` elsewhere."""

        mapping = dict(mapping)
        return cls(group, lambda x: mapping.get(x, default), description)

    @classmethod
    def from_pattern(
            cls,
            group: ComputableGroup,
            pattern: Pattern,
            default: int = FILL_LETTER
            ) -> "Configuration":
        return cls.explicit(group, pattern.as_dict(), default, description="pattern")


def act(
        g: GroupElement,
        omega: Configuration
        ) -> Configuration:
    """The shift action: (g·ω)(x) = ω(x·g)."""

    G = omega.group
    return Configuration(G, lambda x: omega(G.multiply(x, g)), f"{g}·{omega.description}")


def forbidden_instances(
        spec: ShiftSpec,
        cells: Sequence[GroupElement]
        ) -> list[tuple[tuple[int, int], ...]]:
    """Every forbidden instance whose translated support lies inside `cells`.

    An instance of P with support S at g covers S·g; all candidate g are of the
    form s₀⁻¹·f with s₀ the first cell of S and f in `cells`.

    Returns:
        list: Each instance as ((position in `cells`, required letter), ...),
            positions ascending.
    """

    G = spec.group
    position = {c: i for i, c in enumerate(cells)}
    instances = set()
    for P in spec.forbidden:
        s0_inv = G.inverse(P.cells[0])
        for f in cells:
            g = G.multiply(s0_inv, f)
            placed = []
            for s, a in zip(P.cells, P.letters):
                p = position.get(G.multiply(s, g))
                if p is None:
                    break
                placed.append((p, a))
            else:
                instances.add(tuple(sorted(placed)))
    return sorted(instances)


def is_locally_admissible(
        spec: ShiftSpec,
        pattern: Pattern
        ) -> bool:
    """Whether no forbidden instance inside the support is matched."""

    letters = pattern.letters
    for instance in forbidden_instances(spec, pattern.cells):
        if all(letters[p] == a for p, a in instance):
            return False
    return True


class _Backtracker:
    """Depth-first assignment of letters to cells in index order.

    An instance is checked at the position of its last cell, so every
    partial assignment that survives is locally admissible on its prefix.
    """

    def __init__(
            self,
            spec: ShiftSpec,
            cells: Sequence[GroupElement],
            budgets: Budgets
            ) -> None:
        self.spec = spec
        self.cells = tuple(cells)
        self.budgets = budgets
        self.closing: list[list[tuple[tuple[int, int], ...]]] = [[] for _ in self.cells]
        for instance in forbidden_instances(spec, self.cells):
            self.closing[instance[-1][0]].append(instance)
        self.nodes = 0

    def _visit(self) -> None:
        self.nodes += 1
        if self.nodes > self.budgets.enumeration_nodes:
            raise EnumerationBudgetExceededError(
                f"pattern search on {len(self.cells)} cells exceeded {self.budgets.enumeration_nodes} nodes"
            )

    def _ok(self, word: list[int], p: int) -> bool:
        for instance in self.closing[p]:
            if all(word[q] == a for q, a in instance):
                return False
        return True

    def words(self) -> Iterator[tuple[int, ...]]:
        m, k = len(self.cells), self.spec.alphabet
        if m == 0:
            yield ()
            return
        word = [0] * m
        stack = [(0, 1)]
        while stack:
            p, a = stack.pop()
            if a > k:
                continue
            stack.append((p, a + 1))
            self._visit()
            word[p] = a
            if not self._ok(word, p):
                continue
            if p == m - 1:
                yield tuple(word)
            else:
                stack.append((p + 1, 1))

    def count(self) -> int:
        return sum(1 for _ in self.words())


def language(
        spec: ShiftSpec,
        F: Iterable[GroupElement] | FiniteIndexedSet,
        budgets: Budgets | None = None
        ) -> list[Pattern]:
    """The locally admissible patterns on F, in lexicographic order.

    Args:
        spec (ShiftSpec): The shift.
        F (Iterable[GroupElement] | FiniteIndexedSet): The support, as group
            elements or as an index set.
        budgets (Budgets | None, optional): Supplies `enumeration_nodes`.

    Returns:
        list[Pattern]: The patterns.

    Raises:
        EnumerationBudgetExceededError: If the search tree is too large.
    """

    if budgets is None:
        budgets = Budgets()
    G = spec.group
    cells = G.elements_of(F) if isinstance(F, FiniteIndexedSet) else G.sort(F)
    search = _Backtracker(spec, cells, budgets)
    return [Pattern(cells, word) for word in search.words()]


def transfer_matrix(spec: ShiftSpec) -> np.ndarray:
    """The k x k 0/1 matrix of allowed adjacent letter pairs.

    Raises:
        SpecNotNearestNeighborError: If the spec is not a nearest-neighbour
            shift over Z.
    """

    if not spec.is_nearest_neighbor():
        raise SpecNotNearestNeighborError(f"{spec.name}: forbidden supports must be adjacent pairs over Z")
    k = spec.alphabet
    A = np.ones((k, k), dtype=object)
    for P in spec.forbidden:
        left, right = P.letters if P.cells[0][0] < P.cells[1][0] else P.letters[::-1]
        A[left - 1, right - 1] = 0
    return A


def count_language_1d(
        spec: ShiftSpec,
        n: int
        ) -> int:
    """Number of locally admissible words of length n, by the transfer matrix.

    Counts are exact integers (object dtype).

    Raises:
        SpecNotNearestNeighborError: If the spec is not nearest-neighbour.
    """

    A = transfer_matrix(spec)
    if n < 0:
        raise ValueError(f"length must be nonnegative, got {n}")
    if n == 0:
        return 1
    v = np.ones(spec.alphabet, dtype=object)
    for _ in range(n - 1):
        v = v.dot(A)
    return int(v.sum())


def spectral_entropy(spec: ShiftSpec) -> float:
    """log2 of the Perron root of the transfer matrix: the exact entropy of a
    nearest-neighbour shift over Z."""

    A = transfer_matrix(spec).astype(float)
    radius = float(np.max(np.abs(np.linalg.eigvals(A))))
    if radius <= 0:
        return 0.0
    return math.log2(radius)


def _is_interval(cells: Sequence[GroupElement]) -> bool:
    xs = sorted(c[0] for c in cells)
    return xs[-1] - xs[0] == len(xs) - 1


def count_language(
        spec: ShiftSpec,
        F: Iterable[GroupElement],
        budgets: Budgets | None = None
        ) -> int:
    """|language(spec, F)|, by the cheapest exact method available.

    Full shifts give k^|F|, nearest-neighbour shifts over Z on an interval use
    the transfer matrix, anything else is counted by backtracking.

    Raises:
        EnumerationBudgetExceededError: If backtracking runs out of nodes.
    """

    if budgets is None:
        budgets = Budgets()
    cells = spec.group.sort(F)
    if not cells:
        return 1
    if spec.is_full_shift:
        return spec.alphabet ** len(cells)
    if spec.is_nearest_neighbor() and _is_interval(cells):
        return count_language_1d(spec, len(cells))
    return _Backtracker(spec, cells, budgets).count()


def _letter_is_constant_safe(spec: ShiftSpec, letter: int) -> bool:
    return not any(all(a == letter for a in P.letters) for P in spec.forbidden)


def greedy_admissible(
        spec: ShiftSpec,
        window: Sequence[GroupElement],
        seed: int = 0
        ) -> Configuration:
    """Fills `window` letter by letter with random admissible choices.

    Cells are visited in index order and each tries the letters in a random
    order; outside the window every cell carries letter 1. Every forbidden
    instance meeting the window is checked once all of its window cells are
    filled.

    Raises:
        ConstraintViolationError: If the spec is not fill-safe, or some cell
            admits no letter.
    """

    if not spec.zero_fill_safe:
        raise ConstraintViolationError(f"{spec.name}: greedy sampling needs a zero_fill_safe spec")
    G = spec.group
    window = G.sort(window)
    inside = set(window)
    rng = np.random.default_rng(seed)
    assigned: dict[GroupElement, int] = {}

    def letter_at(x: GroupElement) -> int | None:
        if x in assigned:
            return assigned[x]
        return None if x in inside else FILL_LETTER

    for x in window:
        touching = []
        for P in spec.forbidden:
            for s in P.cells:
                g = G.multiply(G.inverse(s), x)
                touching.append([(G.multiply(t, g), b) for t, b in zip(P.cells, P.letters)])
        for a in rng.permutation(spec.alphabet) + 1:
            a = int(a)
            assigned[x] = a
            if not any(all(letter_at(c) == b for c, b in instance) for instance in touching):
                break
        else:
            raise ConstraintViolationError(f"{spec.name}: no letter fits cell {x}")

    return Configuration.explicit(G, assigned, FILL_LETTER, description=f"greedy-admissible(seed={seed})")


def uniform_random(
        spec: ShiftSpec,
        window: Sequence[GroupElement],
        seed: int = 0
        ) -> Configuration:
    """Independent uniform letters on `window`, letter 1 elsewhere.

    Constraints are ignored, so only full-shift samples are admissible.
    """

    G = spec.group
    window = G.sort(window)
    rng = np.random.default_rng(seed)
    letters = rng.integers(1, spec.alphabet + 1, size=len(window))
    if not spec.is_full_shift:
        logger.debug("uniform-random sample ignores the %d forbidden patterns of %s", len(spec.forbidden), spec.name)
    return Configuration.explicit(
        G,
        {x: int(a) for x, a in zip(window, letters)},
        FILL_LETTER,
        description=f"uniform-random(seed={seed})"
    )


def sample_configuration(
        spec: ShiftSpec,
        kind: str,
        window: Sequence[GroupElement] = (),
        seed: int = 0,
        period: int = 2,
        letter: int = FILL_LETTER
        ) -> Configuration:
    """Draws a test configuration of the requested kind.

    Args:
        spec (ShiftSpec): The shift.
        kind (str): "constant", "periodic", "uniform-random" or
            "greedy-admissible".
        window (Sequence[GroupElement], optional): Cells filled by the random
            kinds and checked against the forbidden patterns.
        seed (int, optional): Seed of the random kinds. Defaults to 0.
        period (int, optional): Period of the periodic kind. Defaults to 2.
        letter (int, optional): Letter of the constant kind. Defaults to 1.

    Returns:
        Configuration: The configuration.

    Raises:
        ConstraintViolationError: If the constant letter is itself forbidden,
            greedy filling fails, or a periodic or uniform sample breaks a
            forbidden pattern inside the window.
        ValidationError: For an unknown kind.
    """

    G = spec.group
    if kind == "constant":
        if not 1 <= letter <= spec.alphabet:
            raise ConstraintViolationError(f"letter {letter} outside 1..{spec.alphabet}")
        if not _letter_is_constant_safe(spec, letter):
            raise ConstraintViolationError(f"{spec.name}: the constant configuration {letter} is forbidden")
        return Configuration.constant(G, letter)
    if kind == "greedy-admissible":
        return greedy_admissible(spec, window, seed)
    if kind == "periodic":
        omega = Configuration.periodic(G, period, spec.alphabet)
    elif kind == "uniform-random":
        omega = uniform_random(spec, window, seed)
    else:
        raise ValidationError(f"sampler.kind: unknown kind {kind!r}")
    cells = window if len(window) else G.first_k_elements(PERIODIC_CHECK_CELLS * period)
    if not spec.is_full_shift and not is_locally_admissible(spec, omega.restrict(cells)):
        raise ConstraintViolationError(f"{spec.name}: the {omega.description} sample breaks a forbidden pattern on the window")
    return omega
