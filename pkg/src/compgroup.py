"""Computable groups with admissible indexings.

Group elements are integer tuples: Z^d elements are d-tuples and elements of
the discrete Heisenberg group UT(3, Z) are triples (a, b, c) standing for the
unipotent matrix with a at (1,2), b at (2,3) and c at (1,3).

Indexing. Z uses n -> 2|n| + [n >= 0], whose image is {1, 2, 3, ...}. Z^d
applies that map coordinatewise, shifts each value down by one and folds the
coordinates from the right with the Cantor pairing N x N -> N; one is added
back at the end, so every built-in indexing is a bijection onto {1, 2, ...}
and the index of an element is also its rank. UT(3, Z) reuses the Z^3
indexing on (a, b, c). Every coordinate projection is computable from the
index through the unpairing.
"""

import itertools
from abc import ABC, abstractmethod
from functools import lru_cache
from math import isqrt
from typing import Iterable, Iterator

from src.compspace import FiniteIndexedSet, Indexing
from src.exceptions import *

GroupElement = tuple[int, ...]

GROUP_NAMES = ("Z", "Z2", "Z3", "H3")


def z_index(n: int) -> int:
    """The indexing of Z: n -> 2|n| + 1 if n >= 0, else 2|n|."""

    return 2 * abs(n) + (1 if n >= 0 else 0)


def z_from_index(i: int) -> int:
    """Inverse of `z_index` on {1, 2, ...}."""

    if i < 1:
        raise ValueError(f"{i} is not the index of an integer")
    if i % 2 == 1:
        return (i - 1) // 2
    return -(i // 2)


def pair(x: int, y: int) -> int:
    """The Cantor pairing bijection N x N -> N."""

    s = x + y
    return s * (s + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    """Inverse of `pair`."""

    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def lattice_index(x: GroupElement) -> int:
    """Index of an integer tuple under the folded coordinatewise indexing."""

    value = z_index(x[-1]) - 1
    for coordinate in reversed(x[:-1]):
        value = pair(z_index(coordinate) - 1, value)
    return value + 1


def lattice_element(index: int, d: int) -> GroupElement:
    """Inverse of `lattice_index` for d-tuples."""

    if index < 1:
        raise ValueError(f"{index} is not the index of a lattice point")
    value = index - 1
    coordinates = []
    for _ in range(d - 1):
        head, value = unpair(value)
        coordinates.append(z_from_index(head + 1))
    coordinates.append(z_from_index(value + 1))
    return tuple(coordinates)


def heisenberg_multiply(
        x: GroupElement,
        y: GroupElement
        ) -> GroupElement:
    """Product in UT(3, Z): (a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')."""

    a, b, c = x
    a2, b2, c2 = y
    return (a + a2, b + b2, c + c2 + a * b2)


class ComputableGroup(ABC):
    """A group together with an admissible indexing.

    Subclasses provide the group law and the indexing; this base class
    derives enumeration, first-k sets, index arithmetic and set helpers.

    Attributes:
        name (str): The name used in spec files and on the command line.
        arity (int): Length of the element tuples.
        identity (GroupElement): The neutral element.
    """

    name: str
    arity: int
    identity: GroupElement

    @abstractmethod
    def multiply(self, x: GroupElement, y: GroupElement) -> GroupElement:
        """Returns the product x·y."""

    @abstractmethod
    def inverse(self, g: GroupElement) -> GroupElement:
        """Returns g⁻¹, computed directly from the group law."""

    @abstractmethod
    def index(self, g: GroupElement) -> int:
        """Returns the index of g."""

    @abstractmethod
    def element_at(self, i: int) -> GroupElement:
        """Returns the element with index i (i must lie in the image)."""

    @abstractmethod
    def in_image(self, i: int) -> bool:
        """Decides whether i is the index of some element."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"

    @property
    def indexing(self) -> Indexing[GroupElement]:
        return Indexing(self.index, self.element_at, self.in_image)

    def is_element(self, g: object) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == self.arity
            and all(isinstance(c, int) and not isinstance(c, bool) for c in g)
        )

    def enumerate(self) -> Iterator[GroupElement]:
        """Yields all elements in ascending index order."""

        return self.indexing.enumerate()

    def first_k_elements(self, k: int) -> tuple[GroupElement, ...]:
        """The k elements with the smallest indices, ascending."""

        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        return tuple(itertools.islice(self.enumerate(), k))

    def rank(self, g: GroupElement) -> int:
        """Position of g in the index order, starting at 1."""

        target = self.index(g)
        return sum(1 for i in range(target + 1) if self.in_image(i))

    def multiply_indices(self, i: int, j: int) -> int:
        """The multiplication read on indices, witnessing admissibility."""

        return self.index(self.multiply(self.element_at(i), self.element_at(j)))

    def projection(self, g: GroupElement, coordinate: int) -> int:
        """The given coordinate of g."""

        return g[coordinate]

    def sort(self, elements: Iterable[GroupElement]) -> tuple[GroupElement, ...]:
        """Returns the distinct elements sorted by index."""

        return tuple(sorted(set(elements), key=self.index))

    def index_set(self, elements: Iterable[GroupElement]) -> FiniteIndexedSet:
        return FiniteIndexedSet(self.index(g) for g in elements)

    def elements_of(self, indices: FiniteIndexedSet) -> tuple[GroupElement, ...]:
        return tuple(self.element_at(i) for i in indices)

    def product_set(
            self,
            A: Iterable[GroupElement],
            B: Iterable[GroupElement]
            ) -> set[GroupElement]:
        """The set {a·b : a in A, b in B}."""

        B = tuple(B)
        return {self.multiply(a, b) for a in A for b in B}

    def right_translate(self, A: Iterable[GroupElement], g: GroupElement) -> set[GroupElement]:
        return {self.multiply(a, g) for a in A}

    def inverse_set(self, A: Iterable[GroupElement]) -> set[GroupElement]:
        return {self.inverse(a) for a in A}


class _ContiguousIndexing:
    """Mixin for indexings that are bijections onto {1, 2, ...}."""

    def in_image(self, i: int) -> bool:
        return i >= 1

    def rank(self, g: GroupElement) -> int:
        return self.index(g)


class IntegerLattice(_ContiguousIndexing, ComputableGroup):
    """The free abelian group Z^d with coordinatewise addition."""

    def __init__(self, d: int) -> None:
        if d < 1:
            raise ValueError(f"dimension must be positive, got {d}")
        self.arity = d
        self.name = "Z" if d == 1 else f"Z{d}"
        self.identity = (0,) * d

    def multiply(self, x: GroupElement, y: GroupElement) -> GroupElement:
        return tuple(a + b for a, b in zip(x, y))

    def inverse(self, g: GroupElement) -> GroupElement:
        return tuple(-a for a in g)

    def index(self, g: GroupElement) -> int:
        return lattice_index(g)

    def element_at(self, i: int) -> GroupElement:
        return lattice_element(i, self.arity)


class HeisenbergGroup(_ContiguousIndexing, ComputableGroup):
    """The discrete Heisenberg group UT(3, Z) on triples (a, b, c)."""

    def __init__(self) -> None:
        self.arity = 3
        self.name = "H3"
        self.identity = (0, 0, 0)

    def multiply(self, x: GroupElement, y: GroupElement) -> GroupElement:
        return heisenberg_multiply(x, y)

    def inverse(self, g: GroupElement) -> GroupElement:
        a, b, c = g
        return (-a, -b, a * b - c)

    def index(self, g: GroupElement) -> int:
        return lattice_index(g)

    def element_at(self, i: int) -> GroupElement:
        return lattice_element(i, 3)


@lru_cache(maxsize=None)
def group_by_name(name: str) -> ComputableGroup:
    """Returns the built-in group called `name` ("Z", "Z2", "Z3" or "H3").

    Raises:
        ValidationError: For any other name.
    """

    if name == "H3":
        return HeisenbergGroup()
    if name == "Z":
        return IntegerLattice(1)
    if name in ("Z2", "Z3"):
        return IntegerLattice(int(name[1:]))
    raise ValidationError(f"group: unknown group {name!r} (expected one of {', '.join(GROUP_NAMES)})")


def inverse(
        G: ComputableGroup,
        g: GroupElement
        ) -> GroupElement:
    """Returns g⁻¹ in G."""

    return G.inverse(g)


def inverse_by_search(
        G: ComputableGroup,
        g: GroupElement,
        cap: int = 1_000_000
        ) -> GroupElement:
    """Finds g⁻¹ by scanning indices until g·h is the identity.

    This is the algorithm behind computability of the inverse; it is only
    used to validate the direct inverses.

    Raises:
        SearchBudgetExceededError: If no inverse is found among the first
            `cap` indices.
    """

    for i in range(cap):
        if not G.in_image(i):
            continue
        h = G.element_at(i)
        if G.multiply(g, h) == G.identity:
            return h
    raise SearchBudgetExceededError(f"no inverse of {g} among the first {cap} indices of {G.name}")


def first_k_elements(
        G: ComputableGroup,
        k: int
        ) -> tuple[GroupElement, ...]:
    """The k elements of G with the smallest indices, ascending."""

    return G.first_k_elements(k)
