"""Computable spaces: indexings, finite indexed sets and computable set sequences.

An indexing is an injective map of a set into the naturals whose image is
decidable. Finite subsets are handled through their sorted index sequences;
the canonical index (the sum of 2**x over the members) names such a set with a
single number and is kept for testing and for the formal definitions only,
since it overflows quickly.

Sequences of sets come in two strengths: a `ComputableSequence` only decides
membership (n, x) -> bool, while a `CanonicalSequence` can also list the
members of its n-th set. The second implies the first but not conversely, so
both capabilities are explicit in the types.
"""

from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Generic, Hashable, Iterable, Iterator, TypeVar

from src.config import Budgets
from src.exceptions import *

T = TypeVar("T", bound=Hashable)


@dataclass(frozen=True)
class Indexing(Generic[T]):
    """An injective map Element -> N with a decidable image.

    Attributes:
        forward (Callable[[T], int]): The index of an element.
        backward (Callable[[int], T]): The element with a given index; only
            defined on the image.
        in_image (Callable[[int], bool]): Decides membership in the image.
    """

    forward: Callable[[T], int]
    backward: Callable[[int], T]
    in_image: Callable[[int], bool]

    def __call__(self, x: T) -> int:
        return self.forward(x)

    def element_at(self, index: int) -> T:
        """Returns the element with the given index.

        Raises:
            ValueError: If `index` is not in the image.
        """

        if not self.in_image(index):
            raise ValueError(f"{index} is not the index of any element")
        return self.backward(index)

    def enumerate(self, start: int = 0) -> Iterator[T]:
        """Yields the elements in ascending index order, from `start` on."""

        index = start
        while True:
            if self.in_image(index):
                yield self.backward(index)
            index += 1


class FiniteIndexedSet:
    """A finite set of naturals stored as a strictly increasing tuple.

    Supports the Boolean operations, membership, iteration in ascending order
    and conversion to and from the canonical index.

    Attributes:
        indices (tuple[int, ...]): The members, strictly increasing.
    """

    __slots__ = ("indices",)

    def __init__(self, indices: Iterable[int] = ()) -> None:
        members = sorted(set(indices))
        if members and members[0] < 0:
            raise ValueError(f"indices must be natural numbers, got {members[0]}")
        self.indices: tuple[int, ...] = tuple(members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, int):
            return False
        i = bisect_left(self.indices, x)
        return i < len(self.indices) and self.indices[i] == x

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FiniteIndexedSet):
            return self.indices == other.indices
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.indices)

    def __repr__(self) -> str:
        return f"FiniteIndexedSet({list(self.indices)})"

    def union(self, other: "FiniteIndexedSet") -> "FiniteIndexedSet":
        return FiniteIndexedSet(set(self.indices) | set(other.indices))

    def intersection(self, other: "FiniteIndexedSet") -> "FiniteIndexedSet":
        return FiniteIndexedSet(set(self.indices) & set(other.indices))

    def difference(self, other: "FiniteIndexedSet") -> "FiniteIndexedSet":
        return FiniteIndexedSet(set(self.indices) - set(other.indices))

    def first(self) -> int:
        """The smallest member.

        Raises:
            ValueError: If the set is empty.
        """

        if not self.indices:
            raise ValueError("empty set has no first element")
        return self.indices[0]


def canonical_index(
        A: FiniteIndexedSet | Iterable[int],
        budgets: Budgets | None = None
        ) -> int:
    """Returns the canonical index of a finite set of naturals, sum of 2**x.

    Args:
        A (FiniteIndexedSet | Iterable[int]): The set.
        budgets (Budgets | None, optional): Supplies `canonical_index_bits`,
            the bit width the result must fit in. Defaults to `Budgets()`.

    Returns:
        int: The canonical index; 0 for the empty set.

    Raises:
        CanonicalIndexOverflowError: If a member is at or above the width.
    """

    if budgets is None:
        budgets = Budgets()
    if not isinstance(A, FiniteIndexedSet):
        A = FiniteIndexedSet(A)
    total = 0
    for x in A:
        if x >= budgets.canonical_index_bits:
            raise CanonicalIndexOverflowError(
                f"member {x} does not fit a {budgets.canonical_index_bits}-bit canonical index"
            )
        total |= 1 << x
    return total


def from_canonical_index(c: int) -> FiniteIndexedSet:
    """Returns the finite set whose canonical index is c (its bit positions)."""

    if c < 0:
        raise ValueError(f"canonical indices are nonnegative, got {c}")
    members = []
    position = 0
    while c:
        if c & 1:
            members.append(position)
        c >>= 1
        position += 1
    return FiniteIndexedSet(members)


def increasing_bijection(A: FiniteIndexedSet | Iterable[int]) -> dict[int, int]:
    """The order-preserving bijection of A onto {1, ..., |A|}.

    Words on a finite subset are linearised through this map.
    """

    if not isinstance(A, FiniteIndexedSet):
        A = FiniteIndexedSet(A)
    return {x: position for position, x in enumerate(A, start=1)}


class ComputableSequence(Generic[T]):
    """A sequence of sets (S_n) given by a decidable predicate (n, x) -> bool.

    Nothing about the size of S_n can be inferred from the predicate alone.
    """

    def __init__(self, contains: Callable[[int, T], bool]) -> None:
        self._contains = contains

    def contains(self, n: int, x: T) -> bool:
        return self._contains(n, x)

    def __call__(self, n: int, x: T) -> bool:
        return self._contains(n, x)


class CanonicalSequence(ComputableSequence[T]):
    """A sequence of finite sets whose n-th member list can be printed.

    Attributes:
        members (Callable[[int], tuple[T, ...]]): n -> the members of S_n.
    """

    def __init__(
            self,
            members: Callable[[int], Iterable[T]],
            contains: Callable[[int, T], bool] | None = None
            ) -> None:
        self._members = members
        if contains is None:
            contains = lambda n, x: x in set(self._members(n))
        super().__init__(contains)

    def members(self, n: int) -> tuple[T, ...]:
        return tuple(self._members(n))

    def union(self, other: "CanonicalSequence[T]") -> "CanonicalSequence[T]":
        return CanonicalSequence(
            lambda n: _ordered_union(self.members(n), other.members(n)),
            lambda n, x: self.contains(n, x) or other.contains(n, x)
        )

    def difference(self, other: ComputableSequence[T]) -> "CanonicalSequence[T]":
        return CanonicalSequence(
            lambda n: tuple(x for x in self.members(n) if not other.contains(n, x)),
            lambda n, x: self.contains(n, x) and not other.contains(n, x)
        )

    def intersect(self, other: ComputableSequence[T]) -> "CanonicalSequence[T]":
        """Canonical ∩ computable is canonical: filter the listed members."""

        return CanonicalSequence(
            lambda n: tuple(x for x in self.members(n) if other.contains(n, x)),
            lambda n, x: self.contains(n, x) and other.contains(n, x)
        )


def _ordered_union(first: Iterable[T], second: Iterable[T]) -> tuple[T, ...]:
    seen = dict.fromkeys(first)
    seen.update(dict.fromkeys(second))
    return tuple(seen)
