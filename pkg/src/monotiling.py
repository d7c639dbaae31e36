"""Følner monotilings of computable groups.

A monotiling [F, Z] is a finite tile F and a set of centers Z such that the
right translates {F z : z in Z} partition the group. A Følner monotiling is a
sequence of them whose tiles form a Følner sequence; it is normal when every
tile contains the identity and |F_n| / log n grows without bound.

This module holds the K-boundary / K-interior calculus, the tile providers
(boxes in Z^d, boxes in UT(3, Z), normalised subsequences of any tiling), the
enumeration-based center decision, the invariance-index search and the density
and finite-window diagnostics.

Complements are never materialised: the K-interior of F is
{g in K⁻¹F : Kg ⊆ F} and the K-boundary is K⁻¹F minus that set.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from src.compgroup import ComputableGroup, GroupElement, HeisenbergGroup, IntegerLattice, group_by_name
from src.compspace import FiniteIndexedSet
from src.config import Budgets
from src.exceptions import *

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundaryReport:
    """The K-boundary and K-interior of a finite set F.

    Attributes:
        boundary (tuple[GroupElement, ...]): K⁻¹F ∩ K⁻¹Fᶜ, sorted by index.
        interior (tuple[GroupElement, ...]): {g : Kg ⊆ F}, sorted by index.
            When e ∈ K this is F minus the boundary.
        ratio (Fraction): |boundary| / |F|.
        boundary_indices (FiniteIndexedSet): Indices of the boundary.
        interior_indices (FiniteIndexedSet): Indices of the interior.
    """

    boundary: tuple[GroupElement, ...]
    interior: tuple[GroupElement, ...]
    ratio: Fraction
    boundary_indices: FiniteIndexedSet
    interior_indices: FiniteIndexedSet


def k_boundary(
        K: Iterable[GroupElement],
        F: Iterable[GroupElement],
        G: ComputableGroup
        ) -> BoundaryReport:
    """Computes the K-boundary and K-interior of F.

    Every g with Kg ⊆ F lies in K⁻¹F (K is nonempty), so the interior is found
    among the finitely many candidates of K⁻¹F and the boundary is the rest of
    K⁻¹F.

    Args:
        K (Iterable[GroupElement]): A finite nonempty set.
        F (Iterable[GroupElement]): A finite nonempty set.
        G (ComputableGroup): The ambient group.

    Returns:
        BoundaryReport: The boundary, the interior and |boundary| / |F|.

    Raises:
        ValueError: If K or F is empty.
    """

    K = tuple(set(K))
    F_set = frozenset(F)
    if not K:
        raise ValueError("K must be nonempty")
    if not F_set:
        raise ValueError("F must be nonempty")

    candidates = G.product_set(G.inverse_set(K), F_set)
    interior = [g for g in candidates if all(G.multiply(k, g) in F_set for k in K)]
    interior_set = set(interior)
    boundary = [g for g in candidates if g not in interior_set]

    boundary = G.sort(boundary)
    interior = G.sort(interior)
    return BoundaryReport(
        boundary=boundary,
        interior=interior,
        ratio=Fraction(len(boundary), len(F_set)),
        boundary_indices=G.index_set(boundary),
        interior_indices=G.index_set(interior)
    )


def k_interior_within(
        K: Sequence[GroupElement],
        F: frozenset[GroupElement],
        G: ComputableGroup
        ) -> tuple[GroupElement, ...]:
    """{g ∈ F : Kg ⊆ F}, which equals Int_K F whenever e ∈ K."""

    return G.sort(g for g in F if all(G.multiply(k, g) in F for k in K))


class Monotiling(ABC):
    """A sequence of monotilings [F_n, Z_n], n = 1, 2, ...

    Subclasses provide the tiles and the center decision; the base class
    caches tiles and derives sizes, membership, the Følner quantities and a
    generic decomposition g = f·z driven by the center enumerator.

    Attributes:
        group (ComputableGroup): The tiled group.
        budgets (Budgets): Search caps for the generic algorithms.
    """

    def __init__(
            self,
            group: ComputableGroup,
            budgets: Budgets | None = None
            ) -> None:
        self.group: ComputableGroup = group
        self.budgets: Budgets = budgets if budgets is not None else Budgets()
        self._tiles: dict[int, tuple[GroupElement, ...]] = {}
        self._tile_sets: dict[int, frozenset[GroupElement]] = {}

    @abstractmethod
    def _build_tile(self, n: int) -> Iterable[GroupElement]:
        """Lists the members of F_n in any order."""

    @abstractmethod
    def center_contains(self, n: int, g: GroupElement) -> bool:
        """Decides g ∈ Z_n."""

    @abstractmethod
    def center_enumerate(self, n: int, i: int) -> GroupElement:
        """The i-th center of Z_n (i >= 1); every center appears."""

    @property
    def normal(self) -> bool:
        """Whether every tile is declared to contain the identity."""

        return True

    def tile(self, n: int) -> tuple[GroupElement, ...]:
        """F_n sorted by index."""

        if n < 1:
            raise ValueError(f"tile indices start at 1, got {n}")
        if n not in self._tiles:
            self._tiles[n] = self.group.sort(self._build_tile(n))
        return self._tiles[n]

    def tile_set(self, n: int) -> frozenset[GroupElement]:
        if n not in self._tile_sets:
            self._tile_sets[n] = frozenset(self.tile(n))
        return self._tile_sets[n]

    def tile_size(self, n: int) -> int:
        return len(self.tile(n))

    def tile_contains(self, n: int, g: GroupElement) -> bool:
        return g in self.tile_set(n)

    def locate(self, n: int, g: GroupElement) -> tuple[GroupElement, GroupElement]:
        """Writes g = f·z with f ∈ F_n and z ∈ Z_n.

        The generic version walks the center enumeration until g·z⁻¹ falls in
        the tile; it terminates because F_n Z_n is the whole group.

        Raises:
            SearchBudgetExceededError: If `center_search_cap` centers are tried
                without success.
        """

        G = self.group
        for i in range(1, self.budgets.center_search_cap + 1):
            z = self.center_enumerate(n, i)
            f = G.multiply(g, G.inverse(z))
            if self.tile_contains(n, f):
                return f, z
        raise SearchBudgetExceededError(
            f"no tile-translate of F_{n} containing {g} among {self.budgets.center_search_cap} centers"
        )

    def symmetric_difference_size(self, n: int, g: GroupElement) -> int:
        """|F_n Δ gF_n|, counted as 2(|F_n| - |F_n ∩ gF_n|)."""

        G = self.group
        overlap = sum(1 for f in self.tile(n) if self.tile_contains(n, G.multiply(g, f)))
        return 2 * (self.tile_size(n) - overlap)

    def slice(self, n: int) -> "TilingSlice":
        return TilingSlice(self, n)


@dataclass(frozen=True)
class TilingSlice:
    """The n-th monotiling [F_n, Z_n] of a sequence.

    Attributes:
        tiling (Monotiling): The sequence.
        n (int): The tile index.
    """

    tiling: Monotiling
    n: int

    @property
    def tile(self) -> tuple[GroupElement, ...]:
        return self.tiling.tile(self.n)

    def center_contains(self, g: GroupElement) -> bool:
        return self.tiling.center_contains(self.n, g)

    def center(self, i: int) -> GroupElement:
        return self.tiling.center_enumerate(self.n, i)

    def locate(self, g: GroupElement) -> tuple[GroupElement, GroupElement]:
        return self.tiling.locate(self.n, g)


class BoxMonotiling(Monotiling):
    """Boxes origin + [0, n)^d in Z^d with centers nZ^d.

    With the default origin 0 this is a normal Følner monotiling; any other
    origin gives a non-normal one, useful to exercise `normalize`.
    """

    def __init__(
            self,
            d: int,
            origin: GroupElement | None = None,
            budgets: Budgets | None = None
            ) -> None:
        group = group_by_name("Z" if d == 1 else f"Z{d}") if d <= 3 else IntegerLattice(d)
        super().__init__(group, budgets)
        self.d: int = d
        self.origin: GroupElement = tuple(origin) if origin is not None else (0,) * d
        if len(self.origin) != d:
            raise ValueError(f"origin must have {d} coordinates")

    @property
    def normal(self) -> bool:
        return all(c == 0 for c in self.origin)

    def _build_tile(self, n: int) -> Iterable[GroupElement]:
        cells = [()]
        for o in self.origin:
            cells = [cell + (o + x,) for cell in cells for x in range(n)]
        return cells

    def tile_size(self, n: int) -> int:
        return n ** self.d

    def tile_contains(self, n: int, g: GroupElement) -> bool:
        return all(0 <= x - o < n for x, o in zip(g, self.origin))

    def center_contains(self, n: int, g: GroupElement) -> bool:
        return all(x % n == 0 for x in g)

    def center_enumerate(self, n: int, i: int) -> GroupElement:
        return tuple(n * x for x in self.group.element_at(i))

    def locate(self, n: int, g: GroupElement) -> tuple[GroupElement, GroupElement]:
        f = tuple(o + (x - o) % n for x, o in zip(g, self.origin))
        z = tuple(x - y for x, y in zip(g, f))
        return f, z

    def symmetric_difference_size(self, n: int, g: GroupElement) -> int:
        overlap = 1
        for x in g:
            overlap *= max(0, n - abs(x))
        return 2 * (n ** self.d - overlap)


class HeisenbergMonotiling(Monotiling):
    """Boxes F_n = [0, n) x [0, n) x [0, n²) in UT(3, Z).

    Centers are Z_n = {(n a', n b', n² c')}. A point (x, y, w) decomposes as
    f·z with f = (a, b, c): a and b are the residues of x and y mod n, then
    the twist a·n·b' is removed from w before reducing mod n².
    """

    def __init__(self, budgets: Budgets | None = None) -> None:
        super().__init__(group_by_name("H3"), budgets)

    def _build_tile(self, n: int) -> Iterable[GroupElement]:
        return [(a, b, c) for a in range(n) for b in range(n) for c in range(n * n)]

    def tile_size(self, n: int) -> int:
        return n ** 4

    def tile_contains(self, n: int, g: GroupElement) -> bool:
        a, b, c = g
        return 0 <= a < n and 0 <= b < n and 0 <= c < n * n

    def center_contains(self, n: int, g: GroupElement) -> bool:
        a, b, c = g
        return a % n == 0 and b % n == 0 and c % (n * n) == 0

    def center_enumerate(self, n: int, i: int) -> GroupElement:
        a, b, c = self.group.element_at(i)
        return (n * a, n * b, n * n * c)

    def locate(self, n: int, g: GroupElement) -> tuple[GroupElement, GroupElement]:
        x, y, w = g
        a, a_shift = x % n, x // n
        b, b_shift = y % n, y // n
        rest = w - a * n * b_shift
        c, c_shift = rest % (n * n), rest // (n * n)
        return (a, b, c), (n * a_shift, n * b_shift, n * n * c_shift)


class NormalizedMonotiling(Monotiling):
    """The normal monotiling ([F_{n_i} r⁻¹, r Z_{n_i}])_i built from any
    computable Følner monotiling.

    r = r_{n_i} is the index-minimal member of F_{n_i}, so the identity lies in
    every new tile. The subsequence is n_i = the least n > n_{i-1} with
    |F_n| >= i·(floor(log2 n) + 1), which forces |F_{n_i}| / log n_i to grow.

    Attributes:
        base (Monotiling): The original tiling.
    """

    def __init__(
            self,
            base: Monotiling,
            budgets: Budgets | None = None
            ) -> None:
        super().__init__(base.group, budgets if budgets is not None else base.budgets)
        self.base: Monotiling = base
        self._subsequence: list[int] = []

    def subsequence(self, i: int) -> int:
        """n_i, computed lazily and cached.

        Raises:
            SearchBudgetExceededError: If no n <= `search_cap` qualifies.
        """

        while len(self._subsequence) < i:
            j = len(self._subsequence) + 1
            n = self._subsequence[-1] + 1 if self._subsequence else 1
            while self.base.tile_size(n) < j * n.bit_length():
                n += 1
                if n > self.budgets.search_cap:
                    raise SearchBudgetExceededError(
                        f"normalisation found no tile index <= {self.budgets.search_cap} for step {j}"
                    )
            self._subsequence.append(n)
        return self._subsequence[i - 1]

    def shift(self, i: int) -> GroupElement:
        """r_{n_i}: the member of F_{n_i} with the smallest index."""

        return self.base.tile(self.subsequence(i))[0]

    def _build_tile(self, i: int) -> Iterable[GroupElement]:
        G = self.group
        r_inv = G.inverse(self.shift(i))
        return [G.multiply(f, r_inv) for f in self.base.tile(self.subsequence(i))]

    def tile_size(self, i: int) -> int:
        return self.base.tile_size(self.subsequence(i))

    def tile_contains(self, i: int, g: GroupElement) -> bool:
        return self.base.tile_contains(self.subsequence(i), self.group.multiply(g, self.shift(i)))

    def center_contains(self, i: int, g: GroupElement) -> bool:
        G = self.group
        return self.base.center_contains(self.subsequence(i), G.multiply(G.inverse(self.shift(i)), g))

    def center_enumerate(self, i: int, j: int) -> GroupElement:
        return self.group.multiply(self.shift(i), self.base.center_enumerate(self.subsequence(i), j))

    def locate(self, i: int, g: GroupElement) -> tuple[GroupElement, GroupElement]:
        G = self.group
        r = self.shift(i)
        f, z = self.base.locate(self.subsequence(i), g)
        return G.multiply(f, G.inverse(r)), G.multiply(r, z)


def box_tiling(
        d: int,
        origin: GroupElement | None = None,
        budgets: Budgets | None = None
        ) -> BoxMonotiling:
    """The box monotiling of Z^d, optionally shifted to `origin`."""

    return BoxMonotiling(d, origin=origin, budgets=budgets)


def heisenberg_tiling(budgets: Budgets | None = None) -> HeisenbergMonotiling:
    """The box monotiling of UT(3, Z)."""

    return HeisenbergMonotiling(budgets)


def zd_monotiling(d: int, n: int) -> TilingSlice:
    """The monotiling [[0, n)^d, nZ^d] of Z^d."""

    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    return box_tiling(d).slice(n)


def h3_monotiling(n: int) -> TilingSlice:
    """The monotiling [[0,n)x[0,n)x[0,n²), {(na', nb', n²c')}] of UT(3, Z)."""

    if n < 1:
        raise ValueError("n must be positive")
    return heisenberg_tiling().slice(n)


def tiling_by_name(
        name: str,
        budgets: Budgets | None = None
        ) -> Monotiling:
    """The built-in monotiling of a named group ("Z", "Z2", "Z3", "H3")."""

    if name == "H3":
        return heisenberg_tiling(budgets)
    group = group_by_name(name)
    return box_tiling(group.arity, budgets=budgets)


def decide_center(
        T: Monotiling,
        n: int,
        g: GroupElement,
        budgets: Budgets | None = None
        ) -> bool:
    """Decides g ∈ Z_n from the center enumerator alone.

    For i = 1, 2, ... the products h·φ(n, i), h ∈ F_n, are compared with g;
    the answer is yes when the match has h = e and no otherwise. Since the
    translates cover the group, some i matches.

    Args:
        T (Monotiling): A tiling whose tile F_n contains the identity.
        n (int): The tile index.
        g (GroupElement): The element to test.
        budgets (Budgets | None, optional): Supplies `center_search_cap`.

    Returns:
        bool: Whether g is a center of F_n.

    Raises:
        TilingError: If e ∉ F_n.
        SearchBudgetExceededError: If no center matches within the cap.
    """

    if budgets is None:
        budgets = T.budgets
    G = T.group
    if not T.tile_contains(n, G.identity):
        raise TilingError(f"the identity is not in F_{n}; the center decision needs a normal tile")

    for i in range(1, budgets.center_search_cap + 1):
        z = T.center_enumerate(n, i)
        h = G.multiply(g, G.inverse(z))
        if T.tile_contains(n, h):
            return h == G.identity
    raise SearchBudgetExceededError(f"center decision for {g} in Z_{n} gave up after {budgets.center_search_cap} centers")


def normalize(
        T: Monotiling,
        budgets: Budgets | None = None
        ) -> NormalizedMonotiling:
    """Turns a computable Følner monotiling into a normal one."""

    return NormalizedMonotiling(T, budgets)


def folner_ratio(
        T: Monotiling,
        n: int,
        g: GroupElement
        ) -> Fraction:
    """|F_n Δ gF_n| / |F_n| for a left translate."""

    return Fraction(T.symmetric_difference_size(n, g), T.tile_size(n))


def weak_folner_ratio(
        T: Monotiling,
        n: int,
        K: Iterable[GroupElement]
        ) -> Fraction:
    """|F_n Δ KF_n| / |F_n|, the weak Følner quantity."""

    F = T.tile_set(n)
    KF = T.group.product_set(K, F)
    return Fraction(len(F ^ KF), len(F))


def invariance_index(
        T: Monotiling,
        i: int,
        budgets: Budgets | None = None,
        start: int = 1
        ) -> int:
    """The least n with |F_n Δ gF_n| / |F_n| < 1/(2i) for all g in K_i.

    K_i is the set of the first i elements of the group.

    Args:
        T (Monotiling): A tiling whose tiles form a Følner sequence.
        i (int): The invariance parameter, at least 1.
        budgets (Budgets | None, optional): Supplies `search_cap`.
        start (int, optional): First tile index tried. Defaults to 1.

    Returns:
        int: The tile index n_i.

    Raises:
        SearchBudgetExceededError: If no n <= `search_cap` qualifies, which
            points at a non-Følner or miscoded tile provider.
    """

    if i < 1:
        raise ValueError(f"i must be positive, got {i}")
    if budgets is None:
        budgets = T.budgets
    K = T.group.first_k_elements(i)
    for n in range(start, budgets.search_cap + 1):
        size = T.tile_size(n)
        if all(2 * i * T.symmetric_difference_size(n, g) < size for g in K):
            logger.debug("invariance index n_%d = %d on %s", i, n, T.group.name)
            return n
    raise SearchBudgetExceededError(f"no tile index <= {budgets.search_cap} is 1/{2 * i}-invariant for K_{i}")


@dataclass(frozen=True)
class DensityReport:
    """Center densities inside a large tile.

    Attributes:
        k (int): Index of the small tile F_k.
        n (int): Index of the large tile F_n.
        interior_centers (int): |Int_{F_k}(F_n) ∩ Z_k|.
        centers (int): |F_n ∩ Z_k|.
        cells (int): |F_n|.
        interior_center_ratio (Fraction): interior_centers / cells.
        center_ratio (Fraction): centers / cells.
        target (Fraction): 1 / |F_k|, the common limit.
    """

    k: int
    n: int
    interior_centers: int
    centers: int
    cells: int
    interior_center_ratio: Fraction
    center_ratio: Fraction
    target: Fraction

    def as_dict(self) -> dict[str, object]:
        return {
            "k": self.k,
            "n": self.n,
            "cells": self.cells,
            "interior_centers": self.interior_centers,
            "centers": self.centers,
            "interior_center_ratio": float(self.interior_center_ratio),
            "center_ratio": float(self.center_ratio),
            "target": float(self.target),
        }


def interior_centers(
        T: Monotiling,
        k: int,
        n: int
        ) -> tuple[GroupElement, ...]:
    """Int_{F_k}(F_n) ∩ Z_k, sorted by index."""

    report = k_boundary(T.tile(k), T.tile(n), T.group)
    return tuple(g for g in report.interior if T.center_contains(k, g))


def density_report(
        T: Monotiling,
        k: int,
        n: int
        ) -> DensityReport:
    """Measures |Int_{F_k}(F_n) ∩ Z_k| / |F_n| and |F_n ∩ Z_k| / |F_n|.

    Both ratios tend to 1/|F_k| as n grows when e ∈ F_k. Arithmetic is exact.

    Raises:
        TilingError: If e ∉ F_k.
    """

    if not T.tile_contains(k, T.group.identity):
        raise TilingError(f"density needs e in F_{k}")
    inside = len(interior_centers(T, k, n))
    on_tile = sum(1 for g in T.tile(n) if T.center_contains(k, g))
    cells = T.tile_size(n)
    return DensityReport(
        k=k,
        n=n,
        interior_centers=inside,
        centers=on_tile,
        cells=cells,
        interior_center_ratio=Fraction(inside, cells),
        center_ratio=Fraction(on_tile, cells),
        target=Fraction(1, T.tile_size(k))
    )


@dataclass(frozen=True)
class WindowReport:
    """Verdict of a finite-window tiling check.

    Attributes:
        tile_size (int): |F_n|.
        window (int): Number of group elements checked.
        centers (int): Distinct centers whose translates meet the window.
        disjoint (bool): Those translates are pairwise disjoint and every
            window point has a single decomposition.
        covers_window_interior (bool): Every window point lies in F_n z for a
            verified center z.
    """

    tile_size: int
    window: int
    centers: int
    disjoint: bool
    covers_window_interior: bool

    def as_dict(self) -> dict[str, object]:
        return {
            "tile_size": self.tile_size,
            "disjoint": self.disjoint,
            "covers_window_interior": self.covers_window_interior,
        }


def check_tiling_window(
        T: Monotiling,
        n: int,
        window: int | Sequence[GroupElement],
        budgets: Budgets | None = None
        ) -> WindowReport:
    """Checks the tiling property of [F_n, Z_n] on a finite window.

    Each window point is decomposed as f·z; the decomposition must have
    f ∈ F_n and z ∈ Z_n. The translates F_n z over all centers found must be
    pairwise disjoint. For small tiles every window point is additionally
    checked to have exactly one center among {f⁻¹g : f ∈ F_n}.

    Args:
        T (Monotiling): The tiling.
        n (int): The tile index.
        window (int | Sequence[GroupElement]): Either a count W (the first W
            group elements) or the elements themselves.
        budgets (Budgets | None, optional): Supplies `max_tile_cells`.

    Returns:
        WindowReport: The verdict.

    Raises:
        SearchBudgetExceededError: If the tile exceeds `max_tile_cells`.
    """

    if budgets is None:
        budgets = T.budgets
    G = T.group
    if isinstance(window, int):
        window = G.first_k_elements(window)
    size = T.tile_size(n)
    if size > budgets.max_tile_cells:
        raise SearchBudgetExceededError(f"tile F_{n} has {size} cells, above max_tile_cells={budgets.max_tile_cells}")

    covers = True
    centers: set[GroupElement] = set()
    for g in window:
        f, z = T.locate(n, g)
        if not (T.tile_contains(n, f) and T.center_contains(n, z) and G.multiply(f, z) == g):
            logger.info("window point %s has no valid decomposition in F_%d", g, n)
            covers = False
        centers.add(z)

    tile = T.tile(n)
    covered: set[GroupElement] = set()
    disjoint = True
    for z in centers:
        translate = G.right_translate(tile, z)
        if covered & translate:
            disjoint = False
            break
        covered |= translate

    if disjoint and size * len(window) <= budgets.max_tile_cells:
        inverses = [G.inverse(f) for f in tile]
        for g in window:
            hits = sum(1 for f_inv in inverses if T.center_contains(n, G.multiply(f_inv, g)))
            if hits != 1:
                logger.info("window point %s lies in %d translates of F_%d", g, hits, n)
                disjoint = False
                break

    return WindowReport(
        tile_size=size,
        window=len(window),
        centers=len(centers),
        disjoint=disjoint,
        covers_window_interior=covers
    )
