"""Følner monotilings of group extensions.

Given an exact sequence 1 -> E -> F -> G -> 1 of computable groups with
normal Følner monotilings on E and on G, the tiles on F are built from a
section of the G-tile (one representative per E-coset) times an E-tile:

    F_l = T_l · E_{k*(l)}

where T_l picks the first member of every coset in ψ⁻¹(G_{m*(l)}). The
tile indices m*(l) and k*(l) are found by invariance-index searches so that
the result is 1/l-invariant under the first l elements of F. Centers are
products of embedded E-centers and lifted G-centers.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from src.compgroup import ComputableGroup, GroupElement, group_by_name, unpair
from src.config import Budgets
from src.exceptions import *
from src.monotiling import Monotiling, invariance_index, k_interior_within

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExactSequence:
    """An exact sequence 1 -> E -> F -> G -> 1 of computable groups.

    Attributes:
        name (str): Short name used on the command line.
        E (ComputableGroup): The kernel group.
        F (ComputableGroup): The extension.
        G (ComputableGroup): The quotient.
        embed (Callable): Injective homomorphism E -> F with normal image.
        project (Callable): Surjective homomorphism ψ: F -> G whose kernel is
            the image of `embed`.
        lift (Callable): Any map G -> F with ψ ∘ lift = id.
        kernel_preimage (Callable): Inverse of `embed` on its image.
    """

    name: str
    E: ComputableGroup
    F: ComputableGroup
    G: ComputableGroup
    embed: Callable[[GroupElement], GroupElement]
    project: Callable[[GroupElement], GroupElement]
    lift: Callable[[GroupElement], GroupElement]
    kernel_preimage: Callable[[GroupElement], GroupElement]

    def in_kernel(self, f: GroupElement) -> bool:
        return self.project(f) == self.G.identity

    def validate(self, window: int = 64) -> None:
        """Checks exactness and the homomorphism laws on small windows.

        Raises:
            ValidationError: On the first failed check.
        """

        for e in self.E.first_k_elements(window):
            f = self.embed(e)
            if not self.in_kernel(f):
                raise ValidationError(f"{self.name}: embed({e}) = {f} is not in the kernel of the projection")
            if self.kernel_preimage(f) != e:
                raise ValidationError(f"{self.name}: kernel_preimage does not invert embed at {e}")
        for g in self.G.first_k_elements(window):
            if self.project(self.lift(g)) != g:
                raise ValidationError(f"{self.name}: the projection misses {g}")
        sample = self.F.first_k_elements(min(window, 16))
        for x in sample:
            for y in sample:
                if self.project(self.F.multiply(x, y)) != self.G.multiply(self.project(x), self.project(y)):
                    raise ValidationError(f"{self.name}: the projection is not a homomorphism at {x}, {y}")


def heisenberg_sequence() -> ExactSequence:
    """Z -> UT(3, Z) -> Z², with c |-> (0, 0, c) and (a, b, c) |-> (a, b)."""

    return ExactSequence(
        name="h3",
        E=group_by_name("Z"),
        F=group_by_name("H3"),
        G=group_by_name("Z2"),
        embed=lambda e: (0, 0, e[0]),
        project=lambda f: (f[0], f[1]),
        lift=lambda g: (g[0], g[1], 0),
        kernel_preimage=lambda f: (f[2],)
    )


SEQUENCES = {"h3": heisenberg_sequence}


def sequence_by_name(name: str) -> ExactSequence:
    if name not in SEQUENCES:
        raise ValidationError(f"seq: unknown exact sequence {name!r} (expected one of {', '.join(SEQUENCES)})")
    return SEQUENCES[name]()


class SectionChoice:
    """The first members of the E-cosets met by a decidable set T ⊆ F.

    g belongs to T' when g ∈ T and no element of smaller index shares its
    image under ψ; the identity is always chosen for its own coset. The
    representative of a coset is the index-minimal element among the first
    `coset_cap` elements of E, translated into the coset. Representatives
    are cached per coset.

    Attributes:
        seq (ExactSequence): The exact sequence.
        base (Callable[[GroupElement], bool]): Membership in T.
        budgets (Budgets): Supplies `coset_cap`.
    """

    def __init__(
            self,
            seq: ExactSequence,
            base: Callable[[GroupElement], bool],
            budgets: Budgets | None = None
            ) -> None:
        self.seq: ExactSequence = seq
        self.base: Callable[[GroupElement], bool] = base
        self.budgets: Budgets = budgets if budgets is not None else Budgets()
        self._kernel = seq.E.first_k_elements(self.budgets.coset_cap)
        self._representatives: dict[GroupElement, GroupElement] = {}

    def representative(self, g: GroupElement) -> GroupElement:
        """The chosen member of the coset ψ⁻¹(g)."""

        if g not in self._representatives:
            seq = self.seq
            if g == seq.G.identity:
                chosen = seq.F.identity
            else:
                start = seq.lift(g)
                chosen = min(
                    (seq.F.multiply(start, seq.embed(e)) for e in self._kernel),
                    key=seq.F.index
                )
            self._representatives[g] = chosen
        return self._representatives[g]

    def contains(self, f: GroupElement) -> bool:
        return self.base(f) and self.representative(self.seq.project(f)) == f

    def __call__(self, f: GroupElement) -> bool:
        return self.contains(f)

    def select(self, cosets: Iterable[GroupElement]) -> tuple[GroupElement, ...]:
        """Representatives of the given G-elements, sorted by F-index."""

        return self.seq.F.sort(self.representative(g) for g in cosets)


def coset_section(
        T: Callable[[GroupElement], bool],
        seq: ExactSequence,
        budgets: Budgets | None = None
        ) -> SectionChoice:
    """Chooses one representative in every E-coset that T meets."""

    return SectionChoice(seq, T, budgets)


def twist_set(
        seq: ExactSequence,
        section: SectionChoice,
        T_interior: Iterable[GroupElement],
        K: Iterable[GroupElement],
        G_tile: frozenset[GroupElement]
        ) -> tuple[GroupElement, ...]:
    """P = {ρ(x, t) : x ∈ K, t ∈ T°}, where x·t = λ·ρ with λ ∈ T and ρ ∈ E.

    λ is the section representative of ψ(x·t) and ρ = λ⁻¹·x·t.

    Args:
        seq (ExactSequence): The exact sequence.
        section (SectionChoice): The section of ψ⁻¹(G_tile).
        T_interior (Iterable[GroupElement]): The section of the interior part.
        K (Iterable[GroupElement]): The first l elements of F.
        G_tile (frozenset[GroupElement]): The G-tile the section covers.

    Returns:
        tuple[GroupElement, ...]: The twists as elements of F, sorted by index.

    Raises:
        FactorizationError: If some x·t leaves ψ⁻¹(G_tile) or λ⁻¹·x·t is not
            in the kernel.
    """

    F = seq.F
    K = tuple(K)
    twists = set()
    for t in T_interior:
        for x in K:
            xt = F.multiply(x, t)
            image = seq.project(xt)
            if image not in G_tile:
                raise FactorizationError(f"{x}·{t} projects to {image}, outside the G-tile")
            lam = section.representative(image)
            rho = F.multiply(F.inverse(lam), xt)
            if not seq.in_kernel(rho):
                raise FactorizationError(f"λ⁻¹·x·t = {rho} is not in the kernel for x={x}, t={t}")
            twists.add(rho)
    return F.sort(twists)


@dataclass
class ExtensionStage:
    """Every intermediate of the tile construction for one value of l.

    Attributes:
        l (int): The invariance parameter.
        K (tuple): The first l elements of F.
        I (int): Size of the G-window Q that must cover ψ(K).
        Q (tuple): The first I elements of G.
        m_star (int): Index of the G-tile.
        G_tile (tuple): G_{m*}, sorted.
        G_interior (tuple): {t ∈ G_{m*} : Q t ⊆ G_{m*}}.
        T (tuple): Section of ψ⁻¹(G_{m*}).
        T_interior (tuple): Section of ψ⁻¹(G_interior).
        P (tuple): The twist set, as elements of F.
        J (int): Size of the E-window that must cover the twists.
        k_star (int): Index of the E-tile.
        E_tile (tuple): E_{k*}, sorted.
        E_interior (tuple): {s ∈ E_{k*} : P s ⊆ E_{k*}}.
    """

    l: int
    K: tuple[GroupElement, ...]
    I: int
    Q: tuple[GroupElement, ...]
    m_star: int
    G_tile: tuple[GroupElement, ...]
    G_interior: tuple[GroupElement, ...]
    T: tuple[GroupElement, ...]
    T_interior: tuple[GroupElement, ...]
    P: tuple[GroupElement, ...]
    J: int
    k_star: int
    E_tile: tuple[GroupElement, ...]
    E_interior: tuple[GroupElement, ...]
    section: SectionChoice = field(repr=False)

    @property
    def tile_size(self) -> int:
        return len(self.T) * len(self.E_tile)

    def interior_mass(self) -> dict[str, Fraction]:
        """|G°|/|G_{m*}| and |E°|/|E_{k*}|; both must reach 1 - 1/(2l)."""

        return {
            "G": Fraction(len(self.G_interior), len(self.G_tile)),
            "E": Fraction(len(self.E_interior), len(self.E_tile)),
            "target": 1 - Fraction(1, 2 * self.l),
        }


def build_stage(
        seq: ExactSequence,
        tiling_E: Monotiling,
        tiling_G: Monotiling,
        l: int,
        budgets: Budgets | None = None
        ) -> ExtensionStage:
    """Runs the tile construction for one l and keeps every intermediate.

    Raises:
        TilingError: If one of the input tilings is not normal.
        SearchBudgetExceededError: From the inner invariance-index searches.
        FactorizationError: If the section is inconsistent.
    """

    if l < 1:
        raise ValueError(f"l must be positive, got {l}")
    if budgets is None:
        budgets = tiling_G.budgets
    if not (tiling_E.normal and tiling_G.normal):
        raise TilingError("the extension construction needs normal tilings on E and G")

    F, G, E = seq.F, seq.G, seq.E
    K = F.first_k_elements(l)
    I = max(l, max(G.rank(seq.project(x)) for x in K))
    Q = G.first_k_elements(I)
    m_star = max(invariance_index(tiling_G, I, budgets), 2 * l)

    G_tile = tiling_G.tile(m_star)
    G_set = tiling_G.tile_set(m_star)
    G_interior = k_interior_within(Q, G_set, G)

    section = coset_section(lambda f: seq.project(f) in G_set, seq, budgets)
    T = section.select(G_tile)
    T_interior = section.select(G_interior)

    P = twist_set(seq, section, T_interior, K, G_set)
    P_E = tuple(seq.kernel_preimage(rho) for rho in P)
    J = max([1] + [E.rank(p) for p in P_E])
    k_star = max(invariance_index(tiling_E, J, budgets), m_star)

    E_tile = tiling_E.tile(k_star)
    E_interior = k_interior_within(P_E, tiling_E.tile_set(k_star), E) if P_E else E_tile

    logger.debug(
        "extension stage l=%d: I=%d m*=%d |T|=%d |P|=%d J=%d k*=%d",
        l, I, m_star, len(T), len(P), J, k_star
    )
    return ExtensionStage(
        l=l, K=K, I=I, Q=Q, m_star=m_star,
        G_tile=G_tile, G_interior=G_interior,
        T=T, T_interior=T_interior,
        P=P, J=J, k_star=k_star,
        E_tile=E_tile, E_interior=E_interior,
        section=section
    )


class ExtensionMonotiling(Monotiling):
    """The normal Følner monotiling of F assembled from tilings of E and G.

    Tile l is T_l · E_{k*(l)}. Its centers are
    φ_F(l, i) = embed(φ_E(k*, ν₁)) · θ(m*, ν₂), where (ν₁, ν₂) is the Cantor
    unpairing of i - 1 (each shifted to start at 1) and θ lifts a G-center to
    its coset representative.

    Attributes:
        seq (ExactSequence): The exact sequence.
        tiling_E (Monotiling): Normal monotiling of E.
        tiling_G (Monotiling): Normal monotiling of G.
    """

    def __init__(
            self,
            seq: ExactSequence,
            tiling_E: Monotiling,
            tiling_G: Monotiling,
            budgets: Budgets | None = None
            ) -> None:
        super().__init__(seq.F, budgets)
        self.seq: ExactSequence = seq
        self.tiling_E: Monotiling = tiling_E
        self.tiling_G: Monotiling = tiling_G
        self._stages: dict[int, ExtensionStage] = {}

    def stage(self, l: int) -> ExtensionStage:
        if l not in self._stages:
            self._stages[l] = build_stage(self.seq, self.tiling_E, self.tiling_G, l, self.budgets)
        return self._stages[l]

    def _lift_center(self, l: int, s: GroupElement) -> GroupElement:
        return self.stage(l).section.representative(s)

    def _build_tile(self, l: int) -> Iterable[GroupElement]:
        stage = self.stage(l)
        F, embed = self.seq.F, self.seq.embed
        return [F.multiply(t, embed(e)) for t in stage.T for e in stage.E_tile]

    def tile_size(self, l: int) -> int:
        return self.stage(l).tile_size

    def tile_contains(self, l: int, f: GroupElement) -> bool:
        seq, stage = self.seq, self.stage(l)
        image = seq.project(f)
        if not self.tiling_G.tile_contains(stage.m_star, image):
            return False
        t = stage.section.representative(image)
        u = seq.kernel_preimage(seq.F.multiply(seq.F.inverse(t), f))
        return self.tiling_E.tile_contains(stage.k_star, u)

    def center_contains(self, l: int, g: GroupElement) -> bool:
        seq, stage, F = self.seq, self.stage(l), self.seq.F
        s = seq.project(g)
        if not self.tiling_G.center_contains(stage.m_star, s):
            return False
        q = seq.kernel_preimage(F.multiply(g, F.inverse(self._lift_center(l, s))))
        return self.tiling_E.center_contains(stage.k_star, q)

    def center_enumerate(self, l: int, i: int) -> GroupElement:
        stage = self.stage(l)
        first, second = unpair(i - 1)
        q = self.tiling_E.center_enumerate(stage.k_star, first + 1)
        s = self.tiling_G.center_enumerate(stage.m_star, second + 1)
        return self.seq.F.multiply(self.seq.embed(q), self._lift_center(l, s))

    def locate(self, l: int, g: GroupElement) -> tuple[GroupElement, GroupElement]:
        seq, stage, F = self.seq, self.stage(l), self.seq.F
        g_f, s = self.tiling_G.locate(stage.m_star, seq.project(g))
        t = stage.section.representative(g_f)
        theta = self._lift_center(l, s)
        u = F.multiply(F.multiply(F.inverse(t), g), F.inverse(theta))
        if not seq.in_kernel(u):
            raise FactorizationError(f"t⁻¹·g·θ⁻¹ = {u} is not in the kernel")
        e_f, q = self.tiling_E.locate(stage.k_star, seq.kernel_preimage(u))
        return F.multiply(t, seq.embed(e_f)), F.multiply(seq.embed(q), theta)


def build_extension_tiling(
        seq: ExactSequence,
        tiling_E: Monotiling,
        tiling_G: Monotiling,
        l: int,
        budgets: Budgets | None = None
        ) -> tuple[tuple[GroupElement, ...], Callable[[int], GroupElement]]:
    """Builds the l-th extension tile and its center enumerator.

    Returns:
        tuple: F_l sorted by index and the map i -> φ_F(l, i).
    """

    tiling = ExtensionMonotiling(seq, tiling_E, tiling_G, budgets)
    return tiling.tile(l), lambda i: tiling.center_enumerate(l, i)
