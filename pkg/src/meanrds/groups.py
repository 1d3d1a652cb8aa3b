"""Finitely generated amenable groups of the form Z^a x C_{k_1} x ... x C_{k_b}.

Elements are integer tuples of length ``free_rank + len(cyclic_orders)``;
free coordinates are unconstrained, cyclic coordinates live in ``[0, k_i)``.
Folner windows are the boxes ``[0, n)^a x prod_i [0, min(n, k_i))``, which
exhaust the group and have boundary-to-volume ratio 2/n in each free
direction (exactly; see :func:`folner_defect`).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction


class GroupSpecError(ValueError):
    """Raised when a group description or element is malformed."""


class BudgetError(RuntimeError):
    """Raised when a window or ball would exceed the element budget."""


_FREE_RE = re.compile(r"^Z(?:\^(\d+))?$")
_CYCLIC_RE = re.compile(r"^C(\d+)$")

MAX_FREE_RANK = 3
DEFAULT_ELEMENT_BUDGET = 2_000_000


@dataclass(frozen=True)
class AmenableGroup:
    """Direct product of a free abelian part and finite cyclic factors."""

    free_rank: int
    cyclic_orders: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0 or self.free_rank > MAX_FREE_RANK:
            raise GroupSpecError(
                f"free rank must be between 0 and {MAX_FREE_RANK}, got {self.free_rank}"
            )
        for k in self.cyclic_orders:
            if k < 2:
                raise GroupSpecError(f"cyclic order must be at least 2, got {k}")
        if self.rank == 0:
            raise GroupSpecError("group needs at least one factor")

    @property
    def rank(self) -> int:
        return self.free_rank + len(self.cyclic_orders)

    @property
    def spec(self) -> str:
        """Canonical text form, e.g. ``Z^2 x C3``."""
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"C{k}" for k in self.cyclic_orders)
        return " x ".join(parts)

    @property
    def is_line(self) -> bool:
        """True for Z itself; enables contiguous-orbit fast paths."""
        return self.free_rank == 1 and not self.cyclic_orders

    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def check_element(self, g) -> tuple[int, ...]:
        g = tuple(int(v) for v in g)
        if len(g) != self.rank:
            raise GroupSpecError(f"element {g} has wrong rank for {self.spec}")
        for i, k in enumerate(self.cyclic_orders):
            v = g[self.free_rank + i]
            if not 0 <= v < k:
                raise GroupSpecError(f"cyclic coordinate {v} out of range [0, {k})")
        return g

    def multiply(self, a, b) -> tuple[int, ...]:
        f = self.free_rank
        out = [a[i] + b[i] for i in range(f)]
        for i, k in enumerate(self.cyclic_orders):
            out.append((a[f + i] + b[f + i]) % k)
        return tuple(out)

    def inverse(self, a) -> tuple[int, ...]:
        f = self.free_rank
        out = [-a[i] for i in range(f)]
        for i, k in enumerate(self.cyclic_orders):
            out.append((-a[f + i]) % k)
        return tuple(out)

    def generators(self) -> tuple[tuple[int, ...], ...]:
        """Standard generators: one unit vector per factor."""
        gens = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            gens.append(tuple(e))
        return tuple(gens)

    def generator_orders(self) -> tuple[int | None, ...]:
        """None for free generators, the order for cyclic ones."""
        return (None,) * self.free_rank + self.cyclic_orders

    def word_length(self, g) -> int:
        """Word length in the standard generators (cyclic ones walk both ways)."""
        f = self.free_rank
        total = sum(abs(g[i]) for i in range(f))
        for i, k in enumerate(self.cyclic_orders):
            v = g[f + i] % k
            total += min(v, k - v)
        return total


def parse_group(text: str) -> AmenableGroup:
    """Parse descriptions like ``"Z"``, ``"Z^2"``, ``"Z x C2"``, ``"Z^3 x C2 x C3"``."""
    cleaned = text.replace("×", "x").replace("*", "x")
    tokens = [t.strip() for t in cleaned.split("x") if t.strip()]
    if not tokens:
        raise GroupSpecError(f"empty group description: {text!r}")
    free = 0
    cyclic: list[int] = []
    for tok in tokens:
        m = _FREE_RE.match(tok)
        if m:
            if cyclic:
                raise GroupSpecError("free factors must precede cyclic ones")
            free += int(m.group(1)) if m.group(1) else 1
            continue
        m = _CYCLIC_RE.match(tok)
        if m:
            cyclic.append(int(m.group(1)))
            continue
        raise GroupSpecError(f"unrecognized factor {tok!r} in {text!r}")
    return AmenableGroup(free, tuple(cyclic))


@dataclass(frozen=True)
class FolnerWindow:
    """A finite window together with the index it was drawn at."""

    group: AmenableGroup
    index: int
    elements: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.elements)


class FolnerFamily:
    """The box windows F_n = [0, n)^a x prod_i [0, min(n, k_i))."""

    def __init__(self, group: AmenableGroup, element_budget: int = DEFAULT_ELEMENT_BUDGET):
        self.group = group
        self.element_budget = element_budget

    def window_size(self, n: int) -> int:
        if n < 1:
            raise GroupSpecError(f"window index must be positive, got {n}")
        size = n ** self.group.free_rank
        for k in self.group.cyclic_orders:
            size *= min(n, k)
        return size

    def window(self, n: int) -> FolnerWindow:
        size = self.window_size(n)
        if size > self.element_budget:
            raise BudgetError(
                f"window F_{n} has {size} elements, over budget {self.element_budget}"
            )
        ranges = [range(n)] * self.group.free_rank
        ranges += [range(min(n, k)) for k in self.group.cyclic_orders]
        elements = tuple(itertools.product(*ranges))
        return FolnerWindow(self.group, n, elements)


def translate(window: FolnerWindow, g) -> FolnerWindow:
    """Left translate gF, keeping the window index for reporting."""
    grp = window.group
    g = grp.check_element(g)
    moved = sorted(grp.multiply(g, h) for h in window.elements)
    return FolnerWindow(grp, window.index, tuple(moved))


def folner_defect(window: FolnerWindow, g) -> Fraction:
    """Exact |gF symm-diff F| / |F| as a Fraction.

    For a standard generator along a free coordinate this equals 2/n; along a
    saturated cyclic coordinate (n >= order) it is 0.
    """
    grp = window.group
    g = grp.check_element(g)
    base = set(window.elements)
    moved = {grp.multiply(g, h) for h in window.elements}
    return Fraction(len(base ^ moved), len(base))


def search_ball(
    group: AmenableGroup, radius: int, element_budget: int = DEFAULT_ELEMENT_BUDGET
) -> tuple[tuple[int, ...], ...]:
    """All elements of word length <= radius, lexicographically sorted."""
    if radius < 0:
        raise GroupSpecError(f"radius must be nonnegative, got {radius}")
    out: list[tuple[int, ...]] = []

    free_axes = [range(-radius, radius + 1)] * group.free_rank
    cyc_axes = [range(k) for k in group.cyclic_orders]
    count = 0
    for combo in itertools.product(*free_axes, *cyc_axes):
        if group.word_length(combo) <= radius:
            count += 1
            if count > element_budget:
                raise BudgetError(
                    f"ball of radius {radius} exceeds budget {element_budget}"
                )
            out.append(combo)
    out.sort()
    return tuple(out)
