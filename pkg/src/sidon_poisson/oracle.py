"""Brute-force towers with every floor materialised.

Ground truth for small parameters.  Nothing here touches the range algebra in
:mod:`construction`: heights, spacers and column placement are recomputed by
stacking explicit floor lists, and sets are plain Python sets of floor
indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .construction import ConstructionParams, Explicit, PaperSidon
from .errors import HeadroomViolation, ResourceLimit

DEFAULT_FLOOR_BUDGET = 10**5


@dataclass
class ExplicitTower:
    K: int
    heights: list[int]  # heights[j - 1] = h_j for j = 1..K
    widths: list[Fraction]
    # parent_maps[j - 1][c - 1][level] = floor index at stage j + 1
    parent_maps: list[list[list[int]]]

    @property
    def floors(self) -> range:
        return range(self.heights[-1])

    @property
    def width(self) -> Fraction:
        return self.widths[-1]

    def floors_at_top(self, stage: int, levels: Iterable[int]) -> set[int]:
        """Stage-``stage`` floors pushed through the parent maps to stage K."""
        cur = set(levels)
        for j in range(stage, self.K):
            cur = {col[x] for col in self.parent_maps[j - 1] for x in cur}
        return cur

    def column_at_top(self, j: int, c: int) -> set[int]:
        col = self.parent_maps[j - 1][c - 1]
        return self.floors_at_top(j + 1, col)


def _cuts(params: ConstructionParams, j: int, h: int):
    rule = params.rule
    if isinstance(rule, PaperSidon):
        r = 2**j
        return r, [rule.d**i * h for i in range(1, r + 1)]
    assert isinstance(rule, Explicit)
    if j > len(rule.stages):
        return None
    r, s = rule.stages[j - 1]
    return r, list(s)


def build_explicit(params: ConstructionParams, K: int,
                   budget: int = DEFAULT_FLOOR_BUDGET) -> ExplicitTower:
    heights, widths, maps = [1], [Fraction(params.base_width)], []
    for j in range(1, K):
        h = heights[-1]
        cut = _cuts(params, j, h)
        if cut is None:
            raise ResourceLimit(f"explicit parameters stop before stage {j + 1}")
        r, spacers = cut
        if r * h + sum(spacers) > budget:
            raise ResourceLimit(f"stage {j + 1} has {r * h + sum(spacers)} floors (budget {budget})")
        # stack: column c's floors, then its spacers, column after column
        cols, top = [], 0
        for c in range(r):
            cols.append(list(range(top, top + h)))
            top += h + spacers[c]
        maps.append(cols)
        heights.append(top)
        widths.append(widths[-1] / r)
    return ExplicitTower(K, heights, widths, maps)


def smallest_tower(params: ConstructionParams, stage: int, levels: Iterable[int], headroom: int,
                   budget: int = DEFAULT_FLOOR_BUDGET) -> tuple[ExplicitTower, set[int]]:
    """First explicit tower (from ``stage`` up) where the given floors plus
    ``headroom`` levels fit; returns it with the floors mapped to its top."""
    levels = list(levels)
    K = stage
    while True:
        tower = build_explicit(params, K, budget)
        top = tower.floors_at_top(stage, levels)
        if max(top, default=-1) + headroom < tower.heights[-1]:
            return tower, top
        K += 1


def explicit_measure(tower: ExplicitTower, A: set[int], B: set[int], a: int) -> Fraction:
    """``μ(T**a A ∩ B)`` by counting floors, ``a >= 0``."""
    if a < 0:
        return explicit_measure(tower, B, A, -a)
    h = tower.heights[-1]
    hits = 0
    for x in A:
        y = x + a
        if y >= h:
            raise HeadroomViolation(f"floor {x} + {a} leaves the explicit tower of height {h}")
        if y in B:
            hits += 1
    return tower.width * hits


def explicit_term(tower: ExplicitTower, A: set[int], times: Sequence[int]) -> set[int]:
    """Floors of ``⋂ T**t A`` (all ``t >= 0``)."""
    h = tower.heights[-1]
    out = None
    for t in times:
        img = set()
        for x in A:
            if x + t >= h:
                raise HeadroomViolation(f"floor {x} + {t} leaves the explicit tower of height {h}")
            img.add(x + t)
        out = img if out is None else out & img
    return out


def explicit_union_measure(params: ConstructionParams, stage: int, levels: Iterable[int],
                           terms: Sequence[Sequence[int]],
                           budget: int = DEFAULT_FLOOR_BUDGET) -> Fraction:
    """``μ(⋃_terms ⋂_t T**t A)`` for ``A`` given by stage-``stage`` levels."""
    c = -min(0, min(t for term in terms for t in term))
    span = max(t for term in terms for t in term) + c
    tower, A = smallest_tower(params, stage, levels, span, budget)
    acc: set[int] = set()
    for term in terms:
        acc |= explicit_term(tower, A, [t + c for t in term])
    return tower.width * len(acc)


def explicit_shift_measure(params: ConstructionParams, stage_a: int, levels_a: Iterable[int],
                           stage_b: int, levels_b: Iterable[int], a: int,
                           budget: int = DEFAULT_FLOOR_BUDGET) -> Fraction:
    levels_a, levels_b = list(levels_a), list(levels_b)
    stage = max(stage_a, stage_b)
    # find a tower fitting both sets, then map each up to it
    K = stage
    while True:
        tower = build_explicit(params, K, budget)
        A = tower.floors_at_top(stage_a, levels_a)
        B = tower.floors_at_top(stage_b, levels_b)
        if max(A | B, default=-1) + abs(a) < tower.heights[-1]:
            return explicit_measure(tower, A, B, a)
        K += 1


def explicit_sidon(params: ConstructionParams, j: int, m: int,
                   budget: int = DEFAULT_FLOOR_BUDGET) -> tuple[tuple[int, ...], Fraction]:
    """Columns of ``X_j`` met by ``X_j ∩ T**(-m) X_j``, and its measure."""
    K = j + 1
    while True:
        tower = build_explicit(params, K, budget)
        X = tower.floors_at_top(j, range(tower.heights[j - 1]))
        if max(X) + m < tower.heights[-1]:
            break
        K += 1
    S = {x for x in X if x + m in X}
    cols = tuple(c for c in range(1, len(tower.parent_maps[j - 1]) + 1)
                 if S & tower.column_at_top(j, c))
    return cols, tower.width * len(S)
