"""Rank-one towers built symbolically, and the level-set algebra over them.

A stage-``j`` tower is a stack of ``h_j`` floors of width ``w_j``; floor ``k``
sits at *level* ``k``.  Cutting the tower into ``r_j`` columns and stacking
them with ``s_j(c)`` spacer floors above column ``c`` gives stage ``j + 1``,
where level ``i`` of column ``c`` becomes level ``L(j, c) + i``.

Every finite-measure set handled by the library is a :class:`LevelSet`: a
union of floors of one stage, stored as sorted, disjoint, non-adjacent
half-open ranges of levels.  All arithmetic is exact (``int`` and
``Fraction``).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    ConfigError,
    HeadroomViolation,
    ResourceLimit,
    StageMismatch,
    StageOutOfRange,
)

DEFAULT_STAGE_CAP = 12
DEFAULT_RANGE_CAP = 10**7

Range = tuple[int, int]


@dataclass(frozen=True)
class PaperSidon:
    """``r_j = 2**j`` and ``s_j(i) = d**i * h_j`` for ``i = 1..r_j``."""

    d: int

    def __post_init__(self):
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 2:
            raise ConfigError(f"PaperSidon needs an integer d >= 2, got {self.d!r}")


@dataclass(frozen=True)
class Explicit:
    """Finitely many stages, each given as ``(r_j, (s_j(1), ..., s_j(r_j)))``."""

    stages: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        norm = []
        for idx, stage in enumerate(self.stages, start=1):
            r, spacers = stage
            spacers = tuple(spacers)
            if isinstance(r, bool) or not isinstance(r, int) or r < 2:
                raise ConfigError(f"stage {idx}: r_j must be an integer >= 2, got {r!r}")
            if len(spacers) != r:
                raise ConfigError(f"stage {idx}: expected {r} spacer counts, got {len(spacers)}")
            if any(not isinstance(s, int) or isinstance(s, bool) or s < 0 for s in spacers):
                raise ConfigError(f"stage {idx}: spacer counts must be integers >= 0")
            norm.append((r, spacers))
        object.__setattr__(self, "stages", tuple(norm))


Rule = Union[PaperSidon, Explicit]


@dataclass(frozen=True)
class ConstructionParams:
    rule: Rule
    base_width: Fraction = Fraction(1)

    def __post_init__(self):
        bw = Fraction(self.base_width)
        if bw <= 0:
            raise ConfigError(f"base_width must be > 0, got {bw}")
        object.__setattr__(self, "base_width", bw)

    @classmethod
    def paper(cls, d: int = 11, base_width=1) -> "ConstructionParams":
        return cls(PaperSidon(d), Fraction(base_width))

    @classmethod
    def explicit(cls, stages, base_width=1) -> "ConstructionParams":
        return cls(Explicit(tuple((r, tuple(s)) for r, s in stages)), Fraction(base_width))

    @property
    def last_stage(self) -> int | None:
        """Largest stage index whose geometry is defined, or None if unbounded."""
        if isinstance(self.rule, Explicit):
            return len(self.rule.stages) + 1
        return None

    def cut_count(self, j: int) -> int:
        """``r_j``; needs no heights."""
        if isinstance(self.rule, PaperSidon):
            return 2**j
        return self.cut(j, 0)[0]

    def cut(self, j: int, h_j: int) -> tuple[int, tuple[int, ...]]:
        """Cut count and spacer vector used to go from stage j to j + 1."""
        rule = self.rule
        if isinstance(rule, PaperSidon):
            r = 2**j
            return r, tuple(rule.d**i * h_j for i in range(1, r + 1))
        if j > len(rule.stages):
            raise StageOutOfRange(f"explicit construction defines only {len(rule.stages)} cut(s); stage {j} has none")
        return rule.stages[j - 1]


@dataclass(frozen=True)
class StageGeometry:
    j: int
    h: int
    w: Fraction
    r: int
    spacers: tuple[int, ...]
    offsets: tuple[int, ...]
    return_times: tuple[int, ...]

    @property
    def next_height(self) -> int:
        return self.offsets[-1] + self.h + self.spacers[-1]


@dataclass(frozen=True)
class LevelSet:
    """A union of stage-``stage`` floors.

    ``height`` and ``width`` are the tower height and floor width of that
    stage; they travel with the set so measure and headroom checks need no
    lookup.
    """

    stage: int
    height: int
    width: Fraction
    ranges: tuple[Range, ...] = ()

    def __post_init__(self):
        prev_end = None
        for a, b in self.ranges:
            if not (0 <= a < b <= self.height):
                raise ValueError(f"range [{a},{b}) outside [0,{self.height})")
            if prev_end is not None and a <= prev_end:
                raise ValueError("ranges must be sorted, disjoint and non-adjacent")
            prev_end = b

    @property
    def count(self) -> int:
        """Number of floors."""
        return sum(b - a for a, b in self.ranges)

    @property
    def measure(self) -> Fraction:
        return self.width * self.count

    @property
    def is_empty(self) -> bool:
        return not self.ranges

    @property
    def max_level(self) -> int:
        return self.ranges[-1][1] - 1 if self.ranges else -1

    @property
    def min_level(self) -> int:
        return self.ranges[0][0] if self.ranges else 0

    def __contains__(self, level: int) -> bool:
        i = bisect.bisect_right(self.ranges, (level, float("inf"))) - 1
        return i >= 0 and self.ranges[i][0] <= level < self.ranges[i][1]

    def levels(self) -> Iterable[int]:
        for a, b in self.ranges:
            yield from range(a, b)

    def with_ranges(self, ranges: Iterable[Range]) -> "LevelSet":
        return LevelSet(self.stage, self.height, self.width, canonical(ranges))


def canonical(ranges: Iterable[Range]) -> tuple[Range, ...]:
    """Sort, drop empty ranges and merge overlapping or touching ones."""
    out: list[list[int]] = []
    for a, b in sorted(r for r in ranges if r[0] < r[1]):
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1][1] = b
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


class Construction:
    """A rank-one construction with a memo table of stage geometries.

    The memo is a pure cache: filling it twice gives the same values.
    """

    def __init__(self, params: ConstructionParams, *, stage_cap: int = DEFAULT_STAGE_CAP,
                 range_cap: int = DEFAULT_RANGE_CAP):
        self.params = params
        self.stage_cap = stage_cap
        self.range_cap = range_cap
        self._geom: list[StageGeometry] = []

    def __repr__(self):
        return f"Construction({self.params!r})"

    def height(self, j: int) -> int:
        if j < 1:
            raise StageOutOfRange(f"stage index must be >= 1, got {j}")
        if j == 1:
            return 1
        return self.geometry(j - 1).next_height

    def width(self, j: int) -> Fraction:
        if j == 1:
            return self.params.base_width
        return self.geometry(j - 1).w / self.geometry(j - 1).r

    def geometry(self, j: int) -> StageGeometry:
        if j < 1:
            raise StageOutOfRange(f"stage index must be >= 1, got {j}")
        last = self.params.last_stage
        if last is not None and j >= last:
            raise StageOutOfRange(f"explicit construction defines stages 1..{last - 1} cuts; asked for stage {j}")
        while len(self._geom) < j:
            self._geom.append(self._build(len(self._geom) + 1))
        return self._geom[j - 1]

    def _build(self, j: int) -> StageGeometry:
        if j == 1:
            h, w = 1, self.params.base_width
        else:
            prev = self._geom[j - 2]
            h, w = prev.next_height, prev.w / prev.r
        r, spacers = self.params.cut(j, h)
        offsets = [0]
        for c in range(r - 1):
            offsets.append(offsets[-1] + h + spacers[c])
        return StageGeometry(
            j=j, h=h, w=w, r=r, spacers=spacers, offsets=tuple(offsets),
            return_times=tuple(h + s for s in spacers),
        )

    def has_stage(self, j: int) -> bool:
        last = self.params.last_stage
        return j >= 1 and (last is None or j <= last)

    # -- sets ---------------------------------------------------------------

    def empty(self, j: int) -> LevelSet:
        return LevelSet(j, self.height(j), self.width(j), ())

    def level_set(self, j: int, ranges: Iterable[Range]) -> LevelSet:
        return LevelSet(j, self.height(j), self.width(j), canonical(ranges))

    def from_levels(self, j: int, levels: Iterable[int]) -> LevelSet:
        return self.level_set(j, ((k, k + 1) for k in levels))

    def tower(self, j: int) -> LevelSet:
        """The whole stage-``j`` tower ``X_j``."""
        h = self.height(j)
        return LevelSet(j, h, self.width(j), ((0, h),))

    def column(self, j: int, c: int) -> LevelSet:
        """Column ``c`` (1-based) of ``X_j`` as a stage-``j + 1`` set."""
        g = self.geometry(j)
        if not 1 <= c <= g.r:
            raise ValueError(f"column {c} outside 1..{g.r}")
        L = g.offsets[c - 1]
        return self.level_set(j + 1, [(L, L + g.h)])

    def lift(self, A: LevelSet, target: int) -> LevelSet:
        if target < A.stage:
            raise StageMismatch(f"cannot lift a stage-{A.stage} set down to stage {target}")
        ranges = A.ranges
        for j in range(A.stage, target):
            g = self.geometry(j)
            if len(ranges) * g.r > self.range_cap:
                raise ResourceLimit(
                    f"lifting to stage {j + 1} would need {len(ranges) * g.r} ranges (cap {self.range_cap})")
            ranges = canonical((L + a, L + b) for L in g.offsets for a, b in ranges)
        if target == A.stage:
            return A
        return LevelSet(target, self.height(target), self.width(target), ranges)

    def max_lifted_level(self, A: LevelSet, target: int) -> int:
        """Top level of ``lift(A, target)`` without materialising the lift."""
        top = A.max_level
        if top < 0:
            return -1
        for j in range(A.stage, target):
            top += self.geometry(j).offsets[-1]
        return top

    def choose_work_stage(self, sets: Sequence[LevelSet], max_abs_shift: int, *,
                          at_least: int = 1) -> int:
        """Smallest stage where every set, translated by up to ``max_abs_shift``
        levels, stays inside the tower."""
        if max_abs_shift < 0:
            raise ValueError("max_abs_shift must be >= 0")
        K = max([at_least, *(A.stage for A in sets)])
        while True:
            top = max((self.max_lifted_level(A, K) for A in sets), default=-1)
            if top + max_abs_shift < self.height(K):
                return K
            if K >= self.stage_cap:
                raise ResourceLimit(f"no work stage <= {self.stage_cap} leaves headroom for shift {max_abs_shift}")
            if not self.has_stage(K + 1):
                raise ResourceLimit(
                    f"explicit construction ends at stage {K} without headroom for shift {max_abs_shift}")
            K += 1


# -- set algebra -------------------------------------------------------------

def _same_stage(A: LevelSet, B: LevelSet):
    if A.stage != B.stage:
        raise StageMismatch(f"operands live at stages {A.stage} and {B.stage}; lift them first")


def union(A: LevelSet, B: LevelSet) -> LevelSet:
    _same_stage(A, B)
    return A.with_ranges(A.ranges + B.ranges)


def intersect(A: LevelSet, B: LevelSet) -> LevelSet:
    _same_stage(A, B)
    out = []
    i = k = 0
    ra, rb = A.ranges, B.ranges
    while i < len(ra) and k < len(rb):
        lo = max(ra[i][0], rb[k][0])
        hi = min(ra[i][1], rb[k][1])
        if lo < hi:
            out.append((lo, hi))
        if ra[i][1] < rb[k][1]:
            i += 1
        else:
            k += 1
    return A.with_ranges(out)


def difference(A: LevelSet, B: LevelSet) -> LevelSet:
    _same_stage(A, B)
    out = []
    rb = B.ranges
    k = 0
    for a, b in A.ranges:
        cur = a
        while k < len(rb) and rb[k][1] <= cur:
            k += 1
        m = k
        while m < len(rb) and rb[m][0] < b:
            if rb[m][0] > cur:
                out.append((cur, rb[m][0]))
            cur = max(cur, rb[m][1])
            m += 1
        if cur < b:
            out.append((cur, b))
    return A.with_ranges(out)


def symmetric_difference(A: LevelSet, B: LevelSet) -> LevelSet:
    return union(difference(A, B), difference(B, A))


def shift(A: LevelSet, a: int) -> LevelSet:
    """Translate every floor ``a`` levels up the tower (``T**a`` on ``A``)."""
    if a == 0 or A.is_empty:
        return A
    if A.min_level + a < 0 or A.ranges[-1][1] + a > A.height:
        raise HeadroomViolation(
            f"shift by {a} leaves the stage-{A.stage} tower [0,{A.height}); choose a higher work stage")
    return LevelSet(A.stage, A.height, A.width, tuple((x + a, y + a) for x, y in A.ranges))


# -- functional entry points ------------------------------------------------

def stage_geometry(params: ConstructionParams, j: int) -> StageGeometry:
    return Construction(params).geometry(j)


def tower_set(params: ConstructionParams, j: int) -> LevelSet:
    return Construction(params).tower(j)
