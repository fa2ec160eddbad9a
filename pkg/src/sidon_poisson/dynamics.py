"""Exact measures of intersections and unions of ``T``-shifted floor unions.

Negative times are never materialised.  An expression built from sets
``T**t A`` is translated as a whole by ``T**c`` so that every time is
nonnegative; its measure does not change.  Everything is then evaluated at a
work stage tall enough that each translation is a plain shift of levels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Literal, Sequence

from .construction import (
    Construction,
    ConstructionParams,
    LevelSet,
    intersect,
    shift,
    symmetric_difference,
    union,
)
from .errors import ConfigError

Direction = Literal["forward", "inverse"]

DEFAULT_SIDON_BUDGET = 10**6


def render(q: Fraction, digits: int = 12) -> str:
    """Decimal rendering with ``digits`` significant digits, half-even."""
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        value = Decimal(q.numerator) / Decimal(q.denominator)
    return str(value)


def fraction_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ShiftedTerm:
    """The set ``⋂_u T**times[u] A`` for a base set shared by all terms."""

    times: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(int(t) for t in self.times))
        if not self.times:
            raise ValueError("a shifted term needs at least one time")

    def negated(self) -> "ShiftedTerm":
        return ShiftedTerm(tuple(-t for t in self.times))


def shifted_intersection(con: Construction, pairs: Sequence[tuple[LevelSet, int]],
                         *, min_stage: int = 1) -> tuple[LevelSet, int]:
    """``T**c (⋂ T**t A)`` over ``(A, t)`` pairs, at a common work stage.

    Returns the set and the global translation ``c`` applied.
    """
    if not pairs:
        raise ValueError("need at least one (set, time) pair")
    c = -min(0, min(t for _, t in pairs))
    span = max(t for _, t in pairs) + c
    K = con.choose_work_stage([A for A, _ in pairs], span, at_least=min_stage)
    out = None
    for A, t in pairs:
        piece = shift(con.lift(A, K), t + c)
        out = piece if out is None else intersect(out, piece)
        if out.is_empty:
            break
    return out, c


def intersect_shifted_measure(con: Construction, A: LevelSet, B: LevelSet, a: int) -> Fraction:
    """``μ(T**a A ∩ B)``."""
    if a < 0:
        A, B, a = B, A, -a
    K = con.choose_work_stage([A, B], a)
    return intersect(shift(con.lift(A, K), a), con.lift(B, K)).measure


def expr_union_set(con: Construction, A: LevelSet, terms: Sequence[ShiftedTerm],
                   *, extra_times: Iterable[int] = ()) -> tuple[LevelSet, int, int]:
    """Materialise ``T**c ⋃_terms ⋂_u T**t_u A``.

    ``extra_times`` widen the normalisation window so callers can build other
    translates of ``A`` in the same frame.  Returns ``(set, c, K)``.
    """
    if not terms:
        raise ValueError("terms must be nonempty")
    times = [t for term in terms for t in term.times] + list(extra_times)
    c = -min(0, min(times))
    K = con.choose_work_stage([A], max(times) + c)
    base = con.lift(A, K)
    cache: dict[int, LevelSet] = {}

    def translate(t: int) -> LevelSet:
        if t not in cache:
            cache[t] = shift(base, t + c)
        return cache[t]

    acc = con.empty(K)
    for term in terms:
        piece = None
        for t in dict.fromkeys(term.times):
            s = translate(t)
            piece = s if piece is None else intersect(piece, s)
            if piece.is_empty:
                break
        acc = union(acc, piece)
    return acc, c, K


def expr_union_measure(con: Construction, A: LevelSet, terms: Sequence[ShiftedTerm]) -> Fraction:
    """``μ(⋃_terms ⋂_u T**t_u A)``."""
    return expr_union_set(con, A, terms)[0].measure


# -- Theorem 3 statistics ----------------------------------------------------

def theorem3_terms(con: Construction, j: int, display: int,
                   direction: Direction = "forward") -> list[ShiftedTerm]:
    """Terms of the two union displays for ``i = 1..r_j - 2``.

    Display 0 uses times ``(0, -m(j,i), +m(j,i+1))``; display 1 uses
    ``(0, +m(j,i), -m(j,i+1))``.  The inverse direction negates every time.
    """
    g = con.geometry(j)
    if g.r < 3:
        raise ConfigError(f"stage {j} has r_j = {g.r}; the i = 1..r_j-2 sums need r_j >= 3")
    if display not in (0, 1):
        raise ValueError("display must be 0 or 1")
    sign = -1 if display == 0 else 1
    m = g.return_times
    terms = [ShiftedTerm((0, sign * m[i - 1], -sign * m[i])) for i in range(1, g.r - 1)]
    if direction == "inverse":
        terms = [t.negated() for t in terms]
    elif direction != "forward":
        raise ValueError(f"unknown direction {direction!r}")
    return terms


@dataclass(frozen=True)
class Theorem3Report:
    j: int
    direction: str
    expr0: Fraction
    expr1: Fraction
    mu_A: Fraction
    r_j: int
    identity2_defect: Fraction

    def rows(self, digits: int = 12) -> dict:
        out = {"j": self.j, "direction": self.direction, "r_j": self.r_j}
        for name in ("mu_A", "expr0", "expr1", "identity2_defect"):
            q = getattr(self, name)
            out[name] = fraction_str(q)
            out[name + "_dec"] = render(q, digits)
        return out


def theorem3_stats(con: Construction, A: LevelSet, j: int,
                   direction: Direction = "forward") -> Theorem3Report:
    terms0 = theorem3_terms(con, j, 0, direction)
    terms1 = theorem3_terms(con, j, 1, direction)
    expr0 = expr_union_measure(con, A, terms0)
    # A itself is built in the same translated frame as the display-1 union.
    U, c, K = expr_union_set(con, A, terms1, extra_times=(0,))
    A_frame = shift(con.lift(A, K), c)
    defect = symmetric_difference(A_frame, U).measure
    return Theorem3Report(j=j, direction=direction, expr0=expr0, expr1=U.measure,
                          mu_A=A.measure, r_j=con.geometry(j).r, identity2_defect=defect)


# -- Sidon property -----------------------------------------------------------

@dataclass(frozen=True)
class SidonWitness:
    """Classification of ``X_j ∩ T**(-m) X_j`` by the stage-``j`` columns it meets.

    ``intersection`` is held at the work stage used for the computation; it
    need not be a union of stage-``j + 1`` floors.
    """

    j: int
    m: int
    columns: tuple[int, ...]
    intersection: LevelSet

    @property
    def kind(self) -> str:
        if not self.columns:
            return "empty"
        return "column" if len(self.columns) == 1 else "violation"

    @property
    def measure(self) -> Fraction:
        return self.intersection.measure


def sidon_witness(con: Construction, j: int, m: int) -> SidonWitness:
    g = con.geometry(j)
    if not g.h < m <= g.next_height:
        raise ValueError(f"m={m} outside (h_{j}, h_{j + 1}] = ({g.h}, {g.next_height}]")
    X = con.tower(j)
    K = con.choose_work_stage([X], m, at_least=j + 1)
    XK = con.lift(X, K)
    S = shift(intersect(shift(XK, m), XK), -m)
    cols = []
    if not S.is_empty:
        for c in range(1, g.r + 1):
            if not intersect(S, con.lift(con.column(j, c), K)).is_empty:
                cols.append(c)
    return SidonWitness(j, m, tuple(cols), S)


@dataclass
class SidonScan:
    j: int
    mode: str  # "exhaustive" or "sampled"
    witnesses: list[SidonWitness] = field(default_factory=list)

    @property
    def violations(self) -> list[SidonWitness]:
        return [w for w in self.witnesses if w.kind == "violation"]

    @property
    def tested(self) -> list[int]:
        return [w.m for w in self.witnesses]


def sidon_sample(con: Construction, j: int, n_random: int = 64, seed: int = 0) -> list[int]:
    """Structured sample of ``m`` in ``(h_j, h_{j+1}]``: every ``m(j,i) + δ``
    with ``|δ| <= h_j`` plus ``n_random`` uniform draws, sorted and deduplicated."""
    g = con.geometry(j)
    lo, hi = g.h + 1, g.next_height
    ms = {m + d for m in g.return_times for d in range(-g.h, g.h + 1)}
    rng = random.Random(seed)
    ms.update(rng.randint(lo, hi) for _ in range(n_random))
    return sorted(m for m in ms if lo <= m <= hi)


def sidon_scan(con: Construction, j: int, *, budget: int = DEFAULT_SIDON_BUDGET,
               n_random: int = 64, seed: int = 0) -> SidonScan:
    g = con.geometry(j)
    if g.next_height <= budget:
        mode, ms = "exhaustive", range(g.h + 1, g.next_height + 1)
    else:
        mode, ms = "sampled", sidon_sample(con, j, n_random, seed)
    return SidonScan(j, mode, [sidon_witness(con, j, m) for m in ms])


# -- mixing and the summability diagnostic -----------------------------------

def mixing_curve(con: Construction, A: LevelSet, B: LevelSet,
                 ns: Sequence[int]) -> list[tuple[int, Fraction]]:
    if not ns:
        raise ValueError("ns must be nonempty")
    return [(n, intersect_shifted_measure(con, A, B, n)) for n in ns]


def spectral_condition_report(params: ConstructionParams | Construction, J: int) -> list[Fraction]:
    """Partial sums of ``Σ_j 1/r_j`` for ``j = 1..J``."""
    if isinstance(params, Construction):
        params = params.params
    if J < 1:
        raise ValueError("J must be >= 1")
    sums, acc = [], Fraction(0)
    for j in range(1, J + 1):
        acc += Fraction(1, params.cut_count(j))
        sums.append(acc)
    return sums


__all__ = [
    "ShiftedTerm", "Theorem3Report", "SidonWitness", "SidonScan",
    "shifted_intersection", "intersect_shifted_measure", "expr_union_set", "expr_union_measure",
    "theorem3_terms", "theorem3_stats", "sidon_witness", "sidon_sample", "sidon_scan",
    "mixing_curve", "spectral_condition_report", "render", "fraction_str",
]
