"""Poisson suspension: cylinder probabilities, joint count laws, sampling.

A probability ``coeff * exp(-rate)`` with rational ``coeff`` and ``rate`` is
kept exactly as an :class:`ExactPoissonValue`.  Joint count laws over
overlapping sets are exact too: every atom of the refinement has a rational
measure, and all atom-count assignments share the factor ``exp(-μ(union))``.
Only differences of such values (the mixing gap) drop to high-precision
decimals.
"""

from __future__ import annotations

import bisect
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .construction import Construction, LevelSet, canonical, intersect, shift
from .dynamics import shifted_intersection
from .errors import ConfigError, NegativeAtomMeasure, StageMismatch
from .rng import stream, uniform_below, uniform_u128

DEFAULT_PRECISION = 50
DEFAULT_COUNT_CAP = 8
DEFAULT_FACTOR_CAP = 4
# Largest Poisson mean drawn by one CDF inversion; bigger means are split.
INVERSION_RATE_MAX = 30


@dataclass(frozen=True)
class ExactPoissonValue:
    """The real number ``coeff * exp(-rate)``."""

    coeff: Fraction
    rate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        object.__setattr__(self, "rate", Fraction(self.rate))
        if self.coeff < 0 or self.rate < 0:
            raise ValueError("coeff and rate must be nonnegative")

    def __mul__(self, other: "ExactPoissonValue") -> "ExactPoissonValue":
        return ExactPoissonValue(self.coeff * other.coeff, self.rate + other.rate)

    def to_decimal(self, precision: int = DEFAULT_PRECISION) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = precision + 10
            ctx.rounding = ROUND_HALF_EVEN
            if self.coeff == 0:
                return Decimal(0)
            value = _dec(self.coeff) * (-_dec(self.rate)).exp()
            ctx.prec = precision
            return +value

    def __str__(self):
        return f"({self.coeff})*exp(-{self.rate})"


ONE = ExactPoissonValue(Fraction(1), Fraction(0))


def _dec(q: Fraction) -> Decimal:
    return Decimal(q.numerator) / Decimal(q.denominator)


@dataclass(frozen=True)
class CylinderSpec:
    """``⋂ C(A, k)`` over ``parts``; the sets must be pairwise disjoint."""

    parts: tuple[tuple[LevelSet, int], ...] = ()


@dataclass(frozen=True)
class JointFactor:
    A: LevelSet
    shift: int
    k: int


@dataclass(frozen=True)
class JointSpec:
    """Event: exactly ``k`` points in ``T**shift A`` for every factor."""

    factors: tuple[JointFactor, ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(f.k for f in self.factors)


def _check_count(k: int, cap: int):
    if k < 0:
        raise ConfigError(f"counts must be >= 0, got {k}")
    if k > cap:
        raise ConfigError(f"count {k} exceeds the cap {cap}")


def cylinder_measure(con: Construction, spec: CylinderSpec, *,
                     count_cap: int = DEFAULT_COUNT_CAP) -> ExactPoissonValue:
    if not spec.parts:
        return ONE
    for _, k in spec.parts:
        _check_count(k, count_cap)
    K = max(A.stage for A, _ in spec.parts)
    lifted = [con.lift(A, K) for A, _ in spec.parts]
    for i in range(len(lifted)):
        for j in range(i + 1, len(lifted)):
            if not intersect(lifted[i], lifted[j]).is_empty:
                raise ConfigError(f"cylinder parts {i} and {j} overlap; exact evaluation needs disjoint sets")
    coeff, rate = Fraction(1), Fraction(0)
    for A, k in spec.parts:
        mu = A.measure
        coeff *= mu**k / math.factorial(k)
        rate += mu
    return ExactPoissonValue(coeff, rate)


def atom_measures(con: Construction, spec: JointSpec) -> dict[int, Fraction]:
    """Measures of the atoms of the refinement, keyed by membership bitmask.

    Atom ``S`` is the set of points lying in exactly the shifted factor sets
    whose bits are set in ``S``.
    """
    n = len(spec.factors)
    full = (1 << n) - 1
    inter: dict[int, Fraction] = {}
    for S in range(1, full + 1):
        pairs = [(f.A, f.shift) for u, f in enumerate(spec.factors) if S >> u & 1]
        inter[S] = shifted_intersection(con, pairs)[0].measure
    atoms = {}
    for S in range(1, full + 1):
        total = Fraction(0)
        for T in range(S, full + 1):
            if T & S == S:
                total += -inter[T] if bin(T ^ S).count("1") % 2 else inter[T]
        if total < 0:
            raise NegativeAtomMeasure(f"atom {S:b} has measure {total}")
        atoms[S] = total
    return atoms


def joint_count_distribution(con: Construction, spec: JointSpec, *,
                             count_cap: int = DEFAULT_COUNT_CAP,
                             factor_cap: int = DEFAULT_FACTOR_CAP) -> dict[tuple[int, ...], ExactPoissonValue]:
    """Probability of every count vector ``v <= spec.counts`` (componentwise).

    The entry at ``spec.counts`` is the probability of the spec's event.
    """
    n = len(spec.factors)
    if n == 0:
        raise ConfigError("a joint spec needs at least one factor")
    if n > factor_cap:
        raise ConfigError(f"{n} factors exceed the cap {factor_cap}")
    for f in spec.factors:
        _check_count(f.k, count_cap)
    atoms = atom_measures(con, spec)
    rate = sum(atoms.values(), Fraction(0))
    live = [(S, mu) for S, mu in sorted(atoms.items()) if mu > 0]
    budget = list(spec.counts)
    table: dict[tuple[int, ...], Fraction] = {}

    def walk(idx: int, weight: Fraction):
        if idx == len(live):
            v = tuple(k - b for k, b in zip(spec.counts, budget))
            table[v] = table.get(v, Fraction(0)) + weight
            return
        S, mu = live[idx]
        members = [u for u in range(n) if S >> u & 1]
        top = min(budget[u] for u in members)
        term = Fraction(1)
        for c in range(top + 1):
            if c:
                term = term * mu / c
            for u in members:
                budget[u] -= c
            walk(idx + 1, weight * term)
            for u in members:
                budget[u] += c

    walk(0, Fraction(1))
    out = {}
    for v in _box(spec.counts):
        out[v] = ExactPoissonValue(table.get(v, Fraction(0)), rate)
    return out


def _box(counts: Sequence[int]):
    if not counts:
        yield ()
        return
    for head in range(counts[0] + 1):
        for rest in _box(counts[1:]):
            yield (head, *rest)


def joint_probability(con: Construction, spec: JointSpec, **caps) -> ExactPoissonValue:
    return joint_count_distribution(con, spec, **caps)[spec.counts]


def shifted_cylinder(C: CylinderSpec, n: int) -> list[JointFactor]:
    """Factors of ``P(T)**n C``: ``k`` points in ``T**n A`` for each part."""
    return [JointFactor(A, n, k) for A, k in C.parts]


def mixing_gap(con: Construction, C: CylinderSpec, Cp: CylinderSpec, n: int, *,
               precision: int = DEFAULT_PRECISION) -> Decimal:
    """``|μ∘(P(T)**n C ∩ C') - μ∘(C) μ∘(C')|``."""
    joint = joint_probability(con, JointSpec(tuple(shifted_cylinder(C, n) + shifted_cylinder(Cp, 0))))
    product = cylinder_measure(con, C) * cylinder_measure(con, Cp)
    if joint.rate == product.rate:
        return ExactPoissonValue(abs(joint.coeff - product.coeff), joint.rate).to_decimal(precision)
    with localcontext() as ctx:
        ctx.prec = precision
        ctx.rounding = ROUND_HALF_EVEN
        return abs(joint.to_decimal(precision + 10) - product.to_decimal(precision + 10))


# -- sampling ------------------------------------------------------------------

@lru_cache(maxsize=64)
def _poisson_thresholds(rate: Fraction) -> tuple[int, ...]:
    """``floor(F(k) * 2**128)`` for the Poisson CDF ``F`` until ``F`` rounds to 1."""
    scale = 1 << 128
    with localcontext() as ctx:
        ctx.prec = 80
        lam = _dec(rate)
        p = (-lam).exp()
        cdf = p
        out = []
        k = 0
        while True:
            t = int(cdf * scale)
            if t >= scale or (1 - cdf) * scale < 1:
                out.append(scale)
                return tuple(out)
            out.append(t)
            k += 1
            p = p * lam / k
            cdf += p


def poisson_count(bg, rate: Fraction) -> int:
    """Poisson(rate) by CDF inversion, splitting large rates into equal parts."""
    if rate == 0:
        return 0
    parts = max(1, math.ceil(rate / INVERSION_RATE_MAX))
    th = _poisson_thresholds(Fraction(rate) / parts)
    return sum(bisect.bisect_right(th, uniform_u128(bg)) for _ in range(parts))


@dataclass(frozen=True)
class Configuration:
    stage: int
    window: LevelSet
    points: tuple[int, ...]  # sorted floor levels, repeats allowed
    seed_trace: tuple[int, int]  # (seed, sample index)

    def count_in(self, A: LevelSet) -> int:
        if A.stage != self.stage:
            raise StageMismatch("count set must live at the configuration's stage")
        return sum(1 for x in self.points if x in A)


class _WindowSampler:
    def __init__(self, window: LevelSet):
        if window.measure <= 0:
            raise ConfigError("sampling window must have positive measure")
        self.window = window
        self.starts = []
        self.cum = []
        total = 0
        for a, b in window.ranges:
            self.starts.append(a)
            self.cum.append(total)
            total += b - a
        self.total = total

    def draw(self, seed: int, index: int) -> tuple[int, ...]:
        bg = stream(seed, index)
        n = poisson_count(bg, self.window.measure)
        pts = []
        for _ in range(n):
            u = uniform_below(bg, self.total)
            i = bisect.bisect_right(self.cum, u) - 1
            pts.append(self.starts[i] + u - self.cum[i])
        return tuple(sorted(pts))


def sample_configuration(window: LevelSet, seed: int, index: int = 0) -> Configuration:
    """Poisson configuration restricted to ``window``, at floor granularity."""
    pts = _WindowSampler(window).draw(seed, index)
    return Configuration(window.stage, window, pts, (seed, index))


def evolve_configuration(config: Configuration, n: int) -> Configuration:
    """Apply ``P(T)**n``: every point moves ``n`` floors up."""
    if n < 0:
        raise ValueError("n must be >= 0")
    window = shift(config.window, n)
    return Configuration(config.stage, window, tuple(x + n for x in config.points), config.seed_trace)


# -- Monte Carlo ----------------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloResult:
    successes: int
    samples: int
    seed: int

    @property
    def estimate(self) -> float:
        return self.successes / self.samples

    @property
    def stderr(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.samples)


def joint_window(con: Construction, spec: JointSpec) -> tuple[LevelSet, list[LevelSet]]:
    """Common sampling window and the shifted factor sets inside it."""
    shifts = [f.shift for f in spec.factors]
    c = -min(0, min(shifts))
    K = con.choose_work_stage([f.A for f in spec.factors], max(shifts) + c)
    sets = [shift(con.lift(f.A, K), f.shift + c) for f in spec.factors]
    window = sets[0].with_ranges(canonical(r for s in sets for r in s.ranges))
    return window, sets


def _count_successes(window: LevelSet, sets: list[LevelSet], counts: tuple[int, ...],
                     seed: int, start: int, stop: int) -> int:
    sampler = _WindowSampler(window)
    hits = 0
    for idx in range(start, stop):
        pts = sampler.draw(seed, idx)
        if all(sum(1 for x in pts if x in s) == k for s, k in zip(sets, counts)):
            hits += 1
    return hits


def monte_carlo_joint(con: Construction, spec: JointSpec, samples: int, seed: int, *,
                      workers: int = 1) -> MonteCarloResult:
    if samples < 1:
        raise ConfigError("need at least one sample")
    window, sets = joint_window(con, spec)
    counts = spec.counts
    if workers <= 1:
        hits = _count_successes(window, sets, counts, seed, 0, samples)
    else:
        bounds = [samples * i // workers for i in range(workers + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_count_successes, window, sets, counts, seed, lo, hi)
                       for lo, hi in zip(bounds, bounds[1:])]
            hits = sum(f.result() for f in futures)
    return MonteCarloResult(hits, samples, seed)
