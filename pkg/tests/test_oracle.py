from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sidon_poisson.construction import ConstructionParams
from sidon_poisson.dynamics import ShiftedTerm, expr_union_measure, intersect_shifted_measure, sidon_witness
from sidon_poisson.errors import HeadroomViolation, ResourceLimit
from sidon_poisson.oracle import (
    build_explicit,
    explicit_measure,
    explicit_shift_measure,
    explicit_sidon,
    explicit_union_measure,
)

from .conftest import level_lists


def test_build_trivial():
    t = build_explicit(ConstructionParams.explicit([(2, (0, 0))]), 2)
    assert t.heights[-1] == 2 and t.width == Fraction(1, 2)


def test_build_hand_recursion():
    t = build_explicit(ConstructionParams.explicit([(2, (1, 2)), (2, (0, 1))]), 3)
    assert t.heights == [1, 5, 11]
    assert t.parent_maps[0] == [[0], [2]]
    assert t.parent_maps[1] == [list(range(0, 5)), list(range(5, 10))]


def test_build_paper():
    assert build_explicit(ConstructionParams.paper(11), 2).heights[-1] == 134


def test_budget():
    with pytest.raises(ResourceLimit):
        build_explicit(ConstructionParams.paper(11), 3, budget=10**5)


def test_offsets_match_engine(paper):
    t = build_explicit(paper.params, 3, budget=3_000_000)
    for j in (1, 2):
        assert [col[0] for col in t.parent_maps[j - 1]] == list(paper.geometry(j).offsets)


def test_measure_basics():
    t = build_explicit(ConstructionParams.explicit([(2, (1, 2)), (2, (0, 1))]), 3)
    A = set(range(11))
    assert explicit_measure(t, {1, 2, 3}, {2, 3, 9}, 0) == 2 * t.width
    for a in range(0, 11):
        assert explicit_measure(t, set(range(11 - a)), A, a) == t.width * (11 - a)
    with pytest.raises(HeadroomViolation):
        explicit_measure(t, A, A, 1)


@settings(max_examples=80, deadline=None)
@given(data=st.data())
def test_intersect_equivalence(tiny_b, data):
    la = data.draw(level_lists(17))
    lb = data.draw(level_lists(17))
    a = data.draw(st.integers(-17, 17))
    A, B = tiny_b.from_levels(3, la), tiny_b.from_levels(3, lb)
    assert intersect_shifted_measure(tiny_b, A, B, a) == explicit_shift_measure(tiny_b.params, 3, la, 3, lb, a)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_union_equivalence(tiny_a, data):
    la = data.draw(level_lists(13, min_size=1))
    terms = data.draw(st.lists(st.lists(st.integers(-13, 13), min_size=1, max_size=3), min_size=1, max_size=3))
    A = tiny_a.from_levels(3, la)
    assert expr_union_measure(tiny_a, A, [ShiftedTerm(t) for t in terms]) == \
        explicit_union_measure(tiny_a.params, 3, la, terms)


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_sidon_equivalence(tiny_a, j):
    g = tiny_a.geometry(j)
    for m in range(g.h + 1, g.next_height + 1):
        w = sidon_witness(tiny_a, j, m)
        assert (w.columns, w.measure) == explicit_sidon(tiny_a.params, j, m)


def test_sidon_paper_j1_exhaustive(paper):
    for m in range(2, 135):
        w = sidon_witness(paper, 1, m)
        assert (w.columns, w.measure) == explicit_sidon(paper.params, 1, m, budget=3_000_000)
