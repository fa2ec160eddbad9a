"""Acceptance suite: one test per criterion, each reported as PASS/FAIL in the terminal summary."""

import json
import math
import random
import time
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

import pytest

from sidon_poisson.cli import COMMANDS, main
from sidon_poisson.construction import Construction, ConstructionParams, intersect, union
from sidon_poisson.dynamics import (
    ShiftedTerm,
    expr_union_measure,
    intersect_shifted_measure,
    mixing_curve,
    sidon_sample,
    sidon_scan,
    sidon_witness,
    theorem3_stats,
)
from sidon_poisson.oracle import build_explicit, explicit_shift_measure, explicit_sidon, explicit_union_measure
from sidon_poisson.poisson import (
    CylinderSpec,
    JointFactor,
    JointSpec,
    cylinder_measure,
    joint_probability,
    mixing_gap,
    monte_carlo_joint,
)

from .conftest import TINY_A, TINY_B

ROOT = Path(__file__).resolve().parents[1]
TOL = Decimal("1e-12")


def dexp(q: Fraction, prec: int = 60) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = prec
        return (-Decimal(q.numerator) / Decimal(q.denominator)).exp()


def dsub(a: Decimal, b: Decimal, prec: int = 60) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = prec
        return a - b


def test_c01_geometry(criterion):
    with criterion("1 geometry d=11: h_1, h_2, h_3, mu(X_2)"):
        t0 = time.perf_counter()
        con = Construction(ConstructionParams.paper(11))
        assert (con.height(1), con.height(2), con.height(3)) == (1, 134, 2_158_472)
        assert con.tower(2).measure == 67
        assert build_explicit(con.params, 2).heights[-1] == 134
        assert time.perf_counter() - t0 < 1


@pytest.mark.parametrize("name,stages", [("TINY_A", TINY_A), ("TINY_B", TINY_B)])
def test_c02_oracle_equivalence(criterion, name, stages):
    with criterion(f"2 oracle equivalence on {name}"):
        t0 = time.perf_counter()
        con = Construction(ConstructionParams.explicit(stages))
        params = con.params
        stage = 3
        h = con.height(stage)
        rng = random.Random(20261018)

        def rand_levels():
            return sorted(rng.sample(range(h), rng.randint(1, h)))

        sets = [rand_levels() for _ in range(100)]
        for la in sets:
            lb = rand_levels()
            A, B = con.from_levels(stage, la), con.from_levels(stage, lb)
            for a in range(-h, h + 1):
                assert intersect_shifted_measure(con, A, B, a) == \
                    explicit_shift_measure(params, stage, la, stage, lb, a)
            terms = [[rng.randint(-h, h) for _ in range(rng.randint(1, 3))] for _ in range(rng.randint(1, 3))]
            assert expr_union_measure(con, A, [ShiftedTerm(t) for t in terms]) == \
                explicit_union_measure(params, stage, la, terms)
        for j in (1, 2, 3):
            g = con.geometry(j)
            for m in range(g.h + 1, g.next_height + 1):
                w = sidon_witness(con, j, m)
                assert (w.columns, w.measure) == explicit_sidon(params, j, m)
        assert max(build_explicit(params, 6).heights) <= 5000
        assert time.perf_counter() - t0 < 60


def test_c03_equation_2(criterion, paper):
    with criterion("3 identity defect = 2 mu(X_j)/r_j, d=11, j in {2,3}"):
        t0 = time.perf_counter()
        for j in (2, 3):
            X = paper.tower(j)
            r = theorem3_stats(paper, X, j)
            assert r.identity2_defect == 2 * X.measure / paper.geometry(j).r
        assert theorem3_stats(paper, paper.tower(2), 2).identity2_defect == Fraction(67, 2)
        assert time.perf_counter() - t0 < 60


def test_c04_theorem3_witnesses(criterion, paper):
    with criterion("4 exact witnesses for A = X_2, forward and inverse"):
        X2 = paper.tower(2)
        gaps = []
        for j, want in ((2, Fraction(67, 2)), (3, Fraction(201, 4))):
            r_j = paper.geometry(j).r
            fwd = theorem3_stats(paper, X2, j)
            inv = theorem3_stats(paper, X2, j, "inverse")
            assert (fwd.expr0, fwd.expr1) == (0, want) == (0, X2.measure * (r_j - 2) / r_j)
            assert (inv.expr0, inv.expr1) == (want, 0)
            gaps.append(abs(fwd.expr1 - X2.measure))
            assert gaps[-1] == 2 * X2.measure / r_j
        assert gaps[1] * 2 == gaps[0]


@pytest.mark.parametrize("spacer", [134, 16348])
def test_c05_qj_bound(criterion, paper, spacer):
    with criterion(f"5 Q_j bound with spacer floor {spacer}"):
        D = paper.from_levels(3, [spacer])
        assert intersect(D, paper.lift(paper.tower(2), 3)).is_empty
        A = union(paper.lift(paper.tower(2), 3), D)
        assert theorem3_stats(paper, A, 2).expr0 <= 3 * D.measure


def test_c06_sidon_and_decay(criterion, paper):
    with criterion("6 Sidon j=1 exhaustive, j=2 structured sample, single-column bounds"):
        X1, X2 = paper.tower(1), paper.tower(2)
        scan = sidon_scan(paper, 1)
        assert scan.mode == "exhaustive" and not scan.violations
        curve = mixing_curve(paper, X1, X1, list(range(2, 135)))
        assert all(v <= Fraction(1, 2) for _, v in curve)
        peaks = [n for n, v in curve if v == Fraction(1, 2)]
        assert peaks == [12] and set(peaks) <= set(paper.geometry(1).return_times)
        ns = sidon_sample(paper, 2, 64, seed=0)
        assert not [m for m in ns if sidon_witness(paper, 2, m).kind == "violation"]
        assert all(v <= Fraction(67, 4) for _, v in mixing_curve(paper, X2, X2, ns))


def test_c07_poisson_exact(criterion, paper):
    with criterion("7 Poisson cylinders: e^-1, normalisation, product law"):
        v = cylinder_measure(paper, CylinderSpec(((paper.tower(1), 0),)))
        assert abs(v.to_decimal(50) - dexp(Fraction(1))) < TOL
        for mu in (Fraction(1, 8), Fraction(1), Fraction(3), Fraction(4)):
            A = paper.level_set(4, [(0, int(mu * 64))])
            with localcontext() as ctx:
                ctx.prec = 50
                total = sum(cylinder_measure(paper, CylinderSpec(((A, k),)), count_cap=40).to_decimal(50)
                            for k in range(41))
            assert abs(total - 1) < TOL
        A, B = paper.level_set(2, [(0, 10)]), paper.level_set(2, [(50, 77)])
        for ka in range(4):
            for kb in range(4):
                assert cylinder_measure(paper, CylinderSpec(((A, ka), (B, kb)))) == \
                    cylinder_measure(paper, CylinderSpec(((A, ka),))) * cylinder_measure(paper, CylinderSpec(((B, kb),)))


def test_c08_mixing_gap(criterion, paper):
    with criterion("8 mixing gap at n=12 and single-column bound on (h_2, h_3]"):
        C1 = CylinderSpec(((paper.tower(1), 0),))
        want = dsub(dexp(Fraction(3, 2)), dexp(Fraction(2)))
        assert abs(mixing_gap(paper, C1, C1, 12) - want) < TOL
        X2 = paper.tower(2)
        C2 = CylinderSpec(((X2, 0),))
        mu = X2.measure
        bound = dsub(dexp(2 * mu - mu / 4), dexp(2 * mu))
        ns = [m for m in sidon_sample(paper, 2, 32, seed=1) if sidon_witness(paper, 2, m).kind != "violation"]
        gaps = [mixing_gap(paper, C2, C2, n, precision=60) for n in ns]
        assert all(g <= bound for g in gaps)
        assert max(gaps) == bound


def test_c09_monte_carlo(criterion, paper):
    with criterion("9 Monte Carlo seed 42, N=1e5, 4 SE, worker-count determinism"):
        t0 = time.perf_counter()
        X1 = paper.tower(1)
        spec = JointSpec((JointFactor(X1, 12, 0), JointFactor(X1, 0, 0)))
        p = float(joint_probability(paper, spec).to_decimal(30))
        res = monte_carlo_joint(paper, spec, 100_000, 42, workers=1)
        se = math.sqrt(p * (1 - p) / res.samples)
        assert abs(res.estimate - p) < 4 * se
        assert monte_carlo_joint(paper, spec, 100_000, 42, workers=2) == res
        assert time.perf_counter() - t0 < 60


def test_c10_cli_determinism(criterion, tmp_path):
    with criterion("10 CLI reruns byte-identical for every subcommand"):
        for cmd in COMMANDS:
            cfg = ROOT / "configs" / ("tiny_explicit.json" if cmd == "oracle-check" else "paper_d11.json")
            blobs = []
            for i in range(2):
                out = tmp_path / f"{cmd}-{i}"
                assert main([cmd, "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
                blobs.append(((out / f"{cmd}.csv").read_bytes(), (out / f"{cmd}.json").read_bytes()))
                json.loads(blobs[-1][1])
            assert blobs[0] == blobs[1]
