"""Batch front end.

    sidon-poisson <command> --config run.json --out reports/

Each command writes ``<out>/<command>.csv`` and ``<out>/<command>.json``.
Exit codes: 0 ok, 1 invariant violation found, 2 bad configuration,
3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import dynamics, oracle, poisson
from .config import RunConfig, level_set_to_json, params_to_json, to_int
from .construction import Construction, LevelSet, PaperSidon
from .dynamics import ShiftedTerm, fraction_str, render
from .errors import ConfigError, InvariantViolation, ResourceLimit

log = logging.getLogger("sidon_poisson")

COMMANDS = ("stages", "sidon", "theorem3", "asymmetry", "mixing",
            "poisson-exact", "poisson-mc", "oracle-check")

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass
class Report:
    command: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    violation: bool = False


def _q(row: dict, name: str, q: Fraction, digits: int):
    row[name] = fraction_str(q)
    row[name + "_dec"] = render(q, digits)


def _block(cfg: RunConfig, key: str) -> dict:
    if key not in cfg.raw:
        raise ConfigError(f"config has no {key!r} block")
    return cfg.raw[key]


# -- commands ----------------------------------------------------------------

def cmd_stages(cfg: RunConfig, con: Construction) -> Report:
    to = to_int(_block(cfg, "stages")["to"])
    if to < 1:
        raise ConfigError("stages.to must be >= 1")
    rep = Report("stages", ["j", "r_j", "h_j", "w_j", "w_j_dec", "mu_X_j", "mu_X_j_dec",
                            "spacer_sum", "sum_inv_r", "sum_inv_r_dec"])
    partial = dynamics.spectral_condition_report(con, to)
    prev = None
    for j in range(1, to + 1):
        g = con.geometry(j)
        X = con.tower(j)
        row = {"j": j, "r_j": g.r, "h_j": str(g.h), "spacer_sum": str(sum(g.spacers))}
        _q(row, "w_j", g.w, cfg.precision)
        _q(row, "mu_X_j", X.measure, cfg.precision)
        _q(row, "sum_inv_r", partial[j - 1], cfg.precision)
        if prev is not None and X.measure < prev:
            rep.violation = True
        prev = X.measure
        rep.rows.append(row)
    rep.summary = {"measure_nondecreasing": not rep.violation}
    return rep


def cmd_sidon(cfg: RunConfig, con: Construction) -> Report:
    blk = _block(cfg, "sidon")
    budget = to_int(blk.get("budget", dynamics.DEFAULT_SIDON_BUDGET))
    n_random = to_int(blk.get("random", 64))
    rep = Report("sidon", ["j", "m", "kind", "columns", "measure", "measure_dec", "bound"])
    for j in map(to_int, blk["j"]):
        scan = dynamics.sidon_scan(con, j, budget=budget, n_random=n_random, seed=cfg.seed)
        bound = con.tower(j).measure / con.geometry(j).r
        worst = Fraction(0)
        for w in scan.witnesses:
            worst = max(worst, w.measure)
            if w.kind == "empty":
                continue
            row = {"j": j, "m": str(w.m), "kind": w.kind, "columns": " ".join(map(str, w.columns)),
                   "bound": fraction_str(bound)}
            _q(row, "measure", w.measure, cfg.precision)
            rep.rows.append(row)
        rep.summary[f"j={j}"] = {
            "mode": scan.mode, "tested": len(scan.witnesses), "violations": len(scan.violations),
            "max_measure": fraction_str(worst), "single_column_bound": fraction_str(bound),
            "bound_holds": worst <= bound,
            "range": [str(con.geometry(j).h + 1), str(con.geometry(j).next_height)],
        }
        if scan.violations or worst > bound:
            rep.violation = True
    return rep


def cmd_theorem3(cfg: RunConfig, con: Construction) -> Report:
    blk = _block(cfg, "theorem3")
    A = cfg.resolve_set(con, blk["set"])
    dirs = blk.get("directions", ["forward", "inverse"])
    cols = ["j", "direction", "r_j"]
    for name in ("mu_A", "expr0", "expr1", "identity2_defect"):
        cols += [name, name + "_dec"]
    rep = Report("theorem3", cols + ["defect_formula"])
    for j in map(to_int, blk["j"]):
        for d in dirs:
            r = dynamics.theorem3_stats(con, A, j, d)
            row = r.rows(cfg.precision)
            # the closed form 2 mu(A)/r_j is a forward-direction identity
            row["defect_formula"] = fraction_str(2 * r.mu_A / r.r_j) if d == "forward" else ""
            rep.rows.append(row)
    rep.summary = {"set": level_set_to_json(A)}
    return rep


def cmd_asymmetry(cfg: RunConfig, con: Construction) -> Report:
    blk = _block(cfg, "asymmetry")
    A = cfg.resolve_set(con, blk["set"])
    rep = Report("asymmetry", ["j", "r_j", "mu_A", "T_expr0", "T_expr1", "Tinv_expr0", "Tinv_expr1",
                               "T_expr1_dec", "Tinv_expr0_dec", "mirror"])
    for j in map(to_int, blk["j"]):
        f = dynamics.theorem3_stats(con, A, j, "forward")
        b = dynamics.theorem3_stats(con, A, j, "inverse")
        rep.rows.append({
            "j": j, "r_j": f.r_j, "mu_A": fraction_str(f.mu_A),
            "T_expr0": fraction_str(f.expr0), "T_expr1": fraction_str(f.expr1),
            "Tinv_expr0": fraction_str(b.expr0), "Tinv_expr1": fraction_str(b.expr1),
            "T_expr1_dec": render(f.expr1, cfg.precision), "Tinv_expr0_dec": render(b.expr0, cfg.precision),
            "mirror": (f.expr0, f.expr1) == (b.expr1, b.expr0),
        })
    rep.summary = {"set": level_set_to_json(A)}
    return rep


def _ns(blk: dict) -> list[int]:
    ns = [to_int(n) for n in blk.get("n", [])]
    if "range" in blk:
        rg = blk["range"]
        ns += list(range(to_int(rg["start"]), to_int(rg["stop"]), to_int(rg.get("step", 1))))
    if not ns:
        raise ConfigError("mixing needs 'n' and/or 'range'")
    return ns


def cmd_mixing(cfg: RunConfig, con: Construction) -> Report:
    blk = _block(cfg, "mixing")
    A, B = cfg.resolve_set(con, blk["a"]), cfg.resolve_set(con, blk["b"])
    rep = Report("mixing", ["n", "value", "value_dec"])
    for n, v in dynamics.mixing_curve(con, A, B, _ns(blk)):
        row = {"n": str(n)}
        _q(row, "value", v, cfg.precision)
        rep.rows.append(row)
    rep.summary = {"a": level_set_to_json(A), "b": level_set_to_json(B)}
    return rep


def _cyl(cfg: RunConfig, con: Construction, parts: list[dict]) -> poisson.CylinderSpec:
    return poisson.CylinderSpec(tuple((cfg.resolve_set(con, p["set"]), to_int(p["k"])) for p in parts))


def _joint(cfg: RunConfig, con: Construction, factors: list[dict]) -> poisson.JointSpec:
    return poisson.JointSpec(tuple(
        poisson.JointFactor(cfg.resolve_set(con, f["set"]), to_int(f["shift"]), to_int(f["k"]))
        for f in factors))


def _pv(row: dict, v: poisson.ExactPoissonValue, digits: int):
    row["coeff"] = fraction_str(v.coeff)
    row["rate"] = fraction_str(v.rate)
    row["value_dec"] = str(v.to_decimal(digits))


def cmd_poisson_exact(cfg: RunConfig, con: Construction) -> Report:
    blk = _block(cfg, "poisson_exact")
    rep = Report("poisson-exact", ["kind", "name", "n", "coeff", "rate", "value_dec"])
    for c in blk.get("cylinders", []):
        row = {"kind": "cylinder", "name": c["name"], "n": ""}
        _pv(row, poisson.cylinder_measure(con, _cyl(cfg, con, c["parts"])), cfg.precision)
        rep.rows.append(row)
    for jn in blk.get("joints", []):
        row = {"kind": "joint", "name": jn["name"], "n": ""}
        _pv(row, poisson.joint_probability(con, _joint(cfg, con, jn["factors"])), cfg.precision)
        rep.rows.append(row)
    for g in blk.get("gaps", []):
        C, Cp = _cyl(cfg, con, g["c"]), _cyl(cfg, con, g["c_prime"])
        for n in map(to_int, g["n"]):
            gap = poisson.mixing_gap(con, C, Cp, n, precision=cfg.precision)
            rep.rows.append({"kind": "gap", "name": g["name"], "n": str(n), "coeff": "", "rate": "",
                             "value_dec": str(gap)})
    return rep


def cmd_poisson_mc(cfg: RunConfig, con: Construction) -> Report:
    blk = _block(cfg, "poisson_mc")
    rep = Report("poisson-mc", ["name", "samples", "seed", "successes", "estimate", "stderr",
                                "exact_dec", "z"])
    for run in blk["runs"]:
        spec = _joint(cfg, con, run["factors"])
        res = poisson.monte_carlo_joint(con, spec, to_int(run["samples"]), cfg.seed,
                                        workers=run.get("workers", 1))
        exact = float(poisson.joint_probability(con, spec).to_decimal(30))
        z = abs(res.estimate - exact) / res.stderr if res.stderr > 0 else float("inf")
        rep.rows.append({
            "name": run["name"], "samples": res.samples, "seed": str(res.seed), "successes": res.successes,
            "estimate": repr(res.estimate), "stderr": repr(res.stderr),
            "exact_dec": repr(exact), "z": f"{z:.4f}",
        })
        if z > 4:
            rep.violation = True
    return rep


def _random_levels(rng: random.Random, h: int) -> list[int]:
    k = rng.randint(1, max(1, h))
    return sorted(rng.sample(range(h), k))


def cmd_oracle_check(cfg: RunConfig, con: Construction) -> Report:
    blk = _block(cfg, "oracle_check")
    j0 = to_int(blk["set_stage"])
    n_sets = to_int(blk.get("random_sets", 100))
    max_shift = to_int(blk.get("max_shift", con.height(j0)))
    budget = cfg.budget_floors
    rng = random.Random(cfg.seed)
    h = con.height(j0)
    mismatches = {"intersect": 0, "union": 0, "sidon": 0}
    cases = {"intersect": 0, "union": 0, "sidon": 0}
    examples = []
    for _ in range(n_sets):
        la, lb = _random_levels(rng, h), _random_levels(rng, h)
        A, B = con.from_levels(j0, la), con.from_levels(j0, lb)
        for a in range(-max_shift, max_shift + 1):
            got = dynamics.intersect_shifted_measure(con, A, B, a)
            want = oracle.explicit_shift_measure(con.params, j0, la, j0, lb, a, budget)
            cases["intersect"] += 1
            if got != want:
                mismatches["intersect"] += 1
                examples.append({"check": "intersect", "a": a, "engine": str(got), "oracle": str(want)})
        terms = [tuple(rng.randint(-max_shift, max_shift) for _ in range(rng.randint(1, 3)))
                 for _ in range(rng.randint(1, 3))]
        got = dynamics.expr_union_measure(con, A, [ShiftedTerm(t) for t in terms])
        want = oracle.explicit_union_measure(con.params, j0, la, terms, budget)
        cases["union"] += 1
        if got != want:
            mismatches["union"] += 1
            examples.append({"check": "union", "terms": [list(t) for t in terms],
                             "engine": str(got), "oracle": str(want)})
    for j in map(to_int, blk.get("sidon_j", [])):
        g = con.geometry(j)
        for m in range(g.h + 1, g.next_height + 1):
            w = dynamics.sidon_witness(con, j, m)
            cols, mu = oracle.explicit_sidon(con.params, j, m, budget)
            cases["sidon"] += 1
            if (w.columns, w.measure) != (cols, mu):
                mismatches["sidon"] += 1
                examples.append({"check": "sidon", "j": j, "m": m, "engine": list(w.columns), "oracle": list(cols)})
    rep = Report("oracle-check", ["check", "cases", "mismatches"])
    for k in cases:
        rep.rows.append({"check": k, "cases": cases[k], "mismatches": mismatches[k]})
    rep.summary = {"set_stage": j0, "random_sets": n_sets, "max_shift": max_shift,
                   "budget_floors": str(budget), "first_mismatches": examples[:20]}
    rep.violation = any(mismatches.values())
    return rep


HANDLERS = {
    "stages": cmd_stages, "sidon": cmd_sidon, "theorem3": cmd_theorem3, "asymmetry": cmd_asymmetry,
    "mixing": cmd_mixing, "poisson-exact": cmd_poisson_exact, "poisson-mc": cmd_poisson_mc,
    "oracle-check": cmd_oracle_check,
}


# -- output -------------------------------------------------------------------

def render_csv(rep: Report) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=rep.columns, lineterminator="\n", extrasaction="raise")
    w.writeheader()
    for row in rep.rows:
        w.writerow(row)
    return buf.getvalue()


def render_json(rep: Report, cfg: RunConfig) -> str:
    doc = {
        "command": rep.command,
        "params": params_to_json(cfg.params),
        "provenance": {"seed": str(cfg.seed), "precision": cfg.precision, "stage_cap": cfg.stage_cap,
                       "budget_floors": str(cfg.budget_floors)},
        "config": cfg.raw,
        "columns": rep.columns,
        "rows": rep.rows,
        "summary": rep.summary,
        "violation": rep.violation,
    }
    return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"


def render_table(rep: Report, max_rows: int = 40) -> str:
    cols = rep.columns
    rows = [[str(r.get(c, "")) for c in cols] for r in rep.rows[:max_rows]]
    widths = [max([len(c)] + [len(r[i]) for r in rows]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in rows]
    if len(rep.rows) > max_rows:
        lines.append(f"... {len(rep.rows) - max_rows} more rows")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sidon-poisson", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="run configuration (JSON)")
    p.add_argument("--out", default=".", help="directory for CSV/JSON reports")
    p.add_argument("--precision", type=int, help="significant digits in decimal renderings")
    p.add_argument("--seed", type=int, help="RNG seed (u64), overrides the config")
    p.add_argument("--budget-floors", type=int, help="floor budget for the brute-force oracle")
    p.add_argument("--stage-cap", type=int, help="largest work stage the engine may use")
    p.add_argument("--quiet", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        cfg = RunConfig.load(args.config)
        if args.precision is not None:
            cfg.precision = args.precision
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be a u64")
            cfg.seed = args.seed
        if args.budget_floors is not None:
            cfg.budget_floors = args.budget_floors
        if args.stage_cap is not None:
            cfg.stage_cap = args.stage_cap
        if isinstance(cfg.params.rule, PaperSidon) and cfg.params.rule.d <= 10:
            log.warning("warning: d = %d <= 10; the 2^j, d^i·h_j family assumes d > 10",
                        cfg.params.rule.d)
        rep = HANDLERS[args.command](cfg, cfg.construction())
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.command
    (out / f"{stem}.csv").write_text(render_csv(rep), encoding="utf-8", newline="\n")
    (out / f"{stem}.json").write_text(render_json(rep, cfg), encoding="utf-8", newline="\n")
    if not args.quiet:
        print(render_table(rep))
    if rep.violation:
        print(f"{stem}: invariant violation detected (see {out / stem}.json)", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
