"""End-to-end acceptance gate.

Each test covers one release criterion and appends a PASS/FAIL line to the
summary block printed after the run. Criterion 05 asserts the collapsed form
of the triple-count Cauchy step, which is false in general (the degenerate
shifted pair makes the square sum grow with the product subgroup); it fails
honestly and README.md documents the analysis. Its companion 05b asserts the
intermediate form, which holds everywhere we can test it.
"""

from __future__ import annotations

import json
import time
from dataclasses import replace
from functools import lru_cache
from math import ceil, gcd, isqrt, log, sqrt
from pathlib import Path

import numpy as np
import pytest

from sparsesums import (
    CharacterIndex,
    all_subgroups,
    bilinear_sum,
    cauchy_step_report,
    d_times,
    i_distribution,
    is_prime,
    mult_energy,
    n_triples,
    power_image,
    product_set,
    quadlinear_general_bound,
    quadlinear_subgroup_bound,
    subgroup_of_order,
    sum_decomposed,
    sum_exact,
    weil_bound,
)
from sparsesums.sweep import (
    SweepConfig,
    random_quadrinomial,
    ratio_scan,
    records_to_jsonl,
    run_sweep,
)
from conftest import ACCEPTANCE_LINES, ctx_for

BASELINE_PATH = Path(__file__).parent / "data" / "ratio_baselines.json"

PRIMES_TO_499 = [p for p in range(11, 500) if is_prime(p)]

SEED = 20260814


def note(name: str, ok: bool, detail: str) -> bool:
    line = f"{name:<30} {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def budgeted_quadrinomial(p: int, index: int, budget: int = 10_000_000):
    """Seeded quadrinomial whose grouped evaluation stays within budget."""
    for attempt in range(200):
        psi = random_quadrinomial(p, SEED, index + 10_000 * attempt)
        k, l, m, _ = psi.exponents
        cost = gcd(k, p - 1) * gcd(l, p - 1) * gcd(m, p - 1) * (p - 1)
        if cost <= budget:
            return psi
    raise RuntimeError(f"no budget-compliant quadrinomial at p={p}")


@lru_cache(maxsize=1)
def identity_instances():
    """(p, poly, j) grid shared by the decomposition and Weil criteria."""
    out = []
    for p in PRIMES_TO_499:
        for i in range(2):
            psi = budgeted_quadrinomial(p, i)
            jr = np.random.default_rng([SEED, p, i]).integers(0, p - 1)
            for j in (0, 1, int(jr)):
                out.append((p, psi, j))
    return out


def test_01_decomposition_identity():
    t0 = time.time()
    checked = failures = 0
    worst = 0.0
    for p, psi, j in identity_instances():
        ctx = ctx_for(p)
        direct = sum_exact(ctx, psi, CharacterIndex(j))
        grouped = sum_decomposed(ctx, psi, CharacterIndex(j), budget=10_000_000)
        rel = abs(direct.value - grouped.value) / (direct.magnitude + 1.0)
        worst = max(worst, rel)
        checked += 1
        failures += rel >= 1e-6
    ok = failures == 0 and checked >= 500
    assert note(
        "01 decomposition identity",
        ok,
        f"{checked - failures}/{checked} rel<1e-6, worst {worst:.2e}, {time.time() - t0:.1f}s",
    )


def test_02_weil_inequality():
    violations = []
    for p, psi, j in identity_instances():
        mag = sum_exact(ctx_for(p), psi, CharacterIndex(j)).magnitude
        bound = weil_bound(p, psi.exponents)
        if mag > bound + 1e-9:
            violations.append((p, str(psi), j, mag, bound))
    total = len(identity_instances())
    detail = f"{total - len(violations)}/{total} within max(k)*sqrt(p)"
    if violations:
        detail += f"; violations: {violations[:3]}"
    assert note("02 weil inequality", not violations, detail)


def test_03_bilinear_inequality():
    rng = np.random.default_rng(SEED)
    checked = failures = 0
    for _ in range(200):
        p = int(rng.choice(PRIMES_TO_499))
        ctx = ctx_for(p)
        nx = int(rng.integers(2, min(p - 1, 60)))
        ny = int(rng.integers(2, min(p - 1, 60)))
        xs = rng.choice(p, size=nx, replace=False)
        ys = rng.choice(p, size=ny, replace=False)
        aw = np.exp(2j * np.pi * rng.random(nx))
        bw = np.exp(2j * np.pi * rng.random(ny))
        sv = bilinear_sum(ctx, xs, ys, aw, bw)
        checked += 1
        failures += sv.magnitude > sqrt(p * nx * ny) + 1e-9
    assert note(
        "03 bilinear inequality", failures == 0, f"{checked - failures}/{checked} within sqrt(pAB)"
    )


def test_04_exact_identities():
    t0 = time.time()
    # multiplicative energy of a subgroup with itself is |G|^3
    cube_checked = cube_bad = 0
    for p in PRIMES_TO_499:
        ctx = ctx_for(p)
        for sub in all_subgroups(ctx):
            cube_checked += 1
            cube_bad += mult_energy(ctx, sub, sub).count != sub.order**3

    # sum of squared shift counts equals the triple count
    pair_checked = pair_bad = 0
    for p in (13, 31, 61, 101):
        ctx = ctx_for(p)
        subs = all_subgroups(ctx)
        for w in subs:
            for z in subs:
                if w.order**2 * z.order > 100_000:
                    continue
                dist = i_distribution(ctx, w, z)
                square_sum = sum(v * v for v in dist.table.values())
                pair_checked += 1
                pair_bad += square_sum != n_triples(ctx, z, w, w).count

    # product sets of subgroups are the lcm-order subgroups
    triple_checked = triple_bad = 0
    for p in (13, 31, 61, 101, 199):
        ctx = ctx_for(p)
        subs = all_subgroups(ctx)
        for a in subs:
            for b in subs:
                for c in subs:
                    prod = product_set(ctx, [a, b, c])
                    want = np.lcm.reduce([a.order, b.order, c.order])
                    triple_checked += 1
                    triple_bad += prod.order != int(want)

    # power image size and multiplicity formulas
    img_checked = img_bad = 0
    for p in PRIMES_TO_499:
        ctx = ctx_for(p)
        subs = all_subgroups(ctx) if p <= 199 else []
        for n in range(1, 51):
            delta = gcd(n, p - 1)
            img = power_image(ctx, None, n)
            img_checked += 1
            img_bad += (len(img.image), img.multiplicity) != ((p - 1) // delta, delta)
            for sub in subs:
                shared = gcd(sub.order, delta)
                sub_img = power_image(ctx, sub, n)
                img_checked += 1
                img_bad += (len(sub_img.image), sub_img.multiplicity) != (
                    sub.order // shared,
                    shared,
                )

    ok = (
        cube_bad == pair_bad == triple_bad == img_bad == 0
        and pair_checked >= 50
        and triple_checked >= 100
    )
    assert note(
        "04 exact identities",
        ok,
        f"energy {cube_checked}, shifts {pair_checked}, products {triple_checked}, "
        f"images {img_checked}, {time.time() - t0:.1f}s",
    )


def cauchy_triples():
    out = []
    for p in (11, 13, 17, 19, 23, 29, 31, 37, 41):
        ctx = ctx_for(p)
        divisors = [d for d in range(1, p) if (p - 1) % d == 0]
        for df in divisors:
            for dg in divisors:
                for dh in divisors:
                    if dg < dh or df * dg * dg > 100_000:
                        continue
                    out.append((p, df, dg, dh))
    return out


def test_05_cauchy_step_collapsed():
    # The collapsed chain N^2 <= (F^4 G^2 H^2 / |S|) sqrt(E(G-1) E(H-1))
    # drops the degenerate (0,0) difference pair, whose contribution grows
    # with the product subgroup; the inequality is false in general. This
    # gate is kept as stated and fails honestly.
    total = violations = 0
    worst_ratio, worst_at = 0.0, None
    for p, df, dg, dh in cauchy_triples():
        ctx = ctx_for(p)
        rep = cauchy_step_report(
            ctx,
            subgroup_of_order(ctx, df),
            subgroup_of_order(ctx, dg),
            subgroup_of_order(ctx, dh),
        )
        total += 1
        if not rep.collapsed_holds:
            violations += 1
            lhs = rep.n**4 * rep.product_order**2
            rhs = df**8 * dg**4 * dh**4 * rep.energy_g * rep.energy_h
            if rhs and lhs / rhs > worst_ratio:
                worst_ratio, worst_at = lhs / rhs, (p, df, dg, dh)
    ok = violations == 0 and total >= 50
    note(
        "05 cauchy step (collapsed)",
        ok,
        f"{total - violations}/{total} hold; worst lhs/rhs {worst_ratio:.1f} at {worst_at}",
    )
    assert ok, (
        f"collapsed inequality failed on {violations}/{total} subgroup triples "
        f"(worst ratio {worst_ratio:.1f} at (p,F,G,H)={worst_at}); the chain is "
        "false as stated because the zero difference pair contributes |S| to the "
        "shift-count square sum but only O(1) to the energy product. The "
        "intermediate form is verified green in the companion check; see README."
    )


def test_05b_cauchy_step_intermediate():
    total = bad = 0
    for p, df, dg, dh in cauchy_triples():
        ctx = ctx_for(p)
        rep = cauchy_step_report(
            ctx,
            subgroup_of_order(ctx, df),
            subgroup_of_order(ctx, dg),
            subgroup_of_order(ctx, dh),
        )
        total += 1
        bad += not rep.intermediate_holds
    assert note(
        "05b cauchy step (intermediate)", bad == 0, f"{total - bad}/{total} triples hold exactly"
    )


def test_06_oracle_optimized_equivalence():
    rng = np.random.default_rng(SEED + 6)
    energy_n = dtimes_n = triples_n = mismatches = 0
    for _ in range(100):
        p = int(rng.choice([13, 31, 61, 101, 199]))
        ctx = ctx_for(p)
        top = min(p - 1, 30)
        us = rng.choice(p - 1, size=int(rng.integers(2, top)), replace=False) + 1
        vs = rng.choice(p - 1, size=int(rng.integers(2, top)), replace=False) + 1
        a = mult_energy(ctx, us, vs, method="optimized").count
        b = mult_energy(ctx, us, vs, method="oracle").count
        energy_n += 1
        mismatches += a != b
    for p in PRIMES_TO_499:
        ctx = ctx_for(p)
        for sub in all_subgroups(ctx):
            if not 2 <= sub.order <= 60 or dtimes_n >= 120:
                continue
            dtimes_n += 1
            mismatches += (
                d_times(ctx, sub, method="optimized").count
                != d_times(ctx, sub, method="oracle").count
            )
    for _ in range(100):
        p = int(rng.choice([13, 31, 61]))
        ctx = ctx_for(p)
        sets = [
            (rng.choice(p - 1, size=int(rng.integers(2, 10)), replace=False) + 1)
            for _ in range(3)
        ]
        triples_n += 1
        mismatches += (
            n_triples(ctx, *sets, method="optimized").count
            != n_triples(ctx, *sets, method="oracle").count
        )
    ok = mismatches == 0 and min(energy_n, dtimes_n, triples_n) >= 100
    assert note(
        "06 oracle equivalence",
        ok,
        f"energy {energy_n}, dtimes {dtimes_n}, triples {triples_n}, mismatches {mismatches}",
    )


def test_07_worked_small_values():
    results = []
    ctx13 = ctx_for(13)
    ctx5 = ctx_for(5)
    for method in ("optimized", "oracle"):
        results.append(mult_energy(ctx13, [2, 4, 10], [2, 4, 10], method=method).count == 15)
        results.append(d_times(ctx5, [1, 4], method=method).count == 152)
        dist = i_distribution(
            ctx13, subgroup_of_order(ctx13, 2), subgroup_of_order(ctx13, 1), method=method
        )
        results.append(dist.table == {0: 2, 11: 1, 2: 1})
    ok = all(results)
    assert note("07 worked small values", ok, f"{sum(results)}/{len(results)} via both routes")


def test_08_growth_exponent_comparison():
    # at W=X=Y=Z=ceil(sqrt p) the two quadrilinear bounds should differ by
    # the factor p^(1/64); compare the dominant regime term, since the
    # subgroup bound's leading term carries a smaller exponent
    errors = []
    for p in (10_007, 100_003):
        w = ceil(sqrt(p))
        pb = quadlinear_subgroup_bound(p, w, w, w, w)
        general = quadlinear_general_bound(p, w, w, w, w)
        observed = abs(log(general / pb.regime_term))
        target = (63 / 32 - 125 / 64) * log(p)
        errors.append(abs(observed - target) / target)
    ok = all(e < 0.05 for e in errors)
    assert note(
        "08 growth exponents",
        ok,
        f"log-ratio errors {errors[0]:.2%} (p=10007), {errors[1]:.2%} (p=100003)",
    )


def test_09_ratio_regression():
    t0 = time.time()
    baselines = json.loads(BASELINE_PATH.read_text())
    scan = ratio_scan(baselines["p_limit"], baselines["triple_budget"])
    below_ceiling = all(scan[k]["max_ratio"] < 100.0 for k in ("dx", "shifted", "ntriples"))
    regressions = []
    for key in ("dx", "shifted", "ntriples"):
        stored = baselines[key]["max_ratio"]
        if scan[key]["max_ratio"] > stored * (1 + 1e-9):
            regressions.append((key, scan[key]["max_ratio"], stored))
    ok = below_ceiling and not regressions
    detail = (
        f"dx {scan['dx']['max_ratio']:.3f}, shifted {scan['shifted']['max_ratio']:.3f}, "
        f"triples {scan['ntriples']['max_ratio']:.3f} vs ceiling 100, {time.time() - t0:.0f}s"
    )
    if regressions:
        detail += f"; regressions {regressions}"
    assert note("09 ratio regression", ok, detail)


def test_10_sweep_determinism():
    cfg = SweepConfig.from_dict(
        {
            "primes": {"start": 11, "stop": 61},
            "polynomials": {"random": {"count": 2}},
            "characters": [0, 1, "random"],
            "seed": 424242,
        }
    )
    serial_a = run_sweep(cfg)
    serial_b = run_sweep(cfg)
    parallel = run_sweep(replace(cfg, workers=4))
    body = lambda recs: records_to_jsonl(recs, cfg).split("\n", 1)[1]
    identical = body(serial_a) == body(serial_b)
    equivalent = serial_a == parallel
    ok = identical and equivalent
    assert note(
        "10 sweep determinism",
        ok,
        f"{len(serial_a)} records; rerun identical={identical}, workers 1==4: {equivalent}",
    )
