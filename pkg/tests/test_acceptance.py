"""Acceptance suite: runs every exit criterion at its stated tolerance and
prints one pass/fail line per criterion (visible with pytest -s/-v)."""

import math
import time
from itertools import product

import numpy as np
import pytest

from bjlab import (
    AtomPartition,
    BochnerElement,
    ScalingOperator,
    SpaceSpec,
    bochner_norm,
    certificate_check,
    draw_orthogonal_pair,
    inner_duality_map,
    is_approx_bj_orthogonal,
    is_bj_orthogonal,
    is_scalar_multiple_of_isometry,
    min_certificate_value,
    preservation_trial,
    random_element,
    sip_axiom_report,
    u_eps_L1,
    u_eps_l1,
    u_eps_Lp,
)
from bjlab.harness import trial_rng
from oracles import brute_min_certificate, central_diff_gradient

EPS_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
TOL = 1e-9


def _report(criterion: str, ok: bool, detail: str):
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'} - {detail}")


def _run_sweep(spec, operator_for_eps, seed, trials_per_eps):
    counts = {"pass": 0, "fail": 0, "boundary": 0}
    disagreements = 0
    idx = 0
    for eps in EPS_GRID:
        U = operator_for_eps(eps)
        for _ in range(trials_per_eps):
            rec = preservation_trial(U, eps, spec, trial_rng(seed, idx),
                                     trial=idx, seed=(seed, idx))
            counts[rec.outcome] += 1
            if rec.outcome != "boundary" and rec.direct.verdict != rec.second.verdict:
                disagreements += 1
            idx += 1
    return counts, disagreements


def test_criterion_1_l1_theorem_reproduction():
    spec = SpaceSpec.sequence(1, 2, 8, 3)
    start = time.perf_counter()
    counts, _ = _run_sweep(spec, lambda e: u_eps_l1(e, spec), seed=1001,
                           trials_per_eps=1000)
    elapsed = time.perf_counter() - start
    total = sum(counts.values())
    ok = (counts["fail"] == 0 and counts["boundary"] < 0.01 * total
          and elapsed < 30.0)
    _report("1 l1-sequence theorem", ok,
            f"{counts['pass']}/{total} pass, {counts['boundary']} boundary, "
            f"{elapsed:.1f}s")
    assert counts["fail"] == 0
    assert counts["boundary"] < 0.01 * total
    assert elapsed < 30.0


def test_criterion_2_weighted_L1_theorem_reproduction():
    weights = tuple(np.random.default_rng(2026).uniform(0.1, 5.0, 6))
    spec = SpaceSpec(1, 2, 6, 3, weights)
    part = AtomPartition((0, 1, 2), 6)
    start = time.perf_counter()
    counts, _ = _run_sweep(spec, lambda e: u_eps_L1(e, part, spec), seed=1002,
                           trials_per_eps=1000)
    elapsed = time.perf_counter() - start
    total = sum(counts.values())
    ok = (counts["fail"] == 0 and counts["boundary"] < 0.01 * total
          and elapsed < 30.0)
    _report("2 weighted-L1 theorem", ok,
            f"{counts['pass']}/{total} pass, {counts['boundary']} boundary, "
            f"{elapsed:.1f}s")
    assert counts["fail"] == 0
    assert counts["boundary"] < 0.01 * total
    assert elapsed < 30.0


def test_criterion_3_lp_theorem_reproduction_both_routes():
    start = time.perf_counter()
    grand = {"pass": 0, "fail": 0, "boundary": 0}
    disagreements = 0
    for k, (p, q) in enumerate(product((1.5, 2.0, 3.0), (1.5, 2.0, 3.0))):
        spec = SpaceSpec(p, q, 6, 3, (1.0,) * 6)
        part = AtomPartition((0, 1, 2), 6)
        counts, dis = _run_sweep(spec, lambda e: u_eps_Lp(e, part, spec),
                                 seed=1003 + k, trials_per_eps=200)
        disagreements += dis
        for key in grand:
            grand[key] += counts[key]
    elapsed = time.perf_counter() - start
    total = sum(grand.values())
    ok = (grand["fail"] == 0 and disagreements == 0
          and grand["boundary"] < 0.01 * total and elapsed < 120.0)
    _report("3 Lp theorem, two routes", ok,
            f"{grand['pass']}/{total} pass, {grand['boundary']} boundary, "
            f"{disagreements} route disagreements, {elapsed:.1f}s")
    assert grand["fail"] == 0
    assert disagreements == 0
    assert grand["boundary"] < 0.01 * total
    assert elapsed < 120.0


def test_criterion_4_non_isometry_with_spread_floor():
    eps = 0.5
    problems = []

    seq = SpaceSpec.sequence(1, 2, 6, 3)
    ok1, s1 = is_scalar_multiple_of_isometry(u_eps_l1(eps, seq), seq)
    if ok1 or s1 < eps / 2.0:
        problems.append(f"l1 spread {s1}")

    wspec = SpaceSpec(1, 2, 6, 3, (0.5, 1.0, 2.0, 1.5, 0.8, 3.0))
    part = AtomPartition((0, 1, 2), 6)
    ok2, s2 = is_scalar_multiple_of_isometry(u_eps_L1(eps, part, wspec), wspec)
    if ok2 or s2 < eps / 2.0:
        problems.append(f"L1 spread {s2}")

    spreads = []
    for p in (1.5, 2.0, 3.0):
        spec = SpaceSpec(p, 2, 6, 3, (1.0,) * 6)
        okp, sp = is_scalar_multiple_of_isometry(u_eps_Lp(eps, part, spec), spec)
        spreads.append(sp)
        if okp or sp < eps / (2.0 * p):
            problems.append(f"Lp p={p} spread {sp}")

    spec = SpaceSpec(2, 2, 6, 3, (1.0,) * 6)
    for c in (1.0, 2.0):
        okc, sc = is_scalar_multiple_of_isometry(
            ScalingOperator(c * np.ones(6)), spec)
        if not okc or sc > 1e-12:
            problems.append(f"{c}*identity spread {sc}")

    _report("4 non-isometry detection", not problems,
            f"spreads l1={s1:.3f} L1={s2:.3f} Lp={['%.3f' % s for s in spreads]}"
            + (f"; problems: {problems}" if problems else ""))
    assert not problems


def test_criterion_5_giles_axiom_grid():
    start = time.perf_counter()
    worst_rel = 0.0
    worst_norm_rel = 0.0
    samples = 10_000
    for k, (p, q) in enumerate(product((1.5, 2.0, 3.0, 4.0), (1.5, 2.0, 3.0))):
        spec = SpaceSpec(p, q, 3, 2, (1.0, 0.5, 2.0))
        rng = trial_rng(1005, k)
        for _ in range(samples):
            f = random_element(spec, rng, min_norm=0.0)
            g = random_element(spec, rng, min_norm=0.0)
            h = random_element(spec, rng, min_norm=0.0)
            a, b = rng.standard_normal(2) * 1.5
            rep = sip_axiom_report(f, g, h, a, b, spec)
            worst_rel = max(worst_rel, rep.max_relative())
            nf2 = bochner_norm(f, spec) ** 2
            if nf2 > 0.0:
                worst_norm_rel = max(worst_norm_rel,
                                     rep.norm_compatibility / nf2)
    elapsed = time.perf_counter() - start
    ok = worst_rel <= 1e-9 and worst_norm_rel <= 1e-10
    _report("5 Giles axiom grid", ok,
            f"max residual {worst_rel:.2e} (<=1e-9), "
            f"norm-compat {worst_norm_rel:.2e} (<=1e-10), {elapsed:.1f}s")
    assert worst_rel <= 1e-9
    assert worst_norm_rel <= 1e-10


def test_criterion_6a_certificate_closed_form_vs_brute_force():
    rng = trial_rng(1006, 0)
    worst = 0.0
    checked = 0
    for q in (1.5, 2.0, 3.0):
        for n, d in ((2, 1), (2, 2), (3, 1), (3, 2)):
            spec = SpaceSpec(1, q, n, d, tuple(rng.uniform(0.2, 3.0, n)))
            for _ in range(25):
                x = rng.standard_normal((n, d))
                x[rng.integers(0, n)] = 0.0
                if np.abs(x).max() == 0.0:
                    continue
                xe = BochnerElement(x)
                y = BochnerElement(rng.standard_normal((n, d)))
                closed = min_certificate_value(xe, y, spec)
                brute = brute_min_certificate(xe, y, spec, grid=41)
                worst = max(worst, abs(closed - brute))
                checked += 1
    ok = worst <= 1e-6
    _report("6a certificate vs brute force", ok,
            f"{checked} instances, max discrepancy {worst:.2e} (<=1e-6)")
    assert worst <= 1e-6


def _pair_stream(spec, seed, limit):
    """Mix of generic, exactly-orthogonal, and near-orthogonal pairs."""
    for i in range(limit):
        rng = trial_rng(seed, i)
        kind = i % 5
        if kind in (0, 1):
            x = random_element(spec, rng)
            y = random_element(spec, rng)
        else:
            x, y = draw_orthogonal_pair(spec, rng)
            if kind == 4:  # nudge off exact orthogonality
                t = 10.0 ** rng.uniform(-8.0, -2.0)
                y = BochnerElement(y.blocks + t * x.blocks)
        yield x, y


def test_criterion_6b_eps_zero_matches_exact_check():
    start = time.perf_counter()
    mismatches = 0
    excluded = 0
    compared = 0
    for k, spec in enumerate((SpaceSpec(1, 2, 4, 2, (1.0, 2.0, 0.5, 1.0)),
                              SpaceSpec(2.5, 1.5, 4, 2, (1.0, 0.3, 1.5, 2.0)))):
        done = 0
        for x, y in _pair_stream(spec, seed=1007 + k, limit=10_000):
            exact = is_bj_orthogonal(x, y, spec, TOL)
            approx = is_approx_bj_orthogonal(x, y, 0.0, spec, TOL)
            if exact.boundary or approx.boundary:
                excluded += 1
                continue
            compared += 1
            done += 1
            if exact.verdict != approx.verdict:
                mismatches += 1
            if done == 5000:
                break
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and compared == 10_000
    _report("6b eps=0 equivalence", ok,
            f"{compared} compared, {excluded} boundary-excluded, "
            f"{mismatches} mismatches, {elapsed:.1f}s")
    assert mismatches == 0
    assert compared == 10_000


def test_criterion_6c_hilbert_reduction():
    spec = SpaceSpec(2, 2, 4, 2, (1.0, 0.5, 2.0, 1.0))
    start = time.perf_counter()
    mismatches = 0
    excluded = 0
    compared = 0
    for x, y in _pair_stream(spec, seed=1008, limit=20_000):
        dot = float(spec.mu @ np.einsum("ij,ij->i", x.blocks, y.blocks))
        stat = abs(dot) / (bochner_norm(x, spec) * bochner_norm(y, spec))
        res = is_bj_orthogonal(x, y, spec, TOL)
        # the minimization margin is quadratic in the dot statistic, so the
        # two tests are only comparable outside the square-root band
        if res.boundary or TOL < stat < math.sqrt(20.0 * TOL):
            excluded += 1
            continue
        compared += 1
        if res.verdict != (stat <= TOL):
            mismatches += 1
        if compared == 10_000:
            break
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and compared == 10_000
    _report("6c Hilbert reduction", ok,
            f"{compared} compared, {excluded} boundary-excluded, "
            f"{mismatches} mismatches, {elapsed:.1f}s")
    assert mismatches == 0
    assert compared == 10_000


def test_criterion_7_scalar_inequality_grid():
    eps = (np.arange(100) + 0.5) / 100.0          # (0, 1)
    ps = 1.0 + 7.0 * (np.arange(100) + 1.0) / 100.0  # (1, 8]
    gap = 1.0 - (1.0 - eps[None, :] / ps[:, None]) ** ps[:, None] - eps[None, :]
    worst = float(gap.max())
    ok = worst <= 1e-12
    _report("7 scalar inequality grid", ok,
            f"max(1-(1-eps/p)^p - eps) = {worst:.2e} (<=1e-12) on 100x100 grid")
    assert worst <= 1e-12


def test_criterion_8_duality_map_gradient_checks():
    rng = trial_rng(1009, 0)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 5))
        v = rng.standard_normal(d)
        # keep components off the kink so the q < 2 curvature stays bounded
        v = np.where(np.abs(v) < 1e-3, v + 0.5, v)
        q = float(np.exp(rng.uniform(np.log(1.2), np.log(6.0))))
        u = rng.standard_normal(d)
        u /= np.linalg.norm(u)
        grad = inner_duality_map(v, q) @ u
        fd = central_diff_gradient(v, q, h=1e-6) @ u
        worst = max(worst, abs(grad - fd))
    ok = worst <= 1e-4
    _report("8 duality-map gradient checks", ok,
            f"1000 triples, max |grad - central diff| = {worst:.2e} (<=1e-4)")
    assert worst <= 1e-4
