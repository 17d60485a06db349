"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v` (the lines are printed with
capture disabled) or directly with `python tests/test_acceptance.py`.
"""
import itertools
import math
import random
import time

import numpy as np
import pytest

from pattern_hc.cli import main as cli_main
from pattern_hc.digraph import IN, OUT, LabeledDigraph
from pattern_hc.din_dout import arc_multiset_ok, equal_bins, lemma2_cycle, lemma2_matrices, sample_sin_tout
from pattern_hc.errors import PatternHCError
from pattern_hc.experiments import ExperimentConfig, mc_walkup, run_experiment, trial_rng
from pattern_hc.hc_solver import enumerate_oracle, exact_pi_hc, verify_pi_hc
from pattern_hc.pattern import (Arrow, all_patterns, are_equivalent, canonical_form, is_primitive, orbit,
                                parse_pattern)
from pattern_hc.pipeline import (PipelineConfig, VertexClass, bin_sizes, effective_pattern, run_pipeline)
from pattern_hc.random_model import sample_dnp, sample_trace, sprinkle_probability

from oracles import orbit_partition, primitive_by_rotations


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'} | {detail}")
    return emit


# 1. pattern algebra

def test_criterion_1_pattern_algebra(report):
    t0 = time.perf_counter()
    bad = []
    for k in range(1, 11):
        ids = orbit_partition(k)
        reps = {}
        for p in all_patterns(k):
            bits = tuple(int(x) for x in p.dirs)
            reps.setdefault(ids[bits], p)
        for p in all_patterns(k):
            bits = tuple(int(x) for x in p.dirs)
            c = canonical_form(p)
            if canonical_form(c) != c or not are_equivalent(p, c):
                bad.append(("idempotence", p))
            orb = orbit(p)
            if any(canonical_form(q) != c for q in orb):
                bad.append(("orbit constancy", p))
            if {ids[tuple(int(x) for x in q.dirs)] for q in orb} != {ids[bits]}:
                bad.append(("orbit closure", p))
            prim = is_primitive(p)
            if prim != primitive_by_rotations(bits) or any(is_primitive(q) != prim for q in orb):
                bad.append(("primitivity", p))
            # the relation agrees with the independently computed partition
            for cid, r in reps.items():
                if are_equivalent(p, r) != (cid == ids[bits]) or are_equivalent(r, p) != (cid == ids[bits]):
                    bad.append(("equivalence", p, r))
                    break
        # transitivity on sampled triples
        pats = list(all_patterns(k))
        rng = random.Random(k)
        for _ in range(300):
            a, b, c = (rng.choice(pats) for _ in range(3))
            if rng.random() < 0.5:
                b = rng.choice(orbit(a))
                c = rng.choice(orbit(b))
            if are_equivalent(a, b) and are_equivalent(b, c) and not are_equivalent(a, c):
                bad.append(("transitivity", a, b, c))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10
    report(1, ok, f"{sum(2 ** k for k in range(1, 11))} patterns k<=10, {len(bad)} violations, {dt:.1f}s (<10s)")
    assert ok, bad[:5]


# 2. solver oracle equivalence

def test_criterion_2_solver_oracle(report):
    t0 = time.perf_counter()
    alt = parse_pattern("><")
    total = disagree = 0
    for n in (4, 6, 8):
        for p in (0.2, 0.4, 0.6):
            for s in range(300):
                d = sample_dnp(n, p, trial_rng(2, s, n * 10 + int(p * 10)))
                w = exact_pi_hc(d, alt)
                total += 1
                if (w is not None) != enumerate_oracle(d, alt) or (w is not None and not verify_pi_hc(d, w, alt)):
                    disagree += 1
    pairs = [(a, b) for a in range(4) for b in range(4) if a != b]
    for r in range(7):
        for arcs in itertools.combinations(pairs, r):
            d = LabeledDigraph(4, arcs)
            total += 1
            if (exact_pi_hc(d, alt) is not None) != enumerate_oracle(d, alt):
                disagree += 1
    dt = time.perf_counter() - t0
    ok = disagree == 0 and dt < 120
    report(2, ok, f"{total} digraphs, {disagree} disagreements, {dt:.1f}s (<120s)")
    assert ok


# 3. two-round exposure

def test_criterion_3_two_round_exposure(report):
    t0 = time.perf_counter()
    details, ok = [], True
    trace = sample_trace(1001, np.random.default_rng(3))
    N = trace.num_pairs
    for p in (0.1, 0.19, 0.5):
        se = math.sqrt(p * (1 - p) / N)
        f_trace = trace.prefix(p=p).num_arcs / N
        f_dnp = sample_dnp(1001, p, np.random.default_rng(int(p * 100))).num_arcs / N
        z = max(abs(f_trace - p), abs(f_dnp - p)) / se
        ok &= z <= 4
        details.append(f"p={p}: |z|<={z:.2f}")
    worst = 0.0
    for p in np.concatenate([[0.0, 1e-15, 1e-9, 0.1, 0.19, 0.5, 1.0], np.random.default_rng(0).random(10000)]):
        q = sprinkle_probability(float(p))
        worst = max(worst, abs(2 * q - q * q - p))
    ok &= worst <= 1e-12
    dt = time.perf_counter() - t0
    ok &= dt < 60
    report(3, ok, f"{N} pairs; {', '.join(details)}; max |2p'-p'^2-p| = {worst:.1e}; {dt:.1f}s (<60s)")
    assert ok


# 4. degree-event targets

def test_criterion_4_degree_event_targets(report):
    t0 = time.perf_counter()
    ns = [5000, 10000, 20000]
    res = {}
    for pattern in ("><", ">><"):
        cfg = ExperimentConfig("eventA", n=ns, pattern=pattern, trials=2000, seed=4)
        _, summary = run_experiment(cfg)
        res[pattern] = summary
    alt, non = res["><"], res[">><"]
    checks = {
        "P(A) alt": abs(alt[-1]["estimate"] - alt[-1]["target"]) <= 0.06,
        "P(A) non-alt": abs(non[-1]["estimate"] - non[-1]["target"]) <= 0.06,
        "E[X]": abs(alt[-1]["mean_low"] - 0.25) <= 0.05,
    }
    for name, summ in (("alt", alt), ("non-alt", non)):
        gaps = [abs(s["estimate"] - s["target"]) for s in summ]
        checks[f"trend {name}"] = all(a >= b for a, b in zip(gaps, gaps[1:]))
    dt = time.perf_counter() - t0
    checks["time"] = dt < 600
    ok = all(checks.values())
    est = "; ".join(f"{name} P(A)=" + ",".join(f"{s['estimate']:.3f}" for s in summ) + f" (target {summ[0]['target']:.3f})"
                    for name, summ in (("alt", alt), ("non-alt", non)))
    report(4, ok, f"{est}; mean X at n=20000 = {alt[-1]['mean_low']:.3f} (target 0.25); "
                  f"failed: {[k for k, v in checks.items() if not v]}; {dt:.0f}s")
    assert ok


# 5. Walkup matchings

def test_criterion_5_walkup(report):
    t0 = time.perf_counter()
    rows, summary = mc_walkup(500, trials=200, seed=5)
    s = summary[0]
    dt = time.perf_counter() - t0
    ok = s["estimate"] >= 0.95 and s["all_verified"] == 1 and dt < 60
    report(5, ok, f"perfect {s['successes']}/200 = {s['estimate']:.3f} (>=0.95), all verified={bool(s['all_verified'])}, "
                  f"{dt:.1f}s (<60s)")
    assert ok


# 6. chained matchings end to end

def test_criterion_6_lemma2(report):
    t0 = time.perf_counter()
    p = parse_pattern(">><")
    S, T = lemma2_matrices(3)
    produced = verified = 0
    for t in range(50):
        rng = trial_rng(6, t, 900)
        inst = sample_sin_tout(equal_bins(300, 3), S, T, rng)
        try:
            w = lemma2_cycle(inst, p, random.Random(t))
        except PatternHCError:
            continue
        produced += 1
        verified += verify_pi_hc(inst.to_digraph(), w, p) and arc_multiset_ok(inst, w)
    dt = time.perf_counter() - t0
    ok = produced >= 0.85 * 50 and verified == produced and dt < 300
    report(6, ok, f"produced {produced}/50 (>=85%), verified {verified}/{produced}, {dt:.1f}s (<300s)")
    assert ok


# 7. hitting-time soundness

def test_criterion_7_hitting_time(report):
    t0 = time.perf_counter()
    lines, ok, nondegenerate = [], True, True
    for pattern in ("><", ">>><"):
        cfg = ExperimentConfig("hitting", n=[200, 600, 1000], pattern=pattern, trials=50, seed=7, solver="pipeline")
        rows, summary = run_experiment(cfg)
        ok &= all(r["verified"] for r in rows)
        ok &= all(r["a_at_mstar"] == 1 and r["a_before"] == 0 for r in rows)
        for s in summary:
            lines.append(f"{pattern} n={s['n']}: {s['successes']}/50 [{s['stages']}]")
            if s["n"] == 1000 and s["successes"] == 0:
                nondegenerate = False
    dt = time.perf_counter() - t0
    report(7, ok and nondegenerate,
           f"successes verified and A flips at m_star: {ok}; non-degenerate at n=1000: {nondegenerate}; "
           + "; ".join(lines) + f"; {dt:.0f}s")
    assert ok and nondegenerate


# 8. structural invariants

def _initial_bins(bins):
    b = bins.bin_of.copy()
    for v, old, _new in reversed(bins.swaps):
        b[v] = old
    return b


def _recount_visible(d, bin_of, k):
    dplus = np.zeros((d.n, k), dtype=np.int64)
    dminus = np.zeros((d.n, k), dtype=np.int64)
    for t, h, lab in d.arcs():
        if lab & OUT:
            dplus[t, bin_of[h]] += 1
        if lab & IN:
            dminus[h, bin_of[t]] += 1
    return dplus, dminus


def _check_run(trace, pattern, run, window):
    """List of violated invariants for one successful run."""
    errs = []
    st = run.state
    cls, paths, bins, guard, cd, dstar = (st["cls"], st["paths"], st["bins"], st["guard"],
                                          st["contracted"], st["dstar"])
    pe = effective_pattern(pattern)
    k = pe.k
    n = trace.n
    base = trace.prefix(p=window[0])
    # class partition, recounted from D(n, p_-) and the bins before any swap
    b0 = _initial_bins(bins)
    dplus, dminus = _recount_visible(base, b0, k)
    h = cls.h
    good = (dplus >= h + 2).all(axis=1) & (dminus >= h + 2).all(axis=1)
    tot = base.total_degrees
    want = np.where(good, VertexClass.GOOD, np.where(tot >= h + 3, VertexClass.BAD, VertexClass.DANGEROUS))
    if not np.array_equal(want, cls.cls):
        errs.append("class partition")
    # path collection
    verts = [v for p in paths.paths for v in p.vertices]
    if len(verts) != len(set(verts)):
        errs.append("paths not disjoint")
    ng = set(cls.non_good())
    if {p.nongood for p in paths.paths} != ng and not (paths.fallback and not ng):
        errs.append("non-good coverage")
    for p in paths.paths:
        if len(ng & set(p.vertices)) != (0 if paths.fallback else 1):
            errs.append("one non-good vertex per path")
        last = len(p.vertices)
        for i, v in enumerate(p.vertices, start=1):
            want_bin = 0 if (last == 6 * k + 3 and i == last) else (i - 1) % k
            if bins.bin_of[v] != want_bin:
                errs.append("bin placement after swaps")
                break
        for a, b, o in zip(p.vertices, p.vertices[1:], p.orientations):
            arc = (a, b) if o is Arrow.FORWARD else (b, a)
            if not dstar.digraph.has_arc(*arc):
                errs.append("path arc missing")
                break
    if bins.sizes != bin_sizes(n, pattern):
        errs.append("swap log not net-zero per bin")
    # U1 after Step 3: undiscovered visible arcs from good ordinary vertices to adjacent bins
    on_path = set(verts)
    disc = guard.discovered
    uplus = np.zeros((n, k), dtype=np.int64)
    uminus = np.zeros((n, k), dtype=np.int64)
    ndisc = np.zeros(n, dtype=np.int64)
    for t, hd, lab in base.arcs():
        if (t, hd) in disc:
            ndisc[t] += 1
            ndisc[hd] += 1
            continue
        if lab & OUT and hd not in on_path:
            uplus[t, bins.bin_of[hd]] += 1
        if lab & IN and t not in on_path:
            uminus[hd, bins.bin_of[t]] += 1
    dpf, dmf = _recount_visible(base, bins.bin_of, k)
    for v in range(n):
        if v in on_path or not cls.is_good(v):
            continue
        j = int(bins.bin_of[v])
        for i in {(j - 1) % k, (j + 1) % k}:
            if min(uplus[v, i], uminus[v, i]) < 2 or uplus[v, i] < dpf[v, i] - ndisc[v] \
                    or uminus[v, i] < dmf[v, i] - ndisc[v]:
                errs.append("U1")
                break
        if errs and errs[-1] == "U1":
            break
    # contracted digraph
    if cd.n % k or not cd.balanced() or cd.n != n - sum(len(p.vertices) - 1 for p in paths.paths):
        errs.append("contracted size or balance")
    if not verify_pi_hc(dstar.digraph, run.witness, parse_pattern(pattern)):
        errs.append("witness")
    return errs


# (n, pattern, h, p); the alternating runs need larger n so paths stay a small part of each bin
STRUCTURAL_RUNS = ([(300, ">><", None, 0.45)] * 40 + [(600, "><", 8, 0.3)] * 30
                   + [(602, "><", 8, 0.3)] * 30)


def test_criterion_8_structural_invariants(report):
    t0 = time.perf_counter()
    failures, paths = [], 0
    for t, (n, pattern, h, p) in enumerate(STRUCTURAL_RUNS):
        window = (p, p * 1.02)
        trace = sample_trace(n, trial_rng(8, t, n))
        cfg = PipelineConfig(window=window, radius=1, h=h)
        run = run_pipeline(trace, pattern, trial_rng(8, t, n + 1), cfg, keep_state=True)
        if not run.success:
            failures.append((t, run.stage))
            continue
        paths += len(run.state["paths"])
        errs = _check_run(trace, pattern, run, window)
        if errs:
            failures.append((t, errs))
    dt = time.perf_counter() - t0
    ok = not failures
    report(8, ok, f"{len(STRUCTURAL_RUNS)} runs (>>< n=300 p=0.45; >< n=600/602 p=0.3 h=8; radius 1), "
                  f"{paths} paths checked, {len(failures)} failing runs {failures[:3]}; {dt:.0f}s")
    assert ok


# 9. determinism

def test_criterion_9_determinism(report, tmp_path):
    t0 = time.perf_counter()
    runs = [
        ["mc", "--experiment", "eventA", "--n", "500,1000", "--trials", "40", "--pattern", "><"],
        ["mc", "--experiment", "walkup", "--n", "100", "--trials", "40", "--format", "json"],
        ["mc", "--experiment", "hitting", "--n", "10,12", "--trials", "20", "--solver", "exact"],
        ["mc", "--experiment", "hitting", "--n", "200", "--trials", "8", "--solver", "pipeline",
         "--pattern", ">>><"],
    ]
    same = []
    for i, argv in enumerate(runs):
        blobs = []
        for threads in ("1", "2", "3"):
            out = tmp_path / f"run{i}_{threads}.out"
            assert cli_main(argv + ["--seed", "9", "--threads", threads, "--out", str(out)]) == 0
            blobs.append(out.read_bytes())
        same.append(blobs[0] == blobs[1] == blobs[2] and len(blobs[0]) > 0)
    dt = time.perf_counter() - t0
    ok = all(same)
    report(9, ok, f"{len(runs)} experiments at 1/2/3 workers, byte-identical: {same}; {dt:.0f}s")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-v"]))
