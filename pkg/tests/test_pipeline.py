import random

import numpy as np
import pytest

from pattern_hc.digraph import BOTH, IN, OUT, DegreeVariant, LabeledDigraph, event_A
from pattern_hc.errors import (AOutsideWindow, ConfigError, DivisibilityError, ExposureViolation,
                               PipelineFailure)
from pattern_hc.hc_solver import exact_pi_hc, verify_pi_hc
from pattern_hc.pattern import ALTERNATING4, parse_pattern
from pattern_hc.pipeline import (BinAssignment, DStar, ExposureGuard, PipelineConfig, VertexClass,
                                 assign_bins, bin_sizes, build_path_collection, check_handsome,
                                 classify_vertices, construct_pi_hc, contract, effective_pattern,
                                 expose_until_A, final_cycle, run_pipeline)
from pattern_hc.random_model import hitting_index, p_plus_minus, sample_dnp, sample_trace

from oracles import floyd_warshall_undirected, shortest_cycle_through


# bins

def test_bin_sizes_examples():
    assert bin_sizes(10, "><") == (3, 3, 2, 2)
    assert bin_sizes(12, "><") == (3, 3, 3, 3)
    assert bin_sizes(9, ">><") == (3, 3, 3)
    with pytest.raises(DivisibilityError):
        bin_sizes(11, "><")
    with pytest.raises(DivisibilityError):
        bin_sizes(10, ">><")


def test_effective_pattern():
    assert effective_pattern("><") == ALTERNATING4
    assert effective_pattern(">><") == parse_pattern(">><")
    for bad in (">", "><><"):
        with pytest.raises(ValueError):
            effective_pattern(bad)


def test_assign_bins_and_swaps():
    b = assign_bins(10, "><")
    assert b.bin_of.tolist() == [0, 0, 0, 1, 1, 1, 2, 2, 3, 3]
    b = assign_bins(6, ">><", order=[5, 4, 3, 2, 1, 0])
    assert b.bin_of.tolist() == [2, 2, 1, 1, 0, 0]
    c = b.copy()
    c.swap(0, 5)
    assert c.bin_of[0] == 0 and c.bin_of[5] == 2 and c.sizes == (2, 2, 2)
    assert c.swaps == [(0, 2, 0), (5, 0, 2)] and b.swaps == []
    c.swap(0, 1 if c.bin_of[1] == 0 else 4)
    with pytest.raises(ValueError):
        assign_bins(6, ">><", order=[0, 0, 1, 2, 3, 4])


# classification and exposure

def _boundary_digraph():
    # n = 9, bins of 3; vertex 0 has exactly two out-chosen and two in-chosen
    # arcs with every bin (h = 0); vertex 8 is isolated
    arcs = []
    for a, b in ((1, 2), (3, 4), (6, 7)):
        arcs += [(0, a, OUT), (0, b, OUT), (a, 0, IN), (b, 0, IN)]
    return LabeledDigraph(9, arcs)


def test_classification_examples():
    d = _boundary_digraph()
    bins = assign_bins(9, ">><")
    guard = ExposureGuard(d)
    cls = classify_vertices(guard, bins, h=0)
    assert cls.cls[0] == VertexClass.GOOD
    assert cls.cls[8] == VertexClass.DANGEROUS and cls.total[8] == 0
    assert cls.total[0] == -1 and 0 not in guard.exposed
    assert set(guard.exposed) == set(cls.non_good())
    # one arc less and the boundary vertex is no longer good
    d2 = LabeledDigraph(9, [a for a in d.arcs() if a[:2] != (0, 7)])
    cls2 = classify_vertices(ExposureGuard(d2), bins, h=0)
    assert cls2.cls[0] == VertexClass.BAD        # total degree 11 >= h + 3
    # the labels matter: arcs chosen by the other end are not visible
    d3 = LabeledDigraph(9, [(t, h, IN if lab == OUT else OUT) for t, h, lab in d.arcs()])
    assert not classify_vertices(ExposureGuard(d3), bins, h=0).is_good(0)


def test_exposure_guard_blocks_unexposed_reads():
    g = ExposureGuard(_boundary_digraph())
    with pytest.raises(ExposureViolation):
        g.incident(0)
    with pytest.raises(ExposureViolation):
        g.out_neighbors(3)
    arcs = g.expose(1)
    assert {(t, h) for t, h, _ in arcs} == {(0, 1), (1, 0)}
    assert g.audit_ok()
    g.release()
    g.incident(5)


def test_guard_window_matches_trace():
    trace = sample_trace(300, np.random.default_rng(4))
    pm, pp = p_plus_minus(DegreeVariant.ALTERNATING, 300)
    g = ExposureGuard.from_trace(trace, pm, pp)
    assert g.m_minus == trace.count_at(pm)
    assert g.window_size == trace.count_at(pp) - trace.count_at(pm)
    t, h, _ = trace.arrivals(trace.count_at(pp))
    watched = set(range(300))
    for i in range(1, min(20, g.window_size) + 1):
        g.expose(int(t[g.m_minus + i - 1]))
        g.expose(int(h[g.m_minus + i - 1]))
        arc = g.window_arc(i, watched)
        assert arc[:2] == (int(t[g.m_minus + i - 1]), int(h[g.m_minus + i - 1]))


def test_a_outside_window():
    d = LabeledDigraph.complete(6)
    bins = assign_bins(6, ">><")
    g = ExposureGuard(d)
    cls = classify_vertices(g, bins, h=0)
    with pytest.raises(AOutsideWindow):
        expose_until_A(g, cls, DegreeVariant.NON_ALTERNATING)
    assert expose_until_A(g, cls, DegreeVariant.NON_ALTERNATING, allow_zero=True).r_star == 0
    # an isolated vertex and a window that never reaches it
    d = LabeledDigraph(6, [(0, 1), (1, 0)])
    g = ExposureGuard(d, [2, 3], [3, 4])
    cls = classify_vertices(g, bins, h=0)
    with pytest.raises(AOutsideWindow):
        expose_until_A(g, cls, DegreeVariant.NON_ALTERNATING)


def test_expose_until_A_stops_at_first_sufficient_arc():
    d = LabeledDigraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    g = ExposureGuard(d, [1, 0, 2], [3, 2, 0], m_minus=4)
    cls = classify_vertices(g, assign_bins(4, "><"), h=0)
    ds = expose_until_A(g, cls, DegreeVariant.NON_ALTERNATING, allow_zero=True)
    assert ds.r_star == 0
    # alternating needs in >= 2 or out >= 2: (1,3) fixes 1 and 3, (0,2) fixes 0 and 2
    ds = expose_until_A(g, cls, DegreeVariant.ALTERNATING)
    assert ds.r_star == 2 and ds.m_star == 6
    assert event_A(ds.digraph, DegreeVariant.ALTERNATING)
    assert g.audit_ok()


# locality checks against all-pairs distances

def _oracle_handsome(d, classes, radius, bound):
    n = d.n
    dist = floyd_warshall_undirected(n, [(t, h) for t, h, _ in d.arcs()])
    ng = [u for u in range(n) if classes[u] != VertexClass.GOOD]
    dang = [u for u in range(n) if classes[u] == VertexClass.DANGEROUS]
    cnt = np.array([sum(dist[u, v] <= radius for u in ng) for v in range(n)])
    h1 = set(np.flatnonzero(cnt >= bound).tolist())
    h2 = {(v, u) for v in dang for u in ng if u != v and dist[v, u] <= radius}
    arcs = [(t, h) for t, h, _ in d.arcs()]
    # a pair of opposite arcs shows up twice in `arcs` and forms a 2-cycle
    short = {y for y in range(n) if shortest_cycle_through(n, arcs, y) <= radius}
    h3 = {u for u in ng if any(dist[u, y] <= radius for y in short)}
    return h1, h2, h3


def test_handsome_matches_oracle():
    rng = np.random.default_rng(11)
    for s in range(120):
        n = int(rng.integers(5, 40))
        d = sample_dnp(n, float(rng.uniform(0.5, 2.5)) / n, rng)
        classes = rng.choice(3, size=n, p=[0.8, 0.1, 0.1])
        radius = int(rng.integers(1, 6))
        bound = int(rng.integers(1, 4))
        rep = check_handsome(d, classes, radius=radius, bound=bound)
        h1, h2, h3 = _oracle_handsome(d, classes, radius, bound)
        assert rep.h1_violators == h1
        assert rep.h2_violators == h2
        assert rep.h3_violators == h3
        assert rep.ok == (not h1 and not h2 and not h3)


def test_handsome_examples():
    d = LabeledDigraph.directed_cycle(range(12))
    good = np.zeros(12, dtype=np.int64)
    assert check_handsome(d, good, radius=5, bound=1).ok          # nothing non-good
    cls = good.copy()
    cls[0] = cls[1] = VertexClass.DANGEROUS
    rep = check_handsome(d, cls, radius=5, bound=3)
    assert rep.h1 and not rep.h2 and rep.witness["H2"] in {(0, 1), (1, 0)}
    assert rep.h3            # the only cycle has length 12 > 5
    rep = check_handsome(d, cls, radius=12, bound=3)
    assert rep.h3 is False
    # a 2-cycle near a bad vertex
    d2 = LabeledDigraph(5, [(0, 1), (1, 2), (2, 1), (3, 4)])
    c2 = np.array([VertexClass.BAD, 0, 0, 0, 0])
    assert check_handsome(d2, c2, radius=1, bound=5).h3        # a 2-cycle is longer than 1
    rep = check_handsome(d2, c2, radius=2, bound=5)
    assert rep.h3 is False and rep.witness["H3"] == (0, 1)
    with pytest.raises(ValueError):
        check_handsome(d2, c2)


# steps 2 to 4 on a complete digraph

def _complete_setup(n, pattern):
    d = LabeledDigraph.complete(n)
    pe = effective_pattern(pattern)
    bins = assign_bins(n, pattern)
    guard = ExposureGuard(d)
    cls = classify_vertices(guard, bins, h=0)
    dstar = DStar(d, 0, 0, d.num_arcs, [])
    return d, pe, bins, guard, cls, dstar


def test_all_good_fallback_path_and_contraction():
    d, pe, bins, guard, cls, dstar = _complete_setup(30, ">><")
    assert cls.counts() == {"good": 30, "bad": 0, "dangerous": 0}
    paths = build_path_collection(guard, dstar, cls, bins, pe, np.random.default_rng(0))
    assert paths.fallback and len(paths) == 1
    p = paths.paths[0]
    assert len(p.vertices) == 19 and p.nongood is None
    assert [bins.bin_of[v] for v in p.vertices] == [i % 3 for i in range(19)]
    assert all(d.has_arc(*((a, b) if o == parse_pattern(">").dirs[0] else (b, a)))
               for a, b, o in zip(p.vertices, p.vertices[1:], p.orientations))
    assert guard.audit_ok()
    cd = contract(guard.release(), paths, bins)
    assert cd.n == 12 and [len(b) for b in cd.bins] == [4, 4, 4]
    w = final_cycle(cd, pe, random.Random(0))
    assert verify_pi_hc(d, w, pe)


def test_alternating_long_path():
    d, pe, bins, guard, cls, dstar = _complete_setup(30, "><")
    assert bins.sizes == (8, 8, 7, 7)
    paths = build_path_collection(guard, dstar, cls, bins, pe, np.random.default_rng(1), long_path=True)
    p = paths.paths[0]
    assert len(p.vertices) == 27 and bins.bin_of[p.vertices[-1]] == 0
    cd = contract(guard.release(), paths, bins)
    assert [len(b) for b in cd.bins] == [1, 1, 1, 1]
    w = final_cycle(cd, pe, random.Random(0))
    assert verify_pi_hc(d, w, parse_pattern("><"))


def test_path_through_nongood_vertex_uses_swaps():
    # complete digraph plus one bad vertex whose visible arcs are thin
    n, pattern = 36, ">><"
    arcs = [(a, b, BOTH) for a in range(1, n) for b in range(1, n) if a != b]
    arcs += [(0, b, OUT) for b in (1, 2, 3, 4)] + [(a, 0, IN) for a in (5, 6, 7, 8)]
    d = LabeledDigraph(n, arcs)
    pe = effective_pattern(pattern)
    bins = assign_bins(n, pattern)
    guard = ExposureGuard(d)
    cls = classify_vertices(guard, bins, h=2)
    assert cls.non_good() == [0]
    dstar = DStar(d, 0, 0, d.num_arcs, [])
    paths = build_path_collection(guard, dstar, cls, bins, pe, np.random.default_rng(2))
    p = paths.paths[0]
    assert p.nongood == 0 and 0 in p.vertices[1:-1]
    assert [bins.bin_of[v] for v in p.vertices] == [i % 3 for i in range(19)]
    assert sorted(bins.sizes) == [12, 12, 12]
    assert guard.audit_ok()
    cd = contract(guard.release(), paths, bins)
    w = final_cycle(cd, pe, random.Random(0))
    assert verify_pi_hc(d, w, pe)


# whole runs

def _partial_run(trace, pattern, rng, window, h=None):
    """Steps 1-2 by hand so the exposure log can be audited even when they fail."""
    pe = effective_pattern(pattern)
    bins = assign_bins(trace.n, pattern)
    guard = ExposureGuard.from_trace(trace, *window)
    cls = classify_vertices(guard, bins, h)
    try:
        dstar = expose_until_A(guard, cls, DegreeVariant.for_pattern(pattern), allow_zero=True)
        build_path_collection(guard, dstar, cls, bins, pe, rng)
    except PipelineFailure:
        return guard, cls, False
    return guard, cls, True


def test_exposure_audit_over_many_trials():
    built = 0
    for s in range(100):
        rng = np.random.default_rng(s)
        pattern = ">><" if s % 2 else "><"
        n = 150 if s % 2 else 152
        trace = sample_trace(n, rng)
        p = 0.45
        guard, cls, ok = _partial_run(trace, pattern, rng, (p, p * 1.02), h=3)
        built += ok
        assert guard.audit_ok()
        assert set(cls.non_good()) <= guard.exposed
        assert len(guard.exposed) < n
    assert built >= 10        # the paths were actually built, not just attempted


def test_default_window_records_hitting_time():
    for s in range(6):
        trace = sample_trace(200, np.random.default_rng(s))
        run = run_pipeline(trace, "><", np.random.default_rng(s), PipelineConfig(retries=0))
        assert run.m_star == hitting_index(trace, DegreeVariant.ALTERNATING)
        assert run.at_hitting_time
        if not run.success:
            assert run.stage in {"AOutsideWindow", "NotHandsome", "PathBuildFailed",
                                 "MatchingFailed", "HCNotFound", "SizeMismatch"}
            with pytest.raises(PipelineFailure):
                construct_pi_hc(trace, "><", np.random.default_rng(s), PipelineConfig(retries=0))


def test_config_validation():
    with pytest.raises(ConfigError):
        PipelineConfig(fallback="magic")
    with pytest.raises(ConfigError):
        PipelineConfig(retries=-1)
    with pytest.raises(ConfigError):
        run_pipeline(sample_trace(12, np.random.default_rng(0)), "><", np.random.default_rng(0))


def test_fallback_exact_on_small_n():
    hc = parse_pattern("><")
    for s in range(5):
        trace = sample_trace(12, np.random.default_rng(s))
        cfg = PipelineConfig(retries=0, fallback="exact", window=(0.3, 0.35))
        run = run_pipeline(trace, hc, np.random.default_rng(s), cfg)
        if run.via == "pipeline":
            continue
        target = trace.prefix(m=run.m_star)
        assert run.success == (exact_pi_hc(target, hc) is not None)
        if run.success:
            assert run.via == "exact" and verify_pi_hc(target, run.witness, hc)


@pytest.mark.parametrize("n,pattern,h", [(600, ">><", None), (602, "><", 8)])
def test_structural_regime_run(n, pattern, h):
    trace = sample_trace(n, np.random.default_rng(n))
    p = 0.25
    cfg = PipelineConfig(window=(p, p * 1.02), radius=1, h=h)
    run = run_pipeline(trace, pattern, np.random.default_rng(1), cfg, keep_state=True)
    assert run.success, run.diagnostics()
    st = run.state
    assert verify_pi_hc(st["dstar"].digraph, run.witness, parse_pattern(pattern))
    assert st["guard"].audit_ok()
    assert len(st["paths"]) == len(st["cls"].non_good()) > 0
    assert st["contracted"].balanced()
