"""One test per acceptance criterion; each prints a PASS/FAIL line in the summary."""

import math
import time
import xml.etree.ElementTree as ET

import numpy as np
from sklearn.metrics import adjusted_rand_score

from oracles import central_difference, cosine_matrix, rao_stirling_loop
from overlaymap.analytics import diversity, distance_matrix, growth_rates, min_sample_size, rao_stirling
from overlaymap.basemap import build_basemap, parse_basemap
from overlaymap.factors import assign_factors, factor_analysis
from overlaymap.ingest import OverlayVector, overlay_from_records, overlay_from_rows, parse_analyze, parse_analyze_text, parse_tagged
from overlaymap.layout import LayoutConfig, kamada_kawai, layout_stress, stress_gradient
from overlaymap.matrix import CitationMatrix, cosine_citing
from overlaymap.network import SimilarityNetwork, build_network, graph_distances
from overlaymap.render import read_pajek_vec, render_svg, write_pajek_net, write_pajek_vec
from overlaymap.synthetic import analyze_rows, block_citation_matrix, block_registry, block_similarity, format_analyze


def test_sample_size_table():
    start = time.perf_counter()
    rows = [(0.5, 0.4, 0.10), (0.5, 0.4, 0.05), (0.5, 0.4, 0.01), (0.6, 0.5, 0.05), (0.4, 0.3, 0.05)]
    got = [min_sample_size(*r).n for r in rows]
    assert got == [41, 68, 135, 65, 65]
    assert time.perf_counter() - start < 1.0


def test_cosine_oracle_equivalence():
    rng = np.random.default_rng(20)
    done = 0
    while done < 200:
        n = int(rng.integers(1, 13))
        counts = rng.integers(0, 60, size=(n, n)) * (rng.random((n, n)) < 0.7)
        if not counts.any():
            continue
        for include in (True, False):
            sim = cosine_citing(CitationMatrix(counts), include_diagonal=include).values
            ref = np.array(cosine_matrix(counts.tolist(), include))
            assert np.max(np.abs(sim - ref)) < 1e-12
            assert np.array_equal(sim, sim.T)
            assert sim.min() >= 0.0 and sim.max() <= 1.0
        done += 1


def test_layout_correctness():
    cfg = LayoutConfig()
    for seed in range(50):
        rng = np.random.default_rng(seed)
        a = np.triu(rng.uniform(0, 1, size=(6, 6)), 1)
        s = a + a.T
        np.fill_diagonal(s, 1.0)
        net = build_network(s, 0.3)
        D = graph_distances(net)
        x = rng.normal(size=(6, 2))
        g = stress_gradient(x, cfg, D).ravel()
        fd = np.array(central_difference(lambda v: layout_stress(np.reshape(v, (-1, 2)), cfg, D), x.ravel().tolist(), h=1e-6))
        assert np.linalg.norm(g - fd) / np.linalg.norm(fd) < 1e-4
        lay = kamada_kawai(net, LayoutConfig(seed=seed), D)
        assert lay.final_stress <= lay.initial_stress
    tri = kamada_kawai(SimilarityNetwork(3, ((0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)), 0.15))
    assert tri.final_stress < 1e-6
    assert tri.final_stress <= tri.initial_stress


def test_factor_recovery():
    hits = 0
    for trial in range(100):
        rng = np.random.default_rng(trial)
        k = int(rng.integers(2, 6))
        sizes = [int(v) for v in rng.integers(3, 9, size=k)]
        assert sum(sizes) <= 40
        sim, labels = block_similarity(sizes, rng, within=0.9, noise=0.05, cross=0.05)
        fa = assign_factors(factor_analysis(sim, k))
        hits += adjusted_rand_score(labels, fa.assignment) == 1.0
    assert hits >= 95


def test_threshold_semantics():
    s = np.array([[1.0, 0.15, 0.5], [0.15, 1.0, 0.16], [0.5, 0.16, 1.0]])
    net = build_network(s, 0.15)
    assert (0, 1) not in {(i, j) for i, j, _ in net.edges}
    assert net.n_edges == 2
    rng = np.random.default_rng(7)
    a = np.triu(rng.uniform(0, 1, size=(25, 25)), 1)
    sweep = [build_network(a + a.T + np.eye(25), t).n_edges for t in np.linspace(0.0, 0.99, 100)]
    assert all(x >= y for x, y in zip(sweep, sweep[1:]))


def test_ingest_conservation(golden, golden_registry):
    for name in ("analyze_tab.txt", "analyze_spaces.txt", "analyze_latin1.txt"):
        rows = parse_analyze(golden / name)
        vec = overlay_from_rows(rows, golden_registry)
        assert vec.counts.sum() + sum(c for _, c in vec.unmatched) == sum(r.record_count for r in rows)
    for name in ("tagged_basic.txt", "tagged_continuation.txt"):
        recs = parse_tagged(golden / name)
        frac = overlay_from_records(recs, golden_registry, counting="fractional")
        matched = sum(1 for r in recs if any(golden_registry.resolve(c) is not None for c in r.subject_categories))
        assert frac.total_documents == matched
        assert math.fsum(frac.counts) == matched


def test_growth():
    def series(rows):
        return [OverlayVector(np.array(r, dtype=float), 0, year=2004 + t) for t, r in enumerate(rows)]

    g = growth_rates(series([[10, 7, 0], [20, 7, 0], [40, 7, 5], [80, 7, 5], [160, 7, 5]]))
    assert g.values[0] == 1.0
    assert g.values[1] == 0.0
    g = growth_rates(series([[0], [0], [5]]))
    assert math.isnan(g.values[0])


def test_diversity():
    rng = np.random.default_rng(8)
    for n in (2, 5, 17, 50):
        a = np.triu(rng.uniform(0, 1, size=(n, n)), 1)
        sim = a + a.T + np.eye(n)
        counts = rng.integers(1, 30, size=n).astype(float)
        x, y = diversity(counts, sim), diversity(counts * 1e4, sim)
        assert x.variety == y.variety
        for f in ("balance", "disparity", "rao_stirling"):
            assert abs(getattr(x, f) - getattr(y, f)) < 1e-12
        p = rng.dirichlet(np.ones(n))
        d = distance_matrix(sim)
        assert abs(rao_stirling(p, d) - rao_stirling_loop(p.tolist(), d.tolist())) <= 1e-12
        assert diversity(np.full(n, 11.0), sim).balance == 1.0


def test_file_round_trips(desk_inputs):
    rng = np.random.default_rng(10)
    for _ in range(100):
        n = int(rng.integers(1, 60))
        v = rng.exponential(100.0, size=n) * (rng.random(n) < 0.7)
        if rng.random() < 0.5:
            v = np.round(v)
        assert read_pajek_vec(write_pajek_vec(v)).counts.tobytes() == v.tobytes()
    reg, m = desk_inputs
    bm = build_basemap(m, reg, 0.15, 3, LayoutConfig(seed=11))[0]
    text = bm.serialize()
    assert parse_basemap(text).serialize() == text
    again = build_basemap(m, reg, 0.15, 3, LayoutConfig(seed=11))[0]
    assert write_pajek_net(bm) == write_pajek_net(again)


def test_desk_end_to_end():
    start = time.perf_counter()
    sizes = [10, 10, 10]
    reg, m = block_registry(sizes), block_citation_matrix(sizes, seed=1)
    bm = build_basemap(m, reg, 0.15, 3, LayoutConfig(seed=42))[0]
    counts = np.random.default_rng(42).integers(0, 200, size=30)
    counts[3] = 0
    vec = overlay_from_rows(parse_analyze_text(format_analyze(analyze_rows(reg, counts))), bm.registry)
    svg = render_svg(bm, vec)
    elapsed = time.perf_counter() - start
    radii = {}
    for c in ET.fromstring(svg).iter("{http://www.w3.org/2000/svg}circle"):
        radii[int(c.get("data-id"))] = float(c.get("r"))
    active = [i for i in range(30) if counts[i] > 0]
    assert len(radii) == 30
    for i in active:
        for j in active:
            assert abs((radii[i] ** 2 / radii[j] ** 2) / (counts[i] / counts[j]) - 1.0) <= 1e-9
    assert elapsed < 5.0
