import json

import numpy as np
import pytest

from corpus import csr, path
from etbfs.bench import (
    SCHEMA,
    BenchConfig,
    ConfigError,
    compute_gteps,
    gteps_ratio,
    load_graph,
    run_benchmark,
    select_roots,
)
from etbfs.graph import build_csr
from etbfs.kronecker import KroneckerParams, generate_kronecker
from etbfs.validation import oracle_bfs


@pytest.fixture(scope="module")
def kron():
    return build_csr(generate_kronecker(KroneckerParams(scale=10, seed=2)))


def test_compute_gteps():
    assert compute_gteps(3_000_000_000, 2.0) == 1.5
    with pytest.raises(ValueError):
        compute_gteps(1, 0.0)


def test_select_roots(kron):
    roots = select_roots(kron, 32, seed=5)
    assert len(set(roots)) == 32
    assert all(kron.degrees[r] > 0 for r in roots)
    assert roots == select_roots(kron, 32, seed=5)
    assert roots != select_roots(kron, 32, seed=6)


def test_select_roots_repeats_when_exhausted():
    g = csr([(0, 1)], 5)
    roots = select_roots(g, 6, seed=1)
    assert set(roots) == {0, 1} and len(roots) == 6
    with pytest.raises(ValueError):
        select_roots(csr([], 3), 1, seed=1)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kernel="dfs"),
        dict(optimizations=("turbo",)),
        dict(roots=0),
        dict(threads=0),
        dict(kernel="top-down", optimizations=("block-search",)),
        dict(kernel="hybrid", tree_pass="teet"),
        dict(kernel="et-bfs", mh=2, tree_pass="teolv"),
        dict(kernel="et-bfs", mh=-3),
    ],
)
def test_config_errors(kwargs):
    with pytest.raises(ConfigError):
        BenchConfig(**kwargs).resolved()


def test_config_folds_kernel_into_flags():
    assert BenchConfig(kernel="et-bfs", optimizations=("degree-aware", "rm-zero")).resolved().optimizations == (
        "rm-zero", "degree-aware", "et")
    cfg = BenchConfig(kernel="block-search").resolved()
    assert cfg.bottom_up == "block-search"
    assert BenchConfig(kernel="top-down").resolved().bottom_up == "none"


KERNEL_CONFIGS = [
    BenchConfig(kernel="top-down"),
    BenchConfig(kernel="hybrid", optimizations=("rm-zero",)),
    BenchConfig(kernel="hybrid", optimizations=("round-robin",), threads=2),
    BenchConfig(kernel="degree-aware"),
    BenchConfig(kernel="block-search", optimizations=("rm-zero", "round-robin")),
    BenchConfig(kernel="et-bfs"),
    BenchConfig(kernel="et-bfs", mh=-1),
    BenchConfig(kernel="et-bfs", mh=1, optimizations=("rm-zero", "round-robin", "block-search"), threads=2),
    BenchConfig(kernel="top-down", optimizations=("et",), mh=0, tree_pass="teet"),
]


@pytest.mark.parametrize("config", KERNEL_CONFIGS, ids=lambda c: f"{c.kernel}-{'+'.join(c.optimizations)}-{c.mh}")
def test_every_configuration_validates(kron, config):
    config.roots = 6
    config.keep_trees = True
    report = run_benchmark(kron, config)
    assert report.all_valid and len(report.per_root) == 6
    for r in report.per_root:
        assert r.levels().tolist() == oracle_bfs(kron, r.root)
        assert r.traversed_edges > 0 and r.gteps > 0
    assert report.preprocessing_seconds >= 0


def test_report_serialization(kron):
    report = run_benchmark(kron, BenchConfig(kernel="et-bfs", roots=3))
    data = json.loads(json.dumps(report.to_dict()))
    assert data["schema"] == SCHEMA
    assert data["classification"]["counts"]["TL"] > 0
    assert len(data["per_root"]) == 3
    assert data["aggregate"]["all_valid"] is True
    assert "GTEPS" in report.table()
    assert gteps_ratio(report, report) == pytest.approx(1.0)


def test_traversed_edges_are_component_edges():
    g = csr([(0, 1), (1, 2), (3, 4)], 6)
    report = run_benchmark(g, BenchConfig(roots=4, seed=3))
    for r in report.per_root:
        assert r.traversed_edges == (2 if r.root < 3 else 1)


def test_load_graph_sources(tmp_path):
    from etbfs.io import write_graph

    edges = generate_kronecker(KroneckerParams(scale=5))
    write_graph(tmp_path / "g.etg", edges)
    a, info = load_graph(tmp_path / "g.etg")
    b, _ = load_graph(KroneckerParams(scale=5))
    assert a == b == load_graph(edges)[0]
    assert info["edge_tuples"] == len(edges)
    assert load_graph(path(3))[1]["vertex_count"] == 3


def test_thread_count_does_not_change_results(kron):
    base = run_benchmark(kron, BenchConfig(kernel="et-bfs", roots=5, keep_trees=True))
    other = run_benchmark(kron, BenchConfig(kernel="et-bfs", roots=5, threads=2, keep_trees=True))
    for a, b in zip(base.per_root, other.per_root):
        assert a.root == b.root and a.traversed_edges == b.traversed_edges
        assert np.array_equal(a.levels(), b.levels())


def test_gteps_examples():
    assert compute_gteps(10**9, 1.0) == 1.0
    assert compute_gteps(0, 0.5) == 0.0
    assert compute_gteps(2**30, 0.0311) == pytest.approx(34.5, abs=0.05)


def test_select_roots_uniform():
    from scipy.stats import chisquare

    from corpus import erdos_renyi

    g = erdos_renyi(100, 0.05, np.random.default_rng(1))
    eligible = np.flatnonzero(g.degrees > 0)
    # count > eligible, so draws repeat and should be uniform over eligible vertices
    roots = select_roots(g, 10_000, seed=9)
    counts = np.bincount(roots, minlength=100)[eligible]
    assert counts.sum() == 10_000 and np.all(np.bincount(roots, minlength=100)[g.degrees == 0] == 0)
    # the first len(eligible) draws are distinct, the rest are free draws
    assert chisquare(counts).pvalue > 0.01


def test_et_and_hybrid_traverse_same_edges(kron):
    a = run_benchmark(kron, BenchConfig(kernel="hybrid", roots=8))
    b = run_benchmark(kron, BenchConfig(kernel="et-bfs", roots=8, mh=-1))
    assert [r.traversed_edges for r in a.per_root] == [r.traversed_edges for r in b.per_root]


def test_aggregate_mean(kron):
    report = run_benchmark(kron, BenchConfig(roots=5))
    agg = report.aggregate()
    assert agg["mean_gteps"] == pytest.approx(sum(report.gteps) / 5, rel=1e-9)
    assert agg["min_gteps"] <= agg["mean_gteps"] <= agg["max_gteps"]
