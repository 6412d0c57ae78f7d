import random
import statistics

import networkx as nx
import pytest

from robustlink.config import ScenarioConfig
from robustlink.graph import Graph
from robustlink.scenario import (
    BASource,
    ScenarioClass,
    TargetSet,
    assign_vd,
    derive_rng,
    draw_sample,
    draw_target_edge,
    gen_ba,
    gen_powerlaw_config,
    observed_graph,
    powerlaw_degrees,
    rw_sample,
)

from conftest import to_nx

# chi-square critical value, 19 degrees of freedom, alpha = 0.01
CHI2_19_99 = 36.191


def test_ba_small_is_tree():
    g = gen_ba(3, 1, random.Random(0))
    assert g.num_edges == 2 and nx.is_tree(to_nx(g))


def test_ba_mean_degree_and_shape():
    g = gen_ba(500, 5, random.Random(1))
    assert 2 * g.num_edges / g.n == pytest.approx(10, abs=0.2)
    assert nx.is_connected(to_nx(g))


@pytest.mark.parametrize("n,m", [(5, 0), (5, 5), (3, 7)])
def test_ba_rejects_bad_parameters(n, m):
    with pytest.raises(ValueError):
        gen_ba(n, m, random.Random(0))


def test_powerlaw_degrees():
    means = [statistics.mean(powerlaw_degrees(500, 2.0, random.Random(s))) for s in range(20)]
    assert statistics.mean(means) == pytest.approx(5, abs=1)
    for s in range(5):
        assert sum(powerlaw_degrees(50, 2.5, random.Random(s))) % 2 == 0


def test_powerlaw_simple_graph_mean_degree():
    # dropping self-loops and repeated matches strips hub degree, so the realized mean sits below the drawn one
    means = [2 * gen_powerlaw_config(500, 2.0, random.Random(s)).num_edges / 500 for s in range(20)]
    assert 2.5 <= statistics.mean(means) <= 4.5


def test_powerlaw_steep_tail():
    g = gen_powerlaw_config(500, 10.0, random.Random(3))
    assert sum(1 for d in g.degrees() if d <= 1) / g.n > 0.95
    assert all(u != v for u, v in g.edges())


def test_powerlaw_rejects_bad_parameters():
    with pytest.raises(ValueError):
        gen_powerlaw_config(10, 1.0, random.Random(0))
    with pytest.raises(ValueError):
        gen_powerlaw_config(1, 2.0, random.Random(0))


def test_rw_sample_whole_and_single():
    g = gen_ba(60, 2, random.Random(4))
    assert rw_sample(g, g.n, 0.15, random.Random(5)) == g
    one = rw_sample(g, 1, 0.15, random.Random(5))
    assert one.n == 1 and one.num_edges == 0
    with pytest.raises(ValueError):
        rw_sample(g, g.n + 1, 0.15, random.Random(0))
    with pytest.raises(ValueError):
        rw_sample(g, 5, 1.0, random.Random(0))


def test_rw_sample_stays_in_dense_core():
    # a large preferential-attachment core plus scattered small pieces
    core = gen_ba(2000, 4, random.Random(6))
    edges = list(core.edges())
    for i in range(2000, 2300, 3):
        edges += [(i, i + 1), (i + 1, i + 2)]
    g = Graph(2300, edges)
    for s in range(20):
        sub = rw_sample(g, 500, 0.15, random.Random(s))
        assert sub.n == 500
        assert len(sub.components()[0]) >= 0.9 * sub.n


def test_clustering_targets_have_high_degree():
    wins = 0
    for s in range(20):
        rng = random.Random(s)
        g = gen_ba(500, 5, rng)
        h, t = assign_vd(g, "clustering", 10, rng)
        wins += statistics.mean(h.degree(u) for u in t.vd) > 2 * h.num_edges / h.n
    assert wins >= 19


def test_sparse_full_size():
    g = gen_ba(30, 2, random.Random(0))
    h, t = assign_vd(g, "sparse", 30, random.Random(1))
    assert t.vd == tuple(range(30))
    assert sorted(h.degrees()) == sorted(g.degrees())


def test_assign_vd_labels_and_errors():
    g = gen_ba(40, 3, random.Random(2))
    h, t = assign_vd(g, "clustering", 6, random.Random(3))
    assert len(t.pairs) == 15
    assert all((t.labels[p] > 0) == h.has_edge(*p) for p in t.pairs)
    with pytest.raises(ValueError):
        assign_vd(g, "sparse", 41, random.Random(0))
    with pytest.raises(ValueError):
        assign_vd(g, "scattered", 4, random.Random(0))


def test_linked_target_fraction():
    fractions = []
    for s in range(20):
        rng = random.Random(s)
        _, t = assign_vd(gen_ba(500, 5, rng), "clustering", 10, rng)
        fractions.append(t.edge_fraction())
    assert 0.3 <= statistics.mean(fractions) <= 0.7


def cfg(cls, **kw):
    return ScenarioConfig(source=BASource(80, 3), scenario_class=cls, vd_size=8, seed=3, **kw)


def test_targeted_draw_stays_inside_targets():
    for i in range(20):
        s = draw_sample(cfg("TCA"), "plan", i)
        assert set(s.h_a) <= set(s.targets.vd)
        assert s.graph.has_edge(*s.h_a) and s.overlaps_target
        # the analyst never sees linked target pairs
        assert not s.observed.has_edge(*s.h_a)
        assert s.observed == observed_graph(s.graph, s.targets)


def test_random_draw_is_uniform_over_edges():
    g = gen_ba(12, 2, random.Random(0))
    g = Graph(g.n, list(g.edges())[:20])
    assert g.num_edges == 20
    t = TargetSet.from_graph(g, 3)
    rng = random.Random(7)
    counts = dict.fromkeys(g.edges(), 0)
    n = 10_000
    for _ in range(n):
        counts[draw_target_edge(g, t, False, rng)] += 1
    expected = n / 20
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < CHI2_19_99


def test_targeted_draw_without_edges():
    g = Graph(6, [(3, 4), (4, 5)])
    assert draw_target_edge(g, TargetSet.from_graph(g, 3), True, random.Random(0)) is None


def test_determinism():
    a = [draw_sample(cfg("RSA"), "eval", i) for i in range(5)]
    b = [draw_sample(cfg("RSA"), "eval", i) for i in reversed(range(5))][::-1]
    assert a == b
    assert derive_rng(1, "x", 2).random() == derive_rng(1, "x", 2).random()
    assert derive_rng(1, "x", 2).random() != derive_rng(1, "x", 3).random()


def test_scenario_classes():
    assert ScenarioClass("TCA").targeted and ScenarioClass("TCA").vd_mode == "clustering"
    assert not ScenarioClass("RSA").targeted and ScenarioClass("RSA").vd_mode == "sparse"
