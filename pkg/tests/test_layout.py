from __future__ import annotations

import pathlib
import random
import re

import pytest

from goalbench.model import (
    ContributionLink,
    DomainError,
    GoalGraph,
    Node,
    NodeKind,
    UsageProfile,
)
from goalbench.layout import (
    BOX_H,
    BOX_W,
    assign_coordinates,
    assign_layers,
    count_crossings,
    export_dot,
    export_svg,
    layout_graph,
    order_layers,
)
from graphgen import random_dag

GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"


def _topology(edges, node_ids=None):
    ids = node_ids or sorted({n for edge in edges for n in edge})
    nodes = tuple(Node(id=i, kind=NodeKind.GOAL, name=f"node {i}") for i in ids)
    links = tuple(
        ContributionLink(id=f"E{k}", source=a, target=b, samples={})
        for k, (a, b) in enumerate(edges)
    )
    return GoalGraph(profiles=(UsageProfile(id="P", name="P"),), nodes=nodes, links=links)


# -- layering --------------------------------------------------------------------


def test_fixture_layers(signage):
    layering = assign_layers(signage)
    assert layering.layers["T1"] == 0
    assert layering.layers["G1"] == 1
    assert layering.layers["G2"] == 2
    assert layering.layers["G4"] == 3
    assert not layering.dummies


def test_single_node_layer_zero():
    layering = assign_layers(_topology([], node_ids=["A"]))
    assert layering.layers == {"A": 0}


def test_skip_layer_edge_gets_one_dummy():
    graph = _topology([("A", "B"), ("B", "C"), ("A", "C")])
    layering = assign_layers(graph)
    assert layering.layers["A"] == 0 and layering.layers["C"] == 2
    assert len(layering.dummies) == 1
    dummy = next(iter(layering.dummies))
    assert layering.layers[dummy] == 1
    for src, dst in layering.segments:
        assert layering.layers[dst] - layering.layers[src] == 1


# -- ordering ---------------------------------------------------------------------


def _brute_crossings(layer_lists, segments):
    # Independent oracle: count inversions pair by pair.
    pos = {n: i for layer in layer_lists for i, n in enumerate(layer)}
    layer_of = {n: li for li, layer in enumerate(layer_lists) for n in layer}
    total = 0
    edges = [
        (pos[a], pos[b], layer_of[a])
        for a, b in segments
        if layer_of[b] == layer_of[a] + 1
    ]
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            (a1, b1, l1), (a2, b2, l2) = edges[i], edges[j]
            if l1 == l2 and (a1 - a2) * (b1 - b2) < 0:
                total += 1
    return total


def test_chain_has_no_crossings(signage):
    ordering = order_layers(assign_layers(signage))
    assert count_crossings(ordering.layers, ordering.layering.segments) == 0


def test_crossed_matching_untangled_in_one_pass():
    # Two-edge bipartite matching crossed under id-sorted order.
    graph = _topology([("A", "D"), ("B", "C")])
    layering = assign_layers(graph)
    initial = [sorted(n for n, l in layering.layers.items() if l == 0),
               sorted(n for n, l in layering.layers.items() if l == 1)]
    assert _brute_crossings(initial, layering.segments) == 1
    ordering = order_layers(layering)
    assert _brute_crossings(ordering.layers, layering.segments) == 0


def test_ordering_idempotent():
    rng = random.Random(4)
    for _ in range(10):
        graph = random_dag(rng, max_nodes=15)
        first = order_layers(assign_layers(graph))
        second = order_layers(assign_layers(graph))
        assert first.layers == second.layers


def test_barycenter_never_worse_than_initial_order():
    rng = random.Random(12)
    for _ in range(50):
        graph = random_dag(rng, max_nodes=40)
        layering = assign_layers(graph)
        max_layer = max(layering.layers.values(), default=0)
        initial = [
            sorted(n for n, l in layering.layers.items() if l == li)
            for li in range(max_layer + 1)
        ]
        ordering = order_layers(layering)
        assert _brute_crossings(ordering.layers, layering.segments) <= _brute_crossings(
            initial, layering.segments
        )


# -- coordinates -------------------------------------------------------------------


def test_single_node_at_origin():
    layout = layout_graph(_topology([], node_ids=["A"]))
    node = layout.nodes[0]
    assert (node.x, node.y) == (0.0, 0.0)


def test_same_layer_spacing_at_least_node_gap():
    graph = _topology([("A", "C"), ("B", "C")])
    layout = layout_graph(graph, node_gap=40.0)
    first_layer = sorted(n.x for n in layout.nodes if n.layer == 0)
    assert first_layer[1] - first_layer[0] >= 40.0


def test_fixture_has_four_y_bands(signage):
    layout = layout_graph(signage)
    assert len({n.y for n in layout.nodes}) == 4


def _no_overlaps(layout):
    real = [n for n in layout.nodes if not n.dummy]
    for i, a in enumerate(real):
        for b in real[i + 1 :]:
            if abs(a.x - b.x) < BOX_W and abs(a.y - b.y) < BOX_H:
                return False
    return True


def test_no_box_overlaps_on_random_dags():
    rng = random.Random(9)
    for _ in range(20):
        layout = layout_graph(random_dag(rng, max_nodes=30))
        assert _no_overlaps(layout)


def test_gaps_must_be_positive(signage):
    with pytest.raises(DomainError):
        layout_graph(signage, node_gap=0.0)
    with pytest.raises(DomainError):
        layout_graph(signage, layer_gap=-5.0)


def test_unique_layer_order_slots():
    rng = random.Random(14)
    layout = layout_graph(random_dag(rng, max_nodes=25))
    slots = [(n.layer, n.order) for n in layout.nodes]
    assert len(slots) == len(set(slots))


# -- export -----------------------------------------------------------------------


def test_dot_escapes_quotes_roundtrip():
    graph = _topology([], node_ids=["A"])
    node = Node(id="A", kind=NodeKind.GOAL, name='say "less" \\ do more')
    graph = GoalGraph(profiles=graph.profiles, nodes=(node,), links=())
    dot = export_dot(graph)
    match = re.search(r'label="((?:[^"\\]|\\.)*)"', dot)
    assert match
    unescaped = match.group(1).replace('\\"', '"').replace("\\\\", "\\")
    assert unescaped == 'say "less" \\ do more'


def test_empty_graph_exports_valid_shells():
    graph = GoalGraph(profiles=(UsageProfile(id="P", name="P"),))
    dot = export_dot(graph)
    assert dot.startswith("digraph") and dot.rstrip().endswith("}")
    svg = export_svg(layout_graph(graph))
    assert svg.startswith("<?xml") and "</svg>" in svg


def test_svg_deterministic_across_runs(signage):
    first = export_svg(layout_graph(signage))
    second = export_svg(layout_graph(signage))
    assert first == second


def test_dot_golden(signage):
    assert export_dot(signage) == (GOLDEN_DIR / "signage.dot").read_text()


def test_svg_golden(signage):
    assert export_svg(layout_graph(signage)) == (GOLDEN_DIR / "signage.svg").read_text()


def test_layout_json_shape(signage):
    payload = layout_graph(signage).to_dict()
    assert payload["box"] == {"width": BOX_W, "height": BOX_H}
    ids = {n["id"] for n in payload["nodes"]}
    assert {"T1", "G1", "G2", "G4"} <= ids
    assert len(payload["edges"]) == 3
    for edge in payload["edges"]:
        assert len(edge["points"]) >= 2
