"""Automatic goal-graph drawing: layering, crossing reduction, coordinates, export.

Longest-path layers with dummy nodes for long edges, a fixed number of
barycenter sweeps that never accept a worse ordering, and deterministic DOT
and SVG output (tasks hexagonal, goals rounded).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .model import DomainError, GoalGraph, NodeKind
from .propagation import topological_order

BOX_W = 160.0
BOX_H = 48.0
DEFAULT_NODE_GAP = 40.0
DEFAULT_LAYER_GAP = 120.0
SWEEPS = 4
SVG_MARGIN = 60.0


@dataclass(frozen=True)
class Layering:
    graph: GoalGraph
    layers: Mapping[str, int]
    segments: tuple[tuple[str, str], ...]  # every segment spans exactly one layer
    dummies: frozenset[str]
    routes: Mapping[str, tuple[str, ...]]  # link id -> source, dummies..., target


@dataclass(frozen=True)
class Ordering:
    layering: Layering
    layers: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class PlacedNode:
    id: str
    layer: int
    order: int
    x: float
    y: float
    dummy: bool
    kind: str | None
    name: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "layer": self.layer,
            "order": self.order,
            "x": self.x,
            "y": self.y,
            "dummy": self.dummy,
            "kind": self.kind,
            "name": self.name,
        }


@dataclass(frozen=True)
class RoutedEdge:
    link: str
    source: str
    target: str
    points: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "link": self.link,
            "source": self.source,
            "target": self.target,
            "points": [[x, y] for x, y in self.points],
        }


@dataclass(frozen=True)
class Layout:
    nodes: tuple[PlacedNode, ...]
    edges: tuple[RoutedEdge, ...]
    node_gap: float
    layer_gap: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "box": {"width": BOX_W, "height": BOX_H},
            "node_gap": self.node_gap,
            "layer_gap": self.layer_gap,
            "nodes": [n.to_dict() for n in self.nodes],
            "edges": [e.to_dict() for e in self.edges],
        }


def assign_layers(graph: GoalGraph) -> Layering:
    """Longest-path layering with dummy nodes so every edge spans one layer.

    Nodes without contributors (all tasks, standalone goals) sit at layer 0;
    each goal sits one above its highest contributor.
    """
    order = topological_order(graph)  # raises on cycles
    layers: dict[str, int] = {}
    for node_id in order:
        contributors = [layers[link.source] for link in graph.inbound(node_id)]
        layers[node_id] = 1 + max(contributors) if contributors else 0

    node_ids = set(layers)
    segments: list[tuple[str, str]] = []
    dummies: set[str] = set()
    routes: dict[str, tuple[str, ...]] = {}
    for link in sorted(graph.links, key=lambda l: l.id):
        span = layers[link.target] - layers[link.source]
        chain = [link.source]
        for step in range(1, span):
            dummy_id = f"{link.id}~{step}"
            while dummy_id in node_ids:
                dummy_id += "~"
            node_ids.add(dummy_id)
            dummies.add(dummy_id)
            layers[dummy_id] = layers[link.source] + step
            chain.append(dummy_id)
        chain.append(link.target)
        routes[link.id] = tuple(chain)
        segments.extend(zip(chain, chain[1:]))
    return Layering(
        graph=graph,
        layers=dict(layers),
        segments=tuple(segments),
        dummies=frozenset(dummies),
        routes=routes,
    )


def count_crossings(layers: Sequence[Sequence[str]], segments: Sequence[tuple[str, str]]) -> int:
    position = {
        node_id: index for layer in layers for index, node_id in enumerate(layer)
    }
    layer_of = {node_id: li for li, layer in enumerate(layers) for node_id in layer}
    total = 0
    for li in range(len(layers) - 1):
        edges = sorted(
            (position[src], position[dst])
            for src, dst in segments
            if layer_of.get(src) == li and layer_of.get(dst) == li + 1
        )
        for i in range(len(edges)):
            for j in range(i + 1, len(edges)):
                if (edges[i][0] - edges[j][0]) * (edges[i][1] - edges[j][1]) < 0:
                    total += 1
    return total


def order_layers(layering: Layering) -> Ordering:
    """Fixed barycenter sweeps (down, up, down, up) from an id-sorted order.

    A sweep is kept only if it does not increase the crossing count, so the
    result is never worse than the initial order and repeated calls agree.
    """
    max_layer = max(layering.layers.values(), default=0)
    layers: list[list[str]] = [[] for _ in range(max_layer + 1)]
    for node_id in sorted(layering.layers):
        layers[layering.layers[node_id]].append(node_id)

    below: dict[str, list[str]] = {}
    above: dict[str, list[str]] = {}
    for src, dst in layering.segments:
        below.setdefault(dst, []).append(src)
        above.setdefault(src, []).append(dst)

    def barycenter_sort(current: list[list[str]], downward: bool) -> list[list[str]]:
        result = [list(layer) for layer in current]
        layer_range = range(1, len(result)) if downward else range(len(result) - 2, -1, -1)
        neighbors = below if downward else above
        for li in layer_range:
            reference = {node_id: float(i) for i, node_id in enumerate(result[li - 1 if downward else li + 1])}
            keys: dict[str, float] = {}
            for index, node_id in enumerate(result[li]):
                attached = [reference[n] for n in neighbors.get(node_id, []) if n in reference]
                keys[node_id] = sum(attached) / len(attached) if attached else float(index)
            result[li].sort(key=lambda n: keys[n])
        return result

    best = count_crossings(layers, layering.segments)
    for sweep in range(SWEEPS):
        candidate = barycenter_sort(layers, downward=(sweep % 2 == 0))
        crossings = count_crossings(candidate, layering.segments)
        if crossings <= best:
            layers = candidate
            best = crossings
    return Ordering(layering=layering, layers=tuple(tuple(layer) for layer in layers))


def assign_coordinates(
    ordering: Ordering,
    node_gap: float = DEFAULT_NODE_GAP,
    layer_gap: float = DEFAULT_LAYER_GAP,
) -> Layout:
    """Grid coordinates: layers stacked by layer_gap, nodes centered per layer.

    Horizontal pitch is box width plus node_gap so default-size boxes never
    overlap; the vertical pitch never drops below the box height.
    """
    if node_gap <= 0 or layer_gap <= 0:
        raise DomainError("node_gap and layer_gap must be positive")
    layering = ordering.layering
    graph = layering.graph
    x_pitch = BOX_W + node_gap
    y_pitch = max(layer_gap, BOX_H)

    placed: list[PlacedNode] = []
    coords: dict[str, tuple[float, float]] = {}
    for layer_index, layer in enumerate(ordering.layers):
        offset = (len(layer) - 1) / 2.0
        for order_index, node_id in enumerate(layer):
            x = (order_index - offset) * x_pitch
            y = layer_index * y_pitch
            coords[node_id] = (x, y)
            if node_id in layering.dummies:
                placed.append(
                    PlacedNode(
                        id=node_id,
                        layer=layer_index,
                        order=order_index,
                        x=x,
                        y=y,
                        dummy=True,
                        kind=None,
                        name="",
                    )
                )
            else:
                node = graph.node_for_id(node_id)
                placed.append(
                    PlacedNode(
                        id=node_id,
                        layer=layer_index,
                        order=order_index,
                        x=x,
                        y=y,
                        dummy=False,
                        kind=node.kind.value,
                        name=node.name,
                    )
                )

    edges: list[RoutedEdge] = []
    for link in sorted(graph.links, key=lambda l: l.id):
        chain = layering.routes[link.id]
        edges.append(
            RoutedEdge(
                link=link.id,
                source=link.source,
                target=link.target,
                points=tuple(coords[node_id] for node_id in chain),
            )
        )
    return Layout(nodes=tuple(placed), edges=tuple(edges), node_gap=node_gap, layer_gap=layer_gap)


def layout_graph(
    graph: GoalGraph,
    node_gap: float = DEFAULT_NODE_GAP,
    layer_gap: float = DEFAULT_LAYER_GAP,
) -> Layout:
    return assign_coordinates(order_layers(assign_layers(graph)), node_gap, layer_gap)


# -- export ---------------------------------------------------------------------


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def export_dot(source: GoalGraph | Layout) -> str:
    """DOT text with goal-notation shapes: hexagonal tasks, rounded goals, edges bottom-up."""
    lines = ["digraph goalgraph {", "  rankdir=BT;"]
    if isinstance(source, Layout):
        nodes = [(n.id, n.kind, n.name, (n.x, n.y)) for n in source.nodes if not n.dummy]
        edge_pairs = [(e.source, e.target) for e in source.edges]
    else:
        nodes = [
            (n.id, n.kind.value, n.name, None) for n in sorted(source.nodes, key=lambda n: n.id)
        ]
        edge_pairs = [(l.source, l.target) for l in sorted(source.links, key=lambda l: l.id)]
    for node_id, kind, name, pos in sorted(nodes):
        shape = "hexagon" if kind == NodeKind.TASK.value else "box"
        attrs = [f'label="{_dot_escape(name)}"', f"shape={shape}"]
        if kind == NodeKind.GOAL.value:
            attrs.append("style=rounded")
        if pos is not None:
            attrs.append(f'pos="{_num(pos[0])},{_num(pos[1])}!"')
        lines.append(f'  "{_dot_escape(node_id)}" [{", ".join(attrs)}];')
    for src, dst in sorted(edge_pairs):
        lines.append(f'  "{_dot_escape(src)}" -> "{_dot_escape(dst)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _num(value: float) -> str:
    return format(value, "g")


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _hexagon_points(cx: float, cy: float) -> str:
    notch = BOX_H / 2.0
    half_w, half_h = BOX_W / 2.0, BOX_H / 2.0
    corners = [
        (cx - half_w + notch, cy - half_h),
        (cx + half_w - notch, cy - half_h),
        (cx + half_w, cy),
        (cx + half_w - notch, cy + half_h),
        (cx - half_w + notch, cy + half_h),
        (cx - half_w, cy),
    ]
    return " ".join(f"{_num(x)},{_num(y)}" for x, y in corners)


def export_svg(layout: Layout) -> str:
    """Standalone SVG 1.1 drawing, byte-deterministic for a given layout.

    Layer 0 (tasks) renders at the bottom, root goals at the top.
    """
    xs = [n.x for n in layout.nodes]
    ys = [n.y for n in layout.nodes]
    min_x, max_x = (min(xs), max(xs)) if xs else (0.0, 0.0)
    max_y = max(ys) if ys else 0.0
    width = (max_x - min_x) + BOX_W + 2 * SVG_MARGIN
    height = max_y + BOX_H + 2 * SVG_MARGIN

    def place(x: float, y: float) -> tuple[float, float]:
        return (x - min_x + BOX_W / 2.0 + SVG_MARGIN, (max_y - y) + BOX_H / 2.0 + SVG_MARGIN)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">',
        "  <defs>",
        '    <marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="7" markerHeight="7" orient="auto-start-reverse">',
        '      <path d="M 0 0 L 10 5 L 0 10 z" fill="#555555"/>',
        "    </marker>",
        "  </defs>",
    ]
    for edge in layout.edges:
        points = [place(x, y) for x, y in edge.points]
        if len(points) >= 2:
            # Trim endpoints to the node-box borders so arrowheads stay visible.
            points[0] = (points[0][0], points[0][1] - BOX_H / 2.0)
            points[-1] = (points[-1][0], points[-1][1] + BOX_H / 2.0)
        path = " ".join(f"{_num(x)},{_num(y)}" for x, y in points)
        parts.append(
            f'  <polyline points="{path}" fill="none" stroke="#555555" '
            f'stroke-width="1.5" marker-end="url(#arrow)"/>'
        )
    for node in layout.nodes:
        if node.dummy:
            continue
        cx, cy = place(node.x, node.y)
        if node.kind == NodeKind.TASK.value:
            parts.append(
                f'  <polygon points="{_hexagon_points(cx, cy)}" fill="#dce9f7" '
                f'stroke="#2c5d8f" stroke-width="1.5"/>'
            )
        else:
            parts.append(
                f'  <rect x="{_num(cx - BOX_W / 2.0)}" y="{_num(cy - BOX_H / 2.0)}" '
                f'width="{_num(BOX_W)}" height="{_num(BOX_H)}" rx="12" '
                f'fill="#eef7e9" stroke="#3c7a3c" stroke-width="1.5"/>'
            )
        parts.append(
            f'  <text x="{_num(cx)}" y="{_num(cy - 4)}" text-anchor="middle" '
            f'font-family="Helvetica, Arial, sans-serif" font-size="10" '
            f'fill="#1a1a1a">{_xml_escape(node.id)}</text>'
        )
        parts.append(
            f'  <text x="{_num(cx)}" y="{_num(cy + 10)}" text-anchor="middle" '
            f'font-family="Helvetica, Arial, sans-serif" font-size="9" '
            f'fill="#444444">{_xml_escape(_clip(node.name))}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _clip(text: str, limit: int = 30) -> str:
    return text if len(text) <= limit else text[: limit - 3] + "..."
