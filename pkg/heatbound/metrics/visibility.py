import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra
from shapely.geometry import LineString, Polygon

from ..errors import DisconnectedError
from ..geometry import Domain

Point = Tuple[float, float]


def _visible(polygon: Polygon, a: Point, b: Point) -> bool:
    if a == b:
        return True
    return bool(polygon.covers(LineString([a, b])))


def reflex_corners(polygon: Polygon) -> List[Point]:
    """Corners with an interior angle above pi; shortest paths only bend there."""
    ring = [tuple(c) for c in list(polygon.exterior.coords)[:-1]]
    orientation = 1.0 if polygon.exterior.is_ccw else -1.0
    reflex = []
    for i, (bx, by) in enumerate(ring):
        ax, ay = ring[i - 1]
        cx, cy = ring[(i + 1) % len(ring)]
        turn = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
        if orientation * turn < 0:
            reflex.append((bx, by))
    return reflex


def shortest_polygon_path(polygon: Polygon, start: Point, goal: Point) -> Tuple[float, List[Point]]:
    """Dijkstra over the visibility graph of start, goal and the reflex corners."""
    if start == goal:
        return 0.0, [start, goal]
    nodes: List[Point] = [start, goal] + reflex_corners(polygon)

    rows, cols, lengths = [], [], []
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if _visible(polygon, nodes[i], nodes[j]):
                rows.append(i)
                cols.append(j)
                lengths.append(math.dist(nodes[i], nodes[j]))
    graph = sparse.csr_matrix((lengths, (rows, cols)), shape=(len(nodes), len(nodes)))
    dist, predecessors = dijkstra(graph, directed=False, indices=0, return_predecessors=True)
    if not math.isfinite(dist[1]):
        raise DisconnectedError("disconnected: no visibility path between the points.")

    path = [nodes[1]]
    current = 1
    while current != 0:
        current = int(predecessors[current])
        path.append(nodes[current])
    path.reverse()
    return float(dist[1]), path


def visibility_distance(domain: Domain, x: Sequence[float], y: Sequence[float]) -> float:
    polygon = domain.polygon()
    start = (float(x[0]), float(x[1]))
    goal = (float(y[0]), float(y[1]))
    length, _ = shortest_polygon_path(polygon, start, goal)
    return length


def visibility_path(domain: Domain, x: Sequence[float], y: Sequence[float]) -> List[np.ndarray]:
    polygon = domain.polygon()
    _, path = shortest_polygon_path(polygon, (float(x[0]), float(x[1])), (float(y[0]), float(y[1])))
    return [np.asarray(p) for p in path]
