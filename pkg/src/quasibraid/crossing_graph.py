"""Sampled picture of the crossing locus: where two strands trade places.

Over the region of interest, the set of z whose fiber has two roots sharing a
rotated real part forms a system of curves attached to the branch points.  A
loop's braid word is readable from its successive transversal crossings of
those curves: each curve carries a strand position label k and a
co-orientation (the side whose traversal reads the positive letter).  This
module extracts that picture on a grid and turns it back into words, which
gives a second, independent route to the braid word of a loop.

Extraction is by continuation on grid edges.  Each lattice fiber is solved
and sorted by rotated real part; a grid edge whose endpoint orders differ by
one adjacent transposition carries a crossing, located by bisection.  Within
each cell the crossing points of equal label are joined by straight segments;
cells that cannot be resolved that way are subdivided a bounded number of
times and then flagged.  Cells containing a branch point are excluded, so
curve ends near branch points stop at the cell boundary.

The grid is jittered by a fixed sub-cell offset so that lattice nodes and
grid lines do not land exactly on symmetric loci such as the real axis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .branch import BranchData
from .errors import InputError, NumericalFailure
from .monodromy import _fibers_batch
from .paths import Arc, LoopPath, Primitive, Segment, primitive_intersections
from .poly import BivariatePolynomial
from .words import BraidLetter, BraidWord

__all__ = [
    "LabeledSegment",
    "GraphEdge",
    "CrossingGraph",
    "sample_crossing_graph",
    "crossings_of",
    "graph_to_json",
    "graph_from_json",
]

_JITTER_X = (math.sqrt(2.0) - 1.0) / 4.0
_JITTER_Y = (math.sqrt(3.0) - 1.0) / 4.0
_MAX_CELL_DEPTH = 3
_EDGE_SPLIT_DEPTH = 12
_BISECT_ITERATIONS = 48


@dataclass(frozen=True)
class LabeledSegment:
    """One straight piece of the locus: endpoints, strand position label,
    and the unit normal whose traversal direction reads the positive letter."""

    start: complex
    end: complex
    label: int
    normal: complex


@dataclass(frozen=True)
class GraphEdge:
    """A chained polyline of equal-label segments.  ``side`` is +1 when the
    positive-reading normal is the counterclockwise perpendicular of the
    travel direction along ``points``, -1 when it is the clockwise one."""

    label: int
    side: int
    points: tuple[complex, ...]


@dataclass(frozen=True)
class CrossingGraph:
    segments: tuple[LabeledSegment, ...]
    edges: tuple[GraphEdge, ...]
    vertices: tuple[complex, ...]
    region: tuple[float, float, float, float]
    resolution: int
    flagged: tuple[tuple[float, float, float, float], ...]
    strands: int
    theta: float

    def __post_init__(self) -> None:
        for seg in self.segments:
            if not (1 <= seg.label <= self.strands - 1):
                raise InputError(
                    f"segment label {seg.label} outside 1..{self.strands - 1}"
                )


class _Unresolved(Exception):
    """Internal: a grid edge could not be reduced to simple crossings."""


def _sorted_fibers(f: BivariatePolynomial, rot: complex, zs: np.ndarray) -> np.ndarray:
    fibers = _fibers_batch(f, zs)
    rv = rot * fibers
    order = np.lexsort((rv.imag, rv.real), axis=-1)
    return np.take_along_axis(fibers, order, axis=-1)


def _row_min_gap(vals: np.ndarray) -> np.ndarray:
    d = np.abs(vals[..., :, None] - vals[..., None, :])
    eye = np.eye(vals.shape[-1], dtype=bool)
    d[..., eye] = np.inf
    return d.min(axis=(-2, -1))


def _row_adjacent_re_gap(vals: np.ndarray, rot: complex) -> np.ndarray:
    re = (rot * vals).real
    if vals.shape[-1] < 2:
        return np.full(vals.shape[:-1], np.inf)
    return np.diff(re, axis=-1).min(axis=-1)


def _match_rows(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nearest matching per row: selection, max displacement, bijectivity."""
    d = np.abs(a[:, :, None] - b[:, None, :])
    sel = d.argmin(axis=2)
    n = a.shape[1]
    rows = np.arange(a.shape[0])[:, None]
    move = d[rows, np.arange(n)[None, :], sel].max(axis=1)
    bij = (np.sort(sel, axis=1) == np.arange(n)[None, :]).all(axis=1)
    return sel, move, bij


def _classify_perms(sel: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split rows into identity, single adjacent transposition, and other."""
    n = sel.shape[1]
    idcols = np.arange(n)[None, :]
    mism = sel != idcols
    counts = mism.sum(axis=1)
    identity = counts == 0
    swap_pos = np.full(sel.shape[0], -1)
    two = counts == 2
    if two.any():
        first = np.where(mism, idcols, n).min(axis=1)
        rows = np.nonzero(two)[0]
        for r in rows:
            p = int(first[r])
            if (
                p + 1 < n
                and sel[r, p] == p + 1
                and sel[r, p + 1] == p
            ):
                swap_pos[r] = p
    single = swap_pos >= 0
    other = ~identity & ~single
    return identity, swap_pos, other


def _bisect_edge(
    f: BivariatePolynomial,
    rot: complex,
    a: complex,
    b: complex,
    ref: np.ndarray,
    p: int,
) -> tuple[complex, int]:
    """Crossing point and sign on edge a->b for sorted-slot pair (p, p+1)."""
    lo, hi = 0.0, 1.0
    for _ in range(_BISECT_ITERATIONS):
        mid = 0.5 * (lo + hi)
        fiber = _fibers_batch(f, np.array([a + (b - a) * mid]))[0]
        d = np.abs(ref[:, None] - fiber[None, :])
        sel = d.argmin(axis=1)
        tracked = fiber[sel]
        g = (rot * (tracked[p] - tracked[p + 1])).real
        if g < 0:
            lo = mid
        else:
            hi = mid
    t_star = 0.5 * (lo + hi)
    z_star = a + (b - a) * t_star
    fiber = _fibers_batch(f, np.array([z_star]))[0]
    sel = np.abs(ref[:, None] - fiber[None, :]).argmin(axis=1)
    tracked = fiber[sel]
    sign = 1 if ((rot * tracked[p + 1]).imag - (rot * tracked[p]).imag) > 0 else -1
    return z_star, sign


def _edge_events_scalar(
    f: BivariatePolynomial,
    rot: complex,
    a: complex,
    b: complex,
    fa: np.ndarray,
    fb: np.ndarray,
    scale: float,
    depth: int = 0,
) -> list[tuple[complex, int, int]]:
    tie_floor = 1e-11 * scale
    if (
        _row_adjacent_re_gap(fa[None, :], rot)[0] < tie_floor
        or _row_adjacent_re_gap(fb[None, :], rot)[0] < tie_floor
    ):
        raise _Unresolved
    sel, move, bij = _match_rows(fa[None, :], fb[None, :])
    gap = _row_min_gap(fa[None, :])[0]
    if bool(bij[0]) and float(move[0]) < gap / 3.0:
        identity, swap_pos, other = _classify_perms(sel)
        if identity[0]:
            return []
        if not other[0]:
            p = int(swap_pos[0])
            z_star, sign = _bisect_edge(f, rot, a, b, fa, p)
            return [(z_star, p + 1, sign)]
    if depth >= _EDGE_SPLIT_DEPTH:
        raise _Unresolved
    mid = 0.5 * (a + b)
    fm = _sorted_fibers(f, rot, np.array([mid]))[0]
    left = _edge_events_scalar(f, rot, a, mid, fa, fm, scale, depth + 1)
    right = _edge_events_scalar(f, rot, mid, b, fm, fb, scale, depth + 1)
    return left + right


def _edge_events_batch(
    f: BivariatePolynomial,
    rot: complex,
    a_pts: np.ndarray,
    b_pts: np.ndarray,
    fa: np.ndarray,
    fb: np.ndarray,
    scale: float,
) -> tuple[dict[int, list[tuple[complex, int, int]]], set[int]]:
    """Crossing events per edge index; second return is unresolved edges."""
    count = a_pts.shape[0]
    events: dict[int, list[tuple[complex, int, int]]] = {}
    unresolved: set[int] = set()
    if count == 0:
        return events, unresolved
    sel, move, bij = _match_rows(fa, fb)
    gaps = _row_min_gap(fa)
    tie_floor = 1e-11 * scale
    ok = (
        bij
        & (move < gaps / 3.0)
        & (_row_adjacent_re_gap(fa, rot) >= tie_floor)
        & (_row_adjacent_re_gap(fb, rot) >= tie_floor)
    )
    identity, swap_pos, other = _classify_perms(sel)
    fallback = np.nonzero(~ok | other)[0]
    simple = np.nonzero(ok & (swap_pos >= 0))[0]
    for e in simple:
        p = int(swap_pos[e])
        z_star, sign = _bisect_edge(
            f, rot, complex(a_pts[e]), complex(b_pts[e]), fa[e], p
        )
        events[int(e)] = [(z_star, p + 1, sign)]
    for e in fallback:
        try:
            evs = _edge_events_scalar(
                f, rot, complex(a_pts[e]), complex(b_pts[e]), fa[e], fb[e], scale
            )
        except _Unresolved:
            unresolved.add(int(e))
            continue
        if evs:
            events[int(e)] = evs
    return events, unresolved


def _segment_normal(
    start: complex,
    end: complex,
    demands: list[tuple[complex, int]],
) -> complex | None:
    """Unit normal n with dot(n, sign * axis) > 0 for every edge demand."""
    chord = end - start
    if abs(chord) == 0:
        return None
    tangent = chord / abs(chord)
    perp = 1j * tangent
    votes = []
    for axis, sign in demands:
        dot = (perp.conjugate() * (sign * axis)).real
        if abs(dot) < 0.05:
            return None
        votes.append(1.0 if dot > 0 else -1.0)
    if len(set(votes)) != 1:
        return None
    return perp * votes[0]


def _extract(
    f: BivariatePolynomial,
    rot: complex,
    branch_values: tuple[complex, ...],
    xs: np.ndarray,
    ys: np.ndarray,
    depth: int,
    segments: list[LabeledSegment],
    flagged: list[tuple[float, float, float, float]],
) -> None:
    nx, ny = len(xs), len(ys)
    grid = xs[None, :] + 1j * ys[:, None]
    fibers = _sorted_fibers(f, rot, grid.ravel()).reshape(ny, nx, -1)
    scale = max(1.0, float(np.abs(fibers).max()))

    h_a = grid[:, :-1].ravel()
    h_b = grid[:, 1:].ravel()
    h_fa = fibers[:, :-1, :].reshape(-1, fibers.shape[-1])
    h_fb = fibers[:, 1:, :].reshape(-1, fibers.shape[-1])
    h_events, h_bad = _edge_events_batch(f, rot, h_a, h_b, h_fa, h_fb, scale)

    v_a = grid[:-1, :].ravel()
    v_b = grid[1:, :].ravel()
    v_fa = fibers[:-1, :, :].reshape(-1, fibers.shape[-1])
    v_fb = fibers[1:, :, :].reshape(-1, fibers.shape[-1])
    v_events, v_bad = _edge_events_batch(f, rot, v_a, v_b, v_fa, v_fb, scale)

    def h_idx(j: int, i: int) -> int:
        return j * (nx - 1) + i

    def v_idx(j: int, i: int) -> int:
        return j * nx + i

    for j in range(ny - 1):
        for i in range(nx - 1):
            rect = (float(xs[i]), float(ys[j]), float(xs[i + 1]), float(ys[j + 1]))
            if any(
                rect[0] <= z.real <= rect[2] and rect[1] <= z.imag <= rect[3]
                for z in branch_values
            ):
                continue
            edge_ids = (
                (h_idx(j, i), h_events, h_bad, 1.0 + 0.0j),
                (h_idx(j + 1, i), h_events, h_bad, 1.0 + 0.0j),
                (v_idx(j, i), v_events, v_bad, 1j),
                (v_idx(j, i + 1), v_events, v_bad, 1j),
            )
            bad = any(idx in badset for idx, _, badset, _ in edge_ids)
            found: dict[int, list[tuple[complex, complex, int]]] = {}
            if not bad:
                for idx, table, _, axis in edge_ids:
                    for z_star, label, sign in table.get(idx, ()):
                        found.setdefault(label, []).append((z_star, axis, sign))
            built: list[LabeledSegment] = []
            if not bad:
                for label, items in found.items():
                    if len(items) != 2:
                        bad = True
                        break
                    (z1, ax1, s1), (z2, ax2, s2) = items
                    if abs(z1 - z2) < 1e-9 * max(abs(xs[i + 1] - xs[i]), 1.0):
                        continue
                    normal = _segment_normal(z1, z2, [(ax1, s1), (ax2, s2)])
                    if normal is None:
                        bad = True
                        break
                    built.append(LabeledSegment(z1, z2, label, normal))
            if not bad:
                segments.extend(built)
                continue
            if depth >= _MAX_CELL_DEPTH:
                flagged.append(rect)
                continue
            sub_x = np.linspace(xs[i], xs[i + 1], 3)
            sub_y = np.linspace(ys[j], ys[j + 1], 3)
            _extract(f, rot, branch_values, sub_x, sub_y, depth + 1, segments, flagged)


def _quantize(z: complex, unit: float) -> tuple[int, int]:
    return (int(round(z.real / unit)), int(round(z.imag / unit)))


def _chain_segments(
    segments: tuple[LabeledSegment, ...], join_tol: float
) -> tuple[GraphEdge, ...]:
    """Join segments of equal label and consistent side into polylines."""
    pieces = []
    for seg in segments:
        tangent = (seg.end - seg.start) / abs(seg.end - seg.start)
        cross = (1j * tangent).conjugate() * seg.normal
        side = 1 if cross.real > 0 else -1
        pieces.append((seg, side))

    by_key: dict[tuple[int, int], list[tuple[LabeledSegment, int]]] = {}
    for seg, side in pieces:
        by_key.setdefault((seg.label, side), []).append((seg, side))

    edges: list[GraphEdge] = []
    for (label, side), group in sorted(by_key.items()):
        adjacency: dict[tuple[int, int], list[int]] = {}
        for idx, (seg, _) in enumerate(group):
            for endpoint in (seg.start, seg.end):
                adjacency.setdefault(_quantize(endpoint, join_tol), []).append(idx)
        used = [False] * len(group)

        def walk(start_idx: int, from_node: tuple[int, int]) -> list[complex]:
            chain: list[complex] = []
            idx = start_idx
            node = from_node
            while True:
                used[idx] = True
                seg = group[idx][0]
                a_key = _quantize(seg.start, join_tol)
                nxt = seg.end if a_key == node else seg.start
                chain.append(nxt)
                node = _quantize(nxt, join_tol)
                candidates = [
                    c for c in adjacency.get(node, []) if not used[c]
                ]
                if len(candidates) != 1 or len(adjacency.get(node, [])) > 2:
                    return chain
                idx = candidates[0]

        degree = {node: len(v) for node, v in adjacency.items()}
        for idx, (seg, _) in enumerate(group):
            if used[idx]:
                continue
            a_key = _quantize(seg.start, join_tol)
            b_key = _quantize(seg.end, join_tol)
            if degree.get(a_key, 0) == 1:
                points = [seg.start] + walk(idx, a_key)
            elif degree.get(b_key, 0) == 1:
                points = [seg.end] + walk(idx, b_key)
            else:
                continue
            edges.append(GraphEdge(label=label, side=side, points=tuple(points)))
        for idx, (seg, _) in enumerate(group):
            if used[idx]:
                continue
            points = [seg.start] + walk(idx, _quantize(seg.start, join_tol))
            edges.append(GraphEdge(label=label, side=side, points=tuple(points)))
    return tuple(edges)


def sample_crossing_graph(
    f: BivariatePolynomial,
    branch: BranchData,
    region: tuple[float, float, float, float],
    resolution: int,
) -> CrossingGraph:
    """Extract the labeled crossing locus over a rectangle.

    ``region`` is (x0, y0, x1, y1) and ``resolution`` the number of cells per
    side.  Branch points outside the region only earn a warning: the sampled
    picture is then partial.
    """
    x0, y0, x1, y1 = (float(v) for v in region)
    if not (x1 > x0 and y1 > y0):
        raise InputError("region must satisfy x1 > x0 and y1 > y0")
    if resolution < 4:
        raise InputError("resolution must be at least 4")
    values = branch.values()
    for z in values:
        if not (x0 <= z.real <= x1 and y0 <= z.imag <= y1):
            warnings.warn(
                f"branch point {z:.6g} lies outside the sampled region",
                stacklevel=2,
            )
            break
    rot = complex(math.cos(branch.rotation_theta), math.sin(branch.rotation_theta))
    dx = (x1 - x0) / resolution
    dy = (y1 - y0) / resolution
    xs = x0 + (np.arange(resolution + 2) - 0.5 + _JITTER_X) * dx
    ys = y0 + (np.arange(resolution + 2) - 0.5 + _JITTER_Y) * dy

    segments: list[LabeledSegment] = []
    flagged: list[tuple[float, float, float, float]] = []
    _extract(f, rot, values, xs, ys, 0, segments, flagged)

    join_tol = 1e-7 * min(dx, dy)
    ordered = tuple(
        sorted(
            segments,
            key=lambda s: (s.label, s.start.real, s.start.imag, s.end.real, s.end.imag),
        )
    )
    chains = _chain_segments(ordered, join_tol)
    vertices = tuple(values) + tuple(
        complex((r[0] + r[2]) / 2.0, (r[1] + r[3]) / 2.0) for r in flagged
    )
    return CrossingGraph(
        segments=ordered,
        edges=chains,
        vertices=vertices,
        region=(x0, y0, x1, y1),
        resolution=resolution,
        flagged=tuple(flagged),
        strands=f.w_degree,
        theta=branch.rotation_theta,
    )


def _rect_boundary(rect: tuple[float, float, float, float]) -> list[Segment]:
    x0, y0, x1, y1 = rect
    c = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    return [Segment(c[i], c[(i + 1) % 4]) for i in range(4)]


def _loop_hits_rect(loop: LoopPath, rect: tuple[float, float, float, float]) -> bool:
    x0, y0, x1, y1 = rect
    for prim in loop.primitives:
        z = prim.start
        if x0 <= z.real <= x1 and y0 <= z.imag <= y1:
            return True
        for side in _rect_boundary(rect):
            if primitive_intersections(prim, side):
                return True
    return False


def crossings_of(graph: CrossingGraph, loop: LoopPath) -> BraidWord:
    """Read a loop's braid word from its crossings of the sampled locus.

    Intersections are ordered by loop parameter; each contributes the label's
    letter with the sign of the dot product between the loop direction and
    the co-orientation normal.  Near-tangent crossings and visits to flagged
    cells are errors, since the picture cannot be trusted there.
    """
    if not loop.closed:
        raise InputError("braid words are read along closed loops")
    x0, y0, x1, y1 = graph.region
    for prim in loop.primitives:
        for z in (prim.start, prim.end):
            if not (x0 <= z.real <= x1 and y0 <= z.imag <= y1):
                raise InputError("loop leaves the sampled region")
    for rect in graph.flagged:
        if _loop_hits_rect(loop, rect):
            raise NumericalFailure(
                "loop enters a flagged cell where the sampled locus is unreliable",
                diagnostics={"cell": list(rect)},
            )

    spans = loop.primitive_spans()
    hits: list[tuple[float, int, int, complex]] = []
    for prim, (t_lo, t_hi) in zip(loop.primitives, spans):
        for seg in graph.segments:
            chord = Segment(seg.start, seg.end)
            for s_prim, _ in primitive_intersections(prim, chord):
                t = t_lo + (t_hi - t_lo) * s_prim
                direction = loop.direction_at(min(max(t, 0.0), 1.0))
                dot = (seg.normal.conjugate() * direction).real
                if abs(dot) < 1e-9:
                    raise NumericalFailure(
                        "loop is tangent to a locus segment; the reading is "
                        "not transversal",
                        diagnostics={"t": t, "label": seg.label},
                    )
                sign = 1 if dot > 0 else -1
                point = loop.point_at(min(max(t, 0.0), 1.0))
                hits.append((t, seg.label, sign, point))

    hits.sort(key=lambda h: (h[0], h[1]))
    deduped: list[tuple[float, int, int, complex]] = []
    for h in hits:
        if deduped:
            prev = deduped[-1]
            if (
                abs(h[0] - prev[0]) < 1e-9
                and h[1] == prev[1]
                and h[2] == prev[2]
                and abs(h[3] - prev[3]) < 1e-6 * (1.0 + abs(prev[3]))
            ):
                continue
        deduped.append(h)
    letters = tuple(BraidLetter(label, sign) for _, label, sign, _ in deduped)
    return BraidWord(graph.strands, letters)


def graph_to_json(graph: CrossingGraph) -> dict:
    return {
        "strands": graph.strands,
        "theta": graph.theta,
        "region": list(graph.region),
        "resolution": graph.resolution,
        "vertices": [[v.real, v.imag] for v in graph.vertices],
        "edges": [
            {
                "label": e.label,
                "side": e.side,
                "points": [[p.real, p.imag] for p in e.points],
            }
            for e in graph.edges
        ],
        "flagged": [list(r) for r in graph.flagged],
    }


def graph_from_json(payload: dict) -> CrossingGraph:
    try:
        strands = int(payload["strands"])
        theta = float(payload["theta"])
        region = tuple(float(v) for v in payload["region"])
        resolution = int(payload["resolution"])
        vertices = tuple(complex(v[0], v[1]) for v in payload["vertices"])
        edge_items = payload["edges"]
        flagged = tuple(tuple(float(v) for v in r) for r in payload["flagged"])
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed crossing graph JSON: {exc}") from exc
    if len(region) != 4:
        raise InputError("region must have four numbers")
    edges = []
    segments = []
    for item in edge_items:
        try:
            label = int(item["label"])
            side = int(item["side"])
            points = tuple(complex(p[0], p[1]) for p in item["points"])
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputError(f"malformed crossing graph edge: {exc}") from exc
        if side not in (-1, 1):
            raise InputError("edge side must be +1 or -1")
        if len(points) < 2:
            raise InputError("edge polylines need at least two points")
        edges.append(GraphEdge(label=label, side=side, points=points))
        for a, b in zip(points, points[1:]):
            tangent = (b - a) / abs(b - a)
            segments.append(
                LabeledSegment(a, b, label, side * (1j * tangent))
            )
    return CrossingGraph(
        segments=tuple(segments),
        edges=tuple(edges),
        vertices=vertices,
        region=region,  # type: ignore[arg-type]
        resolution=resolution,
        flagged=flagged,
        strands=strands,
        theta=theta,
    )
