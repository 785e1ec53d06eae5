"""Piecewise paths in the plane built from line segments and circular arcs.

Loops are parametrized by normalized arc length, t in [0, 1], so a uniform
step in t is a uniform step along the curve.  Arcs may span more than one full
turn (used for repeated windings); orientation is counterclockwise when the
end angle exceeds the start angle.  The module also supplies the exact
geometric predicates the rest of the package leans on: distance from a point
to the path, winding numbers, pairwise intersections, and an embeddedness
test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import InputError, NumericalFailure

__all__ = [
    "Segment",
    "Arc",
    "Primitive",
    "LoopPath",
    "winding_number",
    "min_distance",
    "bounding_box",
    "reverse_loop",
    "concat_loops",
    "is_embedded",
    "loop_to_json",
    "loop_from_json",
]


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if self.a == self.b:
            raise InputError("segment endpoints must differ")

    @property
    def length(self) -> float:
        return abs(self.b - self.a)

    @property
    def start(self) -> complex:
        return self.a

    @property
    def end(self) -> complex:
        return self.b

    def point(self, s: float) -> complex:
        return self.a + s * (self.b - self.a)

    def direction(self, s: float) -> complex:
        d = self.b - self.a
        return d / abs(d)

    def reversed(self) -> Segment:
        return Segment(self.b, self.a)


@dataclass(frozen=True)
class Arc:
    """Circular arc; counterclockwise when angle_to > angle_from.

    The angular span may exceed a full turn, in which case the arc retraces
    its circle.
    """

    center: complex
    radius: float
    angle_from: float
    angle_to: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", complex(self.center))
        if self.radius <= 0:
            raise InputError("arc radius must be positive")
        if self.angle_from == self.angle_to:
            raise InputError("arc must have a nonzero angular span")

    @property
    def span(self) -> float:
        return self.angle_to - self.angle_from

    @property
    def length(self) -> float:
        return self.radius * abs(self.span)

    @property
    def start(self) -> complex:
        return self.center + self.radius * _cis(self.angle_from)

    @property
    def end(self) -> complex:
        return self.center + self.radius * _cis(self.angle_to)

    def point(self, s: float) -> complex:
        return self.center + self.radius * _cis(self.angle_from + s * self.span)

    def direction(self, s: float) -> complex:
        tangent = 1j * _cis(self.angle_from + s * self.span)
        return tangent if self.span > 0 else -tangent

    def reversed(self) -> Arc:
        return Arc(self.center, self.radius, self.angle_to, self.angle_from)


Primitive = Union[Segment, Arc]


def _cis(angle: float) -> complex:
    return complex(math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class LoopPath:
    """A chain of primitives; consecutive endpoints must coincide.

    ``closed`` additionally requires the last endpoint to match the first
    start.  Loops are not required to be embedded.
    """

    primitives: tuple[Primitive, ...]
    closed: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "primitives", tuple(self.primitives))
        if not self.primitives:
            raise InputError("a path needs at least one primitive")
        scale = 1.0 + max(
            max(abs(p.start), abs(p.end)) for p in self.primitives
        )
        tol = 1e-9 * scale
        for prev, nxt in zip(self.primitives, self.primitives[1:]):
            if abs(prev.end - nxt.start) > tol:
                raise InputError(
                    f"path primitives are not contiguous: {prev.end} vs {nxt.start}"
                )
        if self.closed and abs(self.primitives[-1].end - self.primitives[0].start) > tol:
            raise InputError("closed path must return to its starting point")
        lengths = np.array([p.length for p in self.primitives])
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        object.__setattr__(self, "_cumulative", cum)

    @property
    def length(self) -> float:
        return float(self._cumulative[-1])

    @property
    def basepoint(self) -> complex:
        return self.primitives[0].start

    def primitive_spans(self) -> tuple[tuple[float, float], ...]:
        """Normalized (t_start, t_end) of every primitive."""
        total = self.length
        cum = self._cumulative
        return tuple(
            (float(cum[i] / total), float(cum[i + 1] / total))
            for i in range(len(self.primitives))
        )

    def _locate(self, t: float) -> tuple[int, float]:
        total = self.length
        target = min(max(t, 0.0), 1.0) * total
        cum = self._cumulative
        idx = int(np.searchsorted(cum, target, side="right") - 1)
        idx = min(idx, len(self.primitives) - 1)
        seg_len = cum[idx + 1] - cum[idx]
        s = 0.0 if seg_len == 0 else (target - cum[idx]) / seg_len
        return idx, float(s)

    def point_at(self, t: float) -> complex:
        idx, s = self._locate(t)
        return self.primitives[idx].point(s)

    def direction_at(self, t: float) -> complex:
        idx, s = self._locate(t)
        return self.primitives[idx].direction(s)

    def sample_points(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`point_at` over an array of parameters."""
        ts = np.asarray(ts, dtype=float)
        total = self.length
        targets = np.clip(ts, 0.0, 1.0) * total
        cum = self._cumulative
        idxs = np.clip(
            np.searchsorted(cum, targets, side="right") - 1,
            0,
            len(self.primitives) - 1,
        )
        out = np.empty(ts.shape, dtype=complex)
        for i, prim in enumerate(self.primitives):
            mask = idxs == i
            if not np.any(mask):
                continue
            seg_len = cum[i + 1] - cum[i]
            s = (targets[mask] - cum[i]) / (seg_len if seg_len else 1.0)
            if isinstance(prim, Segment):
                out[mask] = prim.a + s * (prim.b - prim.a)
            else:
                ang = prim.angle_from + s * prim.span
                out[mask] = prim.center + prim.radius * (
                    np.cos(ang) + 1j * np.sin(ang)
                )
        return out


def _segment_distance(seg: Segment, p: complex) -> float:
    d = seg.b - seg.a
    t = ((p - seg.a).real * d.real + (p - seg.a).imag * d.imag) / (abs(d) ** 2)
    t = min(max(t, 0.0), 1.0)
    return abs(seg.a + t * d - p)


def _angle_in_span(arc: Arc, psi: float, tol: float = 1e-12) -> float | None:
    """Local parameter s in [0,1] if the angle lies on the arc, else None."""
    span = arc.span
    if abs(span) >= 2.0 * math.pi - tol:
        delta = (psi - arc.angle_from) % (2.0 * math.pi)
        return delta / abs(span) if span > 0 else 1.0 - delta / abs(span)
    if span > 0:
        delta = (psi - arc.angle_from) % (2.0 * math.pi)
        if delta <= span + tol:
            return min(delta / span, 1.0)
        return None
    delta = (arc.angle_from - psi) % (2.0 * math.pi)
    if delta <= -span + tol:
        return min(delta / (-span), 1.0)
    return None


def _arc_distance(arc: Arc, p: complex) -> float:
    rel = p - arc.center
    if abs(arc.span) >= 2.0 * math.pi:
        return abs(abs(rel) - arc.radius)
    if rel == 0:
        return arc.radius
    psi = math.atan2(rel.imag, rel.real)
    if _angle_in_span(arc, psi) is not None:
        return abs(abs(rel) - arc.radius)
    return min(abs(p - arc.start), abs(p - arc.end))


def min_distance(loop: LoopPath, p: complex) -> float:
    dist = math.inf
    for prim in loop.primitives:
        if isinstance(prim, Segment):
            dist = min(dist, _segment_distance(prim, p))
        else:
            dist = min(dist, _arc_distance(prim, p))
    return dist


def _winding_of_polyline(points: np.ndarray, p: complex) -> float:
    rel = points - p
    ratios = rel[1:] / rel[:-1]
    return float(np.sum(np.angle(ratios)))


def winding_number(loop: LoopPath, p: complex) -> int:
    """Signed number of turns of a closed loop around p.

    Exact chord summation: segments contribute a single principal argument,
    arcs are subdivided finely enough (relative to the distance from p) that
    no chord subtends a half turn.
    """
    if not loop.closed:
        raise InputError("winding numbers need a closed loop")
    total = 0.0
    for prim in loop.primitives:
        if isinstance(prim, Segment):
            total += math.atan2(
                ((prim.b - p) / (prim.a - p)).imag, ((prim.b - p) / (prim.a - p)).real
            )
        else:
            dist = _arc_distance(prim, p)
            if dist == 0:
                raise InputError("winding number undefined for a point on the loop")
            pieces = max(8, int(math.ceil(prim.length / dist)))
            pieces = min(pieces, 2_000_000)
            s = np.linspace(0.0, 1.0, pieces + 1)
            ang = prim.angle_from + s * prim.span
            pts = prim.center + prim.radius * (np.cos(ang) + 1j * np.sin(ang))
            total += _winding_of_polyline(pts, p)
    turns = total / (2.0 * math.pi)
    nearest = round(turns)
    if abs(turns - nearest) > 1e-6:
        raise NumericalFailure(
            "winding number did not converge to an integer",
            diagnostics={"value": turns, "point": repr(p)},
        )
    return int(nearest)


def bounding_box(items: Iterable[complex | Primitive]) -> tuple[float, float, float, float]:
    """(x0, y0, x1, y1) over points and primitives; arcs use exact extents."""
    xs: list[float] = []
    ys: list[float] = []
    for item in items:
        if isinstance(item, complex):
            xs.append(item.real)
            ys.append(item.imag)
        elif isinstance(item, Segment):
            xs.extend((item.a.real, item.b.real))
            ys.extend((item.a.imag, item.b.imag))
        else:
            xs.extend((item.start.real, item.end.real))
            ys.extend((item.start.imag, item.end.imag))
            for quarter, (dx, dy) in enumerate(
                ((1, 0), (0, 1), (-1, 0), (0, -1))
            ):
                if _angle_in_span(item, quarter * math.pi / 2.0) is not None:
                    xs.append(item.center.real + item.radius * dx)
                    ys.append(item.center.imag + item.radius * dy)
    if not xs:
        raise InputError("bounding box of an empty collection")
    return min(xs), min(ys), max(xs), max(ys)


def bbox_diameter(box: tuple[float, float, float, float]) -> float:
    return math.hypot(box[2] - box[0], box[3] - box[1])


def reverse_loop(loop: LoopPath) -> LoopPath:
    return LoopPath(
        tuple(p.reversed() for p in reversed(loop.primitives)), closed=loop.closed
    )


def concat_loops(*loops: LoopPath) -> LoopPath:
    prims: list[Primitive] = []
    for loop in loops:
        prims.extend(loop.primitives)
    return LoopPath(tuple(prims), closed=True)


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def _seg_seg(s1: Segment, s2: Segment, tol: float) -> list[tuple[float, float]]:
    d1, d2 = s1.b - s1.a, s2.b - s2.a
    denom = _cross(d1, d2)
    rel = s2.a - s1.a
    scale = max(abs(d1), abs(d2), 1.0)
    if abs(denom) <= tol * scale * scale:
        # Parallel; report a midpoint hit when collinear with true overlap.
        if abs(_cross(rel, d1)) > tol * scale * scale:
            return []
        u = d1 / abs(d1)
        p1 = 0.0
        p2 = abs(d1)
        q1 = ((s2.a - s1.a) / u).real
        q2 = ((s2.b - s1.a) / u).real
        lo, hi = max(p1, min(q1, q2)), min(p2, max(q1, q2))
        if hi - lo > tol * scale:
            mid = (lo + hi) / 2.0
            t1 = mid / abs(d1)
            t2 = (mid - q1) / (q2 - q1)
            return [(t1, t2)]
        return []
    t1 = _cross(rel, d2) / denom
    t2 = _cross(rel, d1) / denom
    eps = tol
    if -eps <= t1 <= 1.0 + eps and -eps <= t2 <= 1.0 + eps:
        return [(min(max(t1, 0.0), 1.0), min(max(t2, 0.0), 1.0))]
    return []


def _arc_seg(arc: Arc, seg: Segment, tol: float) -> list[tuple[float, float]]:
    d = seg.b - seg.a
    rel = seg.a - arc.center
    aa = abs(d) ** 2
    bb = 2.0 * (rel.real * d.real + rel.imag * d.imag)
    cc = abs(rel) ** 2 - arc.radius**2
    disc = bb * bb - 4.0 * aa * cc
    if disc < -tol * (aa + abs(bb) + abs(cc)) ** 2:
        return []
    disc = max(disc, 0.0)
    out = []
    for root in ((-bb - math.sqrt(disc)) / (2 * aa), (-bb + math.sqrt(disc)) / (2 * aa)):
        if -tol <= root <= 1.0 + tol:
            p = seg.a + root * d
            psi = math.atan2((p - arc.center).imag, (p - arc.center).real)
            s = _angle_in_span(arc, psi)
            if s is not None:
                out.append((min(max(s, 0.0), 1.0), min(max(root, 0.0), 1.0)))
    # A tangent line can produce two nearly equal roots; keep one.
    if len(out) == 2 and abs(out[0][1] - out[1][1]) < 1e-9:
        out = out[:1]
    return out


def _arc_arc(a1: Arc, a2: Arc, tol: float) -> list[tuple[float, float]]:
    d = abs(a2.center - a1.center)
    scale = max(a1.radius, a2.radius, 1.0)
    if d <= tol * scale and abs(a1.radius - a2.radius) <= tol * scale:
        # Same circle: report an overlap midpoint if angular ranges meet.
        samples = np.linspace(0.05, 0.95, 7)
        for s in samples:
            psi = a1.angle_from + s * a1.span
            s2 = _angle_in_span(a2, psi % (2 * math.pi))
            if s2 is not None:
                return [(float(s), float(s2))]
        return []
    if d > a1.radius + a2.radius + tol * scale:
        return []
    if d < abs(a1.radius - a2.radius) - tol * scale:
        return []
    u = (a2.center - a1.center) / d
    along = (a1.radius**2 - a2.radius**2 + d * d) / (2 * d)
    h_sq = a1.radius**2 - along**2
    h = math.sqrt(max(h_sq, 0.0))
    out = []
    candidates = [a1.center + u * complex(along, h)]
    if h > tol * scale:
        candidates.append(a1.center + u * complex(along, -h))
    for p in candidates:
        psi1 = math.atan2((p - a1.center).imag, (p - a1.center).real)
        psi2 = math.atan2((p - a2.center).imag, (p - a2.center).real)
        s1 = _angle_in_span(a1, psi1)
        s2 = _angle_in_span(a2, psi2)
        if s1 is not None and s2 is not None:
            out.append((s1, s2))
    return out


def primitive_intersections(
    p1: Primitive, p2: Primitive, tol: float = 1e-9
) -> list[tuple[float, float]]:
    """Local-parameter pairs where two primitives meet."""
    if isinstance(p1, Segment) and isinstance(p2, Segment):
        return _seg_seg(p1, p2, tol)
    if isinstance(p1, Arc) and isinstance(p2, Segment):
        return _arc_seg(p1, p2, tol)
    if isinstance(p1, Segment) and isinstance(p2, Arc):
        return [(s, a) for a, s in _arc_seg(p2, p1, tol)]
    return _arc_arc(p1, p2, tol)


def is_embedded(loop: LoopPath, tol: float = 1e-9) -> bool:
    """Whether the loop has no self-intersections beyond consecutive joints."""
    prims = loop.primitives
    count = len(prims)
    scale = 1.0 + max(max(abs(p.start), abs(p.end)) for p in prims)
    join_tol = 1e-7 * scale
    for prim in prims:
        if isinstance(prim, Arc) and abs(prim.span) > 2.0 * math.pi + 1e-12:
            return False
    for i in range(count):
        for j in range(i + 1, count):
            for s_i, s_j in primitive_intersections(prims[i], prims[j], tol):
                p = prims[i].point(s_i)
                if j == i + 1 and abs(p - prims[i].end) <= join_tol:
                    continue
                if (
                    loop.closed
                    and i == 0
                    and j == count - 1
                    and abs(p - prims[0].start) <= join_tol
                ):
                    continue
                return False
    return True


def loop_to_json(loop: LoopPath) -> dict:
    segments = []
    for prim in loop.primitives:
        if isinstance(prim, Segment):
            segments.append(
                {
                    "kind": "seg",
                    "a": [prim.a.real, prim.a.imag],
                    "b": [prim.b.real, prim.b.imag],
                }
            )
        else:
            segments.append(
                {
                    "kind": "arc",
                    "center": [prim.center.real, prim.center.imag],
                    "radius": prim.radius,
                    "from": prim.angle_from,
                    "to": prim.angle_to,
                }
            )
    return {"segments": segments, "closed": loop.closed}


def loop_from_json(payload: dict) -> LoopPath:
    try:
        raw = payload["segments"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"loop JSON needs 'segments': {exc}") from exc
    if not isinstance(raw, list):
        raise InputError(f"loop 'segments' must be a list, got {type(raw).__name__}")
    prims: list[Primitive] = []
    for entry in raw:
        if not isinstance(entry, dict):
            raise InputError(f"loop segment entries must be objects, got {entry!r}")
        kind = entry.get("kind")
        try:
            if kind == "seg":
                prims.append(
                    Segment(
                        complex(entry["a"][0], entry["a"][1]),
                        complex(entry["b"][0], entry["b"][1]),
                    )
                )
            elif kind == "arc":
                prims.append(
                    Arc(
                        complex(entry["center"][0], entry["center"][1]),
                        float(entry["radius"]),
                        float(entry["from"]),
                        float(entry["to"]),
                    )
                )
            else:
                raise InputError(f"unknown loop segment kind {kind!r}")
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputError(f"malformed loop segment {entry!r}: {exc}") from exc
    return LoopPath(tuple(prims), closed=bool(payload.get("closed", True)))
