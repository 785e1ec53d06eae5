"""Root continuation along loops and the braid words it reads off.

Fix a polynomial f(z, w) of w-degree n whose leading w-coefficient is a
nonzero constant, and a loop in the z-plane avoiding the branch locus.  The n
fiber roots move continuously along the loop; sorting them by the real part of
``e^(i*theta) * w`` gives n strand positions, and every swap of two
position-adjacent roots is one braid letter.  The letter index is the lower of
the two positions involved.  The sign convention is: at a swap, strand 1 is
the root whose rotated real part is increasing past the other (the overtaker),
and the letter sign is the sign of ``Im(e^(i*theta) * (w_2 - w_1))``.  With
theta = 0 this reads the counterclockwise unit circle of ``w^2 - z`` as the
single positive letter s1, which pins the convention.

Continuation is solve-and-match: fibers are solved afresh (batched companion
eigenvalues) and matched to the previous step by nearest distance, a step
being accepted only when the largest root displacement stays below a third of
the smallest pairwise root distance.  That bound makes nearest matching
provably bijective.  Order swaps are localized by bisection.

The module also builds lollipop loops (per-target stick, counterclockwise
circle, stick back) whose crossing events split into conjugator and band
letters, producing a quasipositive factorization of the loop's braid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .branch import BranchData
from .errors import InputError, NumericalFailure
from .paths import (
    Arc,
    LoopPath,
    Primitive,
    Segment,
    bbox_diameter,
    bounding_box,
    min_distance,
    winding_number,
)
from .poly import BivariatePolynomial
from .words import (
    Band,
    BraidLetter,
    BraidWord,
    QuasipositiveFactorization,
    expand_factorization,
    free_reduce,
    invert,
)

__all__ = [
    "CrossingEvent",
    "Track",
    "track_roots",
    "braid_along",
    "events_to_jsonl",
    "LollipopSpec",
    "TargetMarks",
    "LollipopLoop",
    "lollipop_loop",
    "qp_factorization",
    "enclosed_count",
]

STEP_CAP_FRACTION = 1.0 / 256.0
BISECTION_T_TOL = 1e-10
STEP_UNDERFLOW = 1e-12
CLEARANCE_FLOOR_FACTOR = 1e-3
_CHUNK = 64


@dataclass(frozen=True)
class CrossingEvent:
    """One strand swap: parameter t, the lower position index (so the letter
    is s_position), the sign, and the two root values (overtaker first)."""

    t: float
    position: int
    sign: int
    roots: tuple[complex, complex]


@dataclass(frozen=True)
class Track:
    """Continuation result: ordered events plus fiber bookkeeping."""

    events: tuple[CrossingEvent, ...]
    start_roots: tuple[complex, ...]
    end_roots: tuple[complex, ...]
    permutation: tuple[int, ...] | None
    theta: float
    accepted_steps: int


def _fibers_batch(f: BivariatePolynomial, zs: np.ndarray) -> np.ndarray:
    """Roots of every fiber f(z, .) for an array of z, shape (len(zs), n)."""
    zs = np.asarray(zs, dtype=complex)
    n = f.w_degree
    count = zs.shape[0]
    coeffs = np.empty((count, n + 1), dtype=complex)
    for k, c in enumerate(f.w_coefficients):
        coeffs[:, k] = c(zs) if c.degree >= 0 else 0.0
    monic = coeffs[:, :-1] / coeffs[:, -1:]
    comp = np.zeros((count, n, n), dtype=complex)
    if n > 1:
        idx = np.arange(n - 1)
        comp[:, idx + 1, idx] = 1.0
    comp[:, :, -1] = -monic
    try:
        return np.linalg.eigvals(comp)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"fiber eigenvalue solve failed: {exc}") from exc


def _min_pairwise(vals: np.ndarray) -> float:
    d = np.abs(vals[:, None] - vals[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _match(old: np.ndarray, new: np.ndarray) -> tuple[np.ndarray, float, bool]:
    d = np.abs(old[:, None] - new[None, :])
    sel = d.argmin(axis=1)
    moves = d[np.arange(len(old)), sel]
    bijective = len(np.unique(sel)) == len(old)
    return sel, float(moves.max()), bijective


def _order_key(vals: np.ndarray, rot: complex) -> tuple[int, ...]:
    rv = rot * vals
    return tuple(int(i) for i in np.lexsort((rv.imag, rv.real)))


def _adjacent_swaps(
    old: tuple[int, ...], new: tuple[int, ...]
) -> list[int] | None:
    """Positions p where old and new differ by disjoint swaps of (p, p+1)."""
    pairs: list[int] = []
    i, n = 0, len(old)
    while i < n:
        if old[i] == new[i]:
            i += 1
        elif i + 1 < n and old[i] == new[i + 1] and old[i + 1] == new[i]:
            pairs.append(i)
            i += 2
        else:
            return None
    return pairs


def _clearance_check(branch: BranchData, loop: LoopPath) -> None:
    pts = branch.values()
    if not pts:
        return
    box = bounding_box(list(pts) + list(loop.primitives))
    floor = CLEARANCE_FLOOR_FACTOR * bbox_diameter(box)
    for z in pts:
        d = min_distance(loop, z)
        if d < floor:
            raise InputError(
                f"loop passes within {d:.3e} of branch point "
                f"{z:.6g}; the clearance floor is {floor:.3e}"
            )


def _bisect_crossing(
    f: BivariatePolynomial,
    loop: LoopPath,
    rot: complex,
    roots_ref: np.ndarray,
    t_lo: float,
    t_hi: float,
    slot_a: int,
    slot_b: int,
    position: int,
) -> CrossingEvent:
    # g(t) = rotated Re(w_a) - Re(w_b) changes sign from t_lo to t_hi; the
    # matching back to roots_ref stays valid because displacements inside an
    # accepted step are below a third of the pairwise gap.
    def tracked(t: float) -> np.ndarray:
        fiber = _fibers_batch(f, np.array([loop.point_at(t)]))[0]
        sel, _, _ = _match(roots_ref, fiber)
        return fiber[sel]

    g_lo_sign = (rot * (roots_ref[slot_a] - roots_ref[slot_b])).real < 0
    lo, hi = t_lo, t_hi
    for _ in range(64):
        if hi - lo <= BISECTION_T_TOL:
            break
        mid = 0.5 * (lo + hi)
        vals = tracked(mid)
        g_mid = (rot * (vals[slot_a] - vals[slot_b])).real
        if (g_mid < 0) == g_lo_sign:
            lo = mid
        else:
            hi = mid
    t_star = 0.5 * (lo + hi)
    vals = tracked(t_star)
    w_a, w_b = complex(vals[slot_a]), complex(vals[slot_b])
    sign = 1 if ((rot * w_b).imag - (rot * w_a).imag) > 0 else -1
    return CrossingEvent(t=t_star, position=position, sign=sign, roots=(w_a, w_b))


def track_roots(
    f: BivariatePolynomial,
    branch: BranchData,
    loop: LoopPath,
    step_cap_fraction: float = STEP_CAP_FRACTION,
    stabilize: bool = True,
) -> Track:
    """Continue the fiber roots along the loop and collect crossing events.

    The initial step is ``step_cap_fraction`` of the loop length (the cap);
    steps halve on rejection and recover back up to the cap after a run of
    accepted steps.  Step underflow below 1e-12 of the loop length raises,
    which is the symptom of a loop hugging the branch locus or meeting the
    crossing locus non-transversally.

    With ``stabilize`` on (the default) the pass is repeated at half the cap
    and must reproduce the letter sequence exactly; otherwise the cap keeps
    halving, so a pair of crossings hiding inside a single step cannot go
    unnoticed.  The first pass that survives its own refinement is returned.
    """
    track = _track_once(f, branch, loop, step_cap_fraction)
    if not stabilize:
        return track
    cap = step_cap_fraction
    for _ in range(6):
        finer = _track_once(f, branch, loop, cap / 2.0)
        if _letters_of(track) == _letters_of(finer):
            return track
        track = finer
        cap /= 2.0
    raise NumericalFailure(
        "crossing sequence did not stabilize under step refinement",
        diagnostics={"final_cap": cap},
    )


def _letters_of(track: Track) -> tuple[tuple[int, int], ...]:
    return tuple((e.position, e.sign) for e in track.events)


def _track_once(
    f: BivariatePolynomial,
    branch: BranchData,
    loop: LoopPath,
    step_cap_fraction: float,
) -> Track:
    _clearance_check(branch, loop)
    rot = complex(math.cos(branch.rotation_theta), math.sin(branch.rotation_theta))
    n = f.w_degree

    roots0 = _fibers_batch(f, np.array([loop.point_at(0.0)]))[0]
    if _min_pairwise(roots0) <= 0.0:
        raise InputError("the fiber at the loop start has coincident roots")
    order0 = _order_key(roots0, rot)
    ordered0 = (rot * roots0[np.array(order0)]).real
    scale0 = max(1.0, float(np.abs(roots0).max()))
    if n > 1 and float(np.diff(ordered0).min()) < 1e-9 * scale0:
        raise InputError(
            "two roots share a rotated real part at the loop basepoint; "
            "move the basepoint or pick a different rotation"
        )

    events: list[CrossingEvent] = []
    t_cur = 0.0
    roots_cur = roots0
    order_cur = order0
    h = step_cap_fraction
    streak = 0
    accepted = 0

    while t_cur < 1.0 - 1e-15:
        steps_left = int(math.ceil((1.0 - t_cur) / h - 1e-12))
        count = max(1, min(_CHUNK, steps_left))
        ts = t_cur + h * np.arange(1, count + 1)
        if count == steps_left:
            ts[-1] = 1.0
        fibers = _fibers_batch(f, loop.sample_points(ts))

        rejected = False
        for i in range(count):
            sel, max_move, bijective = _match(roots_cur, fibers[i])
            gap = _min_pairwise(roots_cur)
            if not bijective or max_move >= gap / 3.0:
                rejected = True
            else:
                new_roots = fibers[i][sel]
                order_new = _order_key(new_roots, rot)
                if order_new != order_cur:
                    swaps = _adjacent_swaps(order_cur, order_new)
                    if swaps is None:
                        rejected = True
                    else:
                        found = [
                            _bisect_crossing(
                                f,
                                loop,
                                rot,
                                roots_cur,
                                t_cur,
                                float(ts[i]),
                                order_cur[p],
                                order_cur[p + 1],
                                p + 1,
                            )
                            for p in swaps
                        ]
                        found.sort(key=lambda e: (e.t, e.position))
                        events.extend(found)
            if rejected:
                h *= 0.5
                streak = 0
                if h < STEP_UNDERFLOW:
                    raise NumericalFailure(
                        "continuation step underflow: the path runs too close "
                        "to the branch locus or meets the crossing locus "
                        "non-transversally",
                        diagnostics={"t": t_cur},
                    )
                break
            t_cur = float(ts[i])
            roots_cur = new_roots
            order_cur = order_new
            accepted += 1
            streak += 1
        if not rejected and streak >= 8 and h < step_cap_fraction:
            h = min(step_cap_fraction, 2.0 * h)
            streak = 0

    permutation: tuple[int, ...] | None = None
    if loop.closed:
        sel, max_move, bijective = _match(roots_cur, roots0)
        if not bijective or max_move >= _min_pairwise(roots0) / 3.0:
            raise NumericalFailure(
                "could not match the final fiber back to the starting fiber",
                diagnostics={"max_move": max_move},
            )
        # Occupant convention: entry q is the starting position of the strand
        # that finishes at position q.
        pos0 = {slot: rank + 1 for rank, slot in enumerate(order0)}
        images = [0] * n
        for slot in range(n):
            images[pos0[int(sel[slot])] - 1] = pos0[slot]
        permutation = tuple(images)

    return Track(
        events=tuple(events),
        start_roots=tuple(complex(v) for v in roots0),
        end_roots=tuple(complex(v) for v in roots_cur),
        permutation=permutation,
        theta=branch.rotation_theta,
        accepted_steps=accepted,
    )


def braid_along(
    f: BivariatePolynomial,
    branch: BranchData,
    loop: LoopPath,
    step_cap_fraction: float = STEP_CAP_FRACTION,
) -> BraidWord:
    """The braid word read along a closed loop."""
    if not loop.closed:
        raise InputError("braid words are read along closed loops")
    track = track_roots(f, branch, loop, step_cap_fraction=step_cap_fraction)
    return word_of_events(f.w_degree, track.events)


def word_of_events(strands: int, events: tuple[CrossingEvent, ...]) -> BraidWord:
    return BraidWord(
        strands, tuple(BraidLetter(e.position, e.sign) for e in events)
    )


def events_to_jsonl(events: tuple[CrossingEvent, ...]) -> str:
    lines = []
    for e in events:
        lines.append(
            json.dumps(
                {
                    "t": e.t,
                    "k": e.position,
                    "sign": e.sign,
                    "roots": [
                        [e.roots[0].real, e.roots[0].imag],
                        [e.roots[1].real, e.roots[1].imag],
                    ],
                }
            )
        )
    return "\n".join(lines)


class RadiusInfeasible(InputError):
    """Circle radius too large for the configuration; carries the largest
    radius that would fit so retry ladders can jump straight to it."""

    def __init__(self, message: str, max_feasible: float):
        super().__init__(message)
        self.max_feasible = max_feasible


@dataclass(frozen=True)
class LollipopSpec:
    """Normal-form loop recipe: a basepoint, an ordered selection of branch
    point indices to visit, and the radius of the circles around them."""

    basepoint: complex
    targets: tuple[int, ...]
    circle_radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.circle_radius <= 0:
            raise InputError("circle radius must be positive")
        if len(set(self.targets)) != len(self.targets):
            raise InputError("lollipop targets must be distinct")
        if not self.targets:
            raise InputError("lollipop needs at least one target")


@dataclass(frozen=True)
class TargetMarks:
    """Normalized parameter windows of one lollipop: stick out, circle, stick back."""

    target: int
    arc_out: tuple[float, float]
    circle: tuple[float, float]
    arc_back: tuple[float, float]


@dataclass(frozen=True)
class LollipopLoop:
    path: LoopPath
    marks: tuple[TargetMarks, ...]
    spec: LollipopSpec


_DETOUR_FACTOR = 1.5


def _detour_around(
    start: complex, end: complex, obstacles: list[complex], radius: float
) -> list[Primitive]:
    """Straight run from start to end, deflected to the left around obstacles."""
    direction = (end - start) / abs(end - start)
    hits = []
    for z in obstacles:
        t = ((z - start) / direction).real
        off = abs(start + t * direction - z)
        if 0.0 < t < abs(end - start) and off < radius:
            hits.append((t, z, off))
    hits.sort(key=lambda item: item[0])
    for (t1, z1, _), (t2, z2, _) in zip(hits, hits[1:]):
        if abs(z1 - z2) < 2.2 * radius:
            raise InputError(
                "two branch points are too close together for a detour of "
                f"radius {radius:.3g}; shrink the circle radius"
            )
    prims: list[Primitive] = []
    cursor = start
    for t, z, off in hits:
        half = math.sqrt(max(radius * radius - off * off, 0.0))
        entry = start + (t - half) * direction
        exit_ = start + (t + half) * direction
        if abs(entry - z) < radius * 0.999 or abs(cursor - entry) == 0:
            raise InputError("detour geometry degenerate; shrink the circle radius")
        # Fix both endpoints onto the detour circle exactly.
        entry = z + radius * (entry - z) / abs(entry - z)
        exit_ = z + radius * (exit_ - z) / abs(exit_ - z)
        phi1 = math.atan2((entry - z).imag, (entry - z).real)
        phi2 = math.atan2((exit_ - z).imag, (exit_ - z).real)
        span_ccw = (phi2 - phi1) % (2.0 * math.pi)
        mid_ccw = z + radius * _cis_local(phi1 + span_ccw / 2.0)
        chord_mid = (entry + exit_) / 2.0
        left = ((mid_ccw - chord_mid) / direction).imag > 0
        if left:
            arc = Arc(z, radius, phi1, phi1 + span_ccw)
        else:
            arc = Arc(z, radius, phi1, phi1 - (2.0 * math.pi - span_ccw))
        if abs(cursor - entry) > 0:
            prims.append(Segment(cursor, entry))
        prims.append(arc)
        cursor = exit_
    if abs(cursor - end) > 0:
        prims.append(Segment(cursor, end))
    if not prims:
        prims.append(Segment(start, end))
    return prims


def _cis_local(angle: float) -> complex:
    return complex(math.cos(angle), math.sin(angle))


def lollipop_loop(branch: BranchData, spec: LollipopSpec) -> LollipopLoop:
    """Build the stick-circle-stick loop visiting the chosen branch points.

    Sticks run straight from the basepoint toward each target, deflecting to
    the left around any other branch point that comes too close.  Circles are
    one full counterclockwise turn.  Raises with the maximum feasible radius
    when the requested circles cannot be kept disjoint from everything else.
    """
    points = branch.values()
    for idx in spec.targets:
        if not (0 <= idx < len(points)):
            raise InputError(
                f"target index {idx} out of range for {len(points)} branch points"
            )
    targets = [points[idx] for idx in spec.targets]
    r = spec.circle_radius

    limits = [math.inf]
    for zi in targets:
        limits.append(abs(spec.basepoint - zi) / 1.5)
        for zo in points:
            if zo != zi:
                limits.append(abs(zi - zo) / 2.2)
    max_feasible = min(limits)
    if r > max_feasible:
        raise RadiusInfeasible(
            f"circle radius {r:.6g} is infeasible for this configuration; "
            f"the maximum feasible radius is about {max_feasible:.6g}",
            max_feasible,
        )

    detour_radius = _DETOUR_FACTOR * r
    prims: list[Primitive] = []
    boundaries: list[tuple[int, int, int]] = []
    for idx, z_t in zip(spec.targets, targets):
        unit = (z_t - spec.basepoint) / abs(z_t - spec.basepoint)
        entry = z_t - r * unit
        obstacles = [z for z in points if z != z_t]
        out = _detour_around(spec.basepoint, entry, obstacles, detour_radius)
        phi = math.atan2((entry - z_t).imag, (entry - z_t).real)
        circle = Arc(z_t, r, phi, phi + 2.0 * math.pi)
        back = [p.reversed() for p in reversed(out)]
        start_i = len(prims)
        prims.extend(out)
        circle_i = len(prims)
        prims.append(circle)
        back_i = len(prims)
        prims.extend(back)
        boundaries.append((start_i, circle_i, back_i))

    path = LoopPath(tuple(prims), closed=True)
    spans = path.primitive_spans()
    marks = []
    for (start_i, circle_i, back_i), idx in zip(boundaries, spec.targets):
        end_i = back_i + (circle_i - start_i)
        marks.append(
            TargetMarks(
                target=idx,
                arc_out=(spans[start_i][0], spans[circle_i][0]),
                circle=(spans[circle_i][0], spans[circle_i][1]),
                arc_back=(spans[back_i][0], spans[end_i - 1][1]),
            )
        )
    return LollipopLoop(path=path, marks=tuple(marks), spec=spec)


def qp_factorization(
    f: BivariatePolynomial,
    branch: BranchData,
    spec: LollipopSpec,
    max_radius_retries: int = 6,
    step_cap_fraction: float = STEP_CAP_FRACTION,
) -> QuasipositiveFactorization:
    """Read a quasipositive factorization off a lollipop loop.

    Each circle must contribute exactly one crossing event (the radius is
    halved and the loop rebuilt when it does not), that event must be
    positive, and each stick's return letters must be the reverse-inverse of
    its outgoing letters up to free reduction.  The expanded factorization is
    verified to equal the loop's full braid word after free reduction.
    """
    n = f.w_degree
    current = spec
    lol: LollipopLoop | None = None
    track: Track | None = None
    per_target: list[tuple[list[CrossingEvent], list[CrossingEvent], list[CrossingEvent]]] = []
    for _ in range(max_radius_retries + 1):
        try:
            lol = lollipop_loop(branch, current)
        except RadiusInfeasible as exc:
            current = replace(
                current,
                circle_radius=min(current.circle_radius / 2.0, 0.9 * exc.max_feasible),
            )
            continue
        track = track_roots(f, branch, lol.path, step_cap_fraction=step_cap_fraction)
        per_target = []
        ok = True
        for marks in lol.marks:
            outs = [e for e in track.events if marks.arc_out[0] <= e.t < marks.arc_out[1]]
            circles = [e for e in track.events if marks.circle[0] <= e.t < marks.circle[1]]
            backs = [e for e in track.events if marks.arc_back[0] <= e.t < marks.arc_back[1]]
            per_target.append((outs, circles, backs))
            if len(circles) != 1:
                ok = False
        if ok:
            break
        current = replace(current, circle_radius=current.circle_radius / 2.0)
    else:
        raise NumericalFailure(
            "a lollipop circle never isolated a single crossing event",
            diagnostics={"final_radius": current.circle_radius},
        )

    assert track is not None and lol is not None
    bands = []
    for (outs, circles, backs), marks in zip(per_target, lol.marks):
        circle_event = circles[0]
        if circle_event.sign != 1:
            raise NumericalFailure(
                "counterclockwise circle read a negative letter; the sign "
                "convention has been violated",
                diagnostics={
                    "target": marks.target,
                    "t": circle_event.t,
                    "position": circle_event.position,
                },
            )
        out_word = word_of_events(n, tuple(outs))
        back_word = word_of_events(n, tuple(backs))
        if free_reduce(back_word).letters != free_reduce(invert(out_word)).letters:
            raise NumericalFailure(
                "a stick's return letters are not the reverse-inverse of its "
                "outgoing letters",
                diagnostics={"target": marks.target},
            )
        bands.append(Band(free_reduce(out_word).letters, circle_event.position))

    qpf = QuasipositiveFactorization(n, tuple(bands))
    whole = word_of_events(n, track.events)
    if free_reduce(expand_factorization(qpf)).letters != free_reduce(whole).letters:
        raise NumericalFailure(
            "expanded factorization does not freely match the loop's braid word"
        )
    return qpf


def enclosed_count(loop: LoopPath, branch: BranchData) -> int:
    """Sum of loop winding numbers over branch points, with multiplicity."""
    if not loop.closed:
        raise InputError("enclosed counts need a closed loop")
    total = 0
    for point in branch.points:
        total += winding_number(loop, point.z) * point.multiplicity
    return total
