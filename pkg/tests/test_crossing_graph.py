"""Tests for crossing locus extraction over a rectangle.

The square root surface pins the picture down exactly: two fiber roots share
a real part precisely where z is a nonpositive real, so the sampled locus
must hug the negative real axis at any resolution.  The cubic family adds
known ray configurations with known labels.
"""

import dataclasses
import math

import numpy as np
import pytest

from quasibraid import (
    Arc,
    InputError,
    NumericalFailure,
    LoopPath,
    braid_along,
    branch_points,
    crossings_of,
    free_reduce,
    graph_from_json,
    graph_to_json,
    sample_crossing_graph,
    word_to_text,
)
from tests.test_monodromy import circle, prepared

SQRT = prepared("w^2 - z")
CUBIC = prepared("w^3 - 3*w + 2*z")
QUARTIC = prepared("w^3 - 3*w + 2*z^4")


def segment_cloud(graph, per_segment=5):
    pts = []
    for seg in graph.segments:
        for s in np.linspace(0.0, 1.0, per_segment):
            pts.append(seg.start + s * (seg.end - seg.start))
    return np.array(pts, dtype=complex)


class TestSquareRootLocus:
    @pytest.mark.parametrize("resolution", [64, 256])
    def test_locus_is_the_negative_real_axis(self, resolution):
        f, data = SQRT
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), resolution)
        assert graph.segments
        cell = 4.0 / resolution
        for seg in graph.segments:
            for p in (seg.start, seg.end):
                assert abs(p.imag) <= cell
                assert p.real <= cell
            assert seg.label == 1

    def test_locus_reaches_from_the_branch_point_to_the_boundary(self):
        f, data = SQRT
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 64)
        reals = [p.real for seg in graph.segments for p in (seg.start, seg.end)]
        assert min(reals) <= -1.9
        assert max(reals) >= -0.2

    def test_no_flags_and_one_vertex(self):
        f, data = SQRT
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 64)
        assert graph.flagged == ()
        assert len(graph.vertices) == 1
        assert abs(graph.vertices[0]) < 0.1


class TestCubicRays:
    def test_two_real_rays_with_distinct_labels(self):
        f, data = CUBIC
        graph = sample_crossing_graph(f, data, (-2.5, -2.5, 2.5, 2.5), 96)
        cell = 5.0 / 96
        left = [s for s in graph.segments if (s.start.real + s.end.real) / 2 < -1]
        right = [s for s in graph.segments if (s.start.real + s.end.real) / 2 > 1]
        assert left and right
        for seg in graph.segments:
            assert abs(seg.start.imag) <= cell
            assert abs(seg.end.imag) <= cell
        assert {s.label for s in left} == {1}
        assert {s.label for s in right} == {2}

    def test_rays_start_at_the_branch_points(self):
        f, data = CUBIC
        graph = sample_crossing_graph(f, data, (-2.5, -2.5, 2.5, 2.5), 96)
        cell = 5.0 / 96
        reals = [p.real for s in graph.segments for p in (s.start, s.end)]
        assert min(reals) == pytest.approx(-2.5, abs=2 * cell)
        assert max(reals) == pytest.approx(2.5, abs=2 * cell)
        interior = [r for r in reals if abs(r) < 1 - 2 * cell]
        assert interior == []


class TestQuarticRays:
    def test_eight_radial_rays_with_alternating_labels(self):
        f, data = QUARTIC
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 128)
        assert graph.segments
        for seg in graph.segments:
            mid = (seg.start + seg.end) / 2
            assert abs(mid) > 0.9
            angle = math.atan2(mid.imag, mid.real) % (2 * math.pi)
            k = round(angle / (math.pi / 4)) % 8
            diff = abs(angle - k * math.pi / 4)
            assert min(diff, 2 * math.pi - diff) < 0.15
            # Rays through the real and imaginary axes separate the top two
            # strands; the diagonal rays separate the bottom two.
            assert seg.label == (2 if k % 2 == 0 else 1)

    def test_unit_disk_interior_is_locus_free(self):
        f, data = QUARTIC
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 128)
        cell = 4.0 / 128
        for seg in graph.segments:
            assert min(abs(seg.start), abs(seg.end)) > 1 - 3 * cell


class TestRefinement:
    def test_doubling_the_resolution_keeps_the_locus_in_place(self):
        f, data = QUARTIC
        coarse = sample_crossing_graph(f, data, (-2, -2, 2, 2), 64)
        fine = sample_crossing_graph(f, data, (-2, -2, 2, 2), 128)
        cell = 4.0 / 64
        a = segment_cloud(coarse)
        b = segment_cloud(fine)
        gaps = np.abs(a[:, None] - b[None, :]).min(axis=1)
        assert float(gaps.max()) <= cell


class TestReadingLoops:
    def test_matches_continuation_on_the_square_root_surface(self):
        f, data = SQRT
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 96)
        loop = circle()
        assert word_to_text(crossings_of(graph, loop)) == "s1"
        assert word_to_text(crossings_of(graph, circle(turns=-1))) == "s1^-1"

    def test_matches_continuation_on_the_quartic(self):
        f, data = QUARTIC
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 128)
        for loop in (
            circle(radius=1.8, start_angle=1.0),
            circle(center=1 + 1j, radius=0.8),
            circle(center=1.0 + 0j, radius=0.4, turns=-1),
        ):
            from_graph = free_reduce(crossings_of(graph, loop))
            from_tracking = free_reduce(braid_along(f, data, loop))
            assert from_graph == from_tracking

    def test_open_loops_are_rejected(self):
        f, data = SQRT
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 32)
        from quasibraid import Segment

        path = LoopPath((Segment(0.5, 1.5),), closed=False)
        with pytest.raises(InputError):
            crossings_of(graph, path)

    def test_loop_leaving_the_region_is_rejected(self):
        f, data = SQRT
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 32)
        with pytest.raises(InputError):
            crossings_of(graph, circle(radius=3.0))

    def test_loop_through_a_flagged_cell_is_rejected(self):
        f, data = SQRT
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 32)
        poisoned = dataclasses.replace(graph, flagged=((0.9, -0.1, 1.1, 0.1),))
        with pytest.raises(NumericalFailure):
            crossings_of(poisoned, circle())


class TestValidationAndSerialization:
    def test_region_must_be_ordered(self):
        f, data = SQRT
        with pytest.raises(InputError):
            sample_crossing_graph(f, data, (2, -2, -2, 2), 32)

    def test_resolution_floor(self):
        f, data = SQRT
        with pytest.raises(InputError):
            sample_crossing_graph(f, data, (-2, -2, 2, 2), 2)

    def test_branch_point_outside_the_region_warns(self):
        f, data = CUBIC
        with pytest.warns(UserWarning):
            sample_crossing_graph(f, data, (-0.5, -0.5, 0.5, 0.5), 16)

    def test_json_round_trip(self):
        f, data = SQRT
        graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 32)
        assert graph_from_json(graph_to_json(graph)) == graph

    def test_malformed_payload_is_rejected(self):
        with pytest.raises(InputError):
            graph_from_json({"strands": 2})
