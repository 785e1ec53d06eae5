"""Acceptance suite: eight criteria, one printed verdict line each.

Each test prints ``CRITERION n: PASS/FAIL`` on the real terminal (bypassing
capture) so a test-run transcript shows the per-criterion outcome at a
glance.  Tolerances are pinned in the assertions themselves.
"""

import itertools
import json
import math
import random
import time
from contextlib import contextmanager
from dataclasses import replace
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from quasibraid import (
    Arc,
    Band,
    BivariatePolynomial,
    BraidWord,
    InputError,
    LollipopSpec,
    LoopPath,
    NumericalFailure,
    QuasipositiveFactorization,
    Segment,
    UnivariatePolynomial,
    band_euler_characteristic,
    braid_along,
    branch_points,
    check_genericity,
    closure_components,
    concat,
    crossings_of,
    cyclic_reduce,
    enclosed_count,
    expand_factorization,
    exponent_sum,
    free_reduce,
    invert,
    letters_from_pairs,
    lollipop_loop,
    loop_from_json,
    parse_bivariate_text,
    permutation_of,
    perturb_generic,
    qp_factorization,
    realize,
    sample_crossing_graph,
    select_rotation,
    track_roots,
    word_from_text,
)
from quasibraid.cli import main
from quasibraid.monodromy import CLEARANCE_FLOOR_FACTOR, RadiusInfeasible
from quasibraid.paths import bbox_diameter, bounding_box, min_distance

DATA_DIR = Path(__file__).parent / "data"


@contextmanager
def criterion(capfd, number, description):
    try:
        yield
    except BaseException:
        with capfd.disabled():
            print(f"CRITERION {number}: FAIL - {description}", flush=True)
        raise
    with capfd.disabled():
        print(f"CRITERION {number}: PASS - {description}", flush=True)


def circle_loop(center, radius, turns=1, start_angle=math.pi / 2):
    arc = Arc(center, radius, start_angle, start_angle + turns * 2 * math.pi)
    return LoopPath((arc,), closed=True)


def prepared(text):
    f = parse_bivariate_text(text)
    data = branch_points(f)
    assert check_genericity(f, data).ok
    theta = select_rotation(f, data)
    return f, replace(data, generic=True, rotation_theta=theta)


def cyclically_equal(a, b):
    la, lb = a.letters, b.letters
    if len(la) != len(lb):
        return False
    if not la:
        return True
    return any(la[k:] + la[:k] == lb for k in range(len(la)))


# Shared randomized corpus for criteria 3 and 4.  Generated once, seeded, so
# both criteria see exactly the same cases.


def cleared_lollipop(branch, spec):
    """The lollipop recipe, radius-adjusted until the loop builds AND keeps
    1.25x the tracker's clearance floor from every branch point; None when
    no radius in the ladder manages that."""
    current = spec
    for _ in range(8):
        try:
            built = lollipop_loop(branch, current)
        except RadiusInfeasible as exc:
            current = replace(
                current,
                circle_radius=min(
                    current.circle_radius / 2.0, 0.9 * exc.max_feasible
                ),
            )
            continue
        points = branch.values()
        box = bounding_box(list(points) + list(built.path.primitives))
        floor = CLEARANCE_FLOOR_FACTOR * bbox_diameter(box)
        worst = min(min_distance(built.path, z) for z in points)
        return current if worst >= 1.25 * floor else None
    return None


@lru_cache(maxsize=1)
def randomized_cases():
    rng = random.Random(52_2026)
    polys = []
    attempts = 0
    while len(polys) < 10 and attempts < 300:
        attempts += 1
        degree = rng.choice((2, 3, 4))
        coeffs = [
            UnivariatePolynomial(
                tuple(rng.randint(-2, 2) for _ in range(rng.choice((2, 3))))
            )
            for _ in range(degree)
        ]
        coeffs.append(UnivariatePolynomial((1,)))
        try:
            f = BivariatePolynomial(tuple(coeffs))
            g, data = perturb_generic(f, budget=1e-2)
            if not data.points:
                continue
            values = data.values()
            gaps = [
                abs(a - b) for a, b in itertools.combinations(values, 2)
            ] or [1.0]
            # The clearance floor scales with the configuration diameter, so
            # outlier spreads and near-colliding pairs admit no loop that
            # honors it.
            if max(gaps) > 10.0 or min(gaps) < 0.02 * max(gaps):
                continue
            theta = select_rotation(g, data)
            polys.append((g, replace(data, rotation_theta=theta)))
        except (InputError, NumericalFailure):
            continue
    assert len(polys) == 10

    circle_cases = []
    lollipop_cases = []
    for g, data in polys:
        points = data.values()
        scale = 1.0 + max(abs(z) for z in points)
        made_circles = 0
        guard = 0
        while made_circles < 7 and guard < 200:
            guard += 1
            center = complex(
                rng.uniform(-1.2, 1.2) * scale, rng.uniform(-1.2, 1.2) * scale
            )
            radius = rng.uniform(0.25, 1.4) * scale
            if min(abs(abs(center - z) - radius) for z in points) < 0.03 * scale:
                continue
            loop = circle_loop(
                center,
                radius,
                turns=rng.choice((-1, 1)),
                start_angle=rng.uniform(0, 2 * math.pi),
            )
            circle_cases.append((g, data, loop))
            made_circles += 1
        assert made_circles == 7

        separations = [
            abs(a - b) for a, b in itertools.combinations(points, 2)
        ] or [scale]
        radius = 0.3 * min(min(separations), scale)
        made_lollipops = 0
        guard = 0
        while made_lollipops < 4 and guard < 60:
            guard += 1
            basepoint = complex(
                min(z.real for z in points) - rng.uniform(0.8, 1.4) * scale,
                rng.uniform(0.2, 0.9) * scale,
            )
            count = rng.randint(1, min(3, len(points)))
            targets = tuple(rng.sample(range(len(points)), count))
            spec = cleared_lollipop(
                data,
                LollipopSpec(
                    basepoint=basepoint, targets=targets, circle_radius=radius
                ),
            )
            if spec is None:
                continue
            lollipop_cases.append((g, data, spec))
            made_lollipops += 1
        assert made_lollipops >= 2
    assert len(circle_cases) + len(lollipop_cases) >= 100
    assert len(lollipop_cases) >= 30
    return circle_cases, lollipop_cases


class TestCriterion1:
    def test_square_root_calibration_via_cli(self, capfd, tmp_path):
        with criterion(
            capfd, 1, "ccw unit circle on w^2 - z reads s1, cw reads s1^-1"
        ):
            from quasibraid import loop_to_json

            for turns, expected in ((1, "word: s1"), (-1, "word: s1^-1")):
                loop_file = tmp_path / f"loop{turns}.json"
                loop_file.write_text(
                    json.dumps(loop_to_json(circle_loop(0j, 1.0, turns=turns)))
                )
                started = time.perf_counter()
                rc = main(
                    ["braid", "--poly", "w^2 - z", "--loop", str(loop_file)]
                )
                elapsed = time.perf_counter() - started
                out = capfd.readouterr().out
                assert rc == 0
                assert expected in out
                assert elapsed < 1.0


class TestCriterion2:
    def test_frozen_fixture_loop_word(self, capfd):
        with criterion(
            capfd,
            2,
            "frozen quartic fixture reads s1 s2^3 s1 s2^-3 up to cyclic shift",
        ):
            started = time.perf_counter()
            f, data = prepared("w^3 - 3*w + 2*z^4")
            loop = loop_from_json(
                json.loads((DATA_DIR / "figure_loop.json").read_text())
            )
            word = free_reduce(braid_along(f, data, loop))
            target = word_from_text(
                "s1 s2 s2 s2 s1 s2^-1 s2^-1 s2^-1", strands=3
            )
            assert cyclically_equal(word, target)
            assert closure_components(word) == 1
            assert exponent_sum(word) == 2
            assert time.perf_counter() - started < 10.0


class TestCriterion3:
    def test_exponent_sum_equals_enclosed_count(self, capfd):
        with criterion(
            capfd,
            3,
            "exponent sum equals enclosed branch count on 100+ random cases",
        ):
            started = time.perf_counter()
            circles, lollipops = randomized_cases()
            cases = list(circles) + [
                (g, data, lollipop_loop(data, spec).path)
                for g, data, spec in lollipops
            ]
            assert len(cases) >= 100
            errors = 0
            for g, data, loop in cases:
                try:
                    word = braid_along(g, data, loop)
                except (InputError, NumericalFailure):
                    errors += 1
                    continue
                assert exponent_sum(word) == enclosed_count(loop, data)
            assert errors <= 0.05 * len(cases)
            assert time.perf_counter() - started < 300.0


class TestCriterion4:
    def test_lollipops_read_quasipositive_factorizations(self, capfd):
        with criterion(
            capfd,
            4,
            "every random lollipop yields a verified positive-band reading",
        ):
            _, lollipops = randomized_cases()
            assert lollipops
            for g, data, spec in lollipops:
                qpf = qp_factorization(g, data, spec)
                assert len(qpf.bands) == len(spec.targets)
                # qp_factorization itself rejects non-positive circle letters
                # and mismatched expansions, so success plus the band count
                # is the whole contract; re-verify the expansion anyway.
                built = lollipop_loop(data, spec)
                word = braid_along(g, data, built.path)
                assert free_reduce(expand_factorization(qpf)) == free_reduce(
                    word
                )


class TestCriterion5:
    def test_named_realization_round_trips(self, capfd):
        with criterion(
            capfd, 5, "realize round-trips the named factorization corpus"
        ):
            started = time.perf_counter()
            corpus = [
                QuasipositiveFactorization(
                    2, (Band(conjugator=(), index=1),)
                ),
                QuasipositiveFactorization(
                    3,
                    (Band(conjugator=letters_from_pairs([(2, 1)]), index=1),),
                ),
                QuasipositiveFactorization(
                    3,
                    (
                        Band(conjugator=(), index=1),
                        Band(conjugator=(), index=1),
                        Band(conjugator=(), index=2),
                        Band(conjugator=letters_from_pairs([(2, 1)]), index=1),
                    ),
                ),
                QuasipositiveFactorization(
                    3,
                    (
                        Band(conjugator=(), index=1),
                        Band(
                            conjugator=letters_from_pairs(
                                [(2, 1), (2, 1), (2, 1)]
                            ),
                            index=1,
                        ),
                    ),
                ),
            ]
            for qpf in corpus:
                _, _, verification = realize(qpf)
                assert free_reduce(verification) == free_reduce(
                    expand_factorization(qpf)
                )
            assert time.perf_counter() - started < 120.0


class TestCriterion6:
    FIXTURES = (
        ("w^2 - z", (-2.0, -2.0, 2.0, 2.0)),
        ("w^3 - 3*w + 2*z^4", (-2.0, -2.0, 2.0, 2.0)),
        ("w^4 - z*w^3 - w^2 + z*w + 0.05", (-3.0, -3.0, 3.0, 3.0)),
    )

    def test_graph_reading_matches_continuation(self, capfd):
        with criterion(
            capfd,
            6,
            "crossing-graph words match continuation on 20 loops per fixture",
        ):
            rng = random.Random(6_2026)
            for text, region in self.FIXTURES:
                f, data = prepared(text)
                resolution = 128
                graph = sample_crossing_graph(f, data, region, resolution)
                points = data.values()
                x0, y0, x1, y1 = region
                scale = 1.0 + max(abs(z) for z in points)
                checked = 0
                guard = 0
                while checked < 20 and guard < 400:
                    guard += 1
                    center = complex(
                        rng.uniform(x0 + 0.3, x1 - 0.3),
                        rng.uniform(y0 + 0.3, y1 - 0.3),
                    )
                    max_r = min(
                        center.real - x0,
                        x1 - center.real,
                        center.imag - y0,
                        y1 - center.imag,
                    )
                    radius = rng.uniform(0.2, max(0.21, max_r - 0.05))
                    if min(abs(abs(center - z) - radius) for z in points) < 0.05:
                        continue
                    loop = circle_loop(
                        center,
                        radius,
                        turns=rng.choice((-1, 1)),
                        start_angle=rng.uniform(0, 2 * math.pi),
                    )
                    try:
                        from_graph = free_reduce(crossings_of(graph, loop))
                        from_track = free_reduce(braid_along(f, data, loop))
                    except (InputError, NumericalFailure):
                        continue
                    assert from_graph == from_track
                    checked += 1
                assert checked == 20

    def test_square_root_locus_within_one_cell_at_256(self, capfd):
        with criterion(
            capfd,
            6,
            "square-root locus hugs the negative real axis at resolution 256",
        ):
            f, data = prepared("w^2 - z")
            graph = sample_crossing_graph(f, data, (-2, -2, 2, 2), 256)
            cell = 4.0 / 256
            assert graph.segments
            for seg in graph.segments:
                for p in (seg.start, seg.end):
                    assert abs(p.imag) <= cell
                    assert p.real <= cell


class TestCriterion7:
    def fixture_loops(self):
        sqrt_f, sqrt_data = prepared("w^2 - z")
        quartic_f, quartic_data = prepared("w^3 - 3*w + 2*z^4")
        frozen = loop_from_json(
            json.loads((DATA_DIR / "figure_loop.json").read_text())
        )
        return (
            (sqrt_f, sqrt_data, circle_loop(0j, 1.0)),
            (sqrt_f, sqrt_data, circle_loop(0j, 1.0, turns=-1)),
            (quartic_f, quartic_data, frozen),
        )

    def test_refinement_invariance(self, capfd):
        with criterion(
            capfd, 7, "letter sequences are identical under step halving"
        ):
            for f, data, loop in self.fixture_loops():
                coarse = track_roots(f, data, loop, step_cap_fraction=1 / 256)
                fine = track_roots(f, data, loop, step_cap_fraction=1 / 512)
                assert [(e.position, e.sign) for e in coarse.events] == [
                    (e.position, e.sign) for e in fine.events
                ]

    def test_isotopy_invariance_under_jitter(self, capfd):
        with criterion(
            capfd, 7, "words are cyclically stable under half-clearance jitter"
        ):
            rng = random.Random(7_2026)
            for f, data, loop in self.fixture_loops():
                reference = cyclic_reduce(free_reduce(braid_along(f, data, loop)))
                clearance = min(
                    min(
                        abs(loop.point_at(t) - z)
                        for t in np.linspace(0, 1, 512)
                    )
                    for z in data.values()
                )
                for _ in range(10):
                    angle = rng.uniform(0, 2 * math.pi)
                    shift = (
                        0.5
                        * clearance
                        * rng.uniform(0.2, 1.0)
                        * complex(math.cos(angle), math.sin(angle))
                    )
                    moved = LoopPath(
                        tuple(
                            Segment(p.a + shift, p.b + shift)
                            if isinstance(p, Segment)
                            else Arc(
                                p.center + shift,
                                p.radius,
                                p.angle_from,
                                p.angle_to,
                            )
                            for p in loop.primitives
                        ),
                        closed=True,
                    )
                    word = cyclic_reduce(
                        free_reduce(braid_along(f, data, moved))
                    )
                    assert cyclically_equal(word, reference)


class TestCriterion8:
    def random_word(self, rng, strands=None, max_len=14):
        n = strands or rng.randint(2, 5)
        pairs = [
            (rng.randint(1, n - 1), rng.choice((-1, 1)))
            for _ in range(rng.randint(0, max_len))
        ]
        return BraidWord(n, letters_from_pairs(pairs))

    def random_cancel(self, word, rng):
        letters = list(word.letters)
        while True:
            pairs = [
                i
                for i in range(len(letters) - 1)
                if letters[i] == letters[i + 1].inverse()
            ]
            if not pairs:
                return BraidWord(word.strands, tuple(letters))
            i = rng.choice(pairs)
            del letters[i : i + 2]

    def test_braid_core_property_suite(self, capfd):
        with criterion(
            capfd, 8, "braid-core properties hold on 1000+ random instances"
        ):
            rng = random.Random(8_2026)
            for _ in range(1000):
                w = self.random_word(rng)
                once = free_reduce(w)
                assert free_reduce(once) == once
                assert once == self.random_cancel(w, rng)

            for _ in range(1000):
                w = self.random_word(rng)
                c = self.random_word(rng, strands=w.strands)
                conj = concat(c, w, invert(c))
                assert exponent_sum(conj) == exponent_sum(w)
                assert closure_components(conj) == closure_components(w)
                assert permutation_of(free_reduce(w)) == permutation_of(w)

            for _ in range(1000):
                n = rng.randint(2, 5)
                bands = tuple(
                    Band(
                        conjugator=self.random_word(rng, strands=n, max_len=4).letters,
                        index=rng.randint(1, n - 1),
                    )
                    for _ in range(rng.randint(1, 6))
                )
                qpf = QuasipositiveFactorization(n, bands)
                assert exponent_sum(expand_factorization(qpf)) == len(bands)
                assert band_euler_characteristic(qpf) == n - len(bands)
