"""Branch points of an algebraic function and the genericity toolkit.

The branch locus is the finite set of z where the fiber of f(z, w) = 0 has a
repeated root, i.e. the roots of the discriminant in w.  Downstream machinery
wants the locus in general position: every branch fiber should carry exactly
one simple double root with a genuine vertical tangent, and a rotation angle
theta should separate the real parts of all roots over every branch point.
Both properties hold after adding a small multiple of w to f, which is what
:func:`perturb_generic` automates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError, NumericalFailure
from .poly import (
    BivariatePolynomial,
    discriminant_w,
    fiber_roots,
    raw_roots,
    roots,
)

__all__ = [
    "BranchPoint",
    "BranchData",
    "GenericityIssue",
    "GenericityReport",
    "branch_points",
    "check_genericity",
    "perturb_generic",
    "select_rotation",
    "branch_data_to_json",
    "branch_data_from_json",
]

SEPARATION_FLOOR_FACTOR = 1e-4
ROTATION_SAMPLES = 720
GENERICITY_RTOL = 1e-6


@dataclass(frozen=True)
class BranchPoint:
    z: complex
    multiplicity: int


@dataclass(frozen=True)
class BranchData:
    """Branch points plus the analysis state attached to them.

    ``generic`` records whether :func:`check_genericity` passed, ``rotation_theta``
    is the w-rotation separating real parts over branch fibers, and
    ``perturbation`` is the epsilon of the ``f + epsilon*w`` replacement (None
    when f was used unchanged).
    """

    points: tuple[BranchPoint, ...]
    generic: bool = False
    rotation_theta: float = 0.0
    perturbation: complex | None = None

    def values(self) -> tuple[complex, ...]:
        return tuple(p.z for p in self.points)


@dataclass(frozen=True)
class GenericityIssue:
    z: complex
    reason: str


@dataclass(frozen=True)
class GenericityReport:
    ok: bool
    issues: tuple[GenericityIssue, ...]


def branch_points(f: BivariatePolynomial, tol: float = 1e-12) -> BranchData:
    """Roots of the w-discriminant, clustered and sorted by (Re, Im).

    Discriminant coefficients lose accuracy to cancellation as the degree
    grows, so simple roots are refined twice: a Newton polish on the
    discriminant itself, then a Newton solve of the vertical-tangent system
    (f = 0, df/dw = 0) seeded from the closest fiber root pair.  The second
    refinement is kept only when it stays well inside the branch separation,
    which prevents a noisy root from being snapped to a different branch
    point.
    """
    disc = discriminant_w(f)
    if disc.degree < 1:
        return BranchData(points=())
    rs = roots(disc, tol=tol)
    dd = disc.derivative()
    coarse = []
    for z, m in zip(rs.values, rs.multiplicities):
        if m == 1:
            z = _newton_root_polish(disc, dd, z)
        coarse.append((z, m))
    min_gap = math.inf
    for i in range(len(coarse)):
        for j in range(i + 1, len(coarse)):
            min_gap = min(min_gap, abs(coarse[i][0] - coarse[j][0]))
    fw = f.dw()
    fz = f.dz()
    fww = fw.dw()
    fzw = fz.dw()
    pts = []
    for z, m in coarse:
        if m == 1:
            z = _tangent_refined(f, fz, fw, fzw, fww, z, min_gap)
        pts.append(BranchPoint(z, m))
    pts.sort(key=lambda p: (p.z.real, p.z.imag))
    return BranchData(points=tuple(pts))


def _tangent_refined(f, fz, fw, fzw, fww, z, min_gap: float) -> complex:
    limit = min(1e-3 * (1.0 + abs(z)), 0.25 * min_gap)
    try:
        vals = raw_roots(f.fiber(z), tol=1e-15, certify_tol=1e-7)
    except (InputError, NumericalFailure):
        return z
    m = len(vals)
    if m < 2:
        return z
    pair = min(
        ((i, j) for i in range(m) for j in range(i + 1, m)),
        key=lambda ij: abs(vals[ij[0]] - vals[ij[1]]),
    )
    w0 = (vals[pair[0]] + vals[pair[1]]) / 2.0
    z_t, _, converged = _polish_tangent(f, fz, fw, fzw, fww, z, w0)
    if converged and abs(z_t - z) <= limit:
        return z_t
    return z


def _newton_root_polish(
    p, dp, z: complex, iterations: int = 12
) -> complex:
    for _ in range(iterations):
        slope = dp(z)
        if slope == 0:
            return z
        step = p(z) / slope
        z = z - step
        if abs(step) <= 1e-16 * (1.0 + abs(z)):
            break
    return z


def _bbox_diameter(values: tuple[complex, ...]) -> float:
    if not values:
        return 0.0
    xs = [v.real for v in values]
    ys = [v.imag for v in values]
    return math.hypot(max(xs) - min(xs), max(ys) - min(ys))


def check_genericity(
    f: BivariatePolynomial,
    data: BranchData,
    rtol: float = GENERICITY_RTOL,
) -> GenericityReport:
    """Certify that every branch fiber has one simple double root.

    Checks, per branch point: the fiber has exactly n-1 distinct values with a
    single double one; at the double root the z-derivative and the second
    w-derivative are nonzero relative to the local coefficient scale (a
    genuine vertical tangent of a smooth curve point); and the branch point is
    a simple discriminant root.
    """
    n = f.w_degree
    fw = f.dw()
    fz = f.dz()
    fww = fw.dw()
    fzw = fz.dw()
    issues: list[GenericityIssue] = []
    for point in data.points:
        z = point.z
        if point.multiplicity != 1:
            issues.append(
                GenericityIssue(z, f"discriminant root has multiplicity {point.multiplicity}")
            )
            continue
        # The stored branch point carries roundoff, so its fiber shows the
        # double root as a close pair.  The pair midpoint only seeds a Newton
        # refinement of the tangent point; all structural decisions are made
        # at the refined point, where the double root is exact.
        vals = raw_roots(f.fiber(z), tol=1e-15, certify_tol=1e-7)
        pair = min(
            ((i, j) for i in range(n) for j in range(i + 1, n)),
            key=lambda ij: abs(vals[ij[0]] - vals[ij[1]]),
        )
        w0 = (vals[pair[0]] + vals[pair[1]]) / 2.0
        z_t, w_t, converged = _polish_tangent(f, fz, fw, fzw, fww, z, w0)
        if not converged:
            issues.append(
                GenericityIssue(z, "vertical tangent refinement did not converge")
            )
            continue
        if abs(z_t - z) > 1e-6 * (1.0 + abs(z)):
            issues.append(
                GenericityIssue(
                    z, "nearest vertical tangent is too far from the branch point"
                )
            )
            continue
        tangent_vals = raw_roots(f.fiber(z_t), tol=1e-15, certify_tol=1e-7)
        scale_w = max(1.0, max(abs(v) for v in tangent_vals))
        floor = 1e-4 * scale_w
        near = [i for i, v in enumerate(tangent_vals) if abs(v - w_t) < 0.5 * floor]
        if len(near) != 2:
            issues.append(
                GenericityIssue(
                    z, f"fiber does not split into one double and {n - 2} simple roots"
                )
            )
            continue
        others = [v for i, v in enumerate(tangent_vals) if i not in near]
        simple_ok = all(abs(v - w_t) >= floor for v in others) and all(
            abs(others[i] - others[j]) >= floor
            for i in range(len(others))
            for j in range(i + 1, len(others))
        )
        if not simple_ok:
            issues.append(
                GenericityIssue(
                    z, f"fiber does not split into one double and {n - 2} simple roots"
                )
            )
            continue
        dz_val = fz.evaluate(z_t, w_t)
        dz_scale = max(fz.magnitude_at(z_t, w_t), 1e-300)
        if abs(dz_val) <= rtol * dz_scale:
            issues.append(
                GenericityIssue(z, "z-derivative vanishes at the double root")
            )
            continue
        dww_val = fww.evaluate(z_t, w_t)
        dww_scale = max(fww.magnitude_at(z_t, w_t), 1e-300)
        if abs(dww_val) <= rtol * dww_scale:
            issues.append(
                GenericityIssue(z, "second w-derivative vanishes at the double root")
            )
    return GenericityReport(ok=not issues, issues=tuple(issues))


def _polish_tangent(f, fz, fw, fzw, fww, z0, w0):
    """Newton refinement of a vertical tangent point (f = 0, f_w = 0)."""
    z, w = complex(z0), complex(w0)
    for _ in range(40):
        v1 = f.evaluate(z, w)
        v2 = fw.evaluate(z, w)
        s1 = max(f.magnitude_at(z, w), 1e-300)
        s2 = max(fw.magnitude_at(z, w), 1e-300)
        if abs(v1) <= 1e-13 * s1 and abs(v2) <= 1e-13 * s2:
            return z, w, True
        a = fz.evaluate(z, w)
        b = fw.evaluate(z, w)
        c = fzw.evaluate(z, w)
        d = fww.evaluate(z, w)
        det = a * d - b * c
        if det == 0:
            return z, w, False
        z -= (v1 * d - v2 * b) / det
        w -= (a * v2 - c * v1) / det
    v1 = f.evaluate(z, w)
    v2 = fw.evaluate(z, w)
    ok = abs(v1) <= 1e-12 * max(f.magnitude_at(z, w), 1e-300) and abs(
        v2
    ) <= 1e-12 * max(fw.magnitude_at(z, w), 1e-300)
    return z, w, ok


def _separation_ok(values: tuple[complex, ...]) -> bool:
    if len(values) < 2:
        return True
    floor = SEPARATION_FLOOR_FACTOR * _bbox_diameter(values)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) < floor:
                return False
    return True


def perturb_generic(
    f: BivariatePolynomial,
    budget: float = 1e-2,
    max_trials: int = 24,
) -> tuple[BivariatePolynomial, BranchData]:
    """Replace f by f + epsilon*w with the smallest workable epsilon.

    Epsilon 0 is tried first; afterwards the trial sequence is
    ``budget * 2^-k``.  The scan keeps decreasing while trials pass (so the
    returned epsilon is the smallest passing one before a failure) and a trial
    passes when the branch locus is generic and pairwise branch separation
    stays above the floor.
    """
    try:
        data = branch_points(f)
        if check_genericity(f, data).ok and _separation_ok(data.values()):
            return f, replace(data, generic=True, perturbation=None)
    except (InputError, NumericalFailure):
        pass

    best: tuple[BivariatePolynomial, BranchData, complex] | None = None
    for k in range(max_trials):
        eps = budget * 2.0 ** (-k)
        candidate = f.add_w_linear(eps)
        try:
            data = branch_points(candidate)
            ok = check_genericity(candidate, data).ok and _separation_ok(
                data.values()
            )
        except (InputError, NumericalFailure):
            ok = False
        if ok:
            best = (candidate, data, eps)
        elif best is not None:
            break
    if best is None:
        raise NumericalFailure(
            "no epsilon in the trial sequence produced a generic branch locus",
            diagnostics={"budget": budget, "trials": max_trials},
        )
    candidate, data, eps = best
    return candidate, replace(data, generic=True, perturbation=eps)


def _fiber_values_at_branches(
    f: BivariatePolynomial, data: BranchData
) -> list[np.ndarray]:
    fibers = []
    for point in data.points:
        vals = np.array(fiber_roots(f, point.z).values, dtype=complex)
        if len(vals) >= 2:
            fibers.append(vals)
    return fibers


def _min_gap(fibers: list[np.ndarray], theta: float) -> float:
    worst = math.inf
    rot = complex(math.cos(theta), math.sin(theta))
    for vals in fibers:
        re = np.sort((rot * vals).real)
        gap = float(np.min(np.diff(re)))
        worst = min(worst, gap)
    return worst


def select_rotation(
    f: BivariatePolynomial,
    data: BranchData,
    samples: int = ROTATION_SAMPLES,
) -> float:
    """Angle theta making the rotated real parts distinct over every branch fiber.

    Maximizes the worst real-part gap over a uniform grid, refines the best
    bracket by golden-section search, and keeps theta = 0 whenever its gap is
    at least half the optimum.  Ties prefer the smaller angle.
    """
    fibers = _fiber_values_at_branches(f, data)
    if not fibers:
        return 0.0
    thetas = np.arange(samples) * (2.0 * math.pi / samples)
    gaps = np.array([_min_gap(fibers, t) for t in thetas])
    best_idx = int(np.argmax(gaps))

    lo = thetas[best_idx] - 2.0 * math.pi / samples
    hi = thetas[best_idx] + 2.0 * math.pi / samples
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = _min_gap(fibers, c), _min_gap(fibers, d)
    for _ in range(60):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = _min_gap(fibers, c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = _min_gap(fibers, d)
    theta_best = (c if fc >= fd else d) % (2.0 * math.pi)
    gap_best = max(_min_gap(fibers, theta_best), 0.0)
    gap_zero = _min_gap(fibers, 0.0)
    if gap_zero >= 0.5 * gap_best and gap_zero > 0.0:
        return 0.0
    if gap_best <= 0.0:
        raise NumericalFailure(
            "no rotation separates the branch-fiber real parts",
            diagnostics={"best_theta": theta_best, "best_gap": gap_best},
        )
    return float(theta_best)


def branch_data_to_json(data: BranchData) -> dict:
    eps = data.perturbation
    return {
        "points": [
            {"z": [p.z.real, p.z.imag], "multiplicity": p.multiplicity}
            for p in data.points
        ],
        "generic": data.generic,
        "theta": data.rotation_theta,
        "epsilon": None if eps is None else [eps.real, eps.imag],
    }


def branch_data_from_json(payload: dict) -> BranchData:
    try:
        pts = tuple(
            BranchPoint(complex(p["z"][0], p["z"][1]), int(p["multiplicity"]))
            for p in payload["points"]
        )
        eps = payload.get("epsilon")
        return BranchData(
            points=pts,
            generic=bool(payload.get("generic", False)),
            rotation_theta=float(payload.get("theta", 0.0)),
            perturbation=None if eps is None else complex(eps[0], eps[1]),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"malformed branch data JSON: {exc}") from exc
