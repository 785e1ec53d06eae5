"""Polynomials in one and two complex variables, with certified root finding.

The central objects are polynomials ``f(z, w)`` of fixed degree ``n`` in ``w``
whose ``w``-leading coefficient is a nonzero constant, so every fiber
``f(z0, .)`` has exactly ``n`` roots counted with multiplicity and none escape
to infinity.  Root finding uses the Aberth simultaneous iteration with
deterministic seeds on the Cauchy-bound circle; a residual check relative to
the coefficient magnitude either certifies the output or raises.  Nearby roots
are merged into multiplicity clusters at radius ``sqrt(tol)`` times the Cauchy
bound, which matches how accurately a double root can be located in floating
point.

The discriminant with respect to ``w`` is the determinant of the Sylvester
matrix of ``f`` and its ``w``-derivative, computed over the polynomial ring in
``z``: expansion by minors (memoized over column subsets) for small matrices,
fraction-free Bareiss elimination for larger ones.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, NumericalFailure

__all__ = [
    "UnivariatePolynomial",
    "BivariatePolynomial",
    "RootSet",
    "roots",
    "discriminant_w",
    "fiber_roots",
    "parse_bivariate_text",
    "bivariate_to_json",
    "bivariate_from_json",
]

DEFAULT_ROOT_TOL = 1e-12
DEFAULT_MAX_ITERATIONS = 200


def _as_complex_tuple(values: Iterable[complex]) -> tuple[complex, ...]:
    return tuple(complex(v) for v in values)


def _trim_exact(coefficients: tuple[complex, ...]) -> tuple[complex, ...]:
    end = len(coefficients)
    while end > 0 and coefficients[end - 1] == 0:
        end -= 1
    return coefficients[:end]


@dataclass(frozen=True)
class UnivariatePolynomial:
    """Coefficients in ascending degree order; exact trailing zeros trimmed."""

    coefficients: tuple[complex, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coefficients", _trim_exact(_as_complex_tuple(self.coefficients))
        )

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial reported as -1."""
        return len(self.coefficients) - 1

    def __call__(self, z):
        """Horner evaluation; accepts scalars or numpy arrays."""
        if not self.coefficients:
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        acc = np.zeros_like(np.asarray(z, dtype=complex)) + self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            acc = acc * z + c
        return acc if np.ndim(z) else complex(acc)

    def derivative(self) -> UnivariatePolynomial:
        return UnivariatePolynomial(
            tuple(k * c for k, c in enumerate(self.coefficients) if k > 0)
        )

    def __add__(self, other: UnivariatePolynomial) -> UnivariatePolynomial:
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        summed = list(a)
        for i, c in enumerate(b):
            summed[i] += c
        return UnivariatePolynomial(tuple(summed))

    def __sub__(self, other: UnivariatePolynomial) -> UnivariatePolynomial:
        return self + other.scale(-1)

    def __mul__(self, other: UnivariatePolynomial) -> UnivariatePolynomial:
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return UnivariatePolynomial(())
        prod = np.convolve(np.array(a, dtype=complex), np.array(b, dtype=complex))
        return UnivariatePolynomial(tuple(prod))

    def scale(self, factor: complex) -> UnivariatePolynomial:
        return UnivariatePolynomial(tuple(factor * c for c in self.coefficients))

    def magnitude_at(self, z: complex) -> float:
        """Sum of |c_k| |z|^k, the natural backward-error scale at z."""
        r = abs(z)
        total, power = 0.0, 1.0
        for c in self.coefficients:
            total += abs(c) * power
            power *= r
        return total


@dataclass(frozen=True)
class RootSet:
    """Clustered roots: distinct values, multiplicities, and the worst
    relative residual |p(root)| / sum(|c_k| |root|^k) over the values."""

    values: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    residual: float

    def __post_init__(self) -> None:
        if len(self.values) != len(self.multiplicities):
            raise InputError("values and multiplicities must align")

    @property
    def total(self) -> int:
        return sum(self.multiplicities)


def _aberth(monic: np.ndarray, tol: float, max_iterations: int) -> np.ndarray:
    """Simultaneous root iteration for a monic polynomial, ascending coeffs."""
    m = len(monic) - 1
    cauchy = 1.0 + float(np.max(np.abs(monic[:-1]))) if m > 0 else 1.0
    # Seeds on the Cauchy circle with an angular offset that breaks the
    # symmetry of real-coefficient inputs.
    angles = 2.0 * np.pi * np.arange(m) / m + 0.4
    z = cauchy * np.exp(1j * angles)
    deriv = monic[1:] * np.arange(1, m + 1)
    abs_asc = np.abs(monic)

    for _ in range(max_iterations):
        p = np.polyval(monic[::-1], z)
        scale = np.maximum(np.polyval(abs_asc[::-1], np.abs(z)), 1e-300)
        if np.max(np.abs(p) / scale) <= tol:
            break
        dp = np.polyval(deriv[::-1], z)
        dp = np.where(dp == 0, 1e-300, dp)
        newton = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            repulsion = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * repulsion
        denom = np.where(denom == 0, 1e-300, denom)
        delta = newton / denom
        bad = ~np.isfinite(delta)
        if np.any(bad):
            delta = np.where(bad, 1e-8 * cauchy * (1 + 1j), delta)
        # Cap the step length so a near-singular denominator cannot fling an
        # iterate far outside the root bound.
        mag = np.abs(delta)
        cap = 0.5 * cauchy
        shrink = np.where(mag > cap, cap / np.maximum(mag, 1e-300), 1.0)
        delta = delta * shrink
        z = z - delta
        if np.max(np.abs(delta)) <= 1e-15 * (1.0 + np.max(np.abs(z))):
            break
    return z


def _cluster_values(
    values: np.ndarray, radius: float
) -> tuple[tuple[complex, ...], tuple[int, ...]]:
    m = len(values)
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(values[i] - values[j]) <= radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[complex]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(complex(values[i]))
    reps = [
        (sum(g) / len(g), len(g))
        for g in groups.values()
    ]
    reps.sort(key=lambda pair: (pair[0].real, pair[0].imag))
    return tuple(r for r, _ in reps), tuple(c for _, c in reps)


def _grow_multiple_clusters(
    p: UnivariatePolynomial,
    values: tuple[complex, ...],
    mults: tuple[int, ...],
    tol: float,
    cauchy: float,
) -> tuple[tuple[complex, ...], tuple[int, ...]]:
    """Merge clusters that jointly certify as one root of higher multiplicity.

    An iteration stalled on a root of multiplicity m stops about tol^(1/m)
    away from it, so clusters of a multiple root can land outside the base
    pairing radius.  A merge of total size m is accepted only when p and its
    first m-1 derivatives all vanish at the merged mean to the accuracy a
    genuine m-fold root would give, which keeps nearby simple roots apart.
    """
    derivs = [p]
    for _ in range(len(p.coefficients) - 1):
        derivs.append(derivs[-1].derivative())

    def certifies(center: complex, m: int) -> bool:
        for k in range(m):
            scale = max(derivs[k].magnitude_at(center), 1e-300)
            if abs(derivs[k](center)) / scale > tol ** ((m - k) / m):
                return False
        return True

    degree = len(p.coefficients) - 1
    radius = tol ** (1.0 / degree) * cauchy
    clusters = list(zip(values, mults))
    groups: list[list[tuple[complex, int]]] = []
    for cluster in sorted(clusters, key=lambda cm: (cm[0].real, cm[0].imag)):
        for group in groups:
            if any(abs(cluster[0] - other) <= radius for other, _ in group):
                group.append(cluster)
                break
        else:
            groups.append([cluster])

    merged: list[tuple[complex, int]] = []
    for group in groups:
        pending = group
        while len(pending) > 1:
            # Largest certifying sub-collection wins; everything else is
            # retried on its own.  Groups are tiny, so this stays cheap.
            committed = False
            for size in range(len(pending), 1, -1):
                if committed or len(pending) > 8:
                    break
                for subset in itertools.combinations(range(len(pending)), size):
                    m = sum(pending[i][1] for i in subset)
                    center = sum(pending[i][0] * pending[i][1] for i in subset) / m
                    if certifies(center, m):
                        merged.append((center, m))
                        pending = [
                            pending[i]
                            for i in range(len(pending))
                            if i not in subset
                        ]
                        committed = True
                        break
            if not committed:
                break
        merged.extend(pending)
    merged.sort(key=lambda cm: (cm[0].real, cm[0].imag))
    return tuple(c for c, _ in merged), tuple(m for _, m in merged)


def raw_roots(
    p: UnivariatePolynomial,
    tol: float = DEFAULT_ROOT_TOL,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    certify_tol: float | None = None,
) -> tuple[complex, ...]:
    """All complex roots without multiplicity clustering.

    Near-coincident values are returned as they are, which is what structural
    checks on nearly-degenerate fibers need.  ``tol`` drives the iteration
    (pass a tiny value to run to machine convergence; near-double iterates
    stall early otherwise) while ``certify_tol`` is the accepted backward
    error, defaulting to ``tol``.
    """
    coeffs = np.array(p.coefficients, dtype=complex)
    if len(coeffs) == 0 or p.degree < 1:
        raise InputError("root finding needs a polynomial of degree >= 1")
    monic = coeffs / coeffs[-1]
    if p.degree == 1:
        return (complex(-monic[0]),)
    # Rebuilding coefficients from n roots amplifies per-root error by about
    # a factor of n, so the default certificate scales with the degree.
    certify = 8 * p.degree * tol if certify_tol is None else certify_tol
    iterates = _aberth(monic, tol, max_iterations)
    # Certify collectively: the monic rebuilt from the iterates must match the
    # input coefficients.  Per-root backward error degenerates on monomial-like
    # fibers (for w^2 it is 1 at every nonzero point), this does not.
    rebuilt = np.poly(iterates)[::-1]
    err = float(np.max(np.abs(rebuilt - monic))) / max(1.0, float(np.max(np.abs(monic))))
    if err > certify:
        raise NumericalFailure(
            f"root finding did not certify: coefficient residual {err:.3e} > {certify:.3e}",
            diagnostics={"residual": err},
        )
    return tuple(sorted((complex(v) for v in iterates), key=lambda c: (c.real, c.imag)))


def roots(
    p: UnivariatePolynomial,
    tol: float = DEFAULT_ROOT_TOL,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> RootSet:
    """All complex roots of ``p`` with multiplicity clustering.

    Raises :class:`NumericalFailure` with the best iterates attached when the
    relative residual cannot be brought below ``tol``.
    """
    coeffs = np.array(p.coefficients, dtype=complex)
    if len(coeffs) == 0 or p.degree < 1:
        raise InputError("root finding needs a polynomial of degree >= 1")
    monic = coeffs / coeffs[-1]
    if p.degree == 1:
        value = complex(-monic[0])
        return RootSet((value,), (1,), 0.0)
    iterates = _aberth(monic, tol, max_iterations)
    cauchy = 1.0 + float(np.max(np.abs(monic[:-1])))
    values, mults = _cluster_values(iterates, np.sqrt(tol) * cauchy)
    if len(values) > 1:
        values, mults = _grow_multiple_clusters(p, values, mults, tol, cauchy)
    worst = 0.0
    for v in values:
        worst = max(worst, abs(p(v)) / max(p.magnitude_at(v), 1e-300))
    if worst > tol:
        raise NumericalFailure(
            f"root finding did not certify: relative residual {worst:.3e} > {tol:.3e}",
            diagnostics={
                "values": [repr(v) for v in values],
                "residual": worst,
            },
        )
    return RootSet(values, mults, worst)


@dataclass(frozen=True)
class BivariatePolynomial:
    """f(z, w) with ``w_coefficients[k]`` the z-polynomial multiplying w^k.

    The leading coefficient (of w^n) must be a nonzero constant, so fibers
    never drop degree and the zero set has no vertical asymptotes.
    """

    w_coefficients: tuple[UnivariatePolynomial, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "w_coefficients", tuple(self.w_coefficients))
        if len(self.w_coefficients) < 3:
            raise InputError("w-degree must be at least 2")
        lead = self.w_coefficients[-1]
        if lead.degree != 0:
            raise InputError(
                "the coefficient of the top w-power must be a nonzero constant"
            )

    @property
    def w_degree(self) -> int:
        return len(self.w_coefficients) - 1

    @property
    def leading_constant(self) -> complex:
        return self.w_coefficients[-1].coefficients[0]

    def fiber(self, z: complex) -> UnivariatePolynomial:
        """The univariate polynomial w -> f(z, w)."""
        return UnivariatePolynomial(tuple(c(z) for c in self.w_coefficients))

    def evaluate(self, z: complex, w: complex) -> complex:
        acc = 0j
        for c in reversed(self.w_coefficients):
            acc = acc * w + c(z)
        return acc

    def dw(self) -> BivariatePolynomial | UnivariatePolynomial:
        coeffs = tuple(
            self.w_coefficients[k].scale(k)
            for k in range(1, len(self.w_coefficients))
        )
        return _maybe_bivariate(coeffs)

    def dz(self):
        coeffs = tuple(c.derivative() for c in self.w_coefficients)
        return _maybe_bivariate(coeffs)

    def add_w_linear(self, epsilon: complex) -> BivariatePolynomial:
        """f + epsilon * w, the standard genericity perturbation."""
        coeffs = list(self.w_coefficients)
        coeffs[1] = coeffs[1] + UnivariatePolynomial((epsilon,))
        return BivariatePolynomial(tuple(coeffs))

    def magnitude_at(self, z: complex, w: complex) -> float:
        r = abs(w)
        total, power = 0.0, 1.0
        for c in self.w_coefficients:
            total += c.magnitude_at(z) * power
            power *= r
        return total


@dataclass(frozen=True)
class _WPoly:
    """Evaluation view for derivative results that may drop to w-degree < 2."""

    w_coefficients: tuple[UnivariatePolynomial, ...]

    def evaluate(self, z: complex, w: complex) -> complex:
        acc = 0j
        for c in reversed(self.w_coefficients):
            acc = acc * w + c(z)
        return acc

    def magnitude_at(self, z: complex, w: complex) -> float:
        r = abs(w)
        total, power = 0.0, 1.0
        for c in self.w_coefficients:
            total += c.magnitude_at(z) * power
            power *= r
        return total

    def dw(self):
        coeffs = tuple(
            self.w_coefficients[k].scale(k)
            for k in range(1, len(self.w_coefficients))
        )
        return _maybe_bivariate(coeffs)


def _maybe_bivariate(coeffs: tuple[UnivariatePolynomial, ...]):
    trimmed = list(coeffs)
    while trimmed and trimmed[-1].degree < 0:
        trimmed.pop()
    if len(trimmed) >= 3 and trimmed[-1].degree == 0:
        return BivariatePolynomial(tuple(trimmed))
    return _WPoly(tuple(trimmed))


_ZERO = UnivariatePolynomial(())


def _sylvester_rows(
    f: Sequence[UnivariatePolynomial], g: Sequence[UnivariatePolynomial]
) -> list[list[UnivariatePolynomial]]:
    # f has w-degree m, g has w-degree k; matrix is (m + k) square with k
    # shifted copies of f's coefficients (descending) and m of g's.
    m, k = len(f) - 1, len(g) - 1
    size = m + k
    rows = []
    fd = list(reversed(f))
    gd = list(reversed(g))
    for shift in range(k):
        row = [_ZERO] * size
        for j, c in enumerate(fd):
            row[shift + j] = c
        rows.append(row)
    for shift in range(m):
        row = [_ZERO] * size
        for j, c in enumerate(gd):
            row[shift + j] = c
        rows.append(row)
    return rows


def _det_expansion(rows: list[list[UnivariatePolynomial]]) -> UnivariatePolynomial:
    """Determinant over the polynomial ring by memoized expansion on columns."""
    size = len(rows)
    memo: dict[int, UnivariatePolynomial] = {}

    def minor(col_mask: int) -> UnivariatePolynomial:
        if col_mask == 0:
            return UnivariatePolynomial((1,))
        cached = memo.get(col_mask)
        if cached is not None:
            return cached
        row_index = size - bin(col_mask).count("1")
        total = UnivariatePolynomial(())
        sign = 1
        rest = col_mask
        while rest:
            low = rest & (-rest)
            col = low.bit_length() - 1
            entry = rows[row_index][col]
            if entry.degree >= 0:
                term = entry * minor(col_mask & ~low)
                total = total + (term if sign > 0 else term.scale(-1))
            sign = -sign
            rest &= rest - 1
        memo[col_mask] = total
        return total

    return minor((1 << size) - 1)


def _poly_div_exact(
    num: UnivariatePolynomial, den: UnivariatePolynomial
) -> UnivariatePolynomial:
    if den.degree < 0:
        raise NumericalFailure("division by the zero polynomial during elimination")
    if num.degree < 0:
        return num
    q, r = np.polydiv(
        np.array(list(reversed(num.coefficients)), dtype=complex),
        np.array(list(reversed(den.coefficients)), dtype=complex),
    )
    return UnivariatePolynomial(tuple(reversed(q)))


def _det_bareiss(rows: list[list[UnivariatePolynomial]]) -> UnivariatePolynomial:
    """Fraction-free elimination; divisions are exact in the polynomial ring."""
    size = len(rows)
    mat = [list(r) for r in rows]
    sign = 1
    prev = UnivariatePolynomial((1,))
    for k in range(size - 1):
        if mat[k][k].degree < 0:
            swap = next(
                (i for i in range(k + 1, size) if mat[i][k].degree >= 0), None
            )
            if swap is None:
                return UnivariatePolynomial(())
            mat[k], mat[swap] = mat[swap], mat[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = mat[k][k] * mat[i][j] - mat[i][k] * mat[k][j]
                mat[i][j] = _poly_div_exact(num, prev)
            mat[i][k] = _ZERO
        prev = mat[k][k]
    result = mat[size - 1][size - 1]
    return result if sign > 0 else result.scale(-1)


_EXPANSION_SIZE_LIMIT = 13


def discriminant_w(f: BivariatePolynomial, zero_rtol: float = 1e-10) -> UnivariatePolynomial:
    """Resultant of f and df/dw with respect to w, as a polynomial in z.

    Vanishes exactly at the z where the fiber has a repeated root.  Raises
    :class:`InputError` when the result is numerically the zero polynomial,
    which means f has a repeated factor.
    """
    fw = f.dw()
    rows = _sylvester_rows(f.w_coefficients, fw.w_coefficients)
    if _resultant_is_noise(rows, zero_rtol):
        raise InputError(
            "f has a repeated factor (discriminant is identically zero)"
        )
    if len(rows) <= _EXPANSION_SIZE_LIMIT:
        det = _det_expansion(rows)
    else:
        det = _det_bareiss(rows)
    coeffs = det.coefficients
    peak = max((abs(c) for c in coeffs), default=0.0)
    kept = tuple(c if abs(c) > 1e-13 * peak else 0j for c in coeffs)
    trimmed = UnivariatePolynomial(kept)
    if trimmed.degree < 0:
        raise NumericalFailure(
            "discriminant coefficients were lost to cancellation"
        )
    return trimmed


def _resultant_is_noise(rows, zero_rtol: float) -> bool:
    """Whether the Sylvester matrix is numerically singular for every z.

    A repeated factor makes the matrix singular identically, so a handful of
    sample points suffices.  Singularity at a point is judged by the singular
    value ratio, which is scale-free.
    """
    for k in range(9):
        angle = 2.0 * math.pi * (k + 0.31) / 9.0
        z = 1.37 * complex(math.cos(angle), math.sin(angle))
        m = np.array(
            [
                [entry(z) if entry.degree >= 0 else 0j for entry in row]
                for row in rows
            ],
            dtype=complex,
        )
        sing = np.linalg.svd(m, compute_uv=False)
        if sing[-1] > zero_rtol * max(sing[0], 1e-300):
            return False
    return True


def fiber_roots(
    f: BivariatePolynomial, z: complex, tol: float = DEFAULT_ROOT_TOL
) -> RootSet:
    """Roots in w of f(z, .), clustered by multiplicity."""
    return roots(f.fiber(z), tol=tol)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)|(?P<var>[zw])"
    r"|(?P<pow>\^)|(?P<mul>\*)|(?P<plus>\+)|(?P<minus>-))"
)


def parse_bivariate_text(text: str) -> BivariatePolynomial:
    """Parse expressions like ``w^3 - 3*w + 2*z^4``.

    Terms are products of a decimal coefficient and powers of z and w; no
    parentheses.  The result must have w-degree >= 2 with a constant leading
    coefficient.
    """
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise InputError(f"cannot tokenize polynomial text at {text[pos:]!r}")
            break
        pos = m.end()
        for kind in ("number", "var", "pow", "mul", "plus", "minus"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break

    grid: dict[tuple[int, int], complex] = {}
    i = 0
    first_term = True
    while i < len(tokens):
        sign = 1.0
        while i < len(tokens) and tokens[i][0] in ("plus", "minus"):
            if tokens[i][0] == "minus":
                sign = -sign
            i += 1
        if i >= len(tokens):
            if not first_term:
                raise InputError("dangling sign at end of polynomial text")
            break
        coeff = sign
        zdeg = wdeg = 0
        saw_factor = False
        while i < len(tokens):
            kind, value = tokens[i]
            if kind == "number":
                coeff *= float(value)
                i += 1
                saw_factor = True
            elif kind == "var":
                exponent = 1
                i += 1
                if i < len(tokens) and tokens[i][0] == "pow":
                    i += 1
                    if i >= len(tokens) or tokens[i][0] != "number":
                        raise InputError("exponent must follow '^'")
                    exponent = int(float(tokens[i][1]))
                    if exponent < 0:
                        raise InputError("negative exponents are not allowed")
                    i += 1
                if value == "z":
                    zdeg += exponent
                else:
                    wdeg += exponent
                saw_factor = True
            elif kind == "mul":
                i += 1
            else:
                break
        if not saw_factor:
            raise InputError("empty term in polynomial text")
        grid[(zdeg, wdeg)] = grid.get((zdeg, wdeg), 0j) + coeff
        first_term = False

    if not grid:
        raise InputError("empty polynomial text")
    max_w = max(w for _, w in grid)
    coeffs = []
    for w in range(max_w + 1):
        zdegs = [z for (z, ww) in grid if ww == w]
        if not zdegs:
            coeffs.append(UnivariatePolynomial(()))
            continue
        arr = [0j] * (max(zdegs) + 1)
        for (z, ww), c in grid.items():
            if ww == w:
                arr[z] = c
        coeffs.append(UnivariatePolynomial(tuple(arr)))
    return BivariatePolynomial(tuple(coeffs))


def bivariate_to_json(f: BivariatePolynomial) -> dict:
    """Serialize with coefficients listed by descending w-power."""
    desc = []
    for c in reversed(f.w_coefficients):
        desc.append([[v.real, v.imag] for v in c.coefficients] or [[0.0, 0.0]])
    return {"n": f.w_degree, "coeffs_w_desc": desc}


def bivariate_from_json(data: dict) -> BivariatePolynomial:
    try:
        n = int(data["n"])
        desc = data["coeffs_w_desc"]
    except (KeyError, TypeError) as exc:
        raise InputError(
            f"polynomial JSON needs 'n' and 'coeffs_w_desc': {exc}"
        ) from exc
    if len(desc) != n + 1:
        raise InputError(
            f"expected {n + 1} coefficient lists for w-degree {n}, got {len(desc)}"
        )
    asc = []
    for entry in reversed(desc):
        asc.append(
            UnivariatePolynomial(tuple(complex(re, im) for re, im in entry))
        )
    return BivariatePolynomial(tuple(asc))
