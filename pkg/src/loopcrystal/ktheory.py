"""Numerical Grothendieck lattice of a weighted projective line.

Classes are written in the standard basis

    [O],  delta,  alpha_{i,j}  (weighted points i, 1 <= j <= p_i - 1),

where ``delta`` is the class of an ordinary point sheaf and ``alpha_{i,j}``
the class of the exceptional simple ``S_{i,j}``.  The class of the zeroth
simple is dependent: ``[S_{i,0}] = delta - sum_j alpha_{i,j}``.

The Euler form is assembled once per weight sequence from the line-bundle
spanning set ``{[O(x)] : 0 <= x <= c}`` via

    <[O(x)], [O(y)]> = dim S_{y-x} - dim S_{x + omega - y},

then transported to the standard basis by an exact rational base change; the
resulting Gram matrix is checked to be integral.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import _linalg
from .starlattice import LElement, WeightData

INFINITE_SLOPE = math.inf


@dataclass(frozen=True)
class KClass:
    """A class ``r*[O] + d*delta + sum m[i][j-1]*alpha_{i,j}``.

    ``m`` has one tuple per marked point; weight-1 points carry empty tuples.
    """

    r: int
    d: int
    m: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        entries = {}
        for i, row in enumerate(self.m):
            for j, v in enumerate(row, start=1):
                if v:
                    entries[f"{i + 1},{j}"] = v
        return {"r": self.r, "d": self.d, "m": entries}

    @staticmethod
    def from_json(data: dict, curve: WeightData) -> "KClass":
        m = [[0] * (p - 1) for p in curve.weights]
        for key, v in data.get("m", {}).items():
            i_s, j_s = key.split(",")
            i, j = int(i_s) - 1, int(j_s)
            if not (0 <= i < curve.n) or not (1 <= j <= curve.weights[i] - 1):
                raise ValueError(f"invalid simple index {key}")
            m[i][j - 1] = int(v)
        return KClass(int(data["r"]), int(data["d"]), tuple(tuple(row) for row in m))


def zero_class(curve: WeightData) -> KClass:
    return KClass(0, 0, tuple((0,) * (p - 1) for p in curve.weights))


def structure_class(curve: WeightData) -> KClass:
    return KClass(1, 0, tuple((0,) * (p - 1) for p in curve.weights))


def delta_class(curve: WeightData) -> KClass:
    return KClass(0, 1, tuple((0,) * (p - 1) for p in curve.weights))


def lattice_rank(curve: WeightData) -> int:
    return 2 + sum(p - 1 for p in curve.weights)


def add(a: KClass, b: KClass) -> KClass:
    return KClass(
        a.r + b.r,
        a.d + b.d,
        tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a.m, b.m)),
    )


def sub(a: KClass, b: KClass) -> KClass:
    return add(a, scale(-1, b))


def scale(k: int, a: KClass) -> KClass:
    return KClass(k * a.r, k * a.d, tuple(tuple(k * x for x in row) for row in a.m))


def to_vector(a: KClass) -> list[int]:
    v = [a.r, a.d]
    for row in a.m:
        v.extend(row)
    return v


def from_vector(curve: WeightData, v: Sequence[int]) -> KClass:
    if len(v) != lattice_rank(curve):
        raise ValueError("coordinate vector has the wrong length")
    m = []
    pos = 2
    for p in curve.weights:
        m.append(tuple(v[pos : pos + p - 1]))
        pos += p - 1
    return KClass(int(v[0]), int(v[1]), tuple(m))


# ---------------------------------------------------------------------------
# classes of standard sheaves
# ---------------------------------------------------------------------------

def class_of_simple(curve: WeightData, i: int, j: int) -> KClass:
    """Class of the exceptional simple ``S_{i,j}`` (j taken mod p_i)."""
    p = curve.weights[i]
    if p == 1:
        raise ValueError("point has weight 1; its simple is the ordinary delta")
    j %= p
    m = [[0] * (q - 1) for q in curve.weights]
    if j == 0:
        d = 1
        for jj in range(p - 1):
            m[i][jj] = -1
    else:
        d = 0
        m[i][j - 1] = 1
    return KClass(0, d, tuple(tuple(row) for row in m))


def class_of_serial(curve: WeightData, i: int, j: int, length: int) -> KClass:
    """Class of the serial torsion sheaf with head ``S_{i,j}`` and given length."""
    if length < 1:
        raise ValueError("length must be positive")
    acc = zero_class(curve)
    for k in range(length):
        acc = add(acc, class_of_simple(curve, i, j - k))
    return acc


def class_of_line_bundle(curve: WeightData, x: LElement) -> KClass:
    """Class of ``O(x)``: rank 1, degree ``l``, and a 1 in each slot ``j <= l_i``."""
    m = []
    for i, p in enumerate(curve.weights):
        row = [0] * (p - 1)
        for j in range(1, x.residues[i] + 1):
            row[j - 1] = 1
        m.append(tuple(row))
    return KClass(1, x.l, tuple(m))


def class_of_ordinary_torsion(curve: WeightData, length: int) -> KClass:
    return scale(length, delta_class(curve))


# ---------------------------------------------------------------------------
# Euler form
# ---------------------------------------------------------------------------

_euler_cache: dict[tuple[int, ...], list[list[int]]] = {}


def _spanning_elements(curve: WeightData) -> list[LElement]:
    """The line-bundle exponents ``0 <= x <= c``: 0, c, and l_i x_i."""
    out = [curve.zero(), curve.c()]
    for i, p in enumerate(curve.weights):
        for l_i in range(1, p):
            coeffs = [0] * curve.n
            coeffs[i] = l_i
            out.append(curve.normalize(coeffs))
    return out

def euler_matrix(curve: WeightData) -> list[list[int]]:
    """Gram matrix of the Euler form on the standard basis (cached)."""
    key = curve.weights
    cached = _euler_cache.get(key)
    if cached is not None:
        return cached
    span = _spanning_elements(curve)
    omega = curve.omega()
    dim = lattice_rank(curve)
    if len(span) != dim:
        raise AssertionError("spanning set size mismatch")
    gram_span = [
        [
            curve.dim_sections(curve.sub(y, x))
            - curve.dim_sections(curve.sub(curve.add(x, omega), y))
            for y in span
        ]
        for x in span
    ]
    # Base change: columns of T are the standard coordinates of [O(x)].
    t_cols = [to_vector(class_of_line_bundle(curve, x)) for x in span]
    t = [[t_cols[c][r] for c in range(dim)] for r in range(dim)]
    t_inv = _linalg.invert_frac(t)
    g = _linalg.mat_mul_frac(
        _linalg.mat_mul_frac(_linalg.transpose(t_inv), gram_span), t_inv
    )
    out = []
    for row in g:
        int_row = []
        for v in row:
            if v.denominator != 1:
                raise AssertionError("Euler form is not integral on the basis")
            int_row.append(int(v))
        out.append(int_row)
    _euler_cache[key] = out
    return out


def euler_form(curve: WeightData, a: KClass, b: KClass) -> int:
    """The Euler pairing ``<a, b> = sum hom - sum ext`` on classes."""
    g = euler_matrix(curve)
    va, vb = to_vector(a), to_vector(b)
    return sum(va[i] * g[i][j] * vb[j] for i in range(len(va)) for j in range(len(vb)))


def symmetric_form(curve: WeightData, a: KClass, b: KClass) -> int:
    return euler_form(curve, a, b) + euler_form(curve, b, a)


def is_real_root(curve: WeightData, a: KClass) -> bool:
    return euler_form(curve, a, a) == 1


# ---------------------------------------------------------------------------
# positivity, degree, slope
# ---------------------------------------------------------------------------

def is_positive(curve: WeightData, a: KClass) -> bool:
    """Whether ``a`` is the class of a sheaf (including the zero sheaf).

    Rank >= 1 classes are always positive (line bundles realize every degree
    and twist pattern); rank-0 classes need each point's serial content to be
    completable: with ``t_i = max(0, max_j(-m_{i,j}))`` the condition is
    ``d >= sum_i t_i``.  Negative rank is never positive.
    """
    if a.r < 0:
        return False
    if a.r > 0:
        return True
    t_total = 0
    for row in a.m:
        t_total += max(0, max((-v for v in row), default=0))
    return a.d >= t_total


def degree_d(curve: WeightData, a: KClass) -> int:
    """Linearized degree: p on delta, p/p_i on alpha_{i,j}, 0 on [O]."""
    val = a.d * curve.p
    for i, row in enumerate(a.m):
        val += sum(row) * (curve.p // curve.weights[i])
    return val


def slope(curve: WeightData, a: KClass):
    """Slope ``degree_d / r``; infinite for nonzero rank-0 classes."""
    if a == zero_class(curve):
        raise ValueError("zero class has no slope")
    if a.r == 0:
        return INFINITE_SLOPE
    return Fraction(degree_d(curve, a), a.r)


# ---------------------------------------------------------------------------
# twists
# ---------------------------------------------------------------------------

def twist_class(curve: WeightData, a: KClass, x: LElement) -> KClass:
    """Class of ``F(x)`` for ``[F] = a``.

    Twisting by ``x_i`` shifts the heads of the point-``i`` simples up by one
    (``alpha_{i,j} -> alpha_{i,j+1}``, wrapping through the dependent
    ``[S_{i,0}] = delta - sum alpha``), and each rank unit contributes the
    class of ``O(x_i)``; twisting by ``c`` adds ``r`` to the delta slot.
    """
    r, d = a.r, a.d
    m = [list(row) for row in a.m]
    for i, p in enumerate(curve.weights):
        for _ in range(x.residues[i] % p if p > 1 else 0):
            wrap = m[i][p - 2] if p > 1 else 0
            new_row = [0] * (p - 1)
            new_row[0] = r - wrap
            for j in range(1, p - 1):
                new_row[j] = m[i][j - 1] - wrap
            m[i] = new_row
            d += wrap
    d += r * x.l
    return KClass(r, d, tuple(tuple(row) for row in m))


# ---------------------------------------------------------------------------
# Harder-Narasimhan types (tubular weight sequences)
# ---------------------------------------------------------------------------

def hn_types(
    curve: WeightData,
    a: KClass,
    slope_window: tuple | None = None,
    max_parts: int = 4,
) -> list[tuple[KClass, ...]]:
    """Sequences of positive classes with strictly decreasing slopes summing to ``a``.

    A single optional leading rank-0 part (slope infinity) is always admitted;
    all further parts have rank >= 1 and slope inside ``slope_window =
    (lo, hi)``.  The lower bound must be finite (it also bounds the leading
    torsion part through degree conservation); ``hi`` may be ``math.inf``.
    The per-point torsion coordinates of rank >= 1 parts are constrained
    componentwise between ``min(0, m_a)`` and ``max(0, m_a)``.  Rank > 0 input
    without a window raises, since the unconstrained family is infinite.
    """
    if not is_positive(curve, a) or a == zero_class(curve):
        raise ValueError("input must be a nonzero positive class")
    if a.r == 0:
        return [(a,)]
    if slope_window is None:
        raise ValueError(
            "unbounded: rank > 0 classes admit infinitely many splittings; "
            "pass slope_window=(lo, hi) with finite lo"
        )
    lo, hi = slope_window
    if lo == -math.inf:
        raise ValueError("slope window needs a finite lower bound")
    lo = Fraction(lo)
    hi = hi if hi == math.inf else Fraction(hi)
    p = curve.p
    flat_idx = _flat_index(curve)
    mwin = [(min(0, v), max(0, v)) for row in a.m for v in row]
    results: set[tuple[KClass, ...]] = set()

    def pack(combo: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
        m, pos = [], 0
        for q in curve.weights:
            m.append(tuple(combo[pos : pos + q - 1]))
            pos += q - 1
        return tuple(m)

    def rank_part_candidates(rem: KClass, prev_slope) -> Iterable[KClass]:
        for r in range(1, rem.r + 1):
            for combo in itertools.product(
                *[range(lo_m, hi_m + 1) for lo_m, hi_m in mwin]
            ):
                frac = sum(
                    c * (p // curve.weights[i]) for c, (i, _) in zip(combo, flat_idx)
                )
                # slope bounds -> degree-coordinate bounds for this part; the
                # remainder's parts all have slope >= lo, which caps d above.
                deg_cap = degree_d(curve, rem) - lo * (rem.r - r)
                hi_deg = deg_cap if hi == math.inf else min(hi * r, deg_cap)
                if prev_slope != math.inf:
                    hi_deg = min(hi_deg, prev_slope * r)
                d_lo = math.ceil(Fraction(lo * r - frac, p))
                d_hi = math.floor(Fraction(hi_deg - frac, p))
                for d in range(d_lo, d_hi + 1):
                    cand = KClass(r, d, pack(combo))
                    sl = slope(curve, cand)
                    if lo <= sl and (hi == math.inf or sl <= hi) and sl < prev_slope:
                        yield cand

    def extend(rem: KClass, prev_slope, acc: tuple[KClass, ...]):
        if rem == zero_class(curve):
            results.add(acc)
            return
        if len(acc) >= max_parts or rem.r <= 0:
            return
        for cand in rank_part_candidates(rem, prev_slope):
            rest = sub(rem, cand)
            if rest.r < 0 or (rest != zero_class(curve) and rest.r == 0):
                continue
            extend(rest, slope(curve, cand), acc + (cand,))

    extend(a, math.inf, ())
    # optional leading rank-0 part, bounded by degree conservation
    deg_budget = degree_d(curve, a) - lo * a.r
    for combo in itertools.product(*[range(lo_m, hi_m + 1) for lo_m, hi_m in mwin]):
        frac = sum(c * (p // curve.weights[i]) for c, (i, _) in zip(combo, flat_idx))
        if Fraction(deg_budget - frac, p) < 0:
            continue
        for d in range(0, math.floor(Fraction(deg_budget - frac, p)) + 1):
            t = KClass(0, d, pack(combo))
            if t == zero_class(curve) or not is_positive(curve, t):
                continue
            rest = sub(a, t)
            if rest.r > 0:
                extend(rest, INFINITE_SLOPE, (t,))

    return sorted(results, key=lambda seq: (len(seq), [to_vector(c) for c in seq]))


def _flat_index(curve: WeightData) -> list[tuple[int, int]]:
    out = []
    for i, p in enumerate(curve.weights):
        for j in range(1, p):
            out.append((i, j))
    return out
