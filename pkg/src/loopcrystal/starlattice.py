"""Rank-one degree lattice of a weighted projective line.

A weighted projective line is specified by ``n >= 3`` integer weights
``p_1, ..., p_n`` (weight-1 entries are allowed and act as unweighted marked
points) together with pairwise distinct parameter labels for the marked
points; the first three are always ``0``, ``inf``, ``1``.

The degree lattice ``L`` is generated by classes ``x_1, ..., x_n`` subject to
``p_i x_i = p_j x_j``; the common value is the hyperplane class ``c``.  Every
element has a unique normal form ``l*c + sum l_i x_i`` with ``0 <= l_i < p_i``,
represented here by :class:`LElement`.  The dualizing class is
``omega = (n-2)c - sum_i x_i``.

Sections of the line bundle attached to ``x`` are monomials in the projective
coordinate algebra; their count is available both through the closed form
(:meth:`WeightData.dim_sections`) and through direct monomial enumeration
(:meth:`WeightData.monomial_count_oracle`), which exists so the closed form can
be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class LElement:
    """Normal form ``l*c + sum_i residues[i] * x_i`` with ``0 <= residues[i] < p_i``."""

    l: int
    residues: tuple[int, ...]

    def to_json(self) -> dict:
        return {"l": self.l, "residues": list(self.residues)}

    @staticmethod
    def from_json(data: dict) -> "LElement":
        return LElement(int(data["l"]), tuple(int(r) for r in data["residues"]))


class WeightData:
    """Weight sequence, marked-point labels, and lattice arithmetic.

    Parameters
    ----------
    weights : sequence of positive ints
        Padded on the right with 1s if fewer than three are given.
    labels : optional sequence of str
        Marked-point parameters.  The first three are forced to
        ``("0", "inf", "1")``; the rest default to ``lam4, lam5, ...``.
    """

    def __init__(self, weights: Sequence[int], labels: Sequence[str] | None = None):
        ws = [int(w) for w in weights]
        if not ws:
            raise ValueError("at least one weight is required")
        if any(w < 1 for w in ws):
            raise ValueError("weights must be positive integers")
        while len(ws) < 3:
            ws.append(1)
        self.weights: tuple[int, ...] = tuple(ws)
        self.n = len(ws)
        self.p = math.lcm(*ws)
        fixed = ("0", "inf", "1")
        if labels is None:
            extra = tuple(f"lam{i + 1}" for i in range(3, self.n))
        else:
            labels = tuple(str(s) for s in labels)
            if len(labels) == self.n:
                if tuple(labels[:3]) != fixed:
                    raise ValueError("the first three point labels must be 0, inf, 1")
                extra = labels[3:]
            elif len(labels) == self.n - 3:
                extra = labels
            else:
                raise ValueError(
                    "labels must cover all points or exactly the points past the third"
                )
        self.labels: tuple[str, ...] = fixed[: min(3, self.n)] + extra
        if len(set(self.labels)) != self.n:
            raise ValueError("point labels must be pairwise distinct")

    # -- basic elements -----------------------------------------------------

    def zero(self) -> LElement:
        return LElement(0, (0,) * self.n)

    def c(self) -> LElement:
        """The hyperplane class ``c = p_i x_i``."""
        return LElement(1, (0,) * self.n)

    def x(self, i: int) -> LElement:
        """The generator ``x_i`` (0-based point index)."""
        coeffs = [0] * self.n
        coeffs[i] = 1
        return self.normalize(coeffs)

    def omega(self) -> LElement:
        """The dualizing class ``(n-2)c - sum_i x_i``."""
        return self.normalize([-1] * self.n, l=self.n - 2)

    # -- arithmetic ---------------------------------------------------------

    def normalize(self, coeffs: Sequence[int], l: int = 0) -> LElement:
        """Normal form of ``l*c + sum_i coeffs[i] * x_i``."""
        if len(coeffs) != self.n:
            raise ValueError(f"expected {self.n} coefficients, got {len(coeffs)}")
        residues = []
        carry = l
        for a, p_i in zip(coeffs, self.weights):
            carry += a // p_i
            residues.append(a % p_i)
        return LElement(carry, tuple(residues))

    def add(self, a: LElement, b: LElement) -> LElement:
        return self.normalize(
            [x + y for x, y in zip(a.residues, b.residues)], l=a.l + b.l
        )

    def neg(self, a: LElement) -> LElement:
        return self.normalize([-r for r in a.residues], l=-a.l)

    def sub(self, a: LElement, b: LElement) -> LElement:
        return self.add(a, self.neg(b))

    def scale(self, k: int, a: LElement) -> LElement:
        return self.normalize([k * r for r in a.residues], l=k * a.l)

    # -- numerical invariants ----------------------------------------------

    def degree_partial(self, a: LElement) -> int:
        """The degree form with ``degree_partial(x_i) = p / p_i`` and value p on c."""
        return a.l * self.p + sum(
            r * (self.p // p_i) for r, p_i in zip(a.residues, self.weights)
        )

    def genus(self) -> Fraction:
        """Virtual genus ``1 + ((n-2)p - sum_i p/p_i) / 2``."""
        s = sum(self.p // p_i for p_i in self.weights)
        return 1 + Fraction((self.n - 2) * self.p - s, 2)

    def is_effective(self, a: LElement) -> bool:
        """Whether ``a`` is a sum of nonnegative multiples of the ``x_i``.

        Writing ``a = l*c + sum l_i x_i`` in normal form, effectivity is
        equivalent to ``l >= 0``: the residues are already nonnegative, and the
        ``c``-part can be distributed as ``p_i``-fold multiples of any ``x_i``,
        while any representation with some negative coefficient borrows at
        least one ``c`` from the rest.
        """
        return a.l >= 0

    def dim_sections(self, a: LElement) -> int:
        """Dimension ``l + 1`` (normal form, if ``l >= 0``; else 0) of the section space."""
        return a.l + 1 if a.l >= 0 else 0

    def monomial_count_oracle(self, a: LElement) -> int:
        """Count monomials of degree ``a`` by direct enumeration.

        The coordinate algebra has the monomial basis
        ``X_1^{a_1} X_2^{a_2} prod_{i>=3} X_i^{a_i}`` with ``a_1, a_2 >= 0``
        free and ``0 <= a_i < p_i`` for ``i >= 3``.  Degrees of the remaining
        points force ``a_i = residues[i]`` for ``i >= 3``; this routine then
        scans ``a_1`` over its degree-bounded range and solves for ``a_2`` by
        lattice arithmetic.  No use is made of the closed dimension formula.
        """
        # Strip the forced exponents at the points past the second.
        rest = a
        for i in range(2, self.n):
            coeffs = [0] * self.n
            coeffs[i] = a.residues[i]
            rest = self.sub(rest, self.normalize(coeffs))
        if any(rest.residues[i] for i in range(2, self.n)):
            return 0
        deg = self.degree_partial(rest)
        if deg < 0:
            return 0
        d1 = self.p // self.weights[0]
        count = 0
        x1 = self.x(0)
        # a_1 * degree(x_1) cannot exceed the total degree.
        for a1 in range(deg // d1 + 1):
            y = self.sub(rest, self.scale(a1, x1))
            # y must equal a_2 * x_2 for some a_2 >= 0.
            if any(y.residues[i] for i in range(self.n) if i != 1):
                continue
            a2 = y.residues[1] + self.weights[1] * y.l
            if a2 >= 0:
                ys = self.scale(a2, self.x(1))
                if ys == y:
                    count += 1
        return count

    # -- misc ---------------------------------------------------------------

    def format_element(self, a: LElement) -> str:
        parts = []
        if a.l or not any(a.residues):
            parts.append(f"{a.l}c" if a.l != 1 else "c")
        for i, r in enumerate(a.residues):
            if r:
                parts.append(f"{r}x{i + 1}" if r != 1 else f"x{i + 1}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"WeightData(weights={self.weights}, labels={self.labels})"

    def __eq__(self, other):
        return (
            isinstance(other, WeightData)
            and self.weights == other.weights
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.weights, self.labels))
