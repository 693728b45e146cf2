"""Labels for irreducible components of the global nilpotent cone.

A component label has three parts:

* ``bundle`` — the rank > 0 content: a multiset of line-bundle /
  real-root-bundle labels, or for tubular weight sequences an ``HNTree`` of
  semistable leaves with strictly decreasing slopes;
* ``ordinary`` — a partition describing torsion supported at unnamed
  ordinary points;
* ``exceptional`` — one aperiodic multisegment per weighted point,
  describing serial torsion there.

Multisegments are stored sparsely as multiplicities over segments ``[j; l)``
(head ``j``, length ``l``); the segment's composition factors are
``S_j, S_{j-1}, ..., S_{j-l+1}`` with indices mod ``p_i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Union

from . import catalog as cat, ktheory as kt
from .starlattice import WeightData


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

def partitions(n: int, max_part: int | None = None):
    """Weakly decreasing tuples summing to n."""
    if n < 0:
        return
    if n == 0:
        yield ()
        return
    cap = n if max_part is None else min(n, max_part)
    for first in range(cap, 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def conjugate(nu: tuple[int, ...]) -> tuple[int, ...]:
    if not nu:
        return ()
    return tuple(
        sum(1 for part in nu if part >= i) for i in range(1, nu[0] + 1)
    )


def mu_prefixes(nu: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Prefixes (mu_1), (mu_1, mu_2), ... of the conjugate partition."""
    mu = conjugate(nu)
    return [mu[:i] for i in range(1, len(mu) + 1)]


# ---------------------------------------------------------------------------
# multisegments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Multisegment:
    """Multiset of segments at one weighted point.

    ``pairs`` maps are stored as a sorted tuple of ((j, l), multiplicity)
    with j already reduced mod the weight and all multiplicities positive.
    """

    i: int
    pairs: tuple[tuple[tuple[int, int], int], ...]

    def multiplicity(self, j: int, l: int) -> int:
        for (jj, ll), a in self.pairs:
            if (jj, ll) == (j, l):
                return a
        return 0

    def total_length(self) -> int:
        return sum(l * a for (_, l), a in self.pairs)

    def segments(self) -> list[tuple[int, int]]:
        """Segment list with multiplicity, e.g. [(j, l), (j, l), ...]."""
        out = []
        for (j, l), a in self.pairs:
            out.extend([(j, l)] * a)
        return out

    def is_empty(self) -> bool:
        return not self.pairs


def multisegment(
    curve: WeightData, i: int, segs: Iterable[tuple[int, int]]
) -> Multisegment:
    """Build a multisegment from a list of (head, length) with repetition."""
    p = curve.weights[i]
    if p == 1:
        raise ValueError("multisegments live at weighted points")
    counts: dict[tuple[int, int], int] = {}
    for j, l in segs:
        if l < 1:
            raise ValueError("segment length must be positive")
        key = (j % p, l)
        counts[key] = counts.get(key, 0) + 1
    return Multisegment(i, tuple(sorted(counts.items())))


def segment_coverage(p: int, j: int, l: int) -> tuple[int, ...]:
    """How many composition factors of [j; l) sit at each vertex of Z/p."""
    cov = [l // p] * p
    for k in range(l % p):
        cov[(j - k) % p] += 1
    return tuple(cov)


def dim_vector(curve: WeightData, m: Multisegment) -> tuple[int, ...]:
    p = curve.weights[m.i]
    total = [0] * p
    for (j, l), a in m.pairs:
        cov = segment_coverage(p, j, l)
        for v in range(p):
            total[v] += a * cov[v]
    return tuple(total)


def is_aperiodic_for(curve: WeightData, m: Multisegment) -> bool:
    """Every length with segments present misses at least one head in Z/p."""
    p = curve.weights[m.i]
    by_length: dict[int, int] = {}
    for (j, l), _ in m.pairs:
        by_length[l] = by_length.get(l, 0) + 1
    return all(count < p for count in by_length.values())


def multisegment_class(curve: WeightData, m: Multisegment) -> kt.KClass:
    acc = kt.zero_class(curve)
    for (j, l), a in m.pairs:
        acc = kt.add(
            acc, kt.scale(a, cat.class_of(curve, cat.ExcTorsion(m.i, j, l)))
        )
    return acc


def aperiodic_multisegments(
    curve: WeightData, i: int, dims: tuple[int, ...]
) -> list[Multisegment]:
    """All aperiodic multisegments at point ``i`` with the given dim vector."""
    p = curve.weights[i]
    if len(dims) != p:
        raise ValueError("dimension vector length must equal the weight")
    total = sum(dims)
    if total == 0:
        return [Multisegment(i, ())]
    seg_list = [
        (j, l) for l in range(1, total + 1) for j in range(p)
    ]
    coverages = {seg: segment_coverage(p, *seg) for seg in seg_list}
    out: list[Multisegment] = []

    def dfs(idx: int, remaining: list[int], chosen: list[tuple[tuple[int, int], int]]):
        if all(v == 0 for v in remaining):
            m = Multisegment(i, tuple(sorted(chosen)))
            if is_aperiodic_for(curve, m):
                out.append(m)
            return
        if idx == len(seg_list):
            return
        seg = seg_list[idx]
        cov = coverages[seg]
        max_mult = min(
            (remaining[v] // cov[v] for v in range(p) if cov[v] > 0),
            default=0,
        )
        for mult in range(max_mult, -1, -1):
            if mult:
                nxt = [remaining[v] - mult * cov[v] for v in range(p)]
                dfs(idx + 1, nxt, chosen + [(seg, mult)])
            else:
                dfs(idx + 1, remaining, chosen)

    dfs(0, list(dims), [])
    return sorted(out, key=lambda m: m.pairs)


# ---------------------------------------------------------------------------
# component labels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HNLeaf:
    """A semistable leaf of a tubular label.

    ``reduction`` is None for rank > 0 leaves: no line-bundle twist reaches
    slope infinity, so the leaf stays symbolic ("unreduced").
    """

    cls: kt.KClass
    reduction: None = None


@dataclass(frozen=True)
class HNTree:
    leaves: tuple[HNLeaf, ...]


BundlePart = Union[tuple, HNTree]


@dataclass(frozen=True)
class ComponentLabel:
    bundle: BundlePart
    ordinary: tuple[int, ...]
    exceptional: tuple[Multisegment, ...]


EMPTY = ComponentLabel((), (), ())


def component_label(
    curve: WeightData,
    bundle: Iterable | HNTree = (),
    ordinary: Iterable[int] = (),
    exceptional: Iterable[Multisegment] = (),
) -> ComponentLabel:
    """Canonicalize: sort the bundle multiset, the partition, the points."""
    if isinstance(bundle, HNTree):
        bpart: BundlePart = bundle
    else:
        bpart = tuple(
            sorted(bundle, key=lambda lab: repr(lab))
        )
        for lab in bpart:
            if not isinstance(lab, (cat.LineBundle, cat.RealBundle)):
                raise ValueError("bundle part takes rank > 0 labels only")
    nu = tuple(sorted((int(v) for v in ordinary), reverse=True))
    if any(v < 1 for v in nu):
        raise ValueError("partition parts must be positive")
    excs = [m for m in exceptional if not m.is_empty()]
    seen = set()
    for m in excs:
        if m.i in seen:
            raise ValueError("at most one multisegment per point")
        seen.add(m.i)
        if curve.weights[m.i] == 1:
            raise ValueError("multisegments live at weighted points")
        if not is_aperiodic_for(curve, m):
            raise ValueError("multisegment is not aperiodic")
    return ComponentLabel(bpart, nu, tuple(sorted(excs, key=lambda m: m.i)))


def weight(curve: WeightData, z: ComponentLabel) -> kt.KClass:
    acc = kt.zero_class(curve)
    if isinstance(z.bundle, HNTree):
        for leaf in z.bundle.leaves:
            acc = kt.add(acc, leaf.cls)
    else:
        for lab in z.bundle:
            acc = kt.add(acc, cat.class_of(curve, lab))
    acc = kt.add(acc, kt.scale(sum(z.ordinary), kt.delta_class(curve)))
    for m in z.exceptional:
        acc = kt.add(acc, multisegment_class(curve, m))
    return acc


def expected_dim(curve: WeightData, z: ComponentLabel) -> int:
    a = weight(curve, z)
    return -kt.euler_form(curve, a, a)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def label_to_json(curve: WeightData, z: ComponentLabel) -> dict:
    if isinstance(z.bundle, HNTree):
        bundle = [
            {"kind": "hn_leaf", "class": leaf.cls.to_json(), "reduced": False}
            for leaf in z.bundle.leaves
        ]
    else:
        bundle = [cat.label_to_json(lab) for lab in z.bundle]
    return {
        "bundle": bundle,
        "ordinary": list(z.ordinary),
        "exceptional": [
            {
                "i": m.i + 1,
                "segs": [[j, l, a] for (j, l), a in m.pairs],
            }
            for m in z.exceptional
        ],
    }


def label_from_json(data: dict, curve: WeightData) -> ComponentLabel:
    raw_bundle = data.get("bundle", [])
    if raw_bundle and raw_bundle[0].get("kind") == "hn_leaf":
        bundle: BundlePart = HNTree(
            tuple(
                HNLeaf(kt.KClass.from_json(item["class"], curve))
                for item in raw_bundle
            )
        )
    else:
        bundle = tuple(cat.label_from_json(item, curve) for item in raw_bundle)
    excs = []
    for item in data.get("exceptional", []):
        i = int(item["i"]) - 1
        segs = []
        for j, l, a in item["segs"]:
            segs.extend([(int(j), int(l))] * int(a))
        excs.append(multisegment(curve, i, segs))
    if isinstance(bundle, HNTree):
        return ComponentLabel(
            bundle,
            tuple(sorted((int(v) for v in data.get("ordinary", [])), reverse=True)),
            tuple(sorted(excs, key=lambda m: m.i)),
        )
    return component_label(
        curve, bundle, data.get("ordinary", []), excs
    )


def format_label(curve: WeightData, z: ComponentLabel) -> str:
    parts = []
    if isinstance(z.bundle, HNTree):
        leaves = ", ".join(
            f"unreduced{tuple(kt.to_vector(leaf.cls))}" for leaf in z.bundle.leaves
        )
        parts.append(f"hn[{leaves}]")
    elif z.bundle:
        parts.append(
            " + ".join(cat.format_label(curve, lab) for lab in z.bundle)
        )
    if z.ordinary:
        parts.append("nu=" + str(tuple(z.ordinary)))
    for m in z.exceptional:
        segs = " + ".join(
            (f"{a}*" if a > 1 else "") + f"[{j};{l})" for (j, l), a in m.pairs
        )
        parts.append(f"pt{m.i + 1}: {segs}")
    return "(" + ", ".join(parts) + ")" if parts else "(empty)"


# ---------------------------------------------------------------------------
# enumeration: torsion classes
# ---------------------------------------------------------------------------

def enumerate_torsion_components(
    curve: WeightData, a: kt.KClass
) -> list[ComponentLabel]:
    """All component labels of a positive rank-0 class.

    Splits ``a`` point by point: each weighted point absorbs ``t_i`` copies
    of delta into its local dimension vector (``t_i`` at the dependent head,
    ``m_{i,j} + t_i`` elsewhere), the rest of the delta-multiplicity becomes
    an ordinary partition; every choice is crossed with all aperiodic
    multisegments of the local dimension vectors.
    """
    if a.r != 0:
        raise ValueError("torsion enumeration needs a rank-0 class")
    if not kt.is_positive(curve, a):
        raise ValueError("class is not positive")
    weighted = [i for i, p in enumerate(curve.weights) if p > 1]
    t_mins = {
        i: max(0, max((-v for v in a.m[i]), default=0)) for i in weighted
    }
    out = []
    ranges = [range(t_mins[i], a.d - sum(t_mins.values()) + t_mins[i] + 1)
              for i in weighted]
    for t_combo in itertools.product(*ranges) if weighted else [()]:
        t_total = sum(t_combo)
        if t_total > a.d:
            continue
        ell = a.d - t_total
        per_point = []
        for idx, i in enumerate(weighted):
            t_i = t_combo[idx]
            p = curve.weights[i]
            dims = tuple(
                [t_i] + [a.m[i][j - 1] + t_i for j in range(1, p)]
            )
            per_point.append(aperiodic_multisegments(curve, i, dims))
        for nu in partitions(ell):
            for msegs in itertools.product(*per_point):
                out.append(
                    component_label(
                        curve, (), nu, [m for m in msegs if not m.is_empty()]
                    )
                )
    return sorted(
        out,
        key=lambda z: (z.ordinary, tuple((m.i, m.pairs) for m in z.exceptional)),
    )


# ---------------------------------------------------------------------------
# enumeration: genus < 1
# ---------------------------------------------------------------------------

def _line_bundle_candidates(curve, min_degree, deg_cap):
    """Line bundles O(x) with l >= min_degree and degree <= deg_cap."""
    out = []
    residue_ranges = [range(p) for p in curve.weights]
    for combo in itertools.product(*residue_ranges):
        base = curve.normalize(list(combo))
        res_deg = curve.degree_partial(base)
        l = min_degree
        while l * curve.p + res_deg <= deg_cap:
            out.append(curve.normalize(list(combo), l=l))
            l += 1
    return out


def enumerate_components_finite(
    curve: WeightData,
    a: kt.KClass,
    min_degree: int = 0,
    real_bundle_box: int | None = None,
) -> list[ComponentLabel]:
    """Component labels for genus < 1: bundle decompositions x torsion labels.

    The bundle part ranges over multisets of line bundles whose c-degree is
    at least ``min_degree`` (the family is infinite without a floor).  For
    weight sequences with at least three weighted points, rank >= 2 summands
    can be genuinely indecomposable; pass ``real_bundle_box`` to include
    real-root bundles from a bounded coordinate search, otherwise such inputs
    are refused rather than silently undercounted.
    """
    if curve.genus() >= 1:
        raise ValueError("wrong regime: genus must be < 1")
    if not kt.is_positive(curve, a):
        raise ValueError("class is not positive")
    n_weighted = sum(1 for p in curve.weights if p > 1)
    summands: list[tuple[object, kt.KClass]] = []
    if a.r >= 2 and n_weighted >= 3:
        if real_bundle_box is None:
            raise ValueError(
                "unsupported family: rank >= 2 decompositions on a star with "
                ">= 3 weighted points need real_bundle_box for root search"
            )
        for rb in cat.enumerate_real_bundles(curve, real_bundle_box):
            if rb.a.r >= 2:
                summands.append((rb, rb.a))
    deg_cap = kt.degree_d(curve, a) - (a.r - 1) * curve.p * min_degree
    for x in _line_bundle_candidates(curve, min_degree, deg_cap):
        lab = cat.LineBundle(x)
        summands.append((lab, cat.class_of(curve, lab)))
    summands.sort(key=lambda pair: repr(pair[0]))
    results = []

    def dfs(start: int, remaining: kt.KClass, chosen: list):
        if remaining.r == 0:
            if kt.is_positive(curve, remaining):
                for torsion in enumerate_torsion_components(curve, remaining):
                    results.append(
                        component_label(
                            curve, chosen, torsion.ordinary, torsion.exceptional
                        )
                    )
            return
        for k in range(start, len(summands)):
            lab, cls = summands[k]
            if cls.r > remaining.r:
                continue
            # all later bundle summands cost at least p*min_degree each
            if kt.degree_d(curve, cls) > kt.degree_d(
                curve, remaining
            ) - (remaining.r - cls.r) * curve.p * min_degree:
                continue
            dfs(k, kt.sub(remaining, cls), chosen + [lab])

    dfs(0, a, [])
    uniq = sorted(set(results), key=lambda z: repr(z))
    return uniq


# ---------------------------------------------------------------------------
# enumeration: tubular (genus = 1)
# ---------------------------------------------------------------------------

def enumerate_components_tubular(
    curve: WeightData,
    a: kt.KClass,
    slope_window: tuple | None = None,
    max_parts: int = 4,
) -> list[ComponentLabel]:
    """Labels built on Harder-Narasimhan types for genus-1 weight sequences.

    The optional leading slope-infinity part expands into its torsion labels;
    each rank > 0 semistable part stays a symbolic unreduced leaf (no
    line-bundle twist reaches slope infinity).
    """
    if curve.genus() != 1:
        raise ValueError("wrong regime: genus must be 1")
    if a.r == 0:
        return enumerate_torsion_components(curve, a)
    out = []
    for parts in kt.hn_types(curve, a, slope_window, max_parts):
        head = parts[0]
        if head.r == 0:
            torsion_labels = enumerate_torsion_components(curve, head)
            leaves = HNTree(tuple(HNLeaf(c) for c in parts[1:]))
        else:
            torsion_labels = [EMPTY]
            leaves = HNTree(tuple(HNLeaf(c) for c in parts))
        for t in torsion_labels:
            out.append(
                ComponentLabel(leaves, t.ordinary, t.exceptional)
            )
    return sorted(out, key=lambda z: repr(z))
