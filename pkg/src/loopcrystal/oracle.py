"""Randomized exact-linear-algebra models for generic Higgs pairs.

Two families of models:

* cyclic pairs — nilpotent representations of the cyclic quiver with a
  reverse arrow in the commutant, used to sample generic points of the
  torsion strata at a weighted point.  The quiver vertex ``k`` hosts the
  simple ``S_{-k}``: a segment ``[j; l)`` with composition factors
  ``S_j, ..., S_{j-l+1}`` occupies vertices ``-j, -j+1, ..., -j+l-1``
  (mod p), and the forward arrows ``phi`` move down the factor chain.

* homogeneous-form matrices on the projective line — a Higgs field on
  ``V = O(a_1) + ... + O(a_n)`` twisted by ``omega = -2c``, with entry
  ``(k, k')`` a binary form of degree ``a_k - a_{k'} - 2``.

All arithmetic is exact: a large prime field by default (``prime=None``
switches to rationals for audit runs).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from . import _linalg, ktheory as kt
from .components import Multisegment
from .starlattice import WeightData

DEFAULT_PRIME = _linalg.DEFAULT_PRIME
DEFAULT_TRIALS = 8


# ---------------------------------------------------------------------------
# field-generic helpers
# ---------------------------------------------------------------------------

def _rank(rows, prime):
    if not rows or not rows[0]:
        return 0
    if prime is None:
        return _linalg.rank_frac(rows)
    return _linalg.rank_mod(rows, prime)


def _nullspace(rows, ncols, prime):
    if ncols == 0:
        return []
    if not rows:
        basis = []
        for i in range(ncols):
            v = [0] * ncols
            v[i] = 1
            basis.append(v)
        return basis
    if prime is None:
        return _linalg.nullspace_frac(rows)
    return _linalg.nullspace_mod(rows, prime)


def _matmul(a, b, prime):
    if prime is None:
        return _linalg.mat_mul_frac(a, b)
    return _linalg.mat_mul_mod(a, b, prime)


def _rand_scalar(rng, prime):
    if prime is None:
        return Fraction(rng.randint(-99, 99))
    return rng.randrange(1, prime)


# ---------------------------------------------------------------------------
# cyclic pairs
# ---------------------------------------------------------------------------

@dataclass
class CyclicPair:
    """Arrow data of a cyclic-quiver pair.

    ``phi[k]`` maps vertex ``k`` to ``k+1`` (shape dims[k+1] x dims[k]);
    ``phibar[k]`` maps vertex ``k`` to ``k-1`` (shape dims[k-1] x dims[k]).
    ``point`` records which weighted point the model belongs to, so that
    recovered multisegments carry the right point index.
    """

    p: int
    dims: tuple[int, ...]
    phi: list
    phibar: list
    prime: int | None = DEFAULT_PRIME
    point: int = 0

    def total_dim(self) -> int:
        return sum(self.dims)


def _zero_matrix(rows, cols):
    return [[0] * cols for _ in range(rows)]


def _vertex_of_factor(p: int, j: int, t: int) -> int:
    """Vertex of the t-th composition factor S_{j-t} of a segment [j; l)."""
    return (t - j) % p


def build_rep(curve: WeightData, m: Multisegment, prime=DEFAULT_PRIME) -> CyclicPair:
    """Direct sum of segment shift representations; reverse arrows zero."""
    p = curve.weights[m.i]
    dims = [0] * p
    # slot assignment: (segment copy, t) -> index within its vertex
    slots = []
    for j, l in m.segments():
        seg_slots = []
        for t in range(l):
            v = _vertex_of_factor(p, j, t)
            seg_slots.append((v, dims[v]))
            dims[v] += 1
        slots.append(seg_slots)
    phi = [_zero_matrix(dims[(k + 1) % p], dims[k]) for k in range(p)]
    for seg_slots in slots:
        for t in range(len(seg_slots) - 1):
            v, idx = seg_slots[t]
            v2, idx2 = seg_slots[t + 1]
            phi[v][idx2][idx] = 1
    phibar = [_zero_matrix(dims[(k - 1) % p], dims[k]) for k in range(p)]
    return CyclicPair(p, tuple(dims), phi, phibar, prime, m.i)


def commutant_fiber(pair: CyclicPair) -> list:
    """Basis of the linear space of reverse arrows commuting with phi.

    Returns a list of phibar-tuples (one matrix per vertex each).
    """
    p, dims = pair.p, pair.dims
    offsets = []
    total = 0
    for k in range(p):
        offsets.append(total)
        total += dims[(k - 1) % p] * dims[k]
    if total == 0:
        return []

    def unknown(k, r, c):
        # entry [r][c] of phibar[k], r < dims[k-1], c < dims[k]
        return offsets[k] + r * dims[k] + c

    rows = []
    for k in range(p):
        kp, km = (k + 1) % p, (k - 1) % p
        for r in range(dims[k]):
            for c in range(dims[k]):
                row = [0] * total
                for s in range(dims[kp]):
                    row[unknown(kp, r, s)] += pair.phi[k][s][c]
                for s in range(dims[km]):
                    row[unknown(k, s, c)] -= pair.phi[km][r][s]
                if any(row):
                    rows.append(row)
    basis_vecs = _nullspace(rows, total, pair.prime)
    out = []
    for vec in basis_vecs:
        phibar = []
        for k in range(p):
            mat = _zero_matrix(dims[(k - 1) % p], dims[k])
            for r in range(dims[(k - 1) % p]):
                for c in range(dims[k]):
                    mat[r][c] = vec[unknown(k, r, c)]
            phibar.append(mat)
        out.append(phibar)
    return out


def _total_matrix(pair: CyclicPair):
    p, dims = pair.p, pair.dims
    n = pair.total_dim()
    offs = []
    acc = 0
    for k in range(p):
        offs.append(acc)
        acc += dims[k]
    x = _zero_matrix(n, n)
    for k in range(p):
        kp, km = (k + 1) % p, (k - 1) % p
        for r in range(dims[kp]):
            for c in range(dims[k]):
                x[offs[kp] + r][offs[k] + c] += pair.phi[k][r][c]
        for r in range(dims[km]):
            for c in range(dims[k]):
                x[offs[km] + r][offs[k] + c] += pair.phibar[k][r][c]
    return x


def is_nilpotent(pair: CyclicPair) -> bool:
    """Whether the combined forward+reverse operator is nilpotent.

    Forward arrows are nilpotent and commute with the reverse ones, so the
    sum is nilpotent exactly when the pair generates a nilpotent algebra.
    """
    n = pair.total_dim()
    if n == 0:
        return True
    x = _total_matrix(pair)
    if pair.prime is None:
        x = [[Fraction(v) for v in row] for row in x]
    power = 1
    while power < n:
        x = _matmul(x, x, pair.prime)
        power *= 2
    return all(all(v == 0 for v in row) for row in x)


def sample_generic(
    curve: WeightData,
    m: Multisegment,
    seed=0,
    prime=DEFAULT_PRIME,
    retries: int = 6,
) -> CyclicPair:
    """phi from the segment model, phibar random in the commutant fiber.

    The sampled pair must be nilpotent; non-aperiodic inputs make the
    generic fiber element invertible around the cycle, which is reported
    after bounded retries.
    """
    pair = build_rep(curve, m, prime)
    fiber = commutant_fiber(pair)
    rng = random.Random(f"cyclic:{seed}")
    for _ in range(retries):
        phibar = [
            _zero_matrix(pair.dims[(k - 1) % pair.p], pair.dims[k])
            for k in range(pair.p)
        ]
        for basis_phibar in fiber:
            coeff = _rand_scalar(rng, prime)
            for k in range(pair.p):
                mat = basis_phibar[k]
                tgt = phibar[k]
                for r in range(len(mat)):
                    for c in range(len(mat[r])):
                        v = tgt[r][c] + coeff * mat[r][c]
                        tgt[r][c] = v % prime if prime is not None else v
        cand = CyclicPair(pair.p, pair.dims, pair.phi, phibar, prime, pair.point)
        if is_nilpotent(cand):
            return cand
    raise ValueError(
        "nilpotency repeatedly violated: input is likely not aperiodic"
    )


def _count_congruent(lo, hi, residue, mod):
    if hi < lo:
        return 0
    first = lo + (residue - lo) % mod
    return 0 if first > hi else (hi - first) // mod + 1


def _all_vertex_multisegments(p: int, dims: tuple[int, ...]):
    """All multisets of ascending vertex runs [v0; l) with coverage == dims."""
    total = sum(dims)
    if total == 0:
        yield ()
        return
    runs = [(v0, l) for l in range(1, total + 1) for v0 in range(p)]

    def coverage(v0, l):
        cov = [l // p] * p
        for t in range(l % p):
            cov[(v0 + t) % p] += 1
        return cov

    covs = {run: coverage(*run) for run in runs}

    def dfs(idx, remaining, chosen):
        if all(v == 0 for v in remaining):
            yield tuple(chosen)
            return
        if idx == len(runs):
            return
        run = runs[idx]
        cov = covs[run]
        cap = min(
            (remaining[v] // cov[v] for v in range(p) if cov[v] > 0), default=0
        )
        for mult in range(cap, -1, -1):
            if mult:
                nxt = [remaining[v] - mult * cov[v] for v in range(p)]
                yield from dfs(idx + 1, nxt, chosen + [(run, mult)])
            else:
                yield from dfs(idx + 1, remaining, chosen)

    yield from dfs(0, list(dims), [])


def rank_profile(pair: CyclicPair) -> dict:
    """Ranks of all forward path composites, keyed by (start vertex, length)."""
    p, dims = pair.p, pair.dims
    n = pair.total_dim()
    profile = {}
    for v in range(p):
        comp = pair.phi[v]
        for s in range(1, n + 1):
            if not comp or not comp[0]:
                # a zero-dimensional vertex on the path: this and all longer
                # composites from v vanish
                for s2 in range(s, n + 1):
                    profile[(v, s2)] = 0
                break
            profile[(v, s)] = _rank(comp, pair.prime)
            comp = _matmul(pair.phi[(v + s) % p], comp, pair.prime)
    return profile


def recover_type(pair: CyclicPair) -> Multisegment:
    """Identify the multisegment whose segment model matches all path ranks.

    Works by matching against every candidate multisegment of the same
    dimension vector (periodic candidates included: kernels of sampled
    reverse arrows need not be aperiodic).
    """
    p, dims = pair.p, pair.dims
    n = pair.total_dim()
    if n == 0:
        return Multisegment(pair.point, ())
    actual = rank_profile(pair)
    matches = []
    for cand in _all_vertex_multisegments(p, dims):
        ok = True
        for (v, s), r in actual.items():
            expect = 0
            for (v0, l), mult in cand:
                if l <= s:
                    continue
                expect += mult * _count_congruent(0, l - 1 - s, (v - v0) % p, p)
            if expect != r:
                ok = False
                break
        if ok:
            matches.append(cand)
    if not matches:
        raise ValueError("no match: rank profile fits no multisegment")
    if len(matches) > 1:
        raise ValueError("ambiguous match: rank profile fits several types")
    segs = []
    for (v0, l), mult in matches[0]:
        segs.extend([((-v0) % p, l)] * mult)
    counts: dict[tuple[int, int], int] = {}
    for key in segs:
        counts[key] = counts.get(key, 0) + 1
    return Multisegment(pair.point, tuple(sorted(counts.items())))


def _serial_phi(p: int, j: int, l: int):
    """Arrow matrices of the single serial module [j; l) on the p-cycle."""
    dims = [0] * p
    slots = []
    for t in range(l):
        v = _vertex_of_factor(p, j, t)
        slots.append((v, dims[v]))
        dims[v] += 1
    phi = [_zero_matrix(dims[(k + 1) % p], dims[k]) for k in range(p)]
    for t in range(l - 1):
        v, idx = slots[t]
        _, idx2 = slots[t + 1]
        phi[v][idx2][idx] = 1
    return tuple(dims), phi


def serial_selfext_dim(p: int, j: int, l: int, prime=DEFAULT_PRIME) -> int:
    """dim Ext^1(S, S) for the serial module S = [j; l) on the p-cycle.

    End(S) is the nullspace of the intertwiner system
    ``tau_{k+1} phi_k = phi_k tau_k``; since the path algebra is hereditary,
    dim Ext^1 = dim End - chi(dim, dim) with chi the arrow Euler form.
    ``p = 1`` gives the Jordan loop of an ordinary point, where the system is
    the plain commutant.
    """
    if l < 1:
        raise ValueError("length must be positive")
    dims, phi = _serial_phi(p, j, l)
    offsets = []
    nvars = 0
    for k in range(p):
        offsets.append(nvars)
        nvars += dims[k] * dims[k]

    def var(k, a, b):
        return offsets[k] + a * dims[k] + b

    rows = []
    for k in range(p):
        k2 = (k + 1) % p
        for r in range(dims[k2]):
            for c in range(dims[k]):
                row = [0] * nvars
                for m in range(dims[k2]):
                    if phi[k][m][c]:
                        row[var(k2, r, m)] += phi[k][m][c]
                for m in range(dims[k]):
                    if phi[k][r][m]:
                        row[var(k, m, c)] -= phi[k][r][m]
                if any(row):
                    rows.append(row)
    end_dim = len(_nullspace(rows, nvars, prime))
    chi = sum(d * d for d in dims) - sum(
        dims[k] * dims[(k + 1) % p] for k in range(p)
    )
    return end_dim - chi


def _solve_in_basis(basis_cols, targets, prime):
    """Coordinates Y with B Y = T, for B a full-column-rank basis matrix."""
    if not basis_cols:
        return [[] for _ in range(0)]
    nrows = len(basis_cols[0])
    ncols = len(basis_cols)
    ntar = len(targets)
    aug = []
    for r in range(nrows):
        aug.append(
            [basis_cols[c][r] for c in range(ncols)]
            + [targets[t][r] for t in range(ntar)]
        )
    if prime is None:
        reduced, pivots = _linalg.rref_frac(aug)
    else:
        reduced, pivots = _linalg.rref_mod(aug, prime)
    for pc in pivots:
        if pc >= ncols:
            raise ValueError("target not in span of basis")
    sol = [[0] * ntar for _ in range(ncols)]
    for row_idx, pc in enumerate(pivots):
        for t in range(ntar):
            sol[pc][t] = reduced[row_idx][ncols + t]
    return sol


def _kernel_data(pair: CyclicPair):
    """Kernel bases of phibar per vertex plus the phi-restricted pair."""
    p, dims = pair.p, pair.dims
    kernels = []
    for k in range(p):
        vecs = _nullspace(pair.phibar[k], dims[k], pair.prime)
        kernels.append(vecs)
    kdims = tuple(len(kernels[k]) for k in range(p))
    phi_r = []
    for k in range(p):
        kp = (k + 1) % p
        if kdims[k] == 0 or kdims[kp] == 0:
            phi_r.append(_zero_matrix(kdims[kp], kdims[k]))
            continue
        # images of kernel basis vectors, expressed in the target kernel basis
        images = []
        for vec in kernels[k]:
            img = [
                sum(pair.phi[k][r][c] * vec[c] for c in range(dims[k]))
                for r in range(dims[kp])
            ]
            if pair.prime is not None:
                img = [v % pair.prime for v in img]
            images.append(img)
        basis_cols = kernels[kp]
        sol = _solve_in_basis(basis_cols, images, pair.prime)
        phi_r.append([[sol[r][t] for t in range(kdims[k])] for r in range(kdims[kp])])
    phibar_r = [_zero_matrix(kdims[(k - 1) % p], kdims[k]) for k in range(p)]
    return kernels, CyclicPair(p, kdims, phi_r, phibar_r, pair.prime, pair.point)


def kernel_subpair(pair: CyclicPair) -> CyclicPair:
    """The forward-arrow restriction to ker(phibar), a phi-stable subspace."""
    return _kernel_data(pair)[1]


def rk_embeddings(p: int, m: Multisegment, j: int, l: int) -> int:
    """Max number of copies of S_j(l) embedding into the serial sum ``m``.

    A segment [j_a; l_a) receives S_j(l) iff l <= l_a and the socles align:
    j_a - l_a = j - l (mod p); each copy absorbs one embedding.
    """
    count = 0
    for (ja, la), mult in m.pairs:
        if la >= l and (ja - la) % p == (j - l) % p:
            count += mult
    return count


def eps_sample(
    curve: WeightData,
    m: Multisegment,
    color_j: int,
    color_l: int,
    trials: int = DEFAULT_TRIALS,
    seed=0,
    prime=DEFAULT_PRIME,
    audit: bool = True,
) -> int:
    """Sampled generic rk of the color inside ker(phibar) on the stratum of m.

    Max over independent trials (ranks are lower semicontinuous).  With
    ``audit`` the first trial is recomputed over the rationals and must give
    the same kernel type.
    """
    if m.is_empty():
        return 0
    p = curve.weights[m.i]
    best = 0
    audit_done = False
    for t in range(trials):
        pair = sample_generic(curve, m, seed=f"{seed}:{t}", prime=prime)
        ker = kernel_subpair(pair)
        ktype = recover_type(ker)
        if audit and not audit_done and prime is not None:
            exact = CyclicPair(
                pair.p,
                pair.dims,
                [[[Fraction(v) for v in row] for row in mat] for mat in pair.phi],
                [[[Fraction(v) for v in row] for row in mat] for mat in pair.phibar],
                None,
                pair.point,
            )
            if not is_nilpotent(exact):
                raise AssertionError("audit failure: nilpotency differs over Q")
            ktype_exact = recover_type(kernel_subpair(exact))
            if ktype_exact != ktype:
                raise AssertionError(
                    "audit failure: kernel type differs between F_p and Q"
                )
            audit_done = True
        best = max(best, rk_embeddings(p, ktype, color_j, color_l))
    return best


def kernel_type_sample(
    curve: WeightData,
    m: Multisegment,
    trials: int = DEFAULT_TRIALS,
    seed=0,
    prime=DEFAULT_PRIME,
) -> Multisegment:
    """The generic multisegment type of ker(phibar): the one of minimal total
    kernel dimension across trials (kernel dims are upper semicontinuous)."""
    if m.is_empty():
        return m
    best = None
    for t in range(trials):
        pair = sample_generic(curve, m, seed=f"{seed}:{t}", prime=prime)
        ker = kernel_subpair(pair)
        ktype = recover_type(ker)
        size = ker.total_dim()
        if best is None or size < best[0]:
            best = (size, ktype)
    return best[1]


def _rref_rows(rows, prime):
    if not rows or not any(any(r) for r in rows):
        return [], []
    if prime is None:
        reduced, pivots = _linalg.rref_frac(rows)
    else:
        reduced, pivots = _linalg.rref_mod(rows, prime)
    return reduced[: len(pivots)], pivots


def _reduce_by(vec, rref, pivots, prime):
    v = list(vec)
    for row, pc in zip(rref, pivots):
        c = v[pc]
        if c:
            for idx in range(len(v)):
                v[idx] -= c * row[idx]
                if prime is not None:
                    v[idx] %= prime
    return v


def quotient_type_sample(
    curve: WeightData,
    m: Multisegment,
    color_j: int,
    color_l: int,
    s: int,
    trials: int = DEFAULT_TRIALS,
    seed=0,
    prime=DEFAULT_PRIME,
) -> Multisegment:
    """Type of the generic quotient M / S_j(l)^s with the copies in ker(phibar).

    Samples a generic pair on the stratum of ``m``, embeds ``s`` generic
    copies of the serial module S_j(l) into ker(phibar) (head generators in
    the kernel of the l-fold forward composite), and identifies the type of
    the quotient module.  The submodule is phibar-stable automatically, so
    the quotient carries an induced pair.
    """
    if s == 0:
        return m
    p = curve.weights[m.i]
    results = []
    for t in range(trials):
        pair = sample_generic(curve, m, seed=f"{seed}:{t}", prime=prime)
        kernels, kpair = _kernel_data(pair)
        v_head = (-color_j) % p
        if kpair.dims[v_head] == 0:
            null_c = []
        else:
            comp = _linalg.identity(kpair.dims[v_head])
            for step in range(color_l):
                if not comp or not comp[0]:
                    break
                comp = _matmul(kpair.phi[(v_head + step) % p], comp, prime)
            if not comp or not any(any(r) for r in comp):
                comp = []
            null_c = _nullspace(comp, kpair.dims[v_head], prime)
        if len(null_c) < s:
            raise ValueError("not enough generic copies of the color in the kernel")
        rng = random.Random(f"quot:{seed}:{t}")
        orbit_by_vertex = [[] for _ in range(p)]
        for _ in range(s):
            combo = [_rand_scalar(rng, prime) for _ in null_c]
            amb = [0] * pair.dims[v_head]
            for coeff, kvec in zip(combo, null_c):
                for b, val in enumerate(kvec):
                    if val:
                        for r in range(pair.dims[v_head]):
                            amb[r] += coeff * val * kernels[v_head][b][r]
            if prime is not None:
                amb = [x % prime for x in amb]
            cur, v = amb, v_head
            for _ in range(color_l):
                orbit_by_vertex[v].append(cur)
                nxt = [
                    sum(pair.phi[v][r][c] * cur[c] for c in range(pair.dims[v]))
                    for r in range(pair.dims[(v + 1) % p])
                ]
                if prime is not None:
                    nxt = [x % prime for x in nxt]
                cur, v = nxt, (v + 1) % p
        sub_rref = []
        total_u = 0
        for k in range(p):
            rr, piv = _rref_rows(orbit_by_vertex[k], prime)
            sub_rref.append((rr, piv))
            total_u += len(piv)
        if total_u != s * color_l:
            raise ValueError("generic embedding failed: submodule dimension off")
        comp_coords = [
            [c for c in range(pair.dims[k]) if c not in set(sub_rref[k][1])]
            for k in range(p)
        ]
        qdims = tuple(len(comp_coords[k]) for k in range(p))
        phi_q = []
        for k in range(p):
            kp = (k + 1) % p
            mat = _zero_matrix(qdims[kp], qdims[k])
            for col, c in enumerate(comp_coords[k]):
                img = [pair.phi[k][r][c] for r in range(pair.dims[kp])]
                img = _reduce_by(img, *sub_rref[kp], prime)
                for row, cc in enumerate(comp_coords[kp]):
                    mat[row][col] = img[cc]
            phi_q.append(mat)
        phibar_q = [_zero_matrix(qdims[(k - 1) % p], qdims[k]) for k in range(p)]
        q = CyclicPair(p, qdims, phi_q, phibar_q, prime, m.i)
        results.append(recover_type(q))
    # all trials are generic with overwhelming probability; majority vote
    # guards the astronomically unlikely degenerate draw
    counts: dict[Multisegment, int] = {}
    for r in results:
        counts[r] = counts.get(r, 0) + 1
    return max(counts.items(), key=lambda kv: kv[1])[0]


# ---------------------------------------------------------------------------
# projective-line Higgs fields
# ---------------------------------------------------------------------------

@dataclass
class P1Higgs:
    """Splitting degrees and a matrix of binary forms of degree a_k - a_k' - 2.

    Forms are coefficient tuples (c_0, ..., c_D) for c_0 x^D + ... + c_D y^D;
    ``None`` marks a negative-degree (zero) entry.
    """

    degs: tuple[int, ...]
    f: list
    prime: int | None = DEFAULT_PRIME


def p1_sample(degs, seed=0, prime=DEFAULT_PRIME) -> P1Higgs:
    degs = tuple(sorted(degs, reverse=True))
    rng = random.Random(f"p1:{seed}")
    f = []
    for ak in degs:
        row = []
        for ak2 in degs:
            d = ak - ak2 - 2
            if d < 0:
                row.append(None)
            else:
                row.append(tuple(_rand_scalar(rng, prime) for _ in range(d + 1)))
        f.append(row)
    return P1Higgs(degs, f, prime)


def _toeplitz(form, din):
    """Matrix of multiplication by ``form`` from degree din to din+deg(form)."""
    e = len(form) - 1
    rows = din + e + 1
    cols = din + 1
    out = [[0] * cols for _ in range(rows)]
    for c in range(cols):
        for i, coeff in enumerate(form):
            out[c + i][c] = coeff
    return out


def _kernel_nullity_and_basis(h: P1Higgs, a: int, want_basis=False):
    """dim (and basis) of {h: O(a) -> V with f h = 0} as a linear system."""
    degs = h.degs
    sizes = [max(0, ak - a + 1) for ak in degs]
    total = sum(sizes)
    if total == 0:
        return (0, []) if want_basis else 0
    offs = []
    acc = 0
    for s in sizes:
        offs.append(acc)
        acc += s
    rows = []
    for k, ak in enumerate(degs):
        out_dim = max(0, ak - a - 1)
        if out_dim == 0:
            continue
        block_rows = [[0] * total for _ in range(out_dim)]
        for k2, ak2 in enumerate(degs):
            form = h.f[k][k2]
            if form is None or sizes[k2] == 0:
                continue
            tp = _toeplitz(form, degs[k2] - a)
            for r in range(out_dim):
                for c in range(sizes[k2]):
                    block_rows[r][offs[k2] + c] += tp[r][c]
        rows.extend(block_rows)
    rows = [r for r in rows if any(r)]
    basis = _nullspace(rows, total, h.prime)
    if want_basis:
        return len(basis), basis
    return len(basis)


def _generic_matrix_rank(h: P1Higgs) -> int:
    """Rank of f at a generic point of the line."""
    rng = random.Random("p1rank")
    best = 0
    for _ in range(3):
        tau = _rand_scalar(rng, h.prime)
        scalar = []
        for row in h.f:
            out_row = []
            for form in row:
                if form is None:
                    out_row.append(0)
                else:
                    val = 0
                    for coeff in form:
                        val = val * tau + coeff
                        if h.prime is not None:
                            val %= h.prime
                    out_row.append(val)
            scalar.append(out_row)
        best = max(best, _rank(scalar, h.prime))
    return best


def p1_kernel_profile(h: P1Higgs) -> tuple[tuple[int, ...], int]:
    """Splitting degrees of ker f (a saturated, hence torsion-free, subsheaf).

    Recovered by differencing the dimension function
    a -> dim Hom(O(a), ker f); the second slot (torsion length) is always 0.
    """
    n = len(h.degs)
    r_ker = n - _generic_matrix_rank(h)
    if r_ker == 0:
        return ((), 0)
    found: list[int] = []
    a_hi = max(h.degs)
    # saturating the kernel can dig far below the summand degrees when the
    # degree spread is wide (the kernel generator of an r x (r+1) block of
    # forms has degree minus the sum of the form degrees), so scale the
    # scan window with the spread
    spread = max(h.degs) - min(h.degs)
    floor = min(h.degs) - n * spread - 2 * n - 2
    d_prev = _kernel_nullity_and_basis(h, a_hi + 1)
    delta_prev = 0
    a = a_hi
    while a >= floor:
        d_cur = _kernel_nullity_and_basis(h, a)
        delta = d_cur - d_prev
        found.extend([a] * (delta - delta_prev))
        if delta == r_ker:
            return (tuple(sorted(found, reverse=True)), 0)
        d_prev, delta_prev = d_cur, delta
        a -= 1
    raise AssertionError("kernel profile did not stabilize inside the window")


def p1_rk_line(h: P1Higgs, a: int) -> int:
    """Number of kernel splitting degrees >= a (copies of O(a) embedding)."""
    degrees, _ = p1_kernel_profile(h)
    return sum(1 for b in degrees if b >= a)


def p1_eps_sample(
    degs, a: int, trials: int = DEFAULT_TRIALS, seed=0, prime=DEFAULT_PRIME
) -> int:
    """Max over sampled Higgs fields of the O(a)-embedding count in ker f."""
    best = 0
    for t in range(trials):
        h = p1_sample(degs, seed=f"{seed}:{t}", prime=prime)
        best = max(best, p1_rk_line(h, a))
    return best


def _h1_dim(d: int) -> int:
    return max(0, -d - 1)


def _h1_mult_block(form, d_src: int):
    """Multiplication by ``form`` on first-cohomology monomial bases.

    Source basis: x^{-i} y^{-(-d_src - i)}, i = 1..(-d_src - 1); target the
    same for d_tgt = d_src + deg(form); only strictly negative exponents
    survive.
    """
    e = len(form) - 1
    d_tgt = d_src + e
    rows = _h1_dim(d_tgt)
    cols = _h1_dim(d_src)
    out = [[0] * cols for _ in range(rows)]
    for i in range(1, cols + 1):
        for c, coeff in enumerate(form):
            i_tgt = i - c
            j_src = -d_src - i
            j_tgt = j_src - (e - c)
            if 1 <= i_tgt <= rows and j_tgt >= 1:
                out[i_tgt - 1][i - 1] += coeff
    return out


def p1_quotient_invariants(h: P1Higgs, a: int, s: int, seed=0):
    """Class and splitting profile of a generic quotient V / O(a)^s in ker f.

    Returns ``(KClass on the unweighted line, (bundle degrees, torsion
    length))`` for the quotient carrying the induced Higgs field.  Requires
    ``s`` at most the number of O(a)-embeddings into ker f.
    """
    degs = h.degs
    n = len(degs)
    line = WeightData((1, 1, 1))
    if s == 0:
        return (
            kt.KClass(n, sum(degs), ((), (), ())),
            (tuple(sorted(degs, reverse=True)), 0),
        )
    rk = p1_rk_line(h, a)
    if s > rk:
        raise ValueError("not enough copies: s exceeds the embedding count")
    _, basis = _kernel_nullity_and_basis(h, a, want_basis=True)
    rng = random.Random(f"p1q:{seed}")
    sizes = [max(0, ak - a + 1) for ak in degs]
    offs = []
    acc = 0
    for size in sizes:
        offs.append(acc)
        acc += size
    w = []  # w[k][sigma] = coefficient tuple of the (k, sigma) entry
    for k in range(n):
        w.append([[0] * sizes[k] for _ in range(s)])
    for sigma in range(s):
        combo = [_rand_scalar(rng, h.prime) for _ in basis]
        for k in range(n):
            for c in range(sizes[k]):
                val = sum(
                    coeff * vec[offs[k] + c] for coeff, vec in zip(combo, basis)
                )
                if h.prime is not None:
                    val %= h.prime
                w[k][sigma][c] = val

    cls = kt.KClass(n - s, sum(degs) - s * a, ((), (), ()))
    rank_q = n - s

    def hom_to_quotient(ap: int) -> int:
        # Hom(O(ap), Q) via the two-term presentation O(a)^s -> V:
        # cokernel on global sections plus the kernel of the H^1 comparison.
        hv = [max(0, ak - ap + 1) for ak in degs]
        hw = max(0, a - ap + 1)
        alpha_rows = sum(hv)
        alpha = [[0] * (s * hw) for _ in range(alpha_rows)]
        if hw > 0:
            row_off = 0
            for k in range(n):
                if hv[k]:
                    for sigma in range(s):
                        if sizes[k]:
                            tp = _toeplitz(w[k][sigma], a - ap)
                            for r in range(hv[k]):
                                for c in range(hw):
                                    alpha[row_off + r][sigma * hw + c] += tp[r][c]
                row_off += hv[k]
        rank_alpha = _rank([r for r in alpha if any(r)], h.prime)
        coker = sum(hv) - rank_alpha
        h1w = _h1_dim(a - ap)
        beta_cols = s * h1w
        if beta_cols == 0:
            return coker
        beta_rows_total = sum(_h1_dim(ak - ap) for ak in degs)
        beta = [[0] * beta_cols for _ in range(beta_rows_total)]
        row_off = 0
        for k in range(n):
            rows_k = _h1_dim(degs[k] - ap)
            if rows_k:
                for sigma in range(s):
                    if sizes[k]:
                        blk = _h1_mult_block(w[k][sigma], a - ap)
                        for r in range(rows_k):
                            for c in range(h1w):
                                beta[row_off + r][sigma * h1w + c] += blk[r][c]
            row_off += rows_k
        ker_beta = beta_cols - _rank([r for r in beta if any(r)], h.prime)
        return coker + ker_beta

    # quotient summand degrees can exceed max(degs): start above the total
    # degree budget and scan down past any possible splitting degree
    a_hi = sum(abs(d) for d in degs) + abs(a) * s + 1
    floor = min(degs + (a,)) - 2 * n - 4
    found: list[int] = []
    h_prev = hom_to_quotient(a_hi + 1)
    delta_prev = 0
    ap = a_hi
    while ap >= floor:
        h_cur = hom_to_quotient(ap)
        delta = h_cur - h_prev
        found.extend([ap] * (delta - delta_prev))
        if delta == rank_q:
            torsion = h_cur - sum(b - ap + 1 for b in found)
            return cls, (tuple(sorted(found, reverse=True)), torsion)
        h_prev, delta_prev = h_cur, delta
        ap -= 1
    raise AssertionError("quotient profile did not stabilize inside the window")
