"""Minimal perfect dg modules over the graded algebra: shifts, Hom-complex
cohomology, cones, minimal-model reduction, isomorphism and sphericality
tests.

A module is a finite list of summands (vertex, shift) together with a
differential matrix.  The component from summand k into summand l is a scalar
multiple of the unique algebra basis element of degree ``1 - shift_k +
shift_l`` between the two vertices (no double arrows means every graded piece
is at most one-dimensional, so scalars suffice).  A degree-t homomorphism
likewise has components of degree ``t - shift_k + shift_l``.

Composition of maps multiplies basis elements right-to-left ("apply first,
then second"); the Hom-complex differential is ``d_Y f - (-1)^{|f|} f d_X``.
Shifting negates the differential, which keeps Hom cohomology translation
equivariant.
"""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import CY3Algebra
from .field import nullspace, rank, solve_det_nonzero


class DGError(ValueError):
    pass


class NotMinimalError(DGError):
    pass


class DGModule:
    """Direct sum of shifted vertex summands with a square-zero differential."""

    __slots__ = ("E", "F", "summands", "diff", "_key")

    def __init__(self, E: CY3Algebra, F, summands: Sequence[Tuple[int, int]],
                 diff: Dict[Tuple[int, int], object], check: bool = True):
        self.E = E
        self.F = F
        self.summands: Tuple[Tuple[int, int], ...] = tuple(summands)
        self.diff: Dict[Tuple[int, int], object] = {
            kl: s for kl, s in diff.items() if not F.is_zero(s)
        }
        self._key = None
        if check:
            self._check()

    # -- bookkeeping ---------------------------------------------------------

    def entry_element(self, k: int, l: int) -> Optional[int]:
        """Basis element carried by a differential component k -> l."""
        vk, sk = self.summands[k]
        vl, sl = self.summands[l]
        return self.E.hom_basis.get((vk, vl, 1 - sk + sl))

    def map_element(self, k: int, l: int, t: int) -> Optional[int]:
        vk, sk = self.summands[k]
        vl, sl = self.summands[l]
        deg = t - sk + sl
        if deg < 0 or deg > 3:
            return None
        return self.E.hom_basis.get((vk, vl, deg))

    def _check(self):
        m = len(self.summands)
        for (k, l) in self.diff:
            if not (0 <= k < m and 0 <= l < m) or k == l:
                raise DGError(f"bad differential index ({k},{l})")
            if self.entry_element(k, l) is None:
                raise DGError(f"no basis element for differential entry ({k},{l})")
        self._check_d_squared()

    def _check_d_squared(self):
        F, E = self.F, self.E
        acc: Dict[Tuple[int, int], object] = {}
        for (k, l), s1 in self.diff.items():
            e1 = self.entry_element(k, l)
            for (l2, mm), s2 in self.diff.items():
                if l2 != l:
                    continue
                e2 = self.entry_element(l, mm)
                prod = E.mul(e2, e1)
                if prod is None:
                    continue
                key = (k, mm)
                acc[key] = F.add(acc.get(key, F.zero), F.mul(s1, s2))
        for key, val in acc.items():
            if not F.is_zero(val):
                raise DGError(f"d^2 != 0 at component {key}")

    @property
    def is_zero(self) -> bool:
        return not self.summands

    def is_minimal(self) -> bool:
        for (k, l) in self.diff:
            vk, sk = self.summands[k]
            vl, sl = self.summands[l]
            if 1 - sk + sl == 0:
                return False
        return True

    def assert_minimal(self):
        if not self.is_minimal():
            raise NotMinimalError("module has scalar differential components")

    def summand_multiset(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(sorted(self.summands))

    def key(self):
        if self._key is None:
            items = tuple(sorted((k, l, self._hashable(s)) for (k, l), s in self.diff.items()))
            self._key = (self.summands, items)
        return self._key

    def _hashable(self, s):
        return s if not hasattr(s, "numerator") else (s.numerator, s.denominator)

    def __repr__(self):
        parts = [f"S{v}[{s}]" for v, s in self.summands]
        return "DGModule(" + " + ".join(parts) + f", {len(self.diff)} entries)"

    def to_json(self) -> dict:
        return {
            "summands": [list(s) for s in self.summands],
            "diff": [
                [k, l, self.E.basis[self.entry_element(k, l)].name, self.F.to_str(s)]
                for (k, l), s in sorted(self.diff.items())
            ],
        }


def zero_module(E: CY3Algebra, F) -> DGModule:
    return DGModule(E, F, (), {})


def simple_module(E: CY3Algebra, F, vertex: int, shift_by: int = 0) -> DGModule:
    if not (1 <= vertex <= E.n):
        raise DGError(f"vertex {vertex} out of range")
    return DGModule(E, F, ((vertex, shift_by),), {})


def direct_sum(X: DGModule, Y: DGModule) -> DGModule:
    off = len(X.summands)
    diff = dict(X.diff)
    for (k, l), s in Y.diff.items():
        diff[(k + off, l + off)] = s
    return DGModule(X.E, X.F, X.summands + Y.summands, diff, check=False)


def shift(X: DGModule, k: int) -> DGModule:
    """Shift all summands by k; the differential changes sign with parity."""
    if k == 0:
        return X
    F = X.F
    sgn = F.one if k % 2 == 0 else F.neg(F.one)
    return DGModule(
        X.E, F,
        tuple((v, s + k) for v, s in X.summands),
        {kl: F.mul(sgn, s) for kl, s in X.diff.items()},
        check=False,
    )


# ---------------------------------------------------------------------------
# Hom complexes


def hom_basis(X: DGModule, Y: DGModule) -> Dict[int, List[Tuple[int, int, int]]]:
    """Per cohomological degree, the basis (src summand, tgt summand, element)
    of the space of homogeneous maps X -> Y."""
    out: Dict[int, List[Tuple[int, int, int]]] = {}
    for k, (vk, sk) in enumerate(X.summands):
        for l, (vl, sl) in enumerate(Y.summands):
            for deg in range(4):
                el = X.E.hom_basis.get((vk, vl, deg))
                if el is not None:
                    t = deg + sk - sl
                    out.setdefault(t, []).append((k, l, el))
    for t in out:
        out[t].sort()
    return out


def _delta_matrix(X: DGModule, Y: DGModule, t: int,
                  basis_t: List[Tuple[int, int, int]],
                  basis_t1: List[Tuple[int, int, int]]) -> List[list]:
    """Matrix of the Hom differential from degree t to t+1 (rows = target)."""
    E, F = X.E, X.F
    index_t1 = {(k, l): r for r, (k, l, _) in enumerate(basis_t1)}
    cols = []
    sign = F.one if t % 2 == 0 else F.neg(F.one)
    for (k, l, el) in basis_t:
        col: Dict[int, object] = {}
        # post-compose with d_Y
        for (l2, m), s in Y.diff.items():
            if l2 != l:
                continue
            prod = E.mul(Y.entry_element(l2, m), el)
            if prod is None:
                continue
            r = index_t1.get((k, m))
            if r is not None:
                col[r] = F.add(col.get(r, F.zero), s)
        # pre-compose with d_X, with the Koszul sign
        for (j, k2), s in X.diff.items():
            if k2 != k:
                continue
            prod = E.mul(el, X.entry_element(j, k2))
            if prod is None:
                continue
            r = index_t1.get((j, l))
            if r is not None:
                col[r] = F.sub(col.get(r, F.zero), F.mul(sign, s))
        cols.append(col)
    rows = [[F.zero] * len(basis_t) for _ in range(len(basis_t1))]
    for c, col in enumerate(cols):
        for r, val in col.items():
            rows[r][c] = val
    return rows


def hom_dims(X: DGModule, Y: DGModule) -> Dict[int, int]:
    """Dimensions of the Hom-complex cohomology, per degree (zeros omitted)."""
    basis = hom_basis(X, Y)
    F = X.F
    dims: Dict[int, int] = {}
    for t, bt in basis.items():
        bt1 = basis.get(t + 1, [])
        btm = basis.get(t - 1, [])
        d_t = _delta_matrix(X, Y, t, bt, bt1)
        d_tm = _delta_matrix(X, Y, t - 1, btm, bt) if btm else []
        dim_ker = len(bt) - (rank(d_t, F) if bt1 else 0)
        dim_im = rank(d_tm, F) if btm else 0
        val = dim_ker - dim_im
        if val:
            dims[t] = val
    return dims


def hom_total_dim(X: DGModule, Y: DGModule) -> int:
    return sum(hom_dims(X, Y).values())


def euler_pairing(X: DGModule, Y: DGModule) -> int:
    return sum((-1) ** (t % 2) * d for t, d in hom_dims(X, Y).items())


def cocycle_representatives(X: DGModule, Y: DGModule, t: int):
    """Canonical basis of H^t Hom(X, Y) as closed maps.

    Each representative is a coefficient vector over ``hom_basis(X, Y)[t]``,
    picked by echelon reduction of the cocycle space modulo coboundaries with
    the canonical basis ordering.
    """
    basis = hom_basis(X, Y)
    F = X.F
    bt = basis.get(t, [])
    if not bt:
        return [], bt
    bt1 = basis.get(t + 1, [])
    btm = basis.get(t - 1, [])
    d_t = _delta_matrix(X, Y, t, bt, bt1)
    cocycles = nullspace(d_t, F, len(bt)) if bt1 else [
        [F.one if i == j else F.zero for i in range(len(bt))] for j in range(len(bt))
    ]
    boundaries: List[list] = []
    if btm:
        d_tm = _delta_matrix(X, Y, t - 1, btm, bt)
        for c in range(len(btm)):
            vec = [d_tm[r][c] for r in range(len(bt))]
            if any(not F.is_zero(x) for x in vec):
                boundaries.append(vec)
    # reduce cocycles modulo the boundary span, keeping echelon pivots
    pool = [list(b) for b in boundaries]
    pivots: List[int] = []
    reduced_pool: List[list] = []

    def reduce_vec(v):
        v = list(v)
        for piv, w in zip(pivots, reduced_pool):
            if not F.is_zero(v[piv]):
                f = v[piv]
                v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, w)]
        return v

    def insert(v) -> bool:
        v = reduce_vec(v)
        for i, x in enumerate(v):
            if not F.is_zero(x):
                inv = F.inv(x)
                v = [F.mul(inv, y) for y in v]
                pivots.append(i)
                reduced_pool.append(v)
                return True
        return False

    for b in pool:
        insert(b)
    reps = []
    for z in cocycles:
        v = reduce_vec(z)
        if any(not F.is_zero(x) for x in v):
            reps.append(list(v))
            insert(v)
    return reps, bt


def is_closed_map(X: DGModule, Y: DGModule, t: int,
                  f: Dict[Tuple[int, int], object]) -> bool:
    basis = hom_basis(X, Y)
    bt = basis.get(t, [])
    bt1 = basis.get(t + 1, [])
    index = {(k, l): i for i, (k, l, _) in enumerate(bt)}
    vec = [X.F.zero] * len(bt)
    for (k, l), s in f.items():
        if (k, l) not in index:
            if not X.F.is_zero(s):
                raise DGError(f"map component ({k},{l}) has no basis element")
            continue
        vec[index[(k, l)]] = s
    if not bt1:
        return True
    M = _delta_matrix(X, Y, t, bt, bt1)
    F = X.F
    for r in range(len(bt1)):
        acc = F.zero
        for c in range(len(bt)):
            acc = F.add(acc, F.mul(M[r][c], vec[c]))
        if not F.is_zero(acc):
            return False
    return True


# ---------------------------------------------------------------------------
# cones and minimal models


def cone(X: DGModule, Y: DGModule, f: Dict[Tuple[int, int], object],
         minimize_result: bool = True) -> DGModule:
    """Cone of a closed degree-0 map f: X -> Y, optionally minimalised.

    The underlying summands are X[1] followed by Y; the map block is copied
    verbatim (component degrees match automatically).
    """
    if not is_closed_map(X, Y, 0, f):
        raise DGError("cone of a non-closed map")
    F = X.F
    off = len(X.summands)
    summands = tuple((v, s + 1) for v, s in X.summands) + Y.summands
    diff: Dict[Tuple[int, int], object] = {}
    for (k, l), s in X.diff.items():
        diff[(k, l)] = F.neg(s)
    for (k, l), s in Y.diff.items():
        diff[(k + 0 + off, l + off)] = s
    for (k, l), s in f.items():
        if not F.is_zero(s):
            diff[(k, l + off)] = s
    out = DGModule(X.E, F, summands, diff)
    return minimize(out) if minimize_result else out


def minimize(X: DGModule) -> DGModule:
    """Cancel scalar differential components by Gaussian reduction until the
    differential lives in the positive-degree part."""
    E, F = X.E, X.F
    summands = list(X.summands)
    diff = dict(X.diff)

    def scalar_entries():
        out = []
        for (k, l) in diff:
            vk, sk = summands[k]
            vl, sl = summands[l]
            if 1 - sk + sl == 0:
                out.append((k, l))
        out.sort()
        return out

    while True:
        scalars = scalar_entries()
        if not scalars:
            break
        k0, l0 = scalars[0]
        c = diff[(k0, l0)]
        cinv = F.inv(c)
        into_l0 = [(i, s) for (i, l), s in diff.items() if l == l0 and i != k0]
        from_k0 = [(j, s) for (k, j), s in diff.items() if k == k0 and j != l0]
        elem = lambda a, b: E.hom_basis.get(
            (summands[a][0], summands[b][0], 1 - summands[a][1] + summands[b][1])
        )
        for (i, s1) in into_l0:
            e1 = elem(i, l0)
            for (j, s2) in from_k0:
                e2 = elem(k0, j)
                prod = E.mul(e2, e1)
                if prod is None:
                    continue
                old = diff.get((i, j), F.zero)
                val = F.sub(old, F.mul(F.mul(s1, cinv), s2))
                if F.is_zero(val):
                    diff.pop((i, j), None)
                else:
                    diff[(i, j)] = val
        keep = [idx for idx in range(len(summands)) if idx not in (k0, l0)]
        remap = {old: new for new, old in enumerate(keep)}
        summands = [summands[idx] for idx in keep]
        diff = {
            (remap[k], remap[l]): s
            for (k, l), s in diff.items()
            if k in remap and l in remap
        }

    # canonical summand order for reproducible serialisations
    order = sorted(range(len(summands)), key=lambda idx: summands[idx])
    remap = {old: new for new, old in enumerate(order)}
    summands = [summands[idx] for idx in order]
    diff = {(remap[k], remap[l]): s for (k, l), s in diff.items()}
    out = DGModule(X.E, X.F, summands, diff)
    out.assert_minimal()
    return out


# ---------------------------------------------------------------------------
# isomorphism testing

ISO_TRIALS = 6  # one-sided failure probability below 2^-40 at desk scale


def _closed_degree_zero_maps(X: DGModule, Y: DGModule):
    basis = hom_basis(X, Y)
    b0 = basis.get(0, [])
    b1 = basis.get(1, [])
    F = X.F
    if not b0:
        return [], b0
    M = _delta_matrix(X, Y, 0, b0, b1) if b1 else []
    sols = nullspace(M, F, len(b0))
    return sols, b0


def _scalar_blocks(X: DGModule, Y: DGModule, b0):
    """Positions of scalar components, grouped by (vertex, shift) class."""
    classes: Dict[Tuple[int, int], Tuple[List[int], List[int]]] = {}
    for k, vs in enumerate(X.summands):
        classes.setdefault(vs, ([], []))[0].append(k)
    for l, vs in enumerate(Y.summands):
        classes.setdefault(vs, ([], []))[1].append(l)
    pos = {(k, l): i for i, (k, l, _) in enumerate(b0)}
    blocks = []
    for vs, (xs, ys) in sorted(classes.items()):
        if len(xs) != len(ys):
            return None
        if not xs:
            continue
        grid = []
        for l in ys:
            row = []
            for k in xs:
                row.append(pos.get((k, l)))
            grid.append(row)
        blocks.append(grid)
    return blocks


def _blocks_invertible(blocks, vec, F) -> bool:
    for grid in blocks:
        mat = [[(vec[p] if p is not None else F.zero) for p in row] for row in grid]
        if not solve_det_nonzero(mat, F):
            return False
    return True


def iso(X: DGModule, Y: DGModule, rng) -> bool:
    """Existence of a closed degree-0 isomorphism between minimal modules.

    Deterministic (by interpolation) when the space of closed maps has
    dimension at most 2; otherwise randomised with one-sided error below
    2^-40: a True answer is always right, False may in principle be wrong
    with that probability.
    """
    X.assert_minimal()
    Y.assert_minimal()
    if X.summand_multiset() != Y.summand_multiset():
        return False
    if X.is_zero and Y.is_zero:
        return True
    sols, b0 = _closed_degree_zero_maps(X, Y)
    if not sols:
        return False
    blocks = _scalar_blocks(X, Y, b0)
    if blocks is None:
        return False
    F = X.F
    s = len(sols)
    m = len(X.summands)
    if s <= 2:
        # determinant is a polynomial of degree <= m per parameter; a full
        # grid evaluation decides existence exactly
        pts = [F.of_int(i) for i in range(m + 1)]
        for coeffs in itertools.product(pts, repeat=s):
            vec = [F.zero] * len(b0)
            for c, sol in zip(coeffs, sols):
                for i, x in enumerate(sol):
                    vec[i] = F.add(vec[i], F.mul(c, x))
            if _blocks_invertible(blocks, vec, F):
                return True
        return False
    for _ in range(ISO_TRIALS):
        vec = [F.zero] * len(b0)
        for sol in sols:
            c = F.random(rng)
            for i, x in enumerate(sol):
                vec[i] = F.add(vec[i], F.mul(c, x))
        if _blocks_invertible(blocks, vec, F):
            return True
    return False


def iso_up_to_shift(X: DGModule, Y: DGModule, rng) -> Optional[int]:
    """The shift k with X iso Y[k], or None."""
    if X.is_zero and Y.is_zero:
        return 0
    if X.is_zero or Y.is_zero:
        return None
    k = min(s for _, s in X.summands) - min(s for _, s in Y.summands)
    if X.summand_multiset() != tuple(sorted((v, s + k) for v, s in Y.summands)):
        return None
    return k if iso(X, shift(Y, k), rng) else None


def is_spherical(X: DGModule) -> bool:
    """Self-Homs of total dimension two, sitting in degrees 0 and 3."""
    X.assert_minimal()
    if X.is_zero:
        return False
    return hom_dims(X, X) == {0: 1, 3: 1}
