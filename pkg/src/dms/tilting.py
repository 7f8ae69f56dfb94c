"""Hearts as simple-tuples, simple forward/backward tilts, exchange-graph
exploration, flip/tilt synchronisation and green sequence search.

A heart is the ordered tuple of its simple modules; its arrow data is the
degree-1 Hom dimension matrix.  A forward tilt at index i shifts the i-th
simple by [1] and twists every simple with an arrow into i by the inverse
twist along the old i-th simple; backward tilts are the formal inverses.

Synchronised nodes carry, next to the heart, the matching triangulation and
the tuple of its dual arcs written against the base triangulation; after
every synchronised flip the string module of each dual arc must agree with
the corresponding simple up to shift.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .dgmod import DGModule, hom_dims, is_spherical, iso, iso_up_to_shift, shift
from .strings import ArcClass, Base, build_string, decode_string
from .surface import Triangulation
from .twists import ActionDecodeError, spherical_twist


class TiltError(ValueError):
    pass


class SyncError(TiltError):
    """A synchronisation invariant failed to re-establish after a flip."""


class Heart:
    """Ordered tuple of pairwise non-isomorphic spherical simples."""

    def __init__(self, base: Base, simples: Sequence[DGModule], check: bool = True):
        self.base = base
        self.simples: Tuple[DGModule, ...] = tuple(simples)
        self._ext: Optional[Tuple[Tuple[int, ...], ...]] = None
        if check:
            self._check()

    def _check(self):
        n = len(self.simples)
        if n != self.base.n:
            raise TiltError(f"expected {self.base.n} simples")
        for i, X in enumerate(self.simples):
            X.assert_minimal()
            if not is_spherical(X):
                raise TiltError(f"simple {i + 1} is not spherical")
        for i in range(n):
            for j in range(n):
                d0 = hom_dims(self.simples[i], self.simples[j]).get(0, 0)
                if d0 != (1 if i == j else 0):
                    raise TiltError(
                        f"degree-0 Hom between simples {i + 1},{j + 1} is {d0}")

    @property
    def ext_quiver(self) -> Tuple[Tuple[int, ...], ...]:
        """Matrix of degree-1 Hom dimensions between the simples."""
        if self._ext is None:
            n = len(self.simples)
            self._ext = tuple(
                tuple(hom_dims(self.simples[i], self.simples[j]).get(1, 0)
                      for j in range(n))
                for i in range(n)
            )
        return self._ext

    def invariant_key(self):
        return tuple(sorted(X.summand_multiset() for X in self.simples))

    def equals(self, other: "Heart", rng) -> Optional[Tuple[int, ...]]:
        """A permutation matching the simples one by one, or None.

        Index i of self matches index perm[i] of other.
        """
        n = len(self.simples)
        if self.invariant_key() != other.invariant_key():
            return None
        candidates: List[List[int]] = []
        for i in range(n):
            row = [
                j for j in range(n)
                if self.simples[i].summand_multiset() == other.simples[j].summand_multiset()
                and iso(self.simples[i], other.simples[j], rng)
            ]
            if not row:
                return None
            candidates.append(row)

        used = [False] * n
        perm = [-1] * n

        def backtrack(i: int) -> bool:
            if i == n:
                return True
            for j in candidates[i]:
                if not used[j]:
                    used[j] = True
                    perm[i] = j
                    if backtrack(i + 1):
                        return True
                    used[j] = False
            return False

        return tuple(perm) if backtrack(0) else None

    def equals_indexed(self, other: "Heart", rng) -> bool:
        """Per-index isomorphism of the simples (no re-indexing allowed)."""
        return all(
            self.simples[i].summand_multiset() == other.simples[i].summand_multiset()
            and iso(self.simples[i], other.simples[i], rng)
            for i in range(len(self.simples))
        )

    def shifted(self, k: int) -> "Heart":
        return Heart(self.base, tuple(shift(X, k) for X in self.simples), check=False)


def canonical_heart(base: Base) -> Heart:
    return Heart(base, tuple(base.simple(v) for v in range(1, base.n + 1)),
                 check=False)


def tilt(heart: Heart, index: int, direction: str = "forward") -> Heart:
    """Simple tilt at a 1-based index."""
    base = heart.base
    n = len(heart.simples)
    if not (1 <= index <= n):
        raise TiltError(f"index {index} out of range 1..{n}")
    i = index - 1
    ext = heart.ext_quiver
    pivot = heart.simples[i]
    new_simples: List[DGModule] = []
    for j in range(n):
        if j == i:
            new_simples.append(shift(pivot, 1 if direction == "forward" else -1))
        elif direction == "forward" and ext[j][i] > 0:
            new_simples.append(spherical_twist(base, pivot, heart.simples[j], -1))
        elif direction == "backward" and ext[i][j] > 0:
            new_simples.append(spherical_twist(base, pivot, heart.simples[j], 1))
        else:
            new_simples.append(heart.simples[j])
    return Heart(base, new_simples, check=False)


# ---------------------------------------------------------------------------
# synchronised triangulation / heart nodes


@dataclass
class EGNode:
    heart: Heart
    triangulation: Triangulation
    dual_arcs: Tuple[ArcClass, ...]

    def key(self):
        return (
            self.triangulation.canonical_key(with_decorations=True),
            tuple(sorted(a.as_tuple() for a in self.dual_arcs)),
            self.heart.invariant_key(),
        )


def initial_node(base: Base) -> EGNode:
    return EGNode(canonical_heart(base), base.tri, tuple(base.dual_arcs()))


def check_sync(node: EGNode, rng) -> None:
    """Every dual arc's string module must agree with the matching simple up
    to shift, and the arc endpoints must frame the matching triangulation
    arc."""
    base = node.heart.base
    for i, arc in enumerate(node.dual_arcs):
        X = build_string(base, arc, 0)
        if iso_up_to_shift(X, node.heart.simples[i], rng) is None:
            raise SyncError(f"dual arc {i + 1} does not match its simple")
        t1, t2 = node.triangulation.triangles_of_arc(i + 1)
        decs = {node.triangulation.decoration_of(t1),
                node.triangulation.decoration_of(t2)}
        if set(arc.endpoints()) != decs:
            raise SyncError(
                f"dual arc {i + 1} endpoints {sorted(set(arc.endpoints()))} do not "
                f"frame the flip quadrilateral decorations {sorted(decs)}")


def sync_flip(node: EGNode, index: int, direction: str = "forward",
              rng=None, verify: bool = True) -> EGNode:
    """Flip the triangulation and tilt the heart at the same index, updating
    the dual arcs by the induced move on closed arcs."""
    base = node.heart.base
    tri2 = node.triangulation.flip(index, direction)
    heart2 = tilt(node.heart, index, direction)
    ext = node.heart.ext_quiver
    i = index - 1
    pivot_module = node.heart.simples[i]
    new_arcs: List[ArcClass] = []
    for j, arc in enumerate(node.dual_arcs):
        if j == i:
            new_arcs.append(arc)
            continue
        moved = (ext[j][i] > 0) if direction == "forward" else (ext[i][j] > 0)
        if not moved:
            new_arcs.append(arc)
            continue
        sign = -1 if direction == "forward" else 1
        Y = spherical_twist(base, pivot_module, build_string(base, arc, 0), sign)
        try:
            arc2, _ = decode_string(base, Y)
        except Exception as exc:  # noqa: BLE001
            raise SyncError(f"dual arc {j + 1} failed to decode after the flip: "
                            f"{exc}") from exc
        new_arcs.append(arc2)
    out = EGNode(heart2, tri2, tuple(new_arcs))
    if verify:
        if rng is None:
            raise TiltError("verification needs an rng")
        check_sync(out, rng)
    return out


def nodes_equal(a: EGNode, b: EGNode, rng) -> bool:
    """Equality up to one common re-indexing of simples and dual arcs."""
    if a.triangulation.canonical_key(with_decorations=True) != \
            b.triangulation.canonical_key(with_decorations=True):
        return False
    perm = a.heart.equals(b.heart, rng)
    if perm is None:
        return False
    if {x.as_tuple() for x in a.dual_arcs} != {x.as_tuple() for x in b.dual_arcs}:
        return False
    return all(a.dual_arcs[i] == b.dual_arcs[perm[i]] for i in range(len(perm)))


# ---------------------------------------------------------------------------
# exchange graphs


@dataclass
class ExchangeGraph:
    hearts: List[Heart]
    edges: List[Tuple[int, int, str, int]]  # (from, index, direction, to)

    def to_dot(self) -> str:
        lines = ["digraph exchange {"]
        for i in range(len(self.hearts)):
            lines.append(f'  h{i} [label="H{i}"];')
        for (a, idx, direction, b) in self.edges:
            if direction == "forward":
                lines.append(f'  h{a} -> h{b} [label="{idx}", color=green];')
        lines.append("}")
        return "\n".join(lines)


def exchange_graph(h0: Heart, radius: int, cap: int, rng,
                   directions: Tuple[str, ...] = ("forward",)) -> ExchangeGraph:
    """Breadth-first exploration of tilts with isomorphism deduplication."""
    hearts = [h0]
    buckets: Dict[object, List[int]] = {h0.invariant_key(): [0]}
    edges: List[Tuple[int, int, str, int]] = []
    frontier = deque([(0, 0)])
    n = len(h0.simples)

    def find(h: Heart) -> Optional[int]:
        for idx in buckets.get(h.invariant_key(), []):
            if hearts[idx].equals(h, rng) is not None:
                return idx
        return None

    while frontier:
        at, depth = frontier.popleft()
        if depth >= radius:
            continue
        for direction in directions:
            for index in range(1, n + 1):
                nxt = tilt(hearts[at], index, direction)
                found = find(nxt)
                if found is None:
                    if len(hearts) >= cap:
                        raise TiltError(f"exchange graph exceeded cap {cap}")
                    hearts.append(nxt)
                    found = len(hearts) - 1
                    buckets.setdefault(nxt.invariant_key(), []).append(found)
                    frontier.append((found, depth + 1))
                edges.append((at, index, direction, found))
    return ExchangeGraph(hearts, edges)


def is_global_shift(h: Heart, h0: Heart, k: int, rng) -> bool:
    """True iff h equals h0 with every simple shifted by exactly k."""
    return h.equals(h0.shifted(k), rng) is not None


def green_sequences(h0: Heart, max_len: int, rng,
                    cap: int = 4000) -> List[List[int]]:
    """All forward-only tilt index sequences from h0 to h0[1], by exhaustive
    path search with heart deduplication; each sequence is verified by
    replay."""
    n = len(h0.simples)
    hearts = [h0]
    buckets: Dict[object, List[int]] = {h0.invariant_key(): [0]}
    succ: Dict[Tuple[int, int], int] = {}
    target_cache: Dict[int, bool] = {}

    def find_or_add(h: Heart) -> int:
        # index sequences must stay coherent, so nodes are deduplicated with
        # the identity indexing only
        for idx in buckets.get(h.invariant_key(), []):
            if hearts[idx].equals_indexed(h, rng):
                return idx
        if len(hearts) >= cap:
            raise TiltError(f"green sequence search exceeded cap {cap}")
        hearts.append(h)
        buckets.setdefault(h.invariant_key(), []).append(len(hearts) - 1)
        return len(hearts) - 1

    def is_target(idx: int) -> bool:
        if idx not in target_cache:
            target_cache[idx] = is_global_shift(hearts[idx], h0, 1, rng)
        return target_cache[idx]

    results: List[List[int]] = []

    def explore(idx: int, path: List[int]):
        if is_target(idx):
            results.append(list(path))
            return
        if len(path) >= max_len:
            return
        for index in range(1, n + 1):
            key = (idx, index)
            if key not in succ:
                succ[key] = find_or_add(tilt(hearts[idx], index, "forward"))
            explore(succ[key], path + [index])

    explore(0, [])
    for seq in results:
        h = h0
        for index in seq:
            h = tilt(h, index, "forward")
        if not is_global_shift(h, h0, 1, rng):
            raise TiltError(f"green sequence {seq} failed replay")
    return results
