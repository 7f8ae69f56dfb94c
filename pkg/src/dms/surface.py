"""Unpunctured marked surfaces, decorated triangulations, flips and quivers.

A surface is stored by genus and the marked-point count of each boundary
component.  A triangulation is a list of combinatorial triangles; each
triangle has three side slots listed in counterclockwise order, carrying
either an internal arc label (1..n, each appearing in exactly two slots) or a
boundary segment id.  Every triangle owns one decorating point.

Flips are directed: forward and backward produce the same underlying
triangulation but transport the two decorating points of the flip
quadrilateral differently.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

ARC = "arc"
BND = "bnd"

Side = Tuple[str, int]  # (ARC, label) or (BND, segment id)


class SurfaceError(ValueError):
    """Invalid surface or triangulation data."""


class SchemeError(ValueError):
    """Requested triangulation scheme does not apply to the surface."""


@dataclass(frozen=True)
class MarkedSurface:
    genus: int
    boundaries: Tuple[int, ...]

    def __post_init__(self):
        if self.genus < 0:
            raise SurfaceError("genus must be non-negative")
        if not self.boundaries:
            raise SurfaceError("at least one boundary component is required")
        if any(m < 1 for m in self.boundaries):
            raise SurfaceError("every boundary component needs a marked point")
        if self.num_arcs < 1:
            raise SurfaceError(
                f"surface has {self.num_arcs} arcs in a triangulation; need at least 1"
            )

    @property
    def marked_points(self) -> int:
        return sum(self.boundaries)

    @property
    def num_arcs(self) -> int:
        return 6 * self.genus + 3 * len(self.boundaries) + self.marked_points - 6

    @property
    def num_triangles(self) -> int:
        total = 2 * self.num_arcs + self.marked_points
        if total % 3 != 0:
            raise SurfaceError("triangle count is not integral")
        return total // 3

    @staticmethod
    def from_json(data) -> "MarkedSurface":
        if isinstance(data, str):
            data = json.loads(data)
        return MarkedSurface(int(data["genus"]), tuple(int(b) for b in data["boundaries"]))

    def to_json(self) -> dict:
        return {"genus": self.genus, "boundaries": list(self.boundaries)}


def surface_invariants(surface: MarkedSurface) -> Tuple[int, int]:
    """Number of arcs and number of triangles of any triangulation."""
    return surface.num_arcs, surface.num_triangles


# ---------------------------------------------------------------------------
# quiver with potential


@dataclass(frozen=True)
class Arrow:
    source: int
    target: int
    triangle: int


@dataclass(frozen=True)
class QuiverWithPotential:
    num_vertices: int
    arrows: Tuple[Arrow, ...]
    # each term is a triple of arrow indices (p, q, r) composable as the path
    # "p then q then r", closing into a 3-cycle
    potential: Tuple[Tuple[int, int, int], ...]

    @property
    def has_double_arrows(self) -> bool:
        seen = set()
        for a in self.arrows:
            if (a.source, a.target) in seen:
                return True
            seen.add((a.source, a.target))
        return False

    @property
    def has_two_cycles(self) -> bool:
        pairs = {(a.source, a.target) for a in self.arrows}
        return any((t, s) in pairs for (s, t) in pairs)

    @property
    def has_loops(self) -> bool:
        return any(a.source == a.target for a in self.arrows)

    def adjacent(self, i: int, j: int) -> bool:
        return any(
            (a.source, a.target) in ((i, j), (j, i)) for a in self.arrows
        )

    def arrow_between(self, i: int, j: int) -> Optional[int]:
        """Index of the arrow i -> j, if present."""
        for k, a in enumerate(self.arrows):
            if a.source == i and a.target == j:
                return k
        return None

    def to_dot(self) -> str:
        lines = ["digraph quiver {"]
        terms = []
        for term in self.potential:
            cyc = "".join(f"({self.arrows[k].source}->{self.arrows[k].target})" for k in term)
            terms.append(cyc)
        lines.append(f'  // potential terms: {"; ".join(terms) if terms else "none"}')
        for v in range(1, self.num_vertices + 1):
            lines.append(f'  {v} [label="{v}"];')
        for a in self.arrows:
            lines.append(f'  {a.source} -> {a.target} [label="T{a.triangle}"];')
        lines.append("}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# triangulation


class Triangulation:
    """Decorated combinatorial triangulation of a marked surface."""

    def __init__(
        self,
        surface: MarkedSurface,
        sides: Sequence[Sequence[Side]],
        decorations: Optional[Sequence[int]] = None,
    ):
        self.surface = surface
        self.sides: List[Tuple[Side, Side, Side]] = [tuple(s) for s in sides]
        if decorations is None:
            decorations = list(range(1, len(self.sides) + 1))
        self.decorations: List[int] = list(decorations)
        self._validate()

    # -- bookkeeping -------------------------------------------------------

    @property
    def num_triangles(self) -> int:
        return len(self.sides)

    @property
    def num_arcs(self) -> int:
        return self.surface.num_arcs

    def arc_slots(self, label: int) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        """The two (triangle, slot) positions of an internal arc."""
        found = []
        for t, tri in enumerate(self.sides):
            for i, side in enumerate(tri):
                if side == (ARC, label):
                    found.append((t, i))
        if len(found) != 2:
            raise SurfaceError(f"arc {label} occurs {len(found)} times")
        return found[0], found[1]

    def opposite(self, t: int, i: int) -> Tuple[int, int]:
        """The slot glued to slot (t, i)."""
        kind, label = self.sides[t][i]
        if kind != ARC:
            raise SurfaceError(f"slot ({t},{i}) is a boundary segment")
        (a, b) = self.arc_slots(label)
        return b if (t, i) == a else a

    def slot_of_arc_in_triangle(self, t: int, label: int) -> int:
        for i in range(3):
            if self.sides[t][i] == (ARC, label):
                return i
        raise SurfaceError(f"arc {label} is not a side of triangle {t}")

    def triangles_of_arc(self, label: int) -> Tuple[int, int]:
        (t1, _), (t2, _) = self.arc_slots(label)
        return t1, t2

    def decoration_of(self, t: int) -> int:
        return self.decorations[t]

    # -- validation --------------------------------------------------------

    def _vertex_classes(self):
        """Union-find over triangle corners induced by the gluing.

        Corner k of a triangle sits between side k-1 (ending there) and side k
        (starting there).  Gluing side (t,i) to (t',i') identifies corner i of
        t with corner i'+1 of t' and corner i+1 of t with corner i' of t'.
        """
        parent: Dict[Tuple[int, int], Tuple[int, int]] = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        for t in range(len(self.sides)):
            for k in range(3):
                parent[(t, k)] = (t, k)
        for label in range(1, self.num_arcs + 1):
            (t, i), (u, j) = self.arc_slots(label)
            union((t, i), (u, (j + 1) % 3))
            union((t, (i + 1) % 3), (u, j))
        return {x: find(x) for x in parent}

    def _boundary_components(self) -> List[int]:
        """Marked-point counts of the boundary components, via segment walks."""
        classes = self._vertex_classes()
        seg_slots = {}
        for t, tri in enumerate(self.sides):
            for i, (kind, label) in enumerate(tri):
                if kind == BND:
                    if label in seg_slots:
                        raise SurfaceError(f"boundary segment {label} repeated")
                    seg_slots[label] = (t, i)
        # segment (t,i) runs from corner i to corner i+1; on the boundary the
        # successor segment is the one starting at our end vertex
        start_of = {}
        for seg, (t, i) in seg_slots.items():
            start_of.setdefault(classes[(t, i)], []).append(seg)
        for v, segs in start_of.items():
            if len(segs) != 1:
                raise SurfaceError("boundary is not a disjoint union of circles")
        counts = []
        unseen = set(seg_slots)
        while unseen:
            seg = min(unseen)
            length = 0
            cur = seg
            while True:
                unseen.discard(cur)
                length += 1
                t, i = seg_slots[cur]
                end_class = classes[(t, (i + 1) % 3)]
                nxt = start_of.get(end_class)
                if nxt is None:
                    raise SurfaceError("boundary walk fell off the surface")
                cur = nxt[0]
                if cur == seg:
                    break
                if length > len(seg_slots):
                    raise SurfaceError("boundary walk does not close")
            counts.append(length)
        # every vertex class must touch the boundary: no interior vertices
        bnd_classes = set(start_of)
        for seg, (t, i) in seg_slots.items():
            bnd_classes.add(classes[(t, (i + 1) % 3)])
        for x, root in classes.items():
            if root not in bnd_classes:
                raise SurfaceError("triangulation has an interior vertex (puncture)")
        return counts

    def _validate(self):
        n, aleph = surface_invariants(self.surface)
        if len(self.sides) != aleph:
            raise SurfaceError(f"expected {aleph} triangles, got {len(self.sides)}")
        arc_count: Dict[int, int] = {}
        seg_count: Dict[int, int] = {}
        for tri in self.sides:
            if len(tri) != 3:
                raise SurfaceError("triangle needs exactly 3 sides")
            for kind, label in tri:
                if kind == ARC:
                    arc_count[label] = arc_count.get(label, 0) + 1
                elif kind == BND:
                    seg_count[label] = seg_count.get(label, 0) + 1
                else:
                    raise SurfaceError(f"bad side kind {kind}")
        if sorted(arc_count) != list(range(1, n + 1)) or any(c != 2 for c in arc_count.values()):
            raise SurfaceError("internal arcs must be labelled 1..n, each glued once")
        if sorted(seg_count) != list(range(self.surface.marked_points)):
            raise SurfaceError("boundary segments must be labelled 0..|M|-1")
        if len(self.decorations) != aleph or len(set(self.decorations)) != aleph:
            raise SurfaceError("need one distinct decorating point per triangle")
        counts = self._boundary_components()
        if sorted(counts) != sorted(self.surface.boundaries):
            raise SurfaceError(
                f"boundary walk found components {sorted(counts)}, "
                f"surface has {sorted(self.surface.boundaries)}"
            )
        # Euler characteristic: V - E + F must match 2 - 2g - b
        chi = self.surface.marked_points - (n + self.surface.marked_points) + aleph
        if chi != 2 - 2 * self.surface.genus - len(self.surface.boundaries):
            raise SurfaceError("Euler characteristic mismatch")

    # -- quiver ------------------------------------------------------------

    def quiver(self) -> QuiverWithPotential:
        """Arrows per triangle corner; one potential term per internal triangle.

        Within a triangle whose sides are listed counterclockwise, the arrow
        between two internal sides points from slot i+1 to slot i (the
        clockwise direction).
        """
        arrows: List[Arrow] = []
        terms: List[Tuple[int, int, int]] = []
        for t, tri in enumerate(self.sides):
            local: Dict[Tuple[int, int], int] = {}
            for i in range(3):
                u = tri[(i + 1) % 3]
                w = tri[i]
                if u[0] == ARC and w[0] == ARC:
                    local[((i + 1) % 3, i)] = len(arrows)
                    arrows.append(Arrow(u[1], w[1], t))
            if len(local) == 3:
                # path order: (1->0), then (0->2), then (2->1)
                terms.append((local[(1, 0)], local[(0, 2)], local[(2, 1)]))
        return QuiverWithPotential(self.num_arcs, tuple(arrows), tuple(terms))

    @property
    def valid_initial(self) -> bool:
        q = self.quiver()
        return not (q.has_double_arrows or q.has_two_cycles or q.has_loops)

    # -- flips -------------------------------------------------------------

    def flip(self, label: int, direction: str = "forward") -> "Triangulation":
        """Re-diagonalise the quadrilateral around an internal arc.

        Forward and backward give the same underlying triangulation; they
        differ in how the two decorating points of the quadrilateral are
        carried to the new triangles.
        """
        if direction not in ("forward", "backward"):
            raise SurfaceError(f"bad flip direction {direction!r}")
        (ta, ia), (tb, ib) = self.arc_slots(label)
        if ta == tb:
            raise SurfaceError("self-folded configuration cannot be flipped")
        # quadrilateral sides in ccw order starting after the diagonal:
        #   q0 = A side ia+1, q1 = A side ia+2, q2 = B side ib+1, q3 = B side ib+2
        a1 = self.sides[ta][(ia + 1) % 3]
        a2 = self.sides[ta][(ia + 2) % 3]
        b1 = self.sides[tb][(ib + 1) % 3]
        b2 = self.sides[tb][(ib + 2) % 3]
        new_sides = [list(t) for t in self.sides]
        # new triangle at index ta has ccw sides (a2, b1, diagonal);
        # new triangle at index tb has ccw sides (b2, a1, diagonal)
        new_sides[ta] = (a2, b1, (ARC, label))
        new_sides[tb] = (b2, a1, (ARC, label))
        decorations = list(self.decorations)
        if direction == "backward":
            decorations[ta], decorations[tb] = decorations[tb], decorations[ta]
        return Triangulation(self.surface, new_sides, decorations)

    # -- canonical form ----------------------------------------------------

    def canonical_key(self, with_decorations: bool = False):
        """Iso-invariant key, fixing boundary segments pointwise.

        Two triangulations get the same key iff they differ only by a
        relabelling of triangles and arcs.  With ``with_decorations`` the
        decorating-point ids are included (they are globally meaningful).
        """
        seg_slots = {}
        for t, tri in enumerate(self.sides):
            for i, (kind, label) in enumerate(tri):
                if kind == BND:
                    seg_slots[label] = (t, i)
        if seg_slots:
            t0, i0 = seg_slots[min(seg_slots)]
        else:
            t0, i0 = 0, 0
        order: Dict[int, int] = {}
        entry: Dict[int, int] = {}
        queue = deque([(t0, i0)])
        entry[t0] = i0
        order[t0] = 0
        arc_names: Dict[int, int] = {}
        out: List[tuple] = []
        while queue:
            t, i = queue.popleft()
            row: List[tuple] = []
            for k in range(3):
                kind, label = self.sides[t][(i + k) % 3]
                if kind == BND:
                    row.append(("b", label))
                else:
                    if label not in arc_names:
                        arc_names[label] = len(arc_names)
                        u, j = self.opposite(t, (i + k) % 3)
                        if u not in order:
                            order[u] = len(order)
                            entry[u] = j
                            queue.append((u, j))
                    row.append(("a", arc_names[label]))
            if with_decorations:
                row.append(("d", self.decorations[t]))
            out.append(tuple(row))
        if len(order) != len(self.sides):
            raise SurfaceError("triangulation adjacency graph is disconnected")
        return tuple(out)

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "surface": self.surface.to_json(),
            "triangles": [[list(s) for s in tri] for tri in self.sides],
            "decorations": list(self.decorations),
        }

    @staticmethod
    def from_json(data) -> "Triangulation":
        if isinstance(data, str):
            data = json.loads(data)
        surface = MarkedSurface.from_json(data["surface"])
        sides = [[tuple(s) for s in tri] for tri in data["triangles"]]
        return Triangulation(surface, sides, data.get("decorations"))


# ---------------------------------------------------------------------------
# standard triangulations


def _disk_triangulation(surface: MarkedSurface, triangles: List[Tuple[int, int, int]],
                        arc_labels: Dict[FrozenSet[int], int]) -> Triangulation:
    """Assemble a disk triangulation from ccw vertex triples.

    Boundary segment i runs from vertex i to vertex i+1 mod m.
    """
    m = surface.marked_points
    sides: List[List[Side]] = []
    for tri in triangles:
        row: List[Side] = []
        for k in range(3):
            u, v = tri[k], tri[(k + 1) % 3]
            if (u + 1) % m == v:
                row.append((BND, u))
            else:
                row.append((ARC, arc_labels[frozenset((u, v))]))
        sides.append(row)
    return Triangulation(surface, sides)


def _fan(surface: MarkedSurface) -> Triangulation:
    m = surface.marked_points
    triangles = [(0, i, i + 1) for i in range(1, m - 1)]
    labels = {frozenset((0, i)): i - 1 for i in range(2, m - 1)}
    return _disk_triangulation(surface, triangles, labels)


def _snake(surface: MarkedSurface) -> Triangulation:
    m = surface.marked_points
    lo, hi = 0, m - 1
    triangles = []
    chords = []
    clip_low = True
    while hi - lo >= 2:
        if clip_low:
            triangles.append((lo, lo + 1, hi))
            lo += 1
        else:
            triangles.append((lo, hi - 1, hi))
            hi -= 1
        if hi - lo >= 2:
            chords.append(frozenset((lo, hi)))
        clip_low = not clip_low
    labels = {c: k + 1 for k, c in enumerate(chords)}
    return _disk_triangulation(surface, triangles, labels)


def _star(surface: MarkedSurface) -> Triangulation:
    m = surface.marked_points
    if m % 3 != 0 or m < 6:
        raise SchemeError("star scheme needs a disk with 3k >= 6 marked points")
    c0, c1, c2 = 0, m // 3, 2 * m // 3
    triangles = [(c0, c1, c2)]
    # label the central sides so the induced 3-cycle runs 1 -> 2 -> 3 -> 1
    labels = {
        frozenset((c0, c1)): 2,
        frozenset((c1, c2)): 1,
        frozenset((c2, c0)): 3,
    }
    next_label = 4
    for a, b in ((c0, c1), (c1, c2), (c2, c0)):
        # fan the boundary stretch between consecutive central corners
        stretch = [a]
        v = a
        while v % m != b % m:
            v += 1
            stretch.append(v % m)
        for k in range(1, len(stretch) - 1):
            triangles.append((a, stretch[k], stretch[k + 1]))
            if stretch[k + 1] != b % m:
                labels[frozenset((a, stretch[k + 1]))] = next_label
                next_label += 1
    return _disk_triangulation(surface, triangles, labels)


def _annulus_standard(surface: MarkedSurface) -> Triangulation:
    p, q = surface.boundaries
    # staircase in the universal strip: bottom advances p times, then top q
    steps = ["b"] * p + ["t"] * q
    n = p + q
    sides: List[List[Side]] = []
    bi, tj = 0, 0
    for k, step in enumerate(steps):
        arc_prev = k + 1
        arc_next = 1 if k == n - 1 else k + 2
        if step == "b":
            # triangle (B_i, B_i+1, T_j): sides bottom segment, next arc, prev arc
            sides.append([(BND, bi), (ARC, arc_next), (ARC, arc_prev)])
            bi += 1
        else:
            # triangle (B_i, T_j+1, T_j): sides next arc, top segment, prev arc
            sides.append([(ARC, arc_next), (BND, p + tj), (ARC, arc_prev)])
            tj += 1
    return Triangulation(surface, sides)


def standard_triangulation(
    surface: MarkedSurface, scheme: str, require_valid_initial: bool = True
) -> Triangulation:
    """A named base triangulation: fan / snake / star on disks,
    annulus_standard on annuli."""
    is_disk = surface.genus == 0 and len(surface.boundaries) == 1
    is_annulus = surface.genus == 0 and len(surface.boundaries) == 2
    if scheme == "fan":
        if not is_disk:
            raise SchemeError("fan scheme needs a disk")
        tri = _fan(surface)
    elif scheme == "snake":
        if not is_disk:
            raise SchemeError("snake scheme needs a disk")
        tri = _snake(surface)
    elif scheme == "star":
        if not is_disk:
            raise SchemeError("star scheme needs a disk")
        tri = _star(surface)
    elif scheme == "annulus_standard":
        if not is_annulus:
            raise SchemeError("annulus_standard scheme needs an annulus")
        tri = _annulus_standard(surface)
    else:
        raise SchemeError(f"unknown scheme {scheme!r}")
    if require_valid_initial and not tri.valid_initial:
        raise SchemeError(
            f"scheme {scheme!r} on {surface.to_json()} is not a valid initial "
            "triangulation (double arrows present)"
        )
    return tri


def enumerate_triangulations(
    surface: MarkedSurface,
    max_count: int = 10000,
    start: Optional[Triangulation] = None,
) -> List[Triangulation]:
    """All triangulations reachable by flips from a standard one.

    Deduplication is by combinatorial isomorphism fixing every boundary
    segment; decorations are ignored.
    """
    if start is None:
        if len(surface.boundaries) == 1 and surface.genus == 0:
            start = standard_triangulation(surface, "fan", require_valid_initial=False)
        elif len(surface.boundaries) == 2 and surface.genus == 0:
            start = standard_triangulation(surface, "annulus_standard", require_valid_initial=False)
        else:
            raise SchemeError("no standard scheme for this surface; pass start=")
    seen = {start.canonical_key(): start}
    queue = deque([start])
    while queue:
        tri = queue.popleft()
        for label in range(1, surface.num_arcs + 1):
            nxt = tri.flip(label, "forward")
            key = nxt.canonical_key()
            if key not in seen:
                if len(seen) >= max_count:
                    raise SurfaceError(f"more than {max_count} triangulations")
                seen[key] = nxt
                queue.append(nxt)
    return list(seen.values())


def flip_graph_edges(tris: List[Triangulation]) -> List[Tuple[int, int]]:
    """Edges of the flip graph on the given (deduplicated) triangulations."""
    index = {t.canonical_key(): i for i, t in enumerate(tris)}
    edges = set()
    for i, tri in enumerate(tris):
        for label in range(1, tri.num_arcs + 1):
            j = index[tri.flip(label).canonical_key()]
            if i != j:
                edges.add((min(i, j), max(i, j)))
    return sorted(edges)
