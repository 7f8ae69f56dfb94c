"""The string model: closed arcs as reduced crossing sequences against a base
triangulation, and the translation arc -> minimal dg module -> arc.

A general closed arc is stored as the ordered list of base arcs it crosses,
plus one traversal record per consecutive pair.  A record says which triangle
the segment runs through, the entry and exit side slots, and the winding
class ``omega`` of the segment relative to the triangle's decorating point:

* distinct sides, ``omega == 0``: the segment cuts the corner shared by the
  two sides (the decoration sits on the other side);
* distinct sides, ``omega == -1`` (counterclockwise slot pair) or ``+1``
  (clockwise pair): the segment passes around the decoration;
* equal sides: the segment wraps the decoration and returns through the same
  arc, ``omega = +1`` for a counterclockwise loop, ``-1`` for clockwise;
  ``omega == 0`` is the removable digon configuration.

Conventions are pinned by the requirement that every reduced word yields a
square-zero differential and by the regression examples of the hexagon star:
inside a triangle the induced map runs in the clockwise direction, using the
quiver arrow (degree 1) for corner cuts, the reversed dual (degree 2) for
wrapping segments and the degree-3 loop for same-side wraps.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import CY3Algebra, build_cy3
from .dgmod import DGModule, simple_module
from .surface import ARC, MarkedSurface, SchemeError, Triangulation, standard_triangulation


class WordError(ValueError):
    pass


class NonSimpleWordError(WordError):
    """Reduction produced a winding that no simple curve can realise."""


class TrivialArcError(WordError):
    """The word contracts to a constant curve."""


class NotAStringError(ValueError):
    """Module whose differential graph is not a single arrow path."""


class DecomposeError(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    triangle: int
    entry: int
    exit: int
    omega: int

    def reversed(self) -> "Step":
        return Step(self.triangle, self.exit, self.entry, -self.omega)

    def as_tuple(self):
        return (self.triangle, self.entry, self.exit, self.omega)


def _wrap_omega(entry: int, exit: int) -> int:
    """Winding of the simple wrapping segment between two distinct slots."""
    return -1 if exit == (entry + 1) % 3 else 1


class CrossingWord:
    """Crossing sequence of a curve between decorating points.

    Strict words are reduced (no digon records) and every record carries a
    simple-segment winding; non-strict words are intermediate states for the
    digon reducer.
    """

    def __init__(self, tri: Triangulation, crossings: Sequence[int],
                 steps: Sequence[Step], strict: bool = True):
        self.tri = tri
        self.crossings: Tuple[int, ...] = tuple(crossings)
        self.steps: Tuple[Step, ...] = tuple(steps)
        self._validate(strict)

    def _validate(self, strict: bool):
        m = len(self.crossings)
        if m < 1:
            raise WordError("a word needs at least one crossing")
        if len(self.steps) != m - 1:
            raise WordError("need exactly one traversal record per consecutive pair")
        for i, step in enumerate(self.steps):
            tri_sides = self.tri.sides[step.triangle]
            if tri_sides[step.entry] != (ARC, self.crossings[i]):
                raise WordError(
                    f"record {i}: entry slot does not hold arc {self.crossings[i]}")
            if tri_sides[step.exit] != (ARC, self.crossings[i + 1]):
                raise WordError(
                    f"record {i}: exit slot does not hold arc {self.crossings[i + 1]}")
            if strict:
                if step.entry == step.exit:
                    if step.omega == 0:
                        raise WordError(f"record {i}: digon (unreduced word)")
                    if step.omega not in (-1, 1):
                        raise NonSimpleWordError(f"record {i}: winding {step.omega}")
                elif step.omega not in (0, _wrap_omega(step.entry, step.exit)):
                    raise NonSimpleWordError(f"record {i}: winding {step.omega}")
            if i > 0:
                prev = self.steps[i - 1]
                expected = self.tri.opposite(prev.triangle, prev.exit)
                if (step.triangle, step.entry) != expected:
                    raise WordError(f"record {i}: does not chain across arc "
                                    f"{self.crossings[i]}")

    # -- derived data --------------------------------------------------------

    @property
    def length(self) -> int:
        return len(self.crossings)

    def is_reduced(self) -> bool:
        return all(not (s.entry == s.exit and s.omega == 0) for s in self.steps)

    def endpoints(self) -> Tuple[int, int]:
        """Decorating points at the two ends (start, end)."""
        tri = self.tri
        if len(self.crossings) == 1:
            (t1, _), (t2, _) = tri.arc_slots(self.crossings[0])
            return tri.decoration_of(t1), tri.decoration_of(t2)
        first = self.steps[0]
        t_start, _ = tri.opposite(first.triangle, first.entry)
        last = self.steps[-1]
        t_end, _ = tri.opposite(last.triangle, last.exit)
        return tri.decoration_of(t_start), tri.decoration_of(t_end)

    def reversed(self) -> "CrossingWord":
        return CrossingWord(self.tri, tuple(reversed(self.crossings)),
                            tuple(s.reversed() for s in reversed(self.steps)),
                            strict=False)

    def as_tuple(self):
        return (self.crossings, tuple(s.as_tuple() for s in self.steps))

    def __eq__(self, other):
        return isinstance(other, CrossingWord) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f"CrossingWord({self.format()})"

    # -- text form -----------------------------------------------------------

    def format(self) -> str:
        bits = [str(self.crossings[0])]
        for i, s in enumerate(self.steps):
            if s.entry == s.exit:
                tag = "w+" if s.omega > 0 else ("w-" if s.omega < 0 else "w0")
                bits.append(f"({s.triangle}:{s.entry}>{s.exit}:{tag})")
            elif s.omega != 0:
                bits.append(f"({s.triangle}:{s.entry}>{s.exit}:w)")
            else:
                bits.append(f"({s.triangle}:{s.entry}>{s.exit})")
            bits.append(str(self.crossings[i + 1]))
        return " ".join(bits)

    @staticmethod
    def parse(tri: Triangulation, text: str, strict: bool = True) -> "CrossingWord":
        tokens = text.split()
        crossings: List[int] = []
        steps: List[Step] = []
        expect_crossing = True
        for tok in tokens:
            if expect_crossing:
                crossings.append(int(tok))
            else:
                if not (tok.startswith("(") and tok.endswith(")")):
                    raise WordError(f"expected record token, got {tok!r}")
                parts = tok[1:-1].split(":")
                t = int(parts[0])
                entry, exit = (int(x) for x in parts[1].split(">"))
                omega = 0
                if len(parts) > 2:
                    tag = parts[2]
                    if tag == "w":
                        omega = _wrap_omega(entry, exit)
                    elif tag == "w+":
                        omega = 1
                    elif tag == "w-":
                        omega = -1
                    elif tag == "w0":
                        omega = 0
                    else:
                        raise WordError(f"bad record tag {tag!r}")
                steps.append(Step(t, entry, exit, omega))
            expect_crossing = not expect_crossing
        if expect_crossing:
            raise WordError("word ends with a record")
        return CrossingWord(tri, crossings, steps, strict=strict)

    def to_json(self) -> dict:
        return {
            "crossings": list(self.crossings),
            "records": [list(s.as_tuple()) for s in self.steps],
        }

    @staticmethod
    def from_json(tri: Triangulation, data) -> "CrossingWord":
        steps = [Step(*rec) for rec in data["records"]]
        return CrossingWord(tri, data["crossings"], steps)


class ArcClass:
    """Isotopy-class key: a crossing word up to orientation reversal."""

    def __init__(self, word: CrossingWord):
        if not word.is_reduced():
            raise WordError("arc classes need reduced words")
        rev = word.reversed()
        best = min(word.as_tuple(), rev.as_tuple())
        self.word = CrossingWord(word.tri, best[0], [Step(*s) for s in best[1]])

    def as_tuple(self):
        return self.word.as_tuple()

    def __eq__(self, other):
        return isinstance(other, ArcClass) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f"ArcClass({self.word.format()})"

    @property
    def length(self) -> int:
        return self.word.length

    def endpoints(self) -> Tuple[int, int]:
        return self.word.endpoints()

    def is_closed_arc(self) -> bool:
        """Distinct endpoints (not an L-arc)."""
        a, b = self.word.endpoints()
        return a != b


# ---------------------------------------------------------------------------
# base context


class Base:
    """A valid initial triangulation with its graded algebra and caches."""

    def __init__(self, surface: MarkedSurface, scheme: str, field):
        self.surface = surface
        self.scheme = scheme
        self.tri = standard_triangulation(surface, scheme)
        self.quiver = self.tri.quiver()
        self.algebra: CY3Algebra = build_cy3(self.quiver)
        self.field = field
        self.twist_cache: Dict = {}

    @property
    def n(self) -> int:
        return self.surface.num_arcs

    def simple(self, vertex: int, shift_by: int = 0) -> DGModule:
        return simple_module(self.algebra, self.field, vertex, shift_by)

    def dual_arc(self, i: int) -> ArcClass:
        """The closed arc crossing base arc i exactly once."""
        return ArcClass(CrossingWord(self.tri, (i,), ()))

    def dual_arcs(self) -> List[ArcClass]:
        return [self.dual_arc(i) for i in range(1, self.n + 1)]


# ---------------------------------------------------------------------------
# word -> module


def _step_data(base: Base, word: CrossingWord, i: int):
    """(element, forward) for record i; forward means the induced map runs
    from crossing i to crossing i+1."""
    E = base.algebra
    step = word.steps[i]
    ji, jn = word.crossings[i], word.crossings[i + 1]
    if step.entry == step.exit:
        elem = E.hom_basis[(ji, ji, 3)]
        return elem, step.omega == -1
    if step.omega == 0:
        if step.entry == (step.exit + 1) % 3:
            return E.hom_basis[(ji, jn, 1)], True
        return E.hom_basis[(jn, ji, 1)], False
    if step.exit == (step.entry + 1) % 3:
        return E.hom_basis[(ji, jn, 2)], True
    return E.hom_basis[(jn, ji, 2)], False


def build_string(base: Base, word, base_shift: int = 0) -> DGModule:
    """Minimal dg module of a reduced crossing word."""
    if isinstance(word, ArcClass):
        word = word.word
    if word.tri is not base.tri and word.tri.to_json() != base.tri.to_json():
        raise WordError("word was written against a different base triangulation")
    if not word.is_reduced():
        raise WordError("word is not reduced")
    E, F = base.algebra, base.field
    m = word.length
    shifts = [base_shift] * m
    entries: Dict[Tuple[int, int], object] = {}
    for i in range(m - 1):
        elem, forward = _step_data(base, word, i)
        deg = E.basis[elem].degree
        if forward:
            shifts[i + 1] = shifts[i] + deg - 1
            entries[(i, i + 1)] = F.one
        else:
            shifts[i + 1] = shifts[i] - deg + 1
            entries[(i + 1, i)] = F.one
    summands = tuple((word.crossings[i], shifts[i]) for i in range(m))
    return DGModule(E, F, summands, entries)


# ---------------------------------------------------------------------------
# module -> word


def _is_path_graph(X: DGModule) -> bool:
    m = len(X.summands)
    if m == 1:
        return not X.diff
    deg: Dict[int, int] = {k: 0 for k in range(m)}
    for (k, l) in X.diff:
        deg[k] += 1
        deg[l] += 1
    if len(X.diff) != m - 1:
        return False
    if sorted(deg.values()) != [1, 1] + [2] * (m - 2):
        return False
    try:
        _path_order(X)
    except NotAStringError:
        return False
    return True


def _diff_key(diff, hashable):
    return tuple(sorted((k, l, hashable(s)) for (k, l), s in diff.items()))


class _Straightener:
    """Searches for a change of basis putting a minimal module in string form.

    Moves: Gaussian elimination between summands of equal (vertex, shift)
    class, and unipotent substitutions trading one differential entry for
    entries that factor through it.  The goal state is an arrow path; bad
    move orders are undone by backtracking, bounded by a node budget.
    """

    NODE_BUDGET = 4000

    def __init__(self, X: DGModule):
        self.E, self.F = X.E, X.F
        self.summands = X.summands
        self.start = dict(X.diff)

    def elem(self, diff_unused, a, b):
        va, sa = self.summands[a]
        vb, sb = self.summands[b]
        return self.E.hom_basis.get((va, vb, 1 - sa + sb))

    # -- moves ---------------------------------------------------------------

    def moves(self, diff):
        out = []
        by_target: Dict[tuple, List[int]] = {}
        by_source: Dict[tuple, List[int]] = {}
        for (k, l) in sorted(diff):
            by_target.setdefault((l, self.summands[k]), []).append(k)
            by_source.setdefault((k, self.summands[l]), []).append(l)
        for (l, _), ks in sorted(by_target.items()):
            for pivot in ks:
                for other in ks:
                    if other != pivot:
                        out.append(("in", pivot, other, l))
        for (k, _), ls in sorted(by_source.items()):
            for pivot in ls:
                for other in ls:
                    if other != pivot:
                        out.append(("out", k, pivot, other))
        for (a, b) in sorted(diff):
            # variant A: kill (a,b) through an entry (mid -> b)
            for (mid, b2) in sorted(diff):
                if b2 != b or mid == a:
                    continue
                q = -self.summands[a][1] + self.summands[mid][1]
                if q <= 0:
                    continue
                g_el = self.E.hom_basis.get(
                    (self.summands[a][0], self.summands[mid][0], q))
                if g_el is None:
                    continue
                if self.E.mul(self.elem(diff, mid, b), g_el) != self.elem(diff, a, b):
                    continue
                out.append(("uniA", a, b, mid, g_el))
            # variant B: kill (a,b) through an entry (a -> mid)
            for (a2, mid) in sorted(diff):
                if a2 != a or mid == b:
                    continue
                q = -self.summands[mid][1] + self.summands[b][1]
                if q <= 0:
                    continue
                g_el = self.E.hom_basis.get(
                    (self.summands[mid][0], self.summands[b][0], q))
                if g_el is None:
                    continue
                if self.E.mul(g_el, self.elem(diff, a, mid)) != self.elem(diff, a, b):
                    continue
                out.append(("uniB", a, b, mid, g_el))
        return out

    def apply(self, diff, move):
        F = self.F
        diff = dict(diff)

        def set_entry(k, l, val):
            if F.is_zero(val):
                diff.pop((k, l), None)
            else:
                diff[(k, l)] = val

        kind = move[0]
        if kind == "in":
            _, k1, k2, l = move
            c = F.div(diff[(k2, l)], diff[(k1, l)])
            for (a, b), s in list(diff.items()):
                if a == k1:
                    set_entry(k2, b, F.sub(diff.get((k2, b), F.zero), F.mul(c, s)))
            for (a, b), s in list(diff.items()):
                if b == k2:
                    set_entry(a, k1, F.add(diff.get((a, k1), F.zero), F.mul(c, s)))
            return diff
        if kind == "out":
            _, k, l1, l2 = move
            c = F.div(diff[(k, l2)], diff[(k, l1)])
            for (a, b), s in list(diff.items()):
                if b == l1:
                    set_entry(a, l2, F.sub(diff.get((a, l2), F.zero), F.mul(c, s)))
            for (a, b), s in list(diff.items()):
                if a == l2:
                    set_entry(l1, b, F.add(diff.get((l1, b), F.zero), F.mul(c, s)))
            return diff
        _, a, b, mid, g_el = move
        if kind == "uniA":
            gamma = F.div(diff[(a, b)], diff[(mid, b)])
            src, tgt = a, mid
        else:
            gamma = F.neg(F.div(diff[(a, b)], diff[(a, mid)]))
            src, tgt = mid, b
        # conjugate by 1 + gamma*g with g: src -> tgt: d' = d - d.g + g.d - g.d.g
        updates: Dict[Tuple[int, int], object] = {}
        for (k, l), s in diff.items():
            if k == tgt:
                prod = self.E.mul(self.elem(diff, tgt, l), g_el)
                if prod is not None:
                    updates[(src, l)] = F.sub(
                        updates.get((src, l), F.zero), F.mul(gamma, s))
            if l == src:
                prod = self.E.mul(g_el, self.elem(diff, k, src))
                if prod is not None:
                    updates[(k, tgt)] = F.add(
                        updates.get((k, tgt), F.zero), F.mul(gamma, s))
        s_ts = diff.get((tgt, src))
        if s_ts is not None:
            inner = self.E.mul(self.elem(diff, tgt, src), g_el)
            if inner is not None and self.E.mul(g_el, inner) is not None:
                updates[(src, tgt)] = F.sub(
                    updates.get((src, tgt), F.zero),
                    F.mul(F.mul(gamma, gamma), s_ts))
        for (k, l), delta in updates.items():
            set_entry(k, l, F.add(diff.get((k, l), F.zero), delta))
        return diff

    # -- search ----------------------------------------------------------------

    def violation(self, diff) -> int:
        """Distance-to-path heuristic: excess vertex degrees plus excess
        entry count."""
        m = len(self.summands)
        deg = [0] * m
        for (k, l) in diff:
            deg[k] += 1
            deg[l] += 1
        score = sum(max(0, d - 2) for d in deg)
        score += abs(len(diff) - (m - 1))
        return score

    def search(self, goal):
        """Best-first over move sequences, guided by the path-violation
        heuristic; ``goal(module)`` returns a final value or None."""
        import heapq

        hashable = (lambda s: s) if isinstance(self.F.zero, int) else \
            (lambda s: (s.numerator, s.denominator))
        seen = set()
        budget = self.NODE_BUDGET
        counter = 0
        heap = [(self.violation(self.start), 0, self.start)]
        while heap and budget > 0:
            _, _, diff = heapq.heappop(heap)
            key = _diff_key(diff, hashable)
            if key in seen:
                continue
            seen.add(key)
            budget -= 1
            module = DGModule(self.E, self.F, self.summands, diff, check=False)
            if _is_path_graph(module):
                value = goal(module)
                if value is not None:
                    return value
            for move in self.moves(diff):
                child = self.apply(diff, move)
                counter += 1
                heapq.heappush(heap, (self.violation(child), counter, child))
        return None


def _path_order(X: DGModule) -> List[int]:
    m = len(X.summands)
    nbrs: Dict[int, List[int]] = {k: [] for k in range(m)}
    for (k, l) in X.diff:
        nbrs[k].append(l)
        nbrs[l].append(k)
    if m == 1:
        return [0]
    ends = [k for k in range(m) if len(nbrs[k]) == 1]
    if len(ends) != 2 or any(len(v) > 2 for v in nbrs.values()):
        raise NotAStringError("differential graph is not a path")
    order = [min(ends)]
    prev = None
    while len(order) < m:
        cur = order[-1]
        nxt = [x for x in nbrs[cur] if x != prev]
        if len(nxt) != 1:
            raise NotAStringError("differential graph is not a path")
        prev = cur
        order.append(nxt[0])
    if len(set(order)) != m:
        raise NotAStringError("differential graph is not a path")
    return order


def decode_string(base: Base, X: DGModule) -> Tuple[ArcClass, int]:
    """Recover the crossing word of a string module, with its base shift.

    The module may be any minimal representative of a string: if its
    differential graph is not already an arrow path, a change-of-basis search
    brings it to geometric string form.  Same-side wrap records carry no
    triangle information of their own; the triangle is forced by chaining
    with the neighbouring records, and for words consisting only of such
    records the smaller triangle index is used (the two chain choices encode
    the two ends of the same arc).
    """
    X.assert_minimal()
    if X.is_zero:
        raise NotAStringError("zero module")
    if _is_path_graph(X):
        try:
            return _word_from_path(base, X)
        except (NotAStringError, WordError):
            pass

    def goal(module):
        try:
            return _word_from_path(base, module)
        except (NotAStringError, WordError):
            return None

    result = _Straightener(X).search(goal)
    if result is None:
        raise NotAStringError("module did not straighten to a string")
    return result


def _word_from_path(base: Base, X: DGModule) -> Tuple[ArcClass, int]:
    E = base.algebra
    order = _path_order(X)
    m = len(order)
    crossings = [X.summands[k][0] for k in order]
    raw: List[Tuple[Optional[int], Optional[int], Optional[int], int]] = []
    for a in range(m - 1):
        k, l = order[a], order[a + 1]
        if (k, l) in X.diff:
            forward, elem = True, X.entry_element(k, l)
        elif (l, k) in X.diff:
            forward, elem = False, X.entry_element(l, k)
        else:
            raise NotAStringError("missing differential entry along the path")
        el = E.basis[elem]
        if el.kind == "arrow":
            arrow = E.arrows[el.arrow]
            t = arrow.triangle
            entry = base.tri.slot_of_arc_in_triangle(t, crossings[a])
            exit = base.tri.slot_of_arc_in_triangle(t, crossings[a + 1])
            raw.append((t, entry, exit, 0))
        elif el.kind == "dual":
            arrow = E.arrows[el.arrow]
            t = arrow.triangle
            entry = base.tri.slot_of_arc_in_triangle(t, crossings[a])
            exit = base.tri.slot_of_arc_in_triangle(t, crossings[a + 1])
            raw.append((t, entry, exit, _wrap_omega(entry, exit)))
        elif el.kind == "loop":
            raw.append((None, None, None, -1 if forward else 1))
        else:
            raise NotAStringError("scalar entry in a minimal module")
    # resolve same-side records by chaining
    steps: List[Optional[Step]] = [
        Step(*r) if r[0] is not None else None for r in raw
    ]
    known = [i for i, s in enumerate(steps) if s is not None]
    if not known and steps:
        slots = base.tri.arc_slots(crossings[0])
        t, slot = min(slots)
        steps[0] = Step(t, slot, slot, raw[0][3])
        known = [0]
    for i in range(m - 1):
        if steps[i] is None and i > 0 and steps[i - 1] is not None:
            t, slot = base.tri.opposite(steps[i - 1].triangle, steps[i - 1].exit)
            steps[i] = Step(t, slot, slot, raw[i][3])
    for i in range(m - 3, -1, -1):
        if steps[i] is None and steps[i + 1] is not None:
            t, slot = base.tri.opposite(steps[i + 1].triangle, steps[i + 1].entry)
            steps[i] = Step(t, slot, slot, raw[i][3])
    if any(s is None for s in steps):
        raise NotAStringError("could not chain same-side records")
    word = CrossingWord(base.tri, crossings, steps)
    arc = ArcClass(word)
    if arc.word.as_tuple() == word.as_tuple():
        base_shift = X.summands[order[0]][1]
    else:
        base_shift = X.summands[order[-1]][1]
    return arc, base_shift


# ---------------------------------------------------------------------------
# decomposition at a decorating point


def _decoration_on_left(step: Step) -> bool:
    """Side of the traversal on which the decorating point lies."""
    if step.entry == step.exit:
        return step.omega > 0
    ccw = step.exit == (step.entry + 1) % 3
    if step.omega == 0:
        return ccw
    return not ccw


def decompose(base: Base, word) -> Tuple[CrossingWord, CrossingWord, int]:
    """Split a multi-crossing word at a decorating point that is not one of
    its endpoints, returning (alpha, beta, decoration) with the twist of beta
    along alpha giving back the input arc."""
    if isinstance(word, ArcClass):
        word = word.word
    if word.length < 2:
        raise DecomposeError("single-crossing words do not decompose")
    z_start, z_end = word.endpoints()
    for i, step in enumerate(word.steps):
        z0 = base.tri.decoration_of(step.triangle)
        if z0 in (z_start, z_end):
            continue
        prefix = CrossingWord(base.tri, word.crossings[: i + 1], word.steps[:i])
        suffix = CrossingWord(base.tri, word.crossings[i + 1:], word.steps[i + 1:])
        if _decoration_on_left(step):
            alpha, beta = suffix, prefix
        else:
            alpha, beta = prefix, suffix
        return alpha, beta, z0
    raise DecomposeError("no interior decorating point to split at")


# ---------------------------------------------------------------------------
# intersection counts


def int_with_base(word) -> Tuple[Dict[int, int], int]:
    """Per-arc crossing counts and the total."""
    if isinstance(word, ArcClass):
        word = word.word
    counts = dict(Counter(word.crossings))
    return counts, word.length


def int_delta(w1, w2) -> Fraction:
    """Half the number of coincident endpoint pairs at decorating points."""
    if isinstance(w1, ArcClass):
        w1 = w1.word
    if isinstance(w2, ArcClass):
        w2 = w2.word
    c1 = Counter(w1.endpoints())
    c2 = Counter(w2.endpoints())
    total = sum(c1[z] * c2[z] for z in c1)
    return Fraction(total, 2)


# ---------------------------------------------------------------------------
# digon reduction


def _merge_steps(s1: Step, s2: Step) -> Step:
    """Homotopy class of the composite segment across a cancelled digon."""
    if s1.triangle != s2.triangle or s1.exit != s2.entry:
        raise WordError("records do not meet at a common slot")
    a, u, b = s1.entry, s1.exit, s2.exit
    omega = s1.omega + s2.omega
    if a != u and u != b and a != b:
        omega += 1 if u == (a + 1) % 3 else -1
    return Step(s1.triangle, a, b, omega)


def reduce_word(base: Base, word: CrossingWord, rng=None) -> CrossingWord:
    """Remove digon configurations until the word is reduced.

    The normal form does not depend on the removal order; pass an ``rng`` to
    randomise the order (used by the confluence tests).  Raises
    ``NonSimpleWordError`` when the reduced word is not realisable by an
    embedded curve, and ``TrivialArcError`` when the curve contracts away.
    """
    crossings = list(word.crossings)
    steps = list(word.steps)
    while True:
        digons = [i for i, s in enumerate(steps) if s.entry == s.exit and s.omega == 0]
        if not digons:
            break
        i = digons[0] if rng is None else rng.choice(digons)
        if len(crossings) == 2:
            raise TrivialArcError("word reduces to a constant curve")
        if i == 0:
            crossings = crossings[2:]
            steps = steps[2:]
        elif i == len(steps) - 1:
            crossings = crossings[:-2]
            steps = steps[:-2]
        else:
            merged = _merge_steps(steps[i - 1], steps[i + 1])
            crossings = crossings[:i] + crossings[i + 2:]
            steps = steps[: i - 1] + [merged] + steps[i + 2:]
        if not crossings:
            raise TrivialArcError("word reduces to a constant curve")
    return CrossingWord(base.tri, crossings, steps)


def insert_digon(base: Base, word: CrossingWord, rng) -> CrossingWord:
    """Isotope the curve across one extra digon (inverse of one reduction)."""
    tri = base.tri
    m = word.length
    choices: List[tuple] = []
    # interior insertions: split step i at a slot u of its triangle
    for i, step in enumerate(word.steps):
        for u in range(3):
            if tri.sides[step.triangle][u][0] != ARC:
                continue
            a, b = step.entry, step.exit
            eps = 0
            if a != u and u != b and a != b:
                eps = 1 if u == (a + 1) % 3 else -1
            target = step.omega - eps
            for om1 in (-1, 0, 1):
                om2 = target - om1
                s1 = Step(step.triangle, a, u, om1)
                s2 = Step(step.triangle, u, b, om2)
                if _legal(s1) and _legal(s2):
                    choices.append(("mid", i, u, om1, om2))
    # end insertions
    for where in ("start", "end"):
        w = word if where == "start" else word.reversed()
        if w.length == 1:
            slots = tri.arc_slots(w.crossings[0])
        else:
            slots = [tri.opposite(w.steps[0].triangle, w.steps[0].entry)]
        for (t_s, j_slot) in slots:
            for u in range(3):
                if tri.sides[t_s][u][0] != ARC:
                    continue
                for om in (-1, 0, 1):
                    s = Step(t_s, u, j_slot, om)
                    if u == j_slot and om == 0:
                        continue
                    if _legal(s):
                        choices.append(("end", where, t_s, u, j_slot, om))
    kind, *data = rng.choice(choices)
    if kind == "mid":
        i, u, om1, om2 = data
        step = word.steps[i]
        label = tri.sides[step.triangle][u][1]
        t_opp, slot_opp = tri.opposite(step.triangle, u)
        crossings = (word.crossings[: i + 1] + (label, label) + word.crossings[i + 1:])
        steps = (word.steps[:i]
                 + (Step(step.triangle, step.entry, u, om1),
                    Step(t_opp, slot_opp, slot_opp, 0),
                    Step(step.triangle, u, step.exit, om2))
                 + word.steps[i + 1:])
        return CrossingWord(tri, crossings, steps, strict=False)
    where, t_s, u, j_slot, om = data
    w = word if where == "start" else word.reversed()
    label = tri.sides[t_s][u][1]
    t_opp, slot_opp = tri.opposite(t_s, u)
    crossings = (label, label) + w.crossings
    steps = (Step(t_opp, slot_opp, slot_opp, 0), Step(t_s, u, j_slot, om)) + w.steps
    out = CrossingWord(tri, crossings, steps, strict=False)
    return out if where == "start" else out.reversed()


def _legal(step: Step) -> bool:
    if step.entry == step.exit:
        return step.omega in (-1, 1)
    return step.omega in (0, _wrap_omega(step.entry, step.exit))
