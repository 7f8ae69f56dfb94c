"""The finite-dimensional graded endomorphism algebra of a quiver with
potential, together with an exportable symbolic description of the associated
dg algebra on the tripled quiver.

Basis of the graded algebra, per ordered vertex pair:

* degree 0: an idempotent ``e_i`` at each vertex;
* degree 1: one element per quiver arrow ``i -> j``;
* degree 2: one element per quiver arrow, running backwards (its dual);
* degree 3: a loop ``w_i`` at each vertex.

Products are composition read right-to-left: ``mul(x, y)`` is "y then x".
The nonzero products of positive-degree elements are: two path-consecutive
degree-1 arrows of a potential 3-cycle compose to the degree-2 dual of the
third arrow, and every arrow composes with its own dual (either order) to the
degree-3 loop at the matching endpoint.  All structure constants are +1;
associativity is checked exhaustively at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .surface import Arrow, QuiverWithPotential


class AlgebraError(ValueError):
    pass


class UnsupportedConfigurationError(AlgebraError):
    """Quiver shape outside the supported class (double arrows, 2-cycles)."""


@dataclass(frozen=True)
class BasisElement:
    index: int
    kind: str  # "e" | "arrow" | "dual" | "loop"
    source: int
    target: int
    degree: int
    name: str
    arrow: Optional[int] = None  # underlying quiver-arrow index for arrow/dual


def _arrow_names(count: int) -> List[str]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    if count <= len(letters):
        return list(letters[:count])
    return [f"a{k}" for k in range(1, count + 1)]


class CY3Algebra:
    """Graded algebra with nondegenerate degree-3 pairing, from (Q, W)."""

    def __init__(self, qp: QuiverWithPotential):
        if qp.has_loops:
            raise UnsupportedConfigurationError("quiver has loops")
        if qp.has_double_arrows or qp.has_two_cycles:
            raise UnsupportedConfigurationError(
                "double arrows are not supported; pick a base triangulation "
                "in which any two triangles share at most one edge"
            )
        for term in qp.potential:
            if len(term) != 3:
                raise AlgebraError("potential terms must be 3-cycles")
        self.qp = qp
        self.n = qp.num_vertices
        # canonical arrow order (pinned by the regression table of the
        # 3-cycle differential): descending (target, source); names a, b, ...
        order = sorted(range(len(qp.arrows)),
                       key=lambda k: (qp.arrows[k].target, qp.arrows[k].source),
                       reverse=True)
        self.arrows: List[Arrow] = [qp.arrows[k] for k in order]
        old_to_new = {old: new for new, old in enumerate(order)}
        self.potential: List[Tuple[int, int, int]] = [
            tuple(old_to_new[k] for k in term) for term in qp.potential
        ]
        self.arrow_names = _arrow_names(len(self.arrows))

        self.basis: List[BasisElement] = []
        self.unit_ids: Dict[int, int] = {}
        self.loop_ids: Dict[int, int] = {}
        self.arrow_ids: List[int] = []
        self.dual_ids: List[int] = []

        def add(kind, src, tgt, deg, name, arrow=None) -> int:
            el = BasisElement(len(self.basis), kind, src, tgt, deg, name, arrow)
            self.basis.append(el)
            return el.index

        for v in range(1, self.n + 1):
            self.unit_ids[v] = add("e", v, v, 0, f"e_{v}")
        for k, a in enumerate(self.arrows):
            self.arrow_ids.append(add("arrow", a.source, a.target, 1, self.arrow_names[k], k))
        for k, a in enumerate(self.arrows):
            self.dual_ids.append(add("dual", a.target, a.source, 2, self.arrow_names[k] + "*", k))
        for v in range(1, self.n + 1):
            self.loop_ids[v] = add("loop", v, v, 3, f"w_{v}")

        # (source, target, degree) -> basis index; collisions impossible
        # without double arrows / 2-cycles
        self.hom_basis: Dict[Tuple[int, int, int], int] = {}
        for el in self.basis:
            key = (el.source, el.target, el.degree)
            if key in self.hom_basis:
                raise UnsupportedConfigurationError(f"basis collision at {key}")
            self.hom_basis[key] = el.index

        self._mult: Dict[Tuple[int, int], int] = {}
        self._build_products()
        self._check_associativity()
        self._check_pairing()

    # -- multiplication ----------------------------------------------------

    def _consecutive_in_potential(self, first: int, second: int) -> Optional[int]:
        """Third arrow of a potential term whose path contains 'first then
        second' consecutively (cyclically)."""
        for term in self.potential:
            for k in range(3):
                if term[k] == first and term[(k + 1) % 3] == second:
                    return term[(k + 2) % 3]
        return None

    def _build_products(self):
        for k in range(len(self.arrows)):
            a_id = self.arrow_ids[k]
            d_id = self.dual_ids[k]
            arr = self.arrows[k]
            # "arrow then its dual" closes at the source; the other order at
            # the target
            self._mult[(d_id, a_id)] = self.loop_ids[arr.source]
            self._mult[(a_id, d_id)] = self.loop_ids[arr.target]
        for first in range(len(self.arrows)):
            for second in range(len(self.arrows)):
                third = self._consecutive_in_potential(first, second)
                if third is not None:
                    # (first then second) = dual of the remaining arrow
                    self._mult[(self.arrow_ids[second], self.arrow_ids[first])] = \
                        self.dual_ids[third]

    def mul(self, x: int, y: int) -> Optional[int]:
        """Basis product x*y ("y then x"); None means zero.

        All nonzero structure constants are +1, so the scalar is implicit.
        """
        ex, ey = self.basis[x], self.basis[y]
        if ey.target != ex.source:
            return None
        if ex.kind == "e":
            return y
        if ey.kind == "e":
            return x
        if ex.degree + ey.degree > 3:
            return None
        return self._mult.get((x, y))

    # -- construction-time checks ------------------------------------------

    def _check_associativity(self):
        dim = len(self.basis)
        for x in range(dim):
            for y in range(dim):
                xy = self.mul(x, y)
                for z in range(dim):
                    yz = self.mul(y, z)
                    left = self.mul(xy, z) if xy is not None else None
                    right = self.mul(x, yz) if yz is not None else None
                    if left != right:
                        raise AlgebraError(
                            f"associativity fails on ({self.basis[x].name}, "
                            f"{self.basis[y].name}, {self.basis[z].name})"
                        )

    def _check_pairing(self):
        for el in self.basis:
            partners = []
            for other in self.basis:
                if other.degree != 3 - el.degree:
                    continue
                prod = self.mul(other.index, el.index)
                if prod is not None and self.basis[prod].kind == "loop":
                    partners.append(other)
            if len(partners) != 1:
                raise AlgebraError(f"pairing degenerate at {el.name}")

    # -- queries -------------------------------------------------------------

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def hom_dim_table(self) -> Dict[Tuple[int, int], Tuple[int, int, int, int]]:
        """Per-degree dimensions of e_j E e_i, keyed by (i, j)."""
        table = {}
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                dims = [0, 0, 0, 0]
                for d in range(4):
                    if (i, j, d) in self.hom_basis:
                        dims[d] += 1
                table[(i, j)] = tuple(dims)
        return table

    def ext_quiver_dot(self) -> str:
        lines = ["digraph ext_quiver {"]
        for v in range(1, self.n + 1):
            lines.append(f'  {v} [label="S{v}"];')
        for el in self.basis:
            if el.degree in (1, 2):
                lines.append(f'  {el.source} -> {el.target} [label="{el.degree}"];')
            elif el.degree == 3:
                lines.append(f'  {el.source} -> {el.target} [label="3"];')
        lines.append("}")
        return "\n".join(lines)


def build_cy3(qp: QuiverWithPotential) -> CY3Algebra:
    return CY3Algebra(qp)


# ---------------------------------------------------------------------------
# symbolic dg-algebra export


@dataclass(frozen=True)
class GinzburgData:
    """Symbolic description of the tripled graded quiver and its differential.

    Degree 0 arrows are the quiver arrows; each has a degree -1 reverse
    (starred) and each vertex carries a degree -2 loop f_i.  Words multiply
    right-to-left, so the juxtaposition ``bc`` means "c then b".
    """

    vertices: int
    arrows: Tuple[Tuple[str, int, int], ...]       # (name, source, target)
    dual_arrows: Tuple[Tuple[str, int, int], ...]  # (name*, target, source)
    loops: Tuple[str, ...]                         # f_i per vertex
    differential: Tuple[Tuple[str, str], ...]      # (generator, value)

    def table(self) -> str:
        return "\n".join(f"d({g}) = {v}" for g, v in self.differential)


def ginzburg_export(qp: QuiverWithPotential) -> GinzburgData:
    E = CY3Algebra(qp)  # reuse canonical arrow order and names
    names = E.arrow_names
    arrows = tuple((names[k], a.source, a.target) for k, a in enumerate(E.arrows))
    duals = tuple((names[k] + "*", a.target, a.source) for k, a in enumerate(E.arrows))
    loops = tuple(f"f_{v}" for v in range(1, E.n + 1))

    diff: List[Tuple[str, str]] = []
    for k, _ in enumerate(E.arrows):
        diff.append((names[k], "0"))
    # word of a potential term: reversed path order, rotated to start with the
    # alphabetically first arrow
    words = []
    for term in E.potential:
        word = [names[k] for k in reversed(term)]
        start = min(range(3), key=lambda i: word[i])
        words.append(word[start:] + word[:start])
    for k, _ in enumerate(E.arrows):
        parts = []
        for word in words:
            if names[k] in word:
                i = word.index(names[k])
                rest = word[i + 1:] + word[:i]
                parts.append("".join(rest))
        diff.append((names[k] + "*", " + ".join(parts) if parts else "0"))
    for v in range(1, E.n + 1):
        plus = [f"{names[k]}{names[k]}*" for k, a in enumerate(E.arrows) if a.target == v]
        minus = [f"{names[k]}*{names[k]}" for k, a in enumerate(E.arrows) if a.source == v]
        if plus:
            text = " + ".join(plus)
        elif minus:
            text = ""
        else:
            text = "0"
        for i, m in enumerate(minus):
            text += f"-{m}" if (not plus and i == 0) else f" - {m}"
        diff.append((f"f_{v}", text))
    return GinzburgData(E.n, arrows, duals, loops, tuple(diff))
