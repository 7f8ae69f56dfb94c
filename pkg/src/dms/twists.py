"""Spherical twists, the induced action of braid words on closed arcs, and
verification of twist-group relations on probe fleets.

A braid word is a sequence of (generator index, exponent) letters over the
twists along the dual arcs of the base triangulation.  Words act by function
composition, rightmost letter first.  Arc-level actions go through the string
model: build the module, twist, minimise, decode back to a word.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .dgmod import (DGModule, cone, hom_basis, hom_dims, is_spherical, iso,
                    iso_up_to_shift, minimize, shift, cocycle_representatives,
                    zero_module)
from .strings import ArcClass, Base, build_string, decode_string


class TwistError(ValueError):
    pass


class ActionDecodeError(TwistError):
    """A braid-twisted module failed to decode back to an arc: this breaks a
    guaranteed correspondence and is always surfaced."""


@dataclass(frozen=True)
class BraidWord:
    letters: Tuple[Tuple[int, int], ...]  # (generator 1..n, exponent +-1)

    def __post_init__(self):
        for g, e in self.letters:
            if e not in (-1, 1):
                raise TwistError(f"exponent {e} not allowed")

    def inverse(self) -> "BraidWord":
        return BraidWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return BraidWord(self.letters + other.letters)

    def format(self) -> str:
        return " ".join(f"b{g}" + ("'" if e < 0 else "") for g, e in self.letters)

    @staticmethod
    def parse(text: str) -> "BraidWord":
        letters = []
        for tok in text.split():
            inv = tok.endswith("'")
            tok = tok.rstrip("'")
            if not tok.startswith("b"):
                raise TwistError(f"bad braid letter {tok!r}")
            letters.append((int(tok[1:]), -1 if inv else 1))
        return BraidWord(tuple(letters))

    @staticmethod
    def identity() -> "BraidWord":
        return BraidWord(())


@dataclass(frozen=True)
class RelatorSet:
    commutation: Tuple[Tuple[BraidWord, BraidWord, str], ...]
    braid: Tuple[Tuple[BraidWord, BraidWord, str], ...]
    cyclic: Tuple[Tuple[BraidWord, BraidWord, str], ...]

    def all_pairs(self) -> List[Tuple[BraidWord, BraidWord, str]]:
        return list(self.commutation) + list(self.braid) + list(self.cyclic)


# ---------------------------------------------------------------------------
# the twist functor


def spherical_twist(base: Base, S: DGModule, X: DGModule, sign: int = 1) -> DGModule:
    """Twist X along the spherical module S (sign -1 for the inverse twist).

    The positive twist is the minimalised cone over the evaluation map from
    the Hom-graded sum of shifted copies of S into X; the negative twist is
    the shifted co-evaluation cone.
    """
    if sign not in (1, -1):
        raise TwistError("sign must be +1 or -1")
    if not is_spherical(S):
        raise TwistError("twisting object is not spherical")
    F = base.field
    if X.is_zero:
        return X
    if sign == 1:
        reps_by_t = {}
        for t in sorted(hom_basis(S, X)):
            reps, bt = cocycle_representatives(S, X, t)
            if reps:
                reps_by_t[t] = (reps, bt)
        # source: a copy of S[-t] per cohomology class, with evaluation block
        summands: List[Tuple[int, int]] = []
        diff: Dict[Tuple[int, int], object] = {}
        fmap: Dict[Tuple[int, int], object] = {}
        sizeS = len(S.summands)
        copies = []
        for t, (reps, bt) in sorted(reps_by_t.items()):
            for rep in reps:
                off = len(summands)
                copies.append((t, rep, bt, off))
                sgn = F.one if t % 2 == 0 else F.neg(F.one)
                for v, s in S.summands:
                    summands.append((v, s - t))
                for (k, l), val in S.diff.items():
                    diff[(off + k, off + l)] = F.mul(sgn, val)
        A = DGModule(base.algebra, F, summands, diff, check=False)
        for (t, rep, bt, off) in copies:
            for i, (k, l, _) in enumerate(bt):
                if not F.is_zero(rep[i]):
                    fmap[(off + k, l)] = rep[i]
        return cone(A, X, fmap)
    # inverse twist: Cone(X -> sum of S[t] per class of Hom^t(X, S))[-1]
    reps_by_t = {}
    for t in sorted(hom_basis(X, S)):
        reps, bt = cocycle_representatives(X, S, t)
        if reps:
            reps_by_t[t] = (reps, bt)
    summands = list(X.summands)
    diff = dict(X.diff)
    offX = 0
    fmap: Dict[Tuple[int, int], object] = {}
    for t, (reps, bt) in sorted(reps_by_t.items()):
        for rep in reps:
            off = len(summands)
            sgn = F.one if (t - 1) % 2 == 0 else F.neg(F.one)
            for v, s in S.summands:
                summands.append((v, s + t - 1))
            for (k, l), val in S.diff.items():
                diff[(off + k, off + l)] = F.mul(sgn, val)
            for i, (k, l, _) in enumerate(bt):
                if not F.is_zero(rep[i]):
                    diff[(k, off + l)] = rep[i]
    out = DGModule(base.algebra, F, summands, diff)
    return minimize(out)


def twist_by_generator(base: Base, g: int, sign: int, X: DGModule) -> DGModule:
    """Memoised twist along the g-th vertex simple."""
    key = (g, sign, X.key())
    cached = base.twist_cache.get(key)
    if cached is not None:
        return cached
    out = spherical_twist(base, base.simple(g), X, sign)
    base.twist_cache[key] = out
    return out


def apply_braid(base: Base, word: BraidWord, X: DGModule) -> DGModule:
    """Composite twist action on a module; rightmost letter acts first."""
    out = X
    for g, e in reversed(word.letters):
        out = twist_by_generator(base, g, e, out)
    return out


# ---------------------------------------------------------------------------
# arc-level action


def braid_act(base: Base, word: BraidWord, arc: ArcClass) -> Tuple[ArcClass, int]:
    """Image arc of a braid word, plus the shift delta of the twisted module
    relative to the shift-0 string module of the image.

    Letters act one at a time (rightmost first) and the module is renormalised
    to canonical string form after each, which keeps the change-of-basis work
    of the decoding local to a single twist.
    """
    cache = base.__dict__.setdefault("arc_twist_cache", {})
    out = arc
    delta = 0
    for g, e in reversed(word.letters):
        key = (g, e, out.as_tuple())
        hit = cache.get(key)
        if hit is None:
            X = build_string(base, out, 0)
            Y = twist_by_generator(base, g, e, X)
            try:
                step_arc, step_delta = decode_string(base, Y)
            except Exception as exc:  # noqa: BLE001 - surfaced, never swallowed
                raise ActionDecodeError(
                    f"braid action result did not decode to an arc: {exc}") from exc
            hit = (step_arc, step_delta)
            cache[key] = hit
        out, step_delta = hit[0], hit[1]
        delta += step_delta
    return out, delta


def action_equal(base: Base, w1: BraidWord, w2: BraidWord,
                 probes: Sequence[ArcClass], rng) -> bool:
    """Equality of the two induced actions on every probe, up to one common
    shift."""
    labels = {a.word.crossings[0] for a in probes if a.length == 1}
    if labels != set(range(1, base.n + 1)):
        raise TwistError("probe fleet must contain every dual arc of the base")
    common_delta: Optional[int] = None
    for probe in probes:
        X = build_string(base, probe, 0)
        M1 = apply_braid(base, w1, X)
        M2 = apply_braid(base, w2, X)
        k = iso_up_to_shift(M1, M2, rng)
        if k is None:
            return False
        if common_delta is None:
            common_delta = k
        elif common_delta != k:
            return False
    return True


# ---------------------------------------------------------------------------
# relators


def relators_of(base_or_qp) -> RelatorSet:
    """Relator pairs of the twist-group presentation read off a quiver with
    potential: braid pairs on arrows, commutations on non-adjacent vertex
    pairs, and one cyclic pair per potential term."""
    qp = base_or_qp.quiver if isinstance(base_or_qp, Base) else base_or_qp
    if qp.has_double_arrows:
        raise TwistError("double arrows are outside the supported class")
    n = qp.num_vertices
    braid = []
    comm = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if qp.adjacent(i, j):
                braid.append((
                    BraidWord(((i, 1), (j, 1), (i, 1))),
                    BraidWord(((j, 1), (i, 1), (j, 1))),
                    f"braid:{i}-{j}",
                ))
            else:
                comm.append((
                    BraidWord(((i, 1), (j, 1))),
                    BraidWord(((j, 1), (i, 1))),
                    f"commutation:{i}-{j}",
                ))
    cyclic = []
    for idx, term in enumerate(qp.potential):
        cycle = [qp.arrows[k].source for k in term]
        m = len(cycle)

        def relator(i: int) -> BraidWord:
            letters = tuple((cycle[(i + k) % m], 1) for k in range(2 * m - 2))
            return BraidWord(letters)

        cyclic.append((relator(0), relator(1), f"cyclic:{idx}:R1=R2"))
    return RelatorSet(tuple(comm), tuple(braid), tuple(cyclic))


def cyclic_relators_extra(base_or_qp) -> List[Tuple[BraidWord, BraidWord, str]]:
    """The additional pair (R1, R3) per potential term, checked separately."""
    qp = base_or_qp.quiver if isinstance(base_or_qp, Base) else base_or_qp
    out = []
    for idx, term in enumerate(qp.potential):
        cycle = [qp.arrows[k].source for k in term]
        m = len(cycle)

        def relator(i: int) -> BraidWord:
            letters = tuple((cycle[(i + k) % m], 1) for k in range(2 * m - 2))
            return BraidWord(letters)

        out.append((relator(0), relator(2), f"cyclic:{idx}:R1=R3"))
    return out


# ---------------------------------------------------------------------------
# categorical intersection number


def int_categorical(base: Base, a1: ArcClass, a2: ArcClass) -> Fraction:
    """Half the total Hom dimension between the two string modules."""
    X1 = build_string(base, a1, 0)
    X2 = build_string(base, a2, 0)
    return Fraction(sum(hom_dims(X1, X2).values()), 2)


# ---------------------------------------------------------------------------
# probe fleets


def random_braid_word(base: Base, rng, max_len: int = 6) -> BraidWord:
    length = rng.randrange(1, max_len + 1)
    letters = tuple(
        (rng.randrange(1, base.n + 1), rng.choice((1, -1))) for _ in range(length)
    )
    return BraidWord(letters)


def random_arc(base: Base, rng, max_len: int = 6) -> ArcClass:
    word = random_braid_word(base, rng, max_len)
    start = base.dual_arc(rng.randrange(1, base.n + 1))
    arc, _ = braid_act(base, word, start)
    return arc


def probe_fleet(base: Base, rng, extra: int = 50, max_len: int = 6) -> List[ArcClass]:
    probes = base.dual_arcs()
    seen = {p.as_tuple() for p in probes}
    while len(probes) < base.n + extra:
        arc = random_arc(base, rng, max_len)
        if arc.as_tuple() not in seen:
            seen.add(arc.as_tuple())
            probes.append(arc)
    return probes
