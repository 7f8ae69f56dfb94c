"""Exact scalar arithmetic and small dense linear algebra.

Two field backends are supported: a prime field F_p (fast path, scalars are
plain ints in [0, p)) and the rationals (certification path, scalars are
``fractions.Fraction``).  All rank / nullspace computations in the package go
through this module; no floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, List, Sequence

DEFAULT_PRIME = 65521  # largest 16-bit prime


class PrimeField:
    """Arithmetic in F_p with int representatives."""

    name = "prime"

    def __init__(self, p: int = DEFAULT_PRIME):
        if p < 3 or any(p % q == 0 for q in range(2, min(p, 1000)) if q * q <= p):
            raise ValueError(f"modulus {p} is not an odd prime")
        self.p = p
        self.zero = 0
        self.one = 1

    def of_int(self, k: int):
        return k % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def div(self, a, b):
        return (a * pow(b, -1, self.p)) % self.p

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def random(self, rng):
        return rng.randrange(self.p)

    def to_str(self, a) -> str:
        return str(a % self.p)

    def __repr__(self):
        return f"PrimeField({self.p})"


class RationalField:
    """Arithmetic over Q with Fraction representatives."""

    name = "rational"

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def of_int(self, k: int):
        return Fraction(k)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / a

    def div(self, a, b):
        return Fraction(a) / b

    def is_zero(self, a) -> bool:
        return a == 0

    def random(self, rng):
        # small integers keep Fraction arithmetic cheap
        return Fraction(rng.randrange(-999, 1000))

    def to_str(self, a) -> str:
        return str(a)

    def __repr__(self):
        return "RationalField()"


def make_field(mode: str, prime: int = DEFAULT_PRIME):
    if mode == "prime":
        return PrimeField(prime)
    if mode == "rational":
        return RationalField()
    raise ValueError(f"unknown field mode {mode!r}")


# ---------------------------------------------------------------------------
# dense linear algebra (matrices are lists of row lists)


def mat_zero(rows: int, cols: int, F) -> List[list]:
    return [[F.zero] * cols for _ in range(rows)]


def rref(matrix: Sequence[Sequence[Any]], F):
    """Reduced row echelon form.  Returns (rref_rows, pivot_columns)."""
    rows = [list(r) for r in matrix]
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if not F.is_zero(rows[i][c]):
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(m):
            if i != r and not F.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, pivots


def rank(matrix: Sequence[Sequence[Any]], F) -> int:
    if not matrix or not matrix[0]:
        return 0
    _, pivots = rref(matrix, F)
    return len(pivots)


def nullspace(matrix: Sequence[Sequence[Any]], F, ncols: int) -> List[list]:
    """Basis of the right kernel of ``matrix`` (rows = equations)."""
    if ncols == 0:
        return []
    if not matrix:
        basis = []
        for j in range(ncols):
            v = [F.zero] * ncols
            v[j] = F.one
            basis.append(v)
        return basis
    red, pivots = rref(matrix, F)
    pivset = set(pivots)
    free = [j for j in range(ncols) if j not in pivset]
    basis = []
    for j in free:
        v = [F.zero] * ncols
        v[j] = F.one
        for r, c in enumerate(pivots):
            v[c] = F.neg(red[r][j])
        basis.append(v)
    return basis


def solve_det_nonzero(matrix: Sequence[Sequence[Any]], F) -> bool:
    """True iff the square matrix is invertible."""
    n = len(matrix)
    if n == 0:
        return True
    if any(len(r) != n for r in matrix):
        return False
    return rank(matrix, F) == n
