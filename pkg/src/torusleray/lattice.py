"""Integer enumeration and combinatorics of frequency sets.

Everything here is exact: integers, Fractions, no floating point.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CapacityError, DomainError, EmptyEnsembleError

# Coordinate bound guard; far beyond desk scale but keeps the contract explicit.
_MAX_ENERGY = 2**62


@dataclass(frozen=True)
class FrequencySet:
    """The symmetric set of integer frequency vectors with |lambda|^2 = energy."""

    dim: int
    energy: int
    vectors: tuple[tuple[int, ...], ...]
    representatives: tuple[tuple[int, ...], ...]

    @property
    def multiplicity(self) -> int:
        return len(self.vectors)

    @property
    def max_energy(self) -> int:
        if not self.vectors:
            return 0
        return max(sum(c * c for c in v) for v in self.vectors)

    @property
    def mean_energy(self) -> Fraction:
        """Average of |lambda|^2 over the set (= energy for sphere sets)."""
        if not self.vectors:
            raise EmptyEnsembleError("empty frequency set")
        return Fraction(sum(sum(c * c for c in v) for v in self.vectors), len(self.vectors))

    def to_json_dict(self) -> dict:
        doc = {
            "dim": self.dim,
            "energy": self.energy,
            "multiplicity": self.multiplicity,
            "vectors": [list(v) for v in self.vectors],
        }
        if self.multiplicity:
            half = half_dual_set(self)
            doc["half_dual"] = half.to_json_list()
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


@dataclass(frozen=True)
class HalfDualSet:
    """The finite set of torus points where all <lambda, w> are integral
    (sign +1) or all half-integral (sign -1)."""

    points: tuple[tuple[Fraction, ...], ...]
    signs: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.points)

    def to_json_list(self) -> list:
        return [
            {"point": [f"{c.numerator}/{c.denominator}" for c in p], "sign": s}
            for p, s in zip(self.points, self.signs)
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_json_list())


def _is_canonical(v: tuple[int, ...]) -> bool:
    for c in v:
        if c != 0:
            return c > 0
    return False


def enumerate_frequencies(d: int, energy: int) -> FrequencySet:
    """All integer vectors in Z^d with squared norm equal to energy.

    An energy that is not a sum of d squares yields an empty set with
    multiplicity zero, not an error.
    """
    if d < 2:
        raise DomainError(f"dimension must be >= 2, got {d}")
    if energy < 1:
        raise DomainError(f"energy must be >= 1, got {energy}")
    if energy > _MAX_ENERGY:
        raise CapacityError(f"energy {energy} exceeds coordinate bound capacity")

    vectors: list[tuple[int, ...]] = []
    prefix = [0] * d

    def rec(i: int, remaining: int) -> None:
        if i == d - 1:
            r = _isqrt_exact(remaining)
            if r is None:
                return
            if r == 0:
                prefix[i] = 0
                vectors.append(tuple(prefix))
            else:
                for c in (r, -r):
                    prefix[i] = c
                    vectors.append(tuple(prefix))
            return
        bound = _isqrt(remaining)
        for a in range(-bound, bound + 1):
            prefix[i] = a
            rec(i + 1, remaining - a * a)

    rec(0, energy)
    vectors.sort()
    reps = tuple(v for v in vectors if _is_canonical(v))
    return FrequencySet(dim=d, energy=energy, vectors=tuple(vectors), representatives=reps)


def _isqrt(n: int) -> int:
    import math

    return math.isqrt(n)


def _isqrt_exact(n: int) -> int | None:
    r = _isqrt(n)
    return r if r * r == n else None


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization, adequate for desk-scale energies."""
    if n < 1:
        raise DomainError("factorization requires n >= 1")
    if n > _MAX_ENERGY:
        raise CapacityError(f"{n} exceeds factorization capacity")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n:
        for q in (p, p + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        p += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def multiplicity_formula_2d(energy: int) -> int:
    """Number of representations of energy as an ordered sum of two squares.

    Counts 4*prod(beta_j + 1) over primes p_j = 1 mod 4; zero when any
    prime q = 3 mod 4 divides to an odd power.
    """
    if energy < 1:
        raise DomainError("energy must be >= 1")
    result = 4
    for p, e in factorize(energy).items():
        if p == 2:
            continue
        if p % 4 == 1:
            result *= e + 1
        elif e % 2 == 1:
            return 0
    return result


def check_nondegeneracy(freqs: FrequencySet) -> bool:
    """True iff some vector has two nonzero leading coordinates of distinct
    absolute value (automatic once multiplicity exceeds 3^d)."""
    if not freqs.vectors:
        raise EmptyEnsembleError("empty frequency set")
    for v in freqs.vectors:
        if v[0] != 0 and v[1] != 0 and abs(v[0]) != abs(v[1]):
            return True
    return False


def _integer_row_basis(vectors: Sequence[tuple[int, ...]], d: int) -> list[list[int]]:
    """Row basis (Hermite-style) of the integer span of the given vectors."""
    rows = [list(v) for v in vectors]
    basis: list[list[int]] = []
    col = 0
    while col < d and rows:
        nonzero = [r for r in rows if r[col] != 0]
        if not nonzero:
            col += 1
            continue
        # reduce the column by repeated division, euclid-style
        while True:
            nonzero.sort(key=lambda r: abs(r[col]))
            pivot = nonzero[0]
            done = True
            for r in nonzero[1:]:
                q = r[col] // pivot[col]
                if q:
                    for j in range(d):
                        r[j] -= q * pivot[j]
                if r[col] != 0:
                    done = False
            nonzero = [pivot] + [r for r in nonzero[1:] if r[col] != 0]
            if done or len(nonzero) == 1:
                break
        basis.append(list(pivot))
        rows = [r for r in rows if r is not pivot and any(r)]
        for r in rows:
            q = r[col] // pivot[col]
            if q:
                for j in range(d):
                    r[j] -= q * pivot[j]
        rows = [r for r in rows if any(r)]
        col += 1
    return basis


def _fraction_inverse(matrix: list[list[int]]) -> list[list[Fraction]]:
    """Exact inverse of a square integer matrix via Gauss-Jordan."""
    n = len(matrix)
    a = [[Fraction(matrix[i][j]) for j in range(n)] for i in range(n)]
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise DomainError("frequency set does not span R^d")
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        scale = a[col][col]
        a[col] = [x / scale for x in a[col]]
        inv[col] = [x / scale for x in inv[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - factor * y for x, y in zip(inv[r], inv[col])]
    return inv


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def half_dual_set(freqs: FrequencySet) -> HalfDualSet:
    """Points of (1/2) L* mod Z^d on which every <lambda, w> is integral
    or every <lambda, w> is half-integral; exact rational arithmetic."""
    if not freqs.vectors:
        raise DomainError("half_dual_set requires a nonempty frequency set")
    d = freqs.dim
    basis = _integer_row_basis(freqs.vectors, d)
    if len(basis) != d:
        raise DomainError("frequency set does not span R^d")
    inv = _fraction_inverse(basis)
    # dual basis vectors are the columns of basis^{-1}; halve them
    generators = [tuple(inv[i][j] / 2 for i in range(d)) for j in range(d)]

    seen: set[tuple[Fraction, ...]] = {tuple(Fraction(0) for _ in range(d))}
    frontier = [tuple(Fraction(0) for _ in range(d))]
    while frontier:
        point = frontier.pop()
        for g in generators:
            nxt = tuple(_mod1(a + b) for a, b in zip(point, g))
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)

    points: list[tuple[Fraction, ...]] = []
    signs: list[int] = []
    for w in sorted(seen):
        dots = [sum(c * x for c, x in zip(lam, w)) for lam in freqs.vectors]
        if all(t.denominator == 1 for t in dots):
            points.append(w)
            signs.append(1)
        elif all(t.denominator == 2 for t in dots):
            points.append(w)
            signs.append(-1)
    return HalfDualSet(points=tuple(points), signs=tuple(signs))


def pair_sum_table(freqs: FrequencySet) -> Counter:
    """r(nu) = #{(lambda1, lambda2) in Lambda^2 : lambda1 + lambda2 = nu}."""
    table: Counter = Counter()
    for a in freqs.vectors:
        for b in freqs.vectors:
            table[tuple(x + y for x, y in zip(a, b))] += 1
    return table


def four_tuple_count(freqs: FrequencySet) -> int:
    """#{(l1,l2,l3,l4) : l1 + l2 = l3 + l4} via the pair-sum table."""
    if not freqs.vectors:
        raise EmptyEnsembleError("empty frequency set")
    return sum(r * r for r in pair_sum_table(freqs).values())


def chord_count(freqs: FrequencySet, nu: Sequence[int]) -> int:
    """Number of lattice points lambda with |lambda|^2 = |nu - lambda|^2 = E."""
    nu = tuple(int(c) for c in nu)
    if all(c == 0 for c in nu):
        raise DomainError("nu must be nonzero")
    target = sum(c * c for c in nu)
    return sum(1 for lam in freqs.vectors if 2 * sum(a * b for a, b in zip(lam, nu)) == target)


def divisor_count(k: int) -> int:
    """tau(k), the number of positive divisors."""
    if k < 1:
        raise DomainError("k must be >= 1")
    out = 1
    for e in factorize(k).values():
        out *= e + 1
    return out


def form_representations(D: int, k: int) -> int:
    """#{(x, y) in Z^2 : x^2 + D*y^2 = k} by bounded enumeration of y."""
    if D < 1 or k < 1:
        raise DomainError("require D >= 1 and k >= 1")
    count = 0
    y = 0
    while D * y * y <= k:
        rest = k - D * y * y
        r = _isqrt_exact(rest)
        if r is not None:
            nx = 1 if r == 0 else 2
            ny = 1 if y == 0 else 2
            count += nx * ny
        y += 1
    return count
