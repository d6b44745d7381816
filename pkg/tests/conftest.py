"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the library's own normal-form and
lattice code paths: they work by exhaustive enumeration and classical
integer row reduction, so they can certify the fast implementations.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from mdcrt.exact_linalg import IntMatrix


# ---------------------------------------------------------------------------
# random instances


def random_matrix(rng: random.Random, dim: int, bound: int = 9, nonsingular: bool = True) -> IntMatrix:
    while True:
        m = IntMatrix.from_rows(
            [[rng.randint(-bound, bound) for _ in range(dim)] for _ in range(dim)]
        )
        if not nonsingular or m.det != 0:
            return m


def random_unimodular(rng: random.Random, dim: int, steps: int = 8) -> IntMatrix:
    """Product of elementary column operations applied to the identity."""
    cols = [list(c) for c in zip(*IntMatrix.identity(dim).rows)]
    for _ in range(steps):
        i, j = rng.randrange(dim), rng.randrange(dim)
        if i == j:
            if rng.random() < 0.5:
                cols[i] = [-x for x in cols[i]]
            continue
        q = rng.randint(-3, 3)
        cols[j] = [a + q * b for a, b in zip(cols[j], cols[i])]
    return IntMatrix.from_rows(list(zip(*cols)))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0x5EED)


# ---------------------------------------------------------------------------
# oracle: triangular accumulation of a generated lattice (classical xgcd
# elimination, no library code)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return g, x, y

def lattice_rows_from_generators(vectors, dim: int) -> list[list[int]]:
    """Row-style triangular basis of the lattice generated by the vectors."""
    basis: list[list[int] | None] = [None] * dim
    def insert(vec):
        vec = list(vec)
        for j in range(dim):
            if vec[j] == 0:
                continue
            if basis[j] is None:
                basis[j] = vec
                return
            a, b = basis[j][j], vec[j]
            g, x, y = _xgcd(a, b)
            new_row = [x * p + y * q for p, q in zip(basis[j], vec)]
            vec = [(a // g) * q - (b // g) * p for p, q in zip(basis[j], vec)]
            basis[j] = new_row
        return
    for v in vectors:
        insert(v)
    return [row for row in basis if row is not None]


def generated_lattice_det(vectors, dim: int) -> int:
    rows = lattice_rows_from_generators(vectors, dim)
    if len(rows) < dim:
        return 0
    det = 1
    for j in range(dim):
        det *= rows[j][j]
    return abs(det)


def brute_intersection_det(a: IntMatrix, b: IntMatrix) -> int:
    """|det| of L(a) meet L(b), by scanning coefficient vectors of a.

    The intersection contains det(b) * L(a), so coefficients in
    [-|det b|, |det b|] generate it.
    """
    d = a.dim
    bound = abs(b.det)
    members = []
    rng_range = range(-bound, bound + 1)
    import itertools

    for coeff in itertools.product(rng_range, repeat=d):
        if all(c == 0 for c in coeff):
            continue
        v = a.apply(coeff)
        if _in_lattice(b, v):
            members.append(v)
    return generated_lattice_det(members, d)


def _in_lattice(m: IntMatrix, v) -> bool:
    det = m.det
    coords = m.adj.apply(v)
    return all(x % det == 0 for x in coords)


# ---------------------------------------------------------------------------
# oracle: exhaustive CVP within a provably sufficient coefficient box


def brute_closest_vectors(basis: IntMatrix, target) -> tuple[Fraction, list[tuple[int, ...]]]:
    """All closest lattice vectors to the target, by exhausting a coefficient
    box that provably contains every candidate at least as close as 0."""
    import itertools
    import math

    d = basis.dim
    t = [Fraction(x) for x in target]
    norm_t = sum(x * x for x in t)
    # ||B c - t|| <= ||t||  implies  |(B c)_j| <= 2 ||t||_2, so
    # |c_i| <= sum_j |adj[i][j]| * 2 ||t||_2 / |det|
    two_norm_t = 2 * math.isqrt(int(norm_t)) + 2
    det = abs(basis.det)
    bounds = [
        (sum(abs(x) for x in basis.adj.rows[i]) * two_norm_t) // det + 1 for i in range(d)
    ]
    best = None
    winners: list[tuple[int, ...]] = []
    for coeff in itertools.product(*(range(-k, k + 1) for k in bounds)):
        v = basis.apply(coeff)
        dist = sum((Fraction(a) - b) ** 2 for a, b in zip(v, t))
        if best is None or dist < best:
            best, winners = dist, [v]
        elif dist == best:
            winners.append(v)
    return best, winners


def brute_shortest_sq(basis: IntMatrix, coeff_bound: int = 40) -> int:
    import itertools

    best = None
    d = basis.dim
    for coeff in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=d):
        if all(c == 0 for c in coeff):
            continue
        v = basis.apply(coeff)
        n = sum(x * x for x in v)
        if best is None or n < best:
            best = n
    return best


def brute_shortest_sq_sound(basis: IntMatrix, skip_above: int = 500_000) -> int | None:
    """Exhaustive SVP with a provably sufficient coefficient box.

    Any vector no longer than the shortest basis column has coefficients
    bounded through the adjugate; returns None when that box is too large
    to scan.
    """
    import itertools
    import math

    d = basis.dim
    det = abs(basis.det)
    col_norm = min(
        math.isqrt(sum(x * x for x in basis.column(j))) + 1 for j in range(d)
    )
    bounds = [
        (sum(abs(x) for x in basis.adj.rows[i]) * col_norm) // det + 1 for i in range(d)
    ]
    size = 1
    for k in bounds:
        size *= 2 * k + 1
    if size > skip_above:
        return None
    best = None
    for coeff in itertools.product(*(range(-k, k + 1) for k in bounds)):
        if all(c == 0 for c in coeff):
            continue
        n = sum(x * x for x in basis.apply(coeff))
        if best is None or n < best:
            best = n
    return best


# ---------------------------------------------------------------------------
# oracle: all common left divisors of a 2x2 pair, via HNF-form enumeration


def _divisors(n: int) -> list[int]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def brute_common_left_divisors(a: IntMatrix, b: IntMatrix) -> list[IntMatrix]:
    """Every cld of two 2x2 matrices, one representative per column lattice."""
    import math

    assert a.dim == 2
    g = math.gcd(abs(a.det), abs(b.det))
    out = []
    for d in _divisors(g):
        for p in _divisors(d):
            q = d // p
            for c in range(q):
                h = IntMatrix.from_rows([[p, 0], [c, q]])
                if _left_divides(h, a) and _left_divides(h, b):
                    out.append(h)
    return out


def _left_divides(g: IntMatrix, m: IntMatrix) -> bool:
    det = g.det
    prod = g.adj @ m
    return all(x % det == 0 for r in prod.rows for x in r)
