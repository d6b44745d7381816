"""Lattice geometry: vector remainders, fundamental parallelepipeds, exact
shortest/closest vector computation, and unions of shifted parallelepipeds.

All lengths are handled as exact squared norms (integers or Fractions);
square roots appear only in display code elsewhere.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

from .errors import CapExceeded, DimensionUnsupported, SingularMatrix
from .exact_linalg import (
    IntMatrix,
    IntVec,
    Scalar,
    snf,
    vec_dot,
    vec_norm_sq,
    vec_scale,
    vec_sub,
)

DEFAULT_FPD_CAP = 10**6
FPD_CAP_ENV = "MDCRT_FPD_CAP"


def _fpd_cap(cap: int | None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get(FPD_CAP_ENV)
    return int(env) if env else DEFAULT_FPD_CAP


# ---------------------------------------------------------------------------
# modular reduction


def reduce_mod(f: Sequence[int], m: IntMatrix) -> tuple[IntVec, IntVec]:
    """Split ``f = m @ quotient + remainder`` with the remainder in N(m).

    The quotient is the elementwise floor of the exact rational ``m^{-1} f``.
    """
    d = m.det
    if d == 0:
        raise SingularMatrix("modulus must be nonsingular")
    num = m.adj.apply(f)
    quotient = tuple(n // d for n in num)  # Python floordiv floors for either sign of d
    remainder = vec_sub(f, m.apply(quotient))
    return quotient, remainder


def vector_remainder(f: Sequence[int], m: IntMatrix) -> IntVec:
    return reduce_mod(f, m)[1]


# ---------------------------------------------------------------------------
# fundamental parallelepiped enumeration and sampling


def fpd_size(m: IntMatrix) -> int:
    d = m.det
    if d == 0:
        raise SingularMatrix("FPD of a singular matrix is undefined")
    return abs(d)


def enumerate_fpd(m: IntMatrix, cap: int | None = None) -> list[IntVec]:
    """All ``|det m|`` integer points of N(m), ordered by their SNF digit
    preimage (lexicographic)."""
    count = fpd_size(m)
    limit = _fpd_cap(cap)
    if count > limit:
        raise CapExceeded(f"|det| = {count} exceeds enumeration cap {limit}")
    dec = snf(m)
    uinv = dec.u.adj if dec.u.det == 1 else -dec.u.adj
    out = []
    for digits in itertools.product(*(range(x) for x in dec.diagonal())):
        g = uinv.apply(digits)
        out.append(reduce_mod(g, m)[1])
    return out


class FpdSampler:
    """Uniform sampling over N(m) without enumeration, via SNF digits."""

    def __init__(self, m: IntMatrix):
        if m.det == 0:
            raise SingularMatrix("cannot sample the FPD of a singular matrix")
        self.m = m
        dec = snf(m)
        self._uinv = dec.u.adj if dec.u.det == 1 else -dec.u.adj
        self._diag = dec.diagonal()

    def sample(self, rng) -> IntVec:
        digits = tuple(rng.randrange(x) for x in self._diag)
        return reduce_mod(self._uinv.apply(digits), self.m)[1]


# ---------------------------------------------------------------------------
# lattice basis with cached reduction


def _lagrange_gauss(b1: IntVec, b2: IntVec) -> tuple[IntVec, IntVec]:
    """Two-dimensional reduced basis: ||b1|| <= ||b2||, |<b1,b2>| <= ||b1||^2 / 2."""
    while True:
        if vec_norm_sq(b1) > vec_norm_sq(b2):
            b1, b2 = b2, b1
        n1 = vec_norm_sq(b1)
        q = (2 * vec_dot(b1, b2) + n1) // (2 * n1)
        if q == 0:
            return b1, b2
        b2 = vec_sub(b2, vec_scale(q, b1))


@dataclass(frozen=True)
class LatticeBasis:
    """Nonsingular integer basis with cached Gram matrix and, for D = 2, a
    cached Lagrange-Gauss-reduced basis."""

    basis: IntMatrix

    def __post_init__(self) -> None:
        if self.basis.det == 0:
            raise SingularMatrix("lattice basis must be nonsingular")

    @property
    def dim(self) -> int:
        return self.basis.dim

    @cached_property
    def gram(self) -> IntMatrix:
        return self.basis.transpose() @ self.basis

    @cached_property
    def reduced(self) -> IntMatrix | None:
        if self.dim != 2:
            return None
        b1, b2 = _lagrange_gauss(self.basis.column(0), self.basis.column(1))
        return IntMatrix.from_columns([b1, b2])

    @cached_property
    def _enum_basis(self) -> IntMatrix:
        return self.reduced if self.reduced is not None else self.basis

    @cached_property
    def _ldl(self) -> tuple[list[Fraction], list[list[Fraction]]]:
        b = self._enum_basis
        return _ldl_decompose((b.transpose() @ b).rows)

    def contains(self, v: Sequence[int]) -> bool:
        d = self.basis.det
        return all(x % d == 0 for x in self.basis.adj.apply(v))


def _ldl_decompose(gram_rows) -> tuple[list[Fraction], list[list[Fraction]]]:
    n = len(gram_rows)
    d: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        di = Fraction(gram_rows[i][i])
        for k in range(i):
            di -= d[k] * mu[k][i] * mu[k][i]
        if di <= 0:
            raise SingularMatrix("Gram matrix is not positive definite")
        d.append(di)
        for j in range(i + 1, n):
            gij = Fraction(gram_rows[i][j])
            for k in range(i):
                gij -= d[k] * mu[k][i] * mu[k][j]
            mu[i][j] = gij / di
    return d, mu


# ---------------------------------------------------------------------------
# exact SVP / CVP by depth-first enumeration of the LDL quadratic form

_MAX_ENUM_DIM = 4


def _enum_best(
    basis: IntMatrix,
    d: list[Fraction],
    mu: list[list[Fraction]],
    x: Sequence[Fraction],
    skip_zero: bool,
) -> tuple[Fraction, IntVec]:
    """Minimize ||B c - B x||^2 over integer c (c != 0 when skip_zero).

    Returns (min squared value, B @ c) with ties broken by the
    lexicographically smallest resulting vector.
    """
    n = len(d)
    best_q: Fraction | None = None
    best_v: IntVec | None = None
    c = [0] * n
    z = [Fraction(0)] * n  # z[i] = c[i] - x[i]

    def centers(i: int) -> Fraction:
        s = x[i]
        for j in range(i + 1, n):
            s -= mu[i][j] * z[j]
        return s

    def visit_leaf(partial: Fraction) -> None:
        nonlocal best_q, best_v
        if skip_zero and all(ci == 0 for ci in c):
            return
        v = basis.apply(c)
        if best_q is None or partial < best_q or (partial == best_q and v < best_v):
            best_q, best_v = partial, v

    def babai(i: int, partial: Fraction) -> None:
        # greedy dive to seed the bound
        if i < 0:
            visit_leaf(partial)
            return
        center = centers(i)
        ci = math.floor(center + Fraction(1, 2))
        c[i] = ci
        z[i] = ci - x[i]
        w = ci - center
        babai(i - 1, partial + d[i] * w * w)
        if skip_zero and best_q is None:
            # all-zero Babai leaf was skipped; nudge this level to get a bound
            for alt in (ci + 1, ci - 1):
                c[i] = alt
                z[i] = alt - x[i]
                w = alt - center
                babai(i - 1, partial + d[i] * w * w)
                if best_q is not None:
                    break

    def search(i: int, partial: Fraction) -> None:
        if i < 0:
            visit_leaf(partial)
            return
        center = centers(i)
        base = math.floor(center + Fraction(1, 2))
        for direction in (1, -1):
            ci = base if direction == 1 else base - 1
            while True:
                w = ci - center
                term = d[i] * w * w
                total = partial + term
                if best_q is not None and total > best_q:
                    break
                c[i] = ci
                z[i] = ci - x[i]
                search(i - 1, total)
                ci += direction

    babai(n - 1, Fraction(0))
    search(n - 1, Fraction(0))
    assert best_q is not None and best_v is not None
    return best_q, best_v


def shortest_vector(l: LatticeBasis) -> tuple[int, IntVec]:
    """Exact squared minimum distance of the lattice and a witness vector."""
    n = l.dim
    if n > _MAX_ENUM_DIM:
        raise DimensionUnsupported(f"shortest_vector supports dim <= {_MAX_ENUM_DIM}, got {n}")
    if n == 1:
        g = l.basis.rows[0][0]
        return g * g, (abs(g),)
    if n == 2:
        b1 = l.reduced.column(0)
        lsq = vec_norm_sq(b1)
        return lsq, min(b1, vec_scale(-1, b1))
    d, mu = l._ldl
    x = [Fraction(0)] * n
    q, v = _enum_best(l._enum_basis, d, mu, x, skip_zero=True)
    assert q.denominator == 1
    return int(q), v


def closest_vector(l: LatticeBasis, target: Sequence[Scalar]) -> IntVec:
    """Exact closest lattice vector to an integer or rational target.

    Ties are broken by the lexicographically smallest lattice vector.
    """
    n = l.dim
    if n > _MAX_ENUM_DIM:
        raise DimensionUnsupported(f"closest_vector supports dim <= {_MAX_ENUM_DIM}, got {n}")
    if len(target) != n:
        raise DimensionUnsupported("target dimension mismatch")
    b = l._enum_basis
    x = b.inverse_apply(target)
    d, mu = l._ldl
    _, v = _enum_best(b, d, mu, x, skip_zero=False)
    return v


def distance_sq(v: Sequence[Scalar], w: Sequence[Scalar]) -> Scalar:
    return vec_norm_sq(vec_sub(v, w))


# ---------------------------------------------------------------------------
# unions of shifted fundamental parallelepipeds


@dataclass(frozen=True)
class FpdUnionRegion:
    """Disjoint union of |shifts| copies of N(anchor), shifted by anchor @ k."""

    anchor: IntMatrix
    shifts: tuple[IntVec, ...]
    shift_set: frozenset = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "shift_set", frozenset(self.shifts))
        if len(self.shift_set) != len(self.shifts):
            raise ValueError("region shifts must be pairwise distinct")

    @property
    def size(self) -> int:
        return len(self.shifts) * abs(self.anchor.det)

    def sample(self, rng, sampler: FpdSampler | None = None) -> IntVec:
        sampler = sampler or FpdSampler(self.anchor)
        k = self.shifts[rng.randrange(len(self.shifts))]
        r = sampler.sample(rng)
        return tuple(a + b for a, b in zip(self.anchor.apply(k), r))

    def centroid(self) -> tuple[Fraction, ...]:
        """Continuous centroid: anchor @ (mean shift + (1/2, ..., 1/2))."""
        n = self.anchor.dim
        count = len(self.shifts)
        mean = [Fraction(sum(k[i] for k in self.shifts), count) + Fraction(1, 2) for i in range(n)]
        return self.anchor.apply(mean)


def in_fpd_union(f: Sequence[int], region: FpdUnionRegion) -> bool:
    quotient, _ = reduce_mod(f, region.anchor)
    return quotient in region.shift_set


def region_contains(anchor: IntMatrix, designated_lcrm: IntMatrix, f: Sequence[int]) -> bool:
    """Membership in the shifted-FPD union of ``anchor`` determined by an lcrm,
    checked by exact rational arithmetic (no shift enumeration)."""
    p = _integer_quotient_matrix(anchor, designated_lcrm)
    quotient, _ = reduce_mod(f, anchor)
    frac = p.inverse_apply(quotient)
    return all(0 <= t < 1 for t in frac)


def _integer_quotient_matrix(anchor: IntMatrix, multiple: IntMatrix) -> IntMatrix:
    d = anchor.det
    if d == 0:
        raise SingularMatrix("anchor must be nonsingular")
    num = anchor.adj @ multiple
    if any(x % d for r in num.rows for x in r):
        raise ValueError("matrix is not a right multiple of the anchor")
    return IntMatrix.from_rows([[x // d for x in r] for r in num.rows])


def nearest_region_point(region: FpdUnionRegion, target: Sequence[Scalar]) -> IntVec:
    """Region point minimizing exact Euclidean distance to a rational target;
    ties broken lexicographically. Expanding-ring search around the rounding."""
    n = region.anchor.dim
    base = tuple(math.floor(Fraction(t) + Fraction(1, 2)) for t in target)
    best: tuple | None = None  # (dist_sq, point)

    def consider(pt: IntVec) -> None:
        nonlocal best
        if not in_fpd_union(pt, region):
            return
        dsq = sum((Fraction(a) - Fraction(b)) ** 2 for a, b in zip(pt, target))
        if best is None or dsq < best[0] or (dsq == best[0] and pt < best[1]):
            best = (dsq, pt)

    radius = 0
    while True:
        for offset in _ring_offsets(n, radius):
            consider(tuple(b + o for b, o in zip(base, offset)))
        if best is not None and best[0] <= radius * radius:
            return best[1]
        radius += 1
        if radius > 10**6:
            raise CapExceeded("no region point found near target")


def _ring_offsets(n: int, radius: int) -> Iterator[tuple[int, ...]]:
    if radius == 0:
        yield (0,) * n
        return
    for offset in itertools.product(range(-radius, radius + 1), repeat=n):
        if max(abs(o) for o in offset) == radius:
            yield offset
