import itertools
import random
from fractions import Fraction

import pytest

from mdcrt.errors import CapExceeded, DimensionUnsupported, SingularMatrix
from mdcrt.exact_linalg import IntMatrix, vec_dot, vec_norm_sq, vec_sub
from mdcrt.lattice import (
    FpdSampler,
    FpdUnionRegion,
    LatticeBasis,
    closest_vector,
    enumerate_fpd,
    in_fpd_union,
    nearest_region_point,
    reduce_mod,
    region_contains,
    shortest_vector,
)
from conftest import brute_closest_vectors, brute_shortest_sq_sound, random_matrix

M = IntMatrix.from_rows
M1 = M([[3, 1], [2, 2]])


class TestReduceMod:
    def test_zero(self):
        q, r = reduce_mod((0, 0), M1)
        assert q == (0, 0) and r == (0, 0)

    def test_identity_modulus(self, rng):
        for _ in range(20):
            f = (rng.randint(-50, 50), rng.randint(-50, 50))
            q, r = reduce_mod(f, IntMatrix.identity(2))
            assert q == f and r == (0, 0)

    def test_worked_value_against_fpd(self):
        f = (5, 3)
        q, r = reduce_mod(f, M1)
        fpd = enumerate_fpd(M1)
        assert r in fpd
        # congruent means f - r = M1 @ k for an integer k (Cramer check)
        diff = vec_sub(f, r)
        d = M1.det
        coords = M1.adj.apply(diff)
        assert all(x % d == 0 for x in coords)
        # and r is the only FPD element congruent to f
        congruent = [
            p for p in fpd if all(x % d == 0 for x in M1.adj.apply(vec_sub(f, p)))
        ]
        assert congruent == [r]

    def test_idempotent(self, rng):
        for _ in range(50):
            m = random_matrix(rng, 2, bound=7)
            f = (rng.randint(-99, 99), rng.randint(-99, 99))
            _, r = reduce_mod(f, m)
            q2, r2 = reduce_mod(r, m)
            assert q2 == (0, 0) and r2 == r

    def test_singular(self):
        with pytest.raises(SingularMatrix):
            reduce_mod((1, 1), M([[1, 2], [2, 4]]))


class TestEnumerateFpd:
    def test_identity(self):
        assert enumerate_fpd(IntMatrix.identity(2)) == [(0, 0)]

    def test_axis_box(self):
        pts = enumerate_fpd(IntMatrix.diag(2, 3))
        assert set(pts) == {(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)}
        assert len(pts) == 6

    def test_shifted_fpd_quotient(self):
        # N(M1^{-1} R) for R = diag(4,4)
        pts = enumerate_fpd(M([[2, -1], [-2, 3]]))
        assert set(pts) == {(0, 0), (1, 0), (0, 1), (1, -1)}

    def test_cardinality_and_distinct(self, rng):
        for _ in range(30):
            m = random_matrix(rng, 2, bound=6)
            pts = enumerate_fpd(m)
            assert len(pts) == abs(m.det)
            assert len(set(pts)) == len(pts)

    def test_partition(self, rng):
        # every integer point in a box reduces to exactly one FPD element
        for _ in range(10):
            m = random_matrix(rng, 2, bound=5)
            if abs(m.det) > 50:
                continue
            fpd = set(enumerate_fpd(m))
            span = 3 * max(abs(x) for r in m.rows for x in r) + 1
            for f in itertools.product(range(-span, span, 7), repeat=2):
                _, r = reduce_mod(f, m)
                assert r in fpd

    def test_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_fpd(IntMatrix.diag(2000, 2000), cap=10**6)

    def test_sampler_covers(self, rng):
        m = M([[3, 1], [2, 2]])
        sampler = FpdSampler(m)
        gen = random.Random(11)
        seen = {sampler.sample(gen) for _ in range(200)}
        assert seen == set(enumerate_fpd(m))


class TestShortestVector:
    def test_identity(self):
        lsq, w = shortest_vector(LatticeBasis(IntMatrix.identity(2)))
        assert lsq == 1
        assert w in {(1, 0), (-1, 0), (0, 1), (0, -1)}

    def test_paper_values(self):
        assert shortest_vector(LatticeBasis(M([[22, -17], [17, 22]])))[0] == 773
        assert shortest_vector(LatticeBasis(M([[1, 0], [32, 881]])))[0] == 1009

    def test_witness_achieves(self, rng):
        for _ in range(40):
            m = random_matrix(rng, 2, bound=20)
            lsq, w = shortest_vector(LatticeBasis(m))
            assert vec_norm_sq(w) == lsq
            assert any(w)  # nonzero

    def test_oracle_equivalence_2d(self, rng):
        checked = 0
        for _ in range(40):
            m = random_matrix(rng, 2, bound=20)
            oracle = brute_shortest_sq_sound(m)
            if oracle is None:
                continue
            checked += 1
            assert shortest_vector(LatticeBasis(m))[0] == oracle
        assert checked >= 25

    def test_dim3_oracle(self, rng):
        checked = 0
        for _ in range(14):
            m = random_matrix(rng, 3, bound=4)
            lsq, w = shortest_vector(LatticeBasis(m))
            assert vec_norm_sq(w) == lsq
            oracle = brute_shortest_sq_sound(m)
            if oracle is not None:
                checked += 1
                assert lsq == oracle
        assert checked >= 8

    def test_dim_cap(self):
        with pytest.raises(DimensionUnsupported):
            shortest_vector(LatticeBasis(IntMatrix.identity(5)))

    def test_reduced_basis_conditions(self, rng):
        for _ in range(60):
            m = random_matrix(rng, 2, bound=15)
            red = LatticeBasis(m).reduced
            b1, b2 = red.column(0), red.column(1)
            assert vec_norm_sq(b1) <= vec_norm_sq(b2)
            assert 2 * abs(vec_dot(b1, b2)) <= vec_norm_sq(b1)


class TestClosestVector:
    def test_member_is_fixed_point(self, rng):
        for _ in range(20):
            m = random_matrix(rng, 2, bound=9)
            coeff = (rng.randint(-4, 4), rng.randint(-4, 4))
            v = m.apply(coeff)
            assert closest_vector(LatticeBasis(m), v) == v

    def test_documented_tie_break(self):
        assert closest_vector(LatticeBasis(IntMatrix.diag(2, 2)), (1, 0)) == (0, 0)

    def test_oracle(self, rng):
        for _ in range(30):
            m = random_matrix(rng, 2, bound=7)
            if abs(m.det) > 50:
                continue
            t = (rng.randint(-20, 20), rng.randint(-20, 20))
            got = closest_vector(LatticeBasis(m), t)
            best, winners = brute_closest_vectors(m, t)
            assert got == min(winners)
            assert vec_norm_sq(vec_sub(got, t)) == best

    def test_rational_target(self):
        l = LatticeBasis(IntMatrix.diag(3, 3))
        t = (Fraction(4, 3), Fraction(-5, 3))
        got = closest_vector(l, t)
        best, winners = brute_closest_vectors(IntMatrix.diag(3, 3), t)
        assert got == min(winners)


class TestRegions:
    def region(self):
        shifts = tuple(enumerate_fpd(M([[2, -1], [-2, 3]])))
        return FpdUnionRegion(anchor=M1, shifts=shifts)

    def test_zero_in(self):
        assert in_fpd_union((0, 0), self.region())

    def test_paper_membership(self):
        reg = self.region()
        assert in_fpd_union((2, 0), reg)
        assert not in_fpd_union((1, 0), reg)

    def test_decomposition_members(self, rng):
        reg = self.region()
        fpd = enumerate_fpd(M1)
        for k in reg.shifts:
            for r in fpd:
                f = tuple(a + b for a, b in zip(M1.apply(k), r))
                assert in_fpd_union(f, reg)

    def test_disjoint_copies(self):
        reg = self.region()
        fpd = enumerate_fpd(M1)
        pieces = []
        for k in reg.shifts:
            pieces.append({tuple(a + b for a, b in zip(M1.apply(k), r)) for r in fpd})
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                assert not (pieces[i] & pieces[j])

    def test_region_contains_matches_membership(self, rng):
        reg = self.region()
        designated = IntMatrix.diag(4, 4)
        for f in itertools.product(range(-8, 9), repeat=2):
            assert region_contains(M1, designated, f) == in_fpd_union(f, reg)

    def test_size_and_sampling(self):
        reg = self.region()
        assert reg.size == 16
        gen = random.Random(3)
        pts = {reg.sample(gen) for _ in range(400)}
        assert all(in_fpd_union(p, reg) for p in pts)
        assert len(pts) == 16  # every point reachable

    def test_nearest_region_point(self):
        reg = self.region()
        target = reg.centroid()
        p = nearest_region_point(reg, target)
        assert in_fpd_union(p, reg)
        # no region point is strictly closer
        dist = sum((Fraction(a) - b) ** 2 for a, b in zip(p, target))
        for f in itertools.product(range(-10, 11), repeat=2):
            if in_fpd_union(f, reg):
                other = sum((Fraction(a) - b) ** 2 for a, b in zip(f, target))
                assert other >= dist
