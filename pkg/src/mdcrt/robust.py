"""Single-stage robust reconstruction from erroneous vector remainders.

Given moduli M_1..M_L, an anchor index is chosen to maximize the smallest
shortest-vector length among the gcld lattices paired with it. Reconstruction
snaps remainder differences onto those gcld lattices by exact closest-vector
computation, solves the resulting error-free congruence system, and averages.

Remainders may carry exact rational entries: later stages of the multi-stage
scheme feed averaged estimates back in without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .crt_core import Congruence, crt_solve, gcld, lcrm_many
from .errors import DimensionUnsupported, DuplicateModuli, NotAnLcrm
from .exact_linalg import IntMatrix, IntVec, Scalar, vec_sub
from .lattice import (
    FpdUnionRegion,
    LatticeBasis,
    closest_vector,
    enumerate_fpd,
    reduce_mod,
    shortest_vector,
    _integer_quotient_matrix,
)

_MAX_DIM = 4


@dataclass(frozen=True, eq=False)
class RobustInstance:
    """Precomputed data for one set of moduli: gcld table, anchor, bound.

    ``tau_bound_sq`` is the exact square of the guaranteed error tolerance,
    min over j != anchor of lambda^2(L(G_{anchor,j})) / 16.
    """

    moduli: tuple[IntMatrix, ...]
    anchor: int
    pair_gcld: dict[tuple[int, int], IntMatrix]
    pair_lambda_sq: dict[tuple[int, int], int]
    tau_bound_sq: Fraction
    lcrm: IntMatrix
    anchor_lattices: dict[int, LatticeBasis]

    @property
    def count(self) -> int:
        return len(self.moduli)

    @property
    def dim(self) -> int:
        return self.moduli[0].dim

    def gcld_of(self, i: int, j: int) -> IntMatrix:
        return self.pair_gcld[(min(i, j), max(i, j))]

    def lambda_sq_of(self, i: int, j: int) -> int:
        return self.pair_lambda_sq[(min(i, j), max(i, j))]


def build_instance(moduli: Sequence[IntMatrix], anchor: int | None = None) -> RobustInstance:
    """Compute the gcld table, select the anchor, and fix the error bound.

    The anchor maximizes min_{j != i} lambda(L(G_{i,j})), smallest index on
    ties; pass ``anchor`` explicitly to pin it (multi-stage groups do).
    """
    moduli = tuple(moduli)
    if len(moduli) < 2:
        raise ValueError("a robust instance needs at least two moduli")
    d = moduli[0].dim
    if d > _MAX_DIM:
        raise DimensionUnsupported(f"robust reconstruction supports dim <= {_MAX_DIM}")
    if any(m.dim != d for m in moduli):
        raise DimensionUnsupported("moduli of mixed dimension")
    if len(set(moduli)) != len(moduli):
        raise DuplicateModuli("moduli must be distinct")

    pair_gcld: dict[tuple[int, int], IntMatrix] = {}
    pair_lambda_sq: dict[tuple[int, int], int] = {}
    n = len(moduli)
    for i in range(n):
        for j in range(i + 1, n):
            g = gcld(moduli[i], moduli[j])
            pair_gcld[(i, j)] = g
            pair_lambda_sq[(i, j)] = shortest_vector(LatticeBasis(g))[0]

    def row_min(i: int) -> int:
        return min(pair_lambda_sq[(min(i, j), max(i, j))] for j in range(n) if j != i)

    if anchor is None:
        anchor = max(range(n), key=lambda i: (row_min(i), -i))
    elif not 0 <= anchor < n:
        raise ValueError(f"anchor index {anchor} out of range")

    tau_bound_sq = Fraction(row_min(anchor), 16)
    lattices = {
        j: LatticeBasis(pair_gcld[(min(anchor, j), max(anchor, j))])
        for j in range(n)
        if j != anchor
    }
    return RobustInstance(
        moduli=moduli,
        anchor=anchor,
        pair_gcld=pair_gcld,
        pair_lambda_sq=pair_lambda_sq,
        tau_bound_sq=tau_bound_sq,
        lcrm=lcrm_many(moduli),
        anchor_lattices=lattices,
    )


@dataclass(frozen=True)
class RobustOutput:
    """Averaged estimate (exact rational) and the recovered fold terms M_i n_i."""

    estimate: tuple[Fraction, ...]
    folds: tuple[IntVec, ...]


def robust_reconstruct(
    instance: RobustInstance,
    noisy_remainders: Sequence[Sequence[Scalar]],
    designated_lcrm: IntMatrix | None = None,
) -> RobustOutput:
    """Five-step robust reconstruction.

    Snap each remainder difference onto its gcld lattice (exact CVP), solve
    the congruence system for the anchor fold inside N(R), recover the other
    folds, and average. ``designated_lcrm`` picks which lcrm representative R
    the anchor fold is reduced into; default is the HNF-normalized one.
    Raises Inconsistent when the snapped values are incompatible, which
    callers treat as a failed trial.
    """
    l0 = instance.anchor
    if len(noisy_remainders) != instance.count:
        raise ValueError("one remainder per modulus required")
    r0 = noisy_remainders[l0]

    snapped: dict[int, IntVec] = {}
    for j in range(instance.count):
        if j == l0:
            continue
        diff = vec_sub(noisy_remainders[j], r0)
        snapped[j] = closest_vector(instance.anchor_lattices[j], diff)

    congruences = []
    for j, m in enumerate(instance.moduli):
        rem = (0,) * instance.dim if j == l0 else reduce_mod(snapped[j], m)[1]
        congruences.append(Congruence(m, rem))
    anchor_fold = crt_solve(congruences).value
    if designated_lcrm is not None:
        anchor_fold = reduce_mod(anchor_fold, designated_lcrm)[1]

    folds = tuple(
        anchor_fold if j == l0 else vec_sub(anchor_fold, snapped[j])
        for j in range(instance.count)
    )
    n = instance.count
    estimate = tuple(
        Fraction(sum(fold[k] for fold in folds)) / n
        + Fraction(sum(rem[k] for rem in noisy_remainders)) / n
        for k in range(instance.dim)
    )
    return RobustOutput(estimate=estimate, folds=folds)


def verify_lcrm(instance: RobustInstance, candidate: IntMatrix) -> None:
    """Raise NotAnLcrm unless ``candidate`` is an lcrm of the instance moduli."""
    for m in instance.moduli:
        if not m.divides_left(candidate):
            raise NotAnLcrm(f"{candidate} is not a right multiple of {m}")
    if abs(candidate.det) != abs(instance.lcrm.det):
        raise NotAnLcrm(
            f"|det| = {abs(candidate.det)} but the intersection lattice has index {abs(instance.lcrm.det)}"
        )


def robustly_determinable_region(
    instance: RobustInstance, designated_lcrm: IntMatrix
) -> FpdUnionRegion:
    """Union of shifted anchor FPDs covering every robustly reconstructible f
    for the chosen lcrm representative."""
    verify_lcrm(instance, designated_lcrm)
    anchor_matrix = instance.moduli[instance.anchor]
    quotient = _integer_quotient_matrix(anchor_matrix, designated_lcrm)
    return FpdUnionRegion(anchor=anchor_matrix, shifts=tuple(enumerate_fpd(quotient)))
