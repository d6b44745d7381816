"""Monte-Carlo trial machinery: integer-disk error sampling, seeded sweeps
over the error bound tau, and per-tau statistics.

Randomness is fully pinned: every trial draws from an xorshift64* generator
whose state is derived with splitmix64 from (seed, tau index, trial index),
so serial and parallel runs produce identical output byte for byte. Within a
trial the draw order is: the true vector f (when re-sampled per trial), then
one error vector per modulus in modulus order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

from .errors import ConfigInvalid, Inconsistent
from .exact_linalg import IntMatrix, IntVec, vec_norm_sq, vec_sub
from .lattice import (
    FpdSampler,
    FpdUnionRegion,
    nearest_region_point,
    reduce_mod,
    region_contains,
)
from .multistage import GroupingPlan, build_plan, final_region, multistage_reconstruct
from .robust import (
    RobustInstance,
    build_instance,
    robust_reconstruct,
    robustly_determinable_region,
)

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_seed(seed: int, *indices: int) -> int:
    """splitmix64-style mixing of a base seed with stream indices."""
    x = seed & _MASK
    for idx in indices:
        x = _mix64((x + _GOLDEN + (idx & _MASK)) & _MASK)
    return x


class XorShift64Star:
    """xorshift64* generator; uniform ints via rejection sampling."""

    def __init__(self, seed: int):
        self._s = (seed & _MASK) or _GOLDEN

    def next_u64(self) -> int:
        s = self._s
        s ^= s >> 12
        s ^= (s << 25) & _MASK
        s ^= s >> 27
        self._s = s
        return (s * 0x2545F4914F6CDD1D) & _MASK

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        span = 1 << 64
        limit = span - span % n
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n


def trial_rng(seed: int, tau_index: int, trial_index: int) -> XorShift64Star:
    return XorShift64Star(stream_seed(seed, tau_index, trial_index))


# ---------------------------------------------------------------------------
# error sampling


class ErrorBallSampler:
    """Uniform over the integer points of the closed disk of radius tau.

    Membership is decided on exact squared norms, so irrational radii are
    handled without floats. The zero vector is always included.
    """

    def __init__(self, tau: Fraction | int, dim: int = 2):
        tau = Fraction(tau)
        if tau < 0:
            raise ValueError("tau must be nonnegative")
        self.tau = tau
        tau_sq = tau * tau
        r = math.floor(tau)
        pts = [
            e
            for e in product(range(-r, r + 1), repeat=dim)
            if vec_norm_sq(e) <= tau_sq
        ]
        pts.sort()
        self.points: tuple[IntVec, ...] = tuple(pts)

    def sample(self, rng: XorShift64Star) -> IntVec:
        return self.points[rng.randrange(len(self.points))]


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepConfig:
    """One reconstructor, one tau grid, one seed; hashable so worker
    processes can cache the built machinery."""

    moduli: tuple[IntMatrix, ...]
    reconstructor: str  # "single" or "multistage"
    grouping: tuple | None
    taus: tuple[Fraction, ...]
    trials: int
    seed: int
    f_mode: str  # "explicit", "centroid", or "per-trial"
    f_value: IntVec | None = None
    label: str | None = None

    @property
    def name(self) -> str:
        return self.label or self.reconstructor


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    f_true: IntVec
    errors: tuple[IntVec, ...]
    estimate: tuple[Fraction, ...] | None  # None when the solver reported Inconsistent
    error_norm: float  # sqrt of the exact squared error; nan when no estimate
    exact_success: bool  # ||estimate - f||^2 <= tau^2, compared exactly


@dataclass(frozen=True)
class SweepRow:
    tau: Fraction
    mean_error: float  # over trials with an estimate; nan if none
    success_rate: float
    trials: int


@dataclass(frozen=True)
class SweepSummary:
    reconstructor: str
    seed: int
    rows: tuple[SweepRow, ...]
    raw: tuple[tuple[TrialRecord, ...], ...] | None = None


class _Machinery:
    """Reconstructor plus the geometry needed to pick and validate f."""

    def __init__(self, cfg: SweepConfig):
        self.moduli = cfg.moduli
        if cfg.reconstructor == "single":
            inst = build_instance(cfg.moduli)
            self.bound_sq: Fraction | None = inst.tau_bound_sq
            self.anchor_matrix = cfg.moduli[inst.anchor]
            self.designated = inst.lcrm
            self.reconstruct: Callable = lambda noisy: robust_reconstruct(
                inst, noisy, designated_lcrm=inst.lcrm
            )
            self._region_builder = lambda: robustly_determinable_region(inst, inst.lcrm)
        elif cfg.reconstructor == "multistage":
            if cfg.grouping is None:
                raise ConfigInvalid("multistage reconstructor requires a grouping")
            plan = build_plan(cfg.moduli, cfg.grouping)
            finite = [b.tau_max_sq for b in plan.per_group_bounds if b.tau_max_sq is not None]
            self.bound_sq = min(finite) if finite else None
            self.anchor_matrix = plan.final_inputs[plan.final_anchor]
            self.designated = plan.final_lcrm
            self.reconstruct = lambda noisy: multistage_reconstruct(plan, noisy)
            self._region_builder = lambda: final_region(plan)
        else:
            raise ConfigInvalid(f"unknown reconstructor {cfg.reconstructor!r}")
        self._region: FpdUnionRegion | None = None
        self._sampler: FpdSampler | None = None

    @property
    def region(self) -> FpdUnionRegion:
        if self._region is None:
            self._region = self._region_builder()
            self._sampler = FpdSampler(self._region.anchor)
        return self._region

    def sample_f(self, rng: XorShift64Star) -> IntVec:
        return self.region.sample(rng, self._sampler)

    def contains(self, f: Sequence[int]) -> bool:
        return region_contains(self.anchor_matrix, self.designated, f)


@lru_cache(maxsize=8)
def _machinery(cfg: SweepConfig) -> _Machinery:
    return _Machinery(cfg)


@lru_cache(maxsize=8)
def resolve_f(cfg: SweepConfig) -> IntVec | None:
    """Fixed true vector for the sweep, or None in per-trial mode.

    Explicit vectors are validated for region membership by exact arithmetic;
    the centroid rule picks the region point nearest the continuous centroid.
    """
    mach = _machinery(cfg)
    if cfg.f_mode == "explicit":
        if cfg.f_value is None:
            raise ConfigInvalid("explicit f mode without a vector")
        if not mach.contains(cfg.f_value):
            raise ConfigInvalid(
                f"f = {list(cfg.f_value)} is outside the robustly determinable range "
                f"of reconstructor {cfg.name!r}"
            )
        return cfg.f_value
    if cfg.f_mode == "centroid":
        region = mach.region
        return nearest_region_point(region, region.centroid())
    if cfg.f_mode == "per-trial":
        mach.region  # fail early if the region cannot be enumerated
        return None
    raise ConfigInvalid(f"unknown f mode {cfg.f_mode!r}")


def _run_tau(cfg: SweepConfig, tau_index: int) -> tuple[TrialRecord, ...]:
    mach = _machinery(cfg)
    fixed_f = resolve_f(cfg)
    tau = cfg.taus[tau_index]
    ball = ErrorBallSampler(tau, dim=mach.moduli[0].dim)
    tau_sq = tau * tau
    fixed_rems = (
        tuple(reduce_mod(fixed_f, m)[1] for m in mach.moduli) if fixed_f is not None else None
    )
    records = []
    for t in range(cfg.trials):
        rng = trial_rng(cfg.seed, tau_index, t)
        if fixed_f is None:
            f = mach.sample_f(rng)
            rems = tuple(reduce_mod(f, m)[1] for m in mach.moduli)
        else:
            f, rems = fixed_f, fixed_rems
        errors = tuple(ball.sample(rng) for _ in mach.moduli)
        noisy = [tuple(a + b for a, b in zip(r, e)) for r, e in zip(rems, errors)]
        try:
            out = mach.reconstruct(noisy)
        except Inconsistent:
            records.append(TrialRecord(t, f, errors, None, float("nan"), False))
            continue
        err_sq = vec_norm_sq(vec_sub(out.estimate, f))
        records.append(
            TrialRecord(
                trial_index=t,
                f_true=f,
                errors=errors,
                estimate=out.estimate,
                error_norm=math.sqrt(err_sq),
                exact_success=err_sq <= tau_sq,
            )
        )
    return tuple(records)


def run_sweep(cfg: SweepConfig, jobs: int = 1, keep_raw: bool = False) -> SweepSummary:
    """Execute the full tau grid; identical output for any jobs value."""
    resolve_f(cfg)  # validate configuration before spawning workers
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_tau = list(pool.map(_run_tau, [cfg] * len(cfg.taus), range(len(cfg.taus))))
    else:
        per_tau = [_run_tau(cfg, ti) for ti in range(len(cfg.taus))]
    rows = []
    for tau, records in zip(cfg.taus, per_tau):
        finite = [r.error_norm for r in records if r.estimate is not None]
        mean_error = sum(finite) / len(finite) if finite else float("nan")
        successes = sum(1 for r in records if r.exact_success)
        rows.append(
            SweepRow(
                tau=tau,
                mean_error=mean_error,
                success_rate=successes / len(records),
                trials=len(records),
            )
        )
    return SweepSummary(
        reconstructor=cfg.name,
        seed=cfg.seed,
        rows=tuple(rows),
        raw=tuple(per_tau) if keep_raw else None,
    )


# ---------------------------------------------------------------------------
# CSV schemas

SUMMARY_HEADER = "tau,mean_error,success_rate,trials,reconstructor,seed"
RAW_HEADER = "tau,trial,err_norm,success"


def _fmt_tau(tau: Fraction) -> str:
    return str(tau.numerator) if tau.denominator == 1 else str(tau)


def summary_csv_lines(summary: SweepSummary) -> list[str]:
    lines = [SUMMARY_HEADER]
    for row in summary.rows:
        lines.append(
            f"{_fmt_tau(row.tau)},{row.mean_error!r},{row.success_rate!r},"
            f"{row.trials},{summary.reconstructor},{summary.seed}"
        )
    return lines


def raw_csv_lines(summary: SweepSummary) -> list[str]:
    if summary.raw is None:
        raise ValueError("sweep was run without keep_raw")
    lines = [RAW_HEADER]
    for tau, records in zip((r.tau for r in summary.rows), summary.raw):
        for rec in records:
            lines.append(
                f"{_fmt_tau(tau)},{rec.trial_index},{rec.error_norm!r},{int(rec.exact_success)}"
            )
    return lines
