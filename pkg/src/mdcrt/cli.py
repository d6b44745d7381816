"""Command-line front end.

Commands: hnf, snf, gcld, lcrm, crt, robust, multistage, svp-search, drange,
simulate. Exit codes: 0 success, 2 parse or configuration error,
3 mathematical inconsistency, 4 capability exceeded (dimension or
enumeration cap).

Decision-bearing numbers are printed exactly (integers, fractions); float
columns are display-only and suffixed ``_f``.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from .config import ExperimentConfig, load_config
from .crt_core import Congruence, crt_solve, gcld, lcrm_many
from .drange import max_coprime_set, max_dynamic_range
from .errors import (
    CapExceeded,
    ConfigInvalid,
    DimensionUnsupported,
    Inconsistent,
    MdcrtError,
)
from .exact_linalg import IntMatrix, format_vector, hnf, parse_matrix, parse_vector, snf
from .lattice import reduce_mod
from .multistage import build_plan, final_region, multistage_reconstruct
from .robust import build_instance, robust_reconstruct, robustly_determinable_region
from .simkit import (
    SweepConfig,
    raw_csv_lines,
    resolve_f,
    run_sweep,
    summary_csv_lines,
)
from .svp_search import best_diagonal_svp, primes_below, search_max_svp

EXIT_PARSE = 2
EXIT_INCONSISTENT = 3
EXIT_CAPABILITY = 4


def _sqrt_str(sq: Fraction) -> str:
    return f"{math.sqrt(sq):.6g}"


def _cmd_hnf(args) -> int:
    dec = hnf(parse_matrix(args.matrix))
    print(f"h = {dec.h}")
    print(f"u = {dec.u}")
    return 0


def _cmd_snf(args) -> int:
    dec = snf(parse_matrix(args.matrix))
    print(f"lambda = {dec.lam}")
    print(f"u = {dec.u}")
    print(f"v = {dec.v}")
    return 0


def _cmd_gcld(args) -> int:
    g = gcld(parse_matrix(args.a), parse_matrix(args.b))
    print(f"gcld = {g}")
    print(f"det = {g.det}")
    return 0


def _cmd_lcrm(args) -> int:
    r = lcrm_many([parse_matrix(m) for m in args.matrices])
    print(f"lcrm = {r}")
    print(f"det = {r.det}")
    return 0


def _cmd_crt(args) -> int:
    if len(args.congruence) < 1:
        raise ConfigInvalid("need at least one --congruence MODULUS REMAINDER")
    congruences = []
    for mod_text, rem_text in args.congruence:
        m = parse_matrix(mod_text)
        r = parse_vector(rem_text)
        congruences.append(Congruence(m, reduce_mod(r, m)[1]))
    sol = crt_solve(congruences)
    print(f"value = {format_vector(sol.value)}")
    print(f"lcrm = {sol.lcrm}")
    return 0


def _sweep_configs(cfg: ExperimentConfig, only: str | None = None) -> list[SweepConfig]:
    out = []
    for recon in cfg.reconstructors:
        if only is not None and recon != only:
            continue
        out.append(
            SweepConfig(
                moduli=cfg.moduli,
                reconstructor=recon,
                grouping=cfg.grouping,
                taus=cfg.taus,
                trials=cfg.trials,
                seed=cfg.seed,
                f_mode=cfg.f_mode,
                f_value=cfg.f_value,
            )
        )
    if not out:
        raise ConfigInvalid(f"config does not enable reconstructor {only!r}")
    return out


def _emit_sweeps(cfg: ExperimentConfig, sweeps: list[SweepConfig], args) -> int:
    lines: list[str] = []
    raw_lines: list[str] = []
    for sweep in sweeps:
        if args.trials is not None:
            sweep = SweepConfig(
                **{**sweep.__dict__, "trials": args.trials}
            )
        fixed = resolve_f(sweep)
        if fixed is not None:
            print(f"# {sweep.name}: f = {format_vector(fixed)}", file=sys.stderr)
        summary = run_sweep(sweep, jobs=args.jobs, keep_raw=args.raw)
        block = summary_csv_lines(summary)
        lines.extend(block if not lines else block[1:])
        if args.raw:
            rblock = raw_csv_lines(summary)
            raw_lines.extend(rblock if not raw_lines else rblock[1:])
    text = "\n".join(lines) + "\n"
    out_path = args.out or cfg.out
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {out_path}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    if args.raw:
        sys.stdout.write("\n".join(raw_lines) + "\n")
    return 0


def _single_shot_robust(cfg: ExperimentConfig, remainders: list[str]) -> int:
    inst = build_instance(cfg.moduli)
    rems = [parse_vector(r) for r in remainders]
    out = robust_reconstruct(inst, rems, designated_lcrm=inst.lcrm)
    print(f"anchor = {inst.anchor}")
    print(f"tau_bound_sq = {inst.tau_bound_sq}")
    print(f"tau_bound_f = {_sqrt_str(inst.tau_bound_sq)}")
    print(f"estimate = ({','.join(str(x) for x in out.estimate)})")
    print(f"estimate_f = ({','.join(f'{float(x):.6g}' for x in out.estimate)})")
    try:
        region = robustly_determinable_region(inst, inst.lcrm)
        print(f"region_size = {region.size}")
    except CapExceeded:
        print(f"region_size = {abs(inst.lcrm.det)} (not enumerated)")
    return 0


def _single_shot_multistage(cfg: ExperimentConfig, remainders: list[str]) -> int:
    if cfg.grouping is None:
        raise ConfigInvalid("multistage needs a 'grouping' in the config")
    plan = build_plan(cfg.moduli, cfg.grouping)
    rems = [parse_vector(r) for r in remainders]
    out = multistage_reconstruct(plan, rems)
    bounds = ",".join(
        str(b.tau_max_sq) if b.tau_max_sq is not None else "inf" for b in plan.per_group_bounds
    )
    print(f"final_anchor = {plan.final_anchor}")
    print(f"per_group_bounds_sq = [{bounds}]")
    delta = plan.delta_final_sq
    print(f"delta_final_sq = {delta if delta is not None else 'inf'}")
    print(f"estimate = ({','.join(str(x) for x in out.estimate)})")
    print(f"estimate_f = ({','.join(f'{float(x):.6g}' for x in out.estimate)})")
    try:
        region = final_region(plan)
        print(f"region_size = {region.size}")
    except CapExceeded:
        print(f"region_size = {abs(plan.final_lcrm.det)} (not enumerated)")
    return 0


def _cmd_robust(args) -> int:
    cfg = load_config(args.config)
    if args.remainders:
        return _single_shot_robust(cfg, args.remainders)
    return _emit_sweeps(cfg, _sweep_configs(cfg, only="single"), args)


def _cmd_multistage(args) -> int:
    cfg = load_config(args.config)
    if args.remainders:
        return _single_shot_multistage(cfg, args.remainders)
    return _emit_sweeps(cfg, _sweep_configs(cfg, only="multistage"), args)


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    return _emit_sweeps(cfg, _sweep_configs(cfg), args)


def _cmd_svp_search(args) -> int:
    if args.prime is None and args.range is None:
        raise ConfigInvalid("need --prime P or --range A B")
    primes: list[int]
    if args.prime is not None:
        primes = [args.prime]
    else:
        a, b = args.range
        primes = [p for p in primes_below(b) if p >= a]
    print("prime,d,sqrt_d_f,floor_sqrt_p,achiever_count,first_achiever")
    for p in primes:
        res = search_max_svp(p)
        first = min(res.achievers)
        print(f"{p},{res.d},{res.sqrt_d:.6g},{best_diagonal_svp(p)},{len(res.achievers)},{first}")
    return 0


def _cmd_drange(args) -> int:
    cs = max_coprime_set(args.q)
    print(f"q = {cs.cap}")
    print(f"members = {list(cs.members)}")
    print(f"product = {cs.product}")
    print(f"range = {max_dynamic_range(args.q, args.dim)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdcrt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hnf", help="Hermite normal form of a matrix literal")
    p.add_argument("matrix")
    p.set_defaults(func=_cmd_hnf)

    p = sub.add_parser("snf", help="Smith normal form of a matrix literal")
    p.add_argument("matrix")
    p.set_defaults(func=_cmd_snf)

    p = sub.add_parser("gcld", help="greatest common left divisor")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=_cmd_gcld)

    p = sub.add_parser("lcrm", help="least common right multiple")
    p.add_argument("matrices", nargs="+")
    p.set_defaults(func=_cmd_lcrm)

    p = sub.add_parser("crt", help="solve a congruence system exactly")
    p.add_argument(
        "--congruence",
        nargs=2,
        action="append",
        metavar=("MODULUS", "REMAINDER"),
        default=[],
    )
    p.set_defaults(func=_cmd_crt)

    for name, fn in (("robust", _cmd_robust), ("multistage", _cmd_multistage)):
        p = sub.add_parser(name, help=f"{name} reconstruction or sweep")
        p.add_argument("config")
        p.add_argument("--remainders", nargs="+", help="single-shot mode: one vector per modulus")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--raw", action="store_true")
        p.add_argument("--out", default=None)
        p.set_defaults(func=fn)

    p = sub.add_parser("simulate", help="run every reconstructor in a config")
    p.add_argument("config")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--raw", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("svp-search", help="max shortest-vector search over prime HNF lattices")
    p.add_argument("--prime", type=int, default=None)
    p.add_argument("--range", type=int, nargs=2, default=None, metavar=("A", "B"))
    p.set_defaults(func=_cmd_svp_search)

    p = sub.add_parser("drange", help="max dynamic range table under a determinant cap")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--dim", type=int, default=2)
    p.set_defaults(func=_cmd_drange)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ConfigInvalid, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except Inconsistent as e:
        print(f"inconsistent: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (DimensionUnsupported, CapExceeded) as e:
        print(f"capability exceeded: {e}", file=sys.stderr)
        return EXIT_CAPABILITY
    except MdcrtError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
