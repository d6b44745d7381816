"""Flat key-value experiment configuration with bracketed integer literals.

Example::

    # two-group plan over four moduli
    moduli = [[[30,0],[960,26430]], [[70,0],[11050,61670]]]
    grouping = [[[0,1],[2]]]
    reconstructors = single,multistage
    tau_grid = [5,10,15]
    trials = 500
    seed = 20250809
    f = centroid

``f`` is either the word ``centroid``, the word ``per-trial``, or an explicit
vector literal like ``[12,34]``. Parsing and serializing round-trip exactly.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigInvalid
from .exact_linalg import IntMatrix, IntVec

_KNOWN_KEYS = ("moduli", "grouping", "reconstructors", "tau_grid", "trials", "seed", "f", "out")
_RECONSTRUCTORS = ("single", "multistage")


@dataclass(frozen=True)
class ExperimentConfig:
    moduli: tuple[IntMatrix, ...]
    grouping: tuple | None
    reconstructors: tuple[str, ...]
    taus: tuple[Fraction, ...]
    trials: int
    seed: int
    f_mode: str  # "centroid", "per-trial", or "explicit"
    f_value: IntVec | None
    out: str | None


def _literal(key: str, text: str):
    try:
        return ast.literal_eval(text)
    except (SyntaxError, ValueError) as e:
        offset = getattr(e, "offset", 0)
        raise ConfigInvalid(f"key {key!r}: malformed literal at offset {offset}: {text!r}") from None


def _as_nested_tuple(obj):
    if isinstance(obj, (list, tuple)):
        return tuple(_as_nested_tuple(x) for x in obj)
    if isinstance(obj, int) and not isinstance(obj, bool):
        return obj
    raise ConfigInvalid(f"expected nested integer lists, found {obj!r}")


def parse_config(text: str) -> ExperimentConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigInvalid(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigInvalid(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigInvalid(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value.strip()

    if "moduli" not in raw:
        raise ConfigInvalid("missing required key 'moduli'")
    moduli_obj = _literal("moduli", raw["moduli"])
    if not isinstance(moduli_obj, (list, tuple)) or not moduli_obj:
        raise ConfigInvalid("'moduli' must be a non-empty list of matrices")
    moduli = tuple(IntMatrix.from_rows(m) for m in moduli_obj)
    if any(not m.is_square or m.dim != moduli[0].dim for m in moduli):
        raise ConfigInvalid("'moduli' must all be square matrices of one dimension")

    grouping = None
    if "grouping" in raw:
        grouping = _as_nested_tuple(_literal("grouping", raw["grouping"]))
        if not all(isinstance(stage, tuple) for stage in grouping):
            raise ConfigInvalid("'grouping' must be a list of stages")

    recon_text = raw.get("reconstructors", "single")
    reconstructors = tuple(s.strip() for s in recon_text.split(",") if s.strip())
    for r in reconstructors:
        if r not in _RECONSTRUCTORS:
            raise ConfigInvalid(f"unknown reconstructor {r!r}")
    if "multistage" in reconstructors and grouping is None:
        raise ConfigInvalid("reconstructor 'multistage' requires a 'grouping'")

    taus_obj = _literal("tau_grid", raw["tau_grid"]) if "tau_grid" in raw else []
    if not isinstance(taus_obj, (list, tuple)) or not all(
        isinstance(t, int) and not isinstance(t, bool) for t in taus_obj
    ):
        raise ConfigInvalid("'tau_grid' must be a list of nonnegative integers")
    taus = tuple(Fraction(t) for t in taus_obj)
    if any(t < 0 for t in taus):
        raise ConfigInvalid("'tau_grid' entries must be nonnegative")

    trials = int(raw.get("trials", "2000"))
    seed = int(raw.get("seed", "0"))

    f_text = raw.get("f", "centroid")
    if f_text in ("centroid", "per-trial"):
        f_mode, f_value = f_text, None
    else:
        vec_obj = _literal("f", f_text)
        if not isinstance(vec_obj, (list, tuple)) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in vec_obj
        ):
            raise ConfigInvalid("'f' must be 'centroid', 'per-trial', or an integer vector")
        f_mode, f_value = "explicit", tuple(vec_obj)

    return ExperimentConfig(
        moduli=moduli,
        grouping=grouping,
        reconstructors=reconstructors,
        taus=taus,
        trials=trials,
        seed=seed,
        f_mode=f_mode,
        f_value=f_value,
        out=raw.get("out"),
    )


def serialize_config(cfg: ExperimentConfig) -> str:
    lines = []
    lines.append("moduli = [" + ",".join(str(m) for m in cfg.moduli) + "]")
    if cfg.grouping is not None:
        lines.append("grouping = " + _nested_str(cfg.grouping))
    lines.append("reconstructors = " + ",".join(cfg.reconstructors))
    lines.append("tau_grid = [" + ",".join(_tau_str(t) for t in cfg.taus) + "]")
    lines.append(f"trials = {cfg.trials}")
    lines.append(f"seed = {cfg.seed}")
    if cfg.f_mode == "explicit":
        lines.append("f = [" + ",".join(str(x) for x in cfg.f_value) + "]")
    else:
        lines.append(f"f = {cfg.f_mode}")
    if cfg.out is not None:
        lines.append(f"out = {cfg.out}")
    return "\n".join(lines) + "\n"


def _tau_str(t: Fraction) -> str:
    return str(t.numerator) if t.denominator == 1 else str(t)


def _nested_str(obj) -> str:
    if isinstance(obj, tuple):
        return "[" + ",".join(_nested_str(x) for x in obj) + "]"
    return str(obj)


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
