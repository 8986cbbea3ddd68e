"""
Experiment configuration files.

Format: UTF-8, line oriented ``key = value`` pairs under a single
``[section]`` header naming the experiment (``blr``, ``simplex_quadratic``,
``dirichlet`` or ``custom``).  ``#`` starts a comment line, booleans are
``true``/``false`` and vectors are comma-separated numbers::

    # sweep over inner steps
    [dirichlet]
    seed = 7
    inner_steps_sweep = 1, 5, 10, 20

Keys that are omitted take the per-experiment defaults in ``DEFAULTS``.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, fields

from ..exceptions import ParseError, ValidationError

EXPERIMENTS = ("blr", "simplex_quadratic", "dirichlet", "custom")
SAMPLER_NAMES = ("mla", "ula", "pla")
REFERENCES = ("auto", "rejection", "selfref", "dirichlet", "none")
CUSTOM_MIRRORS = ("euclidean", "box", "simplex", "weighted_simplex")
CUSTOM_POTENTIALS = ("zero", "quadratic", "dirichlet")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    sampler: str = "mla"
    dimension: int = 10
    step_size: float = 0.005
    pla_step_size: float = 0.005
    inner_steps: int = 10
    inner_steps_sweep: tuple = (1, 5, 10, 20)
    iterations: int = 30
    chains: int = 30
    trials: int = 10
    burn_in: int = 0
    seed: int = 0
    # blr
    n_pairs: int = 1000
    theta_star: float = 0.9
    dataset: str = ""
    # simplex_quadratic
    matrix_seed: int = 0
    reference: str = "auto"
    selfref_iterations: int = 1000
    # dirichlet
    weights: tuple = ()
    # custom
    mirror: str = "box"
    potential: str = "zero"

    def __post_init__(self):
        validate(self)

    @property
    def weight_vector(self) -> tuple:
        """Dirichlet weights ``a_0..a_d``; all 2 by default."""
        return self.weights if self.weights else (2.0,) * (self.dimension + 1)


# Per-experiment defaults; everything else falls back to the dataclass defaults.
DEFAULTS = {
    "blr": dict(dimension=10, step_size=0.005, pla_step_size=0.005, inner_steps=10,
                iterations=500, chains=30, trials=10, n_pairs=1000, theta_star=0.9),
    "simplex_quadratic": dict(dimension=100, step_size=5e-3, pla_step_size=1e-6, inner_steps=10,
                              iterations=30, chains=256, trials=10),
    "dirichlet": dict(dimension=10, step_size=0.005, inner_steps=20, iterations=30, chains=256,
                      trials=10, reference="dirichlet"),
    "custom": dict(dimension=2, step_size=0.01, inner_steps=10, iterations=100, chains=30, trials=1,
                   reference="none"),
}

_FIELD_TYPES = {f.name: f for f in fields(ExperimentConfig)}
_INT = {"dimension", "inner_steps", "iterations", "chains", "trials", "burn_in", "seed",
        "n_pairs", "matrix_seed", "selfref_iterations"}
_FLOAT = {"step_size", "pla_step_size", "theta_star"}
_BOOL: set = set()
_INT_VEC = {"inner_steps_sweep"}
_FLOAT_VEC = {"weights"}
_STR = {"sampler", "dataset", "reference", "mirror", "potential"}


def validate(cfg: ExperimentConfig) -> None:
    if cfg.experiment not in EXPERIMENTS:
        raise ValidationError(f"experiment must be one of {EXPERIMENTS}, got {cfg.experiment!r}")
    if cfg.sampler not in SAMPLER_NAMES:
        raise ValidationError(f"sampler must be one of {SAMPLER_NAMES}")
    if cfg.reference not in REFERENCES:
        raise ValidationError(f"reference must be one of {REFERENCES}")
    if cfg.mirror not in CUSTOM_MIRRORS:
        raise ValidationError(f"mirror must be one of {CUSTOM_MIRRORS}")
    if cfg.potential not in CUSTOM_POTENTIALS:
        raise ValidationError(f"potential must be one of {CUSTOM_POTENTIALS}")
    for name in ("dimension", "inner_steps", "iterations", "chains", "trials", "n_pairs",
                 "selfref_iterations"):
        if getattr(cfg, name) < 1:
            raise ValidationError(f"{name} must be >= 1")
    for name in ("step_size", "pla_step_size"):
        v = getattr(cfg, name)
        if not (v > 0 and math.isfinite(v)):
            raise ValidationError(f"{name} must be positive")
    if not (0 <= cfg.burn_in < cfg.iterations):
        raise ValidationError("burn_in must satisfy 0 <= burn_in < iterations")
    if not (0 <= cfg.seed < 2 ** 64):
        raise ValidationError("seed must be an unsigned 64-bit integer")
    if not cfg.inner_steps_sweep or any(k < 1 for k in cfg.inner_steps_sweep):
        raise ValidationError("inner_steps_sweep entries must be >= 1")
    if cfg.weights:
        if len(cfg.weights) != cfg.dimension + 1:
            raise ValidationError("weights must list a_0..a_d (dimension + 1 values)")
        if any(not (a > 0) for a in cfg.weights):
            raise ValidationError("weights must be strictly positive")


def _parse_value(key, raw, lineno):
    raw = raw.strip()
    try:
        if key in _INT:
            return int(raw)
        if key in _FLOAT:
            return float(raw)
        if key in _BOOL:
            low = raw.lower()
            if low not in ("true", "false"):
                raise ValueError("expected true or false")
            return low == "true"
        if key in _INT_VEC:
            return tuple(int(p) for p in raw.split(","))
        if key in _FLOAT_VEC:
            return tuple(float(p) for p in raw.split(",")) if raw else ()
        return raw
    except ValueError as exc:
        raise ParseError(f"bad value for {key!r}: {raw!r} ({exc})", lineno) from None


def _key_lines(text: str) -> dict:
    lines = {}
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s and not s.startswith(("#", ";", "[")) and "=" in s:
            lines.setdefault(s.split("=", 1)[0].strip().lower(), n)
    return lines


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    parser = configparser.ConfigParser(
        strict=True, interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=None,
        delimiters=("=",), default_section="\x00defaults",
    )
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ParseError(f"duplicate key {exc.option!r}", exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ParseError(f"duplicate section {exc.section!r}", exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("missing [experiment] section header", exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ParseError(f"malformed line {exc.errors[0][1] if exc.errors else ''}", lineno) from None
    sections = parser.sections()
    if len(sections) != 1:
        raise ParseError(f"expected exactly one [experiment] section, found {len(sections)}")
    experiment = sections[0].strip().lower().replace("-", "_")
    if experiment not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment section [{sections[0]}]")
    lines = _key_lines(text)
    values = dict(DEFAULTS[experiment])
    for key, raw in parser.items(sections[0]):
        if key not in _FIELD_TYPES or key == "experiment":
            raise ParseError(f"unknown key {key!r}", lines.get(key))
        values[key] = _parse_value(key, raw, lines.get(key))
    values.update(overrides or {})
    return ExperimentConfig(experiment=experiment, **values)


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    """Read and validate a configuration file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, overrides)


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    experiment = experiment.replace("-", "_")
    if experiment not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {experiment!r}")
    values = dict(DEFAULTS[experiment])
    values.update(overrides)
    return ExperimentConfig(experiment=experiment, **values)


def _format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(repr(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_config(cfg: ExperimentConfig) -> str:
    """Serialise every field so that ``parse_config(dump_config(c)) == c``."""
    out = [f"[{cfg.experiment}]"]
    for f in fields(cfg):
        if f.name == "experiment":
            continue
        out.append(f"{f.name} = {_format_value(getattr(cfg, f.name))}")
    return "\n".join(out) + "\n"


def replace(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    return dataclasses.replace(cfg, **changes)
