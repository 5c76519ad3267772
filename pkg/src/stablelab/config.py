"""Flat key = value experiment configuration.

The config format is a plain text file of ``key = value`` lines with ``#``
comments.  Every key is typed by the schema below; unknown keys and badly
typed values are reported with their field path.  Omitted keys fall back
to embedded defaults, first experiment-specific, then global, so a file
containing only ``experiment = dynkin-check`` is a complete run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["ConfigError", "ExperimentConfig", "EXPERIMENTS", "parse_config", "default_config"]


class ConfigError(ValueError):
    """Schema or precondition violation; the message carries the field path."""


EXPERIMENTS = (
    "sample-paths",
    "exit-time",
    "tightness-scan",
    "dynkin-check",
    "t-norm-check",
    "spectra",
    "trace-study",
    "beta-transition",
    "theorem4-scan",
    "resolvent-bounds",
)


def _float(text: str) -> float:
    return float(text)


def _int(text: str) -> int:
    v = int(text)
    return v


def _floats(text: str) -> tuple:
    return tuple(float(p) for p in text.replace(",", " ").split())


def _ints(text: str) -> tuple:
    return tuple(int(p) for p in text.replace(",", " ").split())


def _str(text: str) -> str:
    return text.strip()


# key -> (parser, human-readable constraint, validator)
_SCHEMA = {
    "experiment": (_str, f"one of {', '.join(EXPERIMENTS)}", lambda v: v in EXPERIMENTS),
    "alpha": (_float, "alpha ∈ (0,2]", lambda v: 0.0 < v <= 2.0),
    "dim": (_int, "positive integer", lambda v: v >= 1),
    "h": (_float, "positive real", lambda v: v > 0.0),
    "t": (_float, "positive real", lambda v: v > 0.0),
    "t_max": (_float, "positive real", lambda v: v > 0.0),
    "n_paths": (_int, "integer >= 2", lambda v: v >= 2),
    "seed": (_int, "unsigned 64-bit integer", lambda v: 0 <= v < 2**64),
    "threads": (_int, "integer >= 1", lambda v: v >= 1),
    "domain.shape": (
        _str,
        "one of fullspace, ball, interval, shrinking-balls, disjoint-intervals",
        lambda v: v in ("fullspace", "ball", "interval", "shrinking-balls", "disjoint-intervals"),
    ),
    "domain.radius": (_float, "positive real", lambda v: v > 0.0),
    "domain.a": (_float, "real", lambda v: True),
    "domain.b": (_float, "real", lambda v: True),
    "domain.n_max": (_int, "integer >= 1", lambda v: v >= 1),
    "potential.kind": (_str, "none or power", lambda v: v in ("none", "power")),
    "potential.c": (_float, "nonnegative real", lambda v: v >= 0.0),
    "potential.gamma": (_float, "nonnegative real", lambda v: v >= 0.0),
    "potential.offset": (_float, "nonnegative real", lambda v: v >= 0.0),
    "weight.beta": (_float, "nonnegative real", lambda v: v >= 0.0),
    "grid.delta": (_float, "positive real", lambda v: v > 0.0),
    "grid.radius": (_float, "positive real", lambda v: v > 0.0),
    "probes": (_floats, "comma-separated reals", lambda v: len(v) >= 1),
    "radii": (_floats, "comma-separated positive reals", lambda v: all(r > 0 for r in v)),
    "betas": (_floats, "comma-separated nonnegative reals", lambda v: all(b >= 0 for b in v)),
    "n_list": (_ints, "comma-separated integers >= 1", lambda v: all(n >= 1 for n in v)),
    "level.n": (_float, "positive real (level radius)", lambda v: v > 0.0),
    "level.m": (_float, "positive real (compact radius)", lambda v: v > 0.0),
    "f.kind": (_str, "gaussian or cauchy", lambda v: v in ("gaussian", "cauchy")),
    "f.param": (_float, "positive real", lambda v: v > 0.0),
    "x0": (_floats, "comma-separated reals", lambda v: len(v) >= 1),
    "trace.t": (_float, "positive real", lambda v: v > 0.0),
    "times": (_floats, "comma-separated positive reals", lambda v: all(t > 0 for t in v)),
}

_GLOBAL_DEFAULTS = {
    "alpha": 2.0,
    "dim": 1,
    "h": 1e-3,
    "n_paths": 10_000,
    "seed": 20_240_001,
    "threads": 1,
}

_EXPERIMENT_DEFAULTS = {
    "sample-paths": {"x0": (0.0,), "t_max": 1.0, "n_paths": 4},
    "exit-time": {
        "domain.shape": "interval", "domain.a": -1.0, "domain.b": 1.0,
        "x0": (0.0,), "t_max": 12.0,
    },
    "tightness-scan": {
        "domain.shape": "shrinking-balls", "domain.n_max": 40, "dim": 2,
        "probes": (5.0, 10.0, 20.0, 40.0), "t_max": 20.0, "n_paths": 5_000,
    },
    "dynkin-check": {
        "domain.shape": "interval", "domain.a": -1.0, "domain.b": 1.0,
        "x0": (0.0,), "t": 0.5, "f.kind": "gaussian", "f.param": 1.0,
        "n_paths": 100_000,
    },
    "t-norm-check": {
        "alpha": 1.0, "potential.kind": "power", "potential.c": 1.0,
        "potential.gamma": 2.0, "potential.offset": 1.0,
        "level.n": 6.0, "level.m": 3.0, "t": 1.0, "n_paths": 4_000,
    },
    "spectra": {
        "grid.delta": 0.02, "grid.radius": 12.0,
        "potential.kind": "power", "potential.c": 1.0,
        "potential.gamma": 2.0, "potential.offset": 1.0, "times": (0.5, 1.0),
    },
    "trace-study": {
        "n_list": (8, 16, 32, 64), "grid.delta": 0.01, "trace.t": 0.01,
    },
    "beta-transition": {
        "alpha": 1.0, "betas": (2.0, 0.5), "radii": (20.0, 40.0, 80.0),
        "grid.delta": 0.05,
    },
    "theorem4-scan": {
        "dim": 2, "domain.n_max": 40, "probes": (5.0, 10.0, 20.0, 40.0),
        "t_max": 20.0, "n_paths": 5_000,
    },
    "resolvent-bounds": {
        "alpha": 0.5, "weight.beta": 1.0, "probes": (1.0, 2.0, 4.0, 8.0, 16.0),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved, validated configuration for one experiment run."""

    experiment: str
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    def resolved_lines(self) -> list[str]:
        """Sorted key=value lines of the full resolved config."""
        lines = [f"experiment={self.experiment}"]
        for k in sorted(self.values):
            v = self.values[k]
            if isinstance(v, tuple):
                text = ",".join(format(x, ".12g") if isinstance(x, float) else str(x) for x in v)
            elif isinstance(v, float):
                text = format(v, ".12g")
            else:
                text = str(v)
            lines.append(f"{k}={text}")
        return lines


def _parse_value(key: str, raw: str):
    if key not in _SCHEMA:
        raise ConfigError(f"{key}: unknown configuration key")
    parser, constraint, validator = _SCHEMA[key]
    try:
        value = parser(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}; expected {constraint}") from None
    if not validator(value):
        raise ConfigError(f"{key}: value {raw!r} violates constraint: {constraint}")
    return value


def parse_config(
    text: str, experiment: str | None = None, overrides: dict | None = None
) -> ExperimentConfig:
    """Parse config text, merge defaults and overrides, validate everything."""
    raw: dict = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {ln}: expected 'key = value', got {stripped!r}")
        key, _, val = stripped.partition("=")
        raw[key.strip()] = val.strip()
    values = {k: _parse_value(k, v) for k, v in raw.items()}
    exp = experiment or values.pop("experiment", None)
    values.pop("experiment", None)
    if exp is None:
        raise ConfigError("experiment: missing; set it in the config or on the command line")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment: {exp!r} is not one of {', '.join(EXPERIMENTS)}")
    merged = dict(_GLOBAL_DEFAULTS)
    merged.update(_EXPERIMENT_DEFAULTS.get(exp, {}))
    merged.update(values)
    if overrides:
        for k, v in overrides.items():
            merged[k] = _parse_value(k, str(v)) if isinstance(v, str) else v
    cfg = ExperimentConfig(experiment=exp, values=merged)
    _check_preconditions(cfg)
    return cfg


def default_config(experiment: str) -> ExperimentConfig:
    return parse_config("", experiment=experiment)


def _check_preconditions(cfg: ExperimentConfig) -> None:
    """Cross-field hypotheses that single-key validators cannot see."""
    exp = cfg.experiment
    alpha = cfg.get("alpha")
    dim = cfg.get("dim")
    if exp == "resolvent-bounds":
        if not dim > alpha:
            raise ConfigError(
                f"alpha: transience requires d > alpha for time-change resolvents; "
                f"got d={dim}, alpha={alpha}"
            )
    if exp == "dynkin-check":
        kind = cfg.get("f.kind")
        if kind == "gaussian" and alpha != 2.0:
            raise ConfigError(
                "f.kind: the gaussian test family needs alpha = 2 for a closed-form inner semigroup"
            )
        if kind == "cauchy" and alpha != 1.0:
            raise ConfigError(
                "f.kind: the cauchy test family needs alpha = 1 for a closed-form inner semigroup"
            )
    if exp == "t-norm-check":
        if cfg.get("potential.kind", "none") == "none":
            raise ConfigError(
                "potential.kind: t-norm-check needs a killing potential "
                "(a conservative process has infinite mean lifetime)"
            )
        if not cfg.get("level.m", 0.0) < cfg.get("level.n", 0.0):
            raise ConfigError("level.m: must be smaller than level.n")
    if exp == "trace-study":
        ns = cfg.get("n_list", ())
        if any(b != 2 * a for a, b in zip(ns[:-1], ns[1:])):
            raise ConfigError("n_list: trace growth is measured per doubling; use a doubling list")
