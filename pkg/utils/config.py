import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from speclab.errors import ConfigError

EXPERIMENTS = (
    "growth",
    "weyl",
    "multiplicity",
    "extremal",
    "window_locality",
    "carleman",
    "maxprinciple",
    "whispering",
    "averaging",
    "bessel",
)

DOMAINS = ("torus2", "torus3", "rectangle", "disk", "ball")
BCS = ("dirichlet", "neumann", "none")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run. Fields an experiment does not use are echoed and ignored;
    empty `families`/`orders` and a zero `count` select the experiment defaults."""

    experiment: str
    domain: str = "disk"
    bc: str = "dirichlet"
    families: tuple[str, ...] = ()
    count: int = 0
    first: int = 1
    lambdas: tuple[float, ...] = ()
    lam_range: tuple[float, float] | None = None
    lam_sq: int = 5
    orders: tuple[int, ...] = ()
    grid: int | None = None
    eps: float = 1.0
    K: int = 6
    l_max: int = 12
    out: str = "reports"
    threads: int = 1

    def to_dict(self) -> dict:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data

    def with_overrides(self, out: str | None = None, threads: int | None = None) -> "ExperimentConfig":
        changes = {}
        if out is not None:
            if not out:
                raise ConfigError("output directory must not be empty")
            changes["out"] = out
        if threads is not None:
            if threads < 1:
                raise ConfigError(f"thread count must be positive, got {threads}")
            changes["threads"] = threads
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        if "experiment" not in data:
            raise ConfigError("configuration needs an 'experiment' key")
        values = dict(data)
        values["experiment"] = _choice(values, "experiment", EXPERIMENTS)
        if "domain" in values:
            values["domain"] = _choice(values, "domain", DOMAINS)
        if "bc" in values:
            values["bc"] = _choice(values, "bc", BCS)
        for key in ("count", "lam_sq", "K", "l_max"):
            if key in values:
                values[key] = _integer(values, key, low=0)
        for key in ("first", "threads"):
            if key in values:
                values[key] = _integer(values, key, low=1)
        if values.get("grid") is not None:
            values["grid"] = _integer(values, "grid", low=8)
        if "eps" in values:
            values["eps"] = _positive(values, "eps")
        if "out" in values and (not isinstance(values["out"], str) or not values["out"]):
            raise ConfigError("'out' must be a non-empty string")
        if "families" in values:
            values["families"] = tuple(_string_list(values, "families"))
        if "orders" in values:
            values["orders"] = tuple(_integer_list(values, "orders"))
        if "lambdas" in values:
            values["lambdas"] = tuple(_number_list(values, "lambdas"))
        if values.get("lam_range") is not None:
            values["lam_range"] = _lam_range(values["lam_range"])
        return cls(**values)


def _choice(values: dict, key: str, allowed: tuple[str, ...]) -> str:
    value = values[key]
    if value not in allowed:
        raise ConfigError(f"'{key}' must be one of {', '.join(allowed)}, got {value!r}")
    return value


def _integer(values: dict, key: str, low: int) -> int:
    value = values[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{key}' must be an integer, got {value!r}")
    if value < low:
        raise ConfigError(f"'{key}' must be at least {low}, got {value}")
    return value


def _number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"'{key}' entries must be finite numbers, got {value!r}")
    return float(value)


def _positive(values: dict, key: str) -> float:
    value = _number(values[key], key)
    if value <= 0:
        raise ConfigError(f"'{key}' must be positive, got {value}")
    return value


def _list(values: dict, key: str) -> list:
    value = values[key]
    if not isinstance(value, list):
        raise ConfigError(f"'{key}' must be a list")
    if not value and key == "lambdas":
        raise ConfigError("empty λ range")
    return value


def _string_list(values: dict, key: str) -> list[str]:
    items = _list(values, key)
    if not all(isinstance(item, str) for item in items):
        raise ConfigError(f"'{key}' must be a list of strings")
    return items


def _integer_list(values: dict, key: str) -> list[int]:
    items = _list(values, key)
    for item in items:
        if isinstance(item, bool) or not isinstance(item, int) or item < 0:
            raise ConfigError(f"'{key}' must be a list of nonnegative integers, got {item!r}")
    return items


def _number_list(values: dict, key: str) -> list[float]:
    items = [_number(item, key) for item in _list(values, key)]
    if any(item < 0 for item in items):
        raise ConfigError(f"'{key}' entries must be nonnegative")
    return items


def _lam_range(value) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("'lam_range' must be a list [low, high]")
    low, high = (_number(item, "lam_range") for item in value)
    if low < 0 or high < low:
        raise ConfigError(f"empty λ range [{low}, {high}]")
    return low, high


def load_config(path: str | Path) -> ExperimentConfig:
    """Read one experiment configuration from a JSON file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration {path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)
