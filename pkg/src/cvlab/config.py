"""Run configuration and its flat ``key = value`` file format."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields, replace

from .errors import CvlabError, ConfigError
from .funlab import DEFAULT_T_GRID, FunctionalSpec
from .geom.chart import DEFAULT_ORDER, SUPPORTED_DIMENSIONS, Chart
from .symcomb import Admissibility, IndexTuple, admissible_indices
from .vary import DEFAULT_CAP, DEFAULT_T_STEP

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class Config:
    n: int = 3
    lam: float = 1.0
    resolution: tuple[int, ...] | None = None
    order: int = DEFAULT_ORDER
    t_step: float = DEFAULT_T_STEP
    amplitude_cap: float = DEFAULT_CAP
    tol_pointwise: float = 1e-3
    tol_integral: float = 1e-4
    tol_fd_compare: float = 1e-2
    tol_exact: float = 1e-10
    seed: int = 0
    random_directions: int = 10
    random_functions: int = 50
    specs: tuple[tuple[int, int, int, int, int], ...] = ((3, 2, 1, 2, 1),)
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    comparison_scales: tuple[float, ...] = (0.9, 0.95, 1.0, 1.05)
    index_nmax: int = 60
    tt_directions: bool = False
    format: str = "json"
    out: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.n not in SUPPORTED_DIMENSIONS:
            raise ConfigError(f"n must be one of {SUPPORTED_DIMENSIONS}, got {self.n}")
        if not self.lam > 0:
            raise ConfigError("lambda must be positive")
        for name in ("t_step", "amplitude_cap", "tol_pointwise", "tol_integral",
                     "tol_fd_compare", "tol_exact"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if self.order < 2 or self.order % 2:
            raise ConfigError("order must be an even integer >= 2")
        if self.random_directions < 0 or self.random_functions < 0:
            raise ConfigError("sample counts must be non-negative")
        if self.index_nmax < 3:
            raise ConfigError("index_nmax must be >= 3")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if any(c <= 0 for c in self.comparison_scales):
            raise ConfigError("comparison scales must be positive")
        if not self.t_grid or any(t == 0 for t in self.t_grid):
            raise ConfigError("t_grid must be non-empty and exclude 0")
        if not self.specs:
            raise ConfigError("at least one index tuple is required")
        for s in self.specs:
            if len(s) != 5:
                raise ConfigError(f"index tuple {s} needs five entries (n, k, l, p, q)")
            try:
                t = IndexTuple(*s)
            except CvlabError as exc:
                raise ConfigError(str(exc)) from None
            if t.n != self.n:
                raise ConfigError(f"index tuple {s} is for n={t.n}, config has n={self.n}")
            if admissible_indices(t) is Admissibility.INADMISSIBLE:
                raise ConfigError(f"index tuple {s} is inadmissible")
        try:
            Chart(self.n, self.lam, self.resolution, self.order)
        except CvlabError as exc:
            raise ConfigError(f"grid: {exc}") from None

    @property
    def functional_specs(self) -> list[FunctionalSpec]:
        return [FunctionalSpec(IndexTuple(*s), self.lam) for s in self.specs]

    def with_overrides(self, **kw) -> "Config":
        kw = {k: v for k, v in kw.items() if v is not None}
        unknown = set(kw) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return replace(self, **kw)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["specs"] = [list(s) for s in self.specs]
        return d

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form, excluding output plumbing."""
        d = self.as_dict()
        d.pop("out")
        d.pop("format")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# -- flat file format -------------------------------------------------------------

_ALIASES = {"lambda": "lam", "grid": "resolution"}


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _resolution(text: str):
    vals = _ints(text)
    if not vals:
        return None
    return vals[0] if len(vals) == 1 else vals


def _specs(text: str):
    return tuple(_ints(part) for part in text.split(";") if part.strip())


def _none_or_str(text: str):
    return text or None


_PARSERS = {
    "n": int, "lam": float, "resolution": _resolution, "order": int, "t_step": float,
    "amplitude_cap": float, "tol_pointwise": float, "tol_integral": float,
    "tol_fd_compare": float, "tol_exact": float, "seed": int, "random_directions": int,
    "random_functions": int, "specs": _specs, "t_grid": _floats, "comparison_scales": _floats,
    "index_nmax": int, "tt_directions": _bool, "format": str.strip, "out": _none_or_str,
}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.  Returns raw overrides."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            out[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return out


def load_config(path=None, **overrides) -> Config:
    """Defaults, then the file (if any), then explicit overrides (``None`` means unset)."""
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Config(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def format_config(cfg: Config) -> str:
    """Inverse of :func:`parse_config_text` for every field."""
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "specs":
            text = "; ".join(",".join(str(x) for x in s) for s in v)
        elif isinstance(v, tuple):
            text = ", ".join(repr(x) for x in v)
        elif v is None:
            text = ""
        else:
            text = repr(v) if isinstance(v, float) else str(v)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"
