"""JSON run configuration with line-accurate validation errors."""

from __future__ import annotations

import json
import json.decoder
import json.scanner
import re
from dataclasses import asdict, dataclass, field
from typing import Optional

from .core import V_MAX, EosParams
from .exact import RiemannState
from .fv import BOUNDARIES, RECONSTRUCTIONS, SchemeConfig
from .harness import TestSpec


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class StateConfig:
    rho: float
    vx: float
    vt: float = 0.0
    tangent_dir: tuple = (1.0, 0.0)

    def to_state(self) -> RiemannState:
        return RiemannState(self.rho, self.vx, self.vt, self.tangent_dir)


@dataclass(frozen=True)
class GridConfig:
    dims: int = 1
    x_bounds: tuple = (-2.0, 2.0)
    zones_per_unit: int = 100
    transverse_cells: int = 4
    resolutions: tuple = (100, 200, 400, 800, 1600)


@dataclass(frozen=True)
class SchemeSection:
    courant_factor: float = 0.1
    reconstruction: str = "minmod"
    boundary: str = "outflow"


@dataclass(frozen=True)
class RunConfig:
    k: float
    left: StateConfig
    right: StateConfig
    t_end: float = 1.0
    grid: GridConfig = field(default_factory=GridConfig)
    scheme: SchemeSection = field(default_factory=SchemeSection)
    error_interval: tuple = (-1.0, 1.0)
    output: Optional[str] = None

    @property
    def eos(self) -> EosParams:
        return EosParams(self.k)

    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(self.eos, self.scheme.courant_factor, self.scheme.reconstruction,
                            (self.scheme.boundary,) * self.grid.dims)

    def test_spec(self, resolutions=None, dims=None) -> TestSpec:
        if (dims or self.grid.dims) not in (1, 2):
            raise ConfigError("shock-tube runs support grid.dims of 1 or 2")
        return TestSpec(self.left.to_state(), self.right.to_state(), self.eos, self.t_end,
                        self.error_interval, tuple(resolutions or self.grid.resolutions),
                        self.scheme.courant_factor, dims or self.grid.dims, self.grid.x_bounds,
                        self.grid.transverse_cells, self.scheme.reconstruction)

    def to_dict(self) -> dict:
        d = asdict(self)
        out = {"eos": {"k": d.pop("k")}}
        for key in ("left", "right"):
            d[key]["tangent_dir"] = list(d[key]["tangent_dir"])
        d["grid"]["x_bounds"] = list(d["grid"]["x_bounds"])
        d["grid"]["resolutions"] = list(d["grid"]["resolutions"])
        d["error_interval"] = list(d["error_interval"])
        out.update(d)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# position-tracking decode


def _decode_with_spans(text: str):
    """Parse JSON recording the character span of every object."""
    spans = {}
    plain = json.decoder.JSONObject

    def parse_object(s_and_end, *args, **kwargs):
        start = s_and_end[1] - 1
        obj, end = plain(s_and_end, *args, **kwargs)
        spans[id(obj)] = (start, end)
        return obj, end

    decoder = json.JSONDecoder()
    decoder.parse_object = parse_object
    decoder.scan_once = json.scanner.py_make_scanner(decoder)
    return decoder.decode(text), spans


class _Locator:
    def __init__(self, text: str, spans: dict):
        self.text, self.spans = text, spans

    def line_of(self, obj: dict, key: str) -> Optional[int]:
        span = self.spans.get(id(obj))
        if span is None:
            return None
        start, end = span
        masked = list(self.text[start:end])
        for child in obj.values():
            cs = self.spans.get(id(child)) if isinstance(child, dict) else None
            if cs is not None:
                masked[cs[0] - start:cs[1] - start] = " " * (cs[1] - cs[0])
        m = re.search(r'"%s"\s*:' % re.escape(key), "".join(masked))
        pos = start + (m.start() if m else 0)
        return self.text.count("\n", 0, pos) + 1

    def line_of_object(self, obj: dict) -> Optional[int]:
        span = self.spans.get(id(obj))
        return None if span is None else self.text.count("\n", 0, span[0]) + 1


def _section(raw: dict, key: str, loc: _Locator, required=True) -> dict:
    if key not in raw:
        if required:
            raise ConfigError(f"missing required section {key!r}", loc.line_of_object(raw))
        return {}
    val = raw[key]
    if not isinstance(val, dict):
        raise ConfigError(f"{key!r} must be an object", loc.line_of(raw, key))
    return val


def _number(obj: dict, key: str, loc: _Locator, path: str, default=None, kind=float):
    if key not in obj:
        if default is None:
            raise ConfigError(f"missing required value {path}", loc.line_of_object(obj))
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path} must be a number, got {val!r}", loc.line_of(obj, key))
    if kind is int:
        if int(val) != val:
            raise ConfigError(f"{path} must be an integer, got {val!r}", loc.line_of(obj, key))
        return int(val)
    return float(val)


def _pair(obj: dict, key: str, loc: _Locator, path: str, default):
    if key not in obj:
        return tuple(default)
    val = obj[key]
    if (not isinstance(val, list) or len(val) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val)):
        raise ConfigError(f"{path} must be a list of two numbers", loc.line_of(obj, key))
    return (float(val[0]), float(val[1]))


def _state(raw: dict, key: str, loc: _Locator) -> StateConfig:
    obj = _section(raw, key, loc)
    line = loc.line_of(raw, key)
    unknown = set(obj) - {"rho", "vx", "vt", "tangent_dir"}
    if unknown:
        raise ConfigError(f"unknown keys in {key}: {sorted(unknown)}", line)
    cfg = StateConfig(_number(obj, "rho", loc, f"{key}.rho"), _number(obj, "vx", loc, f"{key}.vx"),
                      _number(obj, "vt", loc, f"{key}.vt", 0.0),
                      _pair(obj, "tangent_dir", loc, f"{key}.tangent_dir", (1.0, 0.0)))
    if not cfg.rho > 0.0:
        raise ConfigError(f"{key}.rho must be positive", loc.line_of(obj, "rho"))
    if cfg.vt < 0.0:
        raise ConfigError(f"{key}.vt is a magnitude and must be >= 0", loc.line_of(obj, "vt"))
    if not (cfg.vx * cfg.vx + cfg.vt * cfg.vt) ** 0.5 <= V_MAX:
        which = "vt" if "vt" in obj and abs(cfg.vt) > abs(cfg.vx) else "vx"
        raise ConfigError(f"{key}: speed sqrt(vx^2 + vt^2) must be below 1", loc.line_of(obj, which))
    if cfg.tangent_dir == (0.0, 0.0):
        raise ConfigError(f"{key}.tangent_dir must be nonzero", loc.line_of(obj, "tangent_dir"))
    return cfg


def parse_config(text: str) -> RunConfig:
    """Build a validated :class:`RunConfig` from JSON text."""
    try:
        raw, spans = _decode_with_spans(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object", 1)
    loc = _Locator(text, spans)
    known = {"eos", "left", "right", "t_end", "grid", "scheme", "error_interval", "output"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", loc.line_of(raw, key))

    eos = _section(raw, "eos", loc)
    k = _number(eos, "k", loc, "eos.k")
    try:
        EosParams(k)
    except ValueError as exc:
        raise ConfigError(str(exc), loc.line_of(eos, "k")) from None
    left, right = _state(raw, "left", loc), _state(raw, "right", loc)

    t_end = _number(raw, "t_end", loc, "t_end", 1.0)
    if t_end < 0.0:
        raise ConfigError("t_end must be non-negative", loc.line_of(raw, "t_end"))

    g = _section(raw, "grid", loc, required=False)
    gd = GridConfig()
    dims = _number(g, "dims", loc, "grid.dims", gd.dims, int)
    if dims not in (1, 2, 3):
        raise ConfigError("grid.dims must be 1, 2 or 3", loc.line_of(g, "dims"))
    bounds = _pair(g, "x_bounds", loc, "grid.x_bounds", gd.x_bounds)
    if not bounds[0] < bounds[1]:
        raise ConfigError("grid.x_bounds must be increasing", loc.line_of(g, "x_bounds"))
    zpu = _number(g, "zones_per_unit", loc, "grid.zones_per_unit", gd.zones_per_unit, int)
    if zpu < 1:
        raise ConfigError("grid.zones_per_unit must be positive", loc.line_of(g, "zones_per_unit"))
    ny = _number(g, "transverse_cells", loc, "grid.transverse_cells", gd.transverse_cells, int)
    if ny < 1:
        raise ConfigError("grid.transverse_cells must be positive", loc.line_of(g, "transverse_cells"))
    res = g.get("resolutions", list(gd.resolutions))
    if (not isinstance(res, list) or not res
            or not all(isinstance(r, int) and not isinstance(r, bool) and r > 0 for r in res)
            or any(b <= a for a, b in zip(res, res[1:]))):
        raise ConfigError("grid.resolutions must be a strictly increasing list of positive integers",
                          loc.line_of(g, "resolutions"))
    grid = GridConfig(dims, bounds, zpu, ny, tuple(res))

    s = _section(raw, "scheme", loc, required=False)
    cfl = _number(s, "courant_factor", loc, "scheme.courant_factor", 0.1)
    if not 0.0 < cfl <= 1.0:
        raise ConfigError("scheme.courant_factor must lie in (0, 1]", loc.line_of(s, "courant_factor"))
    recon = s.get("reconstruction", "minmod")
    if recon not in RECONSTRUCTIONS:
        raise ConfigError(f"scheme.reconstruction must be one of {RECONSTRUCTIONS}",
                          loc.line_of(s, "reconstruction"))
    boundary = s.get("boundary", "outflow")
    if boundary not in BOUNDARIES:
        raise ConfigError(f"scheme.boundary must be one of {BOUNDARIES}", loc.line_of(s, "boundary"))
    scheme = SchemeSection(cfl, recon, boundary)

    interval = _pair(raw, "error_interval", loc, "error_interval", (-1.0, 1.0))
    if not interval[0] < interval[1]:
        raise ConfigError("error_interval must be increasing", loc.line_of(raw, "error_interval"))
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a path string or null", loc.line_of(raw, "output"))
    return RunConfig(k, left, right, t_end, grid, scheme, interval, output)


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
