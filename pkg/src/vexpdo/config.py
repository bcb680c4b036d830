"""Experiment configuration files.

Configs are INI-style ``key = value`` files with the sections
``[experiment]``, ``[grid]``, ``[exponent]``, ``[function]``,
``[symbol]``, ``[operation]``, ``[probes]``, ``[output]`` and
``[tolerances]``; every section is optional and defaults are listed in
``README.md``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .exponent import (Exponent, constant_exponent, log_holder_decay_exponent,
                       loglog_sine_exponent)
from .fredholm import ProbeFamilySpec
from .grid import Grid, SampledFunction, bump, make_grid, transform_function
from .symbols import BUILTIN_SYMBOLS, builtin_symbol, symbol_product, symbol_scale, symbol_sum

__all__ = ["ExperimentConfig", "load_config", "parse_config", "build_grid", "build_exponent",
           "build_function", "build_symbol", "build_probe_spec", "EXPONENT_BUILTINS"]

EXPONENT_BUILTINS = ("constant", "loglog_sine", "paper_example", "log_holder_decay", "affine")
FUNCTION_BUILTINS = ("bump", "indicator", "constant", "random", "spike")
_SECTIONS = ("experiment", "grid", "exponent", "function", "symbol", "operation",
             "probes", "output", "tolerances")


@dataclass
class ExperimentConfig:
    """Parsed configuration: one string-valued dict per section."""

    sections: dict = field(default_factory=dict)
    source: str = "<defaults>"

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})

    def get(self, section: str, key: str, default=None):
        return self.section(section).get(key, default)

    def number(self, section: str, key: str, default=None, kind=float, low=None, high=None):
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            value = kind(raw)
        except ValueError:
            raise ConfigError(f"{self.source}: [{section}] {key} = {raw!r} is not a valid {kind.__name__}",
                              field=f"{section}.{key}") from None
        if (low is not None and value < low) or (high is not None and value > high):
            raise ConfigError(f"{self.source}: [{section}] {key} = {value} outside [{low}, {high}]",
                              field=f"{section}.{key}")
        return value

    def numbers(self, section: str, key: str, default=None):
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return [float(t) for t in raw.replace(",", " ").split()]
        except ValueError:
            raise ConfigError(f"{self.source}: [{section}] {key} must be a list of numbers",
                              field=f"{section}.{key}") from None

    @property
    def seed(self) -> int:
        return self.number("experiment", "seed", 42, int)


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    unknown = [s for s in parser.sections() if s not in _SECTIONS]
    if unknown:
        raise ConfigError(f"{source}: unknown section [{unknown[0]}]; expected one of {', '.join(_SECTIONS)}",
                          field=unknown[0])
    return ExperimentConfig({s: dict(parser.items(s)) for s in parser.sections()}, source)


def load_config(path: Optional[str]) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, path)


def build_grid(cfg: ExperimentConfig) -> Grid:
    dim = cfg.number("grid", "dim", 1, int)
    L = cfg.number("grid", "L", 10.0)
    N = cfg.number("grid", "N", 128, int)
    try:
        return make_grid(dim, L, N)
    except ValueError as exc:
        raise ConfigError(f"{cfg.source}: [grid] {exc}", field="grid") from None


def _exponent_by_name(cfg, grid, name, prefix=""):
    key = lambda k: prefix + k  # noqa: E731
    if name == "constant":
        return constant_exponent(grid, cfg.number("exponent", key("value"), 2.0, low=1.0))
    if name in ("loglog_sine", "paper_example"):
        alpha = cfg.number("exponent", key("alpha"), 0.1)
        beta = cfg.number("exponent", key("beta"), 0.05)
        try:
            return loglog_sine_exponent(grid, alpha, beta)
        except ValueError as exc:
            raise ConfigError(f"{cfg.source}: [exponent] {exc}", field="exponent.beta") from None
    if name == "log_holder_decay":
        return log_holder_decay_exponent(grid, cfg.number("exponent", key("p_inf"), 2.0, low=1.0),
                                         cfg.number("exponent", key("amplitude"), 1.0))
    raise ConfigError(
        f"{cfg.source}: [exponent] name = {name!r} is not a known exponent; "
        f"expected one of {', '.join(EXPONENT_BUILTINS)}",
        field="exponent.name",
    )


def build_exponent(cfg: ExperimentConfig, grid: Grid) -> Exponent:
    """``affine`` means ``shift + scale * <base>`` for a built-in ``base``."""
    name = cfg.get("exponent", "name", "constant")
    if name == "affine":
        base_name = cfg.get("exponent", "base", "loglog_sine")
        if base_name == "affine":
            raise ConfigError(f"{cfg.source}: [exponent] base cannot itself be affine", field="exponent.base")
        base = _exponent_by_name(cfg, grid, base_name)
        scale = cfg.number("exponent", "scale", 1.0)
        shift = cfg.number("exponent", "shift", 0.0)
        g = base.closure
        return Exponent.from_closure(grid, lambda *x: shift + scale * g(*x),
                                     f"affine({shift:g}+{scale:g}*{base.name})")
    return _exponent_by_name(cfg, grid, name)


def build_function(cfg: ExperimentConfig, grid: Grid) -> SampledFunction:
    name = cfg.get("function", "name", "bump")
    center = cfg.numbers("function", "center", [0.0])
    if name == "bump":
        f = bump(grid, center if len(center) > 1 else center[0], cfg.number("function", "width", 1.0, low=1e-12))
    elif name == "indicator":
        lo = cfg.number("function", "lo", 0.0)
        hi = cfg.number("function", "hi", 1.0)
        mask = np.ones(grid.shape, dtype=bool)
        for c in grid.coords:
            mask &= (c >= lo) & (c < hi)
        f = SampledFunction(grid, mask * cfg.number("function", "height", 1.0))
    elif name == "constant":
        f = SampledFunction(grid, np.full(grid.shape, cfg.number("function", "value", 1.0)))
    elif name == "random":
        rng = np.random.default_rng(cfg.seed)
        f = SampledFunction(grid, rng.standard_normal(grid.shape))
    elif name == "spike":
        vals = np.zeros(grid.shape)
        vals[grid.nearest_index(center if len(center) > 1 else center[0])] = 1.0
        f = SampledFunction(grid, vals)
    else:
        raise ConfigError(f"{cfg.source}: [function] name = {name!r} is not a known function; "
                          f"expected one of {', '.join(FUNCTION_BUILTINS)}", field="function.name")
    omega = cfg.numbers("function", "modulate")
    if omega:
        f = transform_function(f, "modulate", omega if len(omega) > 1 else omega[0])
    return f


def _symbol_params(cfg):
    params = {}
    if "m" in cfg.section("symbol"):
        params["m"] = cfg.number("symbol", "m")
    if "multiplier" in cfg.section("symbol"):
        params["multiplier"] = cfg.get("symbol", "multiplier")
    return params


def _builtin(cfg, name, dim):
    try:
        return builtin_symbol(name, dim, **_symbol_params(cfg) if name in ("bracket_power", "multiplier") else {})
    except KeyError:
        raise ConfigError(f"{cfg.source}: [symbol] {name!r} is not a known symbol; expected one of "
                          f"{', '.join(BUILTIN_SYMBOLS + ('multiplier', 'sum', 'product', 'scale'))}",
                          field="symbol.name") from None


def build_symbol(cfg: ExperimentConfig, dim: int):
    name = cfg.get("symbol", "name", "one")
    if name in ("sum", "product"):
        left = _builtin(cfg, cfg.get("symbol", "left", "one"), dim)
        right = _builtin(cfg, cfg.get("symbol", "right", "one"), dim)
        return symbol_sum(left, right) if name == "sum" else symbol_product(left, right)
    if name == "scale":
        return symbol_scale(cfg.number("symbol", "factor", 1.0), _builtin(cfg, cfg.get("symbol", "base", "one"), dim))
    return _builtin(cfg, name, dim)


def build_probe_spec(cfg: ExperimentConfig) -> Optional[ProbeFamilySpec]:
    if "probes" not in cfg.sections:
        return None
    return ProbeFamilySpec(
        width=cfg.number("probes", "width", 1.5, low=1e-12),
        n_translates=cfg.number("probes", "n_translates", 5, int, low=2),
        n_modulations=cfg.number("probes", "n_modulations", 4, int, low=2),
        omega_max=cfg.number("probes", "omega_max", None),
    )
