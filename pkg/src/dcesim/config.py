"""Experiment configuration: a strict TOML schema with tagged unions.

See ``docs/config_schema.md`` for the full reference. Unknown keys are
errors everywhere, so a misspelt physics parameter never passes silently.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dynamics import BathSpec
from .gaussian import nbar_from_temperature
from .modulation import SinusoidalModulation, TwoStepModulation


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TwoStepSpec:
    f1: float
    f2: float
    t1: float
    t2: float
    kind: str = field(default="twostep", init=False)

    def build(self) -> TwoStepModulation:
        return TwoStepModulation(self.f1, self.f2, self.t1, self.t2)


@dataclass(frozen=True)
class SinusoidalSpec:
    n0: float
    dn: float
    omega: float
    kind: str = field(default="sinusoidal", init=False)

    def build(self) -> SinusoidalModulation:
        return SinusoidalModulation(self.n0, self.dn, self.omega)


@dataclass(frozen=True)
class BathConfig:
    gamma: float
    nbar: float | None = None
    temperature: float | None = None


@dataclass(frozen=True)
class RunConfig:
    t_end: float
    snapshot_interval: float | None = None
    rel_tol: float = 1e-11
    abs_tol: float = 1e-13


@dataclass(frozen=True)
class SweepConfig:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class GridAxis:
    start: float
    stop: float
    num: int

    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class GridConfig:
    theta1: GridAxis
    theta2: GridAxis


@dataclass(frozen=True)
class OutputConfig:
    path: str = "out.csv"
    format: str = "csv"


@dataclass(frozen=True)
class ExperimentConfig:
    cavity: str
    modulation: TwoStepSpec | SinusoidalSpec
    bath: BathConfig
    run: RunConfig
    output: OutputConfig = OutputConfig()
    sweep: SweepConfig | None = None
    grid: GridConfig | None = None

    def profile(self):
        return self.modulation.build()

    def bath_spec(self) -> BathSpec:
        nbar = self.bath.nbar
        if nbar is None:
            nbar = nbar_from_temperature(self.profile().f0, self.bath.temperature)
        return BathSpec(self.bath.gamma, nbar)

    def to_dict(self) -> dict[str, Any]:
        return _to_dict(self)

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def content_hash(self) -> str:
        """Git blob hash of the canonical TOML text."""
        data = self.dumps().encode()
        return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _to_dict(cfg: ExperimentConfig) -> dict[str, Any]:
    def clean(obj):
        d = {}
        for f in dataclasses.fields(obj):
            v = getattr(obj, f.name)
            if v is None:
                continue
            if dataclasses.is_dataclass(v):
                v = clean(v)
            elif isinstance(v, tuple):
                v = list(v)
            d[f.name] = v
        return d

    out = {"cavity": cfg.cavity, "modulation": clean(cfg.modulation), "bath": clean(cfg.bath), "run": clean(cfg.run)}
    # the tag goes first for readability
    out["modulation"] = {"kind": cfg.modulation.kind, **{k: v for k, v in out["modulation"].items() if k != "kind"}}
    if cfg.sweep is not None:
        out["sweep"] = clean(cfg.sweep)
    if cfg.grid is not None:
        out["grid"] = clean(cfg.grid)
    out["output"] = clean(cfg.output)
    return out


def _take(table: dict, section: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(table, dict):
        raise ConfigError(f"[{section}] must be a table")
    unknown = set(table) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
    missing = [k for k in required if k not in table]
    if missing:
        raise ConfigError(f"missing key(s) in [{section}]: {', '.join(missing)}")
    return dict(table)


def _num(value, where: str, positive=False, nonneg=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where} must be finite")
    if positive and value <= 0:
        raise ConfigError(f"{where} must be positive")
    if nonneg and value < 0:
        raise ConfigError(f"{where} must be non-negative")
    return value


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a parsed TOML document and build an ExperimentConfig."""
    top = _take(data, "top level", ("cavity", "modulation", "bath", "run"), ("output", "sweep", "grid"))
    cavity = top["cavity"]
    if cavity not in ("linear", "ring"):
        raise ConfigError(f"cavity must be 'linear' or 'ring', got {cavity!r}")

    mod = top["modulation"]
    if not isinstance(mod, dict) or "kind" not in mod:
        raise ConfigError("[modulation] needs a 'kind' tag ('twostep' or 'sinusoidal')")
    if mod["kind"] == "twostep":
        m = _take(mod, "modulation", ("kind", "f1", "f2", "t1", "t2"))
        modulation = TwoStepSpec(*(_num(m[k], f"modulation.{k}", positive=True) for k in ("f1", "f2", "t1", "t2")))
    elif mod["kind"] == "sinusoidal":
        m = _take(mod, "modulation", ("kind", "n0", "dn", "omega"))
        modulation = SinusoidalSpec(
            _num(m["n0"], "modulation.n0", positive=True),
            _num(m["dn"], "modulation.dn", nonneg=True),
            _num(m["omega"], "modulation.omega", positive=True),
        )
    else:
        raise ConfigError(f"unknown modulation kind {mod['kind']!r}")

    b = _take(top["bath"], "bath", ("gamma",), ("nbar", "temperature"))
    if ("nbar" in b) == ("temperature" in b):
        raise ConfigError("[bath] needs exactly one of 'nbar' or 'temperature'")
    bath = BathConfig(
        _num(b["gamma"], "bath.gamma", nonneg=True),
        _num(b["nbar"], "bath.nbar", nonneg=True) if "nbar" in b else None,
        _num(b["temperature"], "bath.temperature", nonneg=True) if "temperature" in b else None,
    )

    r = _take(top["run"], "run", ("t_end",), ("snapshot_interval", "rel_tol", "abs_tol"))
    run = RunConfig(
        _num(r["t_end"], "run.t_end", positive=True),
        _num(r["snapshot_interval"], "run.snapshot_interval", positive=True) if "snapshot_interval" in r else None,
        _num(r.get("rel_tol", RunConfig.rel_tol), "run.rel_tol", positive=True),
        _num(r.get("abs_tol", RunConfig.abs_tol), "run.abs_tol", positive=True),
    )

    o = _take(top.get("output", {}), "output", (), ("path", "format"))
    output = OutputConfig(str(o.get("path", OutputConfig.path)), str(o.get("format", OutputConfig.format)))
    if output.format not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {output.format!r}")

    cfg = ExperimentConfig(cavity, modulation, bath, run, output)

    if "sweep" in top:
        s = _take(top["sweep"], "sweep", ("parameter",), ("values", "start", "stop", "num"))
        if "values" in s:
            if any(k in s for k in ("start", "stop", "num")):
                raise ConfigError("[sweep] takes either 'values' or 'start'/'stop'/'num', not both")
            values = tuple(_num(v, "sweep.values") for v in s["values"])
        else:
            _take(s, "sweep", ("parameter", "start", "stop", "num"))
            num = s["num"]
            if isinstance(num, bool) or not isinstance(num, int) or num < 1:
                raise ConfigError("sweep.num must be a positive integer")
            values = tuple(float(v) for v in np.linspace(_num(s["start"], "sweep.start"), _num(s["stop"], "sweep.stop"), num))
        if not values:
            raise ConfigError("sweep needs at least one value")
        _check_sweep_path(cfg, s["parameter"])
        cfg = dataclasses.replace(cfg, sweep=SweepConfig(s["parameter"], values))

    if "grid" in top:
        g = _take(top["grid"], "grid", ("theta1", "theta2"))
        axes = []
        for name in ("theta1", "theta2"):
            a = _take(g[name], f"grid.{name}", ("start", "stop", "num"))
            num = a["num"]
            if isinstance(num, bool) or not isinstance(num, int) or num < 1:
                raise ConfigError(f"grid.{name}.num must be a positive integer")
            start, stop = _num(a["start"], f"grid.{name}.start"), _num(a["stop"], f"grid.{name}.stop")
            if num > 1 and start == stop:
                raise ConfigError(f"grid.{name} must span a non-empty range")
            axes.append(GridAxis(start, stop, num))
        cfg = dataclasses.replace(cfg, grid=GridConfig(*axes))
    return cfg


def _check_sweep_path(cfg: ExperimentConfig, path: str) -> None:
    parts = path.split(".")
    if len(parts) != 2 or parts[0] not in ("modulation", "bath", "run"):
        raise ConfigError(f"sweep parameter must look like 'bath.nbar', got {path!r}")
    section = getattr(cfg, parts[0])
    names = {f.name for f in dataclasses.fields(section) if f.name != "kind"}
    if parts[1] not in names or getattr(section, parts[1]) is None:
        raise ConfigError(f"sweep parameter {path!r} does not name a scalar set in this config")


def with_parameter(cfg: ExperimentConfig, path: str, value: float) -> ExperimentConfig:
    """Copy of ``cfg`` with one scalar field replaced (used by sweeps)."""
    _check_sweep_path(cfg, path)
    section, name = path.split(".")
    new = dataclasses.replace(getattr(cfg, section), **{name: float(value)})
    return dataclasses.replace(cfg, **{section: new})


def loads_config(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    return parse_config(data)


def load_config(path: str | Path) -> ExperimentConfig:
    return loads_config(Path(path).read_text(encoding="utf-8"))
