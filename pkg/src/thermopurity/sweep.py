"""Parameter sweeps over (eta, theta, beta) and their CSV/JSON output."""

from __future__ import annotations

import configparser
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import NamedTuple

import numpy as np

from . import __version__, model, purity
from .errors import InvalidSpec, IoError
from .purity import PurityPoint

__all__ = [
    "Axis",
    "SweepSpec",
    "SweepResult",
    "MODES",
    "parse_axis",
    "load_presets",
    "preset",
    "run_sweep",
    "emit",
    "render",
]

PARAMETERS = ("eta", "theta", "beta")
IDENTICAL_KEYS = ("c1", "c3", "m1", "hbar")
MODES = {
    "eta_theta": {"eta", "theta"},
    "beta_theta": {"beta", "theta"},
    "eta_beta": {"eta", "beta"},
    "curve_beta": {"beta"},
    "high_t": {"eta", "theta"},
}
FORMATS = ("csv", "json")
THREADS_ENV = "THERMOPURITY_THREADS"
_CHUNK = 4096


class Axis(NamedTuple):
    name: str
    min: float
    max: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)

    def __str__(self):
        return f"{self.name}:{self.min!r}:{self.max!r}:{self.count}"


def parse_axis(text: str) -> Axis:
    """Parse ``name:min:max:count``."""
    parts = text.split(":")
    if len(parts) != 4:
        raise InvalidSpec(f"axis must look like name:min:max:count, got {text!r}")
    name, lo, hi, count = parts
    try:
        return Axis(name.strip(), float(lo), float(hi), int(count))
    except ValueError as exc:
        raise InvalidSpec(f"bad axis {text!r}: {exc}") from None


@dataclass(frozen=True)
class SweepSpec:
    mode: str
    axis1: Axis
    axis2: Axis | None = None
    fixed: dict = field(default_factory=dict)
    output_format: str = "csv"
    output_path: str | None = None

    def __post_init__(self):
        self.validate()

    @property
    def axes(self) -> tuple[Axis, ...]:
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)

    @property
    def identical(self) -> bool:
        return any(key in self.fixed for key in IDENTICAL_KEYS)

    def validate(self) -> None:
        if self.mode not in MODES:
            raise InvalidSpec(f"unknown mode {self.mode!r}; choose from {sorted(MODES)}")
        if self.output_format not in FORMATS:
            raise InvalidSpec(f"format must be one of {FORMATS}, got {self.output_format!r}")
        names = [axis.name for axis in self.axes]
        for axis in self.axes:
            if axis.name not in PARAMETERS:
                raise InvalidSpec(f"axis name {axis.name!r} not in {PARAMETERS}")
            if axis.count < 2:
                raise InvalidSpec(f"axis {axis.name} needs count >= 2, got {axis.count}")
            if not axis.min < axis.max:
                raise InvalidSpec(f"axis {axis.name} needs min < max")
            if axis.name == "beta" and not axis.min > 0:
                raise InvalidSpec("beta axis must stay > 0")
        if len(set(names)) != len(names):
            raise InvalidSpec(f"repeated axis {names}")
        if set(names) != MODES[self.mode]:
            raise InvalidSpec(f"mode {self.mode} sweeps {sorted(MODES[self.mode])}, got {names}")
        for key, value in self.fixed.items():
            if key not in PARAMETERS + IDENTICAL_KEYS:
                raise InvalidSpec(f"unknown fixed parameter {key!r}")
            if not math.isfinite(value):
                raise InvalidSpec(f"fixed {key} must be finite")
        overlap = set(self.fixed) & set(names)
        if overlap:
            raise InvalidSpec(f"parameters both fixed and swept: {sorted(overlap)}")
        if self.identical:
            self._validate_identical()
            return
        needed = {"eta", "theta"} if self.mode == "high_t" else set(PARAMETERS)
        covered = set(self.fixed) | set(names)
        if covered != needed:
            raise InvalidSpec(
                f"fixed + axis parameters must be exactly {sorted(needed)}, got {sorted(covered)}"
            )
        if "beta" in self.fixed and not self.fixed["beta"] > 0:
            raise InvalidSpec("fixed beta must be > 0")

    def _validate_identical(self) -> None:
        if self.mode != "curve_beta":
            raise InvalidSpec("identical-particle parameters are only allowed in curve_beta mode")
        if set(self.fixed) & set(PARAMETERS):
            raise InvalidSpec("identical-particle sweeps derive eta and theta; do not fix them")
        if not {"c1", "c3"} <= set(self.fixed):
            raise InvalidSpec("identical-particle sweeps need c1 and c3")
        try:
            model.validate(self._identical_params())
        except ValueError as exc:
            raise InvalidSpec(str(exc)) from None

    def _identical_params(self) -> model.OscillatorParams:
        m1 = self.fixed.get("m1", 1.0)
        c1 = self.fixed["c1"]
        return model.OscillatorParams(m1, m1, c1, c1, self.fixed["c3"], self.fixed.get("hbar", 1.0))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "fixed": dict(sorted(self.fixed.items())),
            "axis1": list(self.axis1),
            "axis2": None if self.axis2 is None else list(self.axis2),
            "format": self.output_format,
        }


@dataclass
class SweepResult:
    rows: list[PurityPoint]
    metadata: dict


def load_presets(text: str | None = None) -> dict[str, SweepSpec]:
    """Parse the preset file (the packaged one when ``text`` is None)."""
    if text is None:
        text = resources.files("thermopurity").joinpath("presets.cfg").read_text()
    parser = configparser.ConfigParser()
    parser.read_string(text)
    presets = {}
    for name in parser.sections():
        section = parser[name]
        fixed = {
            key.split(".", 1)[1]: float(value)
            for key, value in section.items()
            if key.startswith("fixed.")
        }
        presets[name] = SweepSpec(
            mode=section["mode"],
            axis1=parse_axis(section["axis1"]),
            axis2=parse_axis(section["axis2"]) if "axis2" in section else None,
            fixed=fixed,
            output_format=section.get("format", "csv"),
        )
    return presets


def preset(name: str) -> SweepSpec:
    presets = load_presets()
    if name not in presets:
        raise InvalidSpec(f"unknown preset {name!r}; available: {sorted(presets)}")
    return presets[name]


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        count = int(raw)
    except ValueError:
        raise InvalidSpec(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return count if count > 0 else (os.cpu_count() or 1)


def _grid(spec: SweepSpec) -> dict[str, np.ndarray]:
    mesh = np.meshgrid(*(axis.values() for axis in spec.axes), indexing="ij")
    columns = {axis.name: values.ravel() for axis, values in zip(spec.axes, mesh)}
    size = columns[spec.axis1.name].size
    for key in PARAMETERS:
        if key not in columns:
            columns[key] = np.full(size, spec.fixed.get(key, 0.0))
    return columns


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate the purity on the spec's grid, axis1 outer and axis2 inner."""
    spec.validate()
    columns = _grid(spec)
    if spec.identical:
        params = spec._identical_params()
        dp = model.derive_decoupled(params)
        columns["eta"][:] = dp.eta
        columns["theta"][:] = dp.theta
        physical_beta = columns["beta"] / (params.hbar * dp.omega)

        def evaluate(part):
            return purity.purity_identical(
                params.C1, params.C3, params.m1, params.hbar, physical_beta[part]
            )

    elif spec.mode == "high_t":

        def evaluate(part):
            return purity.purity_high_t(columns["eta"][part], columns["theta"][part])

    else:

        def evaluate(part):
            return purity.purity_closed(
                columns["eta"][part], columns["theta"][part], columns["beta"][part]
            )

    size = columns["eta"].size
    chunks = [slice(start, min(start + _CHUNK, size)) for start in range(0, size, _CHUNK)]
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        parts = list(pool.map(lambda part: np.atleast_1d(evaluate(part)), chunks))
    values = np.concatenate(parts)

    bad = np.flatnonzero(~((values > 0) & (values <= 1)))
    rows = [
        PurityPoint(float(e), float(t), float(b), float(p))
        for e, t, b, p in zip(columns["eta"], columns["theta"], columns["beta"], values)
    ]
    metadata = {
        "spec": spec.to_dict(),
        "version": __version__,
        "timestamp": os.environ.get("SOURCE_DATE_EPOCH"),
        "range_violations": bad.tolist(),
    }
    return SweepResult(rows, metadata)


def render(result: SweepResult, output_format: str) -> str:
    if output_format == "csv":
        lines = ["eta,theta,beta,purity"]
        lines += [",".join(format(v, ".12g") for v in row) for row in result.rows]
        return "\n".join(lines) + "\n"
    if output_format == "json":
        payload = {"metadata": result.metadata, "rows": [list(row) for row in result.rows]}
        return json.dumps(payload, sort_keys=True) + "\n"
    raise InvalidSpec(f"format must be one of {FORMATS}, got {output_format!r}")


def emit(result: SweepResult, spec: SweepSpec) -> None:
    """Write ``result`` to ``spec.output_path`` in ``spec.output_format``."""
    text = render(result, spec.output_format)
    try:
        with open(spec.output_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except (OSError, TypeError) as exc:
        raise IoError(spec.output_path, exc) from exc
