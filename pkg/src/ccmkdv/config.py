"""Run configuration: physics parameters, grid, tolerances and output, stored as YAML.

Complex numbers are written as strings like ``"0.88+1.0i"`` using the
shortest round-trip float repr, so a file written here and read back gives
bit-identical runs.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .tau import PHASE_DEFAULT, PHASE_REGULAR, SolitonConfig

DEFAULT_THRESHOLDS = {
    "bilinear-a": 1e-9,
    "bilinear-b": 1e-9,
    "bilinear-c": 1e-9,
    "toda": 1e-9,
    "pde": 1e-9,
    "conjugacy": 1e-9,
    "evolve": 1e-4,
}
SUITES = tuple(DEFAULT_THRESHOLDS)
PHASE_NAMES = {"default": PHASE_DEFAULT, "regular": PHASE_REGULAR, "none": 0.0}


def parse_complex(s) -> complex:
    """Parse ``"a+bi"``, ``"a-bj"``, ``"bi"``, ``"a"``, ``"-i"`` and plain numbers."""
    if isinstance(s, (int, float, complex)) and not isinstance(s, bool):
        return complex(s)
    text = str(s).strip().replace(" ", "")
    if not text:
        raise ConfigError("empty complex number")
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        pass
    # complex() rejects a bare unit like "1+j"; patch in the coefficient
    fixed = re.sub(r"(^|[+-])([ij])$", r"\g<1>1\2", text).replace("i", "j")
    try:
        return complex(fixed)
    except ValueError:
        raise ConfigError(f"cannot parse complex number {s!r}") from None


def format_complex(z: complex) -> str:
    z = complex(z)
    im = z.imag
    sign = "-" if (im < 0 or (im == 0 and math.copysign(1.0, im) < 0)) else "+"
    return f"{z.real!r}{sign}{abs(im)!r}i"


def parse_phase(v) -> float:
    if isinstance(v, str):
        key = v.strip().lower()
        if key in PHASE_NAMES:
            return PHASE_NAMES[key]
        m = re.fullmatch(r"([+-]?)pi/2", key)
        if m:
            return -math.pi / 2 if m.group(1) == "-" else math.pi / 2
        try:
            return float(key)
        except ValueError:
            raise ConfigError(f"unknown conjugate phase {v!r}; use default, regular, none, +-pi/2 or a number") from None
    return float(v)


def _pair(v, name):
    if isinstance(v, str):
        v = [x for x in v.split(",") if x.strip()]
    try:
        out = tuple(float(x) for x in v)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be two numbers, got {v!r}") from None
    if len(out) != 2:
        raise ConfigError(f"{name} needs exactly two values, got {len(out)}")
    return out


@dataclass(frozen=True)
class Grid:
    x_lo: float = -10.0
    x_hi: float = 10.0
    nx: int = 201
    t_lo: float = -5.0
    t_hi: float = 5.0
    nt: int = 51

    def __post_init__(self):
        for name in ("x_lo", "x_hi", "t_lo", "t_hi"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"grid bound {name} must be finite")
        if self.nx < 2 or self.nt < 2:
            raise ConfigError("grid counts must be at least 2")
        if self.x_hi <= self.x_lo or self.t_hi < self.t_lo:
            raise ConfigError("grid ranges must be increasing")

    @classmethod
    def parse(cls, spec: str) -> "Grid":
        """``XLO:XHI:NX,TLO:THI:NT``."""
        try:
            xs, ts = spec.split(",")
            xl, xh, nx = xs.split(":")
            tl, th, nt = ts.split(":")
            return cls(float(xl), float(xh), int(nx), float(tl), float(th), int(nt))
        except ValueError:
            raise ConfigError(f"grid must look like XLO:XHI:NX,TLO:THI:NT, got {spec!r}") from None

    def axes(self):
        return np.linspace(self.x_lo, self.x_hi, self.nx), np.linspace(self.t_lo, self.t_hi, self.nt)

    def mesh(self):
        """Flattened lab points in t-major order."""
        xa, ta = self.axes()
        T, X = np.meshgrid(ta, xa, indexing="ij")
        return X.reshape(-1), T.reshape(-1)


@dataclass(frozen=True)
class EvolveSettings:
    x_lo: float = -20.0
    x_hi: float = 20.0
    dx: float = 0.05
    T: float = 0.05
    cfl: float = 0.5
    order_check: bool = False


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run of the command-line tool."""

    rho: tuple[float, float] = (1.0, 1.0)
    alpha: tuple[float, float] = (2.0, 1.0)
    p: tuple[complex, ...] = ()
    xi0: tuple[complex, ...] | None = None
    c: float = 1.0
    conj_phase: float = PHASE_DEFAULT
    paper_rounded: bool = False
    check_reduction: bool = True
    grid: Grid = field(default_factory=Grid)
    backend: str = "expsum"
    verify_points: int = 400
    seed: int = 0
    evolve: EvolveSettings = field(default_factory=EvolveSettings)
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"output format must be csv or json, got {self.format!r}")
        if self.backend not in ("expsum", "pfaffian"):
            raise ConfigError(f"backend must be expsum or pfaffian, got {self.backend!r}")
        unknown = set(self.tolerances) - set(SUITES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")
        if self.verify_points < 1:
            raise ConfigError("verify_points must be positive")

    def soliton(self) -> SolitonConfig:
        return SolitonConfig(self.rho, self.alpha, self.p, self.xi0, self.c, self.conj_phase,
                             self.paper_rounded, self.check_reduction)

    def threshold(self, suite: str) -> float:
        return float(self.tolerances.get(suite, DEFAULT_THRESHOLDS[suite]))

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)

    # serialization

    def to_dict(self) -> dict:
        d = {
            "physics": {
                "rho": list(self.rho),
                "alpha": list(self.alpha),
                "c": self.c,
                "p": [format_complex(q) for q in self.p],
                "conj_phase": self.conj_phase,
                "paper_rounded": self.paper_rounded,
                "check_reduction": self.check_reduction,
            },
            "grid": {"x": [self.grid.x_lo, self.grid.x_hi, self.grid.nx],
                     "t": [self.grid.t_lo, self.grid.t_hi, self.grid.nt]},
            "backend": self.backend,
            "verify": {"points": self.verify_points, "seed": self.seed,
                       "tolerances": dict(self.tolerances),
                       "evolve": dataclasses.asdict(self.evolve)},
            "output": {"path": self.out, "format": self.format},
        }
        if self.xi0 is not None:
            d["physics"]["xi0"] = [format_complex(z) for z in self.xi0]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a mapping")
        d = dict(d)
        phys = dict(d.pop("physics", {}) or {})
        grid = d.pop("grid", None) or {}
        verify = dict(d.pop("verify", {}) or {})
        output = dict(d.pop("output", {}) or {})
        kw = {}
        try:
            if "rho" in phys:
                kw["rho"] = _pair(phys.pop("rho"), "rho")
            if "alpha" in phys:
                kw["alpha"] = _pair(phys.pop("alpha"), "alpha")
            if "c" in phys:
                kw["c"] = float(phys.pop("c"))
            kw["p"] = tuple(parse_complex(q) for q in (phys.pop("p", None) or ()))
            if phys.get("xi0") is not None:
                kw["xi0"] = tuple(parse_complex(z) for z in phys.pop("xi0"))
            phys.pop("xi0", None)
            if "conj_phase" in phys:
                kw["conj_phase"] = parse_phase(phys.pop("conj_phase"))
            for key in ("paper_rounded", "check_reduction"):
                if key in phys:
                    kw[key] = bool(phys.pop(key))
            if grid:
                gx, gt = grid.get("x", [-10, 10, 201]), grid.get("t", [-5, 5, 51])
                kw["grid"] = Grid(float(gx[0]), float(gx[1]), int(gx[2]), float(gt[0]), float(gt[1]), int(gt[2]))
            if "backend" in d:
                kw["backend"] = str(d.pop("backend"))
            if "points" in verify:
                kw["verify_points"] = int(verify.pop("points"))
            if "seed" in verify:
                kw["seed"] = int(verify.pop("seed"))
            kw["tolerances"] = {str(k): float(v) for k, v in (verify.pop("tolerances", None) or {}).items()}
            if verify.get("evolve"):
                kw["evolve"] = EvolveSettings(**verify.pop("evolve"))
            verify.pop("evolve", None)
            if "path" in output:
                kw["out"] = output.pop("path")
            if "format" in output:
                kw["format"] = str(output.pop("format"))
        except (TypeError, ValueError, IndexError, KeyError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed configuration: {exc}") from None
        leftovers = [f"physics.{k}" for k in phys] + [f"verify.{k}" for k in verify] + \
                    [f"output.{k}" for k in output] + list(d)
        if leftovers:
            raise ConfigError(f"unknown configuration keys: {', '.join(sorted(leftovers))}")
        return cls(**kw)

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    def save(self, path) -> None:
        path = Path(path)
        try:
            path.write_text(self.dump(), encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write configuration to {path}: {exc.strerror}") from exc

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc.strerror}") from None
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: not valid YAML ({exc})") from None
        return cls.from_dict(data or {})
