"""INI run configuration: parsing, validation and canonical serialization.

Example::

    [model]
    mode = particular

    [params]
    eps = 0.1
    eta = 1.0
    theta = 1.0
    rho = 1.0
    n = 1.0
    n3 = 1.0
    c_b = 1.0
    c_s = 2.0

    [initial]
    kind = single-mode
    k = 1
    amplitude = 0.05

    [grid]
    grid_size = 32

    [stepper]
    scheme = etdrk2
    t_end = 1.0

A ``[dimensional]`` section may replace ``[params]``; its rates are mapped
through :func:`~.params.nondimensionalize`.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import spectral as sp
from .depth import ExpSineProfile, load_profile_csv
from .errors import ConfigError, InvalidInputError
from .forcing import EXTENSIONS
from .params import ModelParams, nondimensionalize
from .stepper import SCHEMES, StepperConfig

__all__ = ["RunConfig", "parse_config", "serialize", "load_config", "build_initial",
           "build_profiles"]

PARAM_KEYS = ("eps", "eta", "theta", "rho", "tau", "n", "n1", "n2", "n3", "alpha_ratio",
              "c_b", "c_s")
DIM_KEYS = ("d", "d_n", "d_i", "delta", "delta_n", "delta_i", "lambda", "lambda_n", "lambda_i",
            "gamma_n", "chi", "mu", "nu", "sigma_tilde", "length", "height", "tau",
            "sigma_d", "sigma_b", "beta_d", "beta_b", "c_b", "c_s")
SECTIONS = {
    "model": ("mode", "extension"),
    "params": PARAM_KEYS,
    "dimensional": DIM_KEYS,
    "initial": ("kind", "modes", "k", "amplitude", "mean", "seed", "target_a1", "n_modes"),
    "profiles": ("kind", "s_table", "b_table", "tail_rate"),
    "grid": ("grid_size",),
    "stepper": ("scheme", "dt", "t_end", "cfl_safety"),
    "output": ("snapshot_every",),
}
REQUIRED = {"model": ("mode",), "grid": ("grid_size",), "stepper": ("t_end",),
            "initial": ("kind",)}


@dataclass(frozen=True)
class RunConfig:
    """Validated run description.

    ``param_values`` holds the typed keys of whichever parameter section was
    given (``param_source``); :attr:`params` derives the model groups from it.
    """

    mode: str
    extension: str
    param_source: str
    param_values: dict
    initial: dict
    profiles: dict
    grid_size: int
    stepper: StepperConfig
    snapshot_every: int = 0
    base_dir: str = field(default=".", compare=False)

    @property
    def params(self) -> ModelParams:
        return _make_params(self.param_source, self.param_values)

    @property
    def seed(self):
        return self.initial.get("seed")

    def with_seed(self, seed: int) -> "RunConfig":
        if self.initial.get("kind") != "random-small":
            return self
        init = dict(self.initial)
        init["seed"] = int(seed)
        return replace(self, initial=init)


def _line_map(text: str) -> dict:
    """``(section, key) -> line`` for error messages."""
    out = {}
    section = None
    for i, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            out[(section, None)] = i
            continue
        m = re.match(r"\s*([A-Za-z0-9_\-]+)\s*[=:]", line)
        if m and section is not None:
            out[(section, m.group(1).strip().lower())] = i
    return out


class _Reader:
    def __init__(self, cp, lines):
        self.cp = cp
        self.lines = lines

    def err(self, sec, key, msg):
        return ConfigError(msg, key=f"{sec}.{key}" if key else sec,
                           line=self.lines.get((sec, key)))

    def has(self, sec, key):
        return self.cp.has_option(sec, key)

    def str(self, sec, key, default=None):
        if not self.has(sec, key):
            if default is None:
                raise self.err(sec, key, f"missing required key {key!r}")
            return default
        return self.cp.get(sec, key).strip()

    def float(self, sec, key, default=None):
        if not self.has(sec, key):
            if default is None:
                raise self.err(sec, key, f"missing required key {key!r}")
            return default
        raw = self.cp.get(sec, key).strip()
        try:
            v = float(raw)
        except ValueError:
            raise self.err(sec, key, f"expected a number, got {raw!r}") from None
        if not math.isfinite(v):
            raise self.err(sec, key, "value must be finite")
        return v

    def int(self, sec, key, default=None):
        if not self.has(sec, key):
            if default is None:
                raise self.err(sec, key, f"missing required key {key!r}")
            return default
        raw = self.cp.get(sec, key).strip()
        try:
            return int(raw)
        except ValueError:
            raise self.err(sec, key, f"expected an integer, got {raw!r}") from None


def _make_params(source, values) -> ModelParams:
    v = dict(values)
    if source == "params":
        if "n" in v:
            v["n1"] = v["n2"] = v.pop("n")
        return ModelParams(**v)
    d_n = v.get("d_n", v.get("d"))
    d_i = v.get("d_i", v.get("d"))
    kw = dict(
        d_n=d_n, d_i=d_i,
        delta_n=v.get("delta_n", v.get("delta")), delta_i=v.get("delta_i", v.get("delta")),
        lambda_n=v.get("lambda_n", v.get("lambda")),
        lambda_i=v.get("lambda_i", v.get("lambda")),
        gamma_n=v["gamma_n"], chi=v["chi"], mu=v["mu"], nu=v["nu"],
        sigma_tilde=v["sigma_tilde"], length=v["length"], height=v["height"],
        tau=v.get("tau", 1.0), c_b=v.get("c_b", 0.0), c_s=v.get("c_s", 0.0),
    )
    for k in ("sigma_d", "sigma_b", "beta_d", "beta_b"):
        if k in v:
            kw[k] = v[k]
    return nondimensionalize(**kw)


def _parse_modes(raw: str):
    """``"k:re[:im] ..."`` into ``{k: complex}``."""
    out = {}
    for tok in raw.replace(",", " ").split():
        parts = tok.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad mode token {tok!r}")
        k = int(parts[0])
        re_ = float(parts[1])
        im = float(parts[2]) if len(parts) == 3 else 0.0
        if k < 0 or k in out:
            raise ValueError(f"mode {k} negative or repeated")
        out[k] = complex(re_, im)
    return out


def _format_modes(modes) -> str:
    return " ".join(f"{k}:{c.real!r}:{c.imag!r}" for k, c in sorted(modes.items()))


def parse_config(text: str, base_dir: str = ".") -> RunConfig:
    """Parse and validate configuration text.

    Raises
    ------
    ConfigError
        Naming the offending ``section.key`` and, when known, its line.
    """
    lines = _line_map(text)
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    for sec in cp.sections():
        if sec not in SECTIONS:
            raise ConfigError(f"unknown section [{sec}]", key=sec, line=lines.get((sec, None)))
        for key in cp.options(sec):
            if key not in SECTIONS[sec]:
                raise ConfigError(f"unknown key {key!r}", key=f"{sec}.{key}",
                                  line=lines.get((sec, key)))
    for sec, keys in REQUIRED.items():
        if not cp.has_section(sec):
            raise ConfigError(f"missing section [{sec}]", key=sec)
    r = _Reader(cp, lines)

    mode = r.str("model", "mode")
    if mode not in ("general", "particular"):
        raise r.err("model", "mode", f"mode must be general or particular, got {mode!r}")
    extension = r.str("model", "extension", "frozen")
    if extension not in EXTENSIONS:
        raise r.err("model", "extension", f"extension must be one of {EXTENSIONS}")

    has_p, has_d = cp.has_section("params"), cp.has_section("dimensional")
    if has_p == has_d:
        raise ConfigError("give exactly one of [params] or [dimensional]", key="params")
    source = "params" if has_p else "dimensional"
    keys = PARAM_KEYS if has_p else DIM_KEYS
    values = {k: r.float(source, k) for k in keys if r.has(source, k)}
    if source == "params" and "n" in values and ("n1" in values or "n2" in values):
        raise r.err("params", "n", "give either n or n1/n2, not both")
    try:
        params = _make_params(source, values)
    except InvalidInputError as exc:
        key = _guess_key(str(exc), values)
        raise r.err(source, key, str(exc)) from None
    except KeyError as exc:
        raise r.err(source, exc.args[0], f"missing required key {exc.args[0]!r}") from None
    except TypeError:
        raise ConfigError("incomplete dimensional block", key="dimensional") from None

    initial = _parse_initial(r)
    profiles = _parse_profiles(r, cp, mode)
    grid_size = r.int("grid", "grid_size")
    if grid_size < 4 or grid_size % 2:
        raise r.err("grid", "grid_size", "grid_size must be even and >= 4")

    scheme = r.str("stepper", "scheme", "etdrk2")
    if scheme not in SCHEMES:
        raise r.err("stepper", "scheme", f"scheme must be one of {SCHEMES}")
    dt = r.float("stepper", "dt") if r.has("stepper", "dt") else None
    t_end = r.float("stepper", "t_end")
    cfl = r.float("stepper", "cfl_safety", 1.0)
    try:
        stepper = StepperConfig(scheme=scheme, t_end=t_end, dt=dt, cfl_safety=cfl)
    except InvalidInputError as exc:
        key = "dt" if "dt" in str(exc) else ("cfl_safety" if "cfl" in str(exc) else "t_end")
        raise r.err("stepper", key, str(exc)) from None
    snap = r.int("output", "snapshot_every", 0) if cp.has_section("output") else 0
    if snap < 0:
        raise r.err("output", "snapshot_every", "snapshot_every must be >= 0")

    cfg = RunConfig(mode, extension, source, values, initial, profiles, grid_size, stepper,
                    snap, base_dir)
    if mode == "particular":
        p = params
        if p.n1 != p.n2 or p.alpha_ratio != 1.0 or p.tau != 1.0:
            raise r.err(source, "n1" if p.n1 != p.n2 else
                        ("alpha_ratio" if p.alpha_ratio != 1.0 else "tau"),
                        "particular mode needs n1 == n2, alpha_ratio == 1 and tau == 1")
    if initial["kind"] == "modes" and max(initial["modes"], default=0) > grid_size // 2 - 1:
        raise r.err("initial", "modes", "a mode exceeds K_max of the grid")
    return cfg


_DIM_CULPRIT = {"eta": "nu", "eps": "height", "n1": "delta_i", "n2": "delta_n",
                "alpha_ratio": "d_i", "theta": "chi", "rho": "mu", "n3": "gamma_n"}


def _guess_key(msg, values):
    head = msg.split(" ", 1)[0]
    if head in _DIM_CULPRIT and head not in values:
        return _DIM_CULPRIT[head]
    for k in sorted(values, key=len, reverse=True):
        if msg.startswith(k):
            return k
    return None


def _parse_initial(r: _Reader) -> dict:
    kind = r.str("initial", "kind")
    out = {"kind": kind}
    allowed = {"modes": {"modes", "mean"}, "single-mode": {"k", "amplitude", "mean"},
               "random-small": {"seed", "target_a1", "n_modes", "mean"}}
    if kind not in allowed:
        raise r.err("initial", "kind", "kind must be modes, single-mode or random-small")
    for key in r.cp.options("initial"):
        if key != "kind" and key not in allowed[kind]:
            raise r.err("initial", key, f"key {key!r} does not apply to kind {kind!r}")
    if r.has("initial", "mean"):
        out["mean"] = r.float("initial", "mean")
    if kind == "modes":
        try:
            out["modes"] = _parse_modes(r.str("initial", "modes"))
        except ValueError as exc:
            raise r.err("initial", "modes", str(exc)) from None
        if 0 in out["modes"]:
            raise r.err("initial", "modes", "set the mean with 'mean', not mode 0")
    elif kind == "single-mode":
        out["k"] = r.int("initial", "k")
        if out["k"] < 1:
            raise r.err("initial", "k", "k must be >= 1")
        out["amplitude"] = r.float("initial", "amplitude")
    else:
        if not r.has("initial", "seed"):
            raise r.err("initial", "seed", "random-small requires an explicit seed")
        out["seed"] = r.int("initial", "seed")
        out["target_a1"] = r.float("initial", "target_a1")
        if not out["target_a1"] > 0:
            raise r.err("initial", "target_a1", "target_a1 must be positive")
        out["n_modes"] = r.int("initial", "n_modes", 8)
        if out["n_modes"] < 1:
            raise r.err("initial", "n_modes", "n_modes must be >= 1")
    return out


def _parse_profiles(r: _Reader, cp, mode) -> dict:
    if not cp.has_section("profiles"):
        return {"kind": "exp-sine"}
    kind = r.str("profiles", "kind", "exp-sine")
    if kind == "exp-sine":
        for key in cp.options("profiles"):
            if key != "kind":
                raise r.err("profiles", key, "exp-sine profiles take amplitudes from c_s, c_b")
        return {"kind": kind}
    if kind != "table":
        raise r.err("profiles", "kind", "kind must be exp-sine or table")
    if mode == "particular":
        raise r.err("profiles", "kind", "particular mode uses exp-sine profiles")
    out = {"kind": kind, "s_table": r.str("profiles", "s_table"),
           "b_table": r.str("profiles", "b_table"), "tail_rate": r.float("profiles", "tail_rate")}
    if not out["tail_rate"] > 0:
        raise r.err("profiles", "tail_rate", "tail_rate must be positive")
    return out


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize(cfg: RunConfig) -> str:
    """Canonical text; ``parse_config(serialize(c)) == c``."""
    out = ["[model]", f"mode = {cfg.mode}", f"extension = {cfg.extension}", ""]
    keys = PARAM_KEYS if cfg.param_source == "params" else DIM_KEYS
    out.append(f"[{cfg.param_source}]")
    out += [f"{k} = {_fmt(cfg.param_values[k])}" for k in keys if k in cfg.param_values]
    out += ["", "[initial]"]
    init = cfg.initial
    out.append(f"kind = {init['kind']}")
    for key in SECTIONS["initial"][1:]:
        if key in init:
            v = _format_modes(init[key]) if key == "modes" else _fmt(init[key])
            out.append(f"{key} = {v}")
    out += ["", "[profiles]"]
    out += [f"{k} = {_fmt(cfg.profiles[k])}" for k in SECTIONS["profiles"] if k in cfg.profiles]
    out += ["", "[grid]", f"grid_size = {cfg.grid_size}", "", "[stepper]",
            f"scheme = {cfg.stepper.scheme}"]
    if cfg.stepper.dt is not None:
        out.append(f"dt = {cfg.stepper.dt!r}")
    out += [f"t_end = {cfg.stepper.t_end!r}", f"cfl_safety = {cfg.stepper.cfl_safety!r}", "",
            "[output]", f"snapshot_every = {cfg.snapshot_every}", ""]
    return "\n".join(out)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, base_dir=str(path.parent))


def build_initial(cfg: RunConfig) -> sp.SpectralField:
    """Initial interface field described by ``cfg.initial``."""
    n = cfg.grid_size
    init = cfg.initial
    coeffs = np.zeros(n // 2, dtype=complex)
    coeffs[0] = init.get("mean", 0.0)
    if init["kind"] == "modes":
        for k, c in init["modes"].items():
            coeffs[k] = c
    elif init["kind"] == "single-mode":
        if init["k"] > n // 2 - 1:
            raise ConfigError("k exceeds K_max", key="initial.k")
        # a cos(kx) has coefficient a/2 at +-k
        coeffs[init["k"]] = init["amplitude"] / 2
    else:
        rng = np.random.default_rng(init["seed"])
        nm = min(init["n_modes"], n // 2 - 1)
        k = np.arange(1, nm + 1)
        c = rng.standard_normal(nm) + 1j * rng.standard_normal(nm)
        c *= np.exp(-0.5 * k)
        scale = init["target_a1"] / (2.0 * np.sum(k * np.abs(c)))
        coeffs[1:nm + 1] = c * scale
    return sp.SpectralField(coeffs, n)


def build_profiles(cfg: RunConfig):
    """``(S, B)`` depth profiles."""
    p = cfg.params
    if cfg.profiles["kind"] == "exp-sine":
        return ExpSineProfile(p.c_s), ExpSineProfile(p.c_b)
    base = Path(cfg.base_dir)
    out = []
    for key in ("s_table", "b_table"):
        path = Path(cfg.profiles[key])
        if not path.is_absolute():
            path = base / path
        try:
            out.append(load_profile_csv(path, cfg.profiles["tail_rate"]))
        except (OSError, InvalidInputError) as exc:
            raise ConfigError(str(exc), key=f"profiles.{key}") from None
    return tuple(out)
