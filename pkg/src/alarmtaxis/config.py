"""Run configuration: INI parsing, validation, serialisation and initial data.

A config is a single INI file with the sections ``[domain]``, ``[params]``,
``[control]``, ``[initial]``, ``[run]`` and ``[output]``. Triples such as
``base = 0.5, 0.5, 0.5`` are comma separated. Unknown keys are rejected.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AlarmTaxisError, ConfigError
from .grid import Domain
from .model import ModelParams
from .steady_states import coexistence_foodchain, coexistence_intraguild, reference_state
from .stepper import SimState, StepControl

INITIAL_KINDS = ("constant", "perturbed-steady", "gaussian-bump", "indicator", "from-file")
_KIND_KEYS = {
    "constant": ("value",),
    "perturbed-steady": ("epsilon", "modes"),
    "gaussian-bump": ("base", "amplitude", "center", "width"),
    "indicator": ("base", "amplitude", "lo", "hi"),
    "from-file": ("path",),
}


@dataclass(frozen=True)
class InitialConditionSpec:
    """Initial data recipe; lengths (center, width, lo, hi) are fractions of lx/ly."""

    kind: str = "constant"
    value: tuple = (0.5, 0.5, 0.5)
    base: tuple = (0.0, 0.0, 0.0)
    amplitude: tuple = (1.0, 1.0, 1.0)
    center: tuple = (0.5,)
    width: float = 0.1
    lo: tuple = (0.0,)
    hi: tuple = (0.5,)
    epsilon: float = 0.2
    modes: int = 4
    path: str = ""


@dataclass(frozen=True)
class RunConfig:
    domain: Domain
    params: ModelParams = field(default_factory=ModelParams)
    control: StepControl = field(default_factory=StepControl)
    initial: InitialConditionSpec = field(default_factory=InitialConditionSpec)
    t_end: float = 10.0
    sample_every: float = 1.0
    reference: str = "auto"
    seed: int = 0
    burn_in: float = 100.0
    snapshots: bool = False
    out_dir: str = "out"

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)


# ---------------------------------------------------------------- parsing


def _num(sec, key, cast=float):
    raw = sec[key]
    try:
        val = cast(raw)
    except ValueError:
        raise ConfigError(f"{sec.name}.{key}: cannot parse {raw!r}") from None
    if cast is float and not math.isfinite(val):
        raise ConfigError(f"{sec.name}.{key}: must be finite")
    return val


def _tuple(sec, key, n=None):
    parts = [x.strip() for x in sec[key].split(",") if x.strip()]
    try:
        vals = tuple(float(x) for x in parts)
    except ValueError:
        raise ConfigError(f"{sec.name}.{key}: cannot parse {sec[key]!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"{sec.name}.{key}: expected {n} comma-separated values")
    return vals


def _bool(sec, key):
    try:
        return sec.getboolean(key)
    except ValueError:
        raise ConfigError(f"{sec.name}.{key}: expected true/false") from None


def _check_keys(sec, allowed):
    extra = set(sec.keys()) - set(allowed)
    if extra:
        raise ConfigError(f"{sec.name}.{sorted(extra)[0]}: unknown key")


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for name in cp.sections():
        if name not in ("domain", "params", "control", "initial", "run", "output"):
            raise ConfigError(f"{name}: unknown section")
    if "domain" not in cp:
        raise ConfigError("domain: missing section")

    sec = cp["domain"]
    _check_keys(sec, ("dim", "lx", "nx", "ly", "ny"))
    for key in ("dim", "lx", "nx"):
        if key not in sec:
            raise ConfigError(f"domain.{key}: missing")
    dim = _num(sec, "dim", int)
    try:
        if dim == 2:
            for key in ("ly", "ny"):
                if key not in sec:
                    raise ConfigError(f"domain.{key}: missing for a 2D domain")
            domain = Domain.rectangle(_num(sec, "lx"), _num(sec, "ly"),
                                      _num(sec, "nx", int), _num(sec, "ny", int))
        else:
            domain = Domain(dim, _num(sec, "lx"), _num(sec, "nx", int))
    except AlarmTaxisError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"domain: {exc}") from None

    fields = {f.name for f in dataclasses.fields(ModelParams)}
    kwargs = {}
    if "params" in cp:
        sec = cp["params"]
        _check_keys(sec, fields)
        kwargs = {k: _num(sec, k) for k in sec}
    try:
        params = ModelParams(**kwargs)
    except AlarmTaxisError as exc:
        raise ConfigError(f"params.{str(exc).split()[0]}: {exc}") from None

    ckw = {}
    if "control" in cp:
        sec = cp["control"]
        _check_keys(sec, ("cfl_safety", "dt_max", "clip_epsilon", "reaction_rate_cap", "fixed_dt"))
        for k in sec:
            ckw[k] = None if k == "fixed_dt" and sec[k].strip().lower() in ("", "none") else _num(sec, k)
    try:
        control = StepControl(**ckw)
    except AlarmTaxisError as exc:
        raise ConfigError(f"control.{str(exc).split()[0]}: {exc}") from None

    initial = InitialConditionSpec()
    if "initial" in cp:
        sec = cp["initial"]
        kind = sec.get("kind", "constant").strip()
        if kind not in INITIAL_KINDS:
            raise ConfigError(f"initial.kind: must be one of {', '.join(INITIAL_KINDS)}")
        _check_keys(sec, ("kind",) + _KIND_KEYS[kind])
        ikw = {"kind": kind, "center": (0.5,) * domain.dim,
               "lo": (0.0,) * domain.dim, "hi": (0.5,) * domain.dim}
        for k in sec:
            if k in ("value", "base", "amplitude"):
                ikw[k] = _tuple(sec, k, 3)
                if k != "amplitude" and min(ikw[k]) < 0:
                    raise ConfigError(f"initial.{k}: values must be nonnegative")
            elif k in ("center", "lo", "hi"):
                ikw[k] = _tuple(sec, k, domain.dim)
            elif k in ("width", "epsilon"):
                ikw[k] = _num(sec, k)
            elif k == "modes":
                ikw[k] = _num(sec, k, int)
            elif k == "path":
                ikw[k] = sec[k].strip()
        initial = InitialConditionSpec(**ikw)
        _validate_initial(initial, domain)

    rkw = {}
    if "run" in cp:
        sec = cp["run"]
        _check_keys(sec, ("t_end", "sample_every", "reference", "seed", "burn_in", "snapshots"))
        for k in sec:
            if k == "reference":
                rkw[k] = _validate_reference(sec[k].strip())
            elif k == "seed":
                rkw[k] = _num(sec, k, int)
            elif k == "snapshots":
                rkw[k] = _bool(sec, k)
            else:
                rkw[k] = _num(sec, k)
    if "output" in cp:
        sec = cp["output"]
        _check_keys(sec, ("dir",))
        if "dir" in sec:
            rkw["out_dir"] = sec["dir"].strip()
    cfg = RunConfig(domain, params, control, initial, **rkw)
    if not cfg.t_end >= 0:
        raise ConfigError("run.t_end: must be >= 0")
    if not cfg.sample_every > 0:
        raise ConfigError("run.sample_every: must be > 0")
    return cfg


def _validate_initial(spec: InitialConditionSpec, domain: Domain):
    if spec.kind == "perturbed-steady":
        if not 0 <= spec.epsilon < 1:
            raise ConfigError("initial.epsilon: must lie in [0, 1)")
        if spec.modes < 0:
            raise ConfigError("initial.modes: must be >= 0")
    if spec.kind == "gaussian-bump" and not spec.width > 0:
        raise ConfigError("initial.width: must be > 0")
    if spec.kind in ("gaussian-bump", "indicator"):
        for b, a in zip(spec.base, spec.amplitude):
            if b + min(a, 0.0) < 0:
                raise ConfigError("initial.amplitude: base + amplitude must stay nonnegative")
    if spec.kind == "from-file" and not spec.path:
        raise ConfigError("initial.path: required for from-file")


def _validate_reference(ref: str) -> str:
    if ref in ("auto", "foodchain", "intraguild-branch1", "none"):
        return ref
    try:
        vals = [float(x) for x in ref.split(",")]
    except ValueError:
        vals = []
    if len(vals) != 3 or min(vals) <= 0:
        raise ConfigError(
            "run.reference: expected auto, foodchain, intraguild-branch1, none or a positive triple"
        )
    return ref


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


# ---------------------------------------------------------------- printing


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (tuple, list)):
        return ", ".join(_fmt(v) for v in x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def to_ini(cfg: RunConfig) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    d = cfg.domain
    cp["domain"] = {"dim": _fmt(d.dim), "lx": _fmt(d.lx), "nx": _fmt(d.nx)}
    if d.dim == 2:
        cp["domain"].update(ly=_fmt(d.ly), ny=_fmt(d.ny))
    cp["params"] = {k: _fmt(v) for k, v in cfg.params.as_dict().items()}
    ctl = dataclasses.asdict(cfg.control)
    cp["control"] = {k: ("none" if v is None else _fmt(v)) for k, v in ctl.items()}
    ini = {"kind": cfg.initial.kind}
    for k in _KIND_KEYS[cfg.initial.kind]:
        ini[k] = _fmt(getattr(cfg.initial, k))
    cp["initial"] = ini
    cp["run"] = {
        "t_end": _fmt(cfg.t_end), "sample_every": _fmt(cfg.sample_every),
        "reference": cfg.reference, "seed": _fmt(cfg.seed),
        "burn_in": _fmt(cfg.burn_in), "snapshots": _fmt(cfg.snapshots),
    }
    cp["output"] = {"dir": cfg.out_dir}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# ---------------------------------------------------------------- resolution


def resolve_reference(cfg: RunConfig):
    """Reference steady triple for E/F diagnostics, or None."""
    ref, p = cfg.reference, cfg.params
    if ref == "none":
        return None
    if ref == "auto":
        try:
            st = reference_state(p)
        except AlarmTaxisError:
            return None
        return st.triple if st.positive else None
    if ref == "foodchain":
        st = coexistence_foodchain(p.b1, p.b2)
    elif ref == "intraguild-branch1":
        try:
            st = coexistence_intraguild(p.b1, p.b2, p.b3)[0]
        except AlarmTaxisError as exc:
            raise ConfigError(f"run.reference: {exc}") from None
    else:
        return tuple(float(x) for x in ref.split(","))
    if not st.positive:
        raise ConfigError(f"run.reference: {st.label} is not positive for these parameters")
    return st.triple


def _smooth_perturbation(domain: Domain, modes: int, rng: np.random.Generator) -> np.ndarray:
    """Random cosine series (Neumann-compatible) scaled to max |phi| = 1."""
    coords = domain.coordinates()
    phi = np.zeros(domain.shape)
    ks = range(modes + 1)
    if domain.dim == 1:
        (x,) = coords
        for k in ks:
            phi += rng.uniform(-1, 1) * np.cos(k * np.pi * x / domain.lx)
    else:
        x, y = coords
        for k in ks:
            for l in ks:
                phi += (rng.uniform(-1, 1) * np.cos(k * np.pi * x / domain.lx)
                        * np.cos(l * np.pi * y / domain.ly))
    m = np.abs(phi).max()
    return phi / m if m > 0 else phi


def build_initial(cfg: RunConfig, reference=None) -> SimState:
    spec, domain = cfg.initial, cfg.domain
    if spec.kind == "constant":
        return SimState.homogeneous(domain, spec.value)
    if spec.kind == "perturbed-steady":
        if reference is None:
            raise ConfigError("initial.kind: perturbed-steady needs a resolvable reference state")
        rng = np.random.default_rng(cfg.seed)
        fields = [s * (1 + spec.epsilon * _smooth_perturbation(domain, spec.modes, rng))
                  for s in reference]
        return SimState(0.0, *fields)
    lengths = (domain.lx, domain.ly)[: domain.dim]
    coords = domain.coordinates()
    if spec.kind == "gaussian-bump":
        r2 = sum(((c - f * L) / (spec.width * L)) ** 2
                 for c, f, L in zip(coords, spec.center, lengths))
        shape = np.exp(-0.5 * r2)
    elif spec.kind == "indicator":
        inside = np.ones(domain.shape, dtype=bool)
        for c, lo, hi, L in zip(coords, spec.lo, spec.hi, lengths):
            inside &= (c >= lo * L) & (c <= hi * L)
        shape = inside.astype(float)
    else:
        try:
            data = np.load(spec.path)
            fields = [np.asarray(data[k], dtype=float) for k in "uvw"]
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"initial.path: cannot load u, v, w from {spec.path}: {exc}") from None
        for k, f in zip("uvw", fields):
            if f.shape != domain.shape:
                raise ConfigError(f"initial.path: {k} has shape {f.shape}, expected {domain.shape}")
            if not np.all(np.isfinite(f)) or np.any(f < 0):
                raise ConfigError(f"initial.path: {k} must be finite and nonnegative")
        return SimState(0.0, *fields)
    fields = [np.maximum(b + a * shape, 0.0) for b, a in zip(spec.base, spec.amplitude)]
    return SimState(0.0, *fields)
