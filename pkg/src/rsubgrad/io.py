"""Text formats: run configs, instance files, trace CSVs and report CSVs.

All floats are written with 17 significant digits so files reload bit-exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import BoundReport
from .feasibility import FeasibilityInstance
from .geometry import make_manifold
from .solver import IterateRecord, IterateTrace

TRACE_HEADER = "k,f,gap,step,subgrad_norm,dist_ref"
REPORT_HEADER = "N,lhs,rhs,margin"
INSTANCE_MAGIC = "# rsubgrad feasibility instance v1"


class ConfigError(ValueError):
    """Bad configuration value; ``field`` names the offending key."""

    def __init__(self, field: str, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"field {field!r}{where}: {message}")
        self.field = field
        self.line = line


def fmt(x: float) -> str:
    return format(float(x), ".17g")


_PI_RE = re.compile(r"^\s*([-+]?[0-9.eE+-]*?)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_float(text: str) -> float:
    """Float, also accepting multiples of pi such as ``pi/16`` or ``2*pi``."""
    text = text.strip()
    m = _PI_RE.match(text)
    if m:
        coef = m.group(1)
        val = (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * math.pi
        if m.group(2):
            val /= float(m.group(2))
        return val
    return float(text)


# ---------------------------------------------------------------- run config

@dataclass
class RunConfig:
    manifold: str = "spd"
    n: Optional[int] = None
    m: Optional[int] = None
    r: Optional[float] = None
    eps: Optional[float] = None
    lam: Optional[float] = None
    seed: int = 0
    rule: Optional[str] = None
    alpha_factor: float = 1.9999
    alpha_kappa: Optional[float] = None
    kappa: Optional[float] = None
    max_iter: int = 1000
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def instance_params(self) -> dict:
        defaults = CONFIG_DEFAULTS[self.manifold]
        params = {k: getattr(self, k) if getattr(self, k) is not None else defaults[k]
                  for k in ("n", "m", "r", "eps")}
        if self.manifold == "sphere":
            params["lam"] = self.lam
        elif self.kappa is not None:
            params["kappa"] = self.kappa
        return params

    @property
    def step_rule(self) -> str:
        return self.rule or CONFIG_DEFAULTS[self.manifold]["rule"]


CONFIG_DEFAULTS = {
    "spd": {"n": 10, "m": 10, "r": 1.0, "eps": 0.1, "rule": "exogenous"},
    "sphere": {"n": 200, "m": 50, "r": math.pi / 16, "eps": 0.001, "rule": "polyak"},
}

# key -> (attribute, parser)
CONFIG_KEYS = {
    "manifold": ("manifold", str),
    "n": ("n", int),
    "m": ("m", int),
    "r": ("r", parse_float),
    "eps": ("eps", parse_float),
    "lambda": ("lam", parse_float),
    "seed": ("seed", int),
    "rule": ("rule", str),
    "alpha_factor": ("alpha_factor", parse_float),
    "alpha_kappa": ("alpha_kappa", parse_float),
    "kappa": ("kappa", parse_float),
    "max_iter": ("max_iter", int),
    "out": ("out", str),
}


def _set_config(cfg: RunConfig, key: str, raw: str, line: int | None = None):
    key = key.strip().replace("-", "_")
    if key not in CONFIG_KEYS:
        raise ConfigError(key, "unknown key", line)
    attr, parse = CONFIG_KEYS[key]
    try:
        value = parse(raw.strip())
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw.strip()!r} as {parse.__name__}", line) from None
    setattr(cfg, attr, value)


def validate_config(cfg: RunConfig) -> RunConfig:
    if cfg.manifold not in CONFIG_DEFAULTS:
        raise ConfigError("manifold", f"expected 'spd' or 'sphere', got {cfg.manifold!r}")
    if cfg.step_rule not in ("exogenous", "polyak"):
        raise ConfigError("rule", f"expected 'exogenous' or 'polyak', got {cfg.step_rule!r}")
    p = cfg.instance_params()
    if p["n"] < 2:
        raise ConfigError("n", f"must be >= 2, got {p['n']}")
    if p["m"] < 1:
        raise ConfigError("m", f"must be >= 1, got {p['m']}")
    if not p["r"] > 0:
        raise ConfigError("r", f"must be positive, got {p['r']}")
    if cfg.manifold == "sphere" and not p["r"] < math.pi / 4:
        raise ConfigError("r", f"must be below pi/4 on the sphere, got {p['r']}")
    if not p["eps"] > 0:
        raise ConfigError("eps", f"must be positive, got {p['eps']}")
    if cfg.lam is not None and not 0 <= cfg.lam < 1:
        raise ConfigError("lambda", f"must lie in [0, 1), got {cfg.lam}")
    if cfg.kappa is not None:
        if cfg.kappa > 0:
            raise ConfigError("kappa", f"must be <= 0, got {cfg.kappa}")
        if cfg.manifold == "sphere" and cfg.kappa != 0:
            raise ConfigError("kappa", "the sphere's curvature lower bound is fixed at 0")
    if cfg.alpha_kappa is not None and cfg.alpha_kappa > 0:
        raise ConfigError("alpha_kappa", f"must be <= 0, got {cfg.alpha_kappa}")
    if not 0 < cfg.alpha_factor < 2:
        raise ConfigError("alpha_factor", f"must lie in (0, 2), got {cfg.alpha_factor}")
    if cfg.max_iter < 1:
        raise ConfigError("max_iter", f"must be >= 1, got {cfg.max_iter}")
    return cfg


def read_config(path: str, cfg: RunConfig | None = None) -> RunConfig:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    cfg = cfg or RunConfig()
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(line.split()[0], "expected 'key = value'", lineno)
            key, raw = line.split("=", 1)
            _set_config(cfg, key, raw, lineno)
    return cfg


def update_config(cfg: RunConfig, overrides: dict) -> RunConfig:
    for key, raw in overrides.items():
        if raw is not None:
            _set_config(cfg, key, str(raw))
    return cfg


# ------------------------------------------------------------ instance files

def _write_point(lines: list, label: str, x: np.ndarray):
    lines.append(f"[{label}]")
    rows = x.reshape(1, -1) if x.ndim == 1 else x
    for row in rows:
        lines.append(" ".join(fmt(v) for v in row))


def dumps_instance(inst: FeasibilityInstance) -> str:
    man = inst.manifold
    lines = [
        INSTANCE_MAGIC,
        f"manifold = {man.kind}",
        f"n = {man.n}",
        f"m = {inst.m}",
        f"r = {fmt(inst.r)}",
        f"eps = {fmt(inst.eps)}",
        f"seed = {inst.seed}",
        f"kappa = {fmt(man.kappa)}",
        f"lambda = {'none' if inst.lam is None else fmt(inst.lam)}",
    ]
    _write_point(lines, "q", inst.q)
    _write_point(lines, "p0", inst.p0)
    for i, a in enumerate(inst.centers):
        _write_point(lines, f"center {i}", a)
    return "\n".join(lines) + "\n"


def loads_instance(text: str) -> FeasibilityInstance:
    lines = text.splitlines()
    if not lines or lines[0].strip() != INSTANCE_MAGIC:
        raise ConfigError("header", "not an instance file", 1)
    header: dict[str, str] = {}
    sections: dict[str, list] = {}
    current = None
    for lineno, line in enumerate(lines[1:], 2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif current is None:
            if "=" not in line:
                raise ConfigError(line.split()[0], "expected 'key = value'", lineno)
            key, raw = line.split("=", 1)
            header[key.strip()] = raw.strip()
        else:
            try:
                sections[current].append([float(v) for v in line.split()])
            except ValueError:
                raise ConfigError(current, "non-numeric coordinate", lineno) from None
    try:
        kind = header["manifold"]
        n = int(header["n"])
        m = int(header["m"])
        man = make_manifold(kind, n, float(header["kappa"]))
        lam = None if header.get("lambda", "none") == "none" else float(header["lambda"])
        r, eps, seed = float(header["r"]), float(header["eps"]), int(header["seed"])
    except KeyError as exc:
        raise ConfigError(exc.args[0], "missing from instance header") from None
    except ValueError as exc:
        raise ConfigError("header", str(exc)) from None

    def point(label):
        if label not in sections:
            raise ConfigError(label, "missing section")
        arr = np.array(sections[label], dtype=float)
        arr = arr.reshape(man.shape) if arr.size == np.prod(man.shape) else None
        if arr is None:
            raise ConfigError(label, f"expected {np.prod(man.shape)} coordinates")
        return arr

    centers = [point(f"center {i}") for i in range(m)]
    return FeasibilityInstance(man, centers, r, eps, point("q"), point("p0"), seed, lam)


def write_instance(path: str, inst: FeasibilityInstance):
    with open(path, "w") as fh:
        fh.write(dumps_instance(inst))


def read_instance(path: str) -> FeasibilityInstance:
    with open(path) as fh:
        return loads_instance(fh.read())


# ---------------------------------------------------------------- trace CSV

def dumps_trace(trace: IterateTrace, meta: dict | None = None) -> str:
    lines = [TRACE_HEADER]
    for rec in trace.records:
        lines.append(",".join([str(rec.k)] + [fmt(v) for v in (
            rec.value, rec.gap, rec.step, rec.subgrad_norm, rec.dist_ref)]))
    lines.append(f"# reason={trace.reason}")
    for key, value in (meta or {}).items():
        lines.append(f"# {key}={fmt(value) if isinstance(value, float) else value}")
    return "\n".join(lines) + "\n"


def loads_trace(text: str) -> tuple[IterateTrace, dict]:
    """Parse a trace CSV; returns the trace (points omitted) and footer metadata."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise ConfigError("header", f"trace CSV must start with {TRACE_HEADER!r}", 1)
    trace = IterateTrace()
    meta: dict[str, str] = {}
    best = math.inf
    for lineno, line in enumerate(lines[1:], 2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
            continue
        cells = line.split(",")
        if len(cells) != 6:
            raise ConfigError("row", f"expected 6 columns, got {len(cells)}", lineno)
        try:
            k = int(cells[0])
            f, gap, step, ns, dref = (float(c) for c in cells[1:])
        except ValueError:
            raise ConfigError("row", "non-numeric cell", lineno) from None
        best = min(best, f)
        trace.records.append(IterateRecord(k, None, f, step, ns, gap, dref, best))
    trace.reason = meta.get("reason", "")
    if "f_star" in meta:
        trace.f_star = float(meta["f_star"])
    if "tau" in meta:
        trace.lipschitz = float(meta["tau"])
    return trace, meta


def write_trace(path: str, trace: IterateTrace, meta: dict | None = None):
    with open(path, "w") as fh:
        fh.write(dumps_trace(trace, meta))


def read_trace(path: str) -> tuple[IterateTrace, dict]:
    with open(path) as fh:
        return loads_trace(fh.read())


# --------------------------------------------------------------- report CSV

def dumps_report(report: BoundReport) -> str:
    lines = [REPORT_HEADER]
    for N, lhs, rhs, mg in zip(report.N, report.lhs, report.rhs, report.margin):
        lines.append(f"{int(N)},{fmt(lhs)},{fmt(rhs)},{fmt(mg)}")
    lines.append(f"# theorem={report.theorem}")
    return "\n".join(lines) + "\n"


def loads_report(text: str) -> BoundReport:
    lines = text.splitlines()
    if not lines or lines[0].strip() != REPORT_HEADER:
        raise ConfigError("header", f"report CSV must start with {REPORT_HEADER!r}", 1)
    rows = []
    theorem = ""
    for lineno, line in enumerate(lines[1:], 2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            if key.strip() == "theorem":
                theorem = value.strip()
            continue
        cells = line.split(",")
        if len(cells) != 4:
            raise ConfigError("row", f"expected 4 columns, got {len(cells)}", lineno)
        try:
            rows.append((int(cells[0]), float(cells[1]), float(cells[2])))
        except ValueError:
            raise ConfigError("row", "non-numeric cell", lineno) from None
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    return BoundReport(theorem, arr[:, 0].astype(int), arr[:, 1], arr[:, 2])


def write_report(path: str, report: BoundReport):
    with open(path, "w") as fh:
        fh.write(dumps_report(report))


def read_report(path: str) -> BoundReport:
    with open(path) as fh:
        return loads_report(fh.read())
