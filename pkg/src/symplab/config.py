"""Scenario configuration: flat ``key = value`` text with dotted keys.

Lines starting with ``#`` and blank lines are ignored.  Recognised keys::

    theory            maxwell | su2 | gravity | reference-dalembert
    check             adjoint-identity | self-adjoint | conservation | exactness |
                      slice-independence | degeneracy | zero-form | t-tensor | convergence
    dimension         spatial dimension D (1-3)
    grid.L            periodic box size
    grid.N            points per axis (>= 8)
    grid.dt           time step (default 0.25 h)
    grid.steps        evolution steps (default: reach t = 1)
    sampling.points   random sample count
    sampling.seed     RNG seed
    tolerance.<name>  override the tolerance of the record called <name>
    output.report     report path (JSON)
    output.csv        optional CSV flattening of the records
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .errors import ConfigError

THEORIES = ("maxwell", "su2", "gravity", "reference-dalembert")
CHECKS = ("adjoint-identity", "self-adjoint", "conservation", "exactness", "slice-independence",
          "degeneracy", "zero-form", "t-tensor", "convergence")


@dataclass(frozen=True)
class ScenarioConfig:
    theory: str
    check: str
    dimension: int = 3
    L: float = 2 * math.pi
    N: int = 16
    dt: float | None = None
    steps: int | None = None
    points: int = 1000
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)
    report: str = "report.json"
    csv: str | None = None

    @property
    def n(self) -> int:
        return self.dimension + 1

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def time_step(self) -> float:
        return 0.25 * self.h if self.dt is None else self.dt

    @property
    def step_count(self) -> int:
        return max(1, round(1.0 / self.time_step)) if self.steps is None else self.steps

    def at_level(self, N: int) -> ScenarioConfig:
        """Same scenario on an N-point grid; dt and steps scale to keep dt/h and the final time."""
        r = N / self.N
        dt = None if self.dt is None else self.dt / r
        steps = None if self.steps is None else round(self.steps * r)
        return replace(self, N=N, dt=dt, steps=steps)

    def echo(self) -> dict:
        d = asdict(self)
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        return d


_INT = {"dimension", "grid.N", "grid.steps", "sampling.points", "sampling.seed"}
_FLOAT = {"grid.L", "grid.dt"}
_STR = {"theory", "check", "output.report", "output.csv"}
_FIELD = {"dimension": "dimension", "grid.L": "L", "grid.N": "N", "grid.dt": "dt", "grid.steps": "steps",
          "sampling.points": "points", "sampling.seed": "seed", "theory": "theory", "check": "check",
          "output.report": "report", "output.csv": "csv"}


def parse_pairs(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _number(key: str, value: str, kind):
    try:
        x = kind(value)
    except ValueError:
        raise ConfigError(f"{key}: not a valid {kind.__name__}: {value!r}") from None
    if kind is float and not math.isfinite(x):
        raise ConfigError(f"{key}: must be finite")
    return x


def from_pairs(pairs: dict[str, str]) -> ScenarioConfig:
    kw: dict = {}
    tols: dict[str, float] = {}
    for key, value in pairs.items():
        if key.startswith("tolerance."):
            name = key[len("tolerance."):]
            if not name:
                raise ConfigError("tolerance key needs a record name")
            tols[name] = _number(key, value, float)
        elif key in _INT:
            kw[_FIELD[key]] = _number(key, value, int)
        elif key in _FLOAT:
            kw[_FIELD[key]] = _number(key, value, float)
        elif key in _STR:
            kw[_FIELD[key]] = value
        else:
            raise ConfigError(f"unknown key {key!r}")
    for req in ("theory", "check"):
        if req not in kw:
            raise ConfigError(f"missing required key {req!r}")
    cfg = ScenarioConfig(tolerances=tols, **kw)
    validate(cfg)
    return cfg


def validate(cfg: ScenarioConfig) -> None:
    if cfg.theory not in THEORIES:
        raise ConfigError(f"unknown theory {cfg.theory!r}; expected one of {', '.join(THEORIES)}")
    if cfg.check not in CHECKS:
        raise ConfigError(f"unknown check {cfg.check!r}; expected one of {', '.join(CHECKS)}")
    if not 1 <= cfg.dimension <= 3:
        raise ConfigError("dimension must be 1, 2 or 3")
    if cfg.N < 8:
        raise ConfigError("grid.N must be at least 8")
    if not cfg.L > 0:
        raise ConfigError("grid.L must be positive")
    if cfg.dt is not None and not cfg.dt > 0:
        raise ConfigError("grid.dt must be positive")
    if cfg.steps is not None and cfg.steps < 1:
        raise ConfigError("grid.steps must be positive")
    if cfg.points < 1:
        raise ConfigError("sampling.points must be positive")
    if cfg.seed < 0:
        raise ConfigError("sampling.seed must be non-negative")
    for name, tol in cfg.tolerances.items():
        if not tol > 0:
            raise ConfigError(f"tolerance.{name} must be positive")


def loads(text: str, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    pairs = parse_pairs(text)
    pairs.update(overrides or {})
    return from_pairs(pairs)


def load(path: str | Path, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return loads(text, overrides)


def dumps(cfg: ScenarioConfig) -> str:
    lines = [f"theory = {cfg.theory}", f"check = {cfg.check}", f"dimension = {cfg.dimension}",
             f"grid.L = {cfg.L!r}", f"grid.N = {cfg.N}"]
    if cfg.dt is not None:
        lines.append(f"grid.dt = {cfg.dt!r}")
    if cfg.steps is not None:
        lines.append(f"grid.steps = {cfg.steps}")
    lines += [f"sampling.points = {cfg.points}", f"sampling.seed = {cfg.seed}"]
    lines += [f"tolerance.{k} = {v!r}" for k, v in sorted(cfg.tolerances.items())]
    lines.append(f"output.report = {cfg.report}")
    if cfg.csv:
        lines.append(f"output.csv = {cfg.csv}")
    return "\n".join(lines) + "\n"
